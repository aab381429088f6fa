//! Objects of the (S′, U′) plane: the boundary hyperbola, the vector line
//! implied by an observed shock, its chord AB, and the quadrant-IV cells.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{K, L, T};
use crate::model::{EwsMatrix, Economy, RatioPoint};
use crate::scalar::{Scalar, Sign};
use crate::statics::Response;
use crate::tol;

/// The rectangular hyperbola U′ = −r·S′/(S′ + 1) with r = θ_L/θ_K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve<T> {
    pub theta_l_over_k: T,
}

impl<T: Scalar> BoundaryCurve<T> {
    pub fn new(theta_l_over_k: T) -> Self {
        BoundaryCurve { theta_l_over_k }
    }

    pub fn of(e: &Economy<T>) -> Self {
        BoundaryCurve::new(e.theta_l_over_k())
    }

    pub fn u_at(&self, s: T) -> Result<T> {
        boundary_u(s, self.theta_l_over_k)
    }

    /// dU′/dS′ = −r/(S′ + 1)².
    pub fn slope_at(&self, s: T) -> Result<T> {
        let d = s + T::one();
        if d.abs() < T::lit(tol::DEGENERATE) {
            return Err(Error::AsymptoteHit(s.to_f64_lossy()));
        }
        Ok(-self.theta_l_over_k / (d * d))
    }

    /// Horizontal asymptote U′ = −r.
    pub fn horizontal_asymptote(&self) -> T {
        -self.theta_l_over_k
    }

    /// Vertical asymptote S′ = −1.
    pub fn vertical_asymptote(&self) -> T {
        -T::one()
    }

    /// Signed distance-like residual U′(S′+1) + r·S′, zero on the curve and
    /// positive inside the admissible region.
    pub fn implicit(&self, s: T, u: T) -> T {
        u * (s + T::one()) + self.theta_l_over_k * s
    }
}

pub fn boundary_u<T: Scalar>(s: T, theta_l_over_k: T) -> Result<T> {
    let d = s + T::one();
    if d.abs() < T::lit(tol::DEGENERATE) {
        return Err(Error::AsymptoteHit(s.to_f64_lossy()));
    }
    Ok(-theta_l_over_k * s / d)
}

/// Strict region test. With g_LT > 0 the point must lie above the curve, with
/// g_LT < 0 below it.
pub fn region_contains<T: Scalar>(p: &RatioPoint<T>, sign_g_lt: Sign) -> Result<bool> {
    let b = boundary_u(p.s, p.theta_l_over_k)?;
    Ok(match sign_g_lt {
        Sign::Pos => p.u > b,
        Sign::Neg => p.u < b,
        Sign::Zero => false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    I,
    II,
    III,
    IV,
    /// On an axis.
    Boundary,
}

impl Quadrant {
    /// Sign triple of (g_LK, g_LT, g_KT) that places the ratio vector here.
    pub fn implied_signs(self) -> Option<[Sign; 3]> {
        use Sign::{Neg, Pos};
        match self {
            Quadrant::I => Some([Pos, Pos, Pos]),
            Quadrant::II => Some([Neg, Pos, Pos]),
            Quadrant::III => Some([Pos, Neg, Pos]),
            Quadrant::IV => Some([Pos, Pos, Neg]),
            Quadrant::Boundary => None,
        }
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Quadrant::I => "I",
            Quadrant::II => "II",
            Quadrant::III => "III",
            Quadrant::IV => "IV",
            Quadrant::Boundary => "boundary",
        };
        f.write_str(s)
    }
}

pub fn quadrant<T: Scalar>(p: &RatioPoint<T>) -> Quadrant {
    let z = T::zero();
    if p.s == z || p.u == z || !p.s.is_finite() || !p.u.is_finite() {
        return Quadrant::Boundary;
    }
    match (p.s > z, p.u > z) {
        (true, true) => Quadrant::I,
        (false, true) => Quadrant::II,
        (false, false) => Quadrant::III,
        (true, false) => Quadrant::IV,
    }
}

/// G_0 = g_KT θ_K (g_LK + g_LT) + g_LT g_LK θ_L, positive for every valid economy.
pub fn g0<T: Scalar>(g: &EwsMatrix<T>) -> T {
    let th = &g.theta_factor;
    g.g[K][T] * th[K] * (g.g[L][K] + g.g[L][T]) + g.g[L][T] * g.g[L][K] * th[L]
}

/// The line U′ = −a1·S′ + b1 on which the ratio vector must lie given an
/// observed factor-price and coefficient response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VectorLine<T> {
    pub a1: T,
    pub b1: T,
    pub g0: T,
    pub theta_l_over_k: T,
}

impl<T: Scalar> VectorLine<T> {
    pub fn u_at(&self, s: T) -> T {
        -self.a1 * s + self.b1
    }

    /// |U′ − (−a1 S′ + b1)| scaled by max(1, |U′|).
    pub fn residual(&self, p: &RatioPoint<T>) -> T {
        (p.u - self.u_at(p.s)).abs() / T::one().max(p.u.abs())
    }
}

pub fn vector_line<T: Scalar>(resp: &Response<T>, e: &Economy<T>) -> Result<VectorLine<T>> {
    let cutoff = T::lit(tol::DEGENERATE);
    let a = &resp.a0_prime;
    let w = |i: usize, h: usize| resp.w_diff[i][h];
    if a[L].abs() < cutoff {
        return Err(Error::DegenerateShock(format!("a_L0' = {:e}", a[L].to_f64_lossy())));
    }
    if w(K, T).abs() < cutoff {
        return Err(Error::DegenerateShock(format!("w_K* - w_T* = {:e}", w(K, T).to_f64_lossy())));
    }
    let th = &e.theta_factor;
    let g = crate::model::ews_matrix(e);
    Ok(VectorLine {
        a1: a[T] * th[T] * w(L, K) / (a[L] * th[K] * w(K, T)),
        b1: a[K] * w(L, T) / (a[L] * w(K, T)),
        g0: g0(&g),
        theta_l_over_k: e.theta_l_over_k(),
    })
}

/// Which of the two arcs of the vector line between A and B lies inside the
/// admissible region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    /// The ordinary chord: min(S′_A, S′_B) ≤ S′ ≤ max(S′_A, S′_B).
    Finite,
    /// A and B sit on different branches of the hyperbola and the admissible
    /// arc runs through the point at infinity: S′ ≤ min or S′ ≥ max.
    ThroughInfinity,
}

/// Position of a point relative to segment AB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentLocation {
    Inside,
    Endpoint,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentAB<T> {
    pub point_a: RatioPoint<T>,
    pub point_b: RatioPoint<T>,
    pub kind: SegmentKind,
    /// Worst relative gap between the quadratic roots and the closed forms.
    pub closed_form_gap: T,
    pub discriminant: T,
}

impl<T: Scalar> SegmentAB<T> {
    pub fn s_range(&self) -> (T, T) {
        let (a, b) = (self.point_a.s, self.point_b.s);
        (a.min(b), a.max(b))
    }

    /// Classifies `p` by its S′ coordinate, endpoints included.
    pub fn locate(&self, p: &RatioPoint<T>, band: T) -> SegmentLocation {
        let (lo, hi) = self.s_range();
        let scale = |x: T| band * T::one().max(x.abs());
        if (p.s - lo).abs() <= scale(lo) || (p.s - hi).abs() <= scale(hi) {
            return SegmentLocation::Endpoint;
        }
        let between = p.s > lo && p.s < hi;
        let inside = match self.kind {
            SegmentKind::Finite => between,
            SegmentKind::ThroughInfinity => !between,
        };
        if inside {
            SegmentLocation::Inside
        } else {
            SegmentLocation::Outside
        }
    }

    pub fn contains(&self, p: &RatioPoint<T>) -> bool {
        self.locate(p, T::lit(tol::BORDER)) != SegmentLocation::Outside
    }
}

/// Closed-form endpoint A = (−W_TL/W_KL, r·(−W_LT/W_KT)).
pub fn closed_form_a<T: Scalar>(resp: &Response<T>, theta_l_over_k: T) -> Result<RatioPoint<T>> {
    let w = |i: usize, h: usize| resp.w_diff[i][h];
    let cutoff = T::lit(tol::DEGENERATE);
    if w(K, L).abs() < cutoff || w(K, T).abs() < cutoff {
        return Err(Error::DegenerateShock("capital price change equals another factor's".into()));
    }
    Ok(RatioPoint::new(-w(T, L) / w(K, L), theta_l_over_k * (-w(L, T) / w(K, T)), theta_l_over_k))
}

/// Closed-form endpoint B = ((a_K0′/a_T0′)(θ_K/θ_T), a_K0′/a_L0′).
pub fn closed_form_b<T: Scalar>(resp: &Response<T>, e: &Economy<T>) -> Result<RatioPoint<T>> {
    let a = &resp.a0_prime;
    let cutoff = T::lit(tol::DEGENERATE);
    if a[T].abs() < cutoff || a[L].abs() < cutoff {
        return Err(Error::DegenerateShock("vanishing aggregate coefficient change".into()));
    }
    let th = &e.theta_factor;
    Ok(RatioPoint::new(a[K] / a[T] * (th[K] / th[T]), a[K] / a[L], e.theta_l_over_k()))
}

/// Roots of a1·S² − (b1 − a1 + r)·S − b1 = 0, computed without cancellation.
pub fn line_boundary_roots<T: Scalar>(line: &VectorLine<T>) -> Result<([T; 2], T)> {
    let r = line.theta_l_over_k;
    let qa = line.a1;
    let qb = -(line.b1 - line.a1 + r);
    let qc = -line.b1;
    if qa.abs() < T::lit(tol::DEGENERATE) {
        return Err(Error::DegenerateShock("vector line is horizontal".into()));
    }
    let four = T::lit(4.0);
    let disc = qb * qb - four * qa * qc;
    let scale = T::one().max(qb * qb).max((four * qa * qc).abs());
    if disc < T::lit(tol::DISCRIMINANT) * scale {
        return Err(Error::TangentOrComplexRoots(disc.to_f64_lossy()));
    }
    let sq = disc.sqrt();
    let q = -T::lit(0.5) * (qb + qb.signum() * sq);
    if q == T::zero() {
        // qb = 0 and qc = 0 cannot happen with disc > 0 unless both roots are 0 and ±
        return Ok(([sq / (T::lit(2.0) * qa), -sq / (T::lit(2.0) * qa)], disc));
    }
    Ok(([q / qa, qc / q], disc))
}

fn rel_gap<T: Scalar>(x: T, y: T) -> T {
    (x - y).abs() / T::one().max(x.abs()).max(y.abs())
}

/// Intersects the vector line with the boundary and labels the roots A and B
/// by matching them to their closed forms.
pub fn segment_ab<T: Scalar>(line: &VectorLine<T>, resp: &Response<T>, e: &Economy<T>) -> Result<SegmentAB<T>> {
    let r = line.theta_l_over_k;
    let ([s1, s2], disc) = line_boundary_roots(line)?;
    let ca = closed_form_a(resp, r)?;
    let cb = closed_form_b(resp, e)?;
    let straight = rel_gap(s1, ca.s).max(rel_gap(s2, cb.s));
    let swapped = rel_gap(s2, ca.s).max(rel_gap(s1, cb.s));
    let (sa, sb, gap) = if straight <= swapped { (s1, s2, straight) } else { (s2, s1, swapped) };
    let point = |s: T| RatioPoint::new(s, line.u_at(s), r);
    let point_a = point(sa);
    let point_b = point(sb);
    let gap = gap.max(rel_gap(point_a.u, ca.u)).max(rel_gap(point_b.u, cb.u));
    // Along the line, U′(S′+1) + rS′ = −(a1 S′² − (b1 − a1 + r) S′ − b1), so the
    // admissible set is between the roots exactly when a1 > 0.
    let kind = if line.a1 > T::zero() { SegmentKind::Finite } else { SegmentKind::ThroughInfinity };
    Ok(SegmentAB { point_a, point_b, kind, closed_form_gap: gap, discriminant: disc })
}

/// Common intersection of the quadrant-IV border lines.
pub fn point_q<T: Scalar>(e: &Economy<T>) -> Result<RatioPoint<T>> {
    let th = &e.theta_share;
    let a = th[T][0] - th[T][1];
    let b = th[K][0] - th[K][1];
    let ee = th[L][0] - th[L][1];
    let cutoff = T::lit(tol::DEGENERATE);
    if a.abs() < cutoff || ee.abs() < cutoff {
        return Err(Error::DegenerateShares(format!("θ_T1−θ_T2 = {a}, θ_L1−θ_L2 = {ee}")));
    }
    let r = e.theta_l_over_k();
    Ok(RatioPoint::new(b / a, b / ee * r, r))
}

/// Boundary points at S′ = θ_K1/θ_T1 and S′ = θ_K2/θ_T2, in that order.
pub fn points_r<T: Scalar>(e: &Economy<T>) -> [RatioPoint<T>; 2] {
    let r = e.theta_l_over_k();
    let th = &e.theta_share;
    [0, 1].map(|j| {
        let s = th[K][j] / th[T][j];
        let u = -th[K][j] * r / (T::one() - th[L][j]);
        RatioPoint::new(s, u, r)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubregionLabel {
    QuadI,
    QuadII,
    QuadIII,
    P1,
    P2,
    P3,
    #[serde(rename = "QuadIV_unclassified")]
    QuadIvUnclassified,
    Boundary,
}

impl fmt::Display for SubregionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SubregionLabel::QuadI => "QuadI",
            SubregionLabel::QuadII => "QuadII",
            SubregionLabel::QuadIII => "QuadIII",
            SubregionLabel::P1 => "P1",
            SubregionLabel::P2 => "P2",
            SubregionLabel::P3 => "P3",
            SubregionLabel::QuadIvUnclassified => "QuadIV_unclassified",
            SubregionLabel::Boundary => "Boundary",
        };
        f.write_str(s)
    }
}

fn cross<T: Scalar>(a: (T, T), b: (T, T)) -> T {
    a.0 * b.1 - a.1 * b.0
}

/// Which side of the border line Q–R the point is on, relative to the side
/// the boundary curve leaves R towards as S′ increases. Returns the signed
/// perpendicular distance (positive on the tangent side).
fn border_side<T: Scalar>(p: &RatioPoint<T>, q: &RatioPoint<T>, r: &RatioPoint<T>, curve: &BoundaryCurve<T>) -> Result<T> {
    let dir = (r.s - q.s, r.u - q.u);
    let len = (dir.0 * dir.0 + dir.1 * dir.1).sqrt();
    let tangent = (T::one(), curve.slope_at(r.s)?);
    let orient = cross(dir, tangent).signum();
    Ok(orient * cross(dir, (p.s - q.s, p.u - q.u)) / len)
}

/// Quadrant label outside quadrant IV; inside it, the cell P1, P2 or P3
/// bounded by the lines through Q and each R point. Points within the border
/// band of either line are labelled `Boundary`.
pub fn classify_subregion<T: Scalar>(p: &RatioPoint<T>, e: &Economy<T>) -> SubregionLabel {
    match quadrant(p) {
        Quadrant::I => return SubregionLabel::QuadI,
        Quadrant::II => return SubregionLabel::QuadII,
        Quadrant::III => return SubregionLabel::QuadIII,
        Quadrant::Boundary => return SubregionLabel::Boundary,
        Quadrant::IV => {}
    }
    let Ok(q) = point_q(e) else {
        return SubregionLabel::QuadIvUnclassified;
    };
    let [r1, r2] = points_r(e);
    let curve = BoundaryCurve::of(e);
    let (Ok(side2), Ok(side1)) = (border_side(p, &q, &r2, &curve), border_side(p, &q, &r1, &curve)) else {
        return SubregionLabel::QuadIvUnclassified;
    };
    let band = T::lit(tol::BORDER);
    if side2.abs() < band || side1.abs() < band {
        return SubregionLabel::Boundary;
    }
    if side2 > T::zero() {
        SubregionLabel::P1
    } else if side1 < T::zero() {
        SubregionLabel::P3
    } else {
        SubregionLabel::P2
    }
}

/// Signs of a 2x3 output-response matrix, rows goods 1 and 2, columns V_T, V_K, V_L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignMatrix(pub [[Sign; 3]; 2]);

impl SignMatrix {
    pub fn from_values<T: Scalar>(values: &[[T; 3]; 2]) -> Self {
        SignMatrix(values.map(|row| row.map(Sign::strict)))
    }

    pub fn from_values_banded<T: Scalar>(values: &[[T; 3]; 2], band: T) -> Self {
        SignMatrix(values.map(|row| row.map(|x| Sign::of(x, band))))
    }

    fn parse(rows: [[i8; 3]; 2]) -> Self {
        SignMatrix(rows.map(|r| r.map(|x| if x > 0 { Sign::Pos } else { Sign::Neg })))
    }
}

impl fmt::Display for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.0.iter().map(|r| crate::scalar::fmt_signs(r)).collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Sign matrix of the output responses implied by a quadrant-IV cell.
pub fn rybczynski_pattern(label: SubregionLabel) -> Result<SignMatrix> {
    match label {
        SubregionLabel::P1 => Ok(SignMatrix::parse([[1, -1, -1], [-1, 1, 1]])),
        SubregionLabel::P2 => Ok(SignMatrix::parse([[1, -1, 1], [-1, 1, 1]])),
        SubregionLabel::P3 => Ok(SignMatrix::parse([[1, -1, 1], [-1, 1, -1]])),
        other => Err(Error::Unmapped(other.to_string())),
    }
}
