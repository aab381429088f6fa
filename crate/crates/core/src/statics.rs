//! Linearized comparative statics in rates of change ("hat" calculus).
//!
//! The 5x5 system in (w_T*, w_K*, w_L*, X_1*, X_2*) is
//!
//! ```text
//! Σ_i θ_ij w_i*                    = p_j*   (j = 1, 2)
//! Σ_h g_ih w_h* + Σ_j λ_ij X_j*    = V_i*   (i = T, K, L)
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SignMatrix;
use crate::index::{K, L, T};
use crate::linalg;
use crate::model::{epsilon, ews_matrix, Economy, EwsMatrix};
use crate::scalar::{Scalar, Sign};
use crate::tol;

/// Exogenous rates of change: good prices and factor endowments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shock<T> {
    pub p_star: [T; 2],
    pub v_star: [T; 3],
}

impl<T: Scalar> Shock<T> {
    pub fn new(p_star: [T; 2], v_star: [T; 3]) -> Self {
        Shock { p_star, v_star }
    }

    /// Pure relative-price shock p* = (P, 0), V* = 0.
    pub fn price(p: T) -> Self {
        Shock { p_star: [p, T::zero()], v_star: [T::zero(); 3] }
    }

    /// Unit increase in the endowment of factor `i`, prices fixed.
    pub fn endowment(i: usize) -> Self {
        let mut v_star = [T::zero(); 3];
        v_star[i] = T::one();
        Shock { p_star: [T::zero(); 2], v_star }
    }

    /// P = p_1* − p_2*.
    pub fn relative_price_change(&self) -> T {
        self.p_star[0] - self.p_star[1]
    }

    pub fn scaled(&self, a: T) -> Self {
        Shock { p_star: self.p_star.map(|x| x * a), v_star: self.v_star.map(|x| x * a) }
    }

    pub fn negated(&self) -> Self {
        self.scaled(-T::one())
    }
}

/// Ordering of the real factor-price changes (X, Y, Z) = (w_T*, w_K*, w_L*) − p_1*.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ranking {
    #[serde(rename = "X>Y>Z")]
    Xyz,
    #[serde(rename = "X>Z>Y")]
    Xzy,
    #[serde(rename = "Y>X>Z")]
    Yxz,
    #[serde(rename = "Y>Z>X")]
    Yzx,
    #[serde(rename = "Z>X>Y")]
    Zxy,
    #[serde(rename = "Z>Y>X")]
    Zyx,
    #[serde(rename = "tie")]
    Tie,
}

impl Ranking {
    pub const ADMISSIBLE: [Ranking; 4] = [Ranking::Xyz, Ranking::Xzy, Ranking::Zxy, Ranking::Zyx];

    pub fn from_xyz<T: Scalar>(xyz: [T; 3], tie_band: T) -> Ranking {
        let [x, y, z] = xyz;
        if (x - y).abs() < tie_band || (x - z).abs() < tie_band || (y - z).abs() < tie_band {
            return Ranking::Tie;
        }
        match (x > y, x > z, y > z) {
            (true, true, true) => Ranking::Xyz,
            (true, true, false) => Ranking::Xzy,
            (false, true, true) => Ranking::Yxz,
            (false, false, true) => Ranking::Yzx,
            (true, false, false) => Ranking::Zxy,
            (false, false, false) => Ranking::Zyx,
            // x > y > z contradicts x <= z, etc.
            _ => Ranking::Tie,
        }
    }

    /// One of the four orderings compatible with a rise in the relative price
    /// of good 1 under the assumed intensity ranking.
    pub fn is_admissible(self) -> bool {
        Ranking::ADMISSIBLE.contains(&self)
    }

    pub fn label(self) -> &'static str {
        match self {
            Ranking::Xyz => "X>Y>Z",
            Ranking::Xzy => "X>Z>Y",
            Ranking::Yxz => "Y>X>Z",
            Ranking::Yzx => "Y>Z>X",
            Ranking::Zxy => "Z>X>Y",
            Ranking::Zyx => "Z>Y>X",
            Ranking::Tie => "tie",
        }
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Sign pattern of a (T, K, L) triple of coefficient changes. The six labels
/// are the only patterns with at least one negative and one positive entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SignLabel {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl SignLabel {
    pub const ALL: [SignLabel; 6] = [SignLabel::A, SignLabel::B, SignLabel::C, SignLabel::D, SignLabel::E, SignLabel::F];

    pub fn signs(self) -> [Sign; 3] {
        use Sign::{Neg, Pos};
        match self {
            SignLabel::A => [Neg, Pos, Neg],
            SignLabel::B => [Neg, Pos, Pos],
            SignLabel::C => [Pos, Pos, Neg],
            SignLabel::D => [Neg, Neg, Pos],
            SignLabel::E => [Pos, Neg, Pos],
            SignLabel::F => [Pos, Neg, Neg],
        }
    }

    pub fn from_signs(signs: [Sign; 3]) -> Option<SignLabel> {
        SignLabel::ALL.into_iter().find(|l| l.signs() == signs)
    }

    pub fn from_values<T: Scalar>(v: [T; 3], band: T) -> Option<SignLabel> {
        SignLabel::from_signs(v.map(|x| Sign::of(x, band)))
    }

    /// Labels that survive when w_T* > w_L* > w_K*.
    pub fn feasible_under_xzy(self) -> bool {
        matches!(self, SignLabel::A | SignLabel::B | SignLabel::C | SignLabel::D)
    }
}

impl fmt::Display for SignLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Full solution of one shock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response<T> {
    pub shock: Shock<T>,
    pub w_star: [T; 3],
    pub x_star: [T; 2],
    /// a_ij* = Σ_h ε_h^ij w_h*, indexed `[factor][sector]`.
    pub a_star: [[T; 2]; 3],
    /// a_i0′ = Σ_j λ_ij a_ij*.
    pub a0_prime: [T; 3],
    /// a_i0′ from the EWS form Σ_{h≠i} g_ih (w_h* − w_i*).
    pub a0_prime_ews: [T; 3],
    /// W_ih = w_i* − w_h*.
    pub w_diff: [[T; 3]; 3],
    /// (X, Y, Z) = w* − p_1*.
    pub xyz: [T; 3],
    /// H_j / p_j = Σ_i w_i* a_ij* θ_ij.
    pub h_sector: [T; 2],
    /// H_0 = Σ_i w_i* a_i0′ θ_i.
    pub h0: T,
    pub ranking: Ranking,
    pub sign_label: Option<SignLabel>,
    /// Infinity norm of the 5x5 residual.
    pub residual: T,
    pub pivot_ratio: T,
}

impl<T: Scalar> Response<T> {
    pub fn w(&self, i: usize, h: usize) -> T {
        self.w_diff[i][h]
    }

    /// max_j |Σ_i θ_ij a_ij*|
    pub fn cost_minimization_residual(&self, e: &Economy<T>) -> T {
        (0..2)
            .map(|j| (0..3).map(|i| e.theta_share[i][j] * self.a_star[i][j]).sum::<T>().abs())
            .fold(T::zero(), T::max)
    }

    /// |Σ_i a_i0′ θ_i|
    pub fn aggregate_share_residual(&self, e: &Economy<T>) -> T {
        (0..3).map(|i| self.a0_prime[i] * e.theta_factor[i]).sum::<T>().abs()
    }
}

fn system_matrix<T: Scalar>(e: &Economy<T>, g: &EwsMatrix<T>) -> [[T; 5]; 5] {
    let mut m = [[T::zero(); 5]; 5];
    for j in 0..2 {
        for i in 0..3 {
            m[j][i] = e.theta_share[i][j];
        }
    }
    for i in 0..3 {
        for h in 0..3 {
            m[2 + i][h] = g.g[i][h];
        }
        for j in 0..2 {
            m[2 + i][3 + j] = e.lambda_share[i][j];
        }
    }
    m
}

/// Solves the linearized system for one shock and derives every diagnostic.
pub fn solve_linear<T: Scalar>(e: &Economy<T>, shock: &Shock<T>) -> Result<Response<T>> {
    let g = ews_matrix(e);
    let m = system_matrix(e, &g);
    let b = [shock.p_star[0], shock.p_star[1], shock.v_star[0], shock.v_star[1], shock.v_star[2]];
    let sol = linalg::solve(m, b).ok_or(Error::SingularSystem(f64::INFINITY))?;
    if !(sol.pivot_ratio <= T::lit(tol::CONDITION_LIMIT)) {
        return Err(Error::SingularSystem(sol.pivot_ratio.to_f64_lossy()));
    }
    let residual = linalg::residual_norm(&m, &sol.x, &b);
    let w_star = [sol.x[0], sol.x[1], sol.x[2]];
    let x_star = [sol.x[3], sol.x[4]];
    Ok(derive_response(e, &g, shock, w_star, x_star, residual, sol.pivot_ratio))
}

fn derive_response<T: Scalar>(
    e: &Economy<T>,
    g: &EwsMatrix<T>,
    shock: &Shock<T>,
    w_star: [T; 3],
    x_star: [T; 2],
    residual: T,
    pivot_ratio: T,
) -> Response<T> {
    let eps = epsilon(e);
    let mut a_star = [[T::zero(); 2]; 3];
    for i in 0..3 {
        for j in 0..2 {
            a_star[i][j] = (0..3).map(|h| eps[j][i][h] * w_star[h]).sum();
        }
    }
    let a0_prime = [0, 1, 2].map(|i| e.lambda_share[i][0] * a_star[i][0] + e.lambda_share[i][1] * a_star[i][1]);
    let a0_prime_ews = [0, 1, 2].map(|i| {
        (0..3).filter(|&h| h != i).map(|h| g.g[i][h] * (w_star[h] - w_star[i])).sum()
    });
    let mut w_diff = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for h in 0..3 {
            w_diff[i][h] = w_star[i] - w_star[h];
        }
    }
    let xyz = w_star.map(|w| w - shock.p_star[0]);
    let h_sector = [0, 1].map(|j| (0..3).map(|i| w_star[i] * a_star[i][j] * e.theta_share[i][j]).sum());
    let h0 = (0..3).map(|i| w_star[i] * a0_prime[i] * e.theta_factor[i]).sum();
    let band = T::lit(tol::DEGENERATE);
    Response {
        shock: *shock,
        w_star,
        x_star,
        a_star,
        a0_prime,
        a0_prime_ews,
        w_diff,
        xyz,
        h_sector,
        h0,
        ranking: Ranking::from_xyz(xyz, band),
        sign_label: SignLabel::from_values(a0_prime, band),
        residual,
        pivot_ratio,
    }
}

/// Output responses to unit endowment increases, `values[j][i] = X_j* / V_i*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RybczynskiMatrix<T> {
    pub values: [[T; 3]; 2],
    /// Factor-price responses, `w_response[h][i] = w_h* / V_i*`.
    pub w_response: [[T; 3]; 3],
    pub signs: SignMatrix,
    /// Worst full-employment residual over the three unit shocks.
    pub full_employment_residual: T,
}

pub fn rybczynski_matrix<T: Scalar>(e: &Economy<T>) -> Result<RybczynskiMatrix<T>> {
    let g = ews_matrix(e);
    let mut values = [[T::zero(); 3]; 2];
    let mut w_response = [[T::zero(); 3]; 3];
    let mut worst = T::zero();
    for i in 0..3 {
        let r = solve_linear(e, &Shock::endowment(i))?;
        for j in 0..2 {
            values[j][i] = r.x_star[j];
        }
        for h in 0..3 {
            w_response[h][i] = r.w_star[h];
        }
        for row in 0..3 {
            let lhs: T = (0..2).map(|j| e.lambda_share[row][j] * r.x_star[j]).sum::<T>()
                + (0..3).map(|h| g.g[row][h] * r.w_star[h]).sum::<T>();
            let target = if row == i { T::one() } else { T::zero() };
            worst = worst.max((lhs - target).abs());
        }
    }
    Ok(RybczynskiMatrix { signs: SignMatrix::from_values(&values), values, w_response, full_employment_residual: worst })
}

/// Response to a relative-price change with endowments fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceResponse<T> {
    pub p: T,
    pub reversed: bool,
    pub w_star: [T; 3],
    pub xyz: [T; 3],
    pub ranking: Ranking,
    pub response: Response<T>,
}

/// Solves the shock p* = (P, 0), V* = 0. A negative `p` is accepted only with
/// `time_reversal`, in which case the whole shock is negated.
pub fn stolper_samuelson<T: Scalar>(e: &Economy<T>, p: T, time_reversal: bool) -> Result<PriceResponse<T>> {
    let (p_eff, reversed) = if p < T::zero() {
        if !time_reversal {
            return Err(Error::NegativePriceChange(p.to_f64_lossy()));
        }
        (-p, true)
    } else {
        (p, false)
    };
    let response = solve_linear(e, &Shock::price(p_eff))?;
    Ok(PriceResponse { p: p_eff, reversed, w_star: response.w_star, xyz: response.xyz, ranking: response.ranking, response })
}

/// Lines X(Z) and Y(Z) implied by zero profit, with their crossings of Z(Z) = Z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XyzLines<T> {
    /// (D_1, D_2, D_3)
    pub d: [T; 3],
    pub x_slope: T,
    pub x_intercept: T,
    pub y_slope: T,
    pub y_intercept: T,
    /// Z at which Y = Z.
    pub z_where_y_eq_z: T,
    /// Z at which X = Z.
    pub z_where_x_eq_z: T,
}

impl<T: Scalar> XyzLines<T> {
    pub fn x_at(&self, z: T) -> T {
        self.x_intercept + self.x_slope * z
    }

    pub fn y_at(&self, z: T) -> T {
        self.y_intercept + self.y_slope * z
    }
}

pub fn lines_xyz<T: Scalar>(e: &Economy<T>, p: T) -> Result<XyzLines<T>> {
    let th = &e.theta_share;
    let d1 = th[T][0] * th[K][1] - th[K][0] * th[T][1];
    let d2 = th[K][1] * th[L][0] - th[K][0] * th[L][1];
    let d3 = th[T][0] * th[L][1] - th[T][1] * th[L][0];
    let cutoff = T::lit(tol::DEGENERATE);
    if d1.abs() < cutoff {
        return Err(Error::DegenerateShares(format!("D_1 = {d1}")));
    }
    let dt = th[T][0] - th[T][1];
    let dk = th[K][0] - th[K][1];
    if dt.abs() < cutoff || dk.abs() < cutoff {
        return Err(Error::DegenerateShares("equal land or capital shares across sectors".into()));
    }
    Ok(XyzLines {
        d: [d1, d2, d3],
        x_slope: -d2 / d1,
        x_intercept: th[K][0] * p / d1,
        y_slope: -d3 / d1,
        y_intercept: -th[T][0] * p / d1,
        z_where_y_eq_z: -th[T][0] / dt * p,
        z_where_x_eq_z: -th[K][0] / dk * p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    Feasible,
    /// Sign pattern excluded under the X>Z>Y ranking; the data contradict the model.
    Infeasible,
    /// No exclusion applies for this ranking.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Diagnostics {
    pub ranking: Ranking,
    pub aggregate: SignLabel,
    pub verdict: Feasibility,
    /// Per-sector labels; `None` when a sector's pattern has a zero or is single-signed.
    pub sectors: [Option<SignLabel>; 2],
    pub sector_verdicts: [Feasibility; 2],
}

fn feasibility(ranking: Ranking, label: Option<SignLabel>) -> Feasibility {
    match (ranking, label) {
        (Ranking::Xzy, Some(l)) if l.feasible_under_xzy() => Feasibility::Feasible,
        (Ranking::Xzy, _) => Feasibility::Infeasible,
        _ => Feasibility::NotApplicable,
    }
}

/// Classifies a response by the signs of its coefficient changes.
pub fn lemma2_diagnostics<T: Scalar>(r: &Response<T>) -> Result<Lemma2Diagnostics> {
    let band = T::lit(tol::DEGENERATE);
    if let Some(i) = r.a0_prime.iter().position(|x| x.abs() < band) {
        return Err(Error::AmbiguousSign(format!("a0_prime[{i}] = {:e}", r.a0_prime[i].to_f64_lossy())));
    }
    let signs = r.a0_prime.map(Sign::strict);
    let aggregate = SignLabel::from_signs(signs)
        .ok_or_else(|| Error::AmbiguousSign(format!("aggregate signs {} have no label", crate::scalar::fmt_signs(&signs))))?;
    let sectors = [0, 1].map(|j| SignLabel::from_values([r.a_star[T][j], r.a_star[K][j], r.a_star[L][j]], band));
    Ok(Lemma2Diagnostics {
        ranking: r.ranking,
        aggregate,
        verdict: feasibility(r.ranking, Some(aggregate)),
        sector_verdicts: sectors.map(|s| feasibility(r.ranking, s)),
        sectors,
    })
}

/// Second-order quantities of the factor-price variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HChecks<T> {
    /// H_j / p_j.
    pub h_sector: [T; 2],
    pub h0: T,
    /// |Σ_i a_i0′ θ_i|
    pub d10_residual: T,
    /// H_0 with a_L0′θ_L eliminated.
    pub h0_without_l: T,
    /// H_0 with a_K0′θ_K eliminated.
    pub h0_without_k: T,
    /// H_0 with a_T0′θ_T eliminated.
    pub h0_without_t: T,
}

impl<T: Scalar> HChecks<T> {
    pub fn max_decomposition_gap(&self) -> T {
        [self.h0_without_l, self.h0_without_k, self.h0_without_t]
            .iter()
            .map(|&v| (v - self.h0).abs())
            .fold(T::zero(), T::max)
    }

    /// True when every H is strictly below `-band`.
    pub fn all_negative(&self, band: T) -> bool {
        self.h_sector.iter().all(|&h| h < -band) && self.h0 < -band
    }
}

pub fn h_checks<T: Scalar>(e: &Economy<T>, r: &Response<T>) -> HChecks<T> {
    let a = &r.a0_prime;
    let th = &e.theta_factor;
    let w = |i: usize, h: usize| r.w_diff[i][h];
    HChecks {
        h_sector: r.h_sector,
        h0: r.h0,
        d10_residual: r.aggregate_share_residual(e),
        h0_without_l: w(T, L) * a[T] * th[T] + w(K, L) * a[K] * th[K],
        h0_without_k: w(T, K) * a[T] * th[T] + w(L, K) * a[L] * th[L],
        h0_without_t: w(K, T) * a[K] * th[K] + w(L, T) * a[L] * th[L],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Sign::{Neg, Pos};

    fn e0() -> Economy<f64> {
        Economy::cobb_douglas([[0.45, 0.20], [0.20, 0.50], [0.35, 0.30]], [0.5, 0.5])
    }

    #[test]
    fn zero_shock_zero_response() {
        let r = solve_linear(&e0(), &Shock::new([0.0; 2], [0.0; 3])).unwrap();
        assert!(r.w_star.iter().chain(&r.x_star).all(|&x| x == 0.0));
        assert_eq!(r.ranking, Ranking::Tie);
        let h = h_checks(&e0(), &r);
        assert_eq!(h.h0, 0.0);
        assert_eq!(h.h_sector, [0.0, 0.0]);
    }

    #[test]
    fn price_shock_on_e0() {
        let e = e0();
        let r = solve_linear(&e, &Shock::price(1.0)).unwrap();
        assert!(r.residual < 1e-10);
        assert!(r.ranking.is_admissible(), "{:?}", r.ranking);
        assert!(r.cost_minimization_residual(&e) < 1e-12);
        assert!(r.aggregate_share_residual(&e) < 1e-12);
        for i in 0..3 {
            assert!((r.a0_prime[i] - r.a0_prime_ews[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn linearity() {
        let e = e0();
        let s = Shock::new([0.3, -0.2], [0.1, 0.4, -0.25]);
        let r1 = solve_linear(&e, &s).unwrap();
        let r2 = solve_linear(&e, &s.scaled(2.5)).unwrap();
        for i in 0..3 {
            assert!((r2.w_star[i] - 2.5 * r1.w_star[i]).abs() < 1e-10);
        }
        for j in 0..2 {
            assert!((r2.x_star[j] - 2.5 * r1.x_star[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_system_detected() {
        let mut e = e0();
        // identical sectors make the zero-profit rows dependent
        for i in 0..3 {
            e.theta_share[i][1] = e.theta_share[i][0];
        }
        assert!(matches!(solve_linear(&e, &Shock::price(1.0)), Err(Error::SingularSystem(_))));
    }

    #[test]
    fn rybczynski_full_employment_columns() {
        let e = e0();
        let ryb = rybczynski_matrix(&e).unwrap();
        assert!(ryb.full_employment_residual < 1e-9);
        // outputs at fixed prices: X* weighted by good shares equals income-weighted V* (θ_i)
        for i in 0..3 {
            let lhs = e.theta_good[0] * ryb.values[0][i] + e.theta_good[1] * ryb.values[1][i];
            assert!((lhs - e.theta_factor[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn stolper_samuelson_gates_negative_p() {
        let e = e0();
        assert!(matches!(stolper_samuelson(&e, -1.0, false), Err(Error::NegativePriceChange(_))));
        let rev = stolper_samuelson(&e, -1.0, true).unwrap();
        assert!(rev.reversed);
        assert_eq!(rev.p, 1.0);
        let zero = stolper_samuelson(&e, 0.0, false).unwrap();
        assert_eq!(zero.xyz, [0.0; 3]);
    }

    #[test]
    fn xyz_lines_e0() {
        let lines = lines_xyz(&e0(), 1.0).unwrap();
        let [d1, d2, d3] = lines.d;
        assert!((d1 - 0.185).abs() < 1e-15 && (d2 - 0.115).abs() < 1e-15 && (d3 - 0.065).abs() < 1e-15);
        assert!((lines.z_where_y_eq_z + 1.8).abs() < 1e-14);
        assert!((lines.z_where_x_eq_z - 0.2 / 0.3).abs() < 1e-14);
        assert!(lines.x_slope < lines.y_slope);
        // crossing values really are crossings
        let z = lines.z_where_y_eq_z;
        assert!((lines.y_at(z) - z).abs() < 1e-12);
        let z = lines.z_where_x_eq_z;
        assert!((lines.x_at(z) - z).abs() < 1e-12);
    }

    #[test]
    fn realized_xyz_on_lines() {
        let e = e0();
        let pr = stolper_samuelson(&e, 1.0, false).unwrap();
        let lines = lines_xyz(&e, 1.0).unwrap();
        let [x, y, z] = pr.xyz;
        assert!((lines.x_at(z) - x).abs() < 1e-10);
        assert!((lines.y_at(z) - y).abs() < 1e-10);
    }

    #[test]
    fn ranking_classification() {
        assert_eq!(Ranking::from_xyz([3.0, 1.0, 2.0], 1e-12), Ranking::Xzy);
        assert_eq!(Ranking::from_xyz([1.0, 2.0, 3.0], 1e-12), Ranking::Zyx);
        assert_eq!(Ranking::from_xyz([2.0, 3.0, 1.0], 1e-12), Ranking::Yxz);
        assert!(!Ranking::Yzx.is_admissible());
        assert_eq!(Ranking::from_xyz([1.0, 1.0 + 1e-13, 3.0], 1e-12), Ranking::Tie);
    }

    #[test]
    fn sign_labels() {
        assert_eq!(SignLabel::from_signs([Pos, Pos, Neg]), Some(SignLabel::C));
        assert_eq!(SignLabel::from_signs([Pos, Pos, Pos]), None);
        assert!(!SignLabel::E.feasible_under_xzy());
        assert!(!SignLabel::F.feasible_under_xzy());
    }

    fn fake_response(ranking: Ranking, a0: [f64; 3]) -> Response<f64> {
        let mut r = solve_linear(&e0(), &Shock::price(1.0)).unwrap();
        r.ranking = ranking;
        r.a0_prime = a0;
        r
    }

    #[test]
    fn lemma2_labels_and_verdicts() {
        let d = lemma2_diagnostics(&fake_response(Ranking::Xzy, [0.1, 0.2, -0.3])).unwrap();
        assert_eq!(d.aggregate, SignLabel::C);
        assert_eq!(d.verdict, Feasibility::Feasible);

        let d = lemma2_diagnostics(&fake_response(Ranking::Xzy, [0.1, -0.2, 0.3])).unwrap();
        assert_eq!(d.aggregate, SignLabel::E);
        assert_eq!(d.verdict, Feasibility::Infeasible);

        let d = lemma2_diagnostics(&fake_response(Ranking::Zxy, [0.1, -0.2, 0.3])).unwrap();
        assert_eq!(d.verdict, Feasibility::NotApplicable);

        assert!(matches!(
            lemma2_diagnostics(&fake_response(Ranking::Xzy, [0.0, 0.2, -0.3])),
            Err(Error::AmbiguousSign(_))
        ));
    }

    #[test]
    fn h_decompositions_agree() {
        let e = e0();
        let r = solve_linear(&e, &Shock::new([0.7, -0.1], [0.2, -0.3, 0.5])).unwrap();
        let h = h_checks(&e, &r);
        assert!(h.all_negative(1e-12));
        assert!(h.d10_residual < 1e-12);
        assert!(h.max_decomposition_gap() < 1e-10);
    }
}
