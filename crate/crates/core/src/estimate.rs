//! Locating the EWS-ratio vector from two-period data.
//!
//! An [`Observation`] holds base-period shares and the measured rates of
//! change of prices, factor rewards and input coefficients. The pipeline
//! normalizes it ([`preprocess`]), computes the chord endpoints A and B,
//! decides whether the data force the ratio vector into quadrant IV
//! ([`quadrant_verdict`]) and, if so, which of the cells P1 to P3 it lies in
//! ([`subregion_verdict`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{quadrant, rybczynski_pattern, Quadrant, SignMatrix, SubregionLabel};
use crate::index::{K, L, T};
use crate::model::{allocation_shares, factor_shares, Economy, RatioPoint};
use crate::scalar::{Scalar, Sign};
use crate::statics::{Ranking, Response, SignLabel};
use crate::tol;

/// Base-period shares plus measured rates of change.
///
/// Either `a_star` (per sector) or `a0_prime` (economy-wide aggregates) must
/// be present. `lambda_share` and `theta_factor` are derived from the
/// distributive and good shares when omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation<T> {
    pub theta_share: [[T; 2]; 3],
    pub theta_good: [T; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_share: Option<[[T; 2]; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_factor: Option<[T; 3]>,
    pub p_star: [T; 2],
    pub w_star: [T; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_star: Option<[[T; 2]; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0_prime: Option<[T; 3]>,
}

/// Tolerance on share sums and measured identities.
pub const DATA_TOLERANCE: f64 = 1e-6;

impl<T: Scalar> Observation<T> {
    /// The observation a linearized economy would generate for `resp`.
    pub fn from_response(e: &Economy<T>, resp: &Response<T>) -> Self {
        Observation {
            theta_share: e.theta_share,
            theta_good: e.theta_good,
            lambda_share: Some(e.lambda_share),
            theta_factor: Some(e.theta_factor),
            p_star: resp.shock.p_star,
            w_star: resp.w_star,
            a_star: Some(resp.a_star),
            a0_prime: None,
        }
    }

    pub fn relative_price_change(&self) -> T {
        self.p_star[0] - self.p_star[1]
    }

    pub fn factor_shares(&self) -> [T; 3] {
        self.theta_factor.unwrap_or_else(|| factor_shares(&self.theta_share, &self.theta_good))
    }

    pub fn allocation_shares(&self) -> [[T; 2]; 3] {
        self.lambda_share
            .unwrap_or_else(|| allocation_shares(&self.theta_share, &self.theta_good, &self.factor_shares()))
    }

    /// a_i0′, taken as given or aggregated from the sector rates with λ.
    pub fn aggregate_coefficients(&self) -> Result<[T; 3]> {
        if let Some(a0) = self.a0_prime {
            return Ok(a0);
        }
        let a = self.a_star.ok_or_else(|| Error::InvalidInput("observation needs a_star or a0_prime".into()))?;
        let lambda = self.allocation_shares();
        Ok([0, 1, 2].map(|i| lambda[i][0] * a[i][0] + lambda[i][1] * a[i][1]))
    }

    /// Largest magnitude among the measured rates; the dead band scales with it.
    pub fn rate_scale(&self) -> T {
        let mut m = T::zero();
        for &x in self.p_star.iter().chain(&self.w_star) {
            m = m.max(x.abs());
        }
        if let Some(a) = &self.a_star {
            for &x in a.iter().flatten() {
                m = m.max(x.abs());
            }
        }
        if let Some(a) = &self.a0_prime {
            for &x in a {
                m = m.max(x.abs());
            }
        }
        m
    }

    fn dead_band(&self) -> T {
        T::lit(tol::DEAD_BAND) * self.rate_scale()
    }

    fn check_shares(&self) -> Result<()> {
        let tol = T::lit(DATA_TOLERANCE);
        let finite = self.theta_share.iter().flatten().chain(&self.theta_good).all(|x| x.is_finite());
        if !finite || self.theta_share.iter().flatten().chain(&self.theta_good).any(|&x| !(x > T::zero())) {
            return Err(Error::InvalidInput("shares must be finite and positive".into()));
        }
        for j in 0..2 {
            let sum: T = (0..3).map(|i| self.theta_share[i][j]).sum();
            if (sum - T::one()).abs() > tol {
                return Err(Error::InvalidInput(format!("distributive shares of sector {} sum to {sum}", j + 1)));
            }
        }
        let sum = self.theta_good[0] + self.theta_good[1];
        if (sum - T::one()).abs() > tol {
            return Err(Error::InvalidInput(format!("good shares sum to {sum}")));
        }
        if self.a_star.is_none() && self.a0_prime.is_none() {
            return Err(Error::InvalidInput("observation needs a_star or a0_prime".into()));
        }
        let rates_finite = self.p_star.iter().chain(&self.w_star).all(|x| x.is_finite())
            && self.a_star.is_none_or(|a| a.iter().flatten().all(|x| x.is_finite()))
            && self.a0_prime.is_none_or(|a| a.iter().all(|x| x.is_finite()));
        if !rates_finite {
            return Err(Error::InvalidInput("rates of change must be finite".into()));
        }
        Ok(())
    }

    fn permuted(&self, perm: [usize; 3]) -> Self {
        let pick3 = |v: [T; 3]| perm.map(|k| v[k]);
        let pick_rows = |m: [[T; 2]; 3]| perm.map(|k| m[k]);
        Observation {
            theta_share: pick_rows(self.theta_share),
            theta_good: self.theta_good,
            lambda_share: self.lambda_share.map(pick_rows),
            theta_factor: self.theta_factor.map(pick3),
            p_star: self.p_star,
            w_star: pick3(self.w_star),
            a_star: self.a_star.map(pick_rows),
            a0_prime: self.a0_prime.map(pick3),
        }
    }

    fn negated(&self) -> Self {
        let neg = |x: T| -x;
        Observation {
            p_star: self.p_star.map(neg),
            w_star: self.w_star.map(neg),
            a_star: self.a_star.map(|m| m.map(|r| r.map(neg))),
            a0_prime: self.a0_prime.map(|v| v.map(neg)),
            ..self.clone()
        }
    }
}

/// A normalized observation plus the transformations applied to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessed<T> {
    pub obs: Observation<T>,
    /// True when every rate was negated to make P positive.
    pub reversed: bool,
    /// `permutation[k]` is the input factor relabelled as factor `k` (T, K, L).
    pub permutation: [usize; 3],
}

/// Validates shares, makes P positive (negating all rates when
/// `time_reversal` allows it) and relabels factors so that land is the most
/// sector-1 intensive, capital the least and labor in the middle.
pub fn preprocess<T: Scalar>(obs: &Observation<T>, time_reversal: bool) -> Result<Preprocessed<T>> {
    obs.check_shares()?;
    let p = obs.relative_price_change();
    if p.abs() < T::lit(tol::DEGENERATE) {
        return Err(Error::ZeroP);
    }
    let (mut out, reversed) = if p < T::zero() {
        if !time_reversal {
            return Err(Error::NegativePriceChange(p.to_f64_lossy()));
        }
        (obs.negated(), true)
    } else {
        (obs.clone(), false)
    };

    let ratio = |i: usize| obs.theta_share[i][0] / obs.theta_share[i][1];
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| ratio(b).partial_cmp(&ratio(a)).unwrap_or(std::cmp::Ordering::Equal));
    let gap = T::lit(tol::DEGENERATE);
    if ratio(order[0]) - ratio(order[1]) < gap || ratio(order[1]) - ratio(order[2]) < gap {
        return Err(Error::UnsupportedRanking("two factors have equal intensity ratios".into()));
    }
    // highest ratio becomes land, lowest capital, middle labor
    let permutation = [order[0], order[2], order[1]];
    if permutation != [0, 1, 2] {
        out = out.permuted(permutation);
    }
    if !(out.theta_share[L][0] > out.theta_share[L][1]) {
        return Err(Error::UnsupportedRanking(
            "the middle factor's share is not larger in the land-intensive sector".into(),
        ));
    }
    Ok(Preprocessed { obs: out, reversed, permutation })
}

fn w_diff<T: Scalar>(obs: &Observation<T>, i: usize, h: usize) -> T {
    obs.w_star[i] - obs.w_star[h]
}

/// A = (−W_TL/W_KL, (θ_L/θ_K)(−W_LT/W_KT)).
pub fn point_a<T: Scalar>(obs: &Observation<T>) -> Result<RatioPoint<T>> {
    let band = obs.dead_band().max(T::min_positive_value());
    let (wkl, wkt) = (w_diff(obs, K, L), w_diff(obs, K, T));
    if wkl.abs() <= band || wkt.abs() <= band {
        return Err(Error::DegenerateObservation("capital reward change equals another factor's".into()));
    }
    let th = obs.factor_shares();
    let r = th[L] / th[K];
    Ok(RatioPoint::new(-w_diff(obs, T, L) / wkl, r * (-w_diff(obs, L, T) / wkt), r))
}

/// B = ((a_K0′/a_T0′)(θ_K/θ_T), a_K0′/a_L0′).
pub fn point_b<T: Scalar>(obs: &Observation<T>) -> Result<RatioPoint<T>> {
    let a = obs.aggregate_coefficients()?;
    let band = obs.dead_band().max(T::min_positive_value());
    if a[T].abs() <= band || a[L].abs() <= band {
        return Err(Error::DegenerateObservation("land or labor aggregate coefficient change is zero".into()));
    }
    let th = obs.factor_shares();
    Ok(RatioPoint::new(a[K] / a[T] * (th[K] / th[T]), a[K] / a[L], th[L] / th[K]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadrantVerdict {
    /// Ranking X>Z>Y with coefficient signs (+,+,−): the ratio vector is in
    /// quadrant IV, so land and capital are economy-wide complements.
    QuadrantIv,
    /// Ranking X>Z>Y with signs (−,−,+): both endpoints in quadrant IV with A
    /// to the right of B. No cell is assigned.
    QuadrantIvReversed,
    Inconclusive,
}

/// Box that the chord AB confines (S′, U′) to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds<T> {
    pub s_lower: T,
    pub s_upper: T,
    pub u_lower: T,
    pub u_upper: T,
}

impl<T: Scalar> Bounds<T> {
    fn spanning(a: &RatioPoint<T>, b: &RatioPoint<T>) -> Self {
        Bounds { s_lower: a.s.min(b.s), s_upper: a.s.max(b.s), u_lower: a.u.min(b.u), u_upper: a.u.max(b.u) }
    }

    /// Inclusive, with a relative slack of `rel`.
    pub fn brackets(&self, p: &RatioPoint<T>, rel: T) -> bool {
        let slack = |x: T| rel * T::one().max(x.abs());
        p.s >= self.s_lower - slack(self.s_lower)
            && p.s <= self.s_upper + slack(self.s_upper)
            && p.u >= self.u_lower - slack(self.u_lower)
            && p.u <= self.u_upper + slack(self.u_upper)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantAssessment<T> {
    pub verdict: QuadrantVerdict,
    pub ranking: Ranking,
    pub sign_label: Option<SignLabel>,
    pub point_a: Option<RatioPoint<T>>,
    pub point_b: Option<RatioPoint<T>>,
    pub quadrant_a: Option<Quadrant>,
    pub quadrant_b: Option<Quadrant>,
    pub bounds: Option<Bounds<T>>,
    /// Preconditions that did not hold.
    pub failed: Vec<String>,
    pub conclusion: String,
}

fn ranking_of<T: Scalar>(obs: &Observation<T>) -> Ranking {
    let xyz = obs.w_star.map(|w| w - obs.p_star[0]);
    Ranking::from_xyz(xyz, obs.dead_band())
}

fn sign_label_of<T: Scalar>(obs: &Observation<T>) -> Result<Option<SignLabel>> {
    Ok(SignLabel::from_values(obs.aggregate_coefficients()?, obs.dead_band()))
}

/// Decides whether the data place the ratio vector in quadrant IV. A and B
/// are reported whenever they are defined, even if the verdict is inconclusive.
pub fn quadrant_verdict<T: Scalar>(obs: &Observation<T>) -> Result<QuadrantAssessment<T>> {
    let ranking = ranking_of(obs);
    let sign_label = sign_label_of(obs)?;
    let point_a = point_a(obs).ok();
    let point_b = point_b(obs).ok();
    let mut failed = Vec::new();
    if obs.relative_price_change() <= T::zero() {
        failed.push("relative price of good 1 must rise".to_string());
    }
    if ranking != Ranking::Xzy {
        failed.push(format!("ranking is {ranking}, need X>Z>Y"));
    }
    let reversed = sign_label == Some(SignLabel::D);
    if sign_label != Some(SignLabel::C) && !reversed {
        let label = sign_label.map_or("ambiguous".to_string(), |l| l.to_string());
        failed.push(format!("coefficient sign label is {label}, need C (+,+,-)"));
    }
    if point_a.is_none() || point_b.is_none() {
        failed.push("endpoint A or B undefined".to_string());
    }
    let (verdict, bounds, conclusion) = match (failed.is_empty(), point_a, point_b) {
        (true, Some(a), Some(b)) if !reversed => (
            QuadrantVerdict::QuadrantIv,
            Some(Bounds::spanning(&a, &b)),
            "extreme factors are economy-wide complements; a strong Rybczynski result holds".to_string(),
        ),
        (true, Some(a), Some(b)) => (
            QuadrantVerdict::QuadrantIvReversed,
            Some(Bounds::spanning(&a, &b)),
            "both endpoints lie in quadrant IV with A right of B; no cell is assigned".to_string(),
        ),
        _ => (QuadrantVerdict::Inconclusive, None, "inconclusive".to_string()),
    };
    Ok(QuadrantAssessment {
        verdict,
        ranking,
        sign_label,
        quadrant_a: point_a.map(|p| quadrant(&p)),
        quadrant_b: point_b.map(|p| quadrant(&p)),
        point_a,
        point_b,
        bounds,
        failed,
        conclusion,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubregionVerdict {
    P1,
    P2,
    P3,
    #[serde(rename = "ambiguous")]
    Ambiguous,
    #[serde(rename = "not_quadrant_iv")]
    NotQuadrantIv,
}

impl SubregionVerdict {
    fn from_label(l: SubregionLabel) -> Self {
        match l {
            SubregionLabel::P1 => SubregionVerdict::P1,
            SubregionLabel::P2 => SubregionVerdict::P2,
            SubregionLabel::P3 => SubregionVerdict::P3,
            _ => SubregionVerdict::Ambiguous,
        }
    }

    pub fn label(self) -> Option<SubregionLabel> {
        match self {
            SubregionVerdict::P1 => Some(SubregionLabel::P1),
            SubregionVerdict::P2 => Some(SubregionLabel::P2),
            SubregionVerdict::P3 => Some(SubregionLabel::P3),
            _ => None,
        }
    }
}

/// One sufficient-condition test and whether it fired.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubregionTest {
    pub name: String,
    pub implies: SubregionLabel,
    pub fired: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubregionAssessment<T> {
    pub verdict: SubregionVerdict,
    /// Cell implied by the price-based shortcut tests.
    pub shortcut: Option<SubregionLabel>,
    /// Cell implied by the S′ threshold chains.
    pub chain: Option<SubregionLabel>,
    pub tests: Vec<SubregionTest>,
    /// S′ of the two boundary points delimiting the cells.
    pub thresholds: [T; 2],
    /// Sign of w_L* − p_2* and w_L* − p_1*.
    pub labor_real_wage_signs: [Sign; 2],
    /// Whether S′_A > θ_K2/θ_T2 ⟺ w_L* < p_2* and S′_A > θ_K1/θ_T1 ⟺ w_L* < p_1*
    /// held on the data (`None` when a side falls in the dead band).
    pub threshold_equivalences: [Option<bool>; 2],
    pub pattern: Option<SignMatrix>,
    /// Cells the chord AB passes through when no test resolves.
    pub candidates: Vec<SubregionLabel>,
}

fn compare<T: Scalar>(a: T, b: T) -> Sign {
    let band = T::lit(tol::DEAD_BAND) * T::one().max(a.abs()).max(b.abs());
    Sign::of(a - b, band)
}

/// Position of an on-curve S′ relative to the two thresholds.
fn cell_of<T: Scalar>(s: T, thresholds: [T; 2]) -> Option<SubregionLabel> {
    match (compare(s, thresholds[0]), compare(s, thresholds[1])) {
        (Sign::Neg, _) => Some(SubregionLabel::P3),
        (Sign::Pos, Sign::Neg) => Some(SubregionLabel::P2),
        (_, Sign::Pos) => Some(SubregionLabel::P1),
        _ => None,
    }
}

/// Runs the shortcut sign tests and the threshold chains for an observation
/// already judged to be in quadrant IV.
pub fn subregion_verdict<T: Scalar>(obs: &Observation<T>, q: &QuadrantAssessment<T>) -> SubregionAssessment<T> {
    let th = &obs.theta_share;
    let thresholds = [th[K][0] / th[T][0], th[K][1] / th[T][1]];
    let band = obs.dead_band();
    let wl_p2 = Sign::of(obs.w_star[L] - obs.p_star[1], band);
    let wl_p1 = Sign::of(obs.w_star[L] - obs.p_star[0], band);
    let mut out = SubregionAssessment {
        verdict: SubregionVerdict::NotQuadrantIv,
        shortcut: None,
        chain: None,
        tests: Vec::new(),
        thresholds,
        labor_real_wage_signs: [wl_p2, wl_p1],
        threshold_equivalences: [None, None],
        pattern: None,
        candidates: Vec::new(),
    };
    let (Some(a), Some(b)) = (q.point_a, q.point_b) else {
        return out;
    };
    for k in 0..2 {
        let by_threshold = compare(a.s, thresholds[1 - k]);
        let by_price = if k == 0 { wl_p2 } else { wl_p1 };
        if by_threshold.is_strict() && by_price.is_strict() {
            out.threshold_equivalences[k] = Some((by_threshold == Sign::Pos) == (by_price == Sign::Neg));
        }
    }
    if q.verdict != QuadrantVerdict::QuadrantIv {
        return out;
    }

    let sb_vs = |k: usize| compare(b.s, thresholds[k]);
    let shortcut_tests = [
        ("labor real wage falls in good-2 units", SubregionLabel::P1, wl_p2 == Sign::Neg),
        (
            "labor real wage rises in good-2 units, falls in good-1 units, and B left of the good-2 threshold",
            SubregionLabel::P2,
            wl_p2 == Sign::Pos && wl_p1 == Sign::Neg && sb_vs(1) == Sign::Neg,
        ),
        (
            "labor real wage rises in good-1 units and B left of the good-1 threshold",
            SubregionLabel::P3,
            wl_p1 == Sign::Pos && sb_vs(0) == Sign::Neg,
        ),
    ];
    let chain_tests = [
        ("A right of the good-2 threshold", SubregionLabel::P1, compare(a.s, thresholds[1]) == Sign::Pos),
        (
            "A right of the good-1 threshold and B left of the good-2 threshold",
            SubregionLabel::P2,
            compare(a.s, thresholds[0]) == Sign::Pos && sb_vs(1) == Sign::Neg,
        ),
        ("B left of the good-1 threshold", SubregionLabel::P3, sb_vs(0) == Sign::Neg),
    ];
    let fired = |tests: &[(&str, SubregionLabel, bool)]| tests.iter().find(|t| t.2).map(|t| t.1);
    out.shortcut = fired(&shortcut_tests);
    out.chain = fired(&chain_tests);
    out.tests = shortcut_tests
        .iter()
        .chain(&chain_tests)
        .map(|&(name, implies, fired)| SubregionTest { name: name.to_string(), implies, fired })
        .collect();

    out.verdict = match (out.shortcut, out.chain) {
        (Some(x), Some(y)) if x == y => SubregionVerdict::from_label(x),
        (Some(x), None) | (None, Some(x)) => SubregionVerdict::from_label(x),
        _ => SubregionVerdict::Ambiguous,
    };
    out.pattern = out.verdict.label().and_then(|l| rybczynski_pattern(l).ok());
    out.candidates = match out.verdict.label() {
        Some(l) => vec![l],
        None => candidate_cells(a.s, b.s, thresholds),
    };
    out
}

/// Cells met by a chord whose endpoints sit on the boundary curve at `sa`
/// and `sb`. The border lines all pass through one point, so the chord
/// crosses the cells in their angular order.
fn candidate_cells<T: Scalar>(sa: T, sb: T, thresholds: [T; 2]) -> Vec<SubregionLabel> {
    let order = [SubregionLabel::P3, SubregionLabel::P2, SubregionLabel::P1];
    let rank = |s: T| match cell_of(s, thresholds) {
        Some(l) => order.iter().position(|&x| x == l).map(|i| (i, i)),
        // on a threshold: touches both neighbours
        None => {
            if compare(s, thresholds[0]) == Sign::Zero {
                Some((0, 1))
            } else {
                Some((1, 2))
            }
        }
    };
    let (Some((a0, a1)), Some((b0, b1))) = (rank(sa), rank(sb)) else {
        return order.to_vec();
    };
    let lo = a0.min(b0);
    let hi = a1.max(b1);
    order[lo..=hi].to_vec()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Inside the dead band or not computable from the data given.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport<T> {
    /// H_j / p_j, available when per-sector rates are given.
    pub h_sector: Option<[T; 2]>,
    pub h0: T,
    /// max_j |Σ_i θ_ij a_ij*|
    pub cost_minimization_residual: Option<T>,
    /// |Σ_i a_i0′ θ_i|
    pub aggregate_share_residual: T,
    pub aggregate_label: Option<SignLabel>,
    pub sector_labels: Option<[Option<SignLabel>; 2]>,
    pub checks: Vec<(String, CheckStatus)>,
    pub consistent: bool,
    pub issues: Vec<String>,
}

/// Checks the data against restrictions every 3x2 equilibrium satisfies.
pub fn consistency_checks<T: Scalar>(obs: &Observation<T>) -> Result<ConsistencyReport<T>> {
    let a0 = obs.aggregate_coefficients()?;
    let th_f = obs.factor_shares();
    let th = &obs.theta_share;
    let w = &obs.w_star;
    let band = obs.dead_band();
    let tol = T::lit(DATA_TOLERANCE);
    let scale = T::one().max(obs.rate_scale());
    let mut checks = Vec::new();
    let mut issues = Vec::new();
    let mut record = |name: String, status: CheckStatus, issue: Option<String>| {
        if status == CheckStatus::Fail {
            issues.push(issue.unwrap_or_else(|| name.clone()));
        }
        checks.push((name, status));
    };

    let negative = |x: T| match Sign::of(x, band * scale) {
        Sign::Neg => CheckStatus::Pass,
        Sign::Pos => CheckStatus::Fail,
        Sign::Zero => CheckStatus::Unknown,
    };

    let h_sector = obs.a_star.map(|a| [0, 1].map(|j| (0..3).map(|i| w[i] * a[i][j] * th[i][j]).sum::<T>()));
    let h0: T = (0..3).map(|i| w[i] * a0[i] * th_f[i]).sum();
    if let Some(h) = h_sector {
        for (j, &hj) in h.iter().enumerate() {
            record(format!("H_{} < 0", j + 1), negative(hj), None);
        }
    }
    record("H_0 < 0".into(), negative(h0), None);

    let cost_minimization_residual = obs.a_star.map(|a| {
        (0..2).map(|j| (0..3).map(|i| th[i][j] * a[i][j]).sum::<T>().abs()).fold(T::zero(), T::max)
    });
    if let Some(r) = cost_minimization_residual {
        let status = if r <= tol * scale { CheckStatus::Pass } else { CheckStatus::Fail };
        record("sector cost-share-weighted coefficient changes sum to zero".into(), status, None);
    }
    let aggregate_share_residual = (0..3).map(|i| a0[i] * th_f[i]).sum::<T>().abs();
    let status = if aggregate_share_residual <= tol * scale { CheckStatus::Pass } else { CheckStatus::Fail };
    record("income-share-weighted aggregate coefficient changes sum to zero".into(), status, None);

    let ranking = ranking_of(obs);
    let aggregate_label = SignLabel::from_values(a0, band);
    let sector_labels = obs.a_star.map(|a| [0, 1].map(|j| SignLabel::from_values([a[T][j], a[K][j], a[L][j]], band)));
    if ranking == Ranking::Xzy {
        let status = match aggregate_label {
            Some(l) if l.feasible_under_xzy() => CheckStatus::Pass,
            Some(_) => CheckStatus::Fail,
            None => CheckStatus::Unknown,
        };
        record("aggregate sign label admissible under X>Z>Y".into(), status, None);
        if let Some(labels) = sector_labels {
            for (j, l) in labels.iter().enumerate() {
                let status = match l {
                    Some(l) if l.feasible_under_xzy() => CheckStatus::Pass,
                    Some(_) => CheckStatus::Fail,
                    None => CheckStatus::Unknown,
                };
                record(format!("sector {} sign label admissible under X>Z>Y", j + 1), status, None);
            }
        }
    }
    let consistent = issues.is_empty();
    if !consistent {
        issues.push("data inconsistent with the 3x2 model assumptions".into());
    }
    Ok(ConsistencyReport {
        h_sector,
        h0,
        cost_minimization_residual,
        aggregate_share_residual,
        aggregate_label,
        sector_labels,
        checks,
        consistent,
        issues,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport<T> {
    pub p: T,
    pub p_sign: Sign,
    pub reversed: bool,
    pub permutation: [usize; 3],
    pub ranking: Ranking,
    pub sign_label: Option<SignLabel>,
    pub quadrant: QuadrantAssessment<T>,
    pub subregion: SubregionAssessment<T>,
    pub consistency: ConsistencyReport<T>,
}

/// Full pipeline: normalize, bound the ratio vector, classify the cell, check consistency.
pub fn estimate<T: Scalar>(obs: &Observation<T>, time_reversal: bool) -> Result<EstimateReport<T>> {
    let pre = preprocess(obs, time_reversal)?;
    let o = &pre.obs;
    let quadrant = quadrant_verdict(o)?;
    let subregion = subregion_verdict(o, &quadrant);
    let consistency = consistency_checks(o)?;
    let p = o.relative_price_change();
    Ok(EstimateReport {
        p,
        p_sign: Sign::strict(p),
        reversed: pre.reversed,
        permutation: pre.permutation,
        ranking: quadrant.ranking,
        sign_label: quadrant.sign_label,
        quadrant,
        subregion,
        consistency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{segment_ab, vector_line};
    use crate::statics::{solve_linear, Shock};

    fn e0() -> Economy<f64> {
        Economy::cobb_douglas([[0.45, 0.20], [0.20, 0.50], [0.35, 0.30]], [0.5, 0.5])
    }

    fn obs_from(e: &Economy<f64>, shock: Shock<f64>) -> Observation<f64> {
        Observation::from_response(e, &solve_linear(e, &shock).unwrap())
    }

    fn theorem_obs(w: [f64; 3], a0: [f64; 3]) -> Observation<f64> {
        Observation {
            theta_share: [[0.45, 0.20], [0.20, 0.50], [0.35, 0.30]],
            theta_good: [0.5, 0.5],
            lambda_share: None,
            theta_factor: None,
            p_star: [1.0, 0.0],
            w_star: w,
            a_star: None,
            a0_prime: Some(a0),
        }
    }

    /// Zero-profit-consistent rates for p* = (1, 0) on E0's shares, given
    /// w_L* = z and (a_T0′, a_K0′); a_L0′ is set so the share-weighted sum vanishes.
    fn consistent_obs(z: f64, a_tk: [f64; 2]) -> Observation<f64> {
        let w_t = (0.5 - 0.115 * z) / 0.185;
        let w_k = (-0.2 - 0.065 * z) / 0.185;
        let a_l = -(0.325 * a_tk[0] + 0.35 * a_tk[1]) / 0.325;
        theorem_obs([w_t, w_k, z], [a_tk[0], a_tk[1], a_l])
    }

    #[test]
    fn reversal_and_idempotence() {
        let obs = obs_from(&e0(), Shock::price(-1.0));
        assert!(matches!(preprocess(&obs, false), Err(Error::NegativePriceChange(_))));
        let pre = preprocess(&obs, true).unwrap();
        assert!(pre.reversed);
        assert!(pre.obs.relative_price_change() > 0.0);
        assert_eq!(pre.obs.w_star, obs.w_star.map(|x| -x));

        let obs = obs_from(&e0(), Shock::price(1.0));
        let pre = preprocess(&obs, false).unwrap();
        assert_eq!(pre.obs, obs);
        assert_eq!(pre.permutation, [0, 1, 2]);
    }

    #[test]
    fn permutation_restores_labels() {
        let obs = obs_from(&e0(), Shock::new([0.8, -0.1], [0.1, 0.2, 0.3]));
        // present the factors as (L, T, K)
        let shuffled = obs.permuted([2, 0, 1]);
        let pre = preprocess(&shuffled, false).unwrap();
        assert_eq!(pre.permutation, [1, 2, 0]);
        assert_eq!(pre.obs, obs);
    }

    #[test]
    fn middle_factor_reversed_is_unsupported() {
        let mut obs = obs_from(&e0(), Shock::price(1.0));
        // intensity ratios (2, 1/3, 3/4): labor is in the middle but used less in sector 1
        obs.theta_share = [[0.6, 0.3], [0.1, 0.3], [0.3, 0.4]];
        assert!(matches!(preprocess(&obs, false), Err(Error::UnsupportedRanking(_))));
    }

    #[test]
    fn zero_p() {
        let obs = obs_from(&e0(), Shock::new([0.0, 0.0], [0.1, 0.2, 0.3]));
        assert_eq!(preprocess(&obs, true).unwrap_err(), Error::ZeroP);
    }

    #[test]
    fn endpoints_match_geometry() {
        let e = e0();
        for shock in [Shock::price(1.0), Shock::new([0.4, -0.3], [0.2, -0.5, 0.1])] {
            let resp = solve_linear(&e, &shock).unwrap();
            let obs = Observation::from_response(&e, &resp);
            let seg = segment_ab(&vector_line(&resp, &e).unwrap(), &resp, &e).unwrap();
            let (a, b) = (point_a(&obs).unwrap(), point_b(&obs).unwrap());
            for (x, y) in [(a, seg.point_a), (b, seg.point_b)] {
                assert!((x.s - y.s).abs() < 1e-8 * x.s.abs().max(1.0));
                assert!((x.u - y.u).abs() < 1e-8 * x.u.abs().max(1.0));
            }
        }
    }

    #[test]
    fn point_a_zero_when_land_and_labor_equal() {
        let obs = theorem_obs([0.5, 0.2, 0.5], [0.1, 0.2, -0.3]);
        assert_eq!(point_a(&obs).unwrap().s, 0.0);
    }

    #[test]
    fn theorem_conditions_give_quadrant_iv() {
        // w_T > w_L > w_K with signs (+,+,−)
        let obs = theorem_obs([1.6, 0.2, 0.9], [0.1, 0.2, -0.25]);
        let q = quadrant_verdict(&obs).unwrap();
        assert_eq!(q.ranking, Ranking::Xzy);
        assert_eq!(q.verdict, QuadrantVerdict::QuadrantIv, "{:?}", q.failed);
        assert_eq!(q.quadrant_a, Some(Quadrant::IV));
        assert_eq!(q.quadrant_b, Some(Quadrant::IV));
        let bounds = q.bounds.unwrap();
        assert!(0.0 < bounds.s_lower && bounds.s_upper > bounds.s_lower && bounds.u_upper < 0.0);
    }

    #[test]
    fn failed_preconditions_are_named() {
        let obs = theorem_obs([1.6, 1.2, 0.9], [0.1, 0.2, -0.25]);
        let q = quadrant_verdict(&obs).unwrap();
        assert_eq!(q.verdict, QuadrantVerdict::Inconclusive);
        assert!(q.failed.iter().any(|f| f.contains("ranking")));

        let obs = theorem_obs([1.6, 0.2, 0.9], [-0.1, 0.2, 0.25]);
        let q = quadrant_verdict(&obs).unwrap();
        assert_eq!(q.sign_label, Some(SignLabel::B));
        assert_eq!(q.verdict, QuadrantVerdict::Inconclusive);
        assert_eq!(q.quadrant_b, Some(Quadrant::II));

        let obs = theorem_obs([1.6, 0.2, 0.9], [-0.1, 0.2, -0.25]);
        assert_eq!(quadrant_verdict(&obs).unwrap().quadrant_b, Some(Quadrant::III));
    }

    #[test]
    fn labor_real_wage_decides_p1() {
        let obs = consistent_obs(-0.5, [0.05, 0.5]);
        assert!(consistency_checks(&obs).unwrap().consistent);
        let q = quadrant_verdict(&obs).unwrap();
        assert_eq!(q.verdict, QuadrantVerdict::QuadrantIv, "{:?}", q.failed);
        let s = subregion_verdict(&obs, &q);
        assert_eq!(s.shortcut, Some(SubregionLabel::P1));
        assert_eq!(s.chain, Some(SubregionLabel::P1));
        assert_eq!(s.verdict, SubregionVerdict::P1);
        assert_eq!(s.pattern.unwrap().to_string(), "[(+,-,-),(-,+,+)]");
        assert_eq!(s.threshold_equivalences, [Some(true), Some(true)]);
    }

    #[test]
    fn labor_gains_in_good1_units_gives_p3() {
        // w_L* > p_1* and B left of θ_K1/θ_T1 = 0.444
        let obs = consistent_obs(1.5, [0.4, 0.05]);
        let q = quadrant_verdict(&obs).unwrap();
        assert_eq!(q.verdict, QuadrantVerdict::QuadrantIv, "{:?}", q.failed);
        let s = subregion_verdict(&obs, &q);
        assert_eq!(s.verdict, SubregionVerdict::P3, "{s:?}");
    }

    #[test]
    fn candidates_follow_the_chord() {
        let t = [0.5, 2.0];
        assert_eq!(candidate_cells(0.2, 3.0, t), vec![SubregionLabel::P3, SubregionLabel::P2, SubregionLabel::P1]);
        assert_eq!(candidate_cells(0.7, 3.0, t), vec![SubregionLabel::P2, SubregionLabel::P1]);
        assert_eq!(candidate_cells(0.2, 0.3, t), vec![SubregionLabel::P3]);
    }

    #[test]
    fn synthetic_data_are_consistent() {
        let e = e0();
        let obs = obs_from(&e, Shock::new([0.7, 0.1], [0.2, -0.1, 0.3]));
        let c = consistency_checks(&obs).unwrap();
        assert!(c.consistent, "{:?}", c.issues);
        assert!(c.aggregate_share_residual < 1e-12);
    }

    #[test]
    fn positive_h0_flagged() {
        let mut obs = obs_from(&e0(), Shock::price(1.0));
        obs.a_star = Some(obs.a_star.unwrap().map(|r| r.map(|x| -x)));
        let c = consistency_checks(&obs).unwrap();
        assert!(c.h0 > 0.0);
        assert!(!c.consistent);
        assert!(c.issues.iter().any(|s| s.contains("H_0")));
    }

    #[test]
    fn sector_label_e_flagged_under_xzy() {
        let mut obs = theorem_obs([1.6, 0.2, 0.9], [0.1, 0.2, -0.25]);
        obs.a0_prime = None;
        // sector 1 signs (+,−,+) = E
        obs.a_star = Some([[0.2, 0.05], [-0.1, 0.4], [0.05, -0.6]]);
        let c = consistency_checks(&obs).unwrap();
        assert_eq!(c.sector_labels.unwrap()[0], Some(SignLabel::E));
        assert!(!c.consistent);
    }

    #[test]
    fn report_serializes() {
        let obs = obs_from(&e0(), Shock::price(1.0));
        let report = estimate(&obs, false).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        let ranking: Ranking = serde_json::from_value(json["ranking"].clone()).unwrap();
        assert!(ranking.is_admissible());
        assert!(json["quadrant"]["verdict"].is_string());
    }
}
