//! Economy snapshot, structural validation, price elasticities and
//! economy-wide substitution (EWS) terms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{Factor, K, L, T};
use crate::scalar::{Scalar, Sign};
use crate::tol;

/// Static snapshot of the 3x2 economy: shares and per-sector Allen elasticities.
///
/// Indexing is `[factor][sector]` for the share matrices and
/// `sigma[sector][i][h]` for the Allen-partial elasticity between factors
/// `i` and `h` in that sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Economy<T> {
    pub theta_share: [[T; 2]; 3],
    pub lambda_share: [[T; 2]; 3],
    pub theta_factor: [T; 3],
    pub theta_good: [T; 2],
    pub sigma: [[[T; 3]; 3]; 2],
}

impl<T: Scalar> Economy<T> {
    /// Builds an economy from distributive shares and good shares, deriving
    /// factor income shares and allocation shares.
    pub fn from_shares(theta_share: [[T; 2]; 3], theta_good: [T; 2], sigma: [[[T; 3]; 3]; 2]) -> Self {
        let theta_factor = factor_shares(&theta_share, &theta_good);
        let lambda_share = allocation_shares(&theta_share, &theta_good, &theta_factor);
        Economy { theta_share, lambda_share, theta_factor, theta_good, sigma }
    }

    /// Cobb-Douglas technology in both sectors: every cross elasticity is one.
    pub fn cobb_douglas(theta_share: [[T; 2]; 3], theta_good: [T; 2]) -> Self {
        let sigma = [0, 1].map(|j| {
            let col = [theta_share[T][j], theta_share[K][j], theta_share[L][j]];
            aes_with_own_terms(col, [[T::one(); 3]; 3])
        });
        Economy::from_shares(theta_share, theta_good, sigma)
    }

    pub fn cast<U: Scalar>(&self) -> Economy<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        Economy {
            theta_share: self.theta_share.map(|r| r.map(c)),
            lambda_share: self.lambda_share.map(|r| r.map(c)),
            theta_factor: self.theta_factor.map(c),
            theta_good: self.theta_good.map(c),
            sigma: self.sigma.map(|m| m.map(|r| r.map(c))),
        }
    }

    /// Column of distributive shares for sector `j`, ordered (T, K, L).
    pub fn sector_shares(&self, j: usize) -> [T; 3] {
        [self.theta_share[T][j], self.theta_share[K][j], self.theta_share[L][j]]
    }

    /// θ_i1 / θ_i2.
    pub fn intensity_ratio(&self, i: usize) -> T {
        self.theta_share[i][0] / self.theta_share[i][1]
    }

    /// θ_i / θ_h.
    pub fn factor_share_ratio(&self, i: usize, h: usize) -> T {
        self.theta_factor[i] / self.theta_factor[h]
    }

    pub fn theta_l_over_k(&self) -> T {
        self.factor_share_ratio(L, K)
    }

    /// Land-intensive sector 1, capital-intensive sector 2, labor in the middle
    /// and used relatively intensively in sector 1.
    pub fn is_ranked(&self) -> bool {
        let (rt, rk, rl) = (self.intensity_ratio(T), self.intensity_ratio(K), self.intensity_ratio(L));
        rt > rl && rl > rk && self.theta_share[L][0] > self.theta_share[L][1]
    }
}

/// θ_i = Σ_j θ_j θ_ij.
pub fn factor_shares<T: Scalar>(theta_share: &[[T; 2]; 3], theta_good: &[T; 2]) -> [T; 3] {
    theta_share.map(|row| row[0] * theta_good[0] + row[1] * theta_good[1])
}

/// λ_ij = (θ_j / θ_i) θ_ij.
pub fn allocation_shares<T: Scalar>(theta_share: &[[T; 2]; 3], theta_good: &[T; 2], theta_factor: &[T; 3]) -> [[T; 2]; 3] {
    let mut lambda = [[T::zero(); 2]; 3];
    for i in 0..3 {
        for j in 0..2 {
            lambda[i][j] = theta_good[j] * theta_share[i][j] / theta_factor[i];
        }
    }
    lambda
}

/// Replaces the diagonal of `sigma` so that Σ_h θ_h σ_ih = 0 for each row.
pub fn aes_with_own_terms<T: Scalar>(shares: [T; 3], mut sigma: [[T; 3]; 3]) -> [[T; 3]; 3] {
    for i in 0..3 {
        let cross: T = (0..3).filter(|&h| h != i).map(|h| shares[h] * sigma[i][h]).sum();
        sigma[i][i] = -cross / shares[i];
    }
    sigma
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    NonFinite,
    ShareRange,
    DistributiveShareSum,
    AllocationShareSum,
    GoodShareSum,
    FactorShareSum,
    AllocationConsistency,
    AesSymmetry,
    AesOwnNegative,
    AesHomogeneity,
    IntensityRanking,
    MiddleFactorIntensity,
    EwsRowSum,
    EwsReciprocity,
    EwsOwnNegative,
    EwsSignPattern,
    EwsMinorIdentity,
}

impl Invariant {
    pub fn describe(self) -> &'static str {
        match self {
            Invariant::NonFinite => "all fields finite",
            Invariant::ShareRange => "shares strictly inside (0, 1)",
            Invariant::DistributiveShareSum => "distributive shares sum to one in each sector",
            Invariant::AllocationShareSum => "allocation shares sum to one for each factor",
            Invariant::GoodShareSum => "good income shares sum to one",
            Invariant::FactorShareSum => "factor income shares sum to one",
            Invariant::AllocationConsistency => "lambda_ij = (theta_j / theta_i) theta_ij",
            Invariant::AesSymmetry => "Allen elasticities symmetric",
            Invariant::AesOwnNegative => "own Allen elasticities negative",
            Invariant::AesHomogeneity => "sum_h theta_hj sigma_ih = 0 (zero-degree homogeneity)",
            Invariant::IntensityRanking => "theta_T1/theta_T2 > theta_L1/theta_L2 > theta_K1/theta_K2",
            Invariant::MiddleFactorIntensity => "theta_L1 > theta_L2",
            Invariant::EwsRowSum => "EWS rows sum to zero",
            Invariant::EwsReciprocity => "g_ih = (theta_h / theta_i) g_hi",
            Invariant::EwsOwnNegative => "own EWS terms negative",
            Invariant::EwsSignPattern => "at most one of (g_LK, g_LT, g_KT) negative",
            Invariant::EwsMinorIdentity => "g_KK g_TT - g_TK g_KT identity holds and is positive",
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub invariant: Invariant,
    pub location: String,
    /// Size of the residual or the margin by which a strict inequality failed.
    pub magnitude: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "violated: {} at {} (magnitude {:.3e})", self.invariant, self.location, self.magnitude)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, invariant: Invariant) -> bool {
        self.violations.iter().any(|v| v.invariant == invariant)
    }

    fn push<T: Scalar>(&mut self, invariant: Invariant, location: String, magnitude: T) {
        self.violations.push(Violation { invariant, location, magnitude: magnitude.to_f64_lossy() });
    }

    /// Records a residual violation when `|residual| > tol`.
    fn residual<T: Scalar>(&mut self, invariant: Invariant, location: impl FnOnce() -> String, residual: T, tol: T) {
        if !(residual.abs() <= tol) {
            self.push(invariant, location(), residual.abs());
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "ok: all invariants hold");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of the snapshot at the default tolerance.
pub fn validate_economy<T: Scalar>(e: &Economy<T>, check_ranking: bool) -> ValidationReport {
    validate_economy_with(e, check_ranking, tol::STRUCTURAL)
}

pub fn validate_economy_with<T: Scalar>(e: &Economy<T>, check_ranking: bool, tolerance: f64) -> ValidationReport {
    let tol = T::lit(tolerance);
    let mut report = ValidationReport::default();

    let all_finite = e.theta_share.iter().flatten().all(|x| x.is_finite())
        && e.lambda_share.iter().flatten().all(|x| x.is_finite())
        && e.theta_factor.iter().all(|x| x.is_finite())
        && e.theta_good.iter().all(|x| x.is_finite())
        && e.sigma.iter().flatten().flatten().all(|x| x.is_finite());
    if !all_finite {
        report.push(Invariant::NonFinite, "economy".into(), T::infinity());
        return report;
    }

    for i in 0..3 {
        for j in 0..2 {
            for (name, x) in [("theta", e.theta_share[i][j]), ("lambda", e.lambda_share[i][j])] {
                if !(x > T::zero() && x < T::one()) {
                    report.push(Invariant::ShareRange, format!("{name}_{}{}", Factor::ALL[i], j + 1), x);
                }
            }
        }
    }

    for j in 0..2 {
        let sum: T = (0..3).map(|i| e.theta_share[i][j]).sum();
        report.residual(Invariant::DistributiveShareSum, || format!("sector {}", j + 1), sum - T::one(), tol);
    }
    for i in 0..3 {
        let sum = e.lambda_share[i][0] + e.lambda_share[i][1];
        report.residual(Invariant::AllocationShareSum, || format!("factor {}", Factor::ALL[i]), sum - T::one(), tol);
    }
    report.residual(Invariant::GoodShareSum, || "goods".into(), e.theta_good[0] + e.theta_good[1] - T::one(), tol);
    let factor_sum: T = e.theta_factor.iter().copied().sum();
    report.residual(Invariant::FactorShareSum, || "factors".into(), factor_sum - T::one(), tol);

    for i in 0..3 {
        for j in 0..2 {
            let implied = e.theta_good[j] / e.theta_factor[i] * e.theta_share[i][j];
            report.residual(
                Invariant::AllocationConsistency,
                || format!("lambda_{}{}", Factor::ALL[i], j + 1),
                e.lambda_share[i][j] - implied,
                tol,
            );
        }
    }

    for (j, sigma) in e.sigma.iter().enumerate() {
        for i in 0..3 {
            for h in i + 1..3 {
                report.residual(
                    Invariant::AesSymmetry,
                    || format!("sector {} pair ({},{})", j + 1, Factor::ALL[i], Factor::ALL[h]),
                    sigma[i][h] - sigma[h][i],
                    tol,
                );
            }
            if !(sigma[i][i] < T::zero()) {
                report.push(Invariant::AesOwnNegative, format!("sector {} factor {}", j + 1, Factor::ALL[i]), sigma[i][i]);
            }
            let homog: T = (0..3).map(|h| e.theta_share[h][j] * sigma[i][h]).sum();
            report.residual(
                Invariant::AesHomogeneity,
                || format!("sector {} row {}", j + 1, Factor::ALL[i]),
                homog,
                tol,
            );
        }
    }

    if check_ranking {
        let (rt, rk, rl) = (e.intensity_ratio(T), e.intensity_ratio(K), e.intensity_ratio(L));
        let margin = (rt - rl).min(rl - rk);
        if !(margin > T::zero()) {
            report.push(Invariant::IntensityRanking, format!("ratios T={rt} L={rl} K={rk}"), margin);
        }
        let middle = e.theta_share[L][0] - e.theta_share[L][1];
        if !(middle > T::zero()) {
            report.push(Invariant::MiddleFactorIntensity, "theta_L1 vs theta_L2".into(), middle);
        }
    }

    report
}

/// Price elasticities of the input-output coefficients,
/// `eps[j][i][h] = ∂ log a_ij / ∂ log w_h = θ_hj σ_ih^j`.
pub fn epsilon<T: Scalar>(e: &Economy<T>) -> [[[T; 3]; 3]; 2] {
    let mut eps = [[[T::zero(); 3]; 3]; 2];
    for (j, block) in eps.iter_mut().enumerate() {
        for (i, row) in block.iter_mut().enumerate() {
            for (h, cell) in row.iter_mut().enumerate() {
                *cell = e.theta_share[h][j] * e.sigma[j][i][h];
            }
        }
    }
    eps
}

/// Economy-wide substitution terms `g[i][h]` with the factor income shares
/// needed for reciprocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwsMatrix<T> {
    pub g: [[T; 3]; 3],
    pub theta_factor: [T; 3],
}

/// The three expressions of the principal-minor identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinorIdentity<T> {
    /// g_KK g_TT − g_TK g_KT
    pub minor: T,
    /// g_KT g_TL + g_KL g_TK + g_KL g_TL
    pub expanded: T,
    /// (θ_L/θ_T)[g_KT(g_LT + g_LK) + (θ_L/θ_K) g_LK g_LT]
    pub share_form: T,
}

impl<T: Scalar> MinorIdentity<T> {
    fn rel(a: T, b: T) -> T {
        (a - b).abs() / a.abs().max(b.abs()).max(T::min_positive_value())
    }

    /// Largest pairwise relative disagreement among the three forms.
    pub fn max_disagreement(&self) -> T {
        Self::rel(self.minor, self.expanded)
            .max(Self::rel(self.minor, self.share_form))
            .max(Self::rel(self.expanded, self.share_form))
    }

    /// Names the form that disagrees with the other two, if any.
    pub fn outlier(&self, rel_tol: T) -> Option<&'static str> {
        let me = Self::rel(self.minor, self.expanded) > rel_tol;
        let ms = Self::rel(self.minor, self.share_form) > rel_tol;
        let es = Self::rel(self.expanded, self.share_form) > rel_tol;
        match (me, ms, es) {
            (false, false, false) => None,
            (true, false, true) => Some("expanded"),
            (false, true, true) => Some("share_form"),
            (true, true, false) => Some("minor"),
            _ => Some("all"),
        }
    }
}

impl<T: Scalar> EwsMatrix<T> {
    pub fn get(&self, i: usize, h: usize) -> T {
        self.g[i][h]
    }

    pub fn row_sum(&self, i: usize) -> T {
        self.g[i].iter().copied().sum()
    }

    /// max_{i,h} |g_ih − (θ_h/θ_i) g_hi|
    pub fn reciprocity_residual(&self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for h in 0..3 {
                let r = self.g[i][h] - self.theta_factor[h] / self.theta_factor[i] * self.g[h][i];
                worst = worst.max(r.abs());
            }
        }
        worst
    }

    /// (g_LK, g_LT, g_KT), the triple that fixes the quadrant of the ratio vector.
    pub fn key_triple(&self) -> [T; 3] {
        [self.g[L][K], self.g[L][T], self.g[K][T]]
    }

    pub fn sign_triple(&self) -> [Sign; 3] {
        self.key_triple().map(Sign::strict)
    }

    /// True when the key triple is one of (+,+,+), (−,+,+), (+,−,+), (+,+,−).
    pub fn has_admissible_sign_pattern(&self) -> bool {
        let negatives = self.key_triple().iter().filter(|&&x| x < T::zero()).count();
        negatives <= 1
    }

    pub fn lt_sign(&self) -> Sign {
        Sign::strict(self.g[L][T])
    }

    pub fn minor_identity(&self) -> MinorIdentity<T> {
        let g = &self.g;
        let th = &self.theta_factor;
        MinorIdentity {
            minor: g[K][K] * g[T][T] - g[T][K] * g[K][T],
            expanded: g[K][T] * g[T][L] + g[K][L] * g[T][K] + g[K][L] * g[T][L],
            share_form: th[L] / th[T]
                * (g[K][T] * (g[L][T] + g[L][K]) + th[L] / th[K] * g[L][K] * g[L][T]),
        }
    }

    /// Invariant violations of the EWS structure at absolute tolerance `tolerance`
    /// (relative for the minor identity).
    pub fn check(&self, tolerance: f64) -> ValidationReport {
        let tol = T::lit(tolerance);
        let mut report = ValidationReport::default();
        for i in 0..3 {
            report.residual(Invariant::EwsRowSum, || format!("row {}", Factor::ALL[i]), self.row_sum(i), tol);
            if !(self.g[i][i] < T::zero()) {
                report.push(Invariant::EwsOwnNegative, format!("g_{0}{0}", Factor::ALL[i]), self.g[i][i]);
            }
        }
        report.residual(Invariant::EwsReciprocity, || "matrix".into(), self.reciprocity_residual(), tol);
        if !self.has_admissible_sign_pattern() {
            report.push(Invariant::EwsSignPattern, "(g_LK,g_LT,g_KT)".into(), T::one());
        }
        let id = self.minor_identity();
        if let Some(form) = id.outlier(tol) {
            report.push(Invariant::EwsMinorIdentity, format!("disagreeing form: {form}"), id.max_disagreement());
        }
        if !(id.minor > T::zero()) {
            report.push(Invariant::EwsMinorIdentity, "minor not positive".into(), id.minor);
        }
        report
    }
}

/// g_ih = Σ_j λ_ij ε_h^ij.
pub fn ews_matrix<T: Scalar>(e: &Economy<T>) -> EwsMatrix<T> {
    let eps = epsilon(e);
    let mut g = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for h in 0..3 {
            g[i][h] = (0..2).map(|j| e.lambda_share[i][j] * eps[j][i][h]).sum();
        }
    }
    EwsMatrix { g, theta_factor: e.theta_factor }
}

/// A point (S′, U′) of the EWS-ratio plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint<T> {
    pub s: T,
    pub u: T,
    pub theta_l_over_k: T,
}

impl<T: Scalar> RatioPoint<T> {
    pub fn new(s: T, u: T, theta_l_over_k: T) -> Self {
        RatioPoint { s, u, theta_l_over_k }
    }
}

/// (S′, U′) = (g_LK / g_LT, g_KT / g_LT).
pub fn ews_ratio_vector<T: Scalar>(g: &EwsMatrix<T>) -> Result<RatioPoint<T>> {
    let t = g.g[L][T];
    if t.abs() < T::lit(tol::DEGENERATE) {
        return Err(Error::DegenerateDenominator(t.to_f64_lossy()));
    }
    Ok(RatioPoint {
        s: g.g[L][K] / t,
        u: g.g[K][T] / t,
        theta_l_over_k: g.theta_factor[L] / g.theta_factor[K],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairLabel {
    Substitutes { borderline: bool },
    Complements,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairClassification {
    pub pair: (Factor, Factor),
    pub label: PairLabel,
}

/// Economy-wide substitute/complement label for each unordered factor pair.
pub fn classify_substitutes<T: Scalar>(g: &EwsMatrix<T>) -> [PairClassification; 3] {
    [(T, K), (T, L), (K, L)].map(|(i, h)| {
        let v = g.g[i][h];
        let label = if v < T::zero() {
            PairLabel::Complements
        } else {
            PairLabel::Substitutes { borderline: v == T::zero() }
        };
        PairClassification { pair: (Factor::ALL[i], Factor::ALL[h]), label }
    })
}
