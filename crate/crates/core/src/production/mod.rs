//! Explicit technologies behind an economy snapshot: unit-cost functions,
//! their Allen elasticities, the nonlinear equilibrium and a finite-difference
//! Rybczynski oracle.

mod nest_sweep;
mod sampling;

pub use nest_sweep::{nest_sweep, nested_sigma_tk, NestSweep, NestSweepRow};
pub use sampling::{sample_economy, Family, NestPolicy, SampleConstraints, SampledEconomy};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{aes_with_own_terms, Economy};
use crate::scalar::Scalar;

/// The pair of factors sharing the inner nest of a two-level CES technology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Nest {
    #[default]
    TK,
    TL,
    KL,
}

impl Nest {
    pub const ALL: [Nest; 3] = [Nest::TK, Nest::TL, Nest::KL];

    /// (inner a, inner b, outer c) factor indices.
    pub fn factors(self) -> (usize, usize, usize) {
        match self {
            Nest::TK => (0, 1, 2),
            Nest::TL => (0, 2, 1),
            Nest::KL => (1, 2, 0),
        }
    }
}

/// Technology of one sector. `shares` are the cost shares at unit factor
/// prices, ordered (T, K, L); unit cost is normalized to one there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ProductionSpec<T> {
    CobbDouglas {
        shares: [T; 3],
    },
    Ces {
        shares: [T; 3],
        elasticity: T,
    },
    TwoLevelCes {
        #[serde(default)]
        nest: Nest,
        shares: [T; 3],
        inner_elasticity: T,
        outer_elasticity: T,
    },
}

impl<T: Scalar> ProductionSpec<T> {
    pub fn shares(&self) -> [T; 3] {
        match *self {
            ProductionSpec::CobbDouglas { shares } => shares,
            ProductionSpec::Ces { shares, .. } => shares,
            ProductionSpec::TwoLevelCes { shares, .. } => shares,
        }
    }

    /// Positive shares summing to one and positive elasticities.
    pub fn check(&self) -> Result<()> {
        let shares = self.shares();
        if shares.iter().any(|&s| !(s > T::zero())) {
            return Err(Error::InvalidInput("technology shares must be positive".into()));
        }
        let sum: T = shares.iter().copied().sum();
        if (sum - T::one()).abs() > T::lit(1e-9).max(T::epsilon() * T::lit(8.0)) {
            return Err(Error::InvalidInput(format!("technology shares sum to {sum}, not 1")));
        }
        let positive = |x: T| x > T::zero() && x.is_finite();
        let ok = match *self {
            ProductionSpec::CobbDouglas { .. } => true,
            ProductionSpec::Ces { elasticity, .. } => positive(elasticity),
            ProductionSpec::TwoLevelCes { inner_elasticity, outer_elasticity, .. } => {
                positive(inner_elasticity) && positive(outer_elasticity)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("elasticities must be positive".into()))
        }
    }

    pub fn cast<U: Scalar>(&self) -> ProductionSpec<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        match *self {
            ProductionSpec::CobbDouglas { shares } => ProductionSpec::CobbDouglas { shares: shares.map(c) },
            ProductionSpec::Ces { shares, elasticity } => ProductionSpec::Ces { shares: shares.map(c), elasticity: c(elasticity) },
            ProductionSpec::TwoLevelCes { nest, shares, inner_elasticity, outer_elasticity } => ProductionSpec::TwoLevelCes {
                nest,
                shares: shares.map(c),
                inner_elasticity: c(inner_elasticity),
                outer_elasticity: c(outer_elasticity),
            },
        }
    }
}

fn is_unit_elasticity<T: Scalar>(s: T) -> bool {
    (s - T::one()).abs() < T::lit(1e-9)
}

/// CES price index (Σ α_k p_k^{1−s})^{1/(1−s)} with weights summing to one;
/// the geometric mean when s = 1.
fn ces_index<T: Scalar>(weights: &[T], prices: &[T], s: T) -> T {
    if is_unit_elasticity(s) {
        return weights.iter().zip(prices).map(|(&a, &p)| a * p.ln()).sum::<T>().exp();
    }
    let rho = T::one() - s;
    weights.iter().zip(prices).map(|(&a, &p)| a * p.powf(rho)).sum::<T>().powf(T::one() / rho)
}

/// Unit cost and the cost-minimizing input coefficients a_i = ∂c/∂w_i.
pub fn unit_cost<T: Scalar>(spec: &ProductionSpec<T>, w: [T; 3]) -> (T, [T; 3]) {
    match *spec {
        ProductionSpec::CobbDouglas { shares } => cobb_douglas_cost(shares, w),
        ProductionSpec::Ces { shares, elasticity } if is_unit_elasticity(elasticity) => cobb_douglas_cost(shares, w),
        ProductionSpec::Ces { shares, elasticity: s } => {
            let c = ces_index(&shares, &w, s);
            (c, [0, 1, 2].map(|i| shares[i] * (c / w[i]).powf(s)))
        }
        ProductionSpec::TwoLevelCes { nest, shares, inner_elasticity: s_in, outer_elasticity: s_out } => {
            let (ia, ib, ic) = nest.factors();
            let nest_share = shares[ia] + shares[ib];
            let beta = [shares[ia] / nest_share, shares[ib] / nest_share];
            let c_in = ces_index(&beta, &[w[ia], w[ib]], s_in);
            let c = ces_index(&[nest_share, shares[ic]], &[c_in, w[ic]], s_out);
            let outer_pull = nest_share * (c / c_in).powf(s_out);
            let mut a = [T::zero(); 3];
            a[ia] = outer_pull * beta[0] * (c_in / w[ia]).powf(s_in);
            a[ib] = outer_pull * beta[1] * (c_in / w[ib]).powf(s_in);
            a[ic] = shares[ic] * (c / w[ic]).powf(s_out);
            (c, a)
        }
    }
}

fn cobb_douglas_cost<T: Scalar>(shares: [T; 3], w: [T; 3]) -> (T, [T; 3]) {
    let c = ces_index(&shares, &w, T::one());
    (c, [0, 1, 2].map(|i| shares[i] * c / w[i]))
}

/// Cost shares a_i w_i / c at factor prices `w`.
pub fn cost_shares<T: Scalar>(spec: &ProductionSpec<T>, w: [T; 3]) -> [T; 3] {
    let (c, a) = unit_cost(spec, w);
    [0, 1, 2].map(|i| a[i] * w[i] / c)
}

/// Allen partial elasticities of substitution at factor prices `w`, with the
/// own terms fixed by homogeneity.
pub fn aes_from_spec<T: Scalar>(spec: &ProductionSpec<T>, w: [T; 3]) -> [[T; 3]; 3] {
    let theta = cost_shares(spec, w);
    let cross = match *spec {
        ProductionSpec::CobbDouglas { .. } => [[T::one(); 3]; 3],
        ProductionSpec::Ces { elasticity, .. } => [[elasticity; 3]; 3],
        ProductionSpec::TwoLevelCes { nest, inner_elasticity: s_in, outer_elasticity: s_out, .. } => {
            let (ia, ib, _) = nest.factors();
            let mut m = [[s_out; 3]; 3];
            let inside = s_out + (s_in - s_out) / (theta[ia] + theta[ib]);
            m[ia][ib] = inside;
            m[ib][ia] = inside;
            m
        }
    };
    aes_with_own_terms(theta, cross)
}

/// A solved equilibrium in levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint<T> {
    pub w: [T; 3],
    pub p: [T; 2],
    pub v: [T; 3],
    pub x: [T; 2],
    /// Input coefficients `a[i][j]`.
    pub a: [[T; 2]; 3],
    pub income: T,
    pub iterations: usize,
}

impl<T: Scalar> EquilibriumPoint<T> {
    /// max_j |Σ_i a_ij w_i − p_j| / p_j
    pub fn zero_profit_residual(&self) -> T {
        (0..2)
            .map(|j| ((0..3).map(|i| self.a[i][j] * self.w[i]).sum::<T>() - self.p[j]).abs() / self.p[j])
            .fold(T::zero(), T::max)
    }

    /// max_i |Σ_j a_ij X_j − V_i| / V_i
    pub fn full_employment_residual(&self) -> T {
        (0..3)
            .map(|i| ((0..2).map(|j| self.a[i][j] * self.x[j]).sum::<T>() - self.v[i]).abs() / self.v[i])
            .fold(T::zero(), T::max)
    }

    /// |Σ p_j X_j − Σ w_i V_i| / I
    pub fn income_residual(&self) -> T {
        let px: T = (0..2).map(|j| self.p[j] * self.x[j]).sum();
        let wv: T = (0..3).map(|i| self.w[i] * self.v[i]).sum();
        (px - wv).abs() / self.income
    }
}

fn coefficients<T: Scalar>(specs: &[ProductionSpec<T>; 2], w: [T; 3]) -> ([T; 2], [[T; 2]; 3]) {
    let mut c = [T::zero(); 2];
    let mut a = [[T::zero(); 2]; 3];
    for j in 0..2 {
        let (cj, aj) = unit_cost(&specs[j], w);
        c[j] = cj;
        for i in 0..3 {
            a[i][j] = aj[i];
        }
    }
    (c, a)
}

fn residuals<T: Scalar>(specs: &[ProductionSpec<T>; 2], p: [T; 2], v: [T; 3], w: [T; 3], x: [T; 2]) -> [T; 5] {
    let (c, a) = coefficients(specs, w);
    let mut r = [T::zero(); 5];
    for j in 0..2 {
        r[j] = c[j] / p[j] - T::one();
    }
    for i in 0..3 {
        r[2 + i] = (a[i][0] * x[0] + a[i][1] * x[1]) / v[i] - T::one();
    }
    r
}

fn inf_norm<T: Scalar, const N: usize>(r: &[T; N]) -> T {
    r.iter().fold(T::zero(), |m, &x| if x.is_nan() { T::infinity() } else { m.max(x.abs()) })
}

fn jacobian<T: Scalar>(specs: &[ProductionSpec<T>; 2], p: [T; 2], v: [T; 3], w: [T; 3], x: [T; 2]) -> [[T; 5]; 5] {
    let (c, a) = coefficients(specs, w);
    let mut jac = [[T::zero(); 5]; 5];
    for j in 0..2 {
        for h in 0..3 {
            jac[j][h] = a[h][j] / p[j];
        }
    }
    let sigma = [0, 1].map(|j| aes_from_spec(&specs[j], w));
    for i in 0..3 {
        for h in 0..3 {
            // ∂a_ij/∂w_h = a_ij θ_hj σ_ih / w_h with θ_hj = a_hj w_h / c_j
            let d: T = (0..2).map(|j| x[j] * a[i][j] * (a[h][j] / c[j]) * sigma[j][i][h]).sum();
            jac[2 + i][h] = d / v[i];
        }
        for j in 0..2 {
            jac[2 + i][3 + j] = a[i][j] / v[i];
        }
    }
    jac
}

const MAX_ITERATIONS: usize = 100;

fn convergence_tolerance<T: Scalar>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(64.0))
}

/// Newton solve of zero profit and full employment for (w, X) at given
/// prices and endowments.
pub fn solve_equilibrium<T: Scalar>(specs: &[ProductionSpec<T>; 2], p: [T; 2], v: [T; 3], w0: [T; 3]) -> Result<EquilibriumPoint<T>> {
    for spec in specs {
        spec.check()?;
    }
    let positive = |xs: &[T]| xs.iter().all(|&x| x > T::zero() && x.is_finite());
    if !positive(&p) || !positive(&v) || !positive(&w0) {
        return Err(Error::InvalidInput("prices, endowments and the initial guess must be positive".into()));
    }

    let mut w = w0;
    let mut x = initial_outputs(specs, v, w0);
    let mut r = residuals(specs, p, v, w, x);
    let mut norm = inf_norm(&r);
    let tol = convergence_tolerance::<T>();
    let half = T::lit(0.5);
    let mut iterations = 0;

    while norm >= tol {
        if iterations == MAX_ITERATIONS {
            return Err(Error::NonConvergence { iterations, residual: norm.to_f64_lossy() });
        }
        iterations += 1;
        let jac = jacobian(specs, p, v, w, x);
        let Some(step) = linalg::solve(jac, r.map(|x| -x)) else {
            return Err(Error::NonConvergence { iterations, residual: norm.to_f64_lossy() });
        };
        let dx = step.x;

        // keep every factor price above half its current value
        let mut alpha = T::one();
        for h in 0..3 {
            if dx[h] < -half * w[h] {
                alpha = alpha.min(-half * w[h] / dx[h]);
            }
        }

        let mut accepted = false;
        for _ in 0..40 {
            let w_try = [0, 1, 2].map(|h| w[h] + alpha * dx[h]);
            let x_try = [x[0] + alpha * dx[3], x[1] + alpha * dx[4]];
            let r_try = residuals(specs, p, v, w_try, x_try);
            let n_try = inf_norm(&r_try);
            if n_try < norm {
                (w, x, r, norm) = (w_try, x_try, r_try, n_try);
                accepted = true;
                break;
            }
            alpha = alpha * half;
        }
        if !accepted {
            return Err(Error::NonConvergence { iterations, residual: norm.to_f64_lossy() });
        }
    }
    let _ = r;

    if x.iter().any(|&xj| !(xj > T::zero())) {
        return Err(Error::Specialization(x.map(|v| v.to_f64_lossy())));
    }
    let (_, a) = coefficients(specs, w);
    let income = (0..2).map(|j| p[j] * x[j]).sum();
    Ok(EquilibriumPoint { w, p, v, x, a, income, iterations })
}

/// Least-squares outputs for the full-employment rows at the starting prices.
fn initial_outputs<T: Scalar>(specs: &[ProductionSpec<T>; 2], v: [T; 3], w: [T; 3]) -> [T; 2] {
    let (_, a) = coefficients(specs, w);
    let mut ata = [[T::zero(); 2]; 2];
    let mut atv = [T::zero(); 2];
    for i in 0..3 {
        for j in 0..2 {
            atv[j] = atv[j] + a[i][j] * v[i];
            for k in 0..2 {
                ata[j][k] = ata[j][k] + a[i][j] * a[i][k];
            }
        }
    }
    let fallback = [T::one(); 2];
    let Some(sol) = linalg::solve(ata, atv) else {
        return fallback;
    };
    let floor = T::lit(1e-3) * (sol.x[0].abs() + sol.x[1].abs()).max(T::lit(1e-6));
    sol.x.map(|xj| xj.max(floor))
}

/// Share snapshot of an equilibrium, with elasticities evaluated at its factor prices.
pub fn economy_snapshot<T: Scalar>(eq: &EquilibriumPoint<T>, specs: &[ProductionSpec<T>; 2]) -> Economy<T> {
    let mut theta_share = [[T::zero(); 2]; 3];
    let mut lambda_share = [[T::zero(); 2]; 3];
    for i in 0..3 {
        for j in 0..2 {
            theta_share[i][j] = eq.a[i][j] * eq.w[i] / eq.p[j];
            lambda_share[i][j] = eq.a[i][j] * eq.x[j] / eq.v[i];
        }
    }
    Economy {
        theta_share,
        lambda_share,
        theta_factor: [0, 1, 2].map(|i| eq.w[i] * eq.v[i] / eq.income),
        theta_good: [0, 1].map(|j| eq.p[j] * eq.x[j] / eq.income),
        sigma: [0, 1].map(|j| aes_from_spec(&specs[j], eq.w)),
    }
}

/// Central-difference output elasticities with respect to each endowment,
/// `out[j][i] = (ΔX_j / X_j) / (ΔV_i / V_i)`.
pub fn fd_rybczynski<T: Scalar>(specs: &[ProductionSpec<T>; 2], p: [T; 2], v: [T; 3], h: T) -> Result<[[T; 3]; 2]> {
    if !(h >= T::lit(1e-6) && h <= T::lit(1e-3)) {
        return Err(Error::InvalidInput(format!("finite-difference step {h} outside [1e-6, 1e-3]")));
    }
    let base = solve_equilibrium(specs, p, v, [T::one(); 3])?;
    let mut out = [[T::zero(); 3]; 2];
    for i in 0..3 {
        let mut up = v;
        let mut down = v;
        up[i] = v[i] * (T::one() + h);
        down[i] = v[i] * (T::one() - h);
        let eu = solve_equilibrium(specs, p, up, base.w)?;
        let ed = solve_equilibrium(specs, p, down, base.w)?;
        for j in 0..2 {
            out[j][i] = (eu.x[j] - ed.x[j]) / (base.x[j] * T::lit(2.0) * h);
        }
    }
    Ok(out)
}

/// Builds the equilibrium with unit factor and goods prices in which good
/// `j` earns share `theta_good[j]` of income one. No iteration is needed
/// because every spec is calibrated at unit prices.
pub fn calibrated_equilibrium<T: Scalar>(specs: &[ProductionSpec<T>; 2], theta_good: [T; 2]) -> EquilibriumPoint<T> {
    let w = [T::one(); 3];
    let (_, a) = coefficients(specs, w);
    let x = theta_good;
    let v = [0, 1, 2].map(|i| a[i][0] * x[0] + a[i][1] * x[1]);
    EquilibriumPoint { w, p: [T::one(); 2], v, x, a, income: x[0] + x[1], iterations: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_economy;
    use approx::assert_relative_eq;

    fn specs() -> [ProductionSpec<f64>; 2] {
        [
            ProductionSpec::TwoLevelCes { nest: Nest::TK, shares: [0.45, 0.20, 0.35], inner_elasticity: 0.3, outer_elasticity: 2.0 },
            ProductionSpec::Ces { shares: [0.20, 0.50, 0.30], elasticity: 0.7 },
        ]
    }

    fn all_families() -> Vec<ProductionSpec<f64>> {
        let shares = [0.3, 0.5, 0.2];
        let mut v = vec![ProductionSpec::CobbDouglas { shares }, ProductionSpec::Ces { shares, elasticity: 0.4 }, ProductionSpec::Ces { shares, elasticity: 3.0 }];
        for nest in Nest::ALL {
            v.push(ProductionSpec::TwoLevelCes { nest, shares, inner_elasticity: 0.25, outer_elasticity: 1.7 });
            v.push(ProductionSpec::TwoLevelCes { nest, shares, inner_elasticity: 4.0, outer_elasticity: 1.0 });
        }
        v
    }

    #[test]
    fn calibrated_at_unit_prices() {
        for spec in all_families() {
            let (c, a) = unit_cost(&spec, [1.0; 3]);
            assert_relative_eq!(c, 1.0, epsilon = 1e-14);
            for i in 0..3 {
                assert_relative_eq!(a[i], spec.shares()[i], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn homogeneity() {
        let w = [0.7, 1.9, 1.2];
        for spec in all_families() {
            let (c1, a1) = unit_cost(&spec, w);
            let (c2, a2) = unit_cost(&spec, w.map(|x| 2.0 * x));
            assert_relative_eq!(c2, 2.0 * c1, max_relative = 1e-12);
            for i in 0..3 {
                assert_relative_eq!(a1[i], a2[i], max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn shephard_lemma_by_finite_difference() {
        let w = [0.8, 1.3, 1.1];
        let h = 1e-6;
        for spec in all_families() {
            let (_, a) = unit_cost(&spec, w);
            for i in 0..3 {
                let (mut up, mut dn) = (w, w);
                up[i] += h;
                dn[i] -= h;
                let fd = (unit_cost(&spec, up).0 - unit_cost(&spec, dn).0) / (2.0 * h);
                assert!((fd - a[i]).abs() < 1e-6, "{spec:?} factor {i}: {fd} vs {}", a[i]);
            }
        }
    }

    #[test]
    fn aes_by_finite_difference() {
        // ε_ih = ∂ln a_i/∂ln w_h must equal θ_h σ_ih
        let w = [0.8, 1.3, 1.1];
        let h = 1e-6;
        for spec in all_families() {
            let sigma = aes_from_spec(&spec, w);
            let theta = cost_shares(&spec, w);
            let (_, a) = unit_cost(&spec, w);
            for hh in 0..3 {
                let (mut up, mut dn) = (w, w);
                up[hh] *= 1.0 + h;
                dn[hh] *= 1.0 - h;
                let (_, au) = unit_cost(&spec, up);
                let (_, ad) = unit_cost(&spec, dn);
                for i in 0..3 {
                    let fd = (au[i].ln() - ad[i].ln()) / ((1.0 + h).ln() - (1.0 - h).ln());
                    assert!((fd - theta[hh] * sigma[i][hh]).abs() < 1e-6, "{spec:?} ({i},{hh})");
                }
                let _ = a;
            }
            for i in 0..3 {
                let s: f64 = (0..3).map(|hh| theta[hh] * sigma[i][hh]).sum();
                assert!(s.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn aes_closed_forms() {
        let ces = aes_from_spec(&ProductionSpec::Ces { shares: [0.2, 0.3, 0.5], elasticity: 0.7 }, [1.0; 3]);
        for i in 0..3 {
            for h in 0..3 {
                if i != h {
                    assert_relative_eq!(ces[i][h], 0.7, epsilon = 1e-15);
                }
            }
        }
        let cd = aes_from_spec(&ProductionSpec::CobbDouglas { shares: [0.2, 0.3, 0.5] }, [1.3, 0.9, 1.0]);
        assert_relative_eq!(cd[0][1], 1.0);
        let nested = aes_from_spec(&specs()[0], [1.0; 3]);
        assert!(nested[0][1] < 0.0, "inner < outer should allow land-capital complements");
        assert_relative_eq!(nested[2][0], 2.0);
        assert_relative_eq!(nested[2][1], 2.0);
    }

    #[test]
    fn ces_near_one_matches_cobb_douglas() {
        let shares: [f64; 3] = [0.2, 0.3, 0.5];
        let w = [0.6, 1.4, 1.1];
        let (_, cd) = unit_cost(&ProductionSpec::CobbDouglas { shares }, w);
        for s in [1.0 - 1e-4, 1.0 + 1e-4] {
            let (_, a) = unit_cost(&ProductionSpec::Ces { shares, elasticity: s }, w);
            for i in 0..3 {
                assert!((a[i] - cd[i]).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn calibrated_point_is_fixed_point() {
        let specs = specs();
        let base = calibrated_equilibrium(&specs, [0.5, 0.5]);
        let eq = solve_equilibrium(&specs, base.p, base.v, [1.0; 3]).unwrap();
        assert!(eq.iterations <= 1);
        assert_relative_eq!(eq.x[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(eq.w[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn newton_converges_from_far_start() {
        let specs = specs();
        let base = calibrated_equilibrium(&specs, [0.5, 0.5]);
        let p = [1.05, 0.98];
        let eq = solve_equilibrium(&specs, p, base.v, [3.0, 0.2, 1.5]).unwrap();
        assert!(eq.zero_profit_residual() < 1e-12);
        assert!(eq.full_employment_residual() < 1e-12);
        assert!(eq.income_residual() < 1e-9);
        let e = economy_snapshot(&eq, &specs);
        assert!(validate_economy(&e, false).is_empty(), "{}", validate_economy(&e, false));
    }

    #[test]
    fn endowment_scaling_smoke() {
        let specs = specs();
        let base = calibrated_equilibrium(&specs, [0.4, 0.6]);
        let eq = solve_equilibrium(&specs, base.p, base.v.map(|v| 2.0 * v), [1.0; 3]).unwrap();
        assert!(eq.zero_profit_residual() < 1e-12);
    }

    #[test]
    fn specialization_detected() {
        let specs = [ProductionSpec::CobbDouglas { shares: [0.6, 0.1, 0.3] }, ProductionSpec::CobbDouglas { shares: [0.1, 0.6, 0.3] }];
        // endowments far outside the cone of diversification
        let r = solve_equilibrium(&specs, [1.0, 1.0], [10.0, 0.01, 1.0], [1.0; 3]);
        assert!(matches!(r, Err(Error::Specialization(_)) | Err(Error::NonConvergence { .. })), "{r:?}");
    }

    #[test]
    fn snapshot_of_cobb_douglas_reproduces_shares() {
        let specs: [ProductionSpec<f64>; 2] = [ProductionSpec::CobbDouglas { shares: [0.45, 0.2, 0.35] }, ProductionSpec::CobbDouglas { shares: [0.2, 0.5, 0.3] }];
        let eq = calibrated_equilibrium(&specs, [0.5, 0.5]);
        let e = economy_snapshot(&eq, &specs);
        assert_relative_eq!(e.theta_share[0][0], 0.45, epsilon = 1e-15);
        assert_relative_eq!(e.theta_share[1][1], 0.5, epsilon = 1e-15);
        for i in 0..3 {
            for j in 0..2 {
                let implied = e.theta_good[j] / e.theta_factor[i] * e.theta_share[i][j];
                assert!((e.lambda_share[i][j] - implied).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fd_step_robust_and_agrees_with_linearization() {
        let specs = specs();
        let base = calibrated_equilibrium(&specs, [0.5, 0.5]);
        let fd1 = fd_rybczynski(&specs, base.p, base.v, 1e-4).unwrap();
        let fd2 = fd_rybczynski(&specs, base.p, base.v, 5e-5).unwrap();
        let lin = crate::statics::rybczynski_matrix(&economy_snapshot(&base, &specs)).unwrap();
        for j in 0..2 {
            for i in 0..3 {
                assert!((fd1[j][i] - fd2[j][i]).abs() <= 5e-3 * fd1[j][i].abs());
                assert!((fd1[j][i] - lin.values[j][i]).abs() <= 1e-2 * lin.values[j][i].abs());
            }
        }
        assert!(fd_rybczynski(&specs, base.p, base.v, 0.1).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let s = specs()[0];
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"form\":\"two_level_ces\""));
        let back: ProductionSpec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let defaulted: ProductionSpec<f64> =
            serde_json::from_str(r#"{"form":"two_level_ces","shares":[0.3,0.3,0.4],"inner_elasticity":0.5,"outer_elasticity":1.5}"#).unwrap();
        assert!(matches!(defaulted, ProductionSpec::TwoLevelCes { nest: Nest::TK, .. }));
    }

    #[test]
    fn f32_evaluation() {
        let specs: [ProductionSpec<f32>; 2] = specs().map(|s| s.cast());
        let base = calibrated_equilibrium(&specs, [0.5, 0.5]);
        let eq = solve_equilibrium(&specs, [1.02, 1.0], base.v, [1.0; 3]).unwrap();
        assert!(eq.zero_profit_residual() < 1e-4);
    }
}
