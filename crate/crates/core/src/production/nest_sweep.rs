//! Varying only the inner elasticity of two-level CES technologies at a fixed
//! share snapshot. The cross elasticities involving labor stay at the outer
//! value, so g_LK and g_LT (and hence S′) cannot move while U′ sweeps through
//! zero with the land-capital elasticity.

use serde::{Deserialize, Serialize};

use super::{aes_from_spec, Nest, ProductionSpec};
use crate::error::Result;
use crate::geometry::{quadrant, segment_ab, vector_line, Quadrant, SegmentLocation};
use crate::model::{ews_matrix, ews_ratio_vector, Economy, RatioPoint};
use crate::scalar::Scalar;
use crate::statics::{solve_linear, Shock};
use crate::tol;

/// σ_TK of a {T,K}-nested technology: s_out + (s_in − s_out)/θ_N.
pub fn nested_sigma_tk<T: Scalar>(nest_share: T, inner: T, outer: T) -> T {
    outer + (inner - outer) / nest_share
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestSweepRow<T> {
    pub inner_elasticity: T,
    /// σ_TK in sectors 1 and 2.
    pub sigma_tk: [T; 2],
    pub point: RatioPoint<T>,
    pub quadrant: Quadrant,
    /// For a unit price shock whose chord AB lies in quadrant IV: how many
    /// times the vertical line S′ = d meets it (0 or 1).
    pub chord_crossings: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestSweep<T> {
    pub rows: Vec<NestSweepRow<T>>,
    pub s_mean: T,
    pub s_std: T,
    pub u_changes_sign: bool,
    /// U′ strictly increasing along an increasing grid.
    pub u_monotone: bool,
}

/// Evaluates (S′, U′) for each inner elasticity with both sectors nested on
/// {T,K}, shares and outer elasticities held fixed.
pub fn nest_sweep<T: Scalar>(
    theta_share: [[T; 2]; 3],
    theta_good: [T; 2],
    outer: [T; 2],
    inner_grid: &[T],
) -> Result<NestSweep<T>> {
    let mut rows = Vec::with_capacity(inner_grid.len());
    for &inner in inner_grid {
        let specs = [0, 1].map(|j| ProductionSpec::TwoLevelCes {
            nest: Nest::TK,
            shares: [theta_share[0][j], theta_share[1][j], theta_share[2][j]],
            inner_elasticity: inner,
            outer_elasticity: outer[j],
        });
        for spec in &specs {
            spec.check()?;
        }
        let sigma = specs.map(|s| aes_from_spec(&s, [T::one(); 3]));
        let e = Economy::from_shares(theta_share, theta_good, sigma);
        let point = ews_ratio_vector(&ews_matrix(&e))?;
        rows.push(NestSweepRow {
            inner_elasticity: inner,
            sigma_tk: [sigma[0][0][1], sigma[1][0][1]],
            point,
            quadrant: quadrant(&point),
            chord_crossings: chord_crossings(&e, point.s),
        });
    }
    let n = T::from_usize(rows.len().max(1)).unwrap_or_else(T::one);
    let s_mean = rows.iter().map(|r| r.point.s).sum::<T>() / n;
    let s_std = (rows.iter().map(|r| (r.point.s - s_mean).powi(2)).sum::<T>() / n).sqrt();
    let u_changes_sign = rows.iter().any(|r| r.point.u > T::zero()) && rows.iter().any(|r| r.point.u < T::zero());
    let u_monotone = rows.windows(2).all(|w| w[1].point.u > w[0].point.u);
    Ok(NestSweep { rows, s_mean, s_std, u_changes_sign, u_monotone })
}

fn chord_crossings<T: Scalar>(e: &Economy<T>, d: T) -> Option<usize> {
    let resp = solve_linear(e, &Shock::price(T::one())).ok()?;
    let line = vector_line(&resp, e).ok()?;
    let seg = segment_ab(&line, &resp, e).ok()?;
    if quadrant(&seg.point_a) != Quadrant::IV || quadrant(&seg.point_b) != Quadrant::IV {
        return None;
    }
    let probe = RatioPoint::new(d, line.u_at(d), line.theta_l_over_k);
    let hit = seg.locate(&probe, T::lit(tol::BORDER)) != SegmentLocation::Outside;
    Some(usize::from(hit))
}
