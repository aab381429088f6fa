#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

use ews_core::estimate::{estimate, Observation};
use ews_core::geometry::{region_contains, segment_ab, vector_line};
use ews_core::model::{ews_matrix, ews_ratio_vector, validate_economy, Economy};
use ews_core::production::{aes_from_spec, cost_shares, unit_cost, Nest, ProductionSpec};
use ews_core::statics::{solve_linear, Shock};
use proptest::prelude::*;

const T: usize = 0;
const K: usize = 1;
const L: usize = 2;

fn shares() -> impl Strategy<Value = [f64; 3]> {
    [0.05f64..1.0, 0.05f64..1.0, 0.05f64..1.0].prop_map(|w| {
        let s: f64 = w.iter().sum();
        w.map(|x| x / s)
    })
}

fn nest() -> impl Strategy<Value = Nest> {
    prop_oneof![Just(Nest::TK), Just(Nest::TL), Just(Nest::KL)]
}

fn technology() -> impl Strategy<Value = ProductionSpec<f64>> {
    prop_oneof![
        shares().prop_map(|shares| ProductionSpec::CobbDouglas { shares }),
        (shares(), 0.2f64..5.0).prop_map(|(shares, elasticity)| ProductionSpec::Ces { shares, elasticity }),
        (shares(), nest(), 0.2f64..5.0, 0.2f64..5.0).prop_map(|(shares, nest, inner_elasticity, outer_elasticity)| {
            ProductionSpec::TwoLevelCes { nest, shares, inner_elasticity, outer_elasticity }
        }),
    ]
}

/// Snapshot at unit factor prices of two arbitrary technologies.
fn economy() -> impl Strategy<Value = Economy<f64>> {
    (technology(), technology(), 0.1f64..0.9).prop_map(|(a, b, t1)| {
        let specs = [a, b];
        let sigma = specs.map(|s| aes_from_spec(&s, [1.0; 3]));
        let th = [0, 1, 2].map(|i| [specs[0].shares()[i], specs[1].shares()[i]]);
        Economy::from_shares(th, [t1, 1.0 - t1], sigma)
    })
}

fn shock() -> impl Strategy<Value = Shock<f64>> {
    ([-1.0f64..1.0, -1.0f64..1.0], [-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0]).prop_map(|(p, v)| Shock::new(p, v))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn snapshots_satisfy_the_structural_invariants(e in economy()) {
        let report = validate_economy(&e, false);
        prop_assert!(report.is_empty(), "{report}");
        let g = ews_matrix(&e);
        for i in 0..3 {
            prop_assert!(g.row_sum(i).abs() < 1e-12);
            prop_assert!(g.g[i][i] < 0.0);
        }
        prop_assert!(g.reciprocity_residual() < 1e-12);
        prop_assert!(g.has_admissible_sign_pattern());
        let id = g.minor_identity();
        prop_assert!(id.minor > 0.0);
        prop_assert!(id.max_disagreement() < 1e-10);
    }

    #[test]
    fn ratio_point_respects_the_boundary(e in economy()) {
        let g = ews_matrix(&e);
        if let Ok(p) = ews_ratio_vector(&g) {
            prop_assert!(region_contains(&p, g.lt_sign()).unwrap());
            let b = -p.theta_l_over_k * p.s / (p.s + 1.0);
            if g.g[L][T] > 0.0 {
                prop_assert!(p.u > b);
            } else {
                prop_assert!(p.u < b);
            }
        }
    }

    #[test]
    fn ratio_point_lies_on_line_and_in_segment(e in economy(), s in shock()) {
        let resp = solve_linear(&e, &s).unwrap();
        let Ok(p) = ews_ratio_vector(&ews_matrix(&e)) else { return Ok(()) };
        let Ok(line) = vector_line(&resp, &e) else { return Ok(()) };
        prop_assert!(line.residual(&p) < 1e-8, "residual {}", line.residual(&p));
        if let Ok(seg) = segment_ab(&line, &resp, &e) {
            prop_assert!(seg.contains(&p));
            prop_assert!(seg.closed_form_gap < 1e-8);
        }
    }

    #[test]
    fn linear_response_is_linear(e in economy(), s1 in shock(), s2 in shock(), a in -3.0f64..3.0) {
        let r1 = solve_linear(&e, &s1).unwrap();
        let r2 = solve_linear(&e, &s2).unwrap();
        let sum = Shock::new(
            [s1.p_star[0] + a * s2.p_star[0], s1.p_star[1] + a * s2.p_star[1]],
            [0, 1, 2].map(|i| s1.v_star[i] + a * s2.v_star[i]),
        );
        let r = solve_linear(&e, &sum).unwrap();
        let scale = 1f64.max(r1.w_star.iter().chain(&r2.w_star).fold(0f64, |m, x| m.max(x.abs())));
        for h in 0..3 {
            prop_assert!((r.w_star[h] - (r1.w_star[h] + a * r2.w_star[h])).abs() < 1e-9 * scale);
        }
        for j in 0..2 {
            prop_assert!(close(r.x_star[j], r1.x_star[j] + a * r2.x_star[j], 1e-8));
        }
    }

    #[test]
    fn zero_profit_and_cost_minimization_hold(e in economy(), s in shock()) {
        let r = solve_linear(&e, &s).unwrap();
        for j in 0..2 {
            let p: f64 = (0..3).map(|i| e.theta_share[i][j] * r.w_star[i]).sum();
            prop_assert!((p - s.p_star[j]).abs() < 1e-9);
        }
        prop_assert!(r.cost_minimization_residual(&e) < 1e-10);
        prop_assert!(r.aggregate_share_residual(&e) < 1e-10);
    }

    #[test]
    fn unit_cost_is_homogeneous(spec in technology(), w in [0.2f64..5.0, 0.2f64..5.0, 0.2f64..5.0], k in 0.1f64..10.0) {
        let (c, a) = unit_cost(&spec, w);
        let (ck, ak) = unit_cost(&spec, w.map(|x| k * x));
        prop_assert!(close(ck, k * c, 1e-12));
        for i in 0..3 {
            prop_assert!(close(ak[i], a[i], 1e-12));
        }
        let shares = cost_shares(&spec, w);
        prop_assert!((shares.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let sigma = aes_from_spec(&spec, w);
        for i in 0..3 {
            let hom: f64 = (0..3).map(|h| shares[h] * sigma[i][h]).sum();
            prop_assert!(hom.abs() < 1e-10);
            for h in 0..3 {
                prop_assert!(close(sigma[i][h], sigma[h][i], 1e-12));
            }
        }
    }

    #[test]
    fn single_precision_tracks_double(e in economy()) {
        let g64 = ews_matrix(&e).g;
        let g32 = ews_matrix(&e.cast::<f32>()).g;
        for i in 0..3 {
            for h in 0..3 {
                prop_assert!((g64[i][h] - f64::from(g32[i][h])).abs() < 1e-4 * 1f64.max(g64[i][h].abs()));
            }
        }
    }

    #[test]
    fn reversing_time_mirrors_the_estimate(e in economy(), v in [-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0], p in 0.1f64..2.0) {
        let forward = solve_linear(&e, &Shock::new([p, 0.0], v)).unwrap();
        let backward = solve_linear(&e, &Shock::new([-p, 0.0], v.map(|x| -x))).unwrap();
        let obs_f = Observation::from_response(&e, &forward);
        let obs_b = Observation::from_response(&e, &backward);
        let (Ok(f), Ok(b)) = (estimate(&obs_f, false), estimate(&obs_b, true)) else { return Ok(()) };
        prop_assert!(b.reversed);
        prop_assert_eq!(f.quadrant.verdict, b.quadrant.verdict);
        prop_assert_eq!(f.ranking, b.ranking);
        prop_assert_eq!(f.subregion.verdict, b.subregion.verdict);
    }

    #[test]
    fn capital_land_block_matches_shares(e in economy()) {
        // g_KT weighs sector elasticities by capital allocation and land shares
        let g = ews_matrix(&e).g;
        let direct: f64 = (0..2).map(|j| e.lambda_share[K][j] * e.theta_share[T][j] * e.sigma[j][K][T]).sum();
        prop_assert!(close(g[K][T], direct, 1e-14));
    }
}
