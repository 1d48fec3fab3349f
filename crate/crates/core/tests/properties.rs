use hessian_bellman::bellman::{build_control_net, rhs_power};
use hessian_bellman::cone::{classify_spectrum, spectrum_in_cone};
use hessian_bellman::solver::{Domain, Grid};
use hessian_bellman::symfun::{elem_sym_all, elem_sym_newton_girard};
use proptest::prelude::*;

proptest! {
    #[test]
    fn elem_sym_is_permutation_invariant(mut v in prop::collection::vec(-3.0f64..3.0, 2..=6), k in 0usize..6) {
        let k = k.min(v.len());
        let a = elem_sym_all(&v)[k];
        v.reverse();
        v.rotate_left(1);
        let b = elem_sym_all(&v)[k];
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn elem_sym_matches_newton_girard(v in prop::collection::vec(-2.0f64..2.0, 1..=6)) {
        let direct = elem_sym_all(&v);
        let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        let scale = elem_sym_all(&abs);
        for k in 0..=v.len() {
            let ng = elem_sym_newton_girard(&v, k).unwrap();
            prop_assert!((ng - direct[k]).abs() <= 1e-11 * scale[k].max(1.0));
        }
    }

    #[test]
    fn shifting_past_the_root_enters_the_cone(v in prop::collection::vec(-2.0f64..2.0, 2..=6), m in 1usize..6, eps in 1e-6f64..1.0) {
        let m = m.min(v.len());
        let t0 = classify_spectrum(&v, m).unwrap().boundary_distance_t;
        let shifted: Vec<f64> = v.iter().map(|x| x + t0 + eps).collect();
        prop_assert!(spectrum_in_cone(&shifted, m));
    }

    #[test]
    fn rhs_power_inverts(g in 1e-8f64..1e4, m in 2usize..6) {
        let p = rhs_power(g, m);
        let back = p.powf(m as f64 / (m as f64 - 1.0));
        prop_assert!((back - g).abs() <= 1e-12 * g);
    }

    #[test]
    fn ball_crossing_lands_on_the_circle(x in -0.7f64..0.7, y in -0.7f64..0.7, dx in -1.0f64..1.0, dy in -1.0f64..1.0) {
        prop_assume!(x * x + y * y < 0.49 && dx.abs() + dy.abs() > 1e-3);
        let step = [dx * 2.0, dy * 2.0];
        let s = Domain::Ball.crossing(&[x, y], &step);
        prop_assert!((0.0..=1.0).contains(&s));
        let px = x + s * step[0];
        let py = y + s * step[1];
        let r = (px * px + py * py).sqrt();
        if s < 1.0 {
            prop_assert!((r - 1.0).abs() < 1e-12);
        } else {
            prop_assert!(r <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn grid_offsets_are_inverse(n in 2usize..12, idx in 0usize..2000, a in -3i32..3, b in -3i32..3) {
        let g = Grid::<f64>::new(2, n);
        let idx = idx % g.node_count();
        if let Some(j) = g.offset(idx, &[a, b]) {
            prop_assert_eq!(g.offset(j, &[-a, -b]), Some(idx));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn net_controls_are_normalized(d in 2usize..5, m in 2usize..5, frames in 1usize..4, profiles in 1usize..6, seed in 0u64..1000) {
        let m = m.min(d);
        let net = build_control_net::<f64>(d, m, frames, profiles, seed).unwrap();
        prop_assert_eq!(net.len(), 1 + frames * (profiles - 1));
        for c in net.controls() {
            prop_assert!((c.a.trace() - 1.0).abs() < 1e-12);
            prop_assert!((c.w.trace() - 1.0).abs() < 1e-12);
            prop_assert!(c.kappa > 0.0 && c.kappa <= 1.0 + 1e-12);
            prop_assert!(c.frame_weights.iter().all(|&x| x > 0.0));
        }
    }
}
