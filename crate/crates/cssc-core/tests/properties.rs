//! Property tests: structural invariants that must hold on randomised
//! inputs, not just at hand-picked points.

use std::f64::consts::PI;

use cssc_core::complexity::{
    oat_boundary_functions, oat_complexity, static_complexity, timedep_complexity,
};
use cssc_core::dynamics::{
    exact_evolve, lmg_evolution, oat_frozen_spin, squeezing_report, LmgMode, LmgParams, SpinModel,
    TwistingParams,
};
use cssc_core::geodesic::{
    euler_geodesic, hj_constants, tb_geodesic, BoundaryFunctions, BoundaryFunctions3,
};
use cssc_core::metric::{
    control_functions, euler_metric_closed, metric_at, polar_jacobian, polar_metric_closed,
    spherical_jacobian, spherical_metric_closed, tb_metric_closed, EulerFamily, PenaltyMatrix,
    TaitBryanFamily,
};
use cssc_core::so3::{
    css_state, defining_generators, EulerCoords, RotationAngles, Spin, TaitBryanCoords,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_closed_matches_construction(b in -1.0f64..1.0, g in -1.0f64..1.0) {
        let closed = euler_metric_closed(&EulerCoords::new(b, g));
        let built = metric_at(
            &EulerFamily,
            &[b, g],
            &defining_generators(),
            &PenaltyMatrix::default(),
        )
        .unwrap();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((closed.g[(i, j)] - built.g[(i, j)]).abs() < 1e-10);
            }
        }
        prop_assert!(closed.min_eigenvalue() > 0.0);
        prop_assert!(built.is_positive_definite());
    }

    #[test]
    fn tb_closed_matches_construction(
        a in -0.9f64..0.9,
        b in -0.9f64..0.9,
        g in -0.9f64..0.9,
    ) {
        // The spherical pullback degenerates on the pure-α axis.
        prop_assume!(b.hypot(g) > 1e-3);
        let closed = tb_metric_closed(&TaitBryanCoords::new(a, b, g)).unwrap();
        let built = metric_at(
            &TaitBryanFamily,
            &[a, b, g],
            &defining_generators(),
            &PenaltyMatrix::default(),
        )
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((closed.g[(i, j)] - built.g[(i, j)]).abs() < 1e-9);
            }
        }
        prop_assert!(built.is_positive_definite());
    }

    #[test]
    fn polar_diagonal_is_the_euler_pullback(rho in 0.05f64..1.3, th in -PI..PI) {
        let p = cssc_core::metric::PolarCoords::new(rho, th);
        let e = cssc_core::metric::from_polar(&p).unwrap();
        let ge = euler_metric_closed(&e);
        let jac = polar_jacobian(&p).unwrap();
        let gp = polar_metric_closed(&p).unwrap();
        // g_polar = Jᵀ g_euler J with J = ∂(β,γ)/∂(ρ,Θ).
        for i in 0..2 {
            for j in 0..2 {
                let mut pulled = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        pulled += jac[(k, i)] * ge.g[(k, l)] * jac[(l, j)];
                    }
                }
                prop_assert!((pulled - gp.g[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spherical_diagonal_is_the_tb_pullback(
        rho in 0.05f64..1.2,
        th in -PI..PI,
        ph in -1.4f64..1.4,
    ) {
        let s = cssc_core::metric::SphericalCoords::new(rho, th, ph);
        let c = cssc_core::metric::from_spherical(&s).unwrap();
        prop_assume!(c.beta.hypot(c.gamma) > 1e-3);
        let gt = tb_metric_closed(&c).unwrap();
        let jac = spherical_jacobian(&s).unwrap();
        let gs = spherical_metric_closed(&s).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut pulled = 0.0;
                for k in 0..3 {
                    for l in 0..3 {
                        pulled += jac[(k, i)] * gt.g[(k, l)] * jac[(l, j)];
                    }
                }
                prop_assert!((pulled - gs.g[(i, j)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn quadratic_form_is_penalised_control_power(
        a in -0.8f64..0.8,
        b in -0.8f64..0.8,
        g in -0.8f64..0.8,
        va in -1.0f64..1.0,
        vb in -1.0f64..1.0,
        vg in -1.0f64..1.0,
    ) {
        let basis = defining_generators();
        let tensor = metric_at(
            &TaitBryanFamily,
            &[a, b, g],
            &basis,
            &PenaltyMatrix::default(),
        )
        .unwrap();
        let v = [va, vb, vg];
        let cf = control_functions(&TaitBryanFamily, &[a, b, g], &v, &basis).unwrap();
        let power: f64 = cf.y.iter().map(|y| 4.0 * y.norm_sqr()).sum();
        prop_assert!((tensor.quadratic_form(&v) - power).abs() < 1e-10 * (1.0 + power));
    }

    #[test]
    fn isotropic_penalty_scales_the_metric(
        b in -0.8f64..0.8,
        g in -0.8f64..0.8,
        w in 0.5f64..10.0,
    ) {
        let basis = defining_generators();
        let reference = metric_at(&EulerFamily, &[b, g], &basis, &PenaltyMatrix::default()).unwrap();
        let scaled = metric_at(
            &EulerFamily,
            &[b, g],
            &basis,
            &PenaltyMatrix::isotropic(w).unwrap(),
        )
        .unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = reference.g[(i, j)] * w / 4.0;
                prop_assert!((scaled.g[(i, j)] - want).abs() < 1e-12 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn complexity_stays_on_its_branch(
        th in -3.0f64..3.0,
        ph in -3.0f64..3.0,
        n in 0u32..3,
    ) {
        let c = static_complexity(&RotationAngles::new(th, ph), n);
        let lo = 2.0 * PI * f64::from(n);
        prop_assert!(c.value >= lo && c.value < PI + lo);
    }

    #[test]
    fn complexity_monotone_in_norm(a in 0.0f64..5.0, b in 0.0f64..5.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let cl = timedep_complexity(&BoundaryFunctions::new(lo, 0.0), 0);
        let ch = timedep_complexity(&BoundaryFunctions::new(hi, 0.0), 0);
        prop_assert!(cl.value <= ch.value + 1e-15);
    }

    #[test]
    fn euler_geodesics_hit_their_boundaries(
        th in -2.0f64..2.0,
        ph in -2.0f64..2.0,
        n in 0u32..3,
    ) {
        let sol = euler_geodesic(&RotationAngles::new(th, ph), n).unwrap();
        let (r0, r1) = sol.boundary_residual();
        prop_assert!(r0 < 1e-9 && r1 < 1e-9);
        prop_assert!(hj_constants(&sol, 64).max_drift < 1e-9);
    }

    #[test]
    fn tb_geodesics_hit_their_boundaries(
        f1 in -1.5f64..1.5,
        f2 in -1.5f64..1.5,
        f3 in -1.5f64..1.5,
        n in 0u32..2,
    ) {
        let sol = tb_geodesic(&BoundaryFunctions3::new(f1, f2, f3), n).unwrap();
        let (r0, r1) = sol.boundary_residual();
        prop_assert!(r0 < 1e-9 && r1 < 1e-9);
        prop_assert!(hj_constants(&sol, 64).max_drift < 1e-9);
    }

    #[test]
    fn oat_complexity_is_periodic(
        delta in 0.0f64..0.05,
        omega in 0.5f64..2.0,
        j in 0.5f64..20.0,
        th in -0.4f64..0.4,
        ph in -0.4f64..0.4,
        t in 0.0f64..5.0,
    ) {
        let p = TwistingParams::new(delta, omega, j).unwrap();
        let angles = RotationAngles::new(th, ph);
        let period = PI / p.omega0();
        let base = oat_complexity(&angles, &p, t, 0).value;
        for k in 1..=3 {
            let shifted = oat_complexity(&angles, &p, t + k as f64 * period, 0).value;
            prop_assert!((shifted - base).abs() < 1e-10);
        }
    }

    #[test]
    fn squeezing_radicand_equals_boundary_norm(
        delta in 0.0f64..0.05,
        omega in 0.5f64..2.0,
        j in 0.5f64..20.0,
        th in -0.5f64..0.5,
        ph in -0.5f64..0.5,
        t in 0.0f64..10.0,
    ) {
        let p = TwistingParams::new(delta, omega, j).unwrap();
        let fb = oat_boundary_functions(&RotationAngles::new(th, ph), &p, t);
        let r = squeezing_report(&p, t);
        let lhs = fb.f * fb.f + fb.g * fb.g;
        let rhs = th * th * r.xi2_y + ph * ph * r.xi2_z + 2.0 * th * ph / j * r.corr_yz;
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        prop_assert!(r.var_jy >= 0.0 && r.var_jz >= 0.0);
    }

    #[test]
    fn frozen_coefficient_blocks_have_unit_determinant(
        delta in 0.0f64..0.1,
        omega in 0.5f64..2.0,
        j in 0.5f64..20.0,
        kappa in 0.0f64..1.0,
        b in 0.1f64..10.0,
        t in 0.0f64..10.0,
    ) {
        let p = TwistingParams::new(delta, omega, j).unwrap();
        let (jz, jy) = oat_frozen_spin(&p, t);
        prop_assert!((jz.cz * jy.cy - jz.cy * jy.cz - 1.0).abs() < 1e-12);

        let lp = LmgParams::new(1.0, kappa, b, 40).unwrap();
        let (jx, jy) = lmg_evolution(&lp, t, LmgMode::Frozen).unwrap();
        prop_assert!((jx.cx * jy.cy - jx.cy * jy.cx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn css_states_are_normalised(
        two_j in 1u32..=24,
        th in 0.0f64..PI,
        ph in 0.0f64..(2.0 * PI),
    ) {
        let state = css_state(Spin::from_two_j(two_j), &RotationAngles::new(th, ph)).unwrap();
        prop_assert!((state.norm() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exact_evolution_is_unitary(
        two_j in 1u32..=12,
        delta in 0.0f64..0.1,
        omega in 0.5f64..2.0,
        th in 0.0f64..PI,
        ph in 0.0f64..(2.0 * PI),
        t in 0.0f64..20.0,
    ) {
        let spin = Spin::from_two_j(two_j);
        let psi0 = css_state(spin, &RotationAngles::new(th, ph)).unwrap();
        let model = SpinModel::Oat { delta, omega };
        let psit = exact_evolve(spin, &model, t, &psi0).unwrap();
        prop_assert!((psit.norm() - 1.0).abs() < 1e-10);
    }
}
