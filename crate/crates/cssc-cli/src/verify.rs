//! The `verify` command: every closed form in the library checked
//! against an independent numerical route.
//!
//! Each check draws its own deterministic RNG stream (derived from the
//! user seed and the check's fixed position in the master list, so a
//! single suite reproduces exactly what the full run does), measures a
//! maximum deviation, and reports one JSON line. A check passes iff its
//! deviation is at most its tolerance; structural checks (positive
//! definiteness, monotonicity, minimality) encode their margin as a
//! signed deviation that must stay at or below zero.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use cssc_core::complexity::{
    class1_complexity, lmg_boundary_functions, lmg_frozen_complexity, lmg_iso_complexity,
    oat_complexity, oat_complexity_via_squeezing, pairwise_complexity, static_complexity,
    tb_complexity, timedep_complexity,
};
use cssc_core::dynamics::{
    exact_evolve, exact_squeezing, lmg_frozen_deviation, oat_frozen_deviation, squeezing_report,
    LmgParams, SpinModel, TwistingParams,
};
use cssc_core::geodesic::{
    euler_geodesic, hj_constants, hj_constants_along, path_length, shoot_geodesic, tb_geodesic,
    BoundaryFunctions, BoundaryFunctions3, GeodesicSolution,
};
use cssc_core::metric::{
    control_functions, euler_metric_closed, metric_at, polar_jacobian, polar_metric_closed,
    spherical_jacobian, spherical_metric_closed, tb_metric_closed, to_polar, to_spherical, Chart,
    EulerFamily, MetricTensor, NumericTangents, PenaltyMatrix, TaitBryanFamily,
};
use cssc_core::so3::{
    axis_angle_shift_identity, css_state, defining_generators, spin_j_generators, AxisAngleParams,
    EulerCoords, RotationAngles, Spin, SpinState, TaitBryanCoords,
};
use cssc_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Failure, SuiteArg, VerifyArgs};

#[derive(Copy, Clone, PartialEq, Eq)]
enum Suite {
    Metric,
    Geodesic,
    Identities,
    Oracle,
}

impl Suite {
    fn selected(self, arg: SuiteArg) -> bool {
        matches!(
            (arg, self),
            (SuiteArg::All, _)
                | (SuiteArg::Metric, Suite::Metric)
                | (SuiteArg::Geodesic, Suite::Geodesic)
                | (SuiteArg::Identities, Suite::Identities)
                | (SuiteArg::Oracle, Suite::Oracle)
        )
    }
}

type CheckFn = fn(&mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)>;

struct Check {
    name: &'static str,
    suite: Suite,
    tol: f64,
    run: CheckFn,
}

/// One output line; `wall_ms` is deliberately last so the preceding
/// fields are byte-stable for a fixed seed.
#[derive(Serialize)]
struct CheckOutcome {
    check: &'static str,
    samples: usize,
    max_deviation: f64,
    tolerance: f64,
    pass: bool,
    wall_ms: u64,
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    if let Some(tol) = args.tol {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Failure::usage("tol", format!("{tol} is not a non-negative number")));
        }
    }
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    let mut failed = 0usize;
    let mut total = 0usize;
    for (idx, check) in checks().iter().enumerate() {
        if !check.suite.selected(args.suite) {
            continue;
        }
        total += 1;
        // Index-keyed stream: running one suite draws the same numbers
        // for a check as running everything.
        let mut rng = ChaCha8Rng::seed_from_u64(
            args.seed
                .wrapping_add((idx as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        let tol = args.tol.unwrap_or(check.tol);
        let start = Instant::now();
        let (samples, deviation) = match (check.run)(&mut rng) {
            Ok(result) => result,
            Err(e) => {
                eprintln!("check {}: {e}", check.name);
                (0, f64::MAX)
            }
        };
        let wall_ms = start.elapsed().as_millis() as u64;
        // JSON has no infinities; a blown-up deviation still has to fail
        // loudly in-band.
        let deviation = if deviation.is_finite() { deviation } else { f64::MAX };
        let pass = deviation <= tol;
        if !pass {
            failed += 1;
        }
        let line = serde_json::to_string(&CheckOutcome {
            check: check.name,
            samples,
            max_deviation: deviation,
            tolerance: tol,
            pass,
            wall_ms,
        })
        .expect("flat struct serializes");
        writeln!(w, "{line}").map_err(|e| Failure::usage("out", e))?;
    }
    eprintln!("{} checks, {} failed", total, failed);
    if failed > 0 {
        Err(Failure::verification(failed, total))
    } else {
        Ok(())
    }
}

fn checks() -> Vec<Check> {
    use Suite::*;
    vec![
        Check { name: "metric-euler-closed-vs-construction", suite: Metric, tol: 1e-8, run: metric_euler_closed },
        Check { name: "metric-tb-closed-vs-construction", suite: Metric, tol: 1e-8, run: metric_tb_closed },
        Check { name: "metric-polar-pullback", suite: Metric, tol: 1e-8, run: metric_polar_pullback },
        Check { name: "metric-spherical-pullback", suite: Metric, tol: 1e-8, run: metric_spherical_pullback },
        Check { name: "metric-tb-alpha0-reduction", suite: Metric, tol: 1e-10, run: metric_tb_alpha0 },
        Check { name: "metric-positive-definite", suite: Metric, tol: 0.0, run: metric_positive_definite },
        Check { name: "metric-numeric-tangent-agreement", suite: Metric, tol: 1e-6, run: metric_numeric_tangent },
        Check { name: "geodesic-shooting-euler", suite: Geodesic, tol: 1e-5, run: geodesic_shooting_euler },
        Check { name: "geodesic-shooting-tb", suite: Geodesic, tol: 1e-5, run: geodesic_shooting_tb },
        Check { name: "geodesic-hj-closed-form", suite: Geodesic, tol: 1e-8, run: geodesic_hj_closed },
        Check { name: "geodesic-hj-integrated", suite: Geodesic, tol: 1e-8, run: geodesic_hj_integrated },
        Check { name: "geodesic-boundary-residuals", suite: Geodesic, tol: 1e-10, run: geodesic_boundary_residuals },
        Check { name: "geodesic-minimality", suite: Geodesic, tol: 0.0, run: geodesic_minimality },
        Check { name: "geodesic-path-length-consistency", suite: Geodesic, tol: 1e-6, run: geodesic_path_length },
        Check { name: "identity-squeezing-rewrite", suite: Identities, tol: 1e-12, run: identity_squeezing_rewrite },
        Check { name: "identity-pairwise-reduction", suite: Identities, tol: 1e-10, run: identity_pairwise },
        Check { name: "identity-axis-angle-fidelity", suite: Identities, tol: 1e-10, run: identity_axis_angle },
        Check { name: "identity-oat-delta0-reduction", suite: Identities, tol: 1e-10, run: identity_oat_delta0 },
        Check { name: "identity-lmg-kappa1-reduction", suite: Identities, tol: 1e-10, run: identity_lmg_kappa1 },
        Check { name: "identity-tb-planar-reduction", suite: Identities, tol: 1e-12, run: identity_tb_planar },
        Check { name: "identity-t0-reduction", suite: Identities, tol: 1e-12, run: identity_t0 },
        Check { name: "identity-oat-periodicity", suite: Identities, tol: 1e-10, run: identity_oat_periodicity },
        Check { name: "identity-css-displacement", suite: Identities, tol: 1e-10, run: identity_css_displacement },
        Check { name: "identity-control-power", suite: Identities, tol: 1e-10, run: identity_control_power },
        Check { name: "oracle-magnet-exactness", suite: Oracle, tol: 1e-10, run: oracle_magnet },
        Check { name: "oracle-oat-frozen-monotone", suite: Oracle, tol: 0.0, run: oracle_oat_monotone },
        Check { name: "oracle-lmg-frozen-monotone", suite: Oracle, tol: 0.0, run: oracle_lmg_monotone },
        Check { name: "oracle-exact-squeezing-agreement", suite: Oracle, tol: 0.02, run: oracle_exact_squeezing },
        Check { name: "oracle-squeezing-t0", suite: Oracle, tol: 1e-10, run: oracle_squeezing_t0 },
        Check { name: "oracle-evolver-unitarity", suite: Oracle, tol: 1e-10, run: oracle_unitarity },
        Check { name: "oracle-class1-saturation", suite: Oracle, tol: 1e-5, run: oracle_saturation },
    ]
}

// ---------------------------------------------------------------------
// sampling helpers

fn disk(rng: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> (f64, f64) {
    loop {
        let x = rng.gen_range(-rmax..rmax);
        let y = rng.gen_range(-rmax..rmax);
        let r2 = x * x + y * y;
        if r2 >= rmin * rmin && r2 <= rmax * rmax {
            return (x, y);
        }
    }
}

fn ball(rng: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> [f64; 3] {
    loop {
        let x = rng.gen_range(-rmax..rmax);
        let y = rng.gen_range(-rmax..rmax);
        let z = rng.gen_range(-rmax..rmax);
        let r2 = x * x + y * y + z * z;
        if r2 >= rmin * rmin && r2 <= rmax * rmax {
            return [x, y, z];
        }
    }
}

/// Tait-Bryan point away from the pure-alpha axis, where the closed
/// form (legitimately) refuses to evaluate.
fn tb_point(rng: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> [f64; 3] {
    loop {
        let p = ball(rng, rmin, rmax);
        if p[1] * p[1] + p[2] * p[2] >= 0.05 * 0.05 {
            return p;
        }
    }
}

fn max_entry_diff(a: &MetricTensor, b: &MetricTensor) -> f64 {
    a.g.iter()
        .zip(b.g.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Max entrywise deviation between `J^T g_plain J` and the diagonal
/// chart's closed metric, where `jac(r, c)` is the derivative of plain
/// coordinate `r` with respect to diagonal coordinate `c`.
fn pullback_dev(
    d: usize,
    jac: impl Fn(usize, usize) -> f64,
    plain_g: &MetricTensor,
    diag_g: &MetricTensor,
) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..d {
        for jj in 0..d {
            let mut s = 0.0;
            for k in 0..d {
                for l in 0..d {
                    s += jac(k, i) * plain_g.g[(k, l)] * jac(l, jj);
                }
            }
            dev = dev.max((s - diag_g.g[(i, jj)]).abs());
        }
    }
    dev
}

// ---------------------------------------------------------------------
// metric suite

fn metric_euler_closed(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let basis = defining_generators();
    let penalty = PenaltyMatrix::default();
    let mut dev = 0.0f64;
    for _ in 0..100 {
        let (b, g) = disk(rng, 0.0, 1.0);
        let built = metric_at(&EulerFamily, &[b, g], &basis, &penalty)?;
        let closed = euler_metric_closed(&EulerCoords::new(b, g));
        dev = dev.max(max_entry_diff(&built, &closed));
    }
    Ok((100, dev))
}

fn metric_tb_closed(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let basis = defining_generators();
    let penalty = PenaltyMatrix::default();
    let mut dev = 0.0f64;
    for _ in 0..50 {
        let [a, b, g] = tb_point(rng, 0.05, 1.0);
        let built = metric_at(&TaitBryanFamily, &[a, b, g], &basis, &penalty)?;
        let closed = tb_metric_closed(&TaitBryanCoords::new(a, b, g))?;
        dev = dev.max(max_entry_diff(&built, &closed));
    }
    Ok((50, dev))
}

fn metric_polar_pullback(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..50 {
        let (b, g) = disk(rng, 0.05, 1.0);
        let c = EulerCoords::new(b, g);
        let p = to_polar(&c);
        let jac = polar_jacobian(&p)?;
        let chart_g = euler_metric_closed(&c);
        let diag_g = polar_metric_closed(&p)?;
        dev = dev.max(pullback_dev(2, |r, cc| jac[(r, cc)], &chart_g, &diag_g));
    }
    Ok((50, dev))
}

fn metric_spherical_pullback(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..50 {
        let [a, b, g] = tb_point(rng, 0.05, 1.0);
        let c = TaitBryanCoords::new(a, b, g);
        let s = to_spherical(&c);
        let jac = spherical_jacobian(&s)?;
        let chart_g = tb_metric_closed(&c)?;
        let diag_g = spherical_metric_closed(&s)?;
        dev = dev.max(pullback_dev(3, |r, cc| jac[(r, cc)], &chart_g, &diag_g));
    }
    Ok((50, dev))
}

fn metric_tb_alpha0(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..50 {
        let (b, g) = disk(rng, 0.05, 1.0);
        let m3 = tb_metric_closed(&TaitBryanCoords::new(0.0, b, g))?;
        let m2 = euler_metric_closed(&EulerCoords::new(b, g));
        for (i, jj) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
            dev = dev.max((m3.g[(i + 1, jj + 1)] - m2.g[(i, jj)]).abs());
        }
        dev = dev.max(m3.g[(0, 1)].abs()).max(m3.g[(0, 2)].abs());
    }
    Ok((50, dev))
}

fn metric_positive_definite(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    // Signed margin: the largest negated eigenvalue must stay below 0.
    let mut dev = f64::NEG_INFINITY;
    for _ in 0..50 {
        let (b, g) = disk(rng, 0.0, 2.0);
        dev = dev.max(-euler_metric_closed(&EulerCoords::new(b, g)).min_eigenvalue());
    }
    for _ in 0..50 {
        let [a, b, g] = tb_point(rng, 0.05, 2.0);
        dev = dev.max(-tb_metric_closed(&TaitBryanCoords::new(a, b, g))?.min_eigenvalue());
    }
    Ok((100, dev))
}

fn metric_numeric_tangent(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let basis = defining_generators();
    let penalty = PenaltyMatrix::default();
    let mut dev = 0.0f64;
    for _ in 0..25 {
        let (b, g) = disk(rng, 0.0, 1.0);
        let exact = metric_at(&EulerFamily, &[b, g], &basis, &penalty)?;
        let numeric = metric_at(&NumericTangents(&EulerFamily), &[b, g], &basis, &penalty)?;
        dev = dev.max(max_entry_diff(&exact, &numeric));
    }
    for _ in 0..25 {
        let p = ball(rng, 0.0, 1.0);
        let exact = metric_at(&TaitBryanFamily, &p, &basis, &penalty)?;
        let numeric = metric_at(&NumericTangents(&TaitBryanFamily), &p, &basis, &penalty)?;
        dev = dev.max(max_entry_diff(&exact, &numeric));
    }
    Ok((50, dev))
}

// ---------------------------------------------------------------------
// geodesic suite

fn geodesic_shooting_euler(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..20 {
        let (th, ph) = disk(rng, 0.05, 0.45);
        let shot = shoot_geodesic(Chart::Euler, &[th, ph], 1e-8)?;
        let want = static_complexity(&RotationAngles::new(th, ph), 0).value;
        dev = dev.max((shot.length - want).abs()).max(shot.residual);
    }
    Ok((20, dev))
}

fn geodesic_shooting_tb(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..20 {
        let [f1, f2, f3] = ball(rng, 0.05, 0.45);
        let shot = shoot_geodesic(Chart::TaitBryan, &[f1, f2, f3], 1e-8)?;
        let want = tb_complexity(&BoundaryFunctions3::new(f1, f2, f3), 0).value;
        dev = dev.max((shot.length - want).abs()).max(shot.residual);
    }
    Ok((20, dev))
}

fn random_solution(rng: &mut ChaCha8Rng, euler: bool) -> cssc_core::Result<GeodesicSolution> {
    let n = rng.gen_range(0..3u32);
    if euler {
        let (th, ph) = disk(rng, 0.05, 2.0);
        euler_geodesic(&RotationAngles::new(th, ph), n)
    } else {
        let [f1, f2, f3] = ball(rng, 0.05, 2.0);
        tb_geodesic(&BoundaryFunctions3::new(f1, f2, f3), n)
    }
}

fn geodesic_hj_closed(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for k in 0..40 {
        let sol = random_solution(rng, k % 2 == 0)?;
        let hj = hj_constants(&sol, 200);
        dev = dev
            .max(hj.max_drift)
            .max((hj.k2 - sol.speed * sol.speed).abs())
            .max(hj.l.abs())
            .max(hj.m.abs());
    }
    Ok((40, dev))
}

fn geodesic_hj_integrated(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..3 {
        let (th, ph) = disk(rng, 0.2, 0.45);
        let shot = shoot_geodesic(Chart::Euler, &[th, ph], 1e-8)?;
        dev = dev.max(hj_constants_along(&shot)?.max_drift);
    }
    for _ in 0..3 {
        let p = tb_point(rng, 0.2, 0.45);
        let shot = shoot_geodesic(Chart::TaitBryan, &p, 1e-8)?;
        dev = dev.max(hj_constants_along(&shot)?.max_drift);
    }
    Ok((6, dev))
}

fn geodesic_boundary_residuals(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for k in 0..50 {
        let sol = random_solution(rng, k % 2 == 0)?;
        let (r0, r1) = sol.boundary_residual();
        dev = dev.max(r0).max(r1);
    }
    Ok((50, dev))
}

fn geodesic_minimality(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    // Signed margin: geodesic length minus each wobbled competitor,
    // which must stay below zero.
    let mut dev = f64::NEG_INFINITY;
    let taus: Vec<f64> = (0..=400).map(|i| i as f64 / 400.0).collect();
    for _ in 0..10 {
        let (th, ph) = disk(rng, 0.2, 0.45);
        let sol = euler_geodesic(&RotationAngles::new(th, ph), 0)?;
        let theta0 = sol.theta0.expect("nonzero target");
        let pts: Vec<Vec<f64>> = taus.iter().map(|&t| sol.chart_point(t)).collect();
        let base = path_length(Chart::Euler, &pts)?.refined;
        for _ in 0..3 {
            let amp = rng.gen_range(0.05..0.15);
            let wobbled: Vec<Vec<f64>> = taus
                .iter()
                .map(|&t| {
                    let r = sol.rho(t);
                    let ang = theta0 + amp * (PI * t).sin();
                    vec![r * ang.sin(), r * ang.cos()]
                })
                .collect();
            let competitor = path_length(Chart::Euler, &wobbled)?.refined;
            dev = dev.max(base - competitor);
        }
    }
    Ok((30, dev))
}

fn geodesic_path_length(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    let taus: Vec<f64> = (0..=2000).map(|i| i as f64 / 2000.0).collect();
    for k in 0..6 {
        let sol = if k % 2 == 0 {
            let (th, ph) = disk(rng, 0.3, 1.5);
            euler_geodesic(&RotationAngles::new(th, ph), 0)?
        } else {
            let [f1, f2, f3] = ball(rng, 0.3, 1.5);
            tb_geodesic(&BoundaryFunctions3::new(f1, f2, f3), 0)?
        };
        let pts: Vec<Vec<f64>> = taus.iter().map(|&t| sol.chart_point(t)).collect();
        let measured = path_length(sol.chart.into_plain(), &pts)?.refined;
        dev = dev.max((measured - sol.speed).abs());
    }
    Ok((6, dev))
}

// ---------------------------------------------------------------------
// identities suite

fn random_twisting(rng: &mut ChaCha8Rng) -> cssc_core::Result<TwistingParams> {
    TwistingParams::new(
        rng.gen_range(0.0..0.05),
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.5..20.0),
    )
}

fn identity_squeezing_rewrite(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..100 {
        let p = random_twisting(rng)?;
        let angles = RotationAngles::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let t = rng.gen_range(0.0..20.0);
        let rep = squeezing_report(&p, t);
        let via_bf = oat_complexity(&angles, &p, t, 0).value;
        let via_sq = oat_complexity_via_squeezing(&angles, &rep, p.j, 0)?.value;
        dev = dev.max((via_bf - via_sq).abs());
    }
    Ok((100, dev))
}

fn identity_pairwise(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..100 {
        let two_j = rng.gen_range(2..=40u32);
        let p = TwistingParams::new(
            rng.gen_range(0.0..0.05),
            rng.gen_range(0.5..2.0),
            f64::from(two_j) / 2.0,
        )?;
        let phi = rng.gen_range(-1.0..1.0);
        let t = rng.gen_range(0.0..20.0);
        let rep = squeezing_report(&p, t);
        let via_pairs = pairwise_complexity(phi, rep.g_pair_zz, two_j, 0)?.value;
        let via_bf = oat_complexity(&RotationAngles::new(0.0, phi), &p, t, 0).value;
        dev = dev.max((via_pairs - via_bf).abs());
    }
    Ok((100, dev))
}

fn identity_axis_angle(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..100 {
        let spin = Spin::from_two_j(rng.gen_range(1..=10u32));
        let theta = rng.gen_range(0.0..PI);
        let a = rng.gen_range(0.0..2.0 * PI);
        dev = dev.max((axis_angle_shift_identity(theta, a, spin)? - 1.0).abs());
    }
    Ok((100, dev))
}

fn identity_oat_delta0(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..3 {
        let p = TwistingParams::new(0.0, rng.gen_range(0.5..2.0), rng.gen_range(1.0..20.0))?;
        let angles = RotationAngles::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let fixed = static_complexity(&angles, 0).value;
        for i in 0..100 {
            let t = 20.0 * i as f64 / 99.0;
            dev = dev.max((oat_complexity(&angles, &p, t, 0).value - fixed).abs());
        }
    }
    Ok((300, dev))
}

fn identity_lmg_kappa1(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..3 {
        let p = LmgParams::new(rng.gen_range(0.5..2.0), 1.0, rng.gen_range(0.5..3.0), 2)?;
        let angles = RotationAngles::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        for i in 0..100 {
            let t = 20.0 * i as f64 / 99.0;
            let iso = lmg_iso_complexity(&angles, &p, t, 0)?.value;
            let class1 = class1_complexity(&angles, p.omega1(), t, 0).value;
            let fb = lmg_boundary_functions(&angles, &p, t);
            let planar = fb.f1 * fb.f1 + fb.f2 * fb.f2;
            dev = dev
                .max((iso - class1).abs())
                .max((planar - angles.theta * angles.theta).abs());
        }
    }
    Ok((300, dev))
}

fn identity_tb_planar(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..100 {
        let f = rng.gen_range(-2.0..2.0);
        let g = rng.gen_range(-2.0..2.0);
        let fb = BoundaryFunctions::new(f, g);
        let three = tb_complexity(&BoundaryFunctions3::from_planar(&fb), 0).value;
        let two = timedep_complexity(&fb, 0).value;
        dev = dev.max((three - two).abs());
    }
    Ok((100, dev))
}

fn identity_t0(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..20 {
        let angles = RotationAngles::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let fixed = static_complexity(&angles, 0).value;
        let b = rng.gen_range(0.5..3.0);
        dev = dev.max((class1_complexity(&angles, b, 0.0, 0).value - fixed).abs());
        let p = random_twisting(rng)?;
        dev = dev.max((oat_complexity(&angles, &p, 0.0, 0).value - fixed).abs());
        let lp = LmgParams::new(
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.5..3.0),
            2,
        )?;
        dev = dev.max((lmg_frozen_complexity(&angles, &lp, 0.0, 0).value - fixed).abs());
        let lp_iso = LmgParams::new(lp.lam, 1.0, lp.b, 2)?;
        dev = dev.max((lmg_iso_complexity(&angles, &lp_iso, 0.0, 0)?.value - fixed).abs());
    }
    Ok((80, dev))
}

fn identity_oat_periodicity(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..3 {
        let p = random_twisting(rng)?;
        let angles = RotationAngles::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let period = PI / p.omega0();
        for i in 0..20 {
            let t = 10.0 * i as f64 / 19.0;
            let here = oat_complexity(&angles, &p, t, 0).value;
            for k in 1..=3 {
                let there = oat_complexity(&angles, &p, t + f64::from(k) * period, 0).value;
                dev = dev.max((there - here).abs());
            }
        }
    }
    Ok((180, dev))
}

fn identity_css_displacement(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..20 {
        let spin = Spin::from_two_j(rng.gen_range(1..=16u32));
        let theta = rng.gen_range(0.05..PI - 0.05);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let basis = spin_j_generators(spin);
        let xi = AxisAngleParams::new(theta, phi).xi();
        let jp = &basis.jx + basis.jy.map(|c| C64::new(0.0, 1.0) * c);
        let jm = jp.adjoint();
        let disp = (jp.map(|c| xi * c) - jm.map(|c| xi.conj() * c)).exp();
        let from_exp =
            SpinState::new(spin, disp * SpinState::highest_weight(spin).amplitudes)?;
        let direct = css_state(spin, &RotationAngles::new(theta, phi))?;
        dev = dev.max((1.0 - from_exp.fidelity(&direct)).abs());
    }
    Ok((20, dev))
}

fn identity_control_power(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let basis = defining_generators();
    let penalty = PenaltyMatrix::default();
    let mut dev = 0.0f64;
    for _ in 0..50 {
        let y = ball(rng, 0.0, 1.5);
        let v = ball(rng, 0.0, 2.0);
        let cf = control_functions(&TaitBryanFamily, &y, &v, &basis)?;
        let power: f64 = cf.y.iter().map(|c| 4.0 * c.norm_sqr()).sum();
        let quad = metric_at(&TaitBryanFamily, &y, &basis, &penalty)?.quadratic_form(&v);
        let realness = cf.y.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
        dev = dev.max((power - quad).abs()).max(realness);
    }
    Ok((50, dev))
}

// ---------------------------------------------------------------------
// oracle suite

fn oracle_magnet(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..50 {
        let spin = Spin::from_two_j(rng.gen_range(1..=20u32));
        let theta = rng.gen_range(0.0..PI);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let b = rng.gen_range(-2.0..2.0);
        let t = rng.gen_range(0.0..10.0);
        let psi0 = css_state(spin, &RotationAngles::new(theta, phi))?;
        let psit = exact_evolve(spin, &SpinModel::Magnet { b }, t, &psi0)?;
        let target = css_state(spin, &RotationAngles::new(theta, phi + b * t))?;
        dev = dev.max(1.0 - psit.fidelity(&target));
    }
    Ok((50, dev))
}

fn oracle_oat_monotone(_rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    // Signed margin: consecutive frozen-spin deviations must decrease
    // as the twisting weakens, so each difference stays below zero.
    let spin = Spin::from_two_j(40);
    let tilted = css_state(spin, &RotationAngles::new(PI / 2.0 - 0.2, PI))?;
    let mut devs = Vec::new();
    for delta in [0.01, 0.003, 0.001] {
        let p = TwistingParams::new(delta, 1.0, 20.0)?;
        let horizon = PI / p.omega0();
        devs.push(oat_frozen_deviation(spin, &p, &tilted, horizon, 41)?);
    }
    let margin = (devs[1] - devs[0]).max(devs[2] - devs[1]);
    Ok((devs.len(), margin))
}

fn oracle_lmg_monotone(_rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let spin = Spin::from_two_j(40);
    let tilted = css_state(spin, &RotationAngles::new(PI - 0.2, 0.0))?;
    let mut devs = Vec::new();
    for b in [3.0, 10.0, 30.0] {
        let p = LmgParams::new(1.0, 0.5, b, 40)?;
        let horizon = PI / p.omega_b();
        devs.push(lmg_frozen_deviation(spin, &p, &tilted, horizon, 41)?);
    }
    let margin = (devs[1] - devs[0]).max(devs[2] - devs[1]);
    Ok((devs.len(), margin))
}

fn oracle_exact_squeezing(_rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let spin = Spin::from_two_j(40);
    let p = TwistingParams::new(0.005, 1.0, 20.0)?;
    let model = SpinModel::Oat {
        delta: p.delta,
        omega: p.omega,
    };
    let t = PI / 2.0 / p.omega0();
    let exact = exact_squeezing(spin, &model, t)?;
    let frozen = 1.0 / (p.omega0() * p.omega0());
    Ok((1, (exact.xi2_z - frozen).abs() / frozen))
}

fn oracle_squeezing_t0(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for _ in 0..10 {
        let two_j = 2 * rng.gen_range(1..=20u32);
        let spin = Spin::from_two_j(two_j);
        let model = SpinModel::Oat {
            delta: rng.gen_range(0.0..0.02),
            omega: rng.gen_range(0.5..2.0),
        };
        let rep = exact_squeezing(spin, &model, 0.0)?;
        dev = dev
            .max((rep.xi2_y - 1.0).abs())
            .max((rep.xi2_z - 1.0).abs())
            .max(rep.corr_yz.abs())
            .max(rep.g_pair_zz.abs());
    }
    Ok((10, dev))
}

fn oracle_unitarity(rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    let mut dev = 0.0f64;
    for k in 0..10 {
        let spin = Spin::from_two_j(rng.gen_range(1..=24u32));
        let model = match k % 3 {
            0 => SpinModel::Magnet {
                b: rng.gen_range(-2.0..2.0),
            },
            1 => SpinModel::Oat {
                delta: rng.gen_range(0.0..0.05),
                omega: rng.gen_range(0.5..2.0),
            },
            _ => SpinModel::Lmg {
                lam: rng.gen_range(0.5..2.0),
                kappa: rng.gen_range(0.0..1.0),
                b: rng.gen_range(0.5..3.0),
            },
        };
        let theta = rng.gen_range(0.0..PI);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let t = rng.gen_range(0.0..50.0);
        let psi0 = css_state(spin, &RotationAngles::new(theta, phi))?;
        let psit = exact_evolve(spin, &model, t, &psi0)?;
        dev = dev.max((psit.norm() - 1.0).abs());
    }
    Ok((10, dev))
}

fn oracle_saturation(_rng: &mut ChaCha8Rng) -> cssc_core::Result<(usize, f64)> {
    // Three margins folded into one deviation: the largest consecutive
    // decrease (monotonicity), the overshoot past pi (upper bound) and
    // the terminal gap below pi (saturation); only the gap is positive,
    // and it must stay within tolerance.
    let angles = RotationAngles::new(0.1, 0.1);
    let mut ts = vec![0.0];
    for i in 0..199 {
        ts.push(10f64.powf(-2.0 + 8.0 * f64::from(i) / 198.0));
    }
    let values: Vec<f64> = ts
        .iter()
        .map(|&t| class1_complexity(&angles, 1.0, t, 0).value)
        .collect();
    let mut dev = f64::NEG_INFINITY;
    for w in values.windows(2) {
        dev = dev.max(w[0] - w[1]);
    }
    for &v in &values {
        dev = dev.max(v - PI);
    }
    dev = dev.max(PI - values[values.len() - 1]);
    Ok((values.len(), dev))
}
