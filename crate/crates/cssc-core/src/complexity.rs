//! Closed-form circuit complexities of coherent-spin-state operators.
//!
//! Every value here is a geodesic length of the form
//! `2 arctan‖target‖ + 2πn`: the static two-angle target, its
//! time-dependent generalisations driven by the spin models, the
//! three-angle (Tait–Bryan) extension, the squeezing-parameter rewrite
//! of the twisting result, and the Dicke-model sum with a displacement
//! term. The heavy lifting — that these really are geodesic lengths —
//! is delegated to [`crate::geodesic`]; this module is the formula
//! layer the CLI exposes.

use std::f64::consts::PI;

use crate::dynamics::{LmgParams, SqueezingReport, TwistingParams};
use crate::error::{Error, Result};
use crate::geodesic::{BoundaryFunctions, BoundaryFunctions3};
use crate::metric::Chart;
use crate::so3::{ensure_finite, RotationAngles};

/// Threshold below which the linearised operator construction is
/// trusted; larger targets still evaluate but carry a domain flag.
pub const SMALL_ANGLE_NORM: f64 = 0.5;

/// A complexity value on a chosen branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityResult {
    /// `2 arctan(target_norm) + 2πn`, in `[2πn, π + 2πn)`.
    pub value: f64,
    pub branch_n: u32,
    /// Diagonalising chart the underlying geodesic lives in.
    pub chart: Chart,
    pub target_norm: f64,
}

impl ComplexityResult {
    fn from_norm(norm: f64, branch_n: u32, chart: Chart) -> Self {
        ComplexityResult {
            value: 2.0 * norm.atan() + 2.0 * PI * f64::from(branch_n),
            branch_n,
            chart,
            target_norm: norm,
        }
    }

    /// Whether the target is inside the norm < 0.5 regime where the
    /// linearised construction is an accurate description.
    pub fn in_small_angle_domain(&self) -> bool {
        self.target_norm < SMALL_ANGLE_NORM
    }
}

/// Complexity of the static operator taking the reference state to the
/// coherent state at `(θ, φ)`: `2(arctan√(θ²+φ²) + nπ)`.
pub fn static_complexity(angles: &RotationAngles, n: u32) -> ComplexityResult {
    ComplexityResult::from_norm(angles.norm(), n, Chart::Polar)
}

/// Complexity of a time-evolved operator described by two boundary
/// functions: `2 arctan√(f²+g²) + 2πn`.
pub fn timedep_complexity(fb: &BoundaryFunctions, n: u32) -> ComplexityResult {
    ComplexityResult::from_norm(fb.norm(), n, Chart::Polar)
}

/// Azimuthal-precession (class 1) complexity: the evolved target is the
/// static one with `φ → φ + Bt`.
pub fn class1_complexity(angles: &RotationAngles, b: f64, t: f64, n: u32) -> ComplexityResult {
    static_complexity(&RotationAngles::new(angles.theta, angles.phi + b * t), n)
}

/// Boundary functions of the one-axis-twisting evolution in the
/// frozen-spin regime:
/// `f = φ cos(ω₀t) - (θω₀/Ω) sin(ω₀t)`,
/// `g = (φΩ/ω₀) sin(ω₀t) + θ cos(ω₀t)`.
pub fn oat_boundary_functions(
    angles: &RotationAngles,
    p: &TwistingParams,
    t: f64,
) -> BoundaryFunctions {
    let w0 = p.omega0();
    let (s, c) = (w0 * t).sin_cos();
    BoundaryFunctions::new(
        angles.phi * c - angles.theta * w0 / p.omega * s,
        angles.phi * p.omega / w0 * s + angles.theta * c,
    )
}

/// One-axis-twisting complexity: the time-dependent formula evaluated
/// on the frozen-spin boundary functions. The squared target norm is
/// `π/ω₀`-periodic in `t`.
pub fn oat_complexity(
    angles: &RotationAngles,
    p: &TwistingParams,
    t: f64,
    n: u32,
) -> ComplexityResult {
    timedep_complexity(&oat_boundary_functions(angles, p, t), n)
}

/// The squeezing-parameter rewrite of the twisting complexity:
/// `2 arctan√(θ²ξ²_y + φ²ξ²_z + (2θφ/J)⟨JzJy+JyJz⟩) + 2πn`.
///
/// Algebraically identical to [`oat_complexity`] when the report comes
/// from the same parameters and time; a negative radicand therefore
/// signals corrupted inputs and is refused loudly.
pub fn oat_complexity_via_squeezing(
    angles: &RotationAngles,
    report: &SqueezingReport,
    j: f64,
    n: u32,
) -> Result<ComplexityResult> {
    ensure_finite(&[j], "J")?;
    if j <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "J",
            reason: format!("{j} is not positive"),
        });
    }
    let radicand = angles.theta * angles.theta * report.xi2_y
        + angles.phi * angles.phi * report.xi2_z
        + 2.0 * angles.theta * angles.phi / j * report.corr_yz;
    if radicand < 0.0 {
        return Err(Error::IdentityViolation(format!(
            "squeezing radicand {radicand} is negative; it must equal the squared \
             boundary-function norm"
        )));
    }
    Ok(ComplexityResult::from_norm(radicand.sqrt(), n, Chart::Polar))
}

/// θ = 0 twisting complexity written through the pairwise zz
/// correlation: `2 arctan[|φ|√((N-1)G + 1)] + 2πn`.
pub fn pairwise_complexity(phi: f64, g_pair: f64, n_particles: u32, n: u32) -> Result<ComplexityResult> {
    ensure_finite(&[phi, g_pair], "pairwise inputs")?;
    if n_particles == 0 {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: "need at least one particle".into(),
        });
    }
    let radicand = f64::from(n_particles - 1) * g_pair + 1.0;
    if radicand < 0.0 {
        return Err(Error::InvalidParameter {
            name: "G_pair",
            reason: format!("(N-1)G + 1 = {radicand} is negative"),
        });
    }
    Ok(ComplexityResult::from_norm(
        phi.abs() * radicand.sqrt(),
        n,
        Chart::Polar,
    ))
}

/// Three-angle complexity `2 arctan√(f1²+f2²+f3²) + 2πn`; reduces to
/// the two-angle formula on the f1 = 0 hypersurface.
pub fn tb_complexity(fb: &BoundaryFunctions3, n: u32) -> ComplexityResult {
    ComplexityResult::from_norm(fb.norm(), n, Chart::Spherical)
}

/// Boundary functions of the anisotropic LMG evolution in the
/// frozen-spin regime:
/// `f1 = -θ√((B+λ)/(B+λκ)) sin(ω_B t)`, `f2 = θ cos(ω_B t)`, `f3 = φ`.
pub fn lmg_boundary_functions(
    angles: &RotationAngles,
    p: &LmgParams,
    t: f64,
) -> BoundaryFunctions3 {
    let wb = p.omega_b();
    let (s, c) = (wb * t).sin_cos();
    let ratio = ((p.b + p.lam) / (p.b + p.lam * p.kappa)).sqrt();
    BoundaryFunctions3::new(-angles.theta * ratio * s, angles.theta * c, angles.phi)
}

/// Isotropic (κ = 1) LMG complexity: azimuthal precession at
/// `ω₁ = B + λ`, i.e. the class-1 formula with that frequency.
pub fn lmg_iso_complexity(
    angles: &RotationAngles,
    p: &LmgParams,
    t: f64,
    n: u32,
) -> Result<ComplexityResult> {
    if (p.kappa - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            name: "kappa",
            reason: format!("isotropic complexity requires κ = 1, got {}", p.kappa),
        });
    }
    Ok(class1_complexity(angles, p.omega1(), t, n))
}

/// Anisotropic LMG complexity through the three-angle boundary
/// functions.
pub fn lmg_frozen_complexity(
    angles: &RotationAngles,
    p: &LmgParams,
    t: f64,
    n: u32,
) -> ComplexityResult {
    tb_complexity(&lmg_boundary_functions(angles, p, t), n)
}

/// Coherent amplitude and frequency of the Dicke oscillator mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeParams {
    pub alpha_r: f64,
    pub alpha_i: f64,
    pub omega: f64,
}

impl DickeParams {
    pub fn new(alpha_r: f64, alpha_i: f64, omega: f64) -> Result<Self> {
        ensure_finite(&[alpha_r, alpha_i, omega], "Dicke parameters")?;
        if omega <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: format!("{omega} is not positive"),
            });
        }
        Ok(DickeParams {
            alpha_r,
            alpha_i,
            omega,
        })
    }
}

/// Dicke-model complexity: displacement cost plus the spin rotation,
/// `√(2(α_r²/ω + ω α_i²)) + 2(arctan√(θ²+φ²) + nπ)`.
pub fn dicke_complexity(dp: &DickeParams, angles: &RotationAngles, n: u32) -> f64 {
    let displacement =
        (2.0 * (dp.alpha_r * dp.alpha_r / dp.omega + dp.omega * dp.alpha_i * dp.alpha_i)).sqrt();
    displacement + static_complexity(angles, n).value
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen oracle constants keep all printed digits
mod tests {
    use super::*;
    use crate::dynamics::squeezing_report;
    use approx::assert_abs_diff_eq;

    fn oat_params() -> TwistingParams {
        TwistingParams::new(0.01, 1.0, 10.0).unwrap()
    }

    #[test]
    fn static_values() {
        let zero = static_complexity(&RotationAngles::new(0.0, 0.0), 0);
        assert_eq!(zero.value, 0.0);
        assert!(zero.in_small_angle_domain());

        let c = static_complexity(&RotationAngles::new(0.1, 0.2), 0);
        assert_abs_diff_eq!(c.value, 0.43997595479091889, epsilon = 1e-16);
        assert_abs_diff_eq!(c.target_norm, 0.05_f64.sqrt(), epsilon = 1e-16);

        let branched = static_complexity(&RotationAngles::new(0.1, 0.2), 2);
        assert_abs_diff_eq!(branched.value, c.value + 4.0 * PI, epsilon = 1e-14);

        assert!(!static_complexity(&RotationAngles::new(0.5, 0.4), 0).in_small_angle_domain());
    }

    #[test]
    fn branch_range_invariant() {
        for n in 0..4u32 {
            for &(th, ph) in &[(0.0, 0.0), (0.3, -0.2), (5.0, 7.0), (100.0, 0.0)] {
                let c = static_complexity(&RotationAngles::new(th, ph), n);
                let lo = 2.0 * PI * f64::from(n);
                assert!(c.value >= lo && c.value < PI + lo, "value {}", c.value);
            }
        }
    }

    #[test]
    fn timedep_values() {
        let c = timedep_complexity(&BoundaryFunctions::new(0.3, 0.4), 0);
        assert_abs_diff_eq!(c.value, 0.92729521800161219, epsilon = 1e-16);

        // Constant boundary functions reduce to the static case.
        let s = static_complexity(&RotationAngles::new(0.1, 0.2), 0);
        let t = timedep_complexity(&BoundaryFunctions::new(0.2, 0.1), 0);
        assert_abs_diff_eq!(s.value, t.value, epsilon = 1e-16);

        let b = timedep_complexity(&BoundaryFunctions::new(0.0, 0.0), 1);
        assert_abs_diff_eq!(b.value, 2.0 * PI, epsilon = 1e-15);
    }

    #[test]
    fn class1_values() {
        let angles = RotationAngles::new(0.1, 0.1);
        let at0 = class1_complexity(&angles, 1.0, 0.0, 0);
        assert_abs_diff_eq!(
            at0.value,
            static_complexity(&angles, 0).value,
            epsilon = 1e-16
        );

        let shifted = class1_complexity(&angles, 1.0, 0.1, 0);
        assert_abs_diff_eq!(shifted.value, 0.43997595479091889, epsilon = 1e-15);

        // Long times saturate just below π.
        let sat = class1_complexity(&angles, 1.0, 1e6, 0);
        assert!(sat.value > PI - 1e-5 && sat.value < PI);

        // Monotone non-decreasing in t for positive θ, φ, B.
        let mut prev = at0.value;
        for i in 1..200 {
            let v = class1_complexity(&angles, 1.0, i as f64 * 0.05, 0).value;
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn oat_boundary_function_values() {
        let p = oat_params();
        let angles = RotationAngles::new(0.1, 0.2);
        let fb0 = oat_boundary_functions(&angles, &p, 0.0);
        assert_abs_diff_eq!(fb0.f, 0.2, epsilon = 1e-16);
        assert_abs_diff_eq!(fb0.g, 0.1, epsilon = 1e-16);

        // δ = 0: rigid rotation preserves the norm.
        let rigid = TwistingParams::new(0.0, 1.0, 10.0).unwrap();
        for i in 0..30 {
            let fb = oat_boundary_functions(&angles, &rigid, 0.21 * i as f64);
            assert_abs_diff_eq!(fb.norm(), angles.norm(), epsilon = 1e-14);
        }

        // Quarter dressed period with θ = 0.
        let t = PI / 2.0 / p.omega0();
        let fb = oat_boundary_functions(&RotationAngles::new(0.0, 0.2), &p, t);
        assert_abs_diff_eq!(fb.f, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(fb.g, 0.16903085094570333, epsilon = 1e-16);
    }

    #[test]
    fn oat_complexity_values() {
        let p = oat_params();
        let angles = RotationAngles::new(0.1, 0.2);
        assert_abs_diff_eq!(
            oat_complexity(&angles, &p, 0.0, 0).value,
            static_complexity(&angles, 0).value,
            epsilon = 1e-16
        );

        let rigid = TwistingParams::new(0.0, 1.0, 10.0).unwrap();
        for i in 0..20 {
            let t = 0.37 * i as f64;
            assert_abs_diff_eq!(
                oat_complexity(&angles, &rigid, t, 0).value,
                static_complexity(&angles, 0).value,
                epsilon = 1e-12
            );
        }

        let t = PI / 2.0 / p.omega0();
        let c = oat_complexity(&RotationAngles::new(0.0, 0.2), &p, t, 0);
        assert_abs_diff_eq!(c.value, 0.3348961584393787, epsilon = 1e-15);

        // Squared norm is π/ω₀-periodic: so is the complexity.
        let period = PI / p.omega0();
        for i in 0..40 {
            let t = 0.11 * i as f64;
            for k in 1..=3 {
                let a = oat_complexity(&angles, &p, t, 0).value;
                let b = oat_complexity(&angles, &p, t + k as f64 * period, 0).value;
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn squeezing_rewrite_is_identical() {
        let p = oat_params();
        let angles = RotationAngles::new(0.1, 0.2);
        for i in 0..100 {
            let t = 0.083 * i as f64;
            let report = squeezing_report(&p, t);
            let via = oat_complexity_via_squeezing(&angles, &report, p.j, 0).unwrap();
            let direct = oat_complexity(&angles, &p, t, 0);
            assert_abs_diff_eq!(via.value, direct.value, epsilon = 1e-12);
        }

        // θ = 0, small φ: leading order is 2φ·ξ_z.
        let report = squeezing_report(&p, 0.9);
        let phi = 1e-4;
        let via = oat_complexity_via_squeezing(&RotationAngles::new(0.0, phi), &report, p.j, 0)
            .unwrap();
        assert!((via.value - 2.0 * phi * report.xi2_z.sqrt()).abs() < 1e-11);

        // A corrupted report (negative radicand) is refused.
        let mut bad = squeezing_report(&p, 0.9);
        bad.xi2_y = -5.0;
        bad.xi2_z = -5.0;
        assert!(matches!(
            oat_complexity_via_squeezing(&RotationAngles::new(0.3, 0.0), &bad, p.j, 0),
            Err(Error::IdentityViolation(_))
        ));
    }

    #[test]
    fn pairwise_values() {
        let flat = pairwise_complexity(0.3, 0.0, 20, 0).unwrap();
        assert_abs_diff_eq!(flat.value, 2.0 * 0.3_f64.atan(), epsilon = 1e-16);

        // t = 0 report has G = 0: matches the static value.
        let p = oat_params();
        let r0 = squeezing_report(&p, 0.0);
        let c0 = pairwise_complexity(0.25, r0.g_pair_zz, 20, 0).unwrap();
        assert_abs_diff_eq!(
            c0.value,
            static_complexity(&RotationAngles::new(0.0, 0.25), 0).value,
            epsilon = 1e-13
        );

        // Along the twisting evolution the pairwise form reproduces the
        // boundary-function complexity at θ = 0.
        for i in 0..20 {
            let t = 0.17 * i as f64;
            let r = squeezing_report(&p, t);
            let pc = pairwise_complexity(0.25, r.g_pair_zz, 20, 0).unwrap();
            let oc = oat_complexity(&RotationAngles::new(0.0, 0.25), &p, t, 0);
            assert_abs_diff_eq!(pc.value, oc.value, epsilon = 1e-10);
        }

        assert!(pairwise_complexity(0.3, -1.0, 20, 0).is_err());
        assert!(pairwise_complexity(0.3, 0.0, 0, 0).is_err());
    }

    #[test]
    fn tb_values() {
        let reduction = tb_complexity(&BoundaryFunctions3::new(0.0, 0.1, 0.2), 0);
        assert_abs_diff_eq!(
            reduction.value,
            static_complexity(&RotationAngles::new(0.1, 0.2), 0).value,
            epsilon = 1e-16
        );

        let c = tb_complexity(&BoundaryFunctions3::new(0.1, 0.1, 0.1), 0);
        assert_abs_diff_eq!(c.value, 0.34300710800482664, epsilon = 1e-16);
        assert_eq!(c.chart, Chart::Spherical);

        let b = tb_complexity(&BoundaryFunctions3::new(0.0, 0.0, 0.0), 1);
        assert_abs_diff_eq!(b.value, 2.0 * PI, epsilon = 1e-15);
    }

    #[test]
    fn lmg_boundary_function_values() {
        let p = LmgParams::new(1.0, 0.5, 10.0, 40).unwrap();
        let angles = RotationAngles::new(0.1, 0.2);

        let fb0 = lmg_boundary_functions(&angles, &p, 0.0);
        assert_abs_diff_eq!(fb0.f1, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(fb0.f2, 0.1, epsilon = 1e-16);
        assert_abs_diff_eq!(fb0.f3, 0.2, epsilon = 1e-16);

        let fb = lmg_boundary_functions(&angles, &p, 0.05);
        assert_abs_diff_eq!(fb.f1, -0.052391077585658176, epsilon = 1e-15);
        assert_abs_diff_eq!(fb.f2, 0.085906575782195058, epsilon = 1e-15);
        let c = lmg_frozen_complexity(&angles, &p, 0.05, 0);
        assert_abs_diff_eq!(c.value, 0.44050698742932803, epsilon = 1e-14);

        // κ = 1: the transverse pair stays on the circle of radius θ,
        // and the frozen route gives a time-independent value.
        let iso = LmgParams::new(1.0, 1.0, 3.0, 40).unwrap();
        for i in 0..25 {
            let t = 0.19 * i as f64;
            let fb = lmg_boundary_functions(&angles, &iso, t);
            assert_abs_diff_eq!(fb.f1 * fb.f1 + fb.f2 * fb.f2, 0.01, epsilon = 1e-15);
            assert_abs_diff_eq!(
                lmg_frozen_complexity(&angles, &iso, t, 0).value,
                static_complexity(&angles, 0).value,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn lmg_iso_is_class1_at_omega1() {
        let iso = LmgParams::new(1.0, 1.0, 3.0, 40).unwrap();
        let angles = RotationAngles::new(0.1, 0.2);
        for i in 0..25 {
            let t = 0.13 * i as f64;
            let a = lmg_iso_complexity(&angles, &iso, t, 0).unwrap();
            let b = class1_complexity(&angles, iso.omega1(), t, 0);
            assert_abs_diff_eq!(a.value, b.value, epsilon = 1e-15);
        }

        let aniso = LmgParams::new(1.0, 0.5, 3.0, 40).unwrap();
        assert!(lmg_iso_complexity(&angles, &aniso, 1.0, 0).is_err());
    }

    #[test]
    fn dicke_values() {
        let angles = RotationAngles::new(0.1, 0.2);
        let plain = DickeParams::new(0.0, 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(
            dicke_complexity(&plain, &angles, 0),
            static_complexity(&angles, 0).value,
            epsilon = 1e-16
        );

        let dp = DickeParams::new(1.0, 1.0, 2.0).unwrap();
        assert_abs_diff_eq!(
            dicke_complexity(&dp, &RotationAngles::new(0.0, 0.0), 0),
            2.2360679774997898,
            epsilon = 1e-16
        );

        // The displacement cost is independent of the spin angles.
        let d1 = dicke_complexity(&dp, &angles, 0) - static_complexity(&angles, 0).value;
        let other = RotationAngles::new(1.2, -0.7);
        let d2 = dicke_complexity(&dp, &other, 0) - static_complexity(&other, 0).value;
        assert_abs_diff_eq!(d1, d2, epsilon = 1e-14);

        assert!(DickeParams::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn monotone_in_norm() {
        let mut prev = -1.0;
        for i in 0..50 {
            let r = 0.07 * i as f64;
            let v = static_complexity(&RotationAngles::new(r, 0.0), 0).value;
            assert!(v > prev);
            prev = v;
        }
    }
}
