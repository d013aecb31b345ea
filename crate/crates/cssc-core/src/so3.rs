//! SO(3) generator algebra, rotation parametrisations and coherent spin
//! states.
//!
//! Two matrix representations matter here: the defining 3×3 rep with
//! `(J_a)_{bc} = -i ε_{abc}`, in which the linearised rotation operators
//! are real matrices, and the spin-j rep of dimension 2j+1 used by the
//! exact-evolution oracle. Half-integer spins are carried as the integer
//! `2j` so no floating-point spin labels ever appear.

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::{C64, CMatrix, CVector};

/// Spin magnitude stored exactly as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Spin {
    two_j: u32,
}

impl Spin {
    /// Build from the doubled spin label; `two_j = 1` is spin-1/2.
    pub fn from_two_j(two_j: u32) -> Self {
        Spin { two_j }
    }

    /// Build from a floating j, rejecting anything that is not a
    /// non-negative half-integer.
    pub fn try_from_j(j: f64) -> Result<Self> {
        let two_j = 2.0 * j;
        if !(two_j.is_finite() && two_j >= 0.0 && two_j.fract() == 0.0) {
            return Err(Error::InvalidSpin(format!(
                "{j} is not a non-negative half-integer"
            )));
        }
        Ok(Spin {
            two_j: two_j as u32,
        })
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    /// Representation dimension 2j+1.
    pub fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    /// Magnetic quantum number at amplitude index `k`, i.e. m = k - j.
    pub fn m_at(self, k: usize) -> f64 {
        k as f64 - self.j()
    }
}

/// The three generators of a representation plus its dimension.
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
    pub rep_dim: usize,
}

impl GeneratorBasis {
    /// Generators as an array in (x, y, z) order.
    pub fn as_array(&self) -> [&CMatrix; 3] {
        [&self.jx, &self.jy, &self.jz]
    }

    /// Linear combination `cx Jx + cy Jy + cz Jz`.
    pub fn combine(&self, cx: f64, cy: f64, cz: f64) -> CMatrix {
        self.jx.scale(cx) + self.jy.scale(cy) + self.jz.scale(cz)
    }
}

/// Defining 3×3 representation, `(J_a)_{bc} = -i ε_{abc}`.
///
/// In this rep `Tr[J_a J_a†] = 2` for each generator, the normalisation
/// the control-function projection divides by, and the linearised
/// rotation operators below come out real.
pub fn defining_generators() -> GeneratorBasis {
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    // J_a = i [e_a]^x where [v]^x is the cross-product matrix.
    let jx = CMatrix::from_row_slice(3, 3, &[z, z, z, z, z, -i, z, i, z]);
    let jy = CMatrix::from_row_slice(3, 3, &[z, z, i, z, z, z, -i, z, z]);
    let jz = CMatrix::from_row_slice(3, 3, &[z, -i, z, i, z, z, z, z, z]);
    GeneratorBasis {
        jx,
        jy,
        jz,
        rep_dim: 3,
    }
}

/// Spin-j representation built from the ladder operators, with basis
/// states ordered m = -j..j.
pub fn spin_j_generators(spin: Spin) -> GeneratorBasis {
    let d = spin.dim();
    let j = spin.j();
    let mut jp = CMatrix::zeros(d, d); // J+
    for k in 0..d - 1 {
        let m = spin.m_at(k);
        jp[(k + 1, k)] = C64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm).scale(0.5);
    let jy = (&jp - &jm) * C64::new(0.0, -0.5);
    let mut jz = CMatrix::zeros(d, d);
    for k in 0..d {
        jz[(k, k)] = C64::new(spin.m_at(k), 0.0);
    }
    GeneratorBasis {
        jx,
        jy,
        jz,
        rep_dim: d,
    }
}

/// Axis-angle data for a rotation taking the north pole to (θ, φ), with
/// the rotation axis lying in the xy-plane.
#[derive(Debug, Clone, Copy)]
pub struct AxisAngleParams {
    /// Azimuthal orientation of the target direction, reduced to [0, 2π).
    pub phi: f64,
    /// Rotation amount (polar angle of the target direction).
    pub theta: f64,
}

impl AxisAngleParams {
    pub fn new(theta: f64, phi: f64) -> Self {
        AxisAngleParams {
            phi: phi.rem_euclid(std::f64::consts::TAU),
            theta,
        }
    }

    /// Complex displacement label ξ = -(θ/2) e^{-iφ}.
    pub fn xi(&self) -> C64 {
        -C64::new(0.0, -self.phi).exp().scale(self.theta / 2.0)
    }

    /// Stereographic label η = tan(θ/2) e^{iφ}.
    pub fn eta(&self) -> C64 {
        C64::new(0.0, self.phi).exp().scale((self.theta / 2.0).tan())
    }
}

/// Polar/azimuthal target angles of a CSS operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationAngles {
    pub theta: f64,
    pub phi: f64,
}

impl RotationAngles {
    pub fn new(theta: f64, phi: f64) -> Self {
        RotationAngles { theta, phi }
    }

    pub fn norm(&self) -> f64 {
        self.theta.hypot(self.phi)
    }

    /// Whether the angles sit inside the domain where the linearised
    /// operator forms are trustworthy.
    pub fn is_small_angle(&self) -> bool {
        self.norm() < 0.5
    }
}

/// Euler-chart coordinates (the first angle has been absorbed into γ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerCoords {
    pub beta: f64,
    pub gamma: f64,
}

impl EulerCoords {
    pub fn new(beta: f64, gamma: f64) -> Self {
        EulerCoords { beta, gamma }
    }
}

/// Tait-Bryan chart coordinates (successive rotations about x, y, z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaitBryanCoords {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl TaitBryanCoords {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        TaitBryanCoords { alpha, beta, gamma }
    }
}

pub(crate) fn ensure_finite(vals: &[f64], what: &'static str) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Linearised CSS operator: first order in the rotation angles,
/// `[[1, -φ, θ], [φ, 1, 0], [-θ, 0, 1]]`.
pub fn css_operator_linearized(angles: &RotationAngles) -> Result<Matrix3<f64>> {
    ensure_finite(&[angles.theta, angles.phi], "rotation angles")?;
    let (t, p) = (angles.theta, angles.phi);
    Ok(Matrix3::new(1.0, -p, t, p, 1.0, 0.0, -t, 0.0, 1.0))
}

/// Linearised Euler-chart operator `[[1, -γ, β], [γ, 1, 0], [-β, 0, 1]]`.
pub fn euler_unitary_linearized(c: &EulerCoords) -> Result<Matrix3<f64>> {
    ensure_finite(&[c.beta, c.gamma], "euler coordinates")?;
    let (b, g) = (c.beta, c.gamma);
    Ok(Matrix3::new(1.0, -g, b, g, 1.0, 0.0, -b, 0.0, 1.0))
}

/// Linearised Tait-Bryan operator
/// `[[1, -γ, β], [γ, 1, -α], [-β, α, 1]]`.
pub fn tb_unitary_linearized(c: &TaitBryanCoords) -> Result<Matrix3<f64>> {
    ensure_finite(&[c.alpha, c.beta, c.gamma], "tait-bryan coordinates")?;
    let (a, b, g) = (c.alpha, c.beta, c.gamma);
    Ok(Matrix3::new(1.0, -g, b, g, 1.0, -a, -b, a, 1.0))
}

/// Normalised state in the spin-j representation, amplitudes indexed by
/// m = -j..j.
#[derive(Debug, Clone)]
pub struct SpinState {
    pub spin: Spin,
    pub amplitudes: CVector,
}

impl SpinState {
    /// Wrap an amplitude vector, checking the dimension matches.
    pub fn new(spin: Spin, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != spin.dim() {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                reason: format!("length {} does not match dim {}", amplitudes.len(), spin.dim()),
            });
        }
        Ok(SpinState { spin, amplitudes })
    }

    /// Basis state |j, m⟩.
    pub fn weight_state(spin: Spin, k: usize) -> Self {
        let mut amplitudes = CVector::zeros(spin.dim());
        amplitudes[k] = C64::new(1.0, 0.0);
        SpinState { spin, amplitudes }
    }

    /// Lowest-weight state |j, -j⟩.
    pub fn lowest_weight(spin: Spin) -> Self {
        Self::weight_state(spin, 0)
    }

    /// Highest-weight state |j, +j⟩.
    pub fn highest_weight(spin: Spin) -> Self {
        Self::weight_state(spin, spin.dim() - 1)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Overlap magnitude |⟨self|other⟩| — global-phase insensitive.
    pub fn fidelity(&self, other: &SpinState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm()
    }

    /// Real part of ⟨ψ| op |ψ⟩ (exact expectation for Hermitian `op`).
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        self.amplitudes.dotc(&(op * &self.amplitudes)).re
    }
}

/// Binomial coefficient in f64; exact for the small arguments used here
/// and monotone-stable for representation dimensions up to the cap.
fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    acc
}

/// Coherent spin state |θ, φ⟩ in the spin-j representation:
/// `c_m = √C(2j, j+m) cos^{j+m}(θ/2) sin^{j-m}(θ/2) e^{i(j-m)φ}`.
pub fn css_state(spin: Spin, angles: &RotationAngles) -> Result<SpinState> {
    ensure_finite(&[angles.theta, angles.phi], "rotation angles")?;
    let two_j = spin.two_j();
    let (ch, sh) = ((angles.theta / 2.0).cos(), (angles.theta / 2.0).sin());
    let mut amplitudes = CVector::zeros(spin.dim());
    for k in 0..spin.dim() {
        // k runs with m = k - j, so j+m = k and j-m = 2j-k.
        let jp_m = k as u32;
        let jm_m = two_j - jp_m;
        let mag = binomial(two_j, jp_m).sqrt() * ch.powi(jp_m as i32) * sh.powi(jm_m as i32);
        amplitudes[k] = C64::new(0.0, f64::from(jm_m) * angles.phi).exp().scale(mag);
    }
    SpinState::new(spin, amplitudes)
}

/// Fidelity between the two operator orderings that implement the same
/// tilted rotation on the lowest-weight state:
/// `exp(-iθ[Jy cos a - Jx sin a])` versus
/// `exp(-i a Jz) exp(-iθ Jy) exp(+i a Jz)`.
///
/// The two agree up to a global phase on weight states, so the returned
/// overlap magnitude is 1 whenever the identity holds.
pub fn axis_angle_shift_identity(theta: f64, a: f64, spin: Spin) -> Result<f64> {
    ensure_finite(&[theta, a], "identity angles")?;
    let basis = spin_j_generators(spin);
    let low = SpinState::lowest_weight(spin);
    let i = C64::new(0.0, 1.0);

    let tilted = basis.combine(-a.sin(), a.cos(), 0.0);
    let s1 = (tilted * (-i * theta)).exp() * &low.amplitudes;

    let rz_m = (&basis.jz * (-i * a)).exp();
    let ry = (&basis.jy * (-i * theta)).exp();
    let rz_p = (&basis.jz * (i * a)).exp();
    let s2 = rz_m * (ry * (rz_p * &low.amplitudes));

    Ok(s1.dotc(&s2).norm())
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen oracle constants keep all printed digits
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a * b - b * a
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn defining_rep_entries_and_normalisation() {
        let basis = defining_generators();
        assert_eq!(basis.jz[(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(basis.jz[(1, 0)], C64::new(0.0, 1.0));
        for j in basis.as_array() {
            // Tr[J J†] = 2 fixes the control-function normalisation.
            let tr = (j * j.adjoint()).trace();
            assert_abs_diff_eq!(tr.re, 2.0, epsilon = 1e-15);
            assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-15);
            // Hermiticity.
            assert!(max_abs(&(j.clone() - j.adjoint())) < 1e-15);
        }
    }

    #[test]
    fn defining_rep_commutators_close() {
        let basis = defining_generators();
        let i = C64::new(0.0, 1.0);
        let pairs = [
            (&basis.jx, &basis.jy, &basis.jz),
            (&basis.jy, &basis.jz, &basis.jx),
            (&basis.jz, &basis.jx, &basis.jy),
        ];
        for (a, b, c) in pairs {
            assert!(max_abs(&(commutator(a, b) - c.map(|x| i * x))) < 1e-15);
        }
    }

    #[test]
    fn spin_half_is_pauli_over_two() {
        let basis = spin_j_generators(Spin::from_two_j(1));
        assert_abs_diff_eq!(basis.jx[(0, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(basis.jy[(0, 1)].im, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(basis.jz[(0, 0)].re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(basis.jz[(1, 1)].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn spin_one_casimir() {
        let basis = spin_j_generators(Spin::from_two_j(2));
        let casimir = &basis.jx * &basis.jx + &basis.jy * &basis.jy + &basis.jz * &basis.jz;
        let expected = CMatrix::identity(3, 3).scale(2.0);
        assert!(max_abs(&(casimir - expected)) < 1e-12);
    }

    #[test]
    fn ladder_coefficient_spot_check() {
        // J+|j,m⟩ amplitude at j=10, m=3 equals √(j(j+1) - m(m+1)) = √98.
        let spin = Spin::from_two_j(20);
        let basis = spin_j_generators(spin);
        let jp = &basis.jx + basis.jy.map(|c| C64::new(0.0, 1.0) * c);
        let k = 13; // index of m = 3
        assert_abs_diff_eq!(jp[(k + 1, k)].re, 98.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(jp[(k + 1, k)].re, 9.899494936611665, epsilon = 1e-12);
    }

    #[test]
    fn spin_constructor_rejects_bad_j() {
        assert!(Spin::try_from_j(0.3).is_err());
        assert!(Spin::try_from_j(-0.5).is_err());
        assert!(Spin::try_from_j(3.5).is_ok());
    }

    #[test]
    fn linearized_forms_match_printed_matrices() {
        let u = css_operator_linearized(&RotationAngles::new(0.1, 0.2)).unwrap();
        let want = Matrix3::new(1.0, -0.2, 0.1, 0.2, 1.0, 0.0, -0.1, 0.0, 1.0);
        assert_eq!(u, want);

        let id = css_operator_linearized(&RotationAngles::new(0.0, 0.0)).unwrap();
        assert_eq!(id, Matrix3::identity());

        let e = euler_unitary_linearized(&EulerCoords::new(0.0, 0.0)).unwrap();
        assert_eq!(e, Matrix3::identity());

        let tb = tb_unitary_linearized(&TaitBryanCoords::new(0.3, 0.1, 0.2)).unwrap();
        assert_eq!(tb[(1, 2)], -0.3);
        assert_eq!(tb[(2, 1)], 0.3);
        // α = 0 hypersurface reduces to the Euler form.
        let tb0 = tb_unitary_linearized(&TaitBryanCoords::new(0.0, 0.4, -0.7)).unwrap();
        let e0 = euler_unitary_linearized(&EulerCoords::new(0.4, -0.7)).unwrap();
        assert_eq!(tb0, e0);
    }

    #[test]
    fn linearized_rejects_non_finite() {
        assert!(css_operator_linearized(&RotationAngles::new(f64::NAN, 0.0)).is_err());
        assert!(tb_unitary_linearized(&TaitBryanCoords::new(0.0, f64::INFINITY, 0.0)).is_err());
    }

    #[test]
    fn css_state_poles_and_equator() {
        let spin = Spin::from_two_j(6);
        let north = css_state(spin, &RotationAngles::new(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(north.amplitudes[6].re, 1.0, epsilon = 1e-15);
        assert!(north.amplitudes.rows(0, 6).norm() < 1e-15);

        let half = Spin::from_two_j(1);
        let eq = css_state(half, &RotationAngles::new(std::f64::consts::FRAC_PI_2, 0.0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(eq.amplitudes[0].re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(eq.amplitudes[1].re, r, epsilon = 1e-15);
    }

    #[test]
    fn css_state_matches_displacement_exponential() {
        // |θ,φ⟩ = exp(ξ J+ - ξ̄ J-) |j,j⟩ with ξ = -(θ/2) e^{-iφ}.
        let spin = Spin::from_two_j(10);
        let basis = spin_j_generators(spin);
        let aa = AxisAngleParams::new(0.4, 1.1);
        let xi = aa.xi();
        let jp = &basis.jx + basis.jy.map(|c| C64::new(0.0, 1.0) * c);
        let jm = jp.adjoint();
        let disp = (jp.map(|c| xi * c) - jm.map(|c| xi.conj() * c)).exp();
        let from_exp = SpinState::new(spin, disp * SpinState::highest_weight(spin).amplitudes)
            .unwrap();
        let direct = css_state(spin, &RotationAngles::new(0.4, 1.1)).unwrap();
        assert!(from_exp.fidelity(&direct) > 1.0 - 1e-10);
    }

    #[test]
    fn axis_angle_params_eta_consistent_with_xi() {
        let aa = AxisAngleParams::new(0.8, -1.3);
        assert!(aa.phi >= 0.0 && aa.phi < std::f64::consts::TAU);
        assert_abs_diff_eq!(aa.eta().arg().rem_euclid(std::f64::consts::TAU), aa.phi, epsilon = 1e-12);
        assert_abs_diff_eq!(aa.eta().norm(), (0.8_f64 / 2.0).tan(), epsilon = 1e-15);
    }

    #[test]
    fn shift_identity_trivial_and_generic() {
        let one = Spin::from_two_j(2);
        assert_abs_diff_eq!(
            axis_angle_shift_identity(0.3, 0.0, one).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            axis_angle_shift_identity(0.3, 0.7, one).unwrap(),
            1.0,
            epsilon = 1e-10
        );
        let seven_halves = Spin::from_two_j(7);
        assert_abs_diff_eq!(
            axis_angle_shift_identity(1.2, 2.0, seven_halves).unwrap(),
            1.0,
            epsilon = 1e-10
        );
    }
}
