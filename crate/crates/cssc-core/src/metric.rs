//! The right-invariant metric on the space of unitaries.
//!
//! A path of unitaries U(τ) has velocity components ("control
//! functions") along each generator,
//! `Y^a = Tr(∂U · U⁻¹ · J_a†) / Tr(J_a J_a†)`, and the cost metric is
//! `g_ij = G_ab Y_i^a (Y_j^b)*` with the isotropic penalty matrix
//! `G = 4·I`. [`metric_at`] evaluates that construction on any
//! differentiable chart family; [`euler_metric_closed`],
//! [`polar_metric_closed`] and [`spherical_metric_closed`] are the
//! closed forms it must reproduce, and the `to_polar`/`to_spherical`
//! transforms diagonalise the chart metrics.
//!
//! The normalisation trace is taken per generator index (no sum over
//! `a`), and the conjugation in `g_ij` is applied literally; for the
//! real linearised families the metric entries come out real, which is
//! checked rather than assumed.

use nalgebra::{DMatrix, Matrix2, Matrix3};

use crate::error::{Error, Result};
use crate::so3::{
    euler_unitary_linearized, tb_unitary_linearized, EulerCoords, GeneratorBasis, TaitBryanCoords,
};
use crate::{C64, CMatrix};

/// Coordinate chart labels used across metrics, geodesics and results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    /// Two-angle chart (β, γ).
    Euler,
    /// Three-angle chart (α, β, γ).
    TaitBryan,
    /// Diagonalising coordinates (ρ, Θ) of the Euler chart.
    Polar,
    /// Diagonalising coordinates (ρ, Θ, Φ) of the Tait-Bryan chart.
    Spherical,
}

impl std::fmt::Display for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Chart::Euler => "euler",
            Chart::TaitBryan => "tait-bryan",
            Chart::Polar => "euler-polar",
            Chart::Spherical => "tb-spherical",
        };
        f.write_str(s)
    }
}

/// Symmetric positive-definite penalty matrix weighting the generator
/// directions.
#[derive(Debug, Clone, Copy)]
pub struct PenaltyMatrix {
    g: Matrix3<f64>,
}

impl PenaltyMatrix {
    /// Isotropic penalty `w·I`, `w > 0`.
    pub fn isotropic(w: f64) -> Result<Self> {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParameter {
                name: "penalty weight",
                reason: format!("{w} is not positive"),
            });
        }
        Ok(PenaltyMatrix {
            g: Matrix3::identity() * w,
        })
    }

    /// General penalty matrix; must be symmetric and positive-definite.
    pub fn new(g: Matrix3<f64>) -> Result<Self> {
        let asym = (g - g.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "penalty matrix",
                reason: format!("asymmetry {asym:.3e}"),
            });
        }
        let min_eig = g
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "penalty matrix",
                reason: format!("not positive-definite (min eigenvalue {min_eig:.3e})"),
            });
        }
        Ok(PenaltyMatrix { g })
    }

    pub fn as_matrix(&self) -> &Matrix3<f64> {
        &self.g
    }
}

impl Default for PenaltyMatrix {
    /// The isotropic choice `G = 4·I` used throughout.
    fn default() -> Self {
        PenaltyMatrix {
            g: Matrix3::identity() * 4.0,
        }
    }
}

/// Velocity components of a unitary path along (Jx, Jy, Jz).
///
/// For the real linearised families these come out purely imaginary
/// (the anti-Hermitian velocity convention); the metric contraction
/// below makes the imaginary parts pair up into real entries.
#[derive(Debug, Clone, Copy)]
pub struct ControlFunctions {
    pub y: [C64; 3],
}

/// A differentiable family of operators over a coordinate chart.
///
/// `tangent` defaults to central finite differences with step `1e-6`,
/// falling back to a Richardson-extrapolated coarser step when the
/// matrix scale makes the fine step cancellation-dominated. Families
/// with known derivatives should override it with the exact tangent.
pub trait UnitaryFamily {
    /// Number of chart coordinates.
    fn chart_dim(&self) -> usize;

    /// Operator at the chart point `y` (length `chart_dim`).
    fn unitary(&self, y: &[f64]) -> CMatrix;

    /// Chart label for results derived from this family.
    fn chart(&self) -> Chart {
        if self.chart_dim() == 2 {
            Chart::Euler
        } else {
            Chart::TaitBryan
        }
    }

    /// Partial derivative of the operator along coordinate `dir`.
    fn tangent(&self, y: &[f64], dir: usize) -> CMatrix {
        let scale = self
            .unitary(y)
            .iter()
            .map(|c| c.norm())
            .fold(1.0, f64::max);
        if scale <= 1e2 {
            central_difference(self, y, dir, 1e-6)
        } else {
            // Large entries push the fine-step rounding error above the
            // target accuracy; use a coarser pair and kill the O(h²)
            // truncation term by Richardson extrapolation.
            let h = 1e-4;
            let fine = central_difference(self, y, dir, h);
            let coarse = central_difference(self, y, dir, 2.0 * h);
            (fine.scale(4.0) - coarse).scale(1.0 / 3.0)
        }
    }
}

fn central_difference<F: UnitaryFamily + ?Sized>(
    family: &F,
    y: &[f64],
    dir: usize,
    h: f64,
) -> CMatrix {
    let mut fwd = y.to_vec();
    let mut bwd = y.to_vec();
    fwd[dir] += h;
    bwd[dir] -= h;
    (family.unitary(&fwd) - family.unitary(&bwd)).scale(0.5 / h)
}

fn real_to_complex(m: &Matrix3<f64>) -> CMatrix {
    CMatrix::from_fn(3, 3, |r, c| C64::new(m[(r, c)], 0.0))
}

fn cross_matrix(axis: usize) -> CMatrix {
    // [e_axis]^x, the constant tangent of the linearised families.
    let mut m = Matrix3::<f64>::zeros();
    let (i, j, k) = match axis {
        0 => (0, 1, 2),
        1 => (1, 2, 0),
        _ => (2, 0, 1),
    };
    let _ = i;
    m[(k, j)] = 1.0;
    m[(j, k)] = -1.0;
    real_to_complex(&m)
}

/// Linearised Euler family `U(β, γ) = I - iβJy - iγJz` on the defining
/// representation.
#[derive(Debug, Clone, Copy, Default)]
pub struct EulerFamily;

impl UnitaryFamily for EulerFamily {
    fn chart_dim(&self) -> usize {
        2
    }

    fn unitary(&self, y: &[f64]) -> CMatrix {
        let u = euler_unitary_linearized(&EulerCoords::new(y[0], y[1]))
            .expect("finite chart point");
        real_to_complex(&u)
    }

    fn chart(&self) -> Chart {
        Chart::Euler
    }

    fn tangent(&self, _y: &[f64], dir: usize) -> CMatrix {
        // The family is affine in (β, γ): tangents are the constant
        // cross-product matrices for the y and z axes.
        cross_matrix(dir + 1)
    }
}

/// Linearised Tait-Bryan family `U(α, β, γ) = I - iαJx - iβJy - iγJz`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TaitBryanFamily;

impl UnitaryFamily for TaitBryanFamily {
    fn chart_dim(&self) -> usize {
        3
    }

    fn unitary(&self, y: &[f64]) -> CMatrix {
        let u = tb_unitary_linearized(&TaitBryanCoords::new(y[0], y[1], y[2]))
            .expect("finite chart point");
        real_to_complex(&u)
    }

    fn chart(&self) -> Chart {
        Chart::TaitBryan
    }

    fn tangent(&self, _y: &[f64], dir: usize) -> CMatrix {
        cross_matrix(dir)
    }
}

/// Adapter that forces the finite-difference tangent pathway even when
/// the wrapped family knows its exact derivatives. Used to validate the
/// numerical construction against the closed forms.
pub struct NumericTangents<'a>(pub &'a dyn UnitaryFamily);

impl UnitaryFamily for NumericTangents<'_> {
    fn chart_dim(&self) -> usize {
        self.0.chart_dim()
    }

    fn unitary(&self, y: &[f64]) -> CMatrix {
        self.0.unitary(y)
    }

    fn chart(&self) -> Chart {
        self.0.chart()
    }
    // `tangent` deliberately not overridden: the trait default does the
    // finite-difference work.
}

fn check_point(family: &dyn UnitaryFamily, y: &[f64], ydot: Option<&[f64]>) -> Result<()> {
    if y.len() != family.chart_dim() {
        return Err(Error::InvalidParameter {
            name: "chart point",
            reason: format!("length {} for chart dim {}", y.len(), family.chart_dim()),
        });
    }
    if !y.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("chart point"));
    }
    if let Some(v) = ydot {
        if v.len() != family.chart_dim() {
            return Err(Error::InvalidParameter {
                name: "chart tangent",
                reason: format!("length {} for chart dim {}", v.len(), family.chart_dim()),
            });
        }
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("chart tangent"));
        }
    }
    Ok(())
}

fn inverse_at(family: &dyn UnitaryFamily, y: &[f64], basis: &GeneratorBasis) -> Result<CMatrix> {
    let u = family.unitary(y);
    if u.nrows() != basis.rep_dim {
        return Err(Error::InvalidParameter {
            name: "basis",
            reason: format!(
                "representation dim {} does not match the family's {}",
                basis.rep_dim,
                u.nrows()
            ),
        });
    }
    u.try_inverse()
        .ok_or_else(|| Error::ChartDomain(format!("operator is singular at chart point {y:?}")))
}

/// Hermitian-square trace `Tr[J J†]` used to normalise each projection.
fn normalisation(j: &CMatrix) -> f64 {
    (j * j.adjoint()).trace().re
}

/// Project the path velocity `ydot` at chart point `y` onto the
/// generators.
pub fn control_functions(
    family: &dyn UnitaryFamily,
    y: &[f64],
    ydot: &[f64],
    basis: &GeneratorBasis,
) -> Result<ControlFunctions> {
    check_point(family, y, Some(ydot))?;
    let uinv = inverse_at(family, y, basis)?;
    let mut du = CMatrix::zeros(basis.rep_dim, basis.rep_dim);
    for (dir, &v) in ydot.iter().enumerate() {
        du += family.tangent(y, dir).scale(v);
    }
    let velocity = du * uinv;
    let mut out = [C64::new(0.0, 0.0); 3];
    for (a, ja) in basis.as_array().into_iter().enumerate() {
        out[a] = (&velocity * ja.adjoint()).trace() / C64::new(normalisation(ja), 0.0);
    }
    Ok(ControlFunctions { y: out })
}

/// Metric tensor at a chart point.
#[derive(Debug, Clone)]
pub struct MetricTensor {
    /// Symmetric `d×d` components (`d` = chart dimension).
    pub g: DMatrix<f64>,
    pub chart: Chart,
}

impl MetricTensor {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.g
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue() > 0.0
    }

    /// Quadratic form `vᵀ g v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                s += v[i] * self.g[(i, j)] * v[j];
            }
        }
        s
    }
}

/// Evaluate the metric construction at a chart point.
///
/// The entries are accumulated as `G_ab Y_i^a (Y_j^b)*`; an imaginary
/// residue beyond rounding noise means the construction was fed a
/// family for which the realness assumption fails, and is reported as
/// an internal defect rather than silently truncated.
pub fn metric_at(
    family: &dyn UnitaryFamily,
    y: &[f64],
    basis: &GeneratorBasis,
    penalty: &PenaltyMatrix,
) -> Result<MetricTensor> {
    check_point(family, y, None)?;
    let dim = family.chart_dim();
    let uinv = inverse_at(family, y, basis)?;

    // Control functions of each coordinate direction, sharing one U⁻¹.
    let mut dirs: Vec<[C64; 3]> = Vec::with_capacity(dim);
    for i in 0..dim {
        let velocity = family.tangent(y, i) * &uinv;
        let mut row = [C64::new(0.0, 0.0); 3];
        for (a, ja) in basis.as_array().into_iter().enumerate() {
            row[a] = (&velocity * ja.adjoint()).trace() / C64::new(normalisation(ja), 0.0);
        }
        dirs.push(row);
    }

    let gp = penalty.as_matrix();
    let mut g = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let mut s = C64::new(0.0, 0.0);
            for a in 0..3 {
                for b in 0..3 {
                    s += dirs[i][a] * dirs[j][b].conj() * C64::new(gp[(a, b)], 0.0);
                }
            }
            if s.im.abs() > 1e-12 * (1.0 + s.re.abs()) {
                return Err(Error::IdentityViolation(format!(
                    "metric entry ({i},{j}) has imaginary part {:.3e}",
                    s.im
                )));
            }
            g[(i, j)] = s.re;
            g[(j, i)] = s.re;
        }
    }
    Ok(MetricTensor {
        g,
        chart: family.chart(),
    })
}

/// Closed-form Euler-chart metric with `D = 1 + β² + γ²`:
/// `g_ββ = (γ⁴ + γ²(β²+5) + 4)/D²`, `g_γγ = (β⁴ + β²(γ²+5) + 4)/D²`,
/// `g_βγ = -βγ(β² + γ² + 5)/D²`.
pub fn euler_metric_closed(c: &EulerCoords) -> MetricTensor {
    let (b, g) = (c.beta, c.gamma);
    let (b2, g2) = (b * b, g * g);
    let d2 = (1.0 + b2 + g2) * (1.0 + b2 + g2);
    let gbb = (g2 * g2 + g2 * (b2 + 5.0) + 4.0) / d2;
    let ggg = (b2 * b2 + b2 * (g2 + 5.0) + 4.0) / d2;
    let gbg = -b * g * (b2 + g2 + 5.0) / d2;
    MetricTensor {
        g: DMatrix::from_row_slice(2, 2, &[gbb, gbg, gbg, ggg]),
        chart: Chart::Euler,
    }
}

/// Polar coordinates diagonalising the Euler chart: `β = ρ sinΘ`,
/// `γ = ρ cosΘ`. `theta` is `None` exactly at the origin, where the
/// angle is indeterminate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarCoords {
    pub rho: f64,
    pub theta: Option<f64>,
}

impl PolarCoords {
    pub fn new(rho: f64, theta: f64) -> Self {
        PolarCoords {
            rho,
            theta: Some(theta),
        }
    }
}

/// Spherical coordinates diagonalising the Tait-Bryan chart:
/// `α = ρ sinΦ`, `β = ρ sinΘ cosΦ`, `γ = ρ cosΘ cosΦ`. `phi` is `None`
/// at the origin; `theta` is `None` whenever β = γ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCoords {
    pub rho: f64,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
}

impl SphericalCoords {
    pub fn new(rho: f64, theta: f64, phi: f64) -> Self {
        SphericalCoords {
            rho,
            theta: Some(theta),
            phi: Some(phi),
        }
    }
}

/// Diagonal metric in polar coordinates:
/// `diag(4/(1+ρ²)², ρ²(4+ρ²)/(1+ρ²))`. The angular component is
/// coordinate-degenerate at ρ = 0, which is rejected.
pub fn polar_metric_closed(p: &PolarCoords) -> Result<MetricTensor> {
    if p.rho == 0.0 {
        return Err(Error::CoordinateSingular(
            "polar metric is angle-degenerate at rho = 0",
        ));
    }
    if !(p.rho.is_finite() && p.rho > 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            reason: format!("{} is not positive", p.rho),
        });
    }
    let r2 = p.rho * p.rho;
    let g_rr = 4.0 / ((1.0 + r2) * (1.0 + r2));
    let g_tt = r2 * (4.0 + r2) / (1.0 + r2);
    Ok(MetricTensor {
        g: DMatrix::from_row_slice(2, 2, &[g_rr, 0.0, 0.0, g_tt]),
        chart: Chart::Polar,
    })
}

/// Diagonal metric in spherical coordinates, ordered (ρ, Θ, Φ):
/// `diag(4/(1+ρ²)², A cos²Φ, A)` with `A = ρ²(ρ⁴+5ρ²+4)/(1+ρ²)²`.
pub fn spherical_metric_closed(s: &SphericalCoords) -> Result<MetricTensor> {
    if s.rho == 0.0 {
        return Err(Error::CoordinateSingular(
            "spherical metric is angle-degenerate at rho = 0",
        ));
    }
    if !(s.rho.is_finite() && s.rho > 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            reason: format!("{} is not positive", s.rho),
        });
    }
    let phi = s.phi.ok_or(Error::CoordinateSingular(
        "spherical metric requires a determinate Phi",
    ))?;
    let r2 = s.rho * s.rho;
    let g_rr = 4.0 / ((1.0 + r2) * (1.0 + r2));
    let a = r2 * (r2 * r2 + 5.0 * r2 + 4.0) / ((1.0 + r2) * (1.0 + r2));
    let c = phi.cos();
    Ok(MetricTensor {
        g: DMatrix::from_row_slice(3, 3, &[g_rr, 0.0, 0.0, 0.0, a * c * c, 0.0, 0.0, 0.0, a]),
        chart: Chart::Spherical,
    })
}

/// Euler chart → polar coordinates; `Θ = atan2(β, γ)`.
pub fn to_polar(c: &EulerCoords) -> PolarCoords {
    let rho = c.beta.hypot(c.gamma);
    let theta = if rho == 0.0 {
        None
    } else {
        Some(c.beta.atan2(c.gamma))
    };
    PolarCoords { rho, theta }
}

/// Polar → Euler chart.
pub fn from_polar(p: &PolarCoords) -> Result<EulerCoords> {
    if !(p.rho.is_finite() && p.rho >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            reason: format!("{} is not a non-negative real", p.rho),
        });
    }
    if p.rho == 0.0 {
        return Ok(EulerCoords::new(0.0, 0.0));
    }
    let theta = p.theta.ok_or(Error::CoordinateSingular(
        "theta required away from the origin",
    ))?;
    Ok(EulerCoords::new(p.rho * theta.sin(), p.rho * theta.cos()))
}

/// Tait-Bryan chart → spherical coordinates; `Θ = atan2(β, γ)`,
/// `Φ = atan2(α, √(β²+γ²))`.
pub fn to_spherical(c: &TaitBryanCoords) -> SphericalCoords {
    let q = c.beta.hypot(c.gamma);
    let rho = q.hypot(c.alpha);
    let theta = if q == 0.0 {
        None
    } else {
        Some(c.beta.atan2(c.gamma))
    };
    let phi = if rho == 0.0 {
        None
    } else {
        Some(c.alpha.atan2(q))
    };
    SphericalCoords { rho, theta, phi }
}

/// Spherical → Tait-Bryan chart.
pub fn from_spherical(s: &SphericalCoords) -> Result<TaitBryanCoords> {
    if !(s.rho.is_finite() && s.rho >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            reason: format!("{} is not a non-negative real", s.rho),
        });
    }
    if s.rho == 0.0 {
        return Ok(TaitBryanCoords::new(0.0, 0.0, 0.0));
    }
    let phi = s.phi.ok_or(Error::CoordinateSingular(
        "phi required away from the origin",
    ))?;
    let transverse = s.rho * phi.cos();
    let theta = match s.theta {
        Some(t) => t,
        None if transverse == 0.0 => 0.0,
        None => {
            return Err(Error::CoordinateSingular(
                "theta required away from the beta = gamma = 0 axis",
            ))
        }
    };
    Ok(TaitBryanCoords::new(
        s.rho * phi.sin(),
        transverse * theta.sin(),
        transverse * theta.cos(),
    ))
}

/// Jacobian `∂(β,γ)/∂(ρ,Θ)` of the polar transform.
pub fn polar_jacobian(p: &PolarCoords) -> Result<Matrix2<f64>> {
    let theta = p.theta.ok_or(Error::CoordinateSingular(
        "jacobian requires a determinate Theta",
    ))?;
    let (s, c) = theta.sin_cos();
    Ok(Matrix2::new(s, p.rho * c, c, -p.rho * s))
}

/// Jacobian `∂(α,β,γ)/∂(ρ,Θ,Φ)` of the spherical transform.
pub fn spherical_jacobian(s: &SphericalCoords) -> Result<Matrix3<f64>> {
    let theta = s.theta.ok_or(Error::CoordinateSingular(
        "jacobian requires a determinate Theta",
    ))?;
    let phi = s.phi.ok_or(Error::CoordinateSingular(
        "jacobian requires a determinate Phi",
    ))?;
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let r = s.rho;
    Ok(Matrix3::new(
        sp,
        0.0,
        r * cp,
        st * cp,
        r * ct * cp,
        -r * st * sp,
        ct * cp,
        -r * st * cp,
        -r * ct * sp,
    ))
}

/// Closed-form Tait-Bryan chart metric, obtained by pulling the
/// spherical diagonal form back through the coordinate transform.
///
/// At the origin the exact limit `4·I` is returned. On the pure-α axis
/// (β = γ = 0, ρ > 0) the spherical chart itself degenerates and the
/// pullback is unavailable; use [`metric_at`] there.
pub fn tb_metric_closed(c: &TaitBryanCoords) -> Result<MetricTensor> {
    let s = to_spherical(c);
    if s.rho == 0.0 {
        return Ok(MetricTensor {
            g: DMatrix::identity(3, 3) * 4.0,
            chart: Chart::TaitBryan,
        });
    }
    if s.theta.is_none() {
        return Err(Error::ChartDomain(
            "spherical pullback is degenerate on the beta = gamma = 0 axis".into(),
        ));
    }
    let diag = spherical_metric_closed(&s)?;
    let jac = spherical_jacobian(&s)?;
    let jinv = jac.try_inverse().ok_or_else(|| {
        Error::ChartDomain("spherical transform jacobian is singular here".into())
    })?;
    let gd = Matrix3::from_fn(|i, j| diag.g[(i, j)]);
    let g = jinv.transpose() * gd * jinv;
    Ok(MetricTensor {
        g: DMatrix::from_fn(3, 3, |i, j| g[(i, j)]),
        chart: Chart::TaitBryan,
    })
}
