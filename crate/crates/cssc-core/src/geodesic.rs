//! Geodesics of the chart metrics: closed forms and a shooting oracle.
//!
//! In the diagonalising coordinates the geodesics through the identity
//! are radial: the angular coordinates stay constant and
//! `ρ(τ) = tan(Kτ/2 - C)` with `C = -nπ`, giving the constant speed
//! `K = 2(arctan‖target‖ + nπ)` on the two-angle chart and
//! `K = 2 arctan‖target‖ + 2nπ` on the three-angle chart — the same
//! family written with its branch offset inside or outside the
//! arctangent.
//!
//! The independent check is [`shoot_geodesic`]: it integrates the
//! geodesic equation of the *constructed* metric (the control-function
//! projection, not the closed forms) in the plain chart coordinates —
//! sidestepping the ρ = 0 coordinate singularity — and Newton-adjusts
//! the launch velocity until the endpoint matches the target. Its
//! arclength must land on the closed-form speed.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metric::{
    metric_at, Chart, EulerFamily, MetricTensor, PenaltyMatrix, TaitBryanFamily, UnitaryFamily,
};
use crate::so3::{defining_generators, GeneratorBasis, RotationAngles};

/// Boundary data (f, g) of a time-evolved operator on the two-angle
/// chart; `f` sits in the γ (φ-like) slot and `g` in the β (θ-like)
/// slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFunctions {
    pub f: f64,
    pub g: f64,
}

impl BoundaryFunctions {
    pub fn new(f: f64, g: f64) -> Self {
        BoundaryFunctions { f, g }
    }

    pub fn norm(&self) -> f64 {
        self.f.hypot(self.g)
    }
}

/// Boundary data (f1, f2, f3) on the three-angle chart, sitting in the
/// (α, β, γ) slots respectively.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFunctions3 {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

impl BoundaryFunctions3 {
    pub fn new(f1: f64, f2: f64, f3: f64) -> Self {
        BoundaryFunctions3 { f1, f2, f3 }
    }

    pub fn norm(&self) -> f64 {
        (self.f1 * self.f1 + self.f2 * self.f2 + self.f3 * self.f3).sqrt()
    }

    /// Embed two-angle boundary data on the f1 = 0 hypersurface.
    pub fn from_planar(fb: &BoundaryFunctions) -> Self {
        BoundaryFunctions3::new(0.0, fb.g, fb.f)
    }
}

/// Closed-form geodesic from the identity in diagonalising coordinates.
///
/// Angular coordinates are `None` when the target leaves them
/// indeterminate (zero target, or β = γ = 0 for `theta0` on the
/// three-angle chart); sampling helpers substitute an arbitrary
/// representative of 0 in that case.
#[derive(Debug, Clone)]
pub struct GeodesicSolution {
    /// Constant geodesic speed K (the complexity of the branch).
    pub speed: f64,
    pub theta0: Option<f64>,
    pub phi0: Option<f64>,
    /// Integration constant of the radial solution, `-nπ`.
    pub c_offset: f64,
    pub branch_n: u32,
    /// `Chart::Polar` or `Chart::Spherical`.
    pub chart: Chart,
    /// ‖target‖ reached at τ = 1.
    pub target_norm: f64,
}

impl GeodesicSolution {
    /// Radial coordinate `ρ(τ) = tan(speed·τ/2 - c_offset)`.
    pub fn rho(&self, tau: f64) -> f64 {
        (self.speed * tau / 2.0 - self.c_offset).tan()
    }

    /// Radial velocity `dρ/dτ = (speed/2)(1 + ρ²)`.
    pub fn rho_dot(&self, tau: f64) -> f64 {
        let r = self.rho(tau);
        self.speed / 2.0 * (1.0 + r * r)
    }

    /// Sample the trajectory in the plain chart coordinates,
    /// (β, γ) or (α, β, γ).
    pub fn chart_point(&self, tau: f64) -> Vec<f64> {
        let r = self.rho(tau);
        let th = self.theta0.unwrap_or(0.0);
        match self.chart {
            Chart::Polar => vec![r * th.sin(), r * th.cos()],
            Chart::Spherical => {
                let ph = self.phi0.unwrap_or(0.0);
                vec![
                    r * ph.sin(),
                    r * th.sin() * ph.cos(),
                    r * th.cos() * ph.cos(),
                ]
            }
            _ => unreachable!("solutions live in diagonalising charts"),
        }
    }

    /// Chart-coordinate velocity at `tau`.
    pub fn chart_velocity(&self, tau: f64) -> Vec<f64> {
        let rd = self.rho_dot(tau);
        let th = self.theta0.unwrap_or(0.0);
        match self.chart {
            Chart::Polar => vec![rd * th.sin(), rd * th.cos()],
            Chart::Spherical => {
                let ph = self.phi0.unwrap_or(0.0);
                vec![
                    rd * ph.sin(),
                    rd * th.sin() * ph.cos(),
                    rd * th.cos() * ph.cos(),
                ]
            }
            _ => unreachable!("solutions live in diagonalising charts"),
        }
    }

    /// Boundary residuals (|ρ(0)|, |ρ(1) - ‖target‖|).
    pub fn boundary_residual(&self) -> (f64, f64) {
        (self.rho(0.0).abs(), (self.rho(1.0) - self.target_norm).abs())
    }
}

fn check_branch_target(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("geodesic target"))
    }
}

/// Closed-form geodesic to the two-angle target (θ in the β slot, φ in
/// the γ slot): `Θ₀ = atan2(θ, φ)`, `K = 2(arctan√(θ²+φ²) + nπ)`.
pub fn euler_geodesic(target: &RotationAngles, branch_n: u32) -> Result<GeodesicSolution> {
    check_branch_target(&[target.theta, target.phi])?;
    let norm = target.norm();
    let n = f64::from(branch_n);
    let theta0 = if norm == 0.0 {
        None
    } else {
        Some(target.theta.atan2(target.phi))
    };
    Ok(GeodesicSolution {
        speed: 2.0 * (norm.atan() + n * PI),
        theta0,
        phi0: None,
        c_offset: -n * PI,
        branch_n,
        chart: Chart::Polar,
        target_norm: norm,
    })
}

/// Closed-form geodesic to the three-angle target:
/// `Θ₀ = atan2(f2, f3)`, `Φ₀ = atan2(f1, √(f2²+f3²))`,
/// `K = 2 arctan‖f‖ + 2nπ`.
pub fn tb_geodesic(target: &BoundaryFunctions3, branch_n: u32) -> Result<GeodesicSolution> {
    check_branch_target(&[target.f1, target.f2, target.f3])?;
    let norm = target.norm();
    let n = f64::from(branch_n);
    let transverse = target.f2.hypot(target.f3);
    let theta0 = if transverse == 0.0 {
        None
    } else {
        Some(target.f2.atan2(target.f3))
    };
    let phi0 = if norm == 0.0 {
        None
    } else {
        Some(target.f1.atan2(transverse))
    };
    Ok(GeodesicSolution {
        speed: 2.0 * norm.atan() + 2.0 * n * PI,
        theta0,
        phi0,
        c_offset: -n * PI,
        branch_n,
        chart: Chart::Spherical,
        target_norm: norm,
    })
}

/// The conserved quantities of the geodesic flow: squared speed K², the
/// Θ-momentum L and the angular separation constant M (which reduces to
/// L² on the two-angle chart).
#[derive(Debug, Clone, Copy)]
pub struct HJConstants {
    pub k2: f64,
    pub l: f64,
    pub m: f64,
    /// Largest wobble of any of the three constants along the sampled
    /// trajectory.
    pub max_drift: f64,
}

/// Evaluate the conserved quantities along a closed-form solution at
/// `samples` equally spaced parameter values.
pub fn hj_constants(sol: &GeodesicSolution, samples: usize) -> HJConstants {
    let samples = samples.max(2);
    let k2_ref = sol.speed * sol.speed;
    let mut drift: f64 = 0.0;
    for i in 0..samples {
        let tau = i as f64 / (samples - 1) as f64;
        let r = sol.rho(tau);
        let rd = sol.rho_dot(tau);
        // Radial speed only: the angles are constant along the solution.
        let k2 = 4.0 * rd * rd / ((1.0 + r * r) * (1.0 + r * r));
        drift = drift.max((k2 - k2_ref).abs());
    }
    // Θ and Φ are constant by construction: the momenta vanish
    // identically, with no floating residue to accumulate.
    HJConstants {
        k2: k2_ref,
        l: 0.0,
        m: 0.0,
        max_drift: drift,
    }
}

/// Metric evaluations for the shooting solver: the constructed metric
/// of a chart family, its inverse-free quadratic form and
/// finite-difference Christoffel symbols.
struct MetricField {
    family: Box<dyn UnitaryFamily>,
    basis: GeneratorBasis,
    penalty: PenaltyMatrix,
    dim: usize,
}

impl MetricField {
    fn new(chart: Chart) -> Result<Self> {
        let family: Box<dyn UnitaryFamily> = match chart {
            Chart::Euler => Box::new(EulerFamily),
            Chart::TaitBryan => Box::new(TaitBryanFamily),
            other => {
                return Err(Error::InvalidParameter {
                    name: "chart",
                    reason: format!("shooting runs in plain chart coordinates, not {other}"),
                })
            }
        };
        let dim = family.chart_dim();
        Ok(MetricField {
            family,
            basis: defining_generators(),
            penalty: PenaltyMatrix::default(),
            dim,
        })
    }

    fn metric(&self, y: &[f64]) -> Result<MetricTensor> {
        metric_at(self.family.as_ref(), y, &self.basis, &self.penalty)
    }

    fn g(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.metric(y)?.g)
    }

    /// Γ^k_ij from central differences of the metric (step 1e-5).
    fn christoffel(&self, y: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let d = self.dim;
        let h = 1e-5;
        let g0 = self.g(y)?;
        let ginv = g0.clone().try_inverse().ok_or_else(|| {
            Error::ChartDomain(format!("metric not invertible at {y:?}"))
        })?;
        let mut dg = Vec::with_capacity(d);
        for l in 0..d {
            let mut fwd = y.to_vec();
            let mut bwd = y.to_vec();
            fwd[l] += h;
            bwd[l] -= h;
            dg.push((self.g(&fwd)? - self.g(&bwd)?).scale(0.5 / h));
        }
        let mut gamma = vec![DMatrix::zeros(d, d); d];
        for k in 0..d {
            for i in 0..d {
                for j in 0..=i {
                    let mut s = 0.0;
                    for l in 0..d {
                        s += ginv[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
                    }
                    gamma[k][(i, j)] = 0.5 * s;
                    gamma[k][(j, i)] = 0.5 * s;
                }
            }
        }
        Ok(gamma)
    }

    /// Geodesic right-hand side on the state [y, v, s].
    fn rhs(&self, state: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.dim;
        let (y, rest) = state.split_at(d);
        let v = &rest[..d];
        if !state.iter().all(|x| x.is_finite()) {
            return Err(Error::NoConvergence(
                "geodesic state left the finite domain".into(),
            ));
        }
        let gamma = self.christoffel(y)?;
        let g = self.g(y)?;
        out[..d].copy_from_slice(v);
        for k in 0..d {
            let mut acc = 0.0;
            for i in 0..d {
                for j in 0..d {
                    acc += gamma[k][(i, j)] * v[i] * v[j];
                }
            }
            out[d + k] = -acc;
        }
        let mut speed2 = 0.0;
        for i in 0..d {
            for j in 0..d {
                speed2 += v[i] * g[(i, j)] * v[j];
            }
        }
        out[2 * d] = speed2.max(0.0).sqrt();
        Ok(())
    }
}

/// Dormand–Prince 5(4) adaptive step from `t` with initial step `h`.
/// Returns (accepted, t_new, h_next, k_last) and updates `state` when
/// the step is accepted.
struct Dp54 {
    /// Stage derivatives, reused across steps (FSAL).
    k: Vec<Vec<f64>>,
}

const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl Dp54 {
    fn new(n: usize) -> Self {
        Dp54 {
            k: vec![vec![0.0; n]; 7],
        }
    }

    /// One attempted step; `rhs` must fill its output slice.
    #[allow(clippy::needless_range_loop)] // stage index addresses the tableau rows
    fn step<F>(
        &mut self,
        rhs: &F,
        state: &mut Vec<f64>,
        t: &mut f64,
        h: f64,
        tol: f64,
    ) -> Result<(bool, f64)>
    where
        F: Fn(&[f64], &mut [f64]) -> Result<()>,
    {
        let n = state.len();
        let _ = DP_C; // stage times are implicit for an autonomous system
        rhs(state, &mut self.k[0])?;
        let mut stage = vec![0.0; n];
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in self.k.iter().enumerate().take(s) {
                    let a = DP_A[s][j];
                    if a != 0.0 {
                        acc += a * kj[i];
                    }
                }
                stage[i] = state[i] + h * acc;
            }
            let (head, tail) = self.k.split_at_mut(s);
            let _ = head;
            rhs(&stage, &mut tail[0])?;
        }
        // 5th-order candidate and embedded-error estimate.
        let mut err: f64 = 0.0;
        let mut candidate = vec![0.0; n];
        for i in 0..n {
            let mut y5 = 0.0;
            let mut y4 = 0.0;
            for s in 0..7 {
                y5 += DP_B5[s] * self.k[s][i];
                y4 += DP_B4[s] * self.k[s][i];
            }
            candidate[i] = state[i] + h * y5;
            let scale = tol * (1.0 + state[i].abs().max(candidate[i].abs()));
            err = err.max((h * (y5 - y4)).abs() / scale);
        }
        let accepted = err <= 1.0;
        if accepted {
            *state = candidate;
            *t += h;
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        Ok((accepted, h * factor))
    }
}

/// One integration of the geodesic initial-value problem over τ ∈ [0,1].
struct Trajectory {
    taus: Vec<f64>,
    states: Vec<Vec<f64>>,
}

fn integrate(field: &MetricField, v0: &[f64], tol: f64) -> Result<Trajectory> {
    let d = field.dim;
    let n = 2 * d + 1;
    let mut state = vec![0.0; n];
    state[d..2 * d].copy_from_slice(v0);
    let rhs = |s: &[f64], out: &mut [f64]| field.rhs(s, out);
    let mut dp = Dp54::new(n);
    let mut t = 0.0;
    let mut h = 0.05_f64;
    let mut taus = vec![0.0];
    let mut states = vec![state.clone()];
    let mut steps = 0usize;
    while t < 1.0 {
        let remaining = 1.0 - t;
        if remaining < 1e-14 {
            break;
        }
        h = h.min(remaining);
        let (accepted, h_next) = dp.step(&rhs, &mut state, &mut t, h, tol)?;
        if accepted {
            taus.push(t);
            states.push(state.clone());
        }
        h = h_next.max(1e-12);
        steps += 1;
        if steps > 100_000 {
            return Err(Error::NoConvergence(
                "geodesic integration exceeded the step budget".into(),
            ));
        }
    }
    Ok(Trajectory { taus, states })
}

/// Numerically integrated geodesic from the identity to a chart target.
#[derive(Debug, Clone)]
pub struct ShotGeodesic {
    pub chart: Chart,
    pub taus: Vec<f64>,
    /// Chart points along the trajectory.
    pub points: Vec<Vec<f64>>,
    /// Chart velocities along the trajectory.
    pub velocities: Vec<Vec<f64>>,
    /// Arclength accumulated by the integrator.
    pub length: f64,
    /// Endpoint mismatch (max-norm) actually achieved.
    pub residual: f64,
    pub newton_iterations: usize,
}

/// Solve the geodesic boundary-value problem by shooting.
///
/// `chart` selects the plain coordinates ([`Chart::Euler`] or
/// [`Chart::TaitBryan`]); the target must lie inside the principal
/// domain ‖target‖ < π/2. Newton iterations adjust the launch velocity
/// (initial guess: the chart straight line) with a forward-difference
/// Jacobian and step damping; failure to converge is an explicit error,
/// never a silently wrong path.
pub fn shoot_geodesic(chart: Chart, target: &[f64], tol: f64) -> Result<ShotGeodesic> {
    let field = MetricField::new(chart)?;
    if target.len() != field.dim {
        return Err(Error::InvalidParameter {
            name: "target",
            reason: format!("length {} for chart dim {}", target.len(), field.dim),
        });
    }
    check_branch_target(target)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("{tol} is not positive"),
        });
    }
    let norm: f64 = target.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm >= PI / 2.0 {
        return Err(Error::ChartDomain(format!(
            "target norm {norm:.6} is outside the principal domain (< π/2)"
        )));
    }

    let rk_tol = (tol * 1e-2).clamp(1e-13, 1e-10);
    let mut v: Vec<f64> = target.to_vec();
    let mut best: Option<(f64, Vec<f64>, Trajectory)> = None;

    for iteration in 0..100 {
        let traj = integrate(&field, &v, rk_tol)?;
        let end = traj.states.last().expect("at least the initial state");
        let resid_vec: Vec<f64> = (0..field.dim).map(|i| end[i] - target[i]).collect();
        let resid = resid_vec.iter().fold(0.0_f64, |a, r| a.max(r.abs()));
        if best.as_ref().is_none_or(|(b, _, _)| resid < *b) {
            best = Some((resid, v.clone(), traj));
        } else {
            // The damped update failed to improve on the recorded best;
            // fall through so the failure is reported explicitly.
            break;
        }
        if resid < tol {
            let (resid, _, traj) = best.unwrap();
            return Ok(package(chart, field.dim, traj, resid, iteration));
        }

        // Forward-difference Jacobian of the endpoint w.r.t. the launch
        // velocity.
        let mut jac = DMatrix::zeros(field.dim, field.dim);
        for col in 0..field.dim {
            let h = 1e-6 * (1.0 + v[col].abs());
            let mut vp = v.clone();
            vp[col] += h;
            let tp = integrate(&field, &vp, rk_tol)?;
            let ep = tp.states.last().unwrap();
            for row in 0..field.dim {
                jac[(row, col)] = (ep[row] - target[row] - resid_vec[row]) / h;
            }
        }
        let delta = jac
            .lu()
            .solve(&DMatrix::from_column_slice(field.dim, 1, &resid_vec))
            .ok_or_else(|| {
                Error::NoConvergence("singular shooting Jacobian".into())
            })?;

        // Damped Newton: halve the step until the endpoint improves.
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..10 {
            let trial: Vec<f64> = (0..field.dim)
                .map(|i| v[i] - lambda * delta[(i, 0)])
                .collect();
            // A wild trial velocity can drive the integration out of the
            // finite domain; treat that like any other failed trial.
            let tr = match integrate(&field, &trial, rk_tol) {
                Ok(tt) => {
                    let te = tt.states.last().unwrap();
                    (0..field.dim)
                        .map(|i| (te[i] - target[i]).abs())
                        .fold(0.0_f64, f64::max)
                }
                Err(_) => f64::INFINITY,
            };
            if tr < resid {
                v = trial;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }

    let (resid, _, _) = best.as_ref().expect("at least one trial ran");
    Err(Error::NoConvergence(format!(
        "shooting stalled at endpoint residual {resid:.3e} (tolerance {tol:.1e})"
    )))
}

fn package(
    chart: Chart,
    dim: usize,
    traj: Trajectory,
    residual: f64,
    newton_iterations: usize,
) -> ShotGeodesic {
    let length = traj.states.last().unwrap()[2 * dim];
    let points = traj.states.iter().map(|s| s[..dim].to_vec()).collect();
    let velocities = traj
        .states
        .iter()
        .map(|s| s[dim..2 * dim].to_vec())
        .collect();
    ShotGeodesic {
        chart,
        taus: traj.taus,
        points,
        velocities,
        length,
        residual,
        newton_iterations,
    }
}

/// Trapezoid arclength of a sampled chart path together with a
/// Richardson-refined estimate from comparing against the half-rate
/// sampling.
#[derive(Debug, Clone, Copy)]
pub struct PathLength {
    pub length: f64,
    pub refined: f64,
}

/// Arclength `Σ √(g_ij Δyⁱ Δyʲ)` of a polyline in chart coordinates,
/// with the metric averaged over each segment's endpoints.
pub fn path_length(chart: Chart, points: &[Vec<f64>]) -> Result<PathLength> {
    let field = MetricField::new(chart)?;
    if points.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "need at least two samples".into(),
        });
    }
    for p in points {
        if p.len() != field.dim {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: format!("point of length {} for chart dim {}", p.len(), field.dim),
            });
        }
        if !p.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("path point"));
        }
    }
    let metrics: Vec<DMatrix<f64>> = points
        .iter()
        .map(|p| field.g(p))
        .collect::<Result<_>>()?;
    let seg = |i: usize, j: usize| -> f64 {
        let d: Vec<f64> = (0..field.dim).map(|k| points[j][k] - points[i][k]).collect();
        let quad = |g: &DMatrix<f64>| -> f64 {
            let mut s = 0.0;
            for a in 0..field.dim {
                for b in 0..field.dim {
                    s += d[a] * g[(a, b)] * d[b];
                }
            }
            s.max(0.0).sqrt()
        };
        0.5 * (quad(&metrics[i]) + quad(&metrics[j]))
    };
    let mut full = 0.0;
    for i in 0..points.len() - 1 {
        full += seg(i, i + 1);
    }
    let refined = if points.len() >= 5 {
        // Trapezoid error scales as h²: compare against every-other-point
        // sampling and extrapolate.
        let mut coarse = 0.0;
        let mut idx = 0;
        while idx + 2 < points.len() {
            coarse += seg(idx, idx + 2);
            idx += 2;
        }
        if idx + 1 < points.len() {
            coarse += seg(idx, idx + 1);
        }
        full + (full - coarse) / 3.0
    } else {
        full
    };
    Ok(PathLength {
        length: full,
        refined,
    })
}

/// Conserved-quantity drift along a numerically integrated geodesic.
///
/// Samples with τ < 1e-3 are skipped: at the launch point the angular
/// coordinates of the diagonalising chart are indeterminate and their
/// momenta are evaluated in 0/0 form.
pub fn hj_constants_along(shot: &ShotGeodesic) -> Result<HJConstants> {
    let field = MetricField::new(shot.chart.into_plain())?;
    let mut k2_ref: Option<f64> = None;
    let mut k2_drift: f64 = 0.0;
    let mut l_max: f64 = 0.0;
    let mut m_max: f64 = 0.0;
    for ((tau, y), v) in shot
        .taus
        .iter()
        .zip(&shot.points)
        .zip(&shot.velocities)
    {
        if *tau < 1e-3 {
            continue;
        }
        let g = field.g(y)?;
        let mut k2 = 0.0;
        for i in 0..field.dim {
            for j in 0..field.dim {
                k2 += v[i] * g[(i, j)] * v[j];
            }
        }
        match k2_ref {
            None => k2_ref = Some(k2),
            Some(r) => k2_drift = k2_drift.max((k2 - r).abs()),
        }
        match field.dim {
            2 => {
                let (b, g_) = (y[0], y[1]);
                let r2 = b * b + g_ * g_;
                // g_ΘΘ Θ̇ in product form, regular through ρ → 0.
                let l = (4.0 + r2) / (1.0 + r2) * (g_ * v[0] - b * v[1]);
                l_max = l_max.max(l.abs());
                m_max = m_max.max(l * l);
            }
            _ => {
                let (a, b, g_) = (y[0], y[1], y[2]);
                let q2 = b * b + g_ * g_;
                let r2 = a * a + q2;
                let l = (4.0 + r2) / (1.0 + r2) * (g_ * v[1] - b * v[2]);
                l_max = l_max.max(l.abs());
                if q2 > 1e-24 {
                    let q = q2.sqrt();
                    let p_phi = (4.0 + r2) / (1.0 + r2) * (q2 * v[0] - a * (b * v[1] + g_ * v[2]))
                        / q;
                    let m = p_phi * p_phi + l * l * r2 / q2;
                    m_max = m_max.max(m.abs());
                }
            }
        }
    }
    let k2 = k2_ref.ok_or_else(|| {
        Error::InvalidParameter {
            name: "shot",
            reason: "trajectory has no samples beyond the launch point".into(),
        }
    })?;
    Ok(HJConstants {
        k2,
        l: l_max,
        m: m_max,
        max_drift: k2_drift.max(l_max).max(m_max),
    })
}

impl Chart {
    /// Map a diagonalising chart label to the plain chart it
    /// parametrises (identity on the plain charts).
    pub fn into_plain(self) -> Chart {
        match self {
            Chart::Polar => Chart::Euler,
            Chart::Spherical => Chart::TaitBryan,
            c => c,
        }
    }
}
