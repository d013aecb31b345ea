//! The `complexity` and `squeeze` table commands.
//!
//! Parameter flags are validated against the chosen model by name, so a
//! misplaced flag produces a one-line diagnostic naming exactly that
//! flag. Grid points are independent and evaluated in parallel; rows
//! are always emitted in grid order, so the output is byte-identical
//! for a given configuration regardless of the thread count.

use std::path::PathBuf;

use cssc_core::complexity::{
    class1_complexity, dicke_complexity, lmg_boundary_functions, lmg_iso_complexity,
    oat_boundary_functions, oat_complexity, oat_complexity_via_squeezing, static_complexity,
    tb_complexity, timedep_complexity, DickeParams,
};
use cssc_core::dynamics::{
    squeezing_report, LmgParams, SpinModel, SqueezingOracle, TwistingParams,
};
use cssc_core::geodesic::BoundaryFunctions3;
use cssc_core::so3::{RotationAngles, Spin};
use rayon::prelude::*;
use serde::Serialize;

use crate::{ComplexityArgs, Failure, FormatArg, ModelArg, SqueezeArgs, SweepArgs};

/// One fully validated model, ready to be evaluated at any time.
enum ModelSpec {
    Static {
        angles: RotationAngles,
        n: u32,
    },
    Magnet {
        angles: RotationAngles,
        b: f64,
        n: u32,
    },
    Oat {
        angles: RotationAngles,
        p: TwistingParams,
        n: u32,
    },
    LmgIso {
        angles: RotationAngles,
        p: LmgParams,
        n: u32,
    },
    LmgFrozen {
        angles: RotationAngles,
        p: LmgParams,
        n: u32,
    },
    Dicke {
        angles: RotationAngles,
        dp: DickeParams,
        n: u32,
    },
}

fn require(v: Option<f64>, flag: &'static str, model: &str) -> Result<f64, Failure> {
    match v {
        Some(x) if x.is_finite() => Ok(x),
        Some(x) => Err(Failure::usage(flag, format!("{x} is not finite"))),
        None => Err(Failure::usage(flag, format!("required by model {model}"))),
    }
}

fn optional(v: Option<f64>, flag: &'static str, default: f64) -> Result<f64, Failure> {
    match v {
        Some(x) if x.is_finite() => Ok(x),
        Some(x) => Err(Failure::usage(flag, format!("{x} is not finite"))),
        None => Ok(default),
    }
}

fn forbid(entries: &[(bool, &'static str)], model: &str) -> Result<(), Failure> {
    for (present, flag) in entries {
        if *present {
            return Err(Failure::usage(flag, format!("not accepted by model {model}")));
        }
    }
    Ok(())
}

/// The `--J`/`--N` pair of the twisting model: exactly one of them.
fn twisting_j(a: &SweepArgs, model: &str) -> Result<f64, Failure> {
    match (a.j, a.n_particles) {
        (Some(_), Some(_)) => Err(Failure::usage(
            "J",
            format!("give either --J or --N for model {model}, not both"),
        )),
        (Some(j), None) if j.is_finite() => Ok(j),
        (Some(j), None) => Err(Failure::usage("J", format!("{j} is not finite"))),
        (None, Some(n_part)) => Ok(f64::from(n_part) / 2.0),
        (None, None) => Err(Failure::usage(
            "J",
            format!("model {model} needs --J or --N"),
        )),
    }
}

fn twisting_params(a: &SweepArgs, model: &str) -> Result<TwistingParams, Failure> {
    forbid(
        &[
            (a.b.is_some(), "B"),
            (a.lambda.is_some(), "lambda"),
            (a.kappa.is_some(), "kappa"),
            (a.alpha_r.is_some(), "alpha-r"),
            (a.alpha_i.is_some(), "alpha-i"),
            (a.omega.is_some(), "omega"),
        ],
        model,
    )?;
    let omega_drive = require(a.omega_drive, "Omega", model)?;
    let delta = require(a.delta, "delta", model)?;
    let j = twisting_j(a, model)?;
    TwistingParams::new(delta, omega_drive, j).map_err(Failure::from_core)
}

impl ModelSpec {
    fn build(model: ModelArg, a: &SweepArgs) -> Result<ModelSpec, Failure> {
        let m = model.name();
        let theta = optional(a.theta, "theta", 0.0)?;
        let phi = optional(a.phi, "phi", 0.0)?;
        let angles = RotationAngles::new(theta, phi);
        let n = a.n.unwrap_or(0);
        let no_lmg = [
            (a.omega_drive.is_some(), "Omega"),
            (a.delta.is_some(), "delta"),
            (a.j.is_some(), "J"),
            (a.alpha_r.is_some(), "alpha-r"),
            (a.alpha_i.is_some(), "alpha-i"),
            (a.omega.is_some(), "omega"),
        ];
        match model {
            ModelArg::Static => {
                forbid(
                    &[
                        (a.b.is_some(), "B"),
                        (a.omega_drive.is_some(), "Omega"),
                        (a.delta.is_some(), "delta"),
                        (a.j.is_some(), "J"),
                        (a.lambda.is_some(), "lambda"),
                        (a.kappa.is_some(), "kappa"),
                        (a.n_particles.is_some(), "N"),
                        (a.alpha_r.is_some(), "alpha-r"),
                        (a.alpha_i.is_some(), "alpha-i"),
                        (a.omega.is_some(), "omega"),
                    ],
                    m,
                )?;
                Ok(ModelSpec::Static { angles, n })
            }
            ModelArg::SpinMagnet => {
                forbid(
                    &[
                        (a.omega_drive.is_some(), "Omega"),
                        (a.delta.is_some(), "delta"),
                        (a.j.is_some(), "J"),
                        (a.lambda.is_some(), "lambda"),
                        (a.kappa.is_some(), "kappa"),
                        (a.n_particles.is_some(), "N"),
                        (a.alpha_r.is_some(), "alpha-r"),
                        (a.alpha_i.is_some(), "alpha-i"),
                        (a.omega.is_some(), "omega"),
                    ],
                    m,
                )?;
                let b = require(a.b, "B", m)?;
                Ok(ModelSpec::Magnet { angles, b, n })
            }
            ModelArg::Oat => {
                let p = twisting_params(a, m)?;
                Ok(ModelSpec::Oat { angles, p, n })
            }
            ModelArg::LmgIso | ModelArg::LmgFrozen => {
                forbid(&no_lmg, m)?;
                let b = require(a.b, "B", m)?;
                let lambda = optional(a.lambda, "lambda", 1.0)?;
                let kappa = if model == ModelArg::LmgIso {
                    if let Some(k) = a.kappa {
                        if (k - 1.0).abs() > 1e-12 {
                            return Err(Failure::usage(
                                "kappa",
                                format!("model {m} requires kappa = 1, got {k}"),
                            ));
                        }
                    }
                    1.0
                } else {
                    require(a.kappa, "kappa", m)?
                };
                // N only gates validation here; the closed-form boundary
                // functions do not depend on it.
                let n_part = a.n_particles.unwrap_or(2);
                let p = LmgParams::new(lambda, kappa, b, n_part).map_err(Failure::from_core)?;
                if model == ModelArg::LmgIso {
                    Ok(ModelSpec::LmgIso { angles, p, n })
                } else {
                    Ok(ModelSpec::LmgFrozen { angles, p, n })
                }
            }
            ModelArg::Dicke => {
                forbid(
                    &[
                        (a.b.is_some(), "B"),
                        (a.omega_drive.is_some(), "Omega"),
                        (a.delta.is_some(), "delta"),
                        (a.j.is_some(), "J"),
                        (a.lambda.is_some(), "lambda"),
                        (a.kappa.is_some(), "kappa"),
                        (a.n_particles.is_some(), "N"),
                    ],
                    m,
                )?;
                let omega = require(a.omega, "omega", m)?;
                let alpha_r = optional(a.alpha_r, "alpha-r", 0.0)?;
                let alpha_i = optional(a.alpha_i, "alpha-i", 0.0)?;
                let dp = DickeParams::new(alpha_r, alpha_i, omega).map_err(Failure::from_core)?;
                Ok(ModelSpec::Dicke { angles, dp, n })
            }
        }
    }

    /// One table row. The complexity column goes through exactly the
    /// same formula-module call a library user would make; the f-columns
    /// are the three-angle embedding of the evolved target.
    fn row(&self, t: f64) -> Result<ComplexityRow, Failure> {
        let (f, complexity) = match self {
            ModelSpec::Static { angles, n } => (
                BoundaryFunctions3::new(0.0, angles.theta, angles.phi),
                static_complexity(angles, *n).value,
            ),
            ModelSpec::Magnet { angles, b, n } => (
                BoundaryFunctions3::new(0.0, angles.theta, angles.phi + b * t),
                class1_complexity(angles, *b, t, *n).value,
            ),
            ModelSpec::Oat { angles, p, n } => {
                let fb = oat_boundary_functions(angles, p, t);
                let c = timedep_complexity(&fb, *n).value;
                (BoundaryFunctions3::from_planar(&fb), c)
            }
            ModelSpec::LmgIso { angles, p, n } => (
                BoundaryFunctions3::new(0.0, angles.theta, angles.phi + p.omega1() * t),
                lmg_iso_complexity(angles, p, t, *n)
                    .map_err(Failure::from_core)?
                    .value,
            ),
            ModelSpec::LmgFrozen { angles, p, n } => {
                let fb = lmg_boundary_functions(angles, p, t);
                let c = tb_complexity(&fb, *n).value;
                (fb, c)
            }
            ModelSpec::Dicke { angles, dp, n } => (
                BoundaryFunctions3::new(0.0, angles.theta, angles.phi),
                dicke_complexity(dp, angles, *n),
            ),
        };
        Ok(ComplexityRow {
            t,
            f1: f.f1,
            f2: f.f2,
            f3: f.f3,
            norm: f.norm(),
            complexity,
        })
    }
}

#[derive(Serialize)]
struct ComplexityRow {
    t: f64,
    f1: f64,
    f2: f64,
    f3: f64,
    norm: f64,
    complexity: f64,
}

impl ComplexityRow {
    const HEADERS: [&'static str; 6] = ["t", "f1", "f2", "f3", "norm", "complexity"];

    fn values(&self) -> Vec<f64> {
        vec![self.t, self.f1, self.f2, self.f3, self.norm, self.complexity]
    }
}

#[derive(Serialize)]
struct SqueezeRow {
    t: f64,
    var_jy: f64,
    var_jz: f64,
    corr_yz: f64,
    xi2_y: f64,
    xi2_z: f64,
    g_pair_zz: f64,
    complexity_bf: f64,
    complexity_sq: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    var_jy_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    var_jz_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    corr_yz_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi2_y_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi2_z_exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g_pair_zz_exact: Option<f64>,
}

impl SqueezeRow {
    fn headers(exact: bool) -> Vec<&'static str> {
        let mut h = vec![
            "t",
            "var_jy",
            "var_jz",
            "corr_yz",
            "xi2_y",
            "xi2_z",
            "g_pair_zz",
            "complexity_bf",
            "complexity_sq",
        ];
        if exact {
            h.extend([
                "var_jy_exact",
                "var_jz_exact",
                "corr_yz_exact",
                "xi2_y_exact",
                "xi2_z_exact",
                "g_pair_zz_exact",
            ]);
        }
        h
    }

    fn values(&self) -> Vec<f64> {
        let mut v = vec![
            self.t,
            self.var_jy,
            self.var_jz,
            self.corr_yz,
            self.xi2_y,
            self.xi2_z,
            self.g_pair_zz,
            self.complexity_bf,
            self.complexity_sq,
        ];
        for opt in [
            self.var_jy_exact,
            self.var_jz_exact,
            self.corr_yz_exact,
            self.xi2_y_exact,
            self.xi2_z_exact,
            self.g_pair_zz_exact,
        ]
        .into_iter()
        .flatten()
        {
            v.push(opt);
        }
        v
    }
}

fn time_grid(a: &SweepArgs) -> Result<Vec<f64>, Failure> {
    let t_min = optional(a.t_min, "t-min", 0.0)?;
    let t_max = optional(a.t_max, "t-max", t_min)?;
    if t_max < t_min {
        return Err(Failure::usage(
            "t-max",
            format!("{t_max} is below t-min = {t_min}"),
        ));
    }
    let steps = a.steps.unwrap_or(1);
    if steps == 0 {
        return Err(Failure::usage("steps", "need at least one grid point"));
    }
    if steps == 1 {
        if t_max > t_min {
            return Err(Failure::usage(
                "steps",
                "a single step cannot span t-min < t-max; use --steps 2 or more",
            ));
        }
        return Ok(vec![t_min]);
    }
    Ok((0..steps)
        .map(|i| t_min + (t_max - t_min) * i as f64 / (steps - 1) as f64)
        .collect())
}

/// 17 significant digits: exact round-trip for every finite f64.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_csv(headers: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&headers.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt17(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn emit<R: Serialize>(
    format: FormatArg,
    out: &Option<PathBuf>,
    headers: &[&str],
    rows: &[R],
    csv_rows: &[Vec<f64>],
) -> Result<(), Failure> {
    let body = match format {
        FormatArg::Csv => render_csv(headers, csv_rows),
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(rows)
                .map_err(|e| Failure::usage("format", e))?;
            s.push('\n');
            s
        }
    };
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::usage("out", format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| Failure::usage("out", e))
        }
    }
}

pub fn cmd_complexity(args: &ComplexityArgs) -> Result<(), Failure> {
    let spec = ModelSpec::build(args.model, &args.params)?;
    let grid = time_grid(&args.params)?;
    let rows: Vec<ComplexityRow> = grid
        .par_iter()
        .map(|&t| spec.row(t))
        .collect::<Result<_, _>>()?;
    let csv_rows: Vec<Vec<f64>> = rows.iter().map(ComplexityRow::values).collect();
    emit(
        args.params.format,
        &args.params.out,
        &ComplexityRow::HEADERS,
        &rows,
        &csv_rows,
    )
}

/// Per-row agreement the two complexity routes must satisfy; they are
/// the same quantity through two algebraic rewrites.
const SQUEEZE_IDENTITY_TOL: f64 = 1e-12;

fn squeeze_row(
    angles: &RotationAngles,
    p: &TwistingParams,
    n: u32,
    t: f64,
    oracle: Option<&SqueezingOracle>,
) -> Result<SqueezeRow, Failure> {
    let rep = squeezing_report(p, t);
    let c_bf = oat_complexity(angles, p, t, n).value;
    let c_sq = oat_complexity_via_squeezing(angles, &rep, p.j, n)
        .map_err(Failure::from_core)?
        .value;
    if (c_bf - c_sq).abs() > SQUEEZE_IDENTITY_TOL {
        return Err(Failure::internal(format!(
            "squeezing-route complexity differs from the boundary-function route by {:.3e} at t = {t}",
            (c_bf - c_sq).abs()
        )));
    }
    let mut row = SqueezeRow {
        t,
        var_jy: rep.var_jy,
        var_jz: rep.var_jz,
        corr_yz: rep.corr_yz,
        xi2_y: rep.xi2_y,
        xi2_z: rep.xi2_z,
        g_pair_zz: rep.g_pair_zz,
        complexity_bf: c_bf,
        complexity_sq: c_sq,
        var_jy_exact: None,
        var_jz_exact: None,
        corr_yz_exact: None,
        xi2_y_exact: None,
        xi2_z_exact: None,
        g_pair_zz_exact: None,
    };
    if let Some(orc) = oracle {
        let ex = orc.report(t).map_err(Failure::from_core)?;
        row.var_jy_exact = Some(ex.var_jy);
        row.var_jz_exact = Some(ex.var_jz);
        row.corr_yz_exact = Some(ex.corr_yz);
        row.xi2_y_exact = Some(ex.xi2_y);
        row.xi2_z_exact = Some(ex.xi2_z);
        row.g_pair_zz_exact = Some(ex.g_pair_zz);
    }
    Ok(row)
}

pub fn cmd_squeeze(args: &SqueezeArgs) -> Result<(), Failure> {
    if let Some(model) = args.model {
        if model != ModelArg::Oat {
            return Err(Failure::usage(
                "model",
                format!("squeeze is defined for the oat model only, got {}", model.name()),
            ));
        }
    }
    let a = &args.params;
    let m = ModelArg::Oat.name();
    let theta = optional(a.theta, "theta", 0.0)?;
    let phi = optional(a.phi, "phi", 0.0)?;
    let angles = RotationAngles::new(theta, phi);
    let n = a.n.unwrap_or(0);
    let p = twisting_params(a, m)?;

    let oracle = if args.exact {
        let spin = Spin::try_from_j(p.j).map_err(|_| {
            Failure::usage(
                "J",
                format!("the exact oracle needs 2J to be a positive integer, got J = {}", p.j),
            )
        })?;
        let model = SpinModel::Oat {
            delta: p.delta,
            omega: p.omega,
        };
        let orc = SqueezingOracle::new(spin, &model).map_err(|e| match e {
            cssc_core::Error::DimensionCap(dim, cap) => Failure::usage(
                "J",
                format!("representation dimension {dim} exceeds the exact-oracle cap of {cap}"),
            ),
            other => Failure::from_core(other),
        })?;
        Some(orc)
    } else {
        None
    };

    let grid = time_grid(a)?;
    let rows: Vec<SqueezeRow> = grid
        .par_iter()
        .map(|&t| squeeze_row(&angles, &p, n, t, oracle.as_ref()))
        .collect::<Result<_, _>>()?;
    let headers = SqueezeRow::headers(args.exact);
    let csv_rows: Vec<Vec<f64>> = rows.iter().map(SqueezeRow::values).collect();
    emit(a.format, &a.out, &headers, &rows, &csv_rows)
}
