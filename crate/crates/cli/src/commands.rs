use clap::ValueEnum;
use num_complex::Complex64;
use serde_json::Value;

use qradial::asc::{
    asc_eval_hypergeometric_detailed, asc_orthonormal_all, asc_recurrence_all, build_spectral_measure,
    measure_quadrature, orthonormal_at, ASCParams, SpectralMeasure,
};
use qradial::cfun::{asymptotics_check, c_function, regime, wc_identity_check, AsymptoticRegime};
use qradial::hyperg::{phi_l_bridged_profile, phi_l_detailed, SpectralParameterL};
use qradial::laplacian::{
    box_divergence, box_matrix, box_pointwise, dirichlet_form, lambda_of_l, lambda_of_z, pairing_form, spectral_band,
    truncated_spectrum,
};
use qradial::qcore::{
    bminus, bplus, qgamma, qgamma_complex, qintegral_radial, qpascal_psi, qpochhammer, qpochhammer_inf_detailed,
    QContext,
};
use qradial::radial::{basis_ej_coeff, inner_product, norm_fj, norm_sq, point_mass, radial_integral, rho};
use qradial::repsim::{build_rep, check_relations, radial_equivalence_check};
use qradial::spectral::{multiplication_equivalence_check, plancherel_check, transform_forward, transform_inverse};
use qradial::verify::{qpascal_lattice_sum, run_all, Battery};

use crate::args::*;
use crate::io::{
    cplx, grid_function_rows, int, num, read_grid_function, read_spectral_function, spectral_function_rows, uint,
    Report,
};
use crate::CliError;

/// A finished command: its report and the exit code to use.
pub struct Finished {
    pub report: Report,
    pub code: i32,
    /// Diagnostics for the error stream.
    pub notes: Vec<String>,
}

impl From<Report> for Finished {
    fn from(report: Report) -> Self {
        Self { report, code: 0, notes: Vec::new() }
    }
}

fn name<E: ValueEnum>(e: E) -> Value {
    Value::from(e.to_possible_value().map_or_else(String::new, |v| v.get_name().to_string()))
}

fn context(g: &GlobalOpts) -> Result<QContext, CliError> {
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(CliError::Validation(format!("tol must be positive, got {}", g.tol)));
    }
    Ok(QContext::new(g.q, g.n, g.m)?)
}

fn measure(ctx: &QContext, g: &GlobalOpts) -> Result<SpectralMeasure, CliError> {
    Ok(build_spectral_measure(ctx, g.tol)?)
}

fn config_fields(ctx: &QContext) -> Report {
    Report::default().field("q", num(ctx.q())).field("n", uint(ctx.n())).field("m", uint(ctx.m()))
}

pub fn execute(cli: &Cli) -> Result<Finished, CliError> {
    let g = &cli.global;
    let ctx = context(g)?;
    let base = config_fields(&ctx);
    let report = match &cli.command {
        Command::Qs { cmd: QsCmd::Eval { what, a, x, base: b, j, k, input } } => {
            let b = b.unwrap_or(ctx.base());
            let r = base.field("what", name(*what));
            match what {
                QsWhat::Poch => r
                    .field("base", num(b))
                    .field("k", uint(*k))
                    .field("value", cplx(qpochhammer(*a, b, *k))),
                QsWhat::PochInf => {
                    let p = qpochhammer_inf_detailed(*a, b, g.tol)?;
                    r.field("base", num(b))
                        .field("value", cplx(p.value))
                        .field("mantissa", cplx(p.mantissa))
                        .field("exponent10", int(p.exponent10))
                        .field("factors", uint(p.factors))
                        .field("tail_bound", num(p.tail_bound))
                }
                QsWhat::Gamma => {
                    let v = if x.im == 0.0 { Complex64::new(qgamma(x.re, b)?, 0.0) } else { qgamma_complex(*x, b)? };
                    r.field("base", num(b)).field("x", cplx(*x)).field("value", cplx(v))
                }
                QsWhat::Psi => r
                    .field("j", uint(*j))
                    .field("k", uint(*k))
                    .field("closed_form", num(qpascal_psi(*j, *k, &ctx)))
                    .field("lattice_sum", num(qpascal_lattice_sum(*j, *k, ctx.q()))),
                QsWhat::Qintegral | QsWhat::Bminus | QsWhat::Bplus => {
                    let path = input.as_ref().ok_or_else(|| CliError::Validation("--in is required".into()))?;
                    let f = read_grid_function(path)?;
                    match what {
                        QsWhat::Qintegral => r.field("value", cplx(qintegral_radial(&f, &ctx))),
                        QsWhat::Bminus => r.field("k", uint(*k)).field("value", cplx(bminus(&f, *k, &ctx))),
                        _ => r.field("k", uint(*k)).field("value", cplx(bplus(&f, *k, &ctx))),
                    }
                }
            }
        }

        Command::Phi { cmd: PhiCmd::Eval { k, l, route } } => {
            let lp = SpectralParameterL::new(*l, &ctx);
            let r = base
                .field("l", cplx(*l))
                .field("z", cplx(lp.z))
                .field("lambda", cplx(lambda_of_l(*l, &ctx)))
                .field("route", name(*route));
            match route {
                PhiRoute::Bridged => {
                    let prof = phi_l_bridged_profile(*k, lp.z, &ctx);
                    let rows = prof.iter().enumerate().map(|(j, v)| vec![uint(j), num(v.re), num(v.im)]).collect();
                    r.field("value", cplx(prof[*k])).with_table("profile", vec!["k", "re", "im"], rows)
                }
                PhiRoute::Series => {
                    let mut rows = Vec::with_capacity(k + 1);
                    let mut last = Complex64::default();
                    for j in 0..=*k {
                        let s = phi_l_detailed(j, &lp, &ctx)?;
                        last = s.value;
                        rows.push(vec![uint(j), num(s.value.re), num(s.value.im), num(s.condition())]);
                    }
                    r.field("value", cplx(last)).with_table("profile", vec!["k", "re", "im", "condition"], rows)
                }
            }
        }

        Command::Asc { cmd: AscCmd::Eval { k, z, route } } => {
            let params = ASCParams::from_ctx(&ctx);
            let r = base
                .field("a", num(params.a))
                .field("b", num(params.b))
                .field("z", cplx(*z))
                .field("route", name(*route));
            let qs: Vec<Complex64> = match route {
                AscRoute::Recurrence if z.im == 0.0 => {
                    asc_recurrence_all(*k, z.re, &params).into_iter().map(|v| Complex64::new(v, 0.0)).collect()
                }
                AscRoute::Recurrence => asc_recurrence_all(*k, *z, &params),
                AscRoute::Hypergeometric => (0..=*k)
                    .map(|j| asc_eval_hypergeometric_detailed(j, *z, &params).map(|s| s.value))
                    .collect::<qradial::error::Result<_>>()?,
            };
            let ortho = (z.im == 0.0 && *route == AscRoute::Recurrence).then(|| asc_orthonormal_all(*k, z.re, &params));
            let rows = qs
                .iter()
                .enumerate()
                .map(|(j, q)| {
                    let p = ortho.as_ref().map_or(*q / params.norm_sq(j).sqrt(), |o| Complex64::new(o[j], 0.0));
                    vec![uint(j), num(q.re), num(q.im), num(p.re), num(p.im)]
                })
                .collect();
            r.field("value", cplx(qs[*k])).with_table("polynomials", vec!["k", "q_re", "q_im", "p_re", "p_im"], rows)
        }

        Command::Measure { cmd } => {
            let meas = measure(&ctx, g)?;
            match cmd {
                MeasureCmd::Build { nodes } => {
                    let r = base
                        .field("normalizer", num(meas.normalizer))
                        .field("intervals", uint(meas.intervals()))
                        .field("total_mass", num(meas.total_mass()))
                        .field("mass_count", uint(meas.mass_points().len()));
                    if *nodes {
                        let rows = meas.nodes().iter().map(|nd| vec![num(nd.theta), num(nd.z), num(nd.weight)]).collect();
                        r.with_table("nodes", vec!["theta", "z", "weight"], rows)
                    } else {
                        let rows = meas
                            .mass_points()
                            .iter()
                            .map(|mp| vec![uint(mp.index), num(mp.z), num(lambda_of_z(mp.z, &ctx)), num(mp.weight)])
                            .collect();
                        r.with_table("masses", vec!["index", "z", "lambda", "weight"], rows)
                    }
                }
                MeasureCmd::Quadrature { power, pair } => {
                    let params = meas.params;
                    match pair.as_deref() {
                        Some(&[i, j]) => {
                            let v = measure_quadrature(
                                |pt| {
                                    let p = orthonormal_at(i.max(j), pt, &params);
                                    p[i] * p[j]
                                },
                                &meas,
                                g.tol,
                            )?;
                            base.field("i", uint(i)).field("j", uint(j)).field("value", num(v))
                        }
                        _ => {
                            let v = measure_quadrature(|pt| pt.z().powi(*power as i32), &meas, g.tol)?;
                            base.field("power", uint(*power as usize)).field("value", num(v))
                        }
                    }
                }
            }
        }

        Command::Radial { cmd } => match cmd {
            RadialCmd::Rho { kmax } => {
                let rows = (0..=*kmax)
                    .map(|k| {
                        vec![
                            uint(k),
                            num(ctx.grid_x(k as i64)),
                            num(rho(k, &ctx)),
                            num(point_mass(k, &ctx)),
                            num(norm_fj(k, &ctx)),
                            num(basis_ej_coeff(k, &ctx)),
                        ]
                    })
                    .collect();
                base.field("const1", num(ctx.const1())).field("const2", num(ctx.const2())).with_table(
                    "grid",
                    vec!["k", "x", "rho", "point_mass", "norm_fj_sq", "e_coeff"],
                    rows,
                )
            }
            RadialCmd::Integrate { input } => {
                let f = read_grid_function(input)?;
                base.field("integral", cplx(radial_integral(&f, &ctx)))
            }
        },

        Command::Box { cmd } => match cmd {
            BoxCmd::Apply { input, route } => {
                let f = read_grid_function(input)?;
                let out = match route {
                    BoxRoute::Pointwise => box_pointwise(&f, &ctx),
                    BoxRoute::Divergence => box_divergence(&f, &ctx),
                };
                base.field("route", name(*route)).with_table(
                    "values",
                    vec!["k", "re", "im"],
                    grid_function_rows(&out),
                )
            }
            BoxCmd::Matrix { size } => {
                let t = box_matrix(*size, &ctx)?;
                let rows = (0..*size)
                    .map(|i| vec![uint(i), num(t.diag[i]), t.off.get(i).map_or(Value::Null, |&o| num(o))])
                    .collect();
                base.field("size", uint(*size)).with_table("entries", vec!["i", "diag", "off"], rows)
            }
            BoxCmd::Spectrum { size } => {
                let ev = truncated_spectrum(*size, &ctx)?;
                let (lo, hi) = spectral_band(&ctx);
                let masses: Vec<Value> = measure(&ctx, g)?
                    .mass_points()
                    .iter()
                    .map(|mp| num(lambda_of_z(mp.z, &ctx)))
                    .collect();
                let norm = ev.iter().fold(0.0f64, |s, v| s.max(v.abs()));
                let rows = ev.iter().enumerate().map(|(i, &v)| vec![uint(i), num(v)]).collect();
                base.field("size", uint(*size))
                    .field("band", Value::Array(vec![num(lo), num(hi)]))
                    .field("mass_eigenvalues", Value::Array(masses))
                    .field("norm", num(norm))
                    .with_table("eigenvalues", vec!["i", "value"], rows)
            }
            BoxCmd::Lambda { l, z } => match (l, z) {
                (Some(l), _) => base.field("l", cplx(*l)).field("lambda", cplx(lambda_of_l(*l, &ctx))),
                (None, Some(z)) => base.field("z", num(*z)).field("lambda", num(lambda_of_z(*z, &ctx))),
                (None, None) => return Err(CliError::Validation("one of --l or --z is required".into())),
            },
            BoxCmd::Dirichlet { input, other } => {
                let f = read_grid_function(input)?;
                let h = read_grid_function(other)?;
                base.field("laplacian_pairing", cplx(inner_product(&box_pointwise(&f, &ctx), &h, &ctx)))
                    .field("dirichlet_form", cplx(dirichlet_form(&f, &h, &ctx)))
                    .field("prefactor_pairing", cplx(pairing_form(&f, &h, &ctx)))
            }
        },

        Command::Transform { cmd } => {
            let meas = measure(&ctx, g)?;
            match cmd {
                TransformCmd::Forward { input } => {
                    let f = read_grid_function(input)?;
                    let u = transform_forward(&f, &meas, &ctx);
                    base.field("intervals", uint(meas.intervals())).field("mass_count", uint(u.masses.len())).with_table(
                        "samples",
                        vec!["type", "coord", "re", "im"],
                        spectral_function_rows(&u),
                    )
                }
                TransformCmd::Inverse { input, jmax } => {
                    let u = read_spectral_function(input, &meas)?;
                    let f = transform_inverse(&u, &ctx, *jmax);
                    base.field("jmax", uint(*jmax)).with_table("values", vec!["k", "re", "im"], grid_function_rows(&f))
                }
                TransformCmd::Plancherel { input } => {
                    let f = read_grid_function(input)?;
                    let (lhs, rhs) = plancherel_check(&f, &meas, &ctx);
                    base.field("norm_sq", num(lhs))
                        .field("transform_norm_sq", num(rhs))
                        .field("relative_deviation", num((lhs - rhs).abs() / lhs))
                }
                TransformCmd::Multcheck { input } => {
                    let f = read_grid_function(input)?;
                    let d = multiplication_equivalence_check(&f, &meas, &ctx);
                    let nf = norm_sq(&f, &ctx).sqrt();
                    base.field("distance", num(d)).field("norm", num(nf)).field("relative_distance", num(d / nf))
                }
            }
        }

        Command::Cfun { cmd } => match cmd {
            CfunCmd::Eval { l } => base.field("l", cplx(*l)).field("value", cplx(c_function(*l, &ctx, g.tol)?)),
            CfunCmd::Asymptotics { l, kmax } => {
                let which = match regime(*l, &ctx)? {
                    AsymptoticRegime::Direct => "direct",
                    AsymptoticRegime::Reflected => "reflected",
                };
                let mut rows = Vec::with_capacity(kmax + 1);
                let mut target = Complex64::default();
                for k in 0..=*kmax {
                    let (ratio, t) = asymptotics_check(*l, k, &ctx)?;
                    target = t;
                    rows.push(vec![uint(k), num(ratio.re), num(ratio.im), num((ratio - t).norm())]);
                }
                base.field("l", cplx(*l))
                    .field("regime", Value::from(which))
                    .field("target", cplx(target))
                    .with_table("ratios", vec!["k", "re", "im", "error"], rows)
            }
            CfunCmd::Wc { z } => {
                let (lhs, rhs) = wc_identity_check(*z, &measure(&ctx, g)?, &ctx)?;
                base.field("z", num(*z))
                    .field("weight", num(lhs))
                    .field("c_function_form", num(rhs))
                    .field("relative_deviation", num((lhs - rhs).abs() / lhs.abs()))
            }
        },

        Command::Rep { cmd } => match cmd {
            RepCmd::Build { bound } => {
                let rep = build_rep(*bound, &ctx)?;
                let rows = (1..=ctx.dim()).map(|j| vec![uint(j), uint(rep.t(j).nnz()), uint(rep.tstar(j).nnz())]).collect();
                let (qmin, qmax) =
                    rep.qdiag().iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
                base.field("M", uint(*bound))
                    .field("basis_size", uint(rep.len()))
                    .field("qdiag_min", num(qmin))
                    .field("qdiag_max", num(qmax))
                    .with_table("generators", vec!["j", "nnz_t", "nnz_tstar"], rows)
            }
            RepCmd::Relations { bound } => {
                let report = check_relations(&build_rep(*bound, &ctx)?);
                let rows = report.residuals.iter().map(|(k, &v)| vec![Value::from(k.as_str()), num(v)]).collect();
                base.field("M", uint(*bound))
                    .field("interior_columns", uint(report.interior_columns))
                    .field("max_residual", num(report.max_residual()))
                    .with_table("relations", vec!["relation", "residual"], rows)
            }
            RepCmd::Integral { input, bound } => {
                let f = read_grid_function(input)?;
                let c = radial_equivalence_check(&f, &build_rep(*bound, &ctx)?);
                base.field("M", uint(*bound))
                    .field("trace", cplx(c.trace))
                    .field("radial", cplx(c.radial))
                    .field("tail_bound", num(c.tail_bound))
                    .field("within_bound", Value::from(c.passes()))
            }
        },

        Command::Verify { cmd: VerifyCmd::All { single } } => {
            let battery = if *single { Battery::single(ctx, g.seed) } else { Battery::full() };
            let outcomes = run_all(&battery);
            let failures = outcomes.iter().filter(|o| !o.passed).count();
            let notes = outcomes.iter().map(|o| format!("criterion {}: {:.3} s", o.id, o.elapsed.as_secs_f64())).collect();
            let rows = outcomes
                .iter()
                .map(|o| {
                    vec![
                        uint(o.id),
                        Value::from(o.title),
                        Value::from(if o.passed { "pass" } else { "fail" }),
                        Value::from(o.detail.as_str()),
                        uint(o.limit.as_secs() as usize),
                    ]
                })
                .collect();
            let report = base
                .field("single", Value::from(*single))
                .field("seed", Value::from(g.seed))
                .field("passed", uint(outcomes.len() - failures))
                .field("failed", uint(failures))
                .with_table("criteria", vec!["id", "criterion", "status", "detail", "time_limit_s"], rows);
            return Ok(Finished { report, code: if failures == 0 { 0 } else { 1 }, notes });
        }
    };
    Ok(report.into())
}
