//! `hm run`: one trajectory per config, with rate reports on request.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use hm_core::geometry::GeodesicSpace;
use hm_core::rates::{ar_rates_rho, error_rates, halpern_rates, meta_mu, HalpernSigma, RateFn};
use hm_core::schemes::{
    fixture, run_halpern, run_hm, run_hm_errors, run_hm_with, run_km, run_tkm, Fixture, Perturbation, Residual,
    RunOptions, Schedule, SequenceSpec, Trajectory,
};
use hm_core::splitting::{run_gdr, run_gfb, split_fixture};
use hm_core::verify::{empirical_metastability, threshold_of, ThresholdReport};
use serde::Serialize;

use crate::config::{RunConfig, Scheme, SCHEMA_VERSION};
use crate::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct RunOutcome {
    pub schema_version: u32,
    pub config: RunConfig,
    pub rows: usize,
    pub reports: Vec<ThresholdReport>,
    pub notes: Vec<String>,
    pub all_sound: bool,
    #[serde(skip)]
    pub files: Vec<PathBuf>,
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn with_suffix(name: &str, suffix: &str) -> String {
    match name.rsplit_once('.') {
        Some((stem, ext)) => format!("{stem}_{suffix}.{ext}"),
        None => format!("{name}_{suffix}"),
    }
}

/// `n ↦ d(x_{n+1}, x_n)` from the `d_prev` column.
fn step_column(tr: &Trajectory) -> Vec<f64> {
    tr.residual(Residual::Prev).map(|c| c[1..].to_vec()).unwrap_or_default()
}

fn threshold_report(label: &str, eps: &crate::config::EpsSpec, column: &[f64], rate: &RateFn) -> CliResult<ThresholdReport> {
    let (e, ef) = eps.parse()?;
    let bound = rate.eval(&e)?;
    let horizon = column.len().saturating_sub(1);
    Ok(ThresholdReport::new(label, eps.label(), threshold_of(column, ef), bound, horizon))
}

fn hm_reports(cfg: &RunConfig, f: &Fixture, schedule: &Schedule, tr: &Trajectory, out: &mut RunOutcome) -> CliResult<()> {
    let Some(m) = &schedule.moduli else {
        out.notes.push("schedule carries no moduli; rate reports skipped".into());
        return Ok(());
    };
    let rho = ar_rates_rho(m, f.problem.n)?;
    let steps = step_column(tr);
    let du = tr.residual(Residual::U).unwrap_or_default();
    let dt = tr.residual(Residual::T).unwrap_or_default();
    for eps in &cfg.eps_grid {
        for check in cfg.checks() {
            let r = match check {
                "rho1" => threshold_report("d(x_{n+1},x_n) vs rho1", eps, &steps, &rho.rho1)?,
                "rho2" => threshold_report("d(U x_n,x_n) vs rho2", eps, du, &rho.rho2)?,
                _ => threshold_report("d(T x_n,x_n) vs rho3", eps, dt, &rho.rho3)?,
            };
            out.reports.push(r);
        }
    }
    if let Some(c) = cfg.counter {
        let Ok(xs) = tr.points() else {
            out.notes.push("metastability needs stride 1; skipped".into());
            return Ok(());
        };
        let mu = meta_mu(m, f.problem.n)?;
        let g = c.build();
        for eps in &cfg.eps_grid {
            let (e, ef) = eps.parse()?;
            let idx = empirical_metastability(&tr.space, xs, ef, &g, xs.len() - 1)?;
            let bound = mu.eval(&e, &g)?;
            out.reports.push(ThresholdReport::new(format!("metastability f={} vs mu", g.label()), eps.label(), idx, bound, xs.len() - 1));
        }
    }
    Ok(())
}

fn write_streams(cfg: &RunConfig, dir: &Path, streams: &[&Trajectory], out: &mut RunOutcome) -> CliResult<()> {
    let mut jsonl = create(&dir.join(&cfg.outputs.jsonl))?;
    for (i, tr) in streams.iter().enumerate() {
        let name = if i == 0 { cfg.outputs.csv.clone() } else { with_suffix(&cfg.outputs.csv, &tr.stream) };
        let path = dir.join(&name);
        let mut w = create(&path)?;
        tr.write_csv(&mut w)?;
        w.flush()?;
        out.files.push(path);
        tr.write_jsonl(&mut jsonl)?;
    }
    jsonl.flush()?;
    out.files.push(dir.join(&cfg.outputs.jsonl));
    Ok(())
}

/// Runs `cfg`, writing exports and the report into `dir`. Unsound reports
/// turn into [`CliError::Verify`] after everything has been written.
pub fn cmd_run(cfg: &RunConfig, dir: &Path) -> CliResult<RunOutcome> {
    cfg.validate()?;
    std::fs::create_dir_all(dir)?;
    let schedule = cfg.schedule()?;
    let mut out = RunOutcome {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        rows: 0,
        reports: Vec::new(),
        notes: Vec::new(),
        all_sound: true,
        files: Vec::new(),
    };
    let opts = RunOptions { stride: cfg.stride, residuals: true };
    match cfg.scheme {
        Scheme::Gfb | Scheme::Gdr => {
            let sf = split_fixture(&cfg.fixture)?;
            if !cfg.eps_grid.is_empty() {
                out.notes.push("no rate pairing for splitting runs; eps_grid ignored".into());
            }
            if cfg.scheme == Scheme::Gfb {
                let tr = run_gfb(&sf.problem, &schedule, cfg.steps)?;
                out.rows = tr.len();
                write_streams(cfg, dir, &[&tr], &mut out)?;
            } else {
                let r = run_gdr(&sf.problem, &schedule, cfg.steps)?;
                out.rows = r.x.len();
                write_streams(cfg, dir, &[&r.x, &r.y, &r.z], &mut out)?;
            }
        }
        scheme => {
            let f = fixture(&cfg.fixture)?;
            let p = &f.problem;
            let tr = match scheme {
                Scheme::Hm => {
                    let tr = run_hm_with(p, &schedule, cfg.steps, &opts)?;
                    if !cfg.eps_grid.is_empty() || cfg.counter.is_some() {
                        hm_reports(cfg, &f, &schedule, &tr, &mut out)?;
                    }
                    tr
                }
                Scheme::HmErrors => {
                    let spec = cfg.errors.as_ref().expect("validated");
                    let deltas = spec.build();
                    let tr = run_hm_errors(p, &schedule, &deltas, &Perturbation::Fixed, cfg.steps)?;
                    if !cfg.eps_grid.is_empty() {
                        error_reports(cfg, spec, &schedule, &tr, &f, &mut out)?;
                    }
                    tr
                }
                Scheme::Halpern => {
                    let tr = run_halpern(&p.space, &p.t, &p.anchor, &p.x0, &schedule.alpha, cfg.steps)?;
                    if let (Some(m), false) = (&schedule.moduli, cfg.eps_grid.is_empty()) {
                        let h = halpern_rates(&m.gamma1, &m.gamma2, &m.gamma3, p.n, HalpernSigma::default())?;
                        let steps = step_column(&tr);
                        let dt = tr.residual(Residual::T).unwrap_or_default();
                        for eps in &cfg.eps_grid {
                            for check in cfg.checks() {
                                out.reports.push(if check == "ar" {
                                    threshold_report("d(y_{n+1},y_n) vs halpern ar", eps, &steps, &h.ar)?
                                } else {
                                    threshold_report("d(T y_n,y_n) vs halpern t_res", eps, dt, &h.t_res)?
                                });
                            }
                        }
                    }
                    tr
                }
                Scheme::Km => run_km(&p.space, &p.u, &p.x0, &schedule.beta, cfg.steps)?,
                Scheme::Tkm => {
                    let g = cfg.gamma.as_ref().expect("validated").build();
                    run_tkm(&p.space, &p.u, &p.x0, &schedule.beta, &g, cfg.steps)?
                }
                Scheme::Gfb | Scheme::Gdr => unreachable!(),
            };
            if matches!(scheme, Scheme::Km | Scheme::Tkm) && !cfg.eps_grid.is_empty() {
                out.notes.push("no rate pairing for this scheme; eps_grid ignored".into());
            }
            out.rows = tr.len();
            write_streams(cfg, dir, &[&tr], &mut out)?;
        }
    }
    out.all_sound = out.reports.iter().all(|r| r.sound);
    let report_path = dir.join(&cfg.outputs.report);
    let mut w = create(&report_path)?;
    serde_json::to_writer_pretty(&mut w, &out)?;
    writeln!(w)?;
    w.flush()?;
    out.files.push(report_path);
    if !out.all_sound {
        let bad: Vec<String> = out.reports.iter().filter(|r| !r.sound).map(|r| r.line()).collect();
        return Err(CliError::Verify(bad.join("; ")));
    }
    Ok(out)
}

/// `ν̂` against `d(x′_n, x_n)`; available for `δ_n = 2⁻ⁿ`, whose tail has
/// the Cauchy rate `ε ↦ ⌈log₂(1/ε)⌉`.
fn error_reports(
    cfg: &RunConfig,
    spec: &SequenceSpec,
    schedule: &Schedule,
    perturbed: &Trajectory,
    f: &Fixture,
    out: &mut RunOutcome,
) -> CliResult<()> {
    let (SequenceSpec::Geometric { scale, ratio }, Some(m)) = (spec, &schedule.moduli) else {
        out.notes.push("error-rate reports need errors 2^-n and harmonic moduli; skipped".into());
        return Ok(());
    };
    if *scale != 1.0 || *ratio != 0.5 {
        out.notes.push("error-rate reports need errors 2^-n; skipped".into());
        return Ok(());
    }
    let exact = run_hm(&f.problem, schedule, cfg.steps)?;
    let (a, b) = (exact.points()?, perturbed.points()?);
    let gap = a.iter().zip(b).map(|(x, y)| f.problem.space.dist(x, y)).collect::<Result<Vec<_>, _>>()?;
    let deltas = spec.build();
    let alpha = schedule.alpha.clone();
    let nu = error_rates(&m.gamma2, Some(&RateFn::ceil_log2_recip()), None, &|n| deltas.eval(n), &|n| alpha.eval(n))?;
    for eps in &cfg.eps_grid {
        out.reports.push(threshold_report("d(x'_n,x_n) vs nu_hat", eps, &gap, &nu.nu)?);
    }
    Ok(())
}
