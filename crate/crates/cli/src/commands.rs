use std::path::Path;

use rayon::prelude::*;
use resolab_core::disk::{self, FibreBoundary, RadialGrid};
use resolab_core::geometry::{BoundaryCurve, CurveSpec};
use resolab_core::report::ConvergenceReport;
use resolab_core::{halfline, resonance, Error, Potential64, PotentialSpec, Tolerances};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::{Command, DiskCmd, GeometryCmd, HalflineCmd, LimitArg, PotentialCmd, ProbeArg, ResonanceCmd};
use crate::output::Output;

pub type CmdResult = Result<Output, Error>;

/// A loaded potential with its canonical description.
pub struct Loaded {
    pub potential: Potential64,
    pub spec: PotentialSpec,
    pub sha256: String,
}

impl Loaded {
    fn meta(&self) -> Value {
        json!({ "spec": self.spec, "sha256": self.sha256 })
    }
}

/// Reads a potential file, or builds a preset when `arg` names one (a
/// trailing `.json` is ignored for preset lookup).
pub fn load_potential(arg: &str) -> Result<Loaded, Error> {
    let spec = if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("cannot read {arg}: {e}")))?;
        serde_json::from_str::<PotentialSpec>(&text).map_err(|e| Error::Parse(format!("{arg}: {e}")))?
    } else {
        let name = Path::new(arg).file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
        if !resolab_core::potential::PRESETS.contains(&name) {
            return Err(Error::Parse(format!("{arg} is neither a readable file nor a preset name")));
        }
        PotentialSpec::Preset { name: name.into(), alpha: 1.0 }
    };
    let potential = Potential64::from_spec(&spec)?;
    let canonical = serde_json::to_string(&spec).expect("spec serializes");
    let sha256 = hex::encode(Sha256::digest(canonical.as_bytes()));
    Ok(Loaded { potential, spec, sha256 })
}

/// Reads a curve file, or parses `circle:R` / `ellipse:A:B`.
pub fn load_curve(arg: &str) -> Result<(BoundaryCurve<f64>, CurveSpec), Error> {
    let spec = if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("cannot read {arg}: {e}")))?;
        serde_json::from_str::<CurveSpec>(&text).map_err(|e| Error::Parse(format!("{arg}: {e}")))?
    } else {
        let parts: Vec<&str> = arg.split(':').collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}' in {arg}")));
        match parts.as_slice() {
            ["circle", r] => CurveSpec::Circle { radius: num(r)? },
            ["ellipse", a, b] => CurveSpec::Ellipse { a: num(a)?, b: num(b)? },
            _ => return Err(Error::Parse(format!("{arg} is neither a curve file nor circle:R / ellipse:A:B"))),
        }
    };
    Ok((BoundaryCurve::from_spec(&spec)?, spec))
}

fn check_eps(eps: &[f64]) -> Result<(), Error> {
    if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::Domain("eps values must be finite and positive".into()));
    }
    if eps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Domain("eps list must be strictly descending".into()));
    }
    Ok(())
}

fn probe_fn(p: ProbeArg) -> fn(f64) -> f64 {
    match p {
        ProbeArg::One => |_| 1.0,
        ProbeArg::OneMinusR2 => |r| 1.0 - r * r,
    }
}

fn probe_name(p: ProbeArg) -> &'static str {
    match p {
        ProbeArg::One => "1",
        ProbeArg::OneMinusR2 => "1 - r^2",
    }
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Every input is parsed and validated here, before any solve starts.
pub fn run(command: &Command, tol: &Tolerances) -> CmdResult {
    match command {
        Command::Resonance(cmd) => resonance_cmd(cmd, tol),
        Command::Potential(PotentialCmd::Classify { potential, c_omega }) => {
            let p = load_potential(&potential.potential)?;
            let v = &p.potential;
            let theorem2 = v.classify_theorem2(*c_omega)?;
            let shot = resonance::shoot(v, 0.0, tol)?;
            let payload = json!({
                "support_bound": v.support_bound(),
                "sup_norm": v.sup_norm(),
                "hardy_ratio": v.hardy_ratio(),
                "theorem2": theorem2,
                "nonpositive": v.is_nonpositive(),
                "nonnegative": v.is_nonnegative(),
                "resonant": shot.derivative_residual() <= tol.resonance,
                "derivative_residual": shot.derivative_residual(),
            });
            Ok(Output::new("potential-classify", payload).meta("potential", p.meta()))
        }
        Command::Halfline(HalflineCmd::Seba { potential, eps, length, k }) => {
            let p = load_potential(&potential.potential)?;
            check_eps(eps)?;
            for e in eps {
                halfline::HalflineModel::resolved(p.potential.clone(), *e, *length, tol)?;
            }
            halfline::limit_spectrum(halfline::LimitKind::DirichletAtZero, *length, *k)?;
            let report = halfline::seba_convergence_study(&p.potential, eps, *length, *k, tol)?;
            let ys: Vec<String> = (1..=*k).map(|j| format!("abs_error_{j}")).collect();
            let ys: Vec<&str> = ys.iter().map(String::as_str).collect();
            let dat = report.to_dat("epsilon", &ys)?;
            Ok(Output::new("halfline-seba", serde_json::to_value(&report).expect("report serializes"))
                .with_plot("halfline-seba.dat".into(), dat)
                .with_report(report)
                .meta("potential", p.meta()))
        }
        Command::Geometry(GeometryCmd::Curve { curve, samples, delta }) => {
            let (c, spec) = load_curve(curve)?;
            if *samples == 0 {
                return Err(Error::Domain("samples must be positive".into()));
            }
            let (rho, delta_max) = c.rho_and_max_width(*delta)?;
            let mut report = ConvergenceReport::new("geometry-curve", columns(&["theta", "kappa", "robin_coefficient"]));
            let mut kmin = f64::INFINITY;
            let mut kmax = f64::NEG_INFINITY;
            for s in c.nodes(*samples) {
                let k = c.curvature(s)?;
                kmin = kmin.min(k);
                kmax = kmax.max(k);
                report.push_row(vec![s, k, c.robin_coefficient(s)?])?;
            }
            report.set_meta("rho", rho);
            report.set_meta("delta", *delta);
            report.set_meta("delta_max", delta_max);
            let payload = json!({
                "rho": rho,
                "delta": delta,
                "delta_max": delta_max,
                "total_turning": c.total_turning()?,
                "length": c.length(),
                "kappa_min": kmin,
                "kappa_max": kmax,
            });
            let dat = report.to_dat("theta", &["kappa", "robin_coefficient"])?;
            Ok(Output::new("geometry-curve", payload)
                .with_plot("geometry-curve.dat".into(), dat)
                .with_report(report)
                .meta("curve", serde_json::to_value(spec).expect("curve serializes")))
        }
        Command::Disk(cmd) => disk_cmd(cmd, tol),
    }
}

fn resonance_cmd(cmd: &ResonanceCmd, tol: &Tolerances) -> CmdResult {
    match cmd {
        ResonanceCmd::Scan { potential, alpha_max } => {
            let p = load_potential(&potential.potential)?;
            let couplings = resonance::resonant_couplings(&p.potential, *alpha_max, tol)?;
            let mut report = ConvergenceReport::new("resonance-scan", columns(&["n", "alpha", "derivative_residual"]));
            for (n, alpha) in couplings.iter().enumerate() {
                let shot = resonance::shoot(&p.potential.scaled(*alpha), 0.0, tol)?;
                report.push_row(vec![n as f64, *alpha, shot.derivative_residual()])?;
            }
            report.set_meta("alpha_max", *alpha_max);
            Ok(Output::new("resonance-scan", json!(couplings))
                .with_report(report)
                .meta("potential", p.meta())
                .meta("alpha_max", json!(alpha_max)))
        }
        ResonanceCmd::Check { potential } => {
            let p = load_potential(&potential.potential)?;
            let shot = resonance::shoot(&p.potential, 0.0, tol)?;
            let states = resonance::halfline_bound_states(&p.potential, usize::MAX, tol)?;
            let resonant = shot.derivative_residual() <= tol.resonance;
            let energies: Vec<f64> = states.iter().map(|s| s.energy).collect();
            let payload = json!({
                "value_at_a": shot.value_at_a,
                "derivative_at_a": shot.derivative_at_a,
                "log_scale": shot.log_scale,
                "nodes": shot.nodes,
                "steps": shot.steps,
                "resonant": resonant,
                "derivative_residual": shot.derivative_residual(),
                "negative_count": states.len(),
                "mu": energies.first(),
                "bound_states": energies,
                "truncation_length": states.first().map(|s| s.length),
                "hypothesis_satisfied": resonant && !states.is_empty(),
            });
            Ok(Output::new("resonance-check", payload).meta("potential", p.meta()))
        }
        ResonanceCmd::Solution { potential, samples } => {
            let p = load_potential(&potential.potential)?;
            if *samples == 0 {
                return Err(Error::Domain("samples must be positive".into()));
            }
            let sol = resonance::canonical_solution(&p.potential, tol)?;
            let a = sol.support_bound();
            let mut report = ConvergenceReport::new("resonance-solution", columns(&["t", "psi0", "dpsi0"]));
            for j in 0..=*samples {
                let t = a * j as f64 / *samples as f64;
                let (v, d) = sol.value_and_derivative(t);
                report.push_row(vec![t, v, d])?;
            }
            let mode = serde_json::to_value(sol.mode).expect("mode serializes");
            report.set_meta("tail_mode", mode.clone());
            let payload = json!({
                "tail_mode": mode,
                "sup_psi0": sol.sup_psi,
                "sup_dpsi0": sol.sup_dpsi,
                "sup_psi0_minus_one": sol.sup_psi_minus_one,
                "psi0_at_a": sol.psi[sol.psi.len() - 1],
                "dpsi0_at_a": sol.dpsi[sol.dpsi.len() - 1],
            });
            let dat = report.to_dat("t", &["psi0", "dpsi0"])?;
            Ok(Output::new("resonance-solution", payload)
                .with_plot("resonance-solution.dat".into(), dat)
                .with_report(report)
                .meta("potential", p.meta()))
        }
    }
}

fn disk_cmd(cmd: &DiskCmd, tol: &Tolerances) -> CmdResult {
    match cmd {
        DiskCmd::Lambda1Map { potential, m, eps } => {
            let p = load_potential(&potential.potential)?;
            check_eps(eps)?;
            let map = disk::lambda1_map(&p.potential, m, eps, tol)?;
            let mut names = vec!["m".to_string()];
            names.extend(eps.iter().map(|e| format!("eps={e}")));
            names.push("max_jump".into());
            let mut report = ConvergenceReport::new("disk-lambda1-map", names);
            for (i, row) in map.values.iter().enumerate() {
                let mut r = vec![map.m[i] as f64];
                r.extend(row);
                r.push(map.max_jump[i]);
                report.push_row(r)?;
            }
            let cells: Vec<usize> = eps.iter().map(|e| disk::required_cells(*e, tol)).collect();
            report.set_meta("base_cells", &cells);
            let mut dat = String::from("# m epsilon lambda1\n");
            for (i, row) in map.values.iter().enumerate() {
                for (e, l) in eps.iter().zip(row) {
                    dat.push_str(&format!("{} {} {}\n", map.m[i], fmt(*e), fmt(*l)));
                }
                dat.push('\n');
            }
            Ok(Output::new("disk-lambda1-map", serde_json::to_value(&map).expect("map serializes"))
                .with_plot("disk-lambda1-map.dat".into(), dat)
                .with_report(report)
                .meta("potential", p.meta()))
        }
        DiskCmd::Counterexample { potential, beta, k } => {
            let p = load_potential(&potential.potential)?;
            let record = disk::counterexample_search(&p.potential, *beta, *k, tol)?;
            let mut report =
                ConvergenceReport::new("disk-counterexample", columns(&["m", "epsilon", "lambda1", "residual", "cells"]));
            for pair in &record.pairs {
                report.push_row(vec![pair.m as f64, pair.eps, pair.lambda1, pair.residual, pair.cells as f64])?;
            }
            report.set_meta("beta", *beta);
            Ok(Output::new("disk-counterexample", serde_json::to_value(&record).expect("record serializes"))
                .with_report(report)
                .meta("potential", p.meta()))
        }
        DiskCmd::Converge { potential, m, eps, limit, gamma, probe } => {
            let p = load_potential(&potential.potential)?;
            check_eps(eps)?;
            let specs = eps
                .iter()
                .map(|e| disk::FibreSpec::resolved(*m, *e, tol))
                .collect::<Result<Vec<_>, _>>()?;
            let boundary = match limit {
                LimitArg::Robin => FibreBoundary::Robin(*gamma),
                LimitArg::Dirichlet => FibreBoundary::Dirichlet,
                LimitArg::Auto => {
                    if resonance::is_resonant(&p.potential, tol)? {
                        FibreBoundary::Robin(*gamma)
                    } else {
                        FibreBoundary::Dirichlet
                    }
                }
            };
            let f = probe_fn(*probe);
            let gaps = specs
                .par_iter()
                .map(|spec| disk::fibre_resolvent_gap(&p.potential, spec, &spec.grid().sample(f), boundary))
                .collect::<Result<Vec<f64>, _>>()?;
            let mut report = ConvergenceReport::new("disk-converge", columns(&["epsilon", "cells", "resolvent_gap"]));
            for (spec, gap) in specs.iter().zip(&gaps) {
                report.push_row(vec![spec.eps(), spec.cells() as f64, *gap])?;
            }
            let limit_value = serde_json::to_value(boundary).expect("boundary serializes");
            report.set_meta("limit", limit_value.clone());
            report.set_meta("m", *m);
            report.set_meta("probe", probe_name(*probe));
            let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
            let dat = report.to_dat("epsilon", &["resolvent_gap"])?;
            Ok(Output::new("disk-converge", json!({ "limit": limit_value, "gaps": gaps, "strictly_decreasing": decreasing }))
                .with_plot("disk-converge.dat".into(), dat)
                .with_report(report)
                .meta("potential", p.meta()))
        }
        DiskCmd::Hardy { n } => {
            let value = disk::hardy_constant_disk::<f64>(*n, tol)?;
            let refined = disk::hardy_constant_disk::<f64>(2 * n, tol)?;
            let mut report = ConvergenceReport::new("disk-hardy", columns(&["cells", "hardy_quotient"]));
            report.push_row(vec![*n as f64, value])?;
            report.push_row(vec![(2 * n) as f64, refined])?;
            let payload = json!({
                "cells": n,
                "value": value,
                "refined_cells": 2 * n,
                "refined_value": refined,
                "in_bracket": (0.25..=0.40).contains(&value),
                "non_increasing": refined <= value + 1e-4,
                "note": "discrete quotients decrease toward 1/4 under refinement; the infimum is not attained",
            });
            Ok(Output::new("disk-hardy", payload).with_report(report))
        }
        DiskCmd::Identify { potential, eps, probe, n } => {
            let p = load_potential(&potential.potential)?;
            check_eps(eps)?;
            if *n == 0 {
                return Err(Error::Domain("n must be positive".into()));
            }
            let grid = RadialGrid::<f64>::new(*n);
            let u = grid.sample(probe_fn(*probe));
            let mut report = ConvergenceReport::new("disk-identify", columns(&["epsilon", "lhs", "rhs"]));
            let mut holds = true;
            for e in eps {
                let (lhs, rhs) = disk::identification_gap(&u, &grid, &p.potential, *e, tol)?;
                holds &= lhs <= rhs * (1.0 + 1e-6);
                report.push_row(vec![*e, lhs, rhs])?;
            }
            report.set_meta("probe", probe_name(*probe));
            report.set_meta("cells", *n);
            let dat = report.to_dat("epsilon", &["lhs", "rhs"])?;
            Ok(Output::new("disk-identify", json!({ "rows": report.rows, "inequality_holds": holds }))
                .with_plot("disk-identify.dat".into(), dat)
                .with_report(report)
                .meta("potential", p.meta()))
        }
    }
}

fn fmt(x: f64) -> String {
    resolab_core::report::format_number(x)
}
