//! Acceptance suite: one PASS/FAIL line per criterion, each with its runtime
//! limit. Exits non-zero when any criterion fails.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resolab_core::disk::{
    counterexample_search, fibre_resolvent_gap, hardy_constant_disk, identification_gap, lambda1, limit_lambda1,
    FibreBoundary, RadialGrid,
};
use resolab_core::halfline::seba_convergence_study;
use resolab_core::resonance::{check_hypothesis, halfline_bound_states, shoot};
use resolab_core::{BoundaryCurve64, FibreSpec64, Operator64, Potential64, Tolerances};

const TOL: Tolerances = Tolerances::DEFAULT;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn box_coupling(n: usize) -> f64 {
    let k = (n as f64 + 0.5) * PI;
    k * k
}

fn neg_box(alpha: f64) -> Potential64 {
    Potential64::piecewise_constant(vec![0.0, 1.0], vec![-1.0], alpha).unwrap()
}

fn preset(name: &str) -> Potential64 {
    Potential64::preset(name, 1.0).unwrap()
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn resonant_couplings_via_cli() -> Outcome {
    let file = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/potentials/neg-box.json");
    let out = Command::new(env!("CARGO_BIN_EXE_resolab"))
        .args(["resonance", "scan", "--potential", file.to_str().unwrap(), "--alpha-max", "100"])
        .env_remove("RESOLAB_OUT_DIR")
        .output()
        .map_err(err)?;
    ensure(out.status.success(), || format!("exit status {}", out.status))?;
    let got: Vec<f64> = serde_json::from_slice(&out.stdout).map_err(err)?;
    ensure(got.len() == 3, || format!("{} couplings: {got:?}", got.len()))?;
    let worst = got.iter().enumerate().map(|(n, a)| (a - box_coupling(n)).abs() / box_coupling(n)).fold(0.0, f64::max);
    ensure(worst <= 1e-8, || format!("max relative error {worst:.2e}"))?;
    Ok(format!("{got:?}, max relative error {worst:.1e}"))
}

fn bound_states_match_nodes() -> Outcome {
    let mut counts = Vec::new();
    for n in 0..4 {
        let v = neg_box(box_coupling(n));
        let nodes = shoot(&v, 0.0, &TOL).map_err(err)?.nodes;
        let states = halfline_bound_states(&v, 10, &TOL).map_err(err)?.len();
        ensure(nodes == n && states == n, || format!("n = {n}: nodes {nodes}, bound states {states}"))?;
        counts.push(states);
    }
    Ok(format!("bound-state counts {counts:?}"))
}

fn seba_dichotomy() -> Outcome {
    let eps = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
    let mut summary = Vec::new();
    for (name, limit) in [("alpha1-box", PI * PI / 4.0), ("pos-box", PI * PI)] {
        let report = seba_convergence_study(&preset(name), &eps, 1.0, 1, &TOL).map_err(err)?;
        let errors = report.column("abs_error_1").ok_or("missing column")?;
        let last = report.column("eigenvalue_1").ok_or("missing column")?[4];
        let rel = (last - limit).abs() / limit;
        ensure(strictly_decreasing(&errors), || format!("{name}: errors not decreasing {errors:?}"))?;
        ensure(rel <= 0.02, || format!("{name}: relative error {rel:.3e} at eps = 1e-3"))?;
        summary.push(format!("{name} {:.2}%", 100.0 * rel));
    }
    Ok(summary.join(", "))
}

fn disk_limit_fibres() -> Outcome {
    let cases = [
        ("j01^2", limit_lambda1::<f64>(0, FibreBoundary::Dirichlet, &TOL), oracles::bessel_zero(0).powi(2)),
        ("j11^2", limit_lambda1::<f64>(1, FibreBoundary::Dirichlet, &TOL), oracles::bessel_zero(1).powi(2)),
        ("robin(1/2)", limit_lambda1::<f64>(0, FibreBoundary::Robin(0.5), &TOL), oracles::robin_disk_eigenvalue(0.5)),
    ];
    let mut summary = Vec::new();
    for (name, got, want) in cases {
        let got = got.map_err(err)?;
        let rel = (got - want).abs() / want;
        ensure(rel <= 1e-5, || format!("{name}: {got} vs {want} ({rel:.2e})"))?;
        summary.push(format!("{name} {rel:.1e}"));
    }
    Ok(summary.join(", "))
}

fn angular_positivity() -> Outcome {
    let mut worst = f64::INFINITY;
    for name in ["alpha1-box", "alpha2-box"] {
        let v = preset(name);
        let root = v.sup_norm().sqrt();
        for m in 1..=8i64 {
            let l = lambda1(&v, m, 1.01 * root / m as f64, &TOL).map_err(err)?;
            ensure(l >= -1e-4, || format!("{name}, m = {m}: lambda1 = {l}"))?;
            worst = worst.min(l);
        }
    }
    Ok(format!("min lambda1 {worst:.4}"))
}

fn divergence() -> Outcome {
    let v = preset("alpha2-box");
    let hyp = check_hypothesis(&v, &TOL).map_err(err)?;
    ensure(hyp.satisfied(), || "hypothesis not satisfied".into())?;
    let mu = hyp.mu.unwrap();
    let eps = [0.04, 0.02, 0.01];
    let values = eps.iter().map(|e| lambda1(&v, 1, *e, &TOL)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let scaled: Vec<f64> = values.iter().zip(&eps).map(|(l, e)| l * e * e).collect();
    ensure(scaled.iter().all(|x| *x < 0.0), || format!("not negative: {scaled:?}"))?;
    ensure(strictly_decreasing(&scaled), || format!("not decreasing: {scaled:?}"))?;
    ensure(scaled.iter().all(|x| *x > mu), || format!("passes mu = {mu}: {scaled:?}"))?;
    let bound = 0.7 * mu / (eps[2] * eps[2]);
    ensure(values[2] <= bound, || format!("lambda1(0.01) = {} > {bound}", values[2]))?;
    Ok(format!("lambda1 eps^2 = {scaled:.5?}, mu = {mu:.5}"))
}

fn counterexample() -> Outcome {
    let v = preset("alpha2-box");
    let record = counterexample_search(&v, -10.0, 3, &TOL).map_err(err)?;
    let p = &record.pairs;
    ensure(p.len() == 3, || format!("{} pairs", p.len()))?;
    ensure(p.windows(2).all(|w| w[1].m > w[0].m), || "m not increasing".into())?;
    ensure(p.windows(2).all(|w| w[1].eps < w[0].eps), || "eps not decreasing".into())?;
    let root = v.sup_norm().sqrt();
    for q in p {
        ensure(q.residual <= 1e-5, || format!("m = {}: residual {:.2e}", q.m, q.residual))?;
        ensure(q.eps < root / q.m as f64, || format!("m = {}: eps {} above threshold", q.m, q.eps))?;
    }
    let listed: Vec<String> = p.iter().map(|q| format!("({}, {:.4}, {:.1e})", q.m, q.eps, q.residual)).collect();
    Ok(format!("(m, eps, residual) = {}", listed.join(" ")))
}

fn fibre_trends() -> Outcome {
    let eps = [0.08, 0.04, 0.02, 0.01];
    let mut summary = Vec::new();
    for (name, limit) in [("alpha1-box", FibreBoundary::Robin(0.5)), ("weak-box", FibreBoundary::Dirichlet)] {
        let v = preset(name);
        for m in [0i64, 1] {
            let mut gaps = Vec::new();
            for e in eps {
                let spec = FibreSpec64::resolved(m, e, &TOL).map_err(err)?;
                let probe = spec.grid().sample(|r| 1.0 - r * r);
                gaps.push(fibre_resolvent_gap(&v, &spec, &probe, limit).map_err(err)?);
            }
            ensure(strictly_decreasing(&gaps), || format!("{name}, m = {m}: {gaps:?}"))?;
            summary.push(format!("{name}/m={m} {:.1e}->{:.1e}", gaps[0], gaps[3]));
        }
    }
    Ok(summary.join(", "))
}

fn identification() -> Outcome {
    let v = preset("alpha1-box");
    let grid = RadialGrid::<f64>::new(4000);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let k = rng.random_range(1.0..10.0);
        let u = grid.sample(|r| c[0] + c[1] * r + c[2] * r * r + c[3] * (k * r).sin());
        for eps in [0.1, 0.01] {
            let (lhs, rhs) = identification_gap(&u, &grid, &v, eps, &TOL).map_err(err)?;
            ensure(lhs <= rhs * (1.0 + 1e-6), || format!("eps = {eps}: {lhs} > {rhs}"))?;
            worst = worst.max(lhs / rhs);
        }
    }
    let one = vec![1.0; grid.cells()];
    let coarse = identification_gap(&one, &grid, &v, 0.1, &TOL).map_err(err)?.0;
    let fine = identification_gap(&one, &grid, &v, 0.01, &TOL).map_err(err)?.0;
    ensure(fine < coarse, || format!("lhs(0.01) = {fine} >= lhs(0.1) = {coarse}"))?;
    Ok(format!("max lhs/rhs {worst:.3}, lhs(1) {coarse:.3e} -> {fine:.3e}"))
}

fn hardy() -> Outcome {
    let h8 = hardy_constant_disk::<f64>(8000, &TOL).map_err(err)?;
    let h16 = hardy_constant_disk::<f64>(16000, &TOL).map_err(err)?;
    ensure((0.25..=0.40).contains(&h8), || format!("C(8000) = {h8}"))?;
    ensure(h16 <= h8 + 1e-4, || format!("C(16000) = {h16} > C(8000) = {h8}"))?;
    Ok(format!("C(8000) = {h8:.5}, C(16000) = {h16:.5}"))
}

fn linear_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut eig_err, mut solve_err) = (0.0f64, 0.0f64);
    for _ in 0..300 {
        let n = rng.random_range(1..=8);
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let e: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-5.0..5.0)).collect();
        let op = Operator64::new(d.clone(), e.clone()).map_err(err)?;
        let dense = oracles::dense_tridiagonal(&d, &e);
        let want = oracles::charpoly_eigenvalues(&dense);
        let got = op.lowest_eigenvalues(n, &TOL).map_err(err)?;
        ensure(want.len() == n, || "oracle missed an eigenvalue".into())?;
        for (g, w) in got.iter().zip(&want) {
            eig_err = eig_err.max((g - w).abs() / (1.0 + w.abs()));
        }
        let z = Complex64::new(rng.random_range(-10.0..10.0), rng.random_range(0.5..3.0));
        let rhs: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let shifted = dense
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter().enumerate().map(|(j, x)| Complex64::new(*x, 0.0) - if i == j { z } else { 0.0.into() }).collect()
            })
            .collect();
        let want = oracles::dense_complex_solve(shifted, rhs.clone());
        let got = op.solve_shifted(z, &rhs).map_err(err)?;
        let scale = want.iter().map(|x| x.norm()).fold(1.0, f64::max);
        for (g, w) in got.iter().zip(&want) {
            solve_err = solve_err.max((g - w).norm() / scale);
        }
    }
    ensure(eig_err <= 1e-9, || format!("eigenvalue error {eig_err:.2e}"))?;
    ensure(solve_err <= 1e-10, || format!("shifted-solve error {solve_err:.2e}"))?;
    Ok(format!("300 cases, eigenvalue error {eig_err:.1e}, solve error {solve_err:.1e}"))
}

fn geometry() -> Outcome {
    let circle = BoundaryCurve64::circle(2.0).map_err(err)?;
    for t in circle.nodes(32) {
        let k = circle.curvature(t).map_err(err)?;
        ensure((k - 0.5).abs() <= 1e-6, || format!("circle kappa {k}"))?;
    }
    let (a, b) = (2.0, 1.0);
    let ellipse = BoundaryCurve64::ellipse(a, b).map_err(err)?;
    for t in ellipse.nodes(64) {
        let want = a * b / (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).powf(1.5);
        let k = ellipse.curvature(t).map_err(err)?;
        ensure((k - want).abs() <= 1e-5 * want, || format!("ellipse kappa {k} vs {want}"))?;
    }
    let turning = ellipse.total_turning().map_err(err)?;
    ensure((turning - 2.0 * PI).abs() <= 1e-6, || format!("total turning {turning}"))?;
    let (rho, _) = BoundaryCurve64::circle(1.0).map_err(err)?.rho_and_max_width(0.5).map_err(err)?;
    ensure(rho == 0.5, || format!("rho = {rho}"))?;
    Ok(format!("total turning - 2 pi = {:.1e}, rho = {rho}", turning - 2.0 * PI))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 12] = [
        ("resonant couplings", 5, resonant_couplings_via_cli),
        ("bound states vs nodes", 30, bound_states_match_nodes),
        ("half-line dichotomy", 120, seba_dichotomy),
        ("disk limit fibres", 60, disk_limit_fibres),
        ("angular positivity", 60, angular_positivity),
        ("eigenvalue divergence", 120, divergence),
        ("counterexample", 300, counterexample),
        ("fibre resolvent trends", 180, fibre_trends),
        ("identification bound", 30, identification),
        ("hardy constant", 60, hardy),
        ("linear-algebra oracles", 10, linear_algebra),
        ("geometry", 10, geometry),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("{detail}; exceeded the {limit} s limit"))
            }
            other => other,
        };
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2}: {status} {name}: {detail} ({:.2} s)", i + 1, elapsed.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
