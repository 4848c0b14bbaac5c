use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use grover_lab::algorithm::{QueryAlgorithm, QueryLayout, MAX_COMPOSITE_DIM};
use grover_lab::discrimination::{self, MeasurementScheme};
use grover_lab::grover::{self, OracleSpec};
use grover_lab::{analytic, bounds, parallel, verify};

use crate::config::{Settings, Unitaries};
use crate::output::{float, opt_float, Table};
use crate::svg::{Chart, Series};
use crate::{CliError, Status};

/// Largest `n` for `bounds`: it simulates `n` marked runs of dimension `n`.
pub const BOUNDS_CAP: usize = 1 << 14;
/// Haar sampling costs `dim³` per round; keep random runs small.
pub const RANDOM_DIM_CAP: usize = 512;
/// `n · dim` budget per round for tensor-Grover bound runs.
pub const TENSOR_WORK_CAP: usize = 1 << 24;

const DEFAULT_TOLERANCE: f64 = 1e-9;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Sizes `n, 2n, 4n, …` up to `n_max`.
fn n_range(s: &Settings, default_n: usize, default_max: Option<usize>) -> Result<Vec<usize>, CliError> {
    let n0 = s.n.unwrap_or(default_n);
    let n1 = match (s.n, s.n_max) {
        (_, Some(m)) => m,
        (Some(n), None) => n,
        (None, None) => default_max.unwrap_or(n0),
    };
    if n0 < 2 {
        return Err(usage(format!("--n must be at least 2, got {n0}")));
    }
    if n1 < n0 {
        return Err(usage(format!("empty n-range: {n0}..={n1}")));
    }
    let mut out = Vec::new();
    let mut n = n0;
    while n <= n1 {
        out.push(n);
        n = match n.checked_mul(2) {
            Some(v) => v,
            None => break,
        };
    }
    Ok(out)
}

/// Inclusive `t` range; a lone `--t` selects a single value.
fn t_range(s: &Settings, default: (usize, usize)) -> Result<(usize, usize), CliError> {
    let t0 = s.t.unwrap_or(default.0);
    let t1 = match (s.t, s.t_max) {
        (_, Some(m)) => m,
        (Some(t), None) => t,
        (None, None) => default.1,
    };
    if t0 > t1 {
        return Err(usage(format!("empty t-range: {t0}..={t1}")));
    }
    Ok((t0, t1))
}

fn write_plot(s: &Settings, chart: impl FnOnce() -> Chart) -> anyhow::Result<()> {
    if let Some(path) = &s.plot {
        std::fs::write(path, chart().render())?;
    }
    Ok(())
}

fn reject_plot(s: &Settings, cmd: &str) -> Result<(), CliError> {
    if s.plot.is_some() {
        return Err(usage(format!("{cmd} does not produce a plot")));
    }
    Ok(())
}

pub fn simulate(s: &Settings) -> Result<Status, CliError> {
    let sizes = n_range(s, 4, None)?;
    let tol = s.tolerance.unwrap_or(1e-10);
    let mut table = Table::new(&["n", "t", "p_simulated", "p_analytic", "abs_error"]);
    let mut series = Vec::new();
    let mut markers = Vec::new();
    let mut worst: f64 = 0.0;
    for &n in &sizes {
        if n > MAX_COMPOSITE_DIM {
            return Err(usage(format!("n = {n} exceeds the simulation cap {MAX_COMPOSITE_DIM}")));
        }
        let (t0, t1) = t_range(s, (0, (2.0 * (n as f64).sqrt()).ceil() as usize))?;
        let model = analytic::rotation_angle(n)?;
        let oracle = OracleSpec::new(n, 0)?;
        let mut state = grover::init_uniform(n)?;
        let mut points = Vec::new();
        for t in 0..=t1 {
            if t >= t0 {
                let p = grover::success_probability(&state, &oracle)?;
                let q = model.success_after(t as f64);
                worst = worst.max((p - q).abs());
                table.push(vec![n.to_string(), t.to_string(), float(p), float(q), float((p - q).abs())]);
                points.push((t as f64, p));
            }
            if t < t1 {
                state = grover::grover_step(&state, &oracle)?;
            }
        }
        series.push(Series {
            label: format!("N={n}"),
            points,
            dashed: false,
        });
        markers.push((model.fractional_optimum(), format!("t* N={n}")));
    }
    table.emit(s.out.as_deref())?;
    write_plot(s, || Chart {
        title: "Success probability after t iterations".into(),
        x_label: "t (oracle calls)".into(),
        y_label: "p".into(),
        series,
        markers,
    })?;
    if worst > tol {
        return Ok(Status::Failed(format!("simulation and closed form differ by {worst:.3e} > {tol:.1e}")));
    }
    Ok(Status::Clean)
}

pub fn bounds(s: &Settings) -> Result<Status, CliError> {
    let sizes = n_range(s, 16, None)?;
    let tol = s.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let mut table = Table::new(&[
        "n",
        "t",
        "lhs_divergence",
        "rhs_improved",
        "rhs_crude",
        "ceiling_p",
        "p_grover",
        "saturation_gap",
    ]);
    let mut series = Vec::new();
    let mut violations = 0;
    for &n in &sizes {
        if n > BOUNDS_CAP {
            return Err(usage(format!("n = {n} exceeds the bounds cap {BOUNDS_CAP}")));
        }
        let (t0, t1) = t_range(s, (0, analytic::optimal_iterations(n)?.t_best))?;
        let reports = bounds::bound_series(&QueryAlgorithm::grover(n, t1)?)?;
        let mut lhs_pts = Vec::new();
        let mut rhs_pts = Vec::new();
        for r in &reports[t0..] {
            if r.violated(tol) {
                violations += 1;
            }
            table.push(vec![
                n.to_string(),
                r.t.to_string(),
                float(r.lhs_divergence),
                opt_float(r.rhs_improved),
                float(r.rhs_crude),
                float(r.ceiling_p),
                float(analytic::success_after(n, r.t)?),
                opt_float(r.saturation_gap),
            ]);
            lhs_pts.push((r.t as f64, r.lhs_divergence));
            if let Some(v) = r.rhs_improved {
                rhs_pts.push((r.t as f64, v));
            }
        }
        series.push(Series {
            label: format!("sum N={n}"),
            points: lhs_pts,
            dashed: false,
        });
        series.push(Series {
            label: format!("N f(4T²/N) N={n}"),
            points: rhs_pts,
            dashed: true,
        });
    }
    table.emit(s.out.as_deref())?;
    write_plot(s, || Chart {
        title: "Divergence sum against the improved bound".into(),
        x_label: "t (oracle calls)".into(),
        y_label: "Σ_y |φ^y_T − φ_T|²".into(),
        series,
        markers: Vec::new(),
    })?;
    if violations > 0 {
        return Ok(Status::Failed(format!("{violations} rows exceed the bound by more than {tol:.1e}")));
    }
    Ok(Status::Clean)
}

const PARALLEL_HEADER: [&str; 15] = [
    "kind",
    "n",
    "s",
    "t",
    "seed",
    "lhs_divergence",
    "rhs_improved",
    "rhs_crude",
    "ceiling_p",
    "violated",
    "per_engine_size",
    "t_per_engine",
    "success_prob",
    "total_queries",
    "speedup",
];

fn bound_row(r: &bounds::BoundReport, seed: Option<u64>, tol: f64) -> Vec<String> {
    let mut row = vec![
        "bound".to_string(),
        r.n.to_string(),
        r.s.to_string(),
        r.t.to_string(),
        seed.map(|v| v.to_string()).unwrap_or_default(),
        float(r.lhs_divergence),
        opt_float(r.rhs_improved),
        float(r.rhs_crude),
        float(r.ceiling_p),
        r.violated(tol).to_string(),
    ];
    row.resize(PARALLEL_HEADER.len(), String::new());
    row
}

pub fn parallel(s: &Settings) -> Result<Status, CliError> {
    reject_plot(s, "parallel")?;
    let sizes = n_range(s, 8, None)?;
    let registers = s.s.clone().unwrap_or_else(|| vec![2]);
    let (t0, t1) = t_range(s, (1, 4))?;
    let seeds = s.seeds.clone().unwrap_or_else(|| (0..10).collect());
    let tol = s.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let target = s.target_p.unwrap_or(0.99);
    let workspace = s.workspace.unwrap_or(1);
    let unitaries = s.unitaries.unwrap_or(Unitaries::Random);
    if registers.contains(&0) {
        return Err(usage("--s entries must be positive"));
    }
    if workspace == 0 {
        return Err(usage("--workspace must be positive"));
    }

    let mut table = Table::new(&PARALLEL_HEADER);
    let mut violations = 0;
    let mut bound_rows = 0;
    for &n in &sizes {
        if let Some(&bad) = registers.iter().find(|&&k| n % k != 0) {
            return Err(usage(format!("{bad} engines do not evenly partition a search space of size {n}")));
        }
        let baseline = partition_or_note(n, 1, target)?;
        for &s_count in &registers {
            let dim = n
                .checked_pow(s_count as u32)
                .and_then(|d| d.checked_mul(workspace))
                .unwrap_or(usize::MAX);
            let feasible = match unitaries {
                Unitaries::Random => dim <= RANDOM_DIM_CAP,
                Unitaries::TensorGrover => workspace == 1 && n.saturating_mul(dim) <= TENSOR_WORK_CAP,
            };
            if !feasible {
                eprintln!("note: skipping bound runs for n={n}, s={s_count}: dimension {n}^{s_count}·{workspace} too large");
            } else {
                let layout = QueryLayout::new(n, s_count, workspace)?;
                let reports: Vec<(Option<u64>, Vec<bounds::BoundReport>)> = match unitaries {
                    Unitaries::Random => seeds
                        .par_iter()
                        .map(|&seed| {
                            let mut rng = ChaCha8Rng::seed_from_u64(seed);
                            let alg = QueryAlgorithm::haar_random(layout, t1, &mut rng)?;
                            Ok((Some(seed), bounds::bound_series(&alg)?))
                        })
                        .collect::<grover_lab::Result<_>>()?,
                    Unitaries::TensorGrover => {
                        vec![(None, bounds::bound_series(&QueryAlgorithm::tensor_grover(n, s_count, t1)?)?)]
                    }
                };
                for (seed, series) in &reports {
                    for r in &series[t0..] {
                        violations += usize::from(r.violated(tol));
                        bound_rows += 1;
                        table.push(bound_row(r, *seed, tol));
                    }
                }
            }

            let mut row = vec!["partition".to_string(), n.to_string(), s_count.to_string()];
            row.resize(10, String::new());
            let stats = if s_count == 1 { baseline } else { partition_or_note(n, s_count, target)? };
            match stats {
                Some(p) => {
                    let speedup = match (&baseline, p.t_per_engine) {
                        (None, _) => String::new(),
                        (Some(_), 0) => "inf".into(),
                        (Some(b), t) => float(b.t_per_engine as f64 / t as f64),
                    };
                    row.extend([
                        p.per_engine_size.to_string(),
                        p.t_per_engine.to_string(),
                        float(p.success_prob),
                        p.total_queries.to_string(),
                        speedup,
                    ]);
                }
                None => {
                    row.push((n / s_count).to_string());
                    row.resize(PARALLEL_HEADER.len(), String::new());
                }
            }
            table.push(row);
        }
    }
    table.emit(s.out.as_deref())?;
    eprintln!("bound rows: {bound_rows}, violations: {violations}");
    if violations > 0 {
        return Ok(Status::Failed(format!("{violations} bound rows violated beyond {tol:.1e}")));
    }
    Ok(Status::Clean)
}

/// Partition baseline, or `None` with a note when no iteration count on a
/// block reaches the target.
fn partition_or_note(n: usize, s: usize, target: f64) -> Result<Option<parallel::PartitionStats>, CliError> {
    match parallel::partition_baseline(n, s, target) {
        Ok(p) => Ok(Some(p)),
        Err(grover_lab::LabError::Unreachable { size, best, .. }) => {
            eprintln!("note: target {target} unreachable on blocks of {size} (best {best:.6}); partition fields left blank");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn discriminate(s: &Settings) -> Result<Status, CliError> {
    reject_plot(s, "discriminate")?;
    let sizes = n_range(s, 16, None)?;
    let points = s.p_points.unwrap_or(11);
    let trials = s.trials.unwrap_or(1000);
    let seeds = s.seeds.clone().unwrap_or_else(|| vec![0]);
    let tol = s.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if points < 2 {
        return Err(usage("--p-points must be at least 2"));
    }

    let mut table = Table::new(&["n", "p", "distance_sum", "bound_value", "gap"]);
    let mut worst_gap: f64 = 0.0;
    for &n in &sizes {
        let floor = 1.0 / n as f64;
        for i in 0..points {
            let p = floor + (1.0 - floor) * i as f64 / (points - 1) as f64;
            let fam = discrimination::grover_final_family(n, p)?;
            let d = discrimination::distance_sum(&fam);
            let b = discrimination::bound_value(n, p);
            worst_gap = worst_gap.max((d - b).abs());
            table.push(vec![n.to_string(), float(p), float(d), float(b), float(d - b)]);
        }
    }

    // soundness: random families and measurements never beat the cap
    let trial_n_max = sizes.last().copied().unwrap_or(2).clamp(2, 16);
    let per_seed: Vec<(usize, f64)> = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut bad = 0;
            let mut excess = f64::NEG_INFINITY;
            for _ in 0..trials {
                let n = rng.random_range(2..=trial_n_max);
                let m = rng.random_range(n..=2 * n);
                let fam = discrimination::random_family(n, m, &mut rng)?;
                let scheme = MeasurementScheme::random(n, m, &mut rng);
                let p = discrimination::measurement_success(&fam, &scheme)?.p_avg;
                let cap = discrimination::max_p_given_distances(n, discrimination::distance_sum(&fam))?;
                excess = excess.max(p - cap);
                bad += usize::from(p > cap + tol);
            }
            Ok((bad, excess))
        })
        .collect::<grover_lab::Result<_>>()?;
    let violations: usize = per_seed.iter().map(|r| r.0).sum();
    let excess = per_seed.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);

    table.emit(s.out.as_deref())?;
    eprintln!(
        "random trials: {} (N in 2..={trial_n_max}, M in N..=2N), violations: {violations}, max p - cap: {excess:.3e}",
        trials * seeds.len()
    );
    if violations > 0 {
        return Ok(Status::Failed(format!("{violations} random measurements beat the cap")));
    }
    if worst_gap > tol {
        return Ok(Status::Failed(format!("Grover family misses the bound by {worst_gap:.3e}")));
    }
    Ok(Status::Clean)
}

pub fn restart(s: &Settings) -> Result<Status, CliError> {
    reject_plot(s, "restart")?;
    let sizes = n_range(s, 4, Some(1 << 20))?;
    let mut table = Table::new(&["n", "t_full", "t_stop", "expected_queries", "savings"]);
    for &n in &sizes {
        let plan = analytic::restart_optimum(n)?;
        let full = analytic::optimal_iterations(n)?;
        table.push(vec![
            n.to_string(),
            full.t_best.to_string(),
            plan.stop_at.to_string(),
            float(plan.expected_queries),
            float(plan.savings_vs_full),
        ]);
    }
    let asym = analytic::continuum_restart()?;
    table.push(vec!["inf".into(), String::new(), String::new(), String::new(), float(asym.savings)]);
    table.emit(s.out.as_deref())?;
    Ok(Status::Clean)
}

pub fn verify_all(s: &Settings) -> Result<Status, CliError> {
    reject_plot(s, "verify-all")?;
    let seed = s.seeds.as_ref().and_then(|v| v.first().copied()).unwrap_or(2024);
    let outcomes = verify::run_all(seed)?;
    let mut table = Table::new(&["check", "passed", "detail"]);
    for o in &outcomes {
        println!("{} {:<20} {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.detail);
        table.push(vec![o.id.to_string(), o.passed.to_string(), o.detail.clone()]);
    }
    if let Some(path) = &s.out {
        table.emit(Some(path))?;
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Ok(Status::Failed(format!("{failed} of {} checks failed", outcomes.len())));
    }
    Ok(Status::Clean)
}
