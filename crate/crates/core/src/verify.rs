//! End-to-end verification suites: each check regenerates one piece of
//! quantitative evidence (exact search at N = 4, formula agreement,
//! saturation, ceilings, parallel soundness, the discrimination bound) and
//! reports whether it meets its tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithm::{QueryAlgorithm, QueryLayout};
use crate::analytic;
use crate::bounds::{self, BoundKind};
use crate::discrimination::{self, MeasurementScheme};
use crate::error::Result;
use crate::grover::{self, OracleSpec, ReducedState};
use crate::parallel;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub description: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(id: &'static str, description: &'static str, passed: bool, detail: String) -> Self {
        Self {
            id,
            description,
            passed,
            detail,
        }
    }
}

/// Runs every check. Random checks draw from `seed`.
pub fn run_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        exact_small_search()?,
        formula_agreement(4096)?,
        improved_bound_saturation(&[16, 64, 256])?,
        ceiling_matches_grover(&[16, 64, 256])?,
        crude_asymptote()?,
        restart_saving()?,
        parallel_soundness(100, seed)?,
        partition_scaling()?,
        discrimination_bound(1000, 10_000, seed)?,
        over_rotation()?,
    ])
}

pub fn exact_small_search() -> Result<CheckOutcome> {
    let oracle = OracleSpec::new(4, 2)?;
    let last = grover::grover_final(&grover::init_uniform(4)?, &oracle, 1)?;
    let p = grover::success_probability(&last, &oracle)?;
    let phi = analytic::rotation_angle(4)?.phi;
    let passed = (p - 1.0).abs() < 1e-12 && (phi - std::f64::consts::PI / 3.0).abs() < 1e-12;
    Ok(CheckOutcome::new(
        "exact-n4",
        "one iteration at N = 4 finds the marked element with certainty",
        passed,
        format!("p = {p:.17}, phi = {phi:.17}"),
    ))
}

/// Full simulation, reduced recurrence and closed form agree pairwise.
pub fn formula_agreement(n_max: usize) -> Result<CheckOutcome> {
    let mut worst: f64 = 0.0;
    let mut n = 4;
    while n <= n_max {
        let t_max = (2.0 * (n as f64).sqrt()).ceil() as usize;
        let oracle = OracleSpec::new(n, n / 3)?;
        let model = analytic::rotation_angle(n)?;
        let mut state = grover::init_uniform(n)?;
        let mut reduced = ReducedState::initial(n)?;
        for t in 0..=t_max {
            let full = grover::success_probability(&state, &oracle)?;
            let red = reduced.success_probability();
            let closed = model.success_after(t as f64);
            worst = worst.max((full - red).abs()).max((full - closed).abs()).max((red - closed).abs());
            state = grover::grover_step(&state, &oracle)?;
            reduced = grover::reduced_step(&reduced, n)?;
        }
        n *= 2;
    }
    Ok(CheckOutcome::new(
        "formula-agreement",
        "simulation, recurrence and closed form agree for N = 4..N_max, T ≤ ⌈2√N⌉",
        worst < 1e-10,
        format!("max pairwise deviation {worst:.3e}"),
    ))
}

pub fn improved_bound_saturation(sizes: &[usize]) -> Result<CheckOutcome> {
    let mut worst_rel: f64 = 0.0;
    let mut violated = false;
    for &n in sizes {
        let t_max = analytic::rotation_angle(n)?.fractional_optimum().floor() as usize;
        for t in 0..=t_max {
            let r = bounds::grover_bound_report(n, t)?;
            let rhs = r.rhs_improved.unwrap_or(f64::NAN);
            violated |= r.violated(1e-9) || rhs.is_nan();
            if rhs > 0.0 {
                worst_rel = worst_rel.max((rhs - r.lhs_divergence).abs() / rhs);
            } else {
                worst_rel = worst_rel.max(r.lhs_divergence.abs());
            }
        }
    }
    Ok(CheckOutcome::new(
        "improved-saturation",
        "Grover's divergence sum equals N·f(4T²/N) up to the fractional optimum",
        !violated && worst_rel < 1e-6,
        format!("max relative gap {worst_rel:.3e}"),
    ))
}

pub fn ceiling_matches_grover(sizes: &[usize]) -> Result<CheckOutcome> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &n in sizes {
        let model = analytic::rotation_angle(n)?;
        let t_max = model.fractional_optimum().floor() as usize;
        let oracle = OracleSpec::new(n, 0)?;
        let mut state = grover::init_uniform(n)?;
        for t in 0..=t_max {
            let p = grover::success_probability(&state, &oracle)?;
            let gap = bounds::success_ceiling(n, t, 1)? - p;
            lo = lo.min(gap);
            hi = hi.max(gap);
            state = grover::grover_step(&state, &oracle)?;
        }
    }
    Ok(CheckOutcome::new(
        "ceiling-matches",
        "success ceiling minus Grover's probability lies in [0, 1e-6]",
        lo >= 0.0 && hi <= 1e-6,
        format!("gap range [{lo:.3e}, {hi:.3e}]"),
    ))
}

pub fn crude_asymptote() -> Result<CheckOutcome> {
    let n = 1usize << 20;
    let t = analytic::lower_bound_t(n, 1.0, 1, BoundKind::Crude)?;
    let ratio = t as f64 / (n as f64 / 2.0).sqrt();
    Ok(CheckOutcome::new(
        "crude-asymptote",
        "crude bound at p = 1 needs T ≈ √(N/2) at N = 2^20",
        (ratio - 1.0).abs() < 0.02,
        format!("T = {t}, ratio {ratio:.6}"),
    ))
}

pub fn restart_saving() -> Result<CheckOutcome> {
    let asym = analytic::continuum_restart()?;
    let plan = analytic::restart_optimum(1 << 20)?;
    let passed = (asym.savings - 0.1214).abs() <= 5e-4 && (plan.savings_vs_full - asym.savings).abs() <= 3e-3;
    Ok(CheckOutcome::new(
        "restart-saving",
        "restart strategy saves about 12.14% of the expected queries",
        passed,
        format!(
            "continuum {:.6} (theta* = {:.12}), N = 2^20: {:.6}",
            asym.savings, asym.theta_star, plan.savings_vs_full
        ),
    ))
}

pub fn parallel_soundness(trials: usize, seed: u64) -> Result<CheckOutcome> {
    let layout = QueryLayout::new(8, 2, 1)?;
    let mut violations = 0;
    let mut worst_margin = f64::INFINITY;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let full = QueryAlgorithm::haar_random(layout, 4, &mut rng)?;
        for t in 1..=4 {
            let alg = QueryAlgorithm::new(layout, full.initial().clone(), full.steps()[..t].to_vec())?;
            let r = parallel::parallel_bound_report(&alg)?;
            worst_margin = worst_margin.min(r.rhs_min() - r.lhs_divergence);
            if r.violated(1e-9) {
                violations += 1;
            }
        }
    }
    Ok(CheckOutcome::new(
        "parallel-soundness",
        "random two-oracle algorithms at N = 8 never beat min(N·f(4T²S/N), 4T²S)",
        violations == 0,
        format!("{trials} algorithms, T = 1..4, violations {violations}, min margin {worst_margin:.3e}"),
    ))
}

pub fn partition_scaling() -> Result<CheckOutcome> {
    let n = 1usize << 16;
    let base = parallel::partition_baseline(n, 1, 0.99)?.t_per_engine as f64;
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for s in [4usize, 16] {
        let t = parallel::partition_baseline(n, s, 0.99)?.t_per_engine as f64;
        let rel = (base / t) / (s as f64).sqrt() - 1.0;
        worst = worst.max(rel.abs());
        detail.push(format!("S={s}: speedup {:.4}", base / t));
    }
    Ok(CheckOutcome::new(
        "partition-scaling",
        "splitting N = 2^16 over S engines speeds up by √S",
        worst < 0.05,
        detail.join(", "),
    ))
}

pub fn discrimination_bound(trials: usize, perturbations: usize, seed: u64) -> Result<CheckOutcome> {
    let mut worst_sat: f64 = 0.0;
    for n in [4usize, 16, 64] {
        let floor = 1.0 / n as f64;
        for i in 0..=10 {
            let p = floor + (1.0 - floor) * i as f64 / 10.0;
            let fam = discrimination::grover_final_family(n, p)?;
            worst_sat = worst_sat.max((discrimination::distance_sum(&fam) - discrimination::bound_value(n, p)).abs());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..trials {
        let n = rng.random_range(2..=8);
        let m = rng.random_range(n..=2 * n);
        let fam = discrimination::random_family(n, m, &mut rng)?;
        let scheme = MeasurementScheme::random(n, m, &mut rng);
        let p = discrimination::measurement_success(&fam, &scheme)?.p_avg;
        let cap = discrimination::max_p_given_distances(n, discrimination::distance_sum(&fam))?;
        if p > cap + 1e-9 {
            violations += 1;
        }
    }

    let lagrange = discrimination::lagrange_optimum_check(4, 0.7, perturbations, &mut rng)?;
    let passed = worst_sat < 1e-10 && violations == 0 && lagrange.undercuts == 0 && lagrange.min_hessian_pivot > 0.0;
    Ok(CheckOutcome::new(
        "discrimination",
        "Grover's final states saturate the discrimination bound; no measurement beats it",
        passed,
        format!(
            "saturation {worst_sat:.3e}, soundness violations {violations}/{trials}, \
             lagrange undercuts {}/{} (min margin {:.3e}), min Hessian pivot {:.3e}",
            lagrange.undercuts, lagrange.trials, lagrange.min_margin, lagrange.min_hessian_pivot
        ),
    ))
}

pub fn over_rotation() -> Result<CheckOutcome> {
    let n = 256;
    let best = analytic::optimal_iterations(n)?.t_best;
    let oracle = OracleSpec::new(n, 7)?;
    let trace = grover::grover_iterate(&grover::init_uniform(n)?, &oracle, best + 5)?;
    let probs: Vec<f64> = trace
        .iter()
        .map(|s| grover::success_probability(s, &oracle))
        .collect::<Result<_>>()?;
    let decreasing = probs[best..].windows(2).all(|w| w[1] < w[0]);
    Ok(CheckOutcome::new(
        "over-rotation",
        "success probability at N = 256 falls for 5 steps past the optimum",
        decreasing,
        format!("t_best = {best}, p = {:?}", &probs[best..]),
    ))
}
