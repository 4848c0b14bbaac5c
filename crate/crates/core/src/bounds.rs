//! The optimality-proof inequality chain, evaluated numerically.
//!
//! For a query algorithm with empty-oracle states `φ_i` and marked-oracle
//! final states `φ^y_T`, the divergence sum `Σ_y |φ^y_T − φ_T|²` is bounded
//! by the crude `4T²S` and by the arc-improved `N·f(4T²S/N)`. Combined
//! with the state-discrimination bound this caps the success probability.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::algorithm::{QueryAlgorithm, QueryTrace};
use crate::discrimination;
use crate::error::{LabError, Result};
use crate::grover::QState;
use crate::linalg;

/// Which right-hand side feeds the probability ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `4T²S`.
    Crude,
    /// `min(N·f(4T²S/N), 4T²S)`.
    Improved,
}

/// `4·t²·s`.
pub fn crude_bound(t: usize, s: usize) -> f64 {
    4.0 * (t as f64).powi(2) * s as f64
}

/// Largest argument of [`improvement_f`] for `t` segments: the point where
/// the endpoint angle reaches π.
pub fn improvement_domain_max(t: usize) -> f64 {
    if t == 0 {
        return 0.0;
    }
    let tf = t as f64;
    4.0 * tf * tf * (std::f64::consts::PI / (2.0 * tf)).sin().powi(2)
}

/// Endpoint angle reachable by `t` equal arc steps whose squared chords sum
/// to at most `x / t`.
fn reachable_angle(x: f64, t: usize) -> Option<f64> {
    if x < 0.0 || !x.is_finite() {
        return None;
    }
    if t == 0 {
        return (x == 0.0).then_some(0.0);
    }
    let tf = t as f64;
    let z = x.sqrt() / (2.0 * tf);
    if z > 1.0 {
        return None;
    }
    let alpha = 2.0 * tf * z.asin();
    (alpha <= std::f64::consts::PI * (1.0 + 1e-15)).then_some(alpha)
}

/// The improvement function `f`, defined by `f(4t² sin²(α/2t)) = 4 sin²(α/2)`
/// for `α ∈ [0, π]`. Out-of-domain arguments are an error.
pub fn improvement_f(x: f64, t: usize) -> Result<f64> {
    let alpha = reachable_angle(x, t).ok_or(LabError::ImprovementDomain { x, t })?;
    Ok(4.0 * (alpha / 2.0).sin().powi(2))
}

/// [`improvement_f`] extended by its maximum value 4 past the end of the
/// domain. The extension keeps it concave and non-decreasing.
pub fn improvement_f_capped(x: f64, t: usize) -> f64 {
    if x >= improvement_domain_max(t) && t > 0 {
        return 4.0;
    }
    improvement_f(x, t).unwrap_or(4.0)
}

/// `n · f(4t²s/n)`.
pub fn jensen_rhs(n: usize, t: usize, s: usize) -> Result<f64> {
    let x = crude_bound(t, s) / n as f64;
    Ok(n as f64 * improvement_f(x, t)?)
}

/// Right-hand side used for the success ceiling.
pub fn divergence_budget(n: usize, t: usize, s: usize, kind: BoundKind) -> f64 {
    let crude = crude_bound(t, s);
    match kind {
        BoundKind::Crude => crude,
        BoundKind::Improved => match jensen_rhs(n, t, s) {
            Ok(improved) => improved.min(crude),
            Err(_) => crude,
        },
    }
}

/// Largest success probability compatible with the improved bound.
pub fn success_ceiling(n: usize, t: usize, s: usize) -> Result<f64> {
    success_ceiling_with(n, t, s, BoundKind::Improved)
}

pub fn success_ceiling_with(n: usize, t: usize, s: usize, kind: BoundKind) -> Result<f64> {
    if n < 2 {
        return Err(LabError::InvalidDimension(n));
    }
    discrimination::max_p_given_distances(n, divergence_budget(n, t, s, kind))
}

/// `Σ_y |φ^y_T − φ_T|²`, summed in ascending `y`. `marked_runs[y]` must be
/// the run with the oracle marking `y`.
pub fn divergence_sum(empty: &QueryTrace, marked_runs: &[QueryTrace]) -> Result<f64> {
    let n = empty.layout.n();
    if marked_runs.len() != n {
        return Err(LabError::TraceShape(format!(
            "expected {n} marked runs, got {}",
            marked_runs.len()
        )));
    }
    let mut total = 0.0;
    for (y, run) in marked_runs.iter().enumerate() {
        if run.layout != empty.layout || run.states.len() != empty.states.len() {
            return Err(LabError::TraceShape(format!("run for y = {y} does not match the empty run")));
        }
        total += run.last().distance_sqr(empty.last());
    }
    Ok(total)
}

/// `Σ_{i<T} |P_y φ_i|²`.
pub fn query_mass(trace: &QueryTrace, y: usize) -> Result<f64> {
    let t = trace.queries();
    trace.states[..t]
        .iter()
        .map(|s| trace.layout.query_mass(s, y))
        .sum()
}

/// Checks `φ_T − φ^y_T = Σ_i U^y_{T−1}⋯U^y_{i+1} ΔU_i φ_i` and returns the
/// norm of the residual.
pub fn telescoping_check(alg: &QueryAlgorithm, y: usize) -> Result<f64> {
    let empty = alg.run(None)?;
    let marked_final = alg.run_final(Some(y))?;
    let t = alg.queries();
    let dim = alg.layout().dimension();
    let mut sum = vec![Complex64::new(0.0, 0.0); dim];
    for i in 0..t {
        let phi = &empty.states[i];
        let a = alg.empty_step(i, phi)?;
        let b = alg.marked_step(i, y, phi)?;
        let mut term = difference(&a, &b);
        for j in i + 1..t {
            term = alg.marked_step(j, y, &term)?;
        }
        for (s, v) in sum.iter_mut().zip(term.amplitudes()) {
            *s += v;
        }
    }
    let lhs = difference(empty.last(), &marked_final);
    Ok(lhs
        .amplitudes()
        .iter()
        .zip(&sum)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Unnormalized `a − b`, kept in a `QState` shell so it can be pushed
/// through the algorithm's (linear) steps.
fn difference(a: &QState, b: &QState) -> QState {
    QState::from_unitary_image(a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x - y).collect())
}

/// The hybrid states `ψ_k = U^y_{T−1}⋯U^y_{T−k} φ_{T−k}`, `k = 0..=T`.
/// `ψ_0 = φ_T` and `ψ_T = φ^y_T`.
pub fn hybrid_path(alg: &QueryAlgorithm, y: usize) -> Result<Vec<QState>> {
    let empty = alg.run(None)?;
    let t = alg.queries();
    (0..=t)
        .map(|k| {
            let mut state = empty.states[t - k].clone();
            for j in t - k..t {
                state = alg.marked_step(j, y, &state)?;
            }
            Ok(state)
        })
        .collect()
}

/// Real angles between consecutive states, `arccos Re⟨a|b⟩`.
pub fn successive_angles(states: &[QState]) -> Vec<f64> {
    states.windows(2).map(|w| real_angle(&w[0], &w[1])).collect()
}

fn real_angle(a: &QState, b: &QState) -> f64 {
    // chord form is accurate for small angles
    2.0 * (a.distance_sqr(b).sqrt() / 2.0).min(1.0).asin()
}

/// Every link of the per-oracle inequality chain for one marked `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainTerms {
    /// `|φ^y_T − φ_T|`.
    pub distance: f64,
    /// `Σ_i |ΔU_i φ_i|` (triangle inequality).
    pub sum_of_norms: f64,
    /// `2 Σ_i |P_y φ_i|`.
    pub projector_sum: f64,
    /// `√(4T Σ_i |P_y φ_i|²)` (sum-of-squares lemma).
    pub cauchy_bound: f64,
    /// `f(4T Σ_i |P_y φ_i|²)`, a bound on `distance²`.
    pub improved_sq: f64,
    /// `Σ_i |P_y φ_i|²`.
    pub query_mass: f64,
}

pub fn inequality_chain(alg: &QueryAlgorithm, y: usize) -> Result<ChainTerms> {
    let empty = alg.run(None)?;
    let marked_final = alg.run_final(Some(y))?;
    let t = alg.queries();
    let layout = alg.layout();
    let mut sum_of_norms = 0.0;
    let mut projector_sum = 0.0;
    let mut mass = 0.0;
    for i in 0..t {
        let phi = &empty.states[i];
        let a = alg.empty_step(i, phi)?;
        let b = alg.marked_step(i, y, phi)?;
        sum_of_norms += a.distance_sqr(&b).sqrt();
        let m = layout.query_mass(phi, y)?;
        projector_sum += 2.0 * m.sqrt();
        mass += m;
    }
    let x = 4.0 * t as f64 * mass;
    Ok(ChainTerms {
        distance: empty.last().distance_sqr(&marked_final).sqrt(),
        sum_of_norms,
        projector_sum,
        cauchy_bound: x.sqrt(),
        improved_sq: improvement_f_capped(x, t),
        query_mass: mass,
    })
}

/// Left side and bounds of the summed chain for one `(N, T, S)` instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub t: usize,
    pub s: usize,
    pub lhs_divergence: f64,
    pub rhs_crude: f64,
    /// `None` once `4T²S/N` leaves the domain of `f`.
    pub rhs_improved: Option<f64>,
    pub ceiling_p: f64,
    /// `rhs_improved − lhs_divergence`.
    pub saturation_gap: Option<f64>,
}

impl BoundReport {
    fn from_lhs(n: usize, t: usize, s: usize, lhs: f64) -> Result<Self> {
        let rhs_improved = jensen_rhs(n, t, s).ok();
        Ok(Self {
            n,
            t,
            s,
            lhs_divergence: lhs,
            rhs_crude: crude_bound(t, s),
            rhs_improved,
            ceiling_p: success_ceiling(n, t, s)?,
            saturation_gap: rhs_improved.map(|r| r - lhs),
        })
    }

    /// Tightest applicable right-hand side.
    pub fn rhs_min(&self) -> f64 {
        self.rhs_improved.map_or(self.rhs_crude, |r| r.min(self.rhs_crude))
    }

    /// Whether the divergence exceeds the tightest bound by more than `slack`.
    pub fn violated(&self, slack: f64) -> bool {
        self.lhs_divergence > self.rhs_min() + slack
    }
}

/// Runs the algorithm against every oracle and the empty oracle.
/// Per-`y` runs execute in parallel; the sum is taken in ascending `y`.
pub fn bound_report(alg: &QueryAlgorithm) -> Result<BoundReport> {
    let layout = alg.layout();
    let n = layout.n();
    let empty_final = alg.run_final(None)?;
    let distances: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|y| alg.run_final(Some(y)).map(|s| s.distance_sqr(&empty_final)))
        .collect::<Result<_>>()?;
    let lhs = distances.iter().sum();
    BoundReport::from_lhs(n, alg.queries(), layout.registers(), lhs)
}

/// Reports for every prefix of the algorithm, `T = 0..=queries()`, from a
/// single pass per oracle. Entry `t` equals `bound_report` of the first `t`
/// rounds.
pub fn bound_series(alg: &QueryAlgorithm) -> Result<Vec<BoundReport>> {
    let layout = alg.layout();
    let n = layout.n();
    let t_max = alg.queries();
    let empty = alg.run(None)?;
    let per_y: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|y| {
            let mut state = alg.initial().clone();
            let mut out = Vec::with_capacity(t_max + 1);
            out.push(0.0);
            for i in 0..t_max {
                state = alg.marked_step(i, y, &state)?;
                out.push(state.distance_sqr(&empty.states[i + 1]));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    (0..=t_max)
        .map(|t| {
            let lhs = per_y.iter().map(|d| d[t]).sum();
            BoundReport::from_lhs(n, t, layout.registers(), lhs)
        })
        .collect()
}

/// Grover's own report. Simulates each marked run in full.
pub fn grover_bound_report(n: usize, t: usize) -> Result<BoundReport> {
    bound_report(&QueryAlgorithm::grover(n, t)?)
}

/// `t · (2 sin(α/2t))²`: the least `Σ|ψ_i − ψ_{i+1}|²` over unit vectors
/// joining endpoints at angle `α` in `t` steps.
pub fn minimal_path_length(alpha: f64, t: usize) -> f64 {
    assert!(t >= 1, "need at least one segment");
    let tf = t as f64;
    tf * (2.0 * (alpha / (2.0 * tf)).sin()).powi(2)
}

/// Multiplies `psi_t` by the unit phase making `⟨psi_0|psi_t⟩` real and
/// non-negative. Orthogonal pairs are left unchanged.
pub fn phase_align(psi_0: &QState, psi_t: &QState) -> QState {
    let overlap = psi_0.inner(psi_t);
    let norm = overlap.norm();
    if norm == 0.0 {
        return psi_t.clone();
    }
    psi_t.with_phase(overlap.conj() / norm)
}

/// Equally spaced path along the great circle between two states.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcPath {
    pub psi_0: QState,
    pub psi_t: QState,
    pub alpha: f64,
    pub segment_count: usize,
}

impl ArcPath {
    /// Applies the phase convention to `psi_t`.
    pub fn new(psi_0: &QState, psi_t: &QState, segment_count: usize) -> Result<Self> {
        if segment_count == 0 {
            return Err(LabError::Degenerate("an arc needs at least one segment".into()));
        }
        if psi_0.dimension() != psi_t.dimension() {
            return Err(LabError::DimensionMismatch {
                expected: psi_0.dimension(),
                actual: psi_t.dimension(),
            });
        }
        let psi_t = phase_align(psi_0, psi_t);
        let alpha = real_angle(psi_0, &psi_t);
        Ok(Self {
            psi_0: psi_0.clone(),
            psi_t,
            alpha,
            segment_count,
        })
    }

    /// `ψ_i = cos(iα/t) ψ_0 + sin(iα/t) e`, `e ⟂ ψ_0` in the real span.
    pub fn points(&self) -> Vec<QState> {
        let t = self.segment_count;
        if self.alpha == 0.0 {
            return vec![self.psi_0.clone(); t + 1];
        }
        let (c, s) = (self.alpha.cos(), self.alpha.sin());
        let e: Vec<Complex64> = self
            .psi_t
            .amplitudes()
            .iter()
            .zip(self.psi_0.amplitudes())
            .map(|(b, a)| (b - a * c) / s)
            .collect();
        (0..=t)
            .map(|i| {
                let theta = self.alpha * i as f64 / t as f64;
                let (ci, si) = (theta.cos(), theta.sin());
                QState::from_unitary_image(
                    self.psi_0.amplitudes().iter().zip(&e).map(|(a, b)| a * ci + b * si).collect(),
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcCheck {
    pub alpha: f64,
    /// `minimal_path_length(α, t)`.
    pub formula: f64,
    /// Largest `|ψ_i − (ψ_{i−1}+ψ_{i+1})/|ψ_{i−1}+ψ_{i+1}||` on the equal arc.
    pub stationarity_residual: f64,
    /// Best `Σ|ψ_i − ψ_{i+1}|²` reached by local descent from random paths.
    pub numeric_minimum: f64,
}

impl ArcCheck {
    /// Amount by which the descent beats the formula (zero if it does not).
    pub fn undercut(&self) -> f64 {
        (self.formula - self.numeric_minimum).max(0.0)
    }

    pub fn max_deviation(&self) -> f64 {
        self.stationarity_residual.max(self.undercut())
    }
}

fn path_energy(path: &[Vec<Complex64>]) -> f64 {
    path.windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>())
        .sum()
}

fn normalized_sum(a: &[Complex64], b: &[Complex64]) -> Option<Vec<Complex64>> {
    let v: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (norm > 1e-300).then(|| v.into_iter().map(|z| z / norm).collect())
}

/// Verifies that equally spaced points on the arc are stationary and that
/// coordinate descent from `starts` random interior paths never beats
/// [`minimal_path_length`].
pub fn arc_minimizer_check<R: Rng + ?Sized>(
    psi_0: &QState,
    psi_t: &QState,
    t: usize,
    starts: usize,
    rng: &mut R,
) -> Result<ArcCheck> {
    let arc = ArcPath::new(psi_0, psi_t, t)?;
    let formula = minimal_path_length(arc.alpha, t);
    if t == 1 {
        return Ok(ArcCheck {
            alpha: arc.alpha,
            formula,
            stationarity_residual: 0.0,
            numeric_minimum: formula,
        });
    }

    let points = arc.points();
    let mut stationarity_residual: f64 = 0.0;
    for i in 1..t {
        if let Some(mid) = normalized_sum(points[i - 1].amplitudes(), points[i + 1].amplitudes()) {
            let dev = points[i]
                .amplitudes()
                .iter()
                .zip(&mid)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            stationarity_residual = stationarity_residual.max(dev);
        }
    }

    let dim = psi_0.dimension();
    let mut numeric_minimum = f64::INFINITY;
    for _ in 0..starts {
        let mut path: Vec<Vec<Complex64>> = Vec::with_capacity(t + 1);
        path.push(arc.psi_0.amplitudes().to_vec());
        for _ in 1..t {
            path.push(linalg::random_state(dim, rng)?.into_amplitudes());
        }
        path.push(arc.psi_t.amplitudes().to_vec());

        // each update minimizes the energy exactly in one interior point
        let mut energy = path_energy(&path);
        for _ in 0..200_000 {
            for i in 1..t {
                if let Some(v) = normalized_sum(&path[i - 1], &path[i + 1]) {
                    path[i] = v;
                }
            }
            let next = path_energy(&path);
            let settled = energy - next <= 1e-16;
            energy = next;
            if settled {
                break;
            }
        }
        numeric_minimum = numeric_minimum.min(energy);
    }

    Ok(ArcCheck {
        alpha: arc.alpha,
        formula,
        stationarity_residual,
        numeric_minimum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithm::QueryLayout;
    use crate::analytic;
    use crate::grover::{init_uniform, QState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn crude_examples() {
        assert_eq!(crude_bound(10, 1), 400.0);
        assert_eq!(crude_bound(0, 3), 0.0);
        assert_eq!(crude_bound(10, 4), 1600.0);
    }

    #[test]
    fn f_examples() {
        for t in 0..5 {
            assert_eq!(improvement_f(0.0, t).unwrap(), 0.0);
        }
        for i in 0..=40 {
            let x = 4.0 * i as f64 / 40.0;
            assert!((improvement_f(x, 1).unwrap() - x).abs() < 1e-14, "x = {x}");
        }
        for t in [2usize, 3, 10, 100] {
            for i in 0..=50 {
                let x = improvement_domain_max(t) * i as f64 / 50.0;
                let f = improvement_f(x, t).unwrap();
                assert!(f <= x.min(4.0) + 1e-12, "t={t} x={x} f={f}");
            }
        }
    }

    #[test]
    fn f_domain_errors() {
        assert!(matches!(improvement_f(-1.0, 3), Err(LabError::ImprovementDomain { .. })));
        assert!(improvement_f(4.0 + 1e-9, 1).is_err());
        assert!(improvement_f(0.1, 0).is_err());
        assert!(improvement_f(improvement_domain_max(5) * 1.001, 5).is_err());
        assert!((improvement_f(improvement_domain_max(5), 5).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(improvement_f_capped(1e9, 5), 4.0);
    }

    #[test]
    fn f_small_argument_limit() {
        // for x → 0, f(x)/x → 1 from below
        for t in [2usize, 8, 64] {
            let mut prev = 0.0;
            for k in 1..8 {
                let x = 10f64.powi(-k);
                let ratio = improvement_f(x, t).unwrap() / x;
                assert!(ratio <= 1.0 + 1e-12 && ratio > prev - 1e-12);
                prev = ratio;
            }
            assert!((prev - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn jensen_examples() {
        assert!((jensen_rhs(4, 1, 1).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(jensen_rhs(37, 0, 1).unwrap(), 0.0);
        let v = jensen_rhs(256, 12, 1).unwrap();
        assert!(v < crude_bound(12, 1), "{v}");
    }

    #[test]
    fn ceiling_examples() {
        assert!((success_ceiling(4, 1, 1).unwrap() - 1.0).abs() < 1e-12);
        for n in [2usize, 4, 100, 1024] {
            assert!((success_ceiling(n, 0, 1).unwrap() - 1.0 / n as f64).abs() < 1e-12);
        }
        // saturation holds up to the last integer below the fractional optimum
        let n = 1024;
        let model = analytic::rotation_angle(n).unwrap();
        let t = model.fractional_optimum().floor() as usize;
        let p = model.success_after(t as f64);
        let c = success_ceiling(n, t, 1).unwrap();
        assert!(c >= p && c - p < 1e-6, "{c} vs {p}");
        // past it the ceiling is already 1
        assert_eq!(success_ceiling(n, t + 1, 1).unwrap(), 1.0);
    }

    #[test]
    fn ceiling_monotone_in_t_and_s() {
        for n in [16usize, 256] {
            let mut prev = 0.0;
            for t in 0..30 {
                let c = success_ceiling(n, t, 1).unwrap();
                assert!(c >= prev);
                assert!(success_ceiling(n, t, 2).unwrap() >= c);
                assert!(success_ceiling_with(n, t, 1, BoundKind::Crude).unwrap() >= c);
                prev = c;
            }
        }
    }

    #[test]
    fn divergence_examples() {
        let r = grover_bound_report(4, 1).unwrap();
        assert!((r.lhs_divergence - 4.0).abs() < 1e-12);
        assert!((r.rhs_improved.unwrap() - 4.0).abs() < 1e-12);
        assert!(r.saturation_gap.unwrap().abs() < 1e-12);
        for n in [2usize, 5, 16] {
            assert_eq!(grover_bound_report(n, 0).unwrap().lhs_divergence, 0.0);
        }
    }

    #[test]
    fn divergence_sum_from_traces() {
        let alg = QueryAlgorithm::grover(8, 2).unwrap();
        let empty = alg.run(None).unwrap();
        let runs: Vec<_> = (0..8).map(|y| alg.run(Some(y)).unwrap()).collect();
        let direct = divergence_sum(&empty, &runs).unwrap();
        let report = bound_report(&alg).unwrap();
        assert!((direct - report.lhs_divergence).abs() < 1e-14);
        assert!(divergence_sum(&empty, &runs[..7]).is_err());
        let short = QueryAlgorithm::grover(8, 1).unwrap().run(Some(0)).unwrap();
        let mut bad = runs.clone();
        bad[0] = short;
        assert!(matches!(divergence_sum(&empty, &bad), Err(LabError::TraceShape(_))));
    }

    #[test]
    fn query_mass_examples() {
        let n = 16;
        let t = 5;
        let trace = QueryAlgorithm::grover(n, t).unwrap().run(None).unwrap();
        let mut total = 0.0;
        for y in 0..n {
            let m = query_mass(&trace, y).unwrap();
            assert!((m - t as f64 / n as f64).abs() < 1e-14);
            total += m;
        }
        assert!((total - t as f64).abs() < 1e-12);

        let layout = QueryLayout::single(4).unwrap();
        let basis = QState::basis(4, 1).unwrap();
        let trace = QueryTrace {
            layout,
            states: vec![basis.clone(); 4],
        };
        assert_eq!(query_mass(&trace, 3).unwrap(), 0.0);
    }

    #[test]
    fn telescoping_examples() {
        let grover = QueryAlgorithm::grover(8, 3).unwrap();
        for y in 0..8 {
            assert!(telescoping_check(&grover, y).unwrap() < 1e-10);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let random = QueryAlgorithm::haar_random(QueryLayout::single(8).unwrap(), 3, &mut rng).unwrap();
        for y in 0..8 {
            assert!(telescoping_check(&random, y).unwrap() < 1e-10);
        }
        let with_ws = QueryAlgorithm::haar_random(QueryLayout::new(4, 1, 3).unwrap(), 4, &mut rng).unwrap();
        assert!(telescoping_check(&with_ws, 2).unwrap() < 1e-10);

        // T = 1: the sum has the single term ΔU φ_0
        let one = QueryAlgorithm::haar_random(QueryLayout::single(8).unwrap(), 1, &mut rng).unwrap();
        let phi0 = one.initial().clone();
        let lhs = one.run_final(None).unwrap().distance_sqr(&one.run_final(Some(5)).unwrap());
        let term = one.empty_step(0, &phi0).unwrap().distance_sqr(&one.marked_step(0, 5, &phi0).unwrap());
        assert!((lhs - term).abs() < 1e-14);
        assert!(telescoping_check(&one, 5).unwrap() < 1e-12);
    }

    #[test]
    fn hybrid_path_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let alg = QueryAlgorithm::haar_random(QueryLayout::single(6).unwrap(), 4, &mut rng).unwrap();
        let path = hybrid_path(&alg, 2).unwrap();
        assert_eq!(path.len(), 5);
        assert!(path[0].max_abs_diff(&alg.run_final(None).unwrap()) < 1e-14);
        assert!(path[4].max_abs_diff(&alg.run_final(Some(2)).unwrap()) < 1e-14);
    }

    #[test]
    fn chain_ordering_random_algorithms() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..20 {
            let layout = QueryLayout::new(4, 1, 1 + trial % 3).unwrap();
            let t = 1 + trial % 4;
            let alg = QueryAlgorithm::haar_random(layout, t, &mut rng).unwrap();
            for y in 0..4 {
                let c = inequality_chain(&alg, y).unwrap();
                assert!(c.distance <= c.sum_of_norms + 1e-12);
                assert!((c.sum_of_norms - c.projector_sum).abs() < 1e-12);
                assert!(c.projector_sum <= c.cauchy_bound + 1e-12);
                assert!(c.distance.powi(2) <= c.improved_sq + 1e-12);
            }
            let r = bound_report(&alg).unwrap();
            assert!(!r.violated(1e-9), "{r:?}");
            if let Some(imp) = r.rhs_improved {
                assert!(imp <= r.rhs_crude + 1e-9);
            }
        }
    }

    #[test]
    fn grover_saturates_inequalities_three_and_four() {
        let n = 64;
        let alg = QueryAlgorithm::grover(n, 5).unwrap();
        for y in [0usize, 17, 63] {
            let c = inequality_chain(&alg, y).unwrap();
            assert!((c.sum_of_norms - c.projector_sum).abs() < 1e-12);
            assert!((c.projector_sum - c.cauchy_bound).abs() < 1e-12);
            // the arc keeps inequality 2 strict
            assert!(c.distance < c.sum_of_norms - 1e-6);
            assert!((c.distance.powi(2) - c.improved_sq).abs() < 1e-12);
        }
    }

    #[test]
    fn minimal_path_examples() {
        assert!((minimal_path_length(FRAC_PI_2, 1) - 2.0).abs() < 1e-15);
        let v = minimal_path_length(FRAC_PI_2, 2);
        assert!((v - 8.0 * (PI / 8.0).sin().powi(2)).abs() < 1e-15);
        assert!((v - 1.1716).abs() < 1e-4);
        for alpha in [0.1, 1.0, 2.5, PI] {
            let mut prev = f64::INFINITY;
            for t in 1..40 {
                let v = minimal_path_length(alpha, t);
                assert!(v < prev);
                // t·v = 4t² sin²(α/2t) rises to α² from below
                assert!(t as f64 * v <= alpha * alpha + 1e-12);
                prev = v;
            }
        }
    }

    #[test]
    fn minimal_path_agrees_with_descent() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = QState::basis(2, 0).unwrap();
        let b = QState::basis(2, 1).unwrap();
        let check = arc_minimizer_check(&a, &b, 2, 4, &mut rng).unwrap();
        assert!((check.numeric_minimum - minimal_path_length(FRAC_PI_2, 2)).abs() < 1e-8);
    }

    #[test]
    fn arc_check_random_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..5 {
            let a = linalg::random_state(8, &mut rng).unwrap();
            let b = linalg::random_state(8, &mut rng).unwrap();
            let check = arc_minimizer_check(&a, &b, 4, 6, &mut rng).unwrap();
            assert!(check.stationarity_residual < 1e-10);
            assert!(check.undercut() <= 1e-8);
            assert!((check.numeric_minimum - check.formula).abs() < 1e-8, "{check:?}");
            assert!(check.alpha <= FRAC_PI_2 + 1e-12);
        }
    }

    #[test]
    fn arc_check_degenerate_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = linalg::random_state(4, &mut rng).unwrap();
        let b = linalg::random_state(4, &mut rng).unwrap();
        let one = arc_minimizer_check(&a, &b, 1, 3, &mut rng).unwrap();
        assert_eq!(one.max_deviation(), 0.0);
        assert!(arc_minimizer_check(&a, &b, 0, 3, &mut rng).is_err());
        let same = arc_minimizer_check(&a, &a.with_phase(Complex64::new(0.0, 1.0)), 3, 2, &mut rng).unwrap();
        assert!(same.alpha < 1e-7 && same.numeric_minimum < 1e-12);
    }

    #[test]
    fn grover_path_is_equally_spaced() {
        let n = 16;
        let phi = analytic::rotation_angle(n).unwrap().phi;
        let alg = QueryAlgorithm::grover(n, 3).unwrap();
        for y in 0..n {
            let path = hybrid_path(&alg, y).unwrap();
            for angle in successive_angles(&path) {
                assert!((angle - phi).abs() < 1e-10);
            }
        }
        let u = init_uniform(n).unwrap();
        assert!(hybrid_path(&alg, 0).unwrap()[0].max_abs_diff(&u) < 1e-15);
    }

    #[test]
    fn phase_align_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = linalg::random_state(5, &mut rng).unwrap();
        let b = linalg::random_state(5, &mut rng).unwrap();
        let once = phase_align(&a, &b);
        let twice = phase_align(&a, &once);
        assert!(once.max_abs_diff(&twice) < 1e-15);
        let ov = a.inner(&once);
        assert!(ov.im.abs() < 1e-15 && ov.re >= 0.0);
    }
}
