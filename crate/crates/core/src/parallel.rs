//! Search with `S` identical oracles queried in synchronous rounds, and the
//! trivial baseline that splits the search space across `S` machines.

use crate::algorithm::{InterStep, QueryAlgorithm, QueryLayout, QueryTrace};
use crate::analytic;
use crate::bounds::{self, BoundReport};
use crate::error::{LabError, Result};
use crate::grover::QState;

/// Amplitudes over the composite basis `(x_1, …, x_S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiQueryState {
    pub layout: QueryLayout,
    pub state: QState,
}

impl MultiQueryState {
    pub fn new(layout: QueryLayout, state: QState) -> Result<Self> {
        if state.dimension() != layout.dimension() {
            return Err(LabError::DimensionMismatch {
                expected: layout.dimension(),
                actual: state.dimension(),
            });
        }
        Ok(Self { layout, state })
    }

    pub fn uniform(n: usize, s: usize) -> Result<Self> {
        let layout = QueryLayout::new(n, s, 1)?;
        Ok(Self {
            layout,
            state: layout.uniform(),
        })
    }

    /// Basis state `|x_1, …, x_S⟩`.
    pub fn basis(n: usize, registers: &[usize]) -> Result<Self> {
        let layout = QueryLayout::new(n, registers.len(), 1)?;
        let mut index = 0;
        for &x in registers {
            if x >= n {
                return Err(LabError::MarkedOutOfRange { marked: x, n });
            }
            index = index * n + x;
        }
        Ok(Self {
            layout,
            state: QState::basis(layout.dimension(), index)?,
        })
    }
}

/// One synchronous round: every basis amplitude picks up one sign flip per
/// register equal to `y`.
pub fn parallel_oracle(state: &MultiQueryState, y: usize) -> Result<MultiQueryState> {
    Ok(MultiQueryState {
        layout: state.layout,
        state: state.layout.apply_oracle(&state.state, y)?,
    })
}

/// Runs `unitaries.len()` rounds from the uniform composite state, each
/// round an oracle call (marking `y`, or empty for `None`) then the next
/// unitary.
pub fn run_parallel(n: usize, s: usize, y: Option<usize>, unitaries: &[InterStep]) -> Result<QueryTrace> {
    let layout = QueryLayout::new(n, s, 1)?;
    let alg = QueryAlgorithm::new(layout, layout.uniform(), unitaries.to_vec())?;
    alg.run(y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorComparison {
    /// `|P_y φ|²`, any register on `y`.
    pub lhs: f64,
    /// `Σ_k |P^k_y φ|²`.
    pub rhs: f64,
}

pub fn projector_decomposition_check(state: &MultiQueryState, y: usize) -> Result<ProjectorComparison> {
    let lhs = state.layout.query_mass(&state.state, y)?;
    let rhs = (0..state.layout.registers())
        .map(|k| state.layout.register_mass(&state.state, y, k))
        .sum::<Result<f64>>()?;
    Ok(ProjectorComparison { lhs, rhs })
}

/// `Σ_y Σ_{i<T} Σ_k |P^k_y φ_i|²` over the empty-oracle trace; equals `S·T`.
pub fn register_count_total(trace: &QueryTrace) -> Result<f64> {
    let layout = trace.layout;
    let mut total = 0.0;
    for state in &trace.states[..trace.queries()] {
        for y in 0..layout.n() {
            for k in 0..layout.registers() {
                total += layout.register_mass(state, y, k)?;
            }
        }
    }
    Ok(total)
}

/// Divergence sum of an `S`-oracle algorithm against `N·f(4T²S/N)` and
/// `4T²S`.
pub fn parallel_bound_report(alg: &QueryAlgorithm) -> Result<BoundReport> {
    bounds::bound_report(alg)
}

/// `S` independent Grover searches, one per block of `N/S` elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionStats {
    pub n: usize,
    pub s: usize,
    pub per_engine_size: usize,
    pub t_per_engine: usize,
    pub success_prob: f64,
    pub total_queries: usize,
}

pub fn partition_baseline(n: usize, s: usize, target_p: f64) -> Result<PartitionStats> {
    if n < 2 {
        return Err(LabError::InvalidDimension(n));
    }
    if s == 0 || !n.is_multiple_of(s) {
        return Err(LabError::UnevenPartition { n, s });
    }
    if !(0.0..=1.0).contains(&target_p) {
        return Err(LabError::ProbabilityOutOfRange {
            p: target_p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let size = n / s;
    if size == 1 {
        // one candidate per engine: the classical check finds it for free
        return Ok(PartitionStats {
            n,
            s,
            per_engine_size: 1,
            t_per_engine: 0,
            success_prob: 1.0,
            total_queries: 0,
        });
    }
    let model = analytic::rotation_angle(size)?;
    let best = analytic::optimal_iterations(size)?;
    let t = (0..=best.t_best)
        .find(|&t| model.success_after(t as f64) >= target_p)
        .ok_or(LabError::Unreachable {
            target: target_p,
            size,
            best: best.p_best,
        })?;
    Ok(PartitionStats {
        n,
        s,
        per_engine_size: size,
        t_per_engine: t,
        success_prob: model.success_after(t as f64),
        total_queries: s * t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grover::{grover_iterate, init_uniform, OracleSpec};
    use crate::linalg;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn oracle_sign_examples() {
        let y = 1;
        let both = MultiQueryState::basis(4, &[y, y]).unwrap();
        assert_eq!(parallel_oracle(&both, y).unwrap().state, both.state);
        let one = MultiQueryState::basis(4, &[y, 3]).unwrap();
        let flipped = parallel_oracle(&one, y).unwrap().state;
        assert!(flipped.max_abs_diff(&one.state.with_phase(num_complex::Complex64::new(-1.0, 0.0))) < 1e-15);
        let none = MultiQueryState::basis(4, &[0, 2]).unwrap();
        assert_eq!(parallel_oracle(&none, y).unwrap().state, none.state);
    }

    #[test]
    fn single_oracle_matches_grover() {
        let n = 16;
        let steps = vec![InterStep::Diffusion; 4];
        let trace = run_parallel(n, 1, Some(6), &steps).unwrap();
        let core = grover_iterate(&init_uniform(n).unwrap(), &OracleSpec::new(n, 6).unwrap(), 4).unwrap();
        for (a, b) in trace.states.iter().zip(&core) {
            assert!(a.max_abs_diff(b) < 1e-12);
        }
    }

    #[test]
    fn tensor_grover_two_registers() {
        let steps = vec![InterStep::RegisterDiffusion];
        for y in 0..4 {
            let trace = run_parallel(4, 2, Some(y), &steps).unwrap();
            let target = MultiQueryState::basis(4, &[y, y]).unwrap();
            assert!(trace.last().max_abs_diff(&target.state) < 1e-12);
        }
        let trace = run_parallel(4, 2, Some(0), &[]).unwrap();
        assert_eq!(trace.states, vec![MultiQueryState::uniform(4, 2).unwrap().state]);
    }

    #[test]
    fn run_parallel_cap() {
        assert!(matches!(run_parallel(64, 4, None, &[]), Err(LabError::CapExceeded { .. })));
    }

    #[test]
    fn projector_examples() {
        let y = 2;
        let c = projector_decomposition_check(&MultiQueryState::basis(4, &[y, y]).unwrap(), y).unwrap();
        assert_eq!((c.lhs, c.rhs), (1.0, 2.0));
        let c = projector_decomposition_check(&MultiQueryState::basis(4, &[y, 0]).unwrap(), y).unwrap();
        assert_eq!((c.lhs, c.rhs), (1.0, 1.0));
        let c = projector_decomposition_check(&MultiQueryState::basis(4, &[1, 3]).unwrap(), y).unwrap();
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
    }

    #[test]
    fn projector_inequality_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let layout = QueryLayout::new(4, 3, 1).unwrap();
        for _ in 0..200 {
            let s = MultiQueryState::new(layout, linalg::random_state(layout.dimension(), &mut rng).unwrap()).unwrap();
            for y in 0..4 {
                let c = projector_decomposition_check(&s, y).unwrap();
                assert!(c.lhs <= c.rhs + 1e-12);
            }
        }
    }

    #[test]
    fn register_count_conservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let layout = QueryLayout::new(4, 2, 1).unwrap();
        let alg = QueryAlgorithm::haar_random(layout, 3, &mut rng).unwrap();
        let trace = alg.run(None).unwrap();
        assert!((register_count_total(&trace).unwrap() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn parallel_report_small_trials() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let layout = QueryLayout::new(4, 2, 1).unwrap();
        for t in 0..=3 {
            let alg = QueryAlgorithm::haar_random(layout, t, &mut rng).unwrap();
            let r = parallel_bound_report(&alg).unwrap();
            assert!(!r.violated(1e-9), "{r:?}");
            assert_eq!(r.s, 2);
            if t == 0 {
                assert_eq!(r.lhs_divergence, 0.0);
                assert_eq!(r.rhs_min(), 0.0);
            }
        }
    }

    #[test]
    fn single_oracle_report_matches_bound_engine() {
        let alg = QueryAlgorithm::new(
            QueryLayout::new(16, 1, 1).unwrap(),
            init_uniform(16).unwrap(),
            vec![InterStep::RegisterDiffusion; 3],
        )
        .unwrap();
        let a = parallel_bound_report(&alg).unwrap();
        let b = bounds::grover_bound_report(16, 3).unwrap();
        assert!((a.lhs_divergence - b.lhs_divergence).abs() < 1e-10);
        assert_eq!(a.rhs_improved, b.rhs_improved);
    }

    #[test]
    fn partition_examples() {
        let p = partition_baseline(1024, 4, 0.999).unwrap();
        assert_eq!(p.per_engine_size, 256);
        assert!((12..=13).contains(&p.t_per_engine), "{p:?}");
        let single = partition_baseline(1024, 1, 0.999).unwrap();
        assert!((24..=25).contains(&single.t_per_engine));
        assert_eq!(p.total_queries, 4 * p.t_per_engine);

        // s = 1 reduces to the first t reaching the target on the full space
        let full = partition_baseline(256, 1, 0.99).unwrap();
        let model = analytic::rotation_angle(256).unwrap();
        assert!(model.success_after(full.t_per_engine as f64) >= 0.99);
        assert!(model.success_after(full.t_per_engine as f64 - 1.0) < 0.99);
        let best = analytic::optimal_iterations(256).unwrap();
        let at_best = partition_baseline(256, 1, best.p_best).unwrap();
        assert_eq!(at_best.t_per_engine, best.t_best);

        let all = partition_baseline(64, 64, 0.99).unwrap();
        assert_eq!((all.t_per_engine, all.success_prob), (0, 1.0));

        assert!(matches!(partition_baseline(10, 3, 0.5), Err(LabError::UnevenPartition { .. })));
        assert!(matches!(partition_baseline(64, 32, 0.99), Err(LabError::Unreachable { .. })));
    }

    #[test]
    fn sqrt_s_speedup() {
        let n = 1 << 16;
        let base = partition_baseline(n, 1, 0.99).unwrap().t_per_engine as f64;
        for s in [4usize, 16] {
            let t = partition_baseline(n, s, 0.99).unwrap().t_per_engine as f64;
            let ratio = (base / t) / (s as f64).sqrt();
            assert!((ratio - 1.0).abs() < 0.05, "s={s} ratio={ratio}");
        }
    }
}
