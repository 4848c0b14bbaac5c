//! Exact state-vector simulation of Grover's search, in the full
//! N-dimensional form and in the reduced two-dimensional rotation form.

use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Tolerance on `Σ|a|² = 1` when a state is built from caller data.
pub const NORM_TOL: f64 = 1e-12;

/// Pure state over a finite computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QState {
    amplitudes: Vec<Complex64>,
}

impl QState {
    /// Wraps amplitudes that are already normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(LabError::InvalidDimension(amplitudes.len()));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(LabError::NotNormalized(norm_sqr));
        }
        Ok(Self { amplitudes })
    }

    /// Scales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(LabError::InvalidDimension(amplitudes.len()));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(LabError::NotNormalized(norm * norm));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dimension: usize, index: usize) -> Result<Self> {
        if dimension < 2 {
            return Err(LabError::InvalidDimension(dimension));
        }
        if index >= dimension {
            return Err(LabError::MarkedOutOfRange {
                marked: index,
                n: dimension,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dimension];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// Crate-internal constructor for amplitudes produced by unitary maps.
    pub(crate) fn from_unitary_image(amplitudes: Vec<Complex64>) -> Self {
        debug_assert!(amplitudes.len() >= 2);
        Self { amplitudes }
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &QState) -> Complex64 {
        debug_assert_eq!(self.dimension(), other.dimension());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|self − other|²` with no rephasing.
    pub fn distance_sqr(&self, other: &QState) -> f64 {
        debug_assert_eq!(self.dimension(), other.dimension());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }

    /// Largest componentwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &QState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Multiplies every amplitude by a unit phase.
    pub fn with_phase(&self, phase: Complex64) -> QState {
        QState {
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }

    fn check_dimension(&self, expected: usize) -> Result<()> {
        if self.dimension() != expected {
            return Err(LabError::DimensionMismatch {
                expected,
                actual: self.dimension(),
            });
        }
        Ok(())
    }
}

/// Single-marked oracle over `n` inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSpec {
    n: usize,
    marked: usize,
}

impl OracleSpec {
    pub fn new(n: usize, marked: usize) -> Result<Self> {
        if n < 2 {
            return Err(LabError::InvalidDimension(n));
        }
        if marked >= n {
            return Err(LabError::MarkedOutOfRange { marked, n });
        }
        Ok(Self { n, marked })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn marked(&self) -> usize {
        self.marked
    }
}

/// Coefficients on the uniform-over-unmarked state and on `|y⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub a_unmarked: f64,
    pub b_marked: f64,
}

impl ReducedState {
    /// Reduced form of the uniform state: `(cos φ/2, sin φ/2)`.
    pub fn initial(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(LabError::InvalidDimension(n));
        }
        let n = n as f64;
        Ok(Self {
            a_unmarked: ((n - 1.0) / n).sqrt(),
            b_marked: (1.0 / n).sqrt(),
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a_unmarked * self.a_unmarked + self.b_marked * self.b_marked
    }

    pub fn success_probability(&self) -> f64 {
        self.b_marked * self.b_marked
    }

    /// Embeds the pair back into the full space for the given oracle.
    pub fn to_state(&self, oracle: &OracleSpec) -> QState {
        let n = oracle.n();
        let spread = self.a_unmarked / ((n - 1) as f64).sqrt();
        let mut amplitudes = vec![Complex64::new(spread, 0.0); n];
        amplitudes[oracle.marked()] = Complex64::new(self.b_marked, 0.0);
        QState { amplitudes }
    }
}

/// A sequence of states `φ_0, …, φ_T`, each taken just before the next
/// oracle call.
pub type Trace = Vec<QState>;

/// Uniform superposition over `n` basis states.
pub fn init_uniform(n: usize) -> Result<QState> {
    if n < 2 {
        return Err(LabError::InvalidDimension(n));
    }
    let a = 1.0 / (n as f64).sqrt();
    Ok(QState {
        amplitudes: vec![Complex64::new(a, 0.0); n],
    })
}

/// Phase oracle: negates the marked amplitude.
pub fn apply_oracle(state: &QState, oracle: &OracleSpec) -> Result<QState> {
    state.check_dimension(oracle.n())?;
    let mut out = state.clone();
    out.amplitudes[oracle.marked()] = -out.amplitudes[oracle.marked()];
    Ok(out)
}

/// Inversion about the mean, `(2|u⟩⟨u| − I)`. Works for any dimension.
pub fn apply_diffusion(state: &QState) -> QState {
    let mut out = state.clone();
    diffuse_in_place(&mut out.amplitudes);
    out
}

pub(crate) fn diffuse_in_place(amplitudes: &mut [Complex64]) {
    let n = amplitudes.len() as f64;
    let twice_mean = amplitudes.iter().sum::<Complex64>() * (2.0 / n);
    for a in amplitudes.iter_mut() {
        *a = twice_mean - *a;
    }
}

/// In-place Walsh–Hadamard transform `H^{⊗l}`, normalized by `1/√N`.
///
/// # Panics
/// If the length is not a power of two.
pub fn walsh_hadamard(amplitudes: &mut [Complex64]) {
    let n = amplitudes.len();
    assert!(n.is_power_of_two(), "Walsh-Hadamard needs a power-of-two length, got {n}");
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (x, y) = (amplitudes[i], amplitudes[i + h]);
                amplitudes[i] = x + y;
                amplitudes[i + h] = x - y;
            }
        }
        h *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    for a in amplitudes.iter_mut() {
        *a *= scale;
    }
}

/// Qubit-level diffusion: `H^l`, sign flip on every `|x⟩` with `x ≠ 0`,
/// `H^l`. Only defined for power-of-two dimensions.
pub fn apply_diffusion_walsh(state: &QState) -> Result<QState> {
    let n = state.dimension();
    if !n.is_power_of_two() {
        return Err(LabError::InvalidDimension(n));
    }
    let mut out = state.clone();
    walsh_hadamard(&mut out.amplitudes);
    for a in out.amplitudes.iter_mut().skip(1) {
        *a = -*a;
    }
    walsh_hadamard(&mut out.amplitudes);
    Ok(out)
}

/// One Grover iteration: oracle, then diffusion.
pub fn grover_step(state: &QState, oracle: &OracleSpec) -> Result<QState> {
    let mut out = apply_oracle(state, oracle)?;
    diffuse_in_place(&mut out.amplitudes);
    Ok(out)
}

/// Runs `steps` iterations from `state` and keeps every intermediate state.
pub fn grover_iterate(state: &QState, oracle: &OracleSpec, steps: usize) -> Result<Trace> {
    state.check_dimension(oracle.n())?;
    let mut trace = Vec::with_capacity(steps + 1);
    trace.push(state.clone());
    for _ in 0..steps {
        let next = grover_step(trace.last().expect("non-empty"), oracle)?;
        trace.push(next);
    }
    Ok(trace)
}

/// Streaming variant of [`grover_iterate`] that keeps only the final state.
pub fn grover_final(state: &QState, oracle: &OracleSpec, steps: usize) -> Result<QState> {
    state.check_dimension(oracle.n())?;
    let marked = oracle.marked();
    let mut amplitudes = state.amplitudes.clone();
    for _ in 0..steps {
        amplitudes[marked] = -amplitudes[marked];
        diffuse_in_place(&mut amplitudes);
    }
    Ok(QState { amplitudes })
}

/// The (A, B) recurrence: a rotation by φ with `cos φ = 1 − 2/n`.
pub fn reduced_step(state: &ReducedState, n: usize) -> Result<ReducedState> {
    if n < 2 {
        return Err(LabError::InvalidDimension(n));
    }
    let nf = n as f64;
    let c = 1.0 - 2.0 / nf;
    let s = 2.0 * (nf - 1.0).sqrt() / nf;
    Ok(ReducedState {
        a_unmarked: c * state.a_unmarked - s * state.b_marked,
        b_marked: s * state.a_unmarked + c * state.b_marked,
    })
}

/// `|⟨y|state⟩|²`.
pub fn success_probability(state: &QState, oracle: &OracleSpec) -> Result<f64> {
    state.check_dimension(oracle.n())?;
    Ok(state.amplitudes[oracle.marked()].norm_sqr())
}

/// Grover's circuit with every oracle call replaced by the identity.
pub fn empty_oracle_run(n: usize, steps: usize) -> Result<Trace> {
    let mut trace = Vec::with_capacity(steps + 1);
    trace.push(init_uniform(n)?);
    for _ in 0..steps {
        let next = apply_diffusion(trace.last().expect("non-empty"));
        trace.push(next);
    }
    Ok(trace)
}

/// Norm of the component of `state` outside span{|y⟩, uniform over x ≠ y}.
pub fn subspace_residual(state: &QState, oracle: &OracleSpec) -> Result<f64> {
    state.check_dimension(oracle.n())?;
    let y = oracle.marked();
    let rest = (oracle.n() - 1) as f64;
    let mean_unmarked = state
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(x, _)| *x != y)
        .map(|(_, a)| *a)
        .sum::<Complex64>()
        / rest;
    let residual: f64 = state
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(x, _)| *x != y)
        .map(|(_, a)| (a - mean_unmarked).norm_sqr())
        .sum();
    Ok(residual.sqrt())
}
