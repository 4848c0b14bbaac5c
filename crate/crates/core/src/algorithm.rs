//! General query algorithms: a register layout, an initial state, and one
//! oracle-independent unitary after every oracle round.
//!
//! A basis index encodes `S` query registers (each in `[0, n)`) followed by
//! a workspace register of size `w`:
//! `index = ((x_0·n + x_1)·n + … + x_{S−1})·w + j`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{LabError, Result};
use crate::grover::{self, QState};
use crate::linalg::DenseUnitary;

/// Largest composite dimension we are willing to simulate.
pub const MAX_COMPOSITE_DIM: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryLayout {
    n: usize,
    registers: usize,
    workspace: usize,
    dimension: usize,
}

impl QueryLayout {
    pub fn new(n: usize, registers: usize, workspace: usize) -> Result<Self> {
        if n < 2 {
            return Err(LabError::InvalidDimension(n));
        }
        if registers == 0 || workspace == 0 {
            return Err(LabError::Degenerate("need at least one register and workspace size ≥ 1".into()));
        }
        let cap_err = LabError::CapExceeded {
            n,
            s: registers,
            cap: MAX_COMPOSITE_DIM,
        };
        let mut dimension = workspace;
        for _ in 0..registers {
            dimension = dimension.checked_mul(n).ok_or(cap_err.clone())?;
            if dimension > MAX_COMPOSITE_DIM {
                return Err(cap_err);
            }
        }
        Ok(Self {
            n,
            registers,
            workspace,
            dimension,
        })
    }

    /// Plain Grover layout: one query register, no workspace.
    pub fn single(n: usize) -> Result<Self> {
        Self::new(n, 1, 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn registers(&self) -> usize {
        self.registers
    }

    pub fn workspace(&self) -> usize {
        self.workspace
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Value of query register `k` in basis state `index`.
    pub fn digit(&self, index: usize, k: usize) -> usize {
        let mut rest = index / self.workspace;
        for _ in 0..(self.registers - 1 - k) {
            rest /= self.n;
        }
        rest % self.n
    }

    /// Number of registers querying `y` in basis state `index`.
    pub fn hits(&self, index: usize, y: usize) -> usize {
        let mut rest = index / self.workspace;
        let mut count = 0;
        for _ in 0..self.registers {
            if rest % self.n == y {
                count += 1;
            }
            rest /= self.n;
        }
        count
    }

    fn check_state(&self, state: &QState) -> Result<()> {
        if state.dimension() != self.dimension {
            return Err(LabError::DimensionMismatch {
                expected: self.dimension,
                actual: state.dimension(),
            });
        }
        Ok(())
    }

    fn check_marked(&self, y: usize) -> Result<()> {
        if y >= self.n {
            return Err(LabError::MarkedOutOfRange { marked: y, n: self.n });
        }
        Ok(())
    }

    /// All oracles answer at once: `(−1)^{#k : x_k = y}`.
    pub fn apply_oracle(&self, state: &QState, y: usize) -> Result<QState> {
        self.check_state(state)?;
        self.check_marked(y)?;
        let amplitudes = state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| if self.hits(i, y) % 2 == 1 { -a } else { *a })
            .collect();
        Ok(QState::from_unitary_image(amplitudes))
    }

    /// `|P_y φ|²` where `P_y` selects basis states with any register on `y`.
    pub fn query_mass(&self, state: &QState, y: usize) -> Result<f64> {
        self.check_state(state)?;
        self.check_marked(y)?;
        Ok(state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| self.hits(*i, y) > 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// `|P^k_y φ|²`: register `k` alone on `y`.
    pub fn register_mass(&self, state: &QState, y: usize, k: usize) -> Result<f64> {
        self.check_state(state)?;
        self.check_marked(y)?;
        if k >= self.registers {
            return Err(LabError::Degenerate(format!("register {k} out of range")));
        }
        Ok(state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| self.digit(*i, k) == y)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    pub fn uniform(&self) -> QState {
        grover::init_uniform(self.dimension).expect("layout dimension ≥ 2")
    }
}

/// Unitary applied between oracle rounds.
#[derive(Debug, Clone, PartialEq)]
pub enum InterStep {
    Identity,
    /// Reflection about the uniform state of the whole composite space.
    Diffusion,
    /// Reflection about the uniform state of every query register
    /// separately (tensor product of diffusions, identity on workspace).
    RegisterDiffusion,
    Dense(DenseUnitary),
}

impl InterStep {
    pub fn apply(&self, layout: &QueryLayout, state: &QState) -> Result<QState> {
        layout.check_state(state)?;
        match self {
            InterStep::Identity => Ok(state.clone()),
            InterStep::Diffusion => Ok(grover::apply_diffusion(state)),
            InterStep::RegisterDiffusion => {
                let mut amps = state.amplitudes().to_vec();
                let n = layout.n;
                let mut stride = layout.workspace;
                for _ in 0..layout.registers {
                    // reflect along this register's axis for every setting of the others
                    let block = stride * n;
                    for base in (0..amps.len()).step_by(block) {
                        for offset in 0..stride {
                            let start = base + offset;
                            let twice_mean = (0..n).map(|x| amps[start + x * stride]).sum::<Complex64>()
                                * (2.0 / n as f64);
                            for x in 0..n {
                                let a = &mut amps[start + x * stride];
                                *a = twice_mean - *a;
                            }
                        }
                    }
                    stride = block;
                }
                Ok(QState::from_unitary_image(amps))
            }
            InterStep::Dense(u) => u.apply(state),
        }
    }
}

/// Sequence of states before each oracle round, plus the final state.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryTrace {
    pub layout: QueryLayout,
    pub states: Vec<QState>,
}

impl QueryTrace {
    /// Number of oracle rounds `T`.
    pub fn queries(&self) -> usize {
        self.states.len() - 1
    }

    pub fn last(&self) -> &QState {
        self.states.last().expect("trace is never empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryAlgorithm {
    layout: QueryLayout,
    initial: QState,
    steps: Vec<InterStep>,
}

impl QueryAlgorithm {
    pub fn new(layout: QueryLayout, initial: QState, steps: Vec<InterStep>) -> Result<Self> {
        layout.check_state(&initial)?;
        for step in &steps {
            if let InterStep::Dense(u) = step {
                if u.dim() != layout.dimension {
                    return Err(LabError::DimensionMismatch {
                        expected: layout.dimension,
                        actual: u.dim(),
                    });
                }
            }
        }
        Ok(Self { layout, initial, steps })
    }

    /// Grover's algorithm with `t` oracle calls.
    pub fn grover(n: usize, t: usize) -> Result<Self> {
        let layout = QueryLayout::single(n)?;
        Self::new(layout, layout.uniform(), vec![InterStep::Diffusion; t])
    }

    /// `S` independent Grover searches over the full space, run in lockstep.
    pub fn tensor_grover(n: usize, s: usize, t: usize) -> Result<Self> {
        let layout = QueryLayout::new(n, s, 1)?;
        Self::new(layout, layout.uniform(), vec![InterStep::RegisterDiffusion; t])
    }

    /// Haar-random inter-step unitaries, starting from the uniform state.
    pub fn haar_random<R: Rng + ?Sized>(layout: QueryLayout, t: usize, rng: &mut R) -> Result<Self> {
        let steps = (0..t)
            .map(|_| InterStep::Dense(DenseUnitary::haar(layout.dimension, rng)))
            .collect();
        Self::new(layout, layout.uniform(), steps)
    }

    pub fn with_initial(mut self, initial: QState) -> Result<Self> {
        self.layout.check_state(&initial)?;
        self.initial = initial;
        Ok(self)
    }

    pub fn layout(&self) -> &QueryLayout {
        &self.layout
    }

    pub fn initial(&self) -> &QState {
        &self.initial
    }

    pub fn steps(&self) -> &[InterStep] {
        &self.steps
    }

    pub fn queries(&self) -> usize {
        self.steps.len()
    }

    /// `U^y_i φ`: oracle round for `y`, then step `i`.
    pub fn marked_step(&self, i: usize, y: usize, state: &QState) -> Result<QState> {
        let queried = self.layout.apply_oracle(state, y)?;
        self.steps[i].apply(&self.layout, &queried)
    }

    /// `U_i φ`: the same round with the empty oracle.
    pub fn empty_step(&self, i: usize, state: &QState) -> Result<QState> {
        self.steps[i].apply(&self.layout, state)
    }

    /// Runs with the oracle marking `y`, or with the empty oracle for `None`.
    pub fn run(&self, marked: Option<usize>) -> Result<QueryTrace> {
        let mut states = Vec::with_capacity(self.steps.len() + 1);
        states.push(self.initial.clone());
        for i in 0..self.steps.len() {
            let prev = states.last().expect("non-empty");
            let next = match marked {
                Some(y) => self.marked_step(i, y, prev)?,
                None => self.empty_step(i, prev)?,
            };
            states.push(next);
        }
        Ok(QueryTrace {
            layout: self.layout,
            states,
        })
    }

    /// Final state only.
    pub fn run_final(&self, marked: Option<usize>) -> Result<QState> {
        let mut state = self.initial.clone();
        for i in 0..self.steps.len() {
            state = match marked {
                Some(y) => self.marked_step(i, y, &state)?,
                None => self.empty_step(i, &state)?,
            };
        }
        Ok(state)
    }
}
