//! Identifying one of `N` pure states: the lower bound on the distance sum
//! `Σ_y |ψ_y − ψ|²` in terms of the average success probability `p`, its
//! saturation by Grover's final states, and the per-state minimum that
//! leads to it.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::bounds::phase_align;
use crate::error::{LabError, Result};
use crate::grover::{self, QState};
use crate::roots;

/// Relative slack on the distance budget when inverting the bound. Only
/// ever widens the returned ceiling, which keeps it an upper bound when a
/// budget is met with equality up to rounding.
const BUDGET_SLACK: f64 = 1e-12;

/// Candidate states `ψ_y` together with the reference state `ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFamily {
    members: Vec<QState>,
    reference: QState,
}

impl StateFamily {
    /// Rephases every member so that `⟨ψ|ψ_y⟩` is real and non-negative.
    pub fn new(members: Vec<QState>, reference: QState) -> Result<Self> {
        let m = reference.dimension();
        if members.len() < 2 {
            return Err(LabError::InvalidDimension(members.len()));
        }
        if m < members.len() {
            return Err(LabError::Degenerate(format!(
                "basis of size {m} cannot hold {} candidate states",
                members.len()
            )));
        }
        for s in &members {
            if s.dimension() != m {
                return Err(LabError::DimensionMismatch {
                    expected: m,
                    actual: s.dimension(),
                });
            }
        }
        let members = members.iter().map(|s| phase_align(&reference, s)).collect();
        Ok(Self { members, reference })
    }

    pub fn members(&self) -> &[QState] {
        &self.members
    }

    pub fn reference(&self) -> &QState {
        &self.reference
    }

    /// Number of candidate states `N`.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Basis size `M`.
    pub fn dimension(&self) -> usize {
        self.reference.dimension()
    }

    /// Applies the phase convention again. A no-op on a constructed family.
    pub fn rephased(&self) -> Self {
        Self {
            members: self.members.iter().map(|s| phase_align(&self.reference, s)).collect(),
            reference: self.reference.clone(),
        }
    }
}

/// Grover's final states for success probability `p`:
/// `ψ_y = √p |y⟩ + √(1−p) (N−1)^{−1/2} Σ_{y'≠y} |y'⟩`, `ψ` uniform.
pub fn grover_final_family(n: usize, p: f64) -> Result<StateFamily> {
    if n < 2 {
        return Err(LabError::InvalidDimension(n));
    }
    let floor = 1.0 / n as f64;
    if !(floor..=1.0).contains(&p) {
        return Err(LabError::ProbabilityOutOfRange { p, lo: floor, hi: 1.0 });
    }
    let on = p.sqrt();
    let off = ((1.0 - p) / (n - 1) as f64).sqrt();
    let members = (0..n)
        .map(|y| {
            let amps = (0..n)
                .map(|x| Complex64::new(if x == y { on } else { off }, 0.0))
                .collect();
            QState::from_amplitudes(amps)
        })
        .collect::<Result<Vec<_>>>()?;
    StateFamily::new(members, grover::init_uniform(n)?)
}

/// `Σ_y (2 − 2 Re⟨ψ|ψ_y⟩)`.
pub fn distance_sum(family: &StateFamily) -> f64 {
    family
        .members
        .iter()
        .map(|s| 2.0 - 2.0 * family.reference.inner(s).re)
        .sum()
}

/// `2N − 2√N √p − 2√(N(N−1)) √(1−p)`.
///
/// Evaluated as `4N sin²((β − γ)/2)` with `sin β = √p`, `sin γ = 1/√N`,
/// which avoids cancellation near `p = 1/N`.
pub fn bound_value(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let beta = p.clamp(0.0, 1.0).sqrt().asin();
    let gamma = (1.0 / nf.sqrt()).asin();
    4.0 * nf * ((beta - gamma) / 2.0).sin().powi(2)
}

/// Largest `p ∈ [1/N, 1]` with `bound_value(n, p) ≤ d`, by bisection.
pub fn max_p_given_distances(n: usize, d: f64) -> Result<f64> {
    if n < 2 {
        return Err(LabError::InvalidDimension(n));
    }
    let floor = 1.0 / n as f64;
    if d <= 0.0 {
        return Ok(floor);
    }
    let budget = d * (1.0 + BUDGET_SLACK);
    Ok(roots::bisect_last_true(|p| bound_value(n, p) <= budget, floor, 1.0))
}

/// Von Neumann measurement in the family's stored basis: basis index `m`
/// in `assignment[y]` is read as answer `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementScheme {
    assignment: Vec<Vec<usize>>,
}

impl MeasurementScheme {
    /// Validates disjointness and range against a basis of size `m`.
    pub fn new(assignment: Vec<Vec<usize>>, m: usize) -> Result<Self> {
        let mut seen = vec![false; m];
        for (y, set) in assignment.iter().enumerate() {
            for &idx in set {
                if idx >= m {
                    return Err(LabError::InvalidScheme(format!("index {idx} for answer {y} outside [0, {m})")));
                }
                if seen[idx] {
                    return Err(LabError::InvalidScheme(format!("index {idx} assigned to more than one answer")));
                }
                seen[idx] = true;
            }
        }
        Ok(Self { assignment })
    }

    /// `M_y = {y}`.
    pub fn computational(n: usize, m: usize) -> Result<Self> {
        Self::new((0..n).map(|y| vec![y]).collect(), m)
    }

    /// Every basis index goes to a uniformly random answer.
    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Self {
        let mut assignment = vec![Vec::new(); n];
        for idx in 0..m {
            assignment[rng.random_range(0..n)].push(idx);
        }
        Self { assignment }
    }

    pub fn assignment(&self) -> &[Vec<usize>] {
        &self.assignment
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    pub p_avg: f64,
    pub p_y: Vec<f64>,
    pub a_y: Vec<f64>,
}

pub fn measurement_success(family: &StateFamily, scheme: &MeasurementScheme) -> Result<MeasurementOutcome> {
    if scheme.assignment.len() != family.len() {
        return Err(LabError::InvalidScheme(format!(
            "{} answer sets for {} states",
            scheme.assignment.len(),
            family.len()
        )));
    }
    // revalidate against this family's basis size
    MeasurementScheme::new(scheme.assignment.clone(), family.dimension())?;
    let weight = |state: &QState, set: &[usize]| -> f64 {
        set.iter().map(|&m| state.amplitudes()[m].norm_sqr()).sum()
    };
    let p_y: Vec<f64> = family
        .members
        .iter()
        .zip(&scheme.assignment)
        .map(|(s, set)| weight(s, set))
        .collect();
    let a_y = scheme.assignment.iter().map(|set| weight(&family.reference, set)).collect();
    let p_avg = p_y.iter().sum::<f64>() / family.len() as f64;
    Ok(MeasurementOutcome { p_avg, p_y, a_y })
}

/// Least `|ψ_y − ψ|²` for fixed `p_y` and `a_y`:
/// `2 − 2(√(p_y a_y) + √((1−p_y)(1−a_y)))`.
pub fn per_y_minimum(p_y: f64, a_y: f64) -> f64 {
    let p = p_y.clamp(0.0, 1.0);
    let a = a_y.clamp(0.0, 1.0);
    2.0 - 2.0 * ((p * a).sqrt() + ((1.0 - p) * (1.0 - a)).sqrt())
}

/// Summary of the Monte Carlo check of the constrained minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangeReport {
    /// `Σ_y per_y_minimum` at `a_y = 1/N`, `p_y = p`.
    pub at_stationary_point: f64,
    pub bound: f64,
    pub trials: usize,
    /// Smallest `Σ_y per_y_minimum − bound` seen over all perturbations.
    pub min_margin: f64,
    /// Trials whose margin fell below `−1e-9`.
    pub undercuts: usize,
    /// Smallest Cholesky pivot of the finite-difference reduced Hessian
    /// over the spot-check points; positive means positive definite.
    pub min_hessian_pivot: f64,
    pub hessian_points: usize,
}

/// Random `a` on the simplex. A small concentration pushes mass to a few
/// coordinates, so some `a_y` land near 0.
fn random_simplex<R: Rng + ?Sized>(n: usize, concentration: f64, rng: &mut R) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("positive shape");
    let mut v: Vec<f64> = (0..n).map(|_| gamma.sample(rng).max(1e-300)).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

/// Random `p_y ∈ [0, 1]` with mean exactly `p`.
fn random_success_profile<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = raw.iter().sum::<f64>() / n as f64;
    let dir: Vec<f64> = raw.iter().map(|x| x - mean).collect();
    // largest step keeping every coordinate inside [0, 1]
    let mut reach = f64::INFINITY;
    for &d in &dir {
        if d > 0.0 {
            reach = reach.min((1.0 - p) / d);
        } else if d < 0.0 {
            reach = reach.min(p / -d);
        }
    }
    if !reach.is_finite() {
        return vec![p; n];
    }
    let step = reach * rng.random_range(0.0..=1.0);
    dir.iter().map(|d| (p + step * d).clamp(0.0, 1.0)).collect()
}

fn objective(p_y: &[f64], a_y: &[f64]) -> f64 {
    p_y.iter().zip(a_y).map(|(&p, &a)| per_y_minimum(p, a)).sum()
}

/// Objective in reduced coordinates: free `a_1..` and, unless `p` is
/// pinned at 1, free `p_1..`; `a_0 = 1 − Σ a_y` and `p_0 = N p − Σ p_y`.
fn reduced_objective(n: usize, p: f64, free: &[f64]) -> f64 {
    let (a_free, p_free) = free.split_at(n - 1);
    let mut a = Vec::with_capacity(n);
    a.push(1.0 - a_free.iter().sum::<f64>());
    a.extend_from_slice(a_free);
    let q = if p_free.is_empty() {
        vec![p; n]
    } else {
        let mut q = Vec::with_capacity(n);
        q.push(n as f64 * p - p_free.iter().sum::<f64>());
        q.extend_from_slice(p_free);
        q
    };
    objective(&q, &a)
}

/// Smallest pivot of a Cholesky factorization, or a negative value as soon
/// as one pivot is non-positive.
fn min_cholesky_pivot(mut h: Vec<Vec<f64>>) -> f64 {
    let k = h.len();
    let mut min_pivot = f64::INFINITY;
    for j in 0..k {
        let d = h[j][j] - h[j][..j].iter().map(|v| v * v).sum::<f64>();
        if d <= 0.0 {
            return d;
        }
        min_pivot = min_pivot.min(d);
        let r = d.sqrt();
        h[j][j] = r;
        for i in j + 1..k {
            let s = h[i][j] - h[i][..j].iter().zip(&h[j][..j]).map(|(a, b)| a * b).sum::<f64>();
            h[i][j] = s / r;
        }
    }
    min_pivot
}

fn reduced_hessian(n: usize, p: f64, point: &[f64], h: f64) -> Vec<Vec<f64>> {
    let k = point.len();
    let f = |x: &[f64]| reduced_objective(n, p, x);
    let mut out = vec![vec![0.0; k]; k];
    let mut x = point.to_vec();
    for i in 0..k {
        for j in i..k {
            let mut eval = |di: f64, dj: f64| {
                x[i] += di;
                x[j] += dj;
                let v = f(&x);
                x[i] -= di;
                x[j] -= dj;
                v
            };
            let v = (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4.0 * h * h);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// Monte Carlo check that `a_y = 1/N`, `p_y = p` minimizes
/// `Σ_y per_y_minimum(p_y, a_y)` under `Σ a_y = 1` and mean `p_y = p`,
/// plus a finite-difference Hessian spot check at interior points.
pub fn lagrange_optimum_check<R: Rng + ?Sized>(n: usize, p: f64, trials: usize, rng: &mut R) -> Result<LagrangeReport> {
    if n < 2 {
        return Err(LabError::InvalidDimension(n));
    }
    let floor = 1.0 / n as f64;
    if !(floor..=1.0).contains(&p) {
        return Err(LabError::ProbabilityOutOfRange { p, lo: floor, hi: 1.0 });
    }
    let bound = bound_value(n, p);
    let at_stationary_point = objective(&vec![p; n], &vec![floor; n]);

    let mut min_margin = at_stationary_point - bound;
    let mut undercuts = 0;
    for trial in 0..trials {
        // every third trial crowds the reference weight onto few answers
        let concentration = if trial % 3 == 2 { 0.05 } else { 1.0 };
        let a = random_simplex(n, concentration, rng);
        let q = random_success_profile(n, p, rng);
        let margin = objective(&q, &a) - bound;
        if margin < -1e-9 {
            undercuts += 1;
        }
        min_margin = min_margin.min(margin);
    }

    let hessian_points = 10;
    let mut min_hessian_pivot = f64::INFINITY;
    for _ in 0..hessian_points {
        // interior points keep the finite differences away from the √ kinks
        let a: Vec<f64> = random_simplex(n, 4.0, rng).iter().map(|x| 0.5 * x + 0.5 / n as f64).collect();
        let mut point = a[1..].to_vec();
        if p < 1.0 {
            let q: Vec<f64> = random_success_profile(n, p, rng).iter().map(|x| 0.5 * x + 0.5 * p).collect();
            point.extend_from_slice(&q[1..]);
        }
        let hess = reduced_hessian(n, p, &point, 1e-4);
        min_hessian_pivot = min_hessian_pivot.min(min_cholesky_pivot(hess));
    }

    Ok(LagrangeReport {
        at_stationary_point,
        bound,
        trials,
        min_margin,
        undercuts,
        min_hessian_pivot,
        hessian_points,
    })
}

/// Random family of `n` states in dimension `m` with a random reference.
pub fn random_family<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<StateFamily> {
    let members = (0..n)
        .map(|_| crate::linalg::random_state(m, rng))
        .collect::<Result<Vec<_>>>()?;
    StateFamily::new(members, crate::linalg::random_state(m, rng)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn direct_bound(n: usize, p: f64) -> f64 {
        let nf = n as f64;
        2.0 * nf - 2.0 * nf.sqrt() * p.sqrt() - 2.0 * (nf * (nf - 1.0)).sqrt() * (1.0 - p).sqrt()
    }

    #[test]
    fn bound_forms_agree() {
        for n in [2usize, 4, 16, 64, 1000] {
            for i in 0..=20 {
                let p = i as f64 / 20.0;
                assert!((bound_value(n, p) - direct_bound(n, p)).abs() < 1e-10 * n as f64);
            }
        }
    }

    #[test]
    fn bound_examples() {
        for n in [2usize, 4, 16, 999] {
            assert!(bound_value(n, 1.0 / n as f64).abs() < 1e-13);
        }
        assert!((bound_value(4, 1.0) - 4.0).abs() < 1e-14);
        for n in [4usize, 16, 64] {
            let floor = 1.0 / n as f64;
            let mut prev = 0.0;
            for i in 1..=200 {
                let p = floor + (1.0 - floor) * i as f64 / 200.0;
                let v = bound_value(n, p);
                assert!(v > prev);
                prev = v;
            }
        }
    }

    #[test]
    fn family_examples() {
        let f = grover_final_family(4, 1.0).unwrap();
        for (y, s) in f.members().iter().enumerate() {
            assert!(s.max_abs_diff(&QState::basis(4, y).unwrap()) < 1e-15);
        }
        let f = grover_final_family(4, 0.25).unwrap();
        for s in f.members() {
            assert!(s.max_abs_diff(f.reference()) < 1e-15);
        }
        let f = grover_final_family(16, 0.5).unwrap();
        let ov = f.members()[0].inner(&f.members()[1]);
        for a in 0..16 {
            for b in 0..16 {
                if a != b {
                    assert!((f.members()[a].inner(&f.members()[b]) - ov).norm() < 1e-14);
                }
            }
        }
        assert!(grover_final_family(4, 0.2).is_err());
        assert!(grover_final_family(4, 1.1).is_err());
    }

    #[test]
    fn distance_examples() {
        assert!((distance_sum(&grover_final_family(4, 1.0).unwrap()) - 4.0).abs() < 1e-14);
        let u = grover::init_uniform(5).unwrap();
        let same = StateFamily::new(vec![u.clone(); 5], u).unwrap();
        assert!(distance_sum(&same).abs() < 1e-14);
        for n in [4usize, 16, 64] {
            for i in 0..=10 {
                let p = 1.0 / n as f64 + (1.0 - 1.0 / n as f64) * i as f64 / 10.0;
                let f = grover_final_family(n, p).unwrap();
                assert!((distance_sum(&f) - bound_value(n, p)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn measurement_examples() {
        let basis: Vec<_> = (0..4).map(|y| QState::basis(4, y).unwrap()).collect();
        let orth = StateFamily::new(basis, grover::init_uniform(4).unwrap()).unwrap();
        let scheme = MeasurementScheme::computational(4, 4).unwrap();
        let out = measurement_success(&orth, &scheme).unwrap();
        assert!((out.p_avg - 1.0).abs() < 1e-15);
        assert!(out.a_y.iter().all(|a| (a - 0.25).abs() < 1e-15));

        let f = grover_final_family(8, 0.6).unwrap();
        let out = measurement_success(&f, &MeasurementScheme::computational(8, 8).unwrap()).unwrap();
        assert!((out.p_avg - 0.6).abs() < 1e-14);

        let empty = MeasurementScheme::new(vec![vec![]; 8], 8).unwrap();
        assert_eq!(measurement_success(&f, &empty).unwrap().p_avg, 0.0);

        assert!(MeasurementScheme::new(vec![vec![0, 1], vec![1]], 4).is_err());
        assert!(MeasurementScheme::new(vec![vec![5]], 4).is_err());
    }

    #[test]
    fn per_y_examples() {
        for a in [0.0, 0.3, 1.0] {
            assert!(per_y_minimum(a, a).abs() < 1e-15);
        }
        assert!((per_y_minimum(1.0, 0.25) - 1.0).abs() < 1e-15);
        assert!((per_y_minimum(1.0, 0.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn per_y_minimum_is_attained_and_never_beaten() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        // a single state in dimension 3: answer set {0}, reference fixed
        let reference = QState::normalized(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(0.3, 0.2),
            Complex64::new(-0.4, 0.1),
        ])
        .unwrap();
        let a = reference.amplitudes()[0].norm_sqr();
        for _ in 0..2000 {
            let s = crate::linalg::random_state(3, &mut rng).unwrap();
            let s = phase_align(&reference, &s);
            let p = s.amplitudes()[0].norm_sqr();
            assert!(s.distance_sqr(&reference) >= per_y_minimum(p, a) - 1e-12);
        }
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(max_p_given_distances(7, 0.0).unwrap(), 1.0 / 7.0);
        assert_eq!(max_p_given_distances(4, 4.0).unwrap(), 1.0);
        for n in [4usize, 16, 64, 1000] {
            let d = bound_value(n, 0.5);
            assert!((max_p_given_distances(n, d).unwrap() - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn inversion_matches_closed_form() {
        // bound_value ≤ d  ⇔  β ≤ γ + 2 asin(√(d/4N))
        for n in [3usize, 16, 256] {
            let gamma = (1.0 / (n as f64).sqrt()).asin();
            for i in 1..40 {
                let d = 0.05 * i as f64 * n as f64 / 10.0;
                let beta = (gamma + 2.0 * (d / (4.0 * n as f64)).sqrt().min(1.0).asin()).min(std::f64::consts::FRAC_PI_2);
                let closed = beta.sin().powi(2);
                let bisected = max_p_given_distances(n, d).unwrap();
                assert!((closed - bisected).abs() < 1e-10, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn lagrange_stationary_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = lagrange_optimum_check(4, 0.7, 0, &mut rng).unwrap();
        assert!((r.at_stationary_point - r.bound).abs() < 1e-12);
        let r = lagrange_optimum_check(4, 0.7, 2000, &mut rng).unwrap();
        assert_eq!(r.undercuts, 0);
        assert!(r.min_margin >= -1e-9);
        assert!(r.min_hessian_pivot > 0.0, "{r:?}");
        assert!(lagrange_optimum_check(4, 0.1, 10, &mut rng).is_err());
    }

    #[test]
    fn random_profiles_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..200 {
            let a = random_simplex(6, 0.05, &mut rng);
            assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let q = random_success_profile(6, 0.8, &mut rng);
            assert!(q.iter().all(|x| (0.0..=1.0).contains(x)));
            assert!((q.iter().sum::<f64>() / 6.0 - 0.8).abs() < 1e-12);
        }
    }

    #[test]
    fn rephasing_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = random_family(4, 6, &mut rng).unwrap();
        let again = f.rephased();
        for (a, b) in f.members().iter().zip(again.members()) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
        for s in f.members() {
            let ov = f.reference().inner(s);
            assert!(ov.im.abs() < 1e-14 && ov.re >= 0.0);
        }
    }
}
