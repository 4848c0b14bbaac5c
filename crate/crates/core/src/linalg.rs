//! Small dense complex linear algebra: unitaries, random states, and
//! Haar-distributed sampling.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{LabError, Result};
use crate::grover::QState;

/// Square complex matrix stored row-major, assumed unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseUnitary {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries, rejecting non-unitary input.
    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(LabError::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        let m = Self { dim, data };
        let dev = m.unitarity_defect();
        if dev > 1e-10 {
            return Err(LabError::Degenerate(format!("matrix is not unitary (defect {dev:e})")));
        }
        Ok(m)
    }

    /// Haar-random unitary: orthonormalize the columns of a complex
    /// Gaussian matrix with modified Gram–Schmidt.
    pub fn haar<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| (0..dim).map(|_| gaussian(rng)).collect())
            .collect();
        for j in 0..dim {
            // two passes keep the columns orthogonal to machine precision
            for _ in 0..2 {
                for k in 0..j {
                    let (done, rest) = cols.split_at_mut(j);
                    let proj: Complex64 = done[k].iter().zip(&rest[0]).map(|(q, v)| q.conj() * v).sum();
                    for (v, q) in rest[0].iter_mut().zip(&done[k]) {
                        *v -= proj * q;
                    }
                }
            }
            let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            for v in cols[j].iter_mut() {
                *v /= norm;
            }
        }
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                data[i * dim + j] = *v;
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn apply(&self, state: &QState) -> Result<QState> {
        if state.dimension() != self.dim {
            return Err(LabError::DimensionMismatch {
                expected: self.dim,
                actual: state.dimension(),
            });
        }
        Ok(QState::from_unitary_image(self.apply_slice(state.amplitudes())))
    }

    pub(crate) fn apply_slice(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseUnitary) -> DenseUnitary {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        DenseUnitary { dim: d, data }
    }

    /// Largest entry of `|U†U − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let dot: Complex64 = (0..d).map(|k| self.data[k * d + i].conj() * self.data[k * d + j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Uniformly random pure state of the given dimension.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<QState> {
    QState::normalized((0..dim).map(|_| gaussian(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [2, 5, 16, 64] {
            let u = DenseUnitary::haar(dim, &mut rng);
            assert!(u.unitarity_defect() < 1e-12, "dim {dim}");
        }
    }

    #[test]
    fn haar_is_seed_deterministic() {
        let a = DenseUnitary::haar(8, &mut ChaCha8Rng::seed_from_u64(3));
        let b = DenseUnitary::haar(8, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn haar_first_entry_has_haar_moment() {
        // E|U_00|² = 1/d under the Haar measure
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = 4;
        let trials = 4000;
        let mean: f64 = (0..trials)
            .map(|_| DenseUnitary::haar(d, &mut rng).entry(0, 0).norm_sqr())
            .sum::<f64>()
            / trials as f64;
        assert!((mean - 0.25).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn apply_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = DenseUnitary::haar(12, &mut rng);
        let s = random_state(12, &mut rng).unwrap();
        let out = u.apply(&s).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(u.apply(&random_state(4, &mut rng).unwrap()).is_err());
    }

    #[test]
    fn from_rows_validates() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ok = DenseUnitary::from_rows(
            2,
            vec![h, h, h, -h].into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        );
        assert!(ok.is_ok());
        let bad = DenseUnitary::from_rows(2, vec![Complex64::new(1.0, 0.0); 4]);
        assert!(bad.is_err());
        let prod = ok.as_ref().unwrap().matmul(ok.as_ref().unwrap());
        assert!(prod.unitarity_defect() < 1e-15);
        assert!((prod.entry(0, 0).re - 1.0).abs() < 1e-15);
    }
}
