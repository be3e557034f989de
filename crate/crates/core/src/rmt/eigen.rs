use super::matrix::SymmetricMatrix;
use crate::error::{domain, Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in nondecreasing order together with the solver tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    tol: f64,
}

impl Spectrum {
    /// Wraps externally supplied eigenvalues; they are sorted on entry.
    pub fn new(mut values: Vec<f64>, tol: f64) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values, tol }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn spectral_norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }
}

/// Cyclic Jacobi eigenvalue iteration.
///
/// Sweeps over all `(p, q)` pairs annihilating each off-diagonal entry with a
/// plane rotation, until the largest off-diagonal magnitude is at most
/// `tol * ||A||_F`.
pub fn symmetric_eigenvalues(a: &SymmetricMatrix, tol: f64) -> Result<Spectrum> {
    if !(tol > 0.0) {
        return Err(domain("tol", tol, "tol > 0"));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let m = a.dim();
    let mut w = a.to_rows();
    let threshold = tol * a.frobenius();

    for _ in 0..MAX_SWEEPS {
        let off = max_off_diagonal(&w);
        if off <= threshold {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = w[p][q];
                if apq == 0.0 {
                    continue;
                }
                // tan of the rotation angle, smaller root for stability
                let theta = (w[q][q] - w[p][p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                w[p][p] -= t * apq;
                w[q][q] += t * apq;
                w[p][q] = 0.0;
                w[q][p] = 0.0;
                for r in 0..m {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = w[r][p];
                    let arq = w[r][q];
                    let np = arp - s * (arq + tau * arp);
                    let nq = arq + s * (arp - tau * arq);
                    w[r][p] = np;
                    w[p][r] = np;
                    w[r][q] = nq;
                    w[q][r] = nq;
                }
            }
        }
    }

    Ok(Spectrum::new((0..m).map(|i| w[i][i]).collect(), tol))
}

fn max_off_diagonal(w: &[Vec<f64>]) -> f64 {
    let mut off = 0.0f64;
    for (i, row) in w.iter().enumerate() {
        for v in &row[i + 1..] {
            off = off.max(v.abs());
        }
    }
    off
}

/// Closed-form eigenvalues of `[[a, b], [b, d]]`, ascending.
#[inline]
pub fn eigenvalues_2x2(a: f64, b: f64, d: f64) -> (f64, f64) {
    let t = 0.5 * (a + d);
    let h = 0.5 * (a - d);
    let r = (h * h + b * b).sqrt();
    (t - r, t + r)
}

/// `max |lambda|` of a packed 2x2 symmetric matrix `[a, b, d]`.
#[inline]
pub fn spectral_norm_2x2(p: &[f64]) -> f64 {
    let t = 0.5 * (p[0] + p[2]);
    let h = 0.5 * (p[0] - p[2]);
    t.abs() + (h * h + p[1] * p[1]).sqrt()
}

/// Largest absolute eigenvalue. Dimensions 1 and 2 use closed forms.
pub fn spectral_norm(a: &SymmetricMatrix) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    match a.dim() {
        1 => Ok(a.get(0, 0).abs()),
        2 => Ok(spectral_norm_2x2(a.packed())),
        _ => Ok(symmetric_eigenvalues(a, DEFAULT_TOL)?.spectral_norm()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmt::sampling::sample_goe;
    use crate::rng::RandomStream;
    use proptest::prelude::*;

    fn assert_trace(a: &SymmetricMatrix, s: &Spectrum) {
        let m = a.dim() as f64;
        let scale = a.frobenius().max(1.0);
        assert!(
            (s.sum() - a.trace()).abs() <= m * s.tol() * scale * 10.0,
            "trace {} vs eigen sum {}",
            a.trace(),
            s.sum()
        );
    }

    #[test]
    fn diagonal_input() {
        let a = SymmetricMatrix::from_diagonal(&[3.0, -5.0]).unwrap();
        let s = symmetric_eigenvalues(&a, DEFAULT_TOL).unwrap();
        assert_eq!(s.values(), &[-5.0, 3.0]);
        assert_eq!(spectral_norm(&a).unwrap(), 5.0);
        let a3 = SymmetricMatrix::from_diagonal(&[3.0, -5.0, 1.0]).unwrap();
        assert_eq!(spectral_norm(&a3).unwrap(), 5.0);
    }

    #[test]
    fn swap_matrix() {
        let a = SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = symmetric_eigenvalues(&a, DEFAULT_TOL).unwrap();
        assert!((s.values()[0] + 1.0).abs() < 1e-15);
        assert!((s.values()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_norm() {
        for m in 1..5 {
            assert_eq!(spectral_norm(&SymmetricMatrix::zeros(m).unwrap()).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let mut a = SymmetricMatrix::zeros(3).unwrap();
        assert!(symmetric_eigenvalues(&a, 0.0).is_err());
        a.set(0, 2, f64::NAN);
        assert_eq!(symmetric_eigenvalues(&a, 1e-12), Err(Error::NonFinite));
        assert_eq!(spectral_norm(&a), Err(Error::NonFinite));
    }

    #[test]
    fn matches_quadratic_formula_2x2() {
        let mut rng = RandomStream::new(21, 0).rng();
        for _ in 0..1000 {
            let a = sample_goe(2, &mut rng).unwrap();
            let s = symmetric_eigenvalues(&a, DEFAULT_TOL).unwrap();
            let (x, y, z) = (a.get(0, 0), a.get(0, 1), a.get(1, 1));
            let t = (x + z) / 2.0;
            let r = ((x - z).powi(2) / 4.0 + y * y).sqrt();
            assert!((s.values()[0] - (t - r)).abs() < 1e-10);
            assert!((s.values()[1] - (t + r)).abs() < 1e-10);
            assert_trace(&a, &s);
        }
    }

    #[test]
    fn trace_invariant_various_sizes() {
        let mut rng = RandomStream::new(22, 0).rng();
        for m in [1, 3, 5, 10, 40] {
            for _ in 0..5 {
                let a = sample_goe(m, &mut rng).unwrap();
                let s = symmetric_eigenvalues(&a, DEFAULT_TOL).unwrap();
                assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
                assert_trace(&a, &s);
                // sum of squares of eigenvalues equals tr(A^2)
                let sq: f64 = s.values().iter().map(|v| v * v).sum();
                assert!((sq - a.trace_sq()).abs() < 1e-9 * a.trace_sq().max(1.0));
            }
        }
    }

    #[test]
    fn goe_norm_near_bulk_edge() {
        let mut rng = RandomStream::new(23, 0).rng();
        let mut norms: Vec<f64> = (0..50)
            .map(|_| spectral_norm(&sample_goe(100, &mut rng).unwrap()).unwrap() / 10.0)
            .collect();
        norms.sort_by(f64::total_cmp);
        let median = 0.5 * (norms[24] + norms[25]);
        assert!((1.7..=2.3).contains(&median), "median = {median}");
    }

    proptest! {
        #[test]
        fn norm_is_homogeneous(seed in 0u64..10_000, m in 1usize..6, c in prop::sample::select(vec![-2.0, 0.5])) {
            let a = sample_goe(m, &mut RandomStream::new(seed, 1).rng()).unwrap();
            let n1 = spectral_norm(&a).unwrap();
            let n2 = spectral_norm(&a.scaled(c)).unwrap();
            prop_assert!((n2 - c.abs() * n1).abs() <= 1e-12 * n1.max(1e-300) * 4.0);
        }

        #[test]
        fn jacobi_matches_closed_form_norm(seed in 0u64..10_000) {
            let a = sample_goe(2, &mut RandomStream::new(seed, 2).rng()).unwrap();
            let s = symmetric_eigenvalues(&a, DEFAULT_TOL).unwrap();
            prop_assert!((s.spectral_norm() - spectral_norm(&a).unwrap()).abs() < 1e-12 * 10.0);
        }
    }
}
