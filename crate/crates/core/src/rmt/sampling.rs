use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{MatrixEnsemble, SymmetricMatrix};
use crate::error::{Error, Result};

/// One GOE draw: diagonal entries `N(0, 2)`, strict upper triangle `N(0, 1)`.
pub fn sample_goe<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<SymmetricMatrix> {
    let mut a = SymmetricMatrix::zeros(m)?;
    for i in 0..m {
        for j in i..m {
            let z: f64 = rng.sample(StandardNormal);
            a.set(i, j, if i == j { std::f64::consts::SQRT_2 * z } else { z });
        }
    }
    Ok(a)
}

/// `(X, rho X + sqrt(1 - rho^2) Z)` with `X`, `Z` independent GOE draws.
pub fn sample_correlated_pair<R: Rng + ?Sized>(
    m: usize,
    rho: f64,
    rng: &mut R,
) -> Result<(SymmetricMatrix, SymmetricMatrix)> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::InvalidCorrelation(rho));
    }
    let x = sample_goe(m, rng)?;
    let z = sample_goe(m, rng)?;
    if rho == 1.0 {
        return Ok((x.clone(), x));
    }
    let mut y = x.scaled(rho);
    y.add_scaled((1.0 - rho * rho).sqrt(), &z)?;
    Ok((x, y))
}

pub fn sample_ensemble<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<MatrixEnsemble> {
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let matrices = (0..n)
        .map(|_| sample_goe(m, rng))
        .collect::<Result<Vec<_>>>()?;
    MatrixEnsemble::new(matrices)
}
