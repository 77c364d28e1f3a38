//! Reproducible random rationals: numerators uniform in
//! `num_min..=num_max`, denominators uniform in `1..=den_max`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RationalDistribution {
    pub num_min: i64,
    pub num_max: i64,
    pub den_max: i64,
}

impl Default for RationalDistribution {
    fn default() -> Self {
        RationalDistribution { num_min: -5, num_max: 5, den_max: 3 }
    }
}

impl RationalDistribution {
    pub fn is_valid(&self) -> bool {
        self.num_min <= self.num_max && self.den_max >= 1
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_scalar<S: Scalar>(rng: &mut impl Rng, dist: &RationalDistribution) -> S {
    let num = rng.gen_range(dist.num_min..=dist.num_max);
    let den = rng.gen_range(1..=dist.den_max);
    S::from_ratio(num, den)
}

pub fn random_vector<S: Scalar>(rng: &mut impl Rng, len: usize, dist: &RationalDistribution) -> Vec<S> {
    (0..len).map(|_| random_scalar(rng, dist)).collect()
}

pub fn random_matrix<S: Scalar>(rng: &mut impl Rng, m: usize, dist: &RationalDistribution) -> Matrix<S> {
    let rows = (0..m).map(|_| random_vector(rng, m, dist)).collect();
    Matrix::from_rows(rows).expect("square")
}

/// Draws until the matrix is invertible (singular draws are rejected).
pub fn random_invertible<S: Scalar>(rng: &mut impl Rng, m: usize, dist: &RationalDistribution) -> Matrix<S> {
    loop {
        let a: Matrix<S> = random_matrix(rng, m, dist);
        if !a.det().expect("square").is_zero() {
            return a;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::Zero;

    #[test]
    fn same_seed_same_draws() {
        let dist = RationalDistribution::default();
        let a: Matrix<Rational> = random_invertible(&mut rng_from_seed(7), 4, &dist);
        let b: Matrix<Rational> = random_invertible(&mut rng_from_seed(7), 4, &dist);
        assert_eq!(a, b);
        assert!(!a.det().unwrap().is_zero());
    }

    #[test]
    fn draws_respect_the_distribution() {
        let dist = RationalDistribution { num_min: -2, num_max: 2, den_max: 2 };
        let mut rng = rng_from_seed(1);
        for _ in 0..200 {
            let q: Rational = random_scalar(&mut rng, &dist);
            assert!(q.denom() <= &2.into());
            assert!(q.numer().magnitude() <= &2u32.into());
        }
    }
}
