//! In a type-★ algebra, `[Y_1, [Y_1, Y_p]]` is a combination of the
//! commutators that do not repeat the index 1, for every first-layer basis
//! `Y`. The coefficients come from the ★ relations `[X_1, [X_1, X_h]] = 0`
//! rewritten in the `Y` basis and solved through the matrix of second-order
//! minors containing the pivot entry.

use std::collections::BTreeMap;


use super::{formal_triple, is_type_star_basis, BasisChange, CommutatorKey};
use crate::algebra::{AlgebraVector, StratifiedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct StarDecomposition<S> {
    /// Target index `p` (0-based, `1..m`).
    pub p: usize,
    /// Row permutation applied to the reference basis so the pivot entry is
    /// nonzero: reference vector `permutation[r]` plays the role of `X_r`.
    pub permutation: Vec<usize>,
    /// `(j, i) ↦ α` for the terms `α·[Y_j, [Y_j, Y_i]]`, `j ≠ 0`.
    pub repeated: BTreeMap<(usize, usize), S>,
    /// `(k, j, i) ↦ β` for `β·[Y_k, [Y_j, Y_i]]` with distinct indices, `j < i`.
    pub distinct: BTreeMap<CommutatorKey, S>,
}

impl<S: Scalar> StarDecomposition<S> {
    pub fn is_zero(&self) -> bool {
        self.repeated.is_empty() && self.distinct.is_empty()
    }

    /// Evaluates the right-hand side in the algebra.
    pub fn evaluate(&self, algebra: &StratifiedAlgebra<S>, ys: &[AlgebraVector<S>]) -> Result<AlgebraVector<S>> {
        let mut out = AlgebraVector::zero();
        for (&(j, i), c) in &self.repeated {
            let t = algebra.bracket(&ys[j], &algebra.bracket(&ys[j], &ys[i])?)?;
            out.add_scaled(&t, c);
        }
        for (&(k, j, i), c) in &self.distinct {
            let t = algebra.bracket(&ys[k], &algebra.bracket(&ys[j], &ys[i])?)?;
            out.add_scaled(&t, c);
        }
        Ok(out)
    }

    /// Whether the decomposition reproduces `[Y_1, [Y_1, Y_p]]` exactly.
    pub fn reconstructs(&self, algebra: &StratifiedAlgebra<S>, change: &BasisChange<S>) -> Result<bool> {
        let ys = change.new_basis(algebra)?;
        let lhs = algebra.bracket(&ys[0], &algebra.bracket(&ys[0], &ys[self.p])?)?;
        Ok(lhs == self.evaluate(algebra, &ys)?)
    }
}

/// `m_ij = a_11·a_{i+1,j+1} − a_{i+1,1}·a_{1,j+1}` (0-based: pivot at `(0,0)`).
pub fn condensation_matrix<S: Scalar>(a: &Matrix<S>) -> Result<Matrix<S>> {
    if !a.is_square() || a.rows() < 2 {
        return Err(Error::invalid("condensation needs a square matrix of size ≥ 2"));
    }
    let m = a.rows();
    let a00 = a[(0, 0)].clone();
    let rows = (1..m)
        .map(|i| {
            (1..m)
                .map(|j| a00.clone() * a[(i, j)].clone() - a[(i, 0)].clone() * a[(0, j)].clone())
                .collect()
        })
        .collect();
    Matrix::from_rows(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChioReport<S> {
    pub det_m: S,
    /// `a_11^{m−2} · det A`
    pub scaled_det_a: S,
    pub equal: bool,
}

pub fn chio_det_identity<S: Scalar>(a: &Matrix<S>) -> Result<ChioReport<S>> {
    if a.is_square() && a.rows() >= 1 && a[(0, 0)].is_zero() {
        return Err(Error::precondition("pivot entry a11 is zero"));
    }
    let m = condensation_matrix(a)?;
    let det_m = m.det()?;
    let scaled_det_a = a[(0, 0)].powi((a.rows() - 2) as u32) * a.det()?;
    let equal = det_m == scaled_det_a;
    Ok(ChioReport { det_m, scaled_det_a, equal })
}

/// Coefficients expressing `[Y_1, [Y_1, Y_p]]` through the commutators
/// without the repeated index 1, where `Y = change · X` and `X` is the
/// algebra's adapted first-layer basis (assumed to satisfy the ★ relations).
pub fn star_decompose<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    change: &BasisChange<S>,
    p: usize,
) -> Result<StarDecomposition<S>> {
    let m = algebra.rank();
    if change.size() != m {
        return Err(Error::DimensionMismatch { expected: m, got: change.size() });
    }
    if p == 0 || p >= m {
        return Err(Error::invalid(format!("target index {p} must be in 1..{m}")));
    }
    if !is_type_star_basis(algebra, None)?.holds {
        return Err(Error::precondition("algebra is not of type ★ in its adapted basis"));
    }
    // Reference basis in terms of the new one: X = P·Y.
    let p_matrix = change.matrix().inverse()?;
    let pivot_row = (0..m)
        .find(|&r| !p_matrix[(r, 0)].is_zero())
        .expect("an invertible matrix has a nonzero entry in its first column");
    let mut permutation: Vec<usize> = (0..m).collect();
    permutation.swap(0, pivot_row);
    let mut decomposition = StarDecomposition {
        p,
        permutation: permutation.clone(),
        repeated: BTreeMap::new(),
        distinct: BTreeMap::new(),
    };
    if algebra.step() < 3 {
        return Ok(decomposition);
    }
    let a = p_matrix.permute_rows(&permutation);
    let a00 = a[(0, 0)].clone();

    // Relation h (h = 1..m): [X_0, [X_0, X_h]] = 0, expanded in Y.
    // Coefficient of [Y_0,[Y_0,Y_i]] is a00·M_{h,i}; the rest is the Z-part.
    let mut z_parts: Vec<BTreeMap<CommutatorKey, S>> = Vec::with_capacity(m - 1);
    for h in 1..m {
        let mut t = formal_triple(a.row(0), a.row(0), a.row(h));
        t.retain(|&(k, j, _), _| !(k == 0 && j == 0));
        z_parts.push(t);
    }
    let m_inv = condensation_matrix(&a)?.inverse()?;

    // [Y_0,[Y_0,Y_p]] = −(1/a00) Σ_h (M⁻¹)_{p,h} Σ_k α_hk Z_k
    let scale = -(S::one() / a00);
    let mut combined: BTreeMap<CommutatorKey, S> = BTreeMap::new();
    for (h, z) in z_parts.iter().enumerate() {
        let w = m_inv[(p - 1, h)].clone() * scale.clone();
        if w.is_zero() {
            continue;
        }
        for (key, c) in z {
            let entry = combined.entry(*key).or_insert_with(S::zero);
            *entry = entry.clone() + w.clone() * c.clone();
        }
    }
    for ((k, j, i), c) in combined {
        if c.is_zero() {
            continue;
        }
        let (slot, key, c) = if k == j {
            (0, (j, i), c)
        } else if k == i {
            // [Y_i, [Y_j, Y_i]] = −[Y_i, [Y_i, Y_j]]
            (0, (i, j), -c)
        } else {
            (1, (0, 0), c)
        };
        if slot == 0 {
            debug_assert!(key.0 != 0, "the repeated index 0 was eliminated");
            let e = decomposition.repeated.entry(key).or_insert_with(S::zero);
            *e = e.clone() + c;
        } else {
            decomposition.distinct.insert((k, j, i), c);
        }
    }
    decomposition.repeated.retain(|_, c| !c.is_zero());
    Ok(decomposition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::*;
    use crate::linalg::Subspace;
    use crate::random::{random_invertible, rng_from_seed, RationalDistribution};
    use crate::scalar::{Rational, Ring};

    type Q = Rational;

    fn mat(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Q::from_int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn chio_on_known_matrix() {
        let r = chio_det_identity(&mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]])).unwrap();
        assert_eq!(r.det_m, Q::from_int(-3));
        assert_eq!(r.scaled_det_a, Q::from_int(-3));
        assert!(r.equal);
        assert_eq!(condensation_matrix(&mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]])).unwrap(), mat(&[&[-3, -6], &[-6, -11]]));
    }

    #[test]
    fn chio_on_identity() {
        for m in 2..=6 {
            let r = chio_det_identity(&Matrix::<Q>::identity(m)).unwrap();
            assert_eq!(r.det_m, Q::from_int(1));
            assert!(r.equal);
        }
    }

    #[test]
    fn chio_rejects_zero_pivot() {
        assert!(chio_det_identity(&mat(&[&[0, 1], &[1, 0]])).is_err());
    }

    #[test]
    fn identity_change_gives_zero_decomposition() {
        let g4 = build_unit_upper_triangular::<Q>(4).unwrap();
        for p in 1..4 {
            let d = star_decompose(&g4, &BasisChange::identity(4), p).unwrap();
            assert!(d.is_zero());
        }
    }

    #[test]
    fn step_two_gives_zero_decomposition() {
        let f32 = build_free_nilpotent::<Q>(3, 2, DEFAULT_DIMENSION_CAP).unwrap();
        let change = BasisChange::new(mat(&[&[1, 2, 0], &[0, 1, 1], &[3, 0, 1]])).unwrap();
        assert!(star_decompose(&f32, &change, 2).unwrap().is_zero());
    }

    #[test]
    fn rejects_non_star_algebra() {
        let f23 = build_free_nilpotent::<Q>(2, 3, DEFAULT_DIMENSION_CAP).unwrap();
        let err = star_decompose(&f23, &BasisChange::identity(2), 1).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    /// Independent check: solve for [Y1,[Y1,Yp]] in the span of the allowed
    /// commutators directly in third-layer coordinates.
    fn in_allowed_span(alg: &crate::Algebra, change: &BasisChange<Q>, p: usize) -> bool {
        let ys = change.new_basis(alg).unwrap();
        let n = alg.dim();
        let mut span = Subspace::new(n);
        let m = ys.len();
        for k in 0..m {
            for j in 0..m {
                for i in 0..m {
                    let repeated_one = (k == 0 && j == 0) || (k == 0 && i == 0);
                    if repeated_one {
                        continue;
                    }
                    let v = alg.bracket(&ys[k], &alg.bracket(&ys[j], &ys[i]).unwrap()).unwrap();
                    span.insert(&v.to_dense(n));
                }
            }
        }
        let target = alg.bracket(&ys[0], &alg.bracket(&ys[0], &ys[p]).unwrap()).unwrap();
        span.contains(&target.to_dense(n))
    }

    #[test]
    fn random_changes_on_g4_reconstruct() {
        let g4 = build_unit_upper_triangular::<Q>(4).unwrap();
        let mut rng = rng_from_seed(11);
        let dist = RationalDistribution::default();
        for _ in 0..10 {
            let change = BasisChange::new(random_invertible(&mut rng, 4, &dist)).unwrap();
            for p in 1..4 {
                assert!(in_allowed_span(&g4, &change, p));
                let d = star_decompose(&g4, &change, p).unwrap();
                assert!(d.reconstructs(&g4, &change).unwrap());
            }
        }
    }

    #[test]
    fn pivot_reordering_is_recorded() {
        let g3 = build_unit_upper_triangular::<Q>(3).unwrap();
        // Inverse has a zero (0,0) entry.
        let change = BasisChange::new(mat(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]])).unwrap();
        let d = star_decompose(&g3, &change, 1).unwrap();
        assert_eq!(d.permutation, vec![1, 0, 2]);
        assert!(d.reconstructs(&g3, &change).unwrap());
    }
}
