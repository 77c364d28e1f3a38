//! The type-★ condition: a first-layer basis `(X_1, …, X_m)` with
//! `[X_j, [X_j, X_i]] = 0` for all `i, j`.
//!
//! Throughout, first-layer positions are 0-based and a [`BasisChange`] with
//! matrix `A` produces the new basis `Y_i = Σ_j A_ij X_j` from the adapted
//! basis `X`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraVector, StratifiedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{rational_vec, Rational, Ring, Scalar};

mod condition;
mod contrex;
mod lemma;
mod search;

pub use condition::{
    check_condition_i, engel_quotient_from_condition_i, filiform_normalize_basis, filiform_relation, is_engel,
    is_filiform, ConditionIReport, EngelQuotient, RankCertificate,
};
pub use contrex::{
    a_name, a_var, contrex_quotient, contrex_relations, derived_contrex_system, free_star_quotient,
    listed_contrex_system, solution_families, verify_contrex, verify_remark_subalgebra, ContrexReport, FamilyReport,
    RemarkReport, SolutionFamily, Substitution, CONTREX_PAIRS,
};
pub use lemma::{chio_det_identity, condensation_matrix, star_decompose, ChioReport, StarDecomposition};
pub use search::{classify_star, search_star_basis, StarVerdict, StarVerdictReport};

/// An invertible change of first-layer basis.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisChange<S> {
    matrix: Matrix<S>,
    det: S,
}

impl<S: Scalar> BasisChange<S> {
    pub fn new(matrix: Matrix<S>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("basis change must be square"));
        }
        let det = matrix.det()?;
        if det.is_zero() {
            return Err(Error::Singular);
        }
        Ok(BasisChange { matrix, det })
    }

    pub fn identity(m: usize) -> Self {
        BasisChange { matrix: Matrix::identity(m), det: S::one() }
    }

    /// Swaps the roles of two basis vectors.
    pub fn transposition(m: usize, a: usize, b: usize) -> Self {
        let mut matrix = Matrix::identity(m);
        matrix.swap_rows(a, b);
        let det = if a == b { S::one() } else { -S::one() };
        BasisChange { matrix, det }
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn det(&self) -> &S {
        &self.det
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// `self` applied after `first`: `Y = self · (first · X)`.
    pub fn compose(&self, first: &BasisChange<S>) -> Result<Self> {
        BasisChange::new(self.matrix.mul(&first.matrix)?)
    }

    /// The new first-layer basis as vectors of the algebra.
    pub fn new_basis(&self, algebra: &StratifiedAlgebra<S>) -> Result<Vec<AlgebraVector<S>>> {
        let m = algebra.rank();
        if self.size() != m {
            return Err(Error::DimensionMismatch { expected: m, got: self.size() });
        }
        Ok((0..m).map(|r| AlgebraVector::from_dense(self.matrix.row(r))).collect())
    }
}

/// JSON form of a basis change: rows of rational strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisChangeJson {
    pub matrix: Vec<RationalRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalRow(#[serde(with = "rational_vec")] pub Vec<Rational>);

impl BasisChange<Rational> {
    pub fn to_json(&self) -> BasisChangeJson {
        BasisChangeJson { matrix: self.matrix.to_rows().into_iter().map(RationalRow).collect() }
    }

    pub fn from_json(json: &BasisChangeJson) -> Result<Self> {
        let rows = json.matrix.iter().map(|r| r.0.clone()).collect();
        BasisChange::new(Matrix::from_rows(rows)?)
    }
}

fn basis_or_identity<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    basis: Option<&BasisChange<S>>,
) -> Result<Vec<AlgebraVector<S>>> {
    match basis {
        Some(b) => b.new_basis(algebra),
        None => Ok((0..algebra.rank()).map(AlgebraVector::basis).collect()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarCheck {
    pub holds: bool,
    /// First `(j, i)` with `[Y_j, [Y_j, Y_i]] ≠ 0`.
    pub witness: Option<(usize, usize)>,
}

/// Whether the (possibly transformed) first-layer basis satisfies the
/// type-★ relations.
pub fn is_type_star_basis<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    basis: Option<&BasisChange<S>>,
) -> Result<StarCheck> {
    let ys = basis_or_identity(algebra, basis)?;
    for (j, yj) in ys.iter().enumerate() {
        for (i, yi) in ys.iter().enumerate() {
            if i == j {
                continue;
            }
            let inner = algebra.bracket(yj, yi)?;
            if !algebra.bracket(yj, &inner)?.is_zero() {
                return Ok(StarCheck { holds: false, witness: Some((j, i)) });
            }
        }
    }
    Ok(StarCheck { holds: true, witness: None })
}

/// Canonical key `(k, j, i)` with `j < i` for the commutator
/// `[Y_k, [Y_j, Y_i]]`.
pub type CommutatorKey = (usize, usize, usize);

/// Formal multilinear expansion of `[a, [b, c]]` where `a, b, c` are given
/// by coordinates in a basis `Y`, collected on canonical keys. Only
/// antisymmetry of the inner bracket is used, never Jacobi.
pub fn formal_triple<R: Ring>(a: &[R], b: &[R], c: &[R]) -> BTreeMap<CommutatorKey, R> {
    let m = a.len();
    let mut out = BTreeMap::new();
    for j in 0..m {
        for i in j + 1..m {
            let inner = b[j].clone() * c[i].clone() - b[i].clone() * c[j].clone();
            if inner.is_zero() {
                continue;
            }
            for (k, ak) in a.iter().enumerate() {
                if ak.is_zero() {
                    continue;
                }
                out.insert((k, j, i), ak.clone() * inner.clone());
            }
        }
    }
    out
}

/// All third-layer commutators `[Y_k, [Y_j, Y_i]]` of a first-layer basis,
/// keyed canonically.
pub fn third_layer_commutators<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    ys: &[AlgebraVector<S>],
) -> Result<BTreeMap<CommutatorKey, AlgebraVector<S>>> {
    let m = ys.len();
    let mut out = BTreeMap::new();
    for j in 0..m {
        for i in j + 1..m {
            let inner = algebra.bracket(&ys[j], &ys[i])?;
            for (k, yk) in ys.iter().enumerate() {
                out.insert((k, j, i), algebra.bracket(yk, &inner)?);
            }
        }
    }
    Ok(out)
}

/// Upper bound for `dim V_3`: `(m+1)m(m−1)/3` in general (attained by free
/// algebras) and `m(m−1)(m−2)/3` under type ★.
pub fn v3_dimension_bounds(m: usize, star: bool) -> usize {
    if star {
        if m < 2 {
            return 0;
        }
        m * (m - 1) * (m - 2) / 3
    } else {
        (m + 1) * m * m.saturating_sub(1) / 3
    }
}

/// Whether `span{X_{i1}, X_{i2} − c·X_{i1}, [X_{i1}, X_{i2}]}` is a
/// Heisenberg subalgebra centred at `[X_{i1}, X_{i2}]`.
pub fn heisenberg_subalgebra_check<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    i1: usize,
    i2: usize,
    c: &S,
) -> Result<bool> {
    let m = algebra.rank();
    for i in [i1, i2] {
        if i >= m {
            return Err(Error::invalid(format!("index {i} is not in the first layer (dimension {m})")));
        }
    }
    if i1 == i2 {
        return Err(Error::invalid("indices must differ"));
    }
    let x1 = AlgebraVector::basis(i1);
    let x2 = AlgebraVector::basis(i2);
    let centre = algebra.bracket(&x1, &x2)?;
    if centre.is_zero() {
        return Err(Error::precondition("the two generators commute"));
    }
    let shifted = x2.clone() - x1.scale(c);
    Ok(algebra.bracket(&x1, &centre)?.is_zero() && algebra.bracket(&shifted, &centre)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::*;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    #[test]
    fn gm_is_star_in_identity_basis() {
        for m in 3..=5 {
            let g = build_unit_upper_triangular::<Q>(m).unwrap();
            assert!(is_type_star_basis(&g, None).unwrap().holds, "G{m}");
        }
    }

    #[test]
    fn step_two_is_star_in_any_basis() {
        let g2 = heisenberg::<Q>();
        let b = BasisChange::new(Matrix::from_rows(vec![vec![q(2), q(1)], vec![q(-1), q(3)]]).unwrap()).unwrap();
        assert!(is_type_star_basis(&g2, Some(&b)).unwrap().holds);
        let f32 = build_free_nilpotent::<Q>(3, 2, DEFAULT_DIMENSION_CAP).unwrap();
        assert!(is_type_star_basis(&f32, None).unwrap().holds);
    }

    #[test]
    fn free_step_three_fails_with_witness() {
        let f23 = build_free_nilpotent::<Q>(2, 3, DEFAULT_DIMENSION_CAP).unwrap();
        let check = is_type_star_basis(&f23, None).unwrap();
        assert!(!check.holds);
        assert_eq!(check.witness, Some((0, 1)));
    }

    #[test]
    fn example2_becomes_star_after_substitution() {
        for b in [1, 2] {
            let alg = build_example2_algebra(q(b)).unwrap();
            assert!(!is_type_star_basis(&alg, None).unwrap().holds);
            let change = BasisChange::new(
                Matrix::from_rows(vec![vec![q(1), q(-b), q(0)], vec![q(0), q(1), q(0)], vec![q(0), q(0), q(1)]])
                    .unwrap(),
            )
            .unwrap();
            assert!(is_type_star_basis(&alg, Some(&change)).unwrap().holds);
        }
    }

    #[test]
    fn singular_basis_change_is_rejected() {
        let m = Matrix::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(4)]]).unwrap();
        assert_eq!(BasisChange::new(m), Err(Error::Singular));
    }

    #[test]
    fn heisenberg_subalgebras() {
        let g3 = build_unit_upper_triangular::<Q>(3).unwrap();
        for c in [0, 1, -7] {
            assert!(heisenberg_subalgebra_check(&g3, 0, 1, &q(c)).unwrap());
        }
        let f23 = build_free_nilpotent::<Q>(2, 3, DEFAULT_DIMENSION_CAP).unwrap();
        assert!(!heisenberg_subalgebra_check(&f23, 0, 1, &q(0)).unwrap());
        // E12 and E34 commute
        assert!(heisenberg_subalgebra_check(&g3, 0, 2, &q(0)).is_err());
    }

    #[test]
    fn dimension_bounds() {
        assert_eq!(v3_dimension_bounds(3, false), 8);
        assert_eq!(v3_dimension_bounds(3, true), 2);
        assert_eq!(v3_dimension_bounds(2, true), 0);
        assert_eq!(v3_dimension_bounds(4, false), 20);
        assert_eq!(v3_dimension_bounds(4, true), 8);
    }

    #[test]
    fn formal_triple_uses_only_antisymmetry() {
        // [Y0, [Y0, Y1]] in the identity coordinates is the single key (0, 0, 1).
        let e = |i: usize| (0..3).map(|k| if k == i { q(1) } else { q(0) }).collect::<Vec<_>>();
        let t = formal_triple(&e(0), &e(0), &e(1));
        assert_eq!(t.len(), 1);
        assert_eq!(t[&(0, 0, 1)], q(1));
        let t = formal_triple(&e(0), &e(1), &e(0));
        assert_eq!(t[&(0, 0, 1)], q(-1));
    }
}
