//! Obstructions to type ★: independence of `[X_1, [X_1, X_2]]` from the
//! remaining third-layer commutators, and the Engel quotient it produces.

use serde::{Deserialize, Serialize};

use super::{third_layer_commutators, BasisChange};
use crate::algebra::StratifiedAlgebra;
use crate::constructors::{ideal_closure, layers_from, quotient, ProjectionMap};
use crate::error::{Error, Result};
use crate::linalg::{rank_of, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionIReport<S> {
    pub holds: bool,
    pub witness_basis: Option<BasisChange<S>>,
    /// Rank of the third-layer commutators other than `[Y_1, [Y_1, Y_2]]`
    /// and its antisymmetric twin.
    pub rank_without: usize,
    /// Rank of all third-layer commutators.
    pub rank_all: usize,
    pub dim_v3: usize,
}

/// Rank certificate, for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub rank_without: usize,
    pub rank_all: usize,
    pub dim_v3: usize,
}

impl<S> ConditionIReport<S> {
    pub fn certificate(&self) -> RankCertificate {
        RankCertificate { rank_without: self.rank_without, rank_all: self.rank_all, dim_v3: self.dim_v3 }
    }
}

pub fn check_condition_i<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    basis: &BasisChange<S>,
) -> Result<ConditionIReport<S>> {
    if algebra.step() < 3 {
        return Err(Error::precondition(format!("condition (i) needs step ≥ 3, got {}", algebra.step())));
    }
    if algebra.rank() < 2 {
        return Err(Error::precondition("condition (i) needs at least two generators"));
    }
    let ys = basis.new_basis(algebra)?;
    let w3 = third_layer_commutators(algebra, &ys)?;
    let n = algebra.dim();
    // Key (0, 0, 1) is [Y_1,[Y_1,Y_2]] and, up to sign, [Y_1,[Y_2,Y_1]].
    let distinguished = (0, 0, 1);
    let rank_without = rank_of(n, w3.iter().filter(|(k, _)| **k != distinguished).map(|(_, v)| v.to_dense(n)));
    let rank_all = rank_of(n, w3.values().map(|v| v.to_dense(n)));
    let dim_v3 = algebra.layer_dim(3);
    let holds = rank_without < dim_v3;
    Ok(ConditionIReport {
        holds,
        witness_basis: holds.then(|| basis.clone()),
        rank_without,
        rank_all,
        dim_v3,
    })
}

/// Layer dimensions `(2, 1, …, 1)` with step at least 2.
pub fn is_filiform<S: Scalar>(algebra: &StratifiedAlgebra<S>) -> bool {
    let dims = algebra.layer_dims();
    dims.len() >= 2 && dims[0] == 2 && dims[1..].iter().all(|&d| d == 1)
}

pub fn is_engel<S: Scalar>(algebra: &StratifiedAlgebra<S>) -> bool {
    is_filiform(algebra) && algebra.step() == 3
}

#[derive(Clone, Debug, PartialEq)]
pub struct EngelQuotient<S> {
    pub algebra: StratifiedAlgebra<S>,
    pub projection: ProjectionMap<S>,
}

/// Quotient by the ideal generated by `V_4, …`, `Y_3, …, Y_m` and
/// `[Y_2, [Y_2, Y_1]]`, which is the Engel algebra whenever condition (i)
/// holds for `Y = basis · X`.
pub fn engel_quotient_from_condition_i<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    basis: &BasisChange<S>,
) -> Result<EngelQuotient<S>> {
    if !check_condition_i(algebra, basis)?.holds {
        return Err(Error::precondition("condition (i) does not hold for this basis"));
    }
    let ys = basis.new_basis(algebra)?;
    let mut generators = layers_from(algebra, 4);
    generators.extend(ys.iter().skip(2).cloned());
    let y2y2y1 = algebra.bracket(&ys[1], &algebra.bracket(&ys[1], &ys[0])?)?;
    let y1y1y2 = algebra.bracket(&ys[0], &algebra.bracket(&ys[0], &ys[1])?)?;
    generators.push(y2y2y1.clone());
    let ideal = ideal_closure(algebra, &generators)?;
    let (q, projection) = quotient(algebra, &ideal)?;
    if !is_engel(&q) || !projection.project(&y2y2y1)?.is_zero() || projection.project(&y1y1y2)?.is_zero() {
        return Err(Error::precondition(format!(
            "quotient with layers {:?} is not the Engel algebra",
            q.layer_dims()
        )));
    }
    Ok(EngelQuotient { algebra: q.with_name("engel quotient"), projection })
}

/// A basis change of a filiform first layer `(Y_1, Y_2)` that turns the
/// relation `a[Y_1,[Y_1,Y_2]] + b[Y_2,[Y_2,Y_1]] = 0` into
/// `[Ỹ_2, [Ỹ_2, Ỹ_1]] = 0`.
pub fn filiform_normalize_basis<S: Scalar>(a: &S, b: &S) -> Result<BasisChange<S>> {
    let (zero, one) = (S::zero(), S::one());
    if a.is_zero() && b.is_zero() {
        return Err(Error::invalid("(a, b) must not both vanish"));
    }
    if a.is_zero() {
        return Ok(BasisChange::identity(2));
    }
    if b.is_zero() {
        return Ok(BasisChange::transposition(2, 0, 1));
    }
    // Y_1 = b Ỹ_1, Y_2 = a Ỹ_1 + Ỹ_2, inverted.
    let inv_b = one.clone() / b.clone();
    let rows = vec![vec![inv_b.clone(), zero], vec![-(a.clone() * inv_b), one]];
    BasisChange::new(Matrix::from_rows(rows)?)
}

/// The two filiform relations' coefficients `(a, b)` with
/// `a[Y_1,[Y_1,Y_2]] + b[Y_2,[Y_2,Y_1]] = 0`, for a filiform algebra of
/// step ≥ 3 in the basis `Y = basis · X`.
pub fn filiform_relation<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    basis: &BasisChange<S>,
) -> Result<(S, S)> {
    if !is_filiform(algebra) || algebra.step() < 3 {
        return Err(Error::precondition("needs a filiform algebra of step ≥ 3"));
    }
    let ys = basis.new_basis(algebra)?;
    let u = algebra.bracket(&ys[0], &algebra.bracket(&ys[0], &ys[1])?)?;
    let v = algebra.bracket(&ys[1], &algebra.bracket(&ys[1], &ys[0])?)?;
    let top = algebra.layer_range(3).start;
    // V_3 is one-dimensional: a·u + b·v = 0 with (a, b) = (v, −u) coordinates.
    let (cu, cv) = (u.get(top), v.get(top));
    if cu.is_zero() && cv.is_zero() {
        return Err(Error::precondition("both third-layer commutators vanish"));
    }
    Ok((cv, -cu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::*;
    use crate::scalar::{Rational, Ring};
    use crate::star::is_type_star_basis;
    use num_traits::Zero;

    type Q = Rational;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    #[test]
    fn free_algebra_satisfies_condition_i() {
        let f33 = build_free_nilpotent::<Q>(3, 3, DEFAULT_DIMENSION_CAP).unwrap();
        let r = check_condition_i(&f33, &BasisChange::identity(3)).unwrap();
        assert!(r.holds);
        assert_eq!(r.dim_v3, 8);
        assert_eq!(r.rank_without, 7);
        assert!(r.witness_basis.is_some());
    }

    #[test]
    fn g3_fails_condition_i() {
        let g3 = build_unit_upper_triangular::<Q>(3).unwrap();
        let r = check_condition_i(&g3, &BasisChange::identity(3)).unwrap();
        assert!(!r.holds);
        assert_eq!(r.rank_without, r.dim_v3);
    }

    #[test]
    fn step_two_is_rejected() {
        let h = heisenberg::<Q>();
        assert!(check_condition_i(&h, &BasisChange::identity(2)).is_err());
    }

    #[test]
    fn engel_quotients_of_free_algebras() {
        for m in [2, 3] {
            let f = build_free_nilpotent::<Q>(m, 3, DEFAULT_DIMENSION_CAP).unwrap();
            let e = engel_quotient_from_condition_i(&f, &BasisChange::identity(m)).unwrap();
            assert_eq!(e.algebra.layer_dims(), &[2, 1, 1]);
            assert!(is_filiform(&e.algebra));
            assert!(e.algebra.validate().is_valid());
        }
        let g3 = build_unit_upper_triangular::<Q>(3).unwrap();
        assert!(engel_quotient_from_condition_i(&g3, &BasisChange::identity(3)).is_err());
    }

    #[test]
    fn filiform_recognizer() {
        assert!(is_filiform(&engel::<Q>()));
        assert!(is_filiform(&heisenberg::<Q>()));
        assert!(!is_filiform(&build_unit_upper_triangular::<Q>(3).unwrap()));
        assert!(is_engel(&engel::<Q>()));
        assert!(!is_engel(&heisenberg::<Q>()));
    }

    fn normalize_and_check(pre: BasisChange<Q>) {
        let engel = engel::<Q>();
        let (a, b) = filiform_relation(&engel, &pre).unwrap();
        let change = filiform_normalize_basis(&a, &b).unwrap();
        let total = change.compose(&pre).unwrap();
        let ys = total.new_basis(&engel).unwrap();
        let v = engel.bracket(&ys[1], &engel.bracket(&ys[1], &ys[0]).unwrap()).unwrap();
        assert!(v.is_zero(), "a={a}, b={b}");
    }

    #[test]
    fn filiform_normalization_cases() {
        // a = 0: identity
        let (a, b) = filiform_relation(&engel::<Q>(), &BasisChange::identity(2)).unwrap();
        assert!(a.is_zero() && !b.is_zero());
        assert_eq!(filiform_normalize_basis(&q(0), &q(1)).unwrap(), BasisChange::identity(2));
        normalize_and_check(BasisChange::identity(2));
        // a = b: Y1 = X1, Y2 = X1 + X2
        let pre = BasisChange::new(Matrix::from_rows(vec![vec![q(1), q(0)], vec![q(1), q(1)]]).unwrap()).unwrap();
        let (a, b) = filiform_relation(&engel::<Q>(), &pre).unwrap();
        assert_eq!(a, b);
        normalize_and_check(pre);
        // b = 0: swap
        let swap = BasisChange::transposition(2, 0, 1);
        let (_, b) = filiform_relation(&engel::<Q>(), &swap).unwrap();
        assert!(b.is_zero());
        assert_eq!(filiform_normalize_basis(&q(1), &q(0)).unwrap(), swap);
        normalize_and_check(swap);
        // a generic basis
        let pre = BasisChange::new(Matrix::from_rows(vec![vec![q(2), q(3)], vec![q(-1), q(5)]]).unwrap()).unwrap();
        normalize_and_check(pre);
        assert!(filiform_normalize_basis(&q(0), &q(0)).is_err());
    }

    #[test]
    fn a_equals_b_example() {
        // Y1 = Ỹ1, Y2 = Ỹ1 + Ỹ2, i.e. Ỹ1 = Y1, Ỹ2 = Y2 − Y1
        let c = filiform_normalize_basis(&q(1), &q(1)).unwrap();
        assert_eq!(c.matrix(), &Matrix::from_rows(vec![vec![q(1), q(0)], vec![q(-1), q(1)]]).unwrap());
        let _ = is_type_star_basis(&engel::<Q>(), None).unwrap();
    }
}
