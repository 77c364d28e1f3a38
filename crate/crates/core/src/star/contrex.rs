//! A three-generator algebra that is not of type ★ although condition (i)
//! fails for every basis, and the filiform subalgebra of the free type-★
//! quotient of `f_{3,3}`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{check_condition_i, formal_triple, is_type_star_basis, v3_dimension_bounds, BasisChange};
use crate::algebra::{AlgebraVector, StratifiedAlgebra};
use crate::constructors::{build_free_nilpotent, ideal_closure, quotient, ProjectionMap, DEFAULT_DIMENSION_CAP};
use crate::error::{Error, Result};
use crate::linalg::det_by_expansion;
use crate::poly::Polynomial;
use crate::scalar::Rational;

type Poly = Polynomial<Rational>;

/// Each relation is `[X_j,[X_j,X_h]] + [X_j',[X_j',X_h']]`, listed as the
/// two pairs `(j, h)`, 0-based.
pub const CONTREX_PAIRS: [[(usize, usize); 2]; 5] = [
    [(0, 1), (0, 2)],
    [(0, 2), (1, 0)],
    [(1, 0), (1, 2)],
    [(1, 2), (2, 0)],
    [(2, 0), (2, 1)],
];

fn repeated<S: crate::Scalar>(algebra: &StratifiedAlgebra<S>, j: usize, h: usize) -> Result<AlgebraVector<S>> {
    let xj = AlgebraVector::basis(j);
    algebra.bracket(&xj, &algebra.bracket(&xj, &AlgebraVector::basis(h))?)
}

/// The five relations in the coordinates of `algebra`, whose first three
/// basis vectors are taken as `X_1, X_2, X_3`.
pub fn contrex_relations<S: crate::Scalar>(algebra: &StratifiedAlgebra<S>) -> Result<Vec<AlgebraVector<S>>> {
    if algebra.rank() != 3 || algebra.step() < 3 {
        return Err(Error::precondition("needs three generators and step ≥ 3"));
    }
    CONTREX_PAIRS
        .iter()
        .map(|[(j1, h1), (j2, h2)]| Ok(repeated(algebra, *j1, *h1)? + repeated(algebra, *j2, *h2)?))
        .collect()
}

/// `f_{3,κ}` modulo the five relations.
pub fn contrex_quotient(kappa: usize) -> Result<(StratifiedAlgebra<Rational>, ProjectionMap<Rational>)> {
    if kappa < 3 {
        return Err(Error::invalid(format!("step must be at least 3, got {kappa}")));
    }
    let free = build_free_nilpotent::<Rational>(3, kappa, DEFAULT_DIMENSION_CAP)?;
    let ideal = ideal_closure(&free, &contrex_relations(&free)?)?;
    let (q, p) = quotient(&free, &ideal)?;
    Ok((q.with_name(format!("contrex({kappa})")), p))
}

/// `f_{3,3}` modulo every `[X_j,[X_j,X_i]]`.
pub fn free_star_quotient() -> Result<(StratifiedAlgebra<Rational>, ProjectionMap<Rational>)> {
    let free = build_free_nilpotent::<Rational>(3, 3, DEFAULT_DIMENSION_CAP)?;
    let mut generators = Vec::new();
    for j in 0..3 {
        for i in 0..3 {
            if i != j {
                generators.push(repeated(&free, j, i)?);
            }
        }
    }
    let ideal = ideal_closure(&free, &generators)?;
    let (q, p) = quotient(&free, &ideal)?;
    Ok((q.with_name("free star quotient"), p))
}

/// Variable index of `a_rc` (1-based row and column) in the 3×3 unknown
/// matrix with `X = A·Y`.
pub fn a_var(r: usize, c: usize) -> usize {
    (r - 1) * 3 + (c - 1)
}

fn a(r: usize, c: usize) -> Poly {
    Poly::var(a_var(r, c))
}

fn unknown_matrix() -> Vec<Vec<Poly>> {
    (1..=3).map(|r| (1..=3).map(|c| a(r, c)).collect()).collect()
}

pub fn a_name(i: usize) -> String {
    format!("a{}{}", i / 3 + 1, i % 3 + 1)
}

/// The system `α_1 = … = α_5 = 0` as printed, in the unknowns `a_rc`.
pub fn listed_contrex_system() -> Vec<Poly> {
    let m12 = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    let m13 = a(1, 1) * a(3, 2) - a(1, 2) * a(3, 1);
    let m23 = a(2, 1) * a(3, 2) - a(2, 2) * a(3, 1);
    vec![
        a(1, 1) * m12.clone() + a(1, 1) * m13.clone(),
        -(a(2, 1) * m12.clone()) + a(1, 1) * m13.clone(),
        -(a(2, 1) * m12) + a(2, 1) * m23.clone(),
        -(a(3, 1) * m13.clone()) + a(2, 1) * m23.clone(),
        -(a(3, 1) * m13) - a(3, 1) * m23,
    ]
}

/// The same system recomputed: the coefficient of `[Y_1,[Y_1,Y_2]]` in each
/// relation after writing `X_i = Σ_c a_ic Y_c`, expanded formally.
pub fn derived_contrex_system() -> Vec<Poly> {
    let rows = unknown_matrix();
    CONTREX_PAIRS
        .iter()
        .map(|pairs| {
            pairs
                .iter()
                .map(|&(j, h)| formal_triple(&rows[j], &rows[j], &rows[h]).remove(&(0, 0, 1)).unwrap_or_else(Poly::zero))
                .fold(Poly::zero(), |acc, t| acc + t)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Substitution {
    pub var: usize,
    pub num: Poly,
    pub den: Poly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionFamily {
    pub zeros: Vec<usize>,
    /// Applied in order after the zeros.
    pub substitutions: Vec<Substitution>,
    pub nonzero: Vec<usize>,
}

impl SolutionFamily {
    /// `p` restricted to the family, cleared of denominators.
    pub fn restrict(&self, p: &Poly) -> Poly {
        let zero = Rational::zero();
        let mut out = self.zeros.iter().fold(p.clone(), |acc, &v| acc.substitute(v, &zero));
        for s in &self.substitutions {
            out = out.substitute_fraction(s.var, &s.num, &s.den);
        }
        out
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.zeros.iter().map(|&v| format!("{} = 0", a_name(v))).collect();
        for s in &self.substitutions {
            parts.push(format!(
                "{} = ({})/({})",
                a_name(s.var),
                s.num.display_with(&a_name),
                s.den.display_with(&a_name)
            ));
        }
        parts.extend(self.nonzero.iter().map(|&v| format!("{} ≠ 0", a_name(v))));
        parts.join(", ")
    }
}

fn zeros(vars: &[(usize, usize)]) -> Vec<usize> {
    vars.iter().map(|&(r, c)| a_var(r, c)).collect()
}

fn ratio(target: (usize, usize), n1: (usize, usize), n2: (usize, usize), d: (usize, usize)) -> Substitution {
    Substitution { var: a_var(target.0, target.1), num: a(n1.0, n1.1) * a(n2.0, n2.1), den: a(d.0, d.1) }
}

/// The nine solution families of the system.
pub fn solution_families() -> Vec<SolutionFamily> {
    let plain = |z: &[(usize, usize)]| SolutionFamily { zeros: zeros(z), substitutions: vec![], nonzero: vec![] };
    vec![
        plain(&[(1, 1), (2, 1), (3, 1)]),
        plain(&[(1, 2), (2, 2), (3, 2)]),
        plain(&[(1, 1), (1, 2), (2, 1), (2, 2)]),
        plain(&[(1, 1), (1, 2), (3, 1), (3, 2)]),
        plain(&[(2, 1), (2, 2), (3, 1), (3, 2)]),
        SolutionFamily {
            zeros: zeros(&[(2, 1), (2, 2)]),
            substitutions: vec![ratio((1, 1), (1, 2), (3, 1), (3, 2))],
            nonzero: zeros(&[(3, 2)]),
        },
        SolutionFamily {
            zeros: zeros(&[(3, 1), (3, 2)]),
            substitutions: vec![ratio((1, 1), (1, 2), (2, 1), (2, 2))],
            nonzero: zeros(&[(2, 2)]),
        },
        SolutionFamily {
            zeros: vec![],
            substitutions: vec![ratio((1, 1), (1, 2), (2, 1), (2, 2)), ratio((2, 1), (2, 2), (3, 1), (3, 2))],
            nonzero: zeros(&[(2, 2), (3, 2)]),
        },
        SolutionFamily {
            zeros: zeros(&[(1, 1), (1, 2)]),
            substitutions: vec![ratio((2, 1), (2, 2), (3, 1), (3, 2))],
            nonzero: zeros(&[(2, 1), (3, 2)]),
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: String,
    pub det_restricted: String,
    pub forces_singular: bool,
    pub satisfies_system: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContrexReport {
    pub kappa: usize,
    pub quotient_layer_dims: Vec<usize>,
    pub relations_rank: usize,
    pub dim_v3: usize,
    pub star_bound: usize,
    pub exceeds_star_bound: bool,
    pub system: Vec<String>,
    pub derived_matches_printed: bool,
    pub families: Vec<FamilyReport>,
    pub condition_i_on_identity: bool,
}

impl ContrexReport {
    pub fn passed(&self) -> bool {
        self.relations_rank == 5
            && self.dim_v3 == 3
            && self.exceeds_star_bound
            && self.derived_matches_printed
            && self.families.len() == 9
            && self.families.iter().all(|f| f.forces_singular)
            && !self.condition_i_on_identity
    }
}

pub fn verify_contrex(kappa: usize) -> Result<ContrexReport> {
    if kappa < 3 {
        return Err(Error::invalid(format!("step must be at least 3, got {kappa}")));
    }
    let free = build_free_nilpotent::<Rational>(3, kappa, DEFAULT_DIMENSION_CAP)?;
    let relations = contrex_relations(&free)?;
    let relations_rank =
        crate::linalg::rank_of(free.dim(), relations.iter().map(|r| r.to_dense(free.dim())));
    let ideal = ideal_closure(&free, &relations)?;
    let (q, _) = quotient(&free, &ideal)?;
    let dim_v3 = q.layer_dim(3);
    let star_bound = v3_dimension_bounds(3, true);
    let printed = listed_contrex_system();
    let derived = derived_contrex_system();
    let det = det_by_expansion(&unknown_matrix());
    let families = solution_families()
        .iter()
        .map(|f| {
            let restricted = f.restrict(&det);
            let shown = restricted.display_with(&a_name).to_string();
            FamilyReport {
                family: f.describe(),
                det_restricted: shown,
                forces_singular: restricted.is_zero(),
                satisfies_system: printed.iter().all(|eq| f.restrict(eq).is_zero()),
            }
        })
        .collect();
    let condition_i_on_identity = check_condition_i(&q, &BasisChange::identity(3))?.holds;
    Ok(ContrexReport {
        kappa,
        quotient_layer_dims: q.layer_dims().to_vec(),
        relations_rank,
        dim_v3,
        star_bound,
        exceeds_star_bound: dim_v3 > star_bound,
        system: printed.iter().map(|p| format!("{}", p.display_with(&a_name))).collect(),
        derived_matches_printed: printed == derived,
        families,
        condition_i_on_identity,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemarkReport {
    pub quotient_layer_dims: Vec<usize>,
    pub u_x3_nonzero: bool,
    pub u_u_x3_nonzero: bool,
    pub u_u_x3_expansion: bool,
    pub x3_u_x3_zero: bool,
    pub ambient_star: bool,
}

impl RemarkReport {
    pub fn holds(&self) -> bool {
        self.u_x3_nonzero && self.u_u_x3_nonzero && self.u_u_x3_expansion && self.x3_u_x3_zero && self.ambient_star
    }
}

/// With `U = X_1 + X_2` in `f_{3,3}/⟨[X_j,[X_j,X_i]]⟩`: `Lie{U, X_3}` is
/// filiform of step 3 inside a type-★ algebra.
pub fn verify_remark_subalgebra() -> Result<RemarkReport> {
    let (q, p) = free_star_quotient()?;
    let x: Vec<_> = (0..3).map(|i| p.project(&AlgebraVector::basis(i))).collect::<Result<_>>()?;
    let u = x[0].clone() + x[1].clone();
    let u_x3 = q.bracket(&u, &x[2])?;
    let u_u_x3 = q.bracket(&u, &u_x3)?;
    let expansion = q.bracket(&x[1], &q.bracket(&x[0], &x[2])?)? + q.bracket(&x[0], &q.bracket(&x[1], &x[2])?)?;
    let x3_u_x3 = q.bracket(&x[2], &u_x3)?;
    let change = BasisChange::new(crate::linalg::Matrix::from_rows(
        x.iter().map(|v| v.to_dense(3)).collect(),
    )?)?;
    Ok(RemarkReport {
        quotient_layer_dims: q.layer_dims().to_vec(),
        u_x3_nonzero: !u_x3.is_zero(),
        u_u_x3_nonzero: !u_u_x3.is_zero(),
        u_u_x3_expansion: u_u_x3 == expansion,
        x3_u_x3_zero: x3_u_x3.is_zero(),
        ambient_star: is_type_star_basis(&q, Some(&change))?.holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn relations_are_independent_and_cut_v3_to_three() {
        let r = verify_contrex(3).unwrap();
        assert_eq!(r.relations_rank, 5);
        assert_eq!(r.quotient_layer_dims, vec![3, 3, 3]);
        assert_eq!(r.star_bound, 2);
        assert!(r.exceeds_star_bound);
        assert!(!r.condition_i_on_identity);
    }

    #[test]
    fn printed_system_matches_formal_expansion() {
        assert_eq!(listed_contrex_system(), derived_contrex_system());
    }

    #[test]
    fn every_family_is_singular() {
        let r = verify_contrex(3).unwrap();
        for f in &r.families {
            assert!(f.forces_singular, "{}: {}", f.family, f.det_restricted);
        }
        assert!(r.passed());
    }

    #[test]
    fn first_family_has_zero_first_column() {
        let f = &solution_families()[0];
        let det = det_by_expansion(&unknown_matrix());
        assert!(f.restrict(&det).is_zero());
        assert_eq!(f.describe(), "a11 = 0, a21 = 0, a31 = 0");
    }

    #[test]
    fn a_generic_point_is_not_a_solution() {
        // a = identity does not satisfy α_1 = 0 (α_1 = 1)
        let id: Vec<Rational> =
            (0..9).map(|i| if i % 4 == 0 { Rational::one() } else { Rational::zero() }).collect();
        let values: Vec<_> = listed_contrex_system().iter().map(|p| p.evaluate(&id).unwrap()).collect();
        assert!(values.iter().any(|v| !v.is_zero()));
    }

    #[test]
    fn higher_step_quotient_keeps_three_dimensional_v3() {
        let r = verify_contrex(4).unwrap();
        assert_eq!(r.quotient_layer_dims[..3], [3, 3, 3]);
        assert!(r.passed());
    }

    #[test]
    fn remark_subalgebra() {
        let r = verify_remark_subalgebra().unwrap();
        assert_eq!(r.quotient_layer_dims, vec![3, 3, 2]);
        assert!(r.holds(), "{r:?}");
    }
}
