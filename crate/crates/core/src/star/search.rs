//! Heuristic search for a type-★ basis, combined with the two available
//! disproofs into a single verdict.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::condition::RankCertificate;
use super::{check_condition_i, is_type_star_basis, v3_dimension_bounds, BasisChange};
use crate::algebra::StratifiedAlgebra;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::random::{random_invertible, rng_from_seed, RationalDistribution};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StarVerdict {
    StarOnBasis,
    StarWitnessFound,
    DisprovedByConditionI,
    DisprovedByV3Bound,
    Inconclusive,
}

impl StarVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            StarVerdict::StarOnBasis => "star-on-basis",
            StarVerdict::StarWitnessFound => "star-witness-found",
            StarVerdict::DisprovedByConditionI => "disproved-by-condition-i",
            StarVerdict::DisprovedByV3Bound => "disproved-by-v3-bound",
            StarVerdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for StarVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StarVerdictReport<S> {
    pub verdict: StarVerdict,
    /// A basis on which the relations hold, or on which condition (i) holds.
    pub basis: Option<BasisChange<S>>,
    /// Failing pair `(j, i)` for the given basis.
    pub witness: Option<(usize, usize)>,
    pub condition_i: Option<RankCertificate>,
    pub dim_v3: usize,
    pub v3_star_bound: usize,
    pub attempts: usize,
}

const SHIFTS: [(i64, i64); 10] = [(1, 1), (-1, 1), (2, 1), (-2, 1), (3, 1), (-3, 1), (1, 2), (-1, 2), (1, 3), (-1, 3)];

/// Deterministic candidates `Y_a = X_a − t·X_b`, the other vectors unchanged.
fn substitution_candidates<S: Scalar>(m: usize) -> impl Iterator<Item = BasisChange<S>> {
    (0..m).flat_map(move |a| {
        (0..m).filter(move |&b| b != a).flat_map(move |b| {
            SHIFTS.iter().map(move |&(p, q)| {
                let mut matrix = Matrix::identity(m);
                matrix[(a, b)] = -S::from_ratio(p, q);
                BasisChange::new(matrix).expect("unipotent")
            })
        })
    })
}

/// Bases that put `X_a, X_b` first, the remaining vectors after them in
/// order.
fn ordered_pair_bases<S: Scalar>(m: usize) -> impl Iterator<Item = BasisChange<S>> {
    (0..m).flat_map(move |a| {
        (0..m).filter(move |&b| b != a).map(move |b| {
            let order: Vec<usize> = [a, b].into_iter().chain((0..m).filter(|&k| k != a && k != b)).collect();
            BasisChange::new(Matrix::identity(m).permute_rows(&order)).expect("permutation")
        })
    })
}

/// Looks for a basis satisfying the type-★ relations: the identity, then
/// the substitutions `X_a − t·X_b`, then up to `budget` random rational
/// changes drawn from `dist`. `None` proves nothing.
pub fn search_star_basis<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    budget: usize,
    seed: u64,
    dist: &RationalDistribution,
) -> Result<(Option<BasisChange<S>>, usize)> {
    let m = algebra.rank();
    let mut attempts = 1;
    if is_type_star_basis(algebra, None)?.holds {
        return Ok((Some(BasisChange::identity(m)), attempts));
    }
    for candidate in substitution_candidates(m) {
        attempts += 1;
        if is_type_star_basis(algebra, Some(&candidate))?.holds {
            return Ok((Some(candidate), attempts));
        }
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..budget {
        attempts += 1;
        let candidate = BasisChange::new(random_invertible(&mut rng, m, dist))?;
        if is_type_star_basis(algebra, Some(&candidate))?.holds {
            return Ok((Some(candidate), attempts));
        }
    }
    Ok((None, attempts))
}

/// Verdict for `algebra`, in order: the given basis, condition (i) on the
/// coordinate orderings, the `V_3` bound, then the search.
pub fn classify_star<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    basis: Option<&BasisChange<S>>,
    budget: usize,
    seed: u64,
    dist: &RationalDistribution,
) -> Result<StarVerdictReport<S>> {
    let m = algebra.rank();
    let dim_v3 = algebra.layer_dim(3);
    let v3_star_bound = v3_dimension_bounds(m, true);
    let check = is_type_star_basis(algebra, basis)?;
    let mut report = StarVerdictReport {
        verdict: StarVerdict::StarOnBasis,
        basis: Some(basis.cloned().unwrap_or_else(|| BasisChange::identity(m))),
        witness: check.witness,
        condition_i: None,
        dim_v3,
        v3_star_bound,
        attempts: 1,
    };
    if check.holds {
        return Ok(report);
    }
    report.basis = None;
    if algebra.step() >= 3 && m >= 2 {
        let start = basis.cloned().unwrap_or_else(|| BasisChange::identity(m));
        for order in ordered_pair_bases(m) {
            report.attempts += 1;
            let candidate = order.compose(&start)?;
            let r = check_condition_i(algebra, &candidate)?;
            if r.holds {
                report.verdict = StarVerdict::DisprovedByConditionI;
                report.condition_i = Some(r.certificate());
                report.basis = Some(candidate);
                return Ok(report);
            }
        }
    }
    if dim_v3 > v3_star_bound {
        report.verdict = StarVerdict::DisprovedByV3Bound;
        return Ok(report);
    }
    let (found, attempts) = search_star_basis(algebra, budget, seed, dist)?;
    report.attempts += attempts;
    report.verdict = if found.is_some() { StarVerdict::StarWitnessFound } else { StarVerdict::Inconclusive };
    report.basis = found;
    Ok(report)
}
