//! Carnot groups in exponential coordinates.
//!
//! The product `z(x, y) = log(exp x · exp y)` is expanded once per algebra
//! by Dynkin's form of the Baker–Campbell–Hausdorff series, which
//! terminates at bracket length κ. For the unit upper-triangular family an
//! independent path through exact matrix exponentials is provided.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::StratifiedAlgebra;
use crate::error::{Error, Result};
use crate::linalg::det_by_expansion;
use crate::poly::Polynomial;
use crate::scalar::{rational_string, Rational, Ring, Scalar};

/// Longest step and largest dimension the law derivation accepts by
/// default.
pub const DEFAULT_MAX_STEP: usize = 12;
pub const DEFAULT_MAX_DIM: usize = 400;

#[derive(Clone, PartialEq)]
pub struct GroupLaw<S> {
    algebra: StratifiedAlgebra<S>,
    /// `z_k` as polynomials in `x_0..x_{n-1}, y_0..y_{n-1}` (variables
    /// `0..n` and `n..2n`).
    coords: Vec<Polynomial<S>>,
}

impl<S: Scalar> std::fmt::Debug for GroupLaw<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupLaw").field("algebra", &self.algebra.name()).field("coords", &self.coords).finish()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupPoint<S> {
    pub coords: Vec<S>,
}

impl<S: Scalar> GroupPoint<S> {
    pub fn new(coords: Vec<S>) -> Self {
        GroupPoint { coords }
    }

    pub fn identity(n: usize) -> Self {
        GroupPoint { coords: vec![S::zero(); n] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// Dynkin coefficient of a letter word (`false` = x, `true` = y): the sum
/// over splittings into blocks `x^r y^s` (r + s > 0) of
/// `(−1)^{b−1} / (b · N · Π r! s!)`, `b` the number of blocks.
fn dynkin_coefficient(word: &[bool]) -> Rational {
    fn go(word: &[bool], pos: usize, blocks: i64, denom: i64, acc: &mut Rational, total: i64) {
        if pos == word.len() {
            let sign = if blocks % 2 == 1 { 1 } else { -1 };
            *acc += Rational::from_ratio(sign, blocks * total * denom);
            return;
        }
        let xs = word[pos..].iter().take_while(|&&l| !l).count();
        for r in 0..=xs {
            let ys = if r == xs { word[pos + r..].iter().take_while(|&&l| l).count() } else { 0 };
            for s in 0..=ys {
                if r + s == 0 {
                    continue;
                }
                go(word, pos + r + s, blocks + 1, denom * factorial(r) * factorial(s), acc, total);
            }
        }
    }
    let mut acc = Rational::from_int(0);
    go(word, 0, 0, 1, &mut acc, word.len() as i64);
    acc
}

fn to_scalar<S: Scalar>(q: &Rational) -> Result<S> {
    use num_traits::ToPrimitive;
    let (n, d) = (q.numer().to_i64(), q.denom().to_i64());
    match (n, d) {
        (Some(n), Some(d)) => Ok(S::from_ratio(n, d)),
        _ => Err(Error::ResourceLimit(format!("coefficient {q} out of range"))),
    }
}

impl<S: Scalar> GroupLaw<S> {
    pub fn derive(algebra: &StratifiedAlgebra<S>) -> Result<Self> {
        Self::derive_with_limits(algebra, DEFAULT_MAX_STEP, DEFAULT_MAX_DIM)
    }

    pub fn derive_with_limits(algebra: &StratifiedAlgebra<S>, max_step: usize, max_dim: usize) -> Result<Self> {
        let n = algebra.dim();
        let kappa = algebra.step();
        if kappa > max_step || n > max_dim {
            return Err(Error::ResourceLimit(format!(
                "group law for dimension {n}, step {kappa} exceeds the limits ({max_dim}, {max_step})"
            )));
        }
        let x: Vec<Polynomial<S>> = (0..n).map(Polynomial::var).collect();
        let y: Vec<Polynomial<S>> = (0..n).map(|i| Polynomial::var(n + i)).collect();
        let mut coords = vec![Polynomial::zero(); n];
        // Words grow to the left; `value` is the right-nested bracket.
        let mut stack: Vec<(Vec<bool>, Vec<Polynomial<S>>)> = vec![(vec![false], x.clone()), (vec![true], y.clone())];
        while let Some((word, value)) = stack.pop() {
            let c: S = to_scalar(&dynkin_coefficient(&word))?;
            if !c.is_zero() {
                for (z, v) in coords.iter_mut().zip(&value) {
                    if !v.is_zero() {
                        *z = z.clone() + v.scale(&c);
                    }
                }
            }
            if word.len() == kappa {
                continue;
            }
            for (letter, vec) in [(false, &x), (true, &y)] {
                let next = algebra.bracket_dense(vec, &value);
                if next.iter().all(|p| p.is_zero()) {
                    continue;
                }
                let mut w = Vec::with_capacity(word.len() + 1);
                w.push(letter);
                w.extend_from_slice(&word);
                stack.push((w, next));
            }
        }
        Ok(GroupLaw { algebra: algebra.clone(), coords })
    }

    pub fn algebra(&self) -> &StratifiedAlgebra<S> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coordinate(&self, k: usize) -> &Polynomial<S> {
        &self.coords[k]
    }

    pub fn coordinates(&self) -> &[Polynomial<S>] {
        &self.coords
    }

    fn check(&self, p: &GroupPoint<S>) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.dim() });
        }
        Ok(())
    }

    pub fn multiply(&self, x: &GroupPoint<S>, y: &GroupPoint<S>) -> Result<GroupPoint<S>> {
        self.check(x)?;
        self.check(y)?;
        let point: Vec<S> = x.coords.iter().chain(&y.coords).cloned().collect();
        let coords = self.coords.iter().map(|z| z.evaluate(&point)).collect::<Result<_>>()?;
        Ok(GroupPoint { coords })
    }

    pub fn inverse(&self, x: &GroupPoint<S>) -> Result<GroupPoint<S>> {
        self.check(x)?;
        Ok(GroupPoint { coords: x.coords.iter().map(|c| -c.clone()).collect() })
    }

    pub fn dilate(&self, lambda: &S, x: &GroupPoint<S>) -> Result<GroupPoint<S>> {
        self.check(x)?;
        dilate(&self.algebra, lambda, x)
    }

    pub fn homogeneous_dimension(&self) -> usize {
        self.algebra.homogeneous_dimension()
    }

    /// `y ↦ x · y` as polynomials in `y` (variables `0..n`).
    pub fn left_translation(&self, x: &GroupPoint<S>) -> Result<Vec<Polynomial<S>>> {
        self.check(x)?;
        let n = self.dim();
        let subs: Vec<Polynomial<S>> = x
            .coords
            .iter()
            .map(|c| Polynomial::constant(c.clone()))
            .chain((0..n).map(Polynomial::var))
            .collect();
        self.coords.iter().map(|z| z.compose(&subs)).collect()
    }

    /// Whether `∂z_k/∂y_l` is `δ_kl` whenever `α_l ≥ α_k`, as a polynomial
    /// identity: the Jacobian of every left translation is unipotent and
    /// block lower-triangular in the layer order.
    pub fn translation_jacobian_is_unipotent(&self) -> bool {
        let n = self.dim();
        let w = self.algebra.weights();
        (0..n).all(|k| {
            (0..n).filter(|&l| w[l] >= w[k]).all(|l| {
                let d = self.coords[k].derivative(n + l);
                if l == k {
                    d == Polynomial::one()
                } else {
                    d.is_zero()
                }
            })
        })
    }

    /// The Jacobian determinant of `y ↦ x·y`, as a polynomial in `x, y`.
    pub fn translation_jacobian_det(&self) -> Polynomial<S> {
        let n = self.dim();
        let rows: Vec<Vec<Polynomial<S>>> =
            (0..n).map(|k| (0..n).map(|l| self.coords[k].derivative(n + l)).collect()).collect();
        det_by_expansion(&rows)
    }

    /// Whether every `z_k(δ_λ x, δ_λ y) = λ^{α_k} z_k(x, y)`.
    pub fn is_dilation_equivariant(&self) -> bool {
        let w = self.algebra.weights();
        let both: Vec<u32> = w.iter().chain(&w).copied().collect();
        self.coords.iter().zip(&w).all(|(z, &a)| z.homogeneous_weight(&both) == Some(a))
    }
}

pub fn dilate<S: Scalar>(algebra: &StratifiedAlgebra<S>, lambda: &S, x: &GroupPoint<S>) -> Result<GroupPoint<S>> {
    if !lambda.is_positive() {
        return Err(Error::invalid(format!("dilation factor must be positive, got {lambda}")));
    }
    if x.dim() != algebra.dim() {
        return Err(Error::DimensionMismatch { expected: algebra.dim(), got: x.dim() });
    }
    let coords = x.coords.iter().zip(algebra.weights()).map(|(c, w)| c.clone() * lambda.powi(w)).collect();
    Ok(GroupPoint { coords })
}

/// Jacobian determinant of `δ_λ` as a polynomial in `λ` (variable 0).
pub fn dilation_jacobian_det<S: Scalar>(algebra: &StratifiedAlgebra<S>) -> Polynomial<S> {
    let w = algebra.weights();
    let n = w.len();
    let rows: Vec<Vec<Polynomial<S>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Polynomial::monomial(S::one(), vec![w[i]]) } else { Polynomial::zero() })
                .collect()
        })
        .collect();
    det_by_expansion(&rows)
}

/// One layer's contribution `ε_j ‖p_j‖^{1/j}`, stored exactly as `ε_j` and
/// `‖p_j‖²`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerTerm<S> {
    pub layer: usize,
    pub eps: S,
    pub norm_sq: S,
}

impl<S: Scalar> LayerTerm<S> {
    pub fn value(&self) -> f64 {
        let norm = self.norm_sq.to_f64_lossy().sqrt();
        self.eps.to_f64_lossy() * norm.powf(1.0 / self.layer as f64)
    }

    /// `(ε_j ‖p_j‖^{1/j})^{2j} = ε_j^{2j} ‖p_j‖²`, exact.
    pub fn power_form(&self) -> S {
        self.eps.powi(2 * self.layer as u32) * self.norm_sq.clone()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DInfinity<S> {
    pub terms: Vec<LayerTerm<S>>,
    pub value: f64,
}

/// `ε_j = 1/2` for `j = 2..=κ`.
pub fn default_eps<S: Scalar>(kappa: usize) -> Vec<S> {
    vec![S::from_ratio(1, 2); kappa.saturating_sub(1)]
}

/// `d∞(x, y) = max_j ε_j ‖(y⁻¹·x)_j‖^{1/j}` with `ε_1 = 1`; `eps` lists
/// `ε_2..ε_κ`, each in `(0, 1]`.
pub fn d_infinity<S: Scalar>(
    law: &GroupLaw<S>,
    eps: &[S],
    x: &GroupPoint<S>,
    y: &GroupPoint<S>,
) -> Result<DInfinity<S>> {
    let kappa = law.algebra.step();
    if eps.len() != kappa.saturating_sub(1) {
        return Err(Error::DimensionMismatch { expected: kappa.saturating_sub(1), got: eps.len() });
    }
    if let Some(e) = eps.iter().find(|e| !e.is_positive() || **e > S::one()) {
        return Err(Error::invalid(format!("ε must lie in (0, 1], got {e}")));
    }
    let p = law.multiply(&law.inverse(y)?, x)?;
    let terms: Vec<LayerTerm<S>> = (1..=kappa)
        .map(|layer| LayerTerm {
            layer,
            eps: if layer == 1 { S::one() } else { eps[layer - 2].clone() },
            norm_sq: law.algebra.layer_range(layer).fold(S::zero(), |acc, i| {
                acc + p.coords[i].clone() * p.coords[i].clone()
            }),
        })
        .collect();
    let value = terms.iter().map(LayerTerm::value).fold(0.0, f64::max);
    Ok(DInfinity { terms, value })
}

/// Matrix positions `(row, col)`, 0-based, of the basis of the unit
/// upper-triangular algebra of size `m+1`, ordered by superdiagonal.
pub fn gm_positions(m: usize) -> Vec<(usize, usize)> {
    (1..=m).flat_map(|l| (0..=m - l).map(move |k| (k, k + l))).collect()
}

type Mat<R> = Vec<Vec<R>>;

fn mat_mul<R: Ring>(a: &Mat<R>, b: &Mat<R>) -> Mat<R> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(R::zero(), |acc, k| {
                        if a[i][k].is_zero() || b[k][j].is_zero() {
                            acc
                        } else {
                            acc + a[i][k].clone() * b[k][j].clone()
                        }
                    })
                })
                .collect()
        })
        .collect()
}

fn mat_identity<R: Ring>(n: usize) -> Mat<R> {
    (0..n).map(|i| (0..n).map(|j| if i == j { R::one() } else { R::zero() }).collect()).collect()
}

fn mat_axpy<R: Ring>(acc: &mut Mat<R>, c: &R, a: &Mat<R>) {
    for (ra, rb) in acc.iter_mut().zip(a) {
        for (x, y) in ra.iter_mut().zip(rb) {
            if !y.is_zero() {
                *x = x.clone() + c.clone() * y.clone();
            }
        }
    }
}

/// `Σ x_i E_i` as an `(m+1)×(m+1)` matrix.
pub fn gm_algebra_matrix<R: Ring>(m: usize, x: &[R]) -> Result<Mat<R>> {
    let pos = gm_positions(m);
    if x.len() != pos.len() {
        return Err(Error::DimensionMismatch { expected: pos.len(), got: x.len() });
    }
    let mut out: Mat<R> = vec![vec![R::zero(); m + 1]; m + 1];
    for (&(r, c), v) in pos.iter().zip(x) {
        out[r][c] = v.clone();
    }
    Ok(out)
}

/// `exp` of a strictly upper-triangular matrix; the series stops at the
/// matrix size.
pub fn nilpotent_exp<R: Ring>(a: &Mat<R>) -> Mat<R> {
    let n = a.len();
    let mut out = mat_identity(n);
    let mut power = mat_identity(n);
    for k in 1..n {
        power = mat_mul(&power, a);
        mat_axpy(&mut out, &R::from_ratio(1, factorial(k)), &power);
    }
    out
}

/// `log` of a unit upper-triangular matrix.
pub fn unipotent_log<R: Ring>(u: &Mat<R>) -> Mat<R> {
    let n = u.len();
    let mut nil = u.clone();
    for (i, row) in nil.iter_mut().enumerate() {
        row[i] = row[i].clone() - R::one();
    }
    let mut out: Mat<R> = vec![vec![R::zero(); n]; n];
    let mut power = mat_identity(n);
    for k in 1..n {
        power = mat_mul(&power, &nil);
        let sign = if k % 2 == 1 { 1 } else { -1 };
        mat_axpy(&mut out, &R::from_ratio(sign, k as i64), &power);
    }
    out
}

/// `exp(Σ x_i E_i)`.
pub fn gm_exp<R: Ring>(m: usize, x: &[R]) -> Result<Mat<R>> {
    Ok(nilpotent_exp(&gm_algebra_matrix(m, x)?))
}

/// Exponential coordinates of a unit upper-triangular matrix.
pub fn gm_log<R: Ring>(m: usize, u: &Mat<R>) -> Result<Vec<R>> {
    if u.len() != m + 1 || u.iter().any(|r| r.len() != m + 1) {
        return Err(Error::DimensionMismatch { expected: m + 1, got: u.len() });
    }
    for (i, row) in u.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let ok = if i == j { *v == R::one() } else { j > i || v.is_zero() };
            if !ok {
                return Err(Error::invalid("matrix is not unit upper-triangular"));
            }
        }
    }
    let l = unipotent_log(u);
    Ok(gm_positions(m).into_iter().map(|(r, c)| l[r][c].clone()).collect())
}

/// `log(exp x · exp y)` through matrices.
pub fn gm_oracle_product<R: Ring>(m: usize, x: &[R], y: &[R]) -> Result<Vec<R>> {
    gm_log(m, &mat_mul(&gm_exp(m, x)?, &gm_exp(m, y)?))
}

/// The oracle law with symbolic `x, y` (variables `0..n`, `n..2n`).
pub fn gm_oracle_law<S: Scalar>(m: usize) -> Result<Vec<Polynomial<S>>> {
    let n = gm_positions(m).len();
    let x: Vec<Polynomial<S>> = (0..n).map(Polynomial::var).collect();
    let y: Vec<Polynomial<S>> = (0..n).map(|i| Polynomial::var(n + i)).collect();
    gm_oracle_product(m, &x, &y)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawMonomialJson {
    #[serde(with = "rational_string")]
    pub coeff: Rational,
    pub x: Vec<u32>,
    pub y: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupLawJson {
    pub algebra: String,
    pub coordinates: Vec<Vec<LawMonomialJson>>,
}

impl GroupLaw<Rational> {
    pub fn to_json(&self) -> GroupLawJson {
        let n = self.dim();
        let coordinates = self
            .coords
            .iter()
            .map(|z| {
                z.terms()
                    .map(|(m, c)| {
                        let mut full = m.clone();
                        full.resize(2 * n, 0);
                        LawMonomialJson { coeff: c.clone(), x: full[..n].to_vec(), y: full[n..].to_vec() }
                    })
                    .collect()
            })
            .collect();
        GroupLawJson { algebra: self.algebra.name().to_string(), coordinates }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::*;

    type Q = Rational;
    type P = Polynomial<Q>;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn pt(v: &[(i64, i64)]) -> GroupPoint<Q> {
        GroupPoint::new(v.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn dynkin_low_order_coefficients() {
        // x + y + ½[x,y] + 1/12[x,[x,y]] − 1/12[y,[x,y]]
        let c = |w: &[bool]| dynkin_coefficient(w);
        assert_eq!(c(&[false]), q(1, 1));
        // each bracket collects the words that produce it
        assert_eq!(c(&[false, true]) - c(&[true, false]), q(1, 2));
        assert_eq!(c(&[false, false, true]) - c(&[false, true, false]), q(1, 12));
        assert_eq!(c(&[true, false, true]) - c(&[true, true, false]), q(-1, 12));
    }

    #[test]
    fn heisenberg_law() {
        let law = GroupLaw::derive(&heisenberg::<Q>()).unwrap();
        let x = |i| P::var(i);
        let y = |i: usize| P::var(3 + i);
        assert_eq!(law.coordinate(0), &(x(0) + y(0)));
        assert_eq!(law.coordinate(1), &(x(1) + y(1)));
        let half = q(1, 2);
        assert_eq!(law.coordinate(2), &(x(2) + y(2) + (x(0) * y(1) - x(1) * y(0)).scale(&half)));
        let p = law.multiply(&pt(&[(1, 1), (0, 1), (0, 1)]), &pt(&[(0, 1), (1, 1), (0, 1)])).unwrap();
        assert_eq!(p, pt(&[(1, 1), (1, 1), (1, 2)]));
    }

    #[test]
    fn abelian_law_is_addition() {
        let alg = build_free_nilpotent::<Q>(3, 1, DEFAULT_DIMENSION_CAP).unwrap();
        let law = GroupLaw::derive(&alg).unwrap();
        for k in 0..3 {
            assert_eq!(law.coordinate(k), &(P::var(k) + P::var(3 + k)));
        }
    }

    #[test]
    fn gm_law_matches_matrix_oracle_symbolically() {
        for m in 2..=4 {
            let law = GroupLaw::derive(&build_unit_upper_triangular::<Q>(m).unwrap()).unwrap();
            assert_eq!(law.coordinates(), gm_oracle_law::<Q>(m).unwrap().as_slice(), "m = {m}");
        }
    }

    #[test]
    fn oracle_entry_for_heisenberg() {
        let x: Vec<P> = (0..3).map(P::var).collect();
        let e = gm_exp(2, &x).unwrap();
        assert_eq!(e[0][2], P::var(2) + (P::var(0) * P::var(1)).scale(&q(1, 2)));
        assert_eq!(gm_exp::<Q>(2, &[q(0, 1), q(0, 1), q(0, 1)]).unwrap(), mat_identity(3));
        assert_eq!(gm_log(2, &e).unwrap(), x);
    }

    #[test]
    fn engel_dilation() {
        let law = GroupLaw::derive(&engel::<Q>()).unwrap();
        let d = law.dilate(&q(2, 1), &pt(&[(1, 1); 4])).unwrap();
        assert_eq!(d, pt(&[(2, 1), (2, 1), (4, 1), (8, 1)]));
        assert!(law.dilate(&q(0, 1), &pt(&[(1, 1); 4])).is_err());
        assert!(law.dilate(&q(-1, 1), &pt(&[(1, 1); 4])).is_err());
    }

    #[test]
    fn homogeneous_dimensions() {
        assert_eq!(heisenberg::<Q>().homogeneous_dimension(), 4);
        assert_eq!(build_unit_upper_triangular::<Q>(3).unwrap().homogeneous_dimension(), 10);
        assert_eq!(engel::<Q>().homogeneous_dimension(), 7);
    }

    #[test]
    fn structural_identities() {
        for alg in [heisenberg::<Q>(), engel(), build_unit_upper_triangular(3).unwrap()] {
            let law = GroupLaw::derive(&alg).unwrap();
            assert!(law.translation_jacobian_is_unipotent());
            assert_eq!(law.translation_jacobian_det(), P::one());
            assert!(law.is_dilation_equivariant());
            let qd = alg.homogeneous_dimension() as u32;
            assert_eq!(dilation_jacobian_det(&alg), P::monomial(q(1, 1), vec![qd]));
        }
    }

    #[test]
    fn d_infinity_examples() {
        let law = GroupLaw::derive(&heisenberg::<Q>()).unwrap();
        let eps = default_eps::<Q>(2);
        let zero = GroupPoint::identity(3);
        let d = d_infinity(&law, &eps, &pt(&[(3, 1), (4, 1), (0, 1)]), &zero).unwrap();
        assert_eq!(d.value, 5.0);
        assert_eq!(d.terms[0].norm_sq, q(25, 1));
        let d = d_infinity(&law, &eps, &pt(&[(0, 1), (0, 1), (4, 1)]), &zero).unwrap();
        assert_eq!(d.value, 1.0);
        let x = pt(&[(1, 2), (-3, 1), (7, 3)]);
        assert_eq!(d_infinity(&law, &eps, &x, &x).unwrap().value, 0.0);
        assert!(d_infinity(&law, &[q(3, 2)], &x, &zero).is_err());
        assert!(d_infinity(&law, &[], &x, &zero).is_err());
    }

    #[test]
    fn law_json_splits_variables() {
        let law = GroupLaw::derive(&heisenberg::<Q>()).unwrap();
        let json = law.to_json();
        assert_eq!(json.coordinates.len(), 3);
        assert!(json.coordinates[2].iter().all(|m| m.x.len() == 3 && m.y.len() == 3));
        assert_eq!(json.coordinates[2].len(), 4);
    }
}
