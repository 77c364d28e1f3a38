//! First-order differential operators with polynomial coefficients, the
//! left-invariant frame of a group law, and level sets of polynomials.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::StratifiedAlgebra;
use crate::constructors::{build_filiform_model, build_free_nilpotent, HallWord, DEFAULT_DIMENSION_CAP};
use crate::error::{Error, Result};
use crate::group::GroupLaw;
use crate::linalg::rank_of;
use crate::poly::{default_var_name, Polynomial};
use crate::scalar::{format_rational, Rational, Ring, Scalar};

/// `Σ_i c_i(x) ∂/∂x_i`.
#[derive(Clone, PartialEq)]
pub struct PolyVectorField<S> {
    coeffs: Vec<Polynomial<S>>,
}

impl<S: Scalar> PolyVectorField<S> {
    pub fn new(coeffs: Vec<Polynomial<S>>) -> Self {
        PolyVectorField { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        PolyVectorField { coeffs: vec![Polynomial::zero(); n] }
    }

    /// `∂/∂x_i` on `ℝⁿ`.
    pub fn partial(i: usize, n: usize) -> Self {
        let mut f = Self::zero(n);
        f.coeffs[i] = Polynomial::one();
        f
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficient(&self, i: usize) -> &Polynomial<S> {
        &self.coeffs[i]
    }

    pub fn coefficients(&self) -> &[Polynomial<S>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn apply(&self, f: &Polynomial<S>) -> Polynomial<S> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Polynomial::zero(), |acc, (i, c)| {
                let d = f.derivative(i);
                if d.is_zero() {
                    acc
                } else {
                    acc + c.clone() * d
                }
            })
    }

    /// `[X, Y] = XY − YX`, again a vector field.
    pub fn commutator(&self, other: &Self) -> Self {
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| self.apply(b) - other.apply(a)).collect();
        PolyVectorField { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        PolyVectorField { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn scale(&self, c: &S) -> Self {
        PolyVectorField { coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect() }
    }

    /// Whether `X(fg) = X(f)g + fX(g)`.
    pub fn leibniz_holds(&self, f: &Polynomial<S>, g: &Polynomial<S>) -> bool {
        self.apply(&(f.clone() * g.clone())) == self.apply(f) * g.clone() + f.clone() * self.apply(g)
    }

    /// `X` with coefficients `c_i ∘ subs`.
    pub fn compose(&self, subs: &[Polynomial<S>]) -> Result<Self> {
        Ok(PolyVectorField { coeffs: self.coeffs.iter().map(|c| c.compose(subs)).collect::<Result<_>>()? })
    }

    pub fn display_with<'a>(&'a self, name: &'a dyn Fn(usize) -> String) -> impl fmt::Display + 'a {
        FieldDisplay { field: self, name }
    }
}

struct FieldDisplay<'a, S> {
    field: &'a PolyVectorField<S>,
    name: &'a dyn Fn(usize) -> String,
}

impl<S: Scalar> fmt::Display for FieldDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.field.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *c == Polynomial::one() {
                write!(f, "∂{}", i + 1)?;
            } else {
                write!(f, "({})∂{}", c.display_with(self.name), i + 1)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Display for PolyVectorField<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with(&default_var_name).fmt(f)
    }
}

impl<S: Scalar> fmt::Debug for PolyVectorField<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `X_i(x) = ∂z(x, y)/∂y_i` at `y = 0`, for every basis vector.
pub fn left_invariant_fields<S: Scalar>(law: &GroupLaw<S>) -> Vec<PolyVectorField<S>> {
    let n = law.dim();
    (0..n)
        .map(|i| {
            PolyVectorField::new(law.coordinates().iter().map(|z| z.derivative(n + i).truncate_vars(n)).collect())
        })
        .collect()
}

/// First pair `(i, j)` with `[X_i, X_j] ≠ Σ_k c_ij^k X_k`.
pub fn bracket_relation_witness<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    fields: &[PolyVectorField<S>],
) -> Result<Option<(usize, usize)>> {
    let n = algebra.dim();
    if fields.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: fields.len() });
    }
    let vars = fields.first().map_or(0, PolyVectorField::dim);
    for i in 0..n {
        for j in i + 1..n {
            let lhs = fields[i].commutator(&fields[j]);
            let rhs = algebra
                .bracket_basis(i, j)
                .iter()
                .fold(PolyVectorField::zero(vars), |acc, (k, c)| acc.add(&fields[k].scale(c)));
            if lhs != rhs {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

/// The filiform chart `X_1 = ∂_1`,
/// `X_2 = ∂_2 + Σ_{k=1}^{κ−1} (−1)^k x_1^k/k! ∂_{k+2}` on `ℝ^{κ+1}`.
pub fn filiform_model_fields<S: Scalar>(kappa: usize) -> Result<(PolyVectorField<S>, PolyVectorField<S>)> {
    if kappa < 2 {
        return Err(Error::invalid(format!("filiform step must be at least 2, got {kappa}")));
    }
    let n = kappa + 1;
    let x1 = PolyVectorField::partial(0, n);
    let mut x2 = PolyVectorField::partial(1, n);
    let mut fact = 1i64;
    for k in 1..kappa {
        fact *= k as i64;
        let sign = if k % 2 == 0 { 1 } else { -1 };
        x2.coeffs[k + 1] = Polynomial::monomial(S::from_ratio(sign, fact), vec![k as u32]);
    }
    Ok((x1, x2))
}

/// `X_1, X_2` followed by `X_{k+1} = [X_k, X_1]`, matching the basis of
/// the filiform model algebra.
pub fn filiform_chain<S: Scalar>(x1: &PolyVectorField<S>, x2: &PolyVectorField<S>, kappa: usize) -> Vec<PolyVectorField<S>> {
    let mut out = vec![x1.clone(), x2.clone()];
    for _ in 2..=kappa {
        let next = out.last().expect("nonempty").commutator(x1);
        out.push(next);
    }
    out
}

/// `(X_1 f, …, X_m f)`.
pub fn horizontal_gradient<S: Scalar>(fields: &[PolyVectorField<S>], f: &Polynomial<S>) -> Vec<Polynomial<S>> {
    fields.iter().map(|x| x.apply(f)).collect()
}

/// The weight `w` with `f(δ_λ x) = λ^w f(x)`, if `f` is homogeneous.
pub fn check_delta_homogeneity<S: Scalar>(algebra: &StratifiedAlgebra<S>, f: &Polynomial<S>) -> Option<u32> {
    f.homogeneous_weight(&algebra.weights())
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntrinsicNormal<S> {
    pub gradient: Vec<S>,
    pub characteristic: bool,
    pub norm_sq: S,
    /// `−∇f/|∇f|`, when the norm is exact in `S`.
    pub exact_unit: Option<Vec<S>>,
    pub unit: Vec<f64>,
}

/// `ν = −∇_G f(x)/|∇_G f(x)|` at a point of `{f = 0}`.
pub fn levelset_intrinsic_normal<S: Scalar>(
    fields: &[PolyVectorField<S>],
    f: &Polynomial<S>,
    x: &[S],
) -> Result<IntrinsicNormal<S>> {
    if !f.evaluate(x)?.is_zero() {
        return Err(Error::precondition("the point is not on the level set f = 0"));
    }
    let gradient = horizontal_gradient(fields, f).iter().map(|g| g.evaluate(x)).collect::<Result<Vec<S>>>()?;
    let norm_sq = gradient.iter().fold(S::zero(), |acc, g| acc + g.clone() * g.clone());
    let characteristic = norm_sq.is_zero();
    if characteristic {
        return Ok(IntrinsicNormal { unit: vec![0.0; gradient.len()], gradient, characteristic, norm_sq, exact_unit: None });
    }
    let exact_unit = norm_sq.exact_sqrt().map(|r| gradient.iter().map(|g| -(g.clone() / r.clone())).collect());
    let norm = norm_sq.to_f64_lossy().sqrt();
    let unit = gradient.iter().map(|g| -g.to_f64_lossy() / norm).collect();
    Ok(IntrinsicNormal { gradient, characteristic, norm_sq, exact_unit, unit })
}

/// A polynomial map, one polynomial per output coordinate.
pub type PolyMap<S> = Vec<Polynomial<S>>;

/// The second-kind chart `g = exp(Σ_{k≥1} p_k X_k) · exp(p_0 X_0)`.
///
/// Returns `(Φ, ψ)`: `Φ` sends these coordinates to exponential ones and
/// `ψ` is its inverse, both as polynomial maps in `n` variables.
pub fn split_chart_maps<S: Scalar>(law: &GroupLaw<S>) -> Result<(PolyMap<S>, PolyMap<S>)> {
    let n = law.dim();
    let zero = Polynomial::zero();
    // Φ(p) = z((0, p_1, …), (p_0, 0, …))
    let mut subs: Vec<Polynomial<S>> = Vec::with_capacity(2 * n);
    subs.push(zero.clone());
    subs.extend((1..n).map(Polynomial::var));
    subs.push(Polynomial::var(0));
    subs.extend(std::iter::repeat_n(zero.clone(), n - 1));
    let phi = law.coordinates().iter().map(|z| z.compose(&subs)).collect::<Result<Vec<_>>>()?;
    // ψ(u) = (u_0, z(u, (−u_0, 0, …))_{1..})
    let mut subs: Vec<Polynomial<S>> = (0..n).map(Polynomial::var).collect();
    subs.push(-Polynomial::var(0));
    subs.extend(std::iter::repeat_n(zero, n - 1));
    let mut psi = law.coordinates().iter().map(|z| z.compose(&subs)).collect::<Result<Vec<_>>>()?;
    psi[0] = Polynomial::var(0);
    Ok((phi, psi))
}

/// The left-invariant frame pushed to the split chart: `Dψ(Φ(p))·X_i(Φ(p))`.
pub fn split_chart_fields<S: Scalar>(law: &GroupLaw<S>) -> Result<Vec<PolyVectorField<S>>> {
    let n = law.dim();
    let (phi, psi) = split_chart_maps(law)?;
    let jac: Vec<Vec<Polynomial<S>>> = psi
        .iter()
        .map(|p| (0..n).map(|l| p.derivative(l).compose(&phi)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    left_invariant_fields(law)
        .iter()
        .map(|x| {
            let at_phi = x.compose(&phi)?;
            let coeffs = jac
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(at_phi.coefficients())
                        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                        .fold(Polynomial::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
                })
                .collect();
            Ok(PolyVectorField::new(coeffs))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CounterexampleModel {
    Free,
    Filiform,
}

impl std::str::FromStr for CounterexampleModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(CounterexampleModel::Free),
            "filiform" => Ok(CounterexampleModel::Filiform),
            other => Err(Error::invalid(format!("unknown model {other:?}; expected free or filiform"))),
        }
    }
}

/// Sign behaviour of `a x² + b xy + c y²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Definiteness {
    PositiveSemidefinite,
    NegativeSemidefinite,
    Indefinite,
    Zero,
}

impl Definiteness {
    pub fn is_semidefinite(self) -> bool {
        !matches!(self, Definiteness::Indefinite)
    }
}

/// Discriminant test on `(a, b, c)`.
pub fn classify_binary_form<S: Scalar>(a: &S, b: &S, c: &S) -> Definiteness {
    if a.is_zero() && b.is_zero() && c.is_zero() {
        return Definiteness::Zero;
    }
    let disc_ok = b.clone() * b.clone() <= S::from_int(4) * a.clone() * c.clone();
    if !disc_ok {
        return Definiteness::Indefinite;
    }
    if a.is_positive() || c.is_positive() {
        Definiteness::PositiveSemidefinite
    } else {
        Definiteness::NegativeSemidefinite
    }
}

/// Coefficients of a binary quadratic form in `x_1, x_2`, or `None` if `q`
/// is not one.
pub fn binary_form_coefficients<S: Scalar>(q: &Polynomial<S>) -> Option<(S, S, S)> {
    for (m, _) in q.terms() {
        if m.len() > 2 || m.iter().sum::<u32>() != 2 {
            return None;
        }
    }
    Some((q.coefficient(&[2]), q.coefficient(&[1, 1]), q.coefficient(&[0, 2])))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleReport {
    pub model: CounterexampleModel,
    pub m: usize,
    pub kappa: usize,
    pub chart: &'static str,
    pub layer_dims: Vec<usize>,
    /// 0-based coordinate of `[[X_2,X_1],X_1]`.
    pub j_index: usize,
    pub j_label: String,
    pub c: Rational,
    pub f: Polynomial<Rational>,
    pub weight: Option<u32>,
    pub dilation_sample_ok: bool,
    pub gradient: Vec<Polynomial<Rational>>,
    pub other_components_zero: bool,
    pub q: Polynomial<Rational>,
    pub q_form: Option<(Rational, Rational, Rational)>,
    pub definiteness: Option<Definiteness>,
    pub normal_at_e1: Option<Vec<Rational>>,
    pub origin_characteristic: bool,
    pub witness_points: Vec<Vec<Rational>>,
    pub not_vertical_plane: bool,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.weight == Some(3)
            && self.dilation_sample_ok
            && self.other_components_zero
            && self.definiteness.is_some_and(Definiteness::is_semidefinite)
            && self.definiteness != Some(Definiteness::Zero)
            && self.origin_characteristic
            && self.not_vertical_plane
    }

    pub fn to_json(&self) -> serde_json::Value {
        let s = |p: &Polynomial<Rational>| p.to_string();
        json!({
            "model": self.model,
            "m": self.m,
            "kappa": self.kappa,
            "chart": self.chart,
            "layer_dims": self.layer_dims,
            "j_index": self.j_index,
            "j_label": self.j_label,
            "c": format_rational(&self.c),
            "f": s(&self.f),
            "weight": self.weight,
            "dilation_sample_ok": self.dilation_sample_ok,
            "gradient": self.gradient.iter().map(s).collect::<Vec<_>>(),
            "other_components_zero": self.other_components_zero,
            "q": s(&self.q),
            "q_form": self.q_form.as_ref().map(|(a, b, c)| [a, b, c].map(format_rational)),
            "definiteness": self.definiteness,
            "normal_at_e1": self.normal_at_e1.as_ref().map(|v| v.iter().map(format_rational).collect::<Vec<_>>()),
            "origin_characteristic": self.origin_characteristic,
            "witness_points": self.witness_points.iter().map(|p| p.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "not_vertical_plane": self.not_vertical_plane,
            "passed": self.passed(),
        })
    }
}

fn engel_word() -> HallWord {
    HallWord::bracket(HallWord::bracket(HallWord::Generator(1), HallWord::Generator(0)), HallWord::Generator(0))
}

/// `f = x_2³/3 + c·x_J` and its level set `{f = 0}` in the filiform chart
/// or in the split chart of the free group.
pub fn verify_counterexample(model: CounterexampleModel, m: usize, kappa: usize) -> Result<CounterexampleReport> {
    if kappa < 3 {
        return Err(Error::invalid(format!("step must be at least 3, got {kappa}")));
    }
    let (algebra, horizontal, j_index, j_label, chart): (StratifiedAlgebra<Rational>, Vec<_>, usize, String, _) =
        match model {
            CounterexampleModel::Filiform => {
                if m != 2 {
                    return Err(Error::invalid(format!("the filiform model has two generators, got m = {m}")));
                }
                let algebra = build_filiform_model(kappa)?;
                let (x1, x2) = filiform_model_fields(kappa)?;
                let label = algebra.label(3).to_string();
                (algebra, vec![x1, x2], 3, label, "filiform")
            }
            CounterexampleModel::Free => {
                if m < 2 {
                    return Err(Error::invalid(format!("need at least two generators, got m = {m}")));
                }
                let algebra = build_free_nilpotent(m, kappa, DEFAULT_DIMENSION_CAP)?;
                let word = engel_word().to_string();
                let j = algebra
                    .index_of_label(&word)
                    .ok_or_else(|| Error::precondition(format!("{word} is not a basis label")))?;
                let law = GroupLaw::derive(&algebra)?;
                let fields = split_chart_fields(&law)?;
                (algebra, fields.into_iter().take(m).collect(), j, word, "split")
            }
        };
    let n = algebra.dim();
    let x2_cubed = Polynomial::monomial(Rational::from_ratio(1, 3), vec![0, 3]);
    // The x_J coefficient of X_2 decides c: c·(its x_1² coefficient) = 1.
    let lead = horizontal[1].coefficient(j_index).coefficient(&[2]);
    if lead.is_zero() {
        return Err(Error::precondition("X_2 has no x_1² component along x_J"));
    }
    let c = Rational::one() / lead;
    let mut exps = vec![0; j_index + 1];
    exps[j_index] = 1;
    let f = x2_cubed + Polynomial::monomial(c.clone(), exps);
    let weight = check_delta_homogeneity(&algebra, &f);
    let sample: Vec<Rational> = (0..n).map(|i| Rational::from_ratio(i as i64 + 2, 3)).collect();
    let two = Rational::from_int(2);
    let dilated: Vec<Rational> =
        sample.iter().zip(algebra.weights()).map(|(x, w)| x.clone() * two.powi(w)).collect();
    let dilation_sample_ok = f.evaluate(&dilated)? == f.evaluate(&sample)? * Rational::from_int(8);
    let gradient = horizontal_gradient(&horizontal, &f);
    let other_components_zero = gradient.iter().enumerate().all(|(i, g)| i == 1 || g.is_zero());
    let q = gradient[1].clone();
    let q_form = binary_form_coefficients(&q);
    let definiteness = q_form.as_ref().map(|(a, b, c)| classify_binary_form(a, b, c));
    let mut e1 = vec![Rational::zero(); n];
    e1[0] = Rational::one();
    let normal_at_e1 = levelset_intrinsic_normal(&horizontal, &f, &e1)?.exact_unit;
    let origin_characteristic = levelset_intrinsic_normal(&horizontal, &f, &vec![Rational::zero(); n])?.characteristic;
    // Points of {f = 0}: the origin, e_i for every generator but X_2, and
    // x_2 = 1, x_J = −1/(3c). A vertical plane Σ v_i x_i = k through all of
    // them forces v = 0, k = 0.
    let mut witness_points = vec![vec![Rational::zero(); n]];
    for i in (0..m).filter(|&i| i != 1) {
        let mut p = vec![Rational::zero(); n];
        p[i] = Rational::one();
        witness_points.push(p);
    }
    let mut p = vec![Rational::zero(); n];
    p[1] = Rational::one();
    p[j_index] = -(Rational::one() / (Rational::from_int(3) * c.clone()));
    witness_points.push(p);
    let on_surface = witness_points.iter().map(|p| f.evaluate(p)).collect::<Result<Vec<_>>>()?.iter().all(Zero::is_zero);
    let rows: Vec<Vec<Rational>> = witness_points
        .iter()
        .map(|p| p[..m].iter().cloned().chain(std::iter::once(-Rational::one())).collect())
        .collect();
    let not_vertical_plane = on_surface && rank_of(m + 1, rows) == m + 1;
    Ok(CounterexampleReport {
        model,
        m,
        kappa,
        chart,
        layer_dims: algebra.layer_dims().to_vec(),
        j_index,
        j_label,
        c,
        f,
        weight,
        dilation_sample_ok,
        gradient,
        other_components_zero,
        q,
        q_form,
        definiteness,
        normal_at_e1,
        origin_characteristic,
        witness_points,
        not_vertical_plane,
    })
}
