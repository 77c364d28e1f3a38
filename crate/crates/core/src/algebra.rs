//! Graded nilpotent Lie algebras given by structure constants in an adapted
//! basis.
//!
//! Only brackets `[X_i, X_j]` with `i < j` are stored; the rest follow from
//! antisymmetry. Basis indices are 0-based, layers are 1-based.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::scalar::{rational_string, Module, Rational, Scalar};

/// Sparse vector in the adapted basis. Zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct AlgebraVector<S> {
    coeffs: BTreeMap<usize, S>,
}

impl<S: Scalar> AlgebraVector<S> {
    pub fn zero() -> Self {
        AlgebraVector { coeffs: BTreeMap::new() }
    }

    pub fn basis(i: usize) -> Self {
        Self::from_pairs([(i, S::one())])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, S)>) -> Self {
        let mut v = Self::zero();
        for (i, c) in pairs {
            v.add_at(i, c);
        }
        v
    }

    pub fn from_dense(values: &[S]) -> Self {
        Self::from_pairs(values.iter().cloned().enumerate())
    }

    pub fn to_dense(&self, n: usize) -> Vec<S> {
        let mut out = vec![S::zero(); n];
        for (&i, c) in &self.coeffs {
            out[i] = c.clone();
        }
        out
    }

    pub fn get(&self, i: usize) -> S {
        self.coeffs.get(&i).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_at(&mut self, i: usize, c: S) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&i) {
            Some(x) => {
                let sum = x.clone() + c;
                if sum.is_zero() {
                    self.coeffs.remove(&i);
                } else {
                    *x = sum;
                }
            }
            None => {
                self.coeffs.insert(i, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, factor: &S) {
        if factor.is_zero() {
            return;
        }
        for (&i, c) in &other.coeffs {
            self.add_at(i, c.clone() * factor.clone());
        }
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, factor);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> {
        self.coeffs.iter().map(|(&i, c)| (i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }
}

impl<S: Scalar> std::ops::Add for AlgebraVector<S> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.add_scaled(&rhs, &S::one());
        self
    }
}

impl<S: Scalar> std::ops::Sub for AlgebraVector<S> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.add_scaled(&rhs, &-S::one());
        self
    }
}

impl<S: Scalar> std::ops::Neg for AlgebraVector<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(&-S::one())
    }
}

impl<S: fmt::Debug> fmt::Debug for AlgebraVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(i, c)| format!("{c:?}·e{i}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub index: usize,
    pub layer: usize,
    pub label: String,
}

/// Brackets of basis vectors, stored for `i < j` only.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants<S> {
    n: usize,
    table: BTreeMap<(usize, usize), AlgebraVector<S>>,
}

impl<S: Scalar> StructureConstants<S> {
    pub fn new(n: usize) -> Self {
        StructureConstants { n, table: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Sets `[X_i, X_j] = v`, storing `−v` under `(j, i)` when `i > j`.
    pub fn set(&mut self, i: usize, j: usize, v: AlgebraVector<S>) -> Result<()> {
        for idx in [i, j].into_iter().chain(v.max_index()) {
            if idx >= self.n {
                return Err(Error::IndexOutOfRange { index: idx, dim: self.n });
            }
        }
        if i == j {
            return if v.is_zero() {
                Ok(())
            } else {
                Err(Error::invalid(format!("nonzero diagonal bracket [X{i}, X{i}]")))
            };
        }
        let (key, v) = if i < j { ((i, j), v) } else { ((j, i), -v) };
        if v.is_zero() {
            self.table.remove(&key);
        } else {
            self.table.insert(key, v);
        }
        Ok(())
    }

    /// `[X_i, X_j]`.
    pub fn get(&self, i: usize, j: usize) -> AlgebraVector<S> {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => AlgebraVector::zero(),
            Less => self.table.get(&(i, j)).cloned().unwrap_or_else(AlgebraVector::zero),
            Greater => self.table.get(&(j, i)).map(|v| -v.clone()).unwrap_or_else(AlgebraVector::zero),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &AlgebraVector<S>)> {
        self.table.iter().map(|(&k, v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// A stratified Lie algebra `V_1 ⊕ … ⊕ V_κ` with an adapted basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StratifiedAlgebra<S> {
    name: String,
    layer_dims: Vec<usize>,
    labels: Vec<String>,
    layer_of: Vec<usize>,
    constants: StructureConstants<S>,
}

impl<S: Scalar> StratifiedAlgebra<S> {
    pub fn new(
        name: impl Into<String>,
        layer_dims: Vec<usize>,
        labels: Vec<String>,
        constants: StructureConstants<S>,
    ) -> Result<Self> {
        if layer_dims.is_empty() {
            return Err(Error::InvalidLayers("no layers".into()));
        }
        if layer_dims.contains(&0) {
            return Err(Error::InvalidLayers(format!("empty layer in {layer_dims:?}")));
        }
        let n: usize = layer_dims.iter().sum();
        if labels.len() != n {
            return Err(Error::InvalidLayers(format!(
                "{} labels for total dimension {n}",
                labels.len()
            )));
        }
        if constants.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: constants.dim() });
        }
        let layer_of = layer_dims
            .iter()
            .enumerate()
            .flat_map(|(l, &d)| std::iter::repeat_n(l + 1, d))
            .collect();
        Ok(StratifiedAlgebra { name: name.into(), layer_dims, labels, layer_of, constants })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// The step `κ`.
    pub fn step(&self) -> usize {
        self.layer_dims.len()
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    /// `dim V_1`, the number of generators.
    pub fn rank(&self) -> usize {
        self.layer_dims[0]
    }

    /// `dim V_layer`, zero beyond the step.
    pub fn layer_dim(&self, layer: usize) -> usize {
        layer.checked_sub(1).and_then(|l| self.layer_dims.get(l)).copied().unwrap_or(0)
    }

    /// Basis indices spanning `V_layer` (1-based layer).
    pub fn layer_range(&self, layer: usize) -> std::ops::Range<usize> {
        if layer == 0 || layer > self.step() {
            return 0..0;
        }
        let start: usize = self.layer_dims[..layer - 1].iter().sum();
        start..start + self.layer_dims[layer - 1]
    }

    /// The homogeneity exponent of basis vector `i`.
    pub fn adapted_layer(&self, i: usize) -> Result<usize> {
        self.layer_of
            .get(i)
            .copied()
            .ok_or(Error::IndexOutOfRange { index: i, dim: self.dim() })
    }

    /// Homogeneity exponents of all basis vectors, as dilation weights.
    pub fn weights(&self) -> Vec<u32> {
        self.layer_of.iter().map(|&l| l as u32).collect()
    }

    /// `Q = Σ_i i·dim V_i`.
    pub fn homogeneous_dimension(&self) -> usize {
        self.layer_dims.iter().enumerate().map(|(l, d)| (l + 1) * d).sum()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn basis_elements(&self) -> Vec<BasisElement> {
        (0..self.dim())
            .map(|i| BasisElement { index: i, layer: self.layer_of[i], label: self.labels[i].clone() })
            .collect()
    }

    pub fn constants(&self) -> &StructureConstants<S> {
        &self.constants
    }

    /// A copy with `[X_i, X_j]` replaced by `v`. No validation is done.
    pub fn with_bracket(&self, i: usize, j: usize, v: AlgebraVector<S>) -> Result<Self> {
        let mut out = self.clone();
        out.constants.set(i, j, v)?;
        Ok(out)
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> AlgebraVector<S> {
        self.constants.get(i, j)
    }

    fn check_indices(&self, v: &AlgebraVector<S>) -> Result<()> {
        match v.max_index() {
            Some(i) if i >= self.dim() => Err(Error::IndexOutOfRange { index: i, dim: self.dim() }),
            _ => Ok(()),
        }
    }

    pub fn bracket(&self, a: &AlgebraVector<S>, b: &AlgebraVector<S>) -> Result<AlgebraVector<S>> {
        self.check_indices(a)?;
        self.check_indices(b)?;
        Ok(self.bracket_unchecked(a, b))
    }

    pub(crate) fn bracket_unchecked(&self, a: &AlgebraVector<S>, b: &AlgebraVector<S>) -> AlgebraVector<S> {
        let mut out = AlgebraVector::zero();
        for (i, ca) in a.iter() {
            for (j, cb) in b.iter() {
                if i == j {
                    continue;
                }
                let c = self.constants.get(i, j);
                if !c.is_zero() {
                    out.add_scaled(&c, &(ca.clone() * cb.clone()));
                }
            }
        }
        out
    }

    /// Right-nested bracket `[v_0, [v_1, … [v_{k-2}, v_{k-1}]]]`.
    pub fn nested_bracket(&self, vs: &[AlgebraVector<S>]) -> Result<AlgebraVector<S>> {
        let Some((last, rest)) = vs.split_last() else {
            return Ok(AlgebraVector::zero());
        };
        let mut acc = last.clone();
        for v in rest.iter().rev() {
            acc = self.bracket(v, &acc)?;
        }
        Ok(acc)
    }

    /// Bracket of dense coefficient vectors over any module of `S`, e.g.
    /// polynomial coefficients.
    pub fn bracket_dense<R: Module<S>>(&self, a: &[R], b: &[R]) -> Vec<R> {
        let mut out = vec![R::zero(); self.dim()];
        for ((i, j), c) in self.constants.entries() {
            // [a_i X_i + a_j X_j, b_i X_i + b_j X_j] ∋ (a_i b_j − a_j b_i)[X_i, X_j]
            let ai_bj = if a[i].is_zero() || b[j].is_zero() { R::zero() } else { a[i].clone() * b[j].clone() };
            let aj_bi = if a[j].is_zero() || b[i].is_zero() { R::zero() } else { a[j].clone() * b[i].clone() };
            let w = ai_bj - aj_bi;
            if w.is_zero() {
                continue;
            }
            for (k, ck) in c.iter() {
                out[k] = out[k].clone() + w.scale(ck);
            }
        }
        out
    }

    /// The layer containing every nonzero coordinate, if there is one.
    /// `None` for the zero vector or mixed layers.
    pub fn homogeneous_layer(&self, v: &AlgebraVector<S>) -> Option<usize> {
        let mut layers = v.support().map(|i| self.layer_of.get(i).copied());
        let first = layers.next()??;
        layers.all(|l| l == Some(first)).then_some(first)
    }

    pub fn validate(&self) -> ValidationReport {
        const MAX_WITNESSES: usize = 8;
        let n = self.dim();
        let kappa = self.step();

        let mut grading_witnesses = Vec::new();
        for ((i, j), v) in self.constants.entries() {
            let target = self.layer_of[i] + self.layer_of[j];
            let ok = v.support().all(|k| self.layer_of[k] == target);
            if !ok && grading_witnesses.len() < MAX_WITNESSES {
                grading_witnesses.push((i, j));
            }
        }

        let mut jacobi_witnesses = Vec::new();
        'outer: for i in 0..n {
            for j in i + 1..n {
                let bij = self.bracket_basis(i, j);
                for k in j + 1..n {
                    let e = |x: usize| AlgebraVector::<S>::basis(x);
                    let t1 = self.bracket_unchecked(&e(i), &self.bracket_basis(j, k));
                    let t2 = self.bracket_unchecked(&e(j), &self.bracket_basis(k, i));
                    let t3 = self.bracket_unchecked(&e(k), &bij);
                    if !(t1 + t2 + t3).is_zero() {
                        jacobi_witnesses.push((i, j, k));
                        if jacobi_witnesses.len() >= MAX_WITNESSES {
                            break 'outer;
                        }
                    }
                }
            }
        }

        let mut generation_witnesses = Vec::new();
        for layer in 1..kappa {
            let mut span = Subspace::new(n);
            for a in self.layer_range(1) {
                for b in self.layer_range(layer) {
                    let v = self.bracket_basis(a, b);
                    if !v.is_zero() {
                        span.insert(&v.to_dense(n));
                    }
                }
            }
            let next = self.layer_range(layer + 1);
            let inside = span
                .basis()
                .iter()
                .all(|row| row.iter().enumerate().all(|(k, c)| c.is_zero() || next.contains(&k)));
            if span.dim() != next.len() || !inside {
                generation_witnesses.push(layer);
            }
        }

        ValidationReport {
            jacobi_ok: jacobi_witnesses.is_empty(),
            grading_ok: grading_witnesses.is_empty(),
            generation_ok: generation_witnesses.is_empty(),
            jacobi_witnesses,
            grading_witnesses,
            generation_witnesses,
        }
    }
}

/// Outcome of [`StratifiedAlgebra::validate`]. Failures carry witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub jacobi_ok: bool,
    pub grading_ok: bool,
    pub generation_ok: bool,
    /// Basis triples `(i, j, k)` whose Jacobi sum is nonzero.
    pub jacobi_witnesses: Vec<(usize, usize, usize)>,
    /// Pairs whose stored bracket leaves layer `α_i + α_j`.
    pub grading_witnesses: Vec<(usize, usize)>,
    /// Layers `i` for which `[V_1, V_i] ≠ V_{i+1}`.
    pub generation_witnesses: Vec<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.jacobi_ok && self.grading_ok && self.generation_ok
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub k: usize,
    #[serde(with = "rational_string")]
    pub c: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketJson {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<TermJson>,
}

/// The algebra exchange format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub name: String,
    pub layer_dims: Vec<usize>,
    pub basis_labels: Vec<String>,
    pub brackets: Vec<BracketJson>,
}

impl StratifiedAlgebra<Rational> {
    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            name: self.name.clone(),
            layer_dims: self.layer_dims.clone(),
            basis_labels: self.labels.clone(),
            brackets: self
                .constants
                .entries()
                .map(|((i, j), v)| BracketJson {
                    i,
                    j,
                    terms: v.iter().map(|(k, c)| TermJson { k, c: c.clone() }).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &AlgebraJson) -> Result<Self> {
        let n: usize = json.layer_dims.iter().sum();
        let mut constants = StructureConstants::new(n);
        let mut seen = std::collections::BTreeSet::new();
        for b in &json.brackets {
            if b.i >= b.j {
                return Err(Error::Parse(format!("bracket entry needs i < j, got ({}, {})", b.i, b.j)));
            }
            if !seen.insert((b.i, b.j)) {
                return Err(Error::Parse(format!("duplicate bracket entry ({}, {})", b.i, b.j)));
            }
            let v = AlgebraVector::from_pairs(b.terms.iter().map(|t| (t.k, t.c.clone())));
            constants.set(b.i, b.j, v)?;
        }
        StratifiedAlgebra::new(json.name.clone(), json.layer_dims.clone(), json.basis_labels.clone(), constants)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("algebra JSON serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: AlgebraJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&json)
    }
}

impl<S: Scalar> Zero for AlgebraVector<S> {
    fn zero() -> Self {
        AlgebraVector::zero()
    }

    fn is_zero(&self) -> bool {
        AlgebraVector::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Ring;

    type V = AlgebraVector<Rational>;

    fn heisenberg() -> StratifiedAlgebra<Rational> {
        let mut c = StructureConstants::new(3);
        c.set(0, 1, V::basis(2)).unwrap();
        StratifiedAlgebra::new("heis", vec![2, 1], vec!["X1".into(), "X2".into(), "X3".into()], c).unwrap()
    }

    #[test]
    fn antisymmetry_is_synthesized() {
        let h = heisenberg();
        assert_eq!(h.bracket_basis(1, 0), -V::basis(2));
        assert!(h.bracket_basis(1, 1).is_zero());
        let x = V::from_pairs([(0, Rational::from_int(3)), (1, Rational::from_int(-2))]);
        assert!(h.bracket(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn bracket_rejects_out_of_range() {
        let h = heisenberg();
        let err = h.bracket(&V::basis(0), &V::basis(7)).unwrap_err();
        assert_eq!(err, Error::IndexOutOfRange { index: 7, dim: 3 });
        assert!(h.adapted_layer(3).is_err());
        assert_eq!(h.adapted_layer(2).unwrap(), 2);
    }

    #[test]
    fn abelian_algebra_is_valid() {
        let a = StratifiedAlgebra::<Rational>::new(
            "R2",
            vec![2],
            vec!["X1".into(), "X2".into()],
            StructureConstants::new(2),
        )
        .unwrap();
        let report = a.validate();
        assert!(report.jacobi_ok && report.grading_ok && report.generation_ok);
        assert_eq!(a.step(), 1);
    }

    #[test]
    fn layer_structure_is_checked() {
        let err = StratifiedAlgebra::<Rational>::new("bad", vec![2, 0], vec!["a".into(), "b".into()], StructureConstants::new(2));
        assert!(matches!(err, Err(Error::InvalidLayers(_))));
        let err = StratifiedAlgebra::<Rational>::new("bad", vec![2], vec!["a".into()], StructureConstants::new(2));
        assert!(matches!(err, Err(Error::InvalidLayers(_))));
    }

    #[test]
    fn generation_failure_is_reported() {
        // Two generators with a second layer that is never reached.
        let a = StratifiedAlgebra::<Rational>::new(
            "broken",
            vec![2, 1],
            vec!["X1".into(), "X2".into(), "Y".into()],
            StructureConstants::new(3),
        )
        .unwrap();
        let report = a.validate();
        assert!(!report.generation_ok);
        assert_eq!(report.generation_witnesses, vec![1]);
    }

    #[test]
    fn grading_failure_is_reported() {
        let mut c = StructureConstants::new(3);
        c.set(0, 1, V::basis(1)).unwrap();
        let a = StratifiedAlgebra::new("bad", vec![2, 1], vec!["X1".into(), "X2".into(), "X3".into()], c).unwrap();
        let report = a.validate();
        assert!(!report.grading_ok);
        assert_eq!(report.grading_witnesses, vec![(0, 1)]);
    }

    #[test]
    fn homogeneous_layer_query() {
        let h = heisenberg();
        assert_eq!(h.homogeneous_layer(&(V::basis(0) + V::basis(1))), Some(1));
        assert_eq!(h.homogeneous_layer(&(V::basis(0) + V::basis(2))), None);
        assert_eq!(h.homogeneous_layer(&V::zero()), None);
    }

    #[test]
    fn json_rejects_bad_entries() {
        let text = r#"{"name":"x","layer_dims":[2,1],"basis_labels":["a","b","c"],
            "brackets":[{"i":1,"j":0,"terms":[{"k":2,"c":"1"}]}]}"#;
        assert!(StratifiedAlgebra::from_json_str(text).is_err());
        let text = r#"{"name":"x","layer_dims":[2,1],"basis_labels":["a","b","c"],
            "brackets":[{"i":0,"j":1,"terms":[{"k":2,"c":"2/4"}]}]}"#;
        let a = StratifiedAlgebra::from_json_str(text).unwrap();
        assert_eq!(a.bracket_basis(0, 1), V::basis(2).scale(&Rational::from_ratio(1, 2)));
        assert!(a.to_json_string().contains("\"1/2\""));
    }

    #[test]
    fn dense_bracket_matches_sparse() {
        let h = heisenberg();
        let a = vec![Rational::from_int(1), Rational::from_int(2), Rational::from_int(5)];
        let b = vec![Rational::from_int(-1), Rational::from_int(3), Rational::from_int(0)];
        let dense = h.bracket_dense(&a, &b);
        let sparse = h.bracket(&V::from_dense(&a), &V::from_dense(&b)).unwrap();
        assert_eq!(V::from_dense(&dense), sparse);
    }
}
