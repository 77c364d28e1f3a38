//! Concrete algebras and homogeneous quotients.

use crate::algebra::{AlgebraVector, StratifiedAlgebra, StructureConstants};
use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::scalar::Scalar;

pub use crate::hall::{build_free_nilpotent, HallSet, HallWord, DEFAULT_DIMENSION_CAP};

fn generator_labels(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("X{i}")).collect()
}

/// Strictly upper-triangular `(m+1)×(m+1)` matrices, basis `E_{k,k+l}`
/// ordered by `l` then `k`, so `V_l = span{E_{k,k+l}}`.
pub fn build_unit_upper_triangular<S: Scalar>(m: usize) -> Result<StratifiedAlgebra<S>> {
    if m < 2 {
        return Err(Error::invalid(format!("unit upper-triangular family needs m ≥ 2, got {m}")));
    }
    // (row, col), 1-based matrix positions
    let mut entries = Vec::new();
    for l in 1..=m {
        for k in 1..=m + 1 - l {
            entries.push((k, k + l));
        }
    }
    let index_of = |r: usize, c: usize| entries.iter().position(|&e| e == (r, c));
    let n = entries.len();
    let mut constants = StructureConstants::new(n);
    for a in 0..n {
        for b in a + 1..n {
            let (r1, c1) = entries[a];
            let (r2, c2) = entries[b];
            // [E_{r1,c1}, E_{r2,c2}] = δ_{c1,r2} E_{r1,c2} − δ_{c2,r1} E_{r2,c1}
            let mut v = AlgebraVector::zero();
            if c1 == r2 {
                v.add_at(index_of(r1, c2).expect("entry in range"), S::one());
            }
            if c2 == r1 {
                v.add_at(index_of(r2, c1).expect("entry in range"), -S::one());
            }
            constants.set(a, b, v)?;
        }
    }
    let labels = entries.iter().map(|(r, c)| format!("E_{{{r},{c}}}")).collect();
    let dims = (1..=m).map(|l| m + 1 - l).collect();
    StratifiedAlgebra::new(format!("G{m}"), dims, labels, constants)
}

/// The 3-dimensional Heisenberg algebra, `[X1, X2] = X3`.
pub fn heisenberg<S: Scalar>() -> StratifiedAlgebra<S> {
    build_unit_upper_triangular::<S>(2)
        .expect("m = 2 is valid")
        .with_name("heisenberg")
}

/// Filiform algebra of step `κ`: `X1, X2` in the first layer and the chain
/// `X_{j+1} = [X_j, X1]`; every other independent bracket vanishes.
pub fn build_filiform_model<S: Scalar>(kappa: usize) -> Result<StratifiedAlgebra<S>> {
    if kappa < 2 {
        return Err(Error::invalid(format!("filiform model needs step ≥ 2, got {kappa}")));
    }
    let n = kappa + 1;
    let mut constants = StructureConstants::new(n);
    for j in 1..kappa {
        // [X_j, X_0] = X_{j+1} with 0-based indices
        constants.set(j, 0, AlgebraVector::basis(j + 1))?;
    }
    let mut labels = generator_labels(2);
    let mut word = "X2".to_string();
    for _ in 2..=kappa {
        word = format!("[{word},X1]");
        labels.push(word.clone());
    }
    let mut dims = vec![2];
    dims.resize(kappa, 1);
    let name = if kappa == 3 { "engel".to_string() } else { format!("filiform{kappa}") };
    StratifiedAlgebra::new(name, dims, labels, constants)
}

pub fn engel<S: Scalar>() -> StratifiedAlgebra<S> {
    build_filiform_model(3).expect("step 3 is valid")
}

/// Three generators with `[X1,X2] = X4`, `[X2,X3] = X5`, `[X1,X3] = b·X5`
/// and `[[X1,X2],X3] = [X1,[X2,X3]] = X6`.
pub fn build_example2_algebra<S: Scalar>(b: S) -> Result<StratifiedAlgebra<S>> {
    if b.is_zero() {
        return Err(Error::invalid("deformation parameter b must be nonzero"));
    }
    let mut c = StructureConstants::new(6);
    c.set(0, 1, AlgebraVector::basis(3))?;
    c.set(1, 2, AlgebraVector::basis(4))?;
    c.set(0, 2, AlgebraVector::basis(4).scale(&b))?;
    c.set(3, 2, AlgebraVector::basis(5))?;
    c.set(0, 4, AlgebraVector::basis(5))?;
    let mut labels = generator_labels(3);
    labels.extend(["[X1,X2]", "[X2,X3]", "[[X1,X2],X3]"].map(String::from));
    StratifiedAlgebra::new(format!("example2(b={b})"), vec![3, 2, 1], labels, c)
}

/// An ideal generated by layer-homogeneous elements, with its row-reduced
/// span in each layer.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousIdeal<S> {
    generators: Vec<AlgebraVector<S>>,
    layers: Vec<Subspace<S>>,
}

impl<S: Scalar> HomogeneousIdeal<S> {
    pub fn generators(&self) -> &[AlgebraVector<S>] {
        &self.generators
    }

    /// Dimension of the ideal's component in `V_layer` (1-based).
    pub fn layer_dim(&self, layer: usize) -> usize {
        layer.checked_sub(1).and_then(|l| self.layers.get(l)).map_or(0, Subspace::dim)
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        self.layers.iter().map(Subspace::dim).collect()
    }

    pub fn layer_span(&self, layer: usize) -> &Subspace<S> {
        &self.layers[layer - 1]
    }

    pub fn dim(&self) -> usize {
        self.layers.iter().map(Subspace::dim).sum()
    }

    pub fn contains(&self, v: &AlgebraVector<S>) -> bool {
        let n = self.layers.first().map_or(0, Subspace::ambient_dim);
        let mut dense = v.to_dense(n);
        for s in &self.layers {
            dense = s.reduce(&dense);
        }
        dense.iter().all(|c| c.is_zero())
    }
}

/// The smallest ideal containing `generators`, built layer by layer.
pub fn ideal_closure<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    generators: &[AlgebraVector<S>],
) -> Result<HomogeneousIdeal<S>> {
    let n = algebra.dim();
    let mut layers = vec![Subspace::new(n); algebra.step()];
    let mut queue = Vec::new();
    for g in generators {
        if let Some(i) = g.max_index() {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, dim: n });
            }
        }
        if g.is_zero() {
            continue;
        }
        let layer = algebra.homogeneous_layer(g).ok_or(Error::NotHomogeneous)?;
        if layers[layer - 1].insert(&g.to_dense(n)) {
            queue.push((layer, g.clone()));
        }
    }
    while let Some((layer, v)) = queue.pop() {
        for b in 0..n {
            let target = layer + algebra.adapted_layer(b)?;
            if target > algebra.step() {
                continue;
            }
            let w = algebra.bracket_unchecked(&AlgebraVector::basis(b), &v);
            if w.is_zero() {
                continue;
            }
            if layers[target - 1].insert(&w.to_dense(n)) {
                queue.push((target, w));
            }
        }
    }
    Ok(HomogeneousIdeal { generators: generators.to_vec(), layers })
}

/// All basis vectors of layers `from_layer..=κ`, as ideal generators.
pub fn layers_from<S: Scalar>(algebra: &StratifiedAlgebra<S>, from_layer: usize) -> Vec<AlgebraVector<S>> {
    (from_layer..=algebra.step())
        .flat_map(|l| algebra.layer_range(l))
        .map(AlgebraVector::basis)
        .collect()
}

/// The canonical projection onto a quotient by a homogeneous ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionMap<S> {
    source_dim: usize,
    layers: Vec<Subspace<S>>,
    target_of: Vec<Option<usize>>,
    source_of: Vec<usize>,
}

impl<S: Scalar> ProjectionMap<S> {
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.source_of.len()
    }

    /// Source basis index that each quotient basis vector is the image of.
    pub fn lifts(&self) -> &[usize] {
        &self.source_of
    }

    pub fn project(&self, v: &AlgebraVector<S>) -> Result<AlgebraVector<S>> {
        if let Some(i) = v.max_index() {
            if i >= self.source_dim {
                return Err(Error::IndexOutOfRange { index: i, dim: self.source_dim });
            }
        }
        let mut dense = v.to_dense(self.source_dim);
        for s in &self.layers {
            dense = s.reduce(&dense);
        }
        let mut out = AlgebraVector::zero();
        for (i, c) in dense.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = self.target_of[i].expect("reduced vectors live on complement coordinates");
            out.add_at(t, c);
        }
        Ok(out)
    }
}

/// `algebra / ideal` with the coordinate complement of the ideal's pivots
/// as adapted basis. Trailing layers swallowed by the ideal are dropped.
pub fn quotient<S: Scalar>(
    algebra: &StratifiedAlgebra<S>,
    ideal: &HomogeneousIdeal<S>,
) -> Result<(StratifiedAlgebra<S>, ProjectionMap<S>)> {
    let n = algebra.dim();
    if ideal.layers.len() != algebra.step() || ideal.layers.iter().any(|s| s.ambient_dim() != n) {
        return Err(Error::invalid("ideal does not belong to this algebra"));
    }
    let mut source_of = Vec::new();
    let mut target_of = vec![None; n];
    let mut dims = Vec::new();
    for layer in 1..=algebra.step() {
        let pivots = ideal.layers[layer - 1].pivots();
        let kept: Vec<usize> = algebra.layer_range(layer).filter(|i| !pivots.contains(i)).collect();
        for &i in &kept {
            target_of[i] = Some(source_of.len());
            source_of.push(i);
        }
        dims.push(kept.len());
    }
    if dims[0] == 0 {
        return Err(Error::precondition("ideal contains the whole first layer"));
    }
    while dims.last() == Some(&0) {
        dims.pop();
    }
    if dims.contains(&0) {
        return Err(Error::InvalidLayers(format!("quotient has an empty inner layer: {dims:?}")));
    }
    let projection = ProjectionMap { source_dim: n, layers: ideal.layers.clone(), target_of, source_of };
    let m = projection.target_dim();
    let mut constants = StructureConstants::new(m);
    for a in 0..m {
        for b in a + 1..m {
            let v = algebra.bracket_basis(projection.source_of[a], projection.source_of[b]);
            constants.set(a, b, projection.project(&v)?)?;
        }
    }
    let labels = projection.source_of.iter().map(|&i| algebra.label(i).to_string()).collect();
    let q = StratifiedAlgebra::new(format!("{}/I", algebra.name()), dims, labels, constants)?;
    Ok((q, projection))
}

/// Checks `π([X_a, X_b]) = [π X_a, π X_b]` on every pair of source basis
/// vectors. Returns the first failing pair.
pub fn homomorphism_witness<S: Scalar>(
    source: &StratifiedAlgebra<S>,
    target: &StratifiedAlgebra<S>,
    projection: &ProjectionMap<S>,
) -> Result<Option<(usize, usize)>> {
    let n = source.dim();
    let images: Vec<_> = (0..n)
        .map(|i| projection.project(&AlgebraVector::basis(i)))
        .collect::<Result<_>>()?;
    for a in 0..n {
        for b in a + 1..n {
            let lhs = projection.project(&source.bracket_basis(a, b))?;
            let rhs = target.bracket(&images[a], &images[b])?;
            if lhs != rhs {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rational, Ring};

    type V = AlgebraVector<Rational>;

    #[test]
    fn gm_bracket_law_examples() {
        let g3 = build_unit_upper_triangular::<Rational>(3).unwrap();
        assert_eq!(g3.dim(), 6);
        assert_eq!(g3.step(), 3);
        let e = |label: &str| g3.index_of_label(label).unwrap();
        // [E12, E23] = E13
        assert_eq!(g3.bracket_basis(e("E_{1,2}"), e("E_{2,3}")), V::basis(e("E_{1,3}")));
        assert!(g3.bracket_basis(e("E_{1,3}"), e("E_{2,4}")).is_zero());
        assert_eq!(g3.adapted_layer(4).unwrap(), 2);
        assert_eq!(g3.label(4), "E_{2,4}");

        let g4 = build_unit_upper_triangular::<Rational>(4).unwrap();
        let e = |label: &str| g4.index_of_label(label).unwrap();
        assert_eq!(g4.bracket_basis(e("E_{1,3}"), e("E_{3,5}")), V::basis(e("E_{1,5}")));
    }

    #[test]
    fn heisenberg_is_g2() {
        let h = heisenberg::<Rational>();
        assert_eq!(h.layer_dims(), &[2, 1]);
        assert_eq!(h.bracket_basis(0, 1), V::basis(2));
    }

    #[test]
    fn filiform_chain() {
        let f = build_filiform_model::<Rational>(5).unwrap();
        assert_eq!(f.dim(), 6);
        assert_eq!(f.layer_dims(), &[2, 1, 1, 1, 1]);
        assert!(f.validate().is_valid());
        // the chain top commutes with X2
        assert!(f.bracket_basis(5, 1).is_zero());
        assert_eq!(f.bracket_basis(4, 0), V::basis(5));
        let engel = build_filiform_model::<Rational>(3).unwrap();
        assert_eq!(engel.layer_dims(), &[2, 1, 1]);
        let heis = build_filiform_model::<Rational>(2).unwrap();
        assert_eq!(heis.layer_dims(), &[2, 1]);
        assert!(build_filiform_model::<Rational>(1).is_err());
    }

    #[test]
    fn example2_requires_nonzero_b() {
        assert!(build_example2_algebra(Rational::from_int(0)).is_err());
        for b in [1, 2, -3] {
            let a = build_example2_algebra(Rational::from_int(b)).unwrap();
            assert!(a.validate().jacobi_ok);
            assert!(a.validate().is_valid());
        }
    }

    #[test]
    fn zero_ideal_quotient_is_a_copy() {
        let g3 = build_unit_upper_triangular::<Rational>(3).unwrap();
        let ideal = ideal_closure(&g3, &[]).unwrap();
        assert_eq!(ideal.dim(), 0);
        let (q, pi) = quotient(&g3, &ideal).unwrap();
        assert_eq!(q.layer_dims(), g3.layer_dims());
        assert_eq!(q.constants(), g3.constants());
        assert_eq!(homomorphism_witness(&g3, &q, &pi).unwrap(), None);
    }

    #[test]
    fn non_homogeneous_generator_is_rejected() {
        let g3 = build_unit_upper_triangular::<Rational>(3).unwrap();
        let err = ideal_closure(&g3, &[V::basis(0) + V::basis(3)]).unwrap_err();
        assert_eq!(err, Error::NotHomogeneous);
    }

    #[test]
    fn quotient_by_first_layer_fails() {
        let h = heisenberg::<Rational>();
        let ideal = ideal_closure(&h, &[V::basis(0), V::basis(1)]).unwrap();
        assert!(quotient(&h, &ideal).is_err());
    }

    #[test]
    fn quotient_trims_trailing_layers() {
        let g3 = build_unit_upper_triangular::<Rational>(3).unwrap();
        let ideal = ideal_closure(&g3, &layers_from(&g3, 2)).unwrap();
        let (q, _) = quotient(&g3, &ideal).unwrap();
        assert_eq!(q.layer_dims(), &[3]);
    }
}
