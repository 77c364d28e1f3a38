//! The full verification fleet as a list of named checks, each with a
//! verdict and a JSON evidence payload.

use std::fmt;

use num_traits::Zero;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{AlgebraVector, StratifiedAlgebra};
use crate::constructors::{build_example2_algebra, build_unit_upper_triangular, engel, heisenberg};
use crate::error::Result;
use crate::fields::{verify_counterexample, CounterexampleModel};
use crate::group::{d_infinity, default_eps, dilation_jacobian_det, gm_oracle_law, gm_oracle_product, GroupLaw, GroupPoint};
use crate::hall::{build_free_nilpotent, DEFAULT_DIMENSION_CAP};
use crate::linalg::Matrix;
use crate::poly::Polynomial;
use crate::random::{random_invertible, random_matrix, random_scalar, random_vector, rng_from_seed, RationalDistribution};
use crate::scalar::{format_rational, Rational, Ring, Scalar};
use crate::star::{
    check_condition_i, chio_det_identity, classify_star, contrex_quotient, engel_quotient_from_condition_i,
    filiform_normalize_basis, filiform_relation, free_star_quotient, heisenberg_subalgebra_check,
    is_filiform, is_type_star_basis, star_decompose, v3_dimension_bounds, verify_contrex,
    verify_remark_subalgebra, BasisChange, StarVerdict,
};

type Q = Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub verdict: Verdict,
    pub evidence: Value,
}

/// Knobs for [`run_report`]. Sample counts are per algebra or per size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportConfig {
    pub seed: u64,
    pub sweep: usize,
    pub chio_per_size: usize,
    pub group_samples: usize,
    pub search_budget: usize,
    pub distribution: RationalDistribution,
    /// Corrupt one structure constant of `G_3` before validating.
    pub tamper: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            seed: 0,
            sweep: 100,
            chio_per_size: 100,
            group_samples: 100,
            search_budget: 200,
            distribution: RationalDistribution::default(),
            tamper: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub tampered: bool,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// One line per check, followed by its evidence as compact JSON.
impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {} tampered {} passed {}", self.seed, self.tampered, self.passed)?;
        for c in &self.checks {
            writeln!(f, "[{}] {} ({})", c.verdict.as_str(), c.id, c.anchor)?;
            writeln!(f, "    {}", c.evidence)?;
        }
        Ok(())
    }
}

/// Replaces `[E_12, E_23] = E_13` by `2·E_13`. Grading survives, Jacobi
/// does not.
pub fn tampered_g3() -> Result<StratifiedAlgebra<Q>> {
    let g3 = build_unit_upper_triangular::<Q>(3)?;
    let e13 = g3.index_of_label("E_{1,3}").expect("G3 has E_{1,3}");
    g3.with_bracket(0, 1, AlgebraVector::from_pairs([(e13, Q::from_int(2))]))
}

fn rng_for(seed: u64, check: u64) -> ChaCha8Rng {
    rng_from_seed(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(check))
}

fn random_change(rng: &mut ChaCha8Rng, m: usize, dist: &RationalDistribution) -> Result<BasisChange<Q>> {
    BasisChange::new(random_invertible(rng, m, dist))
}

fn q_list(v: &[Q]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn run(id: &str, anchor: &str, body: impl FnOnce() -> Result<(Verdict, Value)>) -> Check {
    let (verdict, evidence) = body().unwrap_or_else(|e| (Verdict::Fail, json!({ "error": e.to_string() })));
    Check { id: id.to_string(), anchor: anchor.to_string(), verdict, evidence }
}

fn star_fleet() -> Result<Vec<StratifiedAlgebra<Q>>> {
    let mut fleet = vec![heisenberg::<Q>()];
    for m in 3..=5 {
        fleet.push(build_unit_upper_triangular(m)?);
    }
    fleet.push(free_star_quotient()?.0);
    Ok(fleet)
}

fn check_validate(config: &ReportConfig) -> Check {
    run("algebra-validate", "stratification axioms", || {
        let mut algebras = vec![if config.tamper { tampered_g3()? } else { build_unit_upper_triangular(3)? }];
        algebras.push(heisenberg());
        algebras.push(engel());
        algebras.push(build_free_nilpotent(2, 3, DEFAULT_DIMENSION_CAP)?);
        algebras.push(build_free_nilpotent(3, 3, DEFAULT_DIMENSION_CAP)?);
        algebras.push(build_example2_algebra(Q::from_int(1))?);
        let mut ok = true;
        let mut rows = Vec::new();
        for (i, a) in algebras.iter().enumerate() {
            let r = a.validate();
            ok &= r.is_valid();
            rows.push(json!({
                "algebra": if i == 0 && config.tamper { "G3 (tampered)".to_string() } else { a.name().to_string() },
                "jacobi_ok": r.jacobi_ok,
                "grading_ok": r.grading_ok,
                "generation_ok": r.generation_ok,
                "jacobi_witness": r.jacobi_witnesses.first(),
            }));
        }
        Ok((Verdict::from_bool(ok), json!({ "algebras": rows })))
    })
}

fn check_gm_star() -> Check {
    run("gm-type-star", "Example 1", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for m in 2..=6 {
            let g = build_unit_upper_triangular::<Q>(m)?;
            let star = is_type_star_basis(&g, None)?.holds;
            let dims_ok = g.dim() == m * (m + 1) / 2 && g.step() == m;
            let heis = heisenberg_subalgebra_check(&g, 0, 1, &Q::from_int(1))?;
            ok &= star && dims_ok && heis && g.validate().is_valid();
            rows.push(json!({ "m": m, "dim": g.dim(), "step": g.step(), "star": star, "heisenberg_pair": heis }));
        }
        Ok((Verdict::from_bool(ok), json!({ "family": rows })))
    })
}

fn check_example2(config: &ReportConfig) -> Check {
    run("example2-witness", "Example 2", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for b in [1, 2, -3] {
            let bq = Q::from_int(b);
            let alg = build_example2_algebra(bq.clone())?;
            let identity = is_type_star_basis(&alg, None)?;
            let mut shift = Matrix::identity(alg.rank());
            shift[(0, 1)] = -bq.clone();
            let shifted = is_type_star_basis(&alg, Some(&BasisChange::new(shift)?))?.holds;
            let found = classify_star(&alg, None, config.search_budget, config.seed, &config.distribution)?;
            let found_ok = found.verdict == StarVerdict::StarWitnessFound;
            ok &= alg.validate().is_valid() && !identity.holds && shifted && found_ok;
            rows.push(json!({
                "b": b,
                "star_on_identity": identity.holds,
                "identity_witness": identity.witness,
                "star_after_shift": shifted,
                "search_verdict": found.verdict,
            }));
        }
        Ok((Verdict::from_bool(ok), json!({ "cases": rows })))
    })
}

fn check_remark_subalgebra() -> Check {
    run("remark-subalgebra", "Remark on filiform subalgebras", || {
        let r = verify_remark_subalgebra()?;
        Ok((Verdict::from_bool(r.holds()), serde_json::to_value(&r).expect("serializable")))
    })
}

/// Witt's count of degree-`d` basic commutators on `m` letters.
fn witt(m: usize, d: usize) -> usize {
    fn mobius(n: usize) -> i64 {
        let (mut n, mut k, mut mu) = (n, 2, 1);
        while k * k <= n {
            if n % k == 0 {
                n /= k;
                if n % k == 0 {
                    return 0;
                }
                mu = -mu;
            }
            k += 1;
        }
        if n > 1 {
            mu = -mu;
        }
        mu
    }
    let sum: i64 = (1..=d).filter(|e| d.is_multiple_of(*e)).map(|e| mobius(e) * (m as i64).pow((d / e) as u32)).sum();
    (sum / d as i64) as usize
}

fn check_free_dimensions() -> Check {
    run("free-dimensions", "Remark on dimensions", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for (m, kappa) in [(2, 3), (3, 3), (2, 5), (3, 4)] {
            let f = build_free_nilpotent::<Q>(m, kappa, DEFAULT_DIMENSION_CAP)?;
            let expected: Vec<usize> = (1..=kappa).map(|d| witt(m, d)).collect();
            ok &= f.layer_dims() == expected.as_slice();
            rows.push(json!({ "m": m, "step": kappa, "dims": f.layer_dims(), "witt": expected }));
        }
        Ok((Verdict::from_bool(ok), json!({ "free": rows })))
    })
}

fn check_dimension_bounds() -> Check {
    run("v3-dimension-bounds", "Remark on dimensions", || {
        let mut ok = true;
        let mut bounds = Vec::new();
        for m in 2..=4 {
            let free = build_free_nilpotent::<Q>(m, 3, DEFAULT_DIMENSION_CAP)?;
            let general = v3_dimension_bounds(m, false);
            let star = v3_dimension_bounds(m, true);
            ok &= free.layer_dim(3) == general && witt(m, 3) == general;
            bounds.push(json!({ "m": m, "general": general, "star": star, "free_v3": free.layer_dim(3) }));
        }
        let mut fleet = Vec::new();
        for alg in star_fleet()? {
            let bound = v3_dimension_bounds(alg.rank(), true);
            ok &= alg.layer_dim(3) <= bound;
            fleet.push(json!({ "algebra": alg.name(), "v3": alg.layer_dim(3), "star_bound": bound }));
        }
        ok &= [(3, 8), (2, 2), (3, 2)].iter().enumerate().all(|(i, &(m, v))| {
            if i == 0 { v3_dimension_bounds(m, false) == v } else { v3_dimension_bounds(m, i == 2) == v }
        });
        Ok((Verdict::from_bool(ok), json!({ "bounds": bounds, "star_fleet": fleet })))
    })
}

fn check_lemma_sweep(config: &ReportConfig) -> Check {
    run("lemma3-sweep", "Lemma 3", || {
        let mut rng = rng_for(config.seed, 7);
        let mut ok = true;
        let mut rows = Vec::new();
        let algebras = vec![
            build_unit_upper_triangular::<Q>(3)?,
            build_unit_upper_triangular::<Q>(4)?,
            free_star_quotient()?.0,
        ];
        for alg in &algebras {
            let m = alg.rank();
            let mut reconstructed = 0;
            for _ in 0..config.sweep {
                let change = random_change(&mut rng, m, &config.distribution)?;
                let all = (1..m).try_fold(true, |acc, p| {
                    Ok::<_, crate::Error>(acc && star_decompose(alg, &change, p)?.reconstructs(alg, &change)?)
                })?;
                reconstructed += usize::from(all);
            }
            ok &= reconstructed == config.sweep;
            rows.push(json!({ "algebra": alg.name(), "changes": config.sweep, "reconstructed": reconstructed }));
        }
        Ok((Verdict::from_bool(ok && config.sweep > 0), json!({ "sweep": rows })))
    })
}

fn check_chio(config: &ReportConfig) -> Check {
    run("chio-identity", "Chio condensation", || {
        let mut rng = rng_for(config.seed, 8);
        let mut ok = true;
        let mut rows = Vec::new();
        for m in 2..=6 {
            let mut holds = 0;
            for _ in 0..config.chio_per_size {
                let a = loop {
                    let a: Matrix<Q> = random_invertible(&mut rng, m, &config.distribution);
                    if !a[(0, 0)].is_zero() {
                        break a;
                    }
                };
                holds += usize::from(chio_det_identity(&a)?.equal);
            }
            // singular matrices satisfy it too
            let mut s: Matrix<Q> = random_matrix(&mut rng, m, &config.distribution);
            s[(0, 0)] = Q::from_int(1);
            for c in 0..m {
                s[(m - 1, c)] = s[(0, c)].clone();
            }
            let singular = chio_det_identity(&s)?.equal;
            ok &= holds == config.chio_per_size && singular;
            rows.push(json!({ "m": m, "samples": config.chio_per_size, "equal": holds, "singular_sample": singular }));
        }
        Ok((Verdict::from_bool(ok), json!({ "sizes": rows })))
    })
}

fn check_condition_i_forward() -> Check {
    run("condition-i-free", "Proposition 5", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for m in [2, 3] {
            let f = build_free_nilpotent::<Q>(m, 3, DEFAULT_DIMENSION_CAP)?;
            let id = BasisChange::identity(m);
            let r = check_condition_i(&f, &id)?;
            let e = engel_quotient_from_condition_i(&f, &id)?;
            let dims = e.algebra.layer_dims().to_vec();
            ok &= r.holds && dims == [2, 1, 1] && is_filiform(&e.algebra) && e.algebra.validate().is_valid();
            rows.push(json!({ "m": m, "certificate": r.certificate(), "engel_dims": dims }));
        }
        Ok((Verdict::from_bool(ok), json!({ "free": rows })))
    })
}

fn check_condition_i_exclusive(config: &ReportConfig) -> Check {
    run("condition-i-exclusive", "Proposition 5", || {
        let mut rng = rng_for(config.seed, 10);
        let mut ok = true;
        let mut rows = Vec::new();
        for alg in star_fleet()?.into_iter().filter(|a| a.step() >= 3) {
            let m = alg.rank();
            let mut bases = vec![BasisChange::identity(m)];
            for _ in 0..20 {
                bases.push(random_change(&mut rng, m, &config.distribution)?);
            }
            let mut holds = 0;
            for b in &bases {
                holds += usize::from(check_condition_i(&alg, b)?.holds);
            }
            let verdict = classify_star(&alg, None, 0, config.seed, &config.distribution)?.verdict;
            ok &= holds == 0 && verdict == StarVerdict::StarOnBasis;
            rows.push(json!({ "algebra": alg.name(), "bases": bases.len(), "condition_i_holds": holds, "verdict": verdict }));
        }
        Ok((Verdict::from_bool(ok), json!({ "star_fleet": rows })))
    })
}

fn check_filiform_normalization(config: &ReportConfig) -> Check {
    run("filiform-normalization", "Proposition 5", || {
        let mut rng = rng_for(config.seed, 11);
        let e = engel::<Q>();
        let mut pres = vec![
            BasisChange::identity(2),
            BasisChange::transposition(2, 0, 1),
            BasisChange::new(Matrix::from_rows(vec![vec![Q::from_int(1), Q::from_int(0)], vec![Q::from_int(1), Q::from_int(1)]])?)?,
        ];
        for _ in 0..20 {
            pres.push(random_change(&mut rng, 2, &config.distribution)?);
        }
        let mut cases = [0usize; 3];
        let mut ok = true;
        for pre in &pres {
            let (a, b) = filiform_relation(&e, pre)?;
            cases[if a.is_zero() { 0 } else if b.is_zero() { 1 } else { 2 }] += 1;
            let total = filiform_normalize_basis(&a, &b)?.compose(pre)?;
            let ys = total.new_basis(&e)?;
            ok &= e.bracket(&ys[1], &e.bracket(&ys[1], &ys[0])?)?.is_zero();
        }
        ok &= cases.iter().all(|&c| c > 0);
        Ok((Verdict::from_bool(ok), json!({ "bases": pres.len(), "a_zero": cases[0], "b_zero": cases[1], "generic": cases[2] })))
    })
}

fn check_contrex(config: &ReportConfig) -> Check {
    run("contrex", "Example on the Engel relation", || {
        let r = verify_contrex(3)?;
        let (alg, _) = contrex_quotient(3)?;
        let verdict = classify_star(&alg, None, 0, config.seed, &config.distribution)?.verdict;
        let ok = r.passed() && verdict == StarVerdict::DisprovedByV3Bound;
        let mut evidence = serde_json::to_value(&r).expect("serializable");
        evidence["verdict"] = json!(verdict);
        Ok((Verdict::from_bool(ok), evidence))
    })
}

fn check_step_two(config: &ReportConfig) -> Check {
    run("step-two-star", "Definition of type star", || {
        let mut rng = rng_for(config.seed, 13);
        let mut ok = true;
        let mut rows = Vec::new();
        for alg in [heisenberg::<Q>(), build_free_nilpotent(3, 2, DEFAULT_DIMENSION_CAP)?] {
            let mut holds = 0;
            for _ in 0..20 {
                let b = random_change(&mut rng, alg.rank(), &config.distribution)?;
                holds += usize::from(is_type_star_basis(&alg, Some(&b))?.holds);
            }
            ok &= holds == 20;
            rows.push(json!({ "algebra": alg.name(), "random_bases": 20, "star": holds }));
        }
        Ok((Verdict::from_bool(ok), json!({ "step_two": rows })))
    })
}

fn check_group_oracle(config: &ReportConfig) -> Check {
    run("group-oracle", "group law in exponential coordinates", || {
        let mut rng = rng_for(config.seed, 14);
        let mut ok = true;
        let mut rows = Vec::new();
        for m in 2..=4 {
            let law = GroupLaw::derive(&build_unit_upper_triangular::<Q>(m)?)?;
            let symbolic = law.coordinates() == gm_oracle_law::<Q>(m)?.as_slice();
            let n = law.dim();
            let mut agree = 0;
            for _ in 0..config.group_samples {
                let x: Vec<Q> = random_vector(&mut rng, n, &config.distribution);
                let y: Vec<Q> = random_vector(&mut rng, n, &config.distribution);
                let z = law.multiply(&GroupPoint::new(x.clone()), &GroupPoint::new(y.clone()))?;
                agree += usize::from(z.coords == gm_oracle_product(m, &x, &y)?);
            }
            ok &= symbolic && agree == config.group_samples;
            rows.push(json!({ "m": m, "symbolic_match": symbolic, "pairs": config.group_samples, "agree": agree }));
        }
        Ok((Verdict::from_bool(ok), json!({ "gm": rows })))
    })
}

fn group_fleet() -> Result<Vec<StratifiedAlgebra<Q>>> {
    Ok(vec![
        heisenberg(),
        engel(),
        build_unit_upper_triangular(3)?,
        build_unit_upper_triangular(4)?,
        build_free_nilpotent(2, 3, DEFAULT_DIMENSION_CAP)?,
        build_free_nilpotent(3, 3, DEFAULT_DIMENSION_CAP)?,
        build_example2_algebra(Q::from_int(1))?,
    ])
}

fn check_group_axioms(config: &ReportConfig) -> Check {
    run("group-axioms", "group law in exponential coordinates", || {
        let mut rng = rng_for(config.seed, 15);
        let mut ok = true;
        let mut rows = Vec::new();
        for alg in group_fleet()? {
            let law = GroupLaw::derive(&alg)?;
            let n = law.dim();
            let e = GroupPoint::identity(n);
            let mut holds = 0;
            for _ in 0..config.group_samples {
                let mut p = || GroupPoint::new(random_vector::<Q>(&mut rng, n, &config.distribution));
                let (x, y, z) = (p(), p(), p());
                let assoc = law.multiply(&law.multiply(&x, &y)?, &z)? == law.multiply(&x, &law.multiply(&y, &z)?)?;
                let unit = law.multiply(&x, &e)? == x && law.multiply(&e, &x)? == x;
                let inv = law.multiply(&x, &law.inverse(&x)?)? == e;
                holds += usize::from(assoc && unit && inv);
            }
            ok &= holds == config.group_samples;
            rows.push(json!({ "algebra": alg.name(), "triples": config.group_samples, "hold": holds }));
        }
        Ok((Verdict::from_bool(ok), json!({ "fleet": rows })))
    })
}

fn check_dilations(config: &ReportConfig) -> Check {
    run("dilations", "dilations and homogeneous dimension", || {
        let mut rng = rng_for(config.seed, 16);
        let mut ok = true;
        let mut rows = Vec::new();
        for alg in group_fleet()? {
            let law = GroupLaw::derive(&alg)?;
            let big_q = law.homogeneous_dimension() as u32;
            let jac = dilation_jacobian_det(&alg) == Polynomial::monomial(Q::from_int(1), vec![big_q]);
            let equivariant = law.is_dilation_equivariant();
            let unipotent = law.translation_jacobian_is_unipotent();
            let n = law.dim();
            let mut samples = 0;
            for _ in 0..20 {
                let lambda = loop {
                    let l: Q = random_scalar(&mut rng, &config.distribution);
                    if l > Q::from_int(0) {
                        break l;
                    }
                };
                let x = GroupPoint::new(random_vector::<Q>(&mut rng, n, &config.distribution));
                let y = GroupPoint::new(random_vector::<Q>(&mut rng, n, &config.distribution));
                let lhs = law.dilate(&lambda, &law.multiply(&x, &y)?)?;
                let rhs = law.multiply(&law.dilate(&lambda, &x)?, &law.dilate(&lambda, &y)?)?;
                samples += usize::from(lhs == rhs);
            }
            ok &= jac && equivariant && unipotent && samples == 20;
            rows.push(json!({
                "algebra": alg.name(),
                "Q": big_q,
                "jacobian_is_lambda_Q": jac,
                "equivariant": equivariant,
                "translation_jacobian_unipotent": unipotent,
                "sampled_automorphism": samples,
            }));
        }
        Ok((Verdict::from_bool(ok), json!({ "fleet": rows })))
    })
}

fn check_d_infinity(config: &ReportConfig) -> Check {
    run("d-infinity", "layered quasi-distance", || {
        let mut rng = rng_for(config.seed, 17);
        let mut ok = true;
        let mut rows = Vec::new();
        for alg in [engel::<Q>(), build_unit_upper_triangular(3)?] {
            let law = GroupLaw::derive(&alg)?;
            let eps = default_eps::<Q>(alg.step());
            let n = law.dim();
            let mut hold = 0;
            for _ in 0..20 {
                let mut p = || GroupPoint::new(random_vector::<Q>(&mut rng, n, &config.distribution));
                let (x, y, z) = (p(), p(), p());
                let lambda = Q::from_ratio(3, 2);
                let d = d_infinity(&law, &eps, &x, &y)?;
                let sym = d_infinity(&law, &eps, &y, &x)?;
                let left = d_infinity(&law, &eps, &law.multiply(&z, &x)?, &law.multiply(&z, &y)?)?;
                let scaled = d_infinity(&law, &eps, &law.dilate(&lambda, &x)?, &law.dilate(&lambda, &y)?)?;
                let exact_left = d.terms.iter().zip(&left.terms).all(|(a, b)| a.power_form() == b.power_form());
                let exact_sym = d.terms.iter().zip(&sym.terms).all(|(a, b)| a.power_form() == b.power_form());
                let exact_scale = d.terms.iter().zip(&scaled.terms).all(|(a, b)| {
                    a.power_form() * lambda.powi(2 * a.layer as u32) == b.power_form()
                });
                hold += usize::from(exact_left && exact_sym && exact_scale);
            }
            ok &= hold == 20;
            rows.push(json!({ "algebra": alg.name(), "eps": q_list(&eps), "samples": 20, "hold": hold }));
        }
        Ok((Verdict::from_bool(ok), json!({ "checks": rows })))
    })
}

fn check_counterexample(model: CounterexampleModel) -> Check {
    let id = match model {
        CounterexampleModel::Filiform => "counterexample-filiform",
        CounterexampleModel::Free => "counterexample-free",
    };
    run(id, "non-vertical halfspace example", || {
        let r = verify_counterexample(model, 2, 3)?;
        let mut ok = r.passed();
        if model == CounterexampleModel::Filiform {
            let expected = Polynomial::monomial(Q::from_int(1), vec![2]) + Polynomial::monomial(Q::from_int(1), vec![0, 2]);
            ok &= r.q == expected && r.c == Q::from_int(2);
        }
        Ok((Verdict::from_bool(ok), r.to_json()))
    })
}

pub fn run_report(config: &ReportConfig) -> VerificationReport {
    let checks = vec![
        check_validate(config),
        check_gm_star(),
        check_example2(config),
        check_remark_subalgebra(),
        check_free_dimensions(),
        check_dimension_bounds(),
        check_lemma_sweep(config),
        check_chio(config),
        check_condition_i_forward(),
        check_condition_i_exclusive(config),
        check_filiform_normalization(config),
        check_contrex(config),
        check_step_two(config),
        check_group_oracle(config),
        check_group_axioms(config),
        check_dilations(config),
        check_d_infinity(config),
        check_counterexample(CounterexampleModel::Filiform),
        check_counterexample(CounterexampleModel::Free),
    ];
    let passed = checks.iter().all(|c| c.verdict != Verdict::Fail);
    VerificationReport { seed: config.seed, tampered: config.tamper, passed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ReportConfig {
        ReportConfig { sweep: 5, chio_per_size: 5, group_samples: 5, ..ReportConfig::default() }
    }

    #[test]
    fn witt_counts() {
        assert_eq!((1..=5).map(|d| witt(2, d)).collect::<Vec<_>>(), [2, 1, 2, 3, 6]);
        assert_eq!(witt(3, 3), 8);
    }

    #[test]
    fn small_report_passes() {
        let r = run_report(&small());
        assert!(r.checks.len() >= 12);
        for c in &r.checks {
            assert_eq!(c.verdict, Verdict::Pass, "{} {}", c.id, c.evidence);
        }
    }

    #[test]
    fn tamper_fails_validation_only() {
        let r = run_report(&ReportConfig { tamper: true, ..small() });
        assert!(!r.passed);
        let failed: Vec<_> = r.failures().map(|c| c.id.as_str()).collect();
        assert_eq!(failed, ["algebra-validate"]);
    }

    #[test]
    fn report_is_deterministic() {
        let a = serde_json::to_string(&run_report(&small())).unwrap();
        let b = serde_json::to_string(&run_report(&small())).unwrap();
        assert_eq!(a, b);
    }
}
