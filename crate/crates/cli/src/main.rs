//! `carnot`: build stratified algebras, run the type-★ checks, compute in
//! the group and regenerate the verification report.
//!
//! Exit codes: 0 success or verdict reached, 1 a check failed, 2 usage or
//! input error, 3 resource cap exceeded.

mod config;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use carnot_core::constructors::{
    build_example2_algebra, build_filiform_model, build_unit_upper_triangular, ideal_closure, quotient,
};
use carnot_core::fields::{
    check_delta_homogeneity, horizontal_gradient, left_invariant_fields, split_chart_fields, verify_counterexample,
    CounterexampleModel,
};
use carnot_core::group::{d_infinity, default_eps, GroupPoint};
use carnot_core::hall::build_free_nilpotent;
use carnot_core::poly::{MonomialJson, Polynomial};
use carnot_core::report::run_report;
use carnot_core::scalar::{format_rational, format_rational_list, parse_rational, parse_rational_list};
use carnot_core::star::{
    check_condition_i, chio_det_identity, classify_star, contrex_quotient, engel_quotient_from_condition_i,
    star_decompose, BasisChangeJson,
};
use carnot_core::{Algebra, BasisChange, Error, GroupLaw, Matrix, Rational, Vector};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use config::Config;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Resource(String),
    CheckFailed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit(_) => CliError::Resource(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "carnot", version, about = "Exact computations on stratified Lie algebras and Carnot groups")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// TOML file with seed, eps, distribution and caps.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit an algebra as JSON.
    Build {
        #[command(subcommand)]
        kind: BuildKind,
    },
    /// Jacobi, grading and generation checks. Exit 1 when one fails.
    Validate { algebra: PathBuf },
    /// Type-★ verdict, optionally on a given basis.
    CheckStar {
        algebra: PathBuf,
        #[arg(long)]
        basis: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        budget: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Express `[Y_0,[Y_0,Y_p]]` through commutators without a repeated index.
    Decompose {
        algebra: PathBuf,
        #[arg(long)]
        basis: PathBuf,
        /// 0-based target index, at least 1.
        #[arg(long)]
        p: usize,
    },
    /// Condensation identity for a matrix given as rows `"1,2;3,4"`.
    Chio { matrix: String },
    /// Rank certificate for condition (i) on the basis (default identity).
    ConditionI {
        algebra: PathBuf,
        #[arg(long)]
        basis: Option<PathBuf>,
    },
    /// Engel quotient produced by condition (i).
    EngelQuotient {
        algebra: PathBuf,
        #[arg(long)]
        basis: Option<PathBuf>,
    },
    /// Quotient by the ideal generated by relations `"k:c,k:c"` (0-based basis indices).
    Quotient {
        algebra: PathBuf,
        #[arg(long = "relation", required = true)]
        relations: Vec<String>,
    },
    /// Group operations in exponential coordinates.
    Group {
        #[command(subcommand)]
        op: GroupOp,
    },
    /// Left-invariant vector fields in exponential coordinates.
    Fields {
        algebra: PathBuf,
        /// Only the first-layer fields.
        #[arg(long)]
        horizontal: bool,
    },
    /// Horizontal gradient of a polynomial given as a JSON monomial list.
    Gradient {
        algebra: PathBuf,
        polynomial: PathBuf,
        #[arg(long, value_enum, default_value_t = Chart::Exp)]
        chart: Chart,
    },
    /// Level-set example with a degenerate horizontal normal.
    Counterexample {
        #[arg(long, default_value = "filiform")]
        model: String,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        step: usize,
    },
    /// Run every check. Exit 1 if any fails.
    VerifyPaper {
        #[arg(long)]
        seed: Option<u64>,
        /// Corrupt one structure constant of G_3 first.
        #[arg(long)]
        tamper: bool,
    },
}

#[derive(Subcommand, Debug)]
enum BuildKind {
    Free {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        step: usize,
    },
    Gm {
        #[arg(long)]
        m: usize,
    },
    Filiform {
        #[arg(long)]
        step: usize,
    },
    Example2 {
        #[arg(long, default_value = "1")]
        b: String,
    },
    /// The free step-κ algebra on three generators modulo the five relations.
    Contrex {
        #[arg(long, default_value_t = 3)]
        step: usize,
    },
    /// Read, check and re-emit an algebra file.
    Json { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum GroupOp {
    Mul { algebra: PathBuf, x: String, y: String },
    Inv { algebra: PathBuf, x: String },
    Dilate { algebra: PathBuf, lambda: String, x: String },
    Dinf {
        algebra: PathBuf,
        x: String,
        y: String,
        /// `ε_2,…,ε_κ`; defaults to the config, then 1/2 each.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Homogeneous dimension.
    Q { algebra: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Chart {
    Exp,
    Split,
}

struct Output {
    json: Value,
    text: String,
    failed: Option<String>,
}

impl Output {
    fn new(json: Value, text: impl Into<String>) -> Self {
        Output { json, text: text.into(), failed: None }
    }

    fn json_only(json: Value) -> Self {
        let text = serde_json::to_string_pretty(&json).expect("JSON serializes");
        Output { json, text, failed: None }
    }

    fn fail_if(mut self, failed: bool, why: &str) -> Self {
        if failed {
            self.failed = Some(why.to_string());
        }
        self
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> CliResult<Algebra> {
    Ok(Algebra::from_json_str(&read_input(path)?)?)
}

fn load_basis(path: Option<&PathBuf>) -> CliResult<Option<BasisChange>> {
    let Some(path) = path else { return Ok(None) };
    let json: BasisChangeJson = serde_json::from_str(&read_input(path)?)
        .map_err(|e| CliError::Usage(format!("bad basis file {}: {e}", path.display())))?;
    Ok(Some(BasisChange::from_json(&json)?))
}

fn algebra_output(alg: &Algebra) -> Output {
    Output::json_only(serde_json::to_value(alg.to_json()).expect("JSON serializes"))
}

fn point(text: &str, law: &GroupLaw) -> CliResult<GroupPoint<Rational>> {
    let coords = parse_rational_list(text)?;
    if coords.len() != law.dim() {
        return Err(Error::DimensionMismatch { expected: law.dim(), got: coords.len() }.into());
    }
    Ok(GroupPoint::new(coords))
}

fn derive_law(alg: &Algebra, config: &Config) -> CliResult<GroupLaw> {
    Ok(GroupLaw::derive_with_limits(alg, config.caps.group_step, config.caps.group_dim)?)
}

fn parse_matrix(text: &str) -> CliResult<Matrix> {
    let rows = text.split(';').map(parse_rational_list).collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(rows)?)
}

fn parse_relation(text: &str, dim: usize) -> CliResult<Vector> {
    let mut pairs = Vec::new();
    for term in text.split(',') {
        let (k, c) = term
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("relation term {term:?} is not k:c")))?;
        let k: usize = k.trim().parse().map_err(|_| CliError::Usage(format!("bad index in {term:?}")))?;
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, dim }.into());
        }
        pairs.push((k, parse_rational(c)?));
    }
    Ok(Vector::from_pairs(pairs))
}

fn poly_strings(ps: &[Polynomial<Rational>]) -> Vec<String> {
    ps.iter().map(|p| p.to_string()).collect()
}

fn cmd_build(kind: &BuildKind, config: &Config) -> CliResult<Output> {
    let cap = config.caps.dimension;
    let alg: Algebra = match kind {
        BuildKind::Free { m, step } => build_free_nilpotent(*m, *step, cap)?,
        BuildKind::Gm { m } => build_unit_upper_triangular(*m)?,
        BuildKind::Filiform { step } => build_filiform_model(*step)?,
        BuildKind::Example2 { b } => build_example2_algebra(parse_rational(b)?)?,
        BuildKind::Contrex { step } => contrex_quotient(*step)?.0,
        BuildKind::Json { file } => load_algebra(file)?,
    };
    if alg.dim() > cap {
        return Err(CliError::Resource(format!("dimension {} exceeds cap {cap}", alg.dim())));
    }
    Ok(algebra_output(&alg))
}

fn cmd_validate(path: &Path) -> CliResult<Output> {
    let alg = load_algebra(path)?;
    let r = alg.validate();
    let mut text = format!(
        "{}: jacobi {} grading {} generation {}",
        alg.name(),
        r.jacobi_ok,
        r.grading_ok,
        r.generation_ok
    );
    if let Some((i, j, k)) = r.jacobi_witnesses.first() {
        text.push_str(&format!("\njacobi witness ({}, {}, {})", alg.label(*i), alg.label(*j), alg.label(*k)));
    }
    let json = serde_json::to_value(&r).expect("JSON serializes");
    Ok(Output::new(json, text).fail_if(!r.is_valid(), "algebra is invalid"))
}

fn cmd_check_star(path: &Path, basis: Option<&PathBuf>, budget: usize, seed: u64, config: &Config) -> CliResult<Output> {
    let alg = load_algebra(path)?;
    let basis = load_basis(basis)?;
    let r = classify_star(&alg, basis.as_ref(), budget, seed, &config.distribution)?;
    let json = json!({
        "algebra": alg.name(),
        "verdict": r.verdict,
        "basis": r.basis.as_ref().map(|b| b.to_json()),
        "witness": r.witness,
        "condition_i": r.condition_i,
        "dim_v3": r.dim_v3,
        "v3_star_bound": r.v3_star_bound,
        "attempts": r.attempts,
    });
    let mut text = format!("{}: {}", alg.name(), r.verdict);
    if let Some((j, i)) = r.witness {
        text.push_str(&format!("\nfailing relation on the given basis: [Y{j},[Y{j},Y{i}]] != 0"));
    }
    if let Some(c) = &r.condition_i {
        text.push_str(&format!("\nrank without [Y0,[Y0,Y1]] {} < dim V3 {}", c.rank_without, c.dim_v3));
    }
    if r.verdict == carnot_core::star::StarVerdict::DisprovedByV3Bound {
        text.push_str(&format!("\ndim V3 {} > bound {}", r.dim_v3, r.v3_star_bound));
    }
    if let Some(b) = &r.basis {
        for row in b.matrix().to_rows() {
            text.push_str(&format!("\n  {}", format_rational_list(&row)));
        }
    }
    Ok(Output::new(json, text))
}

fn cmd_decompose(path: &Path, basis: &Path, p: usize) -> CliResult<Output> {
    let alg = load_algebra(path)?;
    let change = load_basis(Some(&basis.to_path_buf()))?.expect("basis given");
    let d = star_decompose(&alg, &change, p)?;
    let reconstructs = d.reconstructs(&alg, &change)?;
    let repeated: Vec<Value> = d
        .repeated
        .iter()
        .map(|(&(j, i), c)| json!({ "j": j, "i": i, "coeff": format_rational(c) }))
        .collect();
    let distinct: Vec<Value> = d
        .distinct
        .iter()
        .map(|(&(k, j, i), c)| json!({ "k": k, "j": j, "i": i, "coeff": format_rational(c) }))
        .collect();
    let mut terms: Vec<String> = d.repeated.iter().map(|(&(j, i), c)| format!("{c}·[Y{j},[Y{j},Y{i}]]")).collect();
    terms.extend(d.distinct.iter().map(|(&(k, j, i), c)| format!("{c}·[Y{k},[Y{j},Y{i}]]")));
    let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
    let text = format!("[Y0,[Y0,Y{p}]] = {rhs}\nreconstructs {reconstructs}");
    let json = json!({
        "p": p,
        "permutation": d.permutation,
        "repeated": repeated,
        "distinct": distinct,
        "reconstructs": reconstructs,
    });
    Ok(Output::new(json, text).fail_if(!reconstructs, "decomposition does not reconstruct"))
}

fn cmd_chio(matrix: &str) -> CliResult<Output> {
    let a = parse_matrix(matrix)?;
    let r = chio_det_identity(&a)?;
    let json = json!({
        "det_m": format_rational(&r.det_m),
        "scaled_det_a": format_rational(&r.scaled_det_a),
        "equal": r.equal,
    });
    let text = format!("det M = {}\na11^(m-2) det A = {}\nequal {}", r.det_m, r.scaled_det_a, r.equal);
    Ok(Output::new(json, text).fail_if(!r.equal, "identity fails"))
}

fn cmd_condition_i(path: &Path, basis: Option<&PathBuf>) -> CliResult<Output> {
    let alg = load_algebra(path)?;
    let basis = load_basis(basis)?.unwrap_or_else(|| BasisChange::identity(alg.rank()));
    let r = check_condition_i(&alg, &basis)?;
    let json = json!({ "holds": r.holds, "certificate": r.certificate() });
    let text = format!(
        "condition (i) {}: rank without {} rank all {} dim V3 {}",
        if r.holds { "holds" } else { "fails" },
        r.rank_without,
        r.rank_all,
        r.dim_v3
    );
    Ok(Output::new(json, text))
}

fn cmd_engel_quotient(path: &Path, basis: Option<&PathBuf>) -> CliResult<Output> {
    let alg = load_algebra(path)?;
    let basis = load_basis(basis)?.unwrap_or_else(|| BasisChange::identity(alg.rank()));
    Ok(algebra_output(&engel_quotient_from_condition_i(&alg, &basis)?.algebra))
}

fn cmd_quotient(path: &Path, relations: &[String]) -> CliResult<Output> {
    let alg = load_algebra(path)?;
    let gens = relations.iter().map(|r| parse_relation(r, alg.dim())).collect::<CliResult<Vec<_>>>()?;
    let ideal = ideal_closure(&alg, &gens)?;
    let (q, _) = quotient(&alg, &ideal)?;
    Ok(algebra_output(&q))
}

fn cmd_group(op: &GroupOp, config: &Config) -> CliResult<Output> {
    let point_output = |p: GroupPoint<Rational>| {
        let s = format_rational_list(&p.coords);
        Output::new(json!(p.coords.iter().map(format_rational).collect::<Vec<_>>()), s)
    };
    match op {
        GroupOp::Mul { algebra, x, y } => {
            let law = derive_law(&load_algebra(algebra)?, config)?;
            Ok(point_output(law.multiply(&point(x, &law)?, &point(y, &law)?)?))
        }
        GroupOp::Inv { algebra, x } => {
            let law = derive_law(&load_algebra(algebra)?, config)?;
            Ok(point_output(law.inverse(&point(x, &law)?)?))
        }
        GroupOp::Dilate { algebra, lambda, x } => {
            let alg = load_algebra(algebra)?;
            let coords = parse_rational_list(x)?;
            if coords.len() != alg.dim() {
                return Err(Error::DimensionMismatch { expected: alg.dim(), got: coords.len() }.into());
            }
            let p = carnot_core::group::dilate(&alg, &parse_rational(lambda)?, &GroupPoint::new(coords))?;
            Ok(point_output(p))
        }
        GroupOp::Dinf { algebra, x, y, eps } => {
            let law = derive_law(&load_algebra(algebra)?, config)?;
            let eps = match eps {
                Some(e) => parse_rational_list(e)?,
                None => config.eps()?.unwrap_or_else(|| default_eps(law.algebra().step())),
            };
            let d = d_infinity(&law, &eps, &point(x, &law)?, &point(y, &law)?)?;
            let terms: Vec<Value> = d
                .terms
                .iter()
                .map(|t| {
                    json!({
                        "layer": t.layer,
                        "eps": format_rational(&t.eps),
                        "norm_sq": format_rational(&t.norm_sq),
                        "power_form": format_rational(&t.power_form()),
                        "value": t.value(),
                    })
                })
                .collect();
            Ok(Output::new(json!({ "value": d.value, "terms": terms }), format!("{}", d.value)))
        }
        GroupOp::Q { algebra } => {
            let q = load_algebra(algebra)?.homogeneous_dimension();
            Ok(Output::new(json!(q), q.to_string()))
        }
    }
}

fn field_strings(fields: &[carnot_core::VectorField]) -> Vec<String> {
    fields.iter().map(|f| f.to_string()).collect()
}

fn cmd_fields(path: &Path, horizontal: bool, config: &Config) -> CliResult<Output> {
    let alg = load_algebra(path)?;
    let law = derive_law(&alg, config)?;
    let mut fields = left_invariant_fields(&law);
    if horizontal {
        fields.truncate(alg.rank());
    }
    let shown = field_strings(&fields);
    let text = shown.iter().enumerate().map(|(i, f)| format!("X{} = {f}", i + 1)).collect::<Vec<_>>().join("\n");
    Ok(Output::new(json!(shown), text))
}

fn cmd_gradient(path: &Path, poly: &Path, chart: Chart, config: &Config) -> CliResult<Output> {
    let alg = load_algebra(path)?;
    let terms: Vec<MonomialJson> = serde_json::from_str(&read_input(poly)?)
        .map_err(|e| CliError::Usage(format!("bad polynomial file {}: {e}", poly.display())))?;
    let f = Polynomial::from_json(&terms);
    if f.num_vars() > alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), got: f.num_vars() }.into());
    }
    let law = derive_law(&alg, config)?;
    let mut fields = match chart {
        Chart::Exp => left_invariant_fields(&law),
        Chart::Split => split_chart_fields(&law)?,
    };
    fields.truncate(alg.rank());
    let grad = poly_strings(&horizontal_gradient(&fields, &f));
    let weight = check_delta_homogeneity(&alg, &f);
    let json = json!({ "f": f.to_string(), "gradient": grad, "weight": weight });
    let text = format!("f = {f}\nweight {weight:?}\ngradient ({})", grad.join(", "));
    Ok(Output::new(json, text))
}

fn cmd_counterexample(model: &str, m: usize, step: usize) -> CliResult<Output> {
    let model: CounterexampleModel = model.parse()?;
    let r = verify_counterexample(model, m, step)?;
    let json = r.to_json();
    let text = format!(
        "model {:?} m {} step {} chart {}\nf = {}\nweight {:?}\ngradient ({})\nq = {} ({:?})\npassed {}",
        r.model,
        r.m,
        r.kappa,
        r.chart,
        r.f,
        r.weight,
        poly_strings(&r.gradient).join(", "),
        r.q,
        r.definiteness,
        r.passed()
    );
    let passed = r.passed();
    Ok(Output::new(json, text).fail_if(!passed, "counterexample checks fail"))
}

fn cmd_verify_paper(seed: Option<u64>, tamper: bool, config: &Config) -> CliResult<Output> {
    let mut rc = config.report();
    if let Some(s) = seed {
        rc.seed = s;
    }
    rc.tamper = tamper;
    let report = run_report(&rc);
    let json = serde_json::to_value(&report).expect("JSON serializes");
    let text = report.to_string();
    let failed: Vec<&str> = report.failures().map(|c| c.id.as_str()).collect();
    let why = format!("failed checks: {}", failed.join(", "));
    Ok(Output::new(json, text).fail_if(!report.passed, &why))
}

fn dispatch(cli: &Cli, config: &Config) -> CliResult<Output> {
    match &cli.command {
        Command::Build { kind } => cmd_build(kind, config),
        Command::Validate { algebra } => cmd_validate(algebra),
        Command::CheckStar { algebra, basis, budget, seed } => {
            cmd_check_star(algebra, basis.as_ref(), *budget, seed.unwrap_or(config.seed), config)
        }
        Command::Decompose { algebra, basis, p } => cmd_decompose(algebra, basis, *p),
        Command::Chio { matrix } => cmd_chio(matrix),
        Command::ConditionI { algebra, basis } => cmd_condition_i(algebra, basis.as_ref()),
        Command::EngelQuotient { algebra, basis } => cmd_engel_quotient(algebra, basis.as_ref()),
        Command::Quotient { algebra, relations } => cmd_quotient(algebra, relations),
        Command::Group { op } => cmd_group(op, config),
        Command::Fields { algebra, horizontal } => cmd_fields(algebra, *horizontal, config),
        Command::Gradient { algebra, polynomial, chart } => cmd_gradient(algebra, polynomial, *chart, config),
        Command::Counterexample { model, m, step } => cmd_counterexample(model, *m, *step),
        Command::VerifyPaper { seed, tamper } => cmd_verify_paper(*seed, *tamper, config),
    }
}

fn emit(cli: &Cli, out: &Output) -> CliResult<()> {
    let mut body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&out.json).expect("JSON serializes"),
        Format::Text => out.text.clone(),
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.out {
        Some(path) => fs::write(path, body).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let _ = io::stdout().write_all(body.as_bytes());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Config::load(cli.config.as_deref()).and_then(|config| dispatch(&cli, &config)).and_then(|out| {
        emit(&cli, &out)?;
        match out.failed {
            Some(why) => Err(CliError::CheckFailed(why)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::CheckFailed(why)) => {
            eprintln!("check failed: {why}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(why)) => {
            eprintln!("error: {why}");
            ExitCode::from(2)
        }
        Err(CliError::Resource(why)) => {
            eprintln!("resource cap: {why}");
            ExitCode::from(3)
        }
    }
}
