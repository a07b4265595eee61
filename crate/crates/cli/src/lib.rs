//! `ssr` command line: resource reports, decompositions, verification suites
//! and the reference table.
//!
//! Exit codes: 0 success, 1 input validation, 2 check failure, 3 parse or I/O.

pub mod reference;
pub mod report;

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use ssr_core::checks::{
    check_bipartite_identities, check_duality, check_hierarchy, check_local_split, check_triality, CheckResult,
};
use ssr_core::group::{
    charge_projectors, decompose, find_conjugate_pairs, validate_representation, verify_grand_orthogonality,
    FiniteGroup, Representation,
};
use ssr_core::io::{load_group, load_state, parse_charges, parse_rep};
use ssr_core::linalg::DensityOperator;
use ssr_core::resources::{as_pure, resource_report};
use ssr_core::states::SymmetricPureState;
use ssr_core::twirl::Symmetry;
use ssr_core::verify::{catalog, run_suite, SuiteReport};
use ssr_core::SsrError;

use crate::reference::{reference_rows, REFERENCE_TOL};
use crate::report::{Report, SuiteSection};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_INPUT: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_PARSE_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ssr", version, about = "Resource quantities under superselection rules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// W, W_G, A_G and, when they apply, the bipartite and symmetric-state quantities.
    Resources {
        /// `refbit`, `spin-plus`, `spin-plus-2` or a state spec file.
        #[arg(long)]
        state: String,
        /// Catalog name or group spec file.
        #[arg(long)]
        group: Option<String>,
        /// Representation shorthand for a catalog group, e.g. `regular` or `0,1/0,1`.
        #[arg(long)]
        rep: Option<String>,
        /// U(1) charges, e.g. `0,1` or `0,1/0,1`.
        #[arg(long)]
        charges: Option<String>,
        /// Overrides every check tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Irrep multiplicities, block labels, conjugate pairs and orthogonality residuals.
    Decompose {
        #[arg(long)]
        group: String,
        /// Defaults to the file's representation, else the regular one.
        #[arg(long)]
        rep: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Seeded Monte Carlo and exhaustive checks.
    Verify {
        #[arg(value_enum)]
        suite: SuiteName,
        /// Comma-separated catalog names or spec files; defaults depend on the suite.
        #[arg(long)]
        group: Option<String>,
        /// Trials per suite (per group for theorem1).
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        /// Also run the achievability checks of theorem2 and theorem3.
        #[arg(long)]
        achievability: bool,
    },
    /// Recomputes the fixed table of closed-form reference values at 1e-9.
    ReproducePaper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Theorem1,
    Theorem2,
    Theorem3,
    Identities,
    Appendix,
    All,
}

impl SuiteName {
    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Theorem1 => "theorem1",
            SuiteName::Theorem2 => "theorem2",
            SuiteName::Theorem3 => "theorem3",
            SuiteName::Identities => "identities",
            SuiteName::Appendix => "appendix",
            SuiteName::All => "all",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            SuiteName::Theorem1 => 500,
            SuiteName::Theorem2 => 500,
            SuiteName::Theorem3 => 200,
            SuiteName::Identities => 1000,
            SuiteName::Appendix | SuiteName::All => 1,
        }
    }

    /// Catalog names used when `--group` is absent; `None` means the catalog.
    pub fn default_groups(self) -> Option<&'static [&'static str]> {
        match self {
            SuiteName::Identities => Some(&["Z2", "Z3", "Z4", "S3", "D4"]),
            _ => None,
        }
    }
}

/// Failure before a report exists.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<SsrError> for CliError {
    fn from(e: SsrError) -> Self {
        let code = match e {
            SsrError::Spec(_) => EXIT_PARSE_IO,
            _ => EXIT_INVALID_INPUT,
        };
        Self { code, message: e.to_string() }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError { code: EXIT_INVALID_INPUT, message: msg.into() }
}

fn retolerate(checks: Vec<CheckResult>, tol: Option<f64>) -> Vec<CheckResult> {
    match tol {
        Some(t) => checks.into_iter().map(|c| c.with_tolerance(t)).collect(),
        None => checks,
    }
}

fn check_tol(tol: Option<f64>) -> Result<(), CliError> {
    match tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(invalid(format!("--tol must be positive, got {t}"))),
        _ => Ok(()),
    }
}

/// Runs a parsed command. The exit code follows from the report unless an
/// error is returned.
pub fn execute(command: &Command) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut report = match command {
        Command::Resources { state, group, rep, charges, tol } => cmd_resources(state, group, rep, charges, *tol)?,
        Command::Decompose { group, rep, seed, tol } => cmd_decompose(group, rep, *seed, *tol)?,
        Command::Verify { suite, group, trials, seed, tol, achievability } => {
            cmd_verify(*suite, group.as_deref(), *trials, *seed, *tol, *achievability)?
        }
        Command::ReproducePaper => cmd_reproduce_paper()?,
    };
    report.timings.insert("total_seconds".into(), start.elapsed().as_secs_f64());
    Ok(report)
}

pub fn exit_code(report: &Report) -> i32 {
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Table => report.to_table(),
    }
}

/// Parses, executes and writes. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE_IO } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return e.code;
        }
    };
    let text = render(&report, cli.format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_PARSE_IO;
            }
        }
        None => print!("{text}"),
    }
    exit_code(&report)
}

pub fn cmd_resources(
    state_arg: &str,
    group_arg: &Option<String>,
    rep_arg: &Option<String>,
    charges: &Option<String>,
    tol: Option<f64>,
) -> Result<Report, CliError> {
    check_tol(tol)?;
    let mut report = Report::new("resources");
    report.echo("state", state_arg);
    let mut rep: Option<Representation> = None;
    if let Some(g) = group_arg {
        report.echo("group", g);
        let (group, file_rep) = load_group(g)?;
        rep = match rep_arg {
            Some(r) => {
                report.echo("rep", r);
                Some(parse_rep(&group, r)?)
            }
            None => file_rep,
        };
    } else if rep_arg.is_some() {
        return Err(invalid("--rep needs --group"));
    }
    let loaded = load_state(state_arg, rep.as_ref())?;
    let symmetry = if let Some(c) = charges {
        report.echo("charges", c);
        Symmetry::U1(parse_charges(c)?)
    } else if let Some(r) = rep {
        Symmetry::Group(r)
    } else if let Some(s) = loaded.symmetry.clone() {
        s
    } else {
        return Err(invalid("no symmetry: give --group with a representation, or --charges"));
    };
    report.echo("symmetry", symmetry.describe());
    if let Some(t) = tol {
        report.echo("tol", t);
    }
    if symmetry.dim() != loaded.rho.dim() {
        return Err(invalid(format!(
            "symmetry acts on dimension {} but the state has {}",
            symmetry.dim(),
            loaded.rho.dim()
        )));
    }
    let rho = match symmetry.split_dims() {
        Some((a, b)) if loaded.rho.dims() != [a, b] => loaded.rho.with_dims(vec![a, b])?,
        _ => loaded.rho.clone(),
    };
    // the ρ^β formulas apply only when the state came with its own symmetry
    let own = charges.is_none() && (group_arg.is_none() || matches!(loaded.symmetry, Some(Symmetry::Group(_))));
    let analyzed = match loaded.symmetric.as_ref().filter(|_| own) {
        Some(st) => Some(st.clone()),
        None => analyze_symmetric(&rho, &symmetry),
    };
    if analyzed.is_none() && symmetry.is_bipartite() {
        report.notes.push("not a globally symmetric pure state: symmetric-state quantities omitted".into());
    }
    let symmetric = analyzed.as_ref();
    let values = resource_report(&rho, &symmetry, symmetric)?;
    report.quantities = values.values.clone();
    report.echo("digest", &values.digest);
    let mut checks = vec![check_duality(&rho, &symmetry)?];
    if symmetry.is_bipartite() {
        checks.extend(check_bipartite_identities(&rho, &symmetry)?);
    }
    if let Some(st) = symmetric {
        checks.push(check_triality(st)?);
        checks.extend(check_local_split(st)?);
        checks.extend(check_hierarchy(st)?);
    }
    let log_d = (rho.dim() as f64).log2();
    for v in values.sanity_violations(log_d) {
        report.notes.push(v.clone());
        checks.push(CheckResult::residual(format!("sanity: {v}"), f64::INFINITY, 0.0));
    }
    report.checks = retolerate(checks, tol);
    Ok(report)
}

/// Charge table of a pure, globally symmetric bipartite input, if it is one.
fn analyze_symmetric(rho: &DensityOperator, symmetry: &Symmetry) -> Option<SymmetricPureState> {
    if !symmetry.is_bipartite() || rho.purity() < 1.0 - 1e-9 {
        return None;
    }
    let psi = as_pure(rho).ok()?;
    match symmetry {
        Symmetry::U1(action) => {
            let (a, b) = action.split()?.clone();
            SymmetricPureState::analyze_u1(psi, a, b).ok()
        }
        Symmetry::Group(rep) => rep
            .group()
            .one_dimensional()
            .into_iter()
            .find_map(|beta| SymmetricPureState::analyze_group(psi.clone(), rep, beta, 0).ok()),
    }
}

fn group_summary(group: &FiniteGroup) -> serde_json::Value {
    json!({
        "name": group.name(),
        "order": group.order(),
        "irreps": group.irreps().iter().map(|ir| json!({"label": ir.label, "dim": ir.dim})).collect::<Vec<_>>(),
    })
}

pub fn cmd_decompose(
    group_arg: &str,
    rep_arg: &Option<String>,
    seed: u64,
    tol: Option<f64>,
) -> Result<Report, CliError> {
    check_tol(tol)?;
    let mut report = Report::new("decompose");
    report.echo("group", group_arg);
    report.echo("seed", seed);
    let (group, file_rep) = load_group(group_arg)?;
    let rep = match (rep_arg, file_rep) {
        (Some(r), _) => {
            report.echo("rep", r);
            parse_rep(&group, r)?
        }
        (None, Some(r)) => r,
        (None, None) => {
            report.echo("rep", "regular");
            Representation::regular(group.clone())
        }
    };
    let validation = validate_representation(&rep);
    if let Some(failure) = validation.first_failure() {
        return Err(invalid(format!("invalid representation: {failure}")));
    }
    let dec = decompose(&rep)?;
    let mut checks = vec![
        CheckResult::residual(
            "grand orthogonality",
            verify_grand_orthogonality(&group),
            ssr_core::checks::STRUCTURE_TOL,
        ),
        CheckResult::residual("block-diagonal form", dec.block_residual(&rep), ssr_core::group::DECOMPOSE_TOL),
        CheckResult::residual("adapted basis unitarity", dec.unitarity_residual(), ssr_core::checks::STRUCTURE_TOL),
    ];
    let multiplicities: Vec<_> = group
        .irreps()
        .iter()
        .enumerate()
        .map(|(mu, ir)| json!({"irrep": mu, "label": ir.label, "dim": ir.dim, "multiplicity": dec.multiplicity(mu)}))
        .collect();
    let blocks: Vec<String> = dec.block_irreps().iter().map(|&mu| group.irrep(mu).label.clone()).collect();
    let block_dims: Vec<usize> = dec.block_irreps().iter().map(|&mu| group.irrep(mu).dim).collect();
    let charges: Vec<_> = charge_projectors(&dec)
        .iter()
        .map(|p| json!({"irrep": p.irrep, "rank": p.projector.trace().re.round() as usize}))
        .collect();
    let mut pairs = Vec::new();
    for beta in group.one_dimensional() {
        let found = find_conjugate_pairs(&group, beta, seed)?;
        for p in &found {
            let r = p.residual(&group);
            checks.push(CheckResult::residual(
                format!(
                    "intertwiner beta={} mu={} mu_bar={}",
                    group.irrep(beta).label,
                    group.irrep(p.mu).label,
                    group.irrep(p.mu_bar).label
                ),
                r,
                ssr_core::group::PAIR_TOL,
            ));
            pairs.push(json!({"beta": beta, "mu": p.mu, "mu_bar": p.mu_bar, "residual": r}));
        }
    }
    report.details = Some(json!({
        "group": group_summary(&group),
        "dim": rep.dim(),
        "multiplicities": multiplicities,
        "blocks": blocks,
        "block_dims": block_dims,
        "charge_projectors": charges,
        "conjugate_pairs": pairs,
        "labels": dec.labels(),
    }));
    report.checks = retolerate(checks, tol);
    Ok(report)
}

fn resolve_groups(arg: Option<&str>, suite: SuiteName) -> Result<Vec<Arc<FiniteGroup>>, CliError> {
    match arg {
        Some(list) => list.split(',').map(|name| Ok(load_group(name.trim())?.0)).collect::<Result<Vec<_>, CliError>>(),
        None => Ok(match suite.default_groups() {
            Some(names) => ssr_core::verify::groups(names),
            None => catalog(),
        }),
    }
}

pub fn cmd_verify(
    suite: SuiteName,
    group_arg: Option<&str>,
    trials: Option<usize>,
    seed: u64,
    tol: Option<f64>,
    achievability: bool,
) -> Result<Report, CliError> {
    check_tol(tol)?;
    if trials == Some(0) {
        return Err(invalid("--trials must be at least 1"));
    }
    let mut report = Report::new("verify");
    report.echo("suite", suite.as_str());
    report.echo("seed", seed);
    report.echo("achievability", achievability);
    if let Some(t) = tol {
        report.echo("tol", t);
    }
    let parts: Vec<SuiteName> = match suite {
        SuiteName::All => vec![
            SuiteName::Theorem1,
            SuiteName::Theorem2,
            SuiteName::Theorem3,
            SuiteName::Identities,
            SuiteName::Appendix,
        ],
        s => vec![s],
    };
    let mut echo = serde_json::Map::new();
    for part in parts {
        let groups = resolve_groups(group_arg, part)?;
        let n = trials.unwrap_or(part.default_trials());
        echo.insert(
            part.as_str().into(),
            json!({"groups": groups.iter().map(|g| g.name().to_string()).collect::<Vec<_>>(), "trials": n}),
        );
        let start = Instant::now();
        let suites: Vec<SuiteReport> = run_suite(part.as_str(), &groups, n, seed, achievability)?;
        report.timings.insert(format!("{}_seconds", part.as_str()), start.elapsed().as_secs_f64());
        for mut s in suites {
            s.checks = retolerate(std::mem::take(&mut s.checks), tol);
            report.suites.push(SuiteSection::from(&s));
            report.checks.extend(s.checks.into_iter().filter(|c| !c.pass));
        }
    }
    report.config.insert("runs".into(), serde_json::Value::Object(echo));
    report.notes.push("`checks` lists failing checks only; suites carry per-check summaries".into());
    Ok(report)
}

pub fn cmd_reproduce_paper() -> Result<Report, CliError> {
    let mut report = Report::new("reproduce-paper");
    report.echo("tol", REFERENCE_TOL);
    let rows = reference_rows()?;
    report.checks =
        rows.iter().map(|r| CheckResult::equality(r.name.clone(), r.computed, r.expected, REFERENCE_TOL)).collect();
    report.details = Some(json!({ "rows": rows }));
    Ok(report)
}
