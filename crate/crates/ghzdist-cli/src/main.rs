//! Command-line front end for the ghzdist verification library.
//!
//! Every subcommand emits one JSON report per line (or a text rendering
//! with --format text) and the process exit code follows a fixed contract:
//! 0 all checks passed, 1 at least one check failed or was inconclusive,
//! 2 usage error, 3 malformed input, 4 resource guard exceeded.

mod report;

use clap::{Parser, Subcommand, ValueEnum};
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Instant;

use ghzdist::activation::{
    fidelity_after_filter, premise_refutation, seesaw_estimate, to_float, verify_filter_identity,
    witness_consistency, witness_from_rho,
};
use ghzdist::channels::{theta_sol_coeffs, SeparableMap};
use ghzdist::depolarize::depolarize_report;
use ghzdist::exactmat::RMatrix;
use ghzdist::lemmas::{half_lambda_cone, lemma2_decompose, verify_unique_solution, LambdaParam};
use ghzdist::polylp::enumerate_polyhedron;
use ghzdist::pptgen::{ppt_crosscheck, LinearSystem};
use ghzdist::qcore::{all_zero_state, ghz_projector, max_mixed, shifts_state, GhzIndex};
use ghzdist::rat::{fmt_rat, parse_rat, rat, Rat};
use ghzdist::sampling;

use report::{params_from, Report, Status};

#[derive(Parser)]
#[command(
    name = "ghzdist",
    version,
    about = "Exact verification suite for GHZ distillation linear algebra"
)]
struct Cli {
    /// Report rendering
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write reports to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Include wall-clock runtime in each report (breaks byte-identity)
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run both depolarization routes on fixed and random states
    VerifyDepolarization {
        /// Number of parties
        #[arg(long)]
        n: usize,
        /// Random states to test
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
    /// Cross-check symbolic positivity conditions against direct partial transposes
    VerifyPpt {
        #[arg(long)]
        n: usize,
        /// Random coefficient matrices to test
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 23)]
        seed: u64,
    },
    /// Enumerate the reduced feasibility region and certify its bounding inequalities
    VerifyLemma1 {
        #[arg(long)]
        n: usize,
        /// Noise parameter as p/q in [1/2, 1); 1/2 routes to the cone check
        #[arg(long)]
        lambda: String,
    },
    /// Enumerate the boundary cone and check generators and the fixed-output property
    VerifyCone {
        #[arg(long)]
        n: usize,
    },
    /// Decompose a twirled separable-map output into equal positive blocks
    VerifyLemma2 {
        /// JSON file holding the separable map's Kraus factors
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        lambda: String,
    },
    /// Check the pairing-filter contraction identity on random rational triples
    VerifyFilterIdentity {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Z operators per trial
        #[arg(long, default_value_t = 10)]
        batch: usize,
        /// Dimension of each auxiliary block
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 29)]
        seed: u64,
    },
    /// Build the witness of a candidate state; optionally test a target and search
    Witness {
        /// JSON file with the candidate state on the auxiliary-block x qubit-block space
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        lambda: String,
        /// Qubit parties (inferred from --sigma when omitted)
        #[arg(long)]
        n: Option<usize>,
        /// JSON file with the state the witness should be tested against
        #[arg(long)]
        sigma: Option<PathBuf>,
        /// Comma-separated per-party block dimensions; enables the probe-based premise scan
        #[arg(long)]
        h_dims: Option<String>,
        /// Random candidates for the non-guaranteed activation search (needs --sigma)
        #[arg(long, default_value_t = 0)]
        search_trials: usize,
        #[arg(long, default_value_t = 31)]
        seed: u64,
    },
    /// Fidelity with the GHZ projector after one product filter
    Fidelity {
        #[arg(long)]
        state: PathBuf,
        /// JSON array of per-party filter matrices
        #[arg(long)]
        filter: PathBuf,
    },
    /// Numerical lower bound on the best filtered fidelity (float result)
    Seesaw {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 8)]
        iters: usize,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 37)]
        seed: u64,
    },
    /// Convert an inequality system (text or JSON) to vertices and rays
    Enumerate {
        #[arg(long)]
        system: PathBuf,
    },
    /// List bundled states, or emit one as JSON with --name
    Catalog {
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
}

enum CliError {
    /// Unreadable or malformed input: exit 3.
    Input(String),
    /// Resource guard exceeded: exit 4.
    Guard(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 3,
            CliError::Guard(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Guard(m) => m,
        }
    }
}

impl From<ghzdist::Error> for CliError {
    fn from(e: ghzdist::Error) -> Self {
        match e {
            ghzdist::Error::Guard { .. } => CliError::Guard(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let mut reports = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.code());
        }
    };
    if cli.timings {
        let elapsed = started.elapsed().as_millis();
        for r in &mut reports {
            r.runtime_ms = Some(elapsed);
        }
    }
    let rendered = render(&reports, cli.format);
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, rendered.as_bytes()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            std::process::exit(3);
        }
    } else {
        print!("{rendered}");
    }
    let all_pass = reports.iter().all(Report::passed);
    std::process::exit(if all_pass { 0 } else { 1 });
}

fn render(reports: &[Report], format: Format) -> String {
    match format {
        Format::Json => reports
            .iter()
            .map(|r| r.to_json_value().to_string() + "\n")
            .collect(),
        Format::Text => reports.iter().map(Report::to_text).collect(),
    }
}

fn run(cmd: &Command) -> CliResult<Vec<Report>> {
    match cmd {
        Command::VerifyDepolarization { n, trials, seed } => {
            cmd_verify_depolarization(*n, *trials, *seed)
        }
        Command::VerifyPpt { n, trials, seed } => cmd_verify_ppt(*n, *trials, *seed),
        Command::VerifyLemma1 { n, lambda } => cmd_verify_lemma1(*n, lambda),
        Command::VerifyCone { n } => cmd_verify_cone(*n),
        Command::VerifyLemma2 { map, lambda } => cmd_verify_lemma2(map, lambda),
        Command::VerifyFilterIdentity {
            n,
            trials,
            batch,
            dim,
            seed,
        } => cmd_verify_filter_identity(*n, *trials, *batch, *dim, *seed),
        Command::Witness {
            rho,
            lambda,
            n,
            sigma,
            h_dims,
            search_trials,
            seed,
        } => cmd_witness(rho, lambda, *n, sigma.as_deref(), h_dims.as_deref(), *search_trials, *seed),
        Command::Fidelity { state, filter } => cmd_fidelity(state, filter),
        Command::Seesaw {
            state,
            iters,
            restarts,
            seed,
        } => cmd_seesaw(state, *iters, *restarts, *seed),
        Command::Enumerate { system } => cmd_enumerate(system),
        Command::Catalog { name, n } => cmd_catalog(name.as_deref(), *n),
    }
}

fn read_file(path: &std::path::Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

/// Reads a matrix file: either a bare matrix object or a report envelope
/// (as written by `catalog --out`), whose matrix sits at `details.state`.
fn read_matrix(path: &std::path::Path) -> CliResult<RMatrix> {
    let text = read_file(path)?;
    let v: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("bad matrix file {}: {e}", path.display())))?;
    let inner = v.get("details").and_then(|d| d.get("state")).unwrap_or(&v);
    Ok(RMatrix::from_json_value(inner)?)
}

fn coefficients_json(coeffs: &BTreeMap<GhzIndex, Rat>) -> serde_json::Value {
    let map: BTreeMap<String, String> = coeffs
        .iter()
        .map(|(r, v)| (r.label(), fmt_rat(v)))
        .collect();
    serde_json::json!(map)
}

fn cmd_verify_depolarization(n: usize, trials: usize, seed: u64) -> CliResult<Vec<Report>> {
    let mut reports = Vec::new();
    let phi = ghz_projector(n)?;
    let d = phi.rows();
    let fixed: [(&str, RMatrix); 2] = [("identity", RMatrix::identity(d)), ("ghz", phi.clone())];
    for (label, rho) in &fixed {
        let rep = depolarize_report(rho, n)?;
        let fixed_point = &rep.closed_form_output == rho && &rep.protocol_output == rho;
        reports.push(Report::new(
            "verify-depolarization",
            params_from([("input", (*label).into()), ("n", n.into())]),
            Status::from_bool(fixed_point && rep.outputs_match()),
            serde_json::json!({
                "coefficients": coefficients_json(&rep.coefficients),
                "fixed_point": fixed_point,
                "routes_agree": rep.outputs_match(),
            }),
        ));
    }
    let mut rng = sampling::rng(seed);
    for i in 0..trials {
        let rho = sampling::state(&mut rng, d);
        let rep = depolarize_report(&rho, n)?;
        reports.push(Report::new(
            "verify-depolarization",
            params_from([
                ("index", i.into()),
                ("input", "random".into()),
                ("n", n.into()),
                ("seed", seed.into()),
            ]),
            Status::from_bool(rep.outputs_match()),
            serde_json::json!({
                "coefficients": coefficients_json(&rep.coefficients),
                "routes_agree": rep.outputs_match(),
            }),
        ));
    }
    Ok(reports)
}

fn cmd_verify_ppt(n: usize, trials: usize, seed: u64) -> CliResult<Vec<Report>> {
    let mut rng = sampling::rng(seed);
    let mut disagreements = Vec::new();
    let mut ppt_draws = 0usize;
    let mut non_ppt_draws = 0usize;
    for i in 0..trials {
        let coeffs = sampling::theta_coeffs(&mut rng, n, 4, 3)?;
        let rep = ppt_crosscheck(&coeffs)?;
        if !rep.routes_agree {
            disagreements.push(i);
        }
        if rep.all_ppt {
            ppt_draws += 1;
        } else {
            non_ppt_draws += 1;
        }
    }
    let sol = ppt_crosscheck(&theta_sol_coeffs(n)?)?;
    let pass = disagreements.is_empty() && sol.routes_agree && sol.all_ppt;
    Ok(vec![Report::new(
        "verify-ppt",
        params_from([("n", n.into()), ("seed", seed.into()), ("trials", trials.into())]),
        Status::from_bool(pass),
        serde_json::json!({
            "disagreements": disagreements,
            "non_ppt_draws": non_ppt_draws,
            "ppt_draws": ppt_draws,
            "solution_point": {
                "all_ppt": sol.all_ppt,
                "routes_agree": sol.routes_agree,
            },
        }),
    )])
}

fn cmd_verify_lemma1(n: usize, lambda: &str) -> CliResult<Vec<Report>> {
    let lam = parse_rat(lambda)?;
    let params = params_from([("lambda", fmt_rat(&lam).into()), ("n", n.into())]);
    if lam == rat(1, 2) {
        let cone = half_lambda_cone(n)?;
        return Ok(vec![Report::new(
            "verify-lemma1",
            params,
            Status::from_bool(cone.pass),
            serde_json::json!({
                "cone": cone.to_json_value(),
                "routed_to": "cone",
            }),
        )]);
    }
    let rep = verify_unique_solution(n, &LambdaParam::new(lam)?)?;
    Ok(vec![Report::new(
        "verify-lemma1",
        params,
        Status::from_bool(rep.pass),
        rep.to_json_value(),
    )])
}

fn cmd_verify_cone(n: usize) -> CliResult<Vec<Report>> {
    let rep = half_lambda_cone(n)?;
    Ok(vec![Report::new(
        "verify-cone",
        params_from([("n", n.into())]),
        Status::from_bool(rep.pass),
        rep.to_json_value(),
    )])
}

fn cmd_verify_lemma2(map_path: &std::path::Path, lambda: &str) -> CliResult<Vec<Report>> {
    let map = SeparableMap::from_json(&read_file(map_path)?)?;
    let lam = LambdaParam::new(parse_rat(lambda)?)?;
    let rep = lemma2_decompose(&map, &lam)?;
    Ok(vec![Report::new(
        "verify-lemma2",
        params_from([
            ("lambda", fmt_rat(lam.value()).into()),
            ("map", map_path.display().to_string().into()),
        ]),
        Status::from_bool(rep.pass),
        rep.to_json_value(),
    )])
}

fn cmd_verify_filter_identity(
    n: usize,
    trials: usize,
    batch: usize,
    dim: usize,
    seed: u64,
) -> CliResult<Vec<Report>> {
    if dim < 2 {
        return Err(CliError::Input(format!("block dimension {dim} must be at least 2")));
    }
    if trials == 0 || batch == 0 {
        return Err(CliError::Input("trials and batch must be positive".into()));
    }
    let h_dims = vec![dim; n];
    let dh: usize = h_dims.iter().product();
    let dk = 1usize
        .checked_shl(n as u32)
        .ok_or_else(|| CliError::Input(format!("party count {n} too large")))?;
    let mut rng = sampling::rng(seed);
    let mut failures = Vec::new();
    let mut nu_values = BTreeSet::new();
    for t in 0..trials {
        let rho = sampling::state(&mut rng, dh * dk);
        let sigma = sampling::state(&mut rng, dh);
        let zs: Vec<RMatrix> = (0..batch)
            .map(|_| sampling::symmetric_matrix(&mut rng, dk, 3, 2))
            .collect();
        let rep = verify_filter_identity(&rho, &sigma, &h_dims, &zs)?;
        if !rep.pass {
            failures.push(t);
        }
        if let Some(nu) = rep.nu {
            nu_values.insert(fmt_rat(&nu));
        }
    }
    let pass = failures.is_empty() && !nu_values.is_empty();
    Ok(vec![Report::new(
        "verify-filter-identity",
        params_from([
            ("batch", batch.into()),
            ("dim", dim.into()),
            ("n", n.into()),
            ("seed", seed.into()),
            ("trials", trials.into()),
        ]),
        Status::from_bool(pass),
        serde_json::json!({
            "failures": failures,
            "nu_values": nu_values.iter().collect::<Vec<_>>(),
        }),
    )])
}

fn parse_dims(spec: &str) -> CliResult<Vec<usize>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("bad dimension '{s}' in --h-dims")))
        })
        .collect()
}

fn infer_parties(rho_dim: usize, sigma_dim: usize) -> CliResult<usize> {
    if sigma_dim == 0 || rho_dim % sigma_dim != 0 {
        return Err(CliError::Input(format!(
            "state dimension {rho_dim} is not a multiple of the target dimension {sigma_dim}"
        )));
    }
    let ratio = rho_dim / sigma_dim;
    if !ratio.is_power_of_two() || ratio < 4 {
        return Err(CliError::Input(format!(
            "quotient {ratio} is not 2^n for n >= 2; pass --n explicitly"
        )));
    }
    Ok(ratio.trailing_zeros() as usize)
}

fn cmd_witness(
    rho_path: &std::path::Path,
    lambda: &str,
    n: Option<usize>,
    sigma_path: Option<&std::path::Path>,
    h_dims: Option<&str>,
    search_trials: usize,
    seed: u64,
) -> CliResult<Vec<Report>> {
    let rho = read_matrix(rho_path)?;
    let lam = LambdaParam::new(parse_rat(lambda)?)?;
    let sigma = match sigma_path {
        Some(p) => Some(read_matrix(p)?),
        None => None,
    };
    let n = match (n, &sigma) {
        (Some(n), _) => n,
        (None, Some(s)) => infer_parties(rho.rows(), s.rows())?,
        (None, None) => {
            return Err(CliError::Input(
                "pass --n, or --sigma so the qubit block can be inferred".into(),
            ))
        }
    };
    let w = witness_from_rho(&rho, n, &lam)?;
    let mut details = serde_json::Map::new();
    details.insert("witness".into(), w.to_json_value());
    let mut ok = true;
    if let Some(s) = &sigma {
        let (via, direct, equal) = witness_consistency(&rho, n, &lam, s)?;
        ok &= equal;
        details.insert(
            "sigma".into(),
            serde_json::json!({
                "consistent": equal,
                "detection_value": fmt_rat(&via),
                "detects": via.clone() < Rat::from_integer(0.into()),
                "direct_value": fmt_rat(&direct),
            }),
        );
    }
    if let Some(spec) = h_dims {
        let dims = parse_dims(spec)?;
        if dims.len() != n {
            return Err(CliError::Input(format!(
                "--h-dims lists {} parties, expected {n}",
                dims.len()
            )));
        }
        let refutation = premise_refutation(&rho, &dims, &lam)?;
        ok &= refutation.is_none();
        details.insert(
            "premise".into(),
            match refutation {
                Some(r) => serde_json::json!({
                    "fidelity": fmt_rat(&r.fidelity),
                    "probe": r.probe,
                    "refuted": true,
                }),
                None => serde_json::json!({ "refuted": false }),
            },
        );
    }
    let mut status = Status::from_bool(ok);
    if search_trials > 0 {
        let s = sigma
            .as_ref()
            .ok_or_else(|| CliError::Input("--search-trials needs --sigma".into()))?;
        let dh = s.rows();
        let mut rng = sampling::rng(seed);
        let mut hits = Vec::new();
        let mut first_candidate = serde_json::Value::Null;
        for k in 0..search_trials {
            let candidate = sampling::state(&mut rng, dh << n);
            let wk = witness_from_rho(&candidate, n, &lam)?;
            if wk.detects(s)? {
                if hits.is_empty() {
                    first_candidate = candidate.to_json_value();
                }
                hits.push(k);
            }
        }
        if ok && hits.is_empty() {
            status = Status::Inconclusive;
        }
        details.insert(
            "search".into(),
            serde_json::json!({
                "first_candidate": first_candidate,
                "guaranteed": false,
                "hits": hits,
                "note": "random candidates whose witness flags sigma; their own filtered-fidelity bound is not certified",
                "trials": search_trials,
            }),
        );
    }
    let mut params = params_from([
        ("lambda", fmt_rat(lam.value()).into()),
        ("n", n.into()),
        ("rho", rho_path.display().to_string().into()),
    ]);
    if let Some(p) = sigma_path {
        params.insert("sigma".into(), p.display().to_string().into());
    }
    Ok(vec![Report::new(
        "witness",
        params,
        status,
        serde_json::Value::Object(details),
    )])
}

fn cmd_fidelity(state_path: &std::path::Path, filter_path: &std::path::Path) -> CliResult<Vec<Report>> {
    let state = read_matrix(state_path)?;
    let raw: serde_json::Value = serde_json::from_str(&read_file(filter_path)?)
        .map_err(|e| CliError::Input(format!("bad filter file: {e}")))?;
    let arr = raw
        .as_array()
        .ok_or_else(|| CliError::Input("filter file must be a JSON array of matrices".into()))?;
    let filters = arr
        .iter()
        .map(RMatrix::from_json_value)
        .collect::<ghzdist::Result<Vec<_>>>()?;
    let result = fidelity_after_filter(&state, &filters)?;
    let in_range = result.fidelity >= Rat::from_integer(0.into())
        && result.fidelity <= Rat::from_integer(1.into());
    Ok(vec![Report::new(
        "fidelity",
        params_from([
            ("filter", filter_path.display().to_string().into()),
            ("n", filters.len().into()),
            ("state", state_path.display().to_string().into()),
        ]),
        Status::from_bool(in_range),
        result.to_json_value(),
    )])
}

fn cmd_seesaw(
    state_path: &std::path::Path,
    iters: usize,
    restarts: usize,
    seed: u64,
) -> CliResult<Vec<Report>> {
    let state = read_matrix(state_path)?;
    let dim = state.rows();
    if !dim.is_power_of_two() || dim < 4 {
        return Err(CliError::Input(format!(
            "state dimension {dim} is not 2^n for n >= 2"
        )));
    }
    let n = dim.trailing_zeros() as usize;
    let result = seesaw_estimate(&to_float(&state), n, iters, restarts, seed)?;
    let sane = result.monotone_ok
        && result.best.is_finite()
        && result.best >= -1e-9
        && result.best <= 1.0 + 1e-6;
    Ok(vec![Report::new(
        "seesaw",
        params_from([
            ("iters", iters.into()),
            ("n", n.into()),
            ("restarts", restarts.into()),
            ("seed", seed.into()),
            ("state", state_path.display().to_string().into()),
        ]),
        Status::from_bool(sane),
        result.to_json_value(),
    )])
}

fn cmd_enumerate(system_path: &std::path::Path) -> CliResult<Vec<Report>> {
    let text = read_file(system_path)?;
    let system = if text.trim_start().starts_with('{') {
        LinearSystem::from_json(&text)?
    } else {
        LinearSystem::from_text(&text)?
    };
    let poly = enumerate_polyhedron(&system)?;
    Ok(vec![Report::new(
        "enumerate",
        params_from([("system", system_path.display().to_string().into())]),
        Status::Pass,
        serde_json::json!({
            "lineality": poly.lineality.len(),
            "polyhedron": poly.to_json_value(),
            "rays": poly.rays.len(),
            "variables": system.variables(),
            "vertices": poly.vertices.len(),
        }),
    )])
}

fn cmd_catalog(name: Option<&str>, n: Option<usize>) -> CliResult<Vec<Report>> {
    let Some(name) = name else {
        return Ok(vec![Report::new(
            "catalog",
            BTreeMap::new(),
            Status::Pass,
            serde_json::json!({
                "states": ["all-zero", "ghz", "max-mixed", "shifts"],
            }),
        )]);
    };
    let need_n = || {
        n.ok_or_else(|| CliError::Input(format!("--n is required for catalog state '{name}'")))
    };
    let (state, parties) = match name {
        "ghz" => {
            let n = need_n()?;
            (ghz_projector(n)?, n)
        }
        "all-zero" => {
            let n = need_n()?;
            (all_zero_state(n)?, n)
        }
        "max-mixed" => {
            let n = need_n()?;
            (max_mixed(n)?, n)
        }
        "shifts" => {
            if let Some(n) = n {
                if n != 3 {
                    return Err(CliError::Input(
                        "the shifts state is defined for exactly 3 parties".into(),
                    ));
                }
            }
            (shifts_state(), 3)
        }
        other => {
            return Err(CliError::Input(format!("unknown catalog state '{other}'")));
        }
    };
    Ok(vec![Report::new(
        "catalog",
        params_from([("n", parties.into()), ("name", name.into())]),
        Status::Pass,
        serde_json::json!({
            "state": state.to_json_value(),
            "trace": fmt_rat(&state.trace()),
        }),
    )])
}
