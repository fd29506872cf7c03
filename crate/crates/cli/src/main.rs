//! `indisc`: corpus tools, mining, and audits over finite initial segments.
//!
//! Exit codes: 0 success, 1 domain error (machine-readable JSON on stderr),
//! 2 usage error. All outputs are byte-deterministic given identical inputs
//! and flags; `INDISC_THREADS` caps parallelism without affecting results.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use indisc_core::{
    check_scheme, cofinal_stability_audit, corpus, eval_budgeted, eval_delta0,
    eval_over_expansion, goedel_encode, mine_diagonal, mine_indiscernibles, nabla_batch,
    normalize_connectives, parse_formula, render, star, star_pnf, tarski_audit, Assignment,
    Error, Formula, GuardMode, IndiscernibleWitness, Language, Nat, NablaOutcome, PoolPolicy,
    StarVariant, VarId,
};

#[derive(Parser)]
#[command(name = "indisc", version, about = "order indiscernibles and partial satisfaction at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GuardArg {
    Strict,
    Relaxed,
}

impl From<GuardArg> for GuardMode {
    fn from(g: GuardArg) -> GuardMode {
        match g {
            GuardArg::Strict => GuardMode::Strict,
            GuardArg::Relaxed => GuardMode::Relaxed,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LangArg {
    La,
    Lai,
}

impl From<LangArg> for Language {
    fn from(l: LangArg) -> Language {
        match l {
            LangArg::La => Language::LA,
            LangArg::Lai => Language::LAI,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse formulas and print canonical form plus metadata
    Parse {
        /// Formula text; conflicts with --in
        formula: Option<String>,
        #[arg(long = "in", value_name = "FILE")]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "la")]
        lang: LangArg,
        /// Include the Goedel code (grows very quickly with depth)
        #[arg(long)]
        code: bool,
    },
    /// Star-transform a corpus; one JSON record per formula
    Star {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Evaluate a formula under an assignment
    Eval {
        formula: String,
        /// Assignment, e.g. "x1=3,x2=5"
        #[arg(long, default_value = "")]
        assign: String,
        #[arg(long, value_enum, default_value = "delta0")]
        mode: EvalMode,
        /// Witness-search budget (budgeted mode)
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// Domain bound (expansion mode)
        #[arg(long, default_value_t = 100)]
        domain: u64,
        /// Witness JSON supplying I (expansion mode)
        #[arg(long, value_name = "FILE")]
        witness: Option<PathBuf>,
    },
    /// Generate a seeded pseudo-random corpus
    Gen {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Mine an indiscernible witness for a formula family
    Mine(MineArgs),
    /// Re-run a witness's recorded checks and compare
    Check {
        #[arg(long, value_name = "FILE")]
        witness: PathBuf,
        /// Also check each emitted scheme sentence against the direct result
        #[arg(long)]
        emitted: bool,
    },
    /// Audit the membership procedure over a witness
    Satclass(SatclassArgs),
    /// Full pipeline: mine, re-check, and run all audits
    Report(ReportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalMode {
    Delta0,
    Budgeted,
    Expansion,
}

#[derive(Args)]
struct MineArgs {
    #[arg(long, value_name = "FILE")]
    family: PathBuf,
    #[arg(long, value_name = "N")]
    domain: u64,
    #[arg(long, value_name = "M")]
    size: usize,
    #[arg(long, value_enum, default_value = "relaxed")]
    guard: GuardArg,
    /// Refine for apartness and diagonal indiscernibility
    #[arg(long)]
    diagonal: bool,
    /// Number of pivots covered by diagonal refinement
    #[arg(long, default_value_t = 8)]
    param_bound: usize,
    /// Cap on candidate pool values (default min(N, 1024))
    #[arg(long)]
    pool_cap: Option<u64>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SatclassArgs {
    #[arg(long, value_name = "FILE")]
    witness: PathBuf,
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    #[arg(long, value_enum)]
    audit: AuditKind,
    #[arg(long, default_value_t = 1000)]
    budget: u64,
    #[arg(long, value_enum, default_value = "relaxed")]
    guard: GuardArg,
    /// Use the prenex star variant inside the procedure
    #[arg(long)]
    pnf: bool,
    /// Tail start index (cofinal audit)
    #[arg(long, default_value_t = 1)]
    tail_start: usize,
    /// Argument tuples sampled per corpus formula
    #[arg(long, default_value_t = 4)]
    args_per_formula: usize,
    /// Seed for argument sampling
    #[arg(long, default_value_t = 0)]
    arg_seed: u64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AuditKind {
    Nabla,
    Tarski,
    Cofinal,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON run configuration; individual flags override its fields
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    family: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    #[arg(long)]
    domain: Option<u64>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, value_enum)]
    guard: Option<GuardArg>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    diagonal: bool,
    #[arg(long)]
    param_bound: Option<usize>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Run configuration for the pipeline, also readable from JSON.
#[derive(Serialize, Deserialize, Clone)]
struct RunConfig {
    domain: u64,
    size: usize,
    guard: GuardMode,
    budget: u64,
    seed: u64,
    diagonal: bool,
    param_bound: usize,
    family_path: String,
    corpus_path: Option<String>,
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let payload = json!({ "error": e.to_string() });
            eprintln!("{payload}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("INDISC_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, Error> {
    Ok(std::fs::read_to_string(path)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_witness(path: &Path) -> Result<IndiscernibleWitness, Error> {
    let value: serde_json::Value = serde_json::from_str(&read_to_string(path)?)?;
    IndiscernibleWitness::from_json(&value)
}

fn parse_assignment(s: &str) -> Result<Assignment, Error> {
    let mut a = Assignment::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, value) = part.split_once('=').ok_or_else(|| Error::Config {
            msg: format!("assignment entry {part:?} is not name=value"),
        })?;
        let name = name.trim();
        let v = parse_var_name(name)?;
        let value: u64 = value.trim().parse().map_err(|_| Error::Config {
            msg: format!("assignment value for {name} is not a natural number"),
        })?;
        a.set(v, Nat::from(value));
    }
    Ok(a)
}

fn parse_var_name(name: &str) -> Result<VarId, Error> {
    if name.len() < 2 {
        return Err(Error::Config { msg: format!("variable {name:?} must be x<i> or z<i>") });
    }
    let (head, rest) = name.split_at(1);
    let index: u32 = rest.parse().map_err(|_| Error::Config {
        msg: format!("variable {name:?} must be x<i> or z<i>"),
    })?;
    match (head, index) {
        ("x", i) if i >= 1 => Ok(VarId::x(i)),
        ("z", i) if i >= 1 => Ok(VarId::z(i)),
        _ => Err(Error::Config { msg: format!("variable {name:?} must be x<i> or z<i>") }),
    }
}

/// Deterministic argument tuples for a corpus formula: components sampled
/// below the witness's lower third, so the guard recursion has room above.
fn sample_args(
    corpus_formulas: &[Formula],
    witness: &IndiscernibleWitness,
    per_formula: usize,
    seed: u64,
) -> Vec<(Formula, Vec<u64>)> {
    use rand_core::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let cut = witness.elements[witness.elements.len() / 3].max(2);
    let mut out = Vec::new();
    for f in corpus_formulas {
        let arity = f.free_vars().len();
        for _ in 0..per_formula {
            let args: Vec<u64> = (0..arity).map(|_| rng.next_u64() % cut).collect();
            out.push((f.clone(), args));
        }
    }
    out
}

fn pool_policy(domain: u64, cap: Option<u64>) -> PoolPolicy {
    let policy = PoolPolicy::for_domain(domain);
    match cap {
        Some(c) => policy.with_value_cap(c.min(domain)),
        None => policy,
    }
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Parse { formula, input, lang, code } => {
            let lang: Language = lang.into();
            let texts: Vec<String> = match (formula, input) {
                (Some(f), None) => vec![f],
                (None, Some(path)) => read_to_string(&path)?
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(str::to_string)
                    .collect(),
                _ => {
                    return Err(Error::Config {
                        msg: "give exactly one of a formula argument or --in".to_string(),
                    })
                }
            };
            let mut lines = String::new();
            for text in texts {
                let f = parse_formula(&text, lang)?;
                let mut record = json!({
                    "input": text,
                    "canonical": render(&f),
                    "free_vars": f.free_vars_sorted().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    "is_delta0": f.is_delta0(),
                    "exists_depth": normalize_connectives(&f).exists_depth(),
                });
                if code {
                    record["goedel_code"] = json!(goedel_encode(&f).value.to_string());
                }
                lines.push_str(&format!("{record}\n"));
            }
            emit(None, &lines)
        }
        Command::Star { input, out } => {
            let formulas = corpus::parse_corpus(&read_to_string(&input)?, Language::LA)?;
            let mut lines = String::new();
            for f in &formulas {
                let clause = star(&normalize_connectives(f))?;
                let prenex = star_pnf(f)?;
                let record = json!({
                    "input": render(f),
                    "star": render(&clause.star),
                    "k": clause.k,
                    "pnf_star": render(&prenex.star),
                    "pnf_k": prenex.k,
                });
                lines.push_str(&format!("{record}\n"));
            }
            emit(out.as_deref(), &lines)
        }
        Command::Eval { formula, assign, mode, budget, domain, witness } => {
            let lang = match mode {
                EvalMode::Expansion => Language::LAI,
                _ => Language::LA,
            };
            let f = parse_formula(&formula, lang)?;
            let a = parse_assignment(&assign)?;
            let record = match mode {
                EvalMode::Delta0 => json!({
                    "formula": render(&f),
                    "mode": "delta0",
                    "value": eval_delta0(&f, &a)?,
                }),
                EvalMode::Budgeted => {
                    let v = eval_budgeted(&f, &a, budget)?;
                    json!({
                        "formula": render(&f),
                        "mode": "budgeted",
                        "budget": budget,
                        "value": format!("{v:?}"),
                    })
                }
                EvalMode::Expansion => {
                    let i_set = match witness {
                        Some(path) => load_witness(&path)?.elements,
                        None => Vec::new(),
                    };
                    json!({
                        "formula": render(&f),
                        "mode": "expansion",
                        "domain": domain,
                        "I": i_set,
                        "value": eval_over_expansion(&f, &a, &i_set, domain)?,
                    })
                }
            };
            emit(None, &format!("{record}\n"))
        }
        Command::Gen { seed, depth, count, out } => {
            let formulas = corpus::generate_corpus(seed, depth, count);
            emit(out.as_deref(), &corpus::write_corpus(&formulas))
        }
        Command::Mine(args) => {
            let family = corpus::parse_corpus(&read_to_string(&args.family)?, Language::LA)?;
            if args.guard == GuardArg::Strict {
                for phi in &family {
                    let code = goedel_encode(phi).value;
                    if code > Nat::from(args.domain) {
                        eprintln!(
                            "warning: code of {} exceeds the domain bound; strict mining cannot reach it (consider --guard relaxed)",
                            render(phi)
                        );
                    }
                }
            }
            let policy = pool_policy(args.domain, args.pool_cap);
            let witness = if args.diagonal {
                mine_diagonal(
                    &family,
                    args.domain,
                    args.size,
                    args.param_bound,
                    args.guard.into(),
                    &policy,
                )?
            } else {
                mine_indiscernibles(&family, args.domain, args.size, args.guard.into(), &policy)?
            };
            let text = format!("{}\n", serde_json::to_string_pretty(&witness.to_json())?);
            emit(args.out.as_deref(), &text)
        }
        Command::Check { witness, emitted } => {
            let w = load_witness(&witness)?;
            let fresh = w.recheck()?;
            let matches = fresh == w.passed;
            let mut scheme_agreement = serde_json::Value::Null;
            if emitted {
                let mut rows = Vec::new();
                for check in &w.passed {
                    let phi = &w.family[check.formula];
                    let sentence = match check.scheme {
                        indisc_core::SchemeKind::Indis => {
                            indisc_core::emit_indis_sentence(phi, phi.free_vars().len())?
                        }
                        indisc_core::SchemeKind::IndisCirc => {
                            indisc_core::emit_indis_circ_sentence(phi)?
                        }
                        indisc_core::SchemeKind::Apart => indisc_core::emit_apart_sentence(phi)?,
                        indisc_core::SchemeKind::IndisPlus => {
                            let arity = phi.free_vars().len();
                            indisc_core::emit_indis_plus_sentence(phi, arity - 2, 1)?
                        }
                    };
                    let via_sentence = check_scheme(&sentence, &w.elements, w.domain)?;
                    rows.push(json!({
                        "scheme": check.scheme,
                        "formula": check.formula,
                        "recorded": check.pass,
                        "via_sentence": via_sentence,
                        "agrees": via_sentence == check.pass,
                    }));
                }
                scheme_agreement = json!(rows);
            }
            let record = json!({
                "witness": witness.display().to_string(),
                "recorded": w.passed,
                "fresh": fresh,
                "matches": matches,
                "emitted_sentences": scheme_agreement,
            });
            emit(None, &format!("{}\n", serde_json::to_string_pretty(&record)?))?;
            if !matches {
                return Err(Error::Config {
                    msg: "fresh checks disagree with the recorded ones".to_string(),
                });
            }
            Ok(())
        }
        Command::Satclass(args) => {
            let w = load_witness(&args.witness)?;
            let formulas = corpus::parse_corpus(&read_to_string(&args.corpus)?, Language::LA)?;
            let cases = sample_args(&formulas, &w, args.args_per_formula, args.arg_seed);
            let guard: GuardMode = args.guard.into();
            let variant = if args.pnf { StarVariant::Prenex } else { StarVariant::Clause };
            let report = match args.audit {
                AuditKind::Nabla => {
                    let reports = nabla_batch(&cases, &w, args.budget, guard, variant)?;
                    let agree = reports.iter().filter(|r| r.outcome == NablaOutcome::Agree).count();
                    let disagree =
                        reports.iter().filter(|r| r.outcome == NablaOutcome::Disagree).count();
                    let undetermined = reports
                        .iter()
                        .filter(|r| r.outcome == NablaOutcome::Undetermined)
                        .count();
                    json!({
                        "audit": "nabla",
                        "budget": args.budget,
                        "agree": agree,
                        "disagree": disagree,
                        "undetermined": undetermined,
                        "cases": reports,
                    })
                }
                AuditKind::Tarski => {
                    let r = tarski_audit(&cases, &w, guard, variant)?;
                    serde_json::to_value(&r)?
                }
                AuditKind::Cofinal => {
                    let r = cofinal_stability_audit(&cases, &w, args.tail_start, guard, variant)?;
                    serde_json::to_value(&r)?
                }
            };
            emit(
                args.out.as_deref(),
                &format!("{}\n", serde_json::to_string_pretty(&report)?),
            )
        }
        Command::Report(args) => {
            let mut config = match &args.config {
                Some(path) => serde_json::from_str::<RunConfig>(&read_to_string(path)?)?,
                None => RunConfig {
                    domain: 1000,
                    size: 4,
                    guard: GuardMode::Relaxed,
                    budget: 1000,
                    seed: 0,
                    diagonal: false,
                    param_bound: 8,
                    family_path: String::new(),
                    corpus_path: None,
                },
            };
            if let Some(p) = &args.family {
                config.family_path = p.display().to_string();
            }
            if let Some(p) = &args.corpus {
                config.corpus_path = Some(p.display().to_string());
            }
            if let Some(v) = args.domain {
                config.domain = v;
            }
            if let Some(v) = args.size {
                config.size = v;
            }
            if let Some(g) = args.guard {
                config.guard = g.into();
            }
            if let Some(v) = args.budget {
                config.budget = v;
            }
            if let Some(v) = args.seed {
                config.seed = v;
            }
            if args.diagonal {
                config.diagonal = true;
            }
            if let Some(v) = args.param_bound {
                config.param_bound = v;
            }
            if config.family_path.is_empty() {
                return Err(Error::Config {
                    msg: "report needs --family or a config file".to_string(),
                });
            }
            if config.domain < config.size as u64 || config.size < 2 {
                return Err(Error::Config {
                    msg: format!("need N >= m >= 2, got N={}, m={}", config.domain, config.size),
                });
            }
            if config.budget < 1 {
                return Err(Error::Config { msg: "budget must be at least 1".to_string() });
            }

            let family = corpus::parse_corpus(
                &read_to_string(Path::new(&config.family_path))?,
                Language::LA,
            )?;
            let policy = pool_policy(config.domain, None);
            let witness = if config.diagonal {
                mine_diagonal(
                    &family,
                    config.domain,
                    config.size,
                    config.param_bound,
                    config.guard,
                    &policy,
                )?
            } else {
                mine_indiscernibles(&family, config.domain, config.size, config.guard, &policy)?
            };
            let recheck_ok = witness.recheck()? == witness.passed;

            let corpus_formulas = match &config.corpus_path {
                Some(p) => corpus::parse_corpus(&read_to_string(Path::new(p))?, Language::LA)?,
                None => family.clone(),
            };
            let cases = sample_args(&corpus_formulas, &witness, 4, config.seed);
            let nabla =
                nabla_batch(&cases, &witness, config.budget, config.guard, StarVariant::Clause)?;
            let agree = nabla.iter().filter(|r| r.outcome == NablaOutcome::Agree).count();
            let disagree = nabla.iter().filter(|r| r.outcome == NablaOutcome::Disagree).count();
            let undetermined =
                nabla.iter().filter(|r| r.outcome == NablaOutcome::Undetermined).count();
            let tarski = tarski_audit(&cases, &witness, config.guard, StarVariant::Clause)?;
            let cofinal =
                cofinal_stability_audit(&cases, &witness, 1, config.guard, StarVariant::Clause)?;

            let report = json!({
                "config": config,
                "witness": witness.to_json(),
                "recheck_ok": recheck_ok,
                "nabla": {
                    "agree": agree,
                    "disagree": disagree,
                    "undetermined": undetermined,
                    "cases": nabla,
                },
                "tarski": tarski,
                "cofinal": cofinal,
            });
            emit(
                args.out.as_deref(),
                &format!("{}\n", serde_json::to_string_pretty(&report)?),
            )
        }
    }
}
