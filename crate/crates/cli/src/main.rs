use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hyperpdl::aba::{to_dot, Automaton, MhNba};
use hyperpdl::config::Config;
use hyperpdl::formula_automata::{BuildOptions, Builder};
use hyperpdl::kts::{parse_kts_with, Kts, KtsFormat};
use hyperpdl::marked_nfa::build_marked_nfa;
use hyperpdl::model_checker::{model_check, CheckOptions};
use hyperpdl::omega::{compile_omega, parse_omega_spec};
use hyperpdl::oracle::{LassoAssignment, Oracle, QuantifierMode};
use hyperpdl::paths::{format_paths, parse_paths, path_names};
use hyperpdl::satisfiability::{satisfiable, trace_interp, Fragment, SatError, SatOptions};
use hyperpdl::syntax::{critical_quantifiers, criticality, parse_program, parse_with_scope, program_nnf, to_nnf, Formula, Vocabulary};
use hyperpdl::world::WorldInterp;

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "hyperpdl", version, about = "Model checking and satisfiability for HyperPDL-Delta")]
struct Cli {
    /// key = value settings file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Machine-readable report on stdout
    #[arg(long, global = true)]
    json: bool,
    /// More logging on stderr (repeat for more)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a system satisfies a closed formula
    Check {
        system: PathBuf,
        formula: PathBuf,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Decide satisfiability of a linear formula over trace sets
    Sat {
        formula: PathBuf,
        #[command(flatten)]
        vocab: VocabArgs,
    },
    /// Compile an omega-regular specification into a formula
    CompileOmega { spec: PathBuf },
    /// Print the criticality of a formula and its critical quantifiers
    Criticality { formula: PathBuf },
    /// Emit a construction stage as Graphviz DOT
    Dot {
        /// Formula file, or a program file for `--stage marked-nfa`
        input: PathBuf,
        #[arg(long, value_enum)]
        stage: Stage,
        /// Number of free paths `p1..pn` in scope
        #[arg(long, default_value_t = 0)]
        paths: usize,
        /// Build over this system instead of traces
        #[arg(long)]
        system: Option<PathBuf>,
        #[command(flatten)]
        format: FormatArg,
        #[command(flatten)]
        vocab: VocabArgs,
    },
    /// Evaluate a formula on a lasso path assignment with the semantic oracle
    EvalLasso {
        formula: PathBuf,
        lassos: PathBuf,
        /// Paths are paths of this system; otherwise they are traces
        #[arg(long)]
        system: Option<PathBuf>,
        /// Evaluate quantifiers over nondeterministic systems by bounded
        /// lasso enumeration (incomplete)
        #[arg(long)]
        bounded: bool,
        #[command(flatten)]
        format: FormatArg,
        #[command(flatten)]
        vocab: VocabArgs,
    },
}

#[derive(Args)]
struct FormatArg {
    /// System file dialect
    #[arg(long = "format", value_enum, default_value_t = Dialect::Kts)]
    dialect: Dialect,
}

#[derive(Args)]
struct VocabArgs {
    /// Extra atomic propositions of the trace alphabet, comma separated
    #[arg(long, value_delimiter = ',')]
    aps: Vec<String>,
    /// Extra atomic programs of the trace alphabet, comma separated
    #[arg(long, value_delimiter = ',')]
    programs: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dialect {
    Kts,
    Kripke,
    Lts,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stage {
    MarkedNfa,
    Aba,
    Nba,
}

/// Failures that map to exit codes other than 2.
#[derive(Debug)]
struct Unsupported(String);

impl std::fmt::Display for Unsupported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Unsupported {}

fn read(p: &FsPath) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))
}

fn load_system(p: &FsPath, d: Dialect) -> Result<Kts> {
    let format = match d {
        Dialect::Kts => KtsFormat::Kts,
        Dialect::Kripke => KtsFormat::Kripke,
        Dialect::Lts => KtsFormat::Lts,
    };
    parse_kts_with(&read(p)?, format).with_context(|| format!("in {}", p.display()))
}

fn parse_formula_file(p: &FsPath, vocab: &Vocabulary, scope: &[&str]) -> Result<Formula> {
    parse_with_scope(read(p)?.trim(), vocab, scope).with_context(|| format!("in {}", p.display()))
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        print!("{}", text());
    }
    Ok(())
}

fn run(cli: &Cli, cfg: &Config) -> Result<ExitCode> {
    let build = BuildOptions { notdelta_cap: cfg.notdelta_cap, ..BuildOptions::default() };
    match &cli.cmd {
        Cmd::Check { system, formula, format } => {
            let k = load_system(system, format.dialect)?;
            let f = parse_formula_file(formula, &Vocabulary::new(&k.aps, &k.programs), &[])?;
            let v = model_check(&k, &f, &CheckOptions { build, concurrency: cfg.concurrency })?;
            let report = json!({ "schema": SCHEMA, "command": "check", "verdict": v.holds, "report": v });
            emit(cli.json, &report, || {
                let mut s = format!("verdict: {}\ncriticality: {}\n", if v.holds { "holds" } else { "fails" }, v.criticality);
                for sub in &v.subformulas {
                    s += &format!("subformula: {}\n  nonempty: {}\n", sub.formula, sub.nonempty);
                    for st in &sub.stages {
                        s += &format!(
                            "  stage {} [{} paths]: body {} / dealternated {} / quantified {}{}\n",
                            st.formula,
                            st.paths,
                            st.body_states,
                            st.dealternated_states,
                            st.quantified_states,
                            st.complemented_states.map(|c| format!(" / complemented {c}")).unwrap_or_default()
                        );
                    }
                    s += &format!("  explored: {} states in {:.1} ms\n", sub.explored_states, sub.millis);
                    if let Some(w) = &sub.witness {
                        if let Some(p) = &w.path {
                            s += &format!("  witness path {}: {}\n", w.variable, p);
                        }
                    }
                }
                for w in &v.warnings {
                    s += &format!("warning: {w}\n");
                }
                s
            })?;
            Ok(ExitCode::from(if v.holds { 0 } else { 1 }))
        }
        Cmd::Sat { formula, vocab } => {
            let f = parse_formula_file(formula, &Vocabulary::open(), &[])?;
            let opts = SatOptions {
                aps: vocab.aps.clone(),
                programs: vocab.programs.clone(),
                build,
                alphabet_cap: cfg.trace_alphabet_cap,
            };
            let r = match satisfiable(&f, &opts) {
                Err(SatError::Unsupported(m)) => {
                    return Err(Unsupported(SatError::Unsupported(m).to_string()).into());
                }
                r => r?,
            };
            let witness = r.witness.as_ref().map(|(names, traces)| format_paths(&r.interp, names, traces));
            let report = json!({
                "schema": SCHEMA,
                "command": "sat",
                "fragment": r.fragment,
                "verdict": r.satisfiable,
                "decided": r.decided.to_string(),
                "automaton_states": r.automaton_states,
                "explored_states": r.explored_states,
                "witness": witness,
            });
            emit(cli.json, &report, || {
                let mut s = format!(
                    "fragment: {}\nverdict: {}\n",
                    fragment_name(r.fragment),
                    if r.satisfiable { "satisfiable" } else { "unsatisfiable" }
                );
                if r.fragment != Fragment::ExistsStar {
                    s += &format!("decided: {}\n", r.decided);
                }
                if let Some(w) = &witness {
                    s += w;
                }
                s
            })?;
            Ok(ExitCode::from(if r.satisfiable { 0 } else { 1 }))
        }
        Cmd::CompileOmega { spec } => {
            let s = parse_omega_spec(&read(spec)?).with_context(|| format!("in {}", spec.display()))?;
            let f = compile_omega(&s)?;
            let report = json!({ "schema": SCHEMA, "command": "compile-omega", "paths": s.paths, "formula": f.to_string() });
            emit(cli.json, &report, || format!("{f}\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Criticality { formula } => {
            let f = to_nnf(&parse_formula_file(formula, &Vocabulary::open(), &[])?);
            let c = criticality(&f);
            let qs = critical_quantifiers(&f);
            let listing: Vec<_> = qs
                .iter()
                .map(|q| json!({ "var": q.var, "depth": q.depth, "negated": q.negated, "in_test": q.in_test, "in_box_body": q.in_box_body }))
                .collect();
            let report = json!({ "schema": SCHEMA, "command": "criticality", "nnf": f.to_string(), "criticality": c, "critical": listing });
            emit(cli.json, &report, || {
                let mut s = format!("{c}\n");
                for q in &qs {
                    let place = if q.in_test { "in a test" } else { "in a box body" };
                    s += &format!("  {}{} at depth {} {}\n", if q.negated { "not " } else { "" }, q.var, q.depth, place);
                }
                s
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Dot { input, stage, paths, system, format, vocab } => {
            let names: Vec<String> = (1..=*paths).map(|i| format!("p{i}")).collect();
            let scope: Vec<&str> = names.iter().map(String::as_str).collect();
            let dot = match stage {
                Stage::MarkedNfa => {
                    let p = parse_program(read(input)?.trim(), &Vocabulary::open(), &scope).with_context(|| format!("in {}", input.display()))?;
                    build_marked_nfa(&program_nnf(&p), *paths).to_dot()
                }
                Stage::Aba | Stage::Nba => {
                    let interp_vocab = match system {
                        Some(sys) => {
                            let k = load_system(sys, format.dialect)?;
                            (WorldInterp::kts(k.clone()), Vocabulary::new(&k.aps, &k.programs))
                        }
                        None => (WorldInterp::traces::<String, String>(&[], &[]), Vocabulary::open()),
                    };
                    let f = to_nnf(&parse_formula_file(input, &interp_vocab.1, &scope)?);
                    let interp = match interp_vocab.0 {
                        WorldInterp::Traces { .. } => {
                            let o = SatOptions { aps: vocab.aps.clone(), programs: vocab.programs.clone(), ..SatOptions::default() };
                            trace_interp(&f, &o)
                        }
                        k => k,
                    };
                    let letters = interp.letters(*paths);
                    if letters.len() as u128 > cfg.trace_alphabet_cap {
                        bail!("{} letters exceed the configured cap of {}", letters.len(), cfg.trace_alphabet_cap);
                    }
                    let aba = Builder::new(&interp, build).build(&f, *paths)?;
                    let show = |l: &hyperpdl::world::Letter| interp.show_letter(l);
                    match stage {
                        Stage::Aba => to_dot(&aba, &letters, &show),
                        _ => {
                            let mh = MhNba::new(Arc::new(aba) as Arc<dyn Automaton<_>>);
                            to_dot(&mh, &letters, &show)
                        }
                    }
                }
            };
            let report = json!({ "schema": SCHEMA, "command": "dot", "dot": dot });
            emit(cli.json, &report, || dot.clone())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::EvalLasso { formula, lassos, system, bounded, format, vocab } => {
            let text = read(lassos)?;
            let names = path_names(&text);
            let scope: Vec<&str> = names.iter().map(String::as_str).collect();
            let kts = system.as_ref().map(|s| load_system(s, format.dialect)).transpose()?;
            let voc = kts.as_ref().map_or(Vocabulary::open(), |k| Vocabulary::new(&k.aps, &k.programs));
            let f = parse_formula_file(formula, &voc, &scope)?;
            let interp = match &kts {
                Some(k) => WorldInterp::kts(k.clone()),
                None => trace_interp(&f, &SatOptions { aps: vocab.aps.clone(), programs: vocab.programs.clone(), ..SatOptions::default() }),
            };
            let parsed = parse_paths(&text, &interp).with_context(|| format!("in {}", lassos.display()))?;
            let mode = match &kts {
                _ if f.is_quantifier_free() => QuantifierMode::Forbidden,
                Some(k) if k.is_deterministic() => QuantifierMode::Deterministic,
                Some(_) if *bounded => {
                    tracing::warn!("bounded quantifier evaluation is incomplete");
                    QuantifierMode::Bounded(cfg.oracle_lasso_bound)
                }
                Some(_) => bail!("the system is not deterministic; pass --bounded for an incomplete bounded evaluation"),
                None => bail!("quantifiers need a system (--system)"),
            };
            let pa = if parsed.is_empty() {
                LassoAssignment::empty()
            } else {
                LassoAssignment::new(parsed.into_iter().map(|(_, p)| p).collect())
            };
            let holds = Oracle::new(interp).with_mode(mode).eval(&pa, 0, &f)?;
            let report = json!({ "schema": SCHEMA, "command": "eval-lasso", "verdict": holds, "formula": f.to_string() });
            emit(cli.json, &report, || format!("{holds}\n"))?;
            Ok(ExitCode::from(if holds { 0 } else { 1 }))
        }
    }
}

fn fragment_name(f: Fragment) -> &'static str {
    match f {
        Fragment::ForallStar => "forall*",
        Fragment::ExistsStar => "exists*",
        Fragment::ExistsForall => "exists*forall*",
        Fragment::Unsupported => "unsupported",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => tracing::Level::WARN,
        1 => tracing::Level::INFO,
        _ => tracing::Level::DEBUG,
    };
    tracing_subscriber::fmt().with_writer(std::io::stderr).with_max_level(level).without_time().init();
    let cfg = match &cli.config {
        Some(p) => match read(p).and_then(|t| Config::parse(&t).map_err(|e| anyhow!("{}: {e}", p.display()))) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
        None => Config::default(),
    };
    match run(&cli, &cfg) {
        Ok(code) => code,
        Err(e) => {
            let unsupported = e.downcast_ref::<Unsupported>().is_some();
            if cli.json {
                println!("{}", json!({ "schema": SCHEMA, "error": format!("{e:#}"), "unsupported": unsupported }));
            }
            eprintln!("error: {e:#}");
            ExitCode::from(if unsupported { 3 } else { 2 })
        }
    }
}
