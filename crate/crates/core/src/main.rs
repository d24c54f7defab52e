use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use ick::closure::{closure, negation_closure, negation_closure_of};
use ick::corpus::{run_goal, run_item, Outcome, CORPUS};
use ick::decide::{decide, solve_goal, solve_search, Certificate, Config, Stats, Verdict};
use ick::formula::{AgentSet, Formula};
use ick::game::Player;
use ick::hilbert::{check_derivation, DerivationJson};
use ick::kripke::ModelJson;
use ick::parse::parse;
use ick::proof::{check_proof, ProofJson};
use ick::random::{rng, FormulaGen};
use ick::rules::Calculus;
use ick::sequent::{parse_sequent, Sequent};
use ick::translation::{tau, tr};

#[derive(Parser)]
#[command(name = "ick", version, about = "Decide intuitionistic common knowledge logic")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// ICK, ICKT, ICKS4 or ICKS5.
    #[arg(long, global = true)]
    logic: Option<String>,
    /// Comma separated agent names.
    #[arg(long, global = true)]
    agents: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON config file with defaults for every flag.
    #[arg(long, global = true, env = "ICK_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on interned sequents per arena.
    #[arg(long, global = true)]
    max_sequents: Option<usize>,
    /// Wall-clock budget in seconds.
    #[arg(long, global = true)]
    time_budget: Option<f64>,
    /// World cap for ICKS5 canonical countermodels.
    #[arg(long, global = true)]
    s5_max_worlds: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a formula or a sequent `G => D`.
    Decide {
        input: String,
        /// Attach a proof or countermodel.
        #[arg(long)]
        certificate: bool,
        /// Write the certificate to a file instead of stdout.
        #[arg(long, requires = "certificate")]
        certificate_out: Option<PathBuf>,
        /// Build canonical countermodels for ICKS5.
        #[arg(long)]
        s5_countermodel: bool,
    },
    /// Print the double-negation translation of a formula.
    Translate { formula: String },
    /// Check a cyclic proof certificate.
    CheckProof { file: PathBuf },
    /// Check frame conditions and, with --goal, that the goal fails at the root.
    CheckModel {
        file: PathBuf,
        #[arg(long)]
        goal: Option<String>,
        /// Root world; defaults to the one stored in the file.
        #[arg(long)]
        world: Option<String>,
    },
    /// Evaluate a formula at a world of a model.
    Eval { model: PathBuf, world: String, formula: String },
    /// Check a Hilbert derivation.
    CheckHilbert { file: PathBuf },
    /// Run the benchmark corpus in every logic.
    Corpus {
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also cross-check this many seeded random formulas.
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
}

#[derive(Default, Deserialize)]
#[serde(default)]
struct FileConfig {
    logic: Option<String>,
    agents: Option<Vec<String>>,
    format: Option<Format>,
    seed: Option<u64>,
    #[serde(flatten)]
    decide: Config,
}

struct Ctx {
    logic: Calculus,
    logic_given: bool,
    agents: AgentSet,
    agents_given: bool,
    format: Format,
    seed: u64,
    cfg: Config,
}

/// Failure that maps to exit status 2.
struct Fail(String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(e.to_string())
    }
}

type Res = Result<ExitCode, Fail>;

fn context(g: &Global) -> Result<Ctx, Fail> {
    let file: FileConfig = match &g.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Fail(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Fail(format!("{}: {e}", p.display())))?
        }
        None => FileConfig::default(),
    };
    let logic_text = g.logic.clone().or(file.logic.clone());
    let logic = match &logic_text {
        Some(t) => t.parse::<Calculus>()?,
        None => Calculus::Ick,
    };
    let agents = match (&g.agents, &file.agents) {
        (Some(a), _) => AgentSet::parse(a)?,
        (None, Some(v)) => AgentSet::new(v.iter().map(|s| s.as_str()))?,
        (None, None) => AgentSet::parse("a")?,
    };
    let mut cfg = file.decide;
    if let Some(n) = g.max_sequents {
        cfg.max_sequents = n;
    }
    if let Some(t) = g.time_budget {
        cfg.time_budget_secs = Some(t);
    }
    if let Some(w) = g.s5_max_worlds {
        cfg.s5_max_worlds = w;
    }
    if cfg.max_sequents == 0 || cfg.s5_max_worlds == 0 || cfg.time_budget_secs.is_some_and(|t| t <= 0.0) {
        return Err(Fail("caps must be positive".into()));
    }
    Ok(Ctx {
        logic,
        logic_given: logic_text.is_some(),
        agents,
        agents_given: g.agents.is_some() || file.agents.is_some(),
        format: g.format.or(file.format).unwrap_or(Format::Text),
        seed: g.seed.or(file.seed).unwrap_or(0),
        cfg,
    })
}

fn goal_of(text: &str, agents: &AgentSet) -> Result<Sequent, Fail> {
    if text.contains("=>") {
        Ok(parse_sequent(text, agents)?)
    } else {
        Ok(Sequent::goal(parse(text, agents)?))
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(p: &Path) -> Result<T, Fail> {
    let text = fs::read_to_string(p).map_err(|e| Fail(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail(format!("{}: {e}", p.display())))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn status(ok: bool) -> ExitCode {
    ExitCode::from(if ok { 0 } else { 1 })
}

fn certificate_json(c: &Certificate) -> serde_json::Value {
    match c {
        Certificate::Proof(p) => serde_json::to_value(ProofJson::from_proof(p)),
        Certificate::Countermodel(m) => serde_json::to_value(m.to_json()),
    }
    .expect("certificates serialize")
}

fn cmd_decide(ctx: &Ctx, input: &str, certificate: bool, out: Option<&Path>, s5: bool) -> Res {
    let goal = goal_of(input, &ctx.agents)?;
    let cfg = Config { certificate, s5_countermodel: s5 || ctx.cfg.s5_countermodel, ..ctx.cfg.clone() };
    let start = Instant::now();
    let verdict: Result<Verdict, _> = decide(ctx.logic, &goal, &ctx.agents, &cfg);
    let v = match verdict {
        Ok(v) => v,
        Err(e) if e.is_resource() => {
            match ctx.format {
                Format::Text => {
                    println!("resource-limit");
                    eprintln!("{e}");
                }
                Format::Json => print_json(&json!({
                    "logic": ctx.logic.name(), "input": goal.to_string(),
                    "result": "resource-limit", "reason": e.to_string(),
                })),
            }
            return Ok(ExitCode::from(2));
        }
        Err(e) => return Err(e.into()),
    };
    let result = if v.provable { "provable" } else { "not-provable" };
    let cert = v.certificate.as_ref().map(certificate_json);
    if let (Some(c), Some(path)) = (&cert, out) {
        fs::write(path, serde_json::to_string_pretty(c)?).map_err(|e| Fail(format!("{}: {e}", path.display())))?;
    }
    let Stats { universe, sequents, positions, arenas } = v.stats;
    match ctx.format {
        Format::Text => {
            println!("{result}");
            if let Some(c) = &cert {
                match out {
                    Some(path) => println!("certificate written to {}", path.display()),
                    None => println!("{}", serde_json::to_string_pretty(c)?),
                }
            } else if certificate {
                println!("no certificate (ICKS5 countermodels need --s5-countermodel)");
            }
        }
        Format::Json => print_json(&json!({
            "logic": ctx.logic.name(),
            "agents": ctx.agents.iter().map(|a| a.name()).collect::<Vec<_>>(),
            "input": goal.to_string(),
            "result": result,
            "stats": {"universe": universe, "sequents": sequents, "positions": positions,
                      "arenas": arenas, "seconds": start.elapsed().as_secs_f64()},
            "certificate": match &v.certificate {
                None => serde_json::Value::Null,
                Some(Certificate::Proof(_)) => json!({"kind": "proof", "proof": cert}),
                Some(Certificate::Countermodel(_)) => json!({"kind": "countermodel", "model": cert}),
            },
        })),
    }
    Ok(status(v.provable))
}

fn cmd_translate(ctx: &Ctx, text: &str) -> Res {
    let f = parse(text, &ctx.agents)?;
    match ctx.format {
        Format::Text => println!("{}", tr(&f)),
        Format::Json => print_json(&json!({
            "input": f.to_string(), "tau": tau(&f).to_string(), "tr": tr(&f).to_string(),
        })),
    }
    Ok(ExitCode::SUCCESS)
}

fn report(ctx: &Ctx, ok: bool, what: &str, detail: Option<String>) -> ExitCode {
    match ctx.format {
        Format::Text => match &detail {
            Some(d) => println!("{what}: {d}"),
            None => println!("{what}"),
        },
        Format::Json => print_json(&json!({"result": what, "detail": detail})),
    }
    status(ok)
}

fn cmd_check_proof(ctx: &Ctx, file: &Path) -> Res {
    let j: ProofJson = read_json(file)?;
    let agents = ctx.agents_given.then_some(&ctx.agents);
    let proof = j.to_proof(agents)?;
    let cal = match (ctx.logic_given, proof.logic) {
        (false, Some(l)) => l,
        _ => ctx.logic,
    };
    let fs = proof.root().formulas();
    let sigma: BTreeSet<Formula> =
        if cal == Calculus::Icks5 { negation_closure(&fs, &proof.agents) } else { closure(&fs, &proof.agents) };
    Ok(match check_proof(cal, &proof, &sigma) {
        Ok(()) => report(ctx, true, "valid", Some(format!("{} proves {}", cal.name(), proof.root()))),
        Err(d) => report(ctx, false, "invalid", Some(d.to_string())),
    })
}

fn cmd_check_model(ctx: &Ctx, file: &Path, goal: Option<&str>, world: Option<&str>) -> Res {
    let j: ModelJson = read_json(file)?;
    let m = j.to_model(Some(&ctx.agents))?;
    let violations = m.check_frame(ctx.logic.frame_class());
    if let Some(v) = violations.first() {
        return Ok(report(ctx, false, "invalid", Some(format!("frame condition violated: {v}"))));
    }
    let Some(goal) = goal else {
        return Ok(report(ctx, true, "valid", Some(format!("{} frame with {} worlds", ctx.logic.name(), m.len()))));
    };
    let goal = goal_of(goal, &ctx.agents)?;
    let name = world.map(str::to_string).or(j.root).ok_or_else(|| Fail("no root world given".into()))?;
    let w = m.world(&name)?;
    Ok(if m.eval(w, &goal.interpretation())? {
        report(ctx, false, "invalid", Some(format!("{goal} holds at {name}")))
    } else {
        report(ctx, true, "valid", Some(format!("{goal} fails at {name}")))
    })
}

fn cmd_eval(ctx: &Ctx, model: &Path, world: &str, formula: &str) -> Res {
    let j: ModelJson = read_json(model)?;
    let m = j.to_model(Some(&ctx.agents))?;
    let f = parse(formula, &ctx.agents)?;
    let v = m.eval_at(world, &f)?;
    match ctx.format {
        Format::Text => println!("{v}"),
        Format::Json => print_json(&json!({"world": world, "formula": f.to_string(), "value": v})),
    }
    Ok(status(v))
}

fn cmd_check_hilbert(ctx: &Ctx, file: &Path) -> Res {
    let j: DerivationJson = read_json(file)?;
    let agents = match (&j.agents, ctx.agents_given) {
        (Some(v), false) => AgentSet::new(v.iter().map(|s| s.as_str()))?,
        _ => ctx.agents.clone(),
    };
    let cal = match (&j.logic, ctx.logic_given) {
        (Some(l), false) => l.parse()?,
        _ => ctx.logic,
    };
    let d = j.to_derivation(&agents)?;
    let assumptions = j.assumption_set(&agents)?;
    Ok(match check_derivation(cal, &d, &assumptions, &agents) {
        Ok(()) => report(ctx, true, "valid", Some(format!("{} derives {}", cal.name(), d.conclusion()?))),
        Err(e) => report(ctx, false, "invalid", Some(e.to_string())),
    })
}

/// Full-arena and search-arena verdicts on one random formula, with certificates.
fn random_check(f: &Formula, agents: &AgentSet, cfg: &Config) -> Result<(), String> {
    let goal = Sequent::goal(f.clone());
    for cal in Calculus::ALL {
        let (got, cert) = run_goal(cal, &goal, agents, cfg);
        let got = got?;
        if let Some(Err(e)) = cert {
            return Err(format!("{}: certificate: {e}", cal.name()));
        }
        if cal != Calculus::Icks5 {
            let limits = cfg.limits(Instant::now());
            let full = solve_goal(cal, &goal, agents, limits, &mut Stats::default()).map_err(|e| e.to_string())?;
            let search = solve_search(cal, &goal, agents, limits).map_err(|e| e.to_string())?;
            if (full.1 == Player::Prover) != got || (search.1 == Player::Prover) != got {
                return Err(format!("{}: arenas disagree", cal.name()));
            }
        }
    }
    Ok(())
}

fn cmd_corpus(ctx: &Ctx, jobs: usize, random: usize) -> Res {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let cfg = Config { certificate: true, ..ctx.cfg.clone() };
    let tasks: Vec<_> = CORPUS.iter().flat_map(|i| Calculus::ALL.map(move |c| (i, c))).collect();
    let outcomes: Vec<Outcome> = pool.install(|| {
        use rayon::prelude::*;
        tasks.par_iter().map(|&(item, cal)| run_item(item, cal, &cfg)).collect()
    });
    let agents = AgentSet::parse("a")?;
    let gen = FormulaGen::new(&["p", "q"], &agents, 4);
    let mut r = rng(ctx.seed);
    // keep the random pass inside the size class that decides at desk scale
    let formulas: Vec<Formula> = std::iter::repeat_with(|| gen.formula(&mut r))
        .filter(|f| negation_closure_of(f, &agents).len() <= 14)
        .take(random)
        .collect();
    let randoms: Vec<Result<(), String>> = pool.install(|| {
        use rayon::prelude::*;
        formulas.par_iter().map(|f| random_check(f, &agents, &cfg)).collect()
    });
    let passed = outcomes.iter().filter(|o| o.passed()).count() + randoms.iter().filter(|r| r.is_ok()).count();
    let total = outcomes.len() + randoms.len();
    match ctx.format {
        Format::Text => {
            for o in &outcomes {
                let got = match &o.got {
                    Ok(b) => b.to_string(),
                    Err(e) => format!("error ({e})"),
                };
                let cert = match &o.certificate {
                    None => "-".to_string(),
                    Some(Ok(())) => "verified".to_string(),
                    Some(Err(e)) => format!("rejected ({e})"),
                };
                println!(
                    "{} {:24} {:6} expected={:5} got={:5} certificate={} {:.3}s",
                    if o.passed() { "PASS" } else { "FAIL" },
                    o.name,
                    o.calculus.name(),
                    o.expected,
                    got,
                    cert,
                    o.elapsed.as_secs_f64()
                );
            }
            for (f, r) in formulas.iter().zip(&randoms) {
                if let Err(e) = r {
                    println!("FAIL random {f}: {e}");
                }
            }
            println!("{passed}/{total} passed");
        }
        Format::Json => print_json(&json!({
            "passed": passed,
            "total": total,
            "items": outcomes.iter().map(|o| json!({
                "name": o.name, "logic": o.calculus.name(), "expected": o.expected,
                "got": o.got.as_ref().ok(), "error": o.got.as_ref().err(),
                "certificate": o.certificate.as_ref().map(|c| c.as_ref().err().cloned().unwrap_or_else(|| "verified".into())),
                "passed": o.passed(), "seconds": o.elapsed.as_secs_f64(),
            })).collect::<Vec<_>>(),
            "random_failures": formulas.iter().zip(&randoms)
                .filter_map(|(f, r)| r.as_ref().err().map(|e| json!({"formula": f.to_string(), "error": e})))
                .collect::<Vec<_>>(),
        })),
    }
    Ok(status(passed == total))
}

fn run(cli: Cli) -> Res {
    let ctx = context(&cli.global)?;
    match &cli.command {
        Command::Decide { input, certificate, certificate_out, s5_countermodel } => {
            cmd_decide(&ctx, input, *certificate, certificate_out.as_deref(), *s5_countermodel)
        }
        Command::Translate { formula } => cmd_translate(&ctx, formula),
        Command::CheckProof { file } => cmd_check_proof(&ctx, file),
        Command::CheckModel { file, goal, world } => cmd_check_model(&ctx, file, goal.as_deref(), world.as_deref()),
        Command::Eval { model, world, formula } => cmd_eval(&ctx, model, world, formula),
        Command::CheckHilbert { file } => cmd_check_hilbert(&ctx, file),
        Command::Corpus { jobs, random } => cmd_corpus(&ctx, *jobs, *random),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Fail(msg)) => {
            eprintln!("error: {}", msg.lines().next().unwrap_or("unknown error"));
            ExitCode::from(2)
        }
    }
}
