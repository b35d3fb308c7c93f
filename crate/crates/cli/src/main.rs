use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use aqecc::ael::measure_pseudorandom;
use aqecc::aqecc::{check_privacy, measure_eps, plan_parameters, robust_singleton_bound};
use aqecc::css::{verify_qld, QldDecoder, QldMode};
use aqecc::error::Error;
use aqecc::gf::Field;
use aqecc::io::{self, Built, Pipeline, SimConfig};
use aqecc::pauli::Syndrome;
use aqecc::sim::{self, ResultsTable};

#[derive(Parser)]
#[command(name = "aqecc", version, about = "Construct, verify and simulate approximate quantum error-correcting codes")]
struct Cli {
    /// Master seed; overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write results into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format (default json; `verify --check distance` then prints
    /// the bare number).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Distance,
    Qld,
    Pseudorandom,
    PtcEps,
    RssPrivacy,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build an object from a code file and emit its explicit form.
    Construct {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a brute-force oracle on a code file.
    Verify {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, value_enum)]
        check: Check,
        /// Fail unless the distance equals this value.
        #[arg(long)]
        expect: Option<usize>,
        /// List-decoding radius for `qld`.
        #[arg(long, default_value_t = 1)]
        radius: usize,
        /// List-size bound for `qld`.
        #[arg(long)]
        ell: Option<usize>,
        /// Pseudorandomness threshold for `pseudorandom`.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// List-decode one syndrome of a CSS code.
    Decode {
        #[arg(long)]
        code: PathBuf,
        /// Comma-separated syndrome values, one field element per generator
        /// (X checks first).
        #[arg(long)]
        syndrome: String,
        #[arg(long, default_value_t = 1)]
        radius: usize,
    },
    /// Run a trial pipeline.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's trial count.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Parameter bundle for a target rate and gap.
    Plan {
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        f_constant: f64,
    },
    /// Robust Singleton bound; with `--k`, checks the dimension against it.
    Bound {
        #[arg(long)]
        n: usize,
        /// Relative distance; `d = floor(delta n) + 1`.
        #[arg(long, conflicts_with = "d")]
        delta: Option<f64>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        log2_q: f64,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long)]
        k: Option<usize>,
    },
}

/// Exit status of a completed command.
enum Status {
    Ok,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Status> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("thread pool")?;
    }
    match &cli.cmd {
        Cmd::Construct { config } => construct(cli, config),
        Cmd::Verify { code, check, expect, radius, ell, eps } => verify(cli, code, *check, *expect, *radius, *ell, *eps),
        Cmd::Decode { code, syndrome, radius } => decode(cli, code, syndrome, *radius),
        Cmd::Simulate { config, trials } => simulate(cli, config, *trials),
        Cmd::Plan { rate, gamma, f_constant } => {
            let plan = plan_parameters(*rate, *gamma, *f_constant)?;
            emit(cli, "plan", &serde_json::to_value(&plan)?)?;
            Ok(Status::Ok)
        }
        Cmd::Bound { n, delta, d, log2_q, eps, k } => {
            let d = match (delta, d) {
                (Some(dl), None) => (dl * *n as f64 + 1e-9).floor() as usize + 1,
                (None, Some(d)) => *d,
                _ => bail!(Error::Config("give exactly one of --delta and --d".into())),
            };
            let bound = robust_singleton_bound(*n, d, *log2_q, *eps);
            let mut v = json!({ "n": n, "d": d, "log2_q": log2_q, "eps": eps, "bound": bound });
            let mut status = Status::Ok;
            if let Some(k) = k {
                let slack = bound - *k as f64;
                v["k"] = json!(k);
                v["slack"] = json!(slack);
                v["ok"] = json!(slack >= -1e-9);
                if slack < -1e-9 {
                    status = Status::VerificationFailed;
                }
            }
            emit(cli, "bound", &v)?;
            Ok(status)
        }
    }
}

fn load(path: &Path) -> Result<(Field, Built, io::CodeFile)> {
    let file = io::load_code_file(path)?;
    let field = Field::from_config(&file.field)?;
    let built = io::build(&field, &file.code)?;
    Ok((field, built, file))
}

fn describe(built: &Built) -> Value {
    match built {
        Built::Classical(c) => json!({ "kind": "classical", "n": c.n(), "k": c.dim(), "ext": c.ext(), "rate": c.rate() }),
        Built::Quantum(c) => json!({ "kind": "css", "n": c.n(), "k": c.k(), "ext": c.ext(), "rate": c.rate() }),
        Built::Stabilizer(s) => json!({ "kind": "stabilizer", "n": s.n(), "k": s.k(), "ext": s.ext() }),
        Built::Ael(a) => json!({
            "kind": "ael", "n": a.n(), "k": a.code.k(), "ext": a.code.ext(), "rate": a.code.rate(),
            "graph_degree": a.graph.r(),
        }),
        Built::Ptc(p) => json!({
            "kind": "ptc", "n": p.n(), "lambda": p.lambda(), "keys": p.key_count(),
            "target": p.target(), "eps": p.eps(), "measured": p.measured().is_some(), "accepted": p.accepted(),
        }),
        Built::Rss(r) => json!({
            "kind": "rss", "n": r.n(), "s": r.s(), "d": r.d(), "alphabet": r.field().q(),
            "eps": r.eps(), "acceptance_threshold": r.acceptance_threshold(),
        }),
    }
}

fn construct(cli: &Cli, config: &Path) -> Result<Status> {
    let (field, built, _) = load(config)?;
    let summary = describe(&built);
    let explicit = io::explicit_file(&field, &built).map(|f| io::to_toml(&f)).transpose()?;
    match (&cli.out, explicit) {
        (Some(dir), Some(text)) => {
            let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("code");
            write_file(&dir.join(format!("{stem}.explicit.code")), &text)?;
            emit(cli, "construct", &summary)?;
        }
        // stdout carries the code file; the summary goes to stderr
        (None, Some(text)) => {
            print!("{text}");
            eprintln!("{summary}");
        }
        (_, None) => emit(cli, "construct", &summary)?,
    }
    Ok(Status::Ok)
}

fn verify(
    cli: &Cli,
    path: &Path,
    check: Check,
    expect: Option<usize>,
    radius: usize,
    ell: Option<usize>,
    eps: Option<f64>,
) -> Result<Status> {
    let (_, built, _) = load(path)?;
    let (report, pass) = match check {
        Check::Distance => {
            let d = match &built {
                Built::Classical(c) => c.min_distance()?,
                Built::Quantum(_) | Built::Ael(_) => built.css().unwrap().distance()?,
                Built::Stabilizer(s) => s.brute_force_distance(u64::MAX)?,
                other => bail!(Error::Config(format!("no distance for a {}", other.kind()))),
            };
            let pass = expect.is_none_or(|e| d == Some(e));
            if cli.out.is_none() && cli.format.is_none() && expect.is_none() {
                println!("{}", d.map_or("none".to_string(), |d| d.to_string()));
                return Ok(Status::Ok);
            }
            (json!({ "check": "distance", "distance": d, "expected": expect, "pass": pass }), pass)
        }
        Check::Qld => {
            let css = built.css().ok_or_else(|| anyhow!(Error::Config("QLD check needs a CSS code".into())))?;
            let r = verify_qld(css, radius, ell.unwrap_or(usize::MAX))?;
            let pass = r.within_ell;
            let hist: Vec<Value> = r.histogram.iter().map(|(size, count)| json!({ "list_size": size, "syndromes": count })).collect();
            (
                json!({ "check": "qld", "radius": r.radius, "syndromes": r.syndromes, "max_list": r.max_count, "ell": ell, "pass": pass, "histogram": hist }),
                pass,
            )
        }
        Check::Pseudorandom => {
            let Built::Ael(a) = &built else { bail!(Error::Config("pseudorandomness check needs an ael code".into())) };
            let r = measure_pseudorandom(&a.graph)?;
            let pass = eps.is_none_or(|e| r.eps <= e + 1e-12);
            (json!({ "check": "pseudorandom", "eps": r.eps, "threshold": eps, "exhaustive": r.exhaustive, "pass": pass }), pass)
        }
        Check::PtcEps => {
            let Built::Ptc(p) = &built else { bail!(Error::Config("PTC check needs a ptc family".into())) };
            let m = match p.measured() {
                Some(m) => m.clone(),
                None => measure_eps(p)?,
            };
            let pass = m.eps() <= p.target() + 1e-12;
            (
                json!({
                    "check": "ptc-eps", "worst_count": m.worst_count, "keys": m.keys,
                    "eps": format!("{}/{}", m.worst_count, m.keys), "eps_value": m.eps(), "target": p.target(), "pass": pass,
                }),
                pass,
            )
        }
        Check::RssPrivacy => {
            let Built::Rss(r) = &built else { bail!(Error::Config("privacy check needs an rss scheme".into())) };
            let a = vec![0u32; r.s()];
            let b: Vec<u32> = (0..r.s()).map(|i| (i as u32 + 1) % r.field().q()).collect();
            let rep = check_privacy(r, &a, &b)?;
            let pass = rep.identical;
            (serde_json::to_value(&rep)?, pass)
        }
    };
    emit(cli, "verify", &report)?;
    Ok(if pass { Status::Ok } else { Status::VerificationFailed })
}

fn decode(cli: &Cli, path: &Path, syndrome: &str, radius: usize) -> Result<Status> {
    let (field, built, _) = load(path)?;
    let css = built.css().ok_or_else(|| anyhow!(Error::Config("decode needs a CSS code".into())))?;
    let values: Vec<u32> = syndrome
        .split(',')
        .map(|t| t.trim().parse::<u32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config(format!("bad syndrome: {e}")))?;
    if values.len() != css.stab().r() || values.iter().any(|&v| v >= field.q()) {
        bail!(Error::Config(format!("syndrome needs {} values below {}", css.stab().r(), field.q())));
    }
    let out = QldDecoder::new(css, radius, QldMode::Ball)?.decode(&Syndrome::from_fq(&field, &values))?;
    let list: Vec<Value> = out
        .covered()
        .iter()
        .map(|e| Ok(json!({ "pauli": e.op.to_text(&field)?, "min_weight": e.min_weight })))
        .collect::<Result<_>>()?;
    emit(cli, "decode", &json!({ "radius": radius, "list_size": list.len(), "x_list": out.x_list, "z_list": out.z_list, "list": list }))?;
    Ok(Status::Ok)
}

fn simulate(cli: &Cli, path: &Path, trials: Option<u64>) -> Result<Status> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg: SimConfig = io::parse_sim_config(&text)?;
    let trials = trials.unwrap_or(cfg.trials);
    let master = cli.seed.or(cfg.seed).unwrap_or(0);
    let pipeline = cfg.pipeline()?;
    let adv = |n: usize| cfg.adversary.clone().unwrap_or_default().model(n, 0);
    let table: ResultsTable = match &pipeline {
        Pipeline::Private(pa) => sim::run_private_trials(pa, &adv(pa.n()), trials, master, cfg.tie_break)?,
        Pipeline::Aqecc(aq) => {
            sim::run_aqecc_trials(aq, &adv(aq.private().n()), trials, master, cfg.attack(), cfg.layers, cfg.tie_break)?
        }
        Pipeline::Ael(a) => sim::run_ael_trials(a, &adv(a.n()), trials, master)?,
        Pipeline::Direct(dc) => sim::run_direct_trials(dc, &adv(dc.n()), trials, master)?,
    };
    let summary = table.summary_json()?;
    match &cli.out {
        Some(dir) => {
            let mut csv = Vec::new();
            table.write_csv(&mut csv)?;
            write_file(&dir.join("trials.csv"), std::str::from_utf8(&csv)?)?;
            write_file(&dir.join("summary.json"), &summary)?;
        }
        None => match fmt(cli) {
            Format::Csv => {
                table.write_csv(std::io::stdout().lock())?;
                eprintln!("{}", summary_line(&table));
            }
            Format::Json => println!("{summary}"),
        },
    }
    Ok(if table.summary.pass { Status::Ok } else { Status::VerificationFailed })
}

fn fmt(cli: &Cli) -> Format {
    cli.format.unwrap_or(Format::Json)
}

fn summary_line(t: &ResultsTable) -> String {
    let s = &t.summary;
    format!(
        "{} trials={} failures={} rate={:.6} wilson=[{:.6}, {:.6}] bound={:.6} ({}) {}",
        s.mode,
        s.trials,
        s.failure_fraction,
        s.failure_rate,
        s.wilson_low,
        s.wilson_high,
        s.bound,
        s.bound_name,
        if s.pass { "PASS" } else { "FAIL" }
    )
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Print or store a report as JSON, or as `key,value` rows.
fn emit(cli: &Cli, name: &str, v: &Value) -> Result<()> {
    let text = match fmt(cli) {
        Format::Json => serde_json::to_string_pretty(v)? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"])?;
            if let Value::Object(map) = v {
                for (k, val) in map {
                    let cell = match val {
                        Value::String(s) => s.clone(),
                        Value::Null => String::new(),
                        other => other.to_string(),
                    };
                    w.write_record([k.as_str(), cell.as_str()])?;
                }
            }
            String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?
        }
    };
    match &cli.out {
        Some(dir) => {
            let ext = if fmt(cli) == Format::Json { "json" } else { "csv" };
            write_file(&dir.join(format!("{name}.{ext}")), &text)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
