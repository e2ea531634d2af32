//! Command-line front end.
//!
//! Graph streams are JSON lines and curves are CSV. Every output starts with a
//! header carrying the tool version, `n`, `d`, the seed and the mode, and every
//! randomized command is a pure function of its arguments and seed.

use crate::config::{sample_configuration, sample_uniform_simple};
use crate::connections::{build_connection, sample_tuple, validate_connection, TupleJson};
use crate::enumerate::DEFAULT_CAP;
use crate::error::{Error, Result};
use crate::extension::{edge_indicator, extend, hashed, ExtensionContext, FieldSample, GaussianFieldSpec, SimpleFn};
use crate::graph::{to_json, BipartiteMultigraph};
use crate::kernels::{run_chain, Chain};
use crate::spectral::{comparison_experiment, spectral_summary, FunctionSource, StateSpace, MIN_RESTARTS};
use crate::verify::{run_suite, Suite, VerifyConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

/// Environment variable read when `--seed` is absent.
pub const SEED_ENV: &str = "SWITCHMIX_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "switchmix", version, about = "Switch chains on regular bipartite graphs and multigraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
struct Common {
    /// Number of vertices on each side.
    #[arg(long)]
    n: Option<usize>,
    /// Degree of every vertex.
    #[arg(long)]
    d: Option<usize>,
    /// Random seed; falls back to SWITCHMIX_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random instances, samples or restarts.
    #[arg(long)]
    trials: Option<usize>,
    /// Total-variation threshold for mixing times.
    #[arg(long)]
    eps: Option<f64>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use exact enumeration where a sampled variant exists.
    #[arg(long)]
    exact: bool,
    /// Largest state space that may be enumerated.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Model {
    /// Uniform simple graphs by rejection from the configuration model.
    Uniform,
    /// Configuration-model multigraphs.
    Configuration,
    /// States of the discrete simple switch chain.
    Switch,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SpaceArg {
    Simple,
    Multigraph,
    Both,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stream sampled graphs as JSON lines.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "uniform")]
        model: Model,
        /// Chain steps between emitted states for the switch model.
        #[arg(long, default_value_t = 1000)]
        steps: u64,
    },
    /// Dump an enumerated state space with its stationary measure as JSON lines.
    Enumerate {
        #[command(flatten)]
        common: Common,
        /// Enumerate multigraphs (configuration-model measure) instead of simple graphs.
        #[arg(long)]
        multigraph: bool,
    },
    /// Spectral gap, Poincaré and log-Sobolev constants, relaxation and mixing times as CSV.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "both")]
        space: SpaceArg,
    },
    /// Worst-start total-variation curve of the continuous-time chain as CSV.
    Mixing {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        multigraph: bool,
        /// Number of time points, evenly spaced up to twice the mixing time.
        #[arg(long, default_value_t = 41)]
        points: usize,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        /// One of sn-uniqueness, sn-size, anti-expansion, reverse-count, matching,
        /// source-uniqueness, short-paths, long-paths, reversibility, lift.
        suite: String,
        #[command(flatten)]
        common: Common,
        /// Largest number of double edges in sampled multigraphs and perfect pairs.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Build and validate connections for sampled or given admissible tuples.
    Connect {
        #[command(flatten)]
        common: Common,
        /// Largest number of double edges in sampled tuples.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// JSON lines of tuples `{g1, g1p, g2, g2p}` to connect instead of sampling.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Evaluate the randomized extension of a function on multigraphs as CSV.
    Extend {
        #[command(flatten)]
        common: Common,
        /// Use a hashed function with values in 0..levels instead of the (1, 1) edge indicator.
        #[arg(long)]
        levels: Option<u64>,
        /// Uniform simple graphs used to estimate the statistics in sampled mode.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Dirichlet and variance ratios of the extension against the original function as CSV.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Use random hashed functions with values in 0..levels instead of the edge indicator.
        #[arg(long)]
        levels: Option<u64>,
    },
}

/// Outcome of a subcommand: its output and whether every check passed.
struct Output {
    text: String,
    passed: bool,
}

struct Ctx {
    command: &'static str,
    n: usize,
    d: usize,
    seed: u64,
}

impl Ctx {
    fn json_header(&self, mode: &str) -> String {
        let h = json!({"header": {
            "tool": "switchmix",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "n": self.n,
            "d": self.d,
            "seed": self.seed,
            "mode": mode,
        }});
        format!("{h}\n")
    }

    fn csv_header(&self, mode: &str) -> String {
        format!(
            "# switchmix {} command={} n={} d={} seed={} mode={}\n",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.n,
            self.d,
            self.seed,
            mode
        )
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn context(command: &'static str, common: &Common, default: (usize, usize)) -> Result<Ctx> {
    let n = common.n.unwrap_or(default.0);
    let d = common.d.unwrap_or(default.1);
    if d == 0 || n < d {
        return Err(usage(format!("need 1 ≤ d ≤ n, got n={n}, d={d}")));
    }
    Ok(Ctx { command, n, d, seed: resolve_seed(common.seed)? })
}

fn csv_body<S: serde::Serialize>(rows: &[S]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn sample(common: &Common, model: Model, steps: u64) -> Result<Output> {
    let ctx = context("sample", common, (3, 2))?;
    let mode = match model {
        Model::Uniform => "uniform",
        Model::Configuration => "configuration",
        Model::Switch => "switch",
    };
    let mut rng = ctx.rng();
    let mut text = ctx.json_header(mode);
    let count = common.trials.unwrap_or(10);
    let mut state: Option<BipartiteMultigraph> = None;
    for _ in 0..count {
        let g = match model {
            Model::Uniform => sample_uniform_simple(ctx.n, ctx.d, &mut rng),
            Model::Configuration => sample_configuration(ctx.n, ctx.d, &mut rng),
            Model::Switch => {
                let g = state.get_or_insert_with(|| sample_uniform_simple(ctx.n, ctx.d, &mut rng));
                run_chain(g, Chain::Simple, steps, &mut rng);
                g.clone()
            }
        };
        text.push_str(&to_json(&g));
        text.push('\n');
    }
    Ok(Output { text, passed: true })
}

fn enumerate(common: &Common, multigraph: bool) -> Result<Output> {
    let ctx = context("enumerate", common, (3, 2))?;
    let space = StateSpace::enumerate(ctx.n, ctx.d, !multigraph, common.cap)?;
    let mut text = ctx.json_header("exact");
    for (g, p) in space.states.iter().zip(&space.measure) {
        let line = json!({"graph": crate::graph::GraphJson::from(g), "measure": p.to_string()});
        text.push_str(&format!("{line}\n"));
    }
    Ok(Output { text, passed: true })
}

fn spectrum(common: &Common, space: SpaceArg) -> Result<Output> {
    let ctx = context("spectrum", common, (3, 2))?;
    let mut rng = ctx.rng();
    let restarts = common.trials.unwrap_or(MIN_RESTARTS);
    let kinds: &[bool] = match space {
        SpaceArg::Simple => &[true],
        SpaceArg::Multigraph => &[false],
        SpaceArg::Both => &[true, false],
    };
    let rows = kinds
        .iter()
        .map(|&simple| spectral_summary(ctx.n, ctx.d, simple, common.cap, restarts, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(Output { text: ctx.csv_header("exact") + &csv_body(&rows)?, passed: true })
}

#[derive(serde::Serialize)]
struct CurveRow {
    t: f64,
    tv: f64,
}

fn mixing(common: &Common, multigraph: bool, points: usize) -> Result<Output> {
    let ctx = context("mixing", common, (3, 2))?;
    let eps = common.eps.unwrap_or(0.25);
    if !(eps > 0.0 && eps < 1.0) {
        return Err(usage(format!("--eps must lie in (0, 1), got {eps}")));
    }
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let space = StateSpace::enumerate(ctx.n, ctx.d, !multigraph, common.cap)?;
    let mut chain = space.chain()?;
    let t_mix = chain.t_mix(eps)?;
    let t_rel = chain.spectrum().t_rel();
    let pi_min = chain.pi_min();
    let horizon = 2.0 * t_mix;
    let ts: Vec<f64> = (0..points).map(|k| horizon * k as f64 / (points - 1) as f64).collect();
    let rows: Vec<CurveRow> = chain.mixing_curve(None, &ts).into_iter().map(|(t, tv)| CurveRow { t, tv }).collect();
    let mut text = ctx.csv_header("exact");
    text.push_str(&format!(
        "# space={} states={} eps={eps} t_mix={t_mix} t_rel={t_rel} pi_min={pi_min}\n",
        space.label(),
        space.len()
    ));
    text.push_str(&csv_body(&rows)?);
    Ok(Output { text, passed: true })
}

fn verify(suite: &str, common: &Common, k: Option<usize>) -> Result<Output> {
    let suite: Suite = suite.parse()?;
    let ctx = context("verify", common, suite.default_size())?;
    let cfg = VerifyConfig {
        n: ctx.n,
        d: ctx.d,
        seed: ctx.seed,
        trials: common.trials.unwrap_or(100),
        cap: common.cap,
        k_max: k,
    };
    let rep = run_suite(suite, &cfg)?;
    let mut text = ctx.json_header(rep.mode);
    text.push_str(&serde_json::to_string(&rep).map_err(|e| Error::Parse(e.to_string()))?);
    text.push('\n');
    Ok(Output { text, passed: rep.passed() })
}

fn connect(common: &Common, k: usize, input: Option<&PathBuf>) -> Result<Output> {
    let ctx = context("connect", common, (30, 3))?;
    let mut rng = ctx.rng();
    let tuples = match input {
        Some(path) => {
            let raw = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            raw.lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    let tj: TupleJson = serde_json::from_str(l).map_err(|e| Error::Parse(e.to_string()))?;
                    tj.to_tuple()
                })
                .collect::<Result<Vec<_>>>()?
        }
        None => (0..common.trials.unwrap_or(100)).map(|_| sample_tuple(ctx.n, ctx.d, k, &mut rng)).collect::<Result<_>>()?,
    };
    let mut text = ctx.json_header(if input.is_some() { "input" } else { "sampled" });
    let mut passed = true;
    for (id, t) in tuples.iter().enumerate() {
        let line = match build_connection(t) {
            Ok(c) => {
                let r = validate_connection(t, &c.states);
                passed &= r.passed();
                json!({
                    "id": id,
                    "type": t.ttype.to_string(),
                    "length": r.length,
                    "lower_bound": r.lower_bound,
                    "upper_bound": r.upper_bound,
                    "blocks": c.blocks.len(),
                    "passed": r.passed(),
                    "failures": r.failures,
                })
            }
            Err(e) => {
                passed = false;
                json!({"id": id, "type": t.ttype.to_string(), "passed": false, "failures": [e.to_string()]})
            }
        };
        text.push_str(&format!("{line}\n"));
    }
    Ok(Output { text, passed })
}

#[derive(serde::Serialize)]
struct ExtendRow {
    graph_id: usize,
    branch: String,
    h: String,
    w: String,
    xi: f64,
    f_tilde: f64,
}

fn extend_cmd(common: &Common, levels: Option<u64>, samples: usize) -> Result<Output> {
    let ctx = context("extend", common, (3, 2))?;
    let mut rng = ctx.rng();
    let f: SimpleFn = match levels {
        Some(l) if l >= 1 => hashed(ctx.seed, l),
        Some(_) => return Err(usage("--levels must be positive")),
        None => edge_indicator(0, 0),
    };
    let (mode, ectx, graphs) = if common.exact {
        let space = StateSpace::enumerate(ctx.n, ctx.d, false, common.cap)?;
        ("exact", ExtensionContext::exact(ctx.n, ctx.d, f, common.cap)?, space.states)
    } else {
        let ectx = ExtensionContext::sampled(ctx.n, ctx.d, f, samples, &mut rng)?;
        let graphs = (0..common.trials.unwrap_or(20)).map(|_| sample_configuration(ctx.n, ctx.d, &mut rng)).collect();
        ("sampled", ectx, graphs)
    };
    let spec = GaussianFieldSpec::sample(ctx.n, ctx.d, &mut rng);
    let field = FieldSample::draw(&spec, &mut rng);
    let rows = graphs
        .iter()
        .enumerate()
        .map(|(graph_id, g)| {
            let e = extend(&ectx, &spec, &field, g)?;
            Ok(ExtendRow {
                graph_id,
                branch: e.branch.to_string(),
                h: e.h.as_ref().map(|x| x.to_string()).unwrap_or_default(),
                w: e.w.as_ref().map(|x| x.to_string()).unwrap_or_default(),
                xi: e.xi,
                f_tilde: e.value(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut text = ctx.csv_header(mode);
    text.push_str(&format!(
        "# mean={} blow_up={} simple_mass={} ({})\n",
        ectx.mean,
        ectx.blow_up.holds,
        ectx.simple_mass.value,
        ectx.simple_mass.mode()
    ));
    text.push_str(&csv_body(&rows)?);
    Ok(Output { text, passed: true })
}

#[derive(serde::Serialize)]
struct RatioRow {
    trial: usize,
    dirichlet_ratio: f64,
    variance_ratio: f64,
}

fn compare(common: &Common, levels: Option<u64>) -> Result<Output> {
    let ctx = context("compare", common, (3, 2))?;
    let mut rng = ctx.rng();
    let source = match levels {
        Some(l) if l >= 2 => FunctionSource::Random { levels: l },
        Some(_) => return Err(usage("--levels must be at least 2")),
        None => FunctionSource::EdgeIndicator,
    };
    let rep = comparison_experiment(ctx.n, ctx.d, source, common.trials.unwrap_or(100), common.cap, &mut rng)?;
    let mut text = ctx.csv_header("exact");
    text.push_str(&format!(
        "# trials={} excluded={} poincare={} max_rayleigh={} c_prime={} rayleigh_below_poincare={}\n",
        rep.trials, rep.excluded, rep.poincare, rep.max_rayleigh, rep.c_prime, rep.rayleigh_below_poincare
    ));
    let tails: Vec<String> = rep.variance_tail.iter().map(|(t, f)| format!("P[ratio>={t}]={f}")).collect();
    text.push_str(&format!("# {}\n", tails.join(" ")));
    let rows: Vec<RatioRow> = rep
        .ratios
        .iter()
        .enumerate()
        .map(|(trial, &(dirichlet_ratio, variance_ratio))| RatioRow { trial, dirichlet_ratio, variance_ratio })
        .collect();
    text.push_str(&csv_body(&rows)?);
    Ok(Output { text, passed: rep.rayleigh_below_poincare })
}

fn dispatch(cli: &Cli) -> Result<(Output, Option<PathBuf>)> {
    let (out, path) = match &cli.command {
        Command::Sample { common, model, steps } => (sample(common, *model, *steps)?, &common.out),
        Command::Enumerate { common, multigraph } => (enumerate(common, *multigraph)?, &common.out),
        Command::Spectrum { common, space } => (spectrum(common, *space)?, &common.out),
        Command::Mixing { common, multigraph, points } => (mixing(common, *multigraph, *points)?, &common.out),
        Command::Verify { suite, common, k } => (verify(suite, common, *k)?, &common.out),
        Command::Connect { common, k, input } => (connect(common, *k, input.as_ref())?, &common.out),
        Command::Extend { common, levels, samples } => (extend_cmd(common, *levels, *samples)?, &common.out),
        Command::Compare { common, levels } => (compare(common, *levels)?, &common.out),
    };
    Ok((out, path.clone()))
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::TooLargeToEnumerate { .. } | Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_FAILED,
    }
}

/// Runs the command line `argv` (including the program name), writing results to `stdout`
/// or to the `--out` file and diagnostics to `stderr`. Returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok((out, path)) => {
            let written = match path {
                Some(p) => std::fs::write(&p, out.text.as_bytes()).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => stdout.write_all(out.text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                let _ = writeln!(stderr, "error: {msg}");
                return EXIT_FAILED;
            }
            if out.passed {
                EXIT_OK
            } else {
                let _ = writeln!(stderr, "one or more checks failed");
                EXIT_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Runs `argv` against the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
