use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use rn_topo::plan::{
    parse_plan, run_plan, ClassifyTask, CoreTask, ExpandTask, ExperimentPlan, ExploreTask, MeasureDescriptor, MtpTask,
    PointDescriptor, RunReport, SystemDescriptor, Task, TreeTask, WalkTask,
};
use rn_topo::transport::{Convention, KernelKind};
use rn_topo::weight::{parse_ratio, Weight};

/// Topography of measured acyclic graphs on symbolic systems.
#[derive(Parser)]
#[command(name = "rn-topo", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed for stochastic tasks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Vertex budget for explorations.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Exploration depth (levels for `expand`, probe depth for `core`).
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Output prefix; writes `<out>.json` and `<out>.csv`.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Worker threads for the mass-transport engine.
    #[arg(long, global = true, env = "RN_TOPO_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a JSON experiment plan.
    Run { plan: PathBuf },
    /// Ball, back-orbit masses and forward trace around a point.
    Explore {
        #[command(flatten)]
        at: At,
        /// Also explore the ball of this radius.
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Forward, back and core status of a point.
    Classify {
        #[command(flatten)]
        at: At,
        #[arg(long)]
        threshold: Option<String>,
    },
    /// Truncated Radon–Nikodym core with re-verified exclusions.
    Core {
        #[command(flatten)]
        at: At,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long)]
        threshold: Option<String>,
    },
    /// Monte Carlo estimate of both sides of the mass-transport principle.
    Mtp {
        /// System descriptor, JSON.
        #[arg(long)]
        system: String,
        /// `zero`, `forward-indicator`, `inverse-mass` or a JSON kernel.
        #[arg(long, default_value = "forward-indicator")]
        kernel: String,
        /// Horizon for the inverse-mass kernel.
        #[arg(long, default_value_t = 32)]
        horizon: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Sampling measure descriptor, JSON; the system's own by default.
        #[arg(long)]
        measure: Option<String>,
        /// Weight mass by the cocycle on the receiving side.
        #[arg(long)]
        opposite: bool,
        /// Summarize `ρ^x(f^{-1}(x))` instead of estimating a kernel.
        #[arg(long)]
        balance: bool,
    },
    /// Finite-tree combinatorics on a tree file.
    Tree {
        file: PathBuf,
        /// Start vertex of the lex-least path to the marked set.
        #[arg(long)]
        from: Option<u32>,
        /// Mass bound for pruning around the marked set.
        #[arg(long)]
        bound: Option<String>,
    },
    /// Boundary points of random walks on a free group.
    ///
    /// A walk is stopped once its reduced prefix of length `min-len` has
    /// been stable for `window` steps. To calibrate the window, run a pilot
    /// at increasing windows and keep the smallest one after which the
    /// first-letter frequencies stop moving.
    Walk {
        #[arg(long, default_value_t = 2)]
        d: u8,
        /// Step law as JSON, e.g. {"a":"1/3","A":"1/3","b":"1/6","B":"1/6"}.
        #[arg(long)]
        m: Option<String>,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 64)]
        window: u64,
        #[arg(long, default_value_t = 2)]
        min_len: usize,
        #[arg(long, default_value_t = 1 << 20)]
        max_steps: u64,
    },
    /// Tilde-expansion retraction bounds and added masses.
    Expand {
        /// Tilde-expansion system descriptor, JSON.
        #[arg(long)]
        system: String,
        /// Base points as JSON point descriptors; repeatable.
        #[arg(long = "point")]
        points: Vec<String>,
        /// Number of points sampled from the base measure.
        #[arg(long, default_value_t = 0)]
        samples: u64,
    },
}

#[derive(Args)]
struct At {
    /// System descriptor, JSON, e.g. {"type":"odometer","p":"2/3"}.
    #[arg(long)]
    system: String,
    /// Point descriptor, JSON, e.g. {"prefix":"0110","period":"001"}.
    #[arg(long)]
    point: String,
}

type Usage = String;

fn json<T: DeserializeOwned>(flag: &str, text: &str) -> Result<T, Usage> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        if path.is_empty() || path == "." {
            format!("--{flag}: {}", e.inner())
        } else {
            format!("--{flag}: {path}: {}", e.inner())
        }
    })
}

fn ratio(flag: &str, text: &Option<String>) -> Result<Option<num_rational::BigRational>, Usage> {
    text.as_deref().map(|t| parse_ratio(t).map_err(|e| format!("--{flag}: {e}"))).transpose()
}

fn kernel(text: &str, horizon: usize) -> Result<KernelKind, Usage> {
    Ok(match text {
        "zero" => KernelKind::Zero,
        "forward-indicator" => KernelKind::ForwardIndicator,
        "inverse-mass" => KernelKind::InverseMass { horizon },
        _ => json("kernel", text)?,
    })
}

fn system_and_point(at: &At) -> Result<(SystemDescriptor, PointDescriptor), Usage> {
    Ok((json("system", &at.system)?, json("point", &at.point)?))
}

fn seed(common: &Common) -> Result<u64, Usage> {
    common.seed.ok_or_else(|| "--seed is required for stochastic tasks".into())
}

fn task(command: &Command, c: &Common) -> Result<Task, Usage> {
    let out = c.out.clone();
    Ok(match command {
        Command::Run { .. } => unreachable!(),
        Command::Explore { at, radius } => {
            let (system, point) = system_and_point(at)?;
            Task::Explore(ExploreTask {
                system,
                point,
                depth: c.depth.unwrap_or(16),
                radius: *radius,
                budget: c.budget,
                out,
            })
        }
        Command::Classify { at, threshold } => {
            let (system, point) = system_and_point(at)?;
            Task::Classify(ClassifyTask {
                system,
                point,
                depth: c.depth,
                core_radius: None,
                threshold: ratio("threshold", threshold)?,
                probe_depth: None,
                odometer_horizon: None,
                budget: c.budget,
                out,
            })
        }
        Command::Core { at, radius, threshold } => {
            let (system, point) = system_and_point(at)?;
            Task::Core(CoreTask {
                system,
                point,
                radius: *radius,
                threshold: ratio("threshold", threshold)?,
                probe_depth: c.depth,
                budget: c.budget,
                out,
            })
        }
        Command::Mtp {
            system,
            kernel: k,
            horizon,
            samples,
            measure,
            opposite,
            balance,
        } => Task::Mtp(MtpTask {
            system: json("system", system)?,
            measure: measure.as_deref().map(|m| json::<MeasureDescriptor>("measure", m)).transpose()?,
            kernel: kernel(k, *horizon)?,
            convention: if *opposite { Convention::Opposite } else { Convention::Standard },
            balance: *balance,
            samples: *samples,
            seed: seed(c)?,
            chunk_size: None,
            budget: c.budget,
            out,
        }),
        Command::Tree { file, from, bound } => Task::Tree(TreeTask {
            file: Some(file.display().to_string()),
            document: None,
            from: *from,
            bound: bound
                .as_deref()
                .map(|b| b.parse::<Weight>().map_err(|e| format!("--bound: {e}")))
                .transpose()?,
            out,
        }),
        Command::Walk {
            d,
            m,
            samples,
            window,
            min_len,
            max_steps,
        } => Task::Walk(WalkTask {
            d: *d,
            m: m.as_deref().map(|m| json("m", m)).transpose()?,
            samples: *samples,
            seed: seed(c)?,
            window: *window,
            min_len: *min_len,
            max_steps: *max_steps,
            out,
        }),
        Command::Expand { system, points, samples } => Task::Expand(ExpandTask {
            system: json("system", system)?,
            points: points.iter().map(|p| json("point", p)).collect::<Result<_, _>>()?,
            samples: *samples,
            seed: if *samples > 0 { Some(seed(c)?) } else { c.seed },
            levels: c.depth.unwrap_or(10),
            budget: c.budget,
            out,
        }),
    })
}

fn load_plan(path: &Path) -> Result<ExperimentPlan, Usage> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_plan(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn report(r: &RunReport) -> ExitCode {
    for t in &r.tasks {
        if let Some(e) = &t.error {
            eprintln!("task {} ({}) failed: {e}", t.index, t.kind);
        }
    }
    let text = serde_json::to_string_pretty(r).expect("reports serialize");
    // a closed pipe is not a task failure
    let _ = writeln!(std::io::stdout(), "{text}");
    if r.success() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("rn-topo: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let (plan, base_dir) = match &cli.command {
        Command::Run { plan } => {
            let base = plan.parent().map(Path::to_path_buf).unwrap_or_default();
            (load_plan(plan), base)
        }
        command => {
            let plan = task(command, &cli.common).and_then(|t| {
                t.validate().map_err(|(field, message)| format!("{field}: {message}"))?;
                Ok(ExperimentPlan { tasks: vec![t] })
            });
            (plan, PathBuf::from("."))
        }
    };
    match plan {
        Ok(plan) => report(&run_plan(&plan, &base_dir)),
        Err(e) => {
            eprintln!("rn-topo: {e}");
            ExitCode::from(2)
        }
    }
}
