use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gwishart::experiments::{self, Centering, IrisConfig};
use gwishart::formats::{self, format_matrix_csv, format_number, load_graph, load_matrix};
use gwishart::{selfcheck, Error};
use gwishart_core::completion::{pd_complete, CompletionOptions};
use gwishart_core::constants::{chordal_constant, roverato_estimate};
use gwishart_core::fourier::{fourier_constant, QuadratureConfig};
use gwishart_core::montecarlo::mc_constant;
use gwishart_core::{Graph, SymmetricMatrix};

#[derive(Parser)]
#[command(name = "gwishart", version, about = "G-Wishart normalising constants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Log normalising constant of one graph.
    Constant(ConstantArgs),
    /// PD-completion of a scale matrix with respect to a graph.
    Complete(CompleteArgs),
    /// True and approximate 4-cycle ratios for delta = 1..delta-max.
    RatioFigure {
        #[arg(long, default_value_t = 10)]
        delta_max: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact, conjectured and Monte Carlo constants of the three Iris 4-cycles.
    IrisTable {
        #[command(flatten)]
        iris: IrisArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo replicates of the Iris 4-cycles with reference lines.
    McViolin {
        #[command(flatten)]
        iris: IrisArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Number of replicates; seeds run from 1 to this value.
        #[arg(long, default_value_t = 200)]
        seeds: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Runs the built-in identity checks.
    Selfcheck,
}

#[derive(Args)]
struct OutputArgs {
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print numbers at full precision instead of six significant digits.
    #[arg(long)]
    full_precision: bool,
}

#[derive(Args)]
struct IrisArgs {
    /// Data CSV with a header and four columns (SL, SW, PL, PW); defaults to the bundled data.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Scatter convention. Without it, `iris-table` uses whichever reproduces the reference values.
    #[arg(long)]
    centering: Option<Centering>,
    /// Prior shape parameter.
    #[arg(long, default_value_t = 3.0)]
    delta: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Chordal,
    Fourier,
    Mc,
    Roverato,
}

#[derive(Args)]
struct ConstantArgs {
    /// Graph file or inline graph such as `n:4;edges:1-2,2-3,3-4,4-1`.
    #[arg(long)]
    graph: Option<String>,
    /// Chordal supergraph for the Fourier method.
    #[arg(long)]
    gstar: Option<String>,
    /// Edge of `--gstar` left out, as `μ-ν`.
    #[arg(long)]
    drop_edge: Option<String>,
    #[arg(long)]
    delta: f64,
    /// Matrix CSV, or `identity`.
    #[arg(long, default_value = "identity")]
    scale: String,
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompleteArgs {
    #[arg(long)]
    graph: String,
    #[arg(long)]
    scale: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

/// A run that finished but whose results missed a tolerance.
#[derive(Debug)]
struct ToleranceFailure(String);

impl std::fmt::Display for ToleranceFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ToleranceFailure {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<ToleranceFailure>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Constant(args) => constant(args),
        Command::Complete(args) => complete(args),
        Command::RatioFigure { delta_max, output } => {
            let rows = experiments::figure1_table(delta_max)?;
            emit(&output, &experiments::ratio_csv(&rows, output.full_precision)?)
        }
        Command::IrisTable { iris, samples, seed, output } => iris_table(iris, samples, seed, output),
        Command::McViolin { iris, samples, seeds, output } => {
            let cfg = iris_config(&iris, iris.centering.unwrap_or(Centering::Centered))?;
            let seeds: Vec<u64> = (1..=seeds).collect();
            let rows = experiments::violin_data(&cfg, &seeds, samples)?;
            emit(&output, &experiments::violin_csv(&rows, output.full_precision)?)
        }
        Command::Selfcheck => {
            let checks = selfcheck::run_all()?;
            for c in &checks {
                println!("{c}");
            }
            match checks.iter().filter(|c| !c.passed).count() {
                0 => Ok(()),
                failed => Err(ToleranceFailure(format!("{failed} check(s) failed")).into()),
            }
        }
    }
}

fn emit(output: &OutputArgs, text: &str) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_scale(arg: &str, n: usize) -> anyhow::Result<SymmetricMatrix> {
    if arg == "identity" {
        return Ok(SymmetricMatrix::identity(n));
    }
    let m = load_matrix(arg).with_context(|| format!("reading scale {arg}"))?;
    if m.dim() != n {
        bail!("scale is {}x{} but the graph has {n} vertices", m.dim(), m.dim());
    }
    Ok(m)
}

/// A chordal supergraph with one extra edge, from `--gstar/--drop-edge` or found from `--graph`.
fn fourier_pair(args: &ConstantArgs) -> anyhow::Result<(Graph, (usize, usize))> {
    match (&args.gstar, &args.drop_edge, &args.graph) {
        (Some(gstar), Some(edge), _) => {
            let g_star = load_graph(gstar)?;
            let e = formats::parse_edge(edge, g_star.n())?;
            Ok((g_star, e))
        }
        (None, None, Some(graph)) => single_chord(&load_graph(graph)?),
        _ => bail!("the fourier method needs --gstar with --drop-edge, or --graph"),
    }
}

fn single_chord(g: &Graph) -> anyhow::Result<(Graph, (usize, usize))> {
    for (u, v) in g.non_edges() {
        let g_star = g.with_edge(u, v)?;
        if g_star.is_chordal() {
            return Ok((g_star, (u, v)));
        }
    }
    bail!("no single added edge makes this graph chordal")
}

fn constant(args: ConstantArgs) -> anyhow::Result<()> {
    let quad = QuadratureConfig::default();
    let (log_value, std_error) = match args.method {
        Method::Fourier => {
            let (g_star, e) = fourier_pair(&args)?;
            let scale = load_scale(&args.scale, g_star.n())?;
            (fourier_constant(&g_star, e, args.delta, &scale, &quad)?.log_magnitude(), None)
        }
        method => {
            let g = load_graph(args.graph.as_deref().context("--graph is required")?)?;
            let scale = load_scale(&args.scale, g.n())?;
            match method {
                Method::Chordal => (chordal_constant(&g, args.delta, &scale)?.log_magnitude(), None),
                Method::Mc => {
                    let est = mc_constant(&g, args.delta, &scale, args.samples, args.seed)?;
                    (est.log_value, Some(est.std_error))
                }
                _ => {
                    let identity = SymmetricMatrix::identity(g.n());
                    let c_identity = if g.is_chordal() {
                        chordal_constant(&g, args.delta, &identity)?
                    } else {
                        let (g_star, e) = single_chord(&g)?;
                        fourier_constant(&g_star, e, args.delta, &identity, &quad)?
                    };
                    (roverato_estimate(&g, args.delta, &scale, c_identity)?.log_magnitude(), None)
                }
            }
        }
    };
    let method = args.method.to_possible_value().expect("no skipped variants").get_name().to_owned();
    let full = args.output.full_precision;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "log_value", "std_error"])?;
    w.write_record([
        method,
        format_number(log_value, full),
        std_error.map(|s| format_number(s, full)).unwrap_or_default(),
    ])?;
    emit(&args.output, &String::from_utf8(w.into_inner()?)?)
}

fn complete(args: CompleteArgs) -> anyhow::Result<()> {
    let g = load_graph(&args.graph)?;
    let scale = load_scale(&args.scale.to_string_lossy(), g.n())?;
    let result = pd_complete(&scale, &g, CompletionOptions::default())?;
    emit(&args.output, &format_matrix_csv(&result.completed, args.output.full_precision)?)?;
    eprintln!("residual,iterations\n{:e},{}", result.residual, result.iterations);
    Ok(())
}

fn iris_config(iris: &IrisArgs, centering: Centering) -> anyhow::Result<IrisConfig> {
    let mut cfg = match &iris.data {
        Some(path) => IrisConfig::from_csv(
            &std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        )?,
        None => IrisConfig::vendored(),
    };
    cfg.delta_prior = iris.delta;
    cfg.centering = centering;
    Ok(cfg)
}

fn iris_table(iris: IrisArgs, samples: usize, seed: u64, output: OutputArgs) -> anyhow::Result<()> {
    let mut cfg = iris_config(&iris, Centering::Centered)?;
    cfg.samples = samples;
    cfg.seed = seed;
    let (centering, rows) = match iris.centering {
        Some(c) => (c, experiments::iris_table(&cfg.with_centering(c))?),
        None => match experiments::resolve_iris_table(&cfg) {
            Ok(found) => found,
            Err(Error::TableMismatch { centered, uncentered }) => {
                eprintln!("centered scatter matrix:\n{}", format_matrix_csv(&centered, true)?);
                eprintln!("uncentered scatter matrix:\n{}", format_matrix_csv(&uncentered, true)?);
                return Err(ToleranceFailure("reference values not reproduced under either convention".into()).into());
            }
            Err(e) => return Err(e.into()),
        },
    };
    emit(&output, &experiments::iris_csv(&rows, centering, output.full_precision)?)?;
    let disagreeing: Vec<&str> = rows.iter().filter(|r| !r.mc_agrees()).map(|r| r.graph_id.as_str()).collect();
    if !disagreeing.is_empty() {
        return Err(
            ToleranceFailure(format!("Monte Carlo outside 3 standard errors for {}", disagreeing.join(", "))).into()
        );
    }
    Ok(())
}
