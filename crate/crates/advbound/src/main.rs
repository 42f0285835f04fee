//! Command-line front end: enumerate conflict hypergraphs, solve single
//! cells, sweep risk curves, and evaluate the robust classifier.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use advbound::{
    build_hypergraph_with_limit, classify, load_dataset, read_solution, sweep, sweep_parallel,
    write_curve_csv, write_solution, CsvFormat, Error, LabeledDataset, LossSpec, Metric,
    PackingProblem, PotentialSet, Result, RunConfig, SolutionRecord, SolveMeta, SolverTolerances,
    WarmStart, DEFAULT_EDGE_LIMIT, DEFAULT_WARM_START_THETA,
};

#[derive(Parser)]
#[command(
    name = "advbound",
    version,
    about = "Certified lower bounds on adversarial risk, and the classifiers that attain them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand that ingests a dataset CSV.
#[derive(Args)]
struct DataArgs {
    /// Dataset CSV: one `label,x1,...,xd` row per point
    #[arg(long)]
    data: PathBuf,
    /// Treat the last CSV column as a point weight instead of a coordinate
    #[arg(long)]
    weighted: bool,
}

impl DataArgs {
    fn load(&self) -> Result<LabeledDataset> {
        let format = if self.weighted {
            CsvFormat::Weighted
        } else {
            CsvFormat::Plain
        };
        load_dataset(&self.data, format)
    }
}

#[derive(Args)]
struct ToleranceArgs {
    /// Optimality certificate target (max KKT violation)
    #[arg(long, default_value_t = SolverTolerances::default().kkt_tol)]
    kkt_tol: f64,
    /// Duality gap target
    #[arg(long, default_value_t = SolverTolerances::default().gap_tol)]
    gap_tol: f64,
}

impl ToleranceArgs {
    fn tolerances(&self) -> SolverTolerances {
        SolverTolerances {
            kkt_tol: self.kkt_tol,
            gap_tol: self.gap_tol,
            ..SolverTolerances::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the conflict hypergraph at one perturbation radius
    Hypergraph {
        #[command(flatten)]
        data: DataArgs,
        /// Distance: euclidean or chebyshev
        #[arg(long, value_parser = parse_metric)]
        metric: Metric,
        /// Perturbation radius (each point owns a closed ball of this radius)
        #[arg(long)]
        epsilon: f64,
        /// Largest conflicting tuple size to enumerate (>= 2)
        #[arg(long)]
        cap: usize,
        /// Also write the edge list as CSV
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Abort with a resource-limit error beyond this many edges
        #[arg(long, default_value_t = DEFAULT_EDGE_LIMIT)]
        edge_limit: usize,
    },
    /// Solve one (epsilon, alpha) cell and store the dual solution
    Solve {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_parser = parse_metric)]
        metric: Metric,
        #[arg(long)]
        epsilon: f64,
        /// Loss parameter: a number >= 0, or the tokens CE / ZERO_ONE
        #[arg(long, value_parser = parse_alpha)]
        alpha: f64,
        #[arg(long)]
        cap: usize,
        /// Output JSON path for the dual solution
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tols: ToleranceArgs,
    },
    /// Sweep an (epsilon, alpha) grid and write the risk curve as CSV
    Curve {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_parser = parse_metric)]
        metric: Metric,
        /// Grid `start:stop:step` (inclusive) or comma-separated values
        #[arg(long, value_parser = parse_epsilons)]
        epsilons: EpsilonGrid,
        /// Comma-separated alpha values and/or CE, ZERO_ONE tokens
        #[arg(long, value_parser = parse_alphas)]
        alphas: AlphaList,
        #[arg(long)]
        cap: usize,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Solve the alpha slices on separate threads
        #[arg(long)]
        parallel: bool,
        /// Warm-start blend toward the uniform point, in (0,1)
        #[arg(long, default_value_t = DEFAULT_WARM_START_THETA)]
        theta: f64,
        #[command(flatten)]
        tols: ToleranceArgs,
    },
    /// Evaluate the optimal robust classifier at query points
    Classify {
        /// Dual solution JSON produced by `solve`
        #[arg(long)]
        solution: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Query CSV: one `x1,...,xd` row per query
        #[arg(long)]
        queries: PathBuf,
        /// Loss: ce, zero_one, alpha:<value>, or quadratic
        #[arg(long, value_parser = parse_loss)]
        loss: LossSpec,
        /// Output CSV path (`query_id,f_0,...,f_{K-1},Z`)
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_metric(s: &str) -> std::result::Result<Metric, String> {
    match s.to_ascii_lowercase().as_str() {
        "euclidean" => Ok(Metric::Euclidean),
        "chebyshev" => Ok(Metric::Chebyshev),
        other => Err(format!(
            "unknown metric '{other}' (expected euclidean or chebyshev)"
        )),
    }
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    match s.to_ascii_uppercase().as_str() {
        "CE" => Ok(1.0),
        "ZERO_ONE" => Ok(0.0),
        _ => {
            let v: f64 = s
                .parse()
                .map_err(|_| format!("'{s}' is not an alpha value (number, CE, or ZERO_ONE)"))?;
            if v.is_finite() && v >= 0.0 {
                Ok(v)
            } else {
                Err(format!("alpha must be finite and nonnegative, got {v}"))
            }
        }
    }
}

#[derive(Clone)]
struct AlphaList(Vec<f64>);

fn parse_alphas(s: &str) -> std::result::Result<AlphaList, String> {
    let values = s
        .split(',')
        .map(|tok| parse_alpha(tok.trim()))
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    if values.is_empty() {
        return Err("alpha list is empty".into());
    }
    Ok(AlphaList(values))
}

#[derive(Clone)]
struct EpsilonGrid(Vec<f64>);

fn parse_epsilons(s: &str) -> std::result::Result<EpsilonGrid, String> {
    let parse_one = |tok: &str| -> std::result::Result<f64, String> {
        tok.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{tok}' is not a number"))
    };
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("'{s}' is not of the form start:stop:step"));
        }
        let start = parse_one(parts[0])?;
        let stop = parse_one(parts[1])?;
        let step = parse_one(parts[2])?;
        if !(step > 0.0) {
            return Err(format!("grid step must be positive, got {step}"));
        }
        if stop < start {
            return Err(format!("grid stop {stop} is below start {start}"));
        }
        let mut grid = Vec::new();
        let mut i = 0u32;
        loop {
            let v = start + f64::from(i) * step;
            // half-step slack so `0:4:0.25` lands exactly on 4
            if v > stop + 0.5 * step {
                break;
            }
            grid.push(v.min(stop));
            i += 1;
        }
        grid
    } else {
        s.split(',')
            .map(parse_one)
            .collect::<std::result::Result<Vec<f64>, String>>()?
    };
    if values.is_empty() {
        return Err("epsilon grid is empty".into());
    }
    Ok(EpsilonGrid(values))
}

fn parse_loss(s: &str) -> std::result::Result<LossSpec, String> {
    let lower = s.to_ascii_lowercase();
    match lower.as_str() {
        "ce" | "cross_entropy" => Ok(LossSpec::CrossEntropy),
        "zero_one" | "zero-one" | "01" => LossSpec::alpha_log(0.0).map_err(|e| e.to_string()),
        "quadratic" | "quad" => Ok(LossSpec::Quadratic),
        _ => {
            if let Some(rest) = lower.strip_prefix("alpha:") {
                let v = parse_alpha(rest)?;
                LossSpec::alpha_log(v).map_err(|e| e.to_string())
            } else {
                Err(format!(
                    "unknown loss '{s}' (expected ce, zero_one, alpha:<value>, or quadratic)"
                ))
            }
        }
    }
}

/// Reads a headerless CSV of numeric rows.
fn load_queries(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row: std::result::Result<Vec<f64>, _> =
            record.iter().map(|field| field.parse::<f64>()).collect();
        match row {
            Ok(values) => rows.push(values),
            Err(e) => {
                return Err(Error::MalformedRow {
                    row: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "query file {} has no rows",
            path.display()
        )));
    }
    Ok(rows)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Hypergraph {
            data,
            metric,
            epsilon,
            cap,
            dump,
            edge_limit,
        } => {
            let dataset = data.load()?;
            let graph = build_hypergraph_with_limit(&dataset, metric, epsilon, cap, edge_limit)?;
            let mut size_counts = std::collections::BTreeMap::new();
            for edge in &graph.edges {
                *size_counts.entry(edge.size()).or_insert(0usize) += 1;
            }
            println!(
                "{} points, {} classes, {} variables",
                dataset.len(),
                dataset.class_count(),
                graph.var_count()
            );
            println!("{} edges at epsilon {epsilon}:", graph.edge_count());
            for (size, count) in size_counts {
                println!("  size {size}: {count}");
            }
            if let Some(path) = dump {
                graph.write_edges_csv(&path)?;
                println!("edge list written to {}", path.display());
            }
        }
        Command::Solve {
            data,
            metric,
            epsilon,
            alpha,
            cap,
            out,
            tols,
        } => {
            let dataset = data.load()?;
            let graph = advbound::build_hypergraph(&dataset, metric, epsilon, cap)?;
            let problem = PackingProblem::from_hypergraph(&graph, &dataset, alpha)?;
            let warm: Option<&WarmStart> = None;
            let solution = advbound::solve(&problem, &tols.tolerances(), warm)?;
            let record = SolutionRecord::new(
                &solution,
                &graph.index,
                SolveMeta {
                    alpha,
                    epsilon,
                    metric,
                    interaction_cap: cap,
                },
            );
            write_solution(&record, &out)?;
            println!(
                "risk lower bound {:.9} (kkt residual {:.3e}, {} newton iterations, {} edges)",
                solution.risk_lower_bound,
                solution.kkt_residual,
                solution.newton_iters,
                graph.edge_count()
            );
            println!("solution written to {}", out.display());
        }
        Command::Curve {
            data,
            metric,
            epsilons,
            alphas,
            cap,
            out,
            parallel,
            theta,
            tols,
        } => {
            let dataset = data.load()?;
            let config = RunConfig {
                metric,
                epsilon_grid: epsilons.0,
                alpha_list: alphas.0,
                interaction_cap: cap,
                tolerances: tols.tolerances(),
                warm_start_theta: theta,
            };
            let curve = if parallel {
                sweep_parallel(&dataset, &config)?
            } else {
                sweep(&dataset, &config)?
            };
            write_curve_csv(&curve, &out)?;
            println!("{} rows written to {}", curve.rows.len(), out.display());
        }
        Command::Classify {
            solution,
            data,
            queries,
            loss,
            out,
        } => {
            let record = read_solution(&solution)?;
            let dataset = data.load()?;
            let potentials = PotentialSet::from_solution(&record, &dataset)?;
            let query_rows = load_queries(&queries)?;
            let k = dataset.class_count();

            let file = std::fs::File::create(&out)?;
            let mut writer = csv::Writer::from_writer(std::io::BufWriter::new(file));
            let mut header = vec!["query_id".to_string()];
            header.extend((0..k).map(|i| format!("f_{i}")));
            header.push("Z".to_string());
            writer.write_record(&header)?;

            for (i, query) in query_rows.iter().enumerate() {
                let output = classify(&potentials, &loss, query).map_err(|e| match e {
                    Error::UnreachableQuery { .. } => Error::UnreachableQuery { query: i },
                    other => other,
                })?;
                let mut record = vec![format!("{i}")];
                record.extend(output.f.iter().map(|v| format!("{v}")));
                record.push(
                    output
                        .normalizer
                        .map(|z| format!("{z}"))
                        .unwrap_or_default(),
                );
                writer.write_record(&record)?;
            }
            writer.flush()?;
            println!(
                "{} predictions written to {}",
                query_rows.len(),
                out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
