use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cha_core::complexity::{Family, Space};
use cha_core::pipeline::{
    self, OutputFormat, SolutionCache, SweepConfig, TableId, default_golden_path, load_golden, reproduce_table,
    run_sweep,
};
use cha_core::radial::QuantumState;
use cha_core::{Error, Result};

/// Information measures and complexities of the hydrogen atom inside an
/// impenetrable spherical cavity.
#[derive(Parser, Debug)]
#[command(name = "cha", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every state at every radius and write the complexities.
    Sweep(SweepArgs),
    /// Recompute a published table and report per-cell deviations.
    Table(TableArgs),
    /// Print all measures and complexities of one state at one radius.
    Single(SingleArgs),
}

#[derive(Args, Debug)]
struct Numerics {
    /// Rényi order in position space.
    #[arg(long, env = "CHA_ALPHA", default_value_t = cha_core::measures::DEFAULT_ALPHA)]
    alpha: f64,
    /// Rényi order in momentum space.
    #[arg(long, env = "CHA_BETA", default_value_t = cha_core::measures::DEFAULT_BETA)]
    beta: f64,
    /// Initial collocation grid size of the eigensolver.
    #[arg(long, env = "CHA_GRID_POINTS")]
    grid_points: Option<usize>,
    /// Initial momentum cutoff, bohr^-1.
    #[arg(long, env = "CHA_PMAX")]
    pmax: Option<f64>,
    /// Keep the momentum cutoff fixed instead of raising it until the tail is negligible.
    #[arg(long, env = "CHA_NO_AUTO_RAISE")]
    no_auto_raise: bool,
    /// Worker threads.
    #[arg(long, env = "CHA_THREADS")]
    threads: Option<usize>,
    /// Directory for the persistent solution cache.
    #[arg(long, env = "CHA_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated state labels.
    #[arg(long, env = "CHA_STATES", value_delimiter = ',', default_value = "1s,2s,2p,3s,3p,3d,4f,5g")]
    states: Vec<String>,
    /// Radii as a comma-separated list; `start:stop:step` expands to a range.
    #[arg(long, env = "CHA_RC", value_delimiter = ',', required = true)]
    rc: Vec<String>,
    /// Scaling parameters b.
    #[arg(long, env = "CHA_B", value_delimiter = ',', default_values_t = cha_core::complexity::DEFAULT_B_VALUES)]
    b: Vec<f64>,
    /// csv or json.
    #[arg(long, env = "CHA_FORMAT", default_value = "csv")]
    format: String,
    /// Output file; standard output when absent.
    #[arg(long, env = "CHA_OUT")]
    out: Option<PathBuf>,
    /// Emit gnuplot blocks for one curve instead, as FAMILY:SPACE:B (e.g. ES:r:1).
    #[arg(long)]
    plot: Option<String>,
    #[command(flatten)]
    numerics: Numerics,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// I, II, III, IV, III_ref or all.
    which: String,
    /// Golden table CSV.
    #[arg(long, env = "CHA_GOLDEN")]
    golden: Option<PathBuf>,
    #[command(flatten)]
    numerics: Numerics,
}

#[derive(Args, Debug)]
struct SingleArgs {
    /// State label such as 2p.
    #[arg(long, env = "CHA_STATE")]
    state: String,
    /// Cavity radius, bohr.
    #[arg(long, env = "CHA_RC")]
    rc: f64,
    #[arg(long, env = "CHA_B", value_delimiter = ',', default_values_t = cha_core::complexity::DEFAULT_B_VALUES)]
    b: Vec<f64>,
    #[command(flatten)]
    numerics: Numerics,
}

fn parse_states(labels: &[String]) -> Result<Vec<QuantumState>> {
    labels.iter().map(|s| s.parse()).collect()
}

fn parse_radii(items: &[String]) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("invalid radius {s:?}")))
    };
    let mut out = Vec::new();
    for item in items {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(num(x)?),
            [a, b, h] => {
                let (a, b, h) = (num(a)?, num(b)?, num(h)?);
                if !(h > 0.0) || b < a {
                    return Err(Error::Config(format!("invalid radius range {item:?}")));
                }
                let steps = ((b - a) / h + 1e-9).floor() as usize;
                out.extend((0..=steps).map(|k| a + k as f64 * h));
            }
            _ => return Err(Error::Config(format!("invalid radius {item:?}"))),
        }
    }
    Ok(out)
}

fn base_config(n: &Numerics) -> SweepConfig {
    let mut cfg = SweepConfig {
        alpha: n.alpha,
        beta: n.beta,
        threads: n.threads,
        ..SweepConfig::default()
    };
    if let Some(g) = n.grid_points {
        cfg.solver.grid_points = g;
        cfg.solver.max_grid_points = cfg.solver.max_grid_points.max(4 * g);
    }
    cfg.momentum.p_max = n.pmax;
    cfg.momentum.auto_raise = !n.no_auto_raise;
    cfg
}

fn open_cache(n: &Numerics) -> Result<SolutionCache> {
    match &n.cache_dir {
        Some(dir) => SolutionCache::with_dir(dir),
        None => Ok(SolutionCache::in_memory()),
    }
}

fn parse_plot(spec: &str) -> Result<(Family, Space, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [f, s, b] = parts.as_slice() else {
        return Err(Error::Config(format!("plot spec {spec:?} must be FAMILY:SPACE:B")));
    };
    let b = b
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("invalid b in plot spec {spec:?}")))?;
    Ok((f.parse()?, s.parse()?, b))
}

/// Returns whether every cell succeeded.
fn sweep(args: SweepArgs) -> Result<bool> {
    let mut cfg = base_config(&args.numerics);
    cfg.states = parse_states(&args.states)?;
    cfg.rc_values = parse_radii(&args.rc)?;
    cfg.b_values = args.b;
    cfg.format = args.format.parse::<OutputFormat>()?;
    cfg.out = args.out;
    let plot = args.plot.as_deref().map(parse_plot).transpose()?;
    cfg.validate()?;
    let cache = open_cache(&args.numerics)?;
    let outcome = run_sweep(&cfg, &cache)?;
    for f in &outcome.failures {
        eprintln!("failed: {} r_c = {}: {}", f.state, f.r_c, f.error);
    }
    if !outcome.records.is_empty() {
        match plot {
            Some((family, space, b)) => {
                let text = pipeline::plot_data(&outcome.records, family, space, b);
                match &cfg.out {
                    Some(p) => std::fs::write(p, text)?,
                    None => print!("{text}"),
                }
            }
            None => pipeline::emit_output(&outcome.records, cfg.format, cfg.out.as_deref())?,
        }
    }
    Ok(outcome.failures.is_empty())
}

fn table(args: TableArgs) -> Result<bool> {
    let tables: Vec<TableId> = if args.which.eq_ignore_ascii_case("all") {
        TableId::ALL.to_vec()
    } else {
        vec![args.which.parse()?]
    };
    let cfg = base_config(&args.numerics);
    cfg.validate()?;
    let golden = load_golden(&args.golden.unwrap_or_else(default_golden_path))?;
    let cache = open_cache(&args.numerics)?;
    let mut all_pass = true;
    for t in tables {
        let cmp = reproduce_table(t, &golden, &cfg, &cache)?;
        println!("table {t} (tolerance {:.1}%)", 100.0 * t.tolerance());
        println!("{:>5} {:>8} {:>5} {:>16} {:>16} {:>10}  status", "state", "r_c", "space", "expected", "computed", "dev %");
        for c in &cmp.cells {
            println!(
                "{:>5} {:>8} {:>5} {:>16} {:>16.9} {:>10.4}  {}",
                c.state.to_string(),
                c.r_c,
                c.space.to_string(),
                c.expected,
                c.computed,
                100.0 * c.relative_deviation,
                if c.pass { "ok" } else { "FAIL" }
            );
        }
        for f in &cmp.failures {
            println!("{:>5} {:>8} error: {}", f.state.to_string(), f.r_c, f.error);
        }
        let failed = cmp.cells.iter().filter(|c| !c.pass).count() + cmp.failures.len();
        println!("table {t}: {} cells, {failed} outside tolerance\n", cmp.cells.len());
        all_pass &= cmp.passed();
    }
    Ok(all_pass)
}

fn single(args: SingleArgs) -> Result<bool> {
    let mut cfg = base_config(&args.numerics);
    let state: QuantumState = args.state.parse()?;
    cfg.states = vec![state];
    cfg.rc_values = vec![args.rc];
    cfg.b_values = args.b;
    cfg.validate()?;
    let cache = open_cache(&args.numerics)?;
    let rec = pipeline::compute_cell(state, args.rc, &cfg, &cache)?;
    println!("{}", serde_json::to_string_pretty(&rec)?);
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Table(a) => table(a),
        Command::Single(a) => single(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ (Error::Config(_) | Error::Domain(_))) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
