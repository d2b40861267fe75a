use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use chebdir::config::{model_from_params, parse_complex, parse_mesh, parse_params, ConfigFile, WeightSpec};
use chebdir::report::{extremal_csv, write_file};
use chebdir::{emit, run, CliError, ExperimentConfig, Result};
use chebdir_core::pluripotential::{candidate_grid, extremal_numeric, ExtremalOptions};
use chebdir_core::sets::generate;
use chebdir_core::Complex64;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chebdir", version, about = "Directional Chebyshev constants and transfinite diameter experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Experiment config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Mesh size, a number or an expression like `2pi/64`.
    #[arg(long)]
    mesh: Option<String>,
    /// Pass tolerance of the experiment's checks.
    #[arg(long)]
    tol: Option<f64>,
    /// Experiment kind (defaults to the first kind of the subcommand).
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    name: Option<String>,
    /// Set model: torus, product-discs, ellipsoid, zaharjuta, segment, unit-circle, affine.
    #[arg(long)]
    model: Option<String>,
    /// Model parameters `k=v,...` with list items separated by `:`.
    #[arg(long)]
    params: Option<String>,
    /// `none`, `constant:c` or `gaussian:a`.
    #[arg(long)]
    weight: Option<String>,
    /// Direction, e.g. `0.5,0.5`.
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    j_min: Option<u32>,
    #[arg(long)]
    j_max: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// tau along a direction sequence (tau-sweep, counterexample).
    Sweep(Common),
    /// Identity checks (verify-step1, verify-step2, verify-step3-factorization, verify-scaling, verify-sandwich).
    Verify(Common),
    /// Axis and ellipsoid checks (lemma100-axis, lemma100-ellipsoid).
    Lemma100(Common),
    /// Transfinite diameter estimates.
    Delta {
        #[command(flatten)]
        common: Common,
        /// fekete or zaharjuta.
        #[arg(long)]
        method: Option<String>,
        /// Degree(s), comma separated.
        #[arg(long)]
        n: Option<String>,
    },
    /// Sample a model and write the point cloud.
    Gen {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        mesh: String,
        #[arg(long, default_value = "none")]
        weight: String,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree-n extremal function on a grid or at given points.
    Extremal {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        mesh: String,
        #[arg(long, default_value = "none")]
        weight: String,
        #[arg(long)]
        n: u32,
        /// Points per real axis of a box grid around the set.
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long, default_value_t = 1.5)]
        margin: f64,
        /// Explicit points instead of a grid: coordinates separated by `:`,
        /// points by `;`, e.g. `2;0.5+1i`.
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn load(common: &Common, default_kind: &str, extra: &[(&str, &str, Option<String>)]) -> Result<ExperimentConfig> {
    let mut file = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            ConfigFile::parse(&text)?
        }
        None => ConfigFile::default(),
    };
    if let Some(kind) = &common.kind {
        file.set("experiment", "kind", kind.clone());
    } else if file.get("experiment", "kind").is_none() {
        file.set("experiment", "kind", default_kind);
    }
    if let Some(model) = &common.model {
        // parameters of a configured model do not carry over to another one
        file.retain("set", |k| k == "mesh" || k == "weight");
        file.set("set", "model", model.clone());
    }
    if let Some(p) = &common.params {
        for (k, items) in parse_params(p)? {
            file.set("set", &k, items.join(","));
        }
    }
    let flags = [
        ("set", "mesh", common.mesh.clone()),
        ("set", "weight", common.weight.clone()),
        ("experiment", "tol", common.tol.map(|t| t.to_string())),
        ("experiment", "name", common.name.clone()),
        ("sweep", "theta", common.theta.clone()),
        ("sweep", "j_min", common.j_min.map(|j| j.to_string())),
        ("sweep", "j_max", common.j_max.map(|j| j.to_string())),
        ("output", "dir", common.out_dir.as_ref().map(|p| p.display().to_string())),
    ];
    for (section, key, value) in flags.into_iter().chain(extra.iter().cloned()) {
        if let Some(v) = value {
            file.set(section, key, v);
        }
    }
    ExperimentConfig::from_file(&file)
}

fn run_experiment(cfg: ExperimentConfig, command: &str) -> Result<i32> {
    if cfg.kind.command() != command {
        return Err(CliError::Config(format!("{} runs under `chebdir {}`", cfg.kind, cfg.kind.command())));
    }
    let outcome = run(&cfg)?;
    let files = emit(&outcome, &cfg.out_dir)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for c in &outcome.checks {
        let _ = writeln!(out, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if outcome.solver_failures > 0 {
        let _ = writeln!(out, "FAIL solver: {} rows failed", outcome.solver_failures);
    }
    for f in files {
        let _ = writeln!(out, "wrote {}", f.display());
    }
    Ok(outcome.exit_code())
}

fn parse_points(s: &str, dim: usize) -> Result<Vec<Complex64>> {
    let mut pts = Vec::new();
    for p in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let coords: Vec<Complex64> = p.split(':').map(parse_complex).collect::<Result<_>>()?;
        if coords.len() != dim {
            return Err(CliError::Config(format!("point {p:?} has {} coordinates, expected {dim}", coords.len())));
        }
        pts.extend(coords);
    }
    Ok(pts)
}

fn sampled(model: &str, params: &str, mesh: &str, weight: &str) -> Result<chebdir_core::PointCloud> {
    let model = model_from_params(model, &parse_params(params)?)?;
    let mesh = parse_mesh(mesh)?;
    let weight: WeightSpec = weight.parse()?;
    let cloud = generate(&model, mesh)?;
    Ok(match weight {
        WeightSpec::None => cloud,
        w => cloud.weighted_by(|z| w.eval(z))?,
    })
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Sweep(c) => run_experiment(load(&c, "tau-sweep", &[])?, "sweep"),
        Command::Verify(c) => run_experiment(load(&c, "verify-step1", &[])?, "verify"),
        Command::Lemma100(c) => run_experiment(load(&c, "lemma100-ellipsoid", &[])?, "lemma100"),
        Command::Delta { common, method, n } => {
            let extra = [("delta", "method", method), ("delta", "degrees", n)];
            run_experiment(load(&common, "delta", &extra)?, "delta")
        }
        Command::Gen { model, params, mesh, weight, out } => {
            let cloud = sampled(&model, &params, &mesh, &weight)?;
            match out {
                Some(path) => {
                    let f = fs::File::create(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                    cloud.write_to(BufWriter::new(f))?;
                    println!("wrote {} points to {}", cloud.len(), path.display());
                }
                None => cloud.write_to(io::stdout().lock())?,
            }
            Ok(0)
        }
        Command::Extremal { model, params, mesh, weight, n, grid, margin, at, tol, out_dir } => {
            let cloud = sampled(&model, &params, &mesh, &weight)?;
            let points = match at {
                Some(s) => parse_points(&s, cloud.dim())?,
                None => candidate_grid(&cloud, grid, margin)?.coords().to_vec(),
            };
            let opts = ExtremalOptions { tol: tol.unwrap_or(1e-9), ..ExtremalOptions::default() };
            let g = extremal_numeric(&cloud, n, &points, &opts)?;
            let csv = extremal_csv(g.dim, &g.points, &g.values);
            match out_dir {
                Some(dir) => println!("wrote {}", write_file(&dir, "extremal.csv", &csv)?.display()),
                None => print!("{csv}"),
            }
            Ok(0)
        }
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("CHEBDIR_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
