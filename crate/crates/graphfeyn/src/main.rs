//! Command-line front end. Exit codes: 0 success, 2 input/domain error,
//! 3 parse error, 4 resource cap exceeded, 5 acceptance failure
//! (a cross-validation check did not hold).

// vertex loops index parallel per-vertex arrays by vertex number
#![allow(clippy::needless_range_loop)]

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use graphfeyn::exact::{
    assemble_operator, scattering_kernel_exact, semigroup_kernel_exact, unitary_kernel_exact,
    ExactError, KernelMatrix,
};
use graphfeyn::exhaustion::{exhaustion_study, ExhaustionError};
use graphfeyn::graph::{
    build_standard, instance_from_file, validate_file, ElectricPotential, GraphError,
    GraphFile, MagneticPotential, StandardGraph, VertexSet, WeightedGraph,
};
use graphfeyn::mc::{
    kato_simon_margin, mc_kernel_row, mc_scattering_kernel, mc_semigroup_kernel,
    mc_unitary_kernel, KatoSimonMode, KernelMode, McError,
};
use graphfeyn::sampler::{sample_path, SamplerConfig};
use graphfeyn::MCEstimate;

const EXIT_INPUT: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_RESOURCE: u8 = 4;
const EXIT_ACCEPTANCE: u8 = 5;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }

    fn acceptance(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_ACCEPTANCE,
            message: message.into(),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        let code = match e {
            ExactError::TooLarge(_) => EXIT_RESOURCE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<McError> for Failure {
    fn from(e: McError) -> Self {
        match e {
            McError::Exact(inner) => inner.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

impl From<ExhaustionError> for Failure {
    fn from(e: ExhaustionError) -> Self {
        match e {
            ExhaustionError::Exact(inner) => inner.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "graphfeyn",
    about = "Magnetic Schrödinger evolutions on weighted graphs: exact kernels and path integral Monte Carlo",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvolutionMode {
    Unitary,
    Semigroup,
}

impl From<EvolutionMode> for KernelMode {
    fn from(m: EvolutionMode) -> KernelMode {
        match m {
            EvolutionMode::Unitary => KernelMode::Unitary,
            EvolutionMode::Semigroup => KernelMode::Semigroup,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ComputeMode {
    Exact,
    Mc,
}

#[derive(Args)]
struct GraphArgs {
    /// graph JSON file, or a builder descriptor prefixed with `builtin:`
    /// (path(n), cycle(n), lattice_box(dim,side), harper_box(side,alpha))
    #[arg(long)]
    graph: String,
    /// replace the electric potential: `neg-deg`, `zero`, or comma-separated values
    #[arg(long)]
    override_v: Option<String>,
    /// replace the magnetic potential with a uniform flux per square-lattice
    /// plaquette (Landau gauge); vertex ids must be `x1,x2` coordinates
    #[arg(long)]
    flux: Option<f64>,
}

#[derive(Args)]
struct McArgs {
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    max_jumps: usize,
    #[arg(long, default_value_t = 1024)]
    chunk_size: usize,
    /// worker threads (default: GRAPHFEYN_WORKERS, then all cores)
    #[arg(long)]
    workers: Option<usize>,
}

impl McArgs {
    fn sampler_config(&self) -> Result<SamplerConfig, Failure> {
        if self.samples == 0 {
            return Err(Failure::input("--samples must be at least 1"));
        }
        if self.max_jumps == 0 {
            return Err(Failure::input("--max-jumps must be at least 1"));
        }
        if self.chunk_size == 0 {
            return Err(Failure::input("--chunk-size must be at least 1"));
        }
        Ok(SamplerConfig {
            max_jumps: self.max_jumps,
            seed: self.seed,
            chunk_size: self.chunk_size,
        })
    }
}

#[derive(Args)]
struct OutArg {
    /// output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file against the instance constraints
    Validate {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Full kernel matrix by Hermitian eigendecomposition
    ExactKernel {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value = "unitary")]
        mode: EvolutionMode,
        #[command(flatten)]
        out: OutArg,
    },
    /// Path integral Monte Carlo estimate of one kernel entry
    McKernel {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value = "unitary")]
        mode: EvolutionMode,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Cross-validate Monte Carlo against exact kernels over a time grid
    Compare {
        #[command(flatten)]
        graph: GraphArgs,
        /// comma-separated times
        #[arg(long)]
        t_grid: String,
        #[arg(long, value_enum, default_value = "unitary")]
        mode: EvolutionMode,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArg,
        /// test-only fault injection: flip the sign of the magnetic phase in
        /// the Monte Carlo integrand
        #[arg(long, hide = true)]
        corrupt_phase: bool,
    },
    /// Domination margin: semigroup comparison kernel minus unitary magnitude
    KatoSimon {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        t_grid: String,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ComputeMode,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Composition exp(-itL) exp(+itL') with independently primed potentials
    Scattering {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ComputeMode,
        /// primed electric potential (same syntax as --override-v; default:
        /// the unprimed one)
        #[arg(long)]
        primed_v: Option<String>,
        /// primed flux (default: the unprimed magnetic potential)
        #[arg(long)]
        primed_flux: Option<f64>,
        #[arg(long)]
        source: Option<String>,
        #[arg(long)]
        target: Option<String>,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Dirichlet-ball convergence study around a center vertex
    Exhaustion {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value = "unitary")]
        mode: EvolutionMode,
        /// center vertex id; initial data is the delta there
        #[arg(long)]
        source: String,
        /// comma-separated strictly increasing radii
        #[arg(long)]
        radii: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Dump sampled jump paths as CSV
    SamplePaths {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        source: String,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArg,
    },
}

type Instance = (WeightedGraph, MagneticPotential, ElectricPotential);

fn load_graph_file(path: &str) -> Result<GraphFile, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("cannot read `{path}`: {e}")))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::parse(format!("malformed graph file `{path}`: {e}")))
}

fn parse_potential(spec: &str, g: &WeightedGraph) -> Result<ElectricPotential, Failure> {
    match spec {
        "neg-deg" => Ok(ElectricPotential::neg_degree(g)),
        "zero" => Ok(ElectricPotential::zero(g.len())),
        list => {
            let values: Result<Vec<f64>, _> =
                list.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let values = values.map_err(|_| {
                Failure::input(format!(
                    "potential must be `neg-deg`, `zero`, or comma-separated numbers, got `{list}`"
                ))
            })?;
            if values.len() != g.len() {
                return Err(Failure::input(format!(
                    "potential has {} values but the graph has {} vertices",
                    values.len(),
                    g.len()
                )));
            }
            Ok(ElectricPotential::from_values(values))
        }
    }
}

/// Landau-gauge flux on a 2d lattice with `x1,x2` vertex ids: phase
/// `2*pi*flux*x1` on each upward vertical edge, zero on horizontal edges.
fn landau_gauge(g: &WeightedGraph, flux: f64) -> Result<MagneticPotential, Failure> {
    let coords: Result<Vec<(i64, i64)>, Failure> = g
        .ids()
        .iter()
        .map(|id| {
            let mut parts = id.split(',').map(|p| p.trim().parse::<i64>());
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(Failure::input(format!(
                    "--flux needs `x1,x2` vertex ids, got `{id}`"
                ))),
            }
        })
        .collect();
    let coords = coords?;
    let mut theta = MagneticPotential::zero();
    for (x, y, _) in g.edge_keys() {
        let (ax, ay) = coords[x];
        let (bx, by) = coords[y];
        if ax == bx && (ay - by).abs() == 1 {
            let (lo, hi) = if ay < by { (x, y) } else { (y, x) };
            theta.set(lo, hi, 2.0 * std::f64::consts::PI * flux * ax as f64);
        } else if ay == by && (ax - bx).abs() == 1 {
            // horizontal edge: zero phase in Landau gauge
        } else {
            return Err(Failure::input(format!(
                "--flux needs a square-lattice graph; edge {}-{} is not axis-aligned",
                g.id(x),
                g.id(y)
            )));
        }
    }
    Ok(theta)
}

fn load_instance(args: &GraphArgs) -> Result<Instance, Failure> {
    let (g, theta, v) = if let Some(desc) = args.graph.strip_prefix("builtin:") {
        let spec: StandardGraph = desc
            .parse()
            .map_err(|e: GraphError| Failure::input(e.to_string()))?;
        build_standard(spec)?
    } else {
        let file = load_graph_file(&args.graph)?;
        instance_from_file(&file)?
    };
    let theta = match args.flux {
        Some(flux) => landau_gauge(&g, flux)?,
        None => theta,
    };
    let v = match &args.override_v {
        Some(spec) => parse_potential(spec, &g)?,
        None => v,
    };
    Ok((g, theta, v))
}

fn resolve_workers(requested: Option<usize>) -> Result<Option<usize>, Failure> {
    if let Some(w) = requested {
        if w == 0 {
            return Err(Failure::input("--workers must be at least 1"));
        }
        return Ok(Some(w));
    }
    match std::env::var("GRAPHFEYN_WORKERS") {
        Ok(raw) => {
            let w: usize = raw.parse().map_err(|_| {
                Failure::input(format!("GRAPHFEYN_WORKERS must be a positive integer, got `{raw}`"))
            })?;
            if w == 0 {
                return Err(Failure::input("GRAPHFEYN_WORKERS must be at least 1"));
            }
            Ok(Some(w))
        }
        Err(_) => Ok(None),
    }
}

fn with_workers<T>(
    workers: Option<usize>,
    run: impl FnOnce() -> Result<T, Failure> + Send,
) -> Result<T, Failure>
where
    T: Send,
{
    match workers {
        None => run(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Failure::input(format!("cannot build thread pool: {e}")))?
            .install(run),
    }
}

fn write_output(out: &OutArg, payload: &str) -> Result<(), Failure> {
    match &out.out {
        Some(path) => fs::write(path, payload)
            .map_err(|e| Failure::input(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(payload.as_bytes())
                .map_err(|e| Failure::input(format!("cannot write to stdout: {e}")))
        }
    }
}

fn parse_t_grid(raw: &str) -> Result<Vec<f64>, Failure> {
    let grid: Result<Vec<f64>, _> = raw.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let grid =
        grid.map_err(|_| Failure::input(format!("--t-grid must be comma-separated numbers, got `{raw}`")))?;
    if grid.is_empty() {
        return Err(Failure::input("--t-grid must be nonempty"));
    }
    Ok(grid)
}

fn parse_radii(raw: &str) -> Result<Vec<usize>, Failure> {
    let radii: Result<Vec<usize>, _> = raw.split(',').map(|s| s.trim().parse::<usize>()).collect();
    radii.map_err(|_| Failure::input(format!("--radii must be comma-separated integers, got `{raw}`")))
}

fn vertex(g: &WeightedGraph, id: &str) -> Result<usize, Failure> {
    g.index_of(id).map_err(Failure::from)
}

fn kernel_csv(kern: &KernelMatrix) -> String {
    let mut out = String::from("x,y,re,im\n");
    for x in 0..kern.dim() {
        for y in 0..kern.dim() {
            let k = kern.value(x, y);
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e}\n",
                kern.labels()[x],
                kern.labels()[y],
                k.re,
                k.im
            ));
        }
    }
    out
}

fn estimate_json(
    est: &MCEstimate,
    t: f64,
    x: &str,
    y: &str,
    seed: u64,
) -> String {
    let mut payload = serde_json::json!({
        "re": est.mean.re,
        "im": est.mean.im,
        "stderr_re": est.stderr_re,
        "stderr_im": est.stderr_im,
        "n": est.n_samples,
        "n_exploded": est.n_exploded,
        "t": t,
        "x": x,
        "y": y,
        "seed": seed,
    })
    .to_string();
    payload.push('\n');
    payload
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { graph } => cmd_validate(&graph),
        Command::ExactKernel { graph, t, mode, out } => cmd_exact_kernel(&graph, t, mode, &out),
        Command::McKernel {
            graph,
            source,
            target,
            t,
            mode,
            mc,
            out,
        } => cmd_mc_kernel(&graph, &source, &target, t, mode, &mc, &out),
        Command::Compare {
            graph,
            t_grid,
            mode,
            mc,
            out,
            corrupt_phase,
        } => cmd_compare(&graph, &t_grid, mode, &mc, &out, corrupt_phase),
        Command::KatoSimon {
            graph,
            t_grid,
            source,
            target,
            mode,
            mc,
            out,
        } => cmd_kato_simon(&graph, &t_grid, &source, &target, mode, &mc, &out),
        Command::Scattering {
            graph,
            t,
            mode,
            primed_v,
            primed_flux,
            source,
            target,
            mc,
            out,
        } => cmd_scattering(
            &graph,
            t,
            mode,
            primed_v.as_deref(),
            primed_flux,
            source.as_deref(),
            target.as_deref(),
            &mc,
            &out,
        ),
        Command::Exhaustion {
            graph,
            t,
            mode,
            source,
            radii,
            out,
        } => cmd_exhaustion(&graph, t, mode, &source, &radii, &out),
        Command::SamplePaths {
            graph,
            source,
            t,
            mc,
            out,
        } => cmd_sample_paths(&graph, &source, t, &mc, &out),
    }
}

fn cmd_validate(graph: &GraphArgs) -> Result<(), Failure> {
    if graph.graph.starts_with("builtin:") {
        load_instance(graph)?;
        println!("ok");
        return Ok(());
    }
    let file = load_graph_file(&graph.graph)?;
    let violations = validate_file(&file);
    if violations.is_empty() {
        // also exercise the override plumbing so bad flags still fail
        load_instance(graph)?;
        println!("ok");
        Ok(())
    } else {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        Err(Failure::input(list.join("\n")))
    }
}

fn cmd_exact_kernel(
    graph: &GraphArgs,
    t: f64,
    mode: EvolutionMode,
    out: &OutArg,
) -> Result<(), Failure> {
    let (g, theta, v) = load_instance(graph)?;
    let op = assemble_operator(&g, &theta, &v, &VertexSet::full(&g))?;
    let kern = match mode {
        EvolutionMode::Unitary => unitary_kernel_exact(&op, t)?,
        EvolutionMode::Semigroup => semigroup_kernel_exact(&op, t)?,
    };
    write_output(out, &kernel_csv(&kern))
}

fn cmd_mc_kernel(
    graph: &GraphArgs,
    source: &str,
    target: &str,
    t: f64,
    mode: EvolutionMode,
    mc: &McArgs,
    out: &OutArg,
) -> Result<(), Failure> {
    let (g, theta, v) = load_instance(graph)?;
    let x = vertex(&g, source)?;
    let y = vertex(&g, target)?;
    let cfg = mc.sampler_config()?;
    let workers = resolve_workers(mc.workers)?;
    let est = with_workers(workers, || {
        let est = match mode {
            EvolutionMode::Unitary => {
                mc_unitary_kernel(&g, &theta, &v, x, y, t, mc.samples, &cfg)?
            }
            EvolutionMode::Semigroup => {
                mc_semigroup_kernel(&g, &theta, &v, x, y, t, mc.samples, &cfg)?
            }
        };
        Ok(est)
    })?;
    write_output(out, &estimate_json(&est, t, source, target, mc.seed))
}

fn cmd_compare(
    graph: &GraphArgs,
    t_grid: &str,
    mode: EvolutionMode,
    mc: &McArgs,
    out: &OutArg,
    corrupt_phase: bool,
) -> Result<(), Failure> {
    let (g, theta, v) = load_instance(graph)?;
    let grid = parse_t_grid(t_grid)?;
    let cfg = mc.sampler_config()?;
    let workers = resolve_workers(mc.workers)?;
    let op = assemble_operator(&g, &theta, &v, &VertexSet::full(&g))?;
    let mc_theta = if corrupt_phase {
        let mut flipped = MagneticPotential::zero();
        for (x, y, value) in theta.entries() {
            flipped.set(x, y, -value);
        }
        flipped
    } else {
        theta.clone()
    };

    let mut report = String::from("t,x,y,exact_re,exact_im,mc_re,mc_im,stderr_re,stderr_im,z\n");
    let mut worst: f64 = 0.0;
    with_workers(workers, || {
        for &t in &grid {
            let exact = match mode {
                EvolutionMode::Unitary => unitary_kernel_exact(&op, t)?,
                EvolutionMode::Semigroup => semigroup_kernel_exact(&op, t)?,
            };
            for x in 0..g.len() {
                let row = mc_kernel_row(&g, &mc_theta, &v, mode.into(), x, t, mc.samples, &cfg)?;
                for y in 0..g.len() {
                    let est = &row[y];
                    let diff = (est.mean - exact.value(x, y)).norm();
                    let denom = est.stderr_sum();
                    let z = if denom > 0.0 {
                        diff / denom
                    } else if diff <= 1e-12 {
                        0.0
                    } else {
                        f64::INFINITY
                    };
                    worst = worst.max(z);
                    report.push_str(&format!(
                        "{:.16e},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                        t,
                        g.id(x),
                        g.id(y),
                        exact.value(x, y).re,
                        exact.value(x, y).im,
                        est.mean.re,
                        est.mean.im,
                        est.stderr_re,
                        est.stderr_im,
                        z
                    ));
                }
            }
        }
        Ok(())
    })?;
    write_output(out, &report)?;
    if worst > 4.0 {
        Err(Failure::acceptance(format!(
            "Monte Carlo disagrees with the exact kernel: worst z-score {worst:.3}"
        )))
    } else {
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_kato_simon(
    graph: &GraphArgs,
    t_grid: &str,
    source: &str,
    target: &str,
    mode: ComputeMode,
    mc: &McArgs,
    out: &OutArg,
) -> Result<(), Failure> {
    let (g, theta, v) = load_instance(graph)?;
    let x = vertex(&g, source)?;
    let y = vertex(&g, target)?;
    let grid = parse_t_grid(t_grid)?;
    let cfg = mc.sampler_config()?;
    let workers = resolve_workers(mc.workers)?;
    let ks_mode = match mode {
        ComputeMode::Exact => KatoSimonMode::Exact,
        ComputeMode::Mc => KatoSimonMode::Mc,
    };

    let mut report = String::from("t,comparison,magnitude,margin,stderr\n");
    let mut violated = false;
    with_workers(workers, || {
        for &t in &grid {
            let r = kato_simon_margin(&g, &theta, &v, x, y, t, ks_mode, mc.samples, &cfg)?;
            let tolerance = match ks_mode {
                KatoSimonMode::Exact => 1e-10,
                KatoSimonMode::Mc => 4.0 * r.stderr,
            };
            if r.margin < -tolerance {
                violated = true;
            }
            report.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                t, r.comparison, r.magnitude, r.margin, r.stderr
            ));
        }
        Ok(())
    })?;
    write_output(out, &report)?;
    if violated {
        Err(Failure::acceptance(
            "domination margin is negative beyond tolerance",
        ))
    } else {
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_scattering(
    graph: &GraphArgs,
    t: f64,
    mode: ComputeMode,
    primed_v: Option<&str>,
    primed_flux: Option<f64>,
    source: Option<&str>,
    target: Option<&str>,
    mc: &McArgs,
    out: &OutArg,
) -> Result<(), Failure> {
    let (g, theta, v) = load_instance(graph)?;
    let v2 = match primed_v {
        Some(spec) => parse_potential(spec, &g)?,
        None => v.clone(),
    };
    let theta2 = match primed_flux {
        Some(flux) => landau_gauge(&g, flux)?,
        None => theta.clone(),
    };
    match mode {
        ComputeMode::Exact => {
            let kern =
                scattering_kernel_exact(&g, &theta, &v, &theta2, &v2, &VertexSet::full(&g), t)?;
            write_output(out, &kernel_csv(&kern))
        }
        ComputeMode::Mc => {
            let source =
                source.ok_or_else(|| Failure::input("--source is required in mc mode"))?;
            let target =
                target.ok_or_else(|| Failure::input("--target is required in mc mode"))?;
            let x = vertex(&g, source)?;
            let y = vertex(&g, target)?;
            let cfg = mc.sampler_config()?;
            let workers = resolve_workers(mc.workers)?;
            let est = with_workers(workers, || {
                Ok(mc_scattering_kernel(
                    &g, &theta, &v, &theta2, &v2, x, y, t, mc.samples, &cfg,
                )?)
            })?;
            write_output(out, &estimate_json(&est, t, source, target, mc.seed))
        }
    }
}

fn cmd_exhaustion(
    graph: &GraphArgs,
    t: f64,
    mode: EvolutionMode,
    source: &str,
    radii: &str,
    out: &OutArg,
) -> Result<(), Failure> {
    let (g, theta, v) = load_instance(graph)?;
    let center = vertex(&g, source)?;
    let radii = parse_radii(radii)?;
    let mut f = vec![Complex64::default(); g.len()];
    f[center] = Complex64::new(1.0, 0.0);
    let report = exhaustion_study(&g, &theta, &v, center, &radii, &f, t, mode.into())?;

    let mut csv = String::from("radius,ball_size,deviation\n");
    for (i, &r) in radii.iter().enumerate() {
        let deviation = report.deviations.get(i).copied().unwrap_or(0.0);
        csv.push_str(&format!(
            "{},{},{:.16e}\n",
            r, report.ball_sizes[i], deviation
        ));
    }
    write_output(out, &csv)
}

fn cmd_sample_paths(
    graph: &GraphArgs,
    source: &str,
    t: f64,
    mc: &McArgs,
    out: &OutArg,
) -> Result<(), Failure> {
    let (g, _, _) = load_instance(graph)?;
    let x = vertex(&g, source)?;
    if t < 0.0 {
        return Err(Failure::input(format!(
            "sample-paths requires t >= 0, got {t}"
        )));
    }
    let cfg = mc.sampler_config()?;
    let mut csv = String::from("path_id,step,time,vertex\n");
    // sequential dump over the same per-chunk RNG streams as the estimators
    let chunk = cfg.chunk_size as u64;
    let mut p = 0u64;
    while p < mc.samples {
        let chunk_index = p / chunk;
        let mut rng = graphfeyn::estimate::chunk_rng(cfg.seed, chunk_index);
        let end = mc.samples.min((chunk_index + 1) * chunk);
        while p < end {
            let path = sample_path(&g, x, t, &cfg, &mut rng);
            csv.push_str(&format!("{},0,{:.16e},{}\n", p, 0.0, g.id(path.start)));
            for (step, (time, vertex)) in path.jumps.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{},{:.16e},{}\n",
                    p,
                    step + 1,
                    time,
                    g.id(*vertex)
                ));
            }
            if path.exploded {
                csv.push_str(&format!("{},{},,!exploded\n", p, path.jumps.len() + 1));
            }
            p += 1;
        }
    }
    write_output(out, &csv)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
