//! Command implementations behind the `ncphi4` binary.
//!
//! Exit codes: 0 on success, 1 on a runtime or numerical failure, 2 on bad
//! input (unparseable graph, invalid parameters, malformed CSV).

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::amplitude::{
    evaluate, template_momenta, AmplitudeError, AmplitudeSample, CutoffSpec, EvalOptions, McOptions, Method, Tolerance,
};
use crate::fit::{
    self, finite_a_shift, fit_ir_structure, fit_uv_divergence, reproduce_table, FitError, FitResult, ScanAxis,
    ScanSeries, TableOptions,
};
use crate::graph::{catalog, catalog_get, parse_graph, GraphError, RibbonGraph};
use crate::multiscale::{high_subgraphs, power_counting_bound, ModelError, ModelParams, MomentumRouting, ScaleAttribution};
use crate::rosette::{contract_to_rosette, intersection_matrix, spanning_tree, RosetteError, SpanningTree};
use crate::topology::{divergence_class, superficial_degree_bound, topology_report, TopologyError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<TopologyError> for CliError {
    fn from(e: TopologyError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<RosetteError> for CliError {
    fn from(e: RosetteError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<AmplitudeError> for CliError {
    fn from(e: AmplitudeError) -> Self {
        match e {
            AmplitudeError::Quadrature(_) | AmplitudeError::EssCollapse { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::IllConditioned { .. } | FitError::Unstable(_) => CliError::Runtime(e.to_string()),
            FitError::Amplitude(a) => a.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "ncphi4", version, about = "Ribbon graphs and amplitudes of the 1/p² φ⋆⁴ model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Topology, class and expected divergence of a graph.
    Classify {
        /// Catalog name or path to a graph file.
        graph: String,
    },
    /// Rosette contraction along a spanning tree.
    Rosette {
        graph: String,
        /// Comma-separated tree line ids; default is a BFS tree.
        #[arg(long, value_delimiter = ',')]
        tree: Option<Vec<String>>,
    },
    /// High subgraphs and the multiscale power-counting bound.
    Powercount {
        graph: String,
        /// Attribution file with `scale <eid>: <i>` lines.
        #[arg(long, conflicts_with = "uniform")]
        scales: Option<PathBuf>,
        /// Put every line in slice `i`.
        #[arg(long, default_value_t = 1)]
        uniform: u32,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Single amplitude at template momenta of scale `k`.
    Amplitude {
        graph: String,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long, value_enum, default_value_t = CutKind::Full)]
        cut: CutKind,
        /// Schwinger window for `--cut window`, or UV cutoff for `--cut schwinger|hard`.
        #[arg(long)]
        alpha_min: Option<f64>,
        #[arg(long)]
        alpha_max: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Amplitude over a grid of `k` or `Λ`, written as CSV.
    Scan(ScanArgs),
    /// Divergence fit of a scan CSV.
    Fit {
        csv: PathBuf,
        #[arg(long, value_parser = parse_axis, default_value = "k")]
        axis: ScanAxis,
        #[arg(long, value_enum)]
        model: Option<FitKind>,
        /// Also write `key=value` lines here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measured divergence classes of the catalog against the topological
    /// prediction.
    Table {
        #[arg(long, default_value_t = fit::MIN_POINTS)]
        points: usize,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CutKind {
    /// No window.
    Full,
    /// `[0, k⁻²]`.
    Tadpole,
    /// `[0, min(k², k⁻²)]`.
    Slice,
    /// `[alpha_min, alpha_max]`.
    Window,
    /// `[Λ⁻², ∞)`.
    Schwinger,
    /// `|p| ≤ Λ`.
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UvKind {
    Schwinger,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitKind {
    Ir,
    Uv,
    Shift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Bessel1d,
    Reduced3d,
    SchwingerGauss,
    SchwingerMc,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Bessel1d => Method::Bessel1d,
            MethodArg::Reduced3d => Method::Reduced3d,
            MethodArg::SchwingerGauss => Method::SchwingerGauss,
            MethodArg::SchwingerMc => Method::SchwingerMc,
        }
    }
}

fn parse_axis(s: &str) -> Result<ScanAxis, String> {
    ScanAxis::parse(s).ok_or_else(|| format!("unknown axis '{s}' (expected k or uv)"))
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    /// Slice base `M`.
    #[arg(long = "m-base", default_value_t = 2.0)]
    pub m_base: f64,
}

impl ModelArgs {
    pub fn params(&self) -> Result<ModelParams, CliError> {
        let p = ModelParams {
            a: self.a,
            mu2: self.mu2,
            theta: self.theta,
            m_base: self.m_base,
            ..ModelParams::default()
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = McOptions::default().samples)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
}

impl EvalArgs {
    fn options(&self) -> Result<EvalOptions, CliError> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(CliError::Input(format!("--rel-tol {} must lie in (0, 1)", self.rel_tol)));
        }
        Ok(EvalOptions {
            tol: Tolerance::new(1e-300, self.rel_tol),
            mc: McOptions {
                samples: self.samples,
                seed: self.seed,
            },
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long, value_parser = parse_axis, default_value = "k")]
    pub axis: ScanAxis,
    #[arg(long)]
    pub min: f64,
    #[arg(long)]
    pub max: f64,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Logarithmic grid spacing.
    #[arg(long)]
    pub log: bool,
    /// Schwinger window along a `k` scan.
    #[arg(long, value_enum, default_value_t = CutKind::Full)]
    pub cut: CutKind,
    /// Regulator along a `Λ` scan.
    #[arg(long, value_enum, default_value_t = UvKind::Schwinger)]
    pub uv: UvKind,
    /// External scale of a `Λ` scan.
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long)]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub eval: EvalArgs,
    #[arg(long)]
    pub workers: Option<usize>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Catalog name, or else a graph file.
pub fn load_graph(source: &str) -> Result<RibbonGraph, CliError> {
    if let Ok(g) = catalog_get(source) {
        return Ok(g);
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(CliError::Input(format!("'{source}' is neither a catalog graph nor a file")));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{source}: {e}")))?;
    Ok(parse_graph(&text)?)
}

fn signed(x: i64) -> String {
    if x < 0 {
        format!("−{}", -x)
    } else {
        x.to_string()
    }
}

pub fn cmd_classify(source: &str) -> Result<String, CliError> {
    let g = load_graph(source)?;
    let rep = topology_report(&g)?;
    Ok(format!(
        "{rep} ω≥{} {}\n",
        signed(superficial_degree_bound(&rep)),
        divergence_class(&rep)
    ))
}

pub fn cmd_rosette(source: &str, tree: Option<&[String]>) -> Result<String, CliError> {
    let g = load_graph(source)?;
    let t = match tree {
        Some(ids) => {
            let lines = ids
                .iter()
                .map(|id| {
                    g.edge_index(id.trim())
                        .ok_or_else(|| CliError::Input(format!("unknown line '{id}'")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            SpanningTree::from_lines(&g, &lines)?
        }
        None => spanning_tree(&g, None),
    };
    let r = contract_to_rosette(&g, &t);
    let im = intersection_matrix(&r);
    let rep = r.topology()?;
    let routing = MomentumRouting::new(&g, &t);
    let ids = |ls: &[usize]| ls.iter().map(|&e| g.edges()[e].id.clone()).collect::<Vec<_>>().join(",");
    let mut out = String::new();
    let _ = writeln!(out, "tree: {}", ids(t.tree_lines()));
    let _ = writeln!(out, "loops: {}", ids(&t.loop_lines(&g)));
    let _ = writeln!(out, "rosette: {r}");
    let _ = writeln!(out, "topology: {rep}");
    let _ = writeln!(out, "crossing-free: {}", r.is_crossing_free());
    let _ = writeln!(out, "intersection matrix:");
    for row in im.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
        let _ = writeln!(out, "  {}", cells.join(""));
    }
    let _ = writeln!(out, "routing:");
    for e in 0..g.n_lines() {
        let _ = writeln!(out, "  {}", routing.formula(&g, e));
    }
    Ok(out)
}

pub fn cmd_powercount(source: &str, scales: Option<&Path>, uniform: u32, params: &ModelParams) -> Result<String, CliError> {
    let g = load_graph(source)?;
    let att = match scales {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            ScaleAttribution::parse(&text, &g)?
        }
        None => ScaleAttribution::uniform(&g, uniform),
    };
    let subs = high_subgraphs(&g, &att)?;
    let mut out = String::new();
    let _ = writeln!(out, "{:>5} {:>4} {:>3} {:>3} {:>5}  lines", "scale", "comp", "N", "g", "ω");
    for s in &subs {
        let ids: Vec<&str> = s.edges.iter().map(|&e| g.edges()[e].id.as_str()).collect();
        let _ = writeln!(
            out,
            "{:>5} {:>4} {:>3} {:>3} {:>5}  {}",
            s.scale,
            s.component,
            s.n_ext,
            s.genus,
            signed(s.degree()),
            ids.join(",")
        );
    }
    let b = power_counting_bound(&g, &att)?;
    let _ = writeln!(out, "bound: M^({b}) with M = {}", params.m_base);
    Ok(out)
}

fn cutoff(kind: CutKind, k: f64, amin: Option<f64>, amax: Option<f64>, lambda: Option<f64>) -> Result<CutoffSpec, CliError> {
    let need_lambda = || lambda.ok_or_else(|| CliError::Input("this cutoff needs --lambda".into()));
    Ok(match kind {
        CutKind::Full => CutoffSpec::full(),
        CutKind::Tadpole => CutoffSpec::tadpole(k),
        CutKind::Slice => CutoffSpec::slice_ir(k),
        CutKind::Window => CutoffSpec::window(amin.unwrap_or(0.0), amax.unwrap_or(f64::INFINITY))?,
        CutKind::Schwinger => CutoffSpec::uv_schwinger(need_lambda()?),
        CutKind::Hard => CutoffSpec::hard(need_lambda()?),
    })
}

fn format_sample(s: &AmplitudeSample) -> String {
    let mut out = format!(
        "value = {:e} {:+e}i ± {:e}  method={}",
        s.value.re, s.value.im, s.abs_err, s.method
    );
    if let Some(ess) = s.ess {
        let _ = write!(out, " ess={ess:.0}");
    }
    out.push('\n');
    out
}

pub fn grid(min: f64, max: f64, points: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(CliError::Input(format!("grid needs min < max, got {min}, {max}")));
    }
    if points < 2 {
        return Err(CliError::Input("grid needs at least 2 points".into()));
    }
    if log {
        if min <= 0.0 {
            return Err(CliError::Input("log grid needs min > 0".into()));
        }
        Ok(fit::log_grid(min, max, points))
    } else {
        Ok((0..points)
            .map(|i| min + (max - min) * i as f64 / (points - 1) as f64)
            .collect())
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

/// One CSV row per grid point, in grid order; failed points carry the
/// error in the status column.
pub fn cmd_scan(a: &ScanArgs) -> Result<String, CliError> {
    let g = load_graph(&a.graph)?;
    let params = a.model.params()?;
    let opts = a.eval.options()?;
    let method = a.eval.method.map(Method::from);
    let xs = grid(a.min, a.max, a.points, a.log)?;
    if a.axis == ScanAxis::LambdaUv && !(a.k >= 0.0 && a.k.is_finite()) {
        return Err(CliError::Input(format!("--k {} must be finite and ≥ 0", a.k)));
    }
    if a.axis == ScanAxis::KIr && a.cut == CutKind::Window {
        cutoff(a.cut, 1.0, a.alpha_min, a.alpha_max, None)?;
    }
    let point = |x: f64| -> Result<AmplitudeSample, String> {
        let (k, cut) = match a.axis {
            ScanAxis::KIr => {
                let cut = cutoff(a.cut, x, a.alpha_min, a.alpha_max, None).map_err(|e| e.to_string())?;
                (x, cut)
            }
            ScanAxis::LambdaUv => {
                if !(x > 0.0) {
                    return Err(format!("cutoff {x} must be > 0"));
                }
                let cut = match a.uv {
                    UvKind::Schwinger => CutoffSpec::uv_schwinger(x),
                    UvKind::Hard => CutoffSpec::hard(x),
                };
                (a.k, cut)
            }
        };
        let ks = template_momenta(g.n_external(), k);
        evaluate(&g, &ks, &params, &cut, method, &opts).map_err(|e| e.to_string())
    };
    let rows: Vec<Result<AmplitudeSample, String>> = pool(a.workers)?.install(|| xs.par_iter().map(|&x| point(x)).collect());

    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(["axis", "re", "im", "abs_err", "status"]).map_err(csv_err)?;
    for (x, r) in xs.iter().zip(&rows) {
        let rec = match r {
            Ok(s) => [
                format!("{x:e}"),
                format!("{:e}", s.value.re),
                format!("{:e}", s.value.im),
                format!("{:e}", s.abs_err),
                "ok".to_string(),
            ],
            Err(e) => [format!("{x:e}"), "NaN".into(), "NaN".into(), "NaN".into(), e.clone()],
        };
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
}

fn fit_kv(r: &FitResult) -> String {
    let mut out = format!("model={}\n", r.model);
    for c in &r.coefficients {
        let _ = writeln!(out, "{}={:e}\n{}_stderr={:e}", c.name, c.value, c.name, c.stderr);
    }
    let _ = writeln!(out, "residual_norm={:e}\nr_squared={:e}", r.residual_norm, r.r_squared);
    out
}

/// Returns the human-readable report and the `key=value` form.
pub fn cmd_fit(path: &Path, axis: ScanAxis, model: Option<FitKind>) -> Result<(String, String), CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let series = ScanSeries::read_csv(axis, file)?;
    let kind = model.unwrap_or(match axis {
        ScanAxis::KIr => FitKind::Ir,
        ScanAxis::LambdaUv => FitKind::Uv,
    });
    match kind {
        FitKind::Ir => {
            let r = fit_ir_structure(&series)?;
            Ok((format!("{r}\n"), fit_kv(&r)))
        }
        FitKind::Uv => {
            let r = fit_uv_divergence(&series)?;
            Ok((format!("{r}\n"), fit_kv(&r)))
        }
        FitKind::Shift => {
            let s = finite_a_shift(&series)?;
            Ok((
                format!(
                    "finite shift F(0) = {:.8e} ± {:.3e}\n  variation over last decade {:.3e}\n",
                    s.f0, s.err, s.variation_last_decade
                ),
                format!(
                    "model=finite_shift\nf0={:e}\nf0_stderr={:e}\nvariation_last_decade={:e}\n",
                    s.f0, s.err, s.variation_last_decade
                ),
            ))
        }
    }
}

pub fn cmd_table(points: usize, workers: Option<usize>) -> Result<(String, bool), CliError> {
    let opts = TableOptions {
        points,
        ..TableOptions::default()
    };
    let table = pool(workers)?.install(|| reproduce_table(&catalog(), &opts));
    Ok((table.to_string(), table.is_consistent()))
}

fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Runs a parsed command; returns what goes to standard output.
pub fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Classify { graph } => cmd_classify(&graph),
        Command::Rosette { graph, tree } => cmd_rosette(&graph, tree.as_deref()),
        Command::Powercount {
            graph,
            scales,
            uniform,
            model,
        } => cmd_powercount(&graph, scales.as_deref(), uniform, &model.params()?),
        Command::Amplitude {
            graph,
            k,
            model,
            eval,
            cut,
            alpha_min,
            alpha_max,
            lambda,
        } => {
            let g = load_graph(&graph)?;
            let params = model.params()?;
            let cut = cutoff(cut, k, alpha_min, alpha_max, lambda)?;
            let ks = template_momenta(g.n_external(), k);
            let s = evaluate(&g, &ks, &params, &cut, eval.method.map(Method::from), &eval.options()?)?;
            Ok(format_sample(&s))
        }
        Command::Scan(a) => {
            let csv = cmd_scan(&a)?;
            match &a.out {
                Some(p) => {
                    write_out(p, &csv)?;
                    let failed = csv.lines().skip(1).filter(|l| !l.ends_with(",ok")).count();
                    Ok(format!("wrote {} rows to {} ({failed} failed)\n", a.points, p.display()))
                }
                None => Ok(csv),
            }
        }
        Command::Fit { csv, axis, model, out } => {
            let (report, kv) = cmd_fit(&csv, axis, model)?;
            if let Some(p) = out {
                write_out(&p, &kv)?;
            }
            Ok(report)
        }
        Command::Table { points, workers } => {
            let (text, ok) = cmd_table(points, workers)?;
            if ok {
                Ok(text)
            } else {
                Err(CliError::Runtime(format!("{text}\nmeasured classes disagree with the prediction")))
            }
        }
    }
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(text) => {
            let _ = io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_lines() {
        let t = cmd_classify("tadpole_np").unwrap();
        assert!(t.contains("g=0 B=2 planar_irregular ω≥−2 finite_renormalization"), "{t}");
        let t = cmd_classify("fourpoint_irregular").unwrap();
        assert!(t.contains("g=0 B=2") && t.trim_end().ends_with("convergent"), "{t}");
    }

    #[test]
    fn unknown_graph_is_input_error() {
        assert_eq!(cmd_classify("no_such_graph").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn grids() {
        assert_eq!(grid(0.0, 1.0, 5, false).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(grid(1.0, 1.0, 5, false).is_err());
        assert!(grid(0.0, 1.0, 5, true).is_err());
        assert!(grid(0.0, 1.0, 1, false).is_err());
    }

    #[test]
    fn quadrature_failures_are_runtime() {
        let e: CliError = AmplitudeError::EssCollapse { ess: 3.0 }.into();
        assert_eq!(e.exit_code(), 1);
        let e: CliError = FitError::Csv("x".into()).into();
        assert_eq!(e.exit_code(), 2);
    }
}
