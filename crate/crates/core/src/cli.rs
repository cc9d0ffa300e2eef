//! Command-line front end.
//!
//! `main` only forwards `std::env::args` to [`run`]; everything else lives
//! here so the commands can be driven from tests.

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{validate, ComplexValue, ModelParams};
use crate::pdfs::{self, PhaseEngine, PhaseMethod};
use crate::simulate::{self, fmt17, GofReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_GOF_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;
pub const EXIT_IO: i32 = 5;

/// Values of L used by `reproduce-figures`.
pub const FIGURE_ORDERS: [u32; 3] = [1, 5, 10];

#[derive(Debug, Parser)]
#[command(name = "zpd", version, about = "Densities of sums of correlated complex Gaussian products")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a density on a grid as CSV.
    Eval(EvalArgs),
    /// Draw realizations of Z.
    Sample(SampleArgs),
    /// Goodness of fit of samples against one density.
    Gof(GofArgs),
    /// Goodness of fit against both the corrected and the legacy amplitude density.
    Compare(CompareArgs),
    /// Write histograms, analytic grids and gnuplot scripts for L = 1, 5, 10.
    ReproduceFigures(FigureArgs),
}

/// Model parameters. Flags override the config file, which overrides the
/// reference experiment.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// TOML file with any of sigma_x, sigma_y, mu_abs, epsilon, L.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub sigma_x: Option<f64>,
    #[arg(long)]
    pub sigma_y: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu_abs: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long = "L", visible_alias = "l")]
    pub big_l: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PdfChoice {
    Amplitude,
    Phase,
    /// Joint density along Im Z = --z-i.
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Exact,
    Approx,
    Quadrature,
}

impl From<MethodChoice> for PhaseMethod {
    fn from(m: MethodChoice) -> Self {
        match m {
            MethodChoice::Exact => PhaseMethod::ExactJet,
            MethodChoice::Approx => PhaseMethod::SeriesApprox,
            MethodChoice::Quadrature => PhaseMethod::Quadrature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Amplitude,
    AmplitudeLegacy,
    Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Binary,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "phase")]
    pub pdf: PdfChoice,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodChoice,
    /// Series terms for the approximate phase density (default L).
    #[arg(long)]
    pub t_terms: Option<u32>,
    /// Number of grid points.
    #[arg(long, default_value_t = 721, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid: u64,
    /// Upper end of the amplitude grid, or half-width of the joint slice
    /// (default: radius holding all but 1e-8 of the amplitude mass).
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Imaginary part of the joint-density slice.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z_i: f64,
    /// Output file (stdout if omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, short, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, short)]
    pub output: PathBuf,
}

/// Where the samples for `gof`/`compare` come from.
#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Sample file written by `sample`; if omitted, samples are drawn.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long, short, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct GofArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value = "amplitude")]
    pub target: Target,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodChoice,
    #[arg(long)]
    pub t_terms: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: SourceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, short, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Bins per axis of the 2-D histograms.
    #[arg(long, default_value_t = 80, value_parser = clap::value_parser!(u64).range(1..))]
    pub bins: u64,
    #[arg(long, default_value = "figures")]
    pub out_dir: PathBuf,
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamFile {
    sigma_x: Option<f64>,
    sigma_y: Option<f64>,
    mu_abs: Option<f64>,
    epsilon: Option<f64>,
    #[serde(rename = "L")]
    big_l: Option<u32>,
}

impl ParamArgs {
    /// Resolves flags, config file and defaults into validated parameters.
    pub fn resolve(&self) -> Result<ModelParams> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                toml::from_str::<ParamFile>(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
            }
            None => ParamFile::default(),
        };
        let d = ModelParams::reference(1);
        validate(ModelParams {
            sigma_x: self.sigma_x.or(file.sigma_x).unwrap_or(d.sigma_x),
            sigma_y: self.sigma_y.or(file.sigma_y).unwrap_or(d.sigma_y),
            mu_abs: self.mu_abs.or(file.mu_abs).unwrap_or(d.mu_abs),
            epsilon: self.epsilon.or(file.epsilon).unwrap_or(d.epsilon),
            big_l: self.big_l.or(file.big_l).unwrap_or(d.big_l),
        })
    }
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::Overflow(_) => EXIT_DOMAIN,
        Error::Convergence { .. } => EXIT_CONVERGENCE,
        Error::Resource(_) => EXIT_USAGE,
        Error::Parse(_) | Error::Io(_) => EXIT_IO,
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let pool = match simulate::thread_pool() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("zpd: {e}");
            return exit_code(&e);
        }
    };
    match pool.install(|| execute(&cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("zpd: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cmd: &Command) -> Result<i32> {
    let stdout = io::stdout();
    match cmd {
        Command::Eval(a) => {
            match &a.output {
                Some(path) => cmd_eval(a, BufWriter::new(File::create(path)?))?,
                None => cmd_eval(a, stdout.lock())?,
            }
            Ok(EXIT_OK)
        }
        Command::Sample(a) => {
            let summary = cmd_sample(a)?;
            writeln!(stdout.lock(), "{}", json_line(&summary)?)?;
            Ok(EXIT_OK)
        }
        Command::Gof(a) => {
            let line = cmd_gof(a)?;
            writeln!(stdout.lock(), "{}", json_line(&line)?)?;
            Ok(if line.report.pass { EXIT_OK } else { EXIT_GOF_FAIL })
        }
        Command::Compare(a) => {
            let lines = cmd_compare(a)?;
            let mut out = stdout.lock();
            for l in &lines {
                writeln!(out, "{}", json_line(l)?)?;
            }
            // Only the corrected density is expected to pass.
            Ok(if lines[0].report.pass { EXIT_OK } else { EXIT_GOF_FAIL })
        }
        Command::ReproduceFigures(a) => {
            let manifest = cmd_reproduce_figures(a)?;
            writeln!(stdout.lock(), "{}", json_line(&manifest)?)?;
            Ok(EXIT_OK)
        }
    }
}

fn json_line<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Parse(e.to_string()))
}

/// `n` points from −π to π inclusive. Both ends are kept so the trapezoid
/// rule sees a full period.
pub fn closed_phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| -PI + 2.0 * PI * i as f64 / (n - 1) as f64).collect()
}

fn write_rows<W: Write>(mut out: W, header: &str, columns: &[Vec<f64>]) -> Result<()> {
    writeln!(out, "{header}")?;
    for i in 0..columns[0].len() {
        let row: Vec<String> = columns.iter().map(|c| fmt17(c[i])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

fn eval_grid<F>(grid: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    grid.par_iter().map(|&x| f(x)).collect()
}

/// Writes the selected density as CSV.
///
/// Columns: `theta,density` for the phase; `r,density,density_legacy` for
/// the amplitude; `z_r,density,density_legacy` for a joint slice. Series
/// values are clamped at zero here, and only here.
pub fn cmd_eval<W: Write>(args: &EvalArgs, out: W) -> Result<()> {
    let params = args.params.resolve()?;
    let n = args.grid as usize;
    match args.pdf {
        PdfChoice::Phase => {
            if args.method == MethodChoice::Approx && params.big_l < 2 {
                return Err(Error::domain("series phase approximation: L ≥ 2 required"));
            }
            let engine = PhaseEngine::new(params, args.method.into(), args.t_terms)?;
            let grid = closed_phase_grid(n);
            let values = eval_grid(&grid, |t| engine.eval(t).map(|v| v.max(0.0)))?;
            write_rows(out, "theta,density", &[grid, values])
        }
        PdfChoice::Amplitude => {
            let r_max = match args.r_max {
                Some(r) => r,
                None => pdfs::amplitude_tail_radius(&params, 1e-8)?,
            };
            let grid = pdfs::amplitude_grid(&params, r_max, n);
            let values = eval_grid(&grid, |r| pdfs::amplitude_pdf(&params, r))?;
            let legacy = eval_grid(&grid, |r| pdfs::amplitude_pdf_legacy(&params, r))?;
            write_rows(out, "r,density,density_legacy", &[grid, values, legacy])
        }
        PdfChoice::Joint => {
            let half = match args.r_max {
                Some(r) => r,
                None => pdfs::amplitude_tail_radius(&params, 1e-8)?,
            };
            // Even point counts keep the L = 1 singularity at the origin off the grid.
            let grid: Vec<f64> = (0..n).map(|i| -half + 2.0 * half * (i as f64 + 0.5) / n as f64).collect();
            let z_i = args.z_i;
            let values = eval_grid(&grid, |x| pdfs::joint_pdf(&params, x, z_i))?;
            let legacy = eval_grid(&grid, |x| pdfs::joint_pdf_legacy(&params, x, z_i))?;
            write_rows(out, "z_r,density,density_legacy", &[grid, values, legacy])
        }
    }
}

/// Result of `sample`: parameters, seed and summary moments.
#[derive(Debug, Clone, Serialize)]
pub struct SampleSummary {
    pub params: ModelParams,
    pub seed: u64,
    pub n: u64,
    pub mean_re: f64,
    pub mean_im: f64,
    pub se_re: f64,
    pub se_im: f64,
    pub mean_abs2: f64,
    pub output: PathBuf,
}

/// Streams `n` realizations to the output file and returns their moments.
pub fn cmd_sample(args: &SampleArgs) -> Result<SampleSummary> {
    let params = args.params.resolve()?;
    let mut out = BufWriter::new(File::create(&args.output)?);
    match args.format {
        Format::Csv => writeln!(out, "re,im")?,
        Format::Binary => out.write_all(simulate::BINARY_MAGIC)?,
    }
    // Welford updates keep the moments exact to rounding for any n.
    let (mut k, mut mean, mut m2r, mut m2i, mut abs2) = (0f64, ComplexValue::new(0.0, 0.0), 0.0, 0.0, 0.0);
    simulate::stream_z(&params, args.n as usize, args.seed, |chunk| {
        for z in chunk {
            match args.format {
                Format::Csv => writeln!(out, "{},{}", fmt17(z.re), fmt17(z.im))?,
                Format::Binary => {
                    out.write_all(&z.re.to_le_bytes())?;
                    out.write_all(&z.im.to_le_bytes())?;
                }
            }
            k += 1.0;
            let delta = z - mean;
            mean += delta / k;
            m2r += delta.re * (z.re - mean.re);
            m2i += delta.im * (z.im - mean.im);
            abs2 += (z.norm_sqr() - abs2) / k;
        }
        Ok(())
    })?;
    out.flush()?;
    let var_denom = (k - 1.0).max(1.0);
    Ok(SampleSummary {
        params,
        seed: args.seed,
        n: args.n,
        mean_re: mean.re,
        mean_im: mean.im,
        se_re: (m2r / var_denom / k).sqrt(),
        se_im: (m2i / var_denom / k).sqrt(),
        mean_abs2: abs2,
        output: args.output.clone(),
    })
}

/// One JSON line of `gof`/`compare` output.
#[derive(Debug, Clone, Serialize)]
pub struct GofLine {
    pub target: Target,
    pub method: Option<&'static str>,
    pub params: ModelParams,
    #[serde(flatten)]
    pub report: GofReport,
}

fn load_samples(src: &SourceArgs, params: &ModelParams) -> Result<Vec<ComplexValue>> {
    match &src.input {
        Some(path) => {
            let z = simulate::read_batch_file(path)?;
            if z.is_empty() {
                return Err(Error::Parse(format!("{}: no samples", path.display())));
            }
            Ok(z)
        }
        None => Ok(simulate::sample_z(params, src.n as usize, src.seed)?.z),
    }
}

/// Support used for the legacy amplitude density, whose scale does not
/// depend on the variances.
pub fn legacy_support(params: &ModelParams) -> (f64, f64) {
    (0.0, (params.big_l as f64 + 40.0) / (1.0 - params.mu_abs))
}

/// Goodness of fit of `z` against one target density.
pub fn gof_against(
    z: &[ComplexValue],
    params: &ModelParams,
    target: Target,
    method: MethodChoice,
    t_terms: Option<u32>,
) -> Result<GofLine> {
    let (report, method) = match target {
        Target::Amplitude => {
            let r_max = pdfs::amplitude_tail_radius(params, 1e-12)?;
            let rep = simulate::gof(&simulate::amplitudes(z), |r| pdfs::amplitude_pdf(params, r), (0.0, r_max))?;
            (rep, None)
        }
        Target::AmplitudeLegacy => {
            let rep = simulate::gof(
                &simulate::amplitudes(z),
                |r| pdfs::amplitude_pdf_legacy(params, r),
                legacy_support(params),
            )?;
            (rep, None)
        }
        Target::Phase => {
            let engine = PhaseEngine::new(*params, method.into(), t_terms)?;
            let rep = simulate::gof(&simulate::phases(z), |t| engine.eval(t), (-PI, PI))?;
            let name = match method {
                MethodChoice::Exact => "exact",
                MethodChoice::Approx => "approx",
                MethodChoice::Quadrature => "quadrature",
            };
            (rep, Some(name))
        }
    };
    Ok(GofLine {
        target,
        method,
        params: *params,
        report,
    })
}

pub fn cmd_gof(args: &GofArgs) -> Result<GofLine> {
    let params = args.source.params.resolve()?;
    let z = load_samples(&args.source, &params)?;
    gof_against(&z, &params, args.target, args.method, args.t_terms)
}

/// Corrected amplitude, legacy amplitude and exact phase, in that order.
pub fn cmd_compare(args: &CompareArgs) -> Result<Vec<GofLine>> {
    let params = args.source.params.resolve()?;
    let z = load_samples(&args.source, &params)?;
    Ok(vec![
        gof_against(&z, &params, Target::Amplitude, MethodChoice::Exact, None)?,
        gof_against(&z, &params, Target::AmplitudeLegacy, MethodChoice::Exact, None)?,
        gof_against(&z, &params, Target::Phase, MethodChoice::Exact, None)?,
    ])
}

// ---------------------------------------------------------------------------
// Figures.

/// Files and checks written by `reproduce-figures`.
#[derive(Debug, Clone, Serialize)]
pub struct FigureManifest {
    pub out_dir: PathBuf,
    pub params: ModelParams,
    pub n: u64,
    pub seed: u64,
    pub files: Vec<PathBuf>,
    /// Cell-summed mass of the corrected joint grid, per L.
    pub joint_grid_mass: Vec<(u32, f64)>,
    /// Same for the legacy grid over the same window (not expected to be 1).
    pub legacy_grid_mass: Vec<(u32, f64)>,
}

const GL4_NODES: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GL4_WEIGHTS: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

/// Average of `f` over each cell of the grid, by 4×4 Gauss–Legendre.
/// Row-major in x, like [`simulate::Histogram2D`].
pub fn cell_average_grid<F>(x_edges: &[f64], y_edges: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let ny = y_edges.len() - 1;
    let rows = x_edges
        .par_windows(2)
        .map(|wx| {
            let (cx, hx) = (0.5 * (wx[0] + wx[1]), 0.5 * (wx[1] - wx[0]));
            y_edges
                .windows(2)
                .map(|wy| {
                    let (cy, hy) = (0.5 * (wy[0] + wy[1]), 0.5 * (wy[1] - wy[0]));
                    let mut acc = 0.0;
                    for (xi, wi) in GL4_NODES.iter().zip(GL4_WEIGHTS) {
                        for (yj, wj) in GL4_NODES.iter().zip(GL4_WEIGHTS) {
                            acc += wi * wj * f(cx + hx * xi, cy + hy * yj)?;
                        }
                    }
                    Ok(acc / 4.0)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let out: Vec<f64> = rows.into_iter().flatten().collect();
    debug_assert_eq!(out.len(), (x_edges.len() - 1) * ny);
    Ok(out)
}

fn grid_mass(x_edges: &[f64], y_edges: &[f64], density: &[f64]) -> f64 {
    let cell = (x_edges[1] - x_edges[0]) * (y_edges[1] - y_edges[0]);
    density.iter().sum::<f64>() * cell
}

fn write_matrix(path: &Path, x_edges: &[f64], y_edges: &[f64], density: &[f64]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let ny = y_edges.len() - 1;
    writeln!(out, "z_r,z_i,density")?;
    for (ix, wx) in x_edges.windows(2).enumerate() {
        let x = 0.5 * (wx[0] + wx[1]);
        for (iy, wy) in y_edges.windows(2).enumerate() {
            let y = 0.5 * (wy[0] + wy[1]);
            writeln!(out, "{},{},{}", fmt17(x), fmt17(y), fmt17(density[ix * ny + iy]))?;
        }
        // Blank line between scans for gnuplot's pm3d.
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn write_csv_file(path: &Path, header: &str, columns: &[Vec<f64>]) -> Result<()> {
    write_rows(BufWriter::new(File::create(path)?), header, columns)
}

fn fig1_script(orders: &[u32]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset terminal pngcairo size 1500,1000\nset output 'fig1.png'\n\
         set view map\nset size ratio -1\nunset key\nset multiplot layout 2,3\n",
    );
    for l in orders {
        s += &format!("set title 'simulated, L={l}'\nsplot 'hist2d_L{l}.csv' every ::1 using 1:2:3 with pm3d\n");
    }
    for l in orders {
        s += &format!(
            "set title 'analytic, L={l}'\nsplot 'joint_L{l}.csv' every ::1 using 1:2:3 with pm3d\n"
        );
    }
    s += "unset multiplot\n";
    s
}

fn fig2_script(orders: &[u32]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset terminal pngcairo size 1500,450\nset output 'fig2.png'\n\
         set key top right\nset xlabel 'r'\nset multiplot layout 1,3\n",
    );
    for l in orders {
        s += &format!(
            "set title 'L={l}'\nplot 'amplitude_hist_L{l}.csv' every ::1 using 1:2 with boxes title 'simulated', \\\n  \
             'amplitude_L{l}.csv' every ::1 using 1:2 with lines lw 2 title 'corrected', \\\n  \
             'amplitude_L{l}.csv' every ::1 using 1:3 with lines dt 2 title 'legacy'\n"
        );
    }
    s += "unset multiplot\n";
    s
}

fn fig3_script(orders: &[u32]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset terminal pngcairo size 1500,450\nset output 'fig3.png'\n\
         set key top left\nset xlabel 'theta'\nset xrange [-pi:pi]\nset multiplot layout 1,3\n",
    );
    for &l in orders {
        s += &format!(
            "set title 'L={l}'\nplot 'phase_hist_L{l}.csv' every ::1 using 1:2 with boxes title 'simulated', \\\n  \
             'phase_L{l}.csv' every ::1 using 1:2 with lines lw 2 title 'exact'"
        );
        if l >= 2 {
            s += &format!(", \\\n  'phase_L{l}.csv' every ::1 using 1:3 with lines dt 2 title 'series'");
        }
        s += "\n";
    }
    s += "unset multiplot\n";
    s
}

/// Writes three figure bundles under `out_dir`:
/// `fig1/` 2-D histograms with the corrected and legacy joint grids,
/// `fig2/` amplitude histograms with both amplitude densities,
/// `fig3/` phase histograms with the exact and (for L ≥ 2) series densities.
pub fn cmd_reproduce_figures(args: &FigureArgs) -> Result<FigureManifest> {
    let base = args.params.resolve()?;
    let bins = args.bins as usize;
    let dirs: Vec<PathBuf> = ["fig1", "fig2", "fig3"].iter().map(|d| args.out_dir.join(d)).collect();
    for d in &dirs {
        fs::create_dir_all(d)?;
    }
    let mut files = Vec::new();
    let mut joint_grid_mass = Vec::new();
    let mut legacy_grid_mass = Vec::new();

    for &l in &FIGURE_ORDERS {
        let p = base.with_l(l);
        let batch = simulate::sample_z(&p, args.n as usize, args.seed)?;

        // Figure 1: joint density on a window holding all but 1e-4 of the mass.
        let half = pdfs::amplitude_tail_radius(&p, 1e-4)?;
        let hist = simulate::histogram_2d(&batch.z, (bins, bins), (-half, half), (-half, half))?;
        let path = dirs[0].join(format!("hist2d_L{l}.csv"));
        write_matrix(&path, &hist.x_edges, &hist.y_edges, &hist.mass)?;
        files.push(path);
        let joint = cell_average_grid(&hist.x_edges, &hist.y_edges, |x, y| pdfs::joint_pdf(&p, x, y))?;
        joint_grid_mass.push((l, grid_mass(&hist.x_edges, &hist.y_edges, &joint)));
        let path = dirs[0].join(format!("joint_L{l}.csv"));
        write_matrix(&path, &hist.x_edges, &hist.y_edges, &joint)?;
        files.push(path);
        let legacy = cell_average_grid(&hist.x_edges, &hist.y_edges, |x, y| pdfs::joint_pdf_legacy(&p, x, y))?;
        legacy_grid_mass.push((l, grid_mass(&hist.x_edges, &hist.y_edges, &legacy)));
        let path = dirs[0].join(format!("joint_legacy_L{l}.csv"));
        write_matrix(&path, &hist.x_edges, &hist.y_edges, &legacy)?;
        files.push(path);

        // Figure 2: amplitude.
        let r_max = pdfs::amplitude_tail_radius(&p, 1e-6)?;
        let amps = batch.amplitudes();
        let h = simulate::histogram_1d(&amps, 100, (0.0, r_max))?;
        let path = dirs[1].join(format!("amplitude_hist_L{l}.csv"));
        write_csv_file(&path, "r,density", &[h.centers(), h.mass.clone()])?;
        files.push(path);
        let grid = pdfs::amplitude_grid(&p, r_max, 400);
        let corrected = eval_grid(&grid, |r| pdfs::amplitude_pdf(&p, r))?;
        let legacy = eval_grid(&grid, |r| pdfs::amplitude_pdf_legacy(&p, r))?;
        let path = dirs[1].join(format!("amplitude_L{l}.csv"));
        write_csv_file(&path, "r,density,density_legacy", &[grid, corrected, legacy])?;
        files.push(path);

        // Figure 3: phase.
        let h = simulate::histogram_1d(&batch.phases(), 100, (-PI, PI))?;
        let path = dirs[2].join(format!("phase_hist_L{l}.csv"));
        write_csv_file(&path, "theta,density", &[h.centers(), h.mass.clone()])?;
        files.push(path);
        let grid = closed_phase_grid(361);
        let exact = eval_grid(&grid, |t| pdfs::phase_pdf_exact(&p, t))?;
        let path = dirs[2].join(format!("phase_L{l}.csv"));
        if l >= 2 {
            let engine = PhaseEngine::new(p, PhaseMethod::SeriesApprox, None)?;
            let approx = eval_grid(&grid, |t| engine.eval(t).map(|v| v.max(0.0)))?;
            write_csv_file(&path, "theta,density_exact,density_approx", &[grid, exact, approx])?;
        } else {
            write_csv_file(&path, "theta,density_exact", &[grid, exact])?;
        }
        files.push(path);
    }

    for (dir, (name, script)) in dirs.iter().zip([
        ("fig1.gp", fig1_script(&FIGURE_ORDERS)),
        ("fig2.gp", fig2_script(&FIGURE_ORDERS)),
        ("fig3.gp", fig3_script(&FIGURE_ORDERS)),
    ]) {
        let path = dir.join(name);
        fs::write(&path, script)?;
        files.push(path);
    }

    let manifest = FigureManifest {
        out_dir: args.out_dir.clone(),
        params: base,
        n: args.n,
        seed: args.seed,
        files,
        joint_grid_mass,
        legacy_grid_mass,
    };
    fs::write(
        args.out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?,
    )?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("zpd").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn defaults_are_the_reference_experiment() {
        let Command::Sample(a) = parse(&["sample", "-o", "x.csv"]).command else {
            panic!("expected sample");
        };
        assert_eq!(a.n, 100_000);
        assert_eq!(a.params.resolve().unwrap(), ModelParams::reference(1));
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("p.toml");
        fs::write(&cfg, "sigma_x = 2.0\nmu_abs = 0.25\nL = 4\n").unwrap();
        let Command::Eval(a) = parse(&["eval", "--config", cfg.to_str().unwrap(), "--L", "6"]).command else {
            panic!("expected eval");
        };
        let p = a.params.resolve().unwrap();
        assert_eq!((p.sigma_x, p.sigma_y, p.mu_abs, p.big_l), (2.0, 1.5, 0.25, 6));

        fs::write(&cfg, "sigma = 2.0\n").unwrap();
        assert!(matches!(a.params.resolve(), Err(Error::Parse(_))));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["zpd", "sample", "-n", "0", "-o", "x.csv"]), EXIT_USAGE);
        assert_eq!(run(["zpd", "frobnicate"]), EXIT_USAGE);
    }

    #[test]
    fn invalid_parameters_exit_3() {
        assert_eq!(run(["zpd", "eval", "--mu-abs", "1.0"]), EXIT_DOMAIN);
        assert_eq!(run(["zpd", "eval", "--pdf", "phase", "--method", "approx", "--L", "1"]), EXIT_DOMAIN);
    }

    #[test]
    fn figure_scripts_reference_series_only_for_l_at_least_2() {
        let s = fig3_script(&FIGURE_ORDERS);
        assert!(!s.contains("'phase_L1.csv' every ::1 using 1:3"));
        assert!(s.contains("'phase_L5.csv' every ::1 using 1:3"));
        assert!(s.contains("'phase_L10.csv' every ::1 using 1:3"));
    }

    #[test]
    fn cell_average_of_constant() {
        let e: Vec<f64> = (0..=4).map(|i| i as f64 * 0.5).collect();
        let g = cell_average_grid(&e, &e, |_, _| Ok(2.0)).unwrap();
        assert!(g.iter().all(|v| (v - 2.0).abs() < 1e-15));
        assert!((grid_mass(&e, &e, &g) - 8.0).abs() < 1e-12);
    }
}
