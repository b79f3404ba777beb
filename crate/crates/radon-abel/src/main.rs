//! Command-line front end: phantom definition, sinogram sampling,
//! reconstruction, comparison, and kernel profiling.
//!
//! Exit codes: 0 success, 2 usage error, 3 input-file error, 4 numerical
//! failure.

use clap::error::ErrorKind;
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use radon_abel::grid::GridError;
use radon_abel::phantom::PhantomError;
use radon_abel::reconstruction::{ReconError, Reference};
use radon_abel::sinogram::SinogramError;
use radon_abel::{
    compare, reconstruct_grid, sf_grid, GridGeom, KernelParams, Method, Phantom, RadonSource,
    ReconParams, ReconReport, Sinogram,
};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "radon-abel", version, about = "Inverse Radon transform via smooth Abel-type kernels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Worker threads for grid evaluation (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Suppress informational output on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a phantom description file built from piece flags.
    Phantom(PhantomArgs),
    /// Sample the analytic Radon transform of a phantom into a sinogram file.
    Sinogram(SinogramArgs),
    /// Reconstruct a grid from a phantom or a sinogram.
    Reconstruct(ReconstructArgs),
    /// Compare two grid CSVs, or a grid against a phantom's exact local averages.
    Compare(CompareArgs),
    /// Emit kernel samples and critical values as CSV.
    KernelProfile(KernelProfileArgs),
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    xmin: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    xmax: f64,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    ymin: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    ymax: f64,
    #[arg(long, default_value_t = 101)]
    nx: usize,
    #[arg(long, default_value_t = 101)]
    ny: usize,
}

impl GridArgs {
    fn geom(&self) -> Result<GridGeom, CliError> {
        GridGeom::new((self.xmin, self.xmax), (self.ymin, self.ymax), self.nx, self.ny)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Args)]
struct PhantomArgs {
    /// Disc piece (repeatable): --disc CX CY RHO AMP
    #[arg(long = "disc", num_args = 4, value_names = ["CX", "CY", "RHO", "AMP"],
          action = ArgAction::Append, allow_negative_numbers = true)]
    disc: Vec<f64>,
    /// Rectangle piece (repeatable): --rect CX CY HX HY AMP
    #[arg(long = "rect", num_args = 5, value_names = ["CX", "CY", "HX", "HY", "AMP"],
          action = ArgAction::Append, allow_negative_numbers = true)]
    rect: Vec<f64>,
    /// Phantom file to write.
    #[arg(long)]
    out: PathBuf,
    /// Also write the exact local-average grid to this CSV path.
    #[arg(long)]
    truth_grid: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct SinogramArgs {
    /// Phantom description file.
    #[arg(long)]
    phantom: PathBuf,
    /// Angular sample count.
    #[arg(long)]
    npsi: usize,
    /// Offset sample count.
    #[arg(long)]
    nt: usize,
    #[arg(long, allow_hyphen_values = true)]
    tmin: f64,
    #[arg(long, allow_hyphen_values = true)]
    tmax: f64,
    /// Sinogram file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Naive,
    Split,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Naive => Method::Naive,
            MethodArg::Split => Method::Split,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

#[derive(Args)]
struct ReconstructArgs {
    /// Phantom description file (analytic Radon data).
    #[arg(long, conflicts_with = "sinogram")]
    phantom: Option<PathBuf>,
    /// Sinogram file (sampled Radon data).
    #[arg(long)]
    sinogram: Option<PathBuf>,
    /// Smoothing parameter.
    #[arg(long)]
    alpha: f64,
    /// Peak interval half-width as a multiple of alpha.
    #[arg(long, default_value_t = 2.0)]
    epsilon_factor: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Split)]
    method: MethodArg,
    #[command(flatten)]
    grid: GridArgs,
    /// Midpoint panels over the angle.
    #[arg(long)]
    psi_panels: Option<usize>,
    /// Simpson panels for the naive single t rule.
    #[arg(long)]
    naive_panels: Option<usize>,
    /// Minimum Simpson panels on the peak interval.
    #[arg(long)]
    inner_panels: Option<usize>,
    /// Simpson panels on each tail interval.
    #[arg(long)]
    outer_panels: Option<usize>,
    /// Simpson panels per radial segment of the oracle path.
    #[arg(long)]
    oracle_panels: Option<usize>,
    /// Output prefix: writes PREFIX.csv, PREFIX.pgm and PREFIX.report.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Grid CSV to evaluate.
    a: PathBuf,
    /// Reference grid CSV.
    #[arg(conflicts_with = "phantom")]
    b: Option<PathBuf>,
    /// Phantom file; the reference becomes its exact local-average grid.
    #[arg(long)]
    phantom: Option<PathBuf>,
    /// Also write the report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KernelProfileArgs {
    #[arg(long)]
    alpha: f64,
    /// Evaluation point.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x2: f64,
    /// Angle of the line normal.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    psi: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    tmin: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    tmax: f64,
    /// Sample count over [tmin, tmax], endpoints included.
    #[arg(long, default_value_t = 1001)]
    samples: usize,
    /// CSV file to write.
    #[arg(long)]
    out: PathBuf,
}

enum CliError {
    Usage(String),
    Input(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}

fn chain(e: &dyn std::error::Error) -> String {
    let mut msg = e.to_string();
    let mut src = e.source();
    while let Some(s) = src {
        let _ = write!(msg, ": {s}");
        src = s.source();
    }
    msg
}

impl From<PhantomError> for CliError {
    fn from(e: PhantomError) -> Self {
        CliError::Input(chain(&e))
    }
}

impl From<SinogramError> for CliError {
    fn from(e: SinogramError) -> Self {
        CliError::Input(chain(&e))
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        CliError::Input(chain(&e))
    }
}

impl From<ReconError> for CliError {
    fn from(e: ReconError) -> Self {
        match e {
            ReconError::OracleNeedsPhantom | ReconError::Invalid(_) => {
                CliError::Usage(chain(&e))
            }
            other => CliError::Numeric(chain(&other)),
        }
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: failed to build thread pool: {e}");
            return 2;
        }
    };
    let quiet = cli.quiet;
    let result = pool.install(|| match cli.cmd {
        Cmd::Phantom(args) => cmd_phantom(args, quiet),
        Cmd::Sinogram(args) => cmd_sinogram(args, quiet),
        Cmd::Reconstruct(args) => cmd_reconstruct(args, quiet),
        Cmd::Compare(args) => cmd_compare(args, quiet),
        Cmd::KernelProfile(args) => cmd_kernel_profile(args, quiet),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn parse_pieces(args: &PhantomArgs) -> Result<Phantom, CliError> {
    let mut phantom = Phantom::default();
    for chunk in args.disc.chunks(4) {
        let p = Phantom::disc([chunk[0], chunk[1]], chunk[2], chunk[3])
            .map_err(|e| CliError::Usage(e.to_string()))?;
        phantom = phantom.merged(&p);
    }
    for chunk in args.rect.chunks(5) {
        let p = Phantom::rect([chunk[0], chunk[1]], [chunk[2], chunk[3]], chunk[4])
            .map_err(|e| CliError::Usage(e.to_string()))?;
        phantom = phantom.merged(&p);
    }
    Ok(phantom)
}

fn cmd_phantom(args: PhantomArgs, quiet: bool) -> Result<(), CliError> {
    let phantom = parse_pieces(&args)?;
    phantom.write(&args.out)?;
    if !quiet {
        println!(
            "wrote {} ({} pieces, support radius {})",
            args.out.display(),
            phantom.pieces().len(),
            phantom.support_radius()
        );
    }
    if let Some(path) = &args.truth_grid {
        let geom = args.grid.geom()?;
        sf_grid(&phantom, geom).write_csv(path)?;
        if !quiet {
            println!("wrote {} ({}x{} exact local averages)", path.display(), geom.nx, geom.ny);
        }
    }
    Ok(())
}

fn cmd_sinogram(args: SinogramArgs, quiet: bool) -> Result<(), CliError> {
    let phantom = Phantom::read(&args.phantom)?;
    if args.npsi < 2 || args.nt < 2 {
        return Err(CliError::Usage(format!(
            "need at least 2 samples per axis, got --npsi {} --nt {}",
            args.npsi, args.nt
        )));
    }
    if !(args.tmin < args.tmax) {
        return Err(CliError::Usage(format!(
            "--tmin {} must be below --tmax {}",
            args.tmin, args.tmax
        )));
    }
    let sino = Sinogram::sample(&phantom, args.npsi, args.nt, (args.tmin, args.tmax))?;
    let support = phantom.support_radius();
    if !sino.covers(support) {
        eprintln!(
            "warning: t range [{}, {}] does not cover the phantom support (radius {support}); \
             the sinogram clips the object",
            args.tmin, args.tmax
        );
    }
    sino.write(&args.out)?;
    if !quiet {
        println!(
            "wrote {} ({}x{} samples over [{}, {}])",
            args.out.display(),
            args.npsi,
            args.nt,
            args.tmin,
            args.tmax
        );
    }
    Ok(())
}

fn recon_params(args: &ReconstructArgs) -> ReconParams {
    let mut rp = ReconParams::default();
    if let Some(n) = args.psi_panels {
        rp.psi_panels = n;
    }
    if let Some(n) = args.naive_panels {
        rp.naive_t_panels = n;
    }
    if let Some(n) = args.inner_panels {
        rp.split_inner_panels = n;
    }
    if let Some(n) = args.outer_panels {
        rp.split_outer_panels = n;
    }
    if let Some(n) = args.oracle_panels {
        rp.oracle_segment_panels = n;
    }
    rp
}

fn cmd_reconstruct(args: ReconstructArgs, quiet: bool) -> Result<(), CliError> {
    let kp = KernelParams::with_epsilon_factor(args.alpha, args.epsilon_factor)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if args.alpha < 1e-6 {
        eprintln!(
            "warning: alpha={:e} puts the kernel peak above ~5e10; expect numerical breakdown",
            args.alpha
        );
    }
    let geom = args.grid.geom()?;
    let rp = recon_params(&args);
    rp.validate().map_err(|e| CliError::Usage(chain(&e)))?;
    let method: Method = args.method.into();

    let phantom = args.phantom.as_ref().map(Phantom::read).transpose()?;
    let sino = args.sinogram.as_ref().map(Sinogram::read).transpose()?;
    let src = match (&phantom, &sino) {
        (Some(p), None) => RadonSource::Phantom(p),
        (None, Some(s)) => RadonSource::Sinogram(s),
        _ => {
            return Err(CliError::Usage(
                "exactly one of --phantom or --sinogram is required".into(),
            ))
        }
    };

    if method == Method::Naive {
        let width = rp.naive_panel_width(src.t_support());
        if args.alpha < 4.0 * width {
            eprintln!(
                "warning: alpha={} is below 4 naive t panel widths ({width:.3e}); the kernel \
                 peak slips between samples. Use --method split or raise --naive-panels",
                args.alpha
            );
        }
    }

    let grid = reconstruct_grid(&src, &kp, geom, method, &rp)?;
    let csv_path = args.out.with_extension("csv");
    let pgm_path = args.out.with_extension("pgm");
    let report_path = args.out.with_extension("report.txt");
    grid.write_csv(&csv_path)?;
    grid.write_pgm(&pgm_path)?;

    let report = match &phantom {
        Some(p) => {
            let truth = sf_grid(p, geom);
            let cmp = compare(&grid, &truth)?;
            ReconReport::new(method, &kp, cmp, Reference::LocalAverage).to_string()
        }
        None => format!(
            "method: {method}\nalpha: {}\nepsilon: {}\nvalue range: [{:.6e}, {:.6e}]\n\
             (no analytic truth available from a sinogram source)\n",
            kp.alpha(),
            kp.epsilon(),
            grid.min_value(),
            grid.max_value()
        ),
    };
    std::fs::write(&report_path, &report).map_err(|e| CliError::Input(e.to_string()))?;
    if !quiet {
        println!(
            "wrote {}, {}, {}",
            csv_path.display(),
            pgm_path.display(),
            report_path.display()
        );
        print!("{report}");
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs, quiet: bool) -> Result<(), CliError> {
    let grid = radon_abel::ReconGrid::read_csv(&args.a)?;
    let (reference, label) = match (&args.b, &args.phantom) {
        (Some(b), None) => (radon_abel::ReconGrid::read_csv(b)?, Reference::OtherGrid),
        (None, Some(p)) => {
            let phantom = Phantom::read(p)?;
            (sf_grid(&phantom, *grid.geom()), Reference::LocalAverage)
        }
        _ => {
            return Err(CliError::Usage(
                "provide either a reference CSV or --phantom".into(),
            ))
        }
    };
    let cmp = compare(&grid, &reference)?;
    let mut report = String::new();
    let _ = writeln!(report, "reference: {label}");
    let _ = writeln!(report, "rmse: {:.6e}", cmp.rmse);
    let _ = writeln!(report, "max abs error: {:.6e}", cmp.max_abs_err);
    let _ = writeln!(
        report,
        "value range: [{:.6e}, {:.6e}]",
        cmp.min_value, cmp.max_value
    );
    let _ = writeln!(
        report,
        "reference range: [{:.6e}, {:.6e}]",
        cmp.ref_min, cmp.ref_max
    );
    let _ = writeln!(report, "overshoot beyond reference range: {:.6e}", cmp.overshoot());
    if let Some(path) = &args.out {
        std::fs::write(path, &report).map_err(|e| CliError::Input(e.to_string()))?;
    }
    if !quiet {
        print!("{report}");
    }
    Ok(())
}

fn cmd_kernel_profile(args: KernelProfileArgs, quiet: bool) -> Result<(), CliError> {
    let kp = KernelParams::new(args.alpha).map_err(|e| CliError::Usage(e.to_string()))?;
    if args.samples < 2 {
        return Err(CliError::Usage(format!(
            "--samples must be at least 2, got {}",
            args.samples
        )));
    }
    if !(args.tmin < args.tmax) {
        return Err(CliError::Usage(format!(
            "--tmin {} must be below --tmax {}",
            args.tmin, args.tmax
        )));
    }
    if args.alpha < 1e-6 {
        eprintln!(
            "warning: alpha={:e} puts the kernel peak above ~5e10; expect numerical breakdown",
            args.alpha
        );
    }
    let x = [args.x1, args.x2];
    let p = kp.profile(x, args.psi);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# kernel profile alpha={} x1={} x2={} psi={}",
        args.alpha, args.x1, args.x2, args.psi
    );
    let _ = writeln!(
        out,
        "# beta={} t_max={} peak_value={} t_min_left={} t_min_right={} min_value={} \
         zero_left={} zero_right={}",
        p.beta,
        p.t_max,
        p.peak_value,
        p.t_min_left,
        p.t_min_right,
        p.min_value,
        p.zero_crossings.0,
        p.zero_crossings.1
    );
    let _ = writeln!(out, "t,phi");
    let dt = (args.tmax - args.tmin) / (args.samples - 1) as f64;
    for i in 0..args.samples {
        let t = args.tmin + i as f64 * dt;
        let _ = writeln!(out, "{},{}", t, kp.phi(x, t, args.psi));
    }
    std::fs::write(&args.out, &out).map_err(|e| CliError::Input(e.to_string()))?;
    if !quiet {
        println!(
            "wrote {} ({} samples, peak {} at t={})",
            args.out.display(),
            args.samples,
            p.peak_value,
            p.t_max
        );
    }
    Ok(())
}
