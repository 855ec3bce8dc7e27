use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hermite_potential::harness::emit::{load_sweep_csv, open_output};
use hermite_potential::harness::sweep::DEFAULT_BUDGET;
use hermite_potential::harness::{
    calibration_report, emit, emit_region, run_counterexample, run_sweep, sweep_report,
    CounterexampleKind, CounterexampleSpec, ExperimentReport, Format, GridAxis, Outcome,
    PairSampling, RadialInput, RegionReport, SweepSpec, SweepTarget,
};
use hermite_potential::kernels::KernelParams;
use hermite_potential::region::{ascii_raster, raster, RegionParams};
use hermite_potential::{Error, QuadConfig, Result};

#[derive(Parser, Debug)]
#[command(
    name = "hpot",
    version,
    about = "Harmonic-oscillator potential kernels: sweeps, envelope calibration, counterexamples, Lp-Lq region"
)]
struct Cli {
    /// Dimension
    #[arg(long, global = true, default_value_t = 1)]
    d: u32,
    /// Order of the potential operator
    #[arg(long, global = true, default_value_t = 0.5)]
    sigma: f64,
    /// Relative tolerance of every quadrature
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Output path, `-` for stdout
    #[arg(long, global = true, default_value = "-")]
    out: String,
    /// `csv` (rows) or `json` (whole report)
    #[arg(long, global = true, default_value = "csv")]
    format: Format,
    /// Seed of the point-pair orientations
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Maximum number of grid points of a sweep
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct Grid {
    /// Grid axis `NAME=log:lo:hi:n`, `NAME=lin:lo:hi:n` or `NAME=v1,v2,..`;
    /// overrides the default axis of that name
    #[arg(long = "axis")]
    axes: Vec<GridAxis>,
    /// Add the equal-norm and collinear pairs at every kernel node
    #[arg(long)]
    extremes: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Integral {
    I,
    J,
    E,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Kernel {
    Heat,
    Potential,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep of the integrals I_A, J_A or E_A against their envelopes
    Special {
        which: Integral,
        #[command(flatten)]
        grid: Grid,
    },
    /// Heat kernel or potential kernel at point pairs (single-value axes give a point)
    Kernel {
        which: Kernel,
        #[command(flatten)]
        grid: Grid,
    },
    /// Sweep any target and calibrate the envelope constants C, c1, c2
    Envelope {
        /// i-integral, j-integral, e-integral, heat-kernel, potential-kernel, l1-norm or operator-sample
        target: SweepTarget,
        /// Input of an operator-sample sweep
        #[arg(long, default_value = "ground")]
        input: RadialInput,
        #[command(flatten)]
        grid: Grid,
    },
    /// L1 norm of the potential kernel in y against its envelope
    L1norm {
        #[command(flatten)]
        grid: Grid,
    },
    /// The potential operator applied to a radial input: `ground`, `constant` or `ball:R`
    Operator {
        #[arg(long, default_value = "ground")]
        input: RadialInput,
        #[command(flatten)]
        grid: Grid,
    },
    /// Classify the n x n grid of (1/p, 1/q) = (i, j)/(n-1)
    Region {
        #[arg(long, default_value_t = 21)]
        grid: usize,
        /// Write a character raster instead of CSV or JSON
        #[arg(long)]
        ascii: bool,
    },
    /// Run a counterexample experiment: a, b, upper-triangle or sigma-half
    Counterexample {
        kind: CounterexampleKind,
        /// 1/p
        #[arg(long)]
        ip: Option<f64>,
        /// 1/q
        #[arg(long)]
        iq: Option<f64>,
        /// Range of |x| for slope fits
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        window: Option<Vec<f64>>,
        #[arg(long)]
        points: Option<usize>,
        /// Radii r of f_r, or the ε of f_ε
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Calibrate the envelope constants of a sweep CSV
    Calibrate { input: String },
}

fn default_axes(target: SweepTarget) -> &'static [&'static str] {
    match target {
        SweepTarget::IIntegral => &["A=0", "gamma=1", "T=log:1:50:30"],
        SweepTarget::JIntegral => &["A=-0.5", "gamma=1", "T=log:0.01:10:20", "S=log:0.1:100:20"],
        SweepTarget::EIntegral => &["A=0.5", "T=log:0.01:10:20", "S=log:0.1:100:20"],
        SweepTarget::HeatKernel => &[
            "T=log:0.01:10:10",
            "u=log:0.01:10:15",
            "norm_sum=log:0.1:10:15",
        ],
        SweepTarget::PotentialKernel => &["u=log:0.001:10:60", "norm_sum=log:0.1:10:50"],
        SweepTarget::L1Norm => &["xnorm=lin:0:10:50"],
        SweepTarget::OperatorSample => &["xnorm=lin:0:4:21"],
    }
}

impl Cli {
    fn cfg(&self) -> QuadConfig {
        self.rel_tol
            .map(QuadConfig::with_rel_tol)
            .unwrap_or_default()
    }

    fn kernel(&self) -> Result<KernelParams> {
        KernelParams::new(self.d, self.sigma)
    }

    fn spec(
        &self,
        target: SweepTarget,
        grid: &Grid,
        input: Option<RadialInput>,
    ) -> Result<SweepSpec> {
        let mut spec = SweepSpec {
            cfg: self.cfg(),
            seed: self.seed,
            budget: self.budget,
            input,
            pairs: if grid.extremes {
                PairSampling::RandomWithExtremes
            } else {
                PairSampling::Random
            },
            ..SweepSpec::new(target)
        };
        if !matches!(
            target,
            SweepTarget::IIntegral | SweepTarget::JIntegral | SweepTarget::EIntegral
        ) {
            spec = spec.kernel(self.kernel()?);
        }
        for axis in default_axes(target) {
            let a: GridAxis = axis.parse()?;
            spec = spec.axis(a.name, a.range);
        }
        for a in &grid.axes {
            spec = spec.axis(a.name, a.range.clone());
        }
        Ok(spec)
    }

    fn rows(&self, spec: &SweepSpec) -> Result<Outcome> {
        let mut report = ExperimentReport::new(spec.target.name(), spec.kernel);
        report.rows = run_sweep(spec)?;
        emit(&report, self.format, &self.out)?;
        Ok(Outcome::Pass)
    }

    fn report(&self, report: &ExperimentReport) -> Result<Outcome> {
        emit(report, self.format, &self.out)?;
        if let Some(c) = &report.calibration {
            eprintln!(
                "calibration: C = {:.6e}, c1 = {:.6}, c2 = {:.6} over {} rows",
                c.c, c.c1, c.c2, c.rows
            );
        }
        for c in &report.checks {
            eprintln!(
                "{} {}: measured {:.6}, expected {:.6}",
                if c.pass { "ok  " } else { "FAIL" },
                c.name,
                c.measured,
                c.expected
            );
        }
        eprintln!("verdict: {}", report.verdict);
        Ok(report.verdict)
    }

    fn run(&self) -> Result<Outcome> {
        match &self.cmd {
            Command::Special { which, grid } => {
                let target = match which {
                    Integral::I => SweepTarget::IIntegral,
                    Integral::J => SweepTarget::JIntegral,
                    Integral::E => SweepTarget::EIntegral,
                };
                self.rows(&self.spec(target, grid, None)?)
            }
            Command::Kernel { which, grid } => {
                let target = match which {
                    Kernel::Heat => SweepTarget::HeatKernel,
                    Kernel::Potential => SweepTarget::PotentialKernel,
                };
                self.rows(&self.spec(target, grid, None)?)
            }
            Command::L1norm { grid } => self.rows(&self.spec(SweepTarget::L1Norm, grid, None)?),
            Command::Operator { input, grid } => {
                self.rows(&self.spec(SweepTarget::OperatorSample, grid, Some(*input))?)
            }
            Command::Envelope {
                target,
                input,
                grid,
            } => {
                let input = (*target == SweepTarget::OperatorSample).then_some(*input);
                self.report(&sweep_report(&self.spec(*target, grid, input)?)?)
            }
            Command::Region { grid, ascii } => {
                let params = RegionParams::from_kernel(&self.kernel()?)?;
                if *ascii {
                    let mut w = open_output(&self.out)?;
                    return w
                        .write_all(ascii_raster(&params, *grid)?.as_bytes())
                        .and_then(|_| w.flush())
                        .map(|_| Outcome::Pass)
                        .map_err(|e| Error::Io {
                            path: self.out.clone(),
                            message: e.to_string(),
                        });
                }
                let report =
                    RegionReport::new(self.d, self.sigma, params, &raster(&params, *grid)?);
                emit_region(&report, self.format, &self.out)?;
                Ok(Outcome::Pass)
            }
            Command::Counterexample {
                kind,
                ip,
                iq,
                window,
                points,
                radii,
                tolerance,
            } => {
                let mut spec = CounterexampleSpec::new(*kind, self.kernel()?);
                spec.ip = *ip;
                spec.iq = *iq;
                spec.window = window.as_ref().map(|w| (w[0], w[1]));
                spec.points = points.unwrap_or(spec.points);
                spec.radii = radii.clone();
                spec.tolerance = tolerance.unwrap_or(spec.tolerance);
                self.report(&run_counterexample(&spec, &self.cfg())?)
            }
            Command::Calibrate { input } => {
                let rows = load_sweep_csv(input)?;
                let report = calibration_report("calibrate", None, rows, input)?;
                if report.calibration.is_none() {
                    return Err(Error::InsufficientSpread(format!(
                        "{input}: too few rows or too narrow a rate range"
                    )));
                }
                self.report(&report)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match cli.run() {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
