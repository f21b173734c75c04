use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fracmax::gallery::{test_function, GalleryKind, GallerySpec, TestFunction};
use fracmax::harness::{self, ExperimentConfig, ExperimentId};
use fracmax::io;
use fracmax::maxop::{frac_maximal, frac_maximal_bruteforce_with_limit, frac_maximal_noncentered};
use fracmax::norms::{
    bmo_seminorm, campanato_seminorm, canonical_gradient, hajlasz_check, holder_seminorm, lebesgue_norm, morrey_norm,
    SeminormFamily, SeminormParams, SeminormResult, Witness,
};
use fracmax::regularity::{fit, DecayVariant, FitOptions};

/// Fractional maximal functions on sampled metric measure spaces.
#[derive(Parser)]
#[command(name = "fracmax", version)]
struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate M_a u at every sample point.
    Maxfn(MaxfnArgs),
    /// Evaluate a norm or seminorm with its witness.
    Seminorm(SeminormArgs),
    /// Hajłasz gradients.
    #[command(subcommand)]
    Gradient(GradientCommand),
    /// Measure regularity constants of a space.
    #[command(subcommand)]
    Decay(DecayCommand),
    /// Write a ready-made space and its field.
    Gallery(GalleryArgs),
    /// Run a theorem check or example reproduction.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct MaxfnArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    field: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    noncentered: bool,
    /// Use the brute-force evaluation.
    #[arg(long)]
    oracle: bool,
    /// Size limit for `--oracle`.
    #[arg(long, default_value_t = fracmax::maxop::ORACLE_LIMIT)]
    oracle_limit: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Lebesgue,
    Holder,
    Campanato,
    Morrey,
    Bmo,
}

#[derive(Args)]
struct SeminormArgs {
    #[arg(long)]
    space: PathBuf,
    #[arg(long)]
    field: PathBuf,
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum GradientCommand {
    /// Check |u(x)-u(y)| <= C d(x,y)^s (g(x)+g(y)) on every pair.
    Check {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        grad: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long = "C", default_value_t = 1.0)]
        constant: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the canonical s-gradient of a field.
    Canonical {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum DecayCommand {
    Fit {
        #[arg(long)]
        space: PathBuf,
        /// doubling, lower, annular or relative.
        #[arg(long)]
        variant: DecayVariant,
        #[arg(long)]
        ceiling: Option<f64>,
        #[arg(long)]
        ladder_depth: Option<u32>,
        /// Keep balls that reach past the truncation sites.
        #[arg(long)]
        include_boundary: bool,
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct GalleryArgs {
    /// grid1d, grid2d, buckley, buckley-weighted or cross.
    #[arg(long)]
    kind: GalleryKind,
    #[arg(long)]
    h: f64,
    #[arg(long, default_value_t = 3.0)]
    extent: f64,
    /// Downward arm of the cross space; defaults to the extent.
    #[arg(long)]
    depth: Option<f64>,
    /// Grid cap radius; defaults to the diameter.
    #[arg(long)]
    cap: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    field_out: Option<PathBuf>,
    /// Field for `--field-out` on grids, e.g. `bump` or `abs_power:0.5`.
    #[arg(long)]
    function: Option<TestFunction>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    experiment: ExperimentId,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    /// Annular-decay exponent; fitted when absent.
    #[arg(long)]
    delta: Option<f64>,
    /// Lower-bound exponent Q; fitted when absent.
    #[arg(long)]
    dimension: Option<f64>,
    /// Gradient constant to certify exactly.
    #[arg(long = "C")]
    constant: Option<f64>,
    #[arg(long = "C0")]
    c0: Option<f64>,
    /// Comma-separated resolutions; an empty list writes a header-only report.
    #[arg(long)]
    h_ladder: Option<String>,
    #[arg(long)]
    space: Option<GalleryKind>,
    #[arg(long)]
    extent: Option<f64>,
    #[arg(long)]
    depth: Option<f64>,
    #[arg(long)]
    cap: Option<f64>,
    #[arg(long)]
    function: Option<TestFunction>,
    #[arg(long)]
    noncentered: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot write {}", path.display()))?))
}

fn load(space: &Path, field: &Path) -> Result<(fracmax::MetricMeasureSpace, fracmax::ScalarField)> {
    let s = io::load_space(space).with_context(|| format!("reading {}", space.display()))?;
    let u = io::load_field(field).with_context(|| format!("reading {}", field.display()))?;
    Ok((s, u))
}

fn maxfn(a: MaxfnArgs) -> Result<ExitCode> {
    let (space, u) = load(&a.space, &a.field)?;
    let m = if a.oracle {
        frac_maximal_bruteforce_with_limit(&space, &u, a.alpha, a.noncentered, a.oracle_limit)?
    } else if a.noncentered {
        frac_maximal_noncentered(&space, &u, a.alpha)?
    } else {
        frac_maximal(&space, &u, a.alpha)?
    };
    io::write_max_field_csv(&m, create(&a.out)?)?;
    println!("points {} truncated {} max {}", m.len(), m.truncated_count(), m.values.max());
    Ok(ExitCode::SUCCESS)
}

fn seminorm(a: SeminormArgs) -> Result<ExitCode> {
    let (space, u) = load(&a.space, &a.field)?;
    let r = match a.family {
        Family::Lebesgue => {
            let value = lebesgue_norm(&space, &u, a.p)?;
            let params = SeminormParams { p: Some(a.p), ..Default::default() };
            SeminormResult {
                value,
                family: SeminormFamily::Lebesgue,
                params,
                witness: Witness::None,
                scanned: space.len(),
                truncated: false,
                at_min_radius: false,
                notes: Vec::new(),
            }
        }
        Family::Holder => holder_seminorm(&space, &u, a.beta)?,
        Family::Campanato => campanato_seminorm(&space, &u, a.p, a.beta)?,
        Family::Morrey => morrey_norm(&space, &u, a.p, a.beta)?,
        Family::Bmo => bmo_seminorm(&space, &u)?,
    };
    io::write_seminorm_csv(&r, create(&a.out)?)?;
    println!("{} {}", r.family.name(), r.value);
    for n in &r.notes {
        println!("note: {n}");
    }
    Ok(ExitCode::SUCCESS)
}

fn gradient(cmd: GradientCommand) -> Result<ExitCode> {
    match cmd {
        GradientCommand::Check { space, field, grad, s, constant, out } => {
            let (sp, u) = load(&space, &field)?;
            let g = io::load_field(&grad).with_context(|| format!("reading {}", grad.display()))?;
            let c = hajlasz_check(&sp, &u, &g, s, constant)?;
            if let Some(out) = out {
                io::write_certificate_csv(&c, create(&out)?)?;
            }
            let verdict = if c.passes { "pass" } else { "fail" };
            println!("{verdict} violation_ratio {} fitted_constant {}", c.violation_ratio, c.fitted_constant);
            Ok(if c.passes { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        GradientCommand::Canonical { space, field, s, out } => {
            let (sp, u) = load(&space, &field)?;
            let g = canonical_gradient(&sp, &u, s)?;
            io::write_field(&g, create(&out)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn decay(cmd: DecayCommand) -> Result<ExitCode> {
    let DecayCommand::Fit { space, variant, ceiling, ladder_depth, include_boundary, margin, out } = cmd;
    let sp = io::load_space(&space).with_context(|| format!("reading {}", space.display()))?;
    let mut opts = FitOptions { include_boundary, ..FitOptions::default() };
    if let Some(c) = ceiling {
        opts.ceiling = c;
    }
    if let Some(d) = ladder_depth {
        opts.ladder_depth = d;
    }
    if let Some(m) = margin {
        opts.margin = m;
    }
    let f = fit(&sp, variant, &opts)?;
    io::write_fit_csv(&f, create(&out)?)?;
    println!("{} C {} exponent {} samples {}", f.variant.name(), f.constant, f.exponent, f.samples);
    Ok(ExitCode::SUCCESS)
}

fn gallery(a: GalleryArgs) -> Result<ExitCode> {
    let spec =
        GallerySpec { kind: a.kind, step: a.h, extent: a.extent, depth: a.depth.unwrap_or(a.extent), cap: a.cap };
    let space = spec.build()?;
    io::save_space(&space, &a.out)?;
    if let Some(path) = a.field_out {
        let u = match (a.function, spec.default_field(&space)?) {
            (Some(f), _) => test_function(&space, f)?,
            (None, Some(u)) => u,
            (None, None) => bail!("--field-out on a grid needs --function"),
        };
        io::save_field(&u, &path)?;
    }
    println!("{} points {} mass {}", a.kind.name(), space.len(), space.total_mass());
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let mut c = ExperimentConfig::new(a.experiment);
    if let Some(kind) = a.space {
        let extent = a.extent.unwrap_or(c.extent);
        c = c.with_space(kind, extent);
    } else if let Some(e) = a.extent {
        let kind = c.space;
        c = c.with_space(kind, e);
    }
    if let Some(d) = a.depth {
        c.depth = d;
    }
    c.cap = a.cap;
    c.function = a.function;
    c.alpha = a.alpha;
    c.beta = a.beta;
    c.p = a.p;
    c.q = a.q;
    c.s = a.s;
    c.delta = a.delta;
    c.dimension = a.dimension;
    c.constant = a.constant;
    if let Some(c0) = a.c0 {
        c.c0 = c0;
    }
    if let Some(l) = &a.h_ladder {
        c.ladder = l
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().with_context(|| format!("bad resolution '{t}' in --h-ladder")))
            .collect::<Result<_>>()?;
    }
    c.noncentered = a.noncentered;
    let report = harness::run(&c)?;
    harness::emit_report(&report, &a.out)?;
    if let Some(svg) = &a.svg {
        harness::write_svg(&report, svg)?;
    }
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{}: {}", report.experiment, report.verdict)?;
    for n in &report.notes {
        writeln!(stdout, "note: {n}")?;
    }
    Ok(ExitCode::from(report.verdict.exit_code() as u8))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match cli.command {
        Command::Maxfn(a) => maxfn(a),
        Command::Seminorm(a) => seminorm(a),
        Command::Gradient(c) => gradient(c),
        Command::Decay(c) => decay(c),
        Command::Gallery(a) => gallery(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
