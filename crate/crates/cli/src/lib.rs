//! The `disspec` command line: mode tables, spectra, counting functions,
//! verification runs, the γ ≈ 1 root path and region tagging.

pub mod format;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use disspec::contour::{count_roots, homotopy_sweep, ContourSpec};
use disspec::perturb::{implicit_derivative, track_root, track_root_admissible};
use disspec::polymode::{char_poly, char_poly_with_precision, working_precision, NATIVE_BITS};
use disspec::regions::{Region, RegionParams};
use disspec::rootfind::fujiwara_bound;
use disspec::spectrum::{classify_point, continuation_seeds, full_spectrum, mode_spectrum, solve_mode, SpectralPoint, Spectrum};
use disspec::weyl::{counting_function, fit_growth, leading_coefficient, weyl_coefficient_gt1, GammaProfile};

use format::{from_csv, to_csv, Cache, SpectrumFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "disspec", version, about = "Eigenvalues and incoming resonances of the dissipative unit ball")]
struct Cli {
    /// Working precision in bits; modes that need more use more.
    #[arg(long, global = true, env = "DISSPEC_PRECISION_BITS", default_value_t = NATIVE_BITS)]
    precision: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegionArg {
    Lambda,
    All,
    #[value(name = "R")]
    R,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Roots and spectral points of one mode, as CSV.
    Modes {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
    },
    /// Full spectrum of modes 0..=n_max to a .json or .csv file.
    Spectrum {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Counting function N(r) over a region, optionally with the quadratic fit.
    Weyl {
        #[arg(long)]
        gamma: f64,
        /// Defaults to ceil(1.3 r_max).
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        r_max: f64,
        /// Defaults to r_max / 2; also the start of the fit window.
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long, default_value_t = 51)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = RegionArg::Lambda)]
        region: RegionArg,
        #[arg(long)]
        fit: bool,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Absence of eigenvalues for 0 <= gamma < 1, checked two ways, plus root bounds.
    Verify {
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 21)]
        eps_steps: usize,
    },
    /// Track the root leaving w = 0 for gamma = 1 + eta.
    Perturb {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        eta_max: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        /// Halve eta_max until the root path is not lost.
        #[arg(long)]
        shrink: bool,
    },
    /// Region tags of every point of a spectrum file.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        c2: Option<f64>,
        #[arg(long)]
        a2: Option<f64>,
        #[arg(long)]
        bn: Option<f64>,
        #[arg(long)]
        nn: Option<u32>,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        dc: Option<f64>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c0: Option<f64>,
    },
}

/// A failed subcommand: exit code and message.
struct Failure(i32, String);

type Outcome = Result<i32, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

fn numeric(e: disspec::Error) -> Failure {
    Failure(EXIT_NUMERIC, e.to_string())
}

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    Failure(EXIT_NUMERIC, format!("{}: {e}", path.display()))
}

fn num(x: f64) -> String {
    ryu::Buffer::new().format(x).to_string()
}

/// Parse `args` (including the program name) and run the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let bits = cli.precision;
    let result = match cli.command {
        Command::Modes { n, gamma } => modes(n, gamma, bits, out),
        Command::Spectrum { gamma, n_max, out: path, cache } => spectrum(gamma, n_max, bits, &path, cache.as_deref(), err),
        Command::Weyl { gamma, n_max, r_max, r_min, steps, region, fit, cache } => {
            weyl(WeylArgs { gamma, n_max, r_max, r_min, steps, region, fit }, bits, cache.as_deref(), out, err)
        }
        Command::Verify { gamma, n_max, eps_steps } => verify(gamma, n_max, eps_steps, bits, out),
        Command::Perturb { n, eta_max, steps, shrink } => perturb(n, eta_max, steps, shrink, out),
        Command::Classify { input, c2, a2, bn, nn, c, dc, c1, c0 } => {
            classify(&input, Overrides { c2, a2, bn, nn, c, dc, c1, c0 }, out)
        }
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn check_gamma(gamma: f64) -> Result<(), Failure> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(usage(format!("--gamma must be finite and >= 0, got {gamma}")));
    }
    Ok(())
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure(EXIT_NUMERIC, format!("stdout: {e}")))
}

fn modes(n: usize, gamma: f64, bits: u32, out: &mut dyn Write) -> Outcome {
    check_gamma(gamma)?;
    let points = mode_spectrum(n, gamma, bits).map_err(numeric)?;
    write_out(out, &to_csv(&points))?;
    Ok(EXIT_OK)
}

/// The spectrum from the cache when it holds this exact key, else computed
/// (and stored).
fn load_or_compute(gamma: f64, n_max: usize, bits: u32, cache: Option<&Path>, err: &mut dyn Write) -> Result<SpectrumFile, Failure> {
    let cache = cache.map(Cache::new).transpose().map_err(|e| Failure(EXIT_NUMERIC, format!("cache: {e}")))?;
    if let Some(f) = cache.as_ref().and_then(|c| c.load(gamma, n_max, bits)) {
        let _ = writeln!(err, "using cached spectrum");
        return Ok(f);
    }
    let f = SpectrumFile::new(full_spectrum(gamma, n_max, bits));
    if let Some(c) = &cache {
        if f.metadata.failures.is_empty() {
            c.store(&f).map_err(|e| Failure(EXIT_NUMERIC, format!("cache: {e}")))?;
        }
    }
    Ok(f)
}

fn report_failures(f: &SpectrumFile, err: &mut dyn Write) -> i32 {
    for m in &f.metadata.failures {
        let _ = writeln!(err, "mode {} failed: {}", m.n, m.error);
    }
    if f.metadata.failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_NUMERIC
    }
}

fn spectrum(gamma: f64, n_max: usize, bits: u32, path: &Path, cache: Option<&Path>, err: &mut dyn Write) -> Outcome {
    check_gamma(gamma)?;
    let text_of = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => |f: &SpectrumFile| f.to_json(),
        Some("csv") => |f: &SpectrumFile| to_csv(&f.points),
        _ => return Err(usage("--out must end in .json or .csv")),
    };
    let f = load_or_compute(gamma, n_max, bits, cache, err)?;
    fs::write(path, text_of(&f)).map_err(|e| io_error(path, e))?;
    let _ = writeln!(err, "{} points from modes 0..={n_max} written to {}", f.points.len(), path.display());
    Ok(report_failures(&f, err))
}

struct WeylArgs {
    gamma: f64,
    n_max: Option<usize>,
    r_max: f64,
    r_min: Option<f64>,
    steps: usize,
    region: RegionArg,
    fit: bool,
}

fn weyl(a: WeylArgs, bits: u32, cache: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    check_gamma(a.gamma)?;
    if !(a.r_max > 0.0 && a.r_max.is_finite()) {
        return Err(usage("--r-max must be positive"));
    }
    let r_min = a.r_min.unwrap_or(0.5 * a.r_max);
    if !(r_min > 0.0 && r_min < a.r_max) || a.steps < 2 {
        return Err(usage("need 0 < r_min < r_max and steps >= 2"));
    }
    let n_max = a.n_max.unwrap_or((1.3 * a.r_max).ceil() as usize);
    let f = load_or_compute(a.gamma, n_max, bits, cache, err)?;
    let failed = report_failures(&f, err);
    let params = f.metadata.region_params;
    let s = f.into_spectrum();
    let radii: Vec<f64> = (0..a.steps).map(|k| r_min + (a.r_max - r_min) * k as f64 / (a.steps - 1) as f64).collect();
    let (region, name) = match a.region {
        RegionArg::Lambda => (Some(Region::Lambda), "Lambda"),
        RegionArg::All => (None, "all"),
        RegionArg::R => (Some(Region::R), "R_region"),
    };
    let cs = counting_function(&s, region, &params, &radii).map_err(|e| usage(e.to_string()))?;
    let mut text = String::from("r,count\n");
    for (r, c) in cs.radii.iter().zip(&cs.counts) {
        writeln!(text, "{},{c}", num(*r)).expect("write to string");
    }
    writeln!(
        text,
        "# region={name} gamma={} n_max={n_max} C2={} A2={} B_N={} N={} c={} D_c={} C1={} C0={} truncated={}",
        num(a.gamma),
        num(params.C2),
        num(params.A2),
        num(params.B_N),
        params.N,
        num(params.c),
        num(params.D_c),
        num(params.C1),
        num(params.C0),
        cs.truncated
    )
    .expect("write to string");
    if a.fit {
        match fit_growth(&cs, r_min, a.r_max) {
            Ok(g) => writeln!(text, "# fit window=[{}, {}] a2={} a1={} rel_resid={}", num(g.r_min), num(g.r_max), num(g.a2), num(g.a1), num(g.rel_resid)),
            Err(e) => writeln!(text, "# fit window=[{}, {}] unavailable: {e}", num(r_min), num(a.r_max)),
        }
        .expect("write to string");
        let target = if matches!(a.region, RegionArg::R) {
            weyl_coefficient_gt1(3, a.gamma).ok()
        } else {
            leading_coefficient(3, GammaProfile::Constant(a.gamma), 0).ok()
        };
        match target {
            Some(t) => writeln!(text, "# target a2={}", num(t)),
            None => writeln!(text, "# target a2 undefined for this gamma and region"),
        }
        .expect("write to string");
    }
    write_out(out, &text)?;
    Ok(failed)
}

fn verify(gamma: f64, n_max: usize, eps_steps: usize, bits: u32, out: &mut dyn Write) -> Outcome {
    if !(gamma >= 0.0 && gamma < 1.0) {
        return Err(usage(format!("verify needs 0 <= gamma < 1, got {gamma}")));
    }
    if eps_steps < 2 {
        return Err(usage("--eps-steps must be at least 2"));
    }
    let half_disk = ContourSpec::half_disk(2.0);
    let mut eigen = Vec::new();
    let mut nonzero_q = Vec::new();
    let mut bound_bad = Vec::new();
    let mut vieta_bad = Vec::new();
    let mut points: Vec<SpectralPoint> = Vec::new();
    let mut seeds = Vec::new();
    let mut min_re = f64::INFINITY;
    for n in 0..=n_max {
        let sol = solve_mode(n, gamma, bits, &seeds).map_err(numeric)?;
        seeds = continuation_seeds(&sol.roots, n);
        let set = &sol.roots;
        if set.roots.iter().any(|w| w.re > 0.0) {
            eigen.push(n);
        }
        min_re = set.roots.iter().map(|w| w.re.abs()).fold(min_re, f64::min);
        let q = count_roots(&char_poly(n, gamma), &half_disk).map_err(|e| numeric(e.in_mode(n, gamma)))?;
        let sweep = homotopy_sweep(n, gamma, eps_steps, false).map_err(|e| numeric(e.in_mode(n, gamma)))?;
        if q.count != 0 || sweep.iter().any(|r| r.count != 0) {
            nonzero_q.push(n);
        }
        let p = char_poly_with_precision(n, gamma, working_precision(n, bits));
        let m = set.max_modulus();
        if m > fujiwara_bound(&p) || m > 1.0 + 1e-10 {
            bound_bad.push(n);
        }
        if set.vieta_defect(&p) > set.vieta_tolerance() {
            vieta_bad.push(n);
        }
        points.extend(sol.points);
    }
    let s = Spectrum {
        gamma,
        n_max,
        points,
        precision_bits: bits,
        tool_version: String::new(),
        timestamp: String::new(),
        zero_root_modes: vec![],
        failures: vec![],
    };
    let unpaired = s.unpaired().len();
    let worst_hankel = s.points.iter().map(|p| p.hankel_residual).fold(0.0, f64::max);
    let mut ok = true;
    let mut line = |pass: bool, msg: String| {
        ok &= pass;
        format!("{}: {msg}\n", if pass { "PASS" } else { "FAIL" })
    };
    let mut text = String::new();
    text += &line(nonzero_q.is_empty(), if nonzero_q.is_empty() {
        format!("q_n(ε)=0 for all n ≤ {n_max}, ε-grid {eps_steps}")
    } else {
        format!("q_n(ε) nonzero for n in {nonzero_q:?}")
    });
    text += &line(eigen.is_empty(), format!("no roots with Re w > 0 for n ≤ {n_max} (min |Re w| = {})", num(min_re)));
    text += &line(bound_bad.is_empty(), format!("|w| ≤ M_n and |w| ≤ 1 + 1e-10 (violations: {bound_bad:?})"));
    text += &line(vieta_bad.is_empty(), format!("Vieta root sums within error radii (violations: {vieta_bad:?})"));
    text += &line(unpaired == 0, format!("conjugate symmetry ({unpaired} unpaired points)"));
    text += &line(worst_hankel <= 1e-8, format!("Hankel residuals ≤ 1e-8 (worst {})", num(worst_hankel)));
    write_out(out, &text)?;
    Ok(if ok { EXIT_OK } else { EXIT_VERIFY })
}

fn perturb(n: usize, eta_max: f64, steps: usize, shrink: bool, out: &mut dyn Write) -> Outcome {
    if !(eta_max > 0.0 && eta_max <= 0.1) || steps < 5 {
        return Err(usage("need 0 < eta_max <= 0.1 and steps >= 5"));
    }
    let path = if shrink { track_root_admissible(n, eta_max, steps, 40) } else { track_root(n, eta_max, steps) }.map_err(numeric)?;
    let mut text = String::from("eta,w,lambda\n");
    for ((e, w), l) in path.etas.iter().zip(&path.ws).zip(&path.lambdas) {
        writeln!(text, "{},{},{}", num(*e), num(*w), l.map(num).unwrap_or_default()).expect("write to string");
    }
    let implicit = implicit_derivative(n);
    let diff = (path.derivative_at_zero - implicit).abs();
    let signs = path.etas.iter().zip(&path.ws).all(|(e, w)| *e == 0.0 || e.signum() == w.signum());
    writeln!(
        text,
        "# eta_max={} derivative_at_zero={} implicit_derivative={} min_gap={} min_slope={}",
        num(*path.etas.last().expect("nonempty")),
        num(path.derivative_at_zero),
        num(implicit),
        num(path.min_gap),
        num(path.min_slope)
    )
    .expect("write to string");
    let pass = diff <= 1e-6 && signs;
    writeln!(text, "{}: |w'(0) - 1/2| = {} and sign(w) = sign(eta) {}", if pass { "PASS" } else { "FAIL" }, num(diff), if signs { "holds" } else { "fails" })
        .expect("write to string");
    write_out(out, &text)?;
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}

struct Overrides {
    c2: Option<f64>,
    a2: Option<f64>,
    bn: Option<f64>,
    nn: Option<u32>,
    c: Option<f64>,
    dc: Option<f64>,
    c1: Option<f64>,
    c0: Option<f64>,
}

impl Overrides {
    fn apply(&self, mut p: RegionParams) -> RegionParams {
        let set = |v: &mut f64, o: Option<f64>| {
            if let Some(x) = o {
                *v = x;
            }
        };
        set(&mut p.C2, self.c2);
        set(&mut p.A2, self.a2);
        set(&mut p.B_N, self.bn);
        set(&mut p.c, self.c);
        set(&mut p.D_c, self.dc);
        set(&mut p.C1, self.c1);
        set(&mut p.C0, self.c0);
        if let Some(n) = self.nn {
            p.N = n;
        }
        p
    }
}

fn classify(input: &Path, o: Overrides, out: &mut dyn Write) -> Outcome {
    let text = fs::read_to_string(input).map_err(|e| usage(format!("{}: {e}", input.display())))?;
    let (points, base) = match input.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let f = SpectrumFile::from_json(&text).map_err(usage)?;
            (f.points, f.metadata.region_params)
        }
        Some("csv") => (from_csv(&text).map_err(usage)?, RegionParams::unit()),
        _ => return Err(usage("--in must end in .json or .csv")),
    };
    let params = o.apply(base);
    params.validate().map_err(|e| usage(e.to_string()))?;
    let mut s = String::from("n,re_lambda,im_lambda,class,regions\n");
    for p in &points {
        let tags: Vec<&str> = classify_point(p, &params).into_iter().map(Region::tag).collect();
        let tags = if tags.is_empty() { "none".to_string() } else { tags.join(";") };
        writeln!(s, "{},{},{},{},{tags}", p.n, num(p.lambda.re), num(p.lambda.im), p.class.as_str()).expect("write to string");
    }
    write_out(out, &s)?;
    Ok(EXIT_OK)
}
