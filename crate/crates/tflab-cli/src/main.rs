//! `tflab`: command line front end for the time-frequency laboratory.
//!
//! Five commands cover the lab bench:
//!
//! ```text
//!     tflab stft    --signal gauss --window gauss         short-time Fourier transform
//!     tflab wigner  --tau 0.5 --f gauss --g gauss         cross tau-Wigner distribution
//!     tflab locop   --symbol gauss2d:sx=1,sw=1 --eig      localization operator + spectrum
//!     tflab modnorm --p 2 --q 2 --weight const:c=1,dim=2  weighted modulation norm
//!     tflab verify  <suite> [--seed S] [--n N]            verification suite + report
//! ```
//!
//! Every command accepts `--config <path>`, a flat key=value file whose keys
//! mirror the long flag names (`n`, `period`, `signal`, `window`, `f`, `g`,
//! `tau`, `symbol`, `phi1`, `phi2`, `quantize`, `overlaps`, `lattice`,
//! `weight`, `p`, `q`, `seed`, `out`, `format`); explicit flags override file
//! values. Output goes to `--out`, the config `out`, the `TFLAB_OUT`
//! environment variable, or the working directory, in that order.
//!
//! Signals and windows are spec strings:
//!
//! ```text
//!     gauss               Gaussian e^{-pi x^2}, normalized to unit norm on the grid
//!     hermite:<k>         k-th Hermite function
//!     random:<seed>       seeded band-limited noise, unit norm
//!     shift:x=<a>,w=<b>   time-frequency shifted unit Gaussian
//!     file:<path>         SampledSignal JSON, must live on the configured grid
//! ```
//!
//! Array payloads (phase-space fields) are written as JSON and/or CSV
//! according to `--format`; scalar reports (spectrum, modnorm, verify) are
//! always JSON. `stft` and `wigner` additionally emit a plot-ready
//! `*_abs.csv` magnitude table.
//!
//! Exit codes form the CI contract:
//!
//! ```text
//!     0   success (verify: suite passed)
//!     1   verify suite ran cleanly and failed, or an I/O error
//!     2   usage or config parse error (including clap's own)
//!     3   numeric precondition or convergence failure
//!     4   structural precondition failure (grid mismatch, non-Hermitian --eig)
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;
use tflab_core::gabor::{mod_norm, Lattice};
use tflab_core::grid::{dft, GridSpec, SampledSignal};
use tflab_core::ops::{localization_matrix, tau_quantization_matrix, OperatorMatrix, Symbol};
use tflab_core::spectral::{
    decay_fit, default_gamma_grid, hermite_functions, hermitian_eig, phase_space_decay_fit,
    DecayFitSummary, SpectrumReport,
};
use tflab_core::tfr::{stft, tau_wigner, tf_shift, PhaseSpaceField, TFPoint};
use tflab_core::verify::{run_suite, VerifyConfig, SUITES};
use tflab_core::weights::parse_weight;
use tflab_core::{Error, Result};

/// Grid size when neither the flags nor the config choose one.
const DEFAULT_N: usize = 128;

/// Relative Frobenius defect above which an operator is treated as
/// non-Hermitian. Same threshold as the eigensolver's own guard, but raised
/// here as a structural error (exit 4) before the solver can turn the
/// condition into a numeric one.
const HERMITIAN_DEFECT_TOL: f64 = 1e-10;

/// Relative floor for the decay fits inside spectrum reports.
const DECAY_FLOOR: f64 = 1e-10;

/// Suites that draw random trials and therefore demand an explicit seed.
const RANDOMIZED_SUITES: [&str; 8] = [
    "weights",
    "wigner-stft",
    "frames",
    "young-holder",
    "matrix-element",
    "stft-expansion",
    "schur",
    "conv-relation",
];

#[derive(Parser, Debug)]
#[command(
    name = "tflab",
    version,
    about = "Numerical laboratory for time-frequency localization operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug)]
struct Common {
    /// Flat key=value config file; explicit flags override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (falls back to config `out`, then $TFLAB_OUT, then `.`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Comma-separated formats for array payloads: json, csv.
    #[arg(long, value_name = "LIST")]
    format: Option<String>,

    /// Grid size n (a power of two, at least 8).
    #[arg(long, value_name = "N")]
    n: Option<usize>,

    /// Grid period L (defaults to sqrt(n)).
    #[arg(long, value_name = "L", alias = "L")]
    period: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Short-time Fourier transform of a signal against a window.
    Stft {
        #[command(flatten)]
        common: Common,
        /// Signal spec: gauss, hermite:<k>, random:<seed>, shift:x=<a>,w=<b>, file:<path>.
        #[arg(long, value_name = "SPEC")]
        signal: Option<String>,
        /// Window spec (same grammar as --signal).
        #[arg(long, value_name = "SPEC")]
        window: Option<String>,
    },
    /// Cross tau-Wigner distribution of a pair of signals.
    Wigner {
        #[command(flatten)]
        common: Common,
        /// Quantization parameter in [0,1]; 0 and 1 are the Rihaczek forms.
        #[arg(long, value_name = "TAU", value_parser = tau_in_range)]
        tau: Option<f64>,
        /// First signal spec.
        #[arg(long, value_name = "SPEC")]
        f: Option<String>,
        /// Second signal spec.
        #[arg(long, value_name = "SPEC")]
        g: Option<String>,
    },
    /// Build a localization operator (or a tau-quantized symbol) and
    /// optionally eigendecompose it.
    Locop {
        #[command(flatten)]
        common: Common,
        /// Symbol spec: const:<c>, gauss2d:sx=<v>,sw=<v>, field:<path.json>.
        #[arg(long, value_name = "SPEC")]
        symbol: Option<String>,
        /// Analysis window spec.
        #[arg(long, value_name = "SPEC")]
        phi1: Option<String>,
        /// Synthesis window spec.
        #[arg(long, value_name = "SPEC")]
        phi2: Option<String>,
        /// Build the tau-quantization of the symbol instead; windows are ignored.
        #[arg(long, value_name = "TAU", value_parser = tau_in_range)]
        quantize: Option<f64>,
        /// Eigendecompose (Hermitian operators only) and write spectrum.json.
        #[arg(long)]
        eig: bool,
        /// How many Hermite overlaps the spectrum report carries.
        #[arg(long, value_name = "COUNT")]
        overlaps: Option<usize>,
    },
    /// Weighted modulation norm of a signal on a Gabor lattice.
    Modnorm {
        #[command(flatten)]
        common: Common,
        /// Signal spec.
        #[arg(long, value_name = "SPEC")]
        signal: Option<String>,
        /// Window spec.
        #[arg(long, value_name = "SPEC")]
        window: Option<String>,
        /// Lattice spec lat:a=<step>,b=<step>.
        #[arg(long, value_name = "SPEC")]
        lattice: Option<String>,
        /// Weight spec, e.g. subexp:gamma=2,k=0.5,dim=2.
        #[arg(long, value_name = "SPEC")]
        weight: Option<String>,
        /// Time exponent p: a positive number or inf.
        #[arg(long, value_name = "P")]
        p: Option<String>,
        /// Frequency exponent q: a positive number or inf.
        #[arg(long, value_name = "Q")]
        q: Option<String>,
    },
    /// Run one verification suite (or `all`) and write its JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite name: weights, wigner-stft, kernel-equality, frames,
        /// young-holder, matrix-element, stft-expansion, schur, schatten,
        /// conv-relation, decay, or all.
        suite: String,
        /// Seed for randomized trials (required by the randomized suites).
        #[arg(long, value_name = "SEED")]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Map library errors onto the documented exit codes.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) => 2,
        Error::Numeric(_) | Error::Convergence(_) => 3,
        Error::Structural(_) | Error::FrameFailure { .. } => 4,
        Error::Io(_) => 1,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Stft { common, signal, window } => {
            let cfg = load_config(common.config.as_deref())?;
            cmd_stft(&common, &cfg, signal, window)
        }
        Command::Wigner { common, tau, f, g } => {
            let cfg = load_config(common.config.as_deref())?;
            cmd_wigner(&common, &cfg, tau, f, g)
        }
        Command::Locop { common, symbol, phi1, phi2, quantize, eig, overlaps } => {
            let cfg = load_config(common.config.as_deref())?;
            cmd_locop(&common, &cfg, symbol, phi1, phi2, quantize, eig, overlaps)
        }
        Command::Modnorm { common, signal, window, lattice, weight, p, q } => {
            let cfg = load_config(common.config.as_deref())?;
            cmd_modnorm(&common, &cfg, signal, window, lattice, weight, p, q)
        }
        Command::Verify { common, suite, seed } => {
            let cfg = load_config(common.config.as_deref())?;
            cmd_verify(&common, &cfg, &suite, seed)
        }
    }
}

// ---- Configuration ----

type Config = BTreeMap<String, String>;

/// Load a flat key=value config file. Blank lines and `#` comments are
/// skipped, later assignments win, and a value keeps everything after the
/// first `=`, so spec strings like `symbol=gauss2d:sx=1,sw=1` survive.
fn load_config(path: Option<&Path>) -> Result<Config> {
    let mut map = Config::new();
    let Some(path) = path else {
        return Ok(map);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(format!("config {}: {e}", path.display())))?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(format!(
                "config {} line {}: expected key=value, got '{line}'",
                path.display(),
                idx + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Flag value if given, else the config value under `key`.
fn pick(flag: Option<String>, cfg: &Config, key: &str) -> Option<String> {
    flag.or_else(|| cfg.get(key).cloned())
}

/// Parse a config value, tagging errors with the key name.
fn cfg_parse<T: FromStr>(cfg: &Config, key: &str) -> Result<Option<T>> {
    match cfg.get(key) {
        None => Ok(None),
        Some(s) => s
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::parse(format!("config key {key}: cannot parse '{s}'"))),
    }
}

fn resolve_grid(common: &Common, cfg: &Config) -> Result<GridSpec> {
    let n = match common.n {
        Some(n) => n,
        None => cfg_parse::<usize>(cfg, "n")?.unwrap_or(DEFAULT_N),
    };
    let period = match common.period {
        Some(p) => Some(p),
        None => match cfg_parse::<f64>(cfg, "period")? {
            Some(p) => Some(p),
            None => cfg_parse::<f64>(cfg, "L")?,
        },
    };
    GridSpec::new(n, period)
}

// ---- Spec parsers ----

/// Clap-level validation for `--tau` and `--quantize`: the same range check
/// the library applies, raised at the usage layer so a bad flag exits 2.
fn tau_in_range(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("tau must lie in [0,1], got {v}"))
    }
}

/// The same validation for config-sourced values, as a parse error.
fn check_tau(v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::parse(format!("tau must lie in [0,1], got {v}")))
    }
}

/// Lebesgue exponent: a positive number or `inf`.
fn parse_exponent(s: &str) -> Result<f64> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    t.parse::<f64>()
        .map_err(|_| Error::parse(format!("exponent '{s}' is not a number or inf")))
}

fn exponent_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_string()
    } else {
        format!("{p}")
    }
}

/// Scale to unit L2 norm. Generated atoms are normalized so inner products
/// read directly as correlations; file-backed signals are left alone.
fn unit(mut f: SampledSignal) -> SampledSignal {
    let nrm = f.norm();
    if nrm > 0.0 {
        f.scale(Complex64::new(1.0 / nrm, 0.0));
    }
    f
}

/// Build a signal from a spec string on the given grid.
fn parse_signal(spec: &str, grid: GridSpec) -> Result<SampledSignal> {
    let spec = spec.trim();
    if spec == "gauss" {
        return Ok(unit(SampledSignal::gaussian(grid)));
    }
    if let Some(rest) = spec.strip_prefix("hermite:") {
        let k: usize = rest
            .parse()
            .map_err(|_| Error::parse(format!("hermite order '{rest}' is not an integer")))?;
        let mut family = hermite_functions(k + 1, grid)?;
        return Ok(family.pop().expect("a family of k+1 functions has a last member"));
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        let seed: u64 = rest
            .parse()
            .map_err(|_| Error::parse(format!("random seed '{rest}' is not an integer")))?;
        return Ok(unit(SampledSignal::random_bandlimited(grid, seed)));
    }
    if let Some(rest) = spec.strip_prefix("shift:") {
        let mut x = 0.0;
        let mut w = 0.0;
        for part in rest.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("shift field '{part}' is not key=value")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("shift offset '{value}' is not a number")))?;
            match key.trim() {
                "x" => x = value,
                "w" => w = value,
                other => return Err(Error::parse(format!("unknown shift field '{other}'"))),
            }
        }
        let base = unit(SampledSignal::gaussian(grid));
        return Ok(tf_shift(&base, TFPoint::new(x, w)));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)?;
        let f = SampledSignal::from_json(&text)?;
        if f.grid() != grid {
            return Err(Error::structural(format!(
                "signal file {path} lives on n={}, L={}, expected n={}, L={}",
                f.grid().n(),
                f.grid().period(),
                grid.n(),
                grid.period()
            )));
        }
        return Ok(f);
    }
    Err(Error::parse(format!(
        "unknown signal spec '{spec}'; expected gauss, hermite:<k>, random:<seed>, \
         shift:x=<a>,w=<b>, or file:<path>"
    )))
}

// ---- Output ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Formats {
    json: bool,
    csv: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats { json: true, csv: false }
    }
}

fn parse_formats(list: &str) -> Result<Formats> {
    let mut f = Formats { json: false, csv: false };
    for part in list.split(',') {
        match part.trim() {
            "" => continue,
            "json" => f.json = true,
            "csv" => f.csv = true,
            other => {
                return Err(Error::parse(format!(
                    "unknown output format '{other}'; expected a subset of json,csv"
                )))
            }
        }
    }
    if !f.json && !f.csv {
        return Err(Error::parse("format list selects nothing; expected json, csv, or both"));
    }
    Ok(f)
}

fn resolve_formats(common: &Common, cfg: &Config) -> Result<Formats> {
    match pick(common.format.clone(), cfg, "format") {
        Some(list) => parse_formats(&list),
        None => Ok(Formats::default()),
    }
}

/// `--out` beats config `out` beats `$TFLAB_OUT` beats the working directory.
fn resolve_out_dir(flag: Option<&Path>, cfg_value: Option<&str>, env_value: Option<&str>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = cfg_value {
        return PathBuf::from(p);
    }
    if let Some(p) = env_value {
        return PathBuf::from(p);
    }
    PathBuf::from(".")
}

fn out_dir(common: &Common, cfg: &Config) -> Result<PathBuf> {
    let env = std::env::var("TFLAB_OUT").ok();
    let dir = resolve_out_dir(
        common.out.as_deref(),
        cfg.get("out").map(|s| s.as_str()),
        env.as_deref(),
    );
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, text)?;
    println!("wrote {}", path.display());
    Ok(path)
}

/// CSV rows `m,k,x,w,abs` under the same grid-metadata comment the field's
/// own CSV uses: the plot-ready magnitude table.
fn field_abs_csv(field: &PhaseSpaceField) -> String {
    let g = field.grid();
    let freq = g.conjugate();
    let mut out = String::new();
    let _ = writeln!(out, "# n={} L={} dx={} dw={}", g.n(), g.period(), g.dx(), g.dw());
    let _ = writeln!(out, "m,k,x,w,abs");
    for m in 0..g.n() {
        for k in 0..g.n() {
            let _ =
                writeln!(out, "{},{},{},{},{}", m, k, g.x(m), freq.x(k), field.value(m, k).norm());
        }
    }
    out
}

// ---- Commands ----

fn cmd_stft(
    common: &Common,
    cfg: &Config,
    signal: Option<String>,
    window: Option<String>,
) -> Result<u8> {
    let grid = resolve_grid(common, cfg)?;
    let sig_spec = pick(signal, cfg, "signal").unwrap_or_else(|| "gauss".to_string());
    let win_spec = pick(window, cfg, "window").unwrap_or_else(|| "gauss".to_string());
    let f = parse_signal(&sig_spec, grid)?;
    let g = parse_signal(&win_spec, grid)?;
    let field = stft(&f, &g)?;
    let out = out_dir(common, cfg)?;
    let formats = resolve_formats(common, cfg)?;
    let c = grid.center();
    println!(
        "stft: n={} signal={} window={} |V(0,0)|={:.12}",
        grid.n(),
        sig_spec,
        win_spec,
        field.value(c, c).norm()
    );
    if formats.json {
        write_file(&out, "stft.json", &field.to_json())?;
    }
    if formats.csv {
        write_file(&out, "stft.csv", &field.to_csv())?;
    }
    write_file(&out, "stft_abs.csv", &field_abs_csv(&field))?;
    Ok(0)
}

fn cmd_wigner(
    common: &Common,
    cfg: &Config,
    tau: Option<f64>,
    f: Option<String>,
    g: Option<String>,
) -> Result<u8> {
    let grid = resolve_grid(common, cfg)?;
    let tau = match tau {
        Some(t) => t,
        None => match cfg_parse::<f64>(cfg, "tau")? {
            Some(t) => check_tau(t)?,
            None => 0.5,
        },
    };
    let f_spec = pick(f, cfg, "f").unwrap_or_else(|| "gauss".to_string());
    let g_spec = pick(g, cfg, "g").unwrap_or_else(|| "gauss".to_string());
    let fs = parse_signal(&f_spec, grid)?;
    let gs = parse_signal(&g_spec, grid)?;
    let field = tau_wigner(&fs, &gs, tau)?;
    let out = out_dir(common, cfg)?;
    let formats = resolve_formats(common, cfg)?;
    let c = grid.center();
    println!(
        "wigner: n={} tau={} f={} g={} |W(0,0)|={:.12}",
        grid.n(),
        tau,
        f_spec,
        g_spec,
        field.value(c, c).norm()
    );
    if formats.json {
        write_file(&out, "wigner.json", &field.to_json())?;
    }
    if formats.csv {
        write_file(&out, "wigner.csv", &field.to_csv())?;
    }
    write_file(&out, "wigner_abs.csv", &field_abs_csv(&field))?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_locop(
    common: &Common,
    cfg: &Config,
    symbol: Option<String>,
    phi1: Option<String>,
    phi2: Option<String>,
    quantize: Option<f64>,
    eig: bool,
    overlaps: Option<usize>,
) -> Result<u8> {
    let grid = resolve_grid(common, cfg)?;
    let symbol_spec = pick(symbol, cfg, "symbol").unwrap_or_else(|| "gauss2d:sx=1,sw=1".to_string());
    let sym = Symbol::parse(&symbol_spec)?;
    let quantize = match quantize {
        Some(t) => Some(t),
        None => match cfg_parse::<f64>(cfg, "quantize")? {
            Some(t) => Some(check_tau(t)?),
            None => None,
        },
    };
    let op = match quantize {
        Some(tau) => tau_quantization_matrix(&sym, tau, grid)?,
        None => {
            let p1_spec = pick(phi1, cfg, "phi1").unwrap_or_else(|| "gauss".to_string());
            let p2_spec = pick(phi2, cfg, "phi2").unwrap_or_else(|| "gauss".to_string());
            let p1 = parse_signal(&p1_spec, grid)?;
            let p2 = parse_signal(&p2_spec, grid)?;
            localization_matrix(&sym, &p1, &p2)?
        }
    };
    let out = out_dir(common, cfg)?;
    match quantize {
        Some(tau) => println!("locop: n={} symbol={} quantize tau={}", grid.n(), symbol_spec, tau),
        None => println!("locop: n={} symbol={}", grid.n(), symbol_spec),
    }
    write_file(&out, "operator.json", &op.to_json())?;
    if eig {
        let defect = hermitian_defect(&op);
        if defect > HERMITIAN_DEFECT_TOL {
            return Err(Error::structural(format!(
                "eigendecomposition needs a Hermitian operator, got relative defect {defect:.3e}; \
                 drop --eig or use a real symmetric symbol"
            )));
        }
        let overlap_count = match overlaps {
            Some(c) => c,
            None => match cfg_parse::<usize>(cfg, "overlaps")? {
                Some(c) => c,
                None => 6.min(grid.n() / 4),
            },
        };
        let report = spectrum_report(&op, overlap_count)?;
        if let Some(top) = report.eigenvalues.first() {
            println!("locop: top eigenvalue {top:.12}");
        }
        write_file(&out, "spectrum.json", &report.to_json())?;
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_modnorm(
    common: &Common,
    cfg: &Config,
    signal: Option<String>,
    window: Option<String>,
    lattice: Option<String>,
    weight: Option<String>,
    p: Option<String>,
    q: Option<String>,
) -> Result<u8> {
    let grid = resolve_grid(common, cfg)?;
    let sig_spec = pick(signal, cfg, "signal").unwrap_or_else(|| "gauss".to_string());
    let win_spec = pick(window, cfg, "window").unwrap_or_else(|| "gauss".to_string());
    let lat_spec = pick(lattice, cfg, "lattice").unwrap_or_else(|| "lat:a=4,b=4".to_string());
    let weight_spec = pick(weight, cfg, "weight").unwrap_or_else(|| "const:c=1,dim=2".to_string());
    let p = parse_exponent(&pick(p, cfg, "p").unwrap_or_else(|| "2".to_string()))?;
    let q = parse_exponent(&pick(q, cfg, "q").unwrap_or_else(|| "2".to_string()))?;
    let f = parse_signal(&sig_spec, grid)?;
    let g = parse_signal(&win_spec, grid)?;
    let lat = Lattice::parse(&lat_spec, grid)?;
    let w = parse_weight(&weight_spec)?;
    let value = mod_norm(&f, &g, lat, p, q, &w)?;
    let out = out_dir(common, cfg)?;
    let report = json!({
        "n": grid.n(),
        "L": grid.period(),
        "signal": sig_spec,
        "window": win_spec,
        "lattice": lat_spec,
        "weight": weight_spec,
        "p": exponent_label(p),
        "q": exponent_label(q),
        "value": value,
    });
    println!("modnorm: p={} q={} value={:.12e}", exponent_label(p), exponent_label(q), value);
    let text = serde_json::to_string_pretty(&report).expect("modnorm report serialization cannot fail");
    write_file(&out, "modnorm.json", &text)?;
    Ok(0)
}

fn cmd_verify(common: &Common, cfg: &Config, suite: &str, seed: Option<u64>) -> Result<u8> {
    let seed = match seed {
        Some(s) => Some(s),
        None => cfg_parse::<u64>(cfg, "seed")?,
    };
    let randomized = suite == "all" || RANDOMIZED_SUITES.contains(&suite);
    if randomized && seed.is_none() {
        return Err(Error::parse(format!(
            "suite '{suite}' draws random trials; pass --seed <u64> or set seed= in the config"
        )));
    }
    let n = match common.n {
        Some(n) => Some(n),
        None => cfg_parse::<usize>(cfg, "n")?,
    };
    let config = VerifyConfig { n, seed: seed.unwrap_or(1) };
    let out = out_dir(common, cfg)?;
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut all_passed = true;
    for name in names {
        let report = run_suite(name, &config)?;
        write_file(&out, &format!("verify-{name}.json"), &report.to_json())?;
        println!(
            "verify {}: {} (seed {})",
            name,
            if report.passed { "PASS" } else { "FAIL" },
            report.seed
        );
        all_passed &= report.passed;
    }
    Ok(if all_passed { 0 } else { 1 })
}

// ---- Spectrum plumbing ----

/// Relative Frobenius defect `||A - A^H|| / ||A||`; zero for the zero matrix.
fn hermitian_defect(op: &OperatorMatrix) -> f64 {
    let n = op.n();
    let mut fro2 = 0.0;
    let mut defect2 = 0.0;
    for j in 0..n {
        for l in 0..n {
            fro2 += op.entry(j, l).norm_sqr();
            defect2 += (op.entry(j, l) - op.entry(l, j).conj()).norm_sqr();
        }
    }
    if fro2 == 0.0 {
        0.0
    } else {
        (defect2 / fro2).sqrt()
    }
}

/// Eigendecompose and summarize: eigenvalues, Hermite overlaps, and decay
/// fits of the top eigenvector in time, frequency, and phase space. Fits
/// that cannot run (too few usable samples, e.g. a delta eigenvector) are
/// skipped rather than failing the report.
fn spectrum_report(op: &OperatorMatrix, overlap_count: usize) -> Result<SpectrumReport> {
    let pairs = hermitian_eig(op)?;
    let grid = op.grid();
    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    let hermites = hermite_functions(overlap_count.min(pairs.len()), grid)?;
    let mut overlaps = Vec::with_capacity(hermites.len());
    for (pair, h) in pairs.iter().zip(hermites.iter()) {
        overlaps.push(pair.vector.inner(h)?.norm());
    }
    let mut decay_fits = Vec::new();
    if let Some(top) = pairs.first() {
        let gammas = default_gamma_grid();
        if let Ok(fit) = decay_fit(&top.vector, &gammas, DECAY_FLOOR) {
            decay_fits.push(DecayFitSummary::from(&fit));
        }
        if let Ok(fit) = decay_fit(&dft(&top.vector), &gammas, DECAY_FLOOR) {
            let mut summary = DecayFitSummary::from(&fit);
            summary.domain = "frequency".to_string();
            decay_fits.push(summary);
        }
        if let Ok(fit) = phase_space_decay_fit(&top.vector, &gammas, DECAY_FLOOR) {
            decay_fits.push(DecayFitSummary::from(&fit));
        }
    }
    Ok(SpectrumReport { eigenvalues, overlaps, decay_fits })
}
