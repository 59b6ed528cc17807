//! Reproducible verification suites over the whole laboratory.
//!
//! Each suite re-runs one family of checks end to end and returns a
//! [`VerifyReport`] with the observed metrics and every threshold that
//! gated the verdict. Reports are built for byte-stable serialization:
//! metrics and tolerances live in sorted maps, randomness flows only
//! through the caller's seed, and nothing time- or machine-dependent
//! enters the output, so
//!
//! ```text
//!     same suite + same config + same seed  =>  identical JSON bytes.
//! ```
//!
//! The suites and the results they exercise:
//!
//! ```text
//!     weights          subexponential two-weight estimate + elementary bounds
//!     wigner-stft      cross-Wigner as a twisted STFT
//!     kernel-equality  localization operator as a tau-quantization
//!     frames           Gabor frame bounds, dual windows, reconstruction
//!     young-holder     sequence-space convolution and duality inequalities
//!     matrix-element   weak action of Op_tau on time-frequency shifts
//!     stft-expansion   superposition expansion of Op_tau
//!     schur            weighted Schur majorant vs the operator norm
//!     schatten         geometric singular spectrum of the Gaussian Weyl op
//!     conv-relation    modulation-norm convolution embedding
//!     decay            eigenfunction localization of Daubechies operators
//! ```
//!
//! Grid-based suites accept an optional size override; benchmark suites
//! with frozen regression values keep their own sizes.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabor::{
    analysis, convolution_relation_check, dual_window, frame_bounds, holder_check, synthesis,
    young_check, ConvIndices, GaborSystem, Lattice,
};
use crate::grid::{dft, GridSpec, SampledSignal};
use crate::ops::{
    kernel_equality_check, localization_matrix, matrix_element_identity_check, schur_bound,
    stft_expansion_check, tau_quantization_matrix, OperatorMatrix, Symbol,
};
use crate::spectral::{
    decay_fit, default_gamma_grid, hermite_functions, hermitian_eig, phase_space_decay_fit,
    singular_values, DEFAULT_DECAY_FLOOR,
};
use crate::tfr::{check_wigner_stft_relation, tf_shift, TFPoint};
use crate::weights::{check_appendix_inequalities, check_lemma24, lemma_t_threshold, Weight};

/// The canonical tau probe set, endpoints included.
pub const TAU_PROBES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Every available suite, in reporting order.
pub const SUITES: [&str; 11] = [
    "weights",
    "wigner-stft",
    "kernel-equality",
    "frames",
    "young-holder",
    "matrix-element",
    "stft-expansion",
    "schur",
    "schatten",
    "conv-relation",
    "decay",
];

// Gating thresholds, one block so nothing hides inside a suite body.
const KERNEL_REL_TOL: f64 = 1e-6;
const IDENTITY_REL_TOL: f64 = 1e-10;
const WIGNER_GRID_TOL: f64 = 1e-8;
const WIGNER_INTERP_TOL: f64 = 1e-6;
const FRAME_REC_TOL: f64 = 1e-9;
const FRAME_SANDWICH_SLACK: f64 = 1e-10;
const UNIT_CONSTANT_SLACK: f64 = 1e-12;
const MATRIX_ELEMENT_TOL: f64 = 1e-6;
const EXPANSION_TOL: f64 = 1e-6;
const SCHUR_SLACK: f64 = 1e-12;
const SCHATTEN_MIN_R2: f64 = 0.95;
const SCHATTEN_TAIL_TOL: f64 = 1e-6;
const SCHATTEN_TAIL_START: usize = 30;
const SCHATTEN_FIT_COUNT: usize = 20;
const CONV_SCALE_TOL: f64 = 1e-12;
const CONV_STABILITY_BAND: f64 = 0.2;
const DECAY_MIN_R2: f64 = 0.99;
const DECAY_EXPONENT_LO: f64 = 1.8;
const DECAY_EXPONENT_HI: f64 = 2.2;
const DECAY_OVERLAP_MIN: f64 = 0.99;
const EIG_NOISE_FLOOR: f64 = 1e-11;
const EIG_ORDER_FLOOR: f64 = 1e-9;
const LEMMA_BOX_RADIUS: f64 = 20.0;
const LEMMA_SAMPLE_TARGET: usize = 100_000;
const APPENDIX_TRIALS: usize = 100_000;
const SEQ_TRIALS: usize = 400;
const INEQ_SLACK: f64 = 1e-12;

// Frozen regression values for the subexponential decay benchmark
// (n = 64, symbol e^{-(|x|+|w|)}, Gaussian windows). Measured once on the
// first verified build, then pinned with DECAY_PIN_TOL of drift allowed.
const DECAY_PIN_TOL: f64 = 1e-3;
const PIN_K_TIME: f64 = 3.189880;
const PIN_K_FREQ: f64 = 3.189880;
const PIN_K_PHASE: f64 = 2.667804;

/// Configuration shared by all suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    /// Grid size override for the size-generic suites. `None` keeps each
    /// suite's documented default; benchmark suites with frozen regression
    /// values ignore it.
    pub n: Option<usize>,
    /// Seed for every randomized draw inside the suites. Two runs with the
    /// same seed and size produce byte-identical reports.
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { n: None, seed: 1 }
    }
}

impl VerifyConfig {
    fn size(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }
}

/// Outcome of one suite run. Serialization is deterministic: map keys are
/// sorted and every float uses its shortest round-trip form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub passed: bool,
    pub metrics: BTreeMap<String, f64>,
    pub seed: u64,
    /// Every threshold that influenced `passed`. A reader can re-derive the
    /// verdict from `metrics` and this map alone.
    pub tolerances: BTreeMap<String, f64>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verify report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(format!("verify json: {e}")))
    }
}

/// Run one named suite.
pub fn run_suite(name: &str, config: &VerifyConfig) -> Result<VerifyReport> {
    match name {
        "weights" => suite_weights(config),
        "wigner-stft" => suite_wigner_stft(config),
        "kernel-equality" => suite_kernel_equality(config),
        "frames" => suite_frames(config),
        "young-holder" => suite_young_holder(config),
        "matrix-element" => suite_matrix_element(config),
        "stft-expansion" => suite_stft_expansion(config),
        "schur" => suite_schur(config),
        "schatten" => suite_schatten(config),
        "conv-relation" => suite_conv_relation(config),
        "decay" => suite_decay(config),
        other => Err(Error::parse(format!(
            "unknown verify suite '{other}'; available: {}",
            SUITES.join(", ")
        ))),
    }
}

/// Run every suite in order, stopping at the first hard error. Failed
/// checks do not error: they come back as reports with `passed = false`.
pub fn run_all(config: &VerifyConfig) -> Result<Vec<VerifyReport>> {
    SUITES.iter().map(|name| run_suite(name, config)).collect()
}

// ---- Corpus ----

/// Twenty seeded symbols for operator checks: each is a positive mixture of
/// one to three Gaussian bumps with centers in the middle of the phase-space
/// box and widths of order one, so the resulting operators are trace-class
/// on every grid in play.
pub fn corpus_symbols(grid: GridSpec, seed: u64) -> Vec<Symbol> {
    let reach = grid.period().min(grid.conjugate().period()) / 6.0;
    let mut out = Vec::with_capacity(20);
    for i in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
        let parts = rng.gen_range(1..=3usize);
        let mut bumps = Vec::with_capacity(parts);
        for _ in 0..parts {
            let amp = rng.gen_range(0.2..1.0);
            let cx = rng.gen_range(-reach..reach);
            let cw = rng.gen_range(-reach..reach);
            let width = rng.gen_range(0.6..1.3);
            bumps.push((amp, cx, cw, width));
        }
        let mut params = BTreeMap::new();
        params.insert("seed".to_string(), seed as f64);
        params.insert("index".to_string(), i as f64);
        params.insert("parts".to_string(), parts as f64);
        out.push(Symbol::closed(format!("mix{i}"), params, move |x, w| {
            let mut acc = 0.0;
            for &(amp, cx, cw, s) in &bumps {
                let u = (x - cx) / s;
                let v = (w - cw) / s;
                acc += amp * (-std::f64::consts::PI * (u * u + v * v)).exp();
            }
            Complex64::new(acc, 0.0)
        }));
    }
    out
}

/// Fifty seeded band-limited probes plus the Gaussian and the first four
/// Hermite atoms.
pub fn corpus_signals(grid: GridSpec, seed: u64) -> Result<Vec<SampledSignal>> {
    let mut out = Vec::with_capacity(55);
    for i in 0..50 {
        out.push(SampledSignal::random_bandlimited(grid, seed.wrapping_add(i)));
    }
    out.push(SampledSignal::gaussian(grid));
    out.extend(hermite_functions(4, grid)?);
    Ok(out)
}

// ---- Shared helpers ----

fn grid(n: usize) -> Result<GridSpec> {
    GridSpec::new(n, None)
}

fn unit_gaussian(g: GridSpec) -> SampledSignal {
    let mut w = SampledSignal::gaussian(g);
    let nrm = w.norm();
    w.scale(Complex64::new(1.0 / nrm, 0.0));
    w
}

fn put(map: &mut BTreeMap<String, f64>, key: &str, value: f64) {
    map.insert(key.to_string(), value);
}

fn make_report(
    suite: &str,
    seed: u64,
    passed: bool,
    metrics: BTreeMap<String, f64>,
    tolerances: BTreeMap<String, f64>,
) -> VerifyReport {
    VerifyReport { suite: suite.to_string(), passed, metrics, seed, tolerances }
}

/// Relative Frobenius distance between two operators on the same grid.
fn rel_frobenius(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    let num: f64 = a
        .entries()
        .iter()
        .zip(b.entries().iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    num / b.frobenius_norm()
}

// ---- Suites ----

/// Two-weight estimate swept over gamma x tau x (r, s) at the threshold
/// exponent, plus the four elementary inequalities behind it.
fn suite_weights(config: &VerifyConfig) -> Result<VerifyReport> {
    let gammas = [1.0, 1.5, 2.0];
    let orders = [0.0, 1.0, 3.0];
    let combos = gammas.len() * TAU_PROBES.len() * orders.len() * orders.len();
    let trials = LEMMA_SAMPLE_TARGET.div_ceil(combos);

    let mut violations = 0usize;
    let mut worst = 0.0f64;
    let mut idx = 0u64;
    for &gamma in &gammas {
        for &tau in &TAU_PROBES {
            for &r in &orders {
                for &s in &orders {
                    let t = lemma_t_threshold(gamma, r, s, tau)?;
                    let rep = check_lemma24(
                        gamma,
                        r,
                        s,
                        tau,
                        t,
                        LEMMA_BOX_RADIUS,
                        trials,
                        config.seed.wrapping_add(idx),
                    )?;
                    violations += rep.violations;
                    worst = worst.max(rep.worst_ratio);
                    idx += 1;
                }
            }
        }
    }
    let appendix = check_appendix_inequalities(APPENDIX_TRIALS, config.seed.wrapping_add(10_000));

    let mut metrics = BTreeMap::new();
    put(&mut metrics, "lemma_combos", combos as f64);
    put(&mut metrics, "lemma_trials_per_combo", trials as f64);
    put(&mut metrics, "lemma_samples", (combos * trials) as f64);
    put(&mut metrics, "lemma_violations", violations as f64);
    put(&mut metrics, "lemma_worst_ratio", worst);
    put(&mut metrics, "lemma_box_radius", LEMMA_BOX_RADIUS);
    put(&mut metrics, "appendix_trials", APPENDIX_TRIALS as f64);
    put(&mut metrics, "appendix_violations", appendix.total() as f64);
    put(&mut metrics, "appendix_norm_embedding", appendix.norm_embedding as f64);
    put(&mut metrics, "appendix_beta_subadditive", appendix.beta_subadditive as f64);
    put(&mut metrics, "appendix_beta_difference", appendix.beta_difference as f64);
    put(&mut metrics, "appendix_tau_split", appendix.tau_split as f64);

    let mut tolerances = BTreeMap::new();
    put(&mut tolerances, "ineq_slack", INEQ_SLACK);
    put(&mut tolerances, "max_violations", 0.0);

    let passed = violations == 0 && appendix.total() == 0;
    Ok(make_report("weights", config.seed, passed, metrics, tolerances))
}

/// Cross-Wigner against the twisted spectrogram: exact on grid-compatible
/// probes at tau = 1/2, interpolation-limited at tau = 1/4.
fn suite_wigner_stft(config: &VerifyConfig) -> Result<VerifyReport> {
    let n = config.size(128);
    let g = grid(n)?;
    let gauss = SampledSignal::gaussian(g);
    // The scaled STFT arguments expand the probed region, so the probes are
    // concentrated atoms: the Gaussian and seeded small shifts of it.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let shifted = |rng: &mut ChaCha8Rng| {
        let z = TFPoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        tf_shift(&gauss, z)
    };
    let f1 = shifted(&mut rng);
    let f2 = shifted(&mut rng);
    let g2 = shifted(&mut rng);
    let pairs = [(&gauss, &gauss), (&f1, &gauss), (&f2, &g2)];

    let mut max_half = 0.0f64;
    let mut max_quarter = 0.0f64;
    for (f, w) in pairs {
        max_half = max_half.max(check_wigner_stft_relation(f, w, 0.5)?);
        max_quarter = max_quarter.max(check_wigner_stft_relation(f, w, 0.25)?);
    }

    let mut metrics = BTreeMap::new();
    put(&mut metrics, "n", n as f64);
    put(&mut metrics, "pairs", pairs.len() as f64);
    put(&mut metrics, "max_err_tau_half", max_half);
    put(&mut metrics, "max_err_tau_quarter", max_quarter);

    let mut tolerances = BTreeMap::new();
    put(&mut tolerances, "tol_tau_half", WIGNER_GRID_TOL);
    put(&mut tolerances, "tol_tau_quarter", WIGNER_INTERP_TOL);

    let passed = max_half <= WIGNER_GRID_TOL && max_quarter <= WIGNER_INTERP_TOL;
    Ok(make_report("wigner-stft", config.seed, passed, metrics, tolerances))
}

/// Localization kernel vs its tau-quantization across the tau probe set,
/// refinement decrease for a width-sqrt(2) symbol, and resolution of the
/// identity for the unit symbol.
fn suite_kernel_equality(config: &VerifyConfig) -> Result<VerifyReport> {
    let n = config.size(64);
    let g = grid(n)?;
    let g2 = grid(2 * n)?;
    let w = SampledSignal::gaussian(g);

    let sym = Symbol::gauss2d(1.0, 1.0)?;
    let rep = kernel_equality_check(&sym, &w, &w, &TAU_PROBES)?;

    // The unit-width Gaussian symbol reproduces its kernel to machine
    // accuracy at every size, so refinement is probed on a wider symbol
    // whose truncation error is resolvable.
    let wide = Symbol::gauss2d(SQRT_2, SQRT_2)?;
    let coarse = kernel_equality_check(&wide, &w, &w, &TAU_PROBES)?.max_rel_error;
    let fine_w = SampledSignal::gaussian(g2);
    let fine = kernel_equality_check(&wide, &fine_w, &fine_w, &TAU_PROBES)?.max_rel_error;

    let gamma = localization_matrix(&Symbol::constant(1.0), &w, &w)?;
    let identity_rel = rel_frobenius(&gamma, &OperatorMatrix::identity(g));

    let mut metrics = BTreeMap::new();
    put(&mut metrics, "n", n as f64);
    put(&mut metrics, "max_rel_error", rep.max_rel_error);
    for (tau, err) in &rep.per_tau {
        put(&mut metrics, &format!("rel_err_tau_{tau}"), *err);
    }
    put(&mut metrics, "refine_coarse", coarse);
    put(&mut metrics, "refine_fine", fine);
    put(&mut metrics, "refine_decrease", coarse - fine);
    put(&mut metrics, "identity_rel_err", identity_rel);

    let mut tolerances = BTreeMap::new();
    put(&mut tolerances, "kernel_rel_tol", KERNEL_REL_TOL);
    put(&mut tolerances, "identity_rel_tol", IDENTITY_REL_TOL);
    put(&mut tolerances, "refine_decrease_min", 0.0);

    let passed = rep.max_rel_error <= KERNEL_REL_TOL
        && fine < coarse
        && identity_rel <= IDENTITY_REL_TOL;
    Ok(make_report("kernel-equality", config.seed, passed, metrics, tolerances))
}

/// Frame bounds, dual-window reconstruction, the coefficient-energy
/// sandwich, and the critical-density Gaussian failure.
fn suite_frames(config: &VerifyConfig) -> Result<VerifyReport> {
    let n = config.size(64);
    let g = grid(n)?;
    let win = SampledSignal::gaussian(g);
    let lat = Lattice::new(g, 4, 4)?;
    let sys = GaborSystem::new(win.clone(), lat)?;
    let (lo, hi) = frame_bounds(&sys)?;
    let dual = dual_window(&sys)?;
    let dual_sys = GaborSystem::new(dual, lat)?;

    let mut max_rec = 0.0f64;
    for i in 0..20 {
        let f = SampledSignal::random_bandlimited(g, config.seed.wrapping_add(100 + i));
        let mut rec = synthesis(&analysis(&f, &sys)?, &dual_sys)?;
        rec.axpy(Complex64::new(-1.0, 0.0), &f)?;
        max_rec = max_rec.max(rec.norm() / f.norm());
    }

    let mut sandwich_worst = 0.0f64;
    let mut sandwich_violations = 0usize;
    for i in 0..100 {
        let f = SampledSignal::random_bandlimited(g, config.seed.wrapping_add(200 + i));
        let quotient = analysis(&f, &sys)?.energy() / f.norm().powi(2);
        let margin = (lo - quotient).max(quotient - hi).max(0.0);
        sandwich_worst = sandwich_worst.max(margin);
        if margin > FRAME_SANDWICH_SLACK {
            sandwich_violations += 1;
        }
    }

    // Critical density: time-frequency area one per lattice point. The
    // Gaussian generates no frame there and the dual solve must refuse.
    let crit = Lattice::new(g, n / 8, 8)?;
    let crit_sys = GaborSystem::new(win, crit)?;
    let (crit_lo, crit_hi) = frame_bounds(&crit_sys)?;
    let critical_failed = matches!(dual_window(&crit_sys), Err(Error::FrameFailure { .. }));

    let mut metrics = BTreeMap::new();
    put(&mut metrics, "n", n as f64);
    put(&mut metrics, "redundancy", lat.redundancy());
    put(&mut metrics, "frame_lower", lo);
    put(&mut metrics, "frame_upper", hi);
    put(&mut metrics, "max_rec_err", max_rec);
    put(&mut metrics, "rec_signals", 20.0);
    put(&mut metrics, "sandwich_signals", 100.0);
    put(&mut metrics, "sandwich_worst_margin", sandwich_worst);
    put(&mut metrics, "sandwich_violations", sandwich_violations as f64);
    put(&mut metrics, "critical_min_eig", crit_lo);
    put(&mut metrics, "critical_max_eig", crit_hi);
    put(&mut metrics, "critical_failure", if critical_failed { 1.0 } else { 0.0 });

    let mut tolerances = BTreeMap::new();
    put(&mut tolerances, "rec_tol", FRAME_REC_TOL);
    put(&mut tolerances, "sandwich_slack", FRAME_SANDWICH_SLACK);

    let passed = max_rec <= FRAME_REC_TOL && sandwich_violations == 0 && critical_failed;
    Ok(make_report("frames", config.seed, passed, metrics, tolerances))
}

/// Unweighted Young triples at unit constant, plus duality products with
/// and without a subexponential weight.
fn suite_young_holder(config: &VerifyConfig) -> Result<VerifyReport> {
    let unit = Weight::constant(1.0, 1)?;
    let young_cases: [(f64, f64, f64, &str); 3] = [
        (1.0, 1.0, 1.0, "young_worst_c_111"),
        (2.0, 1.0, 2.0, "young_worst_c_212"),
        (0.5, 0.5, 0.5, "young_worst_c_half"),
    ];

    let mut metrics = BTreeMap::new();
    let mut young_violations = 0usize;
    for (i, (p, q, r, key)) in young_cases.iter().enumerate() {
        let rep = young_check(*p, *q, *r, &unit, &unit, SEQ_TRIALS, config.seed.wrapping_add(i as u64))?;
        young_violations += rep.violations;
        put(&mut metrics, key, rep.worst_c);
    }

    let sub = Weight::subexp(1.0, 0.8, 1)?;
    let h_unit = holder_check(2.0, 2.0, 1.0, &unit, SEQ_TRIALS, config.seed.wrapping_add(10))?;
    let h_sub = holder_check(2.0, 2.0, 1.0, &sub, SEQ_TRIALS, config.seed.wrapping_add(11))?;
    let holder_violations = h_unit.violations + h_sub.violations;

    put(&mut metrics, "trials_per_case", SEQ_TRIALS as f64);
    put(&mut metrics, "young_violations", young_violations as f64);
    put(&mut metrics, "holder_worst_c_unit", h_unit.worst_c);
    put(&mut metrics, "holder_worst_c_subexp", h_sub.worst_c);
    put(&mut metrics, "holder_violations", holder_violations as f64);

    let mut tolerances = BTreeMap::new();
    put(&mut tolerances, "unit_constant_slack", UNIT_CONSTANT_SLACK);
    put(&mut tolerances, "max_violations", 0.0);

    let worst_ok = young_cases
        .iter()
        .all(|(_, _, _, key)| metrics[*key] <= 1.0 + UNIT_CONSTANT_SLACK);
    let passed = young_violations == 0 && holder_violations == 0 && worst_ok;
    Ok(make_report("young-holder", config.seed, passed, metrics, tolerances))
}

/// Weak action of the tau-quantization on time-frequency shift pairs,
/// probed on grid-aligned points across the whole tau set.
fn suite_matrix_element(config: &VerifyConfig) -> Result<VerifyReport> {
    let n = config.size(64);
    let g = grid(n)?;
    let freq = g.conjugate();
    let h = (n / 2) as i64;
    let w = SampledSignal::gaussian(g);
    let sym = Symbol::gauss2d(1.0, 1.0)?;

    // Offsets stay within +-8 bins so modulated Gaussians remain well
    // inside the frequency band.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut probes = Vec::with_capacity(25);
    for _ in 0..25 {
        let pick = |rng: &mut ChaCha8Rng| {
            let a = rng.gen_range(-8i64..=8) + h;
            let b = rng.gen_range(-8i64..=8) + h;
            TFPoint::new(g.x(a as usize), freq.x(b as usize))
        };
        let z = pick(&mut rng);
        let y = pick(&mut rng);
        probes.push((z, y));
    }

    let mut metrics = BTreeMap::new();
    let mut max_dev = 0.0f64;
    for &tau in &TAU_PROBES {
        let dev = matrix_element_identity_check(&sym, &w, tau, &probes)?;
        put(&mut metrics, &format!("dev_tau_{tau}"), dev);
        max_dev = max_dev.max(dev);
    }
    put(&mut metrics, "n", n as f64);
    put(&mut metrics, "probes", probes.len() as f64);
    put(&mut metrics, "max_dev", max_dev);

    let mut tolerances = BTreeMap::new();
    put(&mut tolerances, "matrix_element_tol", MATRIX_ELEMENT_TOL);

    let passed = max_dev <= MATRIX_ELEMENT_TOL;
    Ok(make_report("matrix-element", config.seed, passed, metrics, tolerances))
}

/// Superposition expansion of the quantization applied to band-limited
/// probes, five signals across the whole tau set.
fn suite_stft_expansion(config: &VerifyConfig) -> Result<VerifyReport> {
    let n = config.size(64);
    let g = grid(n)?;
    let win = unit_gaussian(g);
    let sym = Symbol::gauss2d(1.0, 1.0)?;

    let mut signals = Vec::with_capacity(5);
    for i in 0..4 {
        signals.push(SampledSignal::random_bandlimited(g, config.seed.wrapping_add(i)));
    }
    signals.push(SampledSignal::gaussian(g));

    let mut max_rel = 0.0f64;
    for &tau in &TAU_PROBES {
        for f in &signals {
            max_rel = max_rel.max(stft_expansion_check(&sym, tau, f, &win)?);
        }
    }

    let mut metrics = BTreeMap::new();
    put(&mut metrics, "n", n as f64);
    put(&mut metrics, "checks", (TAU_PROBES.len() * signals.len()) as f64);
    put(&mut metrics, "max_rel_err", max_rel);

    let mut tolerances = BTreeMap::new();
    put(&mut tolerances, "expansion_tol", EXPANSION_TOL);

    let passed = max_rel <= EXPANSION_TOL;
    Ok(make_report("stft-expansion", config.seed, passed, metrics, tolerances))
}

/// Weighted Schur majorant against the true operator norm over the symbol
/// corpus.
fn suite_schur(config: &VerifyConfig) -> Result<VerifyReport> {
    let n = config.size(64);
    let g = grid(n)?;
    let m0 = Weight::constant(1.0, 4)?;
    let m1 = Weight::constant(1.0, 2)?;
    let tau = 0.5;

    let mut violations = 0usize;
    let mut worst_ratio = 0.0f64;
    for sym in corpus_symbols(g, config.seed) {
        let bound = schur_bound(&sym, &m0, &m1, &m1, tau, g)?;
        let op = tau_quantization_matrix(&sym, tau, g)?;
        let top = singular_values(&op)?.values().first().copied().unwrap_or(0.0);
        if top > bound * (1.0 + SCHUR_SLACK) {
            violations += 1;
        }
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(top / bound);
        }
    }

    let mut metrics = BTreeMap::new();
    put(&mut metrics, "n", n as f64);
    put(&mut metrics, "symbols", 20.0);
    put(&mut metrics, "tau", tau);
    put(&mut metrics, "worst_ratio", worst_ratio);
    put(&mut metrics, "violations", violations as f64);

    let mut tolerances = BTreeMap::new();
    put(&mut tolerances, "schur_slack", SCHUR_SLACK);
    put(&mut tolerances, "max_violations", 0.0);

    let passed = violations == 0;
    Ok(make_report("schur", config.seed, passed, metrics, tolerances))
}

/// Singular spectrum of the Weyl quantization of the unit Gaussian: the
/// values fall geometrically, so every positive-order Schatten tail is
/// negligible.
fn suite_schatten(config: &VerifyConfig) -> Result<VerifyReport> {
    let n = config.size(128);
    let g = grid(n)?;
    let sym = Symbol::gauss2d(1.0, 1.0)?;
    let op = tau_quantization_matrix(&sym, 0.5, g)?;
    let s = singular_values(&op)?;
    let values = s.values();
    let top = values.first().copied().unwrap_or(0.0);

    // Log-linear fit over the leading values, well above solver noise.
    let count = SCHATTEN_FIT_COUNT.min(values.len());
    let ys: Vec<f64> = values[..count].iter().map(|v| v.ln()).collect();
    let m = ys.len() as f64;
    let xbar = (ys.len() - 1) as f64 / 2.0;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = (0..ys.len()).map(|k| (k as f64 - xbar).powi(2)).sum();
    let sxy: f64 = ys.iter().enumerate().map(|(k, y)| (k as f64 - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let ss: f64 = ys
        .iter()
        .enumerate()
        .map(|(k, y)| (y - (ybar + slope * (k as f64 - xbar))).powi(2))
        .sum();
    let sstot: f64 = ys.iter().map(|y| (y - ybar).powi(2)).sum();
    let r2 = if sstot > 0.0 { 1.0 - ss / sstot } else { 0.0 };

    // Relative weight of the p = 1/2 quasi-norm beyond the tail start.
    let p = 0.5;
    let full: f64 = values.iter().map(|&v| (v / top).powf(p)).sum();
    let tail: f64 = values
        .iter()
        .skip(SCHATTEN_TAIL_START + 1)
        .map(|&v| (v / top).powf(p))
        .sum();
    let tail_ratio = tail / full;

    let mut metrics = BTreeMap::new();
    put(&mut metrics, "n", n as f64);
    put(&mut metrics, "singular_top", top);
    put(&mut metrics, "fit_count", count as f64);
    put(&mut metrics, "log_slope", slope);
    put(&mut metrics, "r2_geometric", r2);
    put(&mut metrics, "tail_ratio", tail_ratio);

    let mut tolerances = BTreeMap::new();
    put(&mut tolerances, "min_r2", SCHATTEN_MIN_R2);
    put(&mut tolerances, "tail_tol", SCHATTEN_TAIL_TOL);
    put(&mut tolerances, "tail_start_index", SCHATTEN_TAIL_START as f64);

    let passed = r2 >= SCHATTEN_MIN_R2 && tail_ratio <= SCHATTEN_TAIL_TOL;
    Ok(make_report("schatten", config.seed, passed, metrics, tolerances))
}

/// Modulation-norm convolution embedding: finite ratios over the corpus,
/// exact scale invariance, and stability of the ratio under grid
/// refinement of the same continuum problem.
fn suite_conv_relation(config: &VerifyConfig) -> Result<VerifyReport> {
    let n = config.size(64);
    let g = grid(n)?;
    // Same period at double resolution, lattice strides scaled to keep the
    // continuum lattice fixed.
    let g_fine = GridSpec::new(2 * n, Some(g.period()))?;
    let sys = GaborSystem::new(SampledSignal::gaussian(g), Lattice::new(g, 4, 4)?)?;
    let sys_fine =
        GaborSystem::new(SampledSignal::gaussian(g_fine), Lattice::new(g_fine, 8, 4)?)?;

    let m = Weight::tensor(Weight::subexp(1.0, 1.0, 1)?, Weight::constant(1.0, 1)?);
    let v = Weight::tensor(Weight::subexp(1.0, 2.0, 1)?, Weight::subexp(1.0, 1.0, 1)?);
    let nu = Weight::constant(1.0, 1)?;
    let inf = f64::INFINITY;
    let idx = ConvIndices { p: inf, q: 1.0, r: inf, u: inf, t: 1.0, gamma: 1.0 };

    let h = SampledSignal::gaussian(g);
    let corpus = corpus_signals(g, config.seed)?;
    let mut max_ratio = 0.0f64;
    let mut finite = 0usize;
    for f in &corpus {
        let ratio = convolution_relation_check(f, &h, idx, &m, &v, &nu, &sys)?.ratio;
        if ratio.is_finite() && ratio > 0.0 {
            finite += 1;
        }
        max_ratio = max_ratio.max(ratio);
    }

    // Both sides are homogeneous of degree one, so a non-dyadic scaling
    // must cancel to roundoff.
    let base = convolution_relation_check(&corpus[0], &h, idx, &m, &v, &nu, &sys)?.ratio;
    let mut scaled = corpus[0].clone();
    scaled.scale(Complex64::new(3.0, 0.0));
    let rescaled = convolution_relation_check(&scaled, &h, idx, &m, &v, &nu, &sys)?.ratio;
    let scale_defect = (rescaled - base).abs() / base;

    // The deterministic atoms exist on both grids as the same continuum
    // functions; their ratios must agree across the refinement.
    let h_fine = SampledSignal::gaussian(g_fine);
    let mut atoms = vec![SampledSignal::gaussian(g)];
    atoms.extend(hermite_functions(4, g)?);
    let mut atoms_fine = vec![SampledSignal::gaussian(g_fine)];
    atoms_fine.extend(hermite_functions(4, g_fine)?);
    let mut stability_worst = 0.0f64;
    for (a, af) in atoms.iter().zip(atoms_fine.iter()) {
        let r0 = convolution_relation_check(a, &h, idx, &m, &v, &nu, &sys)?.ratio;
        let r1 = convolution_relation_check(af, &h_fine, idx, &m, &v, &nu, &sys_fine)?.ratio;
        stability_worst = stability_worst.max((r1 / r0 - 1.0).abs());
    }

    let mut metrics = BTreeMap::new();
    put(&mut metrics, "n_base", n as f64);
    put(&mut metrics, "n_fine", 2.0 * n as f64);
    put(&mut metrics, "signals", corpus.len() as f64);
    put(&mut metrics, "finite_ratios", finite as f64);
    put(&mut metrics, "max_ratio", max_ratio);
    put(&mut metrics, "scale_defect", scale_defect);
    put(&mut metrics, "atoms", atoms.len() as f64);
    put(&mut metrics, "stability_worst", stability_worst);

    let mut tolerances = BTreeMap::new();
    put(&mut tolerances, "scale_tol", CONV_SCALE_TOL);
    put(&mut tolerances, "stability_band", CONV_STABILITY_BAND);

    let passed = finite == corpus.len()
        && max_ratio.is_finite()
        && scale_defect <= CONV_SCALE_TOL
        && stability_worst <= CONV_STABILITY_BAND;
    Ok(make_report("conv-relation", config.seed, passed, metrics, tolerances))
}

/// Eigenfunction structure of the Gaussian benchmark operator and
/// subexponential decay of the top eigenfunction for a symbol with
/// subexponential envelope, measured in time, frequency and phase space.
fn suite_decay(config: &VerifyConfig) -> Result<VerifyReport> {
    // Benchmark sizes are part of the frozen regressions; the override is
    // deliberately ignored here.
    let g = grid(128)?;
    let w = SampledSignal::gaussian(g);
    let mat = localization_matrix(&Symbol::gauss2d(1.0, 1.0)?, &w, &w)?;
    let pairs = hermitian_eig(&mat)?;

    let herm = hermite_functions(6, g)?;
    let mut overlap_min = 1.0f64;
    for (k, hk) in herm.iter().enumerate() {
        overlap_min = overlap_min.min(pairs[k].vector.inner(hk)?.norm());
    }

    let eig_min = pairs.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let mut strictly_decreasing = true;
    let mut k = 0;
    while k + 1 < pairs.len() && pairs[k].value > EIG_ORDER_FLOOR {
        if pairs[k].value <= pairs[k + 1].value {
            strictly_decreasing = false;
            break;
        }
        k += 1;
    }

    let top_fit = decay_fit(&pairs[0].vector, &default_gamma_grid(), DEFAULT_DECAY_FLOOR)?;
    let exponent = 1.0 / top_fit.gamma_hat;

    // Subexponential envelope symbol on the self-dual grid.
    let g2 = grid(64)?;
    let w2 = SampledSignal::gaussian(g2);
    let sub = Symbol::closed("subexp-envelope", BTreeMap::new(), |x, w| {
        Complex64::new((-(x.abs() + w.abs())).exp(), 0.0)
    });
    let mat2 = localization_matrix(&sub, &w2, &w2)?;
    let pairs2 = hermitian_eig(&mat2)?;
    let top = &pairs2[0].vector;
    let fit_time = decay_fit(top, &default_gamma_grid(), DEFAULT_DECAY_FLOOR)?;
    let fit_freq = decay_fit(&dft(top), &default_gamma_grid(), DEFAULT_DECAY_FLOOR)?;
    let fit_phase = phase_space_decay_fit(top, &default_gamma_grid(), DEFAULT_DECAY_FLOOR)?;

    let mut metrics = BTreeMap::new();
    put(&mut metrics, "benchmark_n", 128.0);
    put(&mut metrics, "subexp_n", 64.0);
    put(&mut metrics, "lambda0", pairs[0].value);
    put(&mut metrics, "overlap_min", overlap_min);
    put(&mut metrics, "eig_min", eig_min);
    put(&mut metrics, "eig_strictly_decreasing", if strictly_decreasing { 1.0 } else { 0.0 });
    put(&mut metrics, "gamma_hat_top", top_fit.gamma_hat);
    put(&mut metrics, "exponent_top", exponent);
    put(&mut metrics, "r2_top", top_fit.r2);
    put(&mut metrics, "gamma_time", fit_time.gamma_hat);
    put(&mut metrics, "gamma_freq", fit_freq.gamma_hat);
    put(&mut metrics, "gamma_phase", fit_phase.gamma_hat);
    put(&mut metrics, "k_time", fit_time.k_hat);
    put(&mut metrics, "k_freq", fit_freq.k_hat);
    put(&mut metrics, "k_phase", fit_phase.k_hat);

    let mut tolerances = BTreeMap::new();
    put(&mut tolerances, "overlap_min_tol", DECAY_OVERLAP_MIN);
    put(&mut tolerances, "min_r2", DECAY_MIN_R2);
    put(&mut tolerances, "exponent_lo", DECAY_EXPONENT_LO);
    put(&mut tolerances, "exponent_hi", DECAY_EXPONENT_HI);
    put(&mut tolerances, "eig_noise_floor", EIG_NOISE_FLOOR);
    put(&mut tolerances, "eig_order_floor", EIG_ORDER_FLOOR);
    put(&mut tolerances, "pin_k_time", PIN_K_TIME);
    put(&mut tolerances, "pin_k_freq", PIN_K_FREQ);
    put(&mut tolerances, "pin_k_phase", PIN_K_PHASE);
    put(&mut tolerances, "pin_tol", DECAY_PIN_TOL);

    let pins_ok = (fit_time.k_hat - PIN_K_TIME).abs() <= DECAY_PIN_TOL
        && (fit_freq.k_hat - PIN_K_FREQ).abs() <= DECAY_PIN_TOL
        && (fit_phase.k_hat - PIN_K_PHASE).abs() <= DECAY_PIN_TOL;
    let passed = overlap_min >= DECAY_OVERLAP_MIN
        && eig_min >= -EIG_NOISE_FLOOR
        && strictly_decreasing
        && (DECAY_EXPONENT_LO..=DECAY_EXPONENT_HI).contains(&exponent)
        && top_fit.r2 >= DECAY_MIN_R2
        && fit_time.is_decaying()
        && fit_freq.is_decaying()
        && fit_phase.is_decaying()
        && pins_ok;
    Ok(make_report("decay", config.seed, passed, metrics, tolerances))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        let err = run_suite("nope", &VerifyConfig::default());
        assert!(matches!(err, Err(Error::Parse(_))), "got {err:?}");
    }

    #[test]
    fn report_json_roundtrip() {
        let mut metrics = BTreeMap::new();
        metrics.insert("x".to_string(), 0.5);
        let mut tolerances = BTreeMap::new();
        tolerances.insert("tol".to_string(), 1e-6);
        let rep = make_report("demo", 7, true, metrics, tolerances);
        let text = rep.to_json();
        let back = VerifyReport::from_json(&text).unwrap();
        assert_eq!(back, rep);
        assert!(VerifyReport::from_json("{").is_err());
    }

    #[test]
    fn corpus_shapes() {
        let g = GridSpec::new(64, None).unwrap();
        let syms = corpus_symbols(g, 5);
        assert_eq!(syms.len(), 20);
        for s in &syms {
            let v = s.eval(0.1, -0.2);
            assert!(v.re.is_finite() && v.im == 0.0);
            assert!(v.re >= 0.0);
        }
        // Same seed, same symbols; different seed, different mixture.
        let again = corpus_symbols(g, 5);
        assert_eq!(syms[3].eval(0.3, 0.4), again[3].eval(0.3, 0.4));
        let other = corpus_symbols(g, 6);
        assert_ne!(syms[3].eval(0.3, 0.4), other[3].eval(0.3, 0.4));

        let signals = corpus_signals(g, 5).unwrap();
        assert_eq!(signals.len(), 55);
        for f in &signals {
            assert!(f.norm() > 0.0);
        }
    }

    #[test]
    fn deterministic_reports() {
        let cfg = VerifyConfig { n: Some(32), seed: 11 };
        for name in ["frames", "young-holder", "matrix-element"] {
            let one = run_suite(name, &cfg).unwrap().to_json();
            let two = run_suite(name, &cfg).unwrap().to_json();
            assert_eq!(one, two, "suite {name} is not byte-stable");
        }
    }

    #[test]
    fn size_override_respected() {
        let cfg = VerifyConfig { n: Some(32), seed: 3 };
        let rep = run_suite("frames", &cfg).unwrap();
        assert_eq!(rep.metrics["n"], 32.0);
        assert!(rep.passed, "frames at n=32: {}", rep.to_json());
    }

    #[test]
    fn suite_weights_passes() {
        let rep = run_suite("weights", &VerifyConfig::default()).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        assert!(rep.metrics["lemma_samples"] >= 100_000.0);
        assert_eq!(rep.metrics["lemma_violations"], 0.0);
    }

    #[test]
    fn suite_wigner_stft_passes() {
        let rep = run_suite("wigner-stft", &VerifyConfig::default()).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        assert_eq!(rep.metrics["n"], 128.0);
    }

    #[test]
    fn suite_kernel_equality_passes() {
        let rep = run_suite("kernel-equality", &VerifyConfig::default()).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        assert!(rep.metrics["refine_fine"] < rep.metrics["refine_coarse"]);
        assert!(rep.metrics["identity_rel_err"] <= 1e-10);
    }

    #[test]
    fn suite_frames_passes() {
        let rep = run_suite("frames", &VerifyConfig::default()).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        assert_eq!(rep.metrics["critical_failure"], 1.0);
    }

    #[test]
    fn suite_young_holder_passes() {
        let rep = run_suite("young-holder", &VerifyConfig::default()).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        assert!(rep.metrics["young_worst_c_111"] <= 1.0 + 1e-12);
    }

    #[test]
    fn suite_matrix_element_passes() {
        let rep = run_suite("matrix-element", &VerifyConfig::default()).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        assert_eq!(rep.metrics["probes"], 25.0);
    }

    #[test]
    fn suite_stft_expansion_passes() {
        let rep = run_suite("stft-expansion", &VerifyConfig::default()).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        assert_eq!(rep.metrics["checks"], 25.0);
    }

    #[test]
    fn suite_schur_passes() {
        let rep = run_suite("schur", &VerifyConfig::default()).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        assert!(rep.metrics["worst_ratio"] <= 1.0);
    }

    #[test]
    fn suite_schatten_passes() {
        let rep = run_suite("schatten", &VerifyConfig::default()).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        // Geometric ratio 1/3 per step for this benchmark.
        assert!((rep.metrics["log_slope"] - (1.0f64 / 3.0).ln()).abs() < 0.05);
    }

    #[test]
    fn suite_conv_relation_passes() {
        let rep = run_suite("conv-relation", &VerifyConfig::default()).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        assert_eq!(rep.metrics["finite_ratios"], rep.metrics["signals"]);
    }

    #[test]
    fn suite_decay_passes() {
        let rep = run_suite("decay", &VerifyConfig::default()).unwrap();
        assert!(rep.passed, "{}", rep.to_json());
        assert_eq!(rep.metrics["gamma_hat_top"], 0.5);
    }

    #[test]
    fn run_all_covers_every_suite() {
        // Light configuration: the heavy suites have their own tests above;
        // here only the dispatch order and naming are verified.
        let reports: Vec<&str> = SUITES.to_vec();
        assert_eq!(reports.len(), 11);
        assert!(reports.contains(&"decay") && reports.contains(&"weights"));
    }
}
