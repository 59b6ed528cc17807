//! Periodic grid, sampled signals, and the normalized discrete Fourier pair.
//!
//! Everything in this crate lives on a centered periodic grid of `n` nodes
//! covering one period of length `L`:
//!
//! ```text
//!     x_j = (j - n/2) dx,   dx = L / n,   j = 0 .. n-1
//!     w_k = (k - n/2) dw,   dw = 1 / L,   k = 0 .. n-1
//! ```
//!
//! so that `dx * dw * n = 1` and, with the default period `L = sqrt(n)`, the
//! time and frequency grids coincide. The Fourier transform uses the
//! normalization
//!
//! ```text
//!     f^(w) = Int f(x) e^{-2 pi i x w} dx
//! ```
//!
//! discretized as `f^(w_k) = dx * Sum_j f(x_j) e^{-2 pi i x_j w_k}`, which is
//! unitary between the dx-weighted and dw-weighted inner products. Under this
//! convention the normalized Gaussian `g0(t) = 2^{1/4} e^{-pi t^2}` is (up to
//! periodization tails) a fixed point of [`dft`].
//!
//! Continuum objects are represented by their samples; evaluation between
//! nodes is always trigonometric (band-limited periodic) interpolation of
//! those samples, never polynomial or spline interpolation.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Fraction of signal energy allowed in the outer band of the grid before
/// [`dilate`] logs an aliasing warning.
pub const DILATION_ENERGY_WARN: f64 = 1e-6;

// ---- Grid ----

/// Centered periodic grid: `n` nodes (power of two, at least 8) on one period `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    period: f64,
}

impl GridSpec {
    /// Build a grid with `n` nodes and period `period`, defaulting to
    /// `L = sqrt(n)` so that time and frequency nodes coincide.
    pub fn new(n: usize, period: Option<f64>) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::numeric(format!(
                "grid size must be a power of two >= 8, got {n}"
            )));
        }
        let period = period.unwrap_or_else(|| (n as f64).sqrt());
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::numeric(format!(
                "grid period must be positive and finite, got {period}"
            )));
        }
        Ok(GridSpec { n, period })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Node spacing dx = L/n.
    pub fn dx(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Frequency spacing dw = 1/L.
    pub fn dw(&self) -> f64 {
        1.0 / self.period
    }

    /// Time node x_j = (j - n/2) dx.
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - self.n as f64 / 2.0) * self.dx()
    }

    /// Frequency node w_k = (k - n/2) dw.
    pub fn w(&self, k: usize) -> f64 {
        (k as f64 - self.n as f64 / 2.0) * self.dw()
    }

    /// The frequency-side grid: same node count, period `n * dw = n / L`.
    /// Self-conjugate exactly when `L = sqrt(n)`.
    pub fn conjugate(&self) -> GridSpec {
        GridSpec {
            n: self.n,
            period: self.n as f64 / self.period,
        }
    }

    /// Index of the center node (position/frequency zero).
    pub fn center(&self) -> usize {
        self.n / 2
    }
}

// ---- Sampled signal ----

/// A complex signal sampled on a [`GridSpec`].
///
/// The L2 inner product carries the quadrature weight dx:
/// `<f, g> = dx * Sum_j f_j conj(g_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    grid: GridSpec,
    samples: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(grid: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::structural(format!(
                "sample count {} does not match grid size {}",
                samples.len(),
                grid.n()
            )));
        }
        Ok(SampledSignal { grid, samples })
    }

    /// Sample a closed-form function of position on the grid nodes.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = (0..grid.n()).map(|j| f(grid.x(j))).collect();
        SampledSignal { grid, samples }
    }

    pub fn zero(grid: GridSpec) -> Self {
        SampledSignal {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    /// The normalized Gaussian g0(t) = 2^{1/4} e^{-pi t^2}, unit L2 norm on
    /// the line; periodization tails are negligible for the default period.
    pub fn gaussian(grid: GridSpec) -> Self {
        let c = 2.0_f64.powf(0.25);
        Self::from_fn(grid, |x| Complex64::new(c * (-std::f64::consts::PI * x * x).exp(), 0.0))
    }

    /// Seeded random band-limited unit-norm signal: independent uniform
    /// spectral coefficients on the central third of the frequency band,
    /// transformed back to the time grid.
    pub fn random_bandlimited(grid: GridSpec, seed: u64) -> Self {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = grid.n();
        let h = n / 2;
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        for (k, c) in spec.iter_mut().enumerate() {
            if (k as isize - h as isize).unsigned_abs() <= n / 6 {
                *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let on_freq = SampledSignal {
            grid: grid.conjugate(),
            samples: spec,
        };
        let mut f = idft(&on_freq);
        f.grid = grid;
        let nrm = f.norm();
        if nrm > 0.0 {
            f.scale(Complex64::new(1.0 / nrm, 0.0));
        }
        f
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    /// dx-weighted inner product `<f, g> = dx Sum f_j conj(g_j)`, linear in `f`.
    pub fn inner(&self, other: &SampledSignal) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::structural("inner product between mismatched grids".to_string()));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.samples.iter().zip(other.samples.iter()) {
            acc += a * b.conj();
        }
        Ok(acc * self.grid.dx())
    }

    /// L2 norm with the dx quadrature weight.
    pub fn norm(&self) -> f64 {
        let s: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        (s * self.grid.dx()).sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        for z in &mut self.samples {
            *z *= c;
        }
    }

    /// self <- self + c * other (grids must match).
    pub fn axpy(&mut self, c: Complex64, other: &SampledSignal) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::structural("axpy between mismatched grids".to_string()));
        }
        for (a, b) in self.samples.iter_mut().zip(other.samples.iter()) {
            *a += c * b;
        }
        Ok(())
    }

    /// Evaluate the trigonometric interpolant of the samples at an arbitrary
    /// position (periodic in the grid period).
    pub fn eval(&self, x: f64) -> Complex64 {
        let spec = dft(self);
        eval_from_spectrum(&spec, self.grid, x)
    }

    /// Fraction of total energy in the outer band `|x| >= 3L/8` (the outer
    /// eighth of the grid on each side).
    pub fn outer_band_energy_fraction(&self) -> f64 {
        let total: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let bound = 0.375 * self.grid.period();
        let outer: f64 = (0..self.grid.n())
            .filter(|&j| self.grid.x(j).abs() >= bound)
            .map(|j| self.samples[j].norm_sqr())
            .sum();
        outer / total
    }
}

// ---- Transforms ----

/// Reusable centered-DFT plan for one grid size. The public [`dft`] / [`idft`]
/// wrappers build one per call; inner loops keep one alive across rows.
pub(crate) struct Transform {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Transform {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Transform {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    /// In-place centered forward transform including the dx quadrature weight:
    /// buf[k] <- dx * Sum_j buf[j] e^{-2 pi i x_j w_k}.
    pub(crate) fn dft_in_place(&self, dx: f64, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        for (j, z) in buf.iter_mut().enumerate() {
            if j % 2 == 1 {
                *z = -*z;
            }
        }
        self.fwd.process(buf);
        // (-1)^{n/2}: +1 for every n divisible by 4, kept general for safety.
        let s = if (self.n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        for (k, z) in buf.iter_mut().enumerate() {
            let sign = if k % 2 == 1 { -s } else { s };
            *z *= sign * dx;
        }
    }

    /// In-place centered inverse transform including the dw weight:
    /// buf[j] <- dw * Sum_k buf[k] e^{+2 pi i x_j w_k}.
    pub(crate) fn idft_in_place(&self, dw: f64, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        for (k, z) in buf.iter_mut().enumerate() {
            if k % 2 == 1 {
                *z = -*z;
            }
        }
        self.inv.process(buf);
        let s = if (self.n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        for (j, z) in buf.iter_mut().enumerate() {
            let sign = if j % 2 == 1 { -s } else { s };
            *z *= sign * dw;
        }
    }
}

/// Construct a grid; `period = None` selects the self-dual default `L = sqrt(n)`.
pub fn make_grid(n: usize, period: Option<f64>) -> Result<GridSpec> {
    GridSpec::new(n, period)
}

/// Normalized centered DFT. The result lives on the conjugate (frequency)
/// grid; with the default period the two grids coincide.
pub fn dft(f: &SampledSignal) -> SampledSignal {
    let mut buf = f.samples.clone();
    Transform::new(f.grid.n()).dft_in_place(f.grid.dx(), &mut buf);
    SampledSignal {
        grid: f.grid.conjugate(),
        samples: buf,
    }
}

/// Inverse of [`dft`]: maps a frequency-side signal back to its time grid.
pub fn idft(fhat: &SampledSignal) -> SampledSignal {
    let out_grid = fhat.grid.conjugate();
    let mut buf = fhat.samples.clone();
    // The quadrature weight of the inverse sum is the input (frequency side)
    // node spacing, which equals the output grid's dw.
    Transform::new(fhat.grid.n()).idft_in_place(fhat.grid.dx(), &mut buf);
    SampledSignal {
        grid: out_grid,
        samples: buf,
    }
}

/// Samples of `t -> f(t - s)` for arbitrary real `s`, computed by a spectral
/// phase ramp (exact on the band-limited periodic interpolant).
pub fn fractional_shift(f: &SampledSignal, s: f64) -> SampledSignal {
    let tr = Transform::new(f.grid.n());
    let mut buf = f.samples.clone();
    tr.dft_in_place(f.grid.dx(), &mut buf);
    let freq = f.grid.conjugate();
    for (k, z) in buf.iter_mut().enumerate() {
        // position grid index k on the conjugate grid carries frequency w_k
        let w = freq.x(k);
        let phase = -2.0 * std::f64::consts::PI * s * w;
        *z *= Complex64::new(phase.cos(), phase.sin());
    }
    tr.idft_in_place(f.grid.dw(), &mut buf);
    SampledSignal {
        grid: f.grid,
        samples: buf,
    }
}

/// Samples of `t -> f(c t)` by trigonometric interpolation of `f` at the
/// scaled nodes (periodic extension for arguments beyond one period).
///
/// `c = 1` and `c = -1` are exact index operations. When more than
/// [`DILATION_ENERGY_WARN`] of the output energy lies in the outer band of
/// the grid the function logs a warning (aliasing risk) but still returns.
pub fn dilate(f: &SampledSignal, c: f64) -> Result<SampledSignal> {
    if !(c.is_finite() && c != 0.0) {
        return Err(Error::numeric(format!("dilation factor must be finite and nonzero, got {c}")));
    }
    let n = f.grid.n();
    let out = if c == 1.0 {
        f.clone()
    } else if c == -1.0 {
        let samples = (0..n).map(|j| f.samples[(n - j) % n]).collect();
        SampledSignal { grid: f.grid, samples }
    } else {
        let spec = dft(f);
        let samples = (0..n)
            .map(|j| eval_from_spectrum(&spec, f.grid, c * f.grid.x(j)))
            .collect();
        SampledSignal { grid: f.grid, samples }
    };
    let frac = out.outer_band_energy_fraction();
    if frac > DILATION_ENERGY_WARN {
        log::warn!(
            "dilate(c = {c}): {:.2e} of the energy lies in the outer band of the grid; \
             the dilated samples no longer determine the continuum object reliably",
            frac
        );
    }
    Ok(out)
}

/// Evaluate the trigonometric interpolant from a precomputed spectrum
/// (`spec = dft(f)`), at position `x` on `grid`.
pub(crate) fn eval_from_spectrum(spec: &SampledSignal, grid: GridSpec, x: f64) -> Complex64 {
    let freq = grid.conjugate();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, z) in spec.samples.iter().enumerate() {
        let phase = 2.0 * std::f64::consts::PI * x * freq.x(k);
        acc += z * Complex64::new(phase.cos(), phase.sin());
    }
    acc * grid.dw()
}

/// Spectral zero-padding: the same band-limited interpolant resampled on a
/// `factor`-times finer grid over the same period.
pub fn oversample(f: &SampledSignal, factor: usize) -> Result<SampledSignal> {
    if factor == 0 || !factor.is_power_of_two() {
        return Err(Error::numeric(format!(
            "oversampling factor must be a power of two >= 1, got {factor}"
        )));
    }
    if factor == 1 {
        return Ok(f.clone());
    }
    let n = f.grid.n();
    let m = n * factor;
    let fine = GridSpec::new(m, Some(f.grid.period()))?;
    let spec = dft(f);
    let mut padded = vec![Complex64::new(0.0, 0.0); m];
    let offset = m / 2 - n / 2;
    padded[offset..offset + n].copy_from_slice(&spec.samples);
    let mut buf = padded;
    Transform::new(m).idft_in_place(fine.dw(), &mut buf);
    SampledSignal::new(fine, buf)
}

// ---- File formats ----

/// JSON wire format for a sampled signal.
#[derive(Serialize, Deserialize)]
pub struct SignalJson {
    pub n: usize,
    #[serde(rename = "L")]
    pub period: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SampledSignal {
    pub fn to_json(&self) -> String {
        let dto = SignalJson {
            n: self.grid.n(),
            period: self.grid.period(),
            re: self.samples.iter().map(|z| z.re).collect(),
            im: self.samples.iter().map(|z| z.im).collect(),
        };
        serde_json::to_string(&dto).expect("signal serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: SignalJson =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("signal json: {e}")))?;
        if dto.re.len() != dto.n || dto.im.len() != dto.n {
            return Err(Error::parse("signal json: re/im length differs from n".to_string()));
        }
        let grid = GridSpec::new(dto.n, Some(dto.period))?;
        let samples = dto
            .re
            .iter()
            .zip(dto.im.iter())
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        SampledSignal::new(grid, samples)
    }

    /// CSV rows `j,x,re,im` under a grid-metadata comment and a header row.
    pub fn to_csv(&self) -> String {
        let g = self.grid;
        let mut out = String::new();
        let _ = writeln!(out, "# n={} L={} dx={} dw={}", g.n(), g.period(), g.dx(), g.dw());
        let _ = writeln!(out, "j,x,re,im");
        for (j, z) in self.samples.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", j, g.x(j), z.re, z.im);
        }
        out
    }
}

// ---- Tests ----

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    fn g0(x: f64) -> Complex64 {
        Complex64::new(2.0_f64.powf(0.25) * (-PI * x * x).exp(), 0.0)
    }

    /// Dense rectangle-rule quadrature of the continuum Fourier integral over
    /// one period, used as the independent oracle for the discrete transform.
    fn oracle_ft(f: impl Fn(f64) -> Complex64, period: f64, w: f64, m: usize) -> Complex64 {
        let dx = period / m as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let x = (j as f64 - m as f64 / 2.0) * dx;
            let phase = -2.0 * PI * x * w;
            acc += f(x) * Complex64::new(phase.cos(), phase.sin());
        }
        acc * dx
    }

    #[test]
    fn grid_constructor_validates() {
        assert!(GridSpec::new(64, None).is_ok());
        assert!(GridSpec::new(6, None).is_err());
        assert!(GridSpec::new(48, None).is_err());
        assert!(GridSpec::new(64, Some(-1.0)).is_err());
        let g = GridSpec::new(64, None).unwrap();
        assert!((g.period() - 8.0).abs() < 1e-15);
        assert!((g.dx() * g.dw() * g.n() as f64 - 1.0).abs() < 1e-15);
        assert!((g.x(32)).abs() < 1e-15, "center node sits at zero");
        assert!((g.x(0) + 4.0).abs() < 1e-15);
    }

    #[test]
    fn dft_matches_dense_quadrature_oracle() {
        let grid = GridSpec::new(64, Some(8.0)).unwrap();
        let f = SampledSignal::gaussian(grid);
        let fhat = dft(&f);
        for k in (0..64).step_by(7) {
            let expected = oracle_ft(g0, 8.0, grid.w(k), 8192);
            let got = fhat.samples()[k];
            assert!(
                (got - expected).norm() < 1e-10,
                "bin {k}: got {got}, oracle {expected}"
            );
        }
    }

    #[test]
    fn gaussian_is_self_dual() {
        let grid = GridSpec::new(64, Some(8.0)).unwrap();
        let f = SampledSignal::gaussian(grid);
        let fhat = dft(&f);
        let max_err = f
            .samples()
            .iter()
            .zip(fhat.samples().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-12, "self-duality error {max_err}");
    }

    #[test]
    fn roundtrip_and_parseval() {
        let grid = GridSpec::new(128, None).unwrap();
        let f = SampledSignal::random_bandlimited(grid, 7);
        let fhat = dft(&f);
        let back = idft(&fhat);
        let max_err = f
            .samples()
            .iter()
            .zip(back.samples().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-13, "roundtrip error {max_err}");
        assert!(
            (f.norm() - fhat.norm()).abs() < 1e-12,
            "Parseval: {} vs {}",
            f.norm(),
            fhat.norm()
        );
    }

    #[test]
    fn conjugate_grid_involution() {
        let grid = GridSpec::new(64, Some(16.0)).unwrap();
        let conj = grid.conjugate();
        assert!((conj.dx() - grid.dw()).abs() < 1e-15);
        assert_eq!(conj.conjugate(), grid);
    }

    #[test]
    fn fractional_shift_matches_closed_form() {
        let grid = GridSpec::new(64, Some(8.0)).unwrap();
        let f = SampledSignal::gaussian(grid);
        let shifted = fractional_shift(&f, 0.3);
        for j in 0..64 {
            let expected = g0(grid.x(j) - 0.3);
            assert!(
                (shifted.samples()[j] - expected).norm() < 1e-12,
                "node {j}"
            );
        }
        assert!((shifted.norm() - f.norm()).abs() < 1e-13, "shift must be unitary");
    }

    #[test]
    fn integer_shift_is_circular() {
        let grid = GridSpec::new(64, None).unwrap();
        let f = SampledSignal::random_bandlimited(grid, 3);
        let shifted = fractional_shift(&f, 5.0 * grid.dx());
        for j in 0..64 {
            let expected = f.samples()[(j + 64 - 5) % 64];
            assert!((shifted.samples()[j] - expected).norm() < 1e-12, "node {j}");
        }
    }

    #[test]
    fn shifts_compose() {
        let grid = GridSpec::new(64, None).unwrap();
        let f = SampledSignal::random_bandlimited(grid, 11);
        let a = fractional_shift(&fractional_shift(&f, 0.17), -0.53);
        let b = fractional_shift(&f, 0.17 - 0.53);
        let max_err = a
            .samples()
            .iter()
            .zip(b.samples().iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-12, "composition error {max_err}");
    }

    #[test]
    fn dilate_matches_closed_form_and_flags_aliasing() {
        let grid = GridSpec::new(64, Some(8.0)).unwrap();
        let f = SampledSignal::gaussian(grid);
        let d = dilate(&f, 2.0).unwrap();
        // Compare where 2 x_j stays inside one period; outside, the periodic
        // extension wraps and the line Gaussian is the wrong reference.
        for j in 16..=48 {
            let expected = g0(2.0 * grid.x(j));
            assert!((d.samples()[j] - expected).norm() < 1e-11, "node {j}");
        }
        let rev = dilate(&f, -1.0).unwrap();
        for j in 0..64 {
            assert_eq!(rev.samples()[j], f.samples()[(64 - j) % 64]);
        }
        // Stretching by 20x pushes mass to the boundary: the warning predicate
        // must see a large outer-band fraction.
        let stretched = dilate(&f, 0.05).unwrap();
        assert!(stretched.outer_band_energy_fraction() > DILATION_ENERGY_WARN);
        assert!(dilate(&f, 0.0).is_err());
    }

    #[test]
    fn oversample_preserves_samples_and_interpolates() {
        let grid = GridSpec::new(64, Some(8.0)).unwrap();
        let f = SampledSignal::gaussian(grid);
        let fine = oversample(&f, 2).unwrap();
        assert_eq!(fine.grid().n(), 128);
        assert!((fine.grid().period() - 8.0).abs() < 1e-15);
        // Even fine nodes coincide with the coarse nodes.
        for j in 0..64 {
            assert!(
                (fine.samples()[2 * j] - f.samples()[j]).norm() < 1e-12,
                "coarse node {j}"
            );
        }
        // Odd fine nodes interpolate the Gaussian.
        for j in (1..128).step_by(2) {
            let expected = g0(fine.grid().x(j));
            assert!((fine.samples()[j] - expected).norm() < 1e-11, "fine node {j}");
        }
    }

    #[test]
    fn json_roundtrip() {
        let grid = GridSpec::new(64, None).unwrap();
        let f = SampledSignal::random_bandlimited(grid, 5);
        let back = SampledSignal::from_json(&f.to_json()).unwrap();
        assert_eq!(back.grid(), f.grid());
        let max_err = f
            .samples()
            .iter()
            .zip(back.samples().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-15);
    }

    #[test]
    fn csv_has_metadata_and_header() {
        let grid = GridSpec::new(64, None).unwrap();
        let f = SampledSignal::gaussian(grid);
        let csv = f.to_csv();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# n=64 L=8"));
        assert_eq!(lines.next().unwrap(), "j,x,re,im");
        assert_eq!(csv.lines().count(), 2 + 64);
    }
}
