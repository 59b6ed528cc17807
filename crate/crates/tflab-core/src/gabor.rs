//! Gabor systems on separable lattices: analysis and synthesis against a
//! window, frame operators and canonical dual windows, weighted mixed-norm
//! sequence spaces over the lattice, discrete modulation norms, and the
//! sequence-space inequalities (Young, Hoelder) together with the
//! convolution relation they imply for modulation norms.
//!
//! A lattice with strides `(a, b)` collects the grid nodes
//!
//! ```text
//! lambda_{m,k} = (x_{m a}, w_{k b}),    0 <= m < n/a,  0 <= k < n/b,
//! ```
//!
//! in centered coordinates, and the Gabor system of a window g is the family
//! of time-frequency shifts pi(lambda) g over those points. Analysis takes
//! inner products against the family, which is a subsampled short-time
//! Fourier transform; synthesis sums the family against a coefficient array;
//! the frame operator is the composition of the two,
//!
//! ```text
//! S f = sum_lambda <f, pi(lambda) g> pi(lambda) g,
//! ```
//!
//! and the canonical dual window solves S h = g. Sequence norms over
//! coefficient arrays use the mixed weighted form whose inner exponent runs
//! over time shifts and whose outer exponent runs over frequency shifts,
//!
//! ```text
//! ||c||_{p,q;m} = ( sum_k ( sum_m |c[m][k]|^p m(lambda_{m,k})^p )^{q/p} )^{1/q},
//! ```
//!
//! with exact suprema wherever an exponent is infinite. The modulation norm
//! of a signal is the sequence norm of its analysis coefficients.
//!
//! # Discretization notes
//!
//! * Lattice points are grid nodes in centered coordinates, so the time
//!   coordinates lie in `[-L/2, L/2)` and weights are evaluated at
//!   nearest-image representatives, consistent with the rest of the crate.
//!   For strides up to n/2 the point set contains the origin.
//! * The Young and Hoelder trials run on finitely supported sequences
//!   embedded in a circular buffer long enough that no convolution support
//!   wraps, which reproduces convolution on the integers exactly.
//! * The dual-window solve runs conjugate gradient on the frame operator.
//!   The invertibility gate needs the extreme eigenvalues of S, which the
//!   dense Jacobi solver provides up front, and the same spectral data
//!   serves as a direct fallback solve if the iteration stalls.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledSignal};
use crate::ops::OperatorMatrix;
use crate::spectral::hermitian_eig;
use crate::tfr::{stft, TFPoint};
use crate::weights::Weight;

const TAU_2PI: f64 = 2.0 * std::f64::consts::PI;

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// Relative eigenvalue floor under which the frame operator counts as
/// non-invertible and [`dual_window`] reports a frame failure.
pub const FRAME_EIG_RATIO_TOL: f64 = 1e-10;

/// Relative residual target for the conjugate-gradient solve of `S h = g`.
pub const DUAL_CG_TOL: f64 = 1e-12;

/// Largest grid size for which the spectral expansion of the inverse frame
/// operator is used as a direct fallback when conjugate gradient stalls.
pub const DENSE_FALLBACK_MAX_N: usize = 256;

/// Tolerance on the defining index relations of the sequence inequalities.
pub const INDEX_RELATION_TOL: f64 = 1e-12;

/// Slack over the unit constant when counting inequality violations.
pub const INEQ_SLACK: f64 = 1e-12;

/// Ambient circular buffer length for the sequence-inequality trials.
const SEQ_AMBIENT_LEN: usize = 64;

/// Half-width of the random supports in the sequence trials. Two such
/// supports convolve into at most `4 * SEQ_HALF_SUPPORT + 1` slots, which
/// fits in the ambient buffer without wrapping.
const SEQ_HALF_SUPPORT: i64 = 8;

// ---- Lattice ----

/// Separable time-frequency lattice on a grid: time stride `a_step` samples,
/// frequency stride `b_step` bins, both dividing n. The lattice has
/// `n/a_step` time shifts and `n/b_step` frequency shifts per period, hence
/// redundancy `n / (a_step * b_step)`; redundancy below one cannot support a
/// frame and surfaces later as a frame failure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    a_step: usize,
    b_step: usize,
    grid: GridSpec,
}

impl Lattice {
    pub fn new(grid: GridSpec, a_step: usize, b_step: usize) -> Result<Lattice> {
        if a_step == 0 || b_step == 0 {
            return Err(Error::structural("lattice strides must be positive".to_string()));
        }
        let n = grid.n();
        if n % a_step != 0 || n % b_step != 0 {
            return Err(Error::structural(format!(
                "lattice strides must divide n = {n}, got a={a_step}, b={b_step}"
            )));
        }
        Ok(Lattice { a_step, b_step, grid })
    }

    /// Parse a lattice spec string of the form `lat:a=4,b=4`.
    pub fn parse(spec: &str, grid: GridSpec) -> Result<Lattice> {
        let body = spec
            .strip_prefix("lat:")
            .ok_or_else(|| Error::parse(format!("lattice spec must start with 'lat:', got '{spec}'")))?;
        let mut a_step = None;
        let mut b_step = None;
        for part in body.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("lattice spec field '{part}' is not key=value")))?;
            let parsed: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("lattice stride '{value}' is not an integer")))?;
            match key.trim() {
                "a" => a_step = Some(parsed),
                "b" => b_step = Some(parsed),
                other => return Err(Error::parse(format!("unknown lattice field '{other}'"))),
            }
        }
        match (a_step, b_step) {
            (Some(a), Some(b)) => Lattice::new(grid, a, b),
            _ => Err(Error::parse(format!("lattice spec '{spec}' must set both a and b"))),
        }
    }

    pub fn a_step(&self) -> usize {
        self.a_step
    }

    pub fn b_step(&self) -> usize {
        self.b_step
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Number of time shifts per period.
    pub fn rows(&self) -> usize {
        self.grid.n() / self.a_step
    }

    /// Number of frequency shifts per period.
    pub fn cols(&self) -> usize {
        self.grid.n() / self.b_step
    }

    /// Oversampling factor `n / (a_step * b_step)`.
    pub fn redundancy(&self) -> f64 {
        self.grid.n() as f64 / (self.a_step * self.b_step) as f64
    }

    /// Lattice point (m, k) in centered physical coordinates.
    pub fn point(&self, m: usize, k: usize) -> TFPoint {
        let freq = self.grid.conjugate();
        TFPoint::new(self.grid.x(m * self.a_step), freq.x(k * self.b_step))
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lat:a={},b={}", self.a_step, self.b_step)
    }
}

// ---- Gabor system ----

/// A window together with a lattice of time-frequency shifts.
#[derive(Debug, Clone)]
pub struct GaborSystem {
    window: SampledSignal,
    lattice: Lattice,
}

impl GaborSystem {
    pub fn new(window: SampledSignal, lattice: Lattice) -> Result<GaborSystem> {
        if window.grid() != lattice.grid() {
            return Err(Error::structural("gabor system: window and lattice grids differ".to_string()));
        }
        if window.norm() == 0.0 {
            return Err(Error::structural("gabor system: window is identically zero".to_string()));
        }
        Ok(GaborSystem { window, lattice })
    }

    pub fn window(&self) -> &SampledSignal {
        &self.window
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }
}

fn unit_roots(n: usize) -> Vec<Complex64> {
    (0..n).map(|r| cis(TAU_2PI * r as f64 / n as f64)).collect()
}

/// The atom pi(lambda_{m,k}) w for an arbitrary window on the system grid.
/// Lattice shifts land on grid nodes, so the translation is an exact index
/// rotation and the modulation is a root-of-unity phase.
fn lattice_atom(
    window: &SampledSignal,
    lattice: Lattice,
    roots: &[Complex64],
    m: usize,
    k: usize,
) -> SampledSignal {
    let grid = window.grid();
    let n = grid.n();
    let ni = n as i64;
    let h = (n / 2) as i64;
    let shift = (m * lattice.a_step()) as i64;
    let mode = (k * lattice.b_step()) as i64 - h;
    let ws = window.samples();
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    for (j, out) in samples.iter_mut().enumerate() {
        let src = (j as i64 + h - shift).rem_euclid(ni) as usize;
        let r = (mode * (j as i64 - h)).rem_euclid(ni) as usize;
        *out = ws[src] * roots[r];
    }
    SampledSignal::new(grid, samples).expect("atom sample count matches grid")
}

// ---- Analysis and synthesis ----

/// Coefficients of a signal over a Gabor system: row index m runs over time
/// shifts, column index k over frequency shifts.
#[derive(Debug, Clone)]
pub struct CoefArray {
    lattice: Lattice,
    values: Vec<Complex64>,
}

impl CoefArray {
    pub fn new(lattice: Lattice, values: Vec<Complex64>) -> Result<CoefArray> {
        let want = lattice.rows() * lattice.cols();
        if values.len() != want {
            return Err(Error::structural(format!(
                "coefficient array needs {} values for a {}x{} lattice, got {}",
                want,
                lattice.rows(),
                lattice.cols(),
                values.len()
            )));
        }
        Ok(CoefArray { lattice, values })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn rows(&self) -> usize {
        self.lattice.rows()
    }

    pub fn cols(&self) -> usize {
        self.lattice.cols()
    }

    pub fn value(&self, m: usize, k: usize) -> Complex64 {
        self.values[m * self.cols() + k]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Coefficient energy `sum |c|^2`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn to_json(&self) -> String {
        let rows = self.rows();
        let cols = self.cols();
        let dto = CoefJson {
            n: self.lattice.grid().n(),
            period: self.lattice.grid().period(),
            a_step: self.lattice.a_step(),
            b_step: self.lattice.b_step(),
            re: (0..rows)
                .map(|m| (0..cols).map(|k| self.value(m, k).re).collect())
                .collect(),
            im: (0..rows)
                .map(|m| (0..cols).map(|k| self.value(m, k).im).collect())
                .collect(),
        };
        serde_json::to_string(&dto).expect("coefficient serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<CoefArray> {
        let dto: CoefJson =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("coefficient json: {e}")))?;
        let grid = GridSpec::new(dto.n, Some(dto.period))?;
        let lattice = Lattice::new(grid, dto.a_step, dto.b_step)?;
        let rows = lattice.rows();
        let cols = lattice.cols();
        if dto.re.len() != rows || dto.im.len() != rows {
            return Err(Error::parse(format!(
                "coefficient json: expected {rows} rows, got {} re / {} im",
                dto.re.len(),
                dto.im.len()
            )));
        }
        let mut values = Vec::with_capacity(rows * cols);
        for (re_row, im_row) in dto.re.iter().zip(dto.im.iter()) {
            if re_row.len() != cols || im_row.len() != cols {
                return Err(Error::parse(format!(
                    "coefficient json: expected {cols} columns per row"
                )));
            }
            for (re, im) in re_row.iter().zip(im_row.iter()) {
                values.push(Complex64::new(*re, *im));
            }
        }
        CoefArray::new(lattice, values)
    }
}

#[derive(Serialize, Deserialize)]
struct CoefJson {
    n: usize,
    #[serde(rename = "L")]
    period: f64,
    a_step: usize,
    b_step: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Analysis coefficients `c[m][k] = <f, pi(lambda_{m,k}) g>`, computed as
/// the short-time Fourier transform subsampled at the lattice strides.
pub fn analysis(f: &SampledSignal, sys: &GaborSystem) -> Result<CoefArray> {
    if f.grid() != sys.window().grid() {
        return Err(Error::structural("analysis: signal and system grids differ".to_string()));
    }
    let field = stft(f, sys.window())?;
    let lat = sys.lattice();
    let mut values = Vec::with_capacity(lat.rows() * lat.cols());
    for m in 0..lat.rows() {
        for k in 0..lat.cols() {
            values.push(field.value(m * lat.a_step(), k * lat.b_step()));
        }
    }
    CoefArray::new(lat, values)
}

/// Synthesis `f = sum_{m,k} c[m][k] pi(lambda_{m,k}) g`, the adjoint of
/// analysis with respect to the discrete inner product.
pub fn synthesis(c: &CoefArray, sys: &GaborSystem) -> Result<SampledSignal> {
    if c.lattice() != sys.lattice() {
        return Err(Error::structural("synthesis: coefficient and system lattices differ".to_string()));
    }
    let grid = sys.window().grid();
    let roots = unit_roots(grid.n());
    let mut out = SampledSignal::zero(grid);
    for m in 0..c.rows() {
        for k in 0..c.cols() {
            let v = c.value(m, k);
            let atom = lattice_atom(sys.window(), sys.lattice(), &roots, m, k);
            out.axpy(v, &atom)?;
        }
    }
    Ok(out)
}

// ---- Frame operator and dual window ----

/// Dense frame operator `S f = sum_lambda <f, pi(lambda) g> pi(lambda) g`,
/// assembled as the sum of atom outer products with the quadrature weight
/// absorbed by the matrix apply convention. Hermitian positive semidefinite
/// by construction.
pub fn frame_operator(sys: &GaborSystem) -> Result<OperatorMatrix> {
    mixed_frame_operator(sys, sys.window())
}

/// Mixed frame operator `S_{g,h} f = sum_lambda <f, pi(lambda) g> pi(lambda) h`
/// for the system window g and a second window h on the same grid. With
/// h = g this is the frame operator itself.
pub fn mixed_frame_operator(sys: &GaborSystem, h: &SampledSignal) -> Result<OperatorMatrix> {
    let grid = sys.window().grid();
    if h.grid() != grid {
        return Err(Error::structural("mixed frame operator: window grids differ".to_string()));
    }
    let n = grid.n();
    let lat = sys.lattice();
    let roots = unit_roots(n);
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for m in 0..lat.rows() {
        for k in 0..lat.cols() {
            let ag = lattice_atom(sys.window(), lat, &roots, m, k);
            let ah = lattice_atom(h, lat, &roots, m, k);
            let gs = ag.samples();
            let hs = ah.samples();
            for j in 0..n {
                let hj = hs[j];
                let row = &mut entries[j * n..(j + 1) * n];
                for (e, gl) in row.iter_mut().zip(gs.iter()) {
                    *e += hj * gl.conj();
                }
            }
        }
    }
    OperatorMatrix::new(grid, entries)
}

/// Extreme eigenvalues (A, B) of the frame operator; the optimal frame
/// bounds of the system.
pub fn frame_bounds(sys: &GaborSystem) -> Result<(f64, f64)> {
    let s = frame_operator(sys)?;
    let pairs = hermitian_eig(&s)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in &pairs {
        lo = lo.min(p.value);
        hi = hi.max(p.value);
    }
    Ok((lo, hi))
}

fn cg_solve(
    s: &OperatorMatrix,
    rhs: &SampledSignal,
    tol: f64,
    max_iter: usize,
) -> Result<Option<SampledSignal>> {
    let mut x = SampledSignal::zero(rhs.grid());
    let mut r = rhs.clone();
    let mut p = r.clone();
    // inner carries the quadrature weight, so rs is the squared L2 residual.
    let mut rs = r.inner(&r)?.re;
    let target = tol * rhs.norm();
    for _ in 0..max_iter {
        if rs.sqrt() <= target {
            return Ok(Some(x));
        }
        let sp = s.apply(&p)?;
        let denom = p.inner(&sp)?.re;
        if !denom.is_finite() || denom <= 0.0 {
            return Ok(None);
        }
        let alpha = rs / denom;
        x.axpy(Complex64::new(alpha, 0.0), &p)?;
        r.axpy(Complex64::new(-alpha, 0.0), &sp)?;
        let rs_next = r.inner(&r)?.re;
        let beta = rs_next / rs;
        p.scale(Complex64::new(beta, 0.0));
        p.axpy(Complex64::new(1.0, 0.0), &r)?;
        rs = rs_next;
    }
    Ok(if rs.sqrt() <= target { Some(x) } else { None })
}

/// Canonical dual window h = S^{-1} g.
///
/// The extreme eigenvalues of S gate invertibility: the solve proceeds only
/// when the smallest eigenvalue exceeds [`FRAME_EIG_RATIO_TOL`] times the
/// largest, and otherwise the frame failure carries both values. The system
/// `S h = g` is then solved by conjugate gradient to a relative residual of
/// [`DUAL_CG_TOL`], with the already-computed eigenexpansion as a direct
/// fallback on grids up to [`DENSE_FALLBACK_MAX_N`].
pub fn dual_window(sys: &GaborSystem) -> Result<SampledSignal> {
    let grid = sys.window().grid();
    let s = frame_operator(sys)?;
    let pairs = hermitian_eig(&s)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in &pairs {
        lo = lo.min(p.value);
        hi = hi.max(p.value);
    }
    if !(lo > FRAME_EIG_RATIO_TOL * hi) {
        return Err(Error::FrameFailure { min_eig: lo, max_eig: hi });
    }
    if let Some(h) = cg_solve(&s, sys.window(), DUAL_CG_TOL, 10 * grid.n())? {
        return Ok(h);
    }
    if grid.n() <= DENSE_FALLBACK_MAX_N {
        let mut h = SampledSignal::zero(grid);
        for pair in &pairs {
            let c = sys.window().inner(&pair.vector)? / pair.value;
            h.axpy(c, &pair.vector)?;
        }
        return Ok(h);
    }
    Err(Error::Convergence(
        "dual window: conjugate gradient stalled and the grid exceeds the dense fallback size"
            .to_string(),
    ))
}

// ---- Periodic convolution ----

/// Periodic convolution with the continuum normalization,
/// `(f * h)[j] = dx sum_l f[l] h[j - l]`. Under the centered transform this
/// maps to the pointwise product of spectra.
pub fn periodic_convolution(f: &SampledSignal, h: &SampledSignal) -> Result<SampledSignal> {
    if f.grid() != h.grid() {
        return Err(Error::structural("convolution: signal grids differ".to_string()));
    }
    let grid = f.grid();
    let n = grid.n();
    let ni = n as i64;
    let half = (n / 2) as i64;
    let dx = grid.dx();
    let fs = f.samples();
    let hs = h.samples();
    let mut out = SampledSignal::zero(grid);
    for j in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, fv) in fs.iter().enumerate() {
            let idx = (j as i64 - l as i64 + half).rem_euclid(ni) as usize;
            acc += fv * hs[idx];
        }
        out.samples_mut()[j] = acc * dx;
    }
    Ok(out)
}

// ---- Sequence and modulation norms ----

fn check_exponent(p: f64, what: &str) -> Result<()> {
    if !(p > 0.0) {
        return Err(Error::numeric(format!("{what}: exponent must be positive, got {p}")));
    }
    Ok(())
}

/// Weighted mixed norm of a coefficient array,
/// `( sum_k ( sum_m |c[m][k]|^p m(lambda_{m,k})^p )^{q/p} )^{1/q}`,
/// with exact suprema at infinite exponents. The weight is evaluated at the
/// lattice points in centered coordinates.
pub fn seq_norm(c: &CoefArray, p: f64, q: f64, m: &Weight) -> Result<f64> {
    check_exponent(p, "seq_norm")?;
    check_exponent(q, "seq_norm")?;
    if m.dim() != 2 {
        return Err(Error::structural(format!(
            "seq_norm: weight must be two dimensional, got dimension {}",
            m.dim()
        )));
    }
    let lat = c.lattice();
    let mut outer_sum = 0.0_f64;
    let mut outer_sup = 0.0_f64;
    for k in 0..lat.cols() {
        let mut inner_sum = 0.0_f64;
        let mut inner_sup = 0.0_f64;
        for mi in 0..lat.rows() {
            let z = lat.point(mi, k);
            let w = m.eval(&[z.x, z.w]);
            let t = c.value(mi, k).norm() * w;
            if p.is_infinite() {
                inner_sup = inner_sup.max(t);
            } else {
                inner_sum += t.powf(p);
            }
        }
        let inner = if p.is_infinite() { inner_sup } else { inner_sum.powf(1.0 / p) };
        if q.is_infinite() {
            outer_sup = outer_sup.max(inner);
        } else {
            outer_sum += inner.powf(q);
        }
    }
    Ok(if q.is_infinite() { outer_sup } else { outer_sum.powf(1.0 / q) })
}

/// Discrete modulation norm: the mixed sequence norm of the analysis
/// coefficients of f against the window and lattice.
pub fn mod_norm(
    f: &SampledSignal,
    g: &SampledSignal,
    lat: Lattice,
    p: f64,
    q: f64,
    m: &Weight,
) -> Result<f64> {
    let sys = GaborSystem::new(g.clone(), lat)?;
    seq_norm(&analysis(f, &sys)?, p, q, m)
}

// ---- Sequence inequalities on the integers ----

fn inv_exp(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

fn check_young_indices(p: f64, q: f64, r: f64) -> Result<()> {
    check_exponent(p, "young indices")?;
    check_exponent(q, "young indices")?;
    check_exponent(r, "young indices")?;
    if r >= 1.0 {
        let defect = (inv_exp(p) + inv_exp(q) - 1.0 - inv_exp(r)).abs();
        if defect > INDEX_RELATION_TOL {
            return Err(Error::structural(format!(
                "young indices: 1/p + 1/q = 1 + 1/r fails for ({p}, {q}, {r})"
            )));
        }
    } else if (p - r).abs() > INDEX_RELATION_TOL || (q - r).abs() > INDEX_RELATION_TOL {
        return Err(Error::structural(format!(
            "young indices: the quasi-Banach branch needs p = q = r, got ({p}, {q}, {r})"
        )));
    }
    Ok(())
}

fn check_holder_indices(p: f64, q: f64, r: f64) -> Result<()> {
    check_exponent(p, "hoelder indices")?;
    check_exponent(q, "hoelder indices")?;
    check_exponent(r, "hoelder indices")?;
    let defect = (inv_exp(p) + inv_exp(q) - inv_exp(r)).abs();
    if defect > INDEX_RELATION_TOL {
        return Err(Error::structural(format!(
            "hoelder indices: 1/p + 1/q = 1/r fails for ({p}, {q}, {r})"
        )));
    }
    Ok(())
}

/// Weighted l^p norm of a centered integer-indexed buffer; slot j holds the
/// value at the integer j - len/2.
fn weighted_lp(values: &[Complex64], p: f64, w: &Weight) -> f64 {
    let half = (values.len() / 2) as i64;
    if p.is_infinite() {
        let mut sup = 0.0_f64;
        for (j, z) in values.iter().enumerate() {
            sup = sup.max(z.norm() * w.eval(&[(j as i64 - half) as f64]));
        }
        sup
    } else {
        let mut sum = 0.0_f64;
        for (j, z) in values.iter().enumerate() {
            let t = z.norm() * w.eval(&[(j as i64 - half) as f64]);
            if t > 0.0 {
                sum += t.powf(p);
            }
        }
        sum.powf(1.0 / p)
    }
}

/// Convolution of two centered integer-indexed buffers. Supports within the
/// guaranteed half-width never wrap, so this agrees with convolution on the
/// integers.
fn integer_convolution(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let len = a.len();
    let half = (len / 2) as i64;
    let mut c = vec![Complex64::new(0.0, 0.0); len];
    for (ja, av) in a.iter().enumerate() {
        if av.norm_sqr() == 0.0 {
            continue;
        }
        for (jb, bv) in b.iter().enumerate() {
            let pos = (ja as i64 - half) + (jb as i64 - half);
            let slot = (pos + half).rem_euclid(len as i64) as usize;
            c[slot] += av * bv;
        }
    }
    c
}

fn random_support_sequence<R: rand::Rng>(rng: &mut R) -> Vec<Complex64> {
    let mut s = vec![Complex64::new(0.0, 0.0); SEQ_AMBIENT_LEN];
    let half = (SEQ_AMBIENT_LEN / 2) as i64;
    for d in -SEQ_HALF_SUPPORT..=SEQ_HALF_SUPPORT {
        if rng.gen_range(0.0..1.0) < 0.5 {
            continue;
        }
        s[(half + d) as usize] =
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    s
}

/// Both sides of the Young inequality for one pair of sequences.
fn young_sides(
    a: &[Complex64],
    b: &[Complex64],
    p: f64,
    q: f64,
    r: f64,
    m: &Weight,
    v: &Weight,
) -> (f64, f64) {
    let c = integer_convolution(a, b);
    let lhs = weighted_lp(&c, r, m);
    let rhs = weighted_lp(a, p, m) * weighted_lp(b, q, v);
    (lhs, rhs)
}

/// Violation count and worst constant from a batch of inequality trials.
#[derive(Debug, Clone, Copy)]
pub struct InequalityReport {
    pub violations: usize,
    pub worst_c: f64,
}

/// Empirical check of the Young convolution inequality
/// `||a * b||_{l^r_m} <= C ||a||_{l^p_m} ||b||_{l^q_v}` over random finitely
/// supported sequences. Violations are counted against the unit constant,
/// which is exact when the weight pair splits as m(x+y) <= m(x) v(y);
/// trivial weights and a submultiplicative weight paired with itself both
/// qualify. `worst_c` reports the largest observed ratio either way.
pub fn young_check(
    p: f64,
    q: f64,
    r: f64,
    m: &Weight,
    v: &Weight,
    trials: usize,
    seed: u64,
) -> Result<InequalityReport> {
    use rand::SeedableRng;
    check_young_indices(p, q, r)?;
    if m.dim() != 1 || v.dim() != 1 {
        return Err(Error::structural(
            "young check: sequence weights must be one dimensional".to_string(),
        ));
    }
    if trials == 0 {
        return Err(Error::structural("young check: at least one trial required".to_string()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let a = random_support_sequence(&mut rng);
        let b = random_support_sequence(&mut rng);
        let (lhs, rhs) = young_sides(&a, &b, p, q, r, m, v);
        if rhs == 0.0 {
            continue;
        }
        let ratio = lhs / rhs;
        if ratio > 1.0 + INEQ_SLACK {
            violations += 1;
        }
        worst = worst.max(ratio);
    }
    Ok(InequalityReport { violations, worst_c: worst })
}

/// Both sides of the Hoelder inequality for one pair of sequences.
fn holder_sides(a: &[Complex64], b: &[Complex64], p: f64, q: f64, r: f64, m: &Weight) -> (f64, f64) {
    let product: Vec<Complex64> = a.iter().zip(b.iter()).map(|(x, y)| x * y).collect();
    let one = Weight::constant(1.0, 1).expect("unit weight");
    let recip = Weight::reciprocal(m.clone());
    let lhs = weighted_lp(&product, r, &one);
    let rhs = weighted_lp(a, p, m) * weighted_lp(b, q, &recip);
    (lhs, rhs)
}

/// Empirical check of the Hoelder inequality
/// `||a b||_{l^r} <= ||a||_{l^p_m} ||b||_{l^q_{1/m}}` over random finitely
/// supported sequences; the weights cancel pointwise, so the unit constant
/// is exact for every positive weight.
pub fn holder_check(
    p: f64,
    q: f64,
    r: f64,
    m: &Weight,
    trials: usize,
    seed: u64,
) -> Result<InequalityReport> {
    use rand::SeedableRng;
    check_holder_indices(p, q, r)?;
    if m.dim() != 1 {
        return Err(Error::structural(
            "hoelder check: sequence weight must be one dimensional".to_string(),
        ));
    }
    if trials == 0 {
        return Err(Error::structural("hoelder check: at least one trial required".to_string()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let a = random_support_sequence(&mut rng);
        let b = random_support_sequence(&mut rng);
        let (lhs, rhs) = holder_sides(&a, &b, p, q, r, m);
        if rhs == 0.0 {
            continue;
        }
        let ratio = lhs / rhs;
        if ratio > 1.0 + INEQ_SLACK {
            violations += 1;
        }
        worst = worst.max(ratio);
    }
    Ok(InequalityReport { violations, worst_c: worst })
}

// ---- Convolution relation for modulation norms ----

/// Index tuple of the convolution relation: (p, q, r) is a Young triple for
/// the time direction and (u, t, gamma) a Hoelder triple for the frequency
/// direction.
#[derive(Debug, Clone, Copy)]
pub struct ConvIndices {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub u: f64,
    pub t: f64,
    pub gamma: f64,
}

/// Measured norm ratio of one convolution-relation instance.
#[derive(Debug, Clone, Copy)]
pub struct ConvRelReport {
    pub ratio: f64,
}

/// Empirical convolution relation for modulation norms: measures
///
/// ```text
/// ratio = ||f * h||_{M^{r,gamma}_m} /
///         ( ||f||_{M^{p,u}_{m|1 x nu}} ||h||_{M^{q,t}_{v|1 x v|2 nu^{-1}}} )
/// ```
///
/// with periodic convolution on the grid and all three modulation norms
/// taken against the system's window and lattice. A ratio bounded across a
/// corpus evidences the continuous embedding; the constant itself is
/// implicit, so only the ratio is reported.
pub fn convolution_relation_check(
    f: &SampledSignal,
    h: &SampledSignal,
    idx: ConvIndices,
    m: &Weight,
    v: &Weight,
    nu: &Weight,
    sys: &GaborSystem,
) -> Result<ConvRelReport> {
    check_young_indices(idx.p, idx.q, idx.r)?;
    check_holder_indices(idx.u, idx.t, idx.gamma)?;
    if m.dim() != 2 || v.dim() != 2 {
        return Err(Error::structural(
            "convolution relation: m and v must be two dimensional".to_string(),
        ));
    }
    if nu.dim() != 1 {
        return Err(Error::structural(
            "convolution relation: nu must be one dimensional".to_string(),
        ));
    }
    let grid = sys.window().grid();
    if f.grid() != grid || h.grid() != grid {
        return Err(Error::structural("convolution relation: grids differ".to_string()));
    }
    let w_f = Weight::tensor(Weight::restrict(m.clone(), 1)?, nu.clone());
    let w_h = Weight::tensor(
        Weight::restrict(v.clone(), 1)?,
        Weight::product(Weight::restrict(v.clone(), 2)?, Weight::reciprocal(nu.clone()))?,
    );
    let conv = periodic_convolution(f, h)?;
    let lat = sys.lattice();
    let g = sys.window();
    let n_target = mod_norm(&conv, g, lat, idx.r, idx.gamma, m)?;
    let n_f = mod_norm(f, g, lat, idx.p, idx.u, &w_f)?;
    let n_h = mod_norm(h, g, lat, idx.q, idx.t, &w_h)?;
    let denom = n_f * n_h;
    if !denom.is_finite() || denom == 0.0 {
        return Err(Error::numeric(format!(
            "convolution relation: degenerate factor norms {n_f} and {n_h}"
        )));
    }
    let ratio = n_target / denom;
    if !ratio.is_finite() {
        return Err(Error::numeric(format!("convolution relation: ratio is not finite ({ratio})")));
    }
    Ok(ConvRelReport { ratio })
}
