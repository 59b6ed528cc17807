//! Spectral analysis of operator matrices: Hermitian eigendecomposition,
//! singular values, Schatten quasi-norms, Hermite reference functions, and
//! decay-exponent fits for eigenfunctions.
//!
//! Operators act with the `dx` quadrature weight (see [`OperatorMatrix`]), so
//! the matrix that is unitarily equivalent to the abstract operator on the
//! weighted inner product is
//!
//! ```text
//!     M = dx * entries,
//! ```
//!
//! and all spectra here are spectra of M. For a compact operator T the
//! singular values s_k(T) are the eigenvalues of (T^* T)^{1/2}; for Hermitian
//! T they coincide with |lambda_k|. Membership of the singular values in
//! l^p is the Schatten class S_p, measured by the quasi-norm
//!
//! ```text
//!     ||T||_{S_p} = (Sum_k s_k^p)^{1/p},    0 < p <= infinity.
//! ```
//!
//! Eigenfunctions of localization operators with Gaussian symbol and window
//! are Hermite functions; the general subexponential theory predicts
//! envelopes of the form
//!
//! ```text
//!     |f(x)| <= C e^{-k |x|^{1/gamma}},
//! ```
//!
//! which [`decay_fit`] estimates by least squares of log|f| against
//! -|x|^{1/gamma} over a small grid of candidate gamma.
//!
//! Both dense solvers are cyclic Jacobi iterations: two-sided rotations for
//! the Hermitian eigenproblem, one-sided (Hestenes) column rotations for
//! singular values. Jacobi is slower than QR at large n but deterministic,
//! simple, and delivers small singular values with far better relative
//! accuracy than forming the Gram matrix would allow; at the grid sizes used
//! here (n <= 512) the O(n^3) sweeps are cheap.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledSignal};
use crate::ops::OperatorMatrix;
use crate::tfr::stft;

/// Off-diagonal Frobenius target for the two-sided Jacobi sweep, relative to
/// the Frobenius norm of the input.
const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 30;

/// A column pair is considered orthogonal once |<b_p, b_q>| falls below this
/// multiple of ||b_p|| ||b_q||.
const HESTENES_PAIR_TOL: f64 = 1e-14;
const HESTENES_MAX_SWEEPS: usize = 60;

/// Relative Frobenius defect above which a matrix is rejected as
/// non-Hermitian.
const HERMITIAN_DEFECT_TOL: f64 = 1e-10;

/// Default relative floor for decay fits: samples below `floor * max|f|` are
/// treated as noise and excluded.
pub const DEFAULT_DECAY_FLOOR: f64 = 1e-10;

/// Default grid of candidate decay exponents gamma. Brackets the Gaussian
/// value 1/2 and the subexponential regime gamma >= 1.
pub fn default_gamma_grid() -> Vec<f64> {
    vec![0.4, 0.5, 0.75, 1.0, 1.5, 2.0]
}

/// One eigenvalue of a Hermitian operator together with its eigenfunction.
///
/// The vector is stored as a [`SampledSignal`] with unit quadrature norm and
/// a normalized phase: the largest-magnitude sample is real and positive, so
/// repeated runs produce identical bytes.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: SampledSignal,
}

/// Nonincreasing, nonnegative singular values of an operator matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    s: Vec<f64>,
}

impl SingularSpectrum {
    /// Wrap raw values: negatives are clipped to zero (they can only arise
    /// from rounding in an eigenvalue route) and the result is sorted
    /// descending. Non-finite inputs are rejected.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric("singular values must be finite".to_string()));
        }
        let mut s: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
        s.sort_by(|a, b| b.partial_cmp(a).expect("finite values compare"));
        Ok(SingularSpectrum { s })
    }

    pub fn values(&self) -> &[f64] {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// Which magnitude profile a decay fit was computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayDomain {
    Time,
    Frequency,
    PhaseSpace,
}

impl DecayDomain {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecayDomain::Time => "time",
            DecayDomain::Frequency => "frequency",
            DecayDomain::PhaseSpace => "phase_space",
        }
    }
}

impl std::fmt::Display for DecayDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fitted envelope model
///
/// ```text
///     log|f(x)| ~ logC - k |x|^{1/gamma},
/// ```
///
/// selected over a grid of candidate gamma by least-squares residual.
/// `fit_region` is the half-open index range (grid indices for time fits,
/// radial bin indices for phase-space fits) that contributed samples; r2 is
/// computed on those samples only. A fit certifies decay only when k > 0.
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub gamma_hat: f64,
    pub k_hat: f64,
    pub log_c: f64,
    pub r2: f64,
    pub fit_region: (usize, usize),
    pub domain: DecayDomain,
}

impl DecayFit {
    /// True when the fitted envelope actually decays (k > 0).
    pub fn is_decaying(&self) -> bool {
        self.k_hat > 0.0
    }
}

/// Serialized form of one decay fit inside a [`SpectrumReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFitSummary {
    pub gamma_hat: f64,
    pub k_hat: f64,
    #[serde(rename = "logC")]
    pub log_c: f64,
    pub r2: f64,
    pub domain: String,
}

impl From<&DecayFit> for DecayFitSummary {
    fn from(fit: &DecayFit) -> Self {
        DecayFitSummary {
            gamma_hat: fit.gamma_hat,
            k_hat: fit.k_hat,
            log_c: fit.log_c,
            r2: fit.r2,
            domain: fit.domain.as_str().to_string(),
        }
    }
}

/// Aggregated spectral results for one operator, in a stable JSON layout.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub overlaps: Vec<f64>,
    pub decay_fits: Vec<DecayFitSummary>,
}

impl SpectrumReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spectrum report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(format!("spectrum json: {e}")))
    }
}

/// One two-sided Jacobi rotation on the (p, q) plane of the Hermitian matrix
/// `a`, accumulated into the eigenvector columns of `v`.
///
/// The rotation is the unitary P = D R with D = diag(1, e^{-i phi}) chosen to
/// make a_pq real and R a real Jacobi rotation zeroing it; both the matrix
/// (P^H A P) and the basis (V P) are updated in place.
fn jacobi_rotate(a: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let g = apq.norm();
    if g < 1e-300 {
        return;
    }
    let phi = apq / g;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let phic = phi.conj();

    // Columns: A <- A P.
    for i in 0..n {
        let aip = a[i * n + p];
        let aiq = phic * a[i * n + q];
        a[i * n + p] = c * aip - s * aiq;
        a[i * n + q] = s * aip + c * aiq;
    }
    // Rows: A <- P^H A.
    for j in 0..n {
        let apj = a[p * n + j];
        let aqj = phi * a[q * n + j];
        a[p * n + j] = c * apj - s * aqj;
        a[q * n + j] = s * apj + c * aqj;
    }
    // The rotated off-diagonal pair is zero by construction; the diagonal is
    // real up to rounding. Enforce both so the residue cannot accumulate.
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
    // Basis: V <- V P.
    for i in 0..n {
        let vip = v[i * n + p];
        let viq = phic * v[i * n + q];
        v[i * n + p] = c * vip - s * viq;
        v[i * n + q] = s * vip + c * viq;
    }
}

fn off_diagonal_frobenius(a: &[Complex64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Full eigendecomposition of a Hermitian operator by cyclic Jacobi sweeps.
///
/// Eigenvalues are those of the weighted matrix `dx * entries`, i.e. of the
/// operator as it acts through [`OperatorMatrix::apply`]; the identity
/// operator therefore has every eigenvalue equal to 1. Pairs are sorted by
/// |lambda| descending and each eigenvector is returned as a unit-norm,
/// phase-normalized [`SampledSignal`].
///
/// Fails when the relative Hermitian defect exceeds 1e-10; singular values
/// remain available for such inputs through [`singular_values`].
pub fn hermitian_eig(a: &OperatorMatrix) -> Result<Vec<EigenPair>> {
    let grid = a.grid();
    let n = grid.n();
    let dx = grid.dx();

    let mut fro2 = 0.0;
    let mut defect2 = 0.0;
    for j in 0..n {
        for l in 0..n {
            fro2 += a.entry(j, l).norm_sqr();
            defect2 += (a.entry(j, l) - a.entry(l, j).conj()).norm_sqr();
        }
    }
    if defect2.sqrt() > HERMITIAN_DEFECT_TOL * fro2.sqrt() {
        return Err(Error::numeric(format!(
            "matrix is not Hermitian (relative defect {:.3e}); use singular_values instead",
            defect2.sqrt() / fro2.sqrt().max(f64::MIN_POSITIVE)
        )));
    }

    // Weighted, explicitly Hermitianized copy: the defect admitted above is
    // rounding-level and must not feed the rotations.
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for l in 0..n {
            m[j * n + l] = 0.5 * dx * (a.entry(j, l) + a.entry(l, j).conj());
        }
    }
    let fro = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, &mut v, n, p, q);
            }
        }
        if off_diagonal_frobenius(&m, n) <= JACOBI_OFF_TOL * fro {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!(
            "jacobi eigensolver: off-diagonal norm above target after {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let scale = 1.0 / dx.sqrt();
    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let mut samples: Vec<Complex64> = (0..n).map(|i| scale * v[i * n + k]).collect();
        // Phase normalization: rotate so the largest-magnitude sample is
        // real positive (first index wins ties).
        let mut arg = 0;
        let mut best = 0.0;
        for (i, z) in samples.iter().enumerate() {
            let mag = z.norm();
            if mag > best {
                best = mag;
                arg = i;
            }
        }
        if best > 0.0 {
            let ph = samples[arg] / best;
            let correction = ph.conj();
            for z in samples.iter_mut() {
                *z *= correction;
            }
            samples[arg] = Complex64::new(best, 0.0);
        }
        pairs.push(EigenPair { value: m[k * n + k].re, vector: SampledSignal::new(grid, samples)? });
    }
    pairs.sort_by(|a, b| {
        (b.value.abs(), b.value)
            .partial_cmp(&(a.value.abs(), a.value))
            .expect("eigenvalues are finite")
    });
    Ok(pairs)
}

/// Singular values of an arbitrary square operator matrix by one-sided
/// (Hestenes) Jacobi: columns of the weighted matrix are rotated in pairs
/// until mutually orthogonal; their norms are the singular values.
pub fn singular_values(a: &OperatorMatrix) -> Result<SingularSpectrum> {
    let n = a.grid().n();
    let dx = a.grid().dx();
    let mut m: Vec<Complex64> = Vec::with_capacity(n * n);
    for j in 0..n {
        for l in 0..n {
            m.push(dx * a.entry(j, l));
        }
    }

    let mut converged = false;
    for _ in 0..HESTENES_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gam = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let bip = m[i * n + p];
                    let biq = m[i * n + q];
                    alpha += bip.norm_sqr();
                    beta += biq.norm_sqr();
                    gam += bip.conj() * biq;
                }
                let g = gam.norm();
                if alpha == 0.0 || beta == 0.0 || g <= HESTENES_PAIR_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phi = gam / g;
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phic = phi.conj();
                for i in 0..n {
                    let bip = m[i * n + p];
                    let biq = phic * m[i * n + q];
                    m[i * n + p] = c * bip - s * biq;
                    m[i * n + q] = s * bip + c * biq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!(
            "hestenes svd: column pairs not orthogonal after {HESTENES_MAX_SWEEPS} sweeps"
        )));
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| m[i * n + j].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    SingularSpectrum::new(norms)
}

/// Schatten quasi-norm `(Sum_k s_k^p)^{1/p}` for p in (0, infinity];
/// p = infinity returns the largest singular value. The sum is normalized by
/// s_0 internally so large p cannot overflow.
pub fn schatten_quasi_norm(s: &SingularSpectrum, p: f64) -> Result<f64> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::numeric(format!("schatten exponent must be positive, got {p}")));
    }
    let top = match s.values().first() {
        Some(&v) => v,
        None => return Ok(0.0),
    };
    if top == 0.0 {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(top);
    }
    let sum: f64 = s.values().iter().map(|&v| (v / top).powf(p)).sum();
    Ok(top * sum.powf(1.0 / p))
}

/// First `count` L2-normalized Hermite functions
///
/// ```text
///     h_k(t) = c_k H_k(sqrt(2 pi) t) e^{-pi t^2},
/// ```
///
/// generated by the stable three-term recurrence
///
/// ```text
///     h_{k+1}(t) = sqrt(2/(k+1)) sqrt(2 pi) t h_k(t) - sqrt(k/(k+1)) h_{k-1}(t)
/// ```
///
/// and renormalized on the grid. `count` is capped at n/4: higher orders
/// spread past the reliable band of the grid.
pub fn hermite_functions(count: usize, grid: GridSpec) -> Result<Vec<SampledSignal>> {
    let n = grid.n();
    if count > n / 4 {
        return Err(Error::structural(format!(
            "hermite count {count} exceeds the resolution guard n/4 = {}",
            n / 4
        )));
    }
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    let root2pi = (2.0 * std::f64::consts::PI).sqrt();
    let mut prev = vec![0.0_f64; n];
    let mut cur: Vec<f64> = (0..n)
        .map(|j| {
            let x = grid.x(j);
            2.0_f64.powf(0.25) * (-std::f64::consts::PI * x * x).exp()
        })
        .collect();
    for k in 0..count {
        let sig =
            SampledSignal::new(grid, cur.iter().map(|&r| Complex64::new(r, 0.0)).collect())?;
        let nrm = sig.norm();
        if nrm == 0.0 {
            return Err(Error::numeric(format!("hermite order {k} vanished on this grid")));
        }
        let mut unit = sig;
        unit.scale(Complex64::new(1.0 / nrm, 0.0));
        out.push(unit);

        let ca = (2.0 / (k as f64 + 1.0)).sqrt() * root2pi;
        let cb = (k as f64 / (k as f64 + 1.0)).sqrt();
        let next: Vec<f64> = (0..n).map(|j| ca * grid.x(j) * cur[j] - cb * prev[j]).collect();
        prev = cur;
        cur = next;
    }
    Ok(out)
}

/// Least squares of the envelope model over a gamma grid. `data` holds
/// (abscissa, log magnitude) pairs with positive abscissae; returns
/// (gamma_hat, k_hat, logC, r2).
fn fit_log_envelope(data: &[(f64, f64)], gamma_grid: &[f64]) -> Result<(f64, f64, f64, f64)> {
    if gamma_grid.is_empty() {
        return Err(Error::numeric("gamma grid is empty".to_string()));
    }
    if gamma_grid.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(Error::numeric("gamma grid entries must be positive and finite".to_string()));
    }
    let m = data.len() as f64;
    let ybar = data.iter().map(|d| d.1).sum::<f64>() / m;
    let sstot: f64 = data.iter().map(|d| (d.1 - ybar).powi(2)).sum();

    let mut best: Option<(f64, f64, f64, f64)> = None; // (ss, gamma, k, logC)
    for &gamma in gamma_grid {
        let us: Vec<f64> = data.iter().map(|d| d.0.powf(1.0 / gamma)).collect();
        let ubar = us.iter().sum::<f64>() / m;
        let suu: f64 = us.iter().map(|u| (u - ubar).powi(2)).sum();
        if suu == 0.0 {
            continue;
        }
        let suy: f64 =
            us.iter().zip(data.iter()).map(|(u, d)| (u - ubar) * (d.1 - ybar)).sum();
        let slope = suy / suu;
        let k = -slope;
        let logc = ybar + k * ubar;
        let ss: f64 = us
            .iter()
            .zip(data.iter())
            .map(|(u, d)| (d.1 - (logc - k * u)).powi(2))
            .sum();
        if best.map_or(true, |b| ss < b.0) {
            best = Some((ss, gamma, k, logc));
        }
    }
    let (ss, gamma, k, logc) =
        best.ok_or_else(|| Error::numeric("degenerate abscissae: envelope fit impossible"))?;
    let r2 = if sstot > 0.0 { (1.0 - ss / sstot).clamp(0.0, 1.0) } else { 0.0 };
    Ok((gamma, k, logc, r2))
}

/// Fit the envelope `log|f(x)| ~ logC - k |x|^{1/gamma}` to a sampled signal.
///
/// Samples below `floor * max|f|` and the near-origin nodes |x| <= dx are
/// excluded; at least 8 usable samples are required. The best gamma is
/// selected from `gamma_grid` by least-squares residual, first entry winning
/// ties, so the result is deterministic.
pub fn decay_fit(f: &SampledSignal, gamma_grid: &[f64], floor: f64) -> Result<DecayFit> {
    if !(floor > 0.0 && floor < 1.0) {
        return Err(Error::numeric(format!("floor must lie in (0,1), got {floor}")));
    }
    let grid = f.grid();
    let n = grid.n();
    let dx = grid.dx();
    let peak = f.samples().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::numeric("cannot fit decay of the zero signal".to_string()));
    }
    let mut data = Vec::new();
    let mut jmin = n;
    let mut jmax = 0;
    for j in 0..n {
        let mag = f.samples()[j].norm();
        let ax = grid.x(j).abs();
        if mag > floor * peak && ax > dx {
            data.push((ax, mag.ln()));
            jmin = jmin.min(j);
            jmax = jmax.max(j);
        }
    }
    if data.len() < 8 {
        return Err(Error::numeric(format!(
            "decay fit needs at least 8 usable samples, found {}",
            data.len()
        )));
    }
    let (gamma_hat, k_hat, log_c, r2) = fit_log_envelope(&data, gamma_grid)?;
    Ok(DecayFit { gamma_hat, k_hat, log_c, r2, fit_region: (jmin, jmax + 1), domain: DecayDomain::Time })
}

/// Fit the decay of |V_{g0} f| radially in phase space.
///
/// The spectrogram against the normalized Gaussian window is binned by
/// |z| = sqrt(x^2 + w^2) with bin width max(dx, dw); each bin contributes its
/// maximum magnitude at the radius where that maximum is attained, and the
/// binned maxima are fitted with the same envelope model as [`decay_fit`].
/// Only bins strictly beyond the profile's global maximum enter the fit:
/// the envelope model describes the decaying tail, signals with vanishing
/// moments (Hermite functions above order zero) rise polynomially before
/// that point, and the extreme bin itself is an upper order statistic that
/// would drag the regression downward even for a flat field. Binning stops
/// at the inscribed disc of the phase-space square: beyond it an annulus is
/// clipped by the corners and its maximum is biased low regardless of the
/// signal.
pub fn phase_space_decay_fit(
    f: &SampledSignal,
    gamma_grid: &[f64],
    floor: f64,
) -> Result<DecayFit> {
    if !(floor > 0.0 && floor < 1.0) {
        return Err(Error::numeric(format!("floor must lie in (0,1), got {floor}")));
    }
    let grid = f.grid();
    let window = SampledSignal::gaussian(grid);
    let v = stft(f, &window)?;
    let n = grid.n();
    let freq = grid.conjugate();
    let dr = grid.dx().max(grid.dw());
    let rmax = 0.5 * grid.period().min(freq.period());

    let mut bins: Vec<Option<(f64, f64)>> = Vec::new(); // (max magnitude, radius at max)
    let mut peak = 0.0_f64;
    for m in 0..n {
        for k in 0..n {
            let r = grid.x(m).hypot(freq.x(k));
            if r > rmax {
                continue;
            }
            let mag = v.value(m, k).norm();
            peak = peak.max(mag);
            let b = (r / dr).floor() as usize;
            if b >= bins.len() {
                bins.resize(b + 1, None);
            }
            if bins[b].map_or(true, |(bm, _)| mag > bm) {
                bins[b] = Some((mag, r));
            }
        }
    }
    if peak == 0.0 {
        return Err(Error::numeric("cannot fit decay of the zero signal".to_string()));
    }
    let peak_bin = bins
        .iter()
        .enumerate()
        .filter_map(|(b, slot)| slot.map(|(mag, _)| (b, mag)))
        .max_by(|a, b| a.1.partial_cmp(&b.1).expect("magnitudes are finite"))
        .map(|(b, _)| b)
        .unwrap_or(0);
    let mut data = Vec::new();
    let mut bmin = bins.len();
    let mut bmax = 0;
    for (b, slot) in bins.iter().enumerate().skip(peak_bin + 1) {
        if (b + 1) as f64 * dr > rmax {
            break;
        }
        if let Some((mag, r)) = slot {
            if *mag > floor * peak && *r > dr {
                data.push((*r, mag.ln()));
                bmin = bmin.min(b);
                bmax = bmax.max(b);
            }
        }
    }
    if data.len() < 8 {
        return Err(Error::numeric(format!(
            "decay fit needs at least 8 usable radial bins, found {}",
            data.len()
        )));
    }
    let (gamma_hat, k_hat, log_c, r2) = fit_log_envelope(&data, gamma_grid)?;
    Ok(DecayFit {
        gamma_hat,
        k_hat,
        log_c,
        r2,
        fit_region: (bmin, bmax + 1),
        domain: DecayDomain::PhaseSpace,
    })
}
