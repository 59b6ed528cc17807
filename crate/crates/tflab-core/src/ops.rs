//! Localization operators, tau-quantizations, their symbols and kernels.
//!
//! The localization operator with symbol a and window pair (phi1, phi2) acts
//! by weighting the time-frequency content of the input,
//!
//! ```text
//!     Gamma f = Int a(x,w) V_{phi1} f(x,w) M_w T_x phi2 dx dw,
//! ```
//!
//! and the tau-quantization of a symbol sigma on the phase-space plane is
//!
//! ```text
//!     Op_tau(sigma) f(x) = Int e^{2 pi i (x-y) w} sigma((1-tau) x + tau y, w) f(y) dy dw.
//! ```
//!
//! The two constructions meet: for every tau in [0,1],
//!
//! ```text
//!     Gamma = Op_tau(a * W_tau(phi2, phi1))        (* is phase-space convolution)
//! ```
//!
//! which [`kernel_equality_check`] verifies by building both matrices. Two
//! further identities tie operators to transforms of their symbols. With
//! Phi_tau = W_tau(g,g),
//!
//! ```text
//!     |<Op_tau(sigma) pi(z) g, pi(w) g>| = |V_{Phi_tau} sigma(T_tau(w,z), J(w-z))|,
//!     T_tau(w,z) = ((1-tau) w_1 + tau z_1, tau w_2 + (1-tau) z_2),  J(z) = (z_2, -z_1),
//! ```
//!
//! checked by [`matrix_element_identity_check`], and the expansion
//!
//! ```text
//!     Op_tau(sigma) f = Int V_g f(z) Op_tau(sigma)(pi(z) g) dz       (|g| = 1)
//! ```
//!
//! checked by [`stft_expansion_check`]. [`schur_bound`] turns the first
//! identity into a computable weighted Schur majorant for the operator norm.
//!
//! Discretization notes. Matrices act with the dx quadrature weight, so the
//! identity operator has entries delta_{jl} / dx. Oscillatory integrals
//! become finite geometric sums, exact in the periodic model. All pairwise
//! quantities live on the torus: the lag x_j - x_l is taken as its nearest
//! periodic image, the quantization midpoint (1-tau) x_j + tau x_l is folded
//! into the fundamental domain, and phase-space differences inside
//! [`schur_bound`] are reduced the same way. Field-backed symbols evaluate
//! through their (inherently periodic) trigonometric interpolant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledSignal, Transform};
use crate::tfr::{stft, tau_wigner, tf_shift, PhaseSpaceField, TFPoint};
use crate::weights::Weight;

const TAU_2PI: f64 = 2.0 * std::f64::consts::PI;

/// Radius of the probe lattice on which [`schur_bound`] samples the weight
/// compatibility condition, and the growth factor between the half-radius
/// and full-radius suprema beyond which the condition is declared violated.
const WEIGHT_PROBE_RADIUS: f64 = 6.0;
const WEIGHT_GROWTH_LIMIT: f64 = 1.25;

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

// ---- Symbols ----

/// A phase-space symbol: either a closed-form function on R^2 (preferred) or
/// a sampled field evaluated by trigonometric interpolation.
#[derive(Clone)]
pub struct Symbol {
    name: String,
    params: BTreeMap<String, f64>,
    form: Form,
}

#[derive(Clone)]
enum Form {
    Closed(Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>),
    Field {
        field: PhaseSpaceField,
        /// 2-d centered spectrum of the field, interpolation coefficients.
        coeffs: Vec<Complex64>,
    },
}

impl std::fmt::Debug for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Symbol").field("name", &self.name).finish()
    }
}

impl std::fmt::Display for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name)
    }
}

impl Symbol {
    /// Wrap an arbitrary closed-form function of (x, w).
    pub fn closed(
        name: impl Into<String>,
        params: BTreeMap<String, f64>,
        f: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    ) -> Symbol {
        Symbol { name: name.into(), params, form: Form::Closed(Arc::new(f)) }
    }

    /// The constant symbol `sigma = c`.
    pub fn constant(c: f64) -> Symbol {
        let mut params = BTreeMap::new();
        params.insert("c".to_string(), c);
        Symbol {
            name: format!("const:{c}"),
            params,
            form: Form::Closed(Arc::new(move |_, _| Complex64::new(c, 0.0))),
        }
    }

    /// Separable Gaussian `e^{-pi ((x/sx)^2 + (w/sw)^2)}`.
    pub fn gauss2d(sx: f64, sw: f64) -> Result<Symbol> {
        if !(sx.is_finite() && sx > 0.0 && sw.is_finite() && sw > 0.0) {
            return Err(Error::numeric(format!(
                "gauss2d widths must be positive and finite, got sx={sx}, sw={sw}"
            )));
        }
        let mut params = BTreeMap::new();
        params.insert("sx".to_string(), sx);
        params.insert("sw".to_string(), sw);
        Symbol::parse_gauss(format!("gauss2d:sx={sx},sw={sw}"), params, sx, sw)
    }

    fn parse_gauss(name: String, params: BTreeMap<String, f64>, sx: f64, sw: f64) -> Result<Symbol> {
        Ok(Symbol {
            name,
            params,
            form: Form::Closed(Arc::new(move |x, w| {
                let q = (x / sx).powi(2) + (w / sw).powi(2);
                Complex64::new((-std::f64::consts::PI * q).exp(), 0.0)
            })),
        })
    }

    /// Wrap a sampled field; off-grid evaluation interpolates trigonometrically.
    pub fn from_field(field: PhaseSpaceField) -> Symbol {
        let coeffs = dft2(field.grid(), field.values().to_vec());
        Symbol {
            name: format!("field:n={}", field.n()),
            params: BTreeMap::new(),
            form: Form::Field { field, coeffs },
        }
    }

    /// Parse a symbol spec string: `const:<c>`, `gauss2d:sx=<v>,sw=<v>`, or
    /// `field:<path.json>`.
    pub fn parse(text: &str) -> Result<Symbol> {
        let (head, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("symbol spec needs head:args, got {text:?}")))?;
        match head {
            "const" => {
                let c: f64 = rest
                    .parse()
                    .map_err(|_| Error::parse(format!("const symbol needs a number, got {rest:?}")))?;
                Ok(Symbol::constant(c))
            }
            "gauss2d" => {
                let kv = parse_kv(rest)?;
                let sx = *kv.get("sx").ok_or_else(|| Error::parse("gauss2d needs sx".to_string()))?;
                let sw = *kv.get("sw").ok_or_else(|| Error::parse("gauss2d needs sw".to_string()))?;
                if kv.len() != 2 {
                    return Err(Error::parse(format!("gauss2d takes only sx and sw, got {rest:?}")));
                }
                Symbol::gauss2d(sx, sw)
            }
            "field" => {
                let text = std::fs::read_to_string(rest)?;
                Ok(Symbol::from_field(PhaseSpaceField::from_json(&text)?))
            }
            other => Err(Error::parse(format!("unknown symbol kind {other:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// Evaluate the symbol at an arbitrary point of the plane.
    pub fn eval(&self, x: f64, w: f64) -> Complex64 {
        match &self.form {
            Form::Closed(f) => f(x, w),
            Form::Field { field, coeffs } => eval_coeffs_at(coeffs, field.grid(), x, w),
        }
    }

    /// Samples on the phase-space grid. Field-backed symbols must already
    /// live on the requested grid.
    pub fn sample(&self, grid: GridSpec) -> Result<PhaseSpaceField> {
        match &self.form {
            Form::Closed(f) => Ok(PhaseSpaceField::from_fn(grid, |x, w| f(x, w))),
            Form::Field { field, .. } => {
                if field.grid() != grid {
                    return Err(Error::structural(format!(
                        "field symbol lives on an n={} grid, requested n={}",
                        field.n(),
                        grid.n()
                    )));
                }
                Ok(field.clone())
            }
        }
    }
}

fn parse_kv(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for part in text.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::parse(format!("expected key=value, got {part:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad number {v:?} for key {k:?}")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

// ---- Operator matrices ----

/// Dense operator on the sampled signal space. The action carries the dx
/// quadrature weight:
///
/// ```text
///     (Op f)[j] = Sum_l entries[j][l] f[l] dx,
/// ```
///
/// so the identity operator has entries delta_{jl} / dx.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    grid: GridSpec,
    entries: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn new(grid: GridSpec, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != grid.n() * grid.n() {
            return Err(Error::structural(format!(
                "operator needs {} entries, got {}",
                grid.n() * grid.n(),
                entries.len()
            )));
        }
        Ok(OperatorMatrix { grid, entries })
    }

    /// The identity operator on the grid.
    pub fn identity(grid: GridSpec) -> Self {
        let n = grid.n();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        let d = 1.0 / grid.dx();
        for j in 0..n {
            entries[j * n + j] = Complex64::new(d, 0.0);
        }
        OperatorMatrix { grid, entries }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Entry at row j (output node), column l (input node).
    pub fn entry(&self, j: usize, l: usize) -> Complex64 {
        self.entries[j * self.grid.n() + l]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Apply to a signal: `(Op f)[j] = dx Sum_l entries[j][l] f[l]`.
    pub fn apply(&self, f: &SampledSignal) -> Result<SampledSignal> {
        if f.grid() != self.grid {
            return Err(Error::structural("operator and signal grids differ".to_string()));
        }
        let n = self.grid.n();
        let dx = self.grid.dx();
        let fs = f.samples();
        let mut out = SampledSignal::zero(self.grid);
        for j in 0..n {
            let row = &self.entries[j * n..(j + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (e, v) in row.iter().zip(fs.iter()) {
                acc += e * v;
            }
            out.samples_mut()[j] = acc * dx;
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_json(&self) -> String {
        let n = self.grid.n();
        let dto = OperatorJson {
            n,
            period: self.grid.period(),
            entries_re: (0..n)
                .map(|j| (0..n).map(|l| self.entry(j, l).re).collect())
                .collect(),
            entries_im: (0..n)
                .map(|j| (0..n).map(|l| self.entry(j, l).im).collect())
                .collect(),
        };
        serde_json::to_string(&dto).expect("operator serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: OperatorJson =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("operator json: {e}")))?;
        let grid = GridSpec::new(dto.n, Some(dto.period))?;
        if dto.entries_re.len() != dto.n || dto.entries_im.len() != dto.n {
            return Err(Error::parse("operator json: row count differs from n".to_string()));
        }
        let mut entries = Vec::with_capacity(dto.n * dto.n);
        for (rr, ri) in dto.entries_re.iter().zip(dto.entries_im.iter()) {
            if rr.len() != dto.n || ri.len() != dto.n {
                return Err(Error::parse("operator json: column count differs from n".to_string()));
            }
            for (a, b) in rr.iter().zip(ri.iter()) {
                entries.push(Complex64::new(*a, *b));
            }
        }
        OperatorMatrix::new(grid, entries)
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    n: usize,
    #[serde(rename = "L")]
    period: f64,
    entries_re: Vec<Vec<f64>>,
    entries_im: Vec<Vec<f64>>,
}

// ---- 2-d centered transforms ----

/// Centered 2-d spectrum of an n x n time-major table:
/// `C[p][q] = dx dw Sum_{m,k} F[m,k] e^{-2 pi i (x_m u_p + w_k v_q)}`
/// with u_p = (p - n/2) dw dual to x and v_q = (q - n/2) dx dual to w.
fn dft2(grid: GridSpec, mut vals: Vec<Complex64>) -> Vec<Complex64> {
    let n = grid.n();
    let tr = Transform::new(n);
    for m in 0..n {
        tr.dft_in_place(grid.dw(), &mut vals[m * n..(m + 1) * n]);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for q in 0..n {
        for m in 0..n {
            col[m] = vals[m * n + q];
        }
        tr.dft_in_place(grid.dx(), &mut col);
        for m in 0..n {
            vals[m * n + q] = col[m];
        }
    }
    vals
}

/// Inverse of [`dft2`].
fn idft2(grid: GridSpec, mut vals: Vec<Complex64>) -> Vec<Complex64> {
    let n = grid.n();
    let tr = Transform::new(n);
    for m in 0..n {
        tr.idft_in_place(grid.dx(), &mut vals[m * n..(m + 1) * n]);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for q in 0..n {
        for m in 0..n {
            col[m] = vals[m * n + q];
        }
        tr.idft_in_place(grid.dw(), &mut col);
        for m in 0..n {
            vals[m * n + q] = col[m];
        }
    }
    vals
}

/// Evaluate the 2-d trigonometric interpolant given its [`dft2`] coefficients,
/// at an arbitrary point (x, w) of the plane (periodic in both axes).
fn eval_coeffs_at(coeffs: &[Complex64], grid: GridSpec, x: f64, w: f64) -> Complex64 {
    let n = grid.n();
    let h = n as f64 / 2.0;
    let ex: Vec<Complex64> =
        (0..n).map(|p| cis(TAU_2PI * x * (p as f64 - h) * grid.dw())).collect();
    let ew: Vec<Complex64> =
        (0..n).map(|q| cis(TAU_2PI * w * (q as f64 - h) * grid.dx())).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..n {
        let mut inner = Complex64::new(0.0, 0.0);
        for q in 0..n {
            inner += coeffs[p * n + q] * ew[q];
        }
        acc += ex[p] * inner;
    }
    acc * grid.dw() * grid.dx()
}

// ---- Localization operators ----

fn check_window_pair(phi1: &SampledSignal, phi2: &SampledSignal) -> Result<GridSpec> {
    if phi1.grid() != phi2.grid() {
        return Err(Error::structural("window pair lives on different grids".to_string()));
    }
    if phi1.norm() == 0.0 {
        return Err(Error::numeric("analysis window phi1 is identically zero".to_string()));
    }
    Ok(phi1.grid())
}

/// Localization operator via the kernel quadrature,
///
/// ```text
///     entries[j][l] = dx Sum_m phi2[j-m] conj(phi1[l-m]) B_m[j-l],
///     B_m[r] = dw Sum_k a(x_m, w_k) e^{2 pi i x_r w_k},
/// ```
///
/// one inverse transform per symbol row and an O(n^3) contraction. Agrees
/// with [`localization_matrix_rank_one`] to rounding error; the pair of
/// routes is kept as a standing self-test.
pub fn localization_matrix(
    a: &Symbol,
    phi1: &SampledSignal,
    phi2: &SampledSignal,
) -> Result<OperatorMatrix> {
    let grid = check_window_pair(phi1, phi2)?;
    let n = grid.n();
    let h = n / 2;
    let af = a.sample(grid)?;

    // bt[p*n + m] = B_m[p], transposed so the contraction below runs
    // contiguously in m.
    let tr = Transform::new(n);
    let mut bt = vec![Complex64::new(0.0, 0.0); n * n];
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for m in 0..n {
        row.copy_from_slice(&af.values()[m * n..(m + 1) * n]);
        tr.idft_in_place(grid.dw(), &mut row);
        for p in 0..n {
            bt[p * n + m] = row[p];
        }
    }

    // rot[j*n + m] = window[(j - m + n/2) mod n], the samples of the
    // m-shifted window seen from output node j.
    let rotate = |w: &[Complex64]| -> Vec<Complex64> {
        let mut rot = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for m in 0..n {
                rot[j * n + m] = w[(j + n + h - m) % n];
            }
        }
        rot
    };
    let rot2 = rotate(phi2.samples());
    let rot1 = rotate(phi1.samples());

    let dx = grid.dx();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let r2 = &rot2[j * n..(j + 1) * n];
        for l in 0..n {
            let r1 = &rot1[l * n..(l + 1) * n];
            let b = &bt[((j + n - l + h) % n) * n..];
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 0..n {
                acc += r2[m] * r1[m].conj() * b[m];
            }
            entries[j * n + l] = acc * dx;
        }
    }
    OperatorMatrix::new(grid, entries)
}

/// Localization operator assembled literally as the weighted sum of rank-one
/// projections `a(lambda) (pi(lambda) phi2)(pi(lambda) phi1)^H` over the full
/// phase-space grid. O(n^4); the independent slow route.
pub fn localization_matrix_rank_one(
    a: &Symbol,
    phi1: &SampledSignal,
    phi2: &SampledSignal,
) -> Result<OperatorMatrix> {
    let grid = check_window_pair(phi1, phi2)?;
    let n = grid.n();
    let h = n / 2;
    let freq = grid.conjugate();
    let af = a.sample(grid)?;
    let w1 = phi1.samples();
    let w2 = phi2.samples();
    let cell = grid.dx() * grid.dw();

    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    let mut vbar = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let phase: Vec<Complex64> =
            (0..n).map(|j| cis(TAU_2PI * freq.x(k) * grid.x(j))).collect();
        for m in 0..n {
            let s = af.value(m, k) * cell;
            if s.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                u[j] = phase[j] * w2[(j + n + h - m) % n];
                vbar[j] = (phase[j] * w1[(j + n + h - m) % n]).conj();
            }
            for j in 0..n {
                let t = s * u[j];
                let out = &mut entries[j * n..(j + 1) * n];
                for (e, v) in out.iter_mut().zip(vbar.iter()) {
                    *e += t * v;
                }
            }
        }
    }
    OperatorMatrix::new(grid, entries)
}

// ---- tau-quantization ----

/// tau-quantization of a symbol:
///
/// ```text
///     entries[j][l] = dw Sum_k sigma((1-tau) x_j + tau x_l, w_k) e^{2 pi i (x_j - x_l) w_k}.
/// ```
///
/// The matrix is filled along torus diagonals: each pair (j, l) carries the
/// nearest-image lag d in [-n/2, n/2), and the midpoint x_j - tau d dx is
/// folded into the fundamental domain. Anchoring midpoints this way is what
/// the periodic model demands: a pair sitting on opposite ends of the grid
/// is adjacent through the wrap, and its midpoint lies at the edge, not in
/// the center. The phase factor is n-periodic in the lag and exact, so
/// tau = 0 and tau = 1 reduce to the literal Kohn-Nirenberg forms. For
/// field-backed symbols each diagonal takes one fractional shift of the
/// (periodic) field along the x axis.
pub fn tau_quantization_matrix(
    sigma: &Symbol,
    tau: f64,
    grid: GridSpec,
) -> Result<OperatorMatrix> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::numeric(format!("tau must lie in [0,1], got {tau}")));
    }
    let n = grid.n();
    let ni = n as i64;
    let h = n / 2;
    let dx = grid.dx();
    let dw = grid.dw();
    let freq = grid.conjugate();

    // For field symbols, the x-axis spectrum of the field, stored column
    // major so each frequency column is contiguous: spec_t[k*n + p].
    let field_spec = match &sigma.form {
        Form::Field { field, .. } => {
            let f = field;
            if f.grid() != grid {
                return Err(Error::structural(format!(
                    "field symbol lives on an n={} grid, requested n={}",
                    f.n(),
                    grid.n()
                )));
            }
            let tr = Transform::new(n);
            let mut spec_t = vec![Complex64::new(0.0, 0.0); n * n];
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for k in 0..n {
                for m in 0..n {
                    col[m] = f.value(m, k);
                }
                tr.dft_in_place(dx, &mut col);
                for p in 0..n {
                    spec_t[k * n + p] = col[p];
                }
            }
            Some(spec_t)
        }
        Form::Closed(_) => None,
    };
    let tr = Transform::new(n);

    let roots: Vec<Complex64> = (0..n).map(|r| cis(TAU_2PI * r as f64 / n as f64)).collect();
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    let mut shifted = vec![Complex64::new(0.0, 0.0); n * n];
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for d in -(ni / 2)..(ni / 2) {
        let phase: Vec<Complex64> = (0..n)
            .map(|k| {
                let r = (d * (k as i64 - h as i64)).rem_euclid(ni) as usize;
                roots[r]
            })
            .collect();
        let s = tau * d as f64 * dx;

        match &field_spec {
            None => {
                let f = match &sigma.form {
                    Form::Closed(f) => f,
                    Form::Field { .. } => unreachable!(),
                };
                for j in 0..n {
                    let l = (j as i64 - d).rem_euclid(ni) as usize;
                    let xm = reduce(grid.x(j) - s, grid.period());
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (k, ph) in phase.iter().enumerate() {
                        acc += f(xm, freq.x(k)) * ph;
                    }
                    entries[j * n + l] = acc * dw;
                }
            }
            Some(spec_t) => {
                // shifted[j*n + k] = sigma(x_j - s, w_k), one spectral phase
                // ramp along x per diagonal. The interpolant is periodic, so
                // no explicit folding is needed on this branch.
                for k in 0..n {
                    col.copy_from_slice(&spec_t[k * n..(k + 1) * n]);
                    for (p, z) in col.iter_mut().enumerate() {
                        let up = (p as f64 - h as f64) * dw;
                        *z *= cis(-TAU_2PI * s * up);
                    }
                    tr.idft_in_place(dw, &mut col);
                    for j in 0..n {
                        shifted[j * n + k] = col[j];
                    }
                }
                for j in 0..n {
                    let l = (j as i64 - d).rem_euclid(ni) as usize;
                    let row = &shifted[j * n..(j + 1) * n];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (z, ph) in row.iter().zip(phase.iter()) {
                        acc += z * ph;
                    }
                    entries[j * n + l] = acc * dw;
                }
            }
        }
    }
    OperatorMatrix::new(grid, entries)
}

// ---- Weyl-type symbol of a localization operator ----

/// The tau-symbol of a localization operator: `sigma_tau = a * W_tau(phi2, phi1)`,
/// a periodic phase-space convolution computed spectrally. The result is a
/// field-backed symbol on the windows' grid.
pub fn weyl_symbol_of_locop(
    a: &Symbol,
    phi1: &SampledSignal,
    phi2: &SampledSignal,
    tau: f64,
) -> Result<Symbol> {
    let grid = check_window_pair(phi1, phi2)?;
    let af = a.sample(grid)?;
    let wf = tau_wigner(phi2, phi1, tau)?;
    let ahat = dft2(grid, af.values().to_vec());
    let what = dft2(grid, wf.values().to_vec());
    let chat: Vec<Complex64> = ahat.iter().zip(what.iter()).map(|(x, y)| x * y).collect();
    let values = idft2(grid, chat.clone());
    let field = PhaseSpaceField::from_values(grid, values);
    let mut params = BTreeMap::new();
    params.insert("tau".to_string(), tau);
    Ok(Symbol {
        name: format!("weyl-of({}):tau={tau}", a.name()),
        params,
        form: Form::Field { field, coeffs: chat },
    })
}

// ---- Kernel equality ----

/// Result of [`kernel_equality_check`]: relative Frobenius error per tau and
/// the maximum over the list.
#[derive(Debug, Clone)]
pub struct KernelEqualityReport {
    pub max_rel_error: f64,
    pub per_tau: Vec<(f64, f64)>,
}

/// Verify `Gamma = Op_tau(a * W_tau(phi2, phi1))` for each tau in the list,
/// building both matrices and reporting the relative Frobenius distance.
pub fn kernel_equality_check(
    a: &Symbol,
    phi1: &SampledSignal,
    phi2: &SampledSignal,
    tau_list: &[f64],
) -> Result<KernelEqualityReport> {
    let gamma = localization_matrix(a, phi1, phi2)?;
    let gnorm = gamma.frobenius_norm();
    let mut per_tau = Vec::with_capacity(tau_list.len());
    let mut max_rel_error = 0.0_f64;
    for &tau in tau_list {
        let sig = weyl_symbol_of_locop(a, phi1, phi2, tau)?;
        let op = tau_quantization_matrix(&sig, tau, gamma.grid())?;
        let diff: f64 = gamma
            .entries()
            .iter()
            .zip(op.entries().iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let rel = if gnorm > 0.0 { diff / gnorm } else { diff };
        per_tau.push((tau, rel));
        max_rel_error = max_rel_error.max(rel);
    }
    Ok(KernelEqualityReport { max_rel_error, per_tau })
}

// ---- Matrix element identity ----

fn on_grid(value: f64, spacing: f64) -> bool {
    let q = value / spacing;
    (q - q.round()).abs() < 1e-9
}

/// Check `|<Op_tau(sigma) pi(z) g, pi(w) g>| = |V_{Phi_tau} sigma(T_tau(w,z), J(w-z))|`
/// over a list of grid-aligned probe pairs (z, w); returns the maximum
/// absolute deviation between the two magnitudes.
///
/// The left side is the matrix action plus an inner product. The right side
/// is an independent 2-d STFT of the symbol with window Phi_tau = W_tau(g,g),
/// evaluated at the (generically off-grid) point T_tau(w,z) through the
/// spectral interpolant of the correlation slice.
pub fn matrix_element_identity_check(
    sigma: &Symbol,
    g: &SampledSignal,
    tau: f64,
    probes: &[(TFPoint, TFPoint)],
) -> Result<f64> {
    let grid = g.grid();
    let n = grid.n();
    let dx = grid.dx();
    let dw = grid.dw();
    for (z, w) in probes {
        let aligned = on_grid(z.x, dx) && on_grid(w.x, dx) && on_grid(z.w, dw) && on_grid(w.w, dw);
        if !aligned {
            return Err(Error::structural(format!(
                "probe ({}, {}) / ({}, {}) is not grid aligned",
                z.x, z.w, w.x, w.w
            )));
        }
    }

    let m = tau_quantization_matrix(sigma, tau, grid)?;
    let sf = sigma.sample(grid)?;
    let shat = dft2(grid, sf.values().to_vec());
    let phi = tau_wigner(g, g, tau)?;
    let phihat = dft2(grid, phi.values().to_vec());

    let mut max_err = 0.0_f64;
    let mut vhat = vec![Complex64::new(0.0, 0.0); n * n];
    for &(z, w) in probes {
        let lhs = m.apply(&tf_shift(g, z))?.inner(&tf_shift(g, w))?.norm();

        // V_Phi sigma(., w') with w' = J(w - z): modulating sigma by
        // e^{-2 pi i s.w'} is a circular shift of its spectrum, and
        // correlation with Phi multiplies by conj(Phi^).
        let wp1 = w.w - z.w;
        let wp2 = z.x - w.x;
        let pw = (wp1 / dw).round() as i64;
        let qw = (wp2 / dx).round() as i64;
        for p in 0..n {
            let ps = ((p as i64 + pw).rem_euclid(n as i64)) as usize;
            for q in 0..n {
                let qs = ((q as i64 + qw).rem_euclid(n as i64)) as usize;
                vhat[p * n + q] = shat[ps * n + qs] * phihat[p * n + q].conj();
            }
        }
        let t1 = (1.0 - tau) * w.x + tau * z.x;
        let t2 = tau * w.w + (1.0 - tau) * z.w;
        let rhs = eval_coeffs_at(&vhat, grid, t1, t2).norm();
        max_err = max_err.max((lhs - rhs).abs());
    }
    Ok(max_err)
}

// ---- STFT expansion of the operator action ----

/// Check `Op_tau(sigma) f = Sum_z V_g f(z) Op_tau(sigma)(pi(z) g) dx dw`
/// by literal full-grid quadrature; returns the relative L2 error against
/// the direct matrix action. The window g must have unit norm.
pub fn stft_expansion_check(
    sigma: &Symbol,
    tau: f64,
    f: &SampledSignal,
    g: &SampledSignal,
) -> Result<f64> {
    if (g.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::structural(format!(
            "expansion window must have unit norm, got {}",
            g.norm()
        )));
    }
    if f.grid() != g.grid() {
        return Err(Error::structural("signal and window grids differ".to_string()));
    }
    let grid = f.grid();
    let n = grid.n();
    let h = n / 2;
    let dx = grid.dx();
    let freq = grid.conjugate();
    let cell = grid.dx() * grid.dw();

    let m = tau_quantization_matrix(sigma, tau, grid)?;
    let direct = m.apply(f)?;
    let v = stft(f, g)?;
    let gs = g.samples();
    let ent = m.entries();

    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    let mut pg = vec![Complex64::new(0.0, 0.0); n];
    let mut mg = vec![Complex64::new(0.0, 0.0); n];
    for a in 0..n {
        for k in 0..n {
            let coef = v.value(a, k) * cell;
            for (j, out) in pg.iter_mut().enumerate() {
                *out = cis(TAU_2PI * freq.x(k) * grid.x(j)) * gs[(j + n + h - a) % n];
            }
            for j in 0..n {
                let row = &ent[j * n..(j + 1) * n];
                let mut acc = Complex64::new(0.0, 0.0);
                for (e, x) in row.iter().zip(pg.iter()) {
                    acc += e * x;
                }
                mg[j] = acc * dx;
            }
            for (r, y) in rhs.iter_mut().zip(mg.iter()) {
                *r += coef * y;
            }
        }
    }

    let mut num = 0.0_f64;
    for (r, d) in rhs.iter().zip(direct.samples().iter()) {
        num += (r - d).norm_sqr();
    }
    let num = (num * dx).sqrt();
    let den = direct.norm();
    Ok(if den > 0.0 { num / den } else { num })
}

// ---- Schur bound ----

/// Reduce a coordinate to its nearest periodic image in [-period/2, period/2).
fn reduce(value: f64, period: f64) -> f64 {
    let r = value - (value / period).round() * period;
    if r >= 0.5 * period {
        r - period
    } else {
        r
    }
}

fn condition_weights_sup(m0: &Weight, m1: &Weight, m2: &Weight, tau: f64, r: f64) -> f64 {
    let vals = [-r, -0.5 * r, 0.0, 0.5 * r, r];
    let mut sup = 0.0_f64;
    for &z1 in &vals {
        for &z2 in &vals {
            for &w1 in &vals {
                for &w2 in &vals {
                    let t1 = (1.0 - tau) * w1 + tau * z1;
                    let t2 = tau * w2 + (1.0 - tau) * z2;
                    let j1 = w2 - z2;
                    let j2 = z1 - w1;
                    let ratio = m2.eval(&[w1, w2]) / (m1.eval(&[z1, z2]) * m0.eval(&[t1, t2, j1, j2]));
                    sup = sup.max(ratio);
                }
            }
        }
    }
    sup
}

/// Discrete Schur majorant for the weighted operator norm of Op_tau(sigma):
///
/// ```text
///     Q(z,w) = |V_{Phi_tau} sigma(T_tau(w,z), J(w-z))| m0(T_tau(w,z), J(w-z)),
///     bound  = max( sup_z Sum_w Q dz dw,  sup_w Sum_z Q dz dw ),
/// ```
///
/// computed through the change of variables w' = J(w - z), which turns each
/// row (column) sum into a sum of shifted correlation slices: one slice per
/// dual point w', a circular spectral shift of the symbol spectrum, and a
/// fractional shift by the tau-dependent offset of T_tau. Phase-space
/// differences use the nearest periodic image. With m0 = m1 = m2 = 1 the
/// bound dominates the L2 operator norm.
///
/// The weights must satisfy the compatibility condition
/// `m2(w)/m1(z) <= C m0(T_tau(w,z), J(w-z))`; this is probed on a lattice at
/// two radii and rejected if the sampled supremum still grows.
pub fn schur_bound(
    sigma: &Symbol,
    m0: &Weight,
    m1: &Weight,
    m2: &Weight,
    tau: f64,
    grid: GridSpec,
) -> Result<f64> {
    if m0.dim() != 4 {
        return Err(Error::structural(format!("m0 must be a 4-d weight, got dim {}", m0.dim())));
    }
    if m1.dim() != 2 || m2.dim() != 2 {
        return Err(Error::structural(format!(
            "m1 and m2 must be 2-d weights, got dims {} and {}",
            m1.dim(),
            m2.dim()
        )));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::numeric(format!("tau must lie in [0,1], got {tau}")));
    }
    let s_half = condition_weights_sup(m0, m1, m2, tau, 0.5 * WEIGHT_PROBE_RADIUS);
    let s_full = condition_weights_sup(m0, m1, m2, tau, WEIGHT_PROBE_RADIUS);
    if !s_full.is_finite() || s_full > WEIGHT_GROWTH_LIMIT * s_half {
        return Err(Error::structural(format!(
            "weights fail the compatibility condition: probe supremum grows from {s_half:.3e} \
             to {s_full:.3e}"
        )));
    }

    let n = grid.n();
    let h = n / 2;
    let dx = grid.dx();
    let dw = grid.dw();
    let freq = grid.conjugate();
    let cell = dx * dw;

    let mut g = SampledSignal::gaussian(grid);
    let nrm = g.norm();
    g.scale(Complex64::new(1.0 / nrm, 0.0));
    let phi = tau_wigner(&g, &g, tau)?;
    let phihat = dft2(grid, phi.values().to_vec());
    let sf = sigma.sample(grid)?;
    let shat = dft2(grid, sf.values().to_vec());

    let mut row_acc = vec![0.0_f64; n * n];
    let mut col_acc = vec![0.0_f64; n * n];
    let mut vhat = vec![Complex64::new(0.0, 0.0); n * n];
    let mut work = vec![Complex64::new(0.0, 0.0); n * n];

    // Weights are torus functions in the discrete model: both the midpoint
    // T and the difference w' enter m0 through their nearest-image
    // representatives, so the row and column parametrizations (which place
    // T on representatives a full period apart for wrapped pairs) weigh
    // every pair identically.
    let xper = grid.period();
    let wper = n as f64 * dw;

    for p in 0..n {
        let wp1 = (p as f64 - h as f64) * dw;
        for q in 0..n {
            let wp2 = (q as f64 - h as f64) * dx;
            for pp in 0..n {
                let ps = ((pp + p + n - h) % n) * n;
                let row = &mut vhat[pp * n..(pp + 1) * n];
                for (qq, out) in row.iter_mut().enumerate() {
                    let qs = (qq + q + n - h) % n;
                    *out = shat[ps + qs] * phihat[pp * n + qq].conj();
                }
            }

            // Row sums: z fixed, w = z - J(w') runs over the grid;
            // T_tau(w, z) = z + (-(1-tau) w'_2, tau w'_1).
            let d1 = -(1.0 - tau) * wp2;
            let d2 = tau * wp1;
            accumulate_slice(&vhat, &mut work, grid, d1, d2, |a, b, mag| {
                let t1 = reduce(grid.x(a) + d1, xper);
                let t2 = reduce(freq.x(b) + d2, wper);
                row_acc[a * n + b] += mag * m0.eval(&[t1, t2, wp1, wp2]) * cell;
            });

            // Column sums: w fixed, z = w + J(w');
            // T_tau(w, z) = w + (tau w'_2, -(1-tau) w'_1).
            let d1 = tau * wp2;
            let d2 = -(1.0 - tau) * wp1;
            accumulate_slice(&vhat, &mut work, grid, d1, d2, |a, b, mag| {
                let t1 = reduce(grid.x(a) + d1, xper);
                let t2 = reduce(freq.x(b) + d2, wper);
                col_acc[a * n + b] += mag * m0.eval(&[t1, t2, wp1, wp2]) * cell;
            });
        }
    }
    let bound = row_acc
        .iter()
        .chain(col_acc.iter())
        .fold(0.0_f64, |acc, &v| acc.max(v));
    Ok(bound)
}

/// Shift the slice with spectrum `vhat` by (d1, d2) and hand |value| at every
/// grid point to the accumulator.
fn accumulate_slice(
    vhat: &[Complex64],
    work: &mut [Complex64],
    grid: GridSpec,
    d1: f64,
    d2: f64,
    mut acc: impl FnMut(usize, usize, f64),
) {
    let n = grid.n();
    let h = n as f64 / 2.0;
    let rx: Vec<Complex64> =
        (0..n).map(|p| cis(TAU_2PI * d1 * (p as f64 - h) * grid.dw())).collect();
    let rw: Vec<Complex64> =
        (0..n).map(|q| cis(TAU_2PI * d2 * (q as f64 - h) * grid.dx())).collect();
    for p in 0..n {
        let row = &vhat[p * n..(p + 1) * n];
        let out = &mut work[p * n..(p + 1) * n];
        for ((o, v), r) in out.iter_mut().zip(row.iter()).zip(rw.iter()) {
            *o = v * r * rx[p];
        }
    }
    let shifted = idft2(grid, work.to_vec());
    for a in 0..n {
        for b in 0..n {
            acc(a, b, shifted[a * n + b].norm());
        }
    }
}

// ---- Tests ----
