//! End-to-end tests of the `tflab` binary: exit codes, file outputs, and
//! cross-process determinism. Each test runs the compiled binary in a fresh
//! temporary directory.

use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use tflab_core::gabor::{mod_norm, Lattice};
use tflab_core::grid::{dft, GridSpec, SampledSignal};
use tflab_core::spectral::SpectrumReport;
use tflab_core::tfr::PhaseSpaceField;
use tflab_core::verify::VerifyReport;
use tflab_core::weights::parse_weight;

fn tflab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tflab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should spawn")
}

fn assert_code(out: &Output, want: i32) {
    let got = out.status.code().expect("no exit code");
    assert_eq!(
        got,
        want,
        "exit {got}, wanted {want}\nstdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

fn unit_gauss(grid: GridSpec) -> SampledSignal {
    let mut g = SampledSignal::gaussian(grid);
    let nrm = g.norm();
    g.scale(Complex64::new(1.0 / nrm, 0.0));
    g
}

#[test]
fn stft_gaussian_center_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = tflab(
        &["stft", "--window", "gauss", "--signal", "gauss", "--n", "64", "--out", "."],
        dir.path(),
    );
    assert_code(&out, 0);
    let field = PhaseSpaceField::from_json(&read(dir.path(), "stft.json")).unwrap();
    let c = field.grid().center();
    let center = field.value(c, c).norm();
    assert!((center - 1.0).abs() <= 1e-10, "center magnitude {center}");
    let abs_csv = read(dir.path(), "stft_abs.csv");
    let mut lines = abs_csv.lines();
    assert!(lines.next().unwrap().starts_with("# n=64 L="));
    assert_eq!(lines.next().unwrap(), "m,k,x,w,abs");
    assert_eq!(lines.count(), 64 * 64);
}

#[test]
fn wigner_tau_zero_matches_rihaczek() {
    let dir = tempfile::tempdir().unwrap();
    let out = tflab(
        &["wigner", "--tau", "0", "--f", "gauss", "--g", "gauss", "--n", "32", "--out", "."],
        dir.path(),
    );
    assert_code(&out, 0);
    let field = PhaseSpaceField::from_json(&read(dir.path(), "wigner.json")).unwrap();
    let grid = field.grid();
    let freq = grid.conjugate();
    let g = unit_gauss(grid);
    let ghat = dft(&g);
    let tau2pi = 2.0 * std::f64::consts::PI;
    for m in (0..32).step_by(5) {
        for k in (0..32).step_by(7) {
            let phase = -tau2pi * grid.x(m) * freq.x(k);
            let want = Complex64::new(phase.cos(), phase.sin())
                * g.samples()[m]
                * ghat.samples()[k].conj();
            let err = (field.value(m, k) - want).norm();
            assert!(err < 1e-12, "({m},{k}): err {err}");
        }
    }
}

#[test]
fn wigner_rejects_tau_outside_range() {
    let dir = tempfile::tempdir().unwrap();
    let out = tflab(&["wigner", "--tau", "2"], dir.path());
    assert_code(&out, 2);
}

#[test]
fn locop_gaussian_benchmark_via_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("exp.cfg"),
        "# Gaussian benchmark\nn = 64\nsymbol = gauss2d:sx=1,sw=1\nphi1 = gauss\nphi2 = gauss\nout = .\n",
    )
    .unwrap();
    let out = tflab(&["locop", "--config", "exp.cfg", "--eig"], dir.path());
    assert_code(&out, 0);
    let report = SpectrumReport::from_json(&read(dir.path(), "spectrum.json")).unwrap();
    assert_eq!(report.overlaps.len(), 6);
    for (k, ov) in report.overlaps.iter().enumerate() {
        assert!(*ov >= 0.99, "overlap {k}: {ov}");
    }
    for pair in report.eigenvalues.windows(2) {
        assert!(pair[0] > pair[1], "eigenvalues not strictly decreasing: {pair:?}");
    }
    assert!(*report.eigenvalues.last().unwrap() > -1e-12);
    assert!(!report.decay_fits.is_empty());
    assert!(dir.path().join("operator.json").exists());
}

#[test]
fn locop_constant_symbol_spectrum_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let out = tflab(
        &["locop", "--symbol", "const:1", "--eig", "--n", "32", "--out", "."],
        dir.path(),
    );
    assert_code(&out, 0);
    let report = SpectrumReport::from_json(&read(dir.path(), "spectrum.json")).unwrap();
    assert_eq!(report.eigenvalues.len(), 32);
    for lam in &report.eigenvalues {
        assert!((lam - 1.0).abs() < 1e-8, "{lam}");
    }
}

/// A sampled symbol with a nonzero imaginary part, written as a field file.
fn complex_field_json(n: usize) -> String {
    let c = n as f64 / 2.0;
    let mut re = Vec::with_capacity(n);
    let mut im = Vec::with_capacity(n);
    for m in 0..n {
        let (mut rrow, mut irow) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for k in 0..n {
            let d2 = (m as f64 - c).powi(2) + (k as f64 - c).powi(2);
            rrow.push((-d2 / 8.0).exp());
            irow.push(0.5 * (-d2 / 8.0).exp());
        }
        re.push(rrow);
        im.push(irow);
    }
    serde_json::json!({ "n": n, "L": (n as f64).sqrt(), "re": re, "im": im }).to_string()
}

#[test]
fn locop_complex_symbol_with_eig_exits_structural() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("sym.json"), complex_field_json(16)).unwrap();
    let out = tflab(
        &["locop", "--symbol", "field:sym.json", "--eig", "--n", "16", "--out", "."],
        dir.path(),
    );
    assert_code(&out, 4);
}

#[test]
fn locop_accepts_complex_symbol_without_eig() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("sym.json"), complex_field_json(16)).unwrap();
    let out = tflab(
        &["locop", "--symbol", "field:sym.json", "--n", "16", "--out", "."],
        dir.path(),
    );
    assert_code(&out, 0);
    assert!(dir.path().join("operator.json").exists());
    assert!(!dir.path().join("spectrum.json").exists());
}

#[test]
fn verify_weights_seeded_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = tflab(&["verify", "weights", "--seed", "7", "--out", "."], dir.path());
    assert_code(&out, 0);
    let report = VerifyReport::from_json(&read(dir.path(), "verify-weights.json")).unwrap();
    assert!(report.passed);
    assert_eq!(report.seed, 7);
    assert_eq!(report.metrics["lemma_violations"], 0.0);
    assert_eq!(report.metrics["appendix_violations"], 0.0);
    assert!(!report.tolerances.is_empty());
}

#[test]
fn verify_requires_seed_for_randomized_suites() {
    let dir = tempfile::tempdir().unwrap();
    let out = tflab(&["verify", "weights"], dir.path());
    assert_code(&out, 2);
}

#[test]
fn verify_unknown_suite_exits_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = tflab(&["verify", "bogus", "--seed", "1"], dir.path());
    assert_code(&out, 2);
}

#[test]
fn verify_kernel_equality_needs_no_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = tflab(&["verify", "kernel-equality", "--n", "64", "--out", "."], dir.path());
    assert_code(&out, 0);
    let report =
        VerifyReport::from_json(&read(dir.path(), "verify-kernel-equality.json")).unwrap();
    assert!(report.passed);
    assert!(report.metrics["max_rel_error"] <= 1e-6);
}

#[test]
fn verify_reports_are_cross_process_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for sub in [&a, &b] {
        let out = tflab(
            &["verify", "young-holder", "--seed", "5", "--out", sub.to_str().unwrap()],
            dir.path(),
        );
        assert_code(&out, 0);
    }
    let ra = std::fs::read(a.join("verify-young-holder.json")).unwrap();
    let rb = std::fs::read(b.join("verify-young-holder.json")).unwrap();
    assert_eq!(ra, rb, "reports differ between identical runs");
}

#[test]
fn tflab_out_env_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("results");
    let out = Command::new(env!("CARGO_BIN_EXE_tflab"))
        .args(["stft", "--n", "16"])
        .current_dir(dir.path())
        .env("TFLAB_OUT", &target)
        .output()
        .expect("binary should spawn");
    assert_code(&out, 0);
    assert!(target.join("stft.json").exists());
    assert!(!dir.path().join("stft.json").exists());
}

#[test]
fn format_selection_controls_field_payloads() {
    let dir = tempfile::tempdir().unwrap();
    let out = tflab(&["stft", "--n", "16", "--format", "csv", "--out", "."], dir.path());
    assert_code(&out, 0);
    assert!(dir.path().join("stft.csv").exists());
    assert!(dir.path().join("stft_abs.csv").exists());
    assert!(!dir.path().join("stft.json").exists());
}

#[test]
fn modnorm_matches_the_library_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = tflab(&["modnorm", "--n", "32", "--out", "."], dir.path());
    assert_code(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "modnorm.json")).unwrap();
    let grid = GridSpec::new(32, None).unwrap();
    let g = unit_gauss(grid);
    let lat = Lattice::parse("lat:a=4,b=4", grid).unwrap();
    let w = parse_weight("const:c=1,dim=2").unwrap();
    let want = mod_norm(&g, &g, lat, 2.0, 2.0, &w).unwrap();
    let got = report["value"].as_f64().unwrap();
    assert!((got - want).abs() <= 1e-12 * want.max(1.0), "got {got}, want {want}");
    assert_eq!(report["p"], "2");

    let out = tflab(
        &["modnorm", "--n", "32", "--p", "inf", "--q", "1", "--out", "."],
        dir.path(),
    );
    assert_code(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "modnorm.json")).unwrap();
    assert_eq!(report["p"], "inf");
    assert!(report["value"].as_f64().unwrap().is_finite());
}
