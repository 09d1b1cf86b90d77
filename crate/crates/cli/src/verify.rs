use std::fmt::Write as _;

use keyrate::families::{
    symmetric_distribution, werner_distribution, SymmetricParams, WernerParams,
};
use keyrate::par::{map_slice, Parallelism};
use keyrate::quantum::{
    derive_distribution, one_distillable_check, ppt_check, quantum_activation, symmetric_state,
    werner_basis_pair_margin, werner_one_distillability_threshold, werner_state, LocalProjector,
    EIGEN_FLOOR,
};

use crate::{fmt_real, CliError, CliResult, Report};

const DIM: usize = 3;
/// Largest entrywise gap allowed between a derived table and its closed form.
pub const DERIVE_TOL: f64 = 1e-9;

const WERNER_GRID: [f64; 8] = [0.3, 0.4, 0.5, 0.55, 0.6, 0.75, 0.9, 1.0];
const SYMMETRIC_GRID: [f64; 5] = [0.1, 0.15, 0.2, 0.25, 0.3];
const ACTIVATION_GRID: [f64; 8] = [0.0, 0.2, 0.45, 0.5, 0.51, 0.55, 0.7, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum QuantumFamily {
    Werner,
    Symmetric,
    Activation,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Landmark {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Landmark {
    fn new(name: String, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

fn check_grid(grid: &[f64]) -> CliResult<()> {
    match grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        Some(v) => Err(CliError::Usage(format!("grid value {v} outside [0, 1]"))),
        None if grid.is_empty() => Err(CliError::Usage("empty grid".into())),
        None => Ok(()),
    }
}

pub fn werner_landmarks(grid: &[f64], tol: f64) -> CliResult<Vec<Landmark>> {
    let per_point = map_slice(
        grid,
        Parallelism::default(),
        |&p| -> keyrate::Result<Vec<Landmark>> {
            let rho = werner_state(p, DIM)?;
            let ppt = ppt_check(&rho, rho.split())?;
            let margin = werner_basis_pair_margin(&rho)?;
            let derived = derive_distribution(&rho)?;
            let err = derived.max_abs_diff(&werner_distribution(WernerParams::qutrit(p)?)?);
            Ok(vec![
                Landmark::new(
                    format!("werner p={} ppt", fmt_real(p)),
                    ppt.is_ppt == (p <= 0.5),
                    format!(
                        "ppt={} npt={} min_pt_eigenvalue={}",
                        ppt.is_ppt,
                        !ppt.is_ppt,
                        fmt_real(ppt.min_eigenvalue)
                    ),
                ),
                Landmark::new(
                    format!("werner p={} one-distillable", fmt_real(p)),
                    (margin < EIGEN_FLOOR) == (p > 0.6),
                    format!("basis_pair_margin={}", fmt_real(margin)),
                ),
                Landmark::new(
                    format!("werner p={} derived table", fmt_real(p)),
                    err < tol,
                    format!("max_abs_error={}", fmt_real(err)),
                ),
            ])
        },
    );
    let mut out = Vec::new();
    for v in per_point {
        out.extend(v?);
    }
    let t = werner_one_distillability_threshold(DIM, 0.5, 1.0, 1e-8)?;
    out.push(Landmark::new(
        "werner one-distillability threshold".into(),
        (t - 0.6).abs() < 1e-6,
        format!("bisection={}", fmt_real(t)),
    ));
    Ok(out)
}

pub fn symmetric_landmarks(grid: &[f64], tol: f64) -> CliResult<Vec<Landmark>> {
    let alice = LocalProjector::basis_pair(DIM * DIM, 0, 1)?;
    let bob = LocalProjector::basis_pair(DIM * DIM, 3, 4)?;
    let per_point = map_slice(
        grid,
        Parallelism::default(),
        |&q| -> keyrate::Result<Vec<Landmark>> {
            let sigma = symmetric_state(q, DIM)?;
            let ppt = ppt_check(&sigma, sigma.split())?;
            let distillable = one_distillable_check(&sigma, &alice, &bob)?;
            let derived = derive_distribution(&sigma)?;
            let err = derived.max_abs_diff(&symmetric_distribution(SymmetricParams::qutrit(q)?)?);
            let edge = 1.0 / (DIM as f64 + 2.0);
            Ok(vec![
                Landmark::new(
                    format!("symmetric q={} ppt", fmt_real(q)),
                    ppt.is_ppt == (q <= edge),
                    format!(
                        "ppt={} min_pt_eigenvalue={}",
                        ppt.is_ppt,
                        fmt_real(ppt.min_eigenvalue)
                    ),
                ),
                Landmark::new(
                    format!("symmetric q={} one-distillable", fmt_real(q)),
                    distillable == (q > edge),
                    format!("projected_npt={distillable}"),
                ),
                Landmark::new(
                    format!("symmetric q={} derived table", fmt_real(q)),
                    err < tol,
                    format!("max_abs_error={}", fmt_real(err)),
                ),
            ])
        },
    );
    let mut out = Vec::new();
    for v in per_point {
        out.extend(v?);
    }
    Ok(out)
}

/// Activation with the universal activator `q = 1/(d+2)`.
pub fn activation_landmarks(grid: &[f64]) -> CliResult<Vec<Landmark>> {
    let q = SymmetricParams::universal_activator(DIM)?.q;
    let mut out = Vec::new();
    for &p in grid {
        let a = quantum_activation(p, q, DIM)?;
        out.push(Landmark::new(
            format!("activation p={} q={}", fmt_real(p), fmt_real(q)),
            a.distillable == (p > 0.5),
            format!(
                "overlap={} distillable={}",
                fmt_real(a.overlap),
                a.distillable
            ),
        ));
    }
    Ok(out)
}

pub fn cmd_verify_quantum(
    family: QuantumFamily,
    grid: Option<&[f64]>,
    tol: Option<f64>,
) -> CliResult<Report> {
    if let Some(g) = grid {
        check_grid(g)?;
    }
    let tol = tol.unwrap_or(DERIVE_TOL);
    let pick = |default: &'static [f64]| grid.unwrap_or(default);
    let mut marks = Vec::new();
    if matches!(family, QuantumFamily::Werner | QuantumFamily::All) {
        marks.extend(werner_landmarks(pick(&WERNER_GRID), tol)?);
    }
    if matches!(family, QuantumFamily::Symmetric | QuantumFamily::All) {
        marks.extend(symmetric_landmarks(pick(&SYMMETRIC_GRID), tol)?);
    }
    if matches!(family, QuantumFamily::Activation | QuantumFamily::All) {
        marks.extend(activation_landmarks(pick(&ACTIVATION_GRID))?);
    }
    let mut summary = String::new();
    let passed = marks.iter().filter(|m| m.passed).count();
    for m in &marks {
        let _ = writeln!(
            summary,
            "{} {}: {}",
            if m.passed { "PASS" } else { "FAIL" },
            m.name,
            m.detail
        );
    }
    let _ = writeln!(summary, "{passed}/{} landmarks passed", marks.len());
    Ok(Report {
        summary,
        artifact: None,
        failed: passed != marks.len(),
    })
}
