use std::fmt::Write as _;

use keyrate::ad::{self, ADReport, Family};
use keyrate::intrinsic::analytic_werner_intrinsic;
use keyrate::par::{map_range, Parallelism};

use crate::{fmt_real, CliError, CliResult};

/// A parameter grid over one family. The swept parameter is `q` for the
/// symmetric family and `p` otherwise; `fixed` is the activated family's `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub fixed: Option<f64>,
    /// Recorded in the header; the sweep itself draws no random numbers.
    pub seed: u64,
}

impl SweepSpec {
    pub fn new(
        family: Family,
        from: f64,
        to: f64,
        steps: usize,
        fixed: Option<f64>,
        seed: u64,
    ) -> CliResult<Self> {
        if !(from < to) || from < 0.0 || to > 1.0 {
            return Err(CliError::Usage(format!(
                "sweep range must satisfy 0 <= from < to <= 1, got [{from}, {to}]"
            )));
        }
        if steps < 2 {
            return Err(CliError::Usage(format!(
                "need at least 2 steps, got {steps}"
            )));
        }
        match (family, fixed) {
            (Family::Activated, Some(q)) if !(0.0..=1.0).contains(&q) => {
                return Err(CliError::Usage(format!("--fixed {q} outside [0, 1]")))
            }
            (Family::Werner | Family::Symmetric, Some(_)) => {
                return Err(CliError::Usage(format!("{family} sweeps take no --fixed")))
            }
            _ => {}
        }
        Ok(Self {
            family,
            from,
            to,
            steps,
            fixed,
            seed,
        })
    }

    pub fn parameter_name(&self) -> &'static str {
        match self.family {
            Family::Symmetric => "q",
            _ => "p",
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub report: ADReport,
    /// Werner sweeps only.
    pub intrinsic_analytic: Option<f64>,
}

pub fn run(spec: &SweepSpec) -> CliResult<Vec<SweepRow>> {
    let grid = spec.grid();
    map_range(grid.len(), Parallelism::default(), |i| {
        let t = grid[i];
        let report = ad::report(spec.family, t, spec.fixed)?;
        let intrinsic_analytic = match spec.family {
            Family::Werner => Some(analytic_werner_intrinsic(t)?),
            _ => None,
        };
        Ok(SweepRow {
            report,
            intrinsic_analytic,
        })
    })
    .into_iter()
    .collect::<keyrate::Result<Vec<_>>>()
    .map_err(CliError::from)
}

pub fn render_csv(spec: &SweepSpec, rows: &[SweepRow]) -> String {
    let werner = spec.family == Family::Werner;
    let x_col = if spec.family == Family::Symmetric {
        3
    } else {
        2
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# keyrate sweep family={} parameter={} from={} to={} steps={} fixed={} seed={}",
        spec.family,
        spec.parameter_name(),
        fmt_real(spec.from),
        fmt_real(spec.to),
        spec.steps,
        spec.fixed.map_or("none".into(), fmt_real),
        spec.seed
    );
    let _ = writeln!(
        out,
        "# gnuplot: set datafile separator ','; plot 'FILE' using {x_col}:7 with lines title 'condition_ratio', 1 notitle"
    );
    out += "family,p,q,beta,bob_ratio,eve_rate,condition_ratio,distillable";
    out += if werner {
        ",intrinsic_analytic\n"
    } else {
        "\n"
    };
    for row in rows {
        let r = &row.report;
        let (p, q) = match spec.family {
            Family::Werner => (fmt_real(r.parameter), String::new()),
            Family::Symmetric => (String::new(), fmt_real(r.parameter)),
            Family::Activated => (
                fmt_real(r.parameter),
                r.fixed.map_or(String::new(), fmt_real),
            ),
        };
        let _ = write!(
            out,
            "{},{p},{q},{},{},{},{},{}",
            r.family,
            fmt_real(r.beta),
            fmt_real(r.bob_ratio),
            fmt_real(r.eve_rate),
            fmt_real(r.condition_ratio),
            r.distillable
        );
        if let Some(a) = row.intrinsic_analytic {
            let _ = write!(out, ",{}", fmt_real(a));
        }
        out.push('\n');
    }
    out
}
