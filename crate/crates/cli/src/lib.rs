//! Command implementations behind the `keyrate` binary. Each command
//! returns a [`Report`]; the binary decides where its pieces are written.

pub mod args;
pub mod sweep;
pub mod verify;

use std::fs;
use std::path::Path;

use keyrate::ad::{self, Family, SimulationOptions};
use keyrate::families::{self, SymmetricParams, WernerParams};
use keyrate::intrinsic::{minimize_intrinsic_with, IntrinsicOptions};
use keyrate::labels;
use keyrate::probdist::round_significant;
use keyrate::TripartiteDistribution;

pub use args::{Cli, Command, Globals};
pub use sweep::{SweepRow, SweepSpec};

/// Significant digits of every printed or serialized float.
pub const DIGITS: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] keyrate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use keyrate::Error as E;
        match self {
            CliError::Verification(_) => 1,
            CliError::Core(E::SimulationCap { .. } | E::DegenerateProjection | E::Structure(_)) => {
                1
            }
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a command produced. `artifact` is the primary output (a document or
/// CSV) and goes to `--out` or stdout; `summary` is human-readable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub summary: String,
    pub artifact: Option<String>,
    /// Set by checks that ran to completion but found a failure.
    pub failed: bool,
}

/// 12 significant digits, shortest form, no negative zero.
pub fn fmt_real(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r = round_significant(x, DIGITS);
    if r == 0.0 {
        "0".into()
    } else {
        r.to_string()
    }
}

pub fn read_distribution(path: &Path) -> CliResult<TripartiteDistribution> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    TripartiteDistribution::from_json(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Splitmix-style derivation of a named sub-stream from the global seed, so
/// the optimizer and the simulator can be rerun on their own.
pub fn substream(seed: u64, name: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in name.bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn need(value: Option<f64>, flag: &str, family: &str) -> CliResult<f64> {
    value.ok_or_else(|| CliError::Usage(format!("{family} needs --{flag} in [0, 1]")))
}

fn usage<T>(r: keyrate::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::Usage(e.to_string()))
}

pub fn build_distribution(
    family: Family,
    p: Option<f64>,
    q: Option<f64>,
) -> CliResult<TripartiteDistribution> {
    Ok(match family {
        Family::Werner => {
            families::werner_distribution(usage(WernerParams::qutrit(need(p, "p", "werner")?))?)?
        }
        Family::Symmetric => families::symmetric_distribution(usage(SymmetricParams::qutrit(
            need(q, "q", "symmetric")?,
        ))?)?,
        Family::Activated => {
            let p = need(p, "p", "activated")?;
            let q = q.unwrap_or(ad::DEFAULT_ACTIVATOR_Q);
            usage(WernerParams::qutrit(p))?;
            usage(SymmetricParams::qutrit(q))?;
            families::activated_distribution(p, q)?
        }
    })
}

fn document_report(dist: &TripartiteDistribution) -> Report {
    let json = dist.to_json(Some(DIGITS));
    let total: f64 = dist.probabilities().iter().sum();
    let (nx, ny, nz) = dist.shape();
    Report {
        summary: format!(
            "alphabets {nx} x {ny} x {nz}\nsupport {}\nchecksum {}\n",
            dist.support().count(),
            fmt_real(total)
        ),
        artifact: Some(json + "\n"),
        failed: false,
    }
}

pub fn cmd_dist(family: Family, p: Option<f64>, q: Option<f64>) -> CliResult<Report> {
    Ok(document_report(&build_distribution(family, p, q)?))
}

/// Picks the binaryzation from the shape of Alice's labels: single trits
/// mean a Werner table, trit pairs a symmetric one.
pub fn cmd_binaryze(input: &Path, discard: usize) -> CliResult<Report> {
    let dist = read_distribution(input)?;
    let first = dist.x_alphabet().first().map(|l| labels::digits(l));
    let out = match first {
        Some(Some(d)) if d.len() == 1 => usage(families::binaryze_werner(&dist, discard))?,
        Some(Some(d)) if d.len() == 2 => usage(families::binaryze_symmetric(&dist))?,
        _ => {
            return Err(CliError::Usage(
                "cannot tell the family from Alice's alphabet".into(),
            ))
        }
    };
    Ok(document_report(&out))
}

pub fn cmd_activate(werner: &Path, symmetric: &Path) -> CliResult<Report> {
    let w = read_distribution(werner)?;
    let s = read_distribution(symmetric)?;
    Ok(document_report(&usage(families::activate(&w, &s))?))
}

pub fn cmd_intrinsic(input: &Path, starts: usize, seed: u64) -> CliResult<Report> {
    let dist = read_distribution(input)?;
    let opts = IntrinsicOptions {
        starts,
        seed: substream(seed, "optimizer"),
        ..IntrinsicOptions::default()
    };
    let r = usage(minimize_intrinsic_with(&dist, &opts))?;
    let summary = format!(
        "intrinsic_upper_bound {}\nstarts {}\nbest_start {}\nconverged {}\n",
        fmt_real(r.value),
        r.starts,
        r.best_start,
        r.converged
    );
    let mut doc = r.best_channel.to_document();
    for row in &mut doc.matrix {
        for v in row.iter_mut() {
            *v = round_significant(*v, DIGITS);
        }
    }
    let json = serde_json::to_string_pretty(&doc).expect("channel documents serialize");
    Ok(Report {
        summary,
        artifact: Some(json + "\n"),
        failed: false,
    })
}

pub fn cmd_threshold(
    family: Family,
    fixed: Option<f64>,
    bracket: Option<(f64, f64)>,
    tol: Option<f64>,
) -> CliResult<Report> {
    let (lo, hi) = bracket.unwrap_or_else(|| family.default_bracket());
    let tol = tol.unwrap_or_else(|| family.default_tolerance());
    if family != Family::Activated && fixed.is_some() {
        return Err(CliError::Usage(format!("{family} takes no --q")));
    }
    let t = usage(ad::threshold(family, fixed, lo, hi, tol))?;
    Ok(Report {
        summary: fmt_real(t) + "\n",
        artifact: None,
        failed: false,
    })
}

pub fn cmd_sweep(spec: &SweepSpec) -> CliResult<Report> {
    let rows = sweep::run(spec)?;
    Ok(Report {
        summary: format!("rows {}\n", rows.len()),
        artifact: Some(sweep::render_csv(spec, &rows)),
        failed: false,
    })
}

/// The binary table the protocol runs on for each family.
pub fn protocol_table(
    family: Family,
    p: Option<f64>,
    q: Option<f64>,
) -> CliResult<TripartiteDistribution> {
    match family {
        Family::Werner => {
            let w = build_distribution(Family::Werner, p, None)?;
            Ok(families::binaryze_werner(&w, families::DEFAULT_DISCARD)?)
        }
        Family::Symmetric => {
            let s = build_distribution(Family::Symmetric, None, q)?;
            Ok(families::binaryze_symmetric(&s)?)
        }
        Family::Activated => build_distribution(Family::Activated, p, q),
    }
}

pub fn cmd_simulate(
    family: Family,
    p: Option<f64>,
    q: Option<f64>,
    block_size: u32,
    trials: u64,
    seed: u64,
) -> CliResult<Report> {
    let table = protocol_table(family, p, q)?;
    let opts = SimulationOptions::new(block_size, trials, substream(seed, "simulator"));
    let out = usage(ad::simulate_ad_with(&table, &opts))?;
    let beta = families::bit_error(&table)?;
    let bob = out.bob_error_rate();
    let eve = out.eve_error_rate();
    let eve_agreed = out.eve_error_rate_agreed();
    let mut s = String::new();
    s += &format!(
        "block_size {block_size}\naccepted {}\nraw_blocks {}\n",
        out.accepted, out.raw_blocks
    );
    s += &format!(
        "bob_error {} +- {}\n",
        fmt_real(bob.value),
        fmt_real(bob.std_error)
    );
    s += &format!(
        "bob_error_exact {}\n",
        fmt_real(usage(ad::bob_error(beta, block_size))?)
    );
    s += &format!(
        "eve_error {} +- {}\n",
        fmt_real(eve.value),
        fmt_real(eve.std_error)
    );
    s += &format!(
        "eve_error_agreed {} +- {}\n",
        fmt_real(eve_agreed.value),
        fmt_real(eve_agreed.std_error)
    );
    if family == Family::Werner && block_size.is_multiple_of(2) {
        let dz = families::DerivedConstants::new(p.unwrap_or_default(), 0.0).delta_z;
        s += &format!(
            "eve_error_bound {}\n",
            fmt_real(ad::eve_error_lower_bound_werner(dz, block_size)?)
        );
    }
    Ok(Report {
        summary: s,
        artifact: None,
        failed: false,
    })
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> CliResult<Report> {
    let g = &cli.globals;
    match &cli.command {
        Command::Dist { family, p, q } => cmd_dist(*family, *p, *q),
        Command::Binaryze { input, discard } => cmd_binaryze(input, *discard),
        Command::Activate { werner, symmetric } => cmd_activate(werner, symmetric),
        Command::Intrinsic { input, starts } => cmd_intrinsic(input, *starts, g.seed),
        Command::Threshold { family, q, lo, hi } => {
            let bracket = match (lo, hi) {
                (Some(a), Some(b)) => Some((*a, *b)),
                (None, None) => None,
                _ => return Err(CliError::Usage("give both --lo and --hi".into())),
            };
            cmd_threshold(*family, *q, bracket, g.tol)
        }
        Command::Sweep {
            family,
            from,
            to,
            steps,
            fixed,
        } => {
            let (lo, hi) = family.default_bracket();
            let spec = SweepSpec::new(
                *family,
                from.unwrap_or(lo),
                to.unwrap_or(hi),
                *steps,
                *fixed,
                g.seed,
            )?;
            cmd_sweep(&spec)
        }
        Command::Simulate {
            family,
            p,
            q,
            block_size,
            trials,
        } => cmd_simulate(*family, *p, *q, *block_size, *trials, g.seed),
        Command::VerifyQuantum { family, grid } => {
            verify::cmd_verify_quantum(*family, grid.as_deref(), g.tol)
        }
    }
}
