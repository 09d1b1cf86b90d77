//! Advantage distillation on two-bit distributions: Bob's exact error, lower
//! bounds on Eve's error, the distillability conditions comparing their
//! exponential rates, threshold solving, and a Monte Carlo run of the block
//! protocol.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::families::{self, DerivedConstants};
use crate::labels::EveSymbol;
use crate::par::{map_range, Parallelism};
use crate::probdist::TripartiteDistribution;

/// Symmetric weight used for the activated family unless told otherwise.
pub const DEFAULT_ACTIVATOR_Q: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Werner,
    Symmetric,
    Activated,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Werner => "werner",
            Family::Symmetric => "symmetric",
            Family::Activated => "activated",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "werner" => Ok(Family::Werner),
            "symmetric" => Ok(Family::Symmetric),
            "activated" => Ok(Family::Activated),
            other => Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        }
    }
}

impl Family {
    /// Bracket known to contain the threshold.
    pub fn default_bracket(self) -> (f64, f64) {
        match self {
            Family::Werner => (0.5, 1.0),
            Family::Symmetric => (0.05, 1.0),
            Family::Activated => (0.5, 0.6),
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Family::Werner | Family::Symmetric => 1e-6,
            Family::Activated => 1e-4,
        }
    }
}

/// `β_N = β^N / (β^N + (1-β)^N)`: Bob's error given that he accepted.
pub fn bob_error(beta: f64, n: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::Domain(format!("β = {beta} outside [0, 1)")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "block size must be at least 1".into(),
        ));
    }
    let wrong = beta.powi(n as i32);
    Ok(wrong / (wrong + (1.0 - beta).powi(n as i32)))
}

/// `(β/(1-β))^N`, the upper bound on [`bob_error`] that is tight as `N → ∞`.
pub fn bob_error_bound(beta: f64, n: u32) -> f64 {
    (beta / (1.0 - beta)).powi(n as i32)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `½ C(N, N/2) δ^{N/2} (1-δ)^{N/2}`: Eve's error on the blocks where her
/// symbols are evenly split and tell her nothing.
pub fn eve_error_lower_bound_werner(delta_z: f64, n: u32) -> Result<f64> {
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "block size {n} must be even"
        )));
    }
    if !(0.0..=1.0).contains(&delta_z) {
        return Err(Error::Domain(format!("δ_Z = {delta_z} outside [0, 1]")));
    }
    let half = n / 2;
    Ok(0.5 * binomial(n, half) * (delta_z * (1.0 - delta_z)).powi(half as i32))
}

/// Per-symbol rate `2√(δ_Z(1-δ_Z))` of the Werner bound.
pub fn werner_eve_rate(delta_z: f64) -> f64 {
    2.0 * (delta_z * (1.0 - delta_z)).sqrt()
}

/// Diagonal-conditioned Eve probabilities of the binaryzed symmetric table:
/// `δ₁ = P(z~0100|00)`, `η₁ = P(z~0100|11)`, `δ₂ = P(z~1000|00)`,
/// `η₂ = P(z~1000|11)`, and `δ₃` the total weight of the uninformative `z~**22`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricRates {
    pub delta1: f64,
    pub eta1: f64,
    pub delta2: f64,
    pub eta2: f64,
    pub delta3: f64,
}

impl SymmetricRates {
    pub fn from_constants(k: &DerivedConstants) -> Self {
        Self {
            delta1: k.p_g,
            eta1: k.p_l,
            delta2: k.p_b,
            eta2: k.p_h,
            delta3: k.p_l + k.p_h,
        }
    }

    pub fn eve_rate(&self) -> f64 {
        2.0 * (self.delta1 * self.eta1).sqrt()
            + 2.0 * (self.delta2 * self.eta2).sqrt()
            + self.delta3
    }
}

/// `(α+γ)²/3`. Agrees with [`SymmetricRates::eve_rate`] while
/// `γ ≤ α ≤ 2γ`, i.e. for `q ∈ [1/17, 1/5]`; outside that range the square
/// roots pick up the other sign of `α - γ` or `2γ - α`.
pub fn symmetric_rate_closed_form(k: &DerivedConstants) -> f64 {
    (k.alpha + k.gamma).powi(2) / 3.0
}

/// Eve's symbol classes on the diagonal of the activated table, each
/// probability normalized by the diagonal cell it is conditioned on.
/// Classes 1–5 hold three symbols each with the same `δᵢ` (and `ηᵢ` on the
/// mirrored symbol); `delta6` is the total weight of the `z~**22` symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SixClassRates {
    pub delta: [f64; 5],
    pub eta: [f64; 5],
    pub delta6: f64,
}

/// Symbols per class in each diagonal cell.
pub const CLASS_MULTIPLICITY: f64 = 3.0;

impl SixClassRates {
    /// `Σ_classes 3(δᵢ + ηᵢ) + δ₆`, which must be 1.
    pub fn completeness(&self) -> f64 {
        CLASS_MULTIPLICITY
            * self
                .delta
                .iter()
                .zip(&self.eta)
                .map(|(d, e)| d + e)
                .sum::<f64>()
            + self.delta6
    }

    /// `6(√(δ₁η₁) + … + √(δ₅η₅)) + δ₆`.
    pub fn eve_rate(&self) -> f64 {
        2.0 * CLASS_MULTIPLICITY
            * self
                .delta
                .iter()
                .zip(&self.eta)
                .map(|(d, e)| (d * e).sqrt())
                .sum::<f64>()
            + self.delta6
    }

    /// The six weights `6√(δᵢηᵢ)` (i ≤ 5) and `δ₆` of the multinomial bound.
    pub fn weights(&self) -> [f64; 6] {
        let mut w = [0.0; 6];
        for i in 0..5 {
            w[i] = 2.0 * CLASS_MULTIPLICITY * (self.delta[i] * self.eta[i]).sqrt();
        }
        w[5] = self.delta6;
        w
    }
}

/// Eve's asymptotic per-symbol rate for one family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EveRates {
    Werner { delta_z: f64 },
    Symmetric(SymmetricRates),
    Activated(SixClassRates),
}

/// Right-hand side of the family's distillability condition
/// `β/(1-β) < rate`.
pub fn condition_rhs(rates: &EveRates) -> f64 {
    match rates {
        EveRates::Werner { delta_z } => werner_eve_rate(*delta_z),
        EveRates::Symmetric(r) => r.eve_rate(),
        EveRates::Activated(r) => r.eve_rate(),
    }
}

/// `Σ_e √(P(e|X=Y=0) P(e|X=Y=1))` over Eve's symbols, read directly from a
/// two-bit table. Every family's rate equals this coefficient, which makes
/// it a cross-check on the class bookkeeping.
pub fn bhattacharyya_rate(dist: &TripartiteDistribution) -> Result<f64> {
    let (nx, ny, nz) = dist.shape();
    if nx != 2 || ny != 2 {
        return Err(Error::InvalidArgument(
            "expected binary honest alphabets".into(),
        ));
    }
    let xy = dist.xy_table();
    let (d0, d1) = (xy[0], xy[3]);
    if d0 <= 0.0 || d1 <= 0.0 {
        return Err(Error::ZeroMass);
    }
    Ok((0..nz)
        .map(|z| (dist.get(0, 0, z) / d0 * dist.get(1, 1, z) / d1).sqrt())
        .sum())
}

fn classify(bit: u8, symbol: EveSymbol) -> Result<Option<(usize, bool)>> {
    let EveSymbol::Joint((zi, zj), [a, b, c, d]) = symbol else {
        return Err(Error::Structure(format!(
            "{symbol} is not an activated symbol"
        )));
    };
    if (c, d) == (2, 2) {
        return Ok(None);
    }
    if c != d || c > 1 {
        return Err(Error::Structure(format!(
            "{symbol} cannot occur on the diagonal"
        )));
    }
    let matches = c == bit;
    if zi == zj {
        if a == zi && b == zi {
            return Ok(Some((0, matches)));
        }
        return Err(Error::Structure(format!(
            "{symbol} mixes z_ii with an unrelated z~"
        )));
    }
    let (s, t) = (zi.min(zj), zi.max(zj));
    let werner_ts = (zi, zj) == (t, s);
    let tilde_ts = match (a, b) {
        (x, y) if (x, y) == (s, t) => false,
        (x, y) if (x, y) == (t, s) => true,
        _ => {
            return Err(Error::Structure(format!(
                "{symbol} pairs z_{s}{t} with a z~ on other indices"
            )))
        }
    };
    let class = match (werner_ts, tilde_ts) {
        (true, false) => 1,
        (true, true) => 2,
        (false, false) => 3,
        (false, true) => 4,
    };
    Ok(Some((class, matches)))
}

/// Class rates read from the diagonal cell `X₂ = Y₂ = bit` of an activated table.
pub fn six_class_rates_in_cell(q_star: &TripartiteDistribution, bit: u8) -> Result<SixClassRates> {
    let (nx, ny, nz) = q_star.shape();
    if nx != 2 || ny != 2 || bit > 1 {
        return Err(Error::InvalidArgument(
            "expected a two-bit activated table".into(),
        ));
    }
    let b = bit as usize;
    let cell: f64 = (0..nz).map(|z| q_star.get(b, b, z)).sum();
    if cell <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let mut members: [[Vec<f64>; 2]; 5] = Default::default();
    let mut delta6 = 0.0;
    for (z, label) in q_star.z_alphabet().iter().enumerate() {
        let p = q_star.get(b, b, z) / cell;
        if p == 0.0 {
            continue;
        }
        match classify(bit, label.parse()?)? {
            None => delta6 += p,
            Some((class, matches)) => members[class][usize::from(!matches)].push(p),
        }
    }
    let mut rates = SixClassRates {
        delta: [0.0; 5],
        eta: [0.0; 5],
        delta6,
    };
    for (class, pair) in members.iter().enumerate() {
        for (side, values) in pair.iter().enumerate() {
            if values.len() > CLASS_MULTIPLICITY as usize {
                return Err(Error::Structure(format!(
                    "class {} has {} symbols",
                    class + 1,
                    values.len()
                )));
            }
            let (lo, hi) = values.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| {
                (lo.min(*v), hi.max(*v))
            });
            // Absent members carry zero mass; present ones must agree.
            if !values.is_empty() && values.len() < 3 && lo > 1e-15 {
                return Err(Error::Structure(format!(
                    "class {} is missing symbols",
                    class + 1
                )));
            }
            if values.len() == 3 && hi - lo > 1e-9 {
                return Err(Error::Structure(format!(
                    "class {} members disagree: {values:?}",
                    class + 1
                )));
            }
            let mean = values.iter().sum::<f64>() / CLASS_MULTIPLICITY;
            if side == 0 {
                rates.delta[class] = mean;
            } else {
                rates.eta[class] = mean;
            }
        }
    }
    Ok(rates)
}

/// Class rates of an activated table, checked against the mirrored cell.
pub fn six_class_rates(q_star: &TripartiteDistribution) -> Result<SixClassRates> {
    let zero = six_class_rates_in_cell(q_star, 0)?;
    let one = six_class_rates_in_cell(q_star, 1)?;
    let gap = zero
        .delta
        .iter()
        .chain(&zero.eta)
        .zip(one.delta.iter().chain(&one.eta))
        .map(|(a, b)| (a - b).abs())
        .fold((zero.delta6 - one.delta6).abs(), f64::max);
    if gap > 1e-9 {
        return Err(Error::Structure(format!(
            "diagonal cells 00 and 11 disagree by {gap}"
        )));
    }
    Ok(zero)
}

/// `½ Σ N!/∏(2nᵢ)! ∏ wᵢ^{2nᵢ}` over `Σ 2nᵢ = N`: the even-count terms of the
/// multinomial expansion of `(Σ wᵢ)^N`, i.e. `½ N! [t^N] ∏ cosh(wᵢ t)`.
pub fn multinomial_eve_bound(weights: &[f64], n: u32) -> Result<f64> {
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "block size {n} must be even"
        )));
    }
    let n = n as usize;
    // poly[m] holds the coefficient of t^m / m!.
    let mut poly = vec![0.0; n + 1];
    poly[0] = 1.0;
    for &w in weights {
        let mut next = vec![0.0; n + 1];
        for (m, &c) in poly.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for k in (0..=n - m).step_by(2) {
                next[m + k] += c * binomial((m + k) as u32, k as u32) * w.powi(k as i32);
            }
        }
        poly = next;
    }
    Ok(0.5 * poly[n])
}

/// One row of the condition analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ADReport {
    pub family: Family,
    /// `p` for Werner and activated, `q` for symmetric.
    pub parameter: f64,
    /// The other parameter: `q` for the activated family.
    pub fixed: Option<f64>,
    pub beta: f64,
    pub bob_ratio: f64,
    pub eve_rate: f64,
    pub condition_ratio: f64,
    pub distillable: bool,
}

/// Bob's error and Eve's rate for one family at one parameter value.
pub fn family_rates(family: Family, parameter: f64, fixed: Option<f64>) -> Result<(f64, EveRates)> {
    if !(0.0..=1.0).contains(&parameter) {
        return Err(Error::InvalidArgument(format!(
            "parameter {parameter} outside [0, 1]"
        )));
    }
    match family {
        Family::Werner => {
            let k = DerivedConstants::new(parameter, 0.0);
            Ok((k.werner_beta(), EveRates::Werner { delta_z: k.delta_z }))
        }
        Family::Symmetric => {
            let k = DerivedConstants::new(0.0, parameter);
            Ok((
                k.symmetric_beta(),
                EveRates::Symmetric(SymmetricRates::from_constants(&k)),
            ))
        }
        Family::Activated => {
            let q = fixed.unwrap_or(DEFAULT_ACTIVATOR_Q);
            let q_star = families::activated_distribution(parameter, q)?;
            Ok((
                families::bit_error(&q_star)?,
                EveRates::Activated(six_class_rates(&q_star)?),
            ))
        }
    }
}

pub fn report(family: Family, parameter: f64, fixed: Option<f64>) -> Result<ADReport> {
    let (beta, rates) = family_rates(family, parameter, fixed)?;
    let bob_ratio = beta / (1.0 - beta);
    let eve_rate = condition_rhs(&rates);
    let condition_ratio = if eve_rate > 0.0 {
        bob_ratio / eve_rate
    } else {
        f64::INFINITY
    };
    Ok(ADReport {
        family,
        parameter,
        fixed: match family {
            Family::Activated => Some(fixed.unwrap_or(DEFAULT_ACTIVATOR_Q)),
            _ => fixed,
        },
        beta,
        bob_ratio,
        eve_rate,
        condition_ratio,
        distillable: condition_ratio < 1.0,
    })
}

/// Bisects `condition_ratio(θ) = 1` on `[lo, hi]` down to an interval of width `tol`.
pub fn threshold(family: Family, fixed: Option<f64>, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "need lo < hi and tol > 0, got [{lo}, {hi}] tol {tol}"
        )));
    }
    let gap = |t: f64| report(family, t, fixed).map(|r| r.condition_ratio - 1.0);
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (gap(a)?, gap(b)?);
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if ga.signum() == gb.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            ratio_lo: ga + 1.0,
            ratio_hi: gb + 1.0,
        });
    }
    let lo_sign = ga.signum();
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let g = gap(mid)?;
        if g == 0.0 {
            return Ok(mid);
        }
        if g.signum() == lo_sign {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub block_size: u32,
    /// Accepted blocks to collect.
    pub trials: u64,
    pub seed: u64,
    pub raw_block_cap: u64,
    /// Raw blocks per independently seeded chunk.
    pub chunk_blocks: u64,
    pub parallelism: Parallelism,
}

impl SimulationOptions {
    pub fn new(block_size: u32, trials: u64, seed: u64) -> Self {
        Self {
            block_size,
            trials,
            seed,
            raw_block_cap: 1_000_000_000,
            chunk_blocks: 1 << 14,
            parallelism: Parallelism::default(),
        }
    }
}

/// Counts from a Monte Carlo run, conditioned on Bob accepting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOutcome {
    pub block_size: u32,
    pub trials: u64,
    pub raw_blocks: u64,
    pub accepted: u64,
    pub bob_errors: u64,
    pub eve_errors: u64,
    /// Accepted blocks where Bob's bit equals Alice's.
    pub agreed: u64,
    /// Eve's errors on the `agreed` blocks.
    pub eve_errors_agreed: u64,
}

/// A rate and its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    pub value: f64,
    pub std_error: f64,
}

impl Rate {
    fn from_counts(hits: u64, total: u64) -> Self {
        if total == 0 {
            return Self {
                value: f64::NAN,
                std_error: f64::NAN,
            };
        }
        let value = hits as f64 / total as f64;
        Self {
            value,
            std_error: (value * (1.0 - value) / total as f64).sqrt(),
        }
    }
}

impl SimulationOutcome {
    pub fn bob_error_rate(&self) -> Rate {
        Rate::from_counts(self.bob_errors, self.accepted)
    }

    pub fn eve_error_rate(&self) -> Rate {
        Rate::from_counts(self.eve_errors, self.accepted)
    }

    /// Eve's error on accepted blocks that Bob decoded correctly; this is
    /// the event the counting bounds on Eve's error are derived for.
    pub fn eve_error_rate_agreed(&self) -> Rate {
        Rate::from_counts(self.eve_errors_agreed, self.agreed)
    }
}

pub fn simulate_ad(
    dist: &TripartiteDistribution,
    block_size: u32,
    trials: u64,
    seed: u64,
) -> Result<SimulationOutcome> {
    simulate_ad_with(dist, &SimulationOptions::new(block_size, trials, seed))
}

/// Runs the bit AD protocol: Alice draws `ζ`, announces `ā = a ⊕ ζ`, Bob
/// accepts when every `bₖ ⊕ āₖ` agrees. Eve guesses `ζ` by maximum a
/// posteriori over the full table given `ā`, her symbols and Bob's
/// acceptance; exact ties are broken by a fair coin.
pub fn simulate_ad_with(
    dist: &TripartiteDistribution,
    opts: &SimulationOptions,
) -> Result<SimulationOutcome> {
    let (nx, ny, _) = dist.shape();
    if nx != 2 || ny != 2 {
        return Err(Error::InvalidArgument(
            "advantage distillation needs binary honest alphabets".into(),
        ));
    }
    if opts.block_size == 0 {
        return Err(Error::InvalidArgument(
            "block size must be at least 1".into(),
        ));
    }
    if opts.chunk_blocks == 0 {
        return Err(Error::InvalidArgument("chunk size must be positive".into()));
    }
    let sampler = Sampler::new(dist);
    let wave = 64u64;
    let mut outcomes: Vec<u8> = Vec::with_capacity(opts.trials as usize);
    let mut raw_blocks = 0u64;
    let mut next_chunk = 0u64;
    while (outcomes.len() as u64) < opts.trials {
        if raw_blocks >= opts.raw_block_cap {
            return Err(Error::SimulationCap {
                cap: opts.raw_block_cap,
                wanted: opts.trials,
            });
        }
        let remaining = opts.raw_block_cap - raw_blocks;
        let chunks = wave.min(remaining.div_ceil(opts.chunk_blocks));
        let batch = map_range(chunks as usize, opts.parallelism, |i| {
            let chunk = next_chunk + i as u64;
            let start = chunk * opts.chunk_blocks;
            let blocks = opts
                .chunk_blocks
                .min(opts.raw_block_cap - start.min(opts.raw_block_cap));
            sampler.run_chunk(opts.block_size, blocks, opts.seed, chunk)
        });
        for (blocks, accepted) in batch {
            raw_blocks += blocks;
            outcomes.extend(accepted);
        }
        next_chunk += chunks;
    }
    outcomes.truncate(opts.trials as usize);
    let mut out = SimulationOutcome {
        block_size: opts.block_size,
        trials: opts.trials,
        raw_blocks,
        accepted: outcomes.len() as u64,
        bob_errors: 0,
        eve_errors: 0,
        agreed: 0,
        eve_errors_agreed: 0,
    };
    for o in outcomes {
        let bob = o & BOB_ERR != 0;
        let eve = o & EVE_ERR != 0;
        out.bob_errors += u64::from(bob);
        out.eve_errors += u64::from(eve);
        if !bob {
            out.agreed += 1;
            out.eve_errors_agreed += u64::from(eve);
        }
    }
    Ok(out)
}

const BOB_ERR: u8 = 1;
const EVE_ERR: u8 = 2;

struct Sampler<'a> {
    dist: &'a TripartiteDistribution,
    cumulative: Vec<f64>,
    support: Vec<(u8, u8, usize)>,
}

impl<'a> Sampler<'a> {
    fn new(dist: &'a TripartiteDistribution) -> Self {
        let mut cumulative = Vec::new();
        let mut support = Vec::new();
        let mut acc = 0.0;
        for (x, y, z, p) in dist.support() {
            acc += p;
            cumulative.push(acc);
            support.push((x as u8, y as u8, z));
        }
        Self {
            dist,
            cumulative,
            support,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> (u8, u8, usize) {
        let u = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
        let i = self.cumulative.partition_point(|c| *c <= u);
        self.support[i.min(self.support.len() - 1)]
    }

    /// Returns the raw block count and one outcome byte per accepted block.
    fn run_chunk(&self, n: u32, blocks: u64, seed: u64, chunk: u64) -> (u64, Vec<u8>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        let nz = self.dist.z_alphabet().len();
        let mut accepted = Vec::new();
        // counts[ā][z]
        let mut counts = vec![[0i32; 2]; nz];
        'block: for _ in 0..blocks {
            let zeta: u8 = rng.random_range(0..2);
            for c in counts.iter_mut() {
                *c = [0, 0];
            }
            let mut chi = None;
            for _ in 0..n {
                let (a, b, z) = self.draw(&mut rng);
                let a_bar = a ^ zeta;
                let c = b ^ a_bar;
                match chi {
                    None => chi = Some(c),
                    Some(prev) if prev != c => continue 'block,
                    _ => {}
                }
                counts[z][a_bar as usize] += 1;
            }
            let chi = chi.expect("n >= 1");
            let posterior = |guess: u8| -> f64 {
                (0..2u8)
                    .map(|bob| {
                        let mut w = 1.0;
                        for (z, c) in counts.iter().enumerate() {
                            for a_bar in 0..2u8 {
                                if c[a_bar as usize] > 0 {
                                    let p = self.dist.get(
                                        (a_bar ^ guess) as usize,
                                        (a_bar ^ bob) as usize,
                                        z,
                                    );
                                    w *= p.powi(c[a_bar as usize]);
                                }
                            }
                        }
                        w
                    })
                    .sum()
            };
            let (w0, w1) = (posterior(0), posterior(1));
            let guess = if w0 > w1 * (1.0 + 1e-12) {
                0
            } else if w1 > w0 * (1.0 + 1e-12) {
                1
            } else {
                rng.random_range(0..2u8)
            };
            let mut o = 0;
            if chi != zeta {
                o |= BOB_ERR;
            }
            if guess != zeta {
                o |= EVE_ERR;
            }
            accepted.push(o);
        }
        (blocks, accepted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{binaryze_werner, werner_distribution, WernerParams};

    #[test]
    fn bob_error_values() {
        assert!((bob_error(1.0 / 3.0, 2).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(bob_error(0.0, 5).unwrap(), 0.0);
        for n in 1..10 {
            assert!((bob_error(0.5, n).unwrap() - 0.5).abs() < 1e-15);
        }
        assert!(matches!(bob_error(1.0, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn bob_error_decreases_towards_bound() {
        let beta = 0.3;
        let mut prev = 1.0;
        for n in 1..40 {
            let e = bob_error(beta, n).unwrap();
            assert!(e < prev);
            assert!(e <= bob_error_bound(beta, n));
            prev = e;
        }
        let ratio = bob_error(beta, 60).unwrap() / bob_error_bound(beta, 60);
        assert!((ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn werner_eve_bound_values() {
        assert!((eve_error_lower_bound_werner(0.5, 2).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(eve_error_lower_bound_werner(0.0, 4).unwrap(), 0.0);
        assert!(eve_error_lower_bound_werner(0.3, 3).is_err());
    }

    #[test]
    fn werner_eve_bound_rate_is_two_sqrt() {
        let dz = 0.1;
        let rate = werner_eve_rate(dz);
        let r = |n: u32| eve_error_lower_bound_werner(dz, n).unwrap().ln();
        // ln C(N, N/2) = N ln 2 - ½ ln(πN/2) + O(1/N), so doubling N from 200
        // shifts the prefactor by -½ ln 2
        let slope = (r(400) - r(200) + 0.5 * 2f64.ln()) / 200.0;
        assert!((slope - rate.ln()).abs() < 1e-5, "{slope} vs {}", rate.ln());
    }

    #[test]
    fn multinomial_single_weight() {
        // one class: ½ w^N
        let v = multinomial_eve_bound(&[0.7], 6).unwrap();
        assert!((v - 0.5 * 0.7f64.powi(6)).abs() < 1e-15);
        // two classes, N = 2: ½ (w1² + w2²)
        let v = multinomial_eve_bound(&[0.3, 0.4], 2).unwrap();
        assert!((v - 0.5 * 0.25).abs() < 1e-15);
        assert!(multinomial_eve_bound(&[0.3], 3).is_err());
    }

    #[test]
    fn multinomial_matches_enumeration() {
        let w: [f64; 6] = [0.2, 0.05, 0.3, 0.1, 0.07, 0.15];
        for n in [2u32, 4, 6, 8] {
            let mut total = 0.0;
            let half = n / 2;
            fn fact(k: u32) -> f64 {
                (1..=k).map(f64::from).product()
            }
            // enumerate n1..n6 with Σ nᵢ = N/2
            let mut stack = vec![(0usize, half, 1.0f64)];
            while let Some((i, left, acc)) = stack.pop() {
                if i == 5 {
                    let k = 2 * left;
                    total += acc * w[5].powi(k as i32) / fact(k);
                    continue;
                }
                for m in 0..=left {
                    let k = 2 * m;
                    stack.push((i + 1, left - m, acc * w[i].powi(k as i32) / fact(k)));
                }
            }
            let want = 0.5 * fact(n) * total;
            let got = multinomial_eve_bound(&w, n).unwrap();
            assert!((got - want).abs() < 1e-15 * want.max(1.0), "{n}");
        }
    }

    #[test]
    fn werner_report_at_threshold() {
        let r = report(Family::Werner, 0.6, None).unwrap();
        assert!((r.bob_ratio - 0.5).abs() < 1e-12);
        assert!((r.eve_rate - 0.5).abs() < 1e-12);
        assert!((r.condition_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_report_at_threshold() {
        let r = report(Family::Symmetric, 0.2, None).unwrap();
        assert!((r.bob_ratio - 0.5).abs() < 1e-12);
        assert!((r.eve_rate - 0.5).abs() < 1e-12);
        let k = DerivedConstants::new(0.0, 0.2);
        assert!((symmetric_rate_closed_form(&k) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn symmetric_closed_form_window() {
        for q in [1.0 / 17.0 + 1e-9, 0.08, 0.12, 0.16, 0.2] {
            let k = DerivedConstants::new(0.0, q);
            let a = SymmetricRates::from_constants(&k).eve_rate();
            assert!((a - symmetric_rate_closed_form(&k)).abs() < 1e-12, "q={q}");
        }
        let k = DerivedConstants::new(0.0, 0.5);
        let a = SymmetricRates::from_constants(&k).eve_rate();
        assert!((a - (k.alpha.powi(2) - k.gamma.powi(2))).abs() < 1e-12);
    }

    #[test]
    fn thresholds() {
        let t = threshold(Family::Werner, None, 0.5, 1.0, 1e-9).unwrap();
        assert!((t - 0.6).abs() < 1e-6, "{t}");
        let t = threshold(Family::Symmetric, None, 0.05, 1.0, 1e-9).unwrap();
        assert!((t - 0.2).abs() < 1e-6, "{t}");
    }

    #[test]
    fn threshold_needs_a_bracket() {
        let err = threshold(Family::Werner, None, 0.7, 1.0, 1e-6).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn family_names() {
        for f in [Family::Werner, Family::Symmetric, Family::Activated] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("bogus".parse::<Family>().is_err());
    }

    #[test]
    fn simulation_rejects_non_binary_input() {
        let w = werner_distribution(WernerParams::qutrit(0.6).unwrap()).unwrap();
        assert!(matches!(
            simulate_ad(&w, 2, 10, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn simulation_is_deterministic_across_modes() {
        let w = werner_distribution(WernerParams::qutrit(0.6).unwrap()).unwrap();
        let t = binaryze_werner(&w, 2).unwrap();
        let mut opts = SimulationOptions::new(4, 5_000, 9);
        opts.chunk_blocks = 1000;
        opts.parallelism = Parallelism::Sequential;
        let a = simulate_ad_with(&t, &opts).unwrap();
        opts.parallelism = Parallelism::Parallel;
        let b = simulate_ad_with(&t, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.accepted, 5_000);
        assert!(a.bob_errors <= a.accepted && a.eve_errors <= a.accepted);
    }

    #[test]
    fn deterministic_eve_never_errs() {
        // δ_Z = 0 at p = 1/3
        let w = werner_distribution(WernerParams::qutrit(1.0 / 3.0).unwrap()).unwrap();
        let t = binaryze_werner(&w, 2).unwrap();
        let out = simulate_ad(&t, 4, 2_000, 1).unwrap();
        assert_eq!(out.eve_errors, 0);
    }

    #[test]
    fn simulation_cap_is_enforced() {
        let w = werner_distribution(WernerParams::qutrit(0.6).unwrap()).unwrap();
        let t = binaryze_werner(&w, 2).unwrap();
        let mut opts = SimulationOptions::new(8, 1_000_000, 0);
        opts.raw_block_cap = 10_000;
        opts.chunk_blocks = 1_000;
        assert!(matches!(
            simulate_ad_with(&t, &opts),
            Err(Error::SimulationCap { .. })
        ));
    }
}
