//! Intrinsic information `I(X;Y↓Z) = min over channels Z→Z̄ of I(X;Y|Z̄)`.
//!
//! The minimum is searched numerically, so every value reported here is an
//! upper bound on the true intrinsic information: a local search can miss
//! the global minimum.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::labels;
use crate::par::{map_range, Parallelism};
use crate::probdist::{
    apply_channel, conditional_mutual_information, entropy, EveChannel, TripartiteDistribution,
};

/// `I(X;Y|Z̄)` after Eve applies `ch`. An upper bound on `I(X;Y↓Z)`.
pub fn intrinsic_upper_bound(dist: &TripartiteDistribution, ch: &EveChannel) -> Result<f64> {
    Ok(conditional_mutual_information(&apply_channel(dist, ch)?))
}

/// Eve's nine Werner-table symbols `z00 … z22`.
pub fn werner_eve_alphabet() -> Vec<String> {
    (0..3)
        .flat_map(|i| (0..3).map(move |j| labels::werner_eve(i, j)))
        .collect()
}

/// The channel that sends each `z_ii` to one of the four symbols `z_ij`,
/// `z_ji` with `j ≠ i`, uniformly, and leaves the off-diagonal symbols alone.
/// It reaches zero at `p = 1/2` and its value is [`analytic_werner_intrinsic`].
pub fn conjectured_werner_channel() -> EveChannel {
    conjectured_channel_for(&werner_eve_alphabet()).expect("Werner alphabet is complete")
}

/// The conjectured channel laid out on `alphabet`, if `alphabet` is exactly
/// the nine Werner symbols in some order.
pub fn conjectured_channel_for(alphabet: &[String]) -> Option<EveChannel> {
    let mut sorted = alphabet.to_vec();
    sorted.sort();
    if sorted != werner_eve_alphabet() {
        return None;
    }
    let pos: HashMap<&str, usize> = alphabet
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let n = alphabet.len();
    let mut matrix = vec![0.0; n * n];
    for i in 0..3 {
        for j in 0..3 {
            let row = pos[labels::werner_eve(i, j).as_str()];
            if i == j {
                for t in (0..3).filter(|&t| t != i) {
                    matrix[row * n + pos[labels::werner_eve(i, t).as_str()]] = 0.25;
                    matrix[row * n + pos[labels::werner_eve(t, i).as_str()]] = 0.25;
                }
            } else {
                matrix[row * n + row] = 1.0;
            }
        }
    }
    EveChannel::new(alphabet.to_vec(), alphabet.to_vec(), matrix).ok()
}

/// Closed form of the conjectured channel's value on the Werner table, in
/// bits, with `τ = 1 + p` and `x = √(2p(1-p))`.
pub fn analytic_werner_intrinsic(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
    }
    let tau = 1.0 + p;
    let x = (2.0 * p * (1.0 - p)).sqrt();
    if tau - 2.0 * x <= 0.0 || 1.0 - x * x <= 0.0 {
        return Err(Error::Domain(format!(
            "expression undefined at p = {p} (τ - 2x = {})",
            tau - 2.0 * x
        )));
    }
    // x log(...) and (1 - τ/2) log(2 - τ) vanish with their prefactors.
    let xlog = |coef: f64, arg: f64| if coef == 0.0 { 0.0 } else { coef * arg.log2() };
    let ratio = (1.0 + x) / (1.0 - x) * ((tau - 2.0 * x) / (tau + 2.0 * x)).sqrt();
    let value = -(1.0 - x * x).log2() - xlog(x, ratio)
        + tau / 4.0 * (tau * tau - 4.0 * x * x).log2()
        + xlog(1.0 - tau / 2.0, 2.0 - tau);
    // a conditional mutual information; cancellation near p = 1/2 can dip below 0
    Ok(value.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntrinsicOptions {
    /// Number of local searches, including the seeded identity and
    /// conjectured-channel starts.
    pub starts: usize,
    pub seed: u64,
    /// A search stops once every coordinate step is below this size.
    pub min_step: f64,
    /// Smallest objective decrease that counts as an improvement.
    pub tolerance: f64,
    /// Objective evaluations allowed per start.
    pub max_evaluations: usize,
    pub parallelism: Parallelism,
}

impl Default for IntrinsicOptions {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            min_step: 1e-7,
            tolerance: 1e-15,
            max_evaluations: 400_000,
            parallelism: Parallelism::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicResult {
    /// Lowest `I(X;Y|Z̄)` found, in bits (an upper bound).
    pub value: f64,
    pub best_channel: EveChannel,
    pub starts: usize,
    /// Index of the start that produced `value`.
    pub best_start: usize,
    /// False if any start hit its evaluation budget before its steps shrank.
    pub converged: bool,
}

/// Multi-start minimization with default options.
pub fn minimize_intrinsic(
    dist: &TripartiteDistribution,
    starts: usize,
    seed: u64,
) -> Result<IntrinsicResult> {
    minimize_intrinsic_with(
        dist,
        &IntrinsicOptions {
            starts,
            seed,
            ..IntrinsicOptions::default()
        },
    )
}

pub fn minimize_intrinsic_with(
    dist: &TripartiteDistribution,
    opts: &IntrinsicOptions,
) -> Result<IntrinsicResult> {
    if opts.starts == 0 {
        return Err(Error::InvalidArgument(
            "at least one start is required".into(),
        ));
    }
    let (order, canonical) = canonical_z_order(dist)?;
    let objective = Objective::new(&canonical);
    let alphabet = canonical.z_alphabet();
    let conjectured = conjectured_channel_for(alphabet);

    let runs = map_range(opts.starts, opts.parallelism, |k| {
        let start = match (k, &conjectured) {
            (0, _) => Params::from_channel(EveChannel::identity(alphabet).matrix(), alphabet.len()),
            (1, Some(ch)) => Params::from_channel(ch.matrix(), alphabet.len()),
            _ => Params::random(alphabet.len(), opts.seed, k as u64),
        };
        objective.local_search(start, opts)
    });

    let (best_start, best) = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .expect("at least one start");
    let n = order.len();
    let found = best.params.channel();
    let mut matrix = vec![0.0; n * n];
    for (r, &orig_r) in order.iter().enumerate() {
        for (c, &orig_c) in order.iter().enumerate() {
            matrix[orig_r * n + orig_c] = found[r * n + c];
        }
    }
    let original = dist.z_alphabet().to_vec();
    let best_channel = EveChannel::new(original.clone(), original, matrix)?;
    Ok(IntrinsicResult {
        value: best.value.max(0.0),
        best_channel,
        starts: opts.starts,
        best_start,
        converged: runs.iter().all(|r| r.converged),
    })
}

/// Reorders Eve's symbols by a key that ignores how any alphabet is labeled
/// or ordered (the symbol's mass, then its sorted column of joint
/// probabilities), so the random starts, and hence the answer, do not depend
/// on the input's label order.
fn canonical_z_order(
    dist: &TripartiteDistribution,
) -> Result<(Vec<usize>, TripartiteDistribution)> {
    let (nx, ny, nz) = dist.shape();
    let columns: Vec<Vec<f64>> = (0..nz)
        .map(|z| {
            let mut col: Vec<f64> = (0..nx)
                .flat_map(|x| (0..ny).map(move |y| (x, y)))
                .map(|(x, y)| dist.get(x, y, z))
                .collect();
            col.sort_by(|a, b| b.total_cmp(a));
            col
        })
        .collect();
    let mass: Vec<f64> = columns.iter().map(|c| c.iter().sum()).collect();
    let mut order: Vec<usize> = (0..nz).collect();
    order.sort_by(|&a, &b| {
        mass[b].total_cmp(&mass[a]).then_with(|| {
            columns[a]
                .iter()
                .zip(&columns[b])
                .map(|(u, v)| v.total_cmp(u))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let z_alphabet = order
        .iter()
        .map(|&z| dist.z_alphabet()[z].clone())
        .collect();
    let mut probs = Vec::with_capacity(nx * ny * nz);
    for x in 0..nx {
        for y in 0..ny {
            probs.extend(order.iter().map(|&z| dist.get(x, y, z)));
        }
    }
    let canonical = TripartiteDistribution::new(
        dist.x_alphabet().to_vec(),
        dist.y_alphabet().to_vec(),
        z_alphabet,
        probs,
    )?;
    Ok((order, canonical))
}

/// Row-wise square parametrization: channel row `r` is `u_r² / |u_r|²`,
/// which reaches every point of the simplex, faces included.
#[derive(Debug, Clone)]
struct Params {
    n: usize,
    u: Vec<f64>,
}

impl Params {
    fn from_channel(matrix: &[f64], n: usize) -> Self {
        Self {
            n,
            u: matrix.iter().map(|c| c.sqrt()).collect(),
        }
    }

    /// Rows drawn uniformly from the simplex; stream `k` of `seed`.
    fn random(n: usize, seed: u64, k: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k);
        let u = (0..n * n)
            .map(|_| {
                let e: f64 = -(1.0 - rng.random::<f64>()).ln();
                e.sqrt()
            })
            .collect();
        Self { n, u }
    }

    fn row(&self, r: usize, out: &mut [f64]) -> bool {
        let u = &self.u[r * self.n..(r + 1) * self.n];
        let norm: f64 = u.iter().map(|v| v * v).sum();
        if !(norm > 0.0) {
            return false;
        }
        for (o, v) in out.iter_mut().zip(u) {
            *o = v * v / norm;
        }
        true
    }

    fn channel(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n * self.n];
        for r in 0..self.n {
            let ok = self.row(r, &mut m[r * self.n..(r + 1) * self.n]);
            debug_assert!(ok);
        }
        m
    }
}

struct SearchOutcome {
    value: f64,
    params: Params,
    converged: bool,
}

/// `I(X;Y|Z̄)` as a function of the channel, evaluated from the joint table
/// `J[xy][z̄]`, which is updated one channel row at a time.
struct Objective {
    nx: usize,
    ny: usize,
    nz: usize,
    /// `P(x, y, z)` with rows indexed by `xy`.
    joint: Vec<f64>,
}

impl Objective {
    fn new(dist: &TripartiteDistribution) -> Self {
        let (nx, ny, nz) = dist.shape();
        Self {
            nx,
            ny,
            nz,
            joint: dist.probabilities().to_vec(),
        }
    }

    fn mixed(&self, channel: &[f64]) -> Vec<f64> {
        let nz = self.nz;
        let mut out = vec![0.0; self.nx * self.ny * nz];
        for xy in 0..self.nx * self.ny {
            for z in 0..nz {
                let p = self.joint[xy * nz + z];
                if p == 0.0 {
                    continue;
                }
                for zb in 0..nz {
                    out[xy * nz + zb] += p * channel[z * nz + zb];
                }
            }
        }
        out
    }

    fn value(&self, mixed: &[f64]) -> f64 {
        let (nx, ny, nz) = (self.nx, self.ny, self.nz);
        let mut xz = vec![0.0; nx * nz];
        let mut yz = vec![0.0; ny * nz];
        let mut z = vec![0.0; nz];
        for x in 0..nx {
            for y in 0..ny {
                for zb in 0..nz {
                    let p = mixed[(x * ny + y) * nz + zb];
                    xz[x * nz + zb] += p;
                    yz[y * nz + zb] += p;
                    z[zb] += p;
                }
            }
        }
        entropy(xz) + entropy(yz) - entropy(mixed.iter().copied()) - entropy(z)
    }

    /// Coordinate search on the square parametrization. Each coordinate
    /// keeps its own step, doubled after a successful move and halved after
    /// a failed pair of moves.
    fn local_search(&self, mut params: Params, opts: &IntrinsicOptions) -> SearchOutcome {
        let n = self.nz;
        let nxy = self.nx * self.ny;
        let mut channel = params.channel();
        let mut mixed = self.mixed(&channel);
        let mut value = self.value(&mixed);
        let mut steps = vec![0.25_f64; n * n];
        let mut evaluations = 0usize;
        let mut trial_row = vec![0.0; n];
        let mut trial_mixed = mixed.clone();

        loop {
            if steps.iter().all(|s| *s < opts.min_step) {
                return SearchOutcome {
                    value,
                    params,
                    converged: true,
                };
            }
            if evaluations >= opts.max_evaluations {
                return SearchOutcome {
                    value,
                    params,
                    converged: false,
                };
            }
            for coord in 0..n * n {
                if steps[coord] < opts.min_step {
                    continue;
                }
                let r = coord / n;
                let original = params.u[coord];
                let mut moved = false;
                for dir in [1.0, -1.0] {
                    params.u[coord] = original + dir * steps[coord];
                    evaluations += 1;
                    if !params.row(r, &mut trial_row) {
                        continue;
                    }
                    trial_mixed.copy_from_slice(&mixed);
                    let old_row = &channel[r * n..(r + 1) * n];
                    for xy in 0..nxy {
                        let p = self.joint[xy * n + r];
                        if p == 0.0 {
                            continue;
                        }
                        for zb in 0..n {
                            trial_mixed[xy * n + zb] += p * (trial_row[zb] - old_row[zb]);
                        }
                    }
                    let candidate = self.value(&trial_mixed);
                    if candidate < value - opts.tolerance {
                        value = candidate;
                        channel[r * n..(r + 1) * n].copy_from_slice(&trial_row);
                        std::mem::swap(&mut mixed, &mut trial_mixed);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    steps[coord] = (steps[coord] * 2.0).min(1.0);
                } else {
                    params.u[coord] = original;
                    steps[coord] *= 0.5;
                }
            }
            // Incremental updates drift; resync the joint table once per sweep.
            mixed = self.mixed(&channel);
            value = self.value(&mixed);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{werner_distribution, WernerParams};
    use crate::probdist::mutual_information;

    fn werner(p: f64) -> TripartiteDistribution {
        werner_distribution(WernerParams::qutrit(p).unwrap()).unwrap()
    }

    #[test]
    fn conjectured_channel_rows() {
        let ch = conjectured_werner_channel();
        let a = ch.input_alphabet();
        let z00 = a.iter().position(|l| l == "z00").unwrap();
        let z01 = a.iter().position(|l| l == "z01").unwrap();
        for (j, label) in a.iter().enumerate() {
            let want = match label.as_str() {
                "z01" | "z02" | "z10" | "z20" => 0.25,
                _ => 0.0,
            };
            assert_eq!(ch.row(z00)[j], want, "{label}");
            assert_eq!(ch.row(z01)[j], if j == z01 { 1.0 } else { 0.0 });
        }
        for r in 0..ch.len() {
            assert!((ch.row(r).iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn conjectured_channel_needs_werner_alphabet() {
        let a: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        assert!(conjectured_channel_for(&a).is_none());
        let mut shuffled = werner_eve_alphabet();
        shuffled.reverse();
        assert!(conjectured_channel_for(&shuffled).is_some());
    }

    #[test]
    fn analytic_endpoints() {
        assert!(analytic_werner_intrinsic(0.5).unwrap().abs() < 1e-12);
        let v = analytic_werner_intrinsic(0.6).unwrap();
        assert!(v > 0.0);
        assert!((v - 0.0319).abs() < 1e-4, "{v}");
        assert!((analytic_werner_intrinsic(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            analytic_werner_intrinsic(1.0 / 3.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            analytic_werner_intrinsic(1.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn conjectured_channel_matches_closed_form() {
        let ch = conjectured_werner_channel();
        for p in [0.5, 0.55, 0.6, 0.7, 0.8, 0.9, 0.99] {
            let bound = intrinsic_upper_bound(&werner(p), &ch).unwrap();
            let closed = analytic_werner_intrinsic(p).unwrap();
            assert!((bound - closed).abs() < 1e-12, "p={p}: {bound} vs {closed}");
        }
        assert!(intrinsic_upper_bound(&werner(0.5), &ch).unwrap().abs() < 1e-9);
    }

    #[test]
    fn identity_bound_is_plain_cmi() {
        let d = werner(0.7);
        let id = EveChannel::identity(d.z_alphabet());
        assert_eq!(
            intrinsic_upper_bound(&d, &id).unwrap(),
            conditional_mutual_information(&d)
        );
    }

    #[test]
    fn independent_eve_leaves_one_bit() {
        let bits: Vec<String> = ["0", "1"].iter().map(|s| s.to_string()).collect();
        let eve: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let d = TripartiteDistribution::new(
            bits.clone(),
            bits,
            eve,
            vec![0.25, 0.25, 0.0, 0.0, 0.0, 0.0, 0.25, 0.25],
        )
        .unwrap();
        let r = minimize_intrinsic(&d, 8, 3).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
        assert!((mutual_information(&d) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn optimizer_is_deterministic_and_mode_independent() {
        let d = werner(0.6);
        let seq = IntrinsicOptions {
            starts: 6,
            seed: 11,
            parallelism: Parallelism::Sequential,
            ..IntrinsicOptions::default()
        };
        let par = IntrinsicOptions {
            parallelism: Parallelism::Parallel,
            ..seq
        };
        let a = minimize_intrinsic_with(&d, &seq).unwrap();
        let b = minimize_intrinsic_with(&d, &par).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_starts_rejected() {
        assert!(minimize_intrinsic(&werner(0.6), 0, 0).is_err());
    }
}
