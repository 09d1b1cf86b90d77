//! Closed-form distributions obtained by measuring Werner and symmetric
//! qutrit states, their binaryzations, and the activated distribution `Q*`.
//!
//! Honest parties measure in the computational basis; Eve applies the
//! minimum-error measurement on her purification. The `quantum` module
//! rederives every table here from the density matrices.

use crate::error::{Error, Result};
use crate::labels::{self, EveSymbol};
use crate::probdist::TripartiteDistribution;

/// The printed tables are for qutrits only.
pub const TABLE_DIM: usize = 3;

/// Symbol discarded by the honest parties when binaryzing a trit.
pub const DEFAULT_DISCARD: usize = 2;

/// `ρ_W(p) = p A/tr(A) + (1-p) S/tr(S)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WernerParams {
    pub p: f64,
    pub d: usize,
}

impl WernerParams {
    pub fn new(p: f64, d: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("p = {p} outside [0, 1]")));
        }
        if d < 2 {
            return Err(Error::InvalidArgument(format!("dimension {d} < 2")));
        }
        Ok(Self { p, d })
    }

    pub fn qutrit(p: f64) -> Result<Self> {
        Self::new(p, TABLE_DIM)
    }
}

/// `σ(q) = q A/tr(A) ⊗ P + (1-q) S/tr(S) ⊗ (1-P)/tr(1-P)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricParams {
    pub q: f64,
    pub d: usize,
}

impl SymmetricParams {
    pub fn new(q: f64, d: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidArgument(format!("q = {q} outside [0, 1]")));
        }
        if d < 2 {
            return Err(Error::InvalidArgument(format!("dimension {d} < 2")));
        }
        Ok(Self { q, d })
    }

    pub fn qutrit(q: f64) -> Result<Self> {
        Self::new(q, TABLE_DIM)
    }

    /// The activator weight `q = 1/(d+2)`.
    pub fn universal_activator(d: usize) -> Result<Self> {
        Self::new(1.0 / (d as f64 + 2.0), d)
    }
}

/// Every scalar appearing in the table captions, for one `(p, q)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub p: f64,
    pub q: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Eve's error on an off-diagonal Werner cell.
    pub delta_z: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub p_g: f64,
    pub p_b: f64,
    pub p_l: f64,
    pub p_h: f64,
    /// Acceptance probability of the activation filter followed by binaryzation.
    pub c_n: f64,
    pub s_n: f64,
}

impl DerivedConstants {
    pub fn new(p: f64, q: f64) -> Self {
        let lambda1 = (1.0 - p) / 6.0;
        let lambda2 = p / 3.0;
        let delta_z = (lambda1.sqrt() - lambda2.sqrt()).powi(2) / (2.0 * (lambda1 + lambda2));
        let alpha = (8.0 * q / (1.0 + 7.0 * q)).sqrt();
        let gamma = ((1.0 - q) / (2.0 * (1.0 + 7.0 * q))).sqrt();
        let c_n = (lambda1 + lambda2) * (5.0 + 11.0 * q) / 48.0 + 5.0 * lambda1 * (1.0 - q) / 24.0;
        Self {
            p,
            q,
            lambda1,
            lambda2,
            delta_z,
            alpha,
            gamma,
            p_g: (alpha + 2.0 * gamma).powi(2) / 6.0,
            p_b: (2.0 * gamma - alpha).powi(2) / 6.0,
            p_l: (alpha - gamma).powi(2) / 6.0,
            p_h: (alpha + gamma).powi(2) / 6.0,
            c_n,
            s_n: (1.0 + 7.0 * q) / (144.0 * c_n),
        }
    }

    /// Bob's error on the binaryzed Werner table, `2λ₁/(3λ₁+λ₂)`.
    pub fn werner_beta(&self) -> f64 {
        2.0 * self.lambda1 / (3.0 * self.lambda1 + self.lambda2)
    }

    /// Bob's error on the binaryzed symmetric table, `3(1-q)/(5+11q)`.
    pub fn symmetric_beta(&self) -> f64 {
        3.0 * (1.0 - self.q) / (5.0 + 11.0 * self.q)
    }

    /// Bob's error on the activated table, `(3λ₁+λ₂)(1-q)/(16 c_N)`.
    pub fn activated_beta(&self) -> f64 {
        (3.0 * self.lambda1 + self.lambda2) * (1.0 - self.q) / (16.0 * self.c_n)
    }
}

fn trits(d: usize) -> Vec<String> {
    (0..d).map(labels::trit).collect()
}

fn trit_pairs(d: usize) -> Vec<String> {
    (0..d)
        .flat_map(|a| (0..d).map(move |b| labels::trit_pair(a, b)))
        .collect()
}

fn require_qutrit(d: usize) -> Result<()> {
    if d != TABLE_DIM {
        return Err(Error::Unsupported(format!(
            "closed-form tables exist for d = {TABLE_DIM} only, got d = {d}"
        )));
    }
    Ok(())
}

/// Werner-state table: diagonal cells carry `λ₁` on `z_ii`; each
/// off-diagonal cell carries `(λ₁+λ₂)/2`, split `1-δ_Z` on Eve's correct
/// guess `z_xy` and `δ_Z` on the swapped guess `z_yx`.
pub fn werner_distribution(params: WernerParams) -> Result<TripartiteDistribution> {
    require_qutrit(params.d)?;
    let d = params.d;
    let k = DerivedConstants::new(params.p, 0.0);
    let z_alphabet: Vec<String> = (0..d)
        .flat_map(|i| (0..d).map(move |j| labels::werner_eve(i, j)))
        .collect();
    let nz = z_alphabet.len();
    let mut probs = vec![0.0; d * d * nz];
    let at = |x: usize, y: usize, i: usize, j: usize| (x * d + y) * nz + i * d + j;
    let off = (k.lambda1 + k.lambda2) / 2.0;
    for x in 0..d {
        for y in 0..d {
            if x == y {
                probs[at(x, x, x, x)] = k.lambda1;
            } else {
                probs[at(x, y, x, y)] = off * (1.0 - k.delta_z);
                probs[at(x, y, y, x)] = off * k.delta_z;
            }
        }
    }
    TripartiteDistribution::new(trits(d), trits(d), z_alphabet, probs)
}

/// Symmetric-state table over trit pairs `X = (x₁x₂)`, `Y = (y₁y₂)` and Eve
/// symbols `z~{x1}{y1}{x2}{y2}`. Four cell classes:
///
/// * `x₁=y₁, x₂=y₂`: mass `(1-q)/72`, Eve's trine guess on `x₂` is right with
///   probability 2/3 and wrong with 1/6 on each other value.
/// * `x₁≠y₁, x₂=y₂`: mass `(1+7q)/144`, six-way split `P_G, P_L, P_L, P_B, P_H, P_H`.
/// * `x₁=y₁, x₂≠y₂`: mass `(1-q)/48`, Eve knows the cell.
/// * `x₁≠y₁, x₂≠y₂`: mass `(1-q)/96`, Eve cannot tell the cell from the one
///   with `x₁, y₁` swapped.
pub fn symmetric_distribution(params: SymmetricParams) -> Result<TripartiteDistribution> {
    require_qutrit(params.d)?;
    let d = params.d;
    let q = params.q;
    let k = DerivedConstants::new(0.0, q);
    let z_alphabet: Vec<String> = (0..d)
        .flat_map(|a| {
            (0..d).flat_map(move |b| {
                (0..d).flat_map(move |c| (0..d).map(move |e| labels::symmetric_eve(a, b, c, e)))
            })
        })
        .collect();
    let nz = z_alphabet.len();
    let ny = d * d;
    let mut probs = vec![0.0; d * d * ny * nz];
    let zi = |a: usize, b: usize, c: usize, e: usize| ((a * d + b) * d + c) * d + e;
    for x1 in 0..d {
        for x2 in 0..d {
            for y1 in 0..d {
                for y2 in 0..d {
                    let base = ((x1 * d + x2) * ny + (y1 * d + y2)) * nz;
                    let mut put = |z: usize, p: f64| probs[base + z] += p;
                    match (x1 == y1, x2 == y2) {
                        (true, true) => {
                            let mass = (1.0 - q) / 72.0;
                            for k2 in 0..d {
                                let share = if k2 == x2 { 2.0 / 3.0 } else { 1.0 / 6.0 };
                                put(zi(x1, x1, k2, k2), mass * share);
                            }
                        }
                        (false, true) => {
                            let mass = (1.0 + 7.0 * q) / 144.0;
                            for k2 in 0..d {
                                let (right, swapped) = if k2 == x2 {
                                    (k.p_g, k.p_b)
                                } else {
                                    (k.p_l, k.p_h)
                                };
                                put(zi(x1, y1, k2, k2), mass * right);
                                put(zi(y1, x1, k2, k2), mass * swapped);
                            }
                        }
                        (true, false) => put(zi(x1, x1, x2, y2), (1.0 - q) / 48.0),
                        (false, false) => {
                            let mass = (1.0 - q) / 96.0;
                            put(zi(x1, y1, x2, y2), mass / 2.0);
                            put(zi(y1, x1, x2, y2), mass / 2.0);
                        }
                    }
                }
            }
        }
    }
    TripartiteDistribution::new(trit_pairs(d), trit_pairs(d), z_alphabet, probs)
}

/// Restricts both honest parties to two symbols each (`keep[0] ↦ "0"`,
/// `keep[1] ↦ "1"`), drops Eve symbols left without mass and renormalizes.
pub fn project_two_bits(
    dist: &TripartiteDistribution,
    alice_keep: [&str; 2],
    bob_keep: [&str; 2],
) -> Result<TripartiteDistribution> {
    let find = |alphabet: &[String], label: &str, who: &str| {
        alphabet
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidArgument(format!("{who} has no symbol {label:?}")))
    };
    let xs = [
        find(dist.x_alphabet(), alice_keep[0], "Alice")?,
        find(dist.x_alphabet(), alice_keep[1], "Alice")?,
    ];
    let ys = [
        find(dist.y_alphabet(), bob_keep[0], "Bob")?,
        find(dist.y_alphabet(), bob_keep[1], "Bob")?,
    ];
    if xs[0] == xs[1] || ys[0] == ys[1] {
        return Err(Error::InvalidArgument("kept symbols must differ".into()));
    }
    let nz = dist.z_alphabet().len();
    let mut weights = Vec::with_capacity(4 * nz);
    for x in xs {
        for y in ys {
            weights.extend((0..nz).map(|z| dist.get(x, y, z)));
        }
    }
    let bits = vec!["0".to_string(), "1".to_string()];
    Ok(TripartiteDistribution::from_weights(
        bits.clone(),
        bits,
        dist.z_alphabet().to_vec(),
        weights,
    )?
    .prune_z())
}

/// Werner binaryzation: both parties discard `discarded`, Bob swaps his two
/// remaining symbols, and Eve's `z_ij` is relabeled `z_{i, 1-j}` in the new
/// bit indices. Output Eve alphabet is `z00, z01, z10, z11`.
pub fn binaryze_werner(
    dist: &TripartiteDistribution,
    discarded: usize,
) -> Result<TripartiteDistribution> {
    let discarded_label = labels::trit(discarded);
    if !dist.x_alphabet().contains(&discarded_label) {
        return Err(Error::InvalidArgument(format!(
            "symbol {discarded} is not in the alphabet"
        )));
    }
    let kept: Vec<&String> = dist
        .x_alphabet()
        .iter()
        .filter(|l| **l != discarded_label)
        .collect();
    if kept.len() != 2 {
        return Err(Error::InvalidArgument(
            "Werner binaryzation needs a three-symbol alphabet".into(),
        ));
    }
    let bit_of = |trit: u8| -> Option<usize> {
        kept.iter().position(|l| *l == &labels::trit(trit as usize))
    };
    let keep = [kept[0].as_str(), kept[1].as_str()];
    let projected = project_two_bits(dist, keep, [keep[1], keep[0]])?;

    let z_alphabet: Vec<String> = (0..2)
        .flat_map(|i| (0..2).map(move |j| labels::werner_eve(i, j)))
        .collect();
    let nz = projected.z_alphabet().len();
    let mut probs = vec![0.0; 16];
    for (z, label) in projected.z_alphabet().iter().enumerate() {
        let (i, j) = match label.parse::<EveSymbol>()? {
            EveSymbol::Werner(i, j) => (i, j),
            _ => return Err(Error::Structure(format!("{label} is not a Werner symbol"))),
        };
        let (Some(bi), Some(bj)) = (bit_of(i), bit_of(j)) else {
            return Err(Error::Structure(format!(
                "{label} survives binaryzation but refers to a discarded symbol"
            )));
        };
        let target = bi * 2 + (1 - bj);
        for xy in 0..4 {
            probs[xy * 4 + target] += projected.probabilities()[xy * nz + z];
        }
    }
    TripartiteDistribution::new(
        projected.x_alphabet().to_vec(),
        projected.y_alphabet().to_vec(),
        z_alphabet,
        probs,
    )
}

/// Symmetric binaryzation: Alice keeps `00, 01`, Bob keeps `10, 11`.
pub fn binaryze_symmetric(dist: &TripartiteDistribution) -> Result<TripartiteDistribution> {
    project_two_bits(dist, ["00", "01"], ["10", "11"])
}

/// Classical activation. Alice keeps `X₂` only when `X = X₁` (Bob likewise
/// with `Y = Y₁`), then both discard `X₂, Y₂ = 2`. Eve holds `E = [Z, Z̃]`.
pub fn activate(
    p_dist: &TripartiteDistribution,
    q_dist: &TripartiteDistribution,
) -> Result<TripartiteDistribution> {
    let single = |alphabet: &[String], who: &str| -> Result<Vec<u8>> {
        alphabet
            .iter()
            .map(|l| match labels::digits(l).as_deref() {
                Some(&[t]) => Ok(t),
                _ => Err(Error::InvalidArgument(format!(
                    "{who} symbol {l:?} is not a single trit"
                ))),
            })
            .collect()
    };
    let pair = |alphabet: &[String], who: &str| -> Result<Vec<(u8, u8)>> {
        alphabet
            .iter()
            .map(|l| match labels::digits(l).as_deref() {
                Some(&[a, b]) => Ok((a, b)),
                _ => Err(Error::InvalidArgument(format!(
                    "{who} symbol {l:?} is not a trit pair"
                ))),
            })
            .collect()
    };
    let px = single(p_dist.x_alphabet(), "Werner Alice")?;
    let py = single(p_dist.y_alphabet(), "Werner Bob")?;
    let qx = pair(q_dist.x_alphabet(), "symmetric Alice")?;
    let qy = pair(q_dist.y_alphabet(), "symmetric Bob")?;

    let (_, _, nzp) = p_dist.shape();
    let (_, _, nzq) = q_dist.shape();
    let ne = nzp * nzq;
    let mut weights = vec![0.0; 4 * ne];
    for (x, y, z, pw) in p_dist.support() {
        for (xq, &(x1, x2)) in qx.iter().enumerate() {
            if x1 != px[x] || x2 > 1 {
                continue;
            }
            for (yq, &(y1, y2)) in qy.iter().enumerate() {
                if y1 != py[y] || y2 > 1 {
                    continue;
                }
                let cell = (x2 as usize * 2 + y2 as usize) * ne + z * nzq;
                for zq in 0..nzq {
                    let qw = q_dist.get(xq, yq, zq);
                    if qw > 0.0 {
                        weights[cell + zq] += pw * qw;
                    }
                }
            }
        }
    }
    let e_alphabet: Vec<String> = p_dist
        .z_alphabet()
        .iter()
        .flat_map(|z| {
            q_dist
                .z_alphabet()
                .iter()
                .map(move |zq| labels::joint_eve(z, zq))
        })
        .collect();
    let bits = vec!["0".to_string(), "1".to_string()];
    Ok(TripartiteDistribution::from_weights(bits.clone(), bits, e_alphabet, weights)?.prune_z())
}

/// `activate(werner(p), symmetric(q))` for qutrits.
pub fn activated_distribution(p: f64, q: f64) -> Result<TripartiteDistribution> {
    activate(
        &werner_distribution(WernerParams::qutrit(p)?)?,
        &symmetric_distribution(SymmetricParams::qutrit(q)?)?,
    )
}

/// Off-diagonal mass `P(X ≠ Y)` of a two-bit distribution.
pub fn bit_error(dist: &TripartiteDistribution) -> Result<f64> {
    if dist.shape().0 != 2 || dist.shape().1 != 2 {
        return Err(Error::InvalidArgument(
            "expected binary honest alphabets".into(),
        ));
    }
    let t = dist.xy_table();
    Ok(t[1] + t[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probdist::{marginal, Party};

    fn werner(p: f64) -> TripartiteDistribution {
        werner_distribution(WernerParams::qutrit(p).unwrap()).unwrap()
    }

    fn symmetric(q: f64) -> TripartiteDistribution {
        symmetric_distribution(SymmetricParams::qutrit(q).unwrap()).unwrap()
    }

    #[test]
    fn caption_constants_at_p_06() {
        let k = DerivedConstants::new(0.6, 0.2);
        assert!((k.lambda1 - 1.0 / 15.0).abs() < 1e-15);
        assert!((k.lambda2 - 0.2).abs() < 1e-15);
        // (√(1/15) - √(1/5))² / (2·4/15) = (2 - √3)/4
        assert!((k.delta_z - (2.0 - 3f64.sqrt()) / 4.0).abs() < 1e-15);
        assert!((k.delta_z - 0.06699).abs() < 1e-5);
    }

    #[test]
    fn caption_constants_at_p_1() {
        let k = DerivedConstants::new(1.0, 0.2);
        assert_eq!(k.lambda1, 0.0);
        assert!((k.delta_z - 0.5).abs() < 1e-15);
    }

    #[test]
    fn table4_constants_at_q_02() {
        let k = DerivedConstants::new(0.6, 0.2);
        assert!((k.alpha - 2.0 * k.gamma).abs() < 1e-15);
        assert!(k.p_b < 1e-30);
        assert!((k.p_g - 4.0 / 9.0).abs() < 1e-15);
        assert!((k.p_l - 1.0 / 36.0).abs() < 1e-15);
        assert!((k.p_h - 0.25).abs() < 1e-15);
    }

    #[test]
    fn werner_table_structure() {
        let d = werner(0.6);
        let k = DerivedConstants::new(0.6, 0.0);
        assert_eq!(d.support().count(), 15);
        assert!((d.prob("0", "0", "z00") - k.lambda1).abs() < 1e-15);
        let off = (k.lambda1 + k.lambda2) / 2.0;
        assert!((d.prob("0", "1", "z01") - off * (1.0 - k.delta_z)).abs() < 1e-15);
        assert!((d.prob("0", "1", "z10") - off * k.delta_z).abs() < 1e-15);
        let xy = marginal(&d, &[Party::X, Party::Y]).unwrap();
        assert!((xy.get(&[2, 2]) - k.lambda1).abs() < 1e-15);
        assert!((xy.get(&[2, 0]) - off).abs() < 1e-15);
    }

    #[test]
    fn werner_at_p_1_has_empty_diagonal() {
        let d = werner(1.0);
        for i in 0..3 {
            let lbl = labels::trit(i);
            assert_eq!(d.prob(&lbl, &lbl, &labels::werner_eve(i, i)), 0.0);
        }
        assert!((d.prob("0", "1", "z01") - d.prob("0", "1", "z10")).abs() < 1e-15);
    }

    #[test]
    fn only_qutrits_are_tabulated() {
        let err = werner_distribution(WernerParams::new(0.5, 4).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
        let err = symmetric_distribution(SymmetricParams::new(0.5, 2).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
        assert!(WernerParams::qutrit(1.2).is_err());
        assert!(SymmetricParams::qutrit(-0.1).is_err());
    }

    #[test]
    fn symmetric_class_masses_sum_to_one() {
        // 9 cells (1-q)/72 + 18 cells (1+7q)/144 + 18 cells (1-q)/48 + 36 cells (1-q)/96
        for q in [0.0_f64, 0.1, 0.2, 0.7, 1.0] {
            let total = 9.0 * (1.0 - q) / 72.0
                + 18.0 * (1.0 + 7.0 * q) / 144.0
                + 18.0 * (1.0 - q) / 48.0
                + 36.0 * (1.0 - q) / 96.0;
            assert!((total - 1.0).abs() < 1e-15);
            let d = symmetric(q);
            assert_eq!(d.z_alphabet().len(), 81);
            let xy = d.xy_table();
            assert!((xy[0] - (1.0 - q) / 72.0).abs() < 1e-15); // 00,00
            assert!((xy[1] - (1.0 - q) / 48.0).abs() < 1e-15); // 00,01
            assert!((xy[3] - (1.0 + 7.0 * q) / 144.0).abs() < 1e-15); // 00,10
            assert!((xy[4] - (1.0 - q) / 96.0).abs() < 1e-15); // 00,11
        }
    }

    #[test]
    fn symmetric_at_q_1_keeps_only_type_2_cells() {
        let d = symmetric(1.0);
        let xy = d.xy_table();
        let live: Vec<f64> = xy.iter().copied().filter(|p| *p > 0.0).collect();
        assert_eq!(live.len(), 18);
        assert!(live.iter().all(|p| (p - 8.0 / 144.0).abs() < 1e-15));
    }

    #[test]
    fn table3_matches_closed_form() {
        for p in [0.0, 0.3, 0.6, 0.85, 1.0] {
            let k = DerivedConstants::new(p, 0.0);
            let n = 3.0 * k.lambda1 + k.lambda2;
            let diag = (k.lambda1 + k.lambda2) / 2.0 / n;
            let b = binaryze_werner(&werner(p), DEFAULT_DISCARD).unwrap();
            let want = [
                ("0", "0", "z00", diag * (1.0 - k.delta_z)),
                ("0", "0", "z11", diag * k.delta_z),
                ("0", "1", "z01", k.lambda1 / n),
                ("1", "0", "z10", k.lambda1 / n),
                ("1", "1", "z00", diag * k.delta_z),
                ("1", "1", "z11", diag * (1.0 - k.delta_z)),
            ];
            let mut total = 0.0;
            for (x, y, z, v) in want {
                assert!((b.prob(x, y, z) - v).abs() < 1e-12, "p={p} {x}{y}{z}");
                total += v;
            }
            assert!((total - 1.0).abs() < 1e-12);
            assert!((bit_error(&b).unwrap() - k.werner_beta()).abs() < 1e-12);
        }
    }

    #[test]
    fn werner_bob_error_at_p_06_is_one_third() {
        let b = binaryze_werner(&werner(0.6), 2).unwrap();
        assert!((bit_error(&b).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let b = binaryze_werner(&werner(1.0), 2).unwrap();
        assert_eq!(bit_error(&b).unwrap(), 0.0);
    }

    #[test]
    fn discarded_symbol_does_not_matter() {
        let w = werner(0.7);
        let a = binaryze_werner(&w, 0).unwrap();
        let b = binaryze_werner(&w, 2).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
        assert!(matches!(
            binaryze_werner(&w, 5),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn table4_cells() {
        let q = 0.2;
        let b = binaryze_symmetric(&symmetric(q)).unwrap();
        let k = DerivedConstants::new(0.0, q);
        let t = b.xy_table();
        assert!((t[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((t[1] - 1.0 / 6.0).abs() < 1e-12);
        assert!((t[2] - 1.0 / 6.0).abs() < 1e-12);
        assert!((t[3] - 1.0 / 3.0).abs() < 1e-12);
        let diag = 1.0 / 3.0;
        for (z, v) in [
            ("z~0100", k.p_g),
            ("z~0111", k.p_l),
            ("z~0122", k.p_l),
            ("z~1000", k.p_b),
            ("z~1011", k.p_h),
            ("z~1022", k.p_h),
        ] {
            assert!((b.prob("0", "0", z) - diag * v).abs() < 1e-12, "{z}");
        }
        for (z, v) in [("z~0100", k.p_l), ("z~0111", k.p_g), ("z~1011", k.p_b)] {
            assert!((b.prob("1", "1", z) - diag * v).abs() < 1e-12, "{z}");
        }
        assert!((b.prob("0", "1", "z~0101") - 1.0 / 12.0).abs() < 1e-12);
        assert!((b.prob("0", "1", "z~1001") - 1.0 / 12.0).abs() < 1e-12);
        assert!((b.prob("1", "0", "z~1010") - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn table4_beta_formula() {
        for q in [0.0, 0.05, 0.2, 0.5, 0.9, 1.0] {
            let b = binaryze_symmetric(&symmetric(q)).unwrap();
            let k = DerivedConstants::new(0.0, q);
            assert!((bit_error(&b).unwrap() - k.symmetric_beta()).abs() < 1e-12);
            assert!((k.p_g + k.p_b + 2.0 * k.p_l + 2.0 * k.p_h - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn activated_normalization_and_beta() {
        for (p, q) in [(0.6, 0.2), (0.513, 0.2), (0.55, 0.3), (1.0, 0.2)] {
            let a = activated_distribution(p, q).unwrap();
            let total: f64 = a.probabilities().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            let k = DerivedConstants::new(p, q);
            assert!((bit_error(&a).unwrap() - k.activated_beta()).abs() < 1e-12);
        }
    }

    #[test]
    fn activated_at_p_1_has_no_diagonal_werner_symbols() {
        let a = activated_distribution(1.0, 0.2).unwrap();
        for label in a.z_alphabet() {
            match label.parse::<EveSymbol>().unwrap() {
                EveSymbol::Joint((i, j), _) => assert_ne!(i, j, "{label}"),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn activation_rejects_swapped_inputs() {
        let w = werner(0.6);
        let s = symmetric(0.2);
        assert!(matches!(activate(&s, &w), Err(Error::InvalidArgument(_))));
    }
}
