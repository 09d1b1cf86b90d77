//! Finite tripartite distributions `P(X, Y, Z)` and the Shannon toolbox used
//! by every other module.
//!
//! All information quantities are in bits, with `0 log 0 = 0`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a distribution or a channel row.
pub const PROB_TOL: f64 = 1e-12;

/// Loaded documents whose total mass is off by less than this are
/// renormalized; anything further off is rejected.
pub const LOAD_RENORM_TOL: f64 = 1e-9;

/// Joint distribution of Alice's `X`, Bob's `Y` and Eve's `Z` over labeled
/// finite alphabets, stored densely in `(x, y, z)` row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteDistribution {
    x_alphabet: Vec<String>,
    y_alphabet: Vec<String>,
    z_alphabet: Vec<String>,
    probabilities: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    X,
    Y,
    Z,
}

fn check_alphabet(name: &str, alphabet: &[String]) -> Result<()> {
    if alphabet.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} alphabet is empty")));
    }
    let mut seen = HashSet::with_capacity(alphabet.len());
    for label in alphabet {
        if !seen.insert(label.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "duplicate label {label:?} in {name} alphabet"
            )));
        }
    }
    Ok(())
}

impl TripartiteDistribution {
    /// Builds a distribution from already-normalized probabilities.
    pub fn new(
        x_alphabet: Vec<String>,
        y_alphabet: Vec<String>,
        z_alphabet: Vec<String>,
        probabilities: Vec<f64>,
    ) -> Result<Self> {
        let dist = Self::from_parts(x_alphabet, y_alphabet, z_alphabet, probabilities)?;
        let total: f64 = dist.probabilities.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(dist)
    }

    /// Builds a distribution from non-negative raw weights, dividing by their sum.
    pub fn from_weights(
        x_alphabet: Vec<String>,
        y_alphabet: Vec<String>,
        z_alphabet: Vec<String>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let mut dist = Self::from_parts(x_alphabet, y_alphabet, z_alphabet, weights)?;
        dist.rescale()?;
        Ok(dist)
    }

    fn from_parts(
        x_alphabet: Vec<String>,
        y_alphabet: Vec<String>,
        z_alphabet: Vec<String>,
        probabilities: Vec<f64>,
    ) -> Result<Self> {
        check_alphabet("X", &x_alphabet)?;
        check_alphabet("Y", &y_alphabet)?;
        check_alphabet("Z", &z_alphabet)?;
        let expected = x_alphabet.len() * y_alphabet.len() * z_alphabet.len();
        if probabilities.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "expected {expected} entries, got {}",
                probabilities.len()
            )));
        }
        if let Some(bad) = probabilities
            .iter()
            .find(|p| !(**p >= 0.0) || !p.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "entries must be finite and non-negative, found {bad}"
            )));
        }
        Ok(Self {
            x_alphabet,
            y_alphabet,
            z_alphabet,
            probabilities,
        })
    }

    fn rescale(&mut self) -> Result<()> {
        let total: f64 = self.probabilities.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        for p in &mut self.probabilities {
            *p /= total;
        }
        Ok(())
    }

    pub fn x_alphabet(&self) -> &[String] {
        &self.x_alphabet
    }

    pub fn y_alphabet(&self) -> &[String] {
        &self.y_alphabet
    }

    pub fn z_alphabet(&self) -> &[String] {
        &self.z_alphabet
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `(|X|, |Y|, |Z|)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (
            self.x_alphabet.len(),
            self.y_alphabet.len(),
            self.z_alphabet.len(),
        )
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        (x * self.y_alphabet.len() + y) * self.z_alphabet.len() + z
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        self.probabilities[self.index(x, y, z)]
    }

    /// Probability of a labeled triple; unknown labels have probability 0.
    pub fn prob(&self, x: &str, y: &str, z: &str) -> f64 {
        let find = |alphabet: &[String], label: &str| alphabet.iter().position(|l| l == label);
        match (
            find(&self.x_alphabet, x),
            find(&self.y_alphabet, y),
            find(&self.z_alphabet, z),
        ) {
            (Some(x), Some(y), Some(z)) => self.get(x, y, z),
            _ => 0.0,
        }
    }

    /// Iterates `(x, y, z, p)` index tuples with `p > 0`.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        let (_, ny, nz) = self.shape();
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(move |(i, p)| (i / (ny * nz), (i / nz) % ny, i % nz, *p))
    }

    /// `P(X, Y)` as a dense `|X| x |Y|` row-major table.
    pub fn xy_table(&self) -> Vec<f64> {
        let (nx, ny, nz) = self.shape();
        let mut out = vec![0.0; nx * ny];
        for (cell, chunk) in out.iter_mut().zip(self.probabilities.chunks(nz)) {
            *cell = chunk.iter().sum();
        }
        debug_assert_eq!(out.len(), nx * ny);
        out
    }

    /// Drops Eve symbols that carry no mass.
    pub fn prune_z(&self) -> Self {
        let (nx, ny, nz) = self.shape();
        let keep: Vec<usize> = (0..nz)
            .filter(|&z| (0..nx * ny).any(|xy| self.probabilities[xy * nz + z] > 0.0))
            .collect();
        let mut probabilities = Vec::with_capacity(nx * ny * keep.len());
        for xy in 0..nx * ny {
            probabilities.extend(keep.iter().map(|&z| self.probabilities[xy * nz + z]));
        }
        Self {
            x_alphabet: self.x_alphabet.clone(),
            y_alphabet: self.y_alphabet.clone(),
            z_alphabet: keep.iter().map(|&z| self.z_alphabet[z].clone()).collect(),
            probabilities,
        }
    }

    /// Largest entrywise difference after aligning both distributions by label.
    /// Labels present in only one side compare against 0.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (x, y, z, p) in self.support() {
            let q = other.prob(
                &self.x_alphabet[x],
                &self.y_alphabet[y],
                &self.z_alphabet[z],
            );
            worst = worst.max((p - q).abs());
        }
        for (x, y, z, q) in other.support() {
            let p = self.prob(
                &other.x_alphabet[x],
                &other.y_alphabet[y],
                &other.z_alphabet[z],
            );
            worst = worst.max((p - q).abs());
        }
        worst
    }
}

/// Renormalizes a distribution, preserving relative weights.
pub fn normalize(dist: &TripartiteDistribution) -> Result<TripartiteDistribution> {
    let mut out = dist.clone();
    out.rescale()?;
    Ok(out)
}

/// Shannon entropy in bits of an unnormalized-safe list of probabilities.
pub fn entropy<I: IntoIterator<Item = f64>>(probabilities: I) -> f64 {
    probabilities
        .into_iter()
        .filter(|p| *p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

struct Marginals {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    xy: Vec<f64>,
    xz: Vec<f64>,
    yz: Vec<f64>,
}

fn marginals(dist: &TripartiteDistribution) -> Marginals {
    let (nx, ny, nz) = dist.shape();
    let mut m = Marginals {
        x: vec![0.0; nx],
        y: vec![0.0; ny],
        z: vec![0.0; nz],
        xy: vec![0.0; nx * ny],
        xz: vec![0.0; nx * nz],
        yz: vec![0.0; ny * nz],
    };
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let p = dist.get(x, y, z);
                m.x[x] += p;
                m.y[y] += p;
                m.z[z] += p;
                m.xy[x * ny + y] += p;
                m.xz[x * nz + z] += p;
                m.yz[y * nz + z] += p;
            }
        }
    }
    m
}

/// `I(X;Y) = H(X) + H(Y) - H(XY)` in bits. Rounding can leave the entropy
/// sum a few ulps below zero; it is clamped.
pub fn mutual_information(dist: &TripartiteDistribution) -> f64 {
    let m = marginals(dist);
    (entropy(m.x) + entropy(m.y) - entropy(m.xy)).max(0.0)
}

/// `I(X;Y|Z) = H(XZ) + H(YZ) - H(XYZ) - H(Z)` in bits.
pub fn conditional_mutual_information(dist: &TripartiteDistribution) -> f64 {
    let m = marginals(dist);
    (entropy(m.xz) + entropy(m.yz) - entropy(dist.probabilities.iter().copied()) - entropy(m.z))
        .max(0.0)
}

/// Row-stochastic map from Eve's symbols `Z` to a processed alphabet `Z̄` of
/// the same size.
#[derive(Debug, Clone, PartialEq)]
pub struct EveChannel {
    input_alphabet: Vec<String>,
    output_alphabet: Vec<String>,
    matrix: Vec<f64>,
}

impl EveChannel {
    pub fn new(
        input_alphabet: Vec<String>,
        output_alphabet: Vec<String>,
        matrix: Vec<f64>,
    ) -> Result<Self> {
        check_alphabet("channel input", &input_alphabet)?;
        check_alphabet("channel output", &output_alphabet)?;
        let n = input_alphabet.len();
        if output_alphabet.len() != n {
            return Err(Error::InvalidArgument(format!(
                "channel output alphabet has {} symbols, input has {n}",
                output_alphabet.len()
            )));
        }
        if matrix.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "channel matrix has {} entries, expected {}",
                matrix.len(),
                n * n
            )));
        }
        for (r, row) in matrix.chunks(n).enumerate() {
            if row.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "channel row {r} has a negative or non-finite entry"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidArgument(format!(
                    "channel row {r} sums to {total}"
                )));
            }
        }
        Ok(Self {
            input_alphabet,
            output_alphabet,
            matrix,
        })
    }

    pub fn identity(alphabet: &[String]) -> Self {
        let n = alphabet.len();
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            matrix[i * n + i] = 1.0;
        }
        Self {
            input_alphabet: alphabet.to_vec(),
            output_alphabet: alphabet.to_vec(),
            matrix,
        }
    }

    /// Sends every input symbol to the output symbol at `target`.
    pub fn constant(alphabet: &[String], target: usize) -> Result<Self> {
        let n = alphabet.len();
        if target >= n {
            return Err(Error::InvalidArgument(format!(
                "target {target} outside alphabet of size {n}"
            )));
        }
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            matrix[i * n + target] = 1.0;
        }
        Self::new(alphabet.to_vec(), alphabet.to_vec(), matrix)
    }

    /// Deterministic relabeling: input `i` goes to output `perm[i]`.
    pub fn permutation(alphabet: &[String], perm: &[usize]) -> Result<Self> {
        let n = alphabet.len();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&j| j >= n || std::mem::replace(&mut seen[j], true))
        {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
        let mut matrix = vec![0.0; n * n];
        for (i, &j) in perm.iter().enumerate() {
            matrix[i * n + j] = 1.0;
        }
        Self::new(alphabet.to_vec(), alphabet.to_vec(), matrix)
    }

    pub fn input_alphabet(&self) -> &[String] {
        &self.input_alphabet
    }

    pub fn output_alphabet(&self) -> &[String] {
        &self.output_alphabet
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.input_alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.input_alphabet.is_empty()
    }

    pub fn row(&self, z: usize) -> &[f64] {
        let n = self.len();
        &self.matrix[z * n..(z + 1) * n]
    }

    pub fn to_document(&self) -> ChannelDocument {
        let n = self.len();
        ChannelDocument {
            input_alphabet: self.input_alphabet.clone(),
            output_alphabet: self.output_alphabet.clone(),
            matrix: self.matrix.chunks(n).map(<[f64]>::to_vec).collect(),
        }
    }
}

/// `P(X, Y, Z̄) = Σ_z P(X, Y, z) P(Z̄ | z)`.
pub fn apply_channel(
    dist: &TripartiteDistribution,
    ch: &EveChannel,
) -> Result<TripartiteDistribution> {
    if ch.input_alphabet != dist.z_alphabet {
        return Err(Error::AlphabetMismatch(
            "channel input alphabet differs from the distribution's Z alphabet".into(),
        ));
    }
    let (nx, ny, nz) = dist.shape();
    let mut out = vec![0.0; nx * ny * nz];
    for xy in 0..nx * ny {
        let src = &dist.probabilities[xy * nz..(xy + 1) * nz];
        let dst = &mut out[xy * nz..(xy + 1) * nz];
        for (z, &p) in src.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (d, c) in dst.iter_mut().zip(ch.row(z)) {
                *d += p * c;
            }
        }
    }
    Ok(TripartiteDistribution {
        x_alphabet: dist.x_alphabet.clone(),
        y_alphabet: dist.y_alphabet.clone(),
        z_alphabet: ch.output_alphabet.clone(),
        probabilities: out,
    })
}

/// Joint distribution of a subset of the three parties.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    pub parties: Vec<Party>,
    pub alphabets: Vec<Vec<String>>,
    /// Row-major over `parties` in the listed order.
    pub probabilities: Vec<f64>,
}

impl Marginal {
    pub fn get(&self, index: &[usize]) -> f64 {
        let mut flat = 0;
        for (i, alphabet) in index.iter().zip(&self.alphabets) {
            flat = flat * alphabet.len() + i;
        }
        self.probabilities[flat]
    }
}

/// Marginal over `parties`, reported in canonical `X, Y, Z` order.
pub fn marginal(dist: &TripartiteDistribution, parties: &[Party]) -> Result<Marginal> {
    let mut parties = parties.to_vec();
    parties.sort();
    parties.dedup();
    if parties.is_empty() {
        return Err(Error::InvalidArgument("empty party subset".into()));
    }
    let alphabet = |p: Party| match p {
        Party::X => &dist.x_alphabet,
        Party::Y => &dist.y_alphabet,
        Party::Z => &dist.z_alphabet,
    };
    let alphabets: Vec<Vec<String>> = parties.iter().map(|&p| alphabet(p).clone()).collect();
    let size: usize = alphabets.iter().map(Vec::len).product();
    let mut probabilities = vec![0.0; size];
    let (nx, ny, nz) = dist.shape();
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let mut flat = 0;
                for (&p, a) in parties.iter().zip(&alphabets) {
                    let i = match p {
                        Party::X => x,
                        Party::Y => y,
                        Party::Z => z,
                    };
                    flat = flat * a.len() + i;
                }
                probabilities[flat] += dist.get(x, y, z);
            }
        }
    }
    Ok(Marginal {
        parties,
        alphabets,
        probabilities,
    })
}

/// One non-zero entry of a serialized distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub x: String,
    pub y: String,
    pub z: String,
    pub p: f64,
}

/// On-disk form of a distribution. Triples that are not listed have
/// probability 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionDocument {
    pub x_alphabet: Vec<String>,
    pub y_alphabet: Vec<String>,
    pub z_alphabet: Vec<String>,
    pub probabilities: Vec<Entry>,
}

/// On-disk form of a channel: row-major matrix, rows indexed by input symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDocument {
    pub input_alphabet: Vec<String>,
    pub output_alphabet: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

/// Rounds to a fixed number of significant decimal digits.
pub fn round_significant(value: f64, digits: usize) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    format!("{:.*e}", digits.saturating_sub(1), value)
        .parse()
        .unwrap_or(value)
}

impl TripartiteDistribution {
    /// Serializable form listing the support only. `digits` rounds each
    /// probability to that many significant digits.
    pub fn to_document(&self, digits: Option<usize>) -> DistributionDocument {
        let probabilities = self
            .support()
            .map(|(x, y, z, p)| Entry {
                x: self.x_alphabet[x].clone(),
                y: self.y_alphabet[y].clone(),
                z: self.z_alphabet[z].clone(),
                p: digits.map_or(p, |d| round_significant(p, d)),
            })
            .collect();
        DistributionDocument {
            x_alphabet: self.x_alphabet.clone(),
            y_alphabet: self.y_alphabet.clone(),
            z_alphabet: self.z_alphabet.clone(),
            probabilities,
        }
    }

    /// Inverse of [`to_document`](Self::to_document). Sums within
    /// [`LOAD_RENORM_TOL`] of 1 are renormalized, anything else is rejected.
    pub fn from_document(doc: &DistributionDocument) -> Result<Self> {
        let mut dist = Self::from_parts(
            doc.x_alphabet.clone(),
            doc.y_alphabet.clone(),
            doc.z_alphabet.clone(),
            vec![0.0; doc.x_alphabet.len() * doc.y_alphabet.len() * doc.z_alphabet.len()],
        )?;
        let lookup = |alphabet: &[String], label: &str, party: &str| {
            alphabet.iter().position(|l| l == label).ok_or_else(|| {
                Error::Parse(format!(
                    "{party} label {label:?} is not in the {party} alphabet"
                ))
            })
        };
        let mut seen = HashSet::new();
        for entry in &doc.probabilities {
            let x = lookup(&doc.x_alphabet, &entry.x, "x")?;
            let y = lookup(&doc.y_alphabet, &entry.y, "y")?;
            let z = lookup(&doc.z_alphabet, &entry.z, "z")?;
            if !(entry.p >= 0.0) || !entry.p.is_finite() {
                return Err(Error::Parse(format!(
                    "entry ({}, {}, {}) has invalid probability {}",
                    entry.x, entry.y, entry.z, entry.p
                )));
            }
            if !seen.insert((x, y, z)) {
                return Err(Error::Parse(format!(
                    "entry ({}, {}, {}) listed twice",
                    entry.x, entry.y, entry.z
                )));
            }
            let i = dist.index(x, y, z);
            dist.probabilities[i] = entry.p;
        }
        let total: f64 = dist.probabilities.iter().sum();
        if (total - 1.0).abs() >= LOAD_RENORM_TOL {
            return Err(Error::Parse(format!(
                "probabilities sum to {total}; refusing to renormalize a sum this far from 1"
            )));
        }
        dist.rescale()?;
        Ok(dist)
    }

    pub fn to_json(&self, digits: Option<usize>) -> String {
        serde_json::to_string_pretty(&self.to_document(digits))
            .expect("distribution documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DistributionDocument = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        Self::from_document(&doc)
    }
}

impl EveChannel {
    pub fn from_document(doc: &ChannelDocument) -> Result<Self> {
        Self::new(
            doc.input_alphabet.clone(),
            doc.output_alphabet.clone(),
            doc.matrix.iter().flatten().copied().collect(),
        )
    }
}
