use std::collections::HashMap;

use super::{
    eigh, CMatrix, CVector, Complex, DensityMatrix, Ensemble, EnsembleItem, Povm, PovmElement,
    PureState,
};
use crate::error::{Error, Result};
use crate::labels;
use crate::probdist::TripartiteDistribution;

/// Label of the square-root measurement's completion outcome.
pub const ABSTAIN: &str = "abstain";

/// Eigenvalues below this are outside the support.
const SUPPORT_TOL: f64 = 1e-12;

/// Entries of derived tables below this are numerical noise.
const NOISE: f64 = 1e-14;

/// `Σ √λᵢ |i⟩_AB |i⟩_E` over the eigenvectors with non-zero weight; the
/// environment has one dimension per kept eigenvector.
pub fn purify(rho: &DensityMatrix) -> PureState {
    let (values, vectors) = eigh(rho.matrix());
    let kept: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] > SUPPORT_TOL)
        .collect();
    let n = rho.dim();
    let r = kept.len();
    let mut amps = CVector::zeros(n * r);
    for (k, &i) in kept.iter().enumerate() {
        let w = values[i].sqrt();
        for s in 0..n {
            amps[s * r + k] = vectors[(s, i)] * w;
        }
    }
    let norm = amps.norm();
    amps /= Complex::new(norm, 0.0);
    PureState::new(n, r, amps).expect("normalized by construction")
}

struct Layout {
    d: usize,
    factors: usize,
}

impl Layout {
    fn of(rho: &DensityMatrix) -> Result<Self> {
        let dims = rho.dims();
        let d = dims[0];
        let factors = rho.alice_factors();
        if dims.iter().any(|&k| k != d) || dims.len() != 2 * factors || d > 10 {
            return Err(Error::Unsupported(format!(
                "symbol labels need equal single-digit factors split evenly, got {dims:?}"
            )));
        }
        Ok(Self { d, factors })
    }

    fn side(&self) -> usize {
        self.d.pow(self.factors as u32)
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors];
        for slot in out.iter_mut().rev() {
            *slot = index % self.d;
            index /= self.d;
        }
        out
    }

    fn honest(&self, index: usize) -> String {
        self.digits(index).iter().map(|d| d.to_string()).collect()
    }

    /// Eve's label for guessing Alice's basis state `x` and Bob's `y`.
    fn eve(&self, x: usize, y: usize) -> Result<String> {
        let (a, b) = (self.digits(x), self.digits(y));
        match self.factors {
            1 => Ok(labels::werner_eve(a[0], b[0])),
            2 => Ok(labels::symmetric_eve(a[0], b[0], a[1], b[1])),
            f => Err(Error::Unsupported(format!(
                "no Eve labels for {f} factors per party"
            ))),
        }
    }
}

/// Eve's conditional states `|e_xy⟩ = ⟨xy|ψ_ABE⟩/√P(xy)` for every basis
/// state with `P(xy) = ⟨xy|ρ|xy⟩ > 0`, labeled `"{x}|{y}"` with each
/// party's digits.
pub fn eve_ensemble(rho: &DensityMatrix) -> Result<Ensemble> {
    Ok(eve_ensemble_indexed(rho)?.1)
}

fn eve_ensemble_indexed(rho: &DensityMatrix) -> Result<(Vec<usize>, Ensemble)> {
    let layout = Layout::of(rho)?;
    let psi = purify(rho);
    let r = psi.dim_env();
    let side = layout.side();
    let mut raw = Vec::new();
    for s in 0..psi.dim_system() {
        let e = CVector::from_fn(r, |k, _| psi.amplitudes()[s * r + k]);
        let p = e.norm_squared();
        if p > NOISE {
            raw.push((s, p, e));
        }
    }
    let total: f64 = raw.iter().map(|(_, p, _)| p).sum();
    let mut indices = Vec::with_capacity(raw.len());
    let items = raw
        .into_iter()
        .map(|(s, p, e)| {
            indices.push(s);
            let norm = e.norm();
            EnsembleItem {
                label: format!("{}|{}", layout.honest(s / side), layout.honest(s % side)),
                probability: p / total,
                state: e / Complex::new(norm, 0.0),
            }
        })
        .collect();
    Ok((indices, Ensemble::new(items)?))
}

/// `Mᵢ = pᵢ ρ^{-1/2}|eᵢ⟩⟨eᵢ|ρ^{-1/2}` with `ρ = Σ pᵢ|eᵢ⟩⟨eᵢ|` inverted on its
/// support, plus a final [`ABSTAIN`] element projecting onto the rest.
pub fn square_root_measurement(ens: &Ensemble) -> Result<Povm> {
    let (values, vectors) = eigh(&ens.average());
    let n = ens.dim();
    let scale = values.iter().copied().fold(0.0, f64::max);
    let mut inv_sqrt = CVector::zeros(n);
    let mut support = CVector::zeros(n);
    for (i, &v) in values.iter().enumerate() {
        if v > SUPPORT_TOL * scale.max(1.0) {
            inv_sqrt[i] = Complex::new(1.0 / v.sqrt(), 0.0);
            support[i] = Complex::new(1.0, 0.0);
        }
    }
    let root = &vectors * CMatrix::from_diagonal(&inv_sqrt) * vectors.adjoint();
    let proj = &vectors * CMatrix::from_diagonal(&support) * vectors.adjoint();
    let mut elements: Vec<PovmElement> = ens
        .items()
        .iter()
        .map(|item| {
            let m = &root * &item.state;
            PovmElement {
                label: item.label.clone(),
                matrix: &m * m.adjoint() * Complex::new(item.probability, 0.0),
            }
        })
        .collect();
    elements.push(PovmElement {
        label: ABSTAIN.into(),
        matrix: CMatrix::identity(n, n) - proj,
    });
    Povm::new(elements)
}

/// Purifies `rho`, measures Alice and Bob in the computational basis and Eve
/// with the square-root measurement for their joint basis state.
///
/// Honest symbols are the parties' basis digits. Eve's outcome for guessing
/// `(x, y)` is labeled like the closed-form tables (`z{x}{y}` for one factor
/// per party, `z~{x1}{y1}{x2}{y2}` for two), and her alphabet covers every
/// guess, including ones with zero weight.
pub fn derive_distribution(rho: &DensityMatrix) -> Result<TripartiteDistribution> {
    let layout = Layout::of(rho)?;
    let side = layout.side();
    let (indices, ens) = eve_ensemble_indexed(rho)?;
    let povm = square_root_measurement(&ens)?;

    let mut z_alphabet = Vec::with_capacity(side * side);
    for x in 0..side {
        for y in 0..side {
            z_alphabet.push(layout.eve(x, y)?);
        }
    }
    // lexicographic label order puts the index digits in table order
    z_alphabet.sort();
    let column: HashMap<String, usize> = z_alphabet
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    let outcome_column: Vec<Option<usize>> = indices
        .iter()
        .map(|&s| layout.eve(s / side, s % side).map(|l| Some(column[&l])))
        .chain(std::iter::once(Ok(None)))
        .collect::<Result<_>>()?;

    let nz = z_alphabet.len();
    let mut weights = vec![0.0; side * side * nz];
    let mut abstain = 0.0;
    for (&s, item) in indices.iter().zip(ens.items()) {
        let probs = povm.probabilities(&item.state);
        for (outcome, pr) in probs.into_iter().enumerate() {
            let mass = item.probability * pr;
            match outcome_column[outcome] {
                Some(z) => weights[s * nz + z] += mass,
                None => abstain += mass,
            }
        }
    }
    if abstain > 1e-10 {
        return Err(Error::Structure(format!(
            "abstain outcome carries mass {abstain}"
        )));
    }
    for w in &mut weights {
        if *w < NOISE {
            *w = 0.0;
        }
    }
    let honest: Vec<String> = (0..side).map(|i| layout.honest(i)).collect();
    TripartiteDistribution::from_weights(honest.clone(), honest, z_alphabet, weights)
}
