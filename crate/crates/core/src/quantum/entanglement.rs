use super::{
    maximally_entangled, min_eigenvalue, symmetric_state, werner_state, Bipartition, CMatrix,
    CVector, Complex, DensityMatrix, EIGEN_FLOOR,
};
use crate::error::{Error, Result};

/// Transposes Bob's factor.
pub fn partial_transpose(m: &CMatrix, split: Bipartition) -> Result<CMatrix> {
    let Bipartition { dim_a, dim_b } = split;
    if m.nrows() != dim_a * dim_b || m.ncols() != m.nrows() {
        return Err(Error::InvalidArgument(format!(
            "{}x{} matrix does not factor as {dim_a}x{dim_b}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
        let (a, b) = (r / dim_b, r % dim_b);
        let (a2, b2) = (c / dim_b, c % dim_b);
        m[(a * dim_b + b2, a2 * dim_b + b)]
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptReport {
    pub min_eigenvalue: f64,
    pub is_ppt: bool,
}

pub fn ppt_check(rho: &DensityMatrix, split: Bipartition) -> Result<PptReport> {
    let min = min_eigenvalue(&partial_transpose(rho.matrix(), split)?);
    Ok(PptReport {
        min_eigenvalue: min,
        is_ppt: min >= EIGEN_FLOOR,
    })
}

/// A rank-2 projector on one party's space, given by an orthonormal pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalProjector {
    kets: CMatrix,
}

impl LocalProjector {
    pub fn from_kets(first: CVector, second: CVector) -> Result<Self> {
        if first.len() != second.len() {
            return Err(Error::InvalidArgument("kets differ in dimension".into()));
        }
        let gram = [
            first.norm_squared() - 1.0,
            second.norm_squared() - 1.0,
            first.dotc(&second).norm(),
        ];
        if gram.iter().any(|g| g.abs() > 1e-12) {
            return Err(Error::InvalidArgument("kets are not orthonormal".into()));
        }
        Ok(Self {
            kets: CMatrix::from_columns(&[first, second]),
        })
    }

    /// Span of basis kets `|i⟩` and `|j⟩`.
    pub fn basis_pair(dim: usize, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= dim || j >= dim {
            return Err(Error::InvalidArgument(format!(
                "need two distinct indices below {dim}, got {i} and {j}"
            )));
        }
        let unit = |k: usize| {
            let mut v = CVector::zeros(dim);
            v[k] = Complex::new(1.0, 0.0);
            v
        };
        Self::from_kets(unit(i), unit(j))
    }

    pub fn dim(&self) -> usize {
        self.kets.nrows()
    }
}

/// Minimum partial-transpose eigenvalue of `(P⊗Q)ρ(P⊗Q)` renormalized, as a
/// two-qubit state. Negative means the projection is entangled.
pub fn one_distillability_margin(
    rho: &DensityMatrix,
    proj_a: &LocalProjector,
    proj_b: &LocalProjector,
) -> Result<f64> {
    let split = rho.split();
    if proj_a.dim() != split.dim_a || proj_b.dim() != split.dim_b {
        return Err(Error::InvalidArgument(format!(
            "projectors act on {}x{}, state is {}x{}",
            proj_a.dim(),
            proj_b.dim(),
            split.dim_a,
            split.dim_b
        )));
    }
    let w = proj_a.kets.kronecker(&proj_b.kets);
    let projected = w.adjoint() * rho.matrix() * &w;
    let mass = projected.trace().re;
    if mass <= 1e-14 {
        return Err(Error::DegenerateProjection);
    }
    let qubits = projected / Complex::new(mass, 0.0);
    Ok(min_eigenvalue(&partial_transpose(
        &qubits,
        Bipartition { dim_a: 2, dim_b: 2 },
    )?))
}

/// Whether the projected two-qubit state is NPT, i.e. entangled.
pub fn one_distillable_check(
    rho: &DensityMatrix,
    proj_a: &LocalProjector,
    proj_b: &LocalProjector,
) -> Result<bool> {
    Ok(one_distillability_margin(rho, proj_a, proj_b)? < EIGEN_FLOOR)
}

/// Smallest margin over every pair of basis-pair projectors, skipping pairs
/// that annihilate the state.
pub fn werner_basis_pair_margin(rho: &DensityMatrix) -> Result<f64> {
    let split = rho.split();
    let pairs = |dim: usize| (0..dim).flat_map(move |i| (i + 1..dim).map(move |j| (i, j)));
    let mut best = f64::INFINITY;
    for (i, j) in pairs(split.dim_a) {
        let pa = LocalProjector::basis_pair(split.dim_a, i, j)?;
        for (k, l) in pairs(split.dim_b) {
            let pb = LocalProjector::basis_pair(split.dim_b, k, l)?;
            match one_distillability_margin(rho, &pa, &pb) {
                Ok(m) => best = best.min(m),
                Err(Error::DegenerateProjection) => {}
                Err(e) => return Err(e),
            }
        }
    }
    if best.is_infinite() {
        return Err(Error::DegenerateProjection);
    }
    Ok(best)
}

/// Bisects the Werner weight where some basis-pair projection first turns NPT.
pub fn werner_one_distillability_threshold(d: usize, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let margin = |p: f64| werner_state(p, d).and_then(|rho| werner_basis_pair_margin(&rho));
    let (mut a, mut b) = (lo, hi);
    let (ma, mb) = (margin(a)?, margin(b)?);
    if !(ma >= 0.0 && mb < 0.0) {
        return Err(Error::Bracket {
            lo,
            hi,
            ratio_lo: ma,
            ratio_hi: mb,
        });
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if margin(mid)? >= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Result of projecting `ρ_W(p) ⊗ σ(q)` onto `|ψ_d⁺⟩` on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationResult {
    /// `F = tr(ρ_iso P_d)` of the renormalized output.
    pub overlap: f64,
    /// `F > 1/d`, sufficient for distillability.
    pub distillable: bool,
    /// Probability that both projections succeed.
    pub mass: f64,
    /// `tr(ρ_out P_d)` before renormalization; `overlap = overlap_mass / mass`.
    pub overlap_mass: f64,
}

/// Alice projects her Werner half `A0` and `A1` onto `|ψ_d⁺⟩`, Bob does the
/// same with `B0` and `B1`; the output lives on `A2 B2`.
pub fn quantum_activation(p: f64, q: f64, d: usize) -> Result<ActivationResult> {
    let rho_w = werner_state(p, d)?;
    let sigma = symmetric_state(q, d)?;
    let (w, s) = (rho_w.matrix(), sigma.matrix());
    // σ is indexed (a1, a2, b1, b2)
    let sidx = |a1: usize, a2: usize, b1: usize, b2: usize| ((a1 * d + a2) * d + b1) * d + b2;
    let n = d * d;
    let norm = 1.0 / (d * d) as f64;
    let mut out = CMatrix::zeros(n, n);
    for a2 in 0..d {
        for b2 in 0..d {
            for a2p in 0..d {
                for b2p in 0..d {
                    let mut acc = Complex::new(0.0, 0.0);
                    for i in 0..d {
                        for j in 0..d {
                            for ip in 0..d {
                                for jp in 0..d {
                                    acc += w[(i * d + j, ip * d + jp)]
                                        * s[(sidx(i, a2, j, b2), sidx(ip, a2p, jp, b2p))];
                                }
                            }
                        }
                    }
                    out[(a2 * d + b2, a2p * d + b2p)] = acc * norm;
                }
            }
        }
    }
    let mass = out.trace().re;
    if mass <= 1e-14 {
        return Err(Error::DegenerateProjection);
    }
    let phi = maximally_entangled(d);
    let overlap_mass = (phi.adjoint() * &out * &phi)[(0, 0)].re;
    let overlap = overlap_mass / mass;
    Ok(ActivationResult {
        overlap,
        distillable: overlap > 1.0 / d as f64 + 1e-12,
        mass,
        overlap_mass,
    })
}
