use super::{CMatrix, CVector, Complex, DensityMatrix};
use crate::error::{Error, Result};

fn check(name: &str, value: f64, d: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidArgument(format!(
            "{name} = {value} outside [0, 1]"
        )));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!("local dimension {d} < 2")));
    }
    Ok(())
}

/// `F|ij⟩ = |ji⟩` on `C^d ⊗ C^d`.
pub fn flip_operator(d: usize) -> CMatrix {
    let mut f = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            f[(j * d + i, i * d + j)] = Complex::new(1.0, 0.0);
        }
    }
    f
}

/// `|ψ_d⁺⟩ = Σ|ii⟩/√d`.
pub fn maximally_entangled(d: usize) -> CVector {
    let mut v = CVector::zeros(d * d);
    let a = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = Complex::new(a, 0.0);
    }
    v
}

fn projectors(d: usize) -> (CMatrix, CMatrix) {
    let id = CMatrix::identity(d * d, d * d);
    let f = flip_operator(d);
    let half = Complex::new(0.5, 0.0);
    ((&id - &f) * half, (&id + &f) * half)
}

fn real(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

/// `p A_d/tr A_d + (1-p) S_d/tr S_d` with `A_d`, `S_d` the antisymmetric and
/// symmetric projectors.
pub fn werner_state(p: f64, d: usize) -> Result<DensityMatrix> {
    check("p", p, d)?;
    let (anti, sym) = projectors(d);
    let df = d as f64;
    let rho =
        anti * real(p / (df * (df - 1.0) / 2.0)) + sym * real((1.0 - p) / (df * (df + 1.0) / 2.0));
    DensityMatrix::new(vec![d, d], 1, rho)
}

/// `q A_d/tr A_d ⊗ P_d + (1-q) S_d/tr S_d ⊗ (1 - P_d)/(d²-1)`, the first
/// factor on `(A1, B1)` and the second on `(A2, B2)`, returned in the order
/// `A1 A2 B1 B2`.
pub fn symmetric_state(q: f64, d: usize) -> Result<DensityMatrix> {
    check("q", q, d)?;
    let (anti, sym) = projectors(d);
    let df = d as f64;
    let phi = maximally_entangled(d);
    let p_d = &phi * phi.adjoint();
    let rest = (CMatrix::identity(d * d, d * d) - &p_d) * real(1.0 / (df * df - 1.0));
    let pairwise = anti.kronecker(&p_d) * real(q / (df * (df - 1.0) / 2.0))
        + sym.kronecker(&rest) * real((1.0 - q) / (df * (df + 1.0) / 2.0));
    // pairwise is indexed (a1, b1, a2, b2); reorder to (a1, a2, b1, b2)
    let reorder = |i: usize| {
        let (a1, b1, a2, b2) = (i / (d * d * d), (i / (d * d)) % d, (i / d) % d, i % d);
        ((a1 * d + a2) * d + b1) * d + b2
    };
    let n = d.pow(4);
    let mut rho = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            rho[(reorder(r), reorder(c))] = pairwise[(r, c)];
        }
    }
    DensityMatrix::new(vec![d, d, d, d], 2, rho)
}
