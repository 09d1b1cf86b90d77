//! Quantum side of the story: the Werner and symmetric states, Eve's
//! purification and square-root measurement, and entanglement witnesses
//! (partial transposition, two-qubit projections, the activation overlap).
//!
//! Subsystems are ordered Alice first. The symmetric state lives on
//! `A1 A2 B1 B2`.

mod entanglement;
mod measure;
mod states;

pub use entanglement::{
    one_distillability_margin, one_distillable_check, partial_transpose, ppt_check,
    quantum_activation, werner_basis_pair_margin, werner_one_distillability_threshold,
    ActivationResult, LocalProjector, PptReport,
};
pub use measure::{derive_distribution, eve_ensemble, purify, square_root_measurement, ABSTAIN};
pub use states::{flip_operator, maximally_entangled, symmetric_state, werner_state};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Complex = nalgebra::Complex<f64>;
pub type CMatrix = DMatrix<Complex>;
pub type CVector = DVector<Complex>;

/// Eigenvalues at or above this are treated as non-negative.
pub const EIGEN_FLOOR: f64 = -1e-10;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POVM_TOL: f64 = 1e-10;

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * Complex::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigh(m).0.first().copied().unwrap_or(0.0)
}

fn hermiticity_error(m: &CMatrix) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Alice's and Bob's dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bipartition {
    pub dim_a: usize,
    pub dim_b: usize,
}

/// A state on a tensor product of local factors. The first `alice_factors`
/// factors belong to Alice, the rest to Bob.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    alice_factors: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, alice_factors: usize, matrix: CMatrix) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{}, factors {dims:?} need {dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if alice_factors == 0 || alice_factors >= dims.len() {
            return Err(Error::InvalidArgument(
                "both parties need at least one factor".into(),
            ));
        }
        let herm = hermiticity_error(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "not Hermitian (error {herm})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidArgument(format!("trace {trace} is not 1")));
        }
        let min = min_eigenvalue(&matrix);
        if min < EIGEN_FLOOR {
            return Err(Error::InvalidArgument(format!("negative eigenvalue {min}")));
        }
        Ok(Self {
            dims,
            alice_factors,
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn alice_factors(&self) -> usize {
        self.alice_factors
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn split(&self) -> Bipartition {
        Bipartition {
            dim_a: self.dims[..self.alice_factors].iter().product(),
            dim_b: self.dims[self.alice_factors..].iter().product(),
        }
    }
}

/// A unit vector on `system ⊗ environment`, row-major: `index = s·dim_env + e`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim_system: usize,
    dim_env: usize,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(dim_system: usize, dim_env: usize, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != dim_system * dim_env {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for a {dim_system}x{dim_env} space",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("norm {norm} is not 1")));
        }
        Ok(Self {
            dim_system,
            dim_env,
            amplitudes,
        })
    }

    /// A vector with no environment.
    pub fn ket(amplitudes: CVector) -> Result<Self> {
        let n = amplitudes.len();
        Self::new(n, 1, amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn dim_system(&self) -> usize {
        self.dim_system
    }

    pub fn dim_env(&self) -> usize {
        self.dim_env
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `tr_E |ψ⟩⟨ψ|`.
    pub fn reduced_system(&self) -> CMatrix {
        let m = CMatrix::from_fn(self.dim_system, self.dim_env, |s, e| {
            self.amplitudes[s * self.dim_env + e]
        });
        &m * m.adjoint()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleItem {
    pub label: String,
    pub probability: f64,
    pub state: CVector,
}

/// Pure states with prior probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    items: Vec<EnsembleItem>,
}

impl Ensemble {
    pub fn new(items: Vec<EnsembleItem>) -> Result<Self> {
        let dim = items
            .first()
            .map(|i| i.state.len())
            .ok_or(Error::ZeroMass)?;
        let mut total = 0.0;
        for item in &items {
            if item.probability < 0.0 || item.state.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "bad ensemble item {}",
                    item.label
                )));
            }
            if (item.state.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "state {} is not normalized",
                    item.label
                )));
            }
            total += item.probability;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("priors sum to {total}")));
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[EnsembleItem] {
        &self.items
    }

    pub fn dim(&self) -> usize {
        self.items[0].state.len()
    }

    /// `Σ pᵢ |eᵢ⟩⟨eᵢ|`.
    pub fn average(&self) -> CMatrix {
        let n = self.dim();
        let mut rho = CMatrix::zeros(n, n);
        for item in &self.items {
            rho += &item.state * item.state.adjoint() * Complex::new(item.probability, 0.0);
        }
        rho
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub label: String,
    pub matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<PovmElement>,
}

impl Povm {
    pub fn new(elements: Vec<PovmElement>) -> Result<Self> {
        let povm = Self { elements };
        let gap = povm.completeness_error();
        if gap > POVM_TOL {
            return Err(Error::InvalidArgument(format!(
                "elements miss the identity by {gap}"
            )));
        }
        let min = povm.min_element_eigenvalue();
        if min < EIGEN_FLOOR {
            return Err(Error::InvalidArgument(format!(
                "element with eigenvalue {min}"
            )));
        }
        Ok(povm)
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    /// Largest entry of `|Σ M - I|`.
    pub fn completeness_error(&self) -> f64 {
        let Some(first) = self.elements.first() else {
            return f64::INFINITY;
        };
        let n = first.matrix.nrows();
        let mut sum = CMatrix::identity(n, n) * Complex::new(-1.0, 0.0);
        for e in &self.elements {
            sum += &e.matrix;
        }
        sum.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_element_eigenvalue(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| min_eigenvalue(&e.matrix))
            .fold(f64::INFINITY, f64::min)
    }

    /// `⟨ψ|M|ψ⟩` for every element.
    pub fn probabilities(&self, state: &CVector) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| (state.adjoint() * &e.matrix * state)[(0, 0)].re)
            .collect()
    }
}
