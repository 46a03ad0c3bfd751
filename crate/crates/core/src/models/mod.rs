//! Model catalog: the Λ atom and the two-atom cavity system, each in a full
//! and an effective picture, plus the Zeno-subspace reducer.

pub mod lambda;
pub mod two_atom;

pub use lambda::{build_lambda_effective, build_lambda_full, LambdaParams};
pub use two_atom::{build_two_atom_effective, build_two_atom_full, cooperativity, TwoAtomParams};

use crate::algebra::{hermitian_eigen, ComplexMatrix, KetVector};
use crate::error::{Error, Result};

/// Target state plus its orthonormal partners on a reduced space.
#[derive(Clone, Debug)]
pub struct ReducedBasis {
    pub target: KetVector,
    pub complement: Vec<KetVector>,
}

/// amp·(|a⟩⟨b| + |b⟩⟨a|)
pub(crate) fn coupling(a: &KetVector, b: &KetVector, amp: f64) -> ComplexMatrix {
    let ab = ComplexMatrix::outer(a, b).expect("equal dims");
    (&ab + &ab.dagger()).scale_real(amp)
}

/// Eigenvalues of `h_q` closer than this to the requested one are selected.
pub const ZENO_EIGEN_TOL: f64 = 1e-6;

/// Projection of a perturbation onto one eigenspace of a dominant coupling.
#[derive(Clone, Debug)]
pub struct ZenoReduction {
    /// Projector P onto the selected eigenspace, full dimension.
    pub projector: ComplexMatrix,
    /// Orthonormal eigenvectors spanning the eigenspace.
    pub basis: Vec<KetVector>,
    /// P·h_p·P in the coordinates of `basis`. The basis inside a degenerate
    /// eigenspace is arbitrary, so compare via [`ZenoReduction::embedded`].
    pub effective_h: ComplexMatrix,
    embedded: ComplexMatrix,
}

impl ZenoReduction {
    /// P·h_p·P in the full space.
    pub fn embedded(&self) -> &ComplexMatrix {
        &self.embedded
    }
}

/// Keeps the dynamics of `h_p` inside the `eigenvalue_select` eigenspace of `h_q`.
pub fn zeno_reduce(h_p: &ComplexMatrix, h_q: &ComplexMatrix, eigenvalue_select: f64) -> Result<ZenoReduction> {
    crate::algebra::check_dims(h_p.dim(), h_q.dim())?;
    if !h_p.is_hermitian() {
        return Err(Error::NotHermitian(h_p.hermiticity_defect()));
    }
    let eig = hermitian_eigen(h_q)?;
    let basis: Vec<KetVector> = eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .filter(|(&l, _)| (l - eigenvalue_select).abs() <= ZENO_EIGEN_TOL)
        .map(|(_, v)| v.clone())
        .collect();
    if basis.is_empty() {
        return Err(Error::InvalidInput(format!("no eigenvalue of h_q within {ZENO_EIGEN_TOL} of {eigenvalue_select}")));
    }
    let mut projector = ComplexMatrix::zeros(h_q.dim());
    for v in &basis {
        projector += &ComplexMatrix::projector(v);
    }
    let embedded = &(&projector * h_p) * &projector;
    let effective_h = h_p.restrict(&basis)?;
    Ok(ZenoReduction { projector, basis, effective_h, embedded })
}
