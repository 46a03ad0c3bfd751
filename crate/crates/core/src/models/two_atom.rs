//! Two Λ atoms in a cavity, driven into the singlet-like state
//! |S⟩ = (|g₁g₂⟩ − |g₂g₁⟩)/√2 ⊗ |0⟩_C.
//!
//! Each atom has levels (|e⟩, |g₁⟩, |g₂⟩). |g₁⟩↔|e⟩ is laser driven with
//! Ω_A = −Ω_B = Ω₀/√2, |g₂⟩↔|e⟩ couples to the cavity with strength λ and a
//! detuned microwave drives |g₁⟩↔|g₂⟩.

use std::f64::consts::SQRT_2;

use crate::algebra::{kron_all, ComplexMatrix, KetVector};
use crate::error::{Error, Result};
use crate::lindblad::{HamiltonianSpec, OpenSystemModel};

use super::{coupling, zeno_reduce, ReducedBasis};

#[derive(Clone, Debug, PartialEq)]
pub struct TwoAtomParams {
    pub omega0: f64,
    pub omega_mw: f64,
    pub delta: f64,
    pub lambda_c: f64,
    pub kappa: f64,
    pub gamma1: f64,
    /// Explicit γ₂; when `None`, γ₂ = `gamma2_ratio`·γ₁.
    pub gamma2: Option<f64>,
    pub gamma2_ratio: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// Highest cavity photon number kept.
    pub n_max: usize,
}

impl Default for TwoAtomParams {
    fn default() -> Self {
        Self {
            omega0: 1.0,
            omega_mw: 0.2,
            delta: 0.15,
            lambda_c: 10.0,
            kappa: 0.5,
            gamma1: 1.0,
            gamma2: None,
            gamma2_ratio: 0.5,
            mu1: 1.0,
            mu2: 1.5,
            n_max: 1,
        }
    }
}

impl TwoAtomParams {
    pub fn gamma2(&self) -> f64 {
        self.gamma2.unwrap_or(self.gamma2_ratio * self.gamma1)
    }

    /// Laser amplitudes (Ω_A, Ω_B), opposite in sign.
    pub fn laser_amplitudes(&self) -> (f64, f64) {
        let a = self.omega0 / SQRT_2;
        (a, -a)
    }

    pub fn validate(&self) -> Result<()> {
        let reals = [
            self.omega0,
            self.omega_mw,
            self.delta,
            self.lambda_c,
            self.kappa,
            self.gamma1,
            self.gamma2(),
            self.mu1,
            self.mu2,
        ];
        if reals.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite two-atom parameter".into()));
        }
        if !(self.omega0 > 0.0) {
            return Err(Error::InvalidInput("omega0 must be > 0".into()));
        }
        if !(self.lambda_c > 0.0) {
            return Err(Error::InvalidInput("lambda_c must be > 0".into()));
        }
        if self.kappa < 0.0 || self.gamma1 < 0.0 || self.gamma2() < 0.0 {
            return Err(Error::InvalidInput("decay rates must be >= 0".into()));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidInput("n_max must be >= 1".into()));
        }
        Ok(())
    }
}

/// C = λ²/(γ₁κ)
pub fn cooperativity(p: &TwoAtomParams) -> Result<f64> {
    if !(p.gamma1 > 0.0 && p.kappa > 0.0) {
        return Err(Error::InvalidInput("cooperativity needs gamma1 > 0 and kappa > 0".into()));
    }
    Ok(p.lambda_c * p.lambda_c / (p.gamma1 * p.kappa))
}

pub const E: usize = 0;
pub const G1: usize = 1;
pub const G2: usize = 2;

/// Tensor-product layout atom A ⊗ atom B ⊗ cavity.
#[derive(Clone, Copy, Debug)]
struct Layout {
    n_cav: usize,
}

impl Layout {
    fn dim(self) -> usize {
        9 * self.n_cav
    }

    fn ket(self, a: usize, b: usize, photons: usize) -> KetVector {
        KetVector::basis(self.dim(), (a * 3 + b) * self.n_cav + photons)
    }

    fn atom_op(self, op: &ComplexMatrix, atom: usize) -> ComplexMatrix {
        let id3 = ComplexMatrix::identity(3);
        let idc = ComplexMatrix::identity(self.n_cav);
        let factors: [&ComplexMatrix; 3] = if atom == 0 { [op, &id3, &idc] } else { [&id3, op, &idc] };
        kron_all(&factors).expect("small dims")
    }

    fn annihilation(self) -> ComplexMatrix {
        let mut a = ComplexMatrix::zeros(self.n_cav);
        for n in 1..self.n_cav {
            a[(n - 1, n)] = crate::algebra::re((n as f64).sqrt());
        }
        let id3 = ComplexMatrix::identity(3);
        kron_all(&[&id3, &id3, &a]).expect("small dims")
    }
}

fn level_dyad(i: usize, j: usize) -> ComplexMatrix {
    ComplexMatrix::outer(&KetVector::basis(3, i), &KetVector::basis(3, j)).expect("3x3")
}

/// The five Zeno-subspace states (|ψ₁⟩, |ψ₂⟩, |ψ₃⟩, |ψ₄⟩, |D⟩) in the full space.
pub fn dark_states(n_max: usize) -> [KetVector; 5] {
    let l = Layout { n_cav: n_max + 1 };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let d = l.ket(E, G2, 0).combine(crate::algebra::re(h), &l.ket(G2, E, 0), crate::algebra::re(-h)).unwrap();
    [l.ket(G1, G2, 0), l.ket(G2, G1, 0), l.ket(G2, G2, 0), l.ket(G1, G1, 0), d]
}

/// (|S⟩, |T⟩) = (|ψ₁⟩ ∓ |ψ₂⟩)/√2 given |ψ₁⟩, |ψ₂⟩.
fn singlet_triplet(psi1: &KetVector, psi2: &KetVector) -> (KetVector, KetVector) {
    let h = crate::algebra::re(std::f64::consts::FRAC_1_SQRT_2);
    (psi1.combine(h, psi2, -h).unwrap(), psi1.combine(h, psi2, h).unwrap())
}

/// Effective basis (|S⟩, |T⟩, |ψ₃⟩, |ψ₄⟩, |D⟩) embedded in the full space.
pub fn effective_basis_in_full(n_max: usize) -> [KetVector; 5] {
    let [p1, p2, p3, p4, d] = dark_states(n_max);
    let (s, t) = singlet_triplet(&p1, &p2);
    [s, t, p3, p4, d]
}

/// Static laser part Σ_m Ω_m|e⟩_m⟨g₁| + H.c.
pub fn laser_hamiltonian(p: &TwoAtomParams) -> ComplexMatrix {
    let l = Layout { n_cav: p.n_max + 1 };
    let (oa, ob) = p.laser_amplitudes();
    let mut h = l.atom_op(&level_dyad(E, G1), 0).scale_real(oa);
    h += &l.atom_op(&level_dyad(E, G1), 1).scale_real(ob);
    h.hermitian_part().scale_real(2.0)
}

/// Cavity coupling Σ_m |e⟩_m⟨g₂| a + H.c., without the factor λ.
pub fn cavity_coupling(p: &TwoAtomParams) -> ComplexMatrix {
    let l = Layout { n_cav: p.n_max + 1 };
    let a = l.annihilation();
    let mut h = &l.atom_op(&level_dyad(E, G2), 0) * &a;
    h += &(&l.atom_op(&level_dyad(E, G2), 1) * &a);
    &h + &h.dagger()
}

fn control_hamiltonians(p: &TwoAtomParams) -> [ComplexMatrix; 2] {
    let l = Layout { n_cav: p.n_max + 1 };
    let h1 = l.atom_op(&level_dyad(E, G1), 0).scale_real(p.mu1);
    let h2 = l.atom_op(&level_dyad(E, G1), 1).scale_real(p.mu2);
    [&h1 + &h1.dagger(), &h2 + &h2.dagger()]
}

fn observe_and_name(mut model: OpenSystemModel, kets: Vec<(&str, KetVector)>) -> Result<OpenSystemModel> {
    for (label, ket) in kets {
        model = model
            .observable(format!("P_{label}"), ComplexMatrix::projector(&ket))?
            .named_state(label, ket)?;
    }
    Ok(model)
}

/// Atoms ⊗ truncated cavity, dimension 9·(n_max + 1).
pub fn build_two_atom_full(p: &TwoAtomParams) -> Result<OpenSystemModel> {
    p.validate()?;
    let l = Layout { n_cav: p.n_max + 1 };
    let h_static = &laser_hamiltonian(p) + &cavity_coupling(p).scale_real(p.lambda_c);
    let mut mw = l.atom_op(&level_dyad(G2, G1), 0);
    mw += &l.atom_op(&level_dyad(G2, G1), 1);
    let mut ham = HamiltonianSpec::from_static(h_static)?;
    if p.omega_mw != 0.0 {
        ham = ham.with_rotating(mw.scale_real(p.omega_mw), p.delta)?;
    }
    let [p1, p2, p3, p4, d] = dark_states(p.n_max);
    let (s, t) = singlet_triplet(&p1, &p2);
    let mut model = OpenSystemModel::with_target_ket(ham, s.clone())?;
    let (r1, r2) = ((p.gamma1 / 2.0).sqrt(), (p.gamma2() / 2.0).sqrt());
    for atom in 0..2 {
        model = model
            .lindblad(l.atom_op(&level_dyad(G1, E), atom).scale_real(r1))?
            .lindblad(l.atom_op(&level_dyad(G2, E), atom).scale_real(r2))?;
    }
    model = model.lindblad(l.annihilation().scale_real(p.kappa.sqrt()))?;
    let [h1, h2] = control_hamiltonians(p);
    model = model.control(h1)?.control(h2)?;
    observe_and_name(
        model,
        vec![("S", s), ("T", t), ("psi1", p1), ("psi2", p2), ("psi3", p3), ("psi4", p4), ("D", d)],
    )
}

/// Zeno-limit model on (|S⟩, |T⟩, |ψ₃⟩, |ψ₄⟩, |D⟩) without the cavity.
pub fn build_two_atom_effective(p: &TwoAtomParams) -> Result<OpenSystemModel> {
    p.validate()?;
    let k = |i| KetVector::basis(5, i);
    let (s, t, p3, p4, d) = (k(0), k(1), k(2), k(3), k(4));
    let h_static = coupling(&d, &t, p.omega0 / SQRT_2);
    let mut ham = HamiltonianSpec::from_static(h_static)?;
    if p.omega_mw != 0.0 {
        // √2Ω_MW e^{iδt}|ψ₃⟩⟨T| + √2Ω_MW e^{−iδt}|ψ₄⟩⟨T| + H.c.
        let a = &ComplexMatrix::outer(&p3, &t)? + &ComplexMatrix::outer(&t, &p4)?;
        ham = ham.with_rotating(a.scale_real(SQRT_2 * p.omega_mw), p.delta)?;
    }
    let embed = effective_basis_in_full(p.n_max);
    let [h1, h2] = control_hamiltonians(p);
    let model = OpenSystemModel::with_target_ket(ham, s.clone())?
        .lindblad(ComplexMatrix::outer(&p3, &d)?.scale_real((p.gamma2() / 2.0).sqrt()))?
        .lindblad(ComplexMatrix::outer(&s, &d)?.scale_real((p.gamma1 / 4.0).sqrt()))?
        .lindblad(ComplexMatrix::outer(&t, &d)?.scale_real((p.gamma1 / 4.0).sqrt()))?
        .control(h1.restrict(&embed)?)?
        .control(h2.restrict(&embed)?)?;
    let h = crate::algebra::re(std::f64::consts::FRAC_1_SQRT_2);
    let psi1 = s.combine(h, &t, h)?;
    let psi2 = s.combine(-h, &t, h)?;
    observe_and_name(
        model,
        vec![("S", s), ("T", t), ("psi1", psi1), ("psi2", psi2), ("psi3", p3), ("psi4", p4), ("D", d)],
    )
}

/// Target |S⟩ with complement {|T⟩, |ψ₃⟩, |ψ₄⟩, |D⟩}.
pub fn two_atom_reduced_basis(p: &TwoAtomParams, effective: bool) -> ReducedBasis {
    let basis: Vec<KetVector> = if effective {
        (0..5).map(|i| KetVector::basis(5, i)).collect()
    } else {
        effective_basis_in_full(p.n_max).to_vec()
    };
    ReducedBasis { target: basis[0].clone(), complement: basis[1..].to_vec() }
}

/// Zeno reduction of the laser part onto the dark subspace of the cavity
/// coupling, restricted to the effective basis.
pub fn zeno_effective_laser(p: &TwoAtomParams) -> Result<ComplexMatrix> {
    let z = zeno_reduce(&laser_hamiltonian(p), &cavity_coupling(p), 0.0)?;
    z.embedded().restrict(&effective_basis_in_full(p.n_max))
}
