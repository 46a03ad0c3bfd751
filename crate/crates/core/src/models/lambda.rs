//! Three-level Λ atom driven into the ground-state superposition
//! |S⟩ = cosφ|g₁⟩ − sinφ|g₂⟩.

use crate::algebra::{ComplexMatrix, KetVector};
use crate::error::{Error, Result};
use crate::lindblad::{HamiltonianSpec, NoiseChannel, OpenSystemModel};

use super::{coupling, ReducedBasis};

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaParams {
    /// Total Rabi frequency Ω₀ = √(Ω₁² + Ω₂²).
    pub omega0: f64,
    /// Drive mixing angle θ = arctan(Ω₁/Ω₂).
    pub theta: f64,
    /// Target angle φ.
    pub phi: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub eta: f64,
}

impl Default for LambdaParams {
    /// θ = φ = arctan(0.8/0.6), so the default controls μ₁ = 0.8, μ₂ = 0.6
    /// are proportional to the drive decomposition.
    fn default() -> Self {
        let angle = 0.8f64.atan2(0.6);
        Self {
            omega0: 1.0,
            theta: angle,
            phi: angle,
            gamma1: 1.0,
            gamma2: 1.0,
            mu1: 0.8,
            mu2: 0.6,
            eta: 0.0,
        }
    }
}

impl LambdaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0) {
            return Err(Error::InvalidInput(format!("omega0 must be > 0, got {}", self.omega0)));
        }
        if !(self.gamma1 >= 0.0 && self.gamma2 >= 0.0) {
            return Err(Error::InvalidInput("decay rates must be >= 0".into()));
        }
        if !(self.eta >= 0.0) {
            return Err(Error::InvalidInput("noise intensity must be >= 0".into()));
        }
        let all = [self.omega0, self.theta, self.phi, self.gamma1, self.gamma2, self.mu1, self.mu2, self.eta];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite Λ parameter".into()));
        }
        Ok(())
    }

    /// Ω₁ = Ω₀ sinθ
    pub fn omega1(&self) -> f64 {
        self.omega0 * self.theta.sin()
    }

    /// Ω₂ = Ω₀ cosθ
    pub fn omega2(&self) -> f64 {
        self.omega0 * self.theta.cos()
    }

    /// Ω_S = Ω₀ sin(θ − φ)
    pub fn omega_s(&self) -> f64 {
        self.omega0 * (self.theta - self.phi).sin()
    }

    /// Ω_T = Ω₀ cos(θ − φ)
    pub fn omega_t(&self) -> f64 {
        self.omega0 * (self.theta - self.phi).cos()
    }
}

pub const E: usize = 0;
pub const G1: usize = 1;
pub const G2: usize = 2;

/// |S⟩ and |T⟩ in the bare (e, g₁, g₂) basis.
pub fn superposition_states(phi: f64) -> (KetVector, KetVector) {
    let (s, c) = phi.sin_cos();
    (KetVector::from_real(&[0.0, c, -s]), KetVector::from_real(&[0.0, s, c]))
}

fn bare(i: usize) -> KetVector {
    KetVector::basis(3, i)
}

/// Change of basis whose columns are |e⟩, |S⟩, |T⟩ in bare coordinates.
fn rotation(phi: f64) -> ComplexMatrix {
    let (s, t) = superposition_states(phi);
    let cols = [bare(E), s, t];
    let mut u = ComplexMatrix::zeros(3);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..3 {
            u[(i, j)] = col[i];
        }
    }
    u
}

fn to_rotated(op: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    &(&u.dagger() * op) * u
}

fn control_hamiltonians(p: &LambdaParams) -> [ComplexMatrix; 2] {
    [coupling(&bare(E), &bare(G1), p.mu1), coupling(&bare(E), &bare(G2), p.mu2)]
}

fn noise_directions(p: &LambdaParams) -> [ComplexMatrix; 2] {
    [coupling(&bare(E), &bare(G1), p.omega1()), coupling(&bare(E), &bare(G2), p.omega2())]
}

fn decorate(mut model: OpenSystemModel, kets: [(&str, KetVector); 5]) -> Result<OpenSystemModel> {
    for (label, ket) in kets {
        model = model
            .observable(format!("P_{label}"), ComplexMatrix::projector(&ket))?
            .named_state(label, ket)?;
    }
    Ok(model)
}

/// Λ atom in the bare basis (|e⟩, |g₁⟩, |g₂⟩).
pub fn build_lambda_full(p: &LambdaParams) -> Result<OpenSystemModel> {
    p.validate()?;
    let h0 = &coupling(&bare(E), &bare(G1), p.omega1()) + &coupling(&bare(E), &bare(G2), p.omega2());
    let (s, t) = superposition_states(p.phi);
    let [h1, h2] = control_hamiltonians(p);
    let [hs1, hs2] = noise_directions(p);
    let model = OpenSystemModel::with_target_ket(HamiltonianSpec::from_static(h0)?, s.clone())?
        .lindblad(ComplexMatrix::outer(&bare(G1), &bare(E))?.scale_real((p.gamma1 / 2.0).sqrt()))?
        .lindblad(ComplexMatrix::outer(&bare(G2), &bare(E))?.scale_real((p.gamma2 / 2.0).sqrt()))?
        .control(h1)?
        .control(h2)?
        .noise_channel(NoiseChannel::new(hs1, p.eta)?)?
        .noise_channel(NoiseChannel::new(hs2, p.eta)?)?;
    decorate(model, [("S", s), ("T", t), ("e", bare(E)), ("g1", bare(G1)), ("g2", bare(G2))])
}

/// Λ atom in the rotated basis (|e⟩, |S⟩, |T⟩) with the effective decays
/// √(γ/2)|S⟩⟨e| and √(γ/2)|T⟩⟨e|. Requires γ₁ = γ₂.
pub fn build_lambda_effective(p: &LambdaParams) -> Result<OpenSystemModel> {
    p.validate()?;
    if p.gamma1 != p.gamma2 {
        return Err(Error::InvalidInput(format!(
            "effective Λ picture needs gamma1 == gamma2, got {} and {}",
            p.gamma1, p.gamma2
        )));
    }
    let (e, s, t) = (bare(0), bare(1), bare(2));
    let h0 = &coupling(&e, &s, p.omega_s()) + &coupling(&e, &t, p.omega_t());
    let rate = (p.gamma1 / 2.0).sqrt();
    let u = rotation(p.phi);
    let [h1, h2] = control_hamiltonians(p);
    let [hs1, hs2] = noise_directions(p);
    // bare ground states expressed in the rotated basis
    let g1 = u.dagger().apply(&bare(G1))?;
    let g2 = u.dagger().apply(&bare(G2))?;
    let model = OpenSystemModel::with_target_ket(HamiltonianSpec::from_static(h0)?, s.clone())?
        .lindblad(ComplexMatrix::outer(&s, &e)?.scale_real(rate))?
        .lindblad(ComplexMatrix::outer(&t, &e)?.scale_real(rate))?
        .control(to_rotated(&h1, &u))?
        .control(to_rotated(&h2, &u))?
        .noise_channel(NoiseChannel::new(to_rotated(&hs1, &u), p.eta)?)?
        .noise_channel(NoiseChannel::new(to_rotated(&hs2, &u), p.eta)?)?;
    decorate(model, [("S", s), ("T", t), ("e", e), ("g1", g1), ("g2", g2)])
}

/// Target |S⟩ with complement {|T⟩, |e⟩}, in bare or rotated coordinates.
pub fn lambda_reduced_basis(p: &LambdaParams, effective: bool) -> ReducedBasis {
    if effective {
        ReducedBasis { target: bare(1), complement: vec![bare(2), bare(0)] }
    } else {
        let (s, t) = superposition_states(p.phi);
        ReducedBasis { target: s, complement: vec![t, bare(E)] }
    }
}

/// Effective decay channels (Γ_k, |E_k⟩) into |S⟩ in the rotated picture.
pub fn lambda_effective_decays(p: &LambdaParams) -> Vec<(f64, KetVector)> {
    vec![(p.gamma1 / 2.0, bare(0))]
}
