//! Lyapunov function, evolution speed and the feedback law that raises it.
//!
//! With V = Tr(ρρ_s) the instantaneous speed of the free dynamics is
//! V̇ = Tr[(−i[H,ρ] + 𝒩ρ + ℒρ)ρ_s]. Adding `Σ f_n H_n` to the Hamiltonian adds
//! `Σ f_n Tr[(−i[H_n,ρ])ρ_s]` to it, and choosing
//! `f_n = Tr[(−i[H_n,ρ])ρ_s]` makes that extra term `Σ f_n² ≥ 0`.

use num_complex::Complex64;

use crate::algebra::{check_dims, commutator, ComplexMatrix, KetVector, I};
use crate::error::{Error, Result};
use crate::lindblad::{master_rhs, trace_product, DensityMatrix, OpenSystemModel};

/// Norm below which a vector counts as annihilated.
pub const ANNIHILATION_TOL: f64 = 1e-8;

/// V = Re Tr(ρρ_s)
pub fn lyapunov_v(rho: &DensityMatrix, rho_s: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), rho_s.dim())?;
    Ok(trace_product(rho.matrix(), rho_s.matrix()).re)
}

/// Tr[(−i[H_n,ρ])ρ_s] for one control direction.
fn control_overlap(h_n: &ComplexMatrix, rho: &ComplexMatrix, rho_s: &ComplexMatrix) -> Result<Complex64> {
    Ok(trace_product(&commutator(h_n, rho)?.scale(-I), rho_s))
}

fn shape_amplitude(raw: f64, gain: f64, cap: Option<f64>) -> f64 {
    let f = gain * raw;
    match cap {
        Some(c) => f.clamp(-c, c),
        None => f,
    }
}

/// Feedback amplitudes `gain·Tr[(−i[H_n,ρ])ρ_s]`, saturated at the model's cap.
pub fn control_amplitudes(model: &OpenSystemModel, rho: &DensityMatrix) -> Result<Vec<f64>> {
    if model.controls().is_empty() {
        return Err(Error::InvalidInput("model has no control Hamiltonians".into()));
    }
    check_dims(model.dim(), rho.dim())?;
    model
        .controls()
        .iter()
        .map(|h| {
            let z = control_overlap(h, rho.matrix(), model.target().matrix())?;
            Ok(shape_amplitude(z.re, model.control_gain(), model.control_cap()))
        })
        .collect()
}

/// Precomputed feedback law used inside the integrator.
///
/// Stores `C_n = −i[ρ_s, H_n]` so that `Tr[(−i[H_n,ρ])ρ_s] = Tr(ρ C_n)`.
#[derive(Clone, Debug)]
pub struct LyapunovController {
    observables: Vec<ComplexMatrix>,
    gain: f64,
    cap: Option<f64>,
}

impl LyapunovController {
    pub fn new(model: &OpenSystemModel) -> Result<Self> {
        if model.controls().is_empty() {
            return Err(Error::InvalidInput("model has no control Hamiltonians".into()));
        }
        let rho_s = model.target().matrix();
        let observables = model
            .controls()
            .iter()
            .map(|h| Ok(commutator(rho_s, h)?.scale(-I)))
            .collect::<Result<_>>()?;
        Ok(Self { observables, gain: model.control_gain(), cap: model.control_cap() })
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn amplitudes(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.observables
            .iter()
            .map(|c| shape_amplitude(trace_product(rho, c).re, self.gain, self.cap))
            .collect()
    }
}

/// Instantaneous value and speed of the Lyapunov function.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeedReport {
    pub v: f64,
    pub vdot_free: f64,
    pub vdot_controlled: f64,
    /// Σ_n f_n·Tr[(−i[H_n,ρ])ρ_s]
    pub control_contribution: f64,
    pub amplitudes: Vec<f64>,
}

/// Evaluates V̇ from the trace form of the full right-hand side.
pub fn evolution_speed(model: &OpenSystemModel, t: f64, rho: &DensityMatrix, controls_on: bool) -> Result<SpeedReport> {
    check_dims(model.dim(), rho.dim())?;
    let rho_s = model.target().matrix();
    let zeros = vec![0.0; model.controls().len()];
    let free = master_rhs(model, t, rho, &zeros)?;
    let vdot_free = trace_product(&free, rho_s).re;
    let (amplitudes, control_contribution) = if controls_on && !model.controls().is_empty() {
        let f = control_amplitudes(model, rho)?;
        let mut acc = 0.0;
        for (fi, h) in f.iter().zip(model.controls()) {
            acc += fi * control_overlap(h, rho.matrix(), rho_s)?.re;
        }
        (f, acc)
    } else {
        (zeros, 0.0)
    };
    Ok(SpeedReport {
        v: lyapunov_v(rho, model.target())?,
        vdot_free,
        vdot_controlled: vdot_free + control_contribution,
        control_contribution,
        amplitudes,
    })
}

/// Σ_k Γ_k⟨E_k|ρ|E_k⟩, the speed of V for effective decays `√Γ_k |S⟩⟨E_k|`
/// into a target annihilated by the Hamiltonian.
pub fn effective_decay_speed(channels: &[(f64, KetVector)], rho: &DensityMatrix) -> Result<f64> {
    channels.iter().map(|(rate, excited)| Ok(rate * rho.population(excited)?)).sum()
}

/// Residual norms for the dark-state conditions on a reduced basis.
#[derive(Clone, Debug)]
pub struct StationarityReport {
    /// ‖H|S⟩‖, combined over static and rotating parts.
    pub hamiltonian_residual: f64,
    pub h_annihilates_target: bool,
    /// ‖L_k|S⟩‖ per Lindblad operator.
    pub lindblad_residuals: Vec<f64>,
    pub lindblad_annihilates_target: bool,
    /// ‖L_k†|S⟩‖ per Lindblad operator.
    pub reachability_norms: Vec<f64>,
    pub target_reachable: bool,
    /// ‖H|M⟩‖ per complement state.
    pub complement_norms: Vec<f64>,
    pub complement_driven: bool,
}

impl StationarityReport {
    pub fn all_pass(&self) -> bool {
        self.h_annihilates_target && self.lindblad_annihilates_target && self.target_reachable && self.complement_driven
    }

    /// (condition, residual, passed) rows for tabular output.
    pub fn rows(&self) -> Vec<(String, f64, bool)> {
        let mut rows = vec![("H|S>=0".to_string(), self.hamiltonian_residual, self.h_annihilates_target)];
        for (k, r) in self.lindblad_residuals.iter().enumerate() {
            rows.push((format!("L{}|S>=0", k + 1), *r, *r <= ANNIHILATION_TOL));
        }
        for (k, r) in self.reachability_norms.iter().enumerate() {
            // reachability needs only one nonzero channel; rows report each
            rows.push((format!("L{}^dag|S>!=0", k + 1), *r, *r > ANNIHILATION_TOL));
        }
        for (k, r) in self.complement_norms.iter().enumerate() {
            rows.push((format!("H|M{}>!=0", k + 1), *r, *r > ANNIHILATION_TOL));
        }
        rows
    }
}

/// Norm of `H(t)|ψ⟩` maximized over the independent time dependences:
/// static part, `A` and `A†` of every rotating term, in quadrature.
fn hamiltonian_action_norm(model: &OpenSystemModel, psi: &KetVector) -> Result<f64> {
    let ham = model.hamiltonian();
    let mut acc = ham.static_part().apply(psi)?.norm().powi(2);
    for r in ham.rotating_terms() {
        if r.omega == 0.0 {
            let total = &r.operator + &r.operator.dagger();
            acc += total.apply(psi)?.norm().powi(2);
        } else {
            acc += r.operator.apply(psi)?.norm().powi(2);
            acc += r.operator.dagger().apply(psi)?.norm().powi(2);
        }
    }
    Ok(acc.sqrt())
}

/// Checks H|S⟩ = 0, L_k|S⟩ = 0, some L_k†|S⟩ ≠ 0 and H|M⟩ ≠ 0 for every
/// complement state.
pub fn verify_stationarity(
    model: &OpenSystemModel,
    target: &KetVector,
    complement_basis: &[KetVector],
) -> Result<StationarityReport> {
    check_dims(model.dim(), target.dim())?;
    let basis: Vec<&KetVector> = std::iter::once(target).chain(complement_basis).collect();
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            if (a.inner(b)? - Complex64::new(expected, 0.0)).norm() > 1e-8 {
                return Err(Error::InvalidInput(format!("reduced basis is not orthonormal at ({i}, {j})")));
            }
        }
    }
    let hamiltonian_residual = hamiltonian_action_norm(model, target)?;
    let lindblad_residuals: Vec<f64> =
        model.lindblad_ops().iter().map(|l| Ok(l.apply(target)?.norm())).collect::<Result<_>>()?;
    let reachability_norms: Vec<f64> =
        model.lindblad_ops().iter().map(|l| Ok(l.dagger().apply(target)?.norm())).collect::<Result<_>>()?;
    let complement_norms: Vec<f64> =
        complement_basis.iter().map(|m| hamiltonian_action_norm(model, m)).collect::<Result<_>>()?;
    Ok(StationarityReport {
        h_annihilates_target: hamiltonian_residual <= ANNIHILATION_TOL,
        hamiltonian_residual,
        lindblad_annihilates_target: lindblad_residuals.iter().all(|&r| r <= ANNIHILATION_TOL),
        lindblad_residuals,
        target_reachable: reachability_norms.iter().any(|&r| r > ANNIHILATION_TOL),
        reachability_norms,
        complement_driven: !complement_norms.is_empty() && complement_norms.iter().all(|&r| r > ANNIHILATION_TOL),
        complement_norms,
    })
}
