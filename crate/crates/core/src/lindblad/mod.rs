//! Master-equation model types, right-hand side and propagation.

mod generator;
mod propagate;

pub use generator::{dissipator, master_rhs, noise_superoperator, Generator};
pub use propagate::{propagate, Schedule, TrajectoryRecord, DEFAULT_DT, POSITIVITY_ABORT};

use num_complex::Complex64;

use crate::algebra::{check_dims, hermitian_eigen, ComplexMatrix, KetVector};
use crate::error::{Error, Result};

/// Trace tolerance for a valid density matrix.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted for a valid density matrix.
pub const POSITIVITY_TOL: f64 = 1e-8;

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::NonFinite("density matrix".into()));
        }
        if !matrix.is_hermitian() {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {:.3e})",
                matrix.hermiticity_defect()
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = hermitian_eigen(&matrix)?.eigenvalues[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// |ψ⟩⟨ψ| for a ket normalized within 1e-10.
    pub fn pure(ket: &KetVector) -> Result<Self> {
        if !ket.is_normalized() {
            return Err(Error::InvalidState(format!("ket norm {} is not 1", ket.norm())));
        }
        Ok(Self { matrix: ComplexMatrix::projector(ket) })
    }

    /// Equal-weight mixture of normalized kets.
    pub fn uniform_mixture(kets: &[KetVector]) -> Result<Self> {
        let first = kets.first().ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let mut m = ComplexMatrix::zeros(first.dim());
        let w = Complex64::new(1.0 / kets.len() as f64, 0.0);
        for k in kets {
            check_dims(first.dim(), k.dim())?;
            m.add_scaled(w, &Self::pure(k)?.matrix);
        }
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    /// Wraps a matrix that the caller has already brought into shape.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// ⟨ψ|ρ|ψ⟩
    pub fn population(&self, ket: &KetVector) -> Result<f64> {
        Ok(self.matrix.matrix_element(ket, ket)?.re)
    }

    /// Tr(ρ·op)
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<Complex64> {
        check_dims(self.dim(), op.dim())?;
        Ok(trace_product(&self.matrix, op))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.matrix).map(|e| e.eigenvalues[0]).unwrap_or(f64::NAN)
    }
}

/// Tr(a·b) without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.dim();
    let (x, y) = (a.as_slice(), b.as_slice());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += x[i * n + j] * y[j * n + i];
        }
    }
    acc
}

/// A term contributing `A·e^{iωt} + A†·e^{−iωt}` to the Hamiltonian.
#[derive(Clone, Debug)]
pub struct RotatingTerm {
    pub operator: ComplexMatrix,
    pub omega: f64,
}

/// Static Hermitian terms plus rotating terms.
#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    dim: usize,
    static_terms: Vec<ComplexMatrix>,
    rotating_terms: Vec<RotatingTerm>,
}

impl HamiltonianSpec {
    pub fn new(dim: usize) -> Self {
        Self { dim, static_terms: Vec::new(), rotating_terms: Vec::new() }
    }

    pub fn from_static(h: ComplexMatrix) -> Result<Self> {
        Self::new(h.dim()).with_static(h)
    }

    pub fn with_static(mut self, h: ComplexMatrix) -> Result<Self> {
        check_dims(self.dim, h.dim())?;
        if !h.is_hermitian() {
            return Err(Error::NotHermitian(h.hermiticity_defect()));
        }
        self.static_terms.push(h);
        Ok(self)
    }

    pub fn with_rotating(mut self, operator: ComplexMatrix, omega: f64) -> Result<Self> {
        check_dims(self.dim, operator.dim())?;
        if !omega.is_finite() || !operator.is_finite() {
            return Err(Error::NonFinite("rotating term".into()));
        }
        self.rotating_terms.push(RotatingTerm { operator, omega });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn static_terms(&self) -> &[ComplexMatrix] {
        &self.static_terms
    }

    pub fn rotating_terms(&self) -> &[RotatingTerm] {
        &self.rotating_terms
    }

    /// Sum of the static terms.
    pub fn static_part(&self) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(self.dim);
        for s in &self.static_terms {
            h += s;
        }
        h
    }

    /// True when no rotating term carries a nonzero operator at nonzero frequency.
    pub fn is_time_independent(&self) -> bool {
        self.rotating_terms.iter().all(|r| r.omega == 0.0 || r.operator.max_abs() == 0.0)
    }

    pub fn evaluate(&self, t: f64) -> ComplexMatrix {
        let mut h = self.static_part();
        for r in &self.rotating_terms {
            let phase = Complex64::from_polar(1.0, r.omega * t);
            h.add_scaled(phase, &r.operator);
            h.add_scaled(phase.conj(), &r.operator.dagger());
        }
        h
    }
}

/// Noise-averaged amplitude fluctuation along a Hamiltonian direction.
#[derive(Clone, Debug)]
pub struct NoiseChannel {
    h_s: ComplexMatrix,
    eta: f64,
}

impl NoiseChannel {
    pub fn new(h_s: ComplexMatrix, eta: f64) -> Result<Self> {
        if !h_s.is_hermitian() {
            return Err(Error::NotHermitian(h_s.hermiticity_defect()));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::InvalidInput(format!("noise intensity must be >= 0, got {eta}")));
        }
        Ok(Self { h_s, eta })
    }

    pub fn direction(&self) -> &ComplexMatrix {
        &self.h_s
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Labeled projector reported as a population in trajectory records.
#[derive(Clone, Debug)]
pub struct Observable {
    pub label: String,
    pub projector: ComplexMatrix,
}

/// Everything needed to evolve and steer one open system.
#[derive(Clone, Debug)]
pub struct OpenSystemModel {
    hamiltonian: HamiltonianSpec,
    lindblad_ops: Vec<ComplexMatrix>,
    noise: Vec<NoiseChannel>,
    target: DensityMatrix,
    target_ket: Option<KetVector>,
    controls: Vec<ComplexMatrix>,
    control_gain: f64,
    control_cap: Option<f64>,
    observables: Vec<Observable>,
    named_states: Vec<(String, KetVector)>,
}

impl OpenSystemModel {
    pub fn new(hamiltonian: HamiltonianSpec, target: DensityMatrix) -> Result<Self> {
        check_dims(hamiltonian.dim(), target.dim())?;
        Ok(Self {
            hamiltonian,
            lindblad_ops: Vec::new(),
            noise: Vec::new(),
            target,
            target_ket: None,
            controls: Vec::new(),
            control_gain: 1.0,
            control_cap: None,
            observables: Vec::new(),
            named_states: Vec::new(),
        })
    }

    /// Model whose target is the pure state `target`.
    pub fn with_target_ket(hamiltonian: HamiltonianSpec, target: KetVector) -> Result<Self> {
        let rho_s = DensityMatrix::pure(&target)?;
        let mut m = Self::new(hamiltonian, rho_s)?;
        m.target_ket = Some(target);
        Ok(m)
    }

    pub fn lindblad(mut self, op: ComplexMatrix) -> Result<Self> {
        check_dims(self.dim(), op.dim())?;
        if !op.is_finite() {
            return Err(Error::NonFinite("Lindblad operator".into()));
        }
        self.lindblad_ops.push(op);
        Ok(self)
    }

    pub fn noise_channel(mut self, channel: NoiseChannel) -> Result<Self> {
        check_dims(self.dim(), channel.direction().dim())?;
        self.noise.push(channel);
        Ok(self)
    }

    pub fn control(mut self, h: ComplexMatrix) -> Result<Self> {
        check_dims(self.dim(), h.dim())?;
        if !h.is_hermitian() {
            return Err(Error::NotHermitian(h.hermiticity_defect()));
        }
        self.controls.push(h);
        Ok(self)
    }

    pub fn observable(mut self, label: impl Into<String>, projector: ComplexMatrix) -> Result<Self> {
        check_dims(self.dim(), projector.dim())?;
        self.observables.push(Observable { label: label.into(), projector });
        Ok(self)
    }

    /// Registers a normalized ket under a label, usable as an initial state.
    pub fn named_state(mut self, label: impl Into<String>, ket: KetVector) -> Result<Self> {
        check_dims(self.dim(), ket.dim())?;
        if !ket.is_normalized() {
            return Err(Error::InvalidState("named states must be normalized".into()));
        }
        self.named_states.push((label.into(), ket));
        Ok(self)
    }

    pub fn with_control_gain(mut self, gain: f64) -> Result<Self> {
        if !(gain >= 0.0 && gain.is_finite()) {
            return Err(Error::InvalidInput(format!("control gain must be >= 0, got {gain}")));
        }
        self.control_gain = gain;
        Ok(self)
    }

    pub fn with_control_cap(mut self, cap: Option<f64>) -> Result<Self> {
        if let Some(c) = cap {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidInput(format!("control cap must be > 0, got {c}")));
            }
        }
        self.control_cap = cap;
        Ok(self)
    }

    /// Drops all noise channels.
    pub fn without_noise(mut self) -> Self {
        self.noise.clear();
        self
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec {
        &self.hamiltonian
    }

    pub fn lindblad_ops(&self) -> &[ComplexMatrix] {
        &self.lindblad_ops
    }

    pub fn noise(&self) -> &[NoiseChannel] {
        &self.noise
    }

    pub fn target(&self) -> &DensityMatrix {
        &self.target
    }

    pub fn target_ket(&self) -> Option<&KetVector> {
        self.target_ket.as_ref()
    }

    pub fn controls(&self) -> &[ComplexMatrix] {
        &self.controls
    }

    pub fn control_gain(&self) -> f64 {
        self.control_gain
    }

    pub fn control_cap(&self) -> Option<f64> {
        self.control_cap
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn named_states(&self) -> &[(String, KetVector)] {
        &self.named_states
    }

    pub fn state(&self, label: &str) -> Option<&KetVector> {
        self.named_states.iter().find(|(l, _)| l == label).map(|(_, k)| k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c, pauli};

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.5, -0.5])).is_err());
        let mut m = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        m[(0, 1)] = c(0.0, 0.1);
        assert!(DensityMatrix::new(m.clone()).is_err());
        m[(1, 0)] = c(0.0, -0.1);
        assert!(DensityMatrix::new(m).is_ok());
        assert!(DensityMatrix::pure(&KetVector::from_real(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn rotating_hamiltonian_is_hermitian() {
        let mut a = ComplexMatrix::zeros(3);
        a[(0, 2)] = c(0.3, 0.1);
        let h = HamiltonianSpec::from_static(pauli_padded())
            .unwrap()
            .with_rotating(a, 0.7)
            .unwrap();
        for k in 0..20 {
            assert!(h.evaluate(0.37 * k as f64).hermiticity_defect() < 1e-14);
        }
        assert!(!h.is_time_independent());
    }

    #[test]
    fn non_hermitian_static_term_rejected() {
        let mut a = ComplexMatrix::zeros(2);
        a[(0, 1)] = c(1.0, 0.0);
        assert!(HamiltonianSpec::from_static(a).is_err());
        assert!(NoiseChannel::new(pauli::z(), -0.1).is_err());
    }

    #[test]
    fn model_rejects_mismatched_members() {
        let h = HamiltonianSpec::from_static(pauli::z()).unwrap();
        let target = DensityMatrix::maximally_mixed(2);
        let model = OpenSystemModel::new(h, target).unwrap();
        assert!(model.clone().lindblad(ComplexMatrix::zeros(3)).is_err());
        assert!(model.clone().control(pauli::x()).is_ok());
        assert!(OpenSystemModel::new(HamiltonianSpec::new(3), DensityMatrix::maximally_mixed(2)).is_err());
    }

    fn pauli_padded() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(3);
        m[(0, 1)] = c(1.0, 0.0);
        m[(1, 0)] = c(1.0, 0.0);
        m
    }
}
