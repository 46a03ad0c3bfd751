//! Fixed-step RK4 propagation with observable recording.

use num_complex::Complex64;

use super::{trace_product, DensityMatrix, Generator, OpenSystemModel};
use crate::algebra::{check_dims, hermitian_eigen, ComplexMatrix};
use crate::error::{Error, Result};
use crate::lyapunov::LyapunovController;

/// Recorded states may dip this far below zero before propagation aborts.
pub const POSITIVITY_ABORT: f64 = 1e-6;

/// Default step in units of 1/Ω₀.
pub const DEFAULT_DT: f64 = 1e-3;

/// Integration grid. The step actually taken is `t_final / steps()`, so the
/// grid always ends exactly at `t_final`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub t_final: f64,
    pub dt: f64,
    pub record_stride: usize,
}

impl Schedule {
    pub fn new(t_final: f64, dt: f64, record_stride: usize) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidInput(format!("t_final must be > 0, got {t_final}")));
        }
        if !(dt > 0.0 && dt <= t_final) {
            return Err(Error::InvalidInput(format!("dt must satisfy 0 < dt <= t_final, got {dt}")));
        }
        if record_stride == 0 {
            return Err(Error::InvalidInput("record_stride must be positive".into()));
        }
        Ok(Self { t_final, dt, record_stride })
    }

    pub fn steps(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).max(1)
    }

    pub fn step_size(&self) -> f64 {
        self.t_final / self.steps() as f64
    }
}

/// Time series produced by [`propagate`].
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    /// V = Tr(ρρ_s)
    pub v: Vec<f64>,
    /// Speed of V along the actual vector field, controls included.
    pub vdot: Vec<f64>,
    /// Speed of V with the controls switched off.
    pub vdot_free: Vec<f64>,
    /// Control amplitudes f_n per record (empty rows without a controller).
    pub controls: Vec<Vec<f64>>,
    pub population_labels: Vec<String>,
    /// One row per record, one column per label.
    pub populations: Vec<Vec<f64>>,
    /// Smallest eigenvalue seen across recorded states.
    pub min_eigenvalue: f64,
    /// Largest |Tr ρ − 1| removed by renormalization in a single step.
    pub max_renormalization: f64,
    pub final_state: DensityMatrix,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn population_series(&self, label: &str) -> Option<Vec<f64>> {
        let col = self.population_labels.iter().position(|l| l == label)?;
        Some(self.populations.iter().map(|row| row[col]).collect())
    }

    pub fn final_population(&self, label: &str) -> Option<f64> {
        self.population_series(label).and_then(|s| s.last().copied())
    }

    pub fn max_vdot(&self) -> f64 {
        self.vdot.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_vdot_free(&self) -> f64 {
        self.vdot_free.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest |f_n| over the trajectory for each control.
    pub fn max_abs_controls(&self) -> Vec<f64> {
        let n = self.controls.first().map_or(0, Vec::len);
        (0..n)
            .map(|k| self.controls.iter().map(|row| row[k].abs()).fold(0.0, f64::max))
            .collect()
    }

    pub fn final_v(&self) -> f64 {
        *self.v.last().expect("records are never empty")
    }
}

/// Integrates the master equation of `model` from `rho0`.
///
/// With a controller the amplitudes are recomputed from the stage state at
/// every RK stage. After each step ρ is re-Hermitized and its trace reset to
/// one. Recording happens at t = 0, every `record_stride` steps and at the
/// final step.
pub fn propagate(
    model: &OpenSystemModel,
    rho0: &DensityMatrix,
    schedule: &Schedule,
    controller: Option<&LyapunovController>,
) -> Result<TrajectoryRecord> {
    check_dims(model.dim(), rho0.dim())?;
    let gen = Generator::new(model);
    let n = model.dim();
    let steps = schedule.steps();
    let h = schedule.step_size();
    let rho_s = model.target().matrix();

    let amplitudes = |rho: &ComplexMatrix| controller.map(|c| c.amplitudes(rho)).unwrap_or_default();

    let mut record = TrajectoryRecord {
        times: Vec::new(),
        v: Vec::new(),
        vdot: Vec::new(),
        vdot_free: Vec::new(),
        controls: Vec::new(),
        population_labels: model.observables().iter().map(|o| o.label.clone()).collect(),
        populations: Vec::new(),
        min_eigenvalue: f64::INFINITY,
        max_renormalization: 0.0,
        final_state: rho0.clone(),
    };

    let mut rho = rho0.matrix().clone();
    let mut scratch = ComplexMatrix::zeros(n);
    let mut observe = |t: f64, rho: &ComplexMatrix, record: &mut TrajectoryRecord| -> Result<()> {
        let min_eig = hermitian_eigen(rho)?.eigenvalues[0];
        if min_eig < -POSITIVITY_ABORT {
            return Err(Error::PositivityViolation { time: t, min_eigenvalue: min_eig });
        }
        record.min_eigenvalue = record.min_eigenvalue.min(min_eig);
        let f = amplitudes(rho);
        gen.apply(t, rho, &f, &mut scratch);
        let vdot = trace_product(&scratch, rho_s).re;
        let vdot_free = if f.is_empty() {
            vdot
        } else {
            gen.apply(t, rho, &[], &mut scratch);
            trace_product(&scratch, rho_s).re
        };
        record.times.push(t);
        record.v.push(trace_product(rho, rho_s).re);
        record.vdot.push(vdot);
        record.vdot_free.push(vdot_free);
        record.controls.push(f);
        record
            .populations
            .push(model.observables().iter().map(|o| trace_product(rho, &o.projector).re).collect());
        Ok(())
    };

    observe(0.0, &rho, &mut record)?;

    let mut k1 = ComplexMatrix::zeros(n);
    let mut k2 = ComplexMatrix::zeros(n);
    let mut k3 = ComplexMatrix::zeros(n);
    let mut k4 = ComplexMatrix::zeros(n);
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);

    for step in 0..steps {
        let t = step as f64 * h;

        gen.apply(t, &rho, &amplitudes(&rho), &mut k1);
        let mut stage = rho.clone();
        stage.add_scaled(half, &k1);
        gen.apply(t + 0.5 * h, &stage, &amplitudes(&stage), &mut k2);
        stage.clone_from(&rho);
        stage.add_scaled(half, &k2);
        gen.apply(t + 0.5 * h, &stage, &amplitudes(&stage), &mut k3);
        stage.clone_from(&rho);
        stage.add_scaled(full, &k3);
        gen.apply(t + h, &stage, &amplitudes(&stage), &mut k4);

        let w = h / 6.0;
        for ((((r, a), b), c), d) in rho
            .as_mut_slice()
            .iter_mut()
            .zip(k1.as_slice())
            .zip(k2.as_slice())
            .zip(k3.as_slice())
            .zip(k4.as_slice())
        {
            *r += w * (a + 2.0 * b + 2.0 * c + d);
        }

        rho = rho.hermitian_part();
        let tr = rho.trace().re;
        if !rho.is_finite() || !tr.is_finite() || tr <= 0.0 {
            return Err(Error::NonFinite(format!("state at t = {}", t + h)));
        }
        record.max_renormalization = record.max_renormalization.max((tr - 1.0).abs());
        rho = rho.scale_real(1.0 / tr);

        let done = step + 1;
        if done % schedule.record_stride == 0 || done == steps {
            observe(done as f64 * h, &rho, &mut record)?;
        }
    }

    record.final_state = DensityMatrix::from_trusted(rho);
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::KetVector;
    use crate::lindblad::HamiltonianSpec;

    fn decay_model() -> OpenSystemModel {
        // basis (e, g)
        let e = KetVector::basis(2, 0);
        let g = KetVector::basis(2, 1);
        OpenSystemModel::with_target_ket(HamiltonianSpec::new(2), g.clone())
            .unwrap()
            .lindblad(ComplexMatrix::outer(&g, &e).unwrap())
            .unwrap()
            .observable("e", ComplexMatrix::projector(&e))
            .unwrap()
    }

    #[test]
    fn exponential_decay() {
        let model = decay_model();
        let rho0 = DensityMatrix::pure(&KetVector::basis(2, 0)).unwrap();
        let rec = propagate(&model, &rho0, &Schedule::new(1.0, DEFAULT_DT, 100).unwrap(), None).unwrap();
        let pe = rec.final_population("e").unwrap();
        assert!((pe - (-1.0f64).exp()).abs() < 1e-5, "P_e(1) = {pe}");
        assert_eq!(rec.len(), 11);
        assert!((rec.times[10] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::new(0.0, 0.1, 1).is_err());
        assert!(Schedule::new(1.0, 2.0, 1).is_err());
        assert!(Schedule::new(1.0, 0.1, 0).is_err());
        assert_eq!(Schedule::new(1.0, 0.3, 1).unwrap().steps(), 3);
    }

    #[test]
    fn records_final_step_off_stride() {
        let model = decay_model();
        let rho0 = DensityMatrix::pure(&KetVector::basis(2, 0)).unwrap();
        let rec = propagate(&model, &rho0, &Schedule::new(1.0, 0.01, 30).unwrap(), None).unwrap();
        assert_eq!(rec.times.len(), 5);
        assert!((rec.times.last().unwrap() - 1.0).abs() < 1e-15);
    }
}
