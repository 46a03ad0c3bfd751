//! Right-hand side of the controlled, noise-averaged master equation
//!
//! ```text
//! ρ̇ = −i[H(t) + Σ f_n H_n, ρ] + 𝒩ρ + ℒρ
//! ℒρ = Σ_k L_k ρ L_k† − ½{L_k†L_k, ρ}
//! 𝒩ρ = −(η²/2) Σ_c [H_c, [H_c, ρ]]
//! ```
//!
//! The free functions evaluate each piece literally. [`Generator`] is the
//! precompiled form used by the integrator; it rewrites the double commutator
//! as a dissipator with the Hermitian jump operator `η·H_c` and folds every
//! anticommutator into a non-Hermitian effective Hamiltonian.

use num_complex::Complex64;

use super::{DensityMatrix, NoiseChannel, OpenSystemModel};
use crate::algebra::{check_dims, commutator, ComplexMatrix, I, ZERO};
use crate::error::{Error, Result};

/// ℒρ for the given Lindblad operators.
pub fn dissipator(lindblad_ops: &[ComplexMatrix], rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let r = rho.matrix();
    let mut out = ComplexMatrix::zeros(r.dim());
    for l in lindblad_ops {
        check_dims(r.dim(), l.dim())?;
        let ld = l.dagger();
        let ldl = &ld * l;
        out += &(&(l * r) * &ld);
        out.add_scaled(Complex64::new(-0.5, 0.0), &(&ldl * r));
        out.add_scaled(Complex64::new(-0.5, 0.0), &(r * &ldl));
    }
    Ok(out)
}

/// 𝒩ρ summed over the noise channels.
pub fn noise_superoperator(channels: &[NoiseChannel], rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let r = rho.matrix();
    let mut out = ComplexMatrix::zeros(r.dim());
    for ch in channels {
        let inner = commutator(ch.direction(), r)?;
        let outer = commutator(ch.direction(), &inner)?;
        out.add_scaled(Complex64::new(-0.5 * ch.eta() * ch.eta(), 0.0), &outer);
    }
    Ok(out)
}

/// Full right-hand side at time `t` with explicit control amplitudes.
pub fn master_rhs(
    model: &OpenSystemModel,
    t: f64,
    rho: &DensityMatrix,
    control_values: &[f64],
) -> Result<ComplexMatrix> {
    check_dims(model.dim(), rho.dim())?;
    if control_values.len() != model.controls().len() {
        return Err(Error::InvalidInput(format!(
            "expected {} control values, got {}",
            model.controls().len(),
            control_values.len()
        )));
    }
    let mut h = model.hamiltonian().evaluate(t);
    for (f, hn) in control_values.iter().zip(model.controls()) {
        h.add_scaled(Complex64::new(*f, 0.0), hn);
    }
    let mut out = commutator(&h, rho.matrix())?.scale(-I);
    out += &noise_superoperator(model.noise(), rho)?;
    out += &dissipator(model.lindblad_ops(), rho)?;
    Ok(out)
}

/// Nonzero entries of an operator.
#[derive(Clone, Debug, Default)]
struct SparseOp {
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOp {
    fn from_dense(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let v = m[(i, j)];
                (v != ZERO).then_some((i, j, v))
            })
            .collect();
        Self { entries }
    }

    /// acc += coef · (self · rho), all row-major with side `n`.
    #[inline]
    fn accumulate_left(&self, coef: Complex64, rho: &[Complex64], acc: &mut [Complex64], n: usize) {
        for &(i, k, v) in &self.entries {
            let s = coef * v;
            let src = &rho[k * n..(k + 1) * n];
            let dst = &mut acc[i * n..(i + 1) * n];
            for (d, &r) in dst.iter_mut().zip(src) {
                *d += s * r;
            }
        }
    }

    /// acc += L·rho·L†
    #[inline]
    fn accumulate_sandwich(&self, rho: &[Complex64], acc: &mut [Complex64], n: usize) {
        for &(a, i, u) in &self.entries {
            for &(b, j, v) in &self.entries {
                acc[a * n + b] += u * rho[i * n + j] * v.conj();
            }
        }
    }
}

/// Precompiled vector field of a model.
#[derive(Clone, Debug)]
pub struct Generator {
    dim: usize,
    /// H_static − (i/2)·Σ J†J over all jump operators J.
    effective_static: SparseOp,
    /// (A, A†, ω) for each rotating term.
    rotating: Vec<(SparseOp, SparseOp, f64)>,
    controls: Vec<SparseOp>,
    jumps: Vec<SparseOp>,
}

impl Generator {
    pub fn new(model: &OpenSystemModel) -> Self {
        let dim = model.dim();
        let mut jump_mats: Vec<ComplexMatrix> = model.lindblad_ops().to_vec();
        for ch in model.noise() {
            if ch.eta() > 0.0 {
                jump_mats.push(ch.direction().scale_real(ch.eta()));
            }
        }
        let mut k = model.hamiltonian().static_part();
        for j in &jump_mats {
            k.add_scaled(Complex64::new(0.0, -0.5), &(&j.dagger() * j));
        }
        let rotating = model
            .hamiltonian()
            .rotating_terms()
            .iter()
            .map(|r| (SparseOp::from_dense(&r.operator), SparseOp::from_dense(&r.operator.dagger()), r.omega))
            .collect();
        Self {
            dim,
            effective_static: SparseOp::from_dense(&k),
            rotating,
            controls: model.controls().iter().map(SparseOp::from_dense).collect(),
            jumps: jump_mats.iter().map(SparseOp::from_dense).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_controls(&self) -> usize {
        self.controls.len()
    }

    /// Writes ρ̇ into `out`. `rho` must be Hermitian; `control_values` may be
    /// shorter than the control list, missing amplitudes count as zero.
    pub fn apply(&self, t: f64, rho: &ComplexMatrix, control_values: &[f64], out: &mut ComplexMatrix) {
        let n = self.dim;
        debug_assert_eq!(rho.dim(), n);
        debug_assert_eq!(out.dim(), n);
        let r = rho.as_slice();
        // x = −i·K(t)·ρ
        let mut x = vec![ZERO; n * n];
        let minus_i = -I;
        self.effective_static.accumulate_left(minus_i, r, &mut x, n);
        for (a, ad, omega) in &self.rotating {
            let phase = Complex64::from_polar(1.0, omega * t);
            a.accumulate_left(minus_i * phase, r, &mut x, n);
            ad.accumulate_left(minus_i * phase.conj(), r, &mut x, n);
        }
        for (h, &f) in self.controls.iter().zip(control_values) {
            if f != 0.0 {
                h.accumulate_left(minus_i * f, r, &mut x, n);
            }
        }
        // −iKρ + iρK† = x + x†
        let o = out.as_mut_slice();
        for i in 0..n {
            for j in 0..n {
                o[i * n + j] = x[i * n + j] + x[j * n + i].conj();
            }
        }
        for jump in &self.jumps {
            jump.accumulate_sandwich(r, o, n);
        }
    }

    pub fn evaluate(&self, t: f64, rho: &ComplexMatrix, control_values: &[f64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        self.apply(t, rho, control_values, &mut out);
        out
    }
}
