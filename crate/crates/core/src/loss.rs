//! Photon loss (amplitude damping at zero temperature).
//!
//! After a rescaled time κt a fraction T = 1 − e^{−2κt} of the energy is lost;
//! the channel has Kraus operators ⟨m−j|A_j|m⟩ = √C(m,j) e^{−κt(m−j)} T^{j/2}.
//! In phase space it is a contraction γ ↦ γe^{−κt} followed by a Gaussian blur
//! of variance T/4 per quadrature.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::measures::{wln_of, WlnEstimate};
use crate::quadrature::{integrate_phase_space, QuadratureResult, QuadratureSpec};
use crate::special::ln_binomial;
use crate::state::{padfs_coefficients, to_density_matrix, DensityMatrix, PadfsParams};
use crate::wigner::{DensityWigner, PadfsWigner, WignerFunction};

/// Rescaled loss time κt; T is always derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams {
    kappa_t: f64,
}

impl LossParams {
    pub fn new(kappa_t: f64) -> Result<Self> {
        if !(kappa_t >= 0.0 && kappa_t.is_finite()) {
            return Err(invalid(format!("kappa_t must be a finite non-negative number, got {kappa_t}")));
        }
        Ok(Self { kappa_t })
    }

    pub fn kappa_t(&self) -> f64 {
        self.kappa_t
    }

    /// T = 1 − e^{−2κt}
    #[allow(non_snake_case)]
    pub fn T(&self) -> f64 {
        -(-2.0 * self.kappa_t).exp_m1()
    }

    /// η = 1 − T = e^{−2κt}
    pub fn efficiency(&self) -> f64 {
        (-2.0 * self.kappa_t).exp()
    }
}

/// ρ(t) = Σ_j A_j ρ A_j†, in the same Fock basis as `rho`.
pub fn evolve_loss(rho: &DensityMatrix, loss: LossParams) -> Result<DensityMatrix> {
    let t = loss.T();
    if t == 0.0 {
        return Ok(rho.clone());
    }
    let kt = loss.kappa_t();
    let ln_t = t.ln();
    let dim = rho.dim();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for p in 0..dim {
        for q in 0..dim {
            let r = rho.get(p, q);
            if r == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..=p.min(q) {
                let ln_w = 0.5 * (ln_binomial(p, j) + ln_binomial(q, j)) - kt * (p + q - 2 * j) as f64
                    + j as f64 * ln_t;
                out[(p - j, q - j)] += r * ln_w.exp();
            }
        }
    }
    DensityMatrix::from_matrix(out)
}

/// Density matrix of the PADFS after loss, on the smallest basis holding the
/// initial amplitudes.
pub fn evolved_padfs(params: &PadfsParams, loss: LossParams) -> Result<DensityMatrix> {
    let v = padfs_coefficients(params)?;
    let rho = to_density_matrix(&v, v.dense_dim())?;
    evolve_loss(&rho, loss)
}

/// Wigner function of the PADFS after loss, through Kraus evolution.
pub fn noisy_wigner_function(params: &PadfsParams, loss: LossParams) -> Result<WignerFunction> {
    Ok(WignerFunction::Density(DensityWigner::new(&evolved_padfs(params, loss)?)))
}

pub fn noisy_wigner(params: &PadfsParams, loss: LossParams, point: Complex64) -> Result<f64> {
    Ok(noisy_wigner_function(params, loss)?.eval(point))
}

/// Noisy Wigner function at ζ as the Gaussian convolution of the initial one,
/// W(ζ, t) = (2/T) ∫ d²γ/π exp(−(2/T)|ζ − γe^{−κt}|²) W(γ, 0).
///
/// The disk is centred on ζe^{κt} with a radius of eight kernel widths.
pub fn noisy_wigner_convolution(
    params: &PadfsParams,
    loss: LossParams,
    point: Complex64,
    levels: u32,
    rel_tolerance: f64,
) -> Result<QuadratureResult> {
    let w0 = PadfsWigner::new(params);
    let t = loss.T();
    if t == 0.0 {
        return Ok(QuadratureResult {
            value: w0.eval(point),
            error_estimate: 0.0,
            converged: true,
            cells: 0,
        });
    }
    let shrink = (-loss.kappa_t()).exp();
    let width = (t / 4.0).sqrt() / shrink;
    let spec = QuadratureSpec::new(point / shrink, 8.0 * width)?
        .with_levels(levels)?
        .with_rel_tolerance(rel_tolerance)?;
    let scale = 2.0 / (t * PI);
    Ok(integrate_phase_space(
        |g| scale * (-(2.0 / t) * (point - g * shrink).norm_sqr()).exp() * w0.eval(g),
        &spec,
    ))
}

/// One point of a decay curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayPoint {
    pub kappa_t: f64,
    pub wln: f64,
    pub wln_err: f64,
    pub converged: bool,
}

/// 𝒲 of the evolved state at each κt, integrated over the disk of `spec`.
pub fn wln_decay_curve(params: &PadfsParams, kt_grid: &[f64], spec: &QuadratureSpec) -> Result<Vec<DecayPoint>> {
    if kt_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("kappa_t grid must be sorted ascending"));
    }
    let v = padfs_coefficients(params)?;
    let rho = to_density_matrix(&v, v.dense_dim())?;
    kt_grid
        .iter()
        .map(|&kt| {
            let est = evolved_wln(&rho, LossParams::new(kt)?, spec)?;
            Ok(DecayPoint {
                kappa_t: kt,
                wln: est.value,
                wln_err: est.error,
                converged: est.converged,
            })
        })
        .collect()
}

fn evolved_wln(rho: &DensityMatrix, loss: LossParams, spec: &QuadratureSpec) -> Result<WlnEstimate> {
    let evolved = evolve_loss(rho, loss)?;
    Ok(wln_of(&WignerFunction::Density(DensityWigner::new(&evolved)), spec))
}

/// Bracket width of the threshold bisection.
pub const THRESHOLD_TOLERANCE: f64 = 1e-3;

const THRESHOLD_SEARCH_START: f64 = 0.5;
const THRESHOLD_SEARCH_LIMIT: f64 = 16.0;

/// Smallest κt beyond which 𝒲 no longer exceeds three times its quadrature
/// error, by bisection to [`THRESHOLD_TOLERANCE`].
pub fn wln_threshold(params: &PadfsParams, spec: &QuadratureSpec) -> Result<f64> {
    let v = padfs_coefficients(params)?;
    let rho = to_density_matrix(&v, v.dense_dim())?;
    let negative = |kt: f64| -> Result<bool> {
        let est = evolved_wln(&rho, LossParams::new(kt)?, spec)?;
        Ok(est.raw > 3.0 * est.error)
    };
    if !negative(0.0)? {
        return Err(Error::NoInitialNegativity);
    }
    let mut lo = 0.0;
    let mut hi = THRESHOLD_SEARCH_START;
    while negative(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > THRESHOLD_SEARCH_LIMIT {
            return Err(Error::ThresholdNotBracketed { kappa_t: lo });
        }
    }
    while hi - lo > THRESHOLD_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if negative(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// W at the phase-space origin.
pub fn wigner_at_origin_witness(rho: &DensityMatrix) -> f64 {
    DensityWigner::new(rho).eval(Complex64::new(0.0, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::FockVector;
    use crate::wigner::WignerSource;
    use approx::assert_relative_eq;

    fn padfs_rho(a: f64, n: usize, k: usize) -> DensityMatrix {
        let v = padfs_coefficients(&PadfsParams::new(a, n, k).unwrap()).unwrap();
        to_density_matrix(&v, v.dense_dim()).unwrap()
    }

    fn max_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        (a.elements() - b.elements()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn loss_params() {
        assert!(LossParams::new(-0.1).is_err());
        assert!(LossParams::new(f64::NAN).is_err());
        let l = LossParams::new(0.0).unwrap();
        assert_eq!(l.T(), 0.0);
        let l = LossParams::new(0.5 * 2f64.ln()).unwrap();
        assert_relative_eq!(l.T(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(l.efficiency() + l.T(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_time_is_identity() {
        let rho = padfs_rho(0.5, 1, 1);
        assert_eq!(evolve_loss(&rho, LossParams::new(0.0).unwrap()).unwrap(), rho);
    }

    #[test]
    fn single_photon_populations() {
        let rho = to_density_matrix(&FockVector::fock(1), 2).unwrap();
        for kt in [0.05, 0.3, 1.0] {
            let l = LossParams::new(kt).unwrap();
            let out = evolve_loss(&rho, l).unwrap();
            let p = out.populations();
            assert_relative_eq!(p[1], (-2.0 * kt).exp(), epsilon = 1e-14);
            assert_relative_eq!(p[0], 1.0 - (-2.0 * kt).exp(), epsilon = 1e-14);
        }
    }

    #[test]
    fn semigroup() {
        let rho = padfs_rho(0.9, 2, 1);
        let a = LossParams::new(0.13).unwrap();
        let b = LossParams::new(0.29).unwrap();
        let two_step = evolve_loss(&evolve_loss(&rho, a).unwrap(), b).unwrap();
        let one_step = evolve_loss(&rho, LossParams::new(0.42).unwrap()).unwrap();
        assert!(max_diff(&two_step, &one_step) < 1e-12);
    }

    #[test]
    fn physicality_preserved() {
        let rho = padfs_rho(1.3, 1, 2);
        for kt in [0.01, 0.1, 0.25, 0.7, 3.0] {
            evolve_loss(&rho, LossParams::new(kt).unwrap()).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn mean_photon_number_decays() {
        let rho = padfs_rho(0.5, 1, 1);
        let n0 = rho.mean_photon_number();
        for kt in [0.1, 0.25, 0.8] {
            let n = evolve_loss(&rho, LossParams::new(kt).unwrap()).unwrap().mean_photon_number();
            assert!((n - (-2.0 * kt).exp() * n0).abs() < 1e-8);
        }
    }

    #[test]
    fn long_times_reach_vacuum() {
        let out = evolve_loss(&padfs_rho(0.5, 1, 1), LossParams::new(20.0).unwrap()).unwrap();
        let vac = to_density_matrix(&FockVector::fock(0), out.dim()).unwrap();
        assert!(max_diff(&out, &vac) < 1e-8);
        assert_relative_eq!(wigner_at_origin_witness(&out), 2.0 / PI, epsilon = 1e-8);
    }

    #[test]
    fn origin_witness_values() {
        let vac = to_density_matrix(&FockVector::fock(0), 1).unwrap();
        assert_relative_eq!(wigner_at_origin_witness(&vac), 2.0 / PI, epsilon = 1e-15);
        let one = to_density_matrix(&FockVector::fock(1), 2).unwrap();
        assert_relative_eq!(wigner_at_origin_witness(&one), -2.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn origin_witness_follows_convolution_and_ends_at_vacuum() {
        let p = PadfsParams::new(0.5, 1, 1).unwrap();
        let rho = padfs_rho(0.5, 1, 1);
        for kt in [0.05, 0.2, 0.275, 0.35] {
            let l = LossParams::new(kt).unwrap();
            let w = wigner_at_origin_witness(&evolve_loss(&rho, l).unwrap());
            let c = noisy_wigner_convolution(&p, l, Complex64::new(0.0, 0.0), 5, 1e-10).unwrap();
            assert!((w - c.value).abs() < 1e-9, "{kt}");
        }
        let late: Vec<f64> = (0..8)
            .map(|i| wigner_at_origin_witness(&evolve_loss(&rho, LossParams::new(0.4 + 0.5 * i as f64).unwrap()).unwrap()))
            .collect();
        assert!(late.windows(2).all(|w| w[1] > w[0]));
        assert!(late[7] < 2.0 / PI);
    }

    #[test]
    fn zero_loss_convolution_is_the_initial_wigner() {
        let p = PadfsParams::new(0.5, 1, 1).unwrap();
        let g = Complex64::new(0.2, -0.4);
        let r = noisy_wigner_convolution(&p, LossParams::new(0.0).unwrap(), g, 5, 1e-10).unwrap();
        assert_eq!(r.value, PadfsWigner::new(&p).eval(g));
        let k = noisy_wigner(&p, LossParams::new(0.0).unwrap(), g).unwrap();
        assert!((k - r.value).abs() < 1e-12);
    }

    #[test]
    fn convolution_matches_kraus_at_a_few_points() {
        let p = PadfsParams::new(0.5, 1, 1).unwrap();
        let l = LossParams::new(0.2).unwrap();
        let w = noisy_wigner_function(&p, l).unwrap();
        for &(x, y) in &[(0.0, 0.0), (0.3, 0.1), (-0.5, 0.6), (1.2, -0.3)] {
            let g = Complex64::new(x, y);
            let c = noisy_wigner_convolution(&p, l, g, 5, 1e-10).unwrap();
            assert!((c.value - w.eval(g)).abs() < 1e-8, "{g}: {} vs {}", c.value, w.eval(g));
        }
    }

    #[test]
    fn decay_curve_checks_order_and_starts_at_noiseless_value() {
        let p = PadfsParams::new(0.5, 1, 1).unwrap();
        let spec = WignerSource::Padfs(&p).quadrature_spec().unwrap().with_levels(3).unwrap();
        assert!(wln_decay_curve(&p, &[0.2, 0.1], &spec).is_err());
        let curve = wln_decay_curve(&p, &[0.0], &spec).unwrap();
        let direct = crate::measures::wigner_log_negativity(WignerSource::Padfs(&p), &spec);
        assert!((curve[0].wln - direct.value).abs() < 1e-10);
    }

    #[test]
    fn coherent_state_has_no_threshold() {
        let p = PadfsParams::new(0.8, 0, 0).unwrap();
        let spec = WignerSource::Padfs(&p).quadrature_spec().unwrap().with_levels(2).unwrap();
        assert_eq!(wln_threshold(&p, &spec), Err(Error::NoInitialNegativity));
    }
}
