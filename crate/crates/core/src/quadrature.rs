//! Two-dimensional phase-space quadrature over a disk.
//!
//! Tensor midpoint rule on the square bounding the disk, with cells whose
//! centre lies outside the disk dropped. The grid spacing is halved until two
//! successive estimates agree to `rel_tolerance`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result};

/// Cells per axis on the coarsest grid.
pub const BASE_CELLS: usize = 32;

/// Differences below this are at the level of double rounding for
/// integrals of order one. They count as converged on the finest level only:
/// two coarse grids that both miss a small feature agree exactly.
const ABS_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub center: Complex64,
    pub radius: f64,
    /// Number of grid halvings after the base grid.
    pub refinement_levels: u32,
    pub rel_tolerance: f64,
}

impl QuadratureSpec {
    pub const DEFAULT_LEVELS: u32 = 5;
    pub const DEFAULT_REL_TOLERANCE: f64 = 1e-3;

    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        Self {
            center,
            radius,
            refinement_levels: Self::DEFAULT_LEVELS,
            rel_tolerance: Self::DEFAULT_REL_TOLERANCE,
        }
        .validated()
    }

    /// Disk centred on `displacement` sized by [`radius_rule`].
    pub fn around(displacement: Complex64, photon_budget: f64) -> Result<Self> {
        Self::new(displacement, radius_rule(displacement, displacement, photon_budget))
    }

    pub fn with_levels(mut self, levels: u32) -> Result<Self> {
        self.refinement_levels = levels;
        self.validated()
    }

    pub fn with_rel_tolerance(mut self, tol: f64) -> Result<Self> {
        self.rel_tolerance = tol;
        self.validated()
    }

    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        self.radius = radius;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(invalid(format!("quadrature radius must be positive, got {}", self.radius)));
        }
        if !(self.rel_tolerance > 0.0) {
            return Err(invalid(format!(
                "quadrature tolerance must be positive, got {}",
                self.rel_tolerance
            )));
        }
        if self.refinement_levels == 0 {
            return Err(invalid("at least one refinement level is required"));
        }
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return Err(invalid("quadrature center must be finite"));
        }
        Ok(self)
    }

    /// Cells per axis on the finest grid this spec can reach.
    pub fn finest_cells(&self) -> usize {
        BASE_CELLS << self.refinement_levels
    }
}

/// R = 5 + |center - displacement| + sqrt(2 * photon_budget).
///
/// The Wigner envelope of the states handled here is a unit-width Gaussian
/// around the displacement, widened by the photon content.
pub fn radius_rule(center: Complex64, displacement: Complex64, photon_budget: f64) -> f64 {
    5.0 + (center - displacement).norm() + (2.0 * photon_budget.max(0.0)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// |I_h - I_{2h}| from the last refinement step.
    pub error_estimate: f64,
    pub converged: bool,
    /// Cells per axis of the grid that produced `value`.
    pub cells: usize,
}

/// ∫∫ f(γ) d(Re γ) d(Im γ) over the disk described by `spec`.
///
/// `f` may be called from several threads. The summation order is fixed, so
/// results are reproducible bit for bit.
pub fn integrate_phase_space<F>(f: F, spec: &QuadratureSpec) -> QuadratureResult
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let mut previous = midpoint_disk(&f, spec, BASE_CELLS);
    let mut result = QuadratureResult {
        value: previous,
        error_estimate: f64::INFINITY,
        converged: false,
        cells: BASE_CELLS,
    };
    for level in 1..=spec.refinement_levels {
        let cells = BASE_CELLS << level;
        let current = midpoint_disk(&f, spec, cells);
        let diff = (current - previous).abs();
        let last = level == spec.refinement_levels;
        result = QuadratureResult {
            value: current,
            error_estimate: diff,
            converged: (current != 0.0 && diff <= spec.rel_tolerance * current.abs()) || (last && diff <= ABS_FLOOR),
            cells,
        };
        if result.converged {
            break;
        }
        previous = current;
    }
    result
}

fn midpoint_disk<F>(f: &F, spec: &QuadratureSpec, cells: usize) -> f64
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let r = spec.radius;
    let h = 2.0 * r / cells as f64;
    let r2 = r * r;
    let rows: Vec<f64> = (0..cells)
        .into_par_iter()
        .map(|i| {
            let dx = -r + (i as f64 + 0.5) * h;
            let mut s = 0.0;
            for j in 0..cells {
                let dy = -r + (j as f64 + 0.5) * h;
                if dx * dx + dy * dy <= r2 {
                    s += f(spec.center + Complex64::new(dx, dy));
                }
            }
            s
        })
        .collect();
    rows.iter().sum::<f64>() * h * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn vacuum_gaussian_normalized() {
        let spec = QuadratureSpec::new(Complex64::new(0.0, 0.0), 6.0).unwrap();
        let res = integrate_phase_space(|g| 2.0 / PI * (-2.0 * g.norm_sqr()).exp(), &spec);
        assert!((res.value - 1.0).abs() < 1e-6, "{res:?}");
        assert!(res.converged);
    }

    #[test]
    fn off_center_gaussian() {
        let c = Complex64::new(1.2, -0.7);
        let spec = QuadratureSpec::around(c, c.norm_sqr()).unwrap();
        let res = integrate_phase_space(|g| 2.0 / PI * (-2.0 * (g - c).norm_sqr()).exp(), &spec);
        assert!((res.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn disk_area() {
        let spec = QuadratureSpec::new(Complex64::new(0.3, 0.3), 1.0)
            .unwrap()
            .with_levels(6)
            .unwrap()
            .with_rel_tolerance(1e-4)
            .unwrap();
        let res = integrate_phase_space(|_| 1.0, &spec);
        assert!((res.value - PI).abs() < 1e-3, "{res:?}");
    }

    #[test]
    fn unconverged_is_flagged_but_returns_value() {
        let spec = QuadratureSpec::new(Complex64::new(0.0, 0.0), 1.0)
            .unwrap()
            .with_levels(1)
            .unwrap()
            .with_rel_tolerance(1e-14)
            .unwrap();
        let res = integrate_phase_space(|_| 1.0, &spec);
        assert!(!res.converged);
        assert!((res.value - PI).abs() < 0.1);
        assert!(res.error_estimate > 0.0);
    }

    #[test]
    fn small_features_are_not_skipped() {
        // a bump far narrower than the coarse cells
        let spec = QuadratureSpec::new(Complex64::new(0.0, 0.0), 6.4).unwrap().with_levels(6).unwrap();
        let w = 0.02;
        let res = integrate_phase_space(|g| (g.norm() < w) as u8 as f64, &spec);
        assert!(res.value > 0.0);
        assert!(res.cells == spec.finest_cells() || res.converged);

        let res = integrate_phase_space(|_| 0.0, &spec);
        assert!(res.converged);
        assert_eq!(res.cells, spec.finest_cells());
    }

    #[test]
    fn deterministic() {
        let spec = QuadratureSpec::new(Complex64::new(0.1, 0.0), 4.0).unwrap();
        let f = |g: Complex64| (g.re * 3.0).cos() * (-g.norm_sqr()).exp();
        let a = integrate_phase_space(f, &spec);
        let b = integrate_phase_space(f, &spec);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn rejects_bad_specs() {
        let z = Complex64::new(0.0, 0.0);
        assert!(QuadratureSpec::new(z, 0.0).is_err());
        assert!(QuadratureSpec::new(z, -1.0).is_err());
        assert!(QuadratureSpec::new(z, 1.0).unwrap().with_rel_tolerance(0.0).is_err());
        assert!(QuadratureSpec::new(z, 1.0).unwrap().with_levels(0).is_err());
    }
}
