//! Wigner functions W(γ) normalized so that ∫∫ W d(Re γ) d(Im γ) = 1.
//!
//! Two independent routes:
//!
//! * [`PadfsWigner`]: closed form for a†^k D(α)|n⟩, a Gaussian around α times a
//!   finite double sum of Laguerre polynomials in η = 2γ − α.
//! * [`DensityWigner`]: any Fock-basis density matrix through the parity
//!   operator, W(γ) = (2/π) Tr[ρ D(γ) Π D†(γ)] = (2/π) Σ ρ_{m m'} (−1)^m ⟨m'|D(2γ)|m⟩.
//!   This is the only route for mixed states.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::quadrature::{integrate_phase_space, radius_rule, QuadratureResult, QuadratureSpec};
use crate::special::{binomial, factorial, log_factorial};
use crate::state::{DensityMatrix, PadfsParams};

/// A point γ in phase space; Re γ is position-like, Im γ momentum-like.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint(pub Complex64);

impl PhasePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self(Complex64::new(x, y))
    }
}

impl From<Complex64> for PhasePoint {
    fn from(g: Complex64) -> Self {
        Self(g)
    }
}

/// Precomputed closed-form Wigner function of a PADFS.
#[derive(Debug, Clone)]
pub struct PadfsWigner {
    alpha: Complex64,
    n: usize,
    k: usize,
    prefactor: f64,
    /// `coeffs[d][t']` = S_{t',t'+d} (−1)^{k+t'+d} (k+t')!
    coeffs: Vec<Vec<Complex64>>,
}

impl PadfsWigner {
    pub fn new(params: &PadfsParams) -> Self {
        let (alpha, n, k) = (params.alpha(), params.n(), params.k());
        let norm_sqr = 1.0 / params.unnormalized_norm_sqr();
        let prefactor = 2.0 * norm_sqr / (factorial(n) * PI);
        let conj = alpha.conj();
        let coeffs = (0..=n)
            .map(|d| {
                (0..=n - d)
                    .map(|tp| {
                        let t = tp + d;
                        let s = binomial(n as i64, tp as i64)
                            * binomial(n as i64, t as i64)
                            * conj.powu((n - tp) as u32)
                            * alpha.powu((n - t) as u32);
                        let sign = if (k + t) % 2 == 0 { 1.0 } else { -1.0 };
                        s * sign * factorial(k + tp)
                    })
                    .collect()
            })
            .collect();
        Self {
            alpha,
            n,
            k,
            prefactor,
            coeffs,
        }
    }

    pub fn eval(&self, gamma: Complex64) -> f64 {
        let eta = 2.0 * gamma - self.alpha;
        let x = eta.norm_sqr();
        let mut diag = 0.0;
        let mut off = Complex64::new(0.0, 0.0);
        let mut eta_pow = Complex64::new(1.0, 0.0);
        let mut lag = vec![0.0; self.k + self.n + 1];
        for (d, row) in self.coeffs.iter().enumerate() {
            // L_{k+t'}^d(x) for t' = 0..=n-d
            laguerre_run(self.k + self.n - d, d as f64, x, &mut lag);
            let mut acc = Complex64::new(0.0, 0.0);
            for (tp, c) in row.iter().enumerate() {
                acc += c * lag[self.k + tp];
            }
            if d == 0 {
                diag = acc.re;
            } else {
                off += eta_pow * acc;
            }
            eta_pow *= eta;
        }
        self.prefactor * (-2.0 * (gamma - self.alpha).norm_sqr()).exp() * (diag + 2.0 * off.re)
    }
}

/// Fills `out[0..=n]` with L_j^a(x) by the forward recurrence.
fn laguerre_run(n: usize, a: f64, x: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if n == 0 {
        return;
    }
    out[1] = 1.0 + a - x;
    for j in 1..n {
        let jf = j as f64;
        out[j + 1] = ((2.0 * jf + 1.0 + a - x) * out[j] - (jf + a) * out[j - 1]) / (jf + 1.0);
    }
}

/// W(γ) of a PADFS from the closed form.
pub fn wigner_padfs(params: &PadfsParams, point: PhasePoint) -> f64 {
    PadfsWigner::new(params).eval(point.0)
}

/// ⟨row|D(β)|col⟩.
///
/// Built from the normalized functions ℓ_j = √(j!/(j+d)!) |β|^d e^{−|β|²/2} L_j^d(|β|²),
/// whose recurrence keeps every intermediate bounded by one, so indices in the
/// hundreds are fine.
pub fn displaced_fock_element(row: usize, col: usize, beta: Complex64) -> Complex64 {
    let (lo, hi) = if row >= col { (col, row) } else { (row, col) };
    let d = hi - lo;
    let x = beta.norm_sqr();
    let mut ell = vec![0.0; lo + 1];
    normalized_laguerre_run(lo, d, x, &mut ell);
    let mag = ell[lo];
    if d == 0 {
        return Complex64::new(mag, 0.0);
    }
    let phase = beta.arg();
    if row >= col {
        // √(col!/row!) β^d e^{-x/2} L_col^d(x)
        Complex64::from_polar(mag, d as f64 * phase)
    } else {
        // √(row!/col!) (−β̄)^d e^{-x/2} L_row^d(x)
        let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::from_polar(sign * mag, -(d as f64) * phase)
    }
}

/// ℓ_j for j = 0..=n at fixed offset d, with
/// ℓ_{j+1} = [(2j+1+d−x) ℓ_j − √(j(j+d)) ℓ_{j−1}] / √((j+1)(j+1+d)).
fn normalized_laguerre_run(n: usize, d: usize, x: f64, out: &mut [f64]) {
    let df = d as f64;
    out[0] = if d == 0 {
        (-0.5 * x).exp()
    } else if x == 0.0 {
        0.0
    } else {
        (0.5 * df * x.ln() - 0.5 * x - 0.5 * log_factorial(d)).exp()
    };
    if n == 0 {
        return;
    }
    out[1] = (1.0 + df - x) * out[0] / (1.0 + df).sqrt();
    for j in 1..n {
        let jf = j as f64;
        out[j + 1] = ((2.0 * jf + 1.0 + df - x) * out[j] - (jf * (jf + df)).sqrt() * out[j - 1])
            / ((jf + 1.0) * (jf + 1.0 + df)).sqrt();
    }
}

/// Parity-sum Wigner function of a density matrix, with the matrix reduced to
/// its populated block and arranged by diagonal offset.
#[derive(Debug, Clone)]
pub struct DensityWigner {
    bands: Vec<Band>,
}

#[derive(Debug, Clone)]
struct Band {
    /// (−1)^j ρ_{j, j+d}
    weights: Vec<Complex64>,
    /// ½ ln d!
    half_ln_fact: f64,
    /// per step j ≥ 1: (2j+1+d, √(j(j+d)), 1/√((j+1)(j+1+d)))
    steps: Vec<(f64, f64, f64)>,
}

/// Populations at or below this are dropped before evaluation. Dropped
/// elements are bounded by √threshold, so the truncation error in W stays
/// below about 1e-12.
const SUPPORT_THRESHOLD: f64 = 1e-26;

impl DensityWigner {
    pub fn new(rho: &DensityMatrix) -> Self {
        let dim = rho.support_dim(SUPPORT_THRESHOLD);
        let bands = (0..dim)
            .map(|d| {
                let df = d as f64;
                let weights: Vec<Complex64> = (0..dim - d)
                    .map(|j| {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        rho.get(j, j + d) * sign
                    })
                    .collect();
                let steps = (1..weights.len().saturating_sub(1))
                    .map(|j| {
                        let jf = j as f64;
                        (
                            2.0 * jf + 1.0 + df,
                            (jf * (jf + df)).sqrt(),
                            1.0 / ((jf + 1.0) * (jf + 1.0 + df)).sqrt(),
                        )
                    })
                    .collect();
                Band {
                    weights,
                    half_ln_fact: 0.5 * log_factorial(d),
                    steps,
                }
            })
            .collect();
        Self { bands }
    }

    pub fn eval(&self, gamma: Complex64) -> f64 {
        let beta = 2.0 * gamma;
        let x = beta.norm_sqr();
        if x == 0.0 {
            let s: f64 = self.bands[0].weights.iter().map(|c| c.re).sum();
            return 2.0 / PI * s;
        }
        let half_ln_x = 0.5 * x.ln();
        let unit = beta / beta.norm();
        let mut phase = Complex64::new(1.0, 0.0);
        let mut total = 0.0;
        for (d, band) in self.bands.iter().enumerate() {
            let df = d as f64;
            // ℓ_j = √(j!/(j+d)!) |β|^d e^{−x/2} L_j^d(x), by its three-term recurrence
            let mut prev = (df * half_ln_x - 0.5 * x - band.half_ln_fact).exp();
            let w = &band.weights;
            let mut acc = w[0] * prev;
            if w.len() > 1 {
                let mut cur = (1.0 + df - x) * prev / (1.0 + df).sqrt();
                acc += w[1] * cur;
                for (&(c, b, inv), &wj) in band.steps.iter().zip(&w[2..]) {
                    let next = ((c - x) * cur - b * prev) * inv;
                    prev = cur;
                    cur = next;
                    acc += wj * cur;
                }
            }
            if d == 0 {
                total += acc.re;
            } else {
                // ⟨j+d|D(β)|j⟩ = ℓ_j e^{i d arg β}; the d < 0 band is the conjugate
                total += 2.0 * (acc * phase).re;
            }
            phase *= unit;
        }
        2.0 / PI * total
    }
}

/// W(γ) of an arbitrary density matrix via the parity operator.
pub fn wigner_generic(rho: &DensityMatrix, point: PhasePoint) -> f64 {
    DensityWigner::new(rho).eval(point.0)
}

/// Where a Wigner function comes from.
#[derive(Debug, Clone, Copy)]
pub enum WignerSource<'a> {
    Padfs(&'a PadfsParams),
    Density(&'a DensityMatrix),
}

/// A ready-to-evaluate Wigner function from either route.
#[derive(Debug, Clone)]
pub enum WignerFunction {
    Padfs(PadfsWigner),
    Density(DensityWigner),
}

impl WignerFunction {
    pub fn eval(&self, gamma: Complex64) -> f64 {
        match self {
            Self::Padfs(w) => w.eval(gamma),
            Self::Density(w) => w.eval(gamma),
        }
    }
}

impl<'a> From<WignerSource<'a>> for WignerFunction {
    fn from(src: WignerSource<'a>) -> Self {
        match src {
            WignerSource::Padfs(p) => Self::Padfs(PadfsWigner::new(p)),
            WignerSource::Density(r) => Self::Density(DensityWigner::new(r)),
        }
    }
}

impl WignerSource<'_> {
    /// Default integration disk: centred on the displacement (⟨a⟩ for a
    /// density matrix) with the radius rule applied to the photon content.
    pub fn quadrature_spec(&self) -> Result<QuadratureSpec> {
        match self {
            Self::Padfs(p) => QuadratureSpec::around(p.alpha(), p.photon_budget()),
            Self::Density(r) => QuadratureSpec::around(r.mean_a(), r.mean_photon_number()),
        }
    }
}

/// Grid controls that are independent of the state; the disk itself is
/// placed per state by [`QuadratureOptions::spec_for`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Overrides the radius rule when set.
    pub radius: Option<f64>,
    pub refinement_levels: u32,
    pub rel_tolerance: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            radius: None,
            refinement_levels: QuadratureSpec::DEFAULT_LEVELS,
            rel_tolerance: QuadratureSpec::DEFAULT_REL_TOLERANCE,
        }
    }
}

impl QuadratureOptions {
    pub fn spec_for(&self, source: WignerSource<'_>) -> Result<QuadratureSpec> {
        let mut spec = source.quadrature_spec()?;
        if let Some(r) = self.radius {
            spec.radius = r;
        }
        spec.refinement_levels = self.refinement_levels;
        spec.rel_tolerance = self.rel_tolerance;
        spec.validated()
    }
}

/// ∫∫ W, ∫∫ |W| and ∫∫ max(−W, 0) over the disk of `spec`.
pub fn integrate_wigner(w: &WignerFunction, spec: &QuadratureSpec, part: WignerPart) -> QuadratureResult {
    match part {
        WignerPart::Signed => integrate_phase_space(|g| w.eval(g), spec),
        WignerPart::Absolute => integrate_phase_space(|g| w.eval(g).abs(), spec),
        WignerPart::Negative => integrate_phase_space(|g| (-w.eval(g)).max(0.0), spec),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WignerPart {
    Signed,
    Absolute,
    Negative,
}

/// Axis-aligned phase-space window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn square(half_width: f64) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            y_min: -half_width,
            y_max: half_width,
        }
    }
}

/// Wigner values sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    /// `values[i * y_axis.len() + j]` = W(x_i + i y_j)
    pub values: Vec<f64>,
    pub min_value: f64,
    pub min_location: PhasePoint,
}

impl WignerGrid {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.y_axis.len() + iy]
    }

    /// Σ W · cell area over the grid.
    pub fn riemann_sum(&self) -> f64 {
        let dx = self.x_axis[1] - self.x_axis[0];
        let dy = self.y_axis[1] - self.y_axis[0];
        self.values.iter().sum::<f64>() * dx * dy
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + i as f64 * step }).collect()
}

/// Dense evaluation of W on `window` with `resolution` points per axis.
pub fn wigner_grid(source: WignerSource<'_>, window: Window, resolution: usize) -> Result<WignerGrid> {
    if resolution < 2 {
        return Err(invalid("grid resolution must be at least 2 per axis"));
    }
    if !(window.x_max > window.x_min && window.y_max > window.y_min) {
        return Err(invalid("grid window must have positive extent"));
    }
    let w = WignerFunction::from(source);
    let x_axis = linspace(window.x_min, window.x_max, resolution);
    let y_axis = linspace(window.y_min, window.y_max, resolution);
    let values: Vec<f64> = x_axis
        .par_iter()
        .flat_map_iter(|&x| {
            let w = &w;
            y_axis.iter().map(move |&y| w.eval(Complex64::new(x, y)))
        })
        .collect();
    let (imin, &min_value) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let ny = y_axis.len();
    let min_location = PhasePoint::new(x_axis[imin / ny], y_axis[imin % ny]);
    Ok(WignerGrid {
        x_axis,
        y_axis,
        values,
        min_value,
        min_location,
    })
}

/// Radius of the default integration disk for `params`.
pub fn default_radius(params: &PadfsParams) -> f64 {
    radius_rule(params.alpha(), params.alpha(), params.photon_budget())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{limiting_state, padfs_coefficients, to_density_matrix, FockVector, LimitingState};
    use crate::special::laguerre_general;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TWO_OVER_PI: f64 = 2.0 / PI;

    fn rho_of(params: &PadfsParams) -> DensityMatrix {
        let v = padfs_coefficients(params).unwrap();
        to_density_matrix(&v, v.dense_dim()).unwrap()
    }

    #[test]
    fn coherent_peak() {
        let p = PadfsParams::new(0.7, 0, 0).unwrap();
        let w = wigner_padfs(&p, PhasePoint::new(0.7, 0.0));
        assert!((w - TWO_OVER_PI).abs() < 1e-12);
    }

    #[test]
    fn single_photon_at_origin() {
        let p = PadfsParams::new(0.0, 0, 1).unwrap();
        assert!((wigner_padfs(&p, PhasePoint::new(0.0, 0.0)) + TWO_OVER_PI).abs() < 1e-12);
        let rho = to_density_matrix(&FockVector::fock(1), 2).unwrap();
        assert!((wigner_generic(&rho, PhasePoint::new(0.0, 0.0)) + TWO_OVER_PI).abs() < 1e-12);
        let vac = to_density_matrix(&FockVector::fock(0), 1).unwrap();
        assert!((wigner_generic(&vac, PhasePoint::new(0.0, 0.0)) - TWO_OVER_PI).abs() < 1e-12);
    }

    #[test]
    fn fock_one_radial_profile() {
        // W_1(r) = (2/π)(4r² − 1) e^{−2r²}
        let rho = to_density_matrix(&FockVector::fock(1), 4).unwrap();
        for &(x, y) in &[(0.3, 0.1), (-0.8, 0.5), (1.4, -0.2)] {
            let r2: f64 = x * x + y * y;
            let expected = TWO_OVER_PI * (4.0 * r2 - 1.0) * (-2.0 * r2).exp();
            assert!((wigner_generic(&rho, PhasePoint::new(x, y)) - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn padfs_negative_lobe() {
        let p = PadfsParams::new(0.5, 1, 1).unwrap();
        let grid = wigner_grid(WignerSource::Padfs(&p), Window::square(3.0), 121).unwrap();
        assert!(grid.min_value < 0.0);
        assert!(wigner_padfs(&p, grid.min_location) < 0.0);
    }

    #[test]
    fn analytic_matches_parity_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let p = PadfsParams::new(0.5, 1, 1).unwrap();
        let analytic = PadfsWigner::new(&p);
        let generic = DensityWigner::new(&rho_of(&p));
        for _ in 0..100 {
            let r: f64 = rng.gen_range(0.0..3.0);
            let th: f64 = rng.gen_range(0.0..2.0 * PI);
            let g = Complex64::from_polar(r, th);
            assert!((analytic.eval(g) - generic.eval(g)).abs() < 1e-9, "γ = {g}");
        }
    }

    #[test]
    fn complex_displacement_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = PadfsParams::new(Complex64::new(0.6, -0.9), 2, 2).unwrap();
        let analytic = PadfsWigner::new(&p);
        let generic = DensityWigner::new(&rho_of(&p));
        for _ in 0..50 {
            let g = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            assert!((analytic.eval(g) - generic.eval(g)).abs() < 1e-9, "γ = {g}");
        }
    }

    #[test]
    fn displaced_elements_match_laguerre_form() {
        let beta = Complex64::new(0.9, 0.4);
        let x = beta.norm_sqr();
        for row in 0..8 {
            for col in 0..8 {
                let expected = if row >= col {
                    let d = row - col;
                    (0.5 * (log_factorial(col) - log_factorial(row))).exp()
                        * beta.powu(d as u32)
                        * (-0.5 * x).exp()
                        * laguerre_general(col, d as i64, x)
                } else {
                    let d = col - row;
                    (0.5 * (log_factorial(row) - log_factorial(col))).exp()
                        * (-beta.conj()).powu(d as u32)
                        * (-0.5 * x).exp()
                        * laguerre_general(row, d as i64, x)
                };
                let got = displaced_fock_element(row, col, beta);
                assert!((got - expected).norm() < 1e-13, "({row},{col})");
            }
        }
    }

    #[test]
    fn displaced_columns_are_unit_vectors_at_large_index() {
        let beta = Complex64::new(3.0, -2.0);
        for &col in &[0usize, 50, 200] {
            let s: f64 = (0..600).map(|r| displaced_fock_element(r, col, beta).norm_sqr()).sum();
            assert!((s - 1.0).abs() < 1e-10, "col {col}: {s}");
        }
    }

    #[test]
    fn coherent_grid_nonnegative() {
        let p = PadfsParams::new(0.7, 0, 0).unwrap();
        let grid = wigner_grid(WignerSource::Padfs(&p), Window::square(3.0), 121).unwrap();
        assert!(grid.min_value >= -1e-10);
        let vac = to_density_matrix(&FockVector::fock(0), 1).unwrap();
        let grid = wigner_grid(WignerSource::Density(&vac), Window::square(3.0), 41).unwrap();
        assert!(grid.min_value >= 0.0);
    }

    #[test]
    fn fock_two_radial_sign_changes() {
        let rho = to_density_matrix(&limiting_state(&LimitingState::Fock(2)).unwrap(), 3).unwrap();
        let w = DensityWigner::new(&rho);
        let samples: Vec<f64> = (0..400).map(|i| w.eval(Complex64::new(i as f64 * 0.005, 0.0))).collect();
        let changes = samples.windows(2).filter(|p| p[0].signum() != p[1].signum()).count();
        assert!(changes >= 2);
    }

    #[test]
    fn grid_validation() {
        let p = PadfsParams::new(0.5, 1, 1).unwrap();
        assert!(wigner_grid(WignerSource::Padfs(&p), Window::square(3.0), 1).is_err());
        let bad = Window {
            x_min: 1.0,
            x_max: 0.0,
            y_min: 0.0,
            y_max: 1.0,
        };
        assert!(wigner_grid(WignerSource::Padfs(&p), bad, 10).is_err());
    }

    #[test]
    fn real_displacement_reflection_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &(a, n, k) in &[(0.5, 1, 1), (1.3, 2, 3), (2.0, 3, 0)] {
            let w = PadfsWigner::new(&PadfsParams::new(a, n, k).unwrap());
            for _ in 0..30 {
                let g = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let (w1, w2) = (w.eval(g), w.eval(g.conj()));
                assert!((w1 - w2).abs() <= 1e-12 * w1.abs().max(1.0));
            }
        }
    }

    #[test]
    fn gaussian_log_is_quadratic() {
        let w = PadfsWigner::new(&PadfsParams::new(0.8, 0, 0).unwrap());
        let h = 0.1;
        let logs: Vec<f64> = (0..30).map(|i| w.eval(Complex64::new(-1.0 + i as f64 * h, 0.3)).ln()).collect();
        let second: Vec<f64> = logs.windows(3).map(|s| (s[0] - 2.0 * s[1] + s[2]) / (h * h)).collect();
        for s in &second {
            assert!((s - second[0]).abs() < 1e-8);
            assert!((s + 4.0).abs() < 1e-6);
        }
    }
}
