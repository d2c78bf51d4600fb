//! Nonclassicality and non-Gaussianity quantifiers of single-mode pure states.
//!
//! * linear entropy potential L_E: mix the state with vacuum on a 50:50
//!   beamsplitter and take 1 − Tr ρ_B² of one output mode;
//! * skew-information measure N = 1/2 + ⟨a†a⟩ − |⟨a⟩|²;
//! * Wigner logarithmic negativity 𝒲 = log₂ ∫|W|;
//! * relative entropy of non-Gaussianity δ = h(√det σ).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::special::ln_binomial;
use crate::state::{padfs_coefficients, FockVector, PadfsParams};
use crate::wigner::{integrate_wigner, QuadratureOptions, WignerFunction, WignerPart, WignerSource};

/// Amplitudes below this modulus are dropped from two-mode tables and from
/// the closed-form quadruple sum.
const AMPLITUDE_CUTOFF: f64 = 1e-20;

/// Sparse two-mode pure state, keyed by (photons in A, photons in B).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    amps: BTreeMap<(usize, usize), Complex64>,
}

impl TwoModeState {
    pub fn amplitudes(&self) -> &BTreeMap<(usize, usize), Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, a: usize, b: usize) -> Complex64 {
        self.amps.get(&(a, b)).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|c| c.norm_sqr()).sum()
    }

    /// ρ_B = Tr_A |φ⟩⟨φ| on |0⟩ … |max_b⟩.
    pub fn reduced_b(&self) -> DMatrix<Complex64> {
        let dim = self.amps.keys().map(|&(_, b)| b + 1).max().unwrap_or(1);
        let mut rho = DMatrix::zeros(dim, dim);
        let mut by_a: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (&(a, b), &c) in &self.amps {
            by_a.entry(a).or_default().push((b, c));
        }
        for row in by_a.values() {
            for &(b, c) in row {
                for &(b2, c2) in row {
                    rho[(b, b2)] += c * c2.conj();
                }
            }
        }
        rho
    }
}

/// Output of a 50:50 beamsplitter with `v` in port A and vacuum in port B.
///
/// |p⟩|0⟩ ↦ 2^{−p/2} Σ_{k₁} √C(p, k₁) i^{p−k₁} |k₁, p−k₁⟩.
pub fn beamsplitter_output(v: &FockVector) -> TwoModeState {
    let mut amps = BTreeMap::new();
    for (j, &c) in v.amps().iter().enumerate() {
        if c.norm() < AMPLITUDE_CUTOFF {
            continue;
        }
        let p = v.offset() + j;
        for k1 in 0..=p {
            let mag = (0.5 * ln_binomial(p, k1) - 0.5 * p as f64 * std::f64::consts::LN_2).exp();
            amps.insert((k1, p - k1), c * mag * i_pow(p - k1));
        }
    }
    TwoModeState { amps }
}

fn i_pow(e: usize) -> Complex64 {
    match e % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// L_E = 1 − Tr ρ_B² from the explicit two-mode state.
pub fn linear_entropy_potential(v: &FockVector) -> f64 {
    let rho = beamsplitter_output(v).reduced_b();
    let purity: f64 = rho.iter().map(|c| c.norm_sqr()).sum();
    1.0 - purity
}

/// L_E from the closed quadruple sum over amplitudes C_m on |m + k⟩:
///
/// 1 − Σ_{m,m',r} C_m C̄_{m'} C_r C̄_{m+r−m'} Σ_{k₁} √[C(m+k,k₁) C(m'+k,k₁)
/// C(r+k, r−m'+k₁) C(m+r−m'+k, r−m'+k₁)] (1/2)^{m+r+2k},
///
/// with binomials outside their range taken as zero. Here k is the offset of `v`.
pub fn linear_entropy_closed_form(v: &FockVector) -> f64 {
    let k = v.offset();
    let c = v.amps();
    let len = c.len();
    let top = len + k;
    let lnb: Vec<Vec<f64>> = (0..=top).map(|p| (0..=p).map(|j| ln_binomial(p, j)).collect()).collect();
    let lnb_at = |p: usize, j: i64| -> Option<f64> {
        if j < 0 || j as usize > p {
            None
        } else {
            Some(lnb[p][j as usize])
        }
    };
    let ln_half = -std::f64::consts::LN_2;
    let mut purity = 0.0;
    for m in 0..len {
        if c[m].norm() < AMPLITUDE_CUTOFF {
            continue;
        }
        for mp in 0..len {
            let cmm = c[m] * c[mp].conj();
            if cmm.norm() < AMPLITUDE_CUTOFF {
                continue;
            }
            for r in 0..len {
                let Some(s) = (m + r).checked_sub(mp) else { continue };
                if s >= len {
                    continue;
                }
                let amp = cmm * c[r] * c[s].conj();
                if amp.norm() < AMPLITUDE_CUTOFF * AMPLITUDE_CUTOFF {
                    continue;
                }
                let mut inner = 0.0;
                for k1 in 0..=(m + k) {
                    let j2 = r as i64 - mp as i64 + k1 as i64;
                    let terms = [
                        lnb_at(m + k, k1 as i64),
                        lnb_at(mp + k, k1 as i64),
                        lnb_at(r + k, j2),
                        lnb_at(s + k, j2),
                    ];
                    if terms.iter().any(Option::is_none) {
                        continue;
                    }
                    let ln: f64 = terms.iter().flatten().sum::<f64>() * 0.5;
                    inner += (ln + (m + r + 2 * k) as f64 * ln_half).exp();
                }
                purity += amp.re * inner;
            }
        }
    }
    1.0 - purity
}

/// N = 1/2 + ⟨a†a⟩ − |⟨a⟩|² for a pure state.
pub fn skew_info_measure(v: &FockVector) -> f64 {
    0.5 + v.mean_photon_number() - v.mean_a().norm_sqr()
}

/// Symmetrized quadrature covariance σ_uv = ⟨uv + vu⟩ − 2⟨u⟩⟨v⟩ with
/// q = (a + a†)/√2, p = (a − a†)/(i√2); the vacuum has σ = 𝟙.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    pub sqq: f64,
    pub spp: f64,
    pub sqp: f64,
}

impl CovarianceMatrix {
    pub fn det(&self) -> f64 {
        self.sqq * self.spp - self.sqp * self.sqp
    }
}

/// Covariance matrix from the moments ⟨a⟩, ⟨a²⟩, ⟨a†a⟩.
pub fn covariance_matrix(v: &FockVector) -> CovarianceMatrix {
    let a = v.mean_a();
    let a2 = v.mean_a2();
    let n = v.mean_photon_number();
    let sigma = CovarianceMatrix {
        sqq: 2.0 * a2.re + 2.0 * n + 1.0 - 4.0 * a.re * a.re,
        spp: -2.0 * a2.re + 2.0 * n + 1.0 - 4.0 * a.im * a.im,
        sqp: 2.0 * a2.im - 4.0 * a.re * a.im,
    };
    let printed = printed_covariance(v);
    let gap = (printed.sqq - sigma.sqq)
        .abs()
        .max((printed.spp - sigma.spp).abs())
        .max((printed.sqp - sigma.sqp).abs());
    if gap > 1e-10 {
        log::debug!("printed covariance sums differ from moments by {gap:.3e}: {printed:?} vs {sigma:?}");
    }
    sigma
}

/// The amplitude sums for σ as commonly printed for this family, transcribed
/// term by term with the trailing −1 outside the sum. Kept only for comparison
/// with [`covariance_matrix`].
pub fn printed_covariance(v: &FockVector) -> CovarianceMatrix {
    let k = v.offset() as f64;
    let c = v.amps();
    let at = |m: usize| c.get(m).copied().unwrap_or_default();
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut s2 = 0.0;
    let mut s3_plus = 0.0;
    let mut s3_minus = 0.0;
    let mut s4 = 0.0;
    for m in 0..c.len() {
        let mf = m as f64;
        s1 += at(m + 2) * at(m).conj() * ((mf + k + 1.0) * (mf + k + 2.0)).sqrt();
        s2 += 2.0 * at(m).norm_sqr() * (mf + k) * (mf + k - 1.0);
        let z = at(m + 1) * at(m).conj();
        s3_plus += (z + z.conj()).powi(2).re * (mf + k + 1.0);
        s3_minus += (z - z.conj()).powi(2).re * (mf + k + 1.0);
        let w = at(m + 1).powi(2) * at(m).conj().powi(2);
        s4 += w.im * (mf + k + 1.0);
    }
    CovarianceMatrix {
        sqq: s1.re + s2 - 1.0 + s3_plus,
        spp: s1.re - s2 + 1.0 - s3_minus,
        sqp: s1.im - s4,
    }
}

/// h(z) = ((z+1)/2) log₂((z+1)/2) − ((z−1)/2) log₂((z−1)/2), with z clamped
/// to at least 1 and h(1) = 0.
pub fn entropy_function(z: f64) -> f64 {
    let z = z.max(1.0);
    let plus = 0.5 * (z + 1.0);
    let minus = 0.5 * (z - 1.0);
    let xlog = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
    xlog(plus) - xlog(minus)
}

/// δ = h(√det σ) for a pure state.
pub fn rel_entropy_non_gaussianity(v: &FockVector) -> Result<f64> {
    let det = covariance_matrix(v).det();
    if det < 1.0 - 1e-6 {
        return Err(Error::UnphysicalCovariance { det });
    }
    Ok(entropy_function(det.sqrt()))
}

/// Wigner logarithmic negativity together with its numerical pedigree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WlnEstimate {
    /// 𝒲, set to 0 when the raw value does not exceed `error`.
    pub value: f64,
    /// log₂(1 + 2 V₋) before flooring.
    pub raw: f64,
    /// Propagated quadrature error of `raw`.
    pub error: f64,
    /// V₋ = ∫ max(−W, 0).
    pub negative_volume: f64,
    pub converged: bool,
}

/// 𝒲 = log₂ ∫|W| over the disk of `spec`.
///
/// For a normalized W, ∫|W| = 1 + 2V₋ where V₋ is the negative volume; the
/// quadrature acts on V₋ only, so Wigner-positive states give exactly 0.
pub fn wigner_log_negativity(source: WignerSource<'_>, spec: &QuadratureSpec) -> WlnEstimate {
    wln_of(&WignerFunction::from(source), spec)
}

pub(crate) fn wln_of(w: &WignerFunction, spec: &QuadratureSpec) -> WlnEstimate {
    let res = integrate_wigner(w, spec, WignerPart::Negative);
    let neg = res.value.max(0.0);
    let raw = (1.0 + 2.0 * neg).log2();
    let error = if res.error_estimate.is_finite() {
        2.0 * res.error_estimate / (std::f64::consts::LN_2 * (1.0 + 2.0 * neg))
    } else {
        f64::INFINITY
    };
    WlnEstimate {
        value: if raw > error { raw } else { 0.0 },
        raw,
        error,
        negative_volume: neg,
        converged: res.converged,
    }
}

/// All four measures at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureReport {
    pub linear_entropy: f64,
    pub skew_info: f64,
    pub wln: f64,
    pub rel_entropy_ng: f64,
    pub quadrature_error: f64,
    pub converged: bool,
}

pub fn measure_report(params: &PadfsParams, spec: &QuadratureSpec) -> Result<MeasureReport> {
    let v = padfs_coefficients(params)?;
    let wln = wigner_log_negativity(WignerSource::Padfs(params), spec);
    Ok(MeasureReport {
        linear_entropy: linear_entropy_potential(&v),
        skew_info: skew_info_measure(&v),
        wln: wln.value,
        rel_entropy_ng: rel_entropy_non_gaussianity(&v)?,
        quadrature_error: wln.error,
        converged: wln.converged,
    })
}

/// One of the four quantifiers, by its column name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    LinearEntropy,
    SkewInfo,
    Wln,
    Delta,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::LinearEntropy, Measure::SkewInfo, Measure::Wln, Measure::Delta];

    pub fn name(self) -> &'static str {
        match self {
            Self::LinearEntropy => "LE",
            Self::SkewInfo => "N",
            Self::Wln => "WLN",
            Self::Delta => "delta",
        }
    }

    /// The measure at `params`. Only [`Measure::Wln`] uses `spec`.
    pub fn evaluate(self, params: &PadfsParams, spec: &QuadratureSpec) -> Result<f64> {
        if self == Self::Wln {
            return Ok(wigner_log_negativity(WignerSource::Padfs(params), spec).value);
        }
        let v = padfs_coefficients(params)?;
        match self {
            Self::LinearEntropy => Ok(linear_entropy_potential(&v)),
            Self::SkewInfo => Ok(skew_info_measure(&v)),
            _ => rel_entropy_non_gaussianity(&v),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| invalid(format!("unknown measure `{s}` (expected LE, N, WLN or delta)")))
    }
}

/// Real α in `bracket` where `measure` takes equal values for k = k_pair.0
/// and k = k_pair.1 at Fock parameter `n`, found by bisection to `tol`.
pub fn alpha_inversion(
    measure: Measure,
    n: usize,
    k_pair: (usize, usize),
    bracket: (f64, f64),
    tol: f64,
    quad: &QuadratureOptions,
) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi && lo >= 0.0 && hi.is_finite()) {
        return Err(invalid(format!("bad bracket [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(invalid("bisection tolerance must be positive"));
    }
    let diff = |a: f64| -> Result<f64> {
        let p1 = PadfsParams::new(a, n, k_pair.0)?;
        let p2 = PadfsParams::new(a, n, k_pair.1)?;
        let v1 = measure.evaluate(&p1, &quad.spec_for(WignerSource::Padfs(&p1))?)?;
        let v2 = measure.evaluate(&p2, &quad.spec_for(WignerSource::Padfs(&p2))?)?;
        Ok(v1 - v2)
    };
    let no_change = || Error::NoSignChange {
        what: format!("{measure}(k={}) - {measure}(k={})", k_pair.0, k_pair.1),
        lo: bracket.0,
        hi: bracket.1,
    };
    let f_lo = diff(lo)?;
    let f_hi = diff(hi)?;
    if f_lo == 0.0 && f_hi == 0.0 || f_lo * f_hi > 0.0 {
        return Err(no_change());
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = diff(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
