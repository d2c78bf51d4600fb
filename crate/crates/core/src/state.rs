//! Photon-added displaced Fock states a†^k D(α)|n⟩ and their limiting cases,
//! as truncated Fock-basis amplitude vectors and density matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::special::{binomial, laguerre_general, log_factorial};

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-14;

/// Hard cap on the truncation search.
const MAX_EXTRA_TERMS: usize = 100_000;

/// The defining triple (α, n, k) of a PADFS plus the truncation control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PadfsParams {
    alpha: Complex64,
    n: usize,
    k: usize,
    tail_tolerance: f64,
}

impl PadfsParams {
    pub fn new(alpha: impl Into<Complex64>, n: usize, k: usize) -> Result<Self> {
        let alpha = alpha.into();
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(invalid("displacement must be finite"));
        }
        Ok(Self {
            alpha,
            n,
            k,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        })
    }

    pub fn with_tail_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol <= 1e-6) {
            return Err(invalid(format!("tail tolerance must lie in (0, 1e-6], got {tol}")));
        }
        self.tail_tolerance = tol;
        Ok(self)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    /// k + n + |α|², the rough photon content used to size phase-space windows.
    pub fn photon_budget(&self) -> f64 {
        (self.k + self.n) as f64 + self.alpha.norm_sqr()
    }

    /// ‖a†^k D(α)|n⟩‖², i.e. 1/|N|².
    ///
    /// a†^k D(α) = D(α)(a† + ᾱ)^k, so the norm is a finite sum
    /// Σ_j C(k,j)² |α|^{2(k-j)} (n+j)!/n!.
    pub fn unnormalized_norm_sqr(&self) -> f64 {
        let x = self.alpha.norm_sqr();
        (0..=self.k)
            .map(|j| {
                let pow = if self.k == j { 1.0 } else { x.powi((self.k - j) as i32) };
                let c = binomial(self.k as i64, j as i64);
                c * c * pow * (log_factorial(self.n + j) - log_factorial(self.n)).exp()
            })
            .sum()
    }

    /// ⟨a†a⟩ from the norm closed form, ‖a†^{k+1}D|n⟩‖² / ‖a†^k D|n⟩‖² − 1.
    pub fn mean_photon_number(&self) -> f64 {
        let up = Self { k: self.k + 1, ..*self };
        up.unnormalized_norm_sqr() / self.unnormalized_norm_sqr() - 1.0
    }

    /// Amplitude ⟨m+k|a†^k D(α)|n⟩ (no normalization), computed in log-magnitude form.
    ///
    /// For m < n the negative-superscript Laguerre identity is applied so only
    /// non-negative powers of α appear.
    pub fn raw_amplitude(&self, m: usize) -> Complex64 {
        let n = self.n;
        let x = self.alpha.norm_sqr();
        if x == 0.0 {
            return if m == n {
                Complex64::new((0.5 * (log_factorial(m + self.k) - log_factorial(n))).exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        let ln_abs = 0.5 * x.ln();
        let theta = self.alpha.arg();
        if m >= n {
            let d = m - n;
            let log_mag = 0.5 * (log_factorial(n) + log_factorial(m + self.k)) - log_factorial(m)
                + d as f64 * ln_abs
                - 0.5 * x;
            let lag = laguerre_general(n, d as i64, x);
            Complex64::from_polar(log_mag.exp() * lag, d as f64 * theta)
        } else {
            // α^{-j} L_n^{-j}(x) = (-ᾱ)^j (n-j)!/n! L_{n-j}^j(x), j = n - m
            let j = n - m;
            let log_mag = 0.5 * (log_factorial(m + self.k) - log_factorial(n)) + j as f64 * ln_abs - 0.5 * x;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let lag = laguerre_general(m, j as i64, x);
            Complex64::from_polar(sign * log_mag.exp() * lag, -(j as f64) * theta)
        }
    }
}

/// Truncated pure state: `amps[j]` is ⟨offset + j|ψ⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    offset: usize,
    amps: Vec<Complex64>,
}

impl FockVector {
    pub fn new(offset: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(invalid("a Fock vector needs at least one amplitude"));
        }
        Ok(Self { offset, amps })
    }

    pub fn fock(n: usize) -> Self {
        Self {
            offset: n,
            amps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Highest retained photon number.
    pub fn truncation(&self) -> usize {
        self.offset + self.amps.len() - 1
    }

    /// Smallest dense dimension holding every retained amplitude.
    pub fn dense_dim(&self) -> usize {
        self.truncation() + 1
    }

    /// ⟨p|ψ⟩, zero outside the retained range.
    pub fn amplitude(&self, p: usize) -> Complex64 {
        if p < self.offset {
            return Complex64::new(0.0, 0.0);
        }
        self.amps.get(p - self.offset).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Self {
        let norm = self.norm_sqr().sqrt();
        for c in &mut self.amps {
            *c /= norm;
        }
        self
    }

    pub fn with_global_phase(mut self, phi: f64) -> Self {
        let ph = Complex64::from_polar(1.0, phi);
        for c in &mut self.amps {
            *c *= ph;
        }
        self
    }

    pub(crate) fn photons(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.amps.iter().enumerate().map(move |(j, &c)| (self.offset + j, c))
    }

    /// ⟨a†a⟩
    pub fn mean_photon_number(&self) -> f64 {
        self.photons().map(|(p, c)| p as f64 * c.norm_sqr()).sum()
    }

    /// ⟨a⟩
    pub fn mean_a(&self) -> Complex64 {
        self.photons()
            .filter(|&(p, _)| p > 0)
            .map(|(p, c)| self.amplitude(p - 1).conj() * c * (p as f64).sqrt())
            .sum()
    }

    /// ⟨a²⟩
    pub fn mean_a2(&self) -> Complex64 {
        self.photons()
            .filter(|&(p, _)| p > 1)
            .map(|(p, c)| self.amplitude(p - 2).conj() * c * ((p * (p - 1)) as f64).sqrt())
            .sum()
    }
}

/// Normalized PADFS amplitudes.
///
/// The vector starts at photon number k (n + k when α = 0) and extends from
/// M₀ = k + n + ⌈|α|² + 10|α| + 30⌉ until the next amplitude's squared
/// modulus drops below the tail tolerance.
pub fn padfs_coefficients(params: &PadfsParams) -> Result<FockVector> {
    let (n, k) = (params.n, params.k);
    if params.alpha.norm_sqr() == 0.0 {
        return Ok(FockVector::fock(n + k));
    }
    let a = params.alpha.norm();
    let m0 = n + (a * a + 10.0 * a + 30.0).ceil() as usize;
    let mut amps = Vec::with_capacity(m0 + 8);
    let mut norm_sqr = 0.0;
    let mut m = 0;
    loop {
        let c = params.raw_amplitude(m);
        norm_sqr += c.norm_sqr();
        amps.push(c);
        if m >= m0 && c.norm_sqr() < params.tail_tolerance * norm_sqr {
            break;
        }
        m += 1;
        if m > m0 + MAX_EXTRA_TERMS {
            return Err(invalid(format!(
                "amplitude tail of {params:?} does not fall below tolerance"
            )));
        }
    }
    Ok(FockVector::new(k, amps)?.normalized())
}

/// Named members of the PADFS family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitingState {
    Vacuum,
    Fock(usize),
    Coherent(Complex64),
    /// Displaced Fock state D(α)|n⟩.
    Dfs(Complex64, usize),
    /// Photon-added coherent state a†^k|α⟩.
    Pacs(Complex64, usize),
}

impl LimitingState {
    pub fn params(&self) -> Result<PadfsParams> {
        match *self {
            Self::Vacuum => PadfsParams::new(0.0, 0, 0),
            Self::Fock(n) => PadfsParams::new(0.0, n, 0),
            Self::Coherent(a) => PadfsParams::new(a, 0, 0),
            Self::Dfs(a, n) => PadfsParams::new(a, n, 0),
            Self::Pacs(a, k) => PadfsParams::new(a, 0, k),
        }
    }
}

impl fmt::Display for LimitingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Vacuum => write!(f, "vacuum"),
            Self::Fock(n) => write!(f, "fock:{n}"),
            Self::Coherent(a) => write!(f, "coherent:{}", a.re),
            Self::Dfs(a, n) => write!(f, "dfs:{},{n}", a.re),
            Self::Pacs(a, k) => write!(f, "pacs:{},{k}", a.re),
        }
    }
}

/// Parses `vacuum`, `fock:N`, `coherent:A`, `dfs:A,N` and `pacs:A,K` (real A).
impl FromStr for LimitingState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.split_once(':') {
            Some((name, args)) => (name, args.split(',').map(str::trim).collect::<Vec<_>>()),
            None => (s, Vec::new()),
        };
        let bad = || Error::UnknownFamily(s.to_string());
        let real = |v: &str| v.parse::<f64>().map_err(|_| bad());
        let int = |v: &str| v.parse::<usize>().map_err(|_| bad());
        match (name.to_ascii_lowercase().as_str(), args.as_slice()) {
            ("vacuum", []) => Ok(Self::Vacuum),
            ("fock", [n]) => Ok(Self::Fock(int(n)?)),
            ("coherent", [a]) => Ok(Self::Coherent(real(a)?.into())),
            ("dfs", [a, n]) => Ok(Self::Dfs(real(a)?.into(), int(n)?)),
            ("pacs", [a, k]) => Ok(Self::Pacs(real(a)?.into(), int(k)?)),
            _ => Err(bad()),
        }
    }
}

/// Amplitude vector of a named limiting case; Fock and vacuum are exact unit vectors.
pub fn limiting_state(state: &LimitingState) -> Result<FockVector> {
    match *state {
        LimitingState::Vacuum => Ok(FockVector::fock(0)),
        LimitingState::Fock(n) => Ok(FockVector::fock(n)),
        _ => padfs_coefficients(&state.params()?),
    }
}

/// Fock-basis density matrix on |0⟩ … |dim-1⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    elements: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(elements: DMatrix<Complex64>) -> Result<Self> {
        if elements.nrows() != elements.ncols() || elements.nrows() == 0 {
            return Err(invalid("density matrix must be square and non-empty"));
        }
        Ok(Self { elements })
    }

    /// Diagonal mixture Σ p_j |j⟩⟨j|.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let d = populations.len();
        let mut m = DMatrix::zeros(d, d);
        for (j, &p) in populations.iter().enumerate() {
            m[(j, j)] = Complex64::new(p, 0.0);
        }
        Self::from_matrix(m)
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &DMatrix<Complex64> {
        &self.elements
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.elements[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.elements.diagonal().iter().map(|c| c.re).sum()
    }

    pub fn purity(&self) -> f64 {
        self.elements.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.elements.diagonal().iter().map(|c| c.re).collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.populations().iter().enumerate().map(|(j, p)| j as f64 * p).sum()
    }

    /// ⟨a⟩ = Σ_p √p ρ_{p, p-1}
    pub fn mean_a(&self) -> Complex64 {
        (1..self.dim())
            .map(|p| self.elements[(p, p - 1)] * (p as f64).sqrt())
            .sum()
    }

    /// max |ρ - ρ†|
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.elements[(i, j)] - self.elements[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.elements + self.elements.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Last index whose population exceeds `threshold`, plus one.
    ///
    /// For a positive matrix every element outside this block is bounded by
    /// √threshold times its row or column population.
    pub fn support_dim(&self, threshold: f64) -> usize {
        (0..self.dim())
            .rev()
            .find(|&j| self.elements[(j, j)].re > threshold)
            .map_or(1, |j| j + 1)
    }

    /// Checks Hermiticity (1e-12), unit trace (1e-10) and positivity (-1e-10).
    pub fn validate(&self) -> Result<()> {
        let h = self.hermiticity_error();
        if h > 1e-12 {
            return Err(invalid(format!("density matrix is not Hermitian (error {h:e})")));
        }
        let t = self.trace();
        if (t - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("density matrix trace is {t}")));
        }
        let min = self.eigenvalues()[0];
        if min < -1e-10 {
            return Err(invalid(format!("density matrix has eigenvalue {min:e}")));
        }
        Ok(())
    }
}

/// |ψ⟩⟨ψ| embedded in a `dim`-dimensional Fock basis.
pub fn to_density_matrix(v: &FockVector, dim: usize) -> Result<DensityMatrix> {
    if dim < v.dense_dim() {
        return Err(Error::DimensionTooSmall {
            dim,
            required: v.dense_dim(),
        });
    }
    let mut m = DMatrix::zeros(dim, dim);
    for (p, cp) in v.photons() {
        for (q, cq) in v.photons() {
            m[(p, q)] = cp * cq.conj();
        }
    }
    DensityMatrix::from_matrix(m)
}
