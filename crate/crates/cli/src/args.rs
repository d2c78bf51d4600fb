//! Command-line surface. Values may also come from a `key = value` file given
//! with `--config`; flags on the command line win.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use padfs_core::quadrature::QuadratureSpec;
use padfs_core::state::DEFAULT_TAIL_TOLERANCE;
use padfs_core::Measure;

use crate::commands::FamilyList;
use crate::sweep::{List, Range};

#[derive(Debug, Parser)]
#[command(name = "padfs", version, about = "Photon-added displaced Fock states: measures, Wigner data and loss")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure table over a grid of (alpha, n, k)
    #[command(args_override_self = true)]
    Measures(MeasuresArgs),
    /// Wigner function on a square grid, optionally after photon loss
    #[command(args_override_self = true)]
    Wigner(WignerArgs),
    /// Displacement where two photon-addition numbers give equal measure values
    #[command(args_override_self = true)]
    Inversion(InversionArgs),
    /// Measures of several state families along a displacement sweep
    #[command(args_override_self = true)]
    Parametric(ParametricArgs),
    /// Wigner logarithmic negativity versus loss time
    #[command(args_override_self = true)]
    Decay(DecayArgs),
}

pub const SUBCOMMANDS: [&str; 5] = ["measures", "wigner", "inversion", "parametric", "decay"];

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output file; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Integration radius; by default 5 + sqrt(2 (n + k + |alpha|^2)) around alpha
    #[arg(long)]
    pub quad_radius: Option<f64>,
    /// Relative tolerance between successive quadrature refinements
    #[arg(long, default_value_t = QuadratureSpec::DEFAULT_REL_TOLERANCE)]
    pub quad_tol: f64,
    /// Number of grid halvings after the 32x32 base grid
    #[arg(long, default_value_t = QuadratureSpec::DEFAULT_LEVELS)]
    pub quad_levels: u32,
    /// Truncation: stop once |amplitude|^2 falls below this fraction of the norm
    #[arg(long, default_value_t = DEFAULT_TAIL_TOLERANCE)]
    pub tail_tol: f64,
    /// File of `key = value` lines supplying any of the long options
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Common {
    pub fn settings(&self) -> Vec<(String, String)> {
        vec![
            ("quad-radius".into(), self.quad_radius.map_or("auto".into(), |r| r.to_string())),
            ("quad-tol".into(), format!("{:e}", self.quad_tol)),
            ("quad-levels".into(), self.quad_levels.to_string()),
            ("tail-tol".into(), format!("{:e}", self.tail_tol)),
        ]
    }
}

#[derive(Debug, Clone, Args)]
pub struct MeasuresArgs {
    /// Displacements as START:STOP:STEP or a single value
    #[arg(long, default_value = "0:2:0.05")]
    pub alpha: Range,
    /// Fock parameters, comma separated
    #[arg(long, default_value = "1")]
    pub n: List<usize>,
    /// Photon-addition numbers, comma separated
    #[arg(long, default_value = "1,2,3")]
    pub k: List<usize>,
    /// Any of LE, N, WLN, delta
    #[arg(long, default_value = "LE,N,WLN,delta")]
    pub measures: List<Measure>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct WignerArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Half width of the square window centred at the origin
    #[arg(long, default_value_t = 3.0)]
    pub extent: f64,
    /// Grid points per axis
    #[arg(long, default_value_t = 121)]
    pub resolution: usize,
    /// Rescaled loss time; the lossless state when omitted
    #[arg(long)]
    pub kappa_t: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct InversionArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// The two photon-addition numbers to compare, as K1,K2
    #[arg(long, default_value = "1,2")]
    pub k_pair: List<usize>,
    /// Search interval as LO:HI
    #[arg(long, default_value = "0.2:0.8")]
    pub bracket: String,
    #[arg(long, default_value = "LE")]
    pub measure: Measure,
    /// Bisection tolerance in alpha
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}

impl InversionArgs {
    pub fn bracket(&self) -> Result<(f64, f64)> {
        let parts: Vec<&str> = self.bracket.split(':').collect();
        let [lo, hi] = parts.as_slice() else {
            bail!("bracket must be LO:HI, got `{}`", self.bracket);
        };
        Ok((lo.trim().parse()?, hi.trim().parse()?))
    }

    pub fn pair(&self) -> Result<(usize, usize)> {
        match self.k_pair.0.as_slice() {
            &[a, b] => Ok((a, b)),
            _ => bail!("k-pair needs exactly two values, got `{}`", self.k_pair),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ParametricArgs {
    /// State families separated by `;`: padfs:N,K  pacs:K  fock:M
    #[arg(long, default_value = "padfs:1,1;pacs:1;fock:1;fock:2")]
    pub families: FamilyList,
    /// Displacements as START:STOP:STEP, a single value, or empty for none
    #[arg(long, default_value = "0:2:0.05")]
    pub alpha: Range,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct DecayArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value = "1")]
    pub n: List<usize>,
    #[arg(long, default_value = "1")]
    pub k: List<usize>,
    /// Loss times as START:STOP:STEP or a single value
    #[arg(long, default_value = "0:0.5:0.025")]
    pub kappa_t: Range,
    #[command(flatten)]
    pub common: Common,
}

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in config {}", path.display()))
}

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected key = value", i + 1);
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            bail!("line {}: empty key", i + 1);
        }
        if key == "config" {
            bail!("line {}: config files do not nest", i + 1);
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

/// Splices `--key=value` tokens from the config file right after the
/// subcommand name so later command-line flags override them.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else if a == "--config" {
            path = args.get(i + 1).map(PathBuf::from);
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let Some(pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(args);
    };
    let entries = read_config(&path)?;
    let mut out = args[..=pos].to_vec();
    out.extend(entries.into_iter().map(|(k, v)| format!("--{k}={v}")));
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}
