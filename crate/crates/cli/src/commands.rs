use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Result};
use padfs_core::measures::{linear_entropy_potential, rel_entropy_non_gaussianity, skew_info_measure};
use padfs_core::{
    alpha_inversion, evolved_padfs, padfs_coefficients, wigner_grid, wigner_log_negativity, wln_decay_curve,
    Measure, PadfsParams, QuadratureOptions, Window, WignerGrid, WignerSource,
};
use rayon::prelude::*;

use crate::args::{Common, DecayArgs, InversionArgs, MeasuresArgs, ParametricArgs, WignerArgs};
use crate::csv::{num, Table};
use crate::sweep::List;

/// A finished table and whether every quadrature met its tolerance.
#[derive(Debug)]
pub struct Outcome {
    pub table: Table,
    pub converged: bool,
}

fn header(table: &mut Table, command: &str, settings: Vec<(String, String)>, common: &Common) {
    table.comment(format!("padfs {} {command}", padfs_core::VERSION));
    for (k, v) in settings.into_iter().chain(common.settings()) {
        table.comment(format!("{k}={v}"));
    }
}

fn quad_options(common: &Common) -> QuadratureOptions {
    QuadratureOptions {
        radius: common.quad_radius,
        refinement_levels: common.quad_levels,
        rel_tolerance: common.quad_tol,
    }
}

fn params(alpha: f64, n: usize, k: usize, common: &Common) -> Result<PadfsParams> {
    Ok(PadfsParams::new(alpha, n, k)?.with_tail_tolerance(common.tail_tol)?)
}

/// Values of the requested measures at one point, in request order, plus the
/// WLN error and convergence flag when WLN is requested.
struct PointValues {
    values: Vec<f64>,
    wln_err: Option<f64>,
    converged: bool,
}

fn evaluate(p: &PadfsParams, which: &[Measure], quad: &QuadratureOptions) -> Result<PointValues> {
    let v = padfs_coefficients(p)?;
    let mut out = PointValues {
        values: Vec::with_capacity(which.len()),
        wln_err: None,
        converged: true,
    };
    for m in which {
        let value = match m {
            Measure::LinearEntropy => linear_entropy_potential(&v),
            Measure::SkewInfo => skew_info_measure(&v),
            Measure::Delta => rel_entropy_non_gaussianity(&v)?,
            Measure::Wln => {
                let est = wigner_log_negativity(WignerSource::Padfs(p), &quad.spec_for(WignerSource::Padfs(p))?);
                out.wln_err = Some(est.error);
                out.converged = est.converged;
                est.value
            }
        };
        out.values.push(value);
    }
    Ok(out)
}

pub fn measures(args: &MeasuresArgs) -> Result<Outcome> {
    let mut which: Vec<Measure> = Vec::new();
    for m in &args.measures.0 {
        if !which.contains(m) {
            which.push(*m);
        }
    }
    let mut cols = vec!["alpha".to_string(), "n".into(), "k".into()];
    for m in &which {
        cols.push(m.name().into());
        if *m == Measure::Wln {
            cols.push("WLN_err".into());
        }
    }
    let mut table = Table::new(cols);
    header(
        &mut table,
        "measures",
        vec![
            ("alpha".into(), args.alpha.to_string()),
            ("n".into(), args.n.to_string()),
            ("k".into(), args.k.to_string()),
            ("measures".into(), List(which.clone()).to_string()),
        ],
        &args.common,
    );
    let quad = quad_options(&args.common);
    let mut points = Vec::new();
    for &n in &args.n.0 {
        for &k in &args.k.0 {
            for a in args.alpha.values() {
                points.push((a, n, k));
            }
        }
    }
    let rows: Vec<Result<(Vec<String>, bool)>> = points
        .par_iter()
        .map(|&(a, n, k)| {
            let p = params(a, n, k, &args.common)?;
            let pv = evaluate(&p, &which, &quad)?;
            let mut row = vec![num(a), n.to_string(), k.to_string()];
            for (m, v) in which.iter().zip(&pv.values) {
                row.push(num(*v));
                if *m == Measure::Wln {
                    row.push(num(pv.wln_err.unwrap_or(0.0)));
                }
            }
            Ok((row, pv.converged))
        })
        .collect();
    let mut converged = true;
    for r in rows {
        let (row, ok) = r?;
        converged &= ok;
        table.push(row);
    }
    Ok(Outcome { table, converged })
}

pub fn wigner(args: &WignerArgs) -> Result<Outcome> {
    let p = params(args.alpha, args.n, args.k, &args.common)?;
    let window = Window::square(args.extent);
    let grid: WignerGrid = match args.kappa_t {
        None => wigner_grid(WignerSource::Padfs(&p), window, args.resolution)?,
        Some(kt) => {
            let rho = evolved_padfs(&p, padfs_core::LossParams::new(kt)?)?;
            wigner_grid(WignerSource::Density(&rho), window, args.resolution)?
        }
    };
    let mut table = Table::new(["x", "y", "w"]);
    header(
        &mut table,
        "wigner",
        vec![
            ("alpha".into(), args.alpha.to_string()),
            ("n".into(), args.n.to_string()),
            ("k".into(), args.k.to_string()),
            ("extent".into(), args.extent.to_string()),
            ("resolution".into(), args.resolution.to_string()),
        ],
        &args.common,
    );
    if let Some(kt) = args.kappa_t {
        table.comment(format!("kappa_t={kt}"));
    }
    for (ix, &x) in grid.x_axis.iter().enumerate() {
        for (iy, &y) in grid.y_axis.iter().enumerate() {
            table.push(vec![num(x), num(y), num(grid.value(ix, iy))]);
        }
    }
    Ok(Outcome { table, converged: true })
}

pub fn inversion(args: &InversionArgs) -> Result<Outcome> {
    let pair = args.pair()?;
    let bracket = args.bracket()?;
    let quad = quad_options(&args.common);
    let alpha = alpha_inversion(args.measure, args.n, pair, bracket, args.tol, &quad)?;
    let mut table = Table::new(["measure", "n", "k1", "k2", "alpha_inversion"]);
    header(
        &mut table,
        "inversion",
        vec![
            ("measure".into(), args.measure.to_string()),
            ("n".into(), args.n.to_string()),
            ("k-pair".into(), args.k_pair.to_string()),
            ("bracket".into(), args.bracket.clone()),
            ("tol".into(), args.tol.to_string()),
        ],
        &args.common,
    );
    table.push(vec![
        args.measure.to_string(),
        args.n.to_string(),
        pair.0.to_string(),
        pair.1.to_string(),
        num(alpha),
    ]);
    Ok(Outcome { table, converged: true })
}

/// A state family for the parametric sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Padfs { n: usize, k: usize },
    Pacs { k: usize },
    Fock { m: usize },
}

impl Family {
    /// Label for the CSV column; contains no commas.
    pub fn label(&self) -> String {
        match self {
            Self::Padfs { n, k } => format!("padfs-n{n}-k{k}"),
            Self::Pacs { k } => format!("pacs-k{k}"),
            Self::Fock { m } => format!("fock-{m}"),
        }
    }

    fn triple(&self, alpha: f64) -> (f64, usize, usize) {
        match *self {
            Self::Padfs { n, k } => (alpha, n, k),
            Self::Pacs { k } => (alpha, 0, k),
            Self::Fock { m } => (0.0, m, 0),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Padfs { n, k } => write!(f, "padfs:{n},{k}"),
            Self::Pacs { k } => write!(f, "pacs:{k}"),
            Self::Fock { m } => write!(f, "fock:{m}"),
        }
    }
}

impl FromStr for Family {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<usize> = rest
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| anyhow::anyhow!("bad numbers in family `{s}`"))?;
        match (name.to_ascii_lowercase().as_str(), nums.as_slice()) {
            ("padfs", &[n, k]) => Ok(Self::Padfs { n, k }),
            ("pacs", &[k]) => Ok(Self::Pacs { k }),
            ("fock", &[m]) => Ok(Self::Fock { m }),
            _ => bail!("unknown family `{s}` (expected padfs:N,K, pacs:K or fock:M)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyList(pub Vec<Family>);

impl FromStr for FamilyList {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = s
            .split(';')
            .filter(|t| !t.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Family>>>()?;
        if v.is_empty() {
            bail!("at least one family is required");
        }
        Ok(Self(v))
    }
}

impl fmt::Display for FamilyList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(";"))
    }
}

pub fn parametric(args: &ParametricArgs) -> Result<Outcome> {
    let mut table = Table::new(["family", "alpha", "WLN", "LE", "N", "delta"]);
    header(
        &mut table,
        "parametric",
        vec![
            ("families".into(), args.families.to_string()),
            ("alpha".into(), args.alpha.to_string()),
        ],
        &args.common,
    );
    let alphas = args.alpha.values();
    let quad = quad_options(&args.common);
    let mut points = Vec::new();
    if !alphas.is_empty() {
        for fam in &args.families.0 {
            match fam {
                Family::Fock { .. } => points.push((*fam, 0.0)),
                _ => points.extend(alphas.iter().map(|&a| (*fam, a))),
            }
        }
    }
    let which = [Measure::Wln, Measure::LinearEntropy, Measure::SkewInfo, Measure::Delta];
    let rows: Vec<Result<(Vec<String>, bool)>> = points
        .par_iter()
        .map(|&(fam, a)| {
            let (alpha, n, k) = fam.triple(a);
            let p = params(alpha, n, k, &args.common)?;
            let pv = evaluate(&p, &which, &quad)?;
            let mut row = vec![fam.label(), num(alpha)];
            row.extend(pv.values.iter().map(|&v| num(v)));
            Ok((row, pv.converged))
        })
        .collect();
    let mut converged = true;
    for r in rows {
        let (row, ok) = r?;
        converged &= ok;
        table.push(row);
    }
    Ok(Outcome { table, converged })
}

pub fn decay(args: &DecayArgs) -> Result<Outcome> {
    let curves: Vec<(usize, usize)> = args
        .n
        .0
        .iter()
        .flat_map(|&n| args.k.0.iter().map(move |&k| (n, k)))
        .collect();
    let single = curves.len() == 1;
    let mut table = if single {
        Table::new(["kappa_t", "WLN", "WLN_err"])
    } else {
        Table::new(["alpha", "n", "k", "kappa_t", "WLN", "WLN_err"])
    };
    header(
        &mut table,
        "decay",
        vec![
            ("alpha".into(), args.alpha.to_string()),
            ("n".into(), args.n.to_string()),
            ("k".into(), args.k.to_string()),
            ("kappa-t".into(), args.kappa_t.to_string()),
        ],
        &args.common,
    );
    let grid = args.kappa_t.values();
    let quad = quad_options(&args.common);
    let results: Vec<Result<Vec<padfs_core::DecayPoint>>> = curves
        .par_iter()
        .map(|&(n, k)| {
            let p = params(args.alpha, n, k, &args.common)?;
            Ok(wln_decay_curve(&p, &grid, &quad.spec_for(WignerSource::Padfs(&p))?)?)
        })
        .collect();
    let mut converged = true;
    for (&(n, k), curve) in curves.iter().zip(results) {
        for d in curve? {
            converged &= d.converged;
            let mut row = if single {
                Vec::new()
            } else {
                vec![num(args.alpha), n.to_string(), k.to_string()]
            };
            row.extend([num(d.kappa_t), num(d.wln), num(d.wln_err)]);
            table.push(row);
        }
    }
    Ok(Outcome { table, converged })
}
