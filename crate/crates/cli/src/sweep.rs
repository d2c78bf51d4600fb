//! Parameter ranges and lists as written on the command line.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

/// `START:STOP:STEP`, a single value, or the empty string for no points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    empty: bool,
}

impl Range {
    pub fn single(v: f64) -> Self {
        Self {
            start: v,
            stop: v,
            step: 1.0,
            empty: false,
        }
    }

    /// start + i·step up to stop, snapped to 12 decimals so that 0.1-type
    /// steps print as expected.
    pub fn values(&self) -> Vec<f64> {
        if self.empty {
            return Vec::new();
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| snap(self.start + i as f64 * self.step))
            .collect()
    }
}

fn snap(v: f64) -> f64 {
    let s = (v * 1e12).round() / 1e12;
    if s == 0.0 {
        0.0
    } else {
        s
    }
}

impl FromStr for Range {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self {
                start: 0.0,
                stop: 0.0,
                step: 1.0,
                empty: true,
            });
        }
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| -> Result<f64> {
            let v: f64 = t.trim().parse().with_context(|| format!("`{t}` is not a number"))?;
            if !v.is_finite() {
                bail!("`{t}` is not finite");
            }
            Ok(v)
        };
        match parts.as_slice() {
            [v] => Ok(Self::single(num(v)?)),
            [a, b, c] => {
                let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
                if step <= 0.0 {
                    bail!("range step must be positive, got {step}");
                }
                if stop < start {
                    bail!("range stop {stop} is below start {start}");
                }
                Ok(Self {
                    start,
                    stop,
                    step,
                    empty: false,
                })
            }
            _ => bail!("expected START:STOP:STEP or a single value, got `{s}`"),
        }
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            Ok(())
        } else if self.start == self.stop {
            write!(f, "{}", self.start)
        } else {
            write!(f, "{}:{}:{}", self.start, self.stop, self.step)
        }
    }
}

/// Comma-separated non-empty list.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: fmt::Display,
{
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let items = s
            .split(',')
            .map(|t| t.trim().parse::<T>().map_err(|e| anyhow::anyhow!("`{}`: {e}", t.trim())))
            .collect::<Result<Vec<T>>>()?;
        if items.is_empty() {
            bail!("list must not be empty");
        }
        Ok(Self(items))
    }
}

impl<T: fmt::Display> fmt::Display for List<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let r: Range = "0:2:0.05".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 41);
        assert_eq!(v[3], 0.15);
        assert_eq!(*v.last().unwrap(), 2.0);
        assert_eq!("0.5".parse::<Range>().unwrap().values(), vec![0.5]);
        assert!("".parse::<Range>().unwrap().values().is_empty());
        assert_eq!("0.5:2:0.1".parse::<Range>().unwrap().values().len(), 16);
    }

    #[test]
    fn bad_ranges() {
        for s in ["1:0:0.1", "0:1:0", "0:1:-1", "a", "0:1", "0:nan:1"] {
            assert!(s.parse::<Range>().is_err(), "{s}");
        }
    }

    #[test]
    fn range_display_round_trips() {
        for s in ["0:2:0.05", "0.5", ""] {
            let r: Range = s.parse().unwrap();
            assert_eq!(r.to_string().parse::<Range>().unwrap(), r);
        }
    }

    #[test]
    fn lists() {
        let l: List<usize> = "1, 2,3".parse().unwrap();
        assert_eq!(l.0, vec![1, 2, 3]);
        assert_eq!(l.to_string(), "1,2,3");
        assert!("1,x".parse::<List<usize>>().is_err());
        assert!("-1".parse::<List<usize>>().is_err());
    }
}
