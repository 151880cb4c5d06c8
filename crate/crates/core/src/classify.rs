//! Unitarizable line-bundle parameters for `vinberg5`.
//!
//! `ξ(x, y, n, n') = x E3* + y A3* + (n/2)(2 W1* - E1*) + (n'/2)(2 W2* - E2*)`
//! in the dual basis of the twelve generators. Integrality of `n, n'` comes
//! from the `2π`-periodicity of the isotropy flows. Unitarizable iff
//! `x < 0, n > 0, n' > 0` or `x = 0, n ≥ 0, n' ≥ 0`. Up to equivalence of the
//! `B`-representations all `x < 0` parameters form one class; for `G` they are
//! further separated by `(n, n')`. Each `x = 0` parameter is its own class,
//! keyed by `(y, n, n')` at both levels.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{rat, rat_to_string, Gauss, Rat};
use crate::lie::LieAlgebra;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct XiParam {
    pub x: Rat,
    pub y: Rat,
    pub n: i64,
    pub np: i64,
}

impl XiParam {
    pub fn new(x: Rat, y: Rat, n: i64, np: i64) -> Self {
        XiParam { x, y, n, np }
    }

    /// The covector on the twelve generators.
    pub fn covector(&self, g: &LieAlgebra) -> Vec<Gauss> {
        let mut xi = vec![Gauss::zero(); g.dim()];
        let mut put = |label: &str, v: Rat| {
            let i = g.index_of(label).unwrap_or_else(|| panic!("missing generator {label}"));
            xi[i] = &xi[i] + &Gauss::real(v);
        };
        let half = rat(1, 2);
        put("E3", self.x.clone());
        put("A3", self.y.clone());
        put("W1", rat(self.n, 1));
        put("E1", -&half * rat(self.n, 1));
        put("W2", rat(self.np, 1));
        put("E2", -&half * rat(self.np, 1));
        xi
    }
}

impl fmt::Display for XiParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", rat_to_string(&self.x), rat_to_string(&self.y), self.n, self.np)
    }
}

pub fn is_unitarizable(xi: &XiParam) -> bool {
    let zero = rat(0, 1);
    (xi.x < zero && xi.n > 0 && xi.np > 0) || (xi.x == zero && xi.n >= 0 && xi.np >= 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    B,
    G,
}

/// Equivalence class of a unitarizable parameter at one level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartitionLabel {
    BMinus,
    GMinus { n: i64, np: i64 },
    Zero { level: Level, y: Rat, n: i64, np: i64 },
}

impl fmt::Display for PartitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionLabel::BMinus => write!(f, "B:minus"),
            PartitionLabel::GMinus { n, np } => write!(f, "G:minus(n={n},n'={np})"),
            PartitionLabel::Zero { level, y, n, np } => {
                let l = match level {
                    Level::B => "B",
                    Level::G => "G",
                };
                write!(f, "{l}:zero(y={},n={n},n'={np})", rat_to_string(y))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parameter {0} is not unitarizable")]
pub struct NotUnitarizable(pub String);

pub fn partition_label(xi: &XiParam, level: Level) -> Result<PartitionLabel, NotUnitarizable> {
    if !is_unitarizable(xi) {
        return Err(NotUnitarizable(xi.to_string()));
    }
    Ok(if xi.x < rat(0, 1) {
        match level {
            Level::B => PartitionLabel::BMinus,
            Level::G => PartitionLabel::GMinus { n: xi.n, np: xi.np },
        }
    } else {
        PartitionLabel::Zero { level, y: xi.y.clone(), n: xi.n, np: xi.np }
    })
}

/// One line of a classification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportItem {
    pub xi: (String, String, i64, i64),
    pub unitarizable: bool,
    #[serde(rename = "B_class")]
    pub b_class: Option<String>,
    #[serde(rename = "G_class")]
    pub g_class: Option<String>,
}

pub fn report_item(xi: &XiParam) -> ReportItem {
    let u = is_unitarizable(xi);
    ReportItem {
        xi: (rat_to_string(&xi.x), rat_to_string(&xi.y), xi.n, xi.np),
        unitarizable: u,
        b_class: u.then(|| partition_label(xi, Level::B).expect("unitarizable").to_string()),
        g_class: u.then(|| partition_label(xi, Level::G).expect("unitarizable").to_string()),
    }
}

/// Cartesian product, ordered by `x`, then `y`, `n`, `n'`.
pub fn grid(xs: &[Rat], ys: &[Rat], ns: &[i64], nps: &[i64]) -> Vec<XiParam> {
    let mut out = Vec::with_capacity(xs.len() * ys.len() * ns.len() * nps.len());
    for x in xs {
        for y in ys {
            for &n in ns {
                for &np in nps {
                    out.push(XiParam::new(x.clone(), y.clone(), n, np));
                }
            }
        }
    }
    out
}

/// The 10 × 10 × 10 × 10 grid used for the checked-in report.
pub fn default_grid() -> Vec<XiParam> {
    let xs: Vec<Rat> = [(-4, 1), (-3, 1), (-2, 1), (-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1), (2, 1), (3, 1)]
        .iter()
        .map(|&(p, q)| rat(p, q))
        .collect();
    let ys: Vec<Rat> = (-4..=5).map(|y| rat(y, 1)).collect();
    let ns: Vec<i64> = (-2..=7).collect();
    grid(&xs, &ys, &ns, &ns)
}

pub fn classify_batch(params: &[XiParam]) -> Vec<ReportItem> {
    params.par_iter().map(report_item).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi(x: i64, y: i64, n: i64, np: i64) -> XiParam {
        XiParam::new(rat(x, 1), rat(y, 1), n, np)
    }

    #[test]
    fn unitarizable_cases() {
        assert!(is_unitarizable(&xi(-1, 0, 1, 1)));
        assert!(is_unitarizable(&xi(0, 5, 0, 0)));
        assert!(!is_unitarizable(&xi(-1, 0, 0, 1)));
        assert!(!is_unitarizable(&xi(1, 0, 1, 1)));
    }

    #[test]
    fn label_strings() {
        assert_eq!(partition_label(&xi(-1, 0, 1, 1), Level::B).unwrap().to_string(), "B:minus");
        assert_eq!(partition_label(&xi(-1, 0, 1, 1), Level::G).unwrap().to_string(), "G:minus(n=1,n'=1)");
        assert_eq!(partition_label(&xi(0, 3, 0, 2), Level::G).unwrap().to_string(), "G:zero(y=3,n=0,n'=2)");
        assert!(partition_label(&xi(1, 0, 1, 1), Level::B).is_err());
    }
}
