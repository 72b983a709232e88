//! Link functions `L: Z₊² → Z^d` that place input variables into matrix cells,
//! together with the regularity diagnostics that the moment limits depend on.
//!
//! All indices are 1-based, matching the usual statement of the patterns
//! (`i − j` for Toeplitz, `i + j` for Hankel).

mod poly;
mod regularity;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::word::Symbol;

pub use poly::PolyExpr;
pub use regularity::{
    delta, joint_injectivity, linear_admissible, pair_regularity, regularity_report, Admissibility,
    DeltaVerdict, Injectivity, RegularityReport,
};

/// The value of a link function at one cell.
pub type LinkValue = SmallVec<[i64; 2]>;

type CustomFn = dyn Fn(usize, usize) -> LinkValue + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

#[derive(Clone)]
pub enum LinkKind {
    /// `i − j`
    Toeplitz,
    /// `i + j`
    Hankel,
    /// `|i − j|`
    SymToeplitz,
    /// `a·i + b·j + e`
    Linear { a: i64, b: i64, e: i64 },
    /// `i` (row) or `j` (column)
    Projection(Axis),
    /// One polynomial per output coordinate.
    Poly { tag: String, coords: Vec<PolyExpr> },
    Custom { dim: usize, f: Arc<CustomFn> },
}

impl fmt::Debug for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkKind::Toeplitz => write!(f, "Toeplitz"),
            LinkKind::Hankel => write!(f, "Hankel"),
            LinkKind::SymToeplitz => write!(f, "SymToeplitz"),
            LinkKind::Linear { a, b, e } => write!(f, "Linear({a},{b},{e})"),
            LinkKind::Projection(axis) => write!(f, "Projection({axis:?})"),
            LinkKind::Poly { tag, .. } => write!(f, "Poly({tag})"),
            LinkKind::Custom { dim, .. } => write!(f, "Custom(dim={dim})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinkFunction {
    name: String,
    kind: LinkKind,
}

impl LinkFunction {
    pub fn toeplitz() -> Self {
        Self::named("toeplitz", LinkKind::Toeplitz)
    }

    pub fn hankel() -> Self {
        Self::named("hankel", LinkKind::Hankel)
    }

    pub fn sym_toeplitz() -> Self {
        Self::named("sym-toeplitz", LinkKind::SymToeplitz)
    }

    pub fn linear(a: i64, b: i64, e: i64) -> Self {
        Self::named(format!("linear:{a},{b},{e}"), LinkKind::Linear { a, b, e })
    }

    pub fn projection(axis: Axis) -> Self {
        let name = match axis {
            Axis::Row => "proj:i",
            Axis::Column => "proj:j",
        };
        Self::named(name, LinkKind::Projection(axis))
    }

    /// Parses `expr[,expr...]`, one polynomial per output coordinate.
    pub fn poly(exprs: &str) -> Result<Self> {
        let coords = exprs
            .split(',')
            .map(|e| PolyExpr::parse(e.trim()))
            .collect::<Result<Vec<_>>>()?;
        let tag: String = exprs.chars().filter(|c| !c.is_whitespace()).collect();
        Ok(Self::named(format!("poly:{tag}"), LinkKind::Poly { tag, coords }))
    }

    /// A link backed by an arbitrary Rust closure. `f` must return `dim` coordinates.
    pub fn custom<F>(name: impl Into<String>, dim: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> LinkValue + Send + Sync + 'static,
    {
        assert!(dim > 0, "link output dimension must be positive");
        Self::named(name, LinkKind::Custom { dim, f: Arc::new(f) })
    }

    fn named(name: impl Into<String>, kind: LinkKind) -> Self {
        LinkFunction { name: name.into(), kind }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &LinkKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            LinkKind::Poly { coords, .. } => coords.len(),
            LinkKind::Custom { dim, .. } => *dim,
            _ => 1,
        }
    }

    /// `L(i, j)` for 1-based `i, j`.
    pub fn eval(&self, i: usize, j: usize) -> LinkValue {
        debug_assert!(i >= 1 && j >= 1, "link indices are 1-based");
        let (x, y) = (i as i64, j as i64);
        match &self.kind {
            LinkKind::Toeplitz => smallvec![x - y],
            LinkKind::Hankel => smallvec![x + y],
            LinkKind::SymToeplitz => smallvec![(x - y).abs()],
            LinkKind::Linear { a, b, e } => smallvec![a * x + b * y + e],
            LinkKind::Projection(Axis::Row) => smallvec![x],
            LinkKind::Projection(Axis::Column) => smallvec![y],
            LinkKind::Poly { coords, .. } => coords.iter().map(|p| p.eval(x, y)).collect(),
            LinkKind::Custom { dim, f } => {
                let v = f(i, j);
                assert_eq!(v.len(), *dim, "custom link {} returned wrong dimension", self.name);
                v
            }
        }
    }

    /// `L^ε(i, j)`: `L(i, j)` for `ε = 1` and `L(j, i)` for `ε = *`.
    pub fn eval_eps(&self, eps: Symbol, i: usize, j: usize) -> LinkValue {
        match eps {
            Symbol::Plain => self.eval(i, j),
            Symbol::Star => self.eval(j, i),
        }
    }
}

impl fmt::Display for LinkFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for LinkFunction {
    type Err = Error;

    /// Accepts `toeplitz`, `hankel`, `sym-toeplitz`, `linear:a,b,e`, `proj:i`,
    /// `proj:j` and `poly:<expr>[,<expr>...]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "toeplitz" => return Ok(Self::toeplitz()),
            "hankel" => return Ok(Self::hankel()),
            "sym-toeplitz" => return Ok(Self::sym_toeplitz()),
            "proj:i" => return Ok(Self::projection(Axis::Row)),
            "proj:j" => return Ok(Self::projection(Axis::Column)),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("linear:") {
            let coeffs = rest
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::parse(format!("bad coefficient {c:?} in link {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return match coeffs[..] {
                [a, b, e] => Ok(Self::linear(a, b, e)),
                _ => Err(Error::parse(format!("linear link needs a,b,e; got {s:?}"))),
            };
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            return Self::poly(rest);
        }
        Err(Error::parse(format!("unknown link function {s:?}")))
    }
}
