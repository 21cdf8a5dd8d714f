//! Extension problems in the `mf-problem/1` JSON format.
//!
//! ```json
//! {
//!   "name": "unit_tail", "m": 1, "n": 2,
//!   "basis": [{"kind": "sqrt", "n": 2}, {"kind": "sqrt", "n": 3}],
//!   "y_values": [["1", "0"], ["0", "1"]],
//!   "x": [{"monomial": [1, 1], "tail": "y1"}]
//! }
//! ```
//!
//! Rows of `x` come in three kinds, in this order: valued rows (`monomial` with
//! optional `unit` and `tail`, or `poly`), identifications `{"ident": j}`
//! meaning `x_i = y_j`, and parameter rows `{"param": j, "monomial": g}` meaning
//! `x_i = unit · y^g · y_j`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::num::Q;
use crate::perron::TransformStep;
use crate::series::{parse_poly, Monomial, Poly, UnitExpr};
use crate::valuegroup::{is_rationally_independent, EmbeddingBasis, GenDescriptor, Value};

pub const PROBLEM_SCHEMA: &str = "mf-problem/1";

/// A polynomial given as text or as a term list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Text(String),
    Terms(Vec<TermSpec>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    #[serde(with = "crate::num::qstr")]
    pub c: Q,
    pub e: Vec<u32>,
}

impl PolySpec {
    pub fn to_poly(&self, nvars: usize) -> Result<Poly> {
        match self {
            PolySpec::Text(s) => parse_poly(s, nvars),
            PolySpec::Terms(ts) => {
                let mut p = Poly::zero(nvars);
                for t in ts {
                    if t.e.len() != nvars {
                        return Err(Error::DimensionMismatch {
                            expected: nvars,
                            found: t.e.len(),
                        });
                    }
                    p.add_term(Monomial(t.e.clone()), t.c.clone());
                }
                Ok(p)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomial: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<UnitExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<PolySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<PolySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ident: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<usize>,
}

/// One parsed row; `y` indices are 0-based here.
#[derive(Debug, Clone, PartialEq)]
pub enum XRow {
    /// `x = unit · f(y)`.
    Valued {
        unit: UnitExpr,
        f: Poly,
    },
    Ident {
        y: usize,
    },
    Param {
        y: usize,
        g: Vec<u32>,
        unit: UnitExpr,
    },
}

impl RawRow {
    pub fn parse(&self, n: usize) -> Result<XRow> {
        let unit = self.unit.clone().unwrap_or_default();
        let bad = |m: &str| Err(Error::Parse(format!("x row {self:?}: {m}")));
        match (self.ident, self.param, &self.monomial, &self.poly) {
            (Some(j), None, None, None) if self.tail.is_none() && self.unit.is_none() => {
                if j == 0 || j > n {
                    return bad("ident index out of range");
                }
                Ok(XRow::Ident { y: j - 1 })
            }
            (None, Some(j), g, None) if self.tail.is_none() => {
                if j == 0 || j > n {
                    return bad("param index out of range");
                }
                let g = g.clone().unwrap_or_else(|| vec![0; n]);
                if g.len() != n || g[j - 1] != 0 {
                    return bad("param monomial must have length n and avoid its own variable");
                }
                Ok(XRow::Param { y: j - 1, g, unit })
            }
            (None, None, Some(e), None) => {
                if e.len() != n {
                    return bad("monomial length must equal n");
                }
                let mono = Poly::term(Monomial(e.clone()), <Q as num_traits::One>::one());
                let f = match &self.tail {
                    None => mono,
                    Some(t) => mono.mul(&Poly::one(n).add(&t.to_poly(n)?)?)?,
                };
                Ok(XRow::Valued { unit, f })
            }
            (None, None, None, Some(p)) if self.tail.is_none() => Ok(XRow::Valued {
                unit,
                f: p.to_poly(n)?,
            }),
            _ => bad("expected exactly one of monomial, poly, ident, param"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeDecl {
    /// Generators of each level, highest level first.
    pub levels: Vec<Vec<GenDescriptor>>,
    /// For each valued `y`, its coordinates at every level.
    pub y_values: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Declared {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rbar: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sbar: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_u: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionProblem {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub basis: Vec<GenDescriptor>,
    #[serde(with = "crate::num::qmat")]
    pub y_values: Vec<Vec<Q>>,
    pub x: Vec<RawRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t_steps: Vec<TransformStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub composite: Option<CompositeDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared: Option<Declared>,
}

/// A problem after parsing and shape checks.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub m: usize,
    pub n: usize,
    pub rbar: usize,
    pub sbar: usize,
    /// Number of leading identifications `x_{r̄+j} = y_{s̄+j}`.
    pub l: usize,
    pub rows: Vec<XRow>,
    pub yvals: Vec<Value>,
    pub basis: Arc<EmbeddingBasis>,
}

impl ExtensionProblem {
    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        if let Some(schema) = &p.schema {
            if schema != PROBLEM_SCHEMA {
                return Err(Error::Parse(format!("unknown problem schema {schema:?}")));
            }
        }
        Ok(p)
    }

    /// Canonical JSON: sorted keys, no insignificant whitespace.
    pub fn canonical_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&serde_json::to_value(self)?)?)
    }

    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(
            self.canonical_json()?.as_bytes(),
        )))
    }

    /// Shape checks shared by the solver and the certifier.
    pub fn parse(&self) -> Result<Parsed> {
        let (m, n) = (self.m, self.n);
        if self.x.len() != m {
            return Err(Error::Inadmissible(format!(
                "m = {m} but {} x rows",
                self.x.len()
            )));
        }
        let basis = EmbeddingBasis::from_descriptors(&self.basis)?;
        let sbar = self.y_values.len();
        if sbar > n {
            return Err(Error::Inadmissible(format!(
                "{sbar} valued y's but n = {n}"
            )));
        }
        let yvals = self
            .y_values
            .iter()
            .map(|c| Value::new(basis.clone(), c.clone()))
            .collect::<Result<Vec<_>>>()?;
        for (i, v) in yvals.iter().enumerate() {
            if !v.is_positive()? {
                return Err(Error::Inadmissible(format!(
                    "value of y{} is not positive",
                    i + 1
                )));
            }
        }
        if !is_rationally_independent(&yvals)? {
            return Err(Error::Inadmissible(
                "y values are rationally dependent".into(),
            ));
        }
        if m == 0 && sbar != n {
            return Err(Error::Inadmissible(
                "with m = 0 every y must carry a value".into(),
            ));
        }
        let rows = self
            .x
            .iter()
            .map(|r| r.parse(n))
            .collect::<Result<Vec<_>>>()?;
        let rbar = rows
            .iter()
            .take_while(|r| matches!(r, XRow::Valued { .. }))
            .count();
        let l = rows[rbar..]
            .iter()
            .take_while(|r| matches!(r, XRow::Ident { .. }))
            .count();
        for (k, row) in rows.iter().enumerate() {
            match row {
                XRow::Valued { .. } if k >= rbar => {
                    return Err(Error::Inadmissible("valued rows must come first".into()));
                }
                XRow::Ident { y } => {
                    if k >= rbar + l || *y != sbar + (k - rbar) {
                        return Err(Error::Inadmissible(format!(
                            "row {} must identify x{} with y{}",
                            k + 1,
                            k + 1,
                            sbar + k - rbar + 1
                        )));
                    }
                }
                XRow::Param { y, g, .. } => {
                    if *y != sbar + (k - rbar) {
                        return Err(Error::Inadmissible(format!(
                            "parameter row {} must use y{}",
                            k + 1,
                            sbar + k - rbar + 1
                        )));
                    }
                    if g[sbar..].iter().any(|&e| e != 0) {
                        return Err(Error::Inadmissible(
                            "parameter monomials may only involve valued y's".into(),
                        ));
                    }
                }
                _ => {}
            }
        }
        if rbar > sbar {
            return Err(Error::Inadmissible(format!(
                "r̄ = {rbar} exceeds s̄ = {sbar}"
            )));
        }
        if sbar + (m - rbar) > n {
            return Err(Error::Inadmissible(
                "not enough y variables for the tail rows".into(),
            ));
        }
        if let Some(c) = &self.composite {
            if c.levels.len() > 1 {
                return Err(Error::Inadmissible(
                    "composite values with more than one level cannot be solved".into(),
                ));
            }
        }
        Ok(Parsed {
            m,
            n,
            rbar,
            sbar,
            l,
            rows,
            yvals,
            basis,
        })
    }
}

impl XRow {
    /// The row as a polynomial in the `y` variables (units kept symbolic).
    pub fn to_sym(&self, n: usize) -> Result<Poly<crate::series::SymCoeff>> {
        Ok(match self {
            XRow::Valued { unit, f } => f.to_sym().scale(&unit.to_sym()),
            XRow::Ident { y } => Poly::var(n, *y),
            XRow::Param { y, g, unit } => {
                let mut e = g.clone();
                e[*y] += 1;
                Poly::term(Monomial(e), unit.to_sym())
            }
        })
    }
}
