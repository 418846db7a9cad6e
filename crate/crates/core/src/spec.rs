//! Input files: function specs, polynomials and curves, told apart by their
//! `"type"` field.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::algebroid::{AlgebroidCurve, CurveJson};
use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::poly::{MultiPoly, PolyJson};

#[derive(Clone, Debug)]
pub enum Spec {
    Function(FunctionSpec),
    Poly(MultiPoly),
    Curve(AlgebroidCurve),
}

impl Spec {
    pub fn kind(&self) -> &'static str {
        match self {
            Spec::Function(_) => "function",
            Spec::Poly(_) => "poly",
            Spec::Curve(_) => "curve",
        }
    }
}

/// `{"type": "poly", "vars": [...], "expr": "..."}`
#[derive(Deserialize)]
struct PolyExpr {
    vars: Vec<String>,
    expr: String,
}

fn schema_at(e: &serde_json::Error) -> Error {
    Error::Schema { line: e.line(), column: e.column(), msg: e.to_string() }
}

fn typed<'a, T: Deserialize<'a>>(src: &'a str) -> Result<T> {
    serde_json::from_str(src).map_err(|e| schema_at(&e))
}

pub fn parse_spec_str(src: &str) -> Result<Spec> {
    let v: Value = serde_json::from_str(src).map_err(|e| schema_at(&e))?;
    if !v.is_object() {
        return Err(Error::Schema { line: 1, column: 1, msg: "expected a JSON object".into() });
    }
    let kind = v.get("type").and_then(Value::as_str);
    match kind {
        Some("poly") if v.get("expr").is_some() => {
            let j: PolyExpr = typed(src)?;
            Ok(Spec::Poly(MultiPoly::parse(&j.expr, &j.vars)?))
        }
        Some("poly") => {
            let j: PolyJson = typed(src)?;
            Ok(Spec::Poly(MultiPoly::from_json(&j)?))
        }
        Some("curve") | None if v.get("n").is_some() => {
            let j: CurveJson = typed(src)?;
            Ok(Spec::Curve(AlgebroidCurve::from_json(&j)?))
        }
        Some(_) => Ok(Spec::Function(FunctionSpec::from_json(&v)?)),
        None => Err(Error::Schema { line: 1, column: 1, msg: "missing string field `type`".into() }),
    }
}

pub fn parse_spec(path: &Path) -> Result<Spec> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
    parse_spec_str(&src)
}
