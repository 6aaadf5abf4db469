//! JSON encoding of results. Floats are written as numbers, exact rationals
//! as strings (`"1/12"`), so reports round-trip through the instance
//! parser in either mode.

use realz::stationary::ReducedPairCorrelation;
use realz::{ConditionReport, ConditionVerdict, Distribution, Matrix, QuadraticPolynomial, RestrictedCubic, Scalar};
use serde_json::{json, Map, Value};

use crate::instance::{Number, SCHEMA_VERSION};

pub fn number<T: Scalar>(x: &T) -> Value {
    if T::EXACT {
        Value::String(x.to_string())
    } else {
        serde_json::Number::from_f64(x.to_f64_lossy()).map_or(Value::Null, Value::Number)
    }
}

pub fn vector<T: Scalar>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(number).collect())
}

pub fn matrix<T: Scalar>(m: &Matrix<T>) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vector(r)).collect())
}

pub fn polynomial<T: Scalar>(p: &QuadraticPolynomial<T>) -> Value {
    json!({ "f0": number(p.f0()), "f1": vector(p.f1()), "f2": matrix(p.f2()) })
}

pub fn cubic<T: Scalar>(c: &RestrictedCubic<T>) -> Value {
    let mut v = polynomial(&c.quadratic);
    v["f3"] = number(&c.f3);
    v
}

pub fn distribution<T: Scalar>(d: &Distribution<T>) -> Value {
    let atoms: Vec<Value> =
        d.atoms().iter().map(|(c, w)| json!({ "occupancy": c.occupancy(), "weight": number(w) })).collect();
    json!({ "atoms": atoms })
}

fn verdict<T: Scalar>(v: &ConditionVerdict<T>) -> Value {
    json!({
        "condition": v.condition.name(),
        "test_function": v.test_function_id,
        "lhs": number(&v.lhs),
        "rhs": number(&v.rhs),
        "margin": number(&v.margin),
        "passed": v.passed,
        "delegated": v.delegated,
    })
}

pub fn conditions<T: Scalar>(r: &ConditionReport<T>) -> Value {
    json!({
        "overall": r.overall,
        "worst": r.worst().map_or(Value::Null, verdict),
        "verdicts": r.verdicts.iter().map(verdict).collect::<Vec<_>>(),
    })
}

pub fn reduced<T: Scalar>(r: &ReducedPairCorrelation<T>) -> Value {
    let table: Vec<Value> =
        r.g2.iter().enumerate().map(|(k, g)| json!({ "displacement": r.displacement(k), "g2": number(g) })).collect();
    json!({ "dims": r.dims, "rho": number(&r.rho), "g2": table })
}

/// Reads a polynomial written by [`polynomial`], either bare or under the
/// `certificate` key of a report.
pub fn parse_polynomial<T: Scalar>(doc: &Value) -> Result<QuadraticPolynomial<T>, String> {
    let doc = doc.get("certificate").unwrap_or(doc);
    if doc.is_null() {
        return Err("report carries no certificate".into());
    }
    let parse = |v: &Value| -> Result<T, String> {
        serde_json::from_value::<Number>(v.clone()).map_err(|e| e.to_string())?.parse()
    };
    let field = |name: &str| doc.get(name).ok_or_else(|| format!("polynomial lacks {name}"));
    let f0 = parse(field("f0")?)?;
    let f1 = field("f1")?.as_array().ok_or("f1 must be an array")?.iter().map(parse).collect::<Result<Vec<T>, _>>()?;
    let rows = field("f2")?
        .as_array()
        .ok_or("f2 must be an array of rows")?
        .iter()
        .map(|row| row.as_array().ok_or("f2 rows must be arrays")?.iter().map(parse).collect::<Result<Vec<T>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let f2 = Matrix::from_rows(rows).map_err(|e| e.to_string())?;
    QuadraticPolynomial::new(f0, f1, f2).map_err(|e| e.to_string())
}

/// Report skeleton; command-specific fields are added by the caller.
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, instance: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("schema_version".into(), json!(SCHEMA_VERSION));
        fields.insert("command".into(), json!(command));
        fields.insert("instance".into(), json!(instance));
        Self { fields }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    pub fn error(&mut self, kind: &str, message: &str) {
        self.set("verdict", json!("error"));
        self.set("error", json!({ "kind": kind, "message": message }));
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.fields)
    }
}
