//! Demo parameter schemas, values and validation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Int(v) => Some(*v as f64),
            ParamValue::Float(v) => Some(*v),
            ParamValue::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl std::fmt::Display for ParamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Float(v) => write!(f, "{v}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum ParamKind {
    Int { min: i64, max: i64 },
    Float { min: f64, max: f64 },
    Enum { choices: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    pub default: ParamValue,
    /// False when the default is a local choice rather than a published value.
    pub canonical: bool,
    pub description: String,
}

impl ParamSpec {
    pub fn int(name: &str, min: i64, max: i64, default: i64, description: &str) -> Self {
        ParamSpec {
            name: name.into(),
            kind: ParamKind::Int { min, max },
            default: ParamValue::Int(default),
            canonical: true,
            description: description.into(),
        }
    }

    pub fn float(name: &str, min: f64, max: f64, default: f64, description: &str) -> Self {
        ParamSpec {
            name: name.into(),
            kind: ParamKind::Float { min, max },
            default: ParamValue::Float(default),
            canonical: true,
            description: description.into(),
        }
    }

    pub fn choice(name: &str, choices: &[&str], default: &str, description: &str) -> Self {
        ParamSpec {
            name: name.into(),
            kind: ParamKind::Enum { choices: choices.iter().map(|c| c.to_string()).collect() },
            default: ParamValue::Text(default.into()),
            canonical: true,
            description: description.into(),
        }
    }

    pub fn non_canonical(mut self) -> Self {
        self.canonical = false;
        self
    }

    /// Normalized copy of `v` if it satisfies this spec.
    pub fn check(&self, v: &ParamValue) -> Result<ParamValue> {
        let fail = |reason: String| Error::Schema { field: self.name.clone(), reason };
        match (&self.kind, v) {
            (ParamKind::Int { min, max }, ParamValue::Int(i)) => {
                if i < min || i > max {
                    return Err(fail(format!("{i} is outside [{min}, {max}]")));
                }
                Ok(ParamValue::Int(*i))
            }
            (ParamKind::Int { min, max }, ParamValue::Float(f)) if f.fract() == 0.0 && f.is_finite() => {
                self.check(&ParamValue::Int(*f as i64)).map_err(|_| fail(format!("{f} is outside [{min}, {max}]")))
            }
            (ParamKind::Float { min, max }, v @ (ParamValue::Int(_) | ParamValue::Float(_))) => {
                let f = v.as_f64().expect("numeric");
                if !f.is_finite() || f < *min || f > *max {
                    return Err(fail(format!("{f} is outside [{min}, {max}]")));
                }
                Ok(ParamValue::Float(f))
            }
            (ParamKind::Enum { choices }, ParamValue::Text(s)) => {
                if !choices.iter().any(|c| c == s) {
                    return Err(fail(format!("{s:?} is not one of {}", choices.join(", "))));
                }
                Ok(ParamValue::Text(s.clone()))
            }
            (kind, v) => Err(fail(format!("value {v} does not match {}", kind_name(kind)))),
        }
    }

    /// Parse a command-line value according to the kind.
    pub fn parse(&self, text: &str) -> Result<ParamValue> {
        let v = match self.kind {
            ParamKind::Int { .. } => ParamValue::Int(text.trim().parse().map_err(|_| Error::Schema {
                field: self.name.clone(),
                reason: format!("{text:?} is not an integer"),
            })?),
            ParamKind::Float { .. } => ParamValue::Float(text.trim().parse().map_err(|_| Error::Schema {
                field: self.name.clone(),
                reason: format!("{text:?} is not a number"),
            })?),
            ParamKind::Enum { .. } => ParamValue::Text(text.trim().to_string()),
        };
        self.check(&v)
    }
}

fn kind_name(k: &ParamKind) -> &'static str {
    match k {
        ParamKind::Int { .. } => "an integer",
        ParamKind::Float { .. } => "a number",
        ParamKind::Enum { .. } => "one of the listed choices",
    }
}

/// Parameters sorted by name; this is the canonical form used for hashing.
pub type ParamMap = BTreeMap<String, ParamValue>;

/// Fill defaults for missing entries and reject unknown names or bad values.
pub fn resolve_params(schema: &[ParamSpec], given: &ParamMap) -> Result<ParamMap> {
    if let Some(unknown) = given.keys().find(|k| !schema.iter().any(|s| &s.name == *k)) {
        return Err(Error::Schema { field: unknown.clone(), reason: "unknown parameter".into() });
    }
    schema
        .iter()
        .map(|s| {
            let v = given.get(&s.name).unwrap_or(&s.default);
            Ok((s.name.clone(), s.check(v)?))
        })
        .collect()
}

/// Typed access to a resolved map. Resolution guarantees presence and type.
pub(crate) struct Resolved<'a>(pub(crate) &'a ParamMap);

impl Resolved<'_> {
    pub(crate) fn f(&self, name: &str) -> f64 {
        self.0[name].as_f64().unwrap_or_else(|| panic!("{name} is numeric after resolution"))
    }

    pub(crate) fn i(&self, name: &str) -> i64 {
        match self.0[name] {
            ParamValue::Int(v) => v,
            _ => panic!("{name} is an integer after resolution"),
        }
    }

    pub(crate) fn u(&self, name: &str) -> usize {
        self.i(name).max(0) as usize
    }

    pub(crate) fn s(&self, name: &str) -> &str {
        self.0[name].as_str().unwrap_or_else(|| panic!("{name} is text after resolution"))
    }
}
