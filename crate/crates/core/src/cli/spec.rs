//! Domain spec files: JSON with a top-level `schema_version` and a `kind`.
//!
//! ```json
//! {"schema_version": 1, "kind": "simple", "breakpoints": [0, 1], "incidence": [[true]]}
//! {"schema_version": 1, "kind": "graph", "b": 1, "upper": "min(x, 1 - x)", "lower": {"xs": [0, 1], "ts": [0, 0]}}
//! {"schema_version": 1, "kind": "conformal", "base": {...}, "f": "1 + 0.3*sin(pi*x)"}
//! ```
//!
//! Graph boundaries are polylines or expressions in `x`; expressions are
//! sampled at `samples` equally spaced points. The conformal factor is an
//! expression in `t, x` or a sampled grid.

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::geometry::{
    validate_domain, ConformalDomain, ConformalFactor, Domain, FlatDomain, GraphDomain, Polyline, SampledField,
    SimpleDomain, ValidatedDomain,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
const DEFAULT_BOUNDARY_SAMPLES: usize = 65;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpecFile {
    pub schema_version: u32,
    #[serde(flatten)]
    pub domain: DomainSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Simple(SimpleDomain),
    Graph(GraphSpec),
    Conformal(ConformalSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlatSpec {
    Simple(SimpleDomain),
    Graph(GraphSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub b: f64,
    pub upper: BoundarySpec,
    pub lower: BoundarySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundarySpec {
    Polyline(Polyline),
    Expression(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalSpec {
    pub base: FlatSpec,
    pub f: FactorSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorSpec {
    Expression(String),
    Grid(SampledField),
}

impl BoundarySpec {
    fn polyline(&self, b: f64, samples: usize) -> Result<Polyline> {
        match self {
            BoundarySpec::Polyline(p) => Ok(p.clone()),
            BoundarySpec::Expression(src) => {
                let e = Expression::parse(src)?;
                if samples < 2 {
                    return Err(Error::SchemaError("samples: need at least 2".into()));
                }
                let xs: Vec<f64> = (0..samples).map(|i| b * i as f64 / (samples - 1) as f64).collect();
                let mut ts = xs.iter().map(|&x| e.eval(0.0, x)).collect::<Result<Vec<f64>>>()?;
                // rounding in e.g. sin(pi * x) must not fail the endpoint check
                for i in [0, samples - 1] {
                    if ts[i].abs() < 1e-12 * b.max(1.0) {
                        ts[i] = 0.0;
                    }
                }
                Ok(Polyline::new(xs, ts))
            }
        }
    }
}

impl GraphSpec {
    pub fn graph(&self) -> Result<GraphDomain> {
        let s = self.samples.unwrap_or(DEFAULT_BOUNDARY_SAMPLES);
        Ok(GraphDomain::new(self.b, self.upper.polyline(self.b, s)?, self.lower.polyline(self.b, s)?))
    }
}

impl FlatSpec {
    fn flat(&self) -> Result<FlatDomain> {
        Ok(match self {
            FlatSpec::Simple(s) => FlatDomain::Simple(s.clone()),
            FlatSpec::Graph(g) => FlatDomain::Graph(g.graph()?),
        })
    }
}

impl DomainSpecFile {
    pub fn new(domain: DomainSpec) -> DomainSpecFile {
        DomainSpecFile { schema_version: SCHEMA_VERSION, domain }
    }

    pub fn kind(&self) -> &'static str {
        match self.domain {
            DomainSpec::Simple(_) => "simple",
            DomainSpec::Graph(_) => "graph",
            DomainSpec::Conformal(_) => "conformal",
        }
    }

    /// The described domain, without validation.
    pub fn to_domain(&self) -> Result<Domain> {
        Ok(match &self.domain {
            DomainSpec::Simple(s) => Domain::Simple(s.clone()),
            DomainSpec::Graph(g) => Domain::Graph(g.graph()?),
            DomainSpec::Conformal(c) => {
                let factor = match &c.f {
                    FactorSpec::Expression(src) => ConformalFactor::expression(src)?,
                    FactorSpec::Grid(g) => ConformalFactor::Grid(g.clone()),
                };
                Domain::Conformal(ConformalDomain { base: c.base.flat()?, factor })
            }
        })
    }

    pub fn validated(&self) -> Result<ValidatedDomain> {
        validate_domain(self.to_domain()?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialises")
    }
}

/// Byte offset of a 1-based line/column pair.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// Parse and validate a spec file. JSON syntax errors carry the location;
/// missing or mistyped fields are schema errors.
pub fn parse_domain_spec(text: &str) -> Result<DomainSpecFile> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::SyntaxError {
        position: byte_offset(text, e.line(), e.column()),
        message: format!("line {} column {}: {e}", e.line(), e.column()),
    })?;
    match value.get("schema_version") {
        None => return Err(Error::SchemaError("missing field `schema_version`".into())),
        Some(v) if v.as_u64() != Some(SCHEMA_VERSION as u64) => {
            return Err(Error::SchemaError(format!("schema_version: expected {SCHEMA_VERSION}, got {v}")))
        }
        _ => {}
    }
    let spec: DomainSpecFile = serde_json::from_value(value).map_err(|e| Error::SchemaError(e.to_string()))?;
    spec.validated()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_simple_spec() {
        let s = parse_domain_spec(r#"{"schema_version": 1, "kind": "simple", "breakpoints": [0, 1], "incidence": [[true]]}"#)
            .unwrap();
        assert_eq!(s.validated().unwrap(), ValidatedDomain::diamond(1.0));
    }

    #[test]
    fn steep_graph_is_rejected() {
        let text = r#"{"schema_version": 1, "kind": "graph", "b": 1,
            "upper": {"xs": [0, 0.4, 1], "ts": [0, 0.6, 0]}, "lower": {"xs": [0, 1], "ts": [0, 0]}}"#;
        assert!(matches!(parse_domain_spec(text), Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn expression_boundaries_and_factor() {
        let text = r#"{"schema_version": 1, "kind": "conformal",
            "base": {"kind": "graph", "b": 1, "upper": "min(x, 1 - x)", "lower": "0", "samples": 3},
            "f": "1 + 0.3*sin(3.141592653589793*x)*exp(-t^2)"}"#;
        let s = parse_domain_spec(text).unwrap();
        let d = s.validated().unwrap();
        let FlatDomain::Graph(g) = d.base() else { panic!("graph base expected") };
        assert_eq!(g.upper, GraphDomain::triangle(1.0).upper);
        assert_eq!(g.lower.ts, vec![0.0; 3]);
        let f = d.f(crate::geometry::Point::new(0.0, 0.5));
        assert!((f - 1.3).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_locations() {
        match parse_domain_spec("{\"schema_version\": 1,\n  \"kind\": }") {
            Err(Error::SyntaxError { position, message }) => {
                assert_eq!(position, 32);
                assert!(message.starts_with("line 2 column 11"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_domain_spec(r#"{"kind": "simple"}"#), Err(Error::SchemaError(_))));
        let no_incidence = r#"{"schema_version": 1, "kind": "simple", "breakpoints": [0, 1]}"#;
        assert!(matches!(parse_domain_spec(no_incidence), Err(Error::SchemaError(m)) if m.contains("incidence")));
    }

    #[test]
    fn print_parse_round_trip() {
        let s = DomainSpecFile::new(DomainSpec::Graph(GraphSpec {
            b: 2.0,
            upper: BoundarySpec::Expression("min(x, 2 - x)".into()),
            lower: BoundarySpec::Polyline(Polyline::zero(2.0)),
            samples: Some(5),
        }));
        assert_eq!(parse_domain_spec(&s.to_json()).unwrap(), s);
    }
}
