//! Instance documents: a domain, a correlation pair and optional group and
//! test-family descriptors.

use std::path::Path;

use realz::{CorrelationPair, Domain, Matrix, Scalar, TestFamily, TestFunction};
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

/// A JSON number or a literal string such as `"3/4"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Json(serde_json::Number),
    Text(String),
}

impl Number {
    pub fn parse<T: Scalar>(&self) -> Result<T, String> {
        let text = match self {
            Self::Json(n) => n.to_string(),
            Self::Text(s) => s.clone(),
        };
        T::parse_literal(&text).ok_or_else(|| format!("cannot parse number {text:?}"))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub domain: DomainSpec,
    pub correlations: CorrelationSpec,
    /// Torus side lengths of a translation group.
    #[serde(default)]
    pub group: Option<Vec<usize>>,
    #[serde(default)]
    pub test_families: Option<Vec<FamilySpec>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub distance: Option<Vec<Vec<f64>>>,
    /// Per-site caps; `null` marks a site bounded only by the total count or
    /// by exclusion.
    #[serde(default)]
    pub occupancy_cap: Option<Vec<Option<u32>>>,
    #[serde(default)]
    pub torus: Option<TorusSpec>,
    #[serde(default)]
    pub exclusion_diameter: Option<f64>,
    #[serde(default)]
    pub total_cap: Option<u32>,
    #[serde(default)]
    pub total_exact: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusSpec {
    pub dims: Vec<usize>,
    pub cap: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationSpec {
    pub rho1: Vec<Number>,
    pub rho2: Vec<Vec<Number>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Singletons,
    Pairs,
    Balls { radius: f64 },
    Custom { functions: Vec<CustomFunction> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomFunction {
    pub id: String,
    pub values: Vec<Number>,
}

impl FamilySpec {
    pub fn to_family<T: Scalar>(&self) -> Result<TestFamily<T>, String> {
        Ok(match self {
            Self::Singletons => TestFamily::Singletons,
            Self::Pairs => TestFamily::Pairs,
            Self::Balls { radius } => TestFamily::Balls { radius: *radius },
            Self::Custom { functions } => TestFamily::Custom(
                functions
                    .iter()
                    .map(|f| {
                        let values = f.values.iter().map(Number::parse).collect::<Result<_, _>>()?;
                        Ok(TestFunction { id: f.id.clone(), values })
                    })
                    .collect::<Result<_, String>>()?,
            ),
        })
    }

    /// Parses `singletons`, `pairs` or `balls:<radius>`.
    pub fn parse_flag(text: &str) -> Result<Self, String> {
        match text.trim().split_once(':') {
            None if text.trim() == "singletons" => Ok(Self::Singletons),
            None if text.trim() == "pairs" => Ok(Self::Pairs),
            Some(("balls", r)) => {
                let radius = r.parse::<f64>().map_err(|_| format!("bad ball radius {r:?}"))?;
                Ok(Self::Balls { radius })
            }
            _ => Err(format!("unknown test family {text:?}; expected singletons, pairs or balls:<radius>")),
        }
    }
}

pub fn load(path: &Path) -> Result<InstanceFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let instance: InstanceFile = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if instance.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "{}: unsupported schema_version {} (expected {SCHEMA_VERSION})",
            path.display(),
            instance.schema_version
        ));
    }
    Ok(instance)
}

impl InstanceFile {
    pub fn domain(&self, cap_override: Option<u32>) -> Result<Domain, String> {
        let spec = &self.domain;
        let domain = match (&spec.torus, &spec.occupancy_cap) {
            (Some(torus), None) => {
                if spec.distance.is_some()
                    || spec.labels.is_some()
                    || spec.total_cap.is_some()
                    || spec.total_exact.is_some()
                {
                    return Err("a torus domain takes only dims, cap and exclusion_diameter".into());
                }
                Domain::torus(&torus.dims, torus.cap, spec.exclusion_diameter)
            }
            (None, Some(caps)) => {
                let mut builder = Domain::builder(caps.clone());
                if let Some(labels) = &spec.labels {
                    builder = builder.labels(labels.clone());
                }
                if let Some(rows) = &spec.distance {
                    builder = builder.distance(Matrix::from_rows(rows.clone()).map_err(|e| e.to_string())?);
                }
                if let Some(d) = spec.exclusion_diameter {
                    builder = builder.exclusion_diameter(d);
                }
                if let Some(t) = spec.total_cap {
                    builder = builder.total_cap(t);
                }
                if let Some(t) = spec.total_exact {
                    builder = builder.total_exact(t);
                }
                builder.build()
            }
            (Some(_), Some(_)) => return Err("domain has both torus and occupancy_cap".into()),
            (None, None) => return Err("domain needs occupancy_cap or torus".into()),
        }
        .map_err(|e| e.to_string())?;
        match cap_override {
            Some(cap) => domain.with_uniform_cap(cap).map_err(|e| e.to_string()),
            None => Ok(domain),
        }
    }

    pub fn correlations<T: Scalar>(&self) -> Result<CorrelationPair<T>, String> {
        let rho1 = self.correlations.rho1.iter().map(Number::parse).collect::<Result<Vec<T>, _>>()?;
        let rows = self
            .correlations
            .rho2
            .iter()
            .map(|row| row.iter().map(Number::parse).collect::<Result<Vec<T>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let rho2 = Matrix::from_rows(rows).map_err(|e| e.to_string())?;
        CorrelationPair::new(rho1, rho2).map_err(|e| e.to_string())
    }
}
