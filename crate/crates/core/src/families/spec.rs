use super::{corpus, ExponentialFamily, Family1D, Mixture, Normal, ProductFamily, Triangle, Uniform};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// JSON description of a family, tagged by `"type"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    Normal { mu: f64, sigma: f64 },
    Mixture { components: Vec<MixtureComponent> },
    Triangle { a: f64 },
    Uniform { lo: f64, hi: f64 },
    Expfam { theta: Vec<f64> },
    Product { factors: Vec<FamilySpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mu: f64,
    pub sigma: f64,
}

/// A one-dimensional family or an independent product of them.
#[derive(Debug, Clone)]
pub enum AnyFamily {
    One(Arc<dyn Family1D>),
    Product(ProductFamily),
}

impl AnyFamily {
    pub fn dim(&self) -> usize {
        match self {
            AnyFamily::One(_) => 1,
            AnyFamily::Product(p) => p.dim(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            AnyFamily::One(f) => f.name(),
            AnyFamily::Product(p) => p.name(),
        }
    }

    /// The one-dimensional factors (a single entry for a 1-D family).
    pub fn factors(&self) -> Vec<Arc<dyn Family1D>> {
        match self {
            AnyFamily::One(f) => vec![f.clone()],
            AnyFamily::Product(p) => p.factors.clone(),
        }
    }

    pub fn as_one(&self) -> Option<&Arc<dyn Family1D>> {
        match self {
            AnyFamily::One(f) => Some(f),
            AnyFamily::Product(_) => None,
        }
    }
}

impl FamilySpec {
    fn build_one(&self) -> Result<Arc<dyn Family1D>> {
        Ok(match self {
            FamilySpec::Normal { mu, sigma } => Arc::new(Normal::new(*mu, *sigma)?),
            FamilySpec::Mixture { components } => Arc::new(Mixture::new(
                components.iter().map(|c| c.weight).collect(),
                components.iter().map(|c| c.mu).collect(),
                components.iter().map(|c| c.sigma).collect(),
            )?),
            FamilySpec::Triangle { a } => Arc::new(Triangle::new(*a)?),
            FamilySpec::Uniform { lo, hi } => Arc::new(Uniform::new(*lo, *hi)?),
            FamilySpec::Expfam { theta } => Arc::new(ExponentialFamily::new(theta.clone())?),
            FamilySpec::Product { .. } => {
                return Err(Error::InvalidSpec("products cannot be nested".into()));
            }
        })
    }

    pub fn build(&self) -> Result<AnyFamily> {
        match self {
            FamilySpec::Product { factors } => {
                let fs = factors.iter().map(|f| f.build_one()).collect::<Result<Vec<_>>>()?;
                Ok(AnyFamily::Product(ProductFamily::new(fs)?))
            }
            other => Ok(AnyFamily::One(other.build_one()?)),
        }
    }
}

/// Resolve a family argument to its JSON description: `builtin:<name>`,
/// inline JSON, or a path to a JSON file.
pub fn parse_family_spec(arg: &str) -> Result<FamilySpec> {
    let arg = arg.trim();
    if let Some(name) = arg.strip_prefix("builtin:") {
        return corpus()
            .into_iter()
            .find(|e| e.name == name)
            .map(|e| e.spec)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown builtin family '{name}'")));
    }
    let text = if arg.starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| Error::InvalidSpec(format!("cannot read family file '{arg}': {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::InvalidSpec(format!("bad family JSON: {e}")))
}

/// Resolve and build a family argument. The label is the builtin name or
/// the family's own name.
pub fn parse_family(arg: &str) -> Result<(AnyFamily, String)> {
    let spec = parse_family_spec(arg)?;
    let fam = spec.build()?;
    let name = match arg.trim().strip_prefix("builtin:") {
        Some(b) => b.to_string(),
        None => fam.name(),
    };
    Ok((fam, name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inline_json() {
        let (f, _) = parse_family(r#"{"type":"uniform","lo":0,"hi":1}"#).unwrap();
        assert_eq!(f.dim(), 1);
        let (f, _) = parse_family(
            r#"{"type":"product","factors":[{"type":"normal","mu":0,"sigma":1},
               {"type":"mixture","components":[{"weight":0.5,"mu":-1,"sigma":1},{"weight":0.5,"mu":1,"sigma":1}]}]}"#,
        )
        .unwrap();
        assert_eq!(f.dim(), 2);
    }

    #[test]
    fn rejects_unknown_fields_and_types() {
        assert!(parse_family(r#"{"type":"uniform","lo":0,"hi":1,"extra":2}"#).is_err());
        assert!(parse_family(r#"{"type":"cauchy","x0":0}"#).is_err());
        assert!(parse_family(r#"{"type":"mixture","components":[{"weight":1,"mu":0,"sigma":1,"z":0}]}"#).is_err());
        assert!(parse_family(r#"{"type":"normal","mu":0,"sigma":-1}"#).is_err());
        assert!(parse_family("builtin:nope").is_err());
    }

    #[test]
    fn round_trips_through_json() {
        for e in corpus() {
            let text = serde_json::to_string(&e.spec).unwrap();
            let back: FamilySpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, e.spec);
        }
    }
}
