use super::{AnyFamily, FamilySpec, MixtureComponent};

/// A named built-in family.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub spec: FamilySpec,
    pub family: AnyFamily,
    /// Density and slope vanish at the boundary, so the fluctuation
    /// theorems apply.
    pub conforming: bool,
    /// Member of the four-family density/weight comparison set.
    pub comparison_set: bool,
}

fn normal(mu: f64, sigma: f64) -> FamilySpec {
    FamilySpec::Normal { mu, sigma }
}

fn mixture() -> FamilySpec {
    FamilySpec::Mixture {
        components: vec![
            MixtureComponent { weight: 0.45, mu: -2.0, sigma: 0.6 },
            MixtureComponent { weight: 0.55, mu: 1.5, sigma: 0.8 },
        ],
    }
}

fn entry(name: &'static str, spec: FamilySpec, conforming: bool, comparison_set: bool) -> CorpusEntry {
    let family = spec.build().expect("built-in family is valid");
    CorpusEntry { name, spec, family, conforming, comparison_set }
}

/// The built-in families.
pub fn corpus() -> Vec<CorpusEntry> {
    vec![
        entry("normal", normal(0.0, 1.0), true, true),
        entry("normal_shifted", normal(3.0, 0.5), true, false),
        entry("mixture", mixture(), true, true),
        entry("triangle", FamilySpec::Triangle { a: 1.0 }, false, true),
        entry("uniform", FamilySpec::Uniform { lo: 0.0, hi: 1.0 }, false, true),
        entry("expfam", FamilySpec::Expfam { theta: vec![0.3, -1.0, 0.0, 0.5] }, true, false),
        entry("product2", FamilySpec::Product { factors: vec![mixture(), FamilySpec::Uniform { lo: 0.0, hi: 1.0 }] }, false, false),
        entry("product3", FamilySpec::Product { factors: vec![normal(0.0, 1.0), mixture(), FamilySpec::Triangle { a: 1.0 }] }, false, false),
        entry("product_normal", FamilySpec::Product { factors: vec![normal(0.0, 1.0), normal(1.0, 2.0)] }, true, false),
    ]
}

/// Look up a built-in family by name.
pub fn builtin(name: &str) -> Option<AnyFamily> {
    corpus().into_iter().find(|e| e.name == name).map(|e| e.family)
}
