use super::Family1D;
use crate::error::{Error, Result};
use std::sync::Arc;

/// Independent product `ρ(I⃗) = Π ρ_i(I^i)`.
#[derive(Debug, Clone)]
pub struct ProductFamily {
    pub factors: Vec<Arc<dyn Family1D>>,
}

impl ProductFamily {
    pub fn new(factors: Vec<Arc<dyn Family1D>>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::InvalidSpec("a product family needs at least two factors".into()));
        }
        Ok(Self { factors })
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn name(&self) -> String {
        let names: Vec<String> = self.factors.iter().map(|f| f.name()).collect();
        names.join(" x ")
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        self.factors.iter().zip(x).map(|(f, &xi)| f.log_density(xi)).sum()
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        self.log_density(x).exp()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.factors.iter().zip(x).all(|(f, &xi)| f.support().contains(xi))
    }

    /// `η_i = −∂_i log ρ`; only the `i`-th factor contributes.
    pub fn eta(&self, x: &[f64]) -> Vec<f64> {
        self.factors.iter().zip(x).map(|(f, &xi)| f.eta(xi)).collect()
    }

    /// Diagonal response matrix `χ_ij`.
    pub fn chi(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.factors[i].chi(x[i]);
        }
        m
    }
}
