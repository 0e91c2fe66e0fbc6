use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector `α = (α_1, …, α_n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        MultiIndex(components)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α| = Σ α_i`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// Real polynomial `Σ a_α ξ^α` in `n` variables; zero coefficients are never
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySymbol {
    dim: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl PolySymbol {
    /// Builds a symbol, summing repeated multi-indices and dropping zeros.
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (alpha, coeff) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: alpha.dim(),
                });
            }
            if !coeff.is_finite() {
                return Err(Error::domain(format!(
                    "coefficient {coeff} of {alpha} is not finite"
                )));
            }
            *map.entry(alpha).or_insert(0.0) += coeff;
        }
        map.retain(|_, c| *c != 0.0);
        Ok(PolySymbol { dim, terms: map })
    }

    pub fn zero(dim: usize) -> Self {
        PolySymbol {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// `c |ξ|^{2s} = c (ξ_1² + … + ξ_n²)^s` expanded into monomials.
    pub fn scaled_laplacian_power(dim: usize, s: u32, c: f64) -> Self {
        // multinomial expansion of (Σ ξ_i²)^s
        let mut acc: BTreeMap<MultiIndex, f64> = BTreeMap::new();
        acc.insert(MultiIndex(vec![0; dim]), c);
        for _ in 0..s {
            let mut next = BTreeMap::new();
            for (alpha, coeff) in &acc {
                for i in 0..dim {
                    let mut a = alpha.clone();
                    a.0[i] += 2;
                    *next.entry(a).or_insert(0.0) += coeff;
                }
            }
            acc = next;
        }
        PolySymbol { dim, terms: acc }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(a, c)| (a, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest `|α|` among stored terms; `0` for the zero symbol.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// Every stored term has `|α|` equal to the order.
    pub fn is_homogeneous(&self) -> bool {
        let l = self.order();
        self.terms.keys().all(|a| a.order() == l)
    }

    /// `A(ξ)`.
    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        if xi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: xi.len(),
            });
        }
        Ok(self.eval_unchecked(xi))
    }

    pub(crate) fn eval_unchecked(&self, xi: &[f64]) -> f64 {
        if self.terms.is_empty() {
            return 0.0;
        }
        // powers[i][e] = ξ_i^e, built once per call by repeated multiplication
        let max_deg = self
            .terms
            .keys()
            .flat_map(|a| a.0.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let powers: Vec<Vec<f64>> = xi
            .iter()
            .map(|&x| {
                let mut p = Vec::with_capacity(max_deg + 1);
                p.push(1.0);
                for e in 1..=max_deg {
                    p.push(p[e - 1] * x);
                }
                p
            })
            .collect();
        self.terms
            .iter()
            .map(|(alpha, c)| {
                alpha
                    .0
                    .iter()
                    .enumerate()
                    .fold(*c, |acc, (i, &e)| acc * powers[i][e as usize])
            })
            .sum()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (alpha, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &e) in alpha.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·ξ{}", i + 1)?,
                    _ => write!(f, "·ξ{}^{e}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}
