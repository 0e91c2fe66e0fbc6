use super::poly::{MultiIndex, PolySymbol};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Default cap on the number of equations; path counts grow like `2^{m-1}`.
pub const MAX_EQUATIONS: usize = 12;

/// Caputo orders `B = <β_1, …, β_m>`, each in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FracOrderVector(Vec<f64>);

impl FracOrderVector {
    pub fn new(betas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::InvalidSystem(
                "at least one order is required".into(),
            ));
        }
        for (j, &b) in betas.iter().enumerate() {
            if !(b > 0.0 && b <= 1.0) {
                return Err(Error::domain(format!(
                    "beta_{} = {b} is outside the allowed range (0,1]",
                    j + 1
                )));
            }
        }
        Ok(FracOrderVector(betas))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for FracOrderVector {
    type Output = f64;
    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

/// Lower-triangular `m×m` matrix of symbols `A_{ij}(ξ)` with orders `β_j`.
///
/// Indices in the Rust API are zero-based (`0 ≤ j ≤ i < m`); the JSON form
/// and all printed diagnostics are one-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularSystem {
    m: usize,
    n: usize,
    betas: FracOrderVector,
    // row-major packed lower triangle: (i, j) ↦ i(i+1)/2 + j
    entries: Vec<PolySymbol>,
    p_star: u32,
    q: Vec<u32>,
}

fn packed(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

impl TriangularSystem {
    /// Builds a system from `((i, j), A_ij)` pairs; unlisted lower entries are
    /// the zero symbol. Ellipticity and the order condition are not checked
    /// here (see [`super::validate_system`]).
    pub fn new(
        n: usize,
        betas: FracOrderVector,
        entries: impl IntoIterator<Item = ((usize, usize), PolySymbol)>,
    ) -> Result<Self> {
        Self::with_cap(n, betas, entries, MAX_EQUATIONS)
    }

    pub fn with_cap(
        n: usize,
        betas: FracOrderVector,
        entries: impl IntoIterator<Item = ((usize, usize), PolySymbol)>,
        max_equations: usize,
    ) -> Result<Self> {
        let m = betas.len();
        if m > max_equations {
            return Err(Error::InvalidSystem(format!(
                "m = {m} exceeds the cap of {max_equations} equations"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidSystem(
                "spatial dimension n must be positive".into(),
            ));
        }
        let mut slots: Vec<Option<PolySymbol>> = vec![None; m * (m + 1) / 2];
        for ((i, j), sym) in entries {
            if i >= m || j >= m {
                return Err(Error::Config(format!(
                    "entry ({}, {}) is outside a system with m = {m}",
                    i + 1,
                    j + 1
                )));
            }
            if i < j {
                return Err(Error::Config(format!(
                    "entry ({}, {}) lies above the diagonal; only i >= j is allowed",
                    i + 1,
                    j + 1
                )));
            }
            if sym.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: sym.dim(),
                });
            }
            let slot = &mut slots[packed(i, j)];
            if slot.is_some() {
                return Err(Error::Config(format!(
                    "entry ({}, {}) is listed twice",
                    i + 1,
                    j + 1
                )));
            }
            *slot = Some(sym);
        }
        let entries: Vec<PolySymbol> = slots
            .into_iter()
            .map(|s| s.unwrap_or_else(|| PolySymbol::zero(n)))
            .collect();
        let order = |i: usize, j: usize| entries[packed(i, j)].order();
        let p_star = (0..m).map(|j| order(j, j)).max().unwrap_or(0);
        let q = (0..m)
            .map(|j| (j..m).map(|i| order(i, j)).max().unwrap_or(0))
            .collect();
        Ok(TriangularSystem {
            m,
            n,
            betas,
            entries,
            p_star,
            q,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn betas(&self) -> &FracOrderVector {
        &self.betas
    }

    /// `A_{ij}`, or `None` above the diagonal or out of range.
    pub fn entry(&self, i: usize, j: usize) -> Option<&PolySymbol> {
        (j <= i && i < self.m).then(|| &self.entries[packed(i, j)])
    }

    /// `ℓ_{ij}` (zero above the diagonal and for absent couplings).
    pub fn order(&self, i: usize, j: usize) -> u32 {
        self.entry(i, j).map_or(0, PolySymbol::order)
    }

    /// `p* = max_j ℓ_{jj}`.
    pub fn p_star(&self) -> u32 {
        self.p_star
    }

    /// `q_j = max_{i ≥ j} ℓ_{ij}`.
    pub fn q(&self) -> &[u32] {
        &self.q
    }

    /// `A(ξ)` as a dense lower-triangular matrix.
    pub fn matrix(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        if xi.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: xi.len(),
            });
        }
        Ok(self.matrix_unchecked(xi))
    }

    pub(crate) fn matrix_unchecked(&self, xi: &[f64]) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.m, self.m);
        for i in 0..self.m {
            for j in 0..=i {
                a[(i, j)] = self.entries[packed(i, j)].eval_unchecked(xi);
            }
        }
        a
    }

    /// Parses the JSON system description (one-based indices).
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: SystemSpec = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        spec.build()
    }

    pub fn to_spec(&self) -> SystemSpec {
        let mut entries = Vec::new();
        for i in 0..self.m {
            for j in 0..=i {
                let sym = &self.entries[packed(i, j)];
                if sym.is_zero() {
                    continue;
                }
                entries.push(EntrySpec {
                    i: i + 1,
                    j: j + 1,
                    terms: sym
                        .terms()
                        .map(|(a, c)| TermSpec {
                            alpha: a.0.clone(),
                            coeff: c,
                        })
                        .collect(),
                });
            }
        }
        SystemSpec {
            m: self.m,
            n: self.n,
            betas: self.betas.as_slice().to_vec(),
            entries,
        }
    }
}

/// JSON shape of a system: `{ "m", "n", "betas", "entries": [{ "i", "j", "terms": [{ "alpha", "coeff" }] }] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub m: usize,
    pub n: usize,
    pub betas: Vec<f64>,
    #[serde(default)]
    pub entries: Vec<EntrySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub alpha: Vec<u32>,
    pub coeff: f64,
}

impl SystemSpec {
    /// Schema problems are [`Error::Config`]; orders outside `(0, 1]` are
    /// [`Error::Domain`].
    pub fn build(&self) -> Result<TriangularSystem> {
        if self.betas.len() != self.m {
            return Err(Error::Config(format!(
                "\"betas\" has {} values but m = {}",
                self.betas.len(),
                self.m
            )));
        }
        if self.m == 0 || self.n == 0 {
            return Err(Error::Config("m and n must be positive".into()));
        }
        let betas = FracOrderVector::new(self.betas.clone())?;
        let mut entries = Vec::with_capacity(self.entries.len());
        for (k, e) in self.entries.iter().enumerate() {
            if e.i == 0 || e.j == 0 {
                return Err(Error::Config(format!(
                    "entries[{k}]: indices are one-based"
                )));
            }
            if e.i < e.j {
                return Err(Error::Config(format!(
                    "entries[{k}]: entry ({}, {}) has i < j; the system must be lower triangular",
                    e.i, e.j
                )));
            }
            for (t, term) in e.terms.iter().enumerate() {
                if term.alpha.len() != self.n {
                    return Err(Error::Config(format!(
                        "entries[{k}].terms[{t}]: alpha has length {} but n = {}",
                        term.alpha.len(),
                        self.n
                    )));
                }
            }
            let sym = PolySymbol::new(
                self.n,
                e.terms
                    .iter()
                    .map(|t| (MultiIndex(t.alpha.clone()), t.coeff)),
            )
            .map_err(|err| Error::Config(format!("entries[{k}]: {err}")))?;
            entries.push(((e.i - 1, e.j - 1), sym));
        }
        TriangularSystem::new(self.n, betas, entries)
    }
}
