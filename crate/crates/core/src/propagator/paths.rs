use crate::error::{Error, Result};
use crate::mlf::MLKernelSpec;
use crate::symbols::TriangularSystem;
use std::fmt;

/// Strictly decreasing index sequence `k = i_0 > i_1 > … > i_p = j`
/// (zero-based; displayed one-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    indices: Vec<usize>,
}

impl Path {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::IndexOutOfRange(
                "a path needs at least one index".into(),
            ));
        }
        if indices.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::IndexOutOfRange(format!(
                "path {indices:?} is not strictly decreasing"
            )));
        }
        Ok(Path { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Start index `k`.
    pub fn top(&self) -> usize {
        self.indices[0]
    }

    /// End index `j`.
    pub fn bottom(&self) -> usize {
        *self.indices.last().unwrap()
    }

    /// Number of steps `p`.
    pub fn steps(&self) -> usize {
        self.indices.len() - 1
    }

    /// `(-1)^p`.
    pub fn sign(&self) -> i32 {
        if self.steps() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Off-diagonal entries `(i_{r-1}, i_r)` along the path.
    pub fn couplings(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.indices.windows(2).map(|w| (w[0], w[1]))
    }

    /// Indices `τ ≠ j` of the path in ascending order; each contributes a
    /// kernel factor.
    pub fn chain_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices[..self.indices.len() - 1].iter().rev().copied()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (n, i) in self.indices.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, ")")
    }
}

/// All strictly decreasing paths from `k` down to `j` (zero-based).
///
/// Each subset of the interior indices `{j+1, …, k-1}` gives one path; paths
/// are listed by ascending subset bitmask, bit `b` standing for index
/// `j + 1 + b`. There are `2^{k-j-1}` paths for `k > j` and one for `k = j`.
pub fn enumerate_paths(k: usize, j: usize) -> Result<Vec<Path>> {
    if j > k {
        return Err(Error::IndexOutOfRange(format!(
            "paths run downward; got k = {} < j = {}",
            k + 1,
            j + 1
        )));
    }
    if k == j {
        return Ok(vec![Path { indices: vec![k] }]);
    }
    let interior = k - j - 1;
    if interior >= 32 {
        return Err(Error::IndexOutOfRange(format!(
            "{interior} interior indices is too many to enumerate"
        )));
    }
    let paths = (0u64..1 << interior)
        .map(|mask| {
            let mut indices = vec![k];
            for b in (0..interior).rev() {
                if mask >> b & 1 == 1 {
                    indices.push(j + 1 + b);
                }
            }
            indices.push(j);
            Path { indices }
        })
        .collect();
    Ok(paths)
}

/// One signed summand of a propagator entry at a fixed frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorTerm {
    pub path: Path,
    /// `(-1)^p`.
    pub sign: i32,
    /// Off-diagonal entries whose product forms the coefficient (zero-based).
    pub factors: Vec<(usize, usize)>,
    /// `Π A_{i_{r-1} i_r}(ξ)`.
    pub coeff: f64,
    /// Kernels `t^{β_τ-1} E_{β_τ,β_τ}(-A_{ττ}(ξ) t^{β_τ})` for `τ ≠ j`, ascending in `τ`.
    pub chain: Vec<MLKernelSpec>,
    /// `(β_j, A_{jj}(ξ))`.
    pub head: MLKernelSpec,
}

impl PropagatorTerm {
    /// Sum of the orders in the chain plus the head order; the term behaves
    /// like `t^{order - 1}` (S′ head) or `t^{order - β_j}` (S head) near zero.
    pub fn total_order(&self) -> f64 {
        self.head.beta + self.chain.iter().map(|s| s.beta).sum::<f64>()
    }
}

/// `A_{jj}(ξ)` for every `j`; negative values (a non-elliptic diagonal) are
/// rejected.
pub(crate) fn diagonal_values(sys: &TriangularSystem, xi: &[f64]) -> Result<Vec<f64>> {
    (0..sys.m())
        .map(|j| {
            let v = sys.entry(j, j).unwrap().eval_unchecked(xi);
            if v >= 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidSystem(format!(
                    "A_{0}{0}(xi) = {v} at xi = {xi:?}; diagonal symbols must be nonnegative",
                    j + 1
                )))
            }
        })
        .collect()
}

/// Terms of entry `(k, j)` at frequency `ξ`; paths through a zero coupling
/// symbol are pruned. Empty above the diagonal.
pub fn propagator_terms(
    sys: &TriangularSystem,
    k: usize,
    j: usize,
    xi: &[f64],
) -> Result<Vec<PropagatorTerm>> {
    if k >= sys.m() || j >= sys.m() {
        return Err(Error::IndexOutOfRange(format!(
            "entry ({}, {}) in a system with m = {}",
            k + 1,
            j + 1,
            sys.m()
        )));
    }
    if xi.len() != sys.n() {
        return Err(Error::DimensionMismatch {
            expected: sys.n(),
            got: xi.len(),
        });
    }
    if k < j {
        return Ok(Vec::new());
    }
    let lambdas = diagonal_values(sys, xi)?;
    let betas = sys.betas();
    let spec = |i: usize| MLKernelSpec {
        beta: betas[i],
        lambda: lambdas[i],
    };
    let mut terms = Vec::new();
    'paths: for path in enumerate_paths(k, j)? {
        let mut coeff = 1.0;
        let mut factors = Vec::with_capacity(path.steps());
        for (a, b) in path.couplings() {
            let sym = sys.entry(a, b).unwrap();
            if sym.is_zero() {
                continue 'paths;
            }
            coeff *= sym.eval_unchecked(xi);
            factors.push((a, b));
        }
        terms.push(PropagatorTerm {
            sign: path.sign(),
            factors,
            coeff,
            chain: path.chain_indices().map(spec).collect(),
            head: spec(j),
            path,
        });
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shown(paths: &[Path]) -> Vec<String> {
        paths.iter().map(Path::to_string).collect()
    }

    #[test]
    fn path_enumeration_examples() {
        assert_eq!(shown(&enumerate_paths(2, 0).unwrap()), ["(3,1)", "(3,2,1)"]);
        assert_eq!(shown(&enumerate_paths(1, 1).unwrap()), ["(2)"]);
        assert_eq!(
            shown(&enumerate_paths(5, 2).unwrap()),
            ["(6,3)", "(6,4,3)", "(6,5,3)", "(6,5,4,3)"]
        );
        assert!(enumerate_paths(0, 1).is_err());
    }

    #[test]
    fn path_counts() {
        for k in 0..10 {
            for j in 0..=k {
                let n = enumerate_paths(k, j).unwrap().len();
                assert_eq!(n, if k == j { 1 } else { 1 << (k - j - 1) });
            }
        }
    }

    #[test]
    fn path_accessors() {
        let p = Path::new(vec![5, 4, 2]).unwrap();
        assert_eq!((p.top(), p.bottom(), p.steps(), p.sign()), (5, 2, 2, 1));
        assert_eq!(p.couplings().collect::<Vec<_>>(), [(5, 4), (4, 2)]);
        assert_eq!(p.chain_indices().collect::<Vec<_>>(), [4, 5]);
        assert!(Path::new(vec![2, 2]).is_err());
    }
}
