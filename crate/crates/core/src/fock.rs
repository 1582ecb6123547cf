//! Symmetric Fock basis of `N` bosons in three modes.
//!
//! Basis order is lexicographic descending on `(n0, n1)`: `(N,0,0)` is
//! index 0 and `(0,0,N)` is the last index. With `m = n1 + n2` the rank is
//! `m(m+1)/2 + n2`, which does not depend on `N`.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

/// Occupations of the three modes (sites `a, b, c` or quasi-momentum modes
/// `α, β, γ`, depending on the representation of the enclosing state).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState(pub [usize; 3]);

impl FockState {
    pub const fn new(n0: usize, n1: usize, n2: usize) -> Self {
        FockState([n0, n1, n2])
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// All `n` particles in `mode`.
    pub fn extremal(n: usize, mode: usize) -> Self {
        let mut occ = [0; 3];
        occ[mode] = n;
        FockState(occ)
    }

    /// `Σ_k n_k (n_k − 1)`, the pair count entering the on-site interaction.
    pub fn pair_count(&self) -> usize {
        self.0.iter().map(|&n| n * n.saturating_sub(1)).sum()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{},{}>", self.0[0], self.0[1], self.0[2])
    }
}

#[inline]
const fn triangular(m: usize) -> usize {
    m * (m + 1) / 2
}

/// `(N+1)(N+2)/2`.
pub const fn dimension(n: usize) -> usize {
    triangular(n + 1)
}

/// Enumerated basis for a fixed particle number.
#[derive(Clone, Debug)]
pub struct FockBasis {
    n: usize,
    states: Vec<FockState>,
}

impl FockBasis {
    pub fn new(n: usize) -> Self {
        FockBasis {
            n,
            states: enumerate_basis(n),
        }
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn iter(&self) -> impl Iterator<Item = &FockState> {
        self.states.iter()
    }

    pub fn state(&self, index: usize) -> Result<FockState> {
        self.states
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index,
                dim: self.dim(),
            })
    }

    pub fn rank(&self, s: &FockState) -> Result<usize> {
        rank(s, self.n)
    }
}

/// All occupation triples summing to `n`, in canonical order.
pub fn enumerate_basis(n: usize) -> Vec<FockState> {
    let mut out = Vec::with_capacity(dimension(n));
    for n0 in (0..=n).rev() {
        for n1 in (0..=n - n0).rev() {
            out.push(FockState([n0, n1, n - n0 - n1]));
        }
    }
    out
}

/// Position of `s` in the canonical basis of `n` particles.
pub fn rank(s: &FockState, n: usize) -> Result<usize> {
    let found = s.total();
    if found != n {
        return Err(Error::OccupationMismatch {
            occupations: s.0,
            expected: n,
            found,
        });
    }
    Ok(rank_unchecked(s))
}

#[inline]
pub(crate) fn rank_unchecked(s: &FockState) -> usize {
    let [_, n1, n2] = s.0;
    triangular(n1 + n2) + n2
}

/// Inverse of [`rank`].
pub fn unrank(index: usize, n: usize) -> Result<FockState> {
    let dim = dimension(n);
    if index >= dim {
        return Err(Error::IndexOutOfRange { index, dim });
    }
    // largest m with m(m+1)/2 <= index
    let mut m = ((((8 * index + 1) as f64).sqrt() - 1.0) / 2.0) as usize;
    while triangular(m + 1) <= index {
        m += 1;
    }
    while triangular(m) > index {
        m -= 1;
    }
    let n2 = index - triangular(m);
    Ok(FockState([n - m, m - n2, n2]))
}

/// Cumulative table of `ln k!` for `k = 0..=n`.
#[derive(Clone, Debug)]
pub struct LogFactorials<T> {
    table: Vec<T>,
}

impl<T: Real> LogFactorials<T> {
    pub fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        let mut acc = T::zero();
        table.push(acc);
        for k in 1..=n {
            acc += from_usize::<T>(k).ln();
            table.push(acc);
        }
        LogFactorials { table }
    }

    #[inline]
    pub fn ln_factorial(&self, k: usize) -> T {
        self.table[k]
    }

    /// `ln( N! / (n0! n1! n2!) )` for `N = n0 + n1 + n2`.
    pub fn ln_multinomial(&self, s: &FockState) -> T {
        self.table[s.total()]
            - s.0
                .iter()
                .map(|&k| self.table[k])
                .fold(T::zero(), |a, b| a + b)
    }

    /// `sqrt(N!/(n0! n1! n2!)) / sqrt(3^N)`; panics if the table is too short.
    pub fn amplitude(&self, s: &FockState) -> T {
        let n = from_usize::<T>(s.total());
        (lit::<T>(0.5) * (self.ln_multinomial(s) - n * lit::<T>(3.0).ln())).exp()
    }
}

/// Expansion coefficient of `|p,q,r⟩` in the uniform-superposition state
/// `(a† + b† + c†)^N |0⟩ / sqrt(3^N N!)`.
pub fn multinomial_amplitude<T: Real>(p: usize, q: usize, r: usize) -> T {
    let s = FockState([p, q, r]);
    LogFactorials::<T>::new(s.total()).amplitude(&s)
}
