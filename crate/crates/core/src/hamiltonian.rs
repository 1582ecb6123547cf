//! Bose-Hubbard operators on the three-site ring.
//!
//! Units: `ħ = 1`, so `J`, `U` and `ξ` are angular frequencies and every
//! observable depends on dimensionless products such as `Ut` or `ξΔt`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::{self, FockState};
use crate::scalar::{from_usize, lit, structural_tolerance, to_f64, Real};
use crate::state::{Representation, StateVector};

/// Ring parameters. Signs are unrestricted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HubbardParams<T> {
    /// Particle number.
    pub n: usize,
    /// Hopping energy.
    pub j: T,
    /// On-site interaction energy.
    pub u: T,
    /// Rotation coupling: quasi-momentum mode `ℓ` is shifted by `ℓξ`.
    pub xi: T,
}

impl<T: Real> HubbardParams<T> {
    pub fn new(n: usize, j: T, u: T, xi: T) -> Self {
        HubbardParams { n, j, u, xi }
    }
}

/// Sparse Hermitian matrix over one particle-number sector.
///
/// Entries are stored as `(row, col, value)` triplets sorted by row, then
/// column, with no duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T: Real> {
    n: usize,
    rep: Representation,
    entries: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Real> HermitianOperator<T> {
    /// Collects triplets (summing duplicates) and checks Hermiticity.
    pub fn from_triplets(
        n: usize,
        rep: Representation,
        triplets: impl IntoIterator<Item = (usize, usize, Complex<T>)>,
    ) -> Result<Self> {
        let dim = fock::dimension(n);
        let mut entries: Vec<(usize, usize, Complex<T>)> = Vec::new();
        for (r, c, v) in triplets {
            let index = r.max(c);
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
            entries.push((r, c, v));
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, Complex<T>)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        let op = HermitianOperator {
            n,
            rep,
            entries: merged,
        };
        let deviation = op.hermiticity_defect();
        if deviation > structural_tolerance::<T>() {
            return Err(Error::NotHermitian {
                deviation: to_f64(deviation),
            });
        }
        Ok(op)
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        fock::dimension(self.n)
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn entries(&self) -> &[(usize, usize, Complex<T>)] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.entries
            .binary_search_by_key(&(row, col), |&(r, c, _)| (r, c))
            .map(|i| self.entries[i].2)
            .unwrap_or_else(|_| Complex::new(T::zero(), T::zero()))
    }

    /// `max |H_ij − conj(H_ji)|` over stored entries.
    pub fn hermiticity_defect(&self) -> T {
        self.entries.iter().fold(T::zero(), |worst, &(r, c, v)| {
            let d = v - self.entry(c, r).conj();
            worst.max(d.norm_sqr().sqrt())
        })
    }

    pub fn to_dense(&self) -> DMatrix<Complex<T>> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    pub fn apply(&self, v: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        let mut out = DVector::zeros(self.dim());
        for &(r, c, h) in &self.entries {
            out[r] += h * v[c];
        }
        out
    }

    /// `⟨ψ|H|ψ⟩`, real for Hermitian `H`.
    pub fn expectation(&self, s: &StateVector<T>) -> Result<T> {
        self.check_state(s)?;
        Ok(s.amplitudes().dotc(&self.apply(s.amplitudes())).re)
    }

    pub(crate) fn check_state(&self, s: &StateVector<T>) -> Result<()> {
        s.require(self.rep)?;
        if s.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: s.dim(),
                right: self.dim(),
            });
        }
        Ok(())
    }
}

/// `H = −J(a†b + b†c + c†a + h.c.) + (U/2)(a†²a² + b†²b² + c†²c²)` in the
/// site basis.
///
/// On a ring of three every pair of sites is adjacent, so the hopping part
/// connects states that differ by one particle moved between any two sites,
/// with amplitude `−J sqrt(n_src (n_dst + 1))`.
pub fn build_bose_hubbard<T: Real>(p: &HubbardParams<T>) -> HermitianOperator<T> {
    let half_u = p.u * lit(0.5);
    let mut triplets = Vec::new();
    for (col, s) in fock::enumerate_basis(p.n).iter().enumerate() {
        let diag = half_u * from_usize::<T>(s.pair_count());
        if diag != T::zero() {
            triplets.push((col, col, Complex::new(diag, T::zero())));
        }
        if p.j == T::zero() {
            continue;
        }
        for src in 0..3 {
            if s.0[src] == 0 {
                continue;
            }
            for dst in (0..3).filter(|&d| d != src) {
                let mut t: FockState = *s;
                t.0[src] -= 1;
                t.0[dst] += 1;
                let amp = -p.j * from_usize::<T>(s.0[src] * (s.0[dst] + 1)).sqrt();
                triplets.push((fock::rank_unchecked(&t), col, Complex::new(amp, T::zero())));
            }
        }
    }
    HermitianOperator::from_triplets(p.n, Representation::Site, triplets)
        .expect("Bose-Hubbard matrix is Hermitian by construction")
}

/// Mode energy per particle for quasi-momentum modes `(α, β, γ)`:
/// `(−2J, J + ξ, J − ξ)`.
pub fn rotating_mode_energies<T: Real>(j: T, xi: T) -> [T; 3] {
    [-(j + j), j + xi, j - xi]
}

/// Hopping Hamiltonian of a rotating ring, diagonal in the momentum basis:
/// `−2J n_α + (J + ξ) n_β + (J − ξ) n_γ`. `U` is ignored.
pub fn build_rotating_momentum_hamiltonian<T: Real>(p: &HubbardParams<T>) -> HermitianOperator<T> {
    let e = rotating_mode_energies(p.j, p.xi);
    let triplets = fock::enumerate_basis(p.n)
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let v = (0..3).fold(T::zero(), |acc, k| acc + e[k] * from_usize::<T>(s.0[k]));
            (i, i, Complex::new(v, T::zero()))
        })
        .collect::<Vec<_>>();
    HermitianOperator::from_triplets(p.n, Representation::Momentum, triplets)
        .expect("diagonal real matrix is Hermitian")
}
