//! State vectors over the three-mode Fock basis.

use nalgebra::DVector;
use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{self, FockState, LogFactorials};
use crate::scalar::{structural_tolerance, Real};

/// Which single-particle modes the occupations refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Representation {
    /// Lattice sites `a, b, c`.
    Site,
    /// Quasi-momentum modes `α, β, γ` with `ℓ = 0, +1, −1`.
    Momentum,
}

/// Normalized pure state of `n` bosons.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    n: usize,
    rep: Representation,
    amps: DVector<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Builds a state from raw amplitudes in canonical basis order and
    /// normalizes it.
    pub fn from_amplitudes(
        n: usize,
        rep: Representation,
        amps: impl Into<DVector<Complex<T>>>,
    ) -> Result<Self> {
        let amps = amps.into();
        let dim = fock::dimension(n);
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: dim,
            });
        }
        let norm = norm_sqr(&amps).sqrt();
        if norm <= T::zero() || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(StateVector {
            n,
            rep,
            amps: amps.unscale(norm),
        })
    }

    /// The pure Fock state `s`.
    pub fn fock(rep: Representation, s: FockState) -> Self {
        let n = s.total();
        let mut amps = DVector::zeros(fock::dimension(n));
        amps[fock::rank_unchecked(&s)] = Complex::new(T::one(), T::zero());
        StateVector { n, rep, amps }
    }

    /// Wraps amplitudes produced by a norm-preserving map without
    /// renormalizing.
    pub(crate) fn from_unitary_image(
        n: usize,
        rep: Representation,
        amps: DVector<Complex<T>>,
    ) -> Self {
        debug_assert_eq!(amps.len(), fock::dimension(n));
        StateVector { n, rep, amps }
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex<T>> {
        &self.amps
    }

    pub fn amplitude(&self, s: &FockState) -> Result<Complex<T>> {
        let i = fock::rank(s, self.n)?;
        Ok(self.amps[i])
    }

    pub fn norm(&self) -> T {
        norm_sqr(&self.amps).sqrt()
    }

    pub fn require(&self, rep: Representation) -> Result<()> {
        if self.rep != rep {
            return Err(Error::RepresentationMismatch {
                expected: rep,
                found: self.rep,
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &StateVector<T>) -> Result<Complex<T>> {
        if self.n != other.n {
            return Err(Error::ParticleNumberMismatch {
                left: self.n,
                right: other.n,
            });
        }
        other.require(self.rep)?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|amplitude|²` for every basis state, in canonical order.
    pub fn distribution(&self) -> Vec<(FockState, T)> {
        fock::enumerate_basis(self.n)
            .into_iter()
            .zip(self.amps.iter())
            .map(|(s, a)| (s, a.norm_sqr()))
            .collect()
    }

    /// Multiplies each amplitude by a phase chosen from its occupation.
    pub(crate) fn map_phases(&self, phase: impl Fn(&FockState) -> Complex<T>) -> Self {
        let amps = fock::enumerate_basis(self.n)
            .iter()
            .zip(self.amps.iter())
            .map(|(s, a)| a * phase(s))
            .collect::<Vec<_>>();
        StateVector {
            n: self.n,
            rep: self.rep,
            amps: DVector::from_vec(amps),
        }
    }

    /// Checks the normalization invariant at the structural tolerance.
    pub fn is_normalized(&self) -> bool {
        (self.norm() - T::one()).abs() <= structural_tolerance::<T>()
    }
}

fn norm_sqr<T: Real>(v: &DVector<Complex<T>>) -> T {
    v.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
}

/// Every particle in the zero-quasi-momentum mode, written in the site basis:
/// `(a† + b† + c†)^N |0⟩ / sqrt(3^N N!)`. All amplitudes are real and
/// positive.
pub fn superfluid_ground_state<T: Real>(n: usize) -> StateVector<T> {
    let lf = LogFactorials::<T>::new(n);
    let amps = fock::enumerate_basis(n)
        .iter()
        .map(|s| Complex::new(lf.amplitude(s), T::zero()))
        .collect::<Vec<_>>();
    StateVector {
        n,
        rep: Representation::Site,
        amps: DVector::from_vec(amps),
    }
}

/// One entry of the joint distribution of site occupations `(N_a, N_b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SiteProbability<T> {
    pub n_a: usize,
    pub n_b: usize,
    pub probability: T,
}

/// `P(N_a, N_b) = |⟨N_a, N_b, N−N_a−N_b|ψ⟩|²`, in canonical basis order.
pub fn site_number_distribution<T: Real>(s: &StateVector<T>) -> Result<Vec<SiteProbability<T>>> {
    s.require(Representation::Site)?;
    Ok(s.distribution()
        .into_iter()
        .map(|(f, p)| SiteProbability {
            n_a: f.0[0],
            n_b: f.0[1],
            probability: p,
        })
        .collect())
}
