//! Time evolution with the convention `|ψ(t)⟩ = e^{−iHt}|ψ(0)⟩`.
//!
//! Two engines: exact phase evolution under the interaction-only
//! Hamiltonian (diagonal in the site basis), and dense spectral evolution
//! under an arbitrary [`HermitianOperator`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hamiltonian::HermitianOperator;
use crate::scalar::{cis, from_usize, lit, Real};
use crate::state::{Representation, StateVector};

/// Evolves a site-basis state under `(U/2) Σ_k n_k(n_k − 1)` for a time
/// with `Ut = theta`: amplitude `|p,q,r⟩` picks up
/// `e^{−i(θ/2)[p(p−1) + q(q−1) + r(r−1)]}`.
pub fn evolve_interaction_phase<T: Real>(s: &StateVector<T>, theta: T) -> Result<StateVector<T>> {
    s.require(Representation::Site)?;
    let half = theta * lit(0.5);
    Ok(s.map_phases(|f| cis(-half * from_usize::<T>(f.pair_count()))))
}

/// Cached eigendecomposition `H = V Λ V†` used to propagate states.
#[derive(Clone, Debug)]
pub struct SpectralPropagator<T: Real> {
    n: usize,
    rep: Representation,
    values: DVector<T>,
    vectors: DMatrix<Complex<T>>,
}

impl<T: Real> SpectralPropagator<T> {
    pub fn new(h: &HermitianOperator<T>) -> Result<Self> {
        let dim = h.dim();
        let dense = h.to_dense();
        let eig = SymmetricEigen::try_new(dense.clone(), T::default_epsilon(), 1000 * dim.max(1))
            .ok_or(Error::EigenFailure)?;
        // the QR result can be off by ~1e-7 on small degenerate spectra;
        // Jacobi sweeps on V†HV bring it to working precision
        let rotated = eig.eigenvectors.ad_mul(&dense) * &eig.eigenvectors;
        let (values, vectors) = jacobi_polish(rotated, eig.eigenvectors)?;
        Ok(SpectralPropagator {
            n: h.particles(),
            rep: h.representation(),
            values,
            vectors,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<T> {
        &self.values
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex<T>> {
        &self.vectors
    }

    /// `V e^{−iΛt} V† ψ`.
    pub fn evolve(&self, s: &StateVector<T>, t: T) -> Result<StateVector<T>> {
        s.require(self.rep)?;
        if s.dim() != self.values.len() {
            return Err(Error::DimensionMismatch {
                left: s.dim(),
                right: self.values.len(),
            });
        }
        let mut coeffs = self.vectors.ad_mul(s.amplitudes());
        for (c, &e) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= cis(-e * t);
        }
        Ok(StateVector::from_unitary_image(
            self.n,
            self.rep,
            &self.vectors * coeffs,
        ))
    }
}

/// Cyclic complex Jacobi on a Hermitian `a`, accumulating the rotations
/// into the columns of `v`. Returns the diagonal and the updated `v`.
fn jacobi_polish<T: Real>(
    mut a: DMatrix<Complex<T>>,
    mut v: DMatrix<Complex<T>>,
) -> Result<(DVector<T>, DMatrix<Complex<T>>)> {
    let n = a.nrows();
    let eps = T::default_epsilon();
    let scale = a
        .iter()
        .fold(T::zero(), |m, z| m.max(z.norm_sqr().sqrt()))
        .max(T::one());
    for _ in 0..50 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let b = a[(p, q)];
                let mag = b.norm_sqr().sqrt();
                if mag <= eps * eps * scale {
                    continue;
                }
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                if mag <= eps * lit::<T>(0.5) * (app.abs() + aqq.abs()).max(eps * scale) {
                    a[(p, q)] = Complex::new(T::zero(), T::zero());
                    a[(q, p)] = Complex::new(T::zero(), T::zero());
                    continue;
                }
                rotated = true;
                let phase = cis(-b.im.atan2(b.re));
                let theta = (aqq - app) / (mag + mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)] * phase);
                    a[(k, p)] = x.scale(c) - y.scale(s);
                    a[(k, q)] = x.scale(s) + y.scale(c);
                }
                let back = phase.conj();
                for k in 0..n {
                    let (x, y) = (a[(p, k)], a[(q, k)] * back);
                    a[(p, k)] = x.scale(c) - y.scale(s);
                    a[(q, k)] = x.scale(s) + y.scale(c);
                }
                a[(p, q)] = Complex::new(T::zero(), T::zero());
                a[(q, p)] = Complex::new(T::zero(), T::zero());
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)] * phase);
                    v[(k, p)] = x.scale(c) - y.scale(s);
                    v[(k, q)] = x.scale(s) + y.scale(c);
                }
            }
        }
        if !rotated {
            return Ok((DVector::from_fn(n, |i, _| a[(i, i)].re), v));
        }
    }
    Err(Error::EigenFailure)
}

/// One-shot spectral evolution; builds the eigendecomposition each call.
pub fn evolve_spectral<T: Real>(
    s: &StateVector<T>,
    h: &HermitianOperator<T>,
    t: T,
) -> Result<StateVector<T>> {
    h.check_state(s)?;
    SpectralPropagator::new(h)?.evolve(s, t)
}

/// Exact evolution under an operator with no off-diagonal entries:
/// each basis amplitude picks up `e^{−iH_{kk}t}`.
pub fn evolve_diagonal<T: Real>(
    s: &StateVector<T>,
    h: &HermitianOperator<T>,
    t: T,
) -> Result<StateVector<T>> {
    h.check_state(s)?;
    let mut amps = s.amplitudes().clone();
    for &(r, c, v) in h.entries() {
        if r != c {
            if v != Complex::new(T::zero(), T::zero()) {
                return Err(Error::InvalidArgument(
                    "operator has off-diagonal entries".into(),
                ));
            }
            continue;
        }
        amps[r] *= cis(-v.re * t);
    }
    Ok(StateVector::from_unitary_image(
        s.particles(),
        s.representation(),
        amps,
    ))
}
