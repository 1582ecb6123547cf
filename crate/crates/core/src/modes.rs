//! Quasi-momentum modes of the three-site ring and their Fock-space lift.
//!
//! The single-particle transformation maps site annihilators `(a, b, c)` to
//! mode annihilators `(α, β, γ)` with `F[k][j] = e^{i2πkj/3}/√3`. Mode `k`
//! carries quasi-momentum `ℓ = 0, +1, −1` for `k = 0, 1, 2`; `ℓ` is only
//! defined modulo 3, so these three values exhaust the ring.
//!
//! [`lift_to_fock`] builds `Γ(X)`, the symmetric N-th tensor power of a 3×3
//! unitary, as the operator that substitutes `a_j† → Σ_k X_kj a_k†`. It is a
//! group homomorphism and `Γ(X) = X` for one particle. For `X = F` it sends
//! site-basis amplitudes to momentum-basis amplitudes.

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::{self, FockState, LogFactorials};
use crate::scalar::{cis, from_usize, lit, structural_tolerance, to_f64, Real};
use crate::state::{Representation, StateVector};

/// A unitary single-particle transformation of the three modes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary<T: Real>(Matrix3<Complex<T>>);

impl<T: Real> ModeUnitary<T> {
    pub fn new(m: Matrix3<Complex<T>>) -> Result<Self> {
        let deviation = unitarity_defect3(&m);
        if deviation > structural_tolerance::<T>() {
            return Err(Error::NotUnitary {
                deviation: to_f64(deviation),
            });
        }
        Ok(ModeUnitary(m))
    }

    pub fn identity() -> Self {
        ModeUnitary(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<Complex<T>> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        ModeUnitary(self.0.adjoint())
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &ModeUnitary<T>) -> Self {
        ModeUnitary(self.0 * rhs.0)
    }
}

pub(crate) fn unitarity_defect3<T: Real>(m: &Matrix3<Complex<T>>) -> T {
    let d = m.adjoint() * m - Matrix3::identity();
    d.iter()
        .fold(T::zero(), |acc, z| acc.max(z.norm_sqr().sqrt()))
}

/// Row `k`, column `j`: `e^{i2πkj/3}/√3`. Rows are modes `(α, β, γ)`,
/// columns are sites `(a, b, c)`.
pub fn dft_mode_matrix<T: Real>() -> ModeUnitary<T> {
    let scale = T::one() / lit::<T>(3.0).sqrt();
    let third = T::two_pi() / lit(3.0);
    ModeUnitary(Matrix3::from_fn(|k, j| {
        // reduce k*j mod 3 so the phases are exact table values
        cis(third * from_usize((k * j) % 3)).scale(scale)
    }))
}

/// Dense lift of a mode unitary to the `n`-particle Fock space, indexed
/// `[output state, input state]` in canonical basis order.
#[derive(Clone, Debug)]
pub struct FockLift<T: Real> {
    n: usize,
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> FockLift<T> {
    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn apply(&self, v: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        &self.matrix * v
    }

    pub fn apply_adjoint(&self, v: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        self.matrix.ad_mul(v)
    }

    /// `max |(L†L − I)_ij|`.
    pub fn unitarity_defect(&self) -> T {
        let g = self.matrix.ad_mul(&self.matrix);
        let mut worst = T::zero();
        for j in 0..g.ncols() {
            for i in 0..g.nrows() {
                let mut z = g[(i, j)];
                if i == j {
                    z.re -= T::one();
                }
                worst = worst.max(z.norm_sqr().sqrt());
            }
        }
        worst
    }
}

/// Builds `Γ(X)` on `n` particles.
///
/// Column `|n0,n1,n2⟩` is `Π_j (Σ_k X_kj a_k†)^{n_j}/√(n_j!) |0⟩`. The
/// columns are generated sector by sector: a column with `n_j > 0` is
/// `(Σ_k X_kj a_k†)/√n_j` applied to the column for `n − e_j`, one
/// particle fewer. Total work is `O(Σ_p dim(p)²)`.
pub fn lift_to_fock<T: Real>(x: &ModeUnitary<T>, n: usize) -> Result<FockLift<T>> {
    let deviation = unitarity_defect3(x.matrix());
    if deviation > structural_tolerance::<T>() {
        return Err(Error::NotUnitary {
            deviation: to_f64(deviation),
        });
    }
    let xm = x.matrix();
    let mut prev = DMatrix::from_element(1, 1, Complex::new(T::one(), T::zero()));
    for p in 1..=n {
        let lower = fock::enumerate_basis(p - 1);
        // raised[r][k] = (rank of lower[r] + e_k, sqrt(lower[r]_k + 1))
        let raised: Vec<[(usize, T); 3]> = lower
            .iter()
            .map(|s| {
                std::array::from_fn(|k| {
                    let mut t = *s;
                    t.0[k] += 1;
                    (fock::rank_unchecked(&t), from_usize::<T>(t.0[k]).sqrt())
                })
            })
            .collect();
        let upper = fock::enumerate_basis(p);
        let dim = upper.len();
        let mut next = DMatrix::zeros(dim, dim);
        for (c, s) in upper.iter().enumerate() {
            let j = s.0.iter().position(|&k| k > 0).expect("p >= 1");
            let mut parent = *s;
            parent.0[j] -= 1;
            let pc = fock::rank_unchecked(&parent);
            let scale = T::one() / from_usize::<T>(s.0[j]).sqrt();
            let src = prev.column(pc);
            let mut dst = next.column_mut(c);
            for (r, v) in src.iter().enumerate() {
                if v.re == T::zero() && v.im == T::zero() {
                    continue;
                }
                let v = v.scale(scale);
                for (k, &(t, f)) in raised[r].iter().enumerate() {
                    dst[t] += xm[(k, j)] * v.scale(f);
                }
            }
        }
        prev = next;
    }
    Ok(FockLift { n, matrix: prev })
}

/// Change of basis between site and quasi-momentum occupations for a fixed
/// particle number.
#[derive(Clone, Debug)]
pub struct MomentumTransform<T: Real> {
    lift: FockLift<T>,
}

impl<T: Real> MomentumTransform<T> {
    pub fn new(n: usize) -> Self {
        let lift = lift_to_fock(&dft_mode_matrix(), n).expect("DFT matrix is unitary");
        MomentumTransform { lift }
    }

    pub fn particles(&self) -> usize {
        self.lift.n
    }

    pub fn lift(&self) -> &FockLift<T> {
        &self.lift
    }

    pub fn to_momentum(&self, s: &StateVector<T>) -> Result<StateVector<T>> {
        self.check(s, Representation::Site)?;
        Ok(StateVector::from_unitary_image(
            s.particles(),
            Representation::Momentum,
            self.lift.apply(s.amplitudes()),
        ))
    }

    pub fn to_site(&self, s: &StateVector<T>) -> Result<StateVector<T>> {
        self.check(s, Representation::Momentum)?;
        Ok(StateVector::from_unitary_image(
            s.particles(),
            Representation::Site,
            self.lift.apply_adjoint(s.amplitudes()),
        ))
    }

    fn check(&self, s: &StateVector<T>, rep: Representation) -> Result<()> {
        s.require(rep)?;
        if s.particles() != self.lift.n {
            return Err(Error::ParticleNumberMismatch {
                left: s.particles(),
                right: self.lift.n,
            });
        }
        Ok(())
    }
}

/// Probabilities `(P_α, P_β, P_γ)` of finding every particle in one
/// quasi-momentum mode.
///
/// For a site-basis state this evaluates the three overlaps directly:
/// `⟨N e_m|ψ⟩ = Σ_n sqrt(N!/Πn_j!) Π_j F_mj^{n_j} ψ_n`, and with the DFT
/// entries the product reduces to `3^{−N/2} e^{i2πm(n1 + 2n2)/3}`. Cost is
/// linear in the basis dimension; no lift is formed.
pub fn extremal_mode_probabilities<T: Real>(s: &StateVector<T>) -> [T; 3] {
    let n = s.particles();
    match s.representation() {
        Representation::Momentum => std::array::from_fn(|m| {
            s.amplitudes()[fock::rank_unchecked(&FockState::extremal(n, m))].norm_sqr()
        }),
        Representation::Site => {
            let lf = LogFactorials::<T>::new(n);
            let third = T::two_pi() / lit(3.0);
            let phases: [Complex<T>; 3] = std::array::from_fn(|k| cis(third * from_usize(k)));
            let mut acc = [Complex::new(T::zero(), T::zero()); 3];
            for (f, a) in fock::enumerate_basis(n).iter().zip(s.amplitudes().iter()) {
                let w = a.scale(lf.amplitude(f));
                let charge = f.0[1] + 2 * f.0[2];
                for (m, slot) in acc.iter_mut().enumerate() {
                    *slot += w * phases[(m * charge) % 3];
                }
            }
            acc.map(|z| z.norm_sqr())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::superfluid_ground_state;
    use approx::assert_abs_diff_eq;

    fn close(a: Complex<f64>, b: Complex<f64>, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn dft_rows() {
        let f = dft_mode_matrix::<f64>();
        let s = 1.0 / 3f64.sqrt();
        for j in 0..3 {
            assert!(close(f.matrix()[(0, j)], Complex::new(s, 0.0), 1e-15));
        }
        let w = |x: f64| Complex::from_polar(s, x);
        assert!(close(
            f.matrix()[(1, 1)],
            w(2.0 * std::f64::consts::PI / 3.0),
            1e-15
        ));
        assert!(close(
            f.matrix()[(1, 2)],
            w(4.0 * std::f64::consts::PI / 3.0),
            1e-15
        ));
        assert!(close(
            f.matrix()[(2, 1)],
            w(-2.0 * std::f64::consts::PI / 3.0),
            1e-15
        ));
        assert!(close(
            f.matrix()[(2, 2)],
            w(-4.0 * std::f64::consts::PI / 3.0),
            1e-15
        ));
        assert!(unitarity_defect3(f.matrix()) < 1e-14);
    }

    #[test]
    fn dft_powers() {
        // F² swaps β and γ, so F³ = F† is not a phase matrix; F⁴ = 1
        let f = dft_mode_matrix::<f64>();
        let f2 = f.compose(&f);
        let f3 = f2.compose(&f);
        let f4 = f3.compose(&f);
        let off_diagonal = (0..3)
            .flat_map(|r| (0..3).map(move |c| (r, c)))
            .filter(|(r, c)| r != c)
            .fold(0.0f64, |m, (r, c)| m.max(f3.matrix()[(r, c)].norm()));
        assert!(off_diagonal > 0.5);
        assert!(close(f2.matrix()[(1, 2)], Complex::new(1.0, 0.0), 1e-14));
        assert!((f4.matrix() - Matrix3::identity())
            .iter()
            .all(|z| z.norm() < 1e-14));
        let lifted = lift_to_fock(&f, 4).unwrap();
        let m = lifted.matrix();
        let fourth = m * m * m * m;
        let eye = DMatrix::<Complex<f64>>::identity(fourth.nrows(), fourth.nrows());
        assert!((fourth - eye).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn non_unitary_rejected() {
        let m = Matrix3::from_element(Complex::new(1.0, 0.0));
        assert!(matches!(
            ModeUnitary::<f64>::new(m),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn single_particle_lift_is_the_matrix() {
        let f = dft_mode_matrix::<f64>();
        let l = lift_to_fock(&f, 1).unwrap();
        // basis order for N=1 is (1,0,0), (0,1,0), (0,0,1): mode index order
        for r in 0..3 {
            for c in 0..3 {
                assert!(close(l.matrix()[(r, c)], f.matrix()[(r, c)], 1e-15));
            }
        }
    }

    #[test]
    fn vacuum_lift() {
        let l = lift_to_fock(&dft_mode_matrix::<f64>(), 0).unwrap();
        assert_eq!(l.dim(), 1);
        assert_eq!(l.matrix()[(0, 0)], Complex::new(1.0, 0.0));
    }

    #[test]
    fn identity_lifts_to_identity() {
        for n in 0..=12 {
            let l = lift_to_fock(&ModeUnitary::<f64>::identity(), n).unwrap();
            let d = fock::dimension(n);
            assert_eq!(l.matrix(), &DMatrix::identity(d, d));
        }
    }

    #[test]
    fn ground_state_is_all_alpha() {
        for n in [1, 3, 4, 10, 30] {
            let t = MomentumTransform::<f64>::new(n);
            let m = t.to_momentum(&superfluid_ground_state(n)).unwrap();
            let idx = fock::rank_unchecked(&FockState::extremal(n, 0));
            assert_abs_diff_eq!(m.amplitudes()[idx].norm_sqr(), 1.0, epsilon = 1e-12);
            let p = extremal_mode_probabilities(&superfluid_ground_state::<f64>(n));
            assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p[2], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn round_trip_between_representations() {
        let t = MomentumTransform::<f64>::new(5);
        let g = superfluid_ground_state::<f64>(5);
        let back = t.to_site(&t.to_momentum(&g).unwrap()).unwrap();
        assert!((back.amplitudes() - g.amplitudes()).norm() < 1e-12);
        assert!(t.to_site(&g).is_err());
        assert!(t.to_momentum(&superfluid_ground_state(4)).is_err());
    }

    #[test]
    fn extremal_probabilities_match_full_lift() {
        let phases = [0.3, 1.7, 2.0 * std::f64::consts::PI / 3.0];
        for n in [1, 2, 3, 6, 7] {
            let t = MomentumTransform::<f64>::new(n);
            for &theta in &phases {
                let s =
                    crate::evolution::evolve_interaction_phase(&superfluid_ground_state(n), theta)
                        .unwrap();
                let fast = extremal_mode_probabilities(&s);
                let full = extremal_mode_probabilities(&t.to_momentum(&s).unwrap());
                for m in 0..3 {
                    assert_abs_diff_eq!(fast[m], full[m], epsilon = 1e-12);
                }
            }
        }
    }
}
