//! Three-port flow interferometer built from two cat-creation stages.
//!
//! For `N` a multiple of three the protocol maps the cat subspace
//! `{|N,0,0⟩, |0,N,0⟩, |0,0,N⟩}` (momentum basis) onto itself by a 3×3
//! unitary `W`. A hold of `Δt` on the rotating ring imprints a diagonal
//! phase matrix `Q`, and a second stage with twice the interaction hold
//! applies `W² = W⁻¹`. The readout is `|W² Q W e_α|²`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{evolve_diagonal, evolve_interaction_phase};
use crate::fock::{self, FockState};
use crate::hamiltonian::{build_rotating_momentum_hamiltonian, HubbardParams};
use crate::modes::{extremal_mode_probabilities, MomentumTransform};
use crate::protocol::run_protocol;
use crate::scalar::{cis, from_usize, lit, Real};
use crate::state::{Representation, StateVector};

/// Amplitudes over `(|N,0,0⟩, |0,N,0⟩, |0,0,N⟩)` in the momentum basis.
pub type CatVector<T> = Vector3<Complex<T>>;

/// The cat-stage map on the cat subspace:
/// `W = (e^{iπ/6}/√3) [[e^{−i2π/3}, 1, 1], [1, e^{−i2π/3}, 1], [1, 1, e^{−i2π/3}]]`.
///
/// The `e^{iπ/6}` prefactor is the phase the hold `θ = 2π/3` actually
/// produces; with it `W³ = 1` exactly. Without it the cube is `−i·1`.
pub fn cat_matrix<T: Real>() -> Matrix3<Complex<T>> {
    let scale = T::one() / lit::<T>(3.0).sqrt();
    let global = cis(T::pi() / lit(6.0));
    let diag = cis(-T::two_pi() / lit(3.0)) * global;
    Matrix3::from_fn(|r, c| if r == c { diag } else { global }.scale(scale))
}

/// Dimensionless phases accumulated by the cat branches during the hold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FringeSettings<T> {
    /// Rotation phase; `N ξ Δt` in magnitude.
    pub phi_rot: T,
    /// Hopping phase; `3 N J Δt` in magnitude.
    pub phi_hop: T,
}

impl<T: Real> FringeSettings<T> {
    pub fn new(phi_rot: T, phi_hop: T) -> Self {
        FringeSettings { phi_rot, phi_hop }
    }

    /// Settings imprinted by holding for `dt` under `e^{−iHΔt}` with the
    /// rotating-ring Hamiltonian.
    ///
    /// [`phase_matrix`] is written as the forward propagator `e^{+iHΔt}`,
    /// so a physical hold of `Δt` realizes it at `−Δt`:
    /// `phi_rot = −NξΔt`, `phi_hop = −3NJΔt`. Since the fringes depend on
    /// `cos(phi_hop)`, only the rotation sign is visible, as a `β ↔ γ`
    /// exchange.
    pub fn from_hold(n: usize, j: T, xi: T, dt: T) -> Self {
        let n = from_usize::<T>(n);
        FringeSettings {
            phi_rot: -(n * xi * dt),
            phi_hop: -(lit::<T>(3.0) * n * j * dt),
        }
    }
}

/// `Q = diag(e^{−i phi_hop}, e^{+i phi_rot}, e^{−i phi_rot})`, the hold
/// phases with the common phase removed.
pub fn phase_matrix<T: Real>(s: &FringeSettings<T>) -> Matrix3<Complex<T>> {
    Matrix3::from_diagonal(&Vector3::new(
        cis(-s.phi_hop),
        cis(s.phi_rot),
        cis(-s.phi_rot),
    ))
}

/// `W² Q W` applied to `input`.
pub fn interferometer_output<T: Real>(s: &FringeSettings<T>, input: &CatVector<T>) -> CatVector<T> {
    let w = cat_matrix::<T>();
    w * w * phase_matrix(s) * w * input
}

/// Closed-form fringes for an input with every atom in `α`:
///
/// `P_k = [1 + 4cos²(φ − 2πk/3) + 4cos(φ − 2πk/3)cos(φ_hop)] / 9` with
/// `φ = phi_rot` and `k = 0, 1, −1` for `α, β, γ`.
pub fn fringe_probabilities<T: Real>(s: &FringeSettings<T>) -> [T; 3] {
    let third = T::two_pi() / lit(3.0);
    let hop = s.phi_hop.cos();
    let p = |shift: T| {
        let c = (s.phi_rot - shift).cos();
        (T::one() + lit::<T>(4.0) * c * c + lit::<T>(4.0) * c * hop) / lit(9.0)
    };
    [p(T::zero()), p(third), p(-third)]
}

/// The cat-subspace block of a hold `theta`, computed in the full Fock
/// space: entry `(k, m)` is `⟨N e_k| protocol |N e_m⟩` in the momentum basis.
pub fn simulated_cat_matrix<T: Real>(
    transform: &MomentumTransform<T>,
    theta: T,
) -> Result<Matrix3<Complex<T>>> {
    let n = transform.particles();
    let mut out = Matrix3::zeros();
    for m in 0..3 {
        let ket = StateVector::fock(Representation::Momentum, FockState::extremal(n, m));
        let evolved = evolve_interaction_phase(&transform.to_site(&ket)?, theta)?;
        let image = transform.to_momentum(&evolved)?;
        for k in 0..3 {
            out[(k, m)] = image.amplitudes()[fock::rank_unchecked(&FockState::extremal(n, k))];
        }
    }
    Ok(out)
}

/// Runs the interferometer end to end in the Fock space: cat stage at
/// `theta`, rotating-ring hold, cat stage at `2·theta`, readout.
#[derive(Clone, Debug)]
pub struct FringeSimulator<T: Real> {
    n: usize,
    theta: T,
    transform: MomentumTransform<T>,
    first_stage: StateVector<T>,
}

impl<T: Real> FringeSimulator<T> {
    pub fn new(n: usize, theta: T) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(3) {
            return Err(Error::OffComb { n });
        }
        let transform = MomentumTransform::new(n);
        let first_stage = transform.to_momentum(&run_protocol(n, theta)?.state)?;
        Ok(FringeSimulator {
            n,
            theta,
            transform,
            first_stage,
        })
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    /// `(P_α, P_β, P_γ)` after a hold of `dt` at hopping `j` and rotation
    /// coupling `xi`.
    pub fn probabilities(&self, j: T, xi: T, dt: T) -> Result<[T; 3]> {
        let h = build_rotating_momentum_hamiltonian(&HubbardParams::new(self.n, j, T::zero(), xi));
        let held = evolve_diagonal(&self.first_stage, &h, dt)?;
        let site = self.transform.to_site(&held)?;
        let second = evolve_interaction_phase(&site, self.theta + self.theta)?;
        Ok(extremal_mode_probabilities(&second))
    }
}

/// One-shot [`FringeSimulator`] evaluation.
pub fn full_simulation_fringes<T: Real>(n: usize, j: T, xi: T, dt: T, theta: T) -> Result<[T; 3]> {
    FringeSimulator::new(n, theta)?.probabilities(j, xi, dt)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FringeRow<T> {
    pub xi: T,
    pub xi_dt: T,
    pub phi_rot: T,
    pub phi_hop: T,
    /// Closed-form `(P_α, P_β, P_γ)` at the realized settings.
    pub closed: [T; 3],
    /// Full Fock-space simulation.
    pub simulated: [T; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FringeScan<T> {
    pub n: usize,
    pub rows: Vec<FringeRow<T>>,
    /// `2π/N`, the fringe period in `ξΔt`.
    pub period_expected: T,
    /// Mean spacing of the dominant `P_α` maxima in the simulated scan, if
    /// at least two are resolved.
    pub period_measured: Option<T>,
}

/// Scans the rotation coupling over `xi_values` (ascending) at fixed `j`
/// and `dt`.
pub fn fringe_scan<T: Real>(
    n: usize,
    j: T,
    xi_values: &[T],
    dt: T,
    theta: T,
) -> Result<FringeScan<T>> {
    use rayon::prelude::*;
    let sim = FringeSimulator::new(n, theta)?;
    let rows = xi_values
        .par_iter()
        .map(|&xi| {
            let settings = FringeSettings::from_hold(n, j, xi, dt);
            Ok(FringeRow {
                xi,
                xi_dt: xi * dt,
                phi_rot: settings.phi_rot,
                phi_hop: settings.phi_hop,
                closed: fringe_probabilities(&settings),
                simulated: sim.probabilities(j, xi, dt)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<T> = rows.iter().map(|r| r.xi_dt).collect();
    let ys: Vec<T> = rows.iter().map(|r| r.simulated[0]).collect();
    Ok(FringeScan {
        n,
        period_measured: dominant_peak_spacing(&xs, &ys),
        period_expected: T::two_pi() / from_usize(n),
        rows,
    })
}

/// Mean spacing between interior local maxima lying within 1% (of the
/// signal range) of the global maximum, each located by a three-point
/// parabola.
pub fn dominant_peak_spacing<T: Real>(xs: &[T], ys: &[T]) -> Option<T> {
    if xs.len() < 3 || xs.len() != ys.len() {
        return None;
    }
    let max = ys.iter().copied().fold(ys[0], |a, b| a.max(b));
    let min = ys.iter().copied().fold(ys[0], |a, b| a.min(b));
    let floor = max - (max - min) * lit(0.01);
    let mut peaks = Vec::new();
    for i in 1..ys.len() - 1 {
        if ys[i] >= floor && ys[i] >= ys[i - 1] && ys[i] > ys[i + 1] {
            peaks.push(parabola_vertex(
                [xs[i - 1], xs[i], xs[i + 1]],
                [ys[i - 1], ys[i], ys[i + 1]],
            ));
        }
    }
    if peaks.len() < 2 {
        return None;
    }
    Some((peaks[peaks.len() - 1] - peaks[0]) / from_usize(peaks.len() - 1))
}

fn parabola_vertex<T: Real>(x: [T; 3], y: [T; 3]) -> T {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curvature = (d2 - d1) / (x[2] - x[0]);
    if curvature == T::zero() {
        return x[1];
    }
    // vertex of the interpolating quadratic
    (x[0] + x[1]) * lit(0.5) - d1 / (curvature + curvature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn unphased_w() -> Matrix3<Complex<f64>> {
        let s = 1.0 / 3f64.sqrt();
        let d = Complex::from_polar(s, -2.0 * PI / 3.0);
        Matrix3::from_fn(|r, c| if r == c { d } else { Complex::new(s, 0.0) })
    }

    fn max_diff(a: &Matrix3<Complex<f64>>, b: &Matrix3<Complex<f64>>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn w_cubes_to_identity() {
        let w = cat_matrix::<f64>();
        assert!(max_diff(&(w * w * w), &Matrix3::identity()) < 1e-12);
        assert!(crate::modes::unitarity_defect3(&w) < 1e-14);
    }

    #[test]
    fn unphased_form_differs_by_global_phase() {
        let p = unphased_w();
        let cube = p * p * p;
        assert!(max_diff(&cube, &(Matrix3::identity() * Complex::new(0.0, -1.0))) < 1e-12);
        let w = cat_matrix::<f64>();
        assert!(max_diff(&w, &(p * Complex::from_polar(1.0, PI / 6.0))) < 1e-15);
    }

    #[test]
    fn w_makes_equal_thirds() {
        let out = cat_matrix::<f64>()
            * Vector3::new(
                Complex::new(1.0, 0.0),
                Complex::default(),
                Complex::default(),
            );
        for z in out.iter() {
            assert_abs_diff_eq!(z.norm_sqr(), 1.0 / 3.0, epsilon = 1e-15);
        }
        // relative phases: the diagonal branch lags by 2π/3
        let rel = out[0] / out[1];
        assert!((rel - Complex::from_polar(1.0, -2.0 * PI / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn w_is_the_simulated_cat_stage() {
        for n in [3, 6, 9] {
            let t = MomentumTransform::<f64>::new(n);
            let sim = simulated_cat_matrix(&t, 2.0 * PI / 3.0).unwrap();
            assert!(max_diff(&sim, &cat_matrix()) < 1e-12, "N={n}");
        }
    }

    #[test]
    fn doubled_hold_is_w_squared() {
        let t = MomentumTransform::<f64>::new(3);
        let sim = simulated_cat_matrix(&t, 4.0 * PI / 3.0).unwrap();
        let w = cat_matrix::<f64>();
        assert!(max_diff(&sim, &(w * w)) < 1e-12);
    }

    #[test]
    fn phase_matrix_values() {
        let q = phase_matrix(&FringeSettings::new(0.0f64, 0.0));
        assert_eq!(q, Matrix3::identity());
        let hop = 0.7;
        let q = phase_matrix(&FringeSettings::new(PI, hop));
        assert!((q[(0, 0)] - Complex::from_polar(1.0, -hop)).norm() < 1e-15);
        assert!((q[(1, 1)] + 1.0).norm() < 1e-15);
        assert!((q[(2, 2)] + 1.0).norm() < 1e-15);
        assert!(crate::modes::unitarity_defect3(&q) < 1e-15);
    }

    #[test]
    fn fringe_special_points() {
        let p = fringe_probabilities(&FringeSettings::new(0.0f64, 0.0));
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-15);
        let p = fringe_probabilities(&FringeSettings::new(2.0 * PI / 3.0, 0.0));
        assert_abs_diff_eq!(p[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_forms_match_matrix_chain() {
        let e0 = Vector3::new(
            Complex::new(1.0, 0.0),
            Complex::default(),
            Complex::default(),
        );
        for a in 0..20 {
            for b in 0..20 {
                let s = FringeSettings::new(a as f64 * 0.33, b as f64 * 0.29);
                let out = interferometer_output(&s, &e0);
                let p = fringe_probabilities(&s);
                for k in 0..3 {
                    assert_abs_diff_eq!(out[k].norm_sqr(), p[k], epsilon = 1e-12);
                }
                assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn chain_is_unitary_on_each_input() {
        let s = FringeSettings::new(0.4, 1.3);
        for m in 0..3 {
            let mut e = CatVector::<f64>::zeros();
            e[m] = Complex::new(1.0, 0.0);
            let total: f64 = interferometer_output(&s, &e)
                .iter()
                .map(|z| z.norm_sqr())
                .sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rotation_reversal_swaps_flow_modes() {
        for (r, h) in [(0.3, 0.1), (1.9, 2.2), (-0.8, 0.5)] {
            let p = fringe_probabilities(&FringeSettings::new(r, h));
            let q = fringe_probabilities(&FringeSettings::new(-r, h));
            assert_abs_diff_eq!(p[0], q[0], epsilon = 1e-14);
            assert_abs_diff_eq!(p[1], q[2], epsilon = 1e-14);
            assert_abs_diff_eq!(p[2], q[1], epsilon = 1e-14);
        }
    }

    #[test]
    fn simulation_matches_closed_forms() {
        let sim = FringeSimulator::<f64>::new(3, 2.0 * PI / 3.0).unwrap();
        for k in 0..40 {
            let (j, xi, dt) = (0.13, 0.05 * k as f64, 1.7);
            let p = sim.probabilities(j, xi, dt).unwrap();
            let q = fringe_probabilities(&FringeSettings::from_hold(3, j, xi, dt));
            for m in 0..3 {
                assert_abs_diff_eq!(p[m], q[m], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn hold_sign_convention_swaps_beta_gamma() {
        // the closed forms read with phi_rot = +NξΔt describe the same
        // run with the two flow modes exchanged
        let (n, j, xi, dt) = (6, 0.2, 0.31, 1.1);
        let p = full_simulation_fringes(n, j, xi, dt, 2.0 * PI / 3.0).unwrap();
        let q = fringe_probabilities(&FringeSettings::new(6.0 * xi * dt, 18.0 * j * dt));
        assert_abs_diff_eq!(p[0], q[0], epsilon = 1e-10);
        assert_abs_diff_eq!(p[1], q[2], epsilon = 1e-10);
        assert_abs_diff_eq!(p[2], q[1], epsilon = 1e-10);
        assert!((p[1] - p[2]).abs() > 1e-3);
    }

    #[test]
    fn no_hold_undoes_the_cat() {
        let p = full_simulation_fringes(3, 0.0f64, 0.0, 0.0, 2.0 * PI / 3.0).unwrap();
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-12);
        assert!(full_simulation_fringes(4, 0.0f64, 0.0, 0.0, 2.0 * PI / 3.0).is_err());
    }

    #[test]
    fn period_halves_when_n_doubles() {
        let xs: Vec<f64> = (0..=1200).map(|k| 2.0 * PI * k as f64 / 1200.0).collect();
        let a = fringe_scan(3, 0.0, &xs, 1.0, 2.0 * PI / 3.0).unwrap();
        let b = fringe_scan(6, 0.0, &xs, 1.0, 2.0 * PI / 3.0).unwrap();
        let (pa, pb) = (a.period_measured.unwrap(), b.period_measured.unwrap());
        assert_abs_diff_eq!(pa / pb, 2.0, epsilon = 1e-3);
        assert_abs_diff_eq!(pa, a.period_expected, epsilon = 1e-3);
        for r in &a.rows {
            assert_abs_diff_eq!(r.simulated.iter().sum::<f64>(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn zero_rotation_row() {
        // phi_hop a multiple of 2π: 3 N J Δt = 2π
        let n = 3;
        let j = 2.0 * PI / 9.0;
        let scan = fringe_scan(n, j, &[0.0, 0.1], 1.0, 2.0 * PI / 3.0).unwrap();
        assert_abs_diff_eq!(scan.rows[0].simulated[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(scan.rows[0].closed[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn peak_spacing_edge_cases() {
        assert_eq!(dominant_peak_spacing::<f64>(&[0.0, 1.0], &[0.0, 1.0]), None);
        let xs: Vec<f64> = (0..100).map(|k| k as f64 * 0.01).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert_eq!(dominant_peak_spacing(&xs, &ys), None);
    }
}
