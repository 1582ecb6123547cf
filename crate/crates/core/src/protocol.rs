//! The cat-creation sequence: start in the superfluid ground state, switch
//! off hopping suddenly, hold for an interaction phase `θ = Ut`, switch
//! hopping back on, and read out the quasi-momentum mode populations.
//!
//! The protocol is parameterized by `θ` alone; `θ = 2π/3` makes an equal
//! three-branch cat whenever `N` is a multiple of three.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::evolve_interaction_phase;
use crate::fock::{self, FockState};
use crate::modes::{extremal_mode_probabilities, MomentumTransform};
use crate::scalar::{from_usize, lit, structural_tolerance, to_f64, Real};
use crate::state::{superfluid_ground_state, StateVector};

/// Constant term of the three-atom `P_β(θ)` series, fixed by requiring
/// `P_β(0) = 0`: with the cosine coefficients `−12, −6, +4` it must be 14.
/// The brute-force check lives in the tests below and in the acceptance
/// suite.
pub const P_BETA_CONSTANT: f64 = 14.0;

/// `2π/3`, the hold phase that creates the cat.
pub fn cat_phase<T: Real>() -> T {
    T::two_pi() / lit(3.0)
}

#[derive(Clone, Debug)]
pub struct ProtocolResult<T: Real> {
    pub n: usize,
    /// Hold phase `θ = Ut`.
    pub theta: T,
    /// `(P_α, P_β, P_γ)`: probability that all atoms sit in one mode.
    pub probabilities: [T; 3],
    pub cattiness: T,
    /// Final state in the site representation.
    pub state: StateVector<T>,
}

/// Runs ground state → interaction hold `θ` → mode readout.
pub fn run_protocol<T: Real>(n: usize, theta: T) -> Result<ProtocolResult<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "protocol needs at least one particle".into(),
        ));
    }
    let state = evolve_interaction_phase(&superfluid_ground_state(n), theta)?;
    let probabilities = extremal_mode_probabilities(&state);
    let cattiness = cattiness(probabilities)?;
    Ok(ProtocolResult {
        n,
        theta,
        probabilities,
        cattiness,
        state,
    })
}

/// `C = 3 (P_α P_β P_γ)^{1/3}`; 1 exactly for three equal thirds, 0 when
/// any branch is empty.
pub fn cattiness<T: Real>(p: [T; 3]) -> Result<T> {
    let tol = structural_tolerance::<T>();
    for &x in &p {
        if !(x >= -tol && x <= T::one() + tol) {
            return Err(Error::ProbabilityOutOfRange { value: to_f64(x) });
        }
    }
    let clamped = p.map(|x| x.max(T::zero()).min(T::one()));
    Ok(lit::<T>(3.0) * (clamped[0] * clamped[1] * clamped[2]).cbrt())
}

/// Closed-form `(P_α(3), P_β(3))` for three atoms after a hold `θ`;
/// `P_γ(3) = P_β(3)`.
pub fn analytic_p3<T: Real>(theta: T) -> (T, T) {
    let c1 = theta.cos();
    let c2 = (theta + theta).cos();
    let c3 = (lit::<T>(3.0) * theta).cos();
    let scale = T::one() / lit(81.0);
    let alpha =
        (lit::<T>(41.0) + lit::<T>(24.0) * c1 + lit::<T>(12.0) * c2 + lit::<T>(4.0) * c3) * scale;
    let beta = (lit::<T>(P_BETA_CONSTANT) - lit::<T>(12.0) * c1 - lit::<T>(6.0) * c2
        + lit::<T>(4.0) * c3)
        * scale;
    (alpha, beta)
}

/// Protocol results for each `N`, in input order. Points are independent
/// and run in parallel.
pub fn cattiness_sweep<T: Real>(ns: &[usize], theta: T) -> Result<Vec<ProtocolResult<T>>> {
    ns.par_iter().map(|&n| run_protocol(n, theta)).collect()
}

/// Probability weight outside the three extremal momentum kets, computed
/// from the full momentum-basis distribution.
pub fn cat_leakage<T: Real>(state: &StateVector<T>, transform: &MomentumTransform<T>) -> Result<T> {
    let m = transform.to_momentum(state)?;
    let n = state.particles();
    let extremal = [0, 1, 2].map(|k| fock::rank_unchecked(&FockState::extremal(n, k)));
    Ok(m.amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| !extremal.contains(i))
        .fold(T::zero(), |a, (_, z)| a + z.norm_sqr()))
}

fn cattiness_at<T: Real>(n: usize, theta: T) -> T {
    run_protocol(n, theta)
        .map(|r| r.cattiness)
        .unwrap_or(T::zero())
}

/// Walks right from `start` in steps of `step` until `f` first drops below
/// `target`, then bisects that step to `tol`. Returns the last point with
/// `f ≥ target`, or `None` if no drop happens before `limit`.
fn first_crossing<T: Real>(
    f: impl Fn(T) -> T,
    start: T,
    step: T,
    limit: T,
    target: T,
    tol: T,
) -> Option<T> {
    let mut x = start;
    loop {
        let next = x + step;
        if next > limit {
            return None;
        }
        if f(next) < target {
            let (mut lo, mut hi) = (x, next);
            while hi - lo > tol {
                let mid = (lo + hi) * lit(0.5);
                if mid <= lo || mid >= hi {
                    break;
                }
                if f(mid) >= target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(lo);
        }
        x = next;
    }
}

/// Largest `δ > 0` reachable from `δ = 0` with `C ≥ target` for a hold
/// `θ = (1 + δ)·2π/3`.
///
/// `C(δ)` revives at larger `δ`, so this scans in steps of `10⁻⁴/N` for the
/// first drop below target and only then bisects (to `10⁻⁹`).
pub fn timing_tolerance<T: Real>(n: usize, target: T) -> Result<T> {
    if n == 0 || !n.is_multiple_of(3) {
        return Err(Error::OffComb { n });
    }
    let c = |delta: T| cattiness_at(n, (T::one() + delta) * cat_phase::<T>());
    let at_zero = c(T::zero());
    if at_zero < target {
        return Err(Error::TargetUnreachable {
            target: to_f64(target),
            best: to_f64(at_zero),
        });
    }
    let step = lit::<T>(1e-4) / from_usize(n);
    first_crossing(c, T::zero(), step, lit(0.5), target, lit(1e-9)).ok_or(
        Error::TargetUnreachable {
            target: to_f64(target),
            best: to_f64(at_zero),
        },
    )
}

/// Origin-constrained least-squares line through `(N, 1/δ₀)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimingFit<T> {
    /// Slope of `1/δ₀` against `N`.
    pub slope: T,
    /// `1/slope`, the prefactor in `δ₀ ≈ prefactor / N`.
    pub prefactor: T,
}

pub fn fit_timing<T: Real>(points: &[(usize, T)]) -> Result<TimingFit<T>> {
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "timing fit needs at least one point".into(),
        ));
    }
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for &(n, d) in points {
        let x = from_usize::<T>(n);
        sxy += x / d;
        sxx += x * x;
    }
    let slope = sxy / sxx;
    Ok(TimingFit {
        slope,
        prefactor: T::one() / slope,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Calibration<T> {
    /// Hold phase `Ut` that maximizes `C`.
    pub theta_peak: T,
    pub cattiness_peak: T,
    /// Distance in `θ` from the peak to where `C` first falls below the
    /// width target on the right-hand side.
    pub half_width: Option<T>,
}

/// Locates the cattiness resonance inside `samples` (ascending `θ` values):
/// grid argmax, then golden-section refinement between the neighbours.
///
/// Fails if the best sample sits on either end of the grid.
pub fn calibrate_u<T: Real>(n: usize, samples: &[T], width_target: T) -> Result<Calibration<T>> {
    if samples.len() < 3 || samples.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "calibration needs at least three strictly increasing samples".into(),
        ));
    }
    let values: Vec<T> = samples.par_iter().map(|&t| cattiness_at(n, t)).collect();
    let (best, _) =
        values.iter().enumerate().fold(
            (0, values[0]),
            |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) },
        );
    // off the comb C is zero up to roundoff, and its argmax is noise
    if best == 0 || best + 1 == samples.len() || values[best] <= T::default_epsilon().sqrt() {
        return Err(Error::NoPeakInBracket);
    }
    let c = |t: T| cattiness_at(n, t);
    let refined = golden_section_max(&c, samples[best - 1], samples[best + 1], lit(1e-12));
    let (theta_peak, cattiness_peak) = if c(refined) > values[best] {
        (refined, c(refined))
    } else {
        (samples[best], values[best])
    };
    let step = lit::<T>(1e-4) / from_usize::<T>(n) * cat_phase::<T>();
    let half_width = if cattiness_peak >= width_target {
        first_crossing(
            c,
            theta_peak,
            step,
            theta_peak + T::pi(),
            width_target,
            lit(1e-9),
        )
        .map(|x| x - theta_peak)
    } else {
        None
    };
    Ok(Calibration {
        theta_peak,
        cattiness_peak,
        half_width,
    })
}

fn golden_section_max<T: Real>(f: &impl Fn(T) -> T, mut lo: T, mut hi: T, tol: T) -> T {
    let inv_phi = (lit::<T>(5.0).sqrt() - T::one()) * lit(0.5);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    (lo + hi) * lit(0.5)
}
