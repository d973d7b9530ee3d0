//! Angle arithmetic on the circle and the modular congruence solvers used by
//! canonicalization.
//!
//! Everything works with canonical representatives in `[0, 2π)`, reduced
//! eagerly after every operation so half-open range tests like
//! `0 ≤ θ₂ < 2π/N` are plain comparisons. A representative within
//! [`ANGLE_EPS`] below `2π` is identified with `0` before any range check:
//! near the seam, a verdict must not depend on which side of a rounding
//! error the value landed.

use std::f64::consts::TAU;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

/// Wraparound tolerance for angle equality, in radians.
///
/// Canonicalization composes O(N) phase additions in double precision at
/// N ≤ 64, which leaves several digits of headroom below this cutoff.
pub const ANGLE_EPS: f64 = 1e-9;

/// Margin for the half-open window tests in the congruence solvers.
///
/// Structured inputs (translation-invariant walks among them) produce
/// window values sitting exactly on a cell edge; whether rounding noise
/// lands them a few ulp above or below must not change the branch taken.
/// Values this close to an edge count as on it, and the scan moves to the
/// equivalent candidate at the cell's other end.
const BRANCH_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PhaseError {
    #[error("angle must be finite, got {0}")]
    NonFinite(f64),
    #[error("cycle length must be at least 3, got {0}")]
    CycleTooShort(usize),
    #[error("{quantity} violates its congruence: residual {residual:.3e} rad")]
    CongruenceViolated {
        quantity: &'static str,
        residual: f64,
    },
}

/// An angle stored as its canonical representative in `[0, 2π)`.
///
/// Values within [`ANGLE_EPS`] below `2π` reduce to exactly `0`, so every
/// stored representative is either `0` or at least `ANGLE_EPS` away from the
/// seam. Comparisons go through [`Angle::distance`], which is wraparound
/// aware; the derived `PartialEq` is bitwise and only used where exact
/// reproducibility is the point.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Angle {
    radians: f64,
}

impl Angle {
    pub const ZERO: Angle = Angle { radians: 0.0 };

    /// Reduces an arbitrary finite value modulo 2π into `[0, 2π)`.
    pub fn new(radians: f64) -> Result<Angle, PhaseError> {
        if !radians.is_finite() {
            return Err(PhaseError::NonFinite(radians));
        }
        Ok(Self::wrap(radians))
    }

    /// Infallible reduction for values already known to be finite.
    pub(crate) fn wrap(radians: f64) -> Angle {
        let mut r = radians.rem_euclid(TAU);
        // rem_euclid can round up to exactly 2π for tiny negative inputs;
        // the seam rule folds that case together with near-2π values.
        if TAU - r <= ANGLE_EPS {
            r = 0.0;
        }
        Angle { radians: r }
    }

    /// The canonical representative in `[0, 2π)`.
    pub fn radians(self) -> f64 {
        self.radians
    }

    /// Wraparound distance on the circle: `min(|a−b|, 2π−|a−b|)`.
    pub fn distance(self, other: Angle) -> f64 {
        let d = (self.radians - other.radians).abs();
        d.min(TAU - d)
    }

    /// Wraparound equality at [`ANGLE_EPS`].
    pub fn approx_eq(self, other: Angle) -> bool {
        self.distance(other) <= ANGLE_EPS
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle::wrap(self.radians + rhs.radians)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle::wrap(self.radians - rhs.radians)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::wrap(-self.radians)
    }
}

/// Solution of the congruence pair `Nα ≡ β`, `Nl ≡ γ` (mod 2π) subject to
/// the window condition `reduce(δ + α + 2l) ∈ [0, 2π/N)`.
///
/// `alpha` lies in `[0, 4π/N)` for even `N` and `[0, 2π/N)` for odd `N`;
/// `alpha_index` and `gauge_index` record which lattice translates
/// (`α = β/N + 2π·alpha_index/N`, `l = γ/N + 2π·gauge_index/N`) were chosen.
#[derive(Clone, Copy, Debug)]
pub struct PhaseSolution {
    pub alpha: Angle,
    pub gauge_phase: Angle,
    pub alpha_index: usize,
    pub gauge_index: usize,
}

fn check_cycle_len(n: usize) -> Result<(), PhaseError> {
    if n < 3 {
        return Err(PhaseError::CycleTooShort(n));
    }
    Ok(())
}

/// Solves `Nα ≡ β`, `Nl ≡ γ` (mod 2π) with `reduce(δ + α + 2l) ∈ [0, 2π/N)`
/// and `α` in its parity-dependent range.
///
/// For odd `N` the doubled phases `2l` sweep the full `2π/N` lattice, so
/// `α = β/N` works and only `l` is scanned. For even `N` they sweep a `4π/N`
/// lattice: the scan tests the widened window `[−2π/N, 2π/N)` and, when the
/// hit `t` is negative, shifts `α` up by `2π/N` (which moves `t` into
/// `[0, 2π/N)` and keeps `Nα ≡ β`). Window edges are compared with a
/// [`BRANCH_EPS`] margin so boundary-exact inputs cannot flip branches on
/// rounding noise. A solution always exists; agreement with
/// [`solve_congruences_exhaustive`] is part of the acceptance suite.
pub fn solve_congruences(
    n: usize,
    beta: Angle,
    gamma: Angle,
    delta: Angle,
) -> Result<PhaseSolution, PhaseError> {
    check_cycle_len(n)?;
    let nf = n as f64;
    let window = TAU / nf;
    let alpha0 = beta.radians() / nf;
    for m2 in 0..n {
        let l = Angle::wrap(gamma.radians() / nf + TAU * m2 as f64 / nf);
        let t = Angle::wrap(delta.radians() + alpha0 + 2.0 * l.radians());
        if t.radians() < window - BRANCH_EPS {
            return Ok(PhaseSolution {
                alpha: Angle::wrap(alpha0),
                gauge_phase: l,
                alpha_index: 0,
                gauge_index: m2,
            });
        }
        if n % 2 == 0 && t.radians() >= TAU - window - BRANCH_EPS {
            // t represents a value in [−2π/N, 0).
            return Ok(PhaseSolution {
                alpha: Angle::wrap(alpha0 + window),
                gauge_phase: l,
                alpha_index: 1,
                gauge_index: m2,
            });
        }
    }
    unreachable!("the window condition admits a solution for every input")
}

/// Brute-force twin of [`solve_congruences`]: tries every lattice index pair
/// `(m₁, m₂)` in ascending order and returns the first that satisfies all
/// three range constraints. Kept public as the test oracle the analytic
/// branch must agree with.
pub fn solve_congruences_exhaustive(
    n: usize,
    beta: Angle,
    gamma: Angle,
    delta: Angle,
) -> Result<PhaseSolution, PhaseError> {
    check_cycle_len(n)?;
    let nf = n as f64;
    let window = TAU / nf;
    let alpha_bound = if n % 2 == 0 { 2.0 * window } else { window };
    for m1 in 0..n {
        let alpha = Angle::wrap(beta.radians() / nf + TAU * m1 as f64 / nf);
        if alpha.radians() >= alpha_bound {
            continue;
        }
        for m2 in 0..n {
            let l = Angle::wrap(gamma.radians() / nf + TAU * m2 as f64 / nf);
            let t = Angle::wrap(delta.radians() + alpha.radians() + 2.0 * l.radians());
            if t.radians() < window - BRANCH_EPS {
                return Ok(PhaseSolution {
                    alpha,
                    gauge_phase: l,
                    alpha_index: m1,
                    gauge_index: m2,
                });
            }
        }
    }
    unreachable!("the window condition admits a solution for every input")
}

/// The set of doubled gauge phases `{2l mod 2π : Nl ≡ 0 mod 2π}`:
/// `{4πm/N : 0 ≤ m ≤ N/2−1}` for even `N`, `{2πm/N : 0 ≤ m ≤ N−1}` for odd
/// `N`. Returned sorted ascending.
pub fn doubled_phase_lattice(n: usize) -> Result<Vec<Angle>, PhaseError> {
    check_cycle_len(n)?;
    let nf = n as f64;
    let lattice = if n % 2 == 0 {
        (0..n / 2)
            .map(|m| Angle::wrap(2.0 * TAU * m as f64 / nf))
            .collect()
    } else {
        (0..n).map(|m| Angle::wrap(TAU * m as f64 / nf)).collect()
    };
    Ok(lattice)
}

/// Doubles a gauge phase known to satisfy `Nl ≡ 0` (mod 2π) and verifies the
/// result lands on [`doubled_phase_lattice`].
pub fn doubled_phase_class(gauge_phase: Angle, n: usize) -> Result<Angle, PhaseError> {
    check_cycle_len(n)?;
    let residual = Angle::wrap(n as f64 * gauge_phase.radians()).distance(Angle::ZERO);
    if residual > ANGLE_EPS {
        return Err(PhaseError::CongruenceViolated {
            quantity: "N·l",
            residual,
        });
    }
    let doubled = Angle::wrap(2.0 * gauge_phase.radians());
    let off_lattice = doubled_phase_lattice(n)?
        .iter()
        .map(|point| point.distance(doubled))
        .fold(f64::INFINITY, f64::min);
    if off_lattice > ANGLE_EPS {
        return Err(PhaseError::CongruenceViolated {
            quantity: "2·l lattice membership",
            residual: off_lattice,
        });
    }
    Ok(doubled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    /// Oracle for solver outputs: re-checks every promise independently of
    /// which branch produced them.
    fn assert_solution_valid(n: usize, beta: Angle, gamma: Angle, delta: Angle, s: &PhaseSolution) {
        let nf = n as f64;
        let n_alpha = Angle::wrap(nf * s.alpha.radians());
        assert!(
            n_alpha.distance(beta) <= ANGLE_EPS,
            "N·α ≢ β: n={n} α={} β={}",
            s.alpha.radians(),
            beta.radians()
        );
        let n_l = Angle::wrap(nf * s.gauge_phase.radians());
        assert!(n_l.distance(gamma) <= ANGLE_EPS, "N·l ≢ γ");
        let t = Angle::wrap(delta.radians() + s.alpha.radians() + 2.0 * s.gauge_phase.radians());
        assert!(t.radians() < TAU / nf, "window miss: t={}", t.radians());
        let alpha_bound = if n % 2 == 0 { 2.0 * TAU / nf } else { TAU / nf };
        assert!(s.alpha.radians() < alpha_bound, "α out of parity range");
    }

    fn assert_same_solution(a: &PhaseSolution, b: &PhaseSolution) {
        assert_eq!(a.alpha_index, b.alpha_index);
        assert_eq!(a.gauge_index, b.gauge_index);
        assert!(a.alpha.distance(b.alpha) <= 1e-12);
        assert!(a.gauge_phase.distance(b.gauge_phase) <= 1e-12);
    }

    #[test]
    fn reduces_into_range() {
        assert_eq!(Angle::new(0.0).unwrap().radians(), 0.0);
        assert!((Angle::new(5.0 * PI).unwrap().radians() - PI).abs() <= 1e-15);
        assert!((Angle::new(-FRAC_PI_2).unwrap().radians() - 1.5 * PI).abs() <= 1e-15);
    }

    #[test]
    fn seam_values_snap_to_zero() {
        assert_eq!(Angle::new(TAU - 1e-12).unwrap().radians(), 0.0);
        assert_eq!(Angle::new(-1e-12).unwrap().radians(), 0.0);
        // Just outside the seam band nothing snaps.
        assert!(Angle::new(TAU - 1e-6).unwrap().radians() > 6.0);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(Angle::new(f64::NAN).is_err());
        assert!(Angle::new(f64::INFINITY).is_err());
    }

    #[test]
    fn distance_wraps_around_the_seam() {
        let a = Angle::new(0.1).unwrap();
        let b = Angle::new(TAU - 0.1).unwrap();
        assert!((a.distance(b) - 0.2).abs() <= 1e-12);
        assert!(a.approx_eq(Angle::new(0.1 + TAU).unwrap()));
    }

    #[test]
    fn arithmetic_stays_reduced() {
        let a = Angle::new(5.0).unwrap();
        let b = Angle::new(4.0).unwrap();
        let sum = a + b;
        assert!((0.0..TAU).contains(&sum.radians()));
        assert!((sum.radians() - (9.0 - TAU)).abs() <= 1e-12);
        assert!(((-a).radians() - (TAU - 5.0)).abs() <= 1e-12);
        assert!((a - b).distance(Angle::new(1.0).unwrap()) <= 1e-12);
    }

    #[test]
    fn lattice_matches_closed_forms() {
        let expect = |xs: &[f64]| xs.iter().map(|&x| Angle::wrap(x)).collect::<Vec<_>>();
        for (n, want) in [
            (4, expect(&[0.0, PI])),
            (3, expect(&[0.0, TAU / 3.0, 2.0 * TAU / 3.0])),
            (6, expect(&[0.0, TAU / 3.0, 2.0 * TAU / 3.0])),
        ] {
            let got = doubled_phase_lattice(n).unwrap();
            assert_eq!(got.len(), want.len(), "n={n}");
            for (g, w) in got.iter().zip(&want) {
                assert!(g.distance(*w) <= 1e-12, "n={n}");
            }
        }
        assert!(doubled_phase_lattice(2).is_err());
    }

    #[test]
    fn lattice_matches_brute_force() {
        // Brute force: double every solution l = 2πk/N of N·l ≡ 0 and dedup.
        for n in 3..=64usize {
            let mut brute: Vec<Angle> = (0..n)
                .map(|k| Angle::wrap(2.0 * TAU * k as f64 / n as f64))
                .collect();
            brute.sort_by(|a, b| a.radians().total_cmp(&b.radians()));
            brute.dedup_by(|a, b| a.distance(*b) <= ANGLE_EPS);
            let closed = doubled_phase_lattice(n).unwrap();
            assert_eq!(brute.len(), closed.len(), "n={n}");
            for (b, c) in brute.iter().zip(&closed) {
                assert!(b.distance(*c) <= 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn solves_zero_case() {
        let z = Angle::ZERO;
        let s = solve_congruences(5, z, z, z).unwrap();
        assert_eq!(s.alpha.radians(), 0.0);
        assert_eq!(s.gauge_phase.radians(), 0.0);
        assert_eq!((s.alpha_index, s.gauge_index), (0, 0));
        assert_solution_valid(5, z, z, z, &s);
    }

    #[test]
    fn solves_even_case_with_shifted_alpha() {
        let beta = Angle::new(PI).unwrap();
        let gamma = Angle::new(FRAC_PI_2).unwrap();
        let delta = Angle::new(0.3).unwrap();
        let s = solve_congruences(4, beta, gamma, delta).unwrap();
        let oracle = solve_congruences_exhaustive(4, beta, gamma, delta).unwrap();
        assert_same_solution(&s, &oracle);
        assert_solution_valid(4, beta, gamma, delta, &s);
        // Worked by hand: the narrow window misses at α = π/4, the widened
        // window hits at m₂ = 1 from below, so α shifts up to 3π/4.
        assert!(s.alpha.distance(Angle::wrap(3.0 * FRAC_PI_4)) <= 1e-12);
        assert!(s.gauge_phase.distance(Angle::wrap(5.0 * PI / 8.0)) <= 1e-12);
        assert_eq!((s.alpha_index, s.gauge_index), (1, 1));
    }

    #[test]
    fn solves_odd_case() {
        let beta = Angle::new(TAU / 3.0).unwrap();
        let s = solve_congruences(3, beta, Angle::ZERO, Angle::ZERO).unwrap();
        let oracle = solve_congruences_exhaustive(3, beta, Angle::ZERO, Angle::ZERO).unwrap();
        assert_same_solution(&s, &oracle);
        assert_solution_valid(3, beta, Angle::ZERO, Angle::ZERO, &s);
        assert!(s.alpha.distance(Angle::wrap(TAU / 9.0)) <= 1e-12);
        assert_eq!(s.gauge_phase.radians(), 0.0);
        assert_eq!((s.alpha_index, s.gauge_index), (0, 0));
    }

    #[test]
    fn solves_window_boundary_exactly() {
        // A translation-invariant frame pattern (every a = 0, every d = π at
        // N = 6) puts the window value exactly on the cell edge: the m₂ = 1
        // candidate sits at 2π − 2π/6 to the last ulp. The margin must route
        // this through the widened-window branch, yielding θ₂ = 0 with
        // α = l = 2π/6, not a θ₂ a full cell wide.
        let beta = Angle::wrap(6.0 * PI);
        let gamma = Angle::ZERO;
        let delta = Angle::wrap(-PI);
        let s = solve_congruences(6, beta, gamma, delta).unwrap();
        let oracle = solve_congruences_exhaustive(6, beta, gamma, delta).unwrap();
        assert_same_solution(&s, &oracle);
        assert_solution_valid(6, beta, gamma, delta, &s);
        assert!(s.alpha.distance(Angle::wrap(TAU / 6.0)) <= 1e-12);
        assert!(s.gauge_phase.distance(Angle::wrap(TAU / 6.0)) <= 1e-12);
        assert_eq!((s.alpha_index, s.gauge_index), (1, 1));
        let theta2 = Angle::wrap(delta.radians() + s.alpha.radians() + 2.0 * s.gauge_phase.radians());
        assert_eq!(theta2.radians(), 0.0);
    }

    #[test]
    fn rejects_short_cycles() {
        assert!(solve_congruences(2, Angle::ZERO, Angle::ZERO, Angle::ZERO).is_err());
        assert!(solve_congruences_exhaustive(0, Angle::ZERO, Angle::ZERO, Angle::ZERO).is_err());
    }

    #[test]
    fn doubled_phase_class_examples() {
        assert_eq!(doubled_phase_class(Angle::ZERO, 7).unwrap().radians(), 0.0);
        let got = doubled_phase_class(Angle::new(FRAC_PI_2).unwrap(), 4).unwrap();
        assert!(got.distance(Angle::wrap(PI)) <= 1e-12);
        let got = doubled_phase_class(Angle::new(TAU / 3.0).unwrap(), 3).unwrap();
        assert!(got.distance(Angle::wrap(2.0 * TAU / 3.0)) <= 1e-12);
        // 4·0.3 is nowhere near a multiple of 2π.
        assert!(doubled_phase_class(Angle::new(0.3).unwrap(), 4).is_err());
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent(x in -1.0e6..1.0e6f64) {
            let once = Angle::new(x).unwrap();
            let twice = Angle::new(once.radians()).unwrap();
            prop_assert_eq!(once.radians().to_bits(), twice.radians().to_bits());
            prop_assert!((0.0..TAU).contains(&once.radians()));
            prop_assert!(once.radians() == 0.0 || TAU - once.radians() > ANGLE_EPS);
        }

        #[test]
        fn solver_agrees_with_oracle(
            n in 3usize..=16,
            beta in 0.0..TAU,
            gamma in 0.0..TAU,
            delta in 0.0..TAU,
        ) {
            let (beta, gamma, delta) = (Angle::wrap(beta), Angle::wrap(gamma), Angle::wrap(delta));
            let s = solve_congruences(n, beta, gamma, delta).unwrap();
            let oracle = solve_congruences_exhaustive(n, beta, gamma, delta).unwrap();
            prop_assert_eq!(s.alpha_index, oracle.alpha_index);
            prop_assert_eq!(s.gauge_index, oracle.gauge_index);
            prop_assert!(s.alpha.distance(oracle.alpha) <= 1e-12);
            prop_assert!(s.gauge_phase.distance(oracle.gauge_phase) <= 1e-12);
            assert_solution_valid(n, beta, gamma, delta, &s);
        }

        #[test]
        fn doubled_class_of_valid_phases_is_on_lattice(n in 3usize..=32, k in 0usize..32) {
            let l = Angle::wrap(TAU * (k % n) as f64 / n as f64);
            let doubled = doubled_phase_class(l, n).unwrap();
            let lattice = doubled_phase_lattice(n).unwrap();
            prop_assert!(lattice.iter().any(|p| p.distance(doubled) <= ANGLE_EPS));
        }
    }
}
