//! Canonical form and unitary equivalence of cycle walks.
//!
//! Every cycle walk is gauge-equivalent to one whose frames have phases
//! `(a, b, c, d) = (0, θ_x, π−θ_x+α, α)` with the same `r` values, where
//! `θ₀ = 0`, `θ₁ ∈ [0, 2π/N)`, and `α` lies in a parity-dependent window
//! (`[0, 4π/N)` for even `N`, `[0, 2π/N)` for odd). When every `r_x` is
//! strictly between 0 and 1 this reduced parameter set is unique, which
//! turns the equivalence decision into a parameter comparison backed by an
//! explicitly verified gauge witness. At the degenerate boundary
//! (`r_x ∈ {0, 1}`) uniqueness fails and mismatches are reported as
//! indeterminate rather than decided.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::linalg::{C64, CMat, Mat2};
use crate::phase::{solve_congruences, Angle, PhaseError, ANGLE_EPS};
use crate::walk::{
    amp_index, build_from_frames, extract_frames, next_vertex, prev_vertex, CycleWalk,
    GaugeTransform, LocalFrame, WalkError, DEGENERACY_EPS, UNITARITY_EPS,
};

/// Absolute tolerance for comparing canonical `r` values.
pub const PARAM_EPS: f64 = 1e-9;

/// Max-abs tolerance for witness verification in equivalence checks.
pub const WITNESS_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CanonicalError {
    #[error("r[{index}] = {value} lies outside [0, 1]")]
    RadiusOutOfRange { index: usize, value: f64 },
    #[error("parameter list {name} has {found} entries, expected {expected}")]
    WrongParameterCount {
        name: &'static str,
        found: usize,
        expected: usize,
    },
    #[error("canonical rebuild does not match the gauged walk: residual {residual:.3e}")]
    VerificationFailed { residual: f64 },
    #[error("composed witness fails to map the first walk onto the second: residual {residual:.3e}")]
    WitnessVerification { residual: f64 },
    #[error("walk is not translation invariant: residual {residual:.3e}")]
    NotTranslationInvariant { residual: f64 },
    #[error("{detail} (residual {residual:.3e})")]
    InternalInvariant { detail: &'static str, residual: f64 },
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// The reduced parameter set `(r, θ, α)` of a walk in canonical form.
///
/// Construction validates lengths and `r` ranges; the canonical *range*
/// restrictions on `θ` and `α` are reported by [`range_violations`] rather
/// than enforced, so files holding out-of-range angles can be loaded,
/// inspected, and warned about. The `degenerate` flag is recomputed from the
/// `r` values, never trusted from input.
///
/// [`range_violations`]: CanonicalParams::range_violations
#[derive(Clone, Debug)]
pub struct CanonicalParams {
    n: usize,
    r: Vec<f64>,
    theta: Vec<Angle>,
    alpha: Angle,
    degenerate: bool,
}

impl CanonicalParams {
    pub fn new(
        n: usize,
        r: Vec<f64>,
        theta: Vec<Angle>,
        alpha: Angle,
    ) -> Result<CanonicalParams, CanonicalError> {
        if n < 3 {
            return Err(WalkError::CycleTooShort(n).into());
        }
        if r.len() != n {
            return Err(CanonicalError::WrongParameterCount {
                name: "r",
                found: r.len(),
                expected: n,
            });
        }
        if theta.len() != n {
            return Err(CanonicalError::WrongParameterCount {
                name: "theta",
                found: theta.len(),
                expected: n,
            });
        }
        for (index, &value) in r.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(CanonicalError::RadiusOutOfRange { index, value });
            }
        }
        let degenerate = r
            .iter()
            .any(|&v| v <= DEGENERACY_EPS || v >= 1.0 - DEGENERACY_EPS);
        Ok(CanonicalParams {
            n,
            r,
            theta,
            alpha,
            degenerate,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn theta(&self) -> &[Angle] {
        &self.theta
    }

    pub fn alpha(&self) -> Angle {
        self.alpha
    }

    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    /// Human-readable list of canonical range violations: θ₀ must vanish,
    /// θ₁ must lie under 2π/N, and α under its parity bound. Empty for every
    /// output of [`canonicalize`].
    pub fn range_violations(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let window = std::f64::consts::TAU / self.n as f64;
        if self.theta[0] != Angle::ZERO {
            violations.push(format!(
                "theta[0] = {:.17e} rad, must be 0",
                self.theta[0].radians()
            ));
        }
        if self.theta[1].radians() >= window {
            violations.push(format!(
                "theta[1] = {:.17e} rad, must lie in [0, {:.17e})",
                self.theta[1].radians(),
                window
            ));
        }
        let alpha_bound = if self.n % 2 == 0 { 2.0 * window } else { window };
        if self.alpha.radians() >= alpha_bound {
            violations.push(format!(
                "alpha = {:.17e} rad, must lie in [0, {:.17e}) for N = {}",
                self.alpha.radians(),
                alpha_bound,
                self.n
            ));
        }
        violations
    }

    pub fn is_canonical(&self) -> bool {
        self.range_violations().is_empty()
    }

    /// Largest single-parameter separation from `other`: absolute for `r`,
    /// wraparound for angles. Infinite when the cycle lengths differ.
    pub fn max_distance(&self, other: &CanonicalParams) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        let mut dist = self.alpha.distance(other.alpha);
        for x in 0..self.n {
            dist = dist.max((self.r[x] - other.r[x]).abs());
            dist = dist.max(self.theta[x].distance(other.theta[x]));
        }
        dist
    }

    /// Materializes the canonical walk: frames `(r_x, 0, θ_x, π−θ_x+α, α)`
    /// fed through [`build_from_frames`].
    pub fn build(&self) -> CycleWalk {
        let frames: Vec<LocalFrame> = (0..self.n)
            .map(|x| {
                LocalFrame::new(
                    self.r[x],
                    Angle::ZERO,
                    self.theta[x],
                    Angle::wrap(PI - self.theta[x].radians() + self.alpha.radians()),
                    self.alpha,
                )
                .expect("validated parameters make valid frames")
            })
            .collect();
        build_from_frames(&frames).expect("canonical frames build a valid walk")
    }
}

/// Result of [`canonicalize`]: the reduced parameters plus the gauge that
/// realizes them, `e^{il} W U W† = params.build()`.
#[derive(Clone, Debug)]
pub struct Canonicalization {
    pub params: CanonicalParams,
    pub witness: GaugeTransform,
}

/// Reduces a walk to canonical form with the default verification
/// tolerance.
pub fn canonicalize(walk: &CycleWalk) -> Result<Canonicalization, CanonicalError> {
    canonicalize_with_tolerance(walk, UNITARITY_EPS)
}

/// Reduces a walk to canonical form, verifying the witness at
/// `verification_tol`.
///
/// The construction follows the uniqueness argument: extract frames, solve
/// `Nα ≡ Σd − Σa` and `Nl ≡ Σa` subject to θ₁ landing in its window, then
/// absorb the remaining phases into per-vertex diagonal rotations
/// `diag(e^{ip_x}, e^{iq_x})`. The relation the `c` angles must satisfy is
/// asserted rather than used, and the final identity
/// `e^{il} W U W† = build(params)` is checked before anything is returned.
pub fn canonicalize_with_tolerance(
    walk: &CycleWalk,
    verification_tol: f64,
) -> Result<Canonicalization, CanonicalError> {
    let n = walk.n();
    let (frames, w0) = extract_frames(walk)?;
    let a: Vec<f64> = frames.iter().map(|f| f.a().radians()).collect();
    let b: Vec<f64> = frames.iter().map(|f| f.b().radians()).collect();
    let c: Vec<f64> = frames.iter().map(|f| f.c().radians()).collect();
    let d: Vec<f64> = frames.iter().map(|f| f.d().radians()).collect();

    let beta = Angle::wrap(d.iter().sum::<f64>() - a.iter().sum::<f64>());
    let gamma = Angle::wrap(a.iter().sum::<f64>());
    let delta = Angle::wrap(-a[1] - d[1] + b[1] - b[0]);
    let solution = solve_congruences(n, beta, gamma, delta)?;
    let alpha = solution.alpha;
    let l = solution.gauge_phase.radians();

    // Diagonal gauge phases and canonical angles, all running sums over the
    // chosen (α, l) representatives.
    let mut p = vec![0.0f64; n];
    let mut q = vec![0.0f64; n];
    q[0] = a[0] - b[0];
    let mut theta = vec![Angle::ZERO; n];
    let (mut a_before, mut d_sum, mut ad_sum) = (0.0f64, 0.0f64, 0.0f64);
    for j in 1..n {
        let jf = j as f64;
        a_before += a[j - 1];
        p[j] = a_before - jf * l;
        d_sum += d[j];
        q[j] = -d_sum + jf * (alpha.radians() + l) + a[0] - b[0];
        ad_sum += a[j] + d[j];
        theta[j] = Angle::wrap(-ad_sum + b[j] - b[0] + jf * (alpha.radians() + 2.0 * l));
    }

    // The c angles are determined by orthogonality, so the gauge derived
    // from (a, b, d) must map them onto the canonical between-frame phase as
    // well. Skip vertices where c was pinned and carries no information.
    for x in 0..n {
        if frames[x].degenerate() {
            continue;
        }
        let lhs = Angle::wrap(c[x] + p[x] - q[prev_vertex(x, n)] - l);
        let rhs = Angle::wrap(-theta[x].radians() + alpha.radians() + PI);
        let residual = lhs.distance(rhs);
        if residual > ANGLE_EPS {
            return Err(CanonicalError::InternalInvariant {
                detail: "between-frame phase relation for c failed",
                residual,
            });
        }
    }

    let r: Vec<f64> = frames.iter().map(LocalFrame::r).collect();
    let params = CanonicalParams::new(n, r, theta, alpha)?;

    let diag_blocks: Vec<Mat2> = (0..n)
        .map(|x| {
            Mat2([
                [C64::from_polar(1.0, p[x]), C64::ZERO],
                [C64::ZERO, C64::from_polar(1.0, q[x])],
            ])
        })
        .collect();
    let diagonal = GaugeTransform::new(diag_blocks, solution.gauge_phase)?;
    let witness = diagonal.compose(&w0)?;

    let canonical = params.build();
    let residual = witness
        .conjugate_matrix(walk.matrix())
        .max_abs_diff(canonical.matrix());
    if residual > verification_tol {
        return Err(CanonicalError::VerificationFailed { residual });
    }
    Ok(Canonicalization { params, witness })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivalenceStatus {
    Equivalent,
    NotEquivalent,
    /// Canonical parameters differ but a degenerate vertex voids their
    /// uniqueness, so the mismatch proves nothing.
    IndeterminateDegenerate,
}

impl fmt::Display for EquivalenceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            EquivalenceStatus::Equivalent => "EQUIVALENT",
            EquivalenceStatus::NotEquivalent => "NOT_EQUIVALENT",
            EquivalenceStatus::IndeterminateDegenerate => "INDETERMINATE_DEGENERATE",
        };
        f.write_str(label)
    }
}

/// Outcome of [`are_equivalent`]. A witness is present exactly when the
/// status is `Equivalent`, and it has been verified to conjugate the first
/// walk onto the second within [`WITNESS_EPS`].
#[derive(Clone, Debug)]
pub struct EquivalenceVerdict {
    pub status: EquivalenceStatus,
    pub witness: Option<GaugeTransform>,
    pub max_param_distance: f64,
}

/// Decides unitary equivalence of two walks on the same cycle by comparing
/// canonical parameters.
///
/// Matching parameters yield `Equivalent` with the composed, verified
/// witness. Mismatched parameters yield `NotEquivalent` only when both
/// walks are non-degenerate; otherwise the verdict is indeterminate, since
/// uniqueness of the parameters is only guaranteed for 0 < r < 1. A witness
/// that fails verification despite matching parameters is an error for
/// non-degenerate walks and indeterminate for degenerate ones.
pub fn are_equivalent(
    u1: &CycleWalk,
    u2: &CycleWalk,
) -> Result<EquivalenceVerdict, CanonicalError> {
    if u1.n() != u2.n() {
        return Err(WalkError::DimensionMismatch {
            found: u2.dim(),
            expected: u1.dim(),
        }
        .into());
    }
    let c1 = canonicalize(u1)?;
    let c2 = canonicalize(u2)?;
    let max_param_distance = c1.params.max_distance(&c2.params);
    let degenerate = c1.params.degenerate() || c2.params.degenerate();
    if max_param_distance <= PARAM_EPS {
        // Undo the first canonicalization, then redo the second's backwards:
        // both walks sit over the same canonical matrix.
        let witness = c2.witness.inverse().compose(&c1.witness)?;
        let residual = witness
            .conjugate_matrix(u1.matrix())
            .max_abs_diff(u2.matrix());
        if residual <= WITNESS_EPS {
            Ok(EquivalenceVerdict {
                status: EquivalenceStatus::Equivalent,
                witness: Some(witness),
                max_param_distance,
            })
        } else if degenerate {
            Ok(EquivalenceVerdict {
                status: EquivalenceStatus::IndeterminateDegenerate,
                witness: None,
                max_param_distance,
            })
        } else {
            Err(CanonicalError::WitnessVerification { residual })
        }
    } else if degenerate {
        Ok(EquivalenceVerdict {
            status: EquivalenceStatus::IndeterminateDegenerate,
            witness: None,
            max_param_distance,
        })
    } else {
        Ok(EquivalenceVerdict {
            status: EquivalenceStatus::NotEquivalent,
            witness: None,
            max_param_distance,
        })
    }
}

/// The vertex rotation `S e_i^x = e_i^{x+1}` as a matrix.
fn translation_matrix(n: usize) -> CMat {
    let mut s = CMat::zeros(2 * n);
    for x in 0..n {
        for i in 0..2 {
            s[(amp_index(next_vertex(x, n), i), amp_index(x, i))] = C64::ONE;
        }
    }
    s
}

fn translation_residual(walk: &CycleWalk) -> f64 {
    let s = translation_matrix(walk.n());
    s.mul(walk.matrix())
        .mul(&s.adjoint())
        .max_abs_diff(walk.matrix())
}

/// Whether the walk commutes with the rotation of vertices,
/// `‖S U S† − U‖ ≤` [`UNITARITY_EPS`].
pub fn is_translation_invariant(walk: &CycleWalk) -> bool {
    translation_residual(walk) <= UNITARITY_EPS
}

/// Two-parameter canonical form of a translation-invariant walk.
///
/// Requires [`is_translation_invariant`]; the full canonicalization then
/// provably yields constant `r` and vanishing `θ`, which is checked before
/// collapsing to `(r, α)`.
pub fn canonicalize_translation_invariant(
    walk: &CycleWalk,
) -> Result<(f64, Angle), CanonicalError> {
    let residual = translation_residual(walk);
    if residual > UNITARITY_EPS {
        return Err(CanonicalError::NotTranslationInvariant { residual });
    }
    let c = canonicalize(walk)?;
    for theta in c.params.theta() {
        let off = theta.distance(Angle::ZERO);
        if off > PARAM_EPS {
            return Err(CanonicalError::InternalInvariant {
                detail: "translation-invariant walk produced a nonzero canonical theta",
                residual: off,
            });
        }
    }
    let r0 = c.params.r()[0];
    for &r in c.params.r() {
        if (r - r0).abs() > PARAM_EPS {
            return Err(CanonicalError::InternalInvariant {
                detail: "translation-invariant walk produced non-constant r",
                residual: (r - r0).abs(),
            });
        }
    }
    Ok((r0, c.params.alpha()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{random_cycle_walk, random_gauge, random_translation_invariant};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, TAU};

    /// Random parameters inside every canonical range, r well clear of the
    /// degenerate boundary.
    fn sample_params(n: usize, rng: &mut ChaCha8Rng) -> CanonicalParams {
        let window = TAU / n as f64;
        let alpha_bound = if n % 2 == 0 { 2.0 * window } else { window };
        let r = (0..n).map(|_| 0.1 + 0.8 * rng.random::<f64>()).collect();
        let mut theta = vec![Angle::ZERO; n];
        theta[1] = Angle::wrap(rng.random::<f64>() * window);
        for slot in theta.iter_mut().skip(2) {
            *slot = Angle::wrap(rng.random::<f64>() * TAU);
        }
        let alpha = Angle::wrap(rng.random::<f64>() * alpha_bound);
        CanonicalParams::new(n, r, theta, alpha).unwrap()
    }

    #[test]
    fn params_validation() {
        let ok = CanonicalParams::new(
            3,
            vec![0.5; 3],
            vec![Angle::ZERO; 3],
            Angle::ZERO,
        )
        .unwrap();
        assert!(!ok.degenerate());
        assert!(matches!(
            CanonicalParams::new(3, vec![0.5, 1.5, 0.5], vec![Angle::ZERO; 3], Angle::ZERO),
            Err(CanonicalError::RadiusOutOfRange { index: 1, .. })
        ));
        assert!(matches!(
            CanonicalParams::new(3, vec![0.5; 2], vec![Angle::ZERO; 3], Angle::ZERO),
            Err(CanonicalError::WrongParameterCount { name: "r", .. })
        ));
        assert!(CanonicalParams::new(2, vec![0.5; 2], vec![Angle::ZERO; 2], Angle::ZERO).is_err());
        let degenerate =
            CanonicalParams::new(3, vec![1.0, 0.5, 0.5], vec![Angle::ZERO; 3], Angle::ZERO)
                .unwrap();
        assert!(degenerate.degenerate());
    }

    #[test]
    fn range_violations_are_reported() {
        let window = TAU / 4.0;
        let good = CanonicalParams::new(
            4,
            vec![0.5; 4],
            vec![Angle::ZERO, Angle::wrap(0.9 * window), Angle::wrap(3.0), Angle::wrap(5.0)],
            Angle::wrap(1.9 * window),
        )
        .unwrap();
        assert!(good.is_canonical());
        let bad = CanonicalParams::new(
            4,
            vec![0.5; 4],
            vec![Angle::wrap(0.1), Angle::wrap(1.1 * window), Angle::ZERO, Angle::ZERO],
            Angle::wrap(2.5 * window),
        )
        .unwrap();
        let violations = bad.range_violations();
        assert_eq!(violations.len(), 3);
        assert!(violations[0].contains("theta[0]"));
        assert!(violations[1].contains("theta[1]"));
        assert!(violations[2].contains("alpha"));
        // Odd N halves the alpha bound: 1.9·(2π/5) violates it at N = 5.
        let odd = CanonicalParams::new(
            5,
            vec![0.5; 5],
            vec![Angle::ZERO; 5],
            Angle::wrap(1.9 * TAU / 5.0),
        )
        .unwrap();
        assert_eq!(odd.range_violations().len(), 1);
    }

    #[test]
    fn build_writes_the_canonical_entries() {
        let n = 4;
        let r = vec![0.6, 0.3, 0.8, 0.45];
        let theta = vec![
            Angle::ZERO,
            Angle::wrap(0.7),
            Angle::wrap(2.9),
            Angle::wrap(4.4),
        ];
        let alpha = Angle::wrap(0.9);
        let params = CanonicalParams::new(n, r.clone(), theta.clone(), alpha).unwrap();
        let walk = params.build();
        let m = walk.matrix();
        for x in 0..n {
            let s = (1.0 - r[x] * r[x]).sqrt();
            let fwd = amp_index(next_vertex(x, n), 0);
            let bwd = amp_index(prev_vertex(x, n), 1);
            let tx = theta[x].radians();
            let al = alpha.radians();
            assert!((m[(fwd, amp_index(x, 0))] - C64::new(r[x], 0.0)).norm() <= 1e-12);
            assert!((m[(fwd, amp_index(x, 1))] - C64::from_polar(s, -tx)).norm() <= 1e-12);
            assert!(
                (m[(bwd, amp_index(x, 0))] - C64::from_polar(-s, tx - al)).norm() <= 1e-12,
                "x={x}"
            );
            assert!((m[(bwd, amp_index(x, 1))] - C64::from_polar(r[x], -al)).norm() <= 1e-12);
        }
    }

    #[test]
    fn round_trip_recovers_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for n in 3..=8usize {
            for _ in 0..12 {
                let params = sample_params(n, &mut rng);
                let walk = params.build();
                let canon = canonicalize(&walk).unwrap();
                assert!(
                    canon.params.max_distance(&params) <= 1e-9,
                    "n={n} distance={}",
                    canon.params.max_distance(&params)
                );
                assert!(canon.params.is_canonical());
                assert!(!canon.params.degenerate());
                // A walk already in canonical form needs no gauge.
                assert!(canon.witness.global_phase().distance(Angle::ZERO) <= 1e-9);
                for block in canon.witness.blocks() {
                    assert!(block.max_abs_diff(&Mat2::identity()) <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn canonicalize_shift_walk() {
        let canon = canonicalize(&CycleWalk::shift(5).unwrap()).unwrap();
        assert!(canon.params.degenerate());
        assert!(canon.params.is_canonical());
        assert_eq!(canon.params.alpha(), Angle::ZERO);
        for x in 0..5 {
            assert_eq!(canon.params.r()[x], 1.0);
            assert_eq!(canon.params.theta()[x], Angle::ZERO);
        }
    }

    #[test]
    fn reflecting_walk_with_zero_alpha_round_trips() {
        // r = 0 is the other degenerate boundary; with α = 0 the surviving
        // phases are consistent and canonicalization carries the flag
        // through without erroring.
        let params = CanonicalParams::new(
            4,
            vec![0.0; 4],
            vec![Angle::ZERO, Angle::wrap(0.8), Angle::wrap(2.2), Angle::wrap(4.0)],
            Angle::ZERO,
        )
        .unwrap();
        let canon = canonicalize(&params.build()).unwrap();
        assert!(canon.params.degenerate());
        assert!(canon.params.max_distance(&params) <= 1e-9);
    }

    #[test]
    fn params_are_gauge_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 3..=6usize {
            for seed in 0..8u64 {
                let walk = random_cycle_walk(n, 100 * n as u64 + seed, false).unwrap();
                let gauge = random_gauge(n, &mut rng).unwrap();
                let moved = gauge.apply(&walk).unwrap();
                let base = canonicalize(&walk).unwrap().params;
                let gauged = canonicalize(&moved).unwrap().params;
                assert!(
                    base.max_distance(&gauged) <= 1e-9,
                    "n={n} seed={seed} distance={}",
                    base.max_distance(&gauged)
                );
            }
        }
    }

    #[test]
    fn hadamard_walk_two_parameter_form() {
        // One Hadamard frame everywhere: r = 1/√2, a = b = c = 0, d = π.
        // By hand: β = Nπ, γ = 0, δ = −π. For N = 5, α = π reduced mod 2π/5
        // is π/5. For N = 6 the window value sits exactly on the cell edge
        // and the solution shifts up to α = 2π/6 with l = 2π/6.
        let frame = LocalFrame::new(
            FRAC_1_SQRT_2,
            Angle::ZERO,
            Angle::ZERO,
            Angle::ZERO,
            Angle::wrap(PI),
        )
        .unwrap();
        let (r5, a5) =
            canonicalize_translation_invariant(&build_from_frames(&vec![frame; 5]).unwrap())
                .unwrap();
        assert!((r5 - FRAC_1_SQRT_2).abs() <= 1e-12);
        assert!(a5.distance(Angle::wrap(PI / 5.0)) <= 1e-12);
        let (r6, a6) =
            canonicalize_translation_invariant(&build_from_frames(&vec![frame; 6]).unwrap())
                .unwrap();
        assert!((r6 - FRAC_1_SQRT_2).abs() <= 1e-12);
        assert!(a6.distance(Angle::wrap(TAU / 6.0)) <= 1e-12);
    }

    #[test]
    fn equivalence_of_gauge_related_walks() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in [3usize, 4, 6] {
            let walk = random_cycle_walk(n, 500 + n as u64, false).unwrap();
            let gauge = random_gauge(n, &mut rng).unwrap();
            let moved = gauge.apply(&walk).unwrap();
            let verdict = are_equivalent(&walk, &moved).unwrap();
            assert_eq!(verdict.status, EquivalenceStatus::Equivalent);
            assert!(verdict.max_param_distance <= 1e-9);
            let witness = verdict.witness.expect("equivalent verdicts carry a witness");
            let residual = witness
                .conjugate_matrix(walk.matrix())
                .max_abs_diff(moved.matrix());
            assert!(residual <= WITNESS_EPS, "n={n} residual={residual:.3e}");
        }
    }

    #[test]
    fn self_equivalence_has_identity_class_witness() {
        let walk = random_cycle_walk(4, 11, true).unwrap();
        let verdict = are_equivalent(&walk, &walk).unwrap();
        assert_eq!(verdict.status, EquivalenceStatus::Equivalent);
        assert_eq!(verdict.max_param_distance, 0.0);
        let witness = verdict.witness.unwrap();
        let moved = witness.conjugate_matrix(walk.matrix());
        assert!(moved.max_abs_diff(walk.matrix()) <= 1e-12);
    }

    #[test]
    fn theta_window_shift_is_not_equivalent() {
        let n = 4;
        let window = TAU / n as f64;
        let base = sample_params(n, &mut ChaCha8Rng::seed_from_u64(3));
        let mut shifted_theta = base.theta().to_vec();
        shifted_theta[1] = Angle::wrap(shifted_theta[1].radians() * 0.5);
        let spread = PI / n as f64;
        let lower = CanonicalParams::new(n, base.r().to_vec(), shifted_theta.clone(), base.alpha())
            .unwrap();
        shifted_theta[1] = Angle::wrap(shifted_theta[1].radians() + spread);
        assert!(shifted_theta[1].radians() < window);
        let upper = CanonicalParams::new(n, base.r().to_vec(), shifted_theta, base.alpha())
            .unwrap();
        let verdict = are_equivalent(&lower.build(), &upper.build()).unwrap();
        assert_eq!(verdict.status, EquivalenceStatus::NotEquivalent);
        assert!(verdict.witness.is_none());
        assert!((verdict.max_param_distance - spread).abs() <= 1e-9);
    }

    #[test]
    fn single_parameter_perturbations_are_detected() {
        let n = 5;
        let params = sample_params(n, &mut ChaCha8Rng::seed_from_u64(17));
        let base = params.build();
        let mut r = params.r().to_vec();
        r[2] = (r[2] - 1e-3).max(0.05);
        let moved_r = CanonicalParams::new(n, r, params.theta().to_vec(), params.alpha()).unwrap();
        assert_eq!(
            are_equivalent(&base, &moved_r.build()).unwrap().status,
            EquivalenceStatus::NotEquivalent
        );
        let mut theta = params.theta().to_vec();
        theta[3] = Angle::wrap(theta[3].radians() + 1e-3);
        let moved_theta =
            CanonicalParams::new(n, params.r().to_vec(), theta, params.alpha()).unwrap();
        assert_eq!(
            are_equivalent(&base, &moved_theta.build()).unwrap().status,
            EquivalenceStatus::NotEquivalent
        );
        let alpha = Angle::wrap((params.alpha().radians() + 1e-3) % (TAU / n as f64));
        let moved_alpha =
            CanonicalParams::new(n, params.r().to_vec(), params.theta().to_vec(), alpha).unwrap();
        assert_eq!(
            are_equivalent(&base, &moved_alpha.build()).unwrap().status,
            EquivalenceStatus::NotEquivalent
        );
    }

    #[test]
    fn degenerate_mismatches_are_indeterminate() {
        let shift = CycleWalk::shift(4).unwrap();
        let twisted = CanonicalParams::new(
            4,
            vec![1.0; 4],
            vec![Angle::ZERO; 4],
            Angle::wrap(PI / 2.0),
        )
        .unwrap()
        .build();
        let verdict = are_equivalent(&shift, &twisted).unwrap();
        assert_eq!(verdict.status, EquivalenceStatus::IndeterminateDegenerate);
        assert!(verdict.witness.is_none());
        // Matching degenerate forms still decide cleanly.
        let verdict = are_equivalent(&shift, &shift).unwrap();
        assert_eq!(verdict.status, EquivalenceStatus::Equivalent);
        // A gauge-scrambled shift may land on different raw phases, but must
        // never be called NotEquivalent.
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let gauge = random_gauge(4, &mut rng).unwrap();
        let scrambled = gauge.apply(&shift).unwrap();
        let verdict = are_equivalent(&shift, &scrambled).unwrap();
        assert_ne!(verdict.status, EquivalenceStatus::NotEquivalent);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let u3 = CycleWalk::shift(3).unwrap();
        let u4 = CycleWalk::shift(4).unwrap();
        assert!(matches!(
            are_equivalent(&u3, &u4),
            Err(CanonicalError::Walk(WalkError::DimensionMismatch { .. }))
        ));
    }

    #[test]
    fn translation_invariance_detection() {
        assert!(is_translation_invariant(&CycleWalk::shift(6).unwrap()));
        assert!(is_translation_invariant(
            &random_translation_invariant(5, 8).unwrap()
        ));
        // Generic independent frames break the symmetry.
        let generic = random_cycle_walk(5, 21, false).unwrap();
        assert!(!is_translation_invariant(&generic));
        assert!(matches!(
            canonicalize_translation_invariant(&generic),
            Err(CanonicalError::NotTranslationInvariant { .. })
        ));
    }

    #[test]
    fn translation_invariant_round_trip() {
        let n = 7;
        let alpha = Angle::wrap(0.4 * TAU / n as f64);
        let params =
            CanonicalParams::new(n, vec![0.6; n], vec![Angle::ZERO; n], alpha).unwrap();
        let walk = params.build();
        let (r, got_alpha) = canonicalize_translation_invariant(&walk).unwrap();
        assert!((r - 0.6).abs() <= 1e-9);
        assert!(got_alpha.distance(alpha) <= 1e-9);
        assert_eq!(
            canonicalize_translation_invariant(&CycleWalk::shift(4).unwrap()).unwrap(),
            (1.0, Angle::ZERO)
        );
        // Random translation-invariant walks keep θ ≡ 0 in the full form.
        let sampled = random_translation_invariant(6, 77).unwrap();
        let full = canonicalize(&sampled).unwrap();
        for theta in full.params.theta() {
            assert!(theta.distance(Angle::ZERO) <= 1e-9);
        }
    }

    #[test]
    fn canonicalization_is_idempotent() {
        for (n, seed) in [(3usize, 4u64), (6, 9), (9, 1)] {
            let walk = random_cycle_walk(n, seed, true).unwrap();
            let first = canonicalize(&walk).unwrap();
            let second = canonicalize(&first.params.build()).unwrap();
            assert!(
                first.params.max_distance(&second.params) <= 1e-9,
                "n={n} seed={seed}"
            );
        }
    }
}
