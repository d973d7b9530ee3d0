//! Evolution, vertex distributions, and spectra of cycle walks.
//!
//! These are the observables unitary equivalence preserves: the per-vertex
//! probability distribution of an evolved state is unchanged when walk and
//! state are moved by the same gauge (the gauge acts within each vertex's
//! coin space), and the spectrum is unchanged up to the gauge's global
//! phase factor.

use thiserror::Error;

use crate::linalg::{C64, CMat, LinalgError};
use crate::phase::Angle;
use crate::walk::{amp_index, CycleWalk, WalkError};

/// Construction tolerance on `|‖ψ‖ − 1|` for [`WalkState::new`].
pub const NORM_EPS: f64 = 1e-10;

/// Allowed norm drift of evolved states before [`evolve`] gives up.
pub const NORM_DRIFT_EPS: f64 = 1e-9;

/// Per-pair bound on `‖Uv − λv‖` accepted by [`spectrum`].
pub const SPECTRUM_RESIDUAL_EPS: f64 = 1e-8;

/// Angular threshold for multiset comparison of spectra.
pub const SPECTRUM_MATCH_EPS: f64 = 1e-7;

/// Eigenvalues of the Hermitian part closer than this are treated as one
/// invariant subspace and separated by the anti-Hermitian part instead.
const CLUSTER_GAP: f64 = 1e-7;

/// Probability sums may deviate from 1 by twice the state-norm tolerance
/// plus drift, so the distribution gate is one order looser than NORM_EPS.
const PROBABILITY_SUM_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("state has {found} amplitudes, expected {expected}")]
    StateLength { found: usize, expected: usize },
    #[error("state norm {norm} is not 1 within {tolerance:e}")]
    NotNormalized { norm: f64, tolerance: f64 },
    #[error("state norm {norm:.3e} is too small to normalize")]
    VanishingNorm { norm: f64 },
    #[error("basis label (vertex {vertex}, component {component}) is out of range for N = {n}")]
    BasisIndex {
        vertex: usize,
        component: usize,
        n: usize,
    },
    #[error("state dimension {state_dim} does not match walk dimension {walk_dim}")]
    DimensionMismatch { state_dim: usize, walk_dim: usize },
    #[error("probabilities sum to {sum}, not 1 within {tolerance:e}")]
    ProbabilitySum { sum: f64, tolerance: f64 },
    #[error("state norm drifted to {norm} after {step} steps")]
    NormDrift { step: usize, norm: f64 },
    #[error("eigenpair residual {residual:.3e} exceeds {tolerance:e}")]
    EigenResidual { residual: f64, tolerance: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Walk(#[from] WalkError),
}

fn l2_norm(amplitudes: &[C64]) -> f64 {
    amplitudes
        .iter()
        .map(C64::norm_sqr)
        .sum::<f64>()
        .sqrt()
}

/// A unit vector over the walk's amplitude space, `2N` entries in
/// `2x + i` order.
#[derive(Clone, Debug)]
pub struct WalkState {
    n: usize,
    amplitudes: Vec<C64>,
}

impl WalkState {
    pub fn new(n: usize, amplitudes: Vec<C64>) -> Result<WalkState, DynamicsError> {
        if n < 3 {
            return Err(WalkError::CycleTooShort(n).into());
        }
        if amplitudes.len() != 2 * n {
            return Err(DynamicsError::StateLength {
                found: amplitudes.len(),
                expected: 2 * n,
            });
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_EPS {
            return Err(DynamicsError::NotNormalized {
                norm,
                tolerance: NORM_EPS,
            });
        }
        Ok(WalkState { n, amplitudes })
    }

    /// Rescales to unit norm, returning the state together with how far the
    /// input norm was from 1.
    pub fn normalized(n: usize, amplitudes: Vec<C64>) -> Result<(WalkState, f64), DynamicsError> {
        if n < 3 {
            return Err(WalkError::CycleTooShort(n).into());
        }
        if amplitudes.len() != 2 * n {
            return Err(DynamicsError::StateLength {
                found: amplitudes.len(),
                expected: 2 * n,
            });
        }
        let norm = l2_norm(&amplitudes);
        if norm <= 1e-12 {
            return Err(DynamicsError::VanishingNorm { norm });
        }
        let deviation = (norm - 1.0).abs();
        let amplitudes = amplitudes.into_iter().map(|amp| amp / norm).collect();
        Ok((WalkState { n, amplitudes }, deviation))
    }

    /// The basis state concentrated on coin component `component` of vertex
    /// `vertex`.
    pub fn basis(n: usize, vertex: usize, component: usize) -> Result<WalkState, DynamicsError> {
        if n < 3 {
            return Err(WalkError::CycleTooShort(n).into());
        }
        if vertex >= n || component >= 2 {
            return Err(DynamicsError::BasisIndex {
                vertex,
                component,
                n,
            });
        }
        let mut amplitudes = vec![C64::ZERO; 2 * n];
        amplitudes[amp_index(vertex, component)] = C64::ONE;
        Ok(WalkState { n, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// Born-rule marginal per vertex: `p(x) = Σ_i |ψ(x,i)|²`.
    pub fn vertex_probabilities(&self) -> Vec<f64> {
        (0..self.n)
            .map(|x| {
                self.amplitudes[amp_index(x, 0)].norm_sqr()
                    + self.amplitudes[amp_index(x, 1)].norm_sqr()
            })
            .collect()
    }
}

/// Vertex probabilities of an evolved state at one time step.
#[derive(Clone, Debug)]
pub struct VertexDistribution {
    step: usize,
    probabilities: Vec<f64>,
}

impl VertexDistribution {
    pub fn new(step: usize, probabilities: Vec<f64>) -> Result<VertexDistribution, DynamicsError> {
        let sum: f64 = probabilities.iter().sum();
        if probabilities.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > PROBABILITY_SUM_EPS {
            return Err(DynamicsError::ProbabilitySum {
                sum,
                tolerance: PROBABILITY_SUM_EPS,
            });
        }
        Ok(VertexDistribution {
            step,
            probabilities,
        })
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

/// Applies the walk repeatedly: returns `[ψ, Uψ, ..., U^steps ψ]`.
///
/// Each evolved state keeps unit norm to [`NORM_DRIFT_EPS`]; a walk matrix
/// unitary to the construction tolerance cannot drift further over any
/// realistic step count.
pub fn evolve(
    walk: &CycleWalk,
    initial: &WalkState,
    steps: usize,
) -> Result<Vec<WalkState>, DynamicsError> {
    if initial.dim() != walk.dim() {
        return Err(DynamicsError::DimensionMismatch {
            state_dim: initial.dim(),
            walk_dim: walk.dim(),
        });
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(initial.clone());
    let mut current = initial.amplitudes.clone();
    for step in 1..=steps {
        current = walk.matrix().matvec(&current);
        let norm = l2_norm(&current);
        if (norm - 1.0).abs() > NORM_DRIFT_EPS {
            return Err(DynamicsError::NormDrift { step, norm });
        }
        states.push(WalkState {
            n: walk.n(),
            amplitudes: current.clone(),
        });
    }
    Ok(states)
}

/// Evolves and reduces to vertex marginals in one pass, one distribution
/// per time step from 0 through `steps`.
pub fn distributions(
    walk: &CycleWalk,
    initial: &WalkState,
    steps: usize,
) -> Result<Vec<VertexDistribution>, DynamicsError> {
    evolve(walk, initial, steps)?
        .iter()
        .enumerate()
        .map(|(step, state)| VertexDistribution::new(step, state.vertex_probabilities()))
        .collect()
}

fn column(m: &CMat, col: usize) -> Vec<C64> {
    (0..m.dim()).map(|row| m[(row, col)]).collect()
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Splits a sorted value sequence into runs chained by gaps of at most
/// `gap`; returns half-open index ranges.
fn chain_clusters(values: &[f64], gap: f64) -> Vec<(usize, usize)> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for j in 1..=values.len() {
        if j == values.len() || values[j] - values[j - 1] > gap {
            clusters.push((start, j));
            start = j;
        }
    }
    clusters
}

/// Replaces `vectors` with the basis diagonalizing `op` on their span and
/// returns the matching eigenvalues, ascending.
fn rediagonalize_span(vectors: &mut [Vec<C64>], op: &CMat) -> Result<Vec<f64>, DynamicsError> {
    let m = vectors.len();
    let images: Vec<Vec<C64>> = vectors.iter().map(|v| op.matvec(v)).collect();
    let mut projected = CMat::zeros(m);
    for a in 0..m {
        for b in 0..m {
            projected[(a, b)] = dot(&vectors[a], &images[b]);
        }
    }
    let (values, rotation) = crate::linalg::eig_hermitian(&projected)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let dim = vectors[0].len();
    let mut rotated = vec![vec![C64::ZERO; dim]; m];
    for (slot, &src) in order.iter().enumerate() {
        for a in 0..m {
            let weight = rotation[(a, src)];
            for i in 0..dim {
                rotated[slot][i] += weight * vectors[a][i];
            }
        }
    }
    for (slot, vector) in rotated.into_iter().enumerate() {
        vectors[slot] = vector;
    }
    Ok(order.iter().map(|&src| values[src]).collect())
}

/// The `2N` eigenvalues of the walk, sorted by principal argument and then
/// real part.
///
/// A unitary splits into commuting Hermitian and anti-Hermitian parts,
/// `U = H + iK` with `H = (U+U†)/2`. `H` is diagonalized first; its
/// eigenvalue `cos φ` cannot tell `φ` from `−φ`, so within each cluster of
/// near-equal `H` eigenvalues the basis is rotated to diagonalize `K`
/// (eigenvalue `sin φ`), and any `K`-degenerate subcluster is rotated once
/// more to re-separate `H`. Each resulting vector is a joint eigenvector,
/// and `λ = v†Uv` is accepted only if `‖Uv − λv‖` stays under
/// [`SPECTRUM_RESIDUAL_EPS`].
pub fn spectrum(walk: &CycleWalk) -> Result<Vec<C64>, DynamicsError> {
    let u = walk.matrix();
    let dim = u.dim();
    let uh = u.adjoint();
    let mut h = CMat::zeros(dim);
    let mut k = CMat::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            h[(i, j)] = 0.5 * (u[(i, j)] + uh[(i, j)]);
            k[(i, j)] = C64::new(0.0, -0.5) * (u[(i, j)] - uh[(i, j)]);
        }
    }
    let (h_values, h_vectors) = crate::linalg::eig_hermitian(&h)?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| h_values[a].total_cmp(&h_values[b]));
    let sorted_h: Vec<f64> = order.iter().map(|&c| h_values[c]).collect();
    let mut basis: Vec<Vec<C64>> = order.iter().map(|&c| column(&h_vectors, c)).collect();

    for (lo, hi) in chain_clusters(&sorted_h, CLUSTER_GAP) {
        if hi - lo < 2 {
            continue;
        }
        let k_values = rediagonalize_span(&mut basis[lo..hi], &k)?;
        for (sub_lo, sub_hi) in chain_clusters(&k_values, CLUSTER_GAP) {
            if sub_hi - sub_lo < 2 {
                continue;
            }
            rediagonalize_span(&mut basis[lo + sub_lo..lo + sub_hi], &h)?;
        }
    }

    let mut eigenvalues = Vec::with_capacity(dim);
    for vector in &basis {
        let image = u.matvec(vector);
        let lambda = dot(vector, &image);
        let residual = image
            .iter()
            .zip(vector)
            .map(|(im, v)| (im - lambda * v).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > SPECTRUM_RESIDUAL_EPS {
            return Err(DynamicsError::EigenResidual {
                residual,
                tolerance: SPECTRUM_RESIDUAL_EPS,
            });
        }
        eigenvalues.push(lambda);
    }
    eigenvalues.sort_by(|x, y| x.arg().total_cmp(&y.arg()).then(x.re.total_cmp(&y.re)));
    Ok(eigenvalues)
}

/// Whether `left` equals `e^{i·rotation} · right` as a multiset, matching
/// greedily under wraparound angular distance at `tolerance`.
pub fn spectra_match(left: &[C64], right: &[C64], rotation: Angle, tolerance: f64) -> bool {
    if left.len() != right.len() {
        return false;
    }
    let mut used = vec![false; right.len()];
    for value in left {
        let target = value.arg() - rotation.radians();
        let best = right
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .min_by(|(_, a), (_, b)| {
                let da = Angle::wrap(target - a.arg()).distance(Angle::ZERO);
                let db = Angle::wrap(target - b.arg()).distance(Angle::ZERO);
                da.total_cmp(&db)
            });
        match best {
            Some((j, candidate))
                if Angle::wrap(target - candidate.arg()).distance(Angle::ZERO) <= tolerance =>
            {
                used[j] = true;
            }
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{random_cycle_walk, random_gauge, random_translation_invariant};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, TAU};

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> WalkState {
        let amplitudes: Vec<C64> = (0..2 * n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        WalkState::normalized(n, amplitudes).unwrap().0
    }

    #[test]
    fn state_validation() {
        let n = 3;
        assert!(matches!(
            WalkState::new(n, vec![C64::ONE; 5]),
            Err(DynamicsError::StateLength { found: 5, expected: 6 })
        ));
        assert!(matches!(
            WalkState::new(n, vec![C64::ONE; 6]),
            Err(DynamicsError::NotNormalized { .. })
        ));
        assert!(matches!(
            WalkState::normalized(n, vec![C64::ZERO; 6]),
            Err(DynamicsError::VanishingNorm { .. })
        ));
        let (state, deviation) = WalkState::normalized(n, vec![C64::new(2.0, 0.0); 6]).unwrap();
        assert!((deviation - (24.0f64.sqrt() - 1.0)).abs() <= 1e-12);
        assert!((state.norm() - 1.0).abs() <= 1e-12);
        assert!(WalkState::basis(n, 3, 0).is_err());
        assert!(WalkState::basis(n, 0, 2).is_err());
    }

    #[test]
    fn shift_moves_point_masses_both_ways() {
        let walk = CycleWalk::shift(5).unwrap();
        let forward = evolve(&walk, &WalkState::basis(5, 1, 0).unwrap(), 3).unwrap();
        assert_eq!(forward.len(), 4);
        for (t, state) in forward.iter().enumerate() {
            let probs = state.vertex_probabilities();
            for (x, &p) in probs.iter().enumerate() {
                let expected = if x == (1 + t) % 5 { 1.0 } else { 0.0 };
                assert!((p - expected).abs() <= 1e-12, "t={t} x={x}");
            }
        }
        // Coin component 1 rides the reverse cycle.
        let backward = evolve(&walk, &WalkState::basis(5, 1, 1).unwrap(), 2).unwrap();
        let probs = backward[2].vertex_probabilities();
        assert!((probs[4] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_steps_returns_only_the_initial_state() {
        let walk = CycleWalk::shift(4).unwrap();
        let state = WalkState::basis(4, 2, 0).unwrap();
        let states = evolve(&walk, &state, 0).unwrap();
        assert_eq!(states.len(), 1);
        assert_eq!(states[0].amplitudes(), state.amplitudes());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let walk = CycleWalk::shift(4).unwrap();
        let state = WalkState::basis(5, 0, 0).unwrap();
        assert!(matches!(
            evolve(&walk, &state, 1),
            Err(DynamicsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn superposition_splits_probability_evenly() {
        let n = 4;
        let mut amplitudes = vec![C64::ZERO; 2 * n];
        amplitudes[amp_index(0, 0)] = C64::new(FRAC_1_SQRT_2, 0.0);
        amplitudes[amp_index(1, 1)] = C64::new(0.0, FRAC_1_SQRT_2);
        let state = WalkState::new(n, amplitudes).unwrap();
        let probs = state.vertex_probabilities();
        assert!((probs[0] - 0.5).abs() <= 1e-12);
        assert!((probs[1] - 0.5).abs() <= 1e-12);
        assert!(probs[2].abs() <= 1e-12 && probs[3].abs() <= 1e-12);
    }

    #[test]
    fn evolution_matches_dense_matrix_powers() {
        let walk = random_translation_invariant(5, 40).unwrap();
        let state = WalkState::basis(5, 0, 0).unwrap();
        let steps = 8;
        let states = evolve(&walk, &state, steps).unwrap();
        let mut power = CMat::identity(walk.dim());
        for t in 0..=steps {
            let expected = power.matvec(state.amplitudes());
            for (a, b) in states[t].amplitudes().iter().zip(&expected) {
                assert!((a - b).norm() <= 1e-12, "t={t}");
            }
            power = walk.matrix().mul(&power);
        }
    }

    #[test]
    fn long_evolution_keeps_norm() {
        let walk = random_cycle_walk(6, 9, true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let state = random_state(6, &mut rng);
        let states = evolve(&walk, &state, 50).unwrap();
        for state in &states {
            assert!((state.norm() - 1.0).abs() <= 1e-9);
        }
        let dists = distributions(&walk, &state, 50).unwrap();
        assert_eq!(dists.len(), 51);
        assert_eq!(dists[17].step(), 17);
    }

    #[test]
    fn shift_spectrum_is_doubled_roots_of_unity() {
        let spec = spectrum(&CycleWalk::shift(3).unwrap()).unwrap();
        assert_eq!(spec.len(), 6);
        // Sorted by principal argument: e^{-2πi/3} twice, 1 twice, e^{2πi/3}
        // twice.
        let expected = [
            C64::from_polar(1.0, -TAU / 3.0),
            C64::from_polar(1.0, -TAU / 3.0),
            C64::ONE,
            C64::ONE,
            C64::from_polar(1.0, TAU / 3.0),
            C64::from_polar(1.0, TAU / 3.0),
        ];
        for (got, want) in spec.iter().zip(&expected) {
            assert!((got - want).norm() <= 1e-8, "got {got}, want {want}");
        }
    }

    #[test]
    fn shift_walk_has_period_n() {
        let walk = CycleWalk::shift(5).unwrap();
        let mut power = CMat::identity(walk.dim());
        for _ in 0..5 {
            power = walk.matrix().mul(&power);
        }
        assert!(power.max_abs_diff(&CMat::identity(walk.dim())) <= 1e-10);
    }

    #[test]
    fn spectrum_lies_on_the_unit_circle() {
        for seed in 0..5u64 {
            let walk = random_cycle_walk(7, seed, seed % 2 == 0).unwrap();
            let spec = spectrum(&walk).unwrap();
            assert_eq!(spec.len(), 14);
            for value in &spec {
                assert!((value.norm() - 1.0).abs() <= 1e-8);
            }
            for pair in spec.windows(2) {
                assert!(pair[0].arg() <= pair[1].arg() + 1e-15);
            }
        }
    }

    #[test]
    fn gauge_rotates_the_spectrum_by_the_global_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [4usize, 5] {
            let walk = random_cycle_walk(n, 300 + n as u64, false).unwrap();
            let gauge = random_gauge(n, &mut rng).unwrap();
            let moved = gauge.apply(&walk).unwrap();
            let base = spectrum(&walk).unwrap();
            let rotated = spectrum(&moved).unwrap();
            assert!(spectra_match(
                &rotated,
                &base,
                gauge.global_phase(),
                SPECTRUM_MATCH_EPS
            ));
            let wrong = Angle::wrap(gauge.global_phase().radians() + 0.3);
            assert!(!spectra_match(&rotated, &base, wrong, SPECTRUM_MATCH_EPS));
        }
    }

    #[test]
    fn distributions_are_gauge_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 5;
        let walk = random_cycle_walk(n, 13, false).unwrap();
        let gauge = random_gauge(n, &mut rng).unwrap();
        let moved = gauge.apply(&walk).unwrap();
        let state = random_state(n, &mut rng);
        let moved_state = WalkState::new(n, gauge.apply_vector(state.amplitudes())).unwrap();
        let base = distributions(&walk, &state, 10).unwrap();
        let transformed = distributions(&moved, &moved_state, 10).unwrap();
        for (d1, d2) in base.iter().zip(&transformed) {
            for (p1, p2) in d1.probabilities().iter().zip(d2.probabilities()) {
                assert!((p1 - p2).abs() <= 1e-9);
            }
        }
    }
}
