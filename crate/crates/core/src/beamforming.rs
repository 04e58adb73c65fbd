//! Transmit beams: zero-forcing beams that serve one target set while
//! nulling the rest of a group, and max-min fair multicast beams.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::ChannelMatrix;
use crate::combinatorics::Subset;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, HermitianEigen};

/// Smallest singular value below which a nulled set counts as rank deficient.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

/// A unit-norm (or, for max-min beams, at most unit-norm) antenna weight
/// vector together with the users it serves and the users it nulls.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamVector {
    pub weights: Vec<Complex64>,
    pub target: Subset,
    pub nulled: Subset,
}

impl BeamVector {
    pub fn norm(&self) -> f64 {
        linalg::norm(&self.weights)
    }

    /// `min_{k in target} |h_k^H w|`
    pub fn min_gain(&self, channel: &ChannelMatrix) -> f64 {
        min_gain(channel, self.target.members(), &self.weights)
    }
}

fn min_gain(channel: &ChannelMatrix, users: &[usize], w: &[Complex64]) -> f64 {
    users.iter().map(|&k| channel.gain(k, w).norm()).fold(f64::INFINITY, f64::min)
}

/// Rotates `u` so that its first coordinate of non-negligible magnitude is
/// real and positive.
fn fix_phase(u: &mut [Complex64]) {
    let scale = linalg::norm(u);
    if let Some(i) = u.iter().position(|z| z.norm() > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
        let rot = u[i].conj() / u[i].norm();
        for z in u.iter_mut() {
            *z *= rot;
        }
        u[i].im = 0.0;
    }
}

/// The zero-forcing beam `u_S^T`: unit norm, orthogonal to `h_j` for every
/// `j` in `S \ T`.
///
/// `S \ T` must hold exactly `L - 1` users, so the beam is the unique (up to
/// phase) direction orthogonal to their channels; the phase is fixed by
/// making the first non-zero coordinate real and positive.
pub fn zero_forcing_bfv(channel: &ChannelMatrix, group: &Subset, target: &Subset) -> Result<BeamVector> {
    let l = channel.antennas();
    if !target.is_subset_of(group) {
        return Err(Error::InvalidConfig(alloc::format!("target {target} is not inside group {group}")));
    }
    let nulled = group.difference(target);
    if nulled.len() + 1 != l {
        return Err(Error::SubsetSize { subset: nulled, expected: l - 1, got: group.len() - target.len() });
    }
    let rows: Vec<&[Complex64]> = nulled.members().iter().map(|&j| channel.user(j)).collect();
    if let Some(&sigma_min) = linalg::singular_values(&rows).last() {
        if sigma_min < DEGENERACY_TOLERANCE {
            return Err(Error::DegenerateChannel { nulled, sigma_min });
        }
    }
    let mut weights = linalg::orthogonal_complement_vector(&rows, l);
    fix_phase(&mut weights);
    Ok(BeamVector { weights, target: target.clone(), nulled })
}

/// Settings for the semidefinite-relaxation beamformer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdrOptions {
    /// Gaussian randomization draws used to extract a rank-one beam.
    pub randomizations: usize,
    /// Projected-gradient iterations per smoothing level.
    pub iterations_per_level: usize,
    /// Seed of the randomization stream; a fixed seed makes the solver a
    /// pure function of its inputs.
    pub seed: u64,
}

impl Default for SdrOptions {
    fn default() -> Self {
        Self { randomizations: 200, iterations_per_level: 300, seed: 0x5d5_b3a }
    }
}

/// How the max-min multicast beam is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamSolver {
    /// Semidefinite relaxation plus Gaussian randomization.
    Sdr(SdrOptions),
    /// Exhaustive sweep of `w = [cos a, sin a e^{ib}]` on a uniform grid of
    /// the given angular step (radians). Two antennas only.
    Grid { step: f64 },
}

impl Default for BeamSolver {
    fn default() -> Self {
        Self::Sdr(SdrOptions::default())
    }
}

/// Approximately solves `max_w min_{k in S} |h_k^H w|` subject to
/// `||w|| <= 1`. Returns the beam and the achieved objective, recomputed
/// from the returned weights.
pub fn maxmin_beamformer(channel: &ChannelMatrix, group: &Subset, solver: BeamSolver) -> Result<(BeamVector, f64)> {
    if group.is_empty() {
        return Err(Error::InvalidConfig("multicast group is empty".into()));
    }
    let l = channel.antennas();
    let users = group.members();
    let weights = if users.len() == 1 || l == 1 {
        // matched filter: optimal for a single user, and the only direction when L = 1
        let h = channel.user(users[0]);
        let n = linalg::norm(h);
        if n == 0.0 {
            let mut w = vec![Complex64::new(0.0, 0.0); l];
            w[0] = Complex64::new(1.0, 0.0);
            w
        } else {
            h.iter().map(|z| z / n).collect()
        }
    } else {
        match solver {
            BeamSolver::Sdr(opts) => sdr_beam(channel, users, opts),
            BeamSolver::Grid { step } => {
                if l != 2 {
                    return Err(Error::Unsupported("grid max-min search needs exactly two antennas"));
                }
                grid_beam(channel, users, step)
            }
        }
    };
    let value = min_gain(channel, users, &weights);
    Ok((BeamVector { weights, target: group.clone(), nulled: Subset::empty() }, value))
}

/// Checks that the solver's value for `superset` does not exceed its value
/// for `subset`, up to the solver's own accuracy (exact for the grid, 5 %
/// for the relaxation).
pub fn maxmin_value_monotonicity_check(
    channel: &ChannelMatrix,
    subset: &Subset,
    superset: &Subset,
    solver: BeamSolver,
) -> Result<bool> {
    if !subset.is_subset_of(superset) {
        return Err(Error::InvalidConfig(alloc::format!("{subset} is not contained in {superset}")));
    }
    let slack = match solver {
        BeamSolver::Grid { .. } => 1e-12,
        BeamSolver::Sdr(_) => 0.05,
    };
    let (_, small) = maxmin_beamformer(channel, subset, solver)?;
    let (_, large) = maxmin_beamformer(channel, superset, solver)?;
    Ok(large <= small * (1.0 + slack))
}

fn grid_beam(channel: &ChannelMatrix, users: &[usize], step: f64) -> Vec<Complex64> {
    use core::f64::consts::{FRAC_PI_2, TAU};
    assert!(step > 0.0 && step.is_finite(), "grid step must be positive");

    let n_theta = (FRAC_PI_2 / step).floor() as usize;
    let mut thetas: Vec<f64> = (0..=n_theta).map(|i| i as f64 * step).collect();
    if thetas.last().is_some_and(|&a| a < FRAC_PI_2) {
        thetas.push(FRAC_PI_2);
    }
    let n_phi = (TAU / step).ceil() as usize;
    let phis: Vec<(f64, f64)> = (0..n_phi).map(|j| {
        let b = j as f64 * step;
        (b.cos(), b.sin())
    }).collect();

    // |conj(h0) c + conj(h1) s e^{ib}|^2 = A + Re(B e^{ib}) per user
    let coeffs: Vec<(f64, f64, Complex64)> = users
        .iter()
        .map(|&k| {
            let h = channel.user(k);
            (h[0].norm_sqr(), h[1].norm_sqr(), h[0] * h[1].conj())
        })
        .collect();

    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut terms: Vec<(f64, f64, f64)> = vec![(0.0, 0.0, 0.0); coeffs.len()];
    for &a in &thetas {
        let (s, c) = (a.sin(), a.cos());
        for (term, &(p0, p1, cross)) in terms.iter_mut().zip(&coeffs) {
            let b = cross * (2.0 * c * s);
            *term = (p0 * c * c + p1 * s * s, b.re, b.im);
        }
        for (j, &(cb, sb)) in phis.iter().enumerate() {
            let mut worst = f64::INFINITY;
            for &(base, br, bi) in &terms {
                let g = base + br * cb - bi * sb;
                if g < worst {
                    worst = g;
                }
            }
            if worst > best.0 {
                best = (worst, a, j as f64 * step);
            }
        }
    }
    let (_, a, b) = best;
    vec![Complex64::new(a.cos(), 0.0), Complex64::from_polar(a.sin(), b)]
}

/// Smoothed max-min over the spectraplex followed by Gaussian randomization.
///
/// The relaxation is `max min_k tr(h_k h_k^H W)` over `W >= 0, tr W = 1`.
/// The inner minimum is replaced by a soft-min of temperature `mu`, which is
/// maximised with accelerated projected gradient while `mu` is decreased
/// geometrically. Candidates for `w` are the principal eigenvector of the
/// final `W` and `randomizations` draws `xi ~ CN(0, W)` normalised to unit
/// norm; the best candidate wins.
fn sdr_beam(channel: &ChannelMatrix, users: &[usize], opts: SdrOptions) -> Vec<Complex64> {
    let l = channel.antennas();
    let scale = users.iter().map(|&k| linalg::norm_sqr(channel.user(k))).fold(0.0, f64::max);
    let lifted: Vec<CMatrix> = users
        .iter()
        .map(|&k| {
            let mut a = CMatrix::outer(channel.user(k));
            a.scale(1.0 / scale);
            a
        })
        .collect();
    let lipschitz = lifted.iter().map(frobenius_sqr).fold(0.0, f64::max).max(f64::MIN_POSITIVE);

    let mut w = CMatrix::identity(l);
    w.scale(1.0 / l as f64);
    let mut gains = vec![0.0; lifted.len()];
    for mu in [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4] {
        let step = mu / lipschitz;
        let mut y = w.clone();
        let mut momentum = 1.0;
        for _ in 0..opts.iterations_per_level {
            for (g, a) in gains.iter_mut().zip(&lifted) {
                *g = hermitian_trace_product(a, &y);
            }
            let floor = gains.iter().copied().fold(f64::INFINITY, f64::min);
            let weights: Vec<f64> = gains.iter().map(|g| (-(g - floor) / mu).exp()).collect();
            let total: f64 = weights.iter().sum();
            let mut ascent = y.clone();
            for (p, a) in weights.iter().zip(&lifted) {
                let c = step * p / total;
                for i in 0..l {
                    for j in 0..l {
                        ascent[(i, j)] += a[(i, j)] * c;
                    }
                }
            }
            let next = project_spectraplex(&ascent);
            let next_momentum = (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt()) / 2.0;
            let beta = (momentum - 1.0) / next_momentum;
            y = CMatrix::from_fn(l, l, |i, j| next[(i, j)] + (next[(i, j)] - w[(i, j)]) * beta);
            w = next;
            momentum = next_momentum;
        }
    }

    let eig = HermitianEigen::new(&w);
    let mut best = eig.vectors.column(0);
    let mut best_value = min_gain(channel, users, &best);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let half = core::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..opts.randomizations {
        let mut xi = vec![Complex64::new(0.0, 0.0); l];
        for (i, &lambda) in eig.values.iter().enumerate() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let z = Complex64::new(re * half, im * half) * lambda.max(0.0).sqrt();
            for (r, x) in xi.iter_mut().enumerate() {
                *x += eig.vectors[(r, i)] * z;
            }
        }
        let n = linalg::norm(&xi);
        if n == 0.0 {
            continue;
        }
        for x in &mut xi {
            *x /= n;
        }
        let value = min_gain(channel, users, &xi);
        if value > best_value {
            best_value = value;
            best = xi;
        }
    }
    best
}

fn frobenius_sqr(a: &CMatrix) -> f64 {
    (0..a.rows()).flat_map(|i| a.row(i).iter()).map(|z| z.norm_sqr()).sum()
}

/// `tr(A B)` for Hermitian `A`, `B`.
fn hermitian_trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

fn project_spectraplex(a: &CMatrix) -> CMatrix {
    let eig = HermitianEigen::new(a);
    let lambda = linalg::project_simplex(&eig.values);
    let n = a.rows();
    let v = &eig.vectors;
    CMatrix::from_fn(n, n, |i, j| {
        lambda.iter().enumerate().filter(|(_, &x)| x > 0.0).map(|(k, &x)| v[(i, k)] * v[(j, k)].conj() * x).sum()
    })
}
