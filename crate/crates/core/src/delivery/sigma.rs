use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;
use num_rational::Ratio;

use super::unitary::build_unitary;
use crate::combinatorics::Subset;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Combining coefficients `sigma^w_{r,T}` of one zero-forcing group.
///
/// User `r` numbers the `v` subsets `T` of `S` that contain it
/// lexicographically as `T_0, .., T_{v-1}` and gets
/// `sigma^w_{r,T_i} = c U(w, i)` with `c = sqrt(v / ((t+1) q))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaAssignment {
    pub group: Subset,
    pub unitary: CMatrix,
    pub scale: f64,
    t: usize,
    q: u64,
    entries: BTreeMap<(usize, usize, Subset), Complex64>,
}

impl SigmaAssignment {
    /// `sigma^omega_{user, target}`, `omega` counted from 0.
    pub fn sigma(&self, omega: usize, user: usize, target: &Subset) -> Option<Complex64> {
        self.entries.get(&(omega, user, target.clone())).copied()
    }

    /// Number of blocks `v` sent for the group.
    pub fn blocks(&self) -> usize {
        self.unitary.rows()
    }

    /// The subsets of the group containing `user`, in column order.
    pub fn user_targets(&self, user: usize) -> Vec<Subset> {
        self.group.subsets(self.t + 1).into_iter().filter(|target| target.contains(user)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Subset, Complex64)> {
        self.entries.iter().map(|((w, r, target), &s)| (*w, *r, target, s))
    }

    /// `|sigma|^2` as an exact fraction: `c^2 |U(w, i)|^2 = (v / ((t+1) q)) / v`.
    pub fn sigma_modulus_sqr(&self) -> Ratio<u64> {
        let v = self.blocks() as u64;
        Ratio::new(v, (self.t as u64 + 1) * self.q) / v
    }

    /// The largest admissible `|sigma|^2`, `1 / ((t+1) q)`.
    pub fn power_bound(&self) -> Ratio<u64> {
        Ratio::new(1, (self.t as u64 + 1) * self.q)
    }

    /// `L_r^S(w, i) = g_i sigma^w_{r,T_i}` for the gains `g_i = h_r^H u_S^{T_i}`
    /// in column order.
    pub fn mixing_matrix(&self, user: usize, gains: &[Complex64]) -> Result<CMatrix> {
        let targets = self.user_targets(user);
        if gains.len() != targets.len() {
            return Err(Error::GainCount { expected: targets.len(), got: gains.len() });
        }
        let v = self.blocks();
        let mut out = CMatrix::zeros(v, v);
        for w in 0..v {
            for (i, target) in targets.iter().enumerate() {
                let s = self.sigma(w, user, target).ok_or_else(|| Error::MissingBeam(target.clone()))?;
                out[(w, i)] = gains[i] * s;
            }
        }
        Ok(out)
    }

    /// `max |L_r^S - c U diag(g)|`.
    pub fn decomposition_residual(&self, user: usize, gains: &[Complex64]) -> Result<f64> {
        let l = self.mixing_matrix(user, gains)?;
        let v = self.blocks();
        let mut d = CMatrix::zeros(v, v);
        for (i, &g) in gains.iter().enumerate() {
            d[(i, i)] = g * self.scale;
        }
        Ok(l.max_abs_diff(&self.unitary.mul(&d)))
    }
}

/// Builds the coefficients for group `S`. The values depend only on the
/// position of `T` among the subsets containing `r`, not on the demands.
pub fn assign_sigmas(group: &Subset, cfg: &SystemConfig) -> Result<SigmaAssignment> {
    if group.len() != cfg.group_size() {
        return Err(Error::SubsetSize { subset: group.clone(), expected: cfg.group_size(), got: group.len() });
    }
    let t = cfg.t();
    let v = cfg.targets_per_user() as usize;
    let q = cfg.targets_per_group();
    let unitary = build_unitary(v);
    let scale = Float::sqrt(v as f64 / ((t as u64 + 1) * q) as f64);
    let targets = group.subsets(t + 1);
    let mut entries = BTreeMap::new();
    for &r in group.members() {
        for (i, target) in targets.iter().filter(|target| target.contains(r)).enumerate() {
            for w in 0..v {
                entries.insert((w, r, target.clone()), unitary[(w, i)] * scale);
            }
        }
    }
    Ok(SigmaAssignment { group: group.clone(), unitary, scale, t, q, entries })
}
