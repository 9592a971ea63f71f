//! Decoder constants derived from the expander and inner-code parameters.

use serde::Serialize;

use crate::error::{Error, Result};

const TOL: f64 = 1e-9;

/// Inputs to [`derive_params`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpanderSpec {
    pub c: usize,
    pub d: usize,
    pub alpha: f64,
    pub delta: f64,
    pub d0: usize,
    pub n: usize,
}

/// Optional replacements for the two free constants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ParamOverrides {
    pub eps0: Option<f64>,
    pub eps1: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecoderParams {
    pub spec: ExpanderSpec,
    /// Flip threshold `floor(1/delta)`.
    pub t: usize,
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub eps4: f64,
    /// Relative radius: `gamma n` errors are always corrected.
    pub gamma: f64,
    /// DeepFlip depth.
    pub s0: usize,
    /// HardSearch round count (clamped at 0).
    pub ell: u64,
    pub eps0_overridden: bool,
    pub eps1_overridden: bool,
    /// Set when `delta d0 <= 3`: the constants are well defined but the
    /// correction guarantee is not claimed.
    pub outside_guarantee: bool,
}

impl DecoderParams {
    /// `gamma n`.
    pub fn radius(&self) -> f64 {
        self.gamma * self.spec.n as f64
    }

    /// `c gamma n`.
    pub fn unsat_cap(&self) -> f64 {
        self.spec.c as f64 * self.radius()
    }

    /// DeepFlip pruning bound after `k` steps: `(1 - eps3)^k c gamma n`.
    pub fn prune_bound(&self, k: usize) -> f64 {
        (k as f64 * (-self.eps3).ln_1p()).exp() * self.unsat_cap()
    }

    /// Whether `|U^k| = unsat` survives the pruning test at step `k`.
    pub fn within_bound(&self, unsat: usize, k: usize) -> bool {
        unsat as f64 <= self.prune_bound(k) + TOL
    }

    /// Largest `j <= s0` with `unsat <= prune_bound(j)`, if any.
    pub fn last_surviving_step(&self, unsat: usize) -> Option<usize> {
        if !self.within_bound(unsat, 0) {
            return None;
        }
        if unsat == 0 {
            return Some(self.s0);
        }
        let ratio = unsat as f64 / self.unsat_cap();
        let guess = (ratio.ln() / (-self.eps3).ln_1p()).floor();
        let mut j = if guess.is_finite() { guess.clamp(0.0, self.s0 as f64) as usize } else { self.s0 };
        while j > 0 && !self.within_bound(unsat, j) {
            j -= 1;
        }
        while j < self.s0 && self.within_bound(unsat, j + 1) {
            j += 1;
        }
        Some(j)
    }

    /// HardSearch acceptance: `|U'| <= eps4 |U|`.
    pub fn accepts(&self, unsat_after: usize, unsat_before: usize) -> bool {
        unsat_after as f64 <= self.eps4 * unsat_before as f64 + TOL
    }

    /// Randomized-decoder hand-off threshold `(delta - 1/d0) c gamma n`.
    pub fn handoff_threshold(&self) -> f64 {
        (self.spec.delta - 1.0 / self.spec.d0 as f64) * self.unsat_cap()
    }
}

/// Derives every decoder constant with the default choices of `eps0` and `eps1`.
pub fn derive_params(c: usize, d: usize, alpha: f64, delta: f64, d0: usize, n: usize) -> Result<DecoderParams> {
    derive_params_with(
        ExpanderSpec {
            c,
            d,
            alpha,
            delta,
            d0,
            n,
        },
        ParamOverrides::default(),
    )
}

pub fn derive_params_with(spec: ExpanderSpec, overrides: ParamOverrides) -> Result<DecoderParams> {
    let ExpanderSpec {
        c,
        d,
        alpha,
        delta,
        d0,
        n,
    } = spec;
    if c == 0 || d == 0 || n == 0 || d0 < 2 {
        return Err(Error::InvalidParameter(
            "c, d and n must be positive and d0 at least 2".into(),
        ));
    }
    if !(alpha > 0.0 && alpha <= 1.0) || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha and delta must lie in (0, 1], got {alpha} and {delta}"
        )));
    }
    let inv = 1.0 / delta;
    let d0f = d0 as f64;
    if d0f <= 3.0 * inv - 1.0 + TOL {
        return Err(Error::Infeasible(format!(
            "need d0 > 3/delta - 1 = {:.6}, got d0 = {d0}",
            3.0 * inv - 1.0
        )));
    }
    let t = (inv + TOL).floor() as usize;
    let tf = t as f64;

    let eps0_max = ((d0f + 1.0 - 3.0 * inv) / 2.0).min(tf + 1.0 - inv);
    let eps0 = match overrides.eps0 {
        Some(e) => {
            if !(e > 0.0 && e < eps0_max) {
                return Err(Error::InvalidParameter(format!(
                    "eps0 must lie in (0, {eps0_max:.6}), got {e}"
                )));
            }
            e
        }
        None => 0.5 * eps0_max,
    };
    let eps1_max = eps0 * delta * delta / 100.0;
    let eps1 = match overrides.eps1 {
        Some(e) => {
            if !(e > 0.0 && e < eps1_max) {
                return Err(Error::InvalidParameter(format!(
                    "eps1 must lie in (0, {eps1_max:.3e}), got {e}"
                )));
            }
            e
        }
        None => 0.5 * eps1_max,
    };
    let expansion_factor = (delta * (tf + 1.0) - 1.0) / tf;
    let eps2 = eps1 / (c as f64 + 1.0) * expansion_factor;
    let eps3 = eps2 * (2.0 * (1.0 - eps1) * (0.5 + eps0 * delta * delta / 2.0) - 1.0);
    if !(eps3 > 0.0 && eps3 < 1.0) {
        return Err(Error::Infeasible(format!("eps3 = {eps3} is not in (0, 1)")));
    }
    let shrink = (delta * d0f - 1.0) / (d0f - 1.0);
    let eps4 = shrink * (1.0 - eps3);
    let gamma = 2.0 * alpha / (d0f * (1.0 + 0.5 * c as f64 * delta));

    let log_base = (-eps3).ln_1p();
    let s0 = ceil_tol((eps4 * shrink).ln() / log_base).max(1.0) as usize;
    let radius = ((d0 - 1) / 2) as f64;
    let ell = ceil_tol((radius / (gamma * n as f64)).ln() / log_base).max(0.0) as u64;

    Ok(DecoderParams {
        spec,
        t,
        eps0,
        eps1,
        eps2,
        eps3,
        eps4,
        gamma,
        s0,
        ell,
        eps0_overridden: overrides.eps0.is_some(),
        eps1_overridden: overrides.eps1.is_some(),
        outside_guarantee: delta * d0f <= 3.0 + TOL,
    })
}

fn ceil_tol(x: f64) -> f64 {
    (x - TOL).ceil()
}
