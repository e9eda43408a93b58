//! Non-prioritized belief expansion: acceptance at a fixed likelihood
//! ratio, and acceptance averaged over ignorance about the sources.

use std::fmt;

use crate::coherence::{
    check_ratio, coherence_measure, max_coherence_posterior, posterior_confidence,
};
use crate::distribution::WeightVector;
use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::scalar::{approx, lit, RealScalar, Scalar};

/// Absolute tolerance of [`averaged_acceptance`].
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;

/// Belief threshold used by the CLI when none is given.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// `e_x`, the posterior joint probability of the set. Identical to
/// [`posterior_confidence`].
pub fn acceptance<T: Scalar>(w: &WeightVector<T>, x: &T) -> Result<T> {
    posterior_confidence(w, x)
}

/// `e_x` split as `weight * c_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAcceptance<T> {
    pub weight: T,
    pub coherence: T,
    pub product: T,
}

pub fn acceptance_weighted_form<T: Scalar>(
    w: &WeightVector<T>,
    x: &T,
) -> Result<WeightedAcceptance<T>> {
    let coherence = coherence_measure(w, x)?.c;
    let weight = max_coherence_posterior(w.a0(), w.n(), x)?;
    let product = weight.clone() * coherence.clone();
    Ok(WeightedAcceptance {
        weight,
        coherence,
        product,
    })
}

/// `E = integral over x in [0, 1] of e_x`, by adaptive quadrature.
///
/// The integrand is continued to `x = 0` by its limit: one when `a_0 > 0`,
/// zero otherwise.
pub fn averaged_acceptance<T: RealScalar>(w: &WeightVector<T>) -> T {
    let a0 = *w.a0();
    if a0.is_zero() {
        return T::zero();
    }
    let integrand = |x: T| {
        if x.is_zero() {
            T::one()
        } else {
            // x is in (0, 1] and a0 > 0, so this cannot fail
            acceptance(w, &x).unwrap_or_else(|_| T::nan())
        }
    };
    adaptive_simpson(integrand, T::zero(), T::one(), lit(QUADRATURE_TOLERANCE))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpansionMode<T> {
    FixedX(T),
    Averaged,
}

impl<T: Scalar> fmt::Display for ExpansionMode<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::FixedX(x) => write!(f, "fixed-x({})", approx(x)),
            Self::Averaged => f.write_str("averaged"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionVerdict<T> {
    pub accept: bool,
    /// Acceptance of the current belief set `{R_1..R_n}`.
    pub value_old: T,
    /// Acceptance of the expanded set `{R_1..R_n+1}`.
    pub value_new: T,
    pub mode: ExpansionMode<T>,
    /// Whether the current set reaches the belief threshold. Reported, not
    /// used to gate `accept`.
    pub threshold_met: bool,
}

/// Expand iff the acceptance of the new set is at least that of the old set.
pub fn decide_expansion<T: RealScalar>(
    old: &WeightVector<T>,
    new: &WeightVector<T>,
    mode: ExpansionMode<T>,
    threshold: T,
) -> Result<ExpansionVerdict<T>> {
    if new.n() != old.n() + 1 {
        return Err(Error::SizeMismatch(old.n(), new.n()));
    }
    if !(threshold >= T::zero() && threshold <= T::one()) {
        return Err(Error::InvalidThreshold(approx(&threshold)));
    }
    let (value_old, value_new) = match mode {
        ExpansionMode::FixedX(x) => {
            check_ratio(&x)?;
            (acceptance(old, &x)?, acceptance(new, &x)?)
        }
        ExpansionMode::Averaged => (averaged_acceptance(old), averaged_acceptance(new)),
    };
    Ok(ExpansionVerdict {
        accept: value_new >= value_old,
        value_old,
        value_new,
        mode,
        threshold_met: value_old >= threshold,
    })
}
