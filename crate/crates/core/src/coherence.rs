//! Posterior confidence, the reliability-relative coherence measure, and the
//! reliability-independent partial coherence ordering.
//!
//! With `x = q/p` and weight vector `<a_0, ..., a_n>`:
//!
//! ```text
//! P*     = a_0 / sum_i a_i x^i
//! P*max  = a_0 / (a_0 + (1 - a_0) x^n)
//! c_x    = P* / P*max = (a_0 + (1 - a_0) x^n) / sum_i a_i x^i
//! ```

use std::fmt;

use crate::distribution::WeightVector;
use crate::error::{Error, Result};
use crate::scalar::{approx, from_count, lit, poly_eval, powi, Scalar};

/// Grid resolution used when no explicit one is given.
pub const DEFAULT_PROBE_RESOLUTION: usize = 999;

/// Differences of at most this magnitude count as ties in [`grid_probe`].
pub const PROBE_TOLERANCE: f64 = 1e-12;

pub(crate) fn check_ratio<T: Scalar>(x: &T) -> Result<()> {
    if *x > T::zero() && *x <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidLikelihoodRatio(approx(x)))
    }
}

/// `sum_i a_i x^i`. At `x = 1` this is the total mass, which is one.
fn denominator<T: Scalar>(w: &WeightVector<T>, x: &T) -> T {
    if x.is_one() {
        T::one()
    } else {
        poly_eval(w.coefficients(), x)
    }
}

/// Joint posterior of the whole set after every source has reported it.
pub fn posterior_confidence<T: Scalar>(w: &WeightVector<T>, x: &T) -> Result<T> {
    check_ratio(x)?;
    let den = denominator(w, x);
    if den.is_zero() {
        return Err(Error::DegenerateDistribution);
    }
    Ok(w.a0().clone() / den)
}

/// Posterior of a maximally coherent set with the same expectation measure.
pub fn max_coherence_posterior<T: Scalar>(a0: &T, n: usize, x: &T) -> Result<T> {
    check_ratio(x)?;
    if n == 0 {
        return Err(Error::WeightLength(1));
    }
    if a0.is_zero() {
        return Err(Error::ZeroExpectation);
    }
    if !(*a0 > T::zero() && *a0 <= T::one()) {
        return Err(Error::WeightOutOfRange {
            index: 0,
            value: approx(a0),
        });
    }
    let complement = T::one() - a0.clone();
    Ok(a0.clone() / (a0.clone() + complement * powi(x, n)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceValue<T> {
    pub c: T,
    pub x: T,
    pub n: usize,
}

/// `c_x`; undefined when `a_0 = 0`.
pub fn coherence_measure<T: Scalar>(w: &WeightVector<T>, x: &T) -> Result<CoherenceValue<T>> {
    check_ratio(x)?;
    if w.a0().is_zero() {
        return Err(Error::ZeroExpectation);
    }
    Ok(CoherenceValue {
        c: raw_coherence(w, x),
        x: x.clone(),
        n: w.n(),
    })
}

/// `c_x` without argument checks; callers guarantee `a_0 > 0` and `x` in range.
fn raw_coherence<T: Scalar>(w: &WeightVector<T>, x: &T) -> T {
    let num = w.a0().clone() + w.a0_complement() * powi(x, w.n());
    num / denominator(w, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    FirstMoreCoherent,
    SecondMoreCoherent,
    Equal,
    Incomparable,
}

impl Relation {
    /// The relation seen with the two sets swapped.
    pub fn swapped(self) -> Self {
        match self {
            Self::FirstMoreCoherent => Self::SecondMoreCoherent,
            Self::SecondMoreCoherent => Self::FirstMoreCoherent,
            other => other,
        }
    }

    pub fn is_comparable(self) -> bool {
        self != Self::Incomparable
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::FirstMoreCoherent => "first-more-coherent",
            Self::SecondMoreCoherent => "second-more-coherent",
            Self::Equal => "equal",
            Self::Incomparable => "incomparable",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which rule produced an [`OrderingVerdict`]. Only `GridProbe` verdicts
/// are numerical evidence rather than a proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    PairCriterion,
    GeneralSufficient,
    GridProbe,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PairCriterion => "pair-criterion",
            Self::GeneralSufficient => "general-sufficient",
            Self::GridProbe => "grid-probe",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderingVerdict {
    pub relation: Relation,
    pub criterion: Criterion,
}

fn check_comparable<T: Scalar>(w: &WeightVector<T>, other: &WeightVector<T>) -> Result<()> {
    if w.n() != other.n() {
        return Err(Error::SizeMismatch(w.n(), other.n()));
    }
    if w.a0().is_zero() || other.a0().is_zero() {
        return Err(Error::ZeroExpectation);
    }
    Ok(())
}

/// Direction of a pair already known to be comparable: the sign of
/// `c_x - c'_x` is constant on (0, 1), so one interior point decides it.
fn probe_direction<T: Scalar>(w: &WeightVector<T>, other: &WeightVector<T>) -> Relation {
    let half: T = lit(0.5);
    let d = raw_coherence(w, &half) - raw_coherence(other, &half);
    if d > T::zero() {
        Relation::FirstMoreCoherent
    } else if d < T::zero() {
        Relation::SecondMoreCoherent
    } else {
        Relation::Equal
    }
}

/// Necessary and sufficient ordering test for information pairs (`n = 2`).
///
/// Comparable iff `a0 a1' <= a0' a1` and `a1 >= a1'`, or both reversed.
pub fn compare_pair<T: Scalar>(
    w: &WeightVector<T>,
    other: &WeightVector<T>,
) -> Result<OrderingVerdict> {
    if w.n() != 2 || other.n() != 2 {
        return Err(Error::SizeMismatch(w.n(), other.n()));
    }
    check_comparable(w, other)?;
    let (a, b) = (w.coefficients(), other.coefficients());
    let lhs = a[0].clone() * b[1].clone();
    let rhs = b[0].clone() * a[1].clone();
    let first = lhs <= rhs && a[1] >= b[1];
    let second = lhs >= rhs && a[1] <= b[1];
    let relation = match (first, second) {
        (true, true) => Relation::Equal,
        (false, false) => Relation::Incomparable,
        _ => probe_direction(w, other),
    };
    Ok(OrderingVerdict {
        relation,
        criterion: Criterion::PairCriterion,
    })
}

/// Sufficient ordering test for sets of any size, falling back to
/// [`grid_probe`] at [`DEFAULT_PROBE_RESOLUTION`] when it does not fire.
pub fn compare_general<T: Scalar>(
    w: &WeightVector<T>,
    other: &WeightVector<T>,
) -> Result<OrderingVerdict> {
    compare_general_with(w, other, DEFAULT_PROBE_RESOLUTION)
}

pub fn compare_general_with<T: Scalar>(
    w: &WeightVector<T>,
    other: &WeightVector<T>,
    resolution: usize,
) -> Result<OrderingVerdict> {
    check_comparable(w, other)?;
    if w.n() < 2 {
        return Err(Error::SizeMismatch(w.n(), other.n()));
    }
    if general_condition_holds(w, other) {
        return Ok(OrderingVerdict {
            relation: probe_direction(w, other),
            criterion: Criterion::GeneralSufficient,
        });
    }
    grid_probe(w, other, resolution)
}

/// `a_i/a_i' < a_0/a_0' < 1` for all `0 < i < n`, or the same with both
/// inequalities reversed. Evaluated cross-multiplied; an index where both
/// coefficients vanish places no constraint.
fn general_condition_holds<T: Scalar>(w: &WeightVector<T>, other: &WeightVector<T>) -> bool {
    let (a, b) = (w.coefficients(), other.coefficients());
    let n = w.n();
    let interior = |below: bool| {
        (1..n).all(|i| {
            if a[i].is_zero() && b[i].is_zero() {
                return true;
            }
            let lhs = a[i].clone() * b[0].clone();
            let rhs = a[0].clone() * b[i].clone();
            if below {
                lhs < rhs
            } else {
                lhs > rhs
            }
        })
    };
    (a[0] < b[0] && interior(true)) || (a[0] > b[0] && interior(false))
}

/// Evaluates `c_x - c'_x` at `x = k / (resolution + 1)`, `k = 1..=resolution`.
///
/// This is resolution-bounded evidence of sign constancy, not a proof.
pub fn grid_probe<T: Scalar>(
    w: &WeightVector<T>,
    other: &WeightVector<T>,
    resolution: usize,
) -> Result<OrderingVerdict> {
    check_comparable(w, other)?;
    if resolution < 99 {
        return Err(Error::ProbeResolution(resolution));
    }
    let tol: T = lit(PROBE_TOLERANCE);
    let neg_tol = T::zero() - tol.clone();
    let steps: T = from_count(resolution + 1);
    let (mut above, mut below) = (false, false);
    for k in 1..=resolution {
        let x = from_count::<T>(k) / steps.clone();
        let d = raw_coherence(w, &x) - raw_coherence(other, &x);
        above |= d > tol;
        below |= d < neg_tol;
        if above && below {
            break;
        }
    }
    let relation = match (above, below) {
        (true, true) => Relation::Incomparable,
        (true, false) => Relation::FirstMoreCoherent,
        (false, true) => Relation::SecondMoreCoherent,
        (false, false) => Relation::Equal,
    };
    Ok(OrderingVerdict {
        relation,
        criterion: Criterion::GridProbe,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn w(v: &[f64]) -> WeightVector<f64> {
        WeightVector::from_f64s(v).unwrap()
    }

    fn base() -> WeightVector<f64> {
        w(&[0.1, 0.2, 0.7])
    }

    #[test]
    fn randomizer_limit_returns_prior() {
        assert_eq!(posterior_confidence(&base(), &1.0).unwrap(), 0.1);
    }

    #[test]
    fn grid_case_posterior_at_half() {
        // oracle: brute-force conditioning over the 16-row joint, see tests/oracles.rs
        let got = posterior_confidence(&base(), &0.5).unwrap();
        assert!((got - 0.1 / 0.375).abs() < 1e-15);
    }

    #[test]
    fn truth_teller_limit() {
        let got = posterior_confidence(&w(&[0.5, 0.0, 0.5]), &1e-9).unwrap();
        assert!((1.0 - got) < 1e-15);
    }

    #[test]
    fn rejects_ratio_out_of_range() {
        assert!(matches!(
            posterior_confidence(&base(), &0.0),
            Err(Error::InvalidLikelihoodRatio(_))
        ));
        assert!(matches!(
            posterior_confidence(&base(), &1.5),
            Err(Error::InvalidLikelihoodRatio(_))
        ));
    }

    #[test]
    fn max_coherence_values() {
        assert!((max_coherence_posterior(&0.1f64, 2, &0.5).unwrap() - 0.1 / 0.325).abs() < 1e-15);
        assert_eq!(max_coherence_posterior(&0.37, 4, &1.0).unwrap(), 0.37);
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(
            max_coherence_posterior(&q(1, 2), 1, &q(1, 2)).unwrap(),
            q(2, 3)
        );
        assert_eq!(
            max_coherence_posterior(&0.0, 2, &0.5).unwrap_err(),
            Error::ZeroExpectation
        );
    }

    #[test]
    fn grid_case_coherence() {
        let c = coherence_measure(&base(), &0.5).unwrap();
        assert!((c.c - 0.325 / 0.375).abs() < 1e-15);
        assert_eq!(c.n, 2);
    }

    #[test]
    fn maximal_coherence_and_randomizers_give_one() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let maxed = WeightVector::new(vec![q(3, 10), q(0, 1), q(0, 1), q(7, 10)]).unwrap();
        for x in [q(1, 10), q(1, 2), q(9, 10)] {
            assert_eq!(coherence_measure(&maxed, &x).unwrap().c, q(1, 1));
        }
        let any = WeightVector::new(vec![q(1, 10), q(2, 10), q(7, 10)]).unwrap();
        assert_eq!(coherence_measure(&any, &q(1, 1)).unwrap().c, q(1, 1));
    }

    #[test]
    fn coherence_undefined_for_zero_expectation() {
        assert_eq!(
            coherence_measure(&w(&[0.0, 0.5, 0.5]), &0.5).unwrap_err(),
            Error::ZeroExpectation
        );
    }

    #[test]
    fn pair_examples() {
        let a = w(&[0.1, 0.02, 0.88]);
        let b = w(&[0.2, 0.3, 0.5]);
        let v = compare_pair(&base(), &a).unwrap();
        assert_eq!(v.relation, Relation::SecondMoreCoherent);
        assert_eq!(v.criterion, Criterion::PairCriterion);
        assert_eq!(
            compare_pair(&base(), &b).unwrap().relation,
            Relation::Incomparable
        );
        assert_eq!(
            compare_pair(&base(), &base()).unwrap().relation,
            Relation::Equal
        );
        assert_eq!(
            compare_pair(&a, &base()).unwrap().relation,
            Relation::FirstMoreCoherent
        );
    }

    #[test]
    fn pair_rejects_zero_expectation_and_wrong_size() {
        assert_eq!(
            compare_pair(&base(), &w(&[0.0, 0.5, 0.5])).unwrap_err(),
            Error::ZeroExpectation
        );
        assert!(compare_pair(&base(), &w(&[0.1, 0.2, 0.3, 0.4])).is_err());
    }

    #[test]
    fn maximally_coherent_pairs_with_different_priors_are_equal() {
        assert_eq!(
            compare_pair(&w(&[0.3, 0.0, 0.7]), &w(&[0.6, 0.0, 0.4]))
                .unwrap()
                .relation,
            Relation::Equal
        );
    }

    #[test]
    fn general_falls_back_to_probe() {
        let v = compare_general(&w(&[0.2, 0.1, 0.1, 0.6]), &w(&[0.4, 0.1, 0.1, 0.4])).unwrap();
        assert_eq!(v.criterion, Criterion::GridProbe);
    }

    #[test]
    fn general_fires_on_condition_one() {
        let first = w(&[0.1, 0.02, 0.02, 0.86]);
        let second = w(&[0.2, 0.1, 0.1, 0.6]);
        let v = compare_general(&first, &second).unwrap();
        assert_eq!(v.criterion, Criterion::GeneralSufficient);
        assert_eq!(v.relation, Relation::FirstMoreCoherent);
        let probe = grid_probe(&first, &second, 999).unwrap();
        assert_eq!(probe.relation, Relation::FirstMoreCoherent);
        let swapped = compare_general(&second, &first).unwrap();
        assert_eq!(swapped.relation, Relation::SecondMoreCoherent);
    }

    #[test]
    fn general_identical_vectors_are_equal() {
        let v = w(&[0.2, 0.1, 0.1, 0.6]);
        assert_eq!(compare_general(&v, &v).unwrap().relation, Relation::Equal);
    }

    #[test]
    fn general_rejects_mismatched_sizes() {
        assert_eq!(
            compare_general(&base(), &w(&[0.2, 0.1, 0.1, 0.6])).unwrap_err(),
            Error::SizeMismatch(2, 3)
        );
    }

    #[test]
    fn probe_examples() {
        let a = w(&[0.1, 0.02, 0.88]);
        let b = w(&[0.2, 0.3, 0.5]);
        assert_eq!(
            grid_probe(&base(), &a, 999).unwrap().relation,
            Relation::SecondMoreCoherent
        );
        assert_eq!(
            grid_probe(&base(), &b, 999).unwrap().relation,
            Relation::Incomparable
        );
        assert_eq!(
            grid_probe(&base(), &base(), 999).unwrap().relation,
            Relation::Equal
        );
        assert_eq!(
            grid_probe(&base(), &a, 10).unwrap_err(),
            Error::ProbeResolution(10)
        );
    }
}
