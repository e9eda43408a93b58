//! Probabilistic coherence of information sets, non-prioritized belief
//! expansion, and exact inference over binary Bayesian networks.
//!
//! Everything numeric is generic over [`Scalar`], so the same code runs in
//! `f64` and in exact [`Rational`] arithmetic. The aliases below fix the
//! two scalar types used in practice.
//!
//! ```
//! use coherence_core::{coherence_measure, grid_overlap_distribution, Rational};
//!
//! let d = grid_overlap_distribution::<Rational>(100, &[(41, 60), (51, 70)])?;
//! let w = d.weight_vector();
//! let c = coherence_measure(&w, &Rational::new(1.into(), 2.into()))?;
//! assert_eq!(c.c, Rational::new(13.into(), 15.into()));
//! # Ok::<(), coherence_core::Error>(())
//! ```

pub mod bayesnet;
pub mod coherence;
pub mod distribution;
pub mod error;
pub mod expansion;
mod format;
pub mod quadrature;
pub mod scalar;

pub use bayesnet::{
    build_figure_one, build_figure_two, BayesNet, Evidence, ExtraEdge, FigureOne, FigureSpec,
    FigureTwo, NetworkExpansion, NodeDef, SharedSource, SourceParams,
};
pub use coherence::{
    coherence_measure, compare_general, compare_general_with, compare_pair, grid_probe,
    max_coherence_posterior, posterior_confidence, CoherenceValue, Criterion, OrderingVerdict,
    Relation,
};
pub use distribution::{
    grid_overlap_distribution, load_distribution, JointDistribution, ReliabilityParams,
    WeightVector,
};
pub use error::{Error, Result};
pub use expansion::{
    acceptance, acceptance_weighted_form, averaged_acceptance, decide_expansion, ExpansionMode,
    ExpansionVerdict, WeightedAcceptance,
};
pub use scalar::{RealScalar, Scalar};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type JointDistributionF64 = JointDistribution<f64>;
pub type WeightVectorF64 = WeightVector<f64>;
pub type ReliabilityParamsF64 = ReliabilityParams<f64>;
pub type BayesNetF64 = BayesNet<f64>;
pub type FigureSpecF64 = FigureSpec<f64>;

pub type JointDistributionQ = JointDistribution<Rational>;
pub type WeightVectorQ = WeightVector<Rational>;
pub type ReliabilityParamsQ = ReliabilityParams<Rational>;
pub type BayesNetQ = BayesNet<Rational>;
pub type FigureSpecQ = FigureSpec<Rational>;
