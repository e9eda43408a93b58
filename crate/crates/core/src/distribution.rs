//! Joint distributions over binary propositions and their reduction to
//! negative-count weight vectors.
//!
//! Assignments are bitmasks: bit `i` set means proposition `R_{i+1}` is true.

use std::fmt;

use serde::de::{Deserializer, MapAccess, SeqAccess, Visitor};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::format::{bitstring, parse_bitstring, Pairs};
use crate::scalar::{abs, approx, from_count, lit, Scalar};

/// Largest number of propositional variables a dense table may hold.
pub const MAX_VARIABLES: usize = 20;

/// Accepted deviation of an input total from one before renormalizing.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Full probability table over `n` binary variables, indexed by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<T> {
    n: usize,
    probs: Vec<T>,
}

impl<T: Scalar> JointDistribution<T> {
    /// Validates a dense table and renormalizes it.
    ///
    /// The table must hold `2^n` non-negative entries whose total deviates
    /// from one by at most [`NORMALIZATION_TOLERANCE`].
    pub fn new(n: usize, probs: Vec<T>) -> Result<Self> {
        check_variable_count(n)?;
        if probs.len() != 1 << n {
            return Err(Error::TableLength {
                expected: 1 << n,
                found: probs.len(),
            });
        }
        let mut total = T::zero();
        for (mask, p) in probs.iter().enumerate() {
            // NaN compares as None and is rejected too
            if p.partial_cmp(&T::zero()).is_none_or(|o| o.is_lt()) {
                return Err(Error::NegativeProbability {
                    assignment: bitstring(mask, n),
                    value: approx(p),
                });
            }
            total = total + p.clone();
        }
        if abs(total.clone() - T::one()) > lit(NORMALIZATION_TOLERANCE) {
            return Err(Error::Unnormalized {
                sum: approx(&total),
            });
        }
        let probs = if total == T::one() {
            probs
        } else {
            probs.into_iter().map(|p| p / total.clone()).collect()
        };
        Ok(Self { n, probs })
    }

    /// Builds a table from `(assignment mask, probability)` pairs; omitted
    /// assignments get probability zero.
    pub fn from_sparse<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, T)>,
    {
        check_variable_count(n)?;
        let mut probs = vec![T::zero(); 1 << n];
        let mut seen = vec![false; 1 << n];
        for (mask, p) in entries {
            if mask >= probs.len() {
                return Err(Error::MalformedAssignment {
                    key: format!("{mask:#b}"),
                    reason: format!("mask exceeds {n} variables"),
                });
            }
            if std::mem::replace(&mut seen[mask], true) {
                return Err(Error::DuplicateAssignment(bitstring(mask, n)));
            }
            probs[mask] = p;
        }
        Self::new(n, probs)
    }

    /// Parses a JSON distribution document (table or grid form).
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DistributionDocument = serde_json::from_str(text)?;
        doc.build()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, mask: usize) -> &T {
        &self.probs[mask]
    }

    /// Marginal over the first `k` variables.
    pub fn marginal_prefix(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n {
            return Err(Error::VariableCount(k));
        }
        let keep = (1usize << k) - 1;
        let mut probs = vec![T::zero(); 1 << k];
        for (mask, p) in self.probs.iter().enumerate() {
            probs[mask & keep] = probs[mask & keep].clone() + p.clone();
        }
        Ok(Self { n: k, probs })
    }

    /// Reorders variables: variable `i` of the result is variable `order[i]`
    /// of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut check: Vec<usize> = order.to_vec();
        check.sort_unstable();
        if check != (0..self.n).collect::<Vec<_>>() {
            return Err(Error::InvalidSpec(format!(
                "{order:?} is not a permutation of 0..{}",
                self.n
            )));
        }
        let mut probs = vec![T::zero(); self.probs.len()];
        for (mask, p) in self.probs.iter().enumerate() {
            let target = order
                .iter()
                .enumerate()
                .filter(|(_, &src)| mask >> src & 1 == 1)
                .fold(0usize, |acc, (dst, _)| acc | 1 << dst);
            probs[target] = p.clone();
        }
        Ok(Self { n: self.n, probs })
    }

    /// Groups probability mass by the number of false propositions.
    pub fn weight_vector(&self) -> WeightVector<T> {
        let full = (1usize << self.n) - 1;
        let mut a = vec![T::zero(); self.n + 1];
        for (mask, p) in self.probs.iter().enumerate() {
            let negatives = (!mask & full).count_ones() as usize;
            a[negatives] = a[negatives].clone() + p.clone();
        }
        WeightVector { a }
    }
}

impl JointDistribution<f64> {
    /// Serializes to the sparse table document form, skipping zero entries.
    pub fn to_json(&self) -> serde_json::Value {
        let table: serde_json::Map<String, serde_json::Value> = self
            .probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != 0.0)
            .map(|(mask, p)| (bitstring(mask, self.n), serde_json::json!(p)))
            .collect();
        serde_json::json!({ "n": self.n, "table": table })
    }
}

fn check_variable_count(n: usize) -> Result<()> {
    if (1..=MAX_VARIABLES).contains(&n) {
        Ok(())
    } else {
        Err(Error::VariableCount(n))
    }
}

/// Parses a JSON distribution document into an `f64` table.
pub fn load_distribution(text: &str) -> Result<JointDistribution<f64>> {
    JointDistribution::from_json(text)
}

/// Uniform prior over `cells` numbered cells; proposition `i` says the
/// target lies in the inclusive 1-based range `intervals[i]`.
pub fn grid_overlap_distribution<T: Scalar>(
    cells: usize,
    intervals: &[(usize, usize)],
) -> Result<JointDistribution<T>> {
    if cells == 0 {
        return Err(Error::NoCells);
    }
    check_variable_count(intervals.len())?;
    for &(lo, hi) in intervals {
        if lo > hi {
            return Err(Error::EmptyInterval { lo, hi });
        }
        if lo < 1 || hi > cells {
            return Err(Error::IntervalOutOfRange { lo, hi, cells });
        }
    }
    let mut counts = vec![0usize; 1 << intervals.len()];
    for cell in 1..=cells {
        let mask = intervals
            .iter()
            .enumerate()
            .filter(|(_, &(lo, hi))| (lo..=hi).contains(&cell))
            .fold(0usize, |acc, (i, _)| acc | 1 << i);
        counts[mask] += 1;
    }
    let total: T = from_count(cells);
    let probs = counts
        .into_iter()
        .map(|c| from_count::<T>(c) / total.clone())
        .collect();
    // counts sum to `cells` so the table is already normalized
    Ok(JointDistribution {
        n: intervals.len(),
        probs,
    })
}

/// `<a_0, ..., a_n>`: `a[i]` is the total probability of assignments with
/// exactly `i` false propositions. `a_0` is the expectation measure.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T> {
    a: Vec<T>,
}

impl<T: Scalar> WeightVector<T> {
    /// Validates coefficients in `[0, 1]` summing to one within
    /// [`NORMALIZATION_TOLERANCE`], renormalizing if needed.
    pub fn new(a: Vec<T>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::WeightLength(a.len()));
        }
        let mut total = T::zero();
        for (index, v) in a.iter().enumerate() {
            if !(*v >= T::zero() && *v <= T::one()) {
                return Err(Error::WeightOutOfRange {
                    index,
                    value: approx(v),
                });
            }
            total = total + v.clone();
        }
        if abs(total.clone() - T::one()) > lit(NORMALIZATION_TOLERANCE) {
            return Err(Error::Unnormalized {
                sum: approx(&total),
            });
        }
        let a = if total == T::one() {
            a
        } else {
            a.into_iter().map(|v| v / total.clone()).collect()
        };
        Ok(Self { a })
    }

    pub fn from_f64s(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| lit(v)).collect())
    }

    /// Number of propositions in the set.
    pub fn n(&self) -> usize {
        self.a.len() - 1
    }

    pub fn coefficients(&self) -> &[T] {
        &self.a
    }

    pub fn a0(&self) -> &T {
        &self.a[0]
    }

    /// `1 - a_0`.
    pub fn a0_complement(&self) -> T {
        T::one() - self.a[0].clone()
    }

    /// Weight vector of the maximally coherent counterpart: same `a_0`,
    /// all remaining mass at `a_n`.
    pub fn max_coherent(&self) -> Self {
        let mut a = vec![T::zero(); self.a.len()];
        a[0] = self.a[0].clone();
        a[self.n()] = self.a0_complement();
        Self { a }
    }
}

/// Source reliability `(p, q)` with `p = P(report | true)` and
/// `q = P(report | false)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityParams<T> {
    p: T,
    q: T,
}

impl<T: Scalar> ReliabilityParams<T> {
    pub fn new(p: T, q: T) -> Result<Self> {
        if p <= T::one() && p > q && q > T::zero() {
            Ok(Self { p, q })
        } else {
            Err(Error::InvalidReliability {
                p: approx(&p),
                q: approx(&q),
            })
        }
    }

    pub fn p(&self) -> &T {
        &self.p
    }

    pub fn q(&self) -> &T {
        &self.q
    }

    /// Likelihood ratio `x = q / p`, in `(0, 1)`.
    pub fn likelihood_ratio(&self) -> T {
        self.q.clone() / self.p.clone()
    }

    /// Reliability measure `r = 1 - x`.
    pub fn reliability(&self) -> T {
        T::one() - self.likelihood_ratio()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct DistributionDocument {
    n: Option<usize>,
    table: Option<TableSpec>,
    cells: Option<usize>,
    intervals: Option<Vec<(usize, usize)>>,
}

impl DistributionDocument {
    pub(crate) fn build<T: Scalar>(self) -> Result<JointDistribution<T>> {
        match self {
            Self {
                n: Some(n),
                table: Some(table),
                cells: None,
                intervals: None,
            } => {
                check_variable_count(n)?;
                match table {
                    TableSpec::Dense(values) => {
                        JointDistribution::new(n, values.into_iter().map(lit).collect())
                    }
                    TableSpec::Sparse(pairs) => {
                        if let Some(dup) = pairs.first_duplicate() {
                            return Err(Error::DuplicateAssignment(dup.to_string()));
                        }
                        let entries = pairs
                            .0
                            .into_iter()
                            .map(|(k, v)| Ok((parse_bitstring(&k, n)?, lit(v))))
                            .collect::<Result<Vec<_>>>()?;
                        JointDistribution::from_sparse(n, entries)
                    }
                }
            }
            Self {
                n: None,
                table: None,
                cells: Some(cells),
                intervals: Some(intervals),
            } => grid_overlap_distribution(cells, &intervals),
            _ => Err(Error::Parse(
                "expected either {\"n\", \"table\"} or {\"cells\", \"intervals\"}".into(),
            )),
        }
    }
}

#[derive(Debug)]
enum TableSpec {
    Dense(Vec<f64>),
    Sparse(Pairs<f64>),
}

impl<'de> Deserialize<'de> for TableSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct TableVisitor;

        impl<'de> Visitor<'de> for TableVisitor {
            type Value = TableSpec;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of 2^n probabilities or an object keyed by bitstring")
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<TableSpec, A::Error> {
                let mut out = Vec::new();
                while let Some(v) = seq.next_element::<f64>()? {
                    out.push(v);
                }
                Ok(TableSpec::Dense(out))
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<TableSpec, A::Error> {
                let mut out = Vec::new();
                while let Some(entry) = map.next_entry::<String, f64>()? {
                    out.push(entry);
                }
                Ok(TableSpec::Sparse(Pairs(out)))
            }
        }

        d.deserialize_any(TableVisitor)
    }
}
