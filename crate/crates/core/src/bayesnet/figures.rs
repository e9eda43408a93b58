//! Network constructions for reading off coherence and acceptance values.
//!
//! Node naming: `R{i}` propositions, `REPR{i}` reports, `REPR{i}_{j}` a
//! single source reporting on items `i` and `j`, `C` / `C{k}` conjunction
//! nodes, and `REP{i}&R` counterfactual reports on the conjunction.

use std::collections::BTreeSet;

use serde::Deserialize;

use super::{cpt_from_pairs, BayesNet, Evidence, NodeDef};
use crate::distribution::{DistributionDocument, JointDistribution};
use crate::error::{Error, Result};
use crate::format::Pairs;
use crate::scalar::{approx, lit, Scalar};

/// Reliability of one source: `p = P(report | true)`, `q = P(report | false)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceParams<T> {
    pub p: T,
    pub q: T,
}

/// Extra parents for a report node. `cpt` is over `[R{i}, parents...]` in
/// that order and replaces the default `(q, p)` table.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtraEdge<T> {
    pub child: String,
    pub parents: Vec<String>,
    pub cpt: Vec<T>,
}

/// One source reporting on two items: a single node `REPR{i}_{j}` with
/// parents `[R{i}, R{j}]` and a user-supplied table.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedSource<T> {
    pub items: (usize, usize),
    pub cpt: Vec<T>,
}

/// Input for both network constructions. `sources` holds one shared entry
/// or one entry per proposition.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec<T> {
    pub distribution: JointDistribution<T>,
    pub sources: Vec<SourceParams<T>>,
    pub extra_edges: Vec<ExtraEdge<T>>,
    pub shared_sources: Vec<SharedSource<T>>,
    /// Admits reliability parameters outside `p > q > 0`.
    pub relaxed: bool,
}

pub type FigureOneSpec<T> = FigureSpec<T>;
pub type FigureTwoSpec<T> = FigureSpec<T>;

impl<T: Scalar> FigureSpec<T> {
    /// Idealized spec: every source shares `(p, q)`.
    pub fn shared(distribution: JointDistribution<T>, p: T, q: T) -> Self {
        Self {
            distribution,
            sources: vec![SourceParams { p, q }],
            extra_edges: Vec::new(),
            shared_sources: Vec::new(),
            relaxed: false,
        }
    }

    pub fn per_source(distribution: JointDistribution<T>, sources: Vec<SourceParams<T>>) -> Self {
        Self {
            distribution,
            sources,
            extra_edges: Vec::new(),
            shared_sources: Vec::new(),
            relaxed: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FigureDocument = serde_json::from_str(text)?;
        let distribution = doc.distribution.build()?;
        let extra_edges = doc
            .extra_edges
            .into_iter()
            .map(|e| {
                let cpt = cpt_from_pairs(&e.child, e.parents.len() + 1, e.cpt)?;
                Ok(ExtraEdge {
                    child: e.child,
                    parents: e.parents,
                    cpt,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let shared_sources = doc
            .shared_sources
            .into_iter()
            .map(|s| {
                let name = format!("REPR{}_{}", s.items.0, s.items.1);
                Ok(SharedSource {
                    items: s.items,
                    cpt: cpt_from_pairs(&name, 2, s.cpt)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            distribution,
            sources: doc
                .sources
                .into_iter()
                .map(|s| SourceParams {
                    p: lit(s.p),
                    q: lit(s.q),
                })
                .collect(),
            extra_edges,
            shared_sources,
            relaxed: doc.relaxed,
        })
    }

    fn source(&self, item: usize) -> &SourceParams<T> {
        if self.sources.len() == 1 {
            &self.sources[0]
        } else {
            &self.sources[item - 1]
        }
    }

    /// True when the network reduces to the single-`x` closed forms: one
    /// shared `(p, q)` with `p > q > 0` and no extra structure.
    pub fn closed_form_available(&self) -> bool {
        let first = &self.sources[0];
        self.extra_edges.is_empty()
            && self.shared_sources.is_empty()
            && self.sources.iter().all(|s| s == first)
            && first.p <= T::one()
            && first.p > first.q
            && first.q > T::zero()
    }

    /// The shared likelihood ratio `q / p`, when the closed forms apply.
    pub fn likelihood_ratio(&self) -> Option<T> {
        self.closed_form_available()
            .then(|| self.sources[0].q.clone() / self.sources[0].p.clone())
    }

    fn check(&self) -> Result<()> {
        let items = self.distribution.n();
        if self.sources.len() != 1 && self.sources.len() != items {
            return Err(Error::InvalidSpec(format!(
                "expected 1 or {items} sources, got {}",
                self.sources.len()
            )));
        }
        for s in &self.sources {
            let in_unit = |v: &T| *v >= T::zero() && *v <= T::one();
            let ok = if self.relaxed {
                in_unit(&s.p) && in_unit(&s.q)
            } else {
                s.p <= T::one() && s.p > s.q && s.q > T::zero()
            };
            if !ok {
                return Err(Error::InvalidReliability {
                    p: approx(&s.p),
                    q: approx(&s.q),
                });
            }
        }
        let mut shared_items = BTreeSet::new();
        for s in &self.shared_sources {
            let (i, j) = s.items;
            if i == j || !(1..=items).contains(&i) || !(1..=items).contains(&j) {
                return Err(Error::InvalidSpec(format!(
                    "shared source items ({i}, {j}) invalid"
                )));
            }
            if !shared_items.insert(i) || !shared_items.insert(j) {
                return Err(Error::InvalidSpec(format!(
                    "item in shared source ({i}, {j}) already has a shared source"
                )));
            }
        }
        let mut children = BTreeSet::new();
        for e in &self.extra_edges {
            let i = report_item(&e.child, items).ok_or_else(|| {
                Error::InvalidSpec(format!(
                    "extra edge child {:?} is not a report node",
                    e.child
                ))
            })?;
            if shared_items.contains(&i) {
                return Err(Error::InvalidSpec(format!(
                    "{:?} is replaced by a shared source",
                    e.child
                )));
            }
            if !children.insert(i) {
                return Err(Error::InvalidSpec(format!(
                    "{:?} has two extra-edge entries",
                    e.child
                )));
            }
            for p in &e.parents {
                let j = report_item(p, items)
                    .filter(|j| !shared_items.contains(j))
                    .or_else(|| proposition_item(p, items))
                    .ok_or_else(|| {
                        Error::InvalidSpec(format!(
                            "extra edge parent {p:?} is not a proposition or report node"
                        ))
                    })?;
                if j == i {
                    return Err(Error::InvalidSpec(format!(
                        "extra edge {p:?} -> {:?} links the same item",
                        e.child
                    )));
                }
            }
        }
        Ok(())
    }

    /// `R1..Rn` chain factorization, then report nodes. Returns the
    /// definitions and the report nodes with the items each one covers.
    fn base_nodes(&self) -> (Vec<NodeDef<T>>, Vec<ReportNode>) {
        let mut defs = chain_factorization(&self.distribution);
        let mut reports = Vec::new();
        for i in 1..=self.distribution.n() {
            if let Some(s) = self
                .shared_sources
                .iter()
                .find(|s| s.items.0 == i || s.items.1 == i)
            {
                if s.items.0.min(s.items.1) != i {
                    continue;
                }
                let name = format!("REPR{}_{}", s.items.0, s.items.1);
                defs.push(NodeDef {
                    name: name.clone(),
                    parents: vec![format!("R{}", s.items.0), format!("R{}", s.items.1)],
                    cpt: s.cpt.clone(),
                });
                reports.push((name, vec![s.items.0, s.items.1]));
                continue;
            }
            let name = format!("REPR{i}");
            let def = match self.extra_edges.iter().find(|e| e.child == name) {
                Some(e) => NodeDef {
                    name: name.clone(),
                    parents: std::iter::once(format!("R{i}"))
                        .chain(e.parents.iter().cloned())
                        .collect(),
                    cpt: e.cpt.clone(),
                },
                None => {
                    let s = self.source(i);
                    NodeDef {
                        name: name.clone(),
                        parents: vec![format!("R{i}")],
                        cpt: vec![s.q.clone(), s.p.clone()],
                    }
                }
            };
            defs.push(def);
            reports.push((name, vec![i]));
        }
        (defs, reports)
    }
}

fn item_suffix(name: &str, prefix: &str, items: usize) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    if rest.starts_with('0') {
        return None;
    }
    rest.parse().ok().filter(|i| (1..=items).contains(i))
}

fn report_item(name: &str, items: usize) -> Option<usize> {
    item_suffix(name, "REPR", items)
}

fn proposition_item(name: &str, items: usize) -> Option<usize> {
    item_suffix(name, "R", items)
}

/// `R_i` gets parents `R_1..R_{i-1}` and the exact conditionals of the
/// joint; contexts of probability zero get 1/2, which no query can reach.
fn chain_factorization<T: Scalar>(d: &JointDistribution<T>) -> Vec<NodeDef<T>> {
    let n = d.n();
    // marginals[k][mask] = P(first k variables = mask)
    let mut marginals: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    marginals.push(d.probs().to_vec());
    for k in (0..n).rev() {
        let finer = marginals.last().expect("seeded");
        let coarser = (0..1usize << k)
            .map(|m| finer[m].clone() + finer[m | 1 << k].clone())
            .collect();
        marginals.push(coarser);
    }
    marginals.reverse();

    let half: T = lit(0.5);
    (0..n)
        .map(|i| {
            let cpt = (0..1usize << i)
                .map(|m| {
                    let context = &marginals[i][m];
                    if context.is_zero() {
                        half.clone()
                    } else {
                        marginals[i + 1][m | 1 << i].clone() / context.clone()
                    }
                })
                .collect();
            NodeDef {
                name: format!("R{}", i + 1),
                parents: (1..=i).map(|j| format!("R{j}")).collect(),
                cpt,
            }
        })
        .collect()
}

/// Deterministic AND over `parents`.
fn conjunction<T: Scalar>(name: &str, parents: Vec<String>) -> NodeDef<T> {
    let full = (1usize << parents.len()) - 1;
    let cpt = (0..=full)
        .map(|m| if m == full { T::one() } else { T::zero() })
        .collect();
    NodeDef {
        name: name.to_string(),
        parents,
        cpt,
    }
}

fn all_true<'a>(names: impl IntoIterator<Item = &'a String>) -> Result<Evidence> {
    names
        .into_iter()
        .try_fold(Evidence::new(), |e, n| e.with(n.clone(), true))
}

/// A report node and the items it covers.
type ReportNode = (String, Vec<usize>);

/// Coherence network over `R1..Rn`.
#[derive(Debug, Clone)]
pub struct FigureOne<T> {
    pub net: BayesNet<T>,
    pub n: usize,
    pub reports: Vec<String>,
    pub counterfactual_reports: Vec<String>,
    pub closed_form: bool,
}

/// Builds the coherence network. `C` is the conjunction of all
/// propositions; each `REP{i}&R` has `C` as its only parent and the
/// source's `(q, p)` table, so instantiating all of them gives the posterior
/// of a maximally coherent set with the same prior.
pub fn build_figure_one<T: Scalar>(spec: &FigureOneSpec<T>) -> Result<FigureOne<T>> {
    spec.check()?;
    let n = spec.distribution.n();
    let (mut defs, reports) = spec.base_nodes();
    defs.push(conjunction("C", (1..=n).map(|i| format!("R{i}")).collect()));
    let mut counterfactual_reports = Vec::with_capacity(n);
    for i in 1..=n {
        let s = spec.source(i);
        let name = format!("REP{i}&R");
        defs.push(NodeDef {
            name: name.clone(),
            parents: vec!["C".into()],
            cpt: vec![s.q.clone(), s.p.clone()],
        });
        counterfactual_reports.push(name);
    }
    Ok(FigureOne {
        net: BayesNet::new(defs)?,
        n,
        reports: reports.into_iter().map(|(name, _)| name).collect(),
        counterfactual_reports,
        closed_form: spec.closed_form_available(),
    })
}

impl<T: Scalar> FigureOne<T> {
    /// `P(C | every report)`.
    pub fn posterior_confidence(&self) -> Result<T> {
        self.net.posterior("C", &all_true(&self.reports)?)
    }

    /// `P(C | every REP{i}&R)`.
    pub fn max_coherence_posterior(&self) -> Result<T> {
        self.net
            .posterior("C", &all_true(&self.counterfactual_reports)?)
    }

    /// Ratio of the two read-offs; undefined when the prior of `C` is zero.
    pub fn coherence(&self) -> Result<T> {
        let max = self.max_coherence_posterior()?;
        if max.is_zero() {
            return Err(Error::ZeroExpectation);
        }
        Ok(self.posterior_confidence()? / max)
    }
}

/// Expansion network over `R1..Rn+1`.
#[derive(Debug, Clone)]
pub struct FigureTwo<T> {
    pub net: BayesNet<T>,
    /// Size of the current belief set.
    pub n: usize,
    /// Reports covering only `R1..Rn`.
    pub old_reports: Vec<String>,
    pub all_reports: Vec<String>,
    pub closed_form: bool,
}

/// Read-offs of the expansion network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkExpansion<T> {
    pub accept: bool,
    pub value_old: T,
    pub value_new: T,
    pub threshold_met: bool,
}

/// Builds the expansion network: conjunction `C{n}` over `R1..Rn` and
/// `C{n+1}` over all propositions.
pub fn build_figure_two<T: Scalar>(spec: &FigureTwoSpec<T>) -> Result<FigureTwo<T>> {
    spec.check()?;
    let total = spec.distribution.n();
    if total < 2 {
        return Err(Error::InvalidSpec(
            "expansion network needs at least two propositions".into(),
        ));
    }
    let n = total - 1;
    let (mut defs, reports) = spec.base_nodes();
    defs.push(conjunction(
        &format!("C{n}"),
        (1..=n).map(|i| format!("R{i}")).collect(),
    ));
    defs.push(conjunction(
        &format!("C{total}"),
        (1..=total).map(|i| format!("R{i}")).collect(),
    ));
    let old_reports = reports
        .iter()
        .filter(|(_, items)| items.iter().all(|&i| i <= n))
        .map(|(name, _)| name.clone())
        .collect();
    Ok(FigureTwo {
        net: BayesNet::new(defs)?,
        n,
        old_reports,
        all_reports: reports.into_iter().map(|(name, _)| name).collect(),
        closed_form: spec.closed_form_available(),
    })
}

impl<T: Scalar> FigureTwo<T> {
    pub fn old_conjunction(&self) -> String {
        format!("C{}", self.n)
    }

    pub fn new_conjunction(&self) -> String {
        format!("C{}", self.n + 1)
    }

    /// `P(C{n} | reports on R1..Rn)`.
    pub fn acceptance_old(&self) -> Result<T> {
        self.net
            .posterior(&self.old_conjunction(), &all_true(&self.old_reports)?)
    }

    /// `P(C{n+1} | every report)`.
    pub fn acceptance_new(&self) -> Result<T> {
        self.net
            .posterior(&self.new_conjunction(), &all_true(&self.all_reports)?)
    }

    pub fn decide(&self, threshold: T) -> Result<NetworkExpansion<T>> {
        if !(threshold >= T::zero() && threshold <= T::one()) {
            return Err(Error::InvalidThreshold(approx(&threshold)));
        }
        let value_old = self.acceptance_old()?;
        let value_new = self.acceptance_new()?;
        Ok(NetworkExpansion {
            accept: value_new >= value_old,
            threshold_met: value_old >= threshold,
            value_old,
            value_new,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FigureDocument {
    distribution: DistributionDocument,
    sources: Vec<SourceDocument>,
    #[serde(default)]
    extra_edges: Vec<ExtraEdgeDocument>,
    #[serde(default)]
    shared_sources: Vec<SharedSourceDocument>,
    #[serde(default)]
    relaxed: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceDocument {
    p: f64,
    q: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtraEdgeDocument {
    child: String,
    parents: Vec<String>,
    cpt: Pairs<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SharedSourceDocument {
    items: (usize, usize),
    cpt: Pairs<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::grid_overlap_distribution;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn grid_case() -> JointDistribution<BigRational> {
        grid_overlap_distribution(100, &[(41, 60), (51, 70)]).unwrap()
    }

    #[test]
    fn chain_factorization_reproduces_joint() {
        let d = grid_overlap_distribution::<BigRational>(20, &[(1, 8), (5, 12), (7, 20)]).unwrap();
        let defs = chain_factorization(&d);
        for mask in 0..8usize {
            let mut p = q(1, 1);
            for (i, def) in defs.iter().enumerate() {
                let context = mask & ((1 << i) - 1);
                let t = def.cpt[context].clone();
                p *= if mask >> i & 1 == 1 { t } else { q(1, 1) - t };
            }
            assert_eq!(&p, d.prob(mask), "mask {mask:03b}");
        }
    }

    #[test]
    fn grid_case_readoffs_exact() {
        let fig = build_figure_one(&FigureSpec::shared(grid_case(), q(8, 10), q(4, 10))).unwrap();
        assert_eq!(fig.posterior_confidence().unwrap(), q(1, 10) / q(375, 1000));
        assert_eq!(
            fig.max_coherence_posterior().unwrap(),
            q(1, 10) / q(325, 1000)
        );
        assert_eq!(fig.coherence().unwrap(), q(325, 375));
        assert!(fig.closed_form);
    }

    #[test]
    fn single_proposition_is_maximally_coherent() {
        let d = JointDistribution::new(1, vec![q(7, 10), q(3, 10)]).unwrap();
        let fig = build_figure_one(&FigureSpec::shared(d, q(9, 10), q(2, 10))).unwrap();
        assert_eq!(fig.coherence().unwrap(), q(1, 1));
    }

    #[test]
    fn grid_case_expansion_readoffs() {
        let fig = build_figure_two(&FigureSpec::shared(grid_case(), q(8, 10), q(4, 10))).unwrap();
        let v = fig.decide(q(1, 2)).unwrap();
        assert_eq!(v.value_old, q(1, 3));
        assert_eq!(v.value_new, q(1, 10) / q(375, 1000));
        assert!(!v.accept);
        assert!(!v.threshold_met);
    }

    #[test]
    fn randomizer_source_is_evidence_neutral() {
        let mut spec = FigureSpec::per_source(
            grid_case(),
            vec![
                SourceParams {
                    p: q(8, 10),
                    q: q(4, 10),
                },
                SourceParams {
                    p: q(1, 2),
                    q: q(1, 2),
                },
            ],
        );
        assert!(build_figure_two(&spec).is_err());
        spec.relaxed = true;
        let fig = build_figure_two(&spec).unwrap();
        assert!(!fig.closed_form);
        let with = Evidence::new()
            .with("REPR1", true)
            .unwrap()
            .with("REPR2", true)
            .unwrap();
        let without = Evidence::new().with("REPR1", true).unwrap();
        for node in ["R1", "R2", "C1", "C2"] {
            assert_eq!(
                fig.net.posterior(node, &with).unwrap(),
                fig.net.posterior(node, &without).unwrap()
            );
        }
    }

    #[test]
    fn spec_validation() {
        let mut spec = FigureSpec::shared(grid_case(), q(4, 10), q(5, 10));
        assert!(matches!(
            build_figure_one(&spec),
            Err(Error::InvalidReliability { .. })
        ));
        spec.sources = vec![
            SourceParams {
                p: q(8, 10),
                q: q(4, 10)
            };
            3
        ];
        assert!(matches!(
            build_figure_one(&spec),
            Err(Error::InvalidSpec(_))
        ));
        spec.sources.truncate(1);
        spec.extra_edges.push(ExtraEdge {
            child: "REPR1".into(),
            parents: vec!["R1".into()],
            cpt: vec![q(1, 2); 4],
        });
        assert!(matches!(
            build_figure_one(&spec),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn extra_edge_cycle_is_rejected() {
        let mut spec = FigureSpec::shared(grid_case(), q(8, 10), q(4, 10));
        for (child, parent) in [("REPR1", "REPR2"), ("REPR2", "REPR1")] {
            spec.extra_edges.push(ExtraEdge {
                child: child.into(),
                parents: vec![parent.into()],
                cpt: vec![q(1, 2); 4],
            });
        }
        assert!(matches!(build_figure_one(&spec), Err(Error::Cycle(_))));
    }

    #[test]
    fn shared_source_replaces_two_reports() {
        let mut spec = FigureSpec::shared(grid_case(), q(8, 10), q(4, 10));
        spec.shared_sources.push(SharedSource {
            items: (1, 2),
            cpt: vec![q(1, 10), q(3, 10), q(3, 10), q(9, 10)],
        });
        let fig = build_figure_one(&spec).unwrap();
        assert_eq!(fig.reports, vec!["REPR1_2".to_string()]);
        assert!(!fig.closed_form);
        // P(C | REPR1_2) = 0.1 * 0.9 / sum over cells
        let expected = q(1, 10) * q(9, 10)
            / (q(1, 10) * q(9, 10) + q(1, 10) * q(3, 10) * q(2, 1) + q(7, 10) * q(1, 10));
        assert_eq!(fig.posterior_confidence().unwrap(), expected);
    }

    #[test]
    fn json_spec() {
        let text = r#"{
            "distribution": {"cells": 100, "intervals": [[41, 60], [51, 70]]},
            "sources": [{"p": 0.8, "q": 0.4}],
            "extra_edges": [{"child": "REPR2", "parents": ["REPR1"],
                             "cpt": {"00": 0.4, "10": 0.8, "01": 0.5, "11": 0.9}}]
        }"#;
        let spec = FigureSpec::<f64>::from_json(text).unwrap();
        assert_eq!(spec.extra_edges[0].cpt, vec![0.4, 0.8, 0.5, 0.9]);
        let fig = build_figure_one(&spec).unwrap();
        assert_eq!(
            fig.net.parents(fig.net.node_index("REPR2").unwrap()).len(),
            2
        );
    }
}
