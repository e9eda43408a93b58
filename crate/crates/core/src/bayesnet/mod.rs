//! Binary-variable Bayesian networks: exact inference, d-separation, and
//! constructors for the coherence and expansion networks.

mod dsep;
mod figures;
mod inference;

use std::collections::{BTreeMap, HashMap};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::format::{bitstring, parse_bitstring, Pairs};
use crate::scalar::{approx, lit, Scalar};

pub use figures::{
    build_figure_one, build_figure_two, ExtraEdge, FigureOne, FigureOneSpec, FigureSpec, FigureTwo,
    FigureTwoSpec, NetworkExpansion, SharedSource, SourceParams,
};

/// A node before name resolution. `cpt[mask]` is `P(node = true | parents)`
/// where bit `j` of `mask` is the value of `parents[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDef<T> {
    pub name: String,
    pub parents: Vec<String>,
    pub cpt: Vec<T>,
}

impl<T> NodeDef<T> {
    pub fn new(name: impl Into<String>, parents: &[&str], cpt: Vec<T>) -> Self {
        Self {
            name: name.into(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            cpt,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Node<T> {
    pub(crate) name: String,
    pub(crate) parents: Vec<usize>,
    pub(crate) cpt: Vec<T>,
}

/// Validated DAG of binary nodes. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet<T> {
    nodes: Vec<Node<T>>,
    children: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl<T: Scalar> BayesNet<T> {
    /// Resolves parent names and validates the result. Nodes may be listed
    /// in any order.
    pub fn new(defs: Vec<NodeDef<T>>) -> Result<Self> {
        let mut index = HashMap::with_capacity(defs.len());
        for (i, d) in defs.iter().enumerate() {
            if index.insert(d.name.clone(), i).is_some() {
                return Err(Error::DuplicateNode(d.name.clone()));
            }
        }
        let mut nodes = Vec::with_capacity(defs.len());
        for d in defs {
            let parents = d
                .parents
                .iter()
                .map(|p| {
                    index
                        .get(p)
                        .copied()
                        .ok_or_else(|| Error::UnknownNode(p.clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            nodes.push(Node {
                name: d.name,
                parents,
                cpt: d.cpt,
            });
        }
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            for &p in &n.parents {
                children[p].push(i);
            }
        }
        let net = Self {
            nodes,
            children,
            index,
        };
        net.validate()?;
        Ok(net)
    }

    /// Checks CPT shapes, probability ranges and acyclicity.
    pub fn validate(&self) -> Result<()> {
        for n in &self.nodes {
            let mut sorted = n.parents.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidSpec(format!(
                    "node {:?} lists parent {:?} twice",
                    n.name, self.nodes[w[0]].name
                )));
            }
            let expected = 1usize << n.parents.len();
            if n.cpt.len() != expected {
                return Err(Error::CptArity {
                    node: n.name.clone(),
                    expected,
                    found: n.cpt.len(),
                });
            }
            if let Some(bad) = n
                .cpt
                .iter()
                .find(|v| !(**v >= T::zero() && **v <= T::one()))
            {
                return Err(Error::CptRange {
                    node: n.name.clone(),
                    value: approx(bad),
                });
            }
        }
        self.topological_order().map(|_| ())
    }

    /// Kahn's algorithm; ties resolved by declaration order.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let mut indegree: Vec<usize> = self.nodes.iter().map(|n| n.parents.len()).collect();
        let mut ready: std::collections::BTreeSet<usize> = (0..self.nodes.len())
            .filter(|&i| indegree[i] == 0)
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if order.len() == self.nodes.len() {
            Ok(order)
        } else {
            let stuck = (0..self.nodes.len())
                .find(|&i| indegree[i] > 0)
                .unwrap_or(0);
            Err(Error::Cycle(self.nodes[stuck].name.clone()))
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn node_names(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.name.as_str())
    }

    pub fn name(&self, index: usize) -> &str {
        &self.nodes[index].name
    }

    pub fn parents(&self, index: usize) -> &[usize] {
        &self.nodes[index].parents
    }

    pub fn children(&self, index: usize) -> &[usize] {
        &self.children[index]
    }

    pub fn cpt(&self, index: usize) -> &[T] {
        &self.nodes[index].cpt
    }

    /// Node definitions in declaration order, parents by name.
    pub fn to_defs(&self) -> Vec<NodeDef<T>> {
        self.nodes
            .iter()
            .map(|n| NodeDef {
                name: n.name.clone(),
                parents: n
                    .parents
                    .iter()
                    .map(|&p| self.nodes[p].name.clone())
                    .collect(),
                cpt: n.cpt.clone(),
            })
            .collect()
    }

    /// Parses a JSON network document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDocument = serde_json::from_str(text)?;
        let defs = doc
            .nodes
            .into_iter()
            .map(|n| {
                let cpt = cpt_from_pairs(&n.name, n.parents.len(), n.cpt)?;
                Ok(NodeDef {
                    name: n.name,
                    parents: n.parents,
                    cpt,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(defs)
    }

    /// Serializes to the JSON network document form.
    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = self
            .to_defs()
            .into_iter()
            .map(|d| {
                let k = d.parents.len();
                let cpt: serde_json::Map<String, serde_json::Value> = d
                    .cpt
                    .iter()
                    .enumerate()
                    .map(|(mask, v)| (bitstring(mask, k), serde_json::json!(approx(v))))
                    .collect();
                serde_json::json!({ "name": d.name, "parents": d.parents, "cpt": cpt })
            })
            .collect();
        serde_json::json!({ "nodes": nodes })
    }
}

/// Reads a `{parent-bitstring: P(true)}` object into a dense CPT.
pub(crate) fn cpt_from_pairs<T: Scalar>(
    node: &str,
    arity: usize,
    pairs: Pairs<f64>,
) -> Result<Vec<T>> {
    if let Some(dup) = pairs.first_duplicate() {
        return Err(Error::DuplicateAssignment(dup.to_string()));
    }
    let expected = 1usize << arity;
    if pairs.0.len() != expected {
        return Err(Error::CptArity {
            node: node.to_string(),
            expected,
            found: pairs.0.len(),
        });
    }
    let mut cpt = vec![T::zero(); expected];
    for (key, v) in pairs.0 {
        cpt[parse_bitstring(&key, arity)?] = lit(v);
    }
    Ok(cpt)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDocument {
    nodes: Vec<NodeDocument>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDocument {
    name: String,
    #[serde(default)]
    parents: Vec<String>,
    cpt: Pairs<f64>,
}

/// Observed node values, keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence(BTreeMap<String, bool>);

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an observation; observing the same node twice is an error.
    pub fn observe(&mut self, name: impl Into<String>, value: bool) -> Result<()> {
        let name = name.into();
        if self.0.contains_key(&name) {
            return Err(Error::DuplicateEvidence(name));
        }
        self.0.insert(name, value);
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, value: bool) -> Result<Self> {
        self.observe(name, value)?;
        Ok(self)
    }

    /// Parses a `{name: bool}` JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let pairs: Pairs<bool> = serde_json::from_str(text)?;
        let mut e = Self::new();
        for (k, v) in pairs.0 {
            e.observe(k, v)?;
        }
        Ok(e)
    }

    pub fn get(&self, name: &str) -> Option<bool> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
