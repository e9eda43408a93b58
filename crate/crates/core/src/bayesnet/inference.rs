//! Variable elimination with a min-degree ordering.

use std::collections::BTreeSet;

use super::{BayesNet, Evidence};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Table over binary variables; bit `j` of an index is the value of `vars[j]`.
#[derive(Debug, Clone)]
struct Factor<T> {
    vars: Vec<usize>,
    table: Vec<T>,
}

impl<T: Scalar> Factor<T> {
    fn position(&self, var: usize) -> Option<usize> {
        self.vars.iter().position(|&v| v == var)
    }

    /// Fixes `var` to `value`, dropping it from the scope.
    fn restrict(self, var: usize, value: bool) -> Self {
        let Some(pos) = self.position(var) else {
            return self;
        };
        let low = (1usize << pos) - 1;
        let vars: Vec<usize> = self.vars.iter().copied().filter(|&v| v != var).collect();
        let table = (0..1usize << vars.len())
            .map(|m| {
                let full = (m & low) | ((m & !low) << 1) | (usize::from(value) << pos);
                self.table[full].clone()
            })
            .collect();
        Self { vars, table }
    }

    fn product(&self, other: &Self) -> Self {
        let mut vars = self.vars.clone();
        vars.extend(
            other
                .vars
                .iter()
                .copied()
                .filter(|v| !self.vars.contains(v)),
        );
        let place = |f: &Self| -> Vec<usize> {
            f.vars
                .iter()
                .map(|v| vars.iter().position(|u| u == v).expect("var in union"))
                .collect()
        };
        let (pa, pb) = (place(self), place(other));
        let project = |m: usize, places: &[usize]| {
            places
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &p)| acc | ((m >> p) & 1) << k)
        };
        let table = (0..1usize << vars.len())
            .map(|m| self.table[project(m, &pa)].clone() * other.table[project(m, &pb)].clone())
            .collect();
        Self { vars, table }
    }

    fn sum_out(&self, var: usize) -> Self {
        let pos = self.position(var).expect("summed variable in scope");
        let low = (1usize << pos) - 1;
        let vars: Vec<usize> = self.vars.iter().copied().filter(|&v| v != var).collect();
        let table = (0..1usize << vars.len())
            .map(|m| {
                let base = (m & low) | ((m & !low) << 1);
                self.table[base].clone() + self.table[base | 1 << pos].clone()
            })
            .collect();
        Self { vars, table }
    }
}

fn node_factor<T: Scalar>(net: &BayesNet<T>, node: usize) -> Factor<T> {
    let parents = net.parents(node);
    let cpt = net.cpt(node);
    let mut vars = parents.to_vec();
    vars.push(node);
    let k = parents.len();
    let table = (0..1usize << (k + 1))
        .map(|m| {
            let p_true = cpt[m & ((1 << k) - 1)].clone();
            if m >> k & 1 == 1 {
                p_true
            } else {
                T::one() - p_true
            }
        })
        .collect();
    Factor { vars, table }
}

fn ancestral_closure<T: Scalar>(
    net: &BayesNet<T>,
    seeds: impl IntoIterator<Item = usize>,
) -> Vec<bool> {
    let mut keep = vec![false; net.len()];
    let mut stack: Vec<usize> = seeds.into_iter().collect();
    while let Some(v) = stack.pop() {
        if !std::mem::replace(&mut keep[v], true) {
            stack.extend_from_slice(net.parents(v));
        }
    }
    keep
}

impl<T: Scalar> BayesNet<T> {
    /// Exact `P(query = true | evidence)`.
    ///
    /// Nodes that are not ancestors of the query or the evidence are pruned
    /// first; the remaining hidden variables are eliminated in min-degree
    /// order (ties broken by node index).
    pub fn posterior(&self, query: &str, evidence: &Evidence) -> Result<T> {
        let q = self.node_index(query)?;
        let observed = evidence
            .iter()
            .map(|(name, value)| Ok((self.node_index(name)?, value)))
            .collect::<Result<Vec<_>>>()?;
        if evidence.get(query).is_some() {
            return Err(Error::QueryObserved(query.to_string()));
        }

        let keep = ancestral_closure(
            self,
            std::iter::once(q).chain(observed.iter().map(|&(v, _)| v)),
        );
        let mut factors: Vec<Factor<T>> = (0..self.len())
            .filter(|&v| keep[v])
            .map(|v| {
                observed
                    .iter()
                    .fold(node_factor(self, v), |f, &(var, value)| {
                        f.restrict(var, value)
                    })
            })
            .collect();

        let mut hidden: BTreeSet<usize> = (0..self.len())
            .filter(|&v| keep[v] && v != q && evidence.get(self.name(v)).is_none())
            .collect();

        while let Some(var) = min_degree(&factors, &hidden) {
            hidden.remove(&var);
            let (touching, rest): (Vec<_>, Vec<_>) =
                factors.into_iter().partition(|f| f.vars.contains(&var));
            factors = rest;
            if let Some(joined) = touching.into_iter().reduce(|a, b| a.product(&b)) {
                factors.push(joined.sum_out(var));
            }
        }

        let result = factors
            .into_iter()
            .reduce(|a, b| a.product(&b))
            .expect("query factor present");
        let (p_false, p_true) = match result.vars.as_slice() {
            [v] if *v == q => (result.table[0].clone(), result.table[1].clone()),
            other => unreachable!("unexpected residual scope {other:?}"),
        };
        let z = p_false + p_true.clone();
        if z.is_zero() {
            return Err(Error::ImpossibleEvidence);
        }
        Ok(p_true / z)
    }
}

fn min_degree<T: Scalar>(factors: &[Factor<T>], hidden: &BTreeSet<usize>) -> Option<usize> {
    hidden
        .iter()
        .map(|&var| {
            let neighbours: BTreeSet<usize> = factors
                .iter()
                .filter(|f| f.vars.contains(&var))
                .flat_map(|f| f.vars.iter().copied())
                .filter(|&u| u != var)
                .collect();
            (neighbours.len(), var)
        })
        .min()
        .map(|(_, var)| var)
}

#[cfg(test)]
mod tests {
    use super::super::NodeDef;
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn single_node_prior() {
        let net = BayesNet::new(vec![NodeDef::new("A", &[], vec![0.3])]).unwrap();
        assert_eq!(net.posterior("A", &Evidence::new()).unwrap(), 0.3);
    }

    #[test]
    fn one_report_bayes() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let net = BayesNet::new(vec![
            NodeDef::new("R", &[], vec![q(1, 2)]),
            NodeDef::new("REPR", &["R"], vec![q(4, 10), q(8, 10)]),
        ])
        .unwrap();
        let e = Evidence::new().with("REPR", true).unwrap();
        assert_eq!(net.posterior("R", &e).unwrap(), q(2, 3));
    }

    #[test]
    fn errors() {
        let net = BayesNet::new(vec![
            NodeDef::new("A", &[], vec![1.0]),
            NodeDef::new("B", &["A"], vec![0.0, 1.0]),
        ])
        .unwrap();
        let e = Evidence::new().with("B", false).unwrap();
        assert_eq!(
            net.posterior("A", &e).unwrap_err(),
            Error::ImpossibleEvidence
        );
        assert_eq!(
            net.posterior("B", &e).unwrap_err(),
            Error::QueryObserved("B".into())
        );
        assert_eq!(
            net.posterior("Z", &e).unwrap_err(),
            Error::UnknownNode("Z".into())
        );
        let bad = Evidence::new().with("Y", true).unwrap();
        assert_eq!(
            net.posterior("A", &bad).unwrap_err(),
            Error::UnknownNode("Y".into())
        );
    }

    #[test]
    fn factor_restrict_and_sum() {
        let f = Factor {
            vars: vec![3, 5],
            table: vec![1.0, 2.0, 3.0, 4.0],
        };
        let r = f.clone().restrict(3, true);
        assert_eq!((r.vars.clone(), r.table.clone()), (vec![5], vec![2.0, 4.0]));
        let s = f.sum_out(5);
        assert_eq!((s.vars, s.table), (vec![3], vec![4.0, 6.0]));
    }
}
