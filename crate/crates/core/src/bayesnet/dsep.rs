use std::collections::VecDeque;

use super::BayesNet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

impl<T: Scalar> BayesNet<T> {
    /// True iff every trail between `xs` and `ys` is blocked by `zs`.
    ///
    /// Reachability ("Bayes ball") over (node, direction) states: a trail
    /// passes a non-collider only if it is unobserved, and passes a collider
    /// only if the collider or one of its descendants is observed.
    pub fn d_separated(&self, xs: &[&str], ys: &[&str], zs: &[&str]) -> Result<bool> {
        let resolve = |names: &[&str]| {
            names
                .iter()
                .map(|n| self.node_index(n))
                .collect::<Result<Vec<_>>>()
        };
        let (x, y, z) = (resolve(xs)?, resolve(ys)?, resolve(zs)?);
        let mut member = vec![0u8; self.len()];
        for (set, tag) in [(&x, 1u8), (&y, 2), (&z, 4)] {
            for &v in set.iter() {
                if member[v] != 0 && member[v] != tag {
                    return Err(Error::OverlappingSets(self.name(v).to_string()));
                }
                member[v] = tag;
            }
        }
        let observed = |v: usize| member[v] == 4;

        // z together with its ancestors: colliders in this set are open
        let mut opens_collider = vec![false; self.len()];
        let mut stack = z.clone();
        while let Some(v) = stack.pop() {
            if !std::mem::replace(&mut opens_collider[v], true) {
                stack.extend_from_slice(self.parents(v));
            }
        }

        // direction: true = arrived from a child (moving up)
        let mut visited = vec![[false; 2]; self.len()];
        let mut queue: VecDeque<(usize, bool)> = x.iter().map(|&v| (v, true)).collect();
        while let Some((v, up)) = queue.pop_front() {
            if std::mem::replace(&mut visited[v][usize::from(up)], true) {
                continue;
            }
            if !observed(v) && member[v] == 2 {
                return Ok(false);
            }
            if up {
                if !observed(v) {
                    queue.extend(self.parents(v).iter().map(|&p| (p, true)));
                    queue.extend(self.children(v).iter().map(|&c| (c, false)));
                }
            } else {
                if !observed(v) {
                    queue.extend(self.children(v).iter().map(|&c| (c, false)));
                }
                if opens_collider[v] {
                    queue.extend(self.parents(v).iter().map(|&p| (p, true)));
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::super::NodeDef;
    use super::*;

    fn net(edges: &[(&str, &[&str])]) -> BayesNet<f64> {
        BayesNet::new(
            edges
                .iter()
                .map(|(n, ps)| NodeDef::new(*n, ps, vec![0.5; 1 << ps.len()]))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn collider() {
        let g = net(&[("A", &[]), ("B", &[]), ("C", &["A", "B"]), ("D", &["C"])]);
        assert!(g.d_separated(&["A"], &["B"], &[]).unwrap());
        assert!(!g.d_separated(&["A"], &["B"], &["C"]).unwrap());
        assert!(!g.d_separated(&["A"], &["B"], &["D"]).unwrap());
    }

    #[test]
    fn chain_and_fork() {
        let chain = net(&[("A", &[]), ("B", &["A"]), ("C", &["B"])]);
        assert!(chain.d_separated(&["A"], &["C"], &["B"]).unwrap());
        assert!(!chain.d_separated(&["A"], &["C"], &[]).unwrap());
        let fork = net(&[("B", &[]), ("A", &["B"]), ("C", &["B"])]);
        assert!(fork.d_separated(&["A"], &["C"], &["B"]).unwrap());
        assert!(!fork.d_separated(&["A"], &["C"], &[]).unwrap());
    }

    #[test]
    fn overlapping_sets_rejected() {
        let chain = net(&[("A", &[]), ("B", &["A"])]);
        assert_eq!(
            chain.d_separated(&["A"], &["B"], &["A"]).unwrap_err(),
            Error::OverlappingSets("A".into())
        );
    }
}
