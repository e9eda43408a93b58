//! Independent oracles and random generators shared by the integration tests.
//!
//! None of these go through the library's closed forms, elimination code or
//! reachability search.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use coherence_core::{BayesNet, Evidence, JointDistribution, NodeDef, WeightVector};
use rand::Rng;

/// `P(all R true | all REPR true)` by summing the full joint over
/// `R_1..R_n, REPR_1..REPR_n`, with per-source `(p_i, q_i)`.
pub fn brute_force_posterior(joint: &[f64], n: usize, sources: &[(f64, f64)]) -> f64 {
    let full = (1usize << n) - 1;
    let mut numerator = 0.0;
    let mut evidence = 0.0;
    for (r, &prior) in joint.iter().enumerate().take(full + 1) {
        for reports in 0..=full {
            let mut p = prior;
            for (i, &(pi, qi)) in sources.iter().enumerate().take(n) {
                let likelihood = if r >> i & 1 == 1 { pi } else { qi };
                p *= if reports >> i & 1 == 1 {
                    likelihood
                } else {
                    1.0 - likelihood
                };
            }
            if reports == full {
                evidence += p;
                if r == full {
                    numerator += p;
                }
            }
        }
    }
    numerator / evidence
}

/// Exact `P(query | evidence)` by enumerating every assignment of the net.
pub fn enumerate_posterior(net: &BayesNet<f64>, query: &str, evidence: &Evidence) -> Option<f64> {
    let n = net.len();
    assert!(n <= 22, "enumeration oracle limited to small nets");
    let q = net.node_index(query).unwrap();
    let observed: Vec<(usize, bool)> = evidence
        .iter()
        .map(|(name, v)| (net.node_index(name).unwrap(), v))
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for assignment in 0..1usize << n {
        if observed
            .iter()
            .any(|&(v, val)| (assignment >> v & 1 == 1) != val)
        {
            continue;
        }
        let mut p = 1.0;
        for v in 0..n {
            let mask = net
                .parents(v)
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &u)| acc | (assignment >> u & 1) << j);
            let t = net.cpt(v)[mask];
            p *= if assignment >> v & 1 == 1 { t } else { 1.0 - t };
        }
        den += p;
        if assignment >> q & 1 == 1 {
            num += p;
        }
    }
    (den > 0.0).then(|| num / den)
}

/// Composite Simpson on `[0, 1]` with `intervals` (even) equal panels.
pub fn composite_simpson(f: impl Fn(f64) -> f64, intervals: usize) -> f64 {
    assert!(intervals.is_multiple_of(2));
    let h = 1.0 / intervals as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for k in 1..intervals {
        let v = f(k as f64 * h);
        if k % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(0.0) + f(1.0) + 4.0 * odd + 2.0 * even)
}

/// `a_0 / sum a_i x^i` written out with explicit powers, extended to 1 at 0.
pub fn acceptance_integrand(a: &[f64]) -> impl Fn(f64) -> f64 + '_ {
    move |x| {
        if x == 0.0 {
            return if a[0] > 0.0 { 1.0 } else { 0.0 };
        }
        let den: f64 = a
            .iter()
            .enumerate()
            .map(|(i, ai)| ai * x.powi(i as i32))
            .sum();
        a[0] / den
    }
}

/// d-separation via the moralized ancestral graph.
pub fn moral_d_separated(net: &BayesNet<f64>, xs: &[usize], ys: &[usize], zs: &[usize]) -> bool {
    let mut keep = vec![false; net.len()];
    let mut stack: Vec<usize> = xs.iter().chain(ys).chain(zs).copied().collect();
    while let Some(v) = stack.pop() {
        if !std::mem::replace(&mut keep[v], true) {
            stack.extend_from_slice(net.parents(v));
        }
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); net.len()];
    for v in (0..net.len()).filter(|&v| keep[v]) {
        let ps = net.parents(v);
        for &p in ps {
            adj[v].insert(p);
            adj[p].insert(v);
        }
        for (i, &a) in ps.iter().enumerate() {
            for &b in &ps[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    let blocked: BTreeSet<usize> = zs.iter().copied().collect();
    let targets: BTreeSet<usize> = ys.iter().copied().collect();
    let mut seen: BTreeSet<usize> = xs.iter().copied().collect();
    let mut frontier: Vec<usize> = xs.to_vec();
    while let Some(v) = frontier.pop() {
        if targets.contains(&v) {
            return false;
        }
        for &u in &adj[v] {
            if !blocked.contains(&u) && seen.insert(u) {
                frontier.push(u);
            }
        }
    }
    true
}

/// Uniform point on the probability simplex with `k` coordinates.
pub fn simplex<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

pub fn random_joint<R: Rng>(rng: &mut R, n: usize) -> JointDistribution<f64> {
    JointDistribution::new(n, simplex(rng, 1 << n)).unwrap()
}

pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> WeightVector<f64> {
    WeightVector::new(simplex(rng, n + 1)).unwrap()
}

/// Random `p > q > 0` with `p <= 1`, kept away from the degenerate edges.
pub fn random_reliability<R: Rng>(rng: &mut R) -> (f64, f64) {
    let p = rng.gen_range(0.05..1.0);
    let q = p * rng.gen_range(0.01..0.99);
    (p, q)
}

/// Random DAG over `n` nodes: node `i` may only take parents `< i` in a
/// random permutation, at most `max_parents` of them.
pub fn random_net<R: Rng>(rng: &mut R, n: usize, max_parents: usize) -> BayesNet<f64> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let name = |i: usize| format!("V{i}");
    let mut defs: HashMap<usize, NodeDef<f64>> = HashMap::new();
    for (pos, &v) in order.iter().enumerate() {
        let mut parents: Vec<usize> = order[..pos]
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.4))
            .collect();
        parents.truncate(max_parents);
        let cpt = (0..1usize << parents.len())
            .map(|_| match rng.gen_range(0..10) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.gen::<f64>(),
            })
            .collect();
        let parent_names: Vec<String> = parents.iter().map(|&p| name(p)).collect();
        defs.insert(
            v,
            NodeDef {
                name: name(v),
                parents: parent_names,
                cpt,
            },
        );
    }
    BayesNet::new((0..n).map(|v| defs.remove(&v).unwrap()).collect()).unwrap()
}

pub fn names(net: &BayesNet<f64>, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| net.name(i).to_string()).collect()
}
