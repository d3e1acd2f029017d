//! Deliberately naive reference implementations. They read partitions,
//! orders and metrics only as data and recompute everything by exhaustive
//! scans over state pairs.

use trustrev::{holds, Formula, Signature, State, StatePartition, TrustMetric};

fn states(sig: &Signature) -> Vec<State> {
    (0..sig.state_count()).map(|i| sig.state(i)).collect()
}

fn same_cell(p: &StatePartition, s: &State, t: &State) -> bool {
    p.cells().iter().any(|c| c.contains(s) && c.contains(t))
}

/// `{s : some model t of f shares a cell with s}`, as sorted indices.
pub fn oracle_expand(p: &StatePartition, f: &Formula) -> Vec<usize> {
    let all = states(p.signature());
    let mut out = Vec::new();
    for s in &all {
        if all.iter().any(|t| holds(t, f) && same_cell(p, s, t)) {
            out.push(s.index());
        }
    }
    out
}

/// Least-rank members of `set` under `rank`, as sorted indices.
pub fn oracle_revise(rank: impl Fn(usize) -> u64, set: &[usize]) -> Vec<usize> {
    let mut best: Option<u64> = None;
    for &s in set {
        let r = rank(s);
        if best.is_none_or(|b| r < b) {
            best = Some(r);
        }
    }
    set.iter()
        .copied()
        .filter(|&s| Some(rank(s)) == best)
        .collect()
}

pub fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.contains(x)).collect()
}

/// Connected components of `d <= i`, by repeated relaxation of labels.
pub fn oracle_closure_labels(d: &TrustMetric, i: u32) -> Vec<usize> {
    let n = d.signature().state_count();
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for s in 0..n {
            for t in 0..n {
                if d.distance_by_index(s, t) <= i && label[t] < label[s] {
                    label[s] = label[t];
                    changed = true;
                }
            }
        }
        if !changed {
            return label;
        }
    }
}

/// Expansion of `f` through the closure components of `d` at `i`.
pub fn oracle_metric_expand(d: &TrustMetric, i: u32, f: &Formula) -> Vec<usize> {
    let sig = d.signature();
    let label = oracle_closure_labels(d, i);
    let all = states(sig);
    all.iter()
        .filter(|s| {
            all.iter()
                .any(|t| holds(t, f) && label[t.index()] == label[s.index()])
        })
        .map(State::index)
        .collect()
}

fn metric_intersection(reports: &[(Formula, TrustMetric)], m: u32) -> Vec<usize> {
    let sig = reports[0].1.signature();
    let mut acc: Vec<usize> = (0..sig.state_count()).collect();
    for (f, d) in reports {
        acc = intersect(&acc, &oracle_metric_expand(d, m, f));
    }
    acc
}

/// Scans `m = 0, 1, 2, …` for the first nonempty intersection.
pub fn oracle_multi_threshold(reports: &[(Formula, TrustMetric)]) -> u32 {
    let top = reports
        .iter()
        .map(|(_, d)| d.max_distance())
        .max()
        .unwrap_or(0);
    (0..=top)
        .find(|&m| !metric_intersection(reports, m).is_empty())
        .expect("every expansion is full at the largest distance")
}

/// Threshold and least-rank states for metric-based multi-report revision.
pub fn oracle_multi_revise_metric(
    rank: impl Fn(usize) -> u64,
    reports: &[(Formula, TrustMetric)],
) -> (u32, Vec<usize>) {
    let m = oracle_multi_threshold(reports);
    (m, oracle_revise(rank, &metric_intersection(reports, m)))
}

/// Least-rank states of the intersection of partition expansions; `None`
/// when the intersection is empty.
pub fn oracle_multi_revise(
    rank: impl Fn(usize) -> u64,
    reports: &[(Formula, StatePartition)],
) -> Option<Vec<usize>> {
    let sig = reports[0].1.signature();
    let mut acc: Vec<usize> = (0..sig.state_count()).collect();
    for (f, p) in reports {
        acc = intersect(&acc, &oracle_expand(p, f));
    }
    if acc.is_empty() {
        None
    } else {
        Some(oracle_revise(rank, &acc))
    }
}

/// Truth value by recursion over the AST with an atom-name assignment.
pub fn oracle_holds(sig: &Signature, s: &State, f: &Formula) -> bool {
    let truth = |p: usize| s.true_atoms().any(|a| a == sig.atoms()[p]);
    fn go(f: &Formula, truth: &dyn Fn(usize) -> bool) -> bool {
        match f {
            Formula::Top => true,
            Formula::Bottom => false,
            Formula::Atom(p) => truth(*p),
            Formula::Not(g) => !go(g, truth),
            Formula::And(a, b) => go(a, truth) && go(b, truth),
            Formula::Or(a, b) => go(a, truth) || go(b, truth),
            Formula::Implies(a, b) => !go(a, truth) || go(b, truth),
            Formula::Iff(a, b) => go(a, truth) == go(b, truth),
        }
    }
    go(f, &truth)
}
