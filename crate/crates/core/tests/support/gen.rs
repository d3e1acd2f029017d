//! Proptest strategies for random signatures, formulas, beliefs, orders,
//! partitions and pseudometrics over at most four atoms.

use proptest::prelude::*;
use trustrev::{
    models, BeliefState, FaithfulOrder, Formula, Signature, StatePartition, StateSet, TrustMetric,
};

pub fn signature(n: usize) -> Signature {
    Signature::new((0..n).map(|i| format!("p{i}"))).unwrap()
}

pub fn formula(n: usize, depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::Top),
        1 => Just(Formula::Bottom),
        6 => (0..n).prop_map(Formula::Atom),
    ];
    leaf.prop_recursive(depth, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

pub fn satisfiable_formula(n: usize) -> impl Strategy<Value = Formula> {
    let sig = signature(n);
    formula(n, 4).prop_filter("satisfiable", move |f| !models(&sig, f).is_empty())
}

/// A partition from a random cell label per state.
pub fn partition(n: usize) -> impl Strategy<Value = StatePartition> {
    let count = 1usize << n;
    prop::collection::vec(0..count, count).prop_map(move |labels| partition_from_labels(n, &labels))
}

pub fn partition_from_labels(n: usize, labels: &[usize]) -> StatePartition {
    let sig = signature(n);
    let mut cells: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        match cells.iter_mut().find(|(k, _)| *k == l) {
            Some((_, v)) => v.push(i),
            None => cells.push((l, vec![i])),
        }
    }
    StatePartition::new(
        &sig,
        cells
            .into_iter()
            .map(|(_, v)| StateSet::from_indices(&sig, v))
            .collect(),
    )
    .unwrap()
}

/// Every partition of the `2^n` states, via restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<StatePartition> {
    let count = 1usize << n;
    let mut out = Vec::new();
    let mut labels = vec![0usize; count];
    fn rec(k: usize, max: usize, labels: &mut Vec<usize>, n: usize, out: &mut Vec<StatePartition>) {
        if k == labels.len() {
            out.push(partition_from_labels(n, labels));
            return;
        }
        for l in 0..=max + 1 {
            labels[k] = l;
            rec(k + 1, max.max(l), labels, n, out);
        }
    }
    // state 0 always carries label 0
    rec(1, 0, &mut labels, n, &mut out);
    out
}

pub fn beliefs(n: usize) -> impl Strategy<Value = BeliefState> {
    let count = 1usize << n;
    (prop::collection::vec(any::<bool>(), count), 0..count).prop_map(move |(bits, forced)| {
        let sig = signature(n);
        let set = StateSet::filter(&sig, |i| bits[i] || i == forced);
        BeliefState::new(set).unwrap()
    })
}

#[derive(Debug, Clone, Copy)]
pub enum OrderKind {
    TwoLevel,
    Dalal,
    Explicit,
}

/// A faithful order of a random kind; explicit orders get random ranks 1..=6
/// off the beliefs.
pub fn order(n: usize) -> impl Strategy<Value = FaithfulOrder> {
    let count = 1usize << n;
    (
        beliefs(n),
        prop_oneof![
            Just(OrderKind::TwoLevel),
            Just(OrderKind::Dalal),
            Just(OrderKind::Explicit)
        ],
        prop::collection::vec(1u32..=6, count),
    )
        .prop_map(move |(k, kind, ranks)| match kind {
            OrderKind::TwoLevel => FaithfulOrder::two_level(&k),
            OrderKind::Dalal => FaithfulOrder::dalal(&k),
            OrderKind::Explicit => {
                let sig = k.signature().clone();
                let table = (0..count).map(|i| {
                    let r = if k.states().contains_index(i) {
                        0
                    } else {
                        ranks[i]
                    };
                    (sig.state(i), r)
                });
                FaithfulOrder::explicit(&k, table).unwrap()
            }
        })
}

/// Shortest-path closure of random symmetric edge weights in `0..=max_w`.
/// Zero weights give distinct states at distance zero, and thresholds of
/// such metrics are often not transitive.
pub fn metric(n: usize, max_w: u32) -> impl Strategy<Value = TrustMetric> {
    let count = 1usize << n;
    prop::collection::vec(0..=max_w, count * count).prop_map(move |w| {
        let mut d = vec![vec![0u32; count]; count];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if i != j {
                    *cell = w[i.min(j) * count + i.max(j)];
                }
            }
        }
        for k in 0..count {
            for i in 0..count {
                for j in 0..count {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        TrustMetric::from_fn(&signature(n), |i, j| d[i][j]).unwrap()
    })
}

/// A metric from random integer points under the L1 distance; points may
/// coincide.
pub fn point_metric(n: usize) -> impl Strategy<Value = TrustMetric> {
    let count = 1usize << n;
    prop::collection::vec((0u32..4, 0u32..4), count).prop_map(move |pts| {
        TrustMetric::from_fn(&signature(n), |i, j| {
            pts[i].0.abs_diff(pts[j].0) + pts[i].1.abs_diff(pts[j].1)
        })
        .unwrap()
    })
}

pub fn any_metric(n: usize) -> impl Strategy<Value = TrustMetric> {
    prop_oneof![metric(n, 4), point_metric(n)]
}

pub fn rank_of(o: &FaithfulOrder) -> impl Fn(usize) -> u64 + '_ {
    move |i| o.rank_of_index(i) as u64
}

pub fn indices(set: &StateSet) -> Vec<usize> {
    set.indices().collect()
}
