//! Activity counting and the structure classification of automatic
//! automorphisms: identity, finitary, directed, other bounded, or unbounded.
//!
//! The decision runs on the canonical state graph with the all-identity state
//! removed. Finitary means the remaining graph is acyclic. Bounded means
//! every nontrivial strongly connected component is a simple cycle and no
//! path joins two distinct cycles; under that shape every off-cycle edge from
//! a cycle state can only reach finitary states, so every cycle state is
//! directed. Directed means the element itself sits on such a cycle; the
//! cycle length is the period and the letters around it the spine.

use serde::Serialize;

use crate::machine::Element;
use crate::perms::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Kind {
    Identity,
    Finitary,
    Directed,
    BoundedOther,
    Unbounded,
}

impl Kind {
    pub fn is_bounded(self) -> bool {
        !matches!(self, Kind::Unbounded)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub kind: Kind,
    /// Least level at which every section is trivial (identity and finitary
    /// kinds).
    pub finitary_depth: Option<usize>,
    /// Minimal recurrence length of the self-returning restriction (directed
    /// only).
    pub period: Option<usize>,
    /// The vertex path realizing `g|_spine = g` (directed only).
    pub spine: Option<Word>,
    /// Least level at which every non-finitary section is directed (directed
    /// and other bounded kinds; 0 for directed elements themselves).
    pub bounded_depth: Option<usize>,
    /// Maximum of `activity(g, n)` over `n <= 2 * state count` (bounded kinds).
    pub max_activity: Option<u64>,
}

impl Classification {
    /// The single depth of the structure theory: finitary depth for finitary
    /// elements, bounded depth otherwise. `None` for unbounded input.
    pub fn depth(&self) -> Option<usize> {
        match self.kind {
            Kind::Identity | Kind::Finitary => self.finitary_depth,
            Kind::Directed | Kind::BoundedOther => self.bounded_depth,
            Kind::Unbounded => None,
        }
    }
}

/// Counts the level-`n` vertices whose section is nontrivial, by a path-count
/// sweep over the canonical states (saturating at `u64::MAX`).
pub fn activity(g: &Element, n: usize) -> u64 {
    let states = g.state_count();
    let id = g.identity_state_index();
    let d = g.alphabet();
    let mut counts = vec![0u64; states];
    counts[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u64; states];
        for (s, &k) in counts.iter().enumerate() {
            if k == 0 {
                continue;
            }
            for x in 0..d {
                let c = g.child_index(s, x);
                next[c] = next[c].saturating_add(k);
            }
        }
        counts = next;
    }
    counts
        .iter()
        .enumerate()
        .filter(|(s, _)| Some(*s) != id)
        .fold(0u64, |acc, (_, &k)| acc.saturating_add(k))
}

/// The state sets appearing level by level: entry `k` holds the canonical
/// state indices of all `g|_w` with `|w| = k`.
fn level_state_sets(g: &Element, max_level: usize) -> Vec<Vec<usize>> {
    let d = g.alphabet();
    let mut levels = Vec::with_capacity(max_level + 1);
    let mut current = vec![false; g.state_count()];
    current[0] = true;
    for _ in 0..=max_level {
        levels.push(
            current
                .iter()
                .enumerate()
                .filter_map(|(s, &in_set)| in_set.then_some(s))
                .collect::<Vec<_>>(),
        );
        let mut next = vec![false; g.state_count()];
        for (s, &in_set) in current.iter().enumerate() {
            if in_set {
                for x in 0..d {
                    next[g.child_index(s, x)] = true;
                }
            }
        }
        current = next;
    }
    levels
}

struct StateGraph {
    /// Per state: (letter, child) edges into non-identity states.
    edges: Vec<Vec<(usize, usize)>>,
    id: Option<usize>,
}

fn state_graph(g: &Element) -> StateGraph {
    let id = g.identity_state_index();
    let d = g.alphabet();
    let n = g.state_count();
    let mut edges = vec![Vec::new(); n];
    for (s, slot) in edges.iter_mut().enumerate() {
        if Some(s) == id {
            continue;
        }
        for x in 0..d {
            let c = g.child_index(s, x);
            if Some(c) != id {
                slot.push((x, c));
            }
        }
    }
    StateGraph { edges, id }
}

/// Iterative Tarjan; returns the SCC id per state.
fn sccs(graph: &StateGraph) -> Vec<usize> {
    let n = graph.edges.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0;
    let mut next_comp = 0;

    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            if *ei < graph.edges[v].len() {
                let (_, w) = graph.edges[v][*ei];
                *ei += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&mut (parent, _)) = call.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

fn max_activity_by_enumeration(g: &Element) -> u64 {
    (0..=2 * g.state_count())
        .map(|k| activity(g, k))
        .max()
        .unwrap_or(0)
}

pub fn classify(g: &Element) -> Classification {
    if g.is_identity() {
        return Classification {
            kind: Kind::Identity,
            finitary_depth: Some(0),
            period: None,
            spine: None,
            bounded_depth: None,
            max_activity: Some(0),
        };
    }

    let graph = state_graph(g);
    let n = graph.edges.len();
    let comp = sccs(&graph);

    // a state is cyclic if its SCC has more than one member or a self-loop
    let mut comp_size = vec![0usize; n];
    for s in 0..n {
        if Some(s) != graph.id {
            comp_size[comp[s]] += 1;
        }
    }
    let mut cyclic = vec![false; n];
    for s in 0..n {
        if Some(s) == graph.id {
            continue;
        }
        if comp_size[comp[s]] > 1 || graph.edges[s].iter().any(|&(_, c)| c == s) {
            cyclic[s] = true;
        }
    }

    if !cyclic.iter().any(|&c| c) {
        // acyclic non-identity graph: finitary; depth is the longest path
        fn depth_of(s: usize, graph: &StateGraph, g: &Element, memo: &mut [usize]) -> usize {
            if Some(s) == graph.id {
                return 0;
            }
            if memo[s] != usize::MAX {
                return memo[s];
            }
            let deepest = (0..g.alphabet())
                .map(|x| depth_of(g.child_index(s, x), graph, g, memo))
                .max()
                .unwrap_or(0);
            memo[s] = deepest + 1;
            memo[s]
        }
        let mut memo = vec![usize::MAX; n];
        let fd = depth_of(0, &graph, g, &mut memo);
        return Classification {
            kind: Kind::Finitary,
            finitary_depth: Some(fd),
            period: None,
            spine: None,
            bounded_depth: None,
            max_activity: Some(max_activity_by_enumeration(g)),
        };
    }

    // reaches_cycle marks the non-finitary states
    let mut reaches_cycle = cyclic.clone();
    loop {
        let mut changed = false;
        for s in 0..n {
            if !reaches_cycle[s] && graph.edges[s].iter().any(|&(_, c)| reaches_cycle[c]) {
                reaches_cycle[s] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // bounded iff every nontrivial SCC is a simple cycle and every off-cycle
    // edge from a cycle state leads to a finitary state
    let mut bounded = true;
    'check: for s in 0..n {
        if !cyclic[s] {
            continue;
        }
        let internal = graph.edges[s]
            .iter()
            .filter(|(_, c)| cyclic[*c] && comp[*c] == comp[s])
            .count();
        if internal != 1 {
            bounded = false;
            break 'check;
        }
        for (_, c) in &graph.edges[s] {
            if comp[*c] != comp[s] && reaches_cycle[*c] {
                bounded = false;
                break 'check;
            }
        }
    }

    if !bounded {
        return Classification {
            kind: Kind::Unbounded,
            finitary_depth: None,
            period: None,
            spine: None,
            bounded_depth: None,
            max_activity: None,
        };
    }

    // bounded depth: least m with every non-finitary level-m state cyclic
    let levels = level_state_sets(g, 2 * n + 2);
    let bounded_depth = levels
        .iter()
        .position(|states| states.iter().all(|&s| !reaches_cycle[s] || cyclic[s]))
        .expect("bounded element stabilizes within 2n+2 levels");

    if cyclic[0] {
        // directed: walk the unique internal edges around the cycle
        let mut spine_letters = Vec::new();
        let mut s = 0;
        loop {
            let &(x, c) = graph.edges[s]
                .iter()
                .find(|(_, c)| cyclic[*c] && comp[*c] == comp[s])
                .expect("cycle state has one internal edge");
            spine_letters.push(x + 1);
            s = c;
            if s == 0 {
                break;
            }
        }
        let period = spine_letters.len();
        let spine = Word::new(spine_letters, g.alphabet()).expect("letters in range");
        debug_assert_eq!(g.restrict(&spine), *g);
        return Classification {
            kind: Kind::Directed,
            finitary_depth: None,
            period: Some(period),
            spine: Some(spine),
            bounded_depth: Some(bounded_depth),
            max_activity: Some(max_activity_by_enumeration(g)),
        };
    }

    Classification {
        kind: Kind::BoundedOther,
        finitary_depth: None,
        period: None,
        spine: None,
        bounded_depth: Some(bounded_depth),
        max_activity: Some(max_activity_by_enumeration(g)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::grigorchuk;
    use crate::machine::{build_element, AutomatonSpec, ChildRef, StateSpec};
    use crate::mother::{elem_c, elem_t, mother_gens};
    use crate::perms::Perm;

    fn w3(text: &str) -> Word {
        Word::parse(text, 3).unwrap()
    }

    #[test]
    fn activity_examples() {
        let c = elem_c();
        assert_eq!(activity(&c, 5), 2);

        let t = elem_t();
        assert_eq!(activity(&t, 1), 2);
        assert_eq!(activity(&t, 4), 4);

        assert_eq!(activity(&Element::identity(3), 7), 0);
        assert_eq!(activity(&c, 0), 1);
    }

    #[test]
    fn classify_identity() {
        let cls = classify(&Element::identity(2));
        assert_eq!(cls.kind, Kind::Identity);
        assert_eq!(cls.finitary_depth, Some(0));
        assert_eq!(cls.max_activity, Some(0));
    }

    #[test]
    fn classify_grigorchuk_generators() {
        let [a, b, c, d] = grigorchuk();

        let cls = classify(&a);
        assert_eq!(cls.kind, Kind::Finitary);
        assert_eq!(cls.finitary_depth, Some(1));

        for g in [&b, &c, &d] {
            let cls = classify(g);
            assert_eq!(cls.kind, Kind::Directed);
            assert_eq!(cls.period, Some(3));
            assert_eq!(cls.bounded_depth, Some(0));
        }
        assert_eq!(classify(&b).spine, Some(Word::parse("222", 2).unwrap()));
    }

    #[test]
    fn classify_c_and_t() {
        let cls = classify(&elem_c());
        assert_eq!(cls.kind, Kind::Directed);
        assert_eq!(cls.period, Some(1));
        assert_eq!(cls.spine, Some(w3("3")));
        assert_eq!(cls.bounded_depth, Some(0));

        let t = elem_t();
        let cls = classify(&t);
        assert_eq!(cls.kind, Kind::BoundedOther);
        assert_eq!(cls.bounded_depth, Some(2));
        assert_eq!(cls.max_activity, Some(4));

        // the level-2 non-finitary states of t are exactly {c}
        let c = elem_c();
        let mut nonfin: Vec<Element> = Word::all_of_length(2, 3)
            .iter()
            .map(|w| t.restrict(w))
            .filter(|s| classify(s).kind != Kind::Finitary && !s.is_identity())
            .collect();
        nonfin.dedup();
        assert_eq!(nonfin, vec![c]);
    }

    #[test]
    fn classify_detects_unbounded() {
        // g = (g, g)(12): doubling automorphism, activity 2^n
        let spec = AutomatonSpec {
            alphabet: 2,
            states: vec![StateSpec {
                name: "g".into(),
                root: Perm::parse("(1 2)", 2).unwrap(),
                children: vec![ChildRef::Named("g".into()), ChildRef::Named("g".into())],
            }],
        };
        let g = build_element(&spec, "g").unwrap();
        assert_eq!(classify(&g).kind, Kind::Unbounded);
        assert_eq!(activity(&g, 5), 32);

        // two chained cycles: u = (u, v), v = (v, 1)(12)
        let spec = AutomatonSpec {
            alphabet: 2,
            states: vec![
                StateSpec {
                    name: "u".into(),
                    root: Perm::identity(2),
                    children: vec![ChildRef::Named("u".into()), ChildRef::Named("v".into())],
                },
                StateSpec {
                    name: "v".into(),
                    root: Perm::parse("(1 2)", 2).unwrap(),
                    children: vec![ChildRef::Named("v".into()), ChildRef::Identity],
                },
            ],
        };
        let u = build_element(&spec, "u").unwrap();
        assert_eq!(classify(&u).kind, Kind::Unbounded);
        // linear activity growth: the 1^n spine plus one switch point per level
        assert_eq!(activity(&u, 4), 5);
        assert_eq!(activity(&u, 8), 9);
    }

    #[test]
    fn directed_invariants() {
        let c = elem_c();
        let cls = classify(&c);
        let spine = cls.spine.unwrap();
        assert_eq!(c.restrict(&spine), c);
        assert_eq!(spine.len(), cls.period.unwrap());

        // all other level-period restrictions are finitary
        for w in Word::all_of_length(cls.period.unwrap(), 3) {
            if w != spine {
                let kind = classify(&c.restrict(&w)).kind;
                assert!(matches!(kind, Kind::Identity | Kind::Finitary));
            }
        }
    }

    #[test]
    fn finitary_activity_vanishes_at_depth() {
        let [a, ..] = grigorchuk();
        let cls = classify(&a);
        let depth = cls.finitary_depth.unwrap();
        assert_eq!(activity(&a, depth), 0);
        assert!(activity(&a, depth - 1) > 0);
    }

    #[test]
    fn classifier_agrees_with_enumeration_on_generator_products() {
        let gens = mother_gens(3).unwrap();
        let picks = [2usize, 9, 15, 30, 47, 58, 76];
        for &i in &picks {
            for &j in &picks {
                let g = gens[i].compose(&gens[j]).unwrap();
                let cls = classify(&g);
                assert!(cls.kind.is_bounded(), "mother elements are bounded");
                if g.is_identity() {
                    continue;
                }
                let direct = (0..=2 * g.state_count())
                    .map(|k| activity(&g, k))
                    .max()
                    .unwrap();
                assert_eq!(cls.max_activity, Some(direct));
            }
        }
    }

    #[test]
    fn classify_is_canonicalization_invariant() {
        let t = elem_t();
        assert_eq!(classify(&t), classify(&t.canonicalize()));
    }
}
