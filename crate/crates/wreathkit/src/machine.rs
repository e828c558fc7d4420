//! Finite-state automorphisms of the rooted `d`-regular tree.
//!
//! An [`Element`] is an automaton together with its initial state: every state
//! carries a root permutation and `d` child states, and the automorphism acts
//! by `g(xw) = sigma(x) . (g|_x)(w)`. Elements are minimized (no two states
//! bisimilar) and renumbered breadth-first on construction, then interned, so
//! structural equality of the shared tables decides group equality.
//!
//! Products follow the global convention: the left factor acts first, so
//! `act(compose(g, h), w) = act(h, act(g, w))`, the root of `g·h` is
//! `root(g)·root(h)`, and `(g·h)|_x = g|_x · h|_{root(g)(x)}`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perms::{Perm, PermError, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("state \"{0}\" referenced but never defined")]
    DanglingState(String),
    #[error("state \"{state}\" lists {got} children, alphabet needs {expected}")]
    ArityMismatch {
        state: String,
        expected: usize,
        got: usize,
    },
    #[error("state \"{state}\" has a root of degree {got}, alphabet is {expected}")]
    RootDegreeMismatch {
        state: String,
        expected: usize,
        got: usize,
    },
    #[error("state \"{0}\" defined twice")]
    DuplicateState(String),
    #[error("initial state \"{0}\" is not defined")]
    UnknownInitial(String),
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error(transparent)]
    Perm(#[from] PermError),
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct StateData {
    root: Perm,
    children: Vec<usize>,
}

#[derive(PartialEq, Eq, Hash)]
struct MachineData {
    d: usize,
    /// State 0 is the initial state; children are 0-based state indices and
    /// the table is closed (every reference resolves).
    states: Vec<StateData>,
}

/// Intern pool of canonical machines. Insert-if-absent behind a mutex, so
/// concurrent construction is linearizable and equal canonical machines share
/// one allocation.
static INTERN: Lazy<Mutex<HashSet<Arc<MachineData>>>> =
    Lazy::new(|| Mutex::new(HashSet::new()));

fn intern(data: MachineData) -> Arc<MachineData> {
    let mut pool = INTERN.lock().expect("intern pool poisoned");
    if let Some(found) = pool.get(&data) {
        return Arc::clone(found);
    }
    let arc = Arc::new(data);
    pool.insert(Arc::clone(&arc));
    arc
}

/// A finite-state automorphism of the rooted `d`-regular tree, kept in
/// canonical minimized form.
#[derive(Clone)]
pub struct Element {
    data: Arc<MachineData>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || self.data == other.data
    }
}

impl Eq for Element {}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.data.hash(state);
    }
}

/// Minimizes and renumbers a raw state table, then interns it.
///
/// Partition refinement starts from classes keyed by root permutation and
/// splits by child-class signatures until stable; the quotient is renumbered
/// breadth-first from the initial state with child order `1..d`, which makes
/// canonical forms byte-comparable.
fn canonical(d: usize, states: &[StateData], initial: usize) -> Arc<MachineData> {
    // reachable trim
    let mut order = vec![initial];
    let mut seen: HashSet<usize> = order.iter().copied().collect();
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        i += 1;
        for &c in &states[s].children {
            if seen.insert(c) {
                order.push(c);
            }
        }
    }

    // Moore refinement on the reachable part
    let mut class: HashMap<usize, usize> = HashMap::new();
    {
        let mut by_root: HashMap<&Perm, usize> = HashMap::new();
        for &s in &order {
            let next = by_root.len();
            let id = *by_root.entry(&states[s].root).or_insert(next);
            class.insert(s, id);
        }
    }
    loop {
        let mut sig_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next: HashMap<usize, usize> = HashMap::new();
        for &s in &order {
            let sig = (
                class[&s],
                states[s].children.iter().map(|c| class[c]).collect(),
            );
            let fresh = sig_ids.len();
            let id = *sig_ids.entry(sig).or_insert(fresh);
            next.insert(s, id);
        }
        let stable = sig_ids.len() == class.values().collect::<HashSet<_>>().len();
        class = next;
        if stable {
            break;
        }
    }

    // breadth-first renumbering of classes from the initial class
    let mut repr: HashMap<usize, usize> = HashMap::new();
    for &s in order.iter().rev() {
        repr.insert(class[&s], s);
    }
    let mut number: HashMap<usize, usize> = HashMap::new();
    let mut bfs = vec![class[&initial]];
    number.insert(class[&initial], 0);
    let mut i = 0;
    while i < bfs.len() {
        let cls = bfs[i];
        i += 1;
        let s = repr[&cls];
        for &child in &states[s].children {
            let ccls = class[&child];
            if !number.contains_key(&ccls) {
                number.insert(ccls, bfs.len());
                bfs.push(ccls);
            }
        }
    }

    let mut new_states = Vec::with_capacity(bfs.len());
    for &cls in &bfs {
        let s = repr[&cls];
        new_states.push(StateData {
            root: states[s].root.clone(),
            children: states[s]
                .children
                .iter()
                .map(|c| number[&class[c]])
                .collect(),
        });
    }
    intern(MachineData {
        d,
        states: new_states,
    })
}

impl Element {
    /// The identity automorphism over a `d`-letter alphabet.
    pub fn identity(d: usize) -> Element {
        Element {
            data: canonical(
                d,
                &[StateData {
                    root: Perm::identity(d),
                    children: vec![0; d],
                }],
                0,
            ),
        }
    }

    /// The automorphism acting by `perm` at the root and trivially below.
    pub fn rootwise(perm: &Perm) -> Element {
        let d = perm.degree();
        let states = [
            StateData {
                root: perm.clone(),
                children: vec![1; d],
            },
            StateData {
                root: Perm::identity(d),
                children: vec![1; d],
            },
        ];
        Element {
            data: canonical(d, &states, 0),
        }
    }

    /// Assembles `(sections[0], …, sections[d-1]) root` — the inverse of the
    /// wreath decomposition.
    pub fn from_sections(root: &Perm, sections: &[Element]) -> Result<Element, MachineError> {
        let d = root.degree();
        if sections.len() != d {
            return Err(MachineError::ArityMismatch {
                state: "<sections>".into(),
                expected: d,
                got: sections.len(),
            });
        }
        let mut states = vec![StateData {
            root: root.clone(),
            children: Vec::with_capacity(d),
        }];
        for section in sections {
            if section.alphabet() != d {
                return Err(MachineError::AlphabetMismatch(d, section.alphabet()));
            }
            let offset = states.len();
            states[0].children.push(offset + 0);
            for s in &section.data.states {
                states.push(StateData {
                    root: s.root.clone(),
                    children: s.children.iter().map(|&c| c + offset).collect(),
                });
            }
        }
        Ok(Element {
            data: canonical(d, &states, 0),
        })
    }

    pub fn alphabet(&self) -> usize {
        self.data.d
    }

    /// Number of canonical states, i.e. `|S(g)|`.
    pub fn state_count(&self) -> usize {
        self.data.states.len()
    }

    /// The root permutation (action on the first level).
    pub fn root(&self) -> &Perm {
        &self.data.states[0].root
    }

    pub fn is_identity(&self) -> bool {
        self.data.states.len() == 1 && self.data.states[0].root.is_identity()
    }

    /// Image of the vertex `w`; preserves length and prefixes.
    pub fn act(&self, w: &Word) -> Word {
        let mut out = Vec::with_capacity(w.len());
        let mut state = 0;
        for &x in w.letters() {
            assert!(
                x >= 1 && x <= self.data.d,
                "letter {x} outside alphabet 1..={}",
                self.data.d
            );
            let s = &self.data.states[state];
            out.push(s.root.apply(x));
            state = s.children[x - 1];
        }
        Word::new(out, self.data.d).expect("images stay in range")
    }

    /// The restriction `g|_w` (the action induced on the subtree at `w`).
    pub fn restrict(&self, w: &Word) -> Element {
        let mut state = 0;
        for &x in w.letters() {
            assert!(
                x >= 1 && x <= self.data.d,
                "letter {x} outside alphabet 1..={}",
                self.data.d
            );
            state = self.data.states[state].children[x - 1];
        }
        if state == 0 {
            return self.clone();
        }
        Element {
            data: canonical(self.data.d, &self.data.states, state),
        }
    }

    /// Single-letter restriction `g|_x` for a 1-based letter.
    pub fn section(&self, x: usize) -> Element {
        self.restrict(&Word::new(vec![x], self.data.d).expect("valid letter"))
    }

    /// Left-to-right product: `self` acts first, then `other`.
    pub fn compose(&self, other: &Element) -> Result<Element, MachineError> {
        if self.data.d != other.data.d {
            return Err(MachineError::AlphabetMismatch(self.data.d, other.data.d));
        }
        let d = self.data.d;
        // reachable pair closure only
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(0usize, 0usize)];
        index.insert((0, 0), 0);
        let mut states = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (a, b) = pairs[i];
            i += 1;
            let sa = &self.data.states[a];
            let sb = &other.data.states[b];
            let root = sa.root.compose(&sb.root)?;
            let mut children = Vec::with_capacity(d);
            for x in 0..d {
                let pair = (sa.children[x], sb.children[sa.root.apply0(x)]);
                let next = *index.entry(pair).or_insert_with(|| {
                    pairs.push(pair);
                    pairs.len() - 1
                });
                children.push(next);
            }
            states.push(StateData { root, children });
        }
        Ok(Element {
            data: canonical(d, &states, 0),
        })
    }

    pub fn inverse(&self) -> Element {
        let d = self.data.d;
        let states: Vec<StateData> = self
            .data
            .states
            .iter()
            .map(|s| {
                let inv = s.root.inverse();
                let children = (0..d).map(|x| s.children[inv.apply0(x)]).collect();
                StateData {
                    root: inv,
                    children,
                }
            })
            .collect();
        Element {
            data: canonical(d, &states, 0),
        }
    }

    /// `self` to an integer power; negative exponents invert first.
    pub fn pow(&self, k: i64) -> Element {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut n = k.unsigned_abs();
        let mut out = Element::identity(self.data.d);
        while n > 0 {
            if n & 1 == 1 {
                out = out.compose(&base).expect("same alphabet");
            }
            base = base.compose(&base).expect("same alphabet");
            n >>= 1;
        }
        out
    }

    /// `h^{-1} · self · h`.
    pub fn conjugate_by(&self, h: &Element) -> Result<Element, MachineError> {
        h.inverse().compose(self)?.compose(h)
    }

    /// Group equality. Canonical forms make this a structural comparison; it
    /// agrees with `is_identity(self · other^{-1})`.
    pub fn equal(&self, other: &Element) -> Result<bool, MachineError> {
        if self.data.d != other.data.d {
            return Err(MachineError::AlphabetMismatch(self.data.d, other.data.d));
        }
        Ok(self == other)
    }

    /// Bisimulation minimization. Construction already canonicalizes, so this
    /// is idempotent; it exists as the explicit contract point.
    pub fn canonicalize(&self) -> Element {
        Element {
            data: canonical(self.data.d, &self.data.states, 0),
        }
    }

    /// The set of states `S(g)`: every distinct restriction, one element per
    /// canonical state, in breadth-first order from `g` itself.
    pub fn states_of(&self) -> Vec<Element> {
        (0..self.data.states.len())
            .map(|s| {
                if s == 0 {
                    self.clone()
                } else {
                    Element {
                        data: canonical(self.data.d, &self.data.states, s),
                    }
                }
            })
            .collect()
    }

    /// 0-based child state index table, for graph traversals.
    pub(crate) fn child_index(&self, state: usize, x0: usize) -> usize {
        self.data.states[state].children[x0]
    }

    pub(crate) fn state_root(&self, state: usize) -> &Perm {
        &self.data.states[state].root
    }

    /// Index of the all-identity state, if reachable. Canonical machines hold
    /// at most one: trivial root, every child pointing back at itself.
    pub(crate) fn identity_state_index(&self) -> Option<usize> {
        self.data
            .states
            .iter()
            .enumerate()
            .position(|(i, s)| s.root.is_identity() && s.children.iter().all(|&c| c == i))
    }

    /// Raw state table `(root, children)` with state 0 initial; for sibling
    /// modules that build derived machines (letter shifts, block powers).
    pub(crate) fn raw_states(&self) -> Vec<(Perm, Vec<usize>)> {
        self.data
            .states
            .iter()
            .map(|s| (s.root.clone(), s.children.clone()))
            .collect()
    }

    /// Canonicalizes a raw state table into an element. Child references must
    /// resolve within the table.
    pub(crate) fn from_raw(d: usize, raw: Vec<(Perm, Vec<usize>)>, initial: usize) -> Element {
        let states: Vec<StateData> = raw
            .into_iter()
            .map(|(root, children)| StateData { root, children })
            .collect();
        Element {
            data: canonical(d, &states, initial),
        }
    }

    /// Composes a chain left to right; the empty chain is the identity.
    pub fn compose_all(d: usize, factors: &[Element]) -> Result<Element, MachineError> {
        let mut acc = Element::identity(d);
        for f in factors {
            acc = acc.compose(f)?;
        }
        Ok(acc)
    }

    /// A stable one-line description, e.g. for sort keys and debugging.
    pub fn describe(&self) -> String {
        let states: Vec<String> = self
            .data
            .states
            .iter()
            .map(|s| {
                let children: Vec<String> =
                    s.children.iter().map(|c| c.to_string()).collect();
                format!("{}->[{}]", s.root, children.join(","))
            })
            .collect();
        format!("d={};{}", self.data.d, states.join(";"))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({})", self.describe())
    }
}

/// Reference to a child state in an [`AutomatonSpec`]: the reserved identity
/// or a named state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChildRef {
    Identity,
    Named(String),
}

#[derive(Debug, Clone)]
pub struct StateSpec {
    pub name: String,
    pub root: Perm,
    pub children: Vec<ChildRef>,
}

/// A named-state recursion, possibly self-referential, as written in
/// automaton files.
#[derive(Debug, Clone)]
pub struct AutomatonSpec {
    pub alphabet: usize,
    pub states: Vec<StateSpec>,
}

/// Realizes the recursion `spec` with the given initial state.
pub fn build_element(spec: &AutomatonSpec, initial: &str) -> Result<Element, MachineError> {
    let d = spec.alphabet;
    if d == 0 {
        return Err(MachineError::EmptyAlphabet);
    }
    let mut names: HashMap<&str, usize> = HashMap::new();
    for (i, st) in spec.states.iter().enumerate() {
        if names.insert(st.name.as_str(), i).is_some() {
            return Err(MachineError::DuplicateState(st.name.clone()));
        }
    }
    let id_index = spec.states.len();
    let mut states = Vec::with_capacity(id_index + 1);
    for st in &spec.states {
        if st.root.degree() != d {
            return Err(MachineError::RootDegreeMismatch {
                state: st.name.clone(),
                expected: d,
                got: st.root.degree(),
            });
        }
        if st.children.len() != d {
            return Err(MachineError::ArityMismatch {
                state: st.name.clone(),
                expected: d,
                got: st.children.len(),
            });
        }
        let children = st
            .children
            .iter()
            .map(|c| match c {
                ChildRef::Identity => Ok(id_index),
                ChildRef::Named(n) => names
                    .get(n.as_str())
                    .copied()
                    .ok_or_else(|| MachineError::DanglingState(n.clone())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        states.push(StateData {
            root: st.root.clone(),
            children,
        });
    }
    states.push(StateData {
        root: Perm::identity(d),
        children: vec![id_index; d],
    });
    let start = *names
        .get(initial)
        .ok_or_else(|| MachineError::UnknownInitial(initial.to_string()))?;
    Ok(Element {
        data: canonical(d, &states, start),
    })
}

/// Wire form of an element: the canonical state table with roots in cycle
/// notation. State 0 is the element itself.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SerializedElement {
    pub alphabet: usize,
    pub states: Vec<SerializedState>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SerializedState {
    pub root: String,
    pub children: Vec<usize>,
}

impl Element {
    pub fn to_serialized(&self) -> SerializedElement {
        SerializedElement {
            alphabet: self.data.d,
            states: self
                .data
                .states
                .iter()
                .map(|s| SerializedState {
                    root: s.root.to_string(),
                    children: s.children.clone(),
                })
                .collect(),
        }
    }

    pub fn from_serialized(ser: &SerializedElement) -> Result<Element, MachineError> {
        let d = ser.alphabet;
        if d == 0 {
            return Err(MachineError::EmptyAlphabet);
        }
        let n = ser.states.len();
        let mut states = Vec::with_capacity(n);
        for (i, s) in ser.states.iter().enumerate() {
            if s.children.len() != d {
                return Err(MachineError::ArityMismatch {
                    state: format!("#{i}"),
                    expected: d,
                    got: s.children.len(),
                });
            }
            if let Some(&bad) = s.children.iter().find(|&&c| c >= n) {
                return Err(MachineError::DanglingState(format!("#{bad}")));
            }
            states.push(StateData {
                root: Perm::parse(&s.root, d)?,
                children: s.children.clone(),
            });
        }
        if states.is_empty() {
            return Err(MachineError::DanglingState("#0".into()));
        }
        Ok(Element {
            data: canonical(d, &states, 0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perms::{Perm, Word};

    fn p(text: &str, d: usize) -> Perm {
        Perm::parse(text, d).unwrap()
    }

    fn w(text: &str, d: usize) -> Word {
        Word::parse(text, d).unwrap()
    }

    fn named(name: &str) -> ChildRef {
        ChildRef::Named(name.into())
    }

    /// c = (1, (23), c) over d = 3.
    fn elem_c() -> Element {
        let spec = AutomatonSpec {
            alphabet: 3,
            states: vec![
                StateSpec {
                    name: "c".into(),
                    root: p("()", 3),
                    children: vec![ChildRef::Identity, named("s23"), named("c")],
                },
                StateSpec {
                    name: "s23".into(),
                    root: p("(2 3)", 3),
                    children: vec![ChildRef::Identity; 3],
                },
            ],
        };
        build_element(&spec, "c").unwrap()
    }

    /// t = (23) c (23) c.
    fn elem_t() -> Element {
        let s23 = Element::rootwise(&p("(2 3)", 3));
        let c = elem_c();
        Element::compose_all(3, &[s23.clone(), c.clone(), s23, c]).unwrap()
    }

    /// b = ((12), b) over d = 2.
    fn g2_b() -> Element {
        let spec = AutomatonSpec {
            alphabet: 2,
            states: vec![
                StateSpec {
                    name: "b".into(),
                    root: p("()", 2),
                    children: vec![named("s"), named("b")],
                },
                StateSpec {
                    name: "s".into(),
                    root: p("(1 2)", 2),
                    children: vec![ChildRef::Identity; 2],
                },
            ],
        };
        build_element(&spec, "b").unwrap()
    }

    fn tv(word: &str) -> Element {
        let mut elem = elem_t();
        let root = Perm::identity(3);
        for &x in w(word, 3).letters().iter().rev() {
            let mut sections = vec![Element::identity(3); 3];
            sections[x - 1] = elem;
            elem = Element::from_sections(&root, &sections).unwrap();
        }
        elem
    }

    #[test]
    fn build_c_has_three_reachable_states() {
        let c = elem_c();
        assert_eq!(c.state_count(), 3);
        assert_eq!(c.restrict(&w("3", 3)), c);
    }

    #[test]
    fn build_g2_b() {
        let b = g2_b();
        assert_eq!(b.state_count(), 3);
        assert_eq!(b.restrict(&w("2", 2)), b);
        assert_eq!(b.section(1), Element::rootwise(&p("(1 2)", 2)));
    }

    #[test]
    fn build_all_identity_children_is_identity() {
        let spec = AutomatonSpec {
            alphabet: 3,
            states: vec![StateSpec {
                name: "x".into(),
                root: p("()", 3),
                children: vec![ChildRef::Identity; 3],
            }],
        };
        let x = build_element(&spec, "x").unwrap();
        assert!(x.is_identity());
        assert_eq!(x, Element::identity(3));
    }

    #[test]
    fn build_rejects_dangling_and_arity_errors() {
        let spec = AutomatonSpec {
            alphabet: 3,
            states: vec![StateSpec {
                name: "x".into(),
                root: p("()", 3),
                children: vec![ChildRef::Identity, named("ghost"), ChildRef::Identity],
            }],
        };
        assert!(matches!(
            build_element(&spec, "x"),
            Err(MachineError::DanglingState(n)) if n == "ghost"
        ));

        let spec = AutomatonSpec {
            alphabet: 3,
            states: vec![StateSpec {
                name: "x".into(),
                root: p("()", 3),
                children: vec![ChildRef::Identity; 2],
            }],
        };
        assert!(matches!(
            build_element(&spec, "x"),
            Err(MachineError::ArityMismatch { expected: 3, got: 2, .. })
        ));

        let spec = AutomatonSpec {
            alphabet: 3,
            states: vec![StateSpec {
                name: "x".into(),
                root: p("(1 2)", 2),
                children: vec![ChildRef::Identity; 3],
            }],
        };
        assert!(matches!(
            build_element(&spec, "x"),
            Err(MachineError::RootDegreeMismatch { .. })
        ));
    }

    #[test]
    fn act_examples() {
        let c = elem_c();
        assert_eq!(c.act(&w("23", 3)), w("22", 3));
        let t = elem_t();
        assert_eq!(t.act(&w("1111", 3)), w("1111", 3));
        let s23 = Element::rootwise(&p("(2 3)", 3));
        assert_eq!(s23.act(&w("31", 3)), w("21", 3));
    }

    #[test]
    fn restrict_examples() {
        let c = elem_c();
        assert_eq!(c.restrict(&w("3", 3)), c);
        assert!(c.restrict(&w("21", 3)).is_identity());

        // t|_2 = c·(23)
        let t = elem_t();
        let c23 = c.compose(&Element::rootwise(&p("(2 3)", 3))).unwrap();
        assert_eq!(t.restrict(&w("2", 3)), c23);

        // restrict composes over concatenation
        let u = w("2", 3);
        let v = w("31", 3);
        assert_eq!(t.restrict(&u).restrict(&v), t.restrict(&u.concat(&v)));
        assert_eq!(t.restrict(&Word::empty()), t);
    }

    #[test]
    fn compose_matches_wreath_assembly() {
        // (23) c (23) c = (1, c(23), (23)c)
        let c = elem_c();
        let s23 = Element::rootwise(&p("(2 3)", 3));
        let t = elem_t();
        let c23 = c.compose(&s23).unwrap();
        let s23c = s23.compose(&c).unwrap();
        let assembled = Element::from_sections(
            &Perm::identity(3),
            &[Element::identity(3), c23, s23c],
        )
        .unwrap();
        assert_eq!(t, assembled);

        assert!(c.compose(&c).unwrap().is_identity());
    }

    #[test]
    fn compose_g2_generators_act() {
        let a = Element::rootwise(&p("(1 2)", 2));
        let b = g2_b();
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.act(&w("11", 2)), w("21", 2));
    }

    #[test]
    fn compose_alphabet_mismatch() {
        let a = Element::identity(2);
        let b = Element::identity(3);
        assert!(matches!(
            a.compose(&b),
            Err(MachineError::AlphabetMismatch(2, 3))
        ));
        assert!(a.equal(&b).is_err());
    }

    #[test]
    fn inverse_examples() {
        let r = Element::rootwise(&p("(1 2 3)", 3));
        assert_eq!(r.inverse(), Element::rootwise(&p("(1 3 2)", 3)));

        let c = elem_c();
        assert_eq!(c.inverse(), c);

        // t^{-1} = (1, (23)c, c(23))
        let t = elem_t();
        let s23 = Element::rootwise(&p("(2 3)", 3));
        let expected = Element::from_sections(
            &Perm::identity(3),
            &[
                Element::identity(3),
                s23.compose(&c).unwrap(),
                c.compose(&s23).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(t.inverse(), expected);
        assert!(t.compose(&t.inverse()).unwrap().is_identity());
    }

    #[test]
    fn is_identity_examples() {
        let c = elem_c();
        assert!(c.compose(&c).unwrap().is_identity());
        assert!(!elem_t().is_identity());

        // commutator of generators with disjoint support
        let t2 = tv("2");
        let t3 = tv("3");
        let comm = Element::compose_all(3, &[t2.clone(), t3.clone(), t2.inverse(), t3.inverse()])
            .unwrap();
        assert!(comm.is_identity());
    }

    #[test]
    fn equality_examples() {
        let t = elem_t();
        let t2 = tv("2");
        assert_eq!(t.compose(&t2).unwrap(), t2.compose(&t).unwrap());

        let t231 = tv("231");
        let left = t.compose(&t231).unwrap();
        let right = t231.compose(&t).unwrap();
        assert_ne!(left, right);
        // the witness word where the two products differ
        let probe = w("231222", 3);
        assert_eq!(left.act(&probe), w("221222", 3));
        assert_eq!(right.act(&probe), w("221233", 3));

        assert_ne!(t, t.inverse());
        assert!(!t.pow(2).is_identity());
    }

    #[test]
    fn canonical_form_examples() {
        // identity hidden behind redundant states
        let spec = AutomatonSpec {
            alphabet: 2,
            states: (0..5)
                .map(|i| StateSpec {
                    name: format!("s{i}"),
                    root: p("()", 2),
                    children: vec![named(&format!("s{}", (i + 1) % 5)); 2],
                })
                .collect(),
        };
        let g = build_element(&spec, "s0").unwrap();
        assert_eq!(g.state_count(), 1);
        assert!(g.is_identity());

        // c unrolled one level equals c
        let unrolled = AutomatonSpec {
            alphabet: 3,
            states: vec![
                StateSpec {
                    name: "top".into(),
                    root: p("()", 3),
                    children: vec![ChildRef::Identity, named("s23"), named("c")],
                },
                StateSpec {
                    name: "c".into(),
                    root: p("()", 3),
                    children: vec![ChildRef::Identity, named("s23b"), named("c")],
                },
                StateSpec {
                    name: "s23".into(),
                    root: p("(2 3)", 3),
                    children: vec![ChildRef::Identity; 3],
                },
                StateSpec {
                    name: "s23b".into(),
                    root: p("(2 3)", 3),
                    children: vec![ChildRef::Identity; 3],
                },
            ],
        };
        let g = build_element(&unrolled, "top").unwrap();
        assert_eq!(g, elem_c());
        assert_eq!(g.describe(), elem_c().describe());

        // t_2 minimizes to 7 states
        assert_eq!(tv("2").state_count(), 7);

        let t = elem_t();
        assert_eq!(t.canonicalize(), t);
        assert_eq!(t.canonicalize().describe(), t.describe());
    }

    #[test]
    fn states_of_examples() {
        let c = elem_c();
        let states = c.states_of();
        assert_eq!(states.len(), 3);
        assert!(states.contains(&c));
        assert!(states.contains(&Element::rootwise(&p("(2 3)", 3))));
        assert!(states.contains(&Element::identity(3)));

        let r = Element::rootwise(&p("(1 2)", 2));
        assert_eq!(r.states_of().len(), 2);
    }

    #[test]
    fn grigorchuk_b_has_five_states() {
        let spec = AutomatonSpec {
            alphabet: 2,
            states: vec![
                StateSpec {
                    name: "a".into(),
                    root: p("(1 2)", 2),
                    children: vec![ChildRef::Identity; 2],
                },
                StateSpec {
                    name: "b".into(),
                    root: p("()", 2),
                    children: vec![named("a"), named("c")],
                },
                StateSpec {
                    name: "c".into(),
                    root: p("()", 2),
                    children: vec![named("a"), named("d")],
                },
                StateSpec {
                    name: "d".into(),
                    root: p("()", 2),
                    children: vec![ChildRef::Identity, named("b")],
                },
            ],
        };
        let b = build_element(&spec, "b").unwrap();
        assert_eq!(b.states_of().len(), 5);
    }

    #[test]
    fn action_convention_and_cocycle() {
        let c = elem_c();
        let s23 = Element::rootwise(&p("(2 3)", 3));
        let t = elem_t();
        let gens = [c, s23, t];
        for g in &gens {
            for h in &gens {
                let gh = g.compose(h).unwrap();
                for word in Word::all_up_to_length(4, 3) {
                    assert_eq!(gh.act(&word), h.act(&g.act(&word)));
                }
                for x in 1..=3 {
                    let lhs = gh.section(x);
                    let rhs = g
                        .section(x)
                        .compose(&h.section(g.root().apply(x)))
                        .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn act_preserves_length_and_prefixes() {
        let t = elem_t();
        for u in Word::all_up_to_length(3, 3) {
            let image = t.act(&u);
            assert_eq!(image.len(), u.len());
            for v in Word::all_of_length(2, 3) {
                assert!(image.is_prefix_of(&t.act(&u.concat(&v))));
            }
        }
    }

    #[test]
    fn is_identity_agrees_with_action_oracle() {
        let c = elem_c();
        let t = elem_t();
        let candidates = [
            Element::identity(3),
            c.compose(&c).unwrap(),
            t.compose(&t.inverse()).unwrap(),
            c.clone(),
            t.clone(),
            Element::rootwise(&p("(2 3)", 3)),
        ];
        for g in &candidates {
            let depth = g.state_count();
            let trivial = Word::all_up_to_length(depth, 3)
                .iter()
                .all(|word| g.act(word) == *word);
            assert_eq!(g.is_identity(), trivial, "mismatch for {:?}", g);
        }
    }

    #[test]
    fn serialization_roundtrip() {
        let t = elem_t();
        let ser = t.to_serialized();
        let back = Element::from_serialized(&ser).unwrap();
        assert_eq!(back, t);

        let json = serde_json::to_string(&ser).unwrap();
        let reser: SerializedElement = serde_json::from_str(&json).unwrap();
        assert_eq!(Element::from_serialized(&reser).unwrap(), t);

        // malformed child index
        let bad = SerializedElement {
            alphabet: 2,
            states: vec![SerializedState {
                root: "()".into(),
                children: vec![0, 7],
            }],
        };
        assert!(Element::from_serialized(&bad).is_err());
    }
}
