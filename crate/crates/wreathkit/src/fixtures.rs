//! Shared generator fixtures: the Grigorchuk group and the degree-2 mother
//! group generators. Used across the classifier, embedder and acceptance
//! suites.

use crate::machine::{build_element, AutomatonSpec, ChildRef, Element, StateSpec};
use crate::mother::b_gen;
use crate::perms::Perm;

/// The Grigorchuk generators over the binary tree:
/// `a = (1,1)(12)`, `b = (a, c)`, `c = (a, d)`, `d = (1, b)`.
pub fn grigorchuk() -> [Element; 4] {
    let id2 = Perm::identity(2);
    let swap = Perm::parse("(1 2)", 2).expect("valid");
    let named = |n: &str| ChildRef::Named(n.to_string());
    let spec = AutomatonSpec {
        alphabet: 2,
        states: vec![
            StateSpec {
                name: "a".into(),
                root: swap,
                children: vec![ChildRef::Identity, ChildRef::Identity],
            },
            StateSpec {
                name: "b".into(),
                root: id2.clone(),
                children: vec![named("a"), named("c")],
            },
            StateSpec {
                name: "c".into(),
                root: id2.clone(),
                children: vec![named("a"), named("d")],
            },
            StateSpec {
                name: "d".into(),
                root: id2,
                children: vec![ChildRef::Identity, named("b")],
            },
        ],
    };
    ["a", "b", "c", "d"].map(|s| build_element(&spec, s).expect("well-formed recursion"))
}

/// `a = (1,1)(12)` in `G_2`.
pub fn g2_a() -> Element {
    Element::rootwise(&Perm::parse("(1 2)", 2).expect("valid"))
}

/// `b = ((12), b)` in `G_2`.
pub fn g2_b() -> Element {
    b_gen(
        2,
        &[Perm::parse("(1 2)", 2).expect("valid")],
        &Perm::identity(1),
    )
    .expect("valid B_2 recursion")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perms::Word;

    #[test]
    fn grigorchuk_recursion_shape() {
        let [a, b, c, d] = grigorchuk();
        assert_eq!(b.section(1), a);
        assert_eq!(b.section(2), c);
        assert_eq!(c.section(1), a);
        assert_eq!(c.section(2), d);
        assert!(d.section(1).is_identity());
        assert_eq!(d.section(2), b);
        assert_eq!(b.states_of().len(), 5);

        // the defining relations a² = b² = c² = d² = 1 and bcd = 1
        for g in [&a, &b, &c, &d] {
            assert!(g.pow(2).is_identity());
        }
        let bcd = b.compose(&c).unwrap().compose(&d).unwrap();
        assert!(bcd.is_identity());

        // spine: b|_222 = b
        assert_eq!(b.restrict(&Word::parse("222", 2).unwrap()), b);
    }

    #[test]
    fn g2_generators_are_involutions() {
        assert!(g2_a().pow(2).is_identity());
        assert!(g2_b().pow(2).is_identity());
        // and ab has infinite order at desk scale
        let ab = g2_a().compose(&g2_b()).unwrap();
        for k in 1..=8 {
            assert!(!ab.pow(k).is_identity());
        }
    }
}
