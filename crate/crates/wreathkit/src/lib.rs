//! Exact arithmetic for automata groups acting on rooted `d`-regular trees.
//!
//! The toolkit covers wreath-recursion arithmetic on finite-state tree
//! automorphisms, Sidki's bounded-automata classification, the mother groups
//! `G_d` with their witness constructions, the `t_v` conjugation calculus,
//! weighted word metrics, and a compiler that certifies bounded generators
//! into mother-group generator form over an enlarged alphabet.

pub mod perms;

pub mod machine;

pub mod sidki;

pub mod mother;

pub mod relations;

pub mod metrics;

pub mod embedder;

pub mod fixtures;

pub mod suite;

pub use machine::{build_element, AutomatonSpec, ChildRef, Element, MachineError, StateSpec};
pub use perms::{Perm, PermError, Word};
