//! The mother groups `G_d` and their witness constructions.
//!
//! `G_d` is generated by the rootwise copy of `S_d` together with
//! `B_d = S_d \wr (d-1)`, realized through the recursion
//! `b = (b_1, …, b_{d-1}, b) sigma` with `sigma` fixing the self-referential
//! slot `d`. On top of the generators this module builds the degree-shift
//! embedding `G_d -> G_{d+1}`, the distinguished elements `c`, `t = (23)c(23)c`
//! and `c~ = (12)c(12)`, the supported family `t_v`, the wreath decomposition
//! `psi`, and the constructive first-level preimage machinery: the brute-force
//! solver for the four-factor permutation equations and a breadth-first
//! witness search inside `Stab(1)`.

use std::collections::HashSet;

use thiserror::Error;

use crate::machine::{Element, MachineError};
use crate::perms::{Perm, PermError, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MotherError {
    #[error("mother groups need degree at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("expected {expected} b-parts of degree {degree}, got {got}")]
    BadBParts {
        expected: usize,
        degree: usize,
        got: usize,
    },
    #[error("sigma must have degree {expected}, got {got}")]
    BadSigmaDegree { expected: usize, got: usize },
    #[error("omega must lie in A_3 = {{(), (1 2 3), (1 3 2)}}")]
    NotInA3,
    #[error("assembled preimage failed machine verification (convention bug)")]
    PreimageVerificationFailed,
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// One generator of `S_d ∪ B_d`, kept symbolic so callers can label words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MotherGen {
    /// `a ↦ (1, …, 1) a` for `a ∈ S_d`.
    Rootwise { sigma: Perm },
    /// `b = (b_1, …, b_{d-1}, b) sigma` with `sigma ∈ S_{d-1}`.
    BType { parts: Vec<Perm>, sigma: Perm },
}

impl MotherGen {
    pub fn degree(&self) -> usize {
        match self {
            MotherGen::Rootwise { sigma } => sigma.degree(),
            MotherGen::BType { parts, .. } => parts[0].degree(),
        }
    }

    pub fn realize(&self) -> Result<Element, MotherError> {
        match self {
            MotherGen::Rootwise { sigma } => Ok(Element::rootwise(sigma)),
            MotherGen::BType { parts, sigma } => b_gen(self.degree(), parts, sigma),
        }
    }

    pub fn label(&self) -> String {
        match self {
            MotherGen::Rootwise { sigma } => format!("s{sigma}"),
            MotherGen::BType { parts, sigma } => {
                let ps: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                format!("b[{}]{sigma}", ps.join(","))
            }
        }
    }
}

/// All generators of `S_d ∪ B_d`, in a fixed enumeration: rootwise perms in
/// lexicographic order, then b-type generators lexicographic in
/// `(b_1, …, b_{d-1}, sigma)`.
pub fn mother_gen_specs(d: usize) -> Result<Vec<MotherGen>, MotherError> {
    if d < 2 {
        return Err(MotherError::DegreeTooSmall(d));
    }
    let mut out = Vec::new();
    for sigma in Perm::all(d) {
        out.push(MotherGen::Rootwise { sigma });
    }
    let part_choices = Perm::all(d);
    let mut stacks: Vec<Vec<Perm>> = vec![Vec::new()];
    for _ in 0..d - 1 {
        let mut next = Vec::with_capacity(stacks.len() * part_choices.len());
        for stack in &stacks {
            for p in &part_choices {
                let mut s = stack.clone();
                s.push(p.clone());
                next.push(s);
            }
        }
        stacks = next;
    }
    for parts in stacks {
        for sigma in Perm::all(d - 1) {
            out.push(MotherGen::BType {
                parts: parts.clone(),
                sigma,
            });
        }
    }
    Ok(out)
}

/// The generating set `S_d ∪ B_d` as canonical elements, deduplicated (the
/// identity occurs in both factors and is kept once).
pub fn mother_gens(d: usize) -> Result<Vec<Element>, MotherError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for spec in mother_gen_specs(d)? {
        let g = spec.realize()?;
        if seen.insert(g.clone()) {
            out.push(g);
        }
    }
    Ok(out)
}

/// The unique element satisfying `b = (b_1, …, b_{d-1}, b) sigma`.
///
/// `b_parts` are `d-1` permutations of degree `d`; `sigma` has degree `d-1`
/// and is lifted to `S_d` fixing the self-referential letter `d`.
pub fn b_gen(d: usize, b_parts: &[Perm], sigma: &Perm) -> Result<Element, MotherError> {
    if d < 2 {
        return Err(MotherError::DegreeTooSmall(d));
    }
    if b_parts.len() != d - 1 || b_parts.iter().any(|p| p.degree() != d) {
        return Err(MotherError::BadBParts {
            expected: d - 1,
            degree: d,
            got: b_parts.len(),
        });
    }
    if sigma.degree() != d - 1 {
        return Err(MotherError::BadSigmaDegree {
            expected: d - 1,
            got: sigma.degree(),
        });
    }
    let mut lift: Vec<usize> = (1..=d).collect();
    for x in 1..d {
        lift[x - 1] = sigma.apply(x);
    }
    let lifted = Perm::from_images(&lift)?;

    // state 0: the element itself; states 1..d-1: rootwise parts; last: identity
    let id_index = d;
    let mut raw: Vec<(Perm, Vec<usize>)> = Vec::with_capacity(d + 1);
    let mut children: Vec<usize> = (1..d).collect();
    children.push(0);
    raw.push((lifted, children));
    for part in b_parts {
        raw.push((part.clone(), vec![id_index; d]));
    }
    raw.push((Perm::identity(d), vec![id_index; d]));
    Ok(Element::from_raw(d, raw, 0))
}

/// The letter-shift embedding `G_d -> G_{d+1}`: letters move up by one, the
/// fresh letter 1 is fixed with trivial sections underneath.
pub fn embed_up(g: &Element) -> Element {
    let d = g.alphabet();
    let raw = g.raw_states();
    let id_index = raw.len();
    let mut lifted: Vec<(Perm, Vec<usize>)> = Vec::with_capacity(raw.len() + 1);
    for (root, children) in &raw {
        let mut images = vec![1usize];
        for x in 1..=d {
            images.push(root.apply(x) + 1);
        }
        let root_up = Perm::from_images(&images).expect("shift preserves bijectivity");
        let mut kids = vec![id_index];
        kids.extend(children.iter().copied());
        lifted.push((root_up, kids));
    }
    lifted.push((Perm::identity(d + 1), vec![id_index; d + 1]));
    Element::from_raw(d + 1, lifted, 0)
}

/// `c = (1, (23), c)` in `G_3`.
pub fn elem_c() -> Element {
    let id3 = Perm::identity(3);
    let s23 = Perm::parse("(2 3)", 3).expect("valid");
    b_gen(3, &[id3, s23], &Perm::identity(2)).expect("valid B_3 recursion")
}

/// `t = (23) c (23) c = (1, c(23), (23)c)`.
pub fn elem_t() -> Element {
    let c = elem_c();
    let s23 = Element::rootwise(&Perm::parse("(2 3)", 3).expect("valid"));
    Element::compose_all(3, &[s23.clone(), c.clone(), s23, c]).expect("same alphabet")
}

/// `c~ = (12) c (12) = ((23), 1, c)`.
pub fn elem_ctilde() -> Element {
    let c = elem_c();
    let s12 = Element::rootwise(&Perm::parse("(1 2)", 3).expect("valid"));
    Element::compose_all(3, &[s12.clone(), c, s12]).expect("same alphabet")
}

/// The triple `(c, t, c~)`.
pub fn special_elems() -> (Element, Element, Element) {
    (elem_c(), elem_t(), elem_ctilde())
}

/// `t_v`: acts as `t` on the subtree at `v` and trivially elsewhere.
/// `t_∅ = t`.
pub fn elem_tv(v: &Word) -> Element {
    let mut elem = elem_t();
    let root = Perm::identity(3);
    for &x in v.letters().iter().rev() {
        assert!(x >= 1 && x <= 3, "t_v letters live in {{1,2,3}}");
        let mut sections = vec![
            Element::identity(3),
            Element::identity(3),
            Element::identity(3),
        ];
        sections[x - 1] = elem;
        elem = Element::from_sections(&root, &sections).expect("alphabet 3");
    }
    elem
}

/// First-level wreath decomposition `g = (g|_1, …, g|_d) sigma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WreathDecomp {
    pub sections: Vec<Element>,
    pub root: Perm,
}

impl WreathDecomp {
    /// Reassembles the element; inverse of [`psi`].
    pub fn assemble(&self) -> Result<Element, MachineError> {
        Element::from_sections(&self.root, &self.sections)
    }
}

pub fn psi(g: &Element) -> WreathDecomp {
    let d = g.alphabet();
    WreathDecomp {
        sections: (1..=d).map(|x| g.section(x)).collect(),
        root: g.root().clone(),
    }
}

/// The even permutations on three letters.
pub fn a3() -> [Perm; 3] {
    [
        Perm::identity(3),
        Perm::parse("(1 2 3)", 3).expect("valid"),
        Perm::parse("(1 3 2)", 3).expect("valid"),
    ]
}

/// One solution of the conjugated-commutator equation
/// `(σ2' a σ2'⁻¹)(σ1' a⁻¹ σ1'⁻¹) = σ1⁻¹ ω σ1`, together with the full
/// four-factor tuple `(σ_1, σ_2), (σ_1', σ_2'), (σ_1'', σ_2''), (σ_1''', σ_2''')`
/// recovered by back-substitution (free choice `σ_2'' = 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eq7Solution {
    pub sigma1: Perm,
    pub sigma1p: Perm,
    pub sigma2p: Perm,
    pub a: Perm,
    pub tuple: [(Perm, Perm); 4],
}

/// Brute-forces all `S_3^4` tuples solving the reduced equation for
/// `omega ∈ A_3`, in lexicographic order of `(σ1, σ1', σ2', a)`.
pub fn solve_eq7(omega: &Perm) -> Result<Vec<Eq7Solution>, MotherError> {
    if !a3().contains(omega) {
        return Err(MotherError::NotInA3);
    }
    let all = Perm::all(3);
    let mut out = Vec::new();
    for sigma1 in &all {
        let rhs = sigma1
            .inverse()
            .compose(omega)
            .and_then(|x| x.compose(sigma1))
            .expect("degree 3");
        for sigma1p in &all {
            for sigma2p in &all {
                for a in &all {
                    let left = sigma2p
                        .compose(a)
                        .and_then(|x| x.compose(&sigma2p.inverse()))
                        .expect("degree 3");
                    let right = sigma1p
                        .compose(&a.inverse())
                        .and_then(|x| x.compose(&sigma1p.inverse()))
                        .expect("degree 3");
                    if left.compose(&right).expect("degree 3") != rhs {
                        continue;
                    }
                    out.push(complete_solution(omega, sigma1, sigma1p, sigma2p, a));
                }
            }
        }
    }
    Ok(out)
}

/// Back-substitutes the remaining factors: `σ_2'' = 1`, `σ_1'' = a`,
/// `σ_2 = σ_1 σ_1' a σ_1'⁻¹`, and the closures
/// `σ_1''' = σ_1''⁻¹ σ_1'⁻¹ σ_1⁻¹`, `σ_2''' = σ_2''⁻¹ σ_2'⁻¹ σ_2⁻¹`.
fn complete_solution(
    omega: &Perm,
    sigma1: &Perm,
    sigma1p: &Perm,
    sigma2p: &Perm,
    a: &Perm,
) -> Eq7Solution {
    let mul = |xs: &[&Perm]| -> Perm {
        let mut acc = Perm::identity(3);
        for x in xs {
            acc = acc.compose(x).expect("degree 3");
        }
        acc
    };
    let sigma2pp = Perm::identity(3);
    let sigma1pp = a.clone();
    let sigma2 = mul(&[sigma1, sigma1p, a, &sigma1p.inverse()]);
    let sigma1ppp = mul(&[&sigma1pp.inverse(), &sigma1p.inverse(), &sigma1.inverse()]);
    let sigma2ppp = mul(&[&sigma2pp.inverse(), &sigma2p.inverse(), &sigma2.inverse()]);

    // the four defining equations must close up
    debug_assert_eq!(mul(&[sigma1, sigma2p, &sigma1pp, &sigma2ppp]), *omega);
    debug_assert!(mul(&[&sigma2, sigma1p, &sigma2pp, &sigma1ppp]).is_identity());
    debug_assert!(mul(&[sigma1, sigma1p, &sigma1pp, &sigma1ppp]).is_identity());
    debug_assert!(mul(&[&sigma2, sigma2p, &sigma2pp, &sigma2ppp]).is_identity());

    Eq7Solution {
        sigma1: sigma1.clone(),
        sigma1p: sigma1p.clone(),
        sigma2p: sigma2p.clone(),
        a: a.clone(),
        tuple: [
            (sigma1.clone(), sigma2),
            (sigma1p.clone(), sigma2p.clone()),
            (sigma1pp, sigma2pp),
            (sigma1ppp, sigma2ppp),
        ],
    }
}

/// Assembles `g ∈ Stab(1)` with `psi(g) = (omega, 1, 1)` as the eight-factor
/// product `h·(12)·h'·(12)·h''·(12)·h'''·(12)` of `B_3` generators and the
/// rootwise transposition, then verifies the claim on the machine before
/// returning.
pub fn psi_preimage_a3(omega: &Perm) -> Result<Element, MotherError> {
    let solutions = solve_eq7(omega)?;
    let sol = solutions.first().expect("equation always has a solution");
    let r12 = Element::rootwise(&Perm::parse("(1 2)", 3)?);
    let id_s2 = Perm::identity(2);
    let mut factors = Vec::with_capacity(8);
    for (s1, s2) in &sol.tuple {
        factors.push(b_gen(3, &[s1.clone(), s2.clone()], &id_s2)?);
        factors.push(r12.clone());
    }
    let g = Element::compose_all(3, &factors)?;

    if !g.root().is_identity() {
        return Err(MotherError::PreimageVerificationFailed);
    }
    let decomp = psi(&g);
    let ok = decomp.sections[0] == Element::rootwise(omega)
        && decomp.sections[1].is_identity()
        && decomp.sections[2].is_identity();
    if !ok {
        return Err(MotherError::PreimageVerificationFailed);
    }
    Ok(g)
}

/// Outcome of the bounded `Stab(1)` preimage search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stab1Search {
    Found {
        witness: Element,
        /// Indices into the search alphabet, shortest then lexicographic.
        word: Vec<usize>,
    },
    NotFound {
        radius: usize,
        nodes: u64,
        budget_hit: bool,
    },
}

pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

/// The alphabet used by [`stab1_preimage`]: the mother generators of `G_3`
/// (identity dropped) followed by `t`, `t⁻¹` and `c~`, which carry the
/// explicit section-shift witnesses.
pub fn stab1_search_alphabet() -> Vec<Element> {
    let mut gens: Vec<Element> = mother_gens(3)
        .expect("degree 3")
        .into_iter()
        .filter(|g| !g.is_identity())
        .collect();
    let t = elem_t();
    gens.push(t.clone());
    gens.push(t.inverse());
    gens.push(elem_ctilde());
    gens
}

/// Breadth-first search for `h ∈ Stab(1)` with `psi(h).sections[coord] =
/// target`, over words of length at most `radius` in the search alphabet.
/// Deterministic: the witness is the first hit in (length, lexicographic)
/// word order with canonical-form deduplication.
pub fn stab1_preimage(target: &Element, coord: usize, radius: usize) -> Stab1Search {
    stab1_preimage_with_budget(target, coord, radius, DEFAULT_SEARCH_BUDGET)
}

pub fn stab1_preimage_with_budget(
    target: &Element,
    coord: usize,
    radius: usize,
    budget: u64,
) -> Stab1Search {
    assert!((1..=3).contains(&coord), "coord is 1-based in 1..=3");
    let gens = stab1_search_alphabet();
    let satisfies =
        |h: &Element| -> bool { h.root().is_identity() && h.section(coord) == *target };

    let start = Element::identity(3);
    if satisfies(&start) {
        return Stab1Search::Found {
            witness: start,
            word: Vec::new(),
        };
    }
    let mut seen: HashSet<Element> = HashSet::new();
    seen.insert(start.clone());
    let mut frontier: Vec<(Element, Vec<usize>)> = vec![(start, Vec::new())];
    let mut nodes: u64 = 0;
    for _ in 0..radius {
        let mut next = Vec::new();
        for (h, word) in &frontier {
            for (i, g) in gens.iter().enumerate() {
                nodes += 1;
                if nodes > budget {
                    return Stab1Search::NotFound {
                        radius,
                        nodes,
                        budget_hit: true,
                    };
                }
                let hg = h.compose(g).expect("alphabet 3");
                if !seen.insert(hg.clone()) {
                    continue;
                }
                let mut w = word.clone();
                w.push(i);
                if satisfies(&hg) {
                    return Stab1Search::Found {
                        witness: hg,
                        word: w,
                    };
                }
                next.push((hg, w));
            }
        }
        frontier = next;
    }
    Stab1Search::NotFound {
        radius,
        nodes,
        budget_hit: false,
    }
}
