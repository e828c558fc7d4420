//! The embedding compiler: certifies a finite set of bounded automatic
//! generators into mother-group generator form over an enlarged alphabet.
//!
//! Stages follow the constructive proof. `analyze` collects the state set
//! `Q`, the level bound `m` and the period multiple `l`; `restricted_set`
//! takes the level-`m` restrictions (killing deep finitary behaviour);
//! `block_power` reads the tree in `X^l` blocks so directed states get
//! period 1. When the blocked generators already share a fixed letter in
//! mother form the pipeline certifies them directly. Otherwise it builds the
//! recoding automorphism `delta` from a transitive cycle `zeta`, conjugates,
//! and shifts each directed generator's fixed slot onto the letter `o'`;
//! a final block power makes every companion section finitary of depth at
//! most one.
//!
//! Certificates are structural: an output is accepted as rootwise (finitary
//! of depth at most 1, so it lies in the symmetric-group factor) or in
//! mother recursion form (fixes `o`, restricts to itself at `o`, all other
//! sections finitary of depth at most 1). No general membership problem is
//! solved.

use serde::Serialize;
use thiserror::Error;

use crate::machine::{Element, MachineError, SerializedElement};
use crate::perms::{Perm, Word};
use crate::sidki::{classify, Classification, Kind};

#[derive(Debug, Error, Clone)]
pub enum EmbedError {
    #[error("no generators supplied")]
    NoGenerators,
    #[error("generator {index} is not bounded (state {state} fails the cycle shape)")]
    UnboundedGenerator { index: usize, state: String },
    #[error("element is not directed with period 1 over the current alphabet")]
    NotDirected,
    #[error("zeta must be a single transitive cycle")]
    NotTransitiveCycle,
    #[error("restricted generator {0} is neither finitary nor directed; level bound too small")]
    UnexpectedRestrictedState(String),
    #[error("companion of {label} at letter {coordinate} is not finitary")]
    NonFinitaryCompanion { label: String, coordinate: usize },
    #[error("certificate failed for {generator} at coordinate {coordinate:?}")]
    CertificateFailure {
        generator: String,
        coordinate: Option<usize>,
    },
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Output of the analysis stage.
#[derive(Debug, Clone)]
pub struct EmbedAnalysis {
    /// Every state of every generator, deduplicated, in discovery order.
    pub q: Vec<Element>,
    /// The finitary members of `q` (identity included).
    pub finitary: Vec<Element>,
    /// Level bound: one more than the largest structure depth among the
    /// input generators.
    pub m: usize,
    /// Common multiple (the lcm) of the periods of directed states in `q`.
    pub l: usize,
    pub classifications: Vec<(Element, Classification)>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        a.max(b).max(1)
    } else {
        a / gcd(a, b) * b
    }
}

pub fn analyze(gens: &[Element]) -> Result<EmbedAnalysis, EmbedError> {
    if gens.is_empty() {
        return Err(EmbedError::NoGenerators);
    }
    let d = gens[0].alphabet();
    for g in gens {
        if g.alphabet() != d {
            return Err(EmbedError::Machine(MachineError::AlphabetMismatch(
                d,
                g.alphabet(),
            )));
        }
    }

    let mut q: Vec<Element> = Vec::new();
    for g in gens {
        for s in g.states_of() {
            if !q.contains(&s) {
                q.push(s);
            }
        }
    }

    let mut classifications = Vec::with_capacity(q.len());
    let mut finitary = Vec::new();
    let mut l = 1usize;
    for (i, s) in q.iter().enumerate() {
        let cls = classify(s);
        match cls.kind {
            Kind::Unbounded => {
                return Err(EmbedError::UnboundedGenerator {
                    index: i,
                    state: s.describe(),
                })
            }
            Kind::Identity | Kind::Finitary => finitary.push(s.clone()),
            Kind::Directed => l = lcm(l, cls.period.expect("directed has a period")),
            Kind::BoundedOther => {}
        }
        classifications.push((s.clone(), cls));
    }

    let max_gen_depth = gens
        .iter()
        .map(|g| classify(g).depth().expect("bounded by the check above"))
        .max()
        .unwrap_or(0);
    let m = max_gen_depth + 1;

    Ok(EmbedAnalysis {
        q,
        finitary,
        m,
        l,
        classifications,
    })
}

/// The level-`m` restrictions `{q|_w : q ∈ Q, |w| = m}`, deduplicated in
/// deterministic (state, lexicographic word) order.
pub fn restricted_set(gens: &[Element], m: usize) -> Result<Vec<Element>, EmbedError> {
    if gens.is_empty() {
        return Err(EmbedError::NoGenerators);
    }
    let d = gens[0].alphabet();
    let mut q: Vec<Element> = Vec::new();
    for g in gens {
        for s in g.states_of() {
            if !q.contains(&s) {
                q.push(s);
            }
        }
    }
    let mut out: Vec<Element> = Vec::new();
    for s in &q {
        for w in Word::all_of_length(m, d) {
            let r = s.restrict(&w);
            if !out.contains(&r) {
                out.push(r);
            }
        }
    }
    Ok(out)
}

/// Lexicographic rank (1-based) of a length-`l` word over `{1..d}`.
pub fn block_rank(w: &Word, d: usize) -> usize {
    let mut rank = 0usize;
    for &x in w.letters() {
        rank = rank * d + (x - 1);
    }
    rank + 1
}

/// Inverse of [`block_rank`]: the length-`l` word of a 1-based block letter.
pub fn block_word(rank: usize, d: usize, l: usize) -> Word {
    let mut letters = vec![1usize; l];
    let mut r = rank - 1;
    for slot in (0..l).rev() {
        letters[slot] = r % d + 1;
        r /= d;
    }
    Word::new(letters, d).expect("letters in range")
}

/// Reads the same automorphism on the subtree of levels divisible by `l`:
/// an element over the alphabet `X^l` of size `d^l`, acting block by block.
pub fn block_power(g: &Element, l: usize) -> Element {
    assert!(l >= 1, "block length must be positive");
    if l == 1 {
        return g.clone();
    }
    let d = g.alphabet();
    let big = d.pow(l as u32);
    let raw = g.raw_states();
    let walk = |start: usize, w: &Word| -> (usize, Word) {
        let mut state = start;
        let mut out = Vec::with_capacity(w.len());
        for &x in w.letters() {
            let (root, children) = &raw[state];
            out.push(root.apply(x));
            state = children[x - 1];
        }
        (state, Word::new(out, d).expect("in range"))
    };
    let blocks: Vec<Word> = (1..=big).map(|r| block_word(r, d, l)).collect();
    let mut new_raw = Vec::with_capacity(raw.len());
    for s in 0..raw.len() {
        let mut images = Vec::with_capacity(big);
        let mut children = Vec::with_capacity(big);
        for w in &blocks {
            let (child, image) = walk(s, w);
            images.push(block_rank(&image, d));
            children.push(child);
        }
        let root = Perm::from_images(&images).expect("level action is a bijection");
        new_raw.push((root, children));
    }
    Element::from_raw(big, new_raw, 0)
}

/// The recoding automorphism for a transitive cycle `zeta` and origin `o'`:
/// `delta = (delta · zeta_x^{-1})_x` with trivial root, where
/// `zeta_x = zeta^i` for the unique `i` with `x = zeta^i(o')`.
pub fn build_delta(alphabet: usize, o_prime: usize, zeta: &Perm) -> Result<Element, EmbedError> {
    if zeta.degree() != alphabet || !zeta.is_transitive_cycle() {
        return Err(EmbedError::NotTransitiveCycle);
    }
    assert!((1..=alphabet).contains(&o_prime));
    // discrete logs along the cycle from o'
    let mut log = vec![0usize; alphabet];
    let mut x = o_prime;
    for i in 0..alphabet {
        log[x - 1] = i;
        x = zeta.apply(x);
    }
    // state j realizes delta · zeta^{-j}
    let raw: Vec<(Perm, Vec<usize>)> = (0..alphabet)
        .map(|j| {
            let root = zeta.pow(-(j as i64));
            let children = (1..=alphabet).map(|y| log[y - 1]).collect();
            (root, children)
        })
        .collect();
    Ok(Element::from_raw(alphabet, raw, 0))
}

/// `delta^{-1} · alpha · delta`.
pub fn delta_conjugate(alpha: &Element, delta: &Element) -> Result<Element, EmbedError> {
    Ok(alpha.conjugate_by(delta)?)
}

/// For `alpha` directed with period 1 (unique letter `z` with
/// `alpha|_z = alpha`), returns `beta = zeta_z · alpha^delta · zeta_{sigma(z)}^{-1}`,
/// which satisfies `beta|_{o'} = beta` and fixes `o'` at the root.
pub fn normalize_directed(
    alpha: &Element,
    delta: &Element,
    zeta: &Perm,
    o_prime: usize,
) -> Result<Element, EmbedError> {
    let d = alpha.alphabet();
    let z = (1..=d)
        .find(|&x| alpha.section(x) == *alpha)
        .ok_or(EmbedError::NotDirected)?;
    let mut log = vec![0usize; d];
    let mut x = o_prime;
    for i in 0..d {
        log[x - 1] = i;
        x = zeta.apply(x);
    }
    let zeta_pow = |letter: usize| -> Element {
        Element::rootwise(&zeta.pow(log[letter - 1] as i64))
    };
    let sigma_z = alpha.root().apply(z);
    let conj = delta_conjugate(alpha, delta)?;
    let beta = Element::compose_all(
        d,
        &[zeta_pow(z), conj, zeta_pow(sigma_z).inverse()],
    )?;
    if beta.section(o_prime) != beta || beta.root().apply(o_prime) != o_prime {
        return Err(EmbedError::NotDirected);
    }
    Ok(beta)
}

/// Which structural certificate an element satisfies at the fixed letter `o`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MotherForm {
    /// Finitary of depth at most 1: a rootwise permutation (identity
    /// included), i.e. a symmetric-group generator.
    Rootwise,
    /// Fixes `o`, restricts to itself at `o`, and every other section is
    /// finitary of depth at most 1: the mother recursion shape.
    Recursion,
    /// Fails both shapes; `coordinate` is the first offending letter (0 for
    /// a root that moves `o` or a failing self-restriction).
    Fail { coordinate: usize },
}

impl MotherForm {
    pub fn passed(&self) -> bool {
        !matches!(self, MotherForm::Fail { .. })
    }
}

pub fn mother_form_check(g: &Element, o: usize) -> MotherForm {
    let d = g.alphabet();
    assert!((1..=d).contains(&o), "fixed letter out of range");
    let cls = classify(g);
    if matches!(cls.kind, Kind::Identity | Kind::Finitary) && cls.finitary_depth <= Some(1) {
        return MotherForm::Rootwise;
    }
    if g.root().apply(o) != o {
        return MotherForm::Fail { coordinate: 0 };
    }
    if g.section(o) != *g {
        return MotherForm::Fail { coordinate: o };
    }
    for x in 1..=d {
        if x == o {
            continue;
        }
        let section = classify(&g.section(x));
        let fine = matches!(section.kind, Kind::Identity | Kind::Finitary)
            && section.finitary_depth <= Some(1);
        if !fine {
            return MotherForm::Fail { coordinate: x };
        }
    }
    MotherForm::Recursion
}

#[derive(Debug, Clone, Serialize)]
pub struct GenCertificate {
    pub label: String,
    pub form: MotherForm,
    pub passed: bool,
    /// The certified output element over the final alphabet.
    pub element: SerializedElement,
    /// The fixed letter the recursion-form check ran against.
    pub fixed_letter: usize,
}

/// Self-contained outcome of the pipeline; every certificate can be
/// re-checked from the serialized elements alone.
#[derive(Debug, Clone, Serialize)]
pub struct EmbedReport {
    pub input_alphabet: usize,
    pub generator_count: usize,
    pub q_size: usize,
    pub restricted_count: usize,
    pub m: usize,
    pub l: usize,
    pub m_prime: usize,
    pub intermediate_alphabet: usize,
    pub final_alphabet: usize,
    pub o_prime: usize,
    pub o_second: usize,
    pub zeta: Option<String>,
    pub delta_applied: bool,
    pub target: String,
    pub certificates: Vec<GenCertificate>,
}

impl EmbedReport {
    pub fn all_passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }

    /// Re-runs every structural check from the serialized data alone.
    pub fn reverify(&self) -> Result<bool, MachineError> {
        for cert in &self.certificates {
            let elem = Element::from_serialized(&cert.element)?;
            if elem.alphabet() != self.final_alphabet {
                return Ok(false);
            }
            if !mother_form_check(&elem, cert.fixed_letter).passed() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn finitary_depth_over(g: &Element) -> Option<usize> {
    let cls = classify(g);
    match cls.kind {
        Kind::Identity | Kind::Finitary => cls.finitary_depth,
        _ => None,
    }
}

/// Runs the full certification pipeline on bounded automatic generators.
pub fn embed_pipeline(gens: &[Element]) -> Result<EmbedReport, EmbedError> {
    let analysis = analyze(gens)?;
    let d = gens[0].alphabet();
    let restricted = restricted_set(gens, analysis.m)?;
    let big = d.pow(analysis.l as u32);
    let blocked: Vec<Element> = restricted
        .iter()
        .map(|r| block_power(r, analysis.l))
        .collect();

    // degenerate path: everything already shares a fixed letter in mother form
    for o in 1..=big {
        if blocked.iter().all(|r| mother_form_check(r, o).passed()) {
            let certificates = blocked
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let form = mother_form_check(r, o);
                    GenCertificate {
                        label: format!("r{i}"),
                        passed: form.passed(),
                        form,
                        element: r.to_serialized(),
                        fixed_letter: o,
                    }
                })
                .collect();
            return Ok(EmbedReport {
                input_alphabet: d,
                generator_count: gens.len(),
                q_size: analysis.q.len(),
                restricted_count: restricted.len(),
                m: analysis.m,
                l: analysis.l,
                m_prime: 1,
                intermediate_alphabet: big,
                final_alphabet: big,
                o_prime: o,
                o_second: o,
                zeta: None,
                delta_applied: false,
                target: format!("G_{big} wr {d}^{}", analysis.m),
                certificates,
            });
        }
    }

    // recoding path
    let o_prime = 1usize;
    let zeta_images: Vec<usize> = (1..=big).map(|x| x % big + 1).collect();
    let zeta = Perm::from_images(&zeta_images).expect("successor cycle");
    let delta = build_delta(big, o_prime, &zeta)?;

    enum Staged {
        Identity,
        Finitary(Element),
        Directed(Element),
    }
    let mut staged = Vec::with_capacity(blocked.len());
    for (i, r) in blocked.iter().enumerate() {
        let cls = classify(r);
        match cls.kind {
            Kind::Identity => staged.push(Staged::Identity),
            Kind::Finitary => staged.push(Staged::Finitary(r.clone())),
            Kind::Directed => {
                staged.push(Staged::Directed(normalize_directed(
                    r, &delta, &zeta, o_prime,
                )?))
            }
            _ => return Err(EmbedError::UnexpectedRestrictedState(format!("r{i}"))),
        }
    }

    // m': companions of directed outputs and the finitary outputs themselves
    // must reach depth <= 1 after the second block power
    let mut needed = 1usize;
    for (i, s) in staged.iter().enumerate() {
        match s {
            Staged::Identity => {}
            Staged::Finitary(g) => {
                let depth = finitary_depth_over(g).expect("finitary");
                needed = needed.max(depth);
            }
            Staged::Directed(beta) => {
                for x in 1..=big {
                    if x == o_prime {
                        continue;
                    }
                    let depth = finitary_depth_over(&beta.section(x)).ok_or(
                        EmbedError::NonFinitaryCompanion {
                            label: format!("r{i}"),
                            coordinate: x,
                        },
                    )?;
                    needed = needed.max(depth);
                }
            }
        }
    }
    let m_prime = needed;
    let final_alphabet = big.pow(m_prime as u32);
    let o_second = 1usize; // the block (o', …, o') is lexicographically first

    let mut certificates = Vec::with_capacity(staged.len());
    for (i, s) in staged.iter().enumerate() {
        let out = match s {
            Staged::Identity => Element::identity(final_alphabet),
            Staged::Finitary(g) => block_power(g, m_prime),
            Staged::Directed(beta) => block_power(beta, m_prime),
        };
        let form = mother_form_check(&out, o_second);
        if let MotherForm::Fail { coordinate } = form {
            return Err(EmbedError::CertificateFailure {
                generator: format!("r{i}"),
                coordinate: Some(coordinate),
            });
        }
        certificates.push(GenCertificate {
            label: format!("r{i}"),
            passed: form.passed(),
            form,
            element: out.to_serialized(),
            fixed_letter: o_second,
        });
    }

    Ok(EmbedReport {
        input_alphabet: d,
        generator_count: gens.len(),
        q_size: analysis.q.len(),
        restricted_count: restricted.len(),
        m: analysis.m,
        l: analysis.l,
        m_prime,
        intermediate_alphabet: big,
        final_alphabet,
        o_prime,
        o_second,
        zeta: Some(zeta.to_string()),
        delta_applied: true,
        target: format!("G_{final_alphabet} wr {d}^{}", analysis.m),
        certificates,
    })
}
