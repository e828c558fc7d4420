//! Conjugation calculus for the family `{t_v}` and the machine audit of its
//! published relation table.
//!
//! Ground truth is always the machine: `conj_by_t` computes `t^e t_v t^{-e}`
//! as an element and matches it against every candidate `t_{v'}^{±1}` of the
//! same word length. The clause table is treated as a hypothesis under audit,
//! because its "contains 1 implies commuting" case and its pattern cases
//! overlap inconsistently (`v = 231` is the smallest conflict). The audit
//! evaluates both sides of each clause instance as machine products and
//! records every disagreement with the ground-truth image.

use std::collections::{HashMap, HashSet};
use std::sync::Mutex;

use once_cell::sync::Lazy;
use serde::Serialize;
use thiserror::Error;

use crate::machine::Element;
use crate::mother::{elem_t, elem_tv};
use crate::perms::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("conjugate of t_{0} is not a single generator t_v' of equal length")]
    NoSingleGeneratorImage(Word),
    #[error("exponent must be +1 or -1, got {0}")]
    BadExponent(i8),
}

/// The symbol `t_v^{±1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormalGenerator {
    pub word: Word,
    pub exponent: i8,
}

impl FormalGenerator {
    pub fn new(word: Word, exponent: i8) -> FormalGenerator {
        assert!(exponent == 1 || exponent == -1, "exponent is ±1");
        FormalGenerator { word, exponent }
    }

    pub fn realize(&self) -> Element {
        let g = elem_tv(&self.word);
        if self.exponent == 1 {
            g
        } else {
            g.inverse()
        }
    }
}

/// `j_i(t_v^e) = t_{iv}^e` for `i` in 1..=3: the level-shift embeddings.
pub fn jmap(i: usize, g: &FormalGenerator) -> FormalGenerator {
    assert!((1..=3).contains(&i), "jmap index is 1, 2 or 3");
    FormalGenerator {
        word: g.word.prepend(i),
        exponent: g.exponent,
    }
}

/// The letter swap used by the relation table: `2 ↔ 3`. The table leaves the
/// letter 1 ungoverned; it is mapped to itself here purely so clause matching
/// can name the ground-truth image (a derived convention, not a published one).
pub fn hat(x: usize) -> usize {
    match x {
        2 => 3,
        3 => 2,
        other => other,
    }
}

/// One clause of the relation table for `t_{w1} · t_{w1 v}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Clause {
    /// Incomparable words commute.
    Incomparable,
    /// Case (1): `v` contains the letter 1, claimed to commute.
    ContainsOne,
    /// Case (2)(a): `|v| = 1` over `{2,3}`, commute.
    SingleLetter,
    /// Case (2)(b): `v = ab` over `{2,3}`, image `a hat(b)` with sign -1.
    LetterPair,
    /// Case (2)(c)(i): `23 a v̄ → 22 hat(a) v̄`, sign +1.
    Prefix23,
    /// Case (2)(c)(ii): `32 a v̄ → 33 hat(a) v̄`, sign +1.
    Prefix32,
    /// Case (2)(c)(iii): `2 2 3..3 → 2 3 3..3`, sign -1.
    TwoTwoThrees,
    /// Case (2)(c)(iv): `3 3 3..3 → 3 2 3..3`, sign -1.
    AllThrees,
    /// Case (2)(c)(v): `2 2 3..3 2 → 2 3 3..3 2`, sign -1.
    TwoTwoThreesTwo,
    /// Case (2)(c)(vi): `3 3 3..3 2 → 3 2 3..3 2`, sign -1.
    AllThreesTwo,
    /// Case (2)(c)(vii): `2 2 3..3 2 a v̄ → 2 3 3..3 2 hat(a) v̄`, sign +1.
    TwoTwoThreesTwoTail,
    /// Case (2)(c)(viii): `3 3 3..3 2 a v̄ → 3 2 3..3 2 hat(a) v̄`, sign +1.
    AllThreesTwoTail,
}

impl Clause {
    pub fn label(self) -> &'static str {
        match self {
            Clause::Incomparable => "incomparable",
            Clause::ContainsOne => "case-1-contains-1",
            Clause::SingleLetter => "case-2a-single-letter",
            Clause::LetterPair => "case-2b-letter-pair",
            Clause::Prefix23 => "case-2c-i-prefix-23",
            Clause::Prefix32 => "case-2c-ii-prefix-32",
            Clause::TwoTwoThrees => "case-2c-iii-22-threes",
            Clause::AllThrees => "case-2c-iv-all-threes",
            Clause::TwoTwoThreesTwo => "case-2c-v-22-threes-2",
            Clause::AllThreesTwo => "case-2c-vi-33-threes-2",
            Clause::TwoTwoThreesTwoTail => "case-2c-vii-22-threes-2-tail",
            Clause::AllThreesTwoTail => "case-2c-viii-33-threes-2-tail",
        }
    }

    pub const ALL: [Clause; 12] = [
        Clause::Incomparable,
        Clause::ContainsOne,
        Clause::SingleLetter,
        Clause::LetterPair,
        Clause::Prefix23,
        Clause::Prefix32,
        Clause::TwoTwoThrees,
        Clause::AllThrees,
        Clause::TwoTwoThreesTwo,
        Clause::AllThreesTwo,
        Clause::TwoTwoThreesTwoTail,
        Clause::AllThreesTwoTail,
    ];
}

/// All table clauses matching the suffix `v`, with their claimed image word
/// and sign. Several clauses can claim one suffix; they need not agree.
pub fn clauses_for(v: &Word) -> Vec<(Clause, Word, i8)> {
    let letters = v.letters();
    let n = letters.len();
    let mut out = Vec::new();
    let word = |ls: Vec<usize>| Word::new(ls, 3).expect("letters in range");

    if letters.contains(&1) {
        out.push((Clause::ContainsOne, v.clone(), 1));
    }
    if n == 1 && letters[0] != 1 {
        out.push((Clause::SingleLetter, v.clone(), 1));
    }
    if n == 2 && letters.iter().all(|&x| x != 1) {
        out.push((
            Clause::LetterPair,
            word(vec![letters[0], hat(letters[1])]),
            -1,
        ));
    }
    if n >= 3 {
        let head = (letters[0], letters[1]);
        let tail = &letters[2..];
        match head {
            (2, 3) => {
                let mut image = vec![2, 2, hat(letters[2])];
                image.extend_from_slice(&letters[3..]);
                out.push((Clause::Prefix23, word(image), 1));
            }
            (3, 2) => {
                let mut image = vec![3, 3, hat(letters[2])];
                image.extend_from_slice(&letters[3..]);
                out.push((Clause::Prefix32, word(image), 1));
            }
            (2, 2) | (3, 3) => {
                let threes = tail.iter().take_while(|&&x| x == 3).count();
                let rest = &tail[threes..];
                let swapped_head = if head == (2, 2) { vec![2, 3] } else { vec![3, 2] };
                let (all_threes, with_two, with_tail) = if head == (2, 2) {
                    (
                        Clause::TwoTwoThrees,
                        Clause::TwoTwoThreesTwo,
                        Clause::TwoTwoThreesTwoTail,
                    )
                } else {
                    (Clause::AllThrees, Clause::AllThreesTwo, Clause::AllThreesTwoTail)
                };
                if rest.is_empty() && threes >= 1 {
                    let mut image = swapped_head;
                    image.extend(std::iter::repeat(3).take(threes));
                    out.push((all_threes, word(image), -1));
                } else if rest == [2] {
                    let mut image = swapped_head;
                    image.extend(std::iter::repeat(3).take(threes));
                    image.push(2);
                    out.push((with_two, word(image), -1));
                } else if rest.first() == Some(&2) && rest.len() >= 2 {
                    let mut image = swapped_head;
                    image.extend(std::iter::repeat(3).take(threes));
                    image.push(2);
                    image.push(hat(rest[1]));
                    image.extend_from_slice(&rest[2..]);
                    out.push((with_tail, word(image), 1));
                }
                // a tail of threes broken by the letter 1 matches no pattern
            }
            _ => {}
        }
    }
    out
}

/// Reverse lookup tables `t_{v'}^{±1} -> (v', ε)`, one per word length,
/// shared across calls.
static TV_LOOKUP: Lazy<Mutex<HashMap<usize, HashMap<Element, (Word, i8)>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn lookup_tv_image(conjugate: &Element, length: usize) -> Option<(Word, i8)> {
    let mut cache = TV_LOOKUP.lock().expect("lookup cache poisoned");
    let table = cache.entry(length).or_insert_with(|| {
        let mut table = HashMap::new();
        for v in Word::all_of_length(length, 3) {
            let g = elem_tv(&v);
            table.insert(g.inverse(), (v.clone(), -1));
            // on collision (only length 0 could collide) the positive sign wins
            table.insert(g, (v, 1));
        }
        table
    });
    table.get(conjugate).cloned()
}

/// Conjugates `t_v` by `t^e` on the machine and identifies the image among
/// the `t_{v'}^{±1}` of equal length: `t^e · t_v · t^{-e} = t_{v'}^ε`.
pub fn conj_by_t(v: &Word, e: i8) -> Result<(Word, i8), RelationError> {
    if e != 1 && e != -1 {
        return Err(RelationError::BadExponent(e));
    }
    let t = elem_t();
    let conjugator = if e == 1 { t.clone() } else { t.inverse() };
    let conjugate = Element::compose_all(
        3,
        &[conjugator.clone(), elem_tv(v), conjugator.inverse()],
    )
    .expect("alphabet 3");
    lookup_tv_image(&conjugate, v.len())
        .ok_or_else(|| RelationError::NoSingleGeneratorImage(v.clone()))
}

/// A machine-verified rewrite fact `t^e · t_v · t^{-e} = t_{v'}^ε`, annotated
/// with what the published table says about the pair (conjugation by `t`, so
/// the annotation is only filled for `e = +1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub input: Word,
    pub output: Word,
    pub sign: i8,
    /// Exponent of the conjugating `t`.
    pub by_exponent: i8,
    /// The first table clause matching the input whose claim equals the
    /// ground truth, else the first matching clause, if any.
    pub paper_case: Option<Clause>,
    /// Whether every matching clause agrees with the machine image.
    pub agrees_with_paper: bool,
}

pub fn conj_relation(v: &Word, e: i8) -> Result<Relation, RelationError> {
    let (output, sign) = conj_by_t(v, e)?;
    let (paper_case, agrees) = if e == 1 {
        let matches = clauses_for(v);
        let agrees = !matches.is_empty()
            && matches
                .iter()
                .all(|(_, w, s)| *w == output && *s == sign);
        let case = matches
            .iter()
            .find(|(_, w, s)| *w == output && *s == sign)
            .or_else(|| matches.first())
            .map(|(c, _, _)| *c);
        (case, agrees)
    } else {
        (None, false)
    };
    Ok(Relation {
        input: v.clone(),
        output,
        sign,
        by_exponent: e,
        paper_case,
        agrees_with_paper: agrees,
    })
}

/// The normality step: `t^{-1} · t_v · t` as a single generator of the same
/// length, machine-verified.
pub fn normality_witness(v: &Word) -> Result<Relation, RelationError> {
    assert!(!v.is_empty(), "normality witnesses concern proper vertices");
    conj_relation(v, -1)
}

/// True when conjugation by `t^{±1}` keeps every generator of level at most
/// `n` inside the level-`kmax` family with its length preserved.
pub fn conj_closure_check(n: usize, kmax: usize) -> bool {
    assert!(n <= kmax);
    for k in 1..=n {
        for v in Word::all_of_length(k, 3) {
            for e in [1i8, -1] {
                match conj_by_t(&v, e) {
                    Ok((image, _)) if image.len() == v.len() && image.len() <= kmax => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

#[derive(Debug, Clone, Serialize)]
pub struct ClauseStats {
    pub clause: Clause,
    pub label: String,
    pub checked: u64,
    pub passed: u64,
    pub failed: u64,
    /// Clause claims that contradict the machine are expected only here.
    pub expected_discrepancies: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureRecord {
    pub clause: Clause,
    pub w1: String,
    pub v: String,
    pub claimed: String,
    pub ground_truth: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub max_prefix_len: usize,
    pub max_suffix_len: usize,
    pub incomparable_len: usize,
    pub clauses: Vec<ClauseStats>,
    pub failures: Vec<FailureRecord>,
    /// Suffixes whose conjugate is not a single generator; must stay empty.
    pub no_single_generator: Vec<String>,
}

impl AuditReport {
    pub fn stats(&self, clause: Clause) -> &ClauseStats {
        self.clauses
            .iter()
            .find(|s| s.clause == clause)
            .expect("all clauses present")
    }

    /// Failures outside the documented contains-1 conflicts.
    pub fn unexpected_failures(&self) -> Vec<&FailureRecord> {
        self.failures
            .iter()
            .filter(|f| f.clause != Clause::ContainsOne)
            .collect()
    }

    pub fn is_clean(&self) -> bool {
        self.unexpected_failures().is_empty() && self.no_single_generator.is_empty()
    }
}

fn fmt_generator(w: &Word, sign: i8) -> String {
    if sign == 1 {
        format!("t[{w}]")
    } else {
        format!("t[{w}]^-1")
    }
}

/// Audits every clause instance `t_{w1} · t_{w1 v} = t_{w1 v'}^ε · t_{w1}`
/// for prefixes up to `max_prefix_len` and suffixes up to `max_suffix_len`
/// over the full alphabet, evaluating both sides as machine products. The
/// incomparable case is checked exhaustively for word lengths up to
/// `min(4, max_prefix_len + max_suffix_len)`.
pub fn audit_prop41(max_prefix_len: usize, max_suffix_len: usize) -> AuditReport {
    assert!(max_prefix_len >= 1 && max_suffix_len >= 1);
    let mut stats: HashMap<Clause, (u64, u64)> = HashMap::new();
    let mut failures = Vec::new();
    let mut no_single_generator = Vec::new();

    // prefix-suffix clause instances
    for w1 in Word::all_up_to_length(max_prefix_len, 3) {
        let tw1 = elem_tv(&w1);
        for len in 1..=max_suffix_len {
            for v in Word::all_of_length(len, 3) {
                let matches = clauses_for(&v);
                if matches.is_empty() {
                    continue;
                }
                let w2 = w1.concat(&v);
                let lhs = tw1.compose(&elem_tv(&w2)).expect("alphabet 3");
                for (clause, image, sign) in matches {
                    let claimed = elem_tv(&w1.concat(&image));
                    let claimed = if sign == 1 { claimed } else { claimed.inverse() };
                    let rhs = claimed.compose(&tw1).expect("alphabet 3");
                    let entry = stats.entry(clause).or_insert((0, 0));
                    entry.0 += 1;
                    if lhs == rhs {
                        entry.1 += 1;
                    } else {
                        let truth = match conj_by_t(&v, 1) {
                            Ok((w, s)) => fmt_generator(&w, s),
                            Err(_) => {
                                no_single_generator.push(v.to_string());
                                "<no single-generator image>".to_string()
                            }
                        };
                        failures.push(FailureRecord {
                            clause,
                            w1: w1.to_string(),
                            v: v.to_string(),
                            claimed: fmt_generator(&image, sign),
                            ground_truth: truth,
                        });
                    }
                }
            }
        }
    }

    // ground-truth totality over the audited suffixes
    for len in 1..=max_suffix_len {
        for v in Word::all_of_length(len, 3) {
            for e in [1i8, -1] {
                if conj_by_t(&v, e).is_err() {
                    no_single_generator.push(format!("{v} (e = {e})"));
                }
            }
        }
    }

    // incomparable pairs commute
    let incomparable_len = 4.min(max_prefix_len + max_suffix_len);
    {
        let entry = stats.entry(Clause::Incomparable).or_insert((0, 0));
        let words: Vec<Word> = (1..=incomparable_len)
            .flat_map(|k| Word::all_of_length(k, 3))
            .collect();
        let elems: Vec<Element> = words.iter().map(elem_tv).collect();
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                let (w1, w2) = (&words[i], &words[j]);
                if w1.is_prefix_of(w2) || w2.is_prefix_of(w1) {
                    continue;
                }
                entry.0 += 1;
                let lhs = elems[i].compose(&elems[j]).expect("alphabet 3");
                let rhs = elems[j].compose(&elems[i]).expect("alphabet 3");
                if lhs == rhs {
                    entry.1 += 1;
                } else {
                    failures.push(FailureRecord {
                        clause: Clause::Incomparable,
                        w1: w1.to_string(),
                        v: w2.to_string(),
                        claimed: "commute".into(),
                        ground_truth: "do not commute".into(),
                    });
                }
            }
        }
    }

    failures.sort_by(|a, b| {
        (a.clause, a.w1.len(), &a.w1, a.v.len(), &a.v)
            .cmp(&(b.clause, b.w1.len(), &b.w1, b.v.len(), &b.v))
    });
    no_single_generator.sort();
    no_single_generator.dedup();

    let clauses = Clause::ALL
        .iter()
        .map(|&clause| {
            let (checked, passed) = stats.get(&clause).copied().unwrap_or((0, 0));
            ClauseStats {
                clause,
                label: clause.label().to_string(),
                checked,
                passed,
                failed: checked - passed,
                expected_discrepancies: clause == Clause::ContainsOne,
            }
        })
        .collect();

    AuditReport {
        max_prefix_len,
        max_suffix_len,
        incomparable_len,
        clauses,
        failures,
        no_single_generator,
    }
}

/// Outcome of the bounded subgroup-membership probe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeResult {
    /// Smallest `k >= 1` with `t^k` in the enumerated set, if any. `t^0` is
    /// present trivially and not reported as a find.
    pub found_power: Option<usize>,
    pub enumerated: u64,
    pub saturated: bool,
}

pub const DEFAULT_PROBE_BUDGET: u64 = 1_000_000;

/// Enumerates products of at most `max_len` factors from `gens ∪ gens⁻¹`
/// with canonical deduplication, stopping at `budget` distinct elements.
pub fn bounded_enumeration(
    gens: &[Element],
    max_len: usize,
    budget: u64,
) -> (HashSet<Element>, bool) {
    let mut alphabet: Vec<Element> = Vec::new();
    for g in gens {
        alphabet.push(g.clone());
        alphabet.push(g.inverse());
    }
    let mut seen: HashSet<Element> = HashSet::new();
    seen.insert(Element::identity(3));
    let mut frontier: Vec<Element> = vec![Element::identity(3)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for h in &frontier {
            for g in &alphabet {
                if seen.len() as u64 >= budget {
                    return (seen, true);
                }
                let hg = h.compose(g).expect("alphabet 3");
                if seen.insert(hg.clone()) {
                    next.push(hg);
                }
            }
        }
        frontier = next;
    }
    (seen, false)
}

/// Explores whether some power `t^k`, `1 <= k <= kmax`, lies in the subgroup
/// generated by `{t_v : 1 <= |v| <= n}`, by bounded enumeration of products
/// of at most `search_len` generators. Evidence only: a not-found answer is
/// relative to the declared bounds.
pub fn quotient_probe(n: usize, kmax: usize, search_len: usize) -> ProbeResult {
    quotient_probe_with_budget(n, kmax, search_len, DEFAULT_PROBE_BUDGET)
}

pub fn quotient_probe_with_budget(
    n: usize,
    kmax: usize,
    search_len: usize,
    budget: u64,
) -> ProbeResult {
    assert!(kmax >= 1);
    let gens: Vec<Element> = (1..=n)
        .flat_map(|k| Word::all_of_length(k, 3))
        .map(|v| elem_tv(&v))
        .collect();
    let (set, saturated) = bounded_enumeration(&gens, search_len, budget);
    let t = elem_t();
    let found_power = (1..=kmax).find(|&k| set.contains(&t.pow(k as i64)));
    ProbeResult {
        found_power,
        enumerated: set.len() as u64,
        saturated,
    }
}
