//! The acceptance battery: ten machine-checked criteria covering the wreath
//! arithmetic, the distinguished identities, the relation audit, the
//! classifier, the embedding compiler and the metrics.
//!
//! Every check is deterministic (sampling uses a fixed-seed generator) and
//! self-contained; `run_all` returns one outcome per criterion with a wall
//! time and a one-line detail. The stated time limits are reported alongside
//! the result; correctness is what decides pass/fail.

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;

use crate::embedder::{embed_pipeline, MotherForm};
use crate::fixtures::{g2_a, g2_b, grigorchuk};
use crate::machine::Element;
use crate::metrics::{
    ball_growth, coset_separation_check, CosetVerdict, WeightedGenSet,
};
use crate::mother::{
    a3, elem_c, elem_t, elem_tv, embed_up, mother_gens, psi, psi_preimage_a3, solve_eq7,
    special_elems,
};
use crate::perms::{Perm, Word};
use crate::relations::{audit_prop41, conj_by_t, Clause};
use crate::sidki::{classify, Kind};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
    pub stated_limit_ms: u128,
}

impl CheckOutcome {
    pub fn render(&self) -> String {
        format!(
            "[{}] {:>2}. {} ({} ms, limit {} ms) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.millis,
            self.stated_limit_ms,
            self.detail
        )
    }
}

/// Deterministic splitmix64 stream for sampling.
struct SplitMix64(u64);

impl SplitMix64 {
    fn new(seed: u64) -> SplitMix64 {
        SplitMix64(seed)
    }

    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

fn check<F: FnOnce() -> (bool, String)>(
    id: usize,
    name: &str,
    stated_limit_ms: u128,
    body: F,
) -> CheckOutcome {
    let start = Instant::now();
    let (passed, detail) = body();
    CheckOutcome {
        id,
        name: name.to_string(),
        passed,
        detail,
        millis: start.elapsed().as_millis(),
        stated_limit_ms,
    }
}

fn w3(text: &str) -> Word {
    Word::parse(text, 3).expect("valid word")
}

/// Criterion 1: the defining wreath identity of `t`.
pub fn check_wreath_identity() -> CheckOutcome {
    check(1, "wreath identity t = (23)c(23)c = (1, c(23), (23)c)", 1, || {
        let c = elem_c();
        let s23 = Element::rootwise(&Perm::parse("(2 3)", 3).expect("valid"));
        let composed =
            Element::compose_all(3, &[s23.clone(), c.clone(), s23.clone(), c.clone()])
                .expect("alphabet 3");
        let assembled = Element::from_sections(
            &Perm::identity(3),
            &[
                Element::identity(3),
                c.compose(&s23).expect("alphabet 3"),
                s23.compose(&c).expect("alphabet 3"),
            ],
        )
        .expect("alphabet 3");
        (
            composed == assembled,
            format!("canonical forms identical ({} states)", composed.state_count()),
        )
    })
}

/// Criterion 2: the commuting-conjugate ladder around `c~`.
pub fn check_lemma_ladder() -> CheckOutcome {
    check(2, "c~ ladder: commuting, squared form, conjugate form", 10, || {
        let (c, t, ctilde) = special_elems();
        let s23 = Element::rootwise(&Perm::parse("(2 3)", 3).expect("valid"));
        let target = Element::from_sections(
            &Perm::identity(3),
            &[Element::identity(3), Element::identity(3), t.clone()],
        )
        .expect("alphabet 3");

        let commuting = c.compose(&ctilde).expect("alphabet 3")
            == ctilde.compose(&c).expect("alphabet 3");
        let squared = Element::compose_all(3, &[s23.clone(), c.clone(), s23, ctilde.clone()])
            .expect("alphabet 3")
            .pow(2)
            == target;
        let conjugate = Element::compose_all(
            3,
            &[t.clone(), ctilde.clone(), t.inverse(), ctilde.clone()],
        )
        .expect("alphabet 3")
            == target;
        (
            commuting && squared && conjugate,
            format!("commuting={commuting} squared={squared} conjugate={conjugate}"),
        )
    })
}

/// Criterion 3: the brute-force solver and the verified first-level preimages.
pub fn check_preimage_solver() -> CheckOutcome {
    check(3, "equation solver and Stab(1) preimages over A_3", 1000, || {
        let p = |s: &str| Perm::parse(s, 3).expect("valid");
        let has = |omega: &Perm, s1: &str, s2p: &str, s1p: &str, a: &str| -> bool {
            solve_eq7(omega).expect("omega in A_3").iter().any(|sol| {
                sol.sigma1 == p(s1)
                    && sol.sigma2p == p(s2p)
                    && sol.sigma1p == p(s1p)
                    && sol.a == p(a)
            })
        };
        let worked_123 = has(&p("(1 2 3)"), "()", "(1 2)", "(2 3)", "(1 2)");
        let worked_132 = has(&p("(1 3 2)"), "()", "(1 2)", "(1 3)", "(1 2)");
        let mut preimages = true;
        for omega in a3() {
            match psi_preimage_a3(&omega) {
                Ok(g) => {
                    let decomp = psi(&g);
                    preimages &= g.root().is_identity()
                        && decomp.sections[0] == Element::rootwise(&omega)
                        && decomp.sections[1].is_identity()
                        && decomp.sections[2].is_identity();
                }
                Err(_) => preimages = false,
            }
        }
        (
            worked_123 && worked_132 && preimages,
            format!(
                "worked tuples present={} preimages verified={}",
                worked_123 && worked_132,
                preimages
            ),
        )
    })
}

/// Criterion 4: the relation-table audit over the stated window.
pub fn check_relation_audit() -> CheckOutcome {
    check(4, "relation audit (prefixes <= 2, suffixes <= 5)", 60_000, || {
        let report = audit_prop41(2, 5);
        let pattern_clauses_clean = Clause::ALL
            .iter()
            .filter(|&&c| c != Clause::ContainsOne)
            .all(|&c| report.stats(c).failed == 0 && report.stats(c).checked > 0);
        let conflict_reported = report.failures.iter().any(|f| {
            f.clause == Clause::ContainsOne && f.v == "231" && f.ground_truth == "t[221]"
        });
        let totality = report.no_single_generator.is_empty();
        let checked: u64 = report.clauses.iter().map(|c| c.checked).sum();
        (
            pattern_clauses_clean && conflict_reported && totality,
            format!(
                "instances={} pattern clauses clean={} 231-conflict reported={} single-generator images={}",
                checked, pattern_clauses_clean, conflict_reported, totality
            ),
        )
    })
}

/// Criterion 5: conjugation by `t` permutes each level of the index tree.
pub fn check_conjugation_bijection() -> CheckOutcome {
    check(5, "conjugation bijection on words of length <= 4", 30_000, || {
        let mut total = 0usize;
        for k in 1..=4usize {
            let words = Word::all_of_length(k, 3);
            let mut images = std::collections::HashSet::new();
            for v in &words {
                match conj_by_t(v, 1) {
                    Ok((image, _)) if image.len() == k => {
                        images.insert(image);
                    }
                    _ => return (false, format!("no single-generator image at {v}")),
                }
            }
            if images.len() != words.len() {
                return (false, format!("level {k} not a bijection"));
            }
            total += words.len();
        }
        (true, format!("{total} words, all levels bijective"))
    })
}

/// Criterion 6: the commuting family, torsion-freeness of `t`, and the
/// degree-shift homomorphism.
pub fn check_infinite_rank_witnesses() -> CheckOutcome {
    check(6, "commuting family, powers of t, degree shift", 10_000, || {
        let family: Vec<Element> = ["2", "3", "12", "13", "112", "113", "1112", "1113"]
            .iter()
            .map(|v| elem_tv(&w3(v)))
            .collect();
        let mut commute = true;
        for i in 0..family.len() {
            for j in i + 1..family.len() {
                commute &= family[i].compose(&family[j]).expect("alphabet 3")
                    == family[j].compose(&family[i]).expect("alphabet 3");
            }
        }

        let t = elem_t();
        let mut nontorsion = true;
        let mut power = Element::identity(3);
        for _ in 1..=32 {
            power = power.compose(&t).expect("alphabet 3");
            nontorsion &= !power.is_identity();
        }

        let (a, b) = (g2_a(), g2_b());
        let abab = Element::compose_all(2, &[a.clone(), b.clone(), a.clone(), b.clone()])
            .expect("alphabet 2");
        let mut shift = embed_up(&abab) == t;
        let mut rng = SplitMix64::new(0x5eed_0006);
        for _ in 0..100 {
            let word_of = |rng: &mut SplitMix64| -> Element {
                let len = 1 + rng.below(6);
                let mut acc = Element::identity(2);
                for _ in 0..len {
                    let gen = if rng.below(2) == 0 { &a } else { &b };
                    acc = acc.compose(gen).expect("alphabet 2");
                }
                acc
            };
            let u = word_of(&mut rng);
            let v = word_of(&mut rng);
            shift &= embed_up(&u.compose(&v).expect("alphabet 2"))
                == embed_up(&u).compose(&embed_up(&v)).expect("alphabet 3");
        }
        (
            commute && nontorsion && shift,
            format!("commuting={commute} t-powers nontrivial={nontorsion} shift homomorphism={shift}"),
        )
    })
}

/// Level-by-level activity oracle independent of the classifier: evolves the
/// multiset of sections directly through `restrict`.
pub fn oracle_activity(g: &Element, levels: usize) -> Vec<u64> {
    let d = g.alphabet();
    let mut sections: HashMap<Element, u64> = HashMap::new();
    sections.insert(g.clone(), 1);
    let mut out = Vec::with_capacity(levels + 1);
    let mut children_of: HashMap<Element, Vec<Element>> = HashMap::new();
    for _ in 0..=levels {
        let active: u64 = sections
            .iter()
            .filter(|(e, _)| !e.is_identity())
            .map(|(_, k)| *k)
            .sum();
        out.push(active);
        let mut next: HashMap<Element, u64> = HashMap::new();
        for (e, k) in &sections {
            let kids = children_of
                .entry(e.clone())
                .or_insert_with(|| (1..=d).map(|x| e.section(x)).collect());
            for kid in kids.iter() {
                *next.entry(kid.clone()).or_insert(0) += k;
            }
        }
        sections = next;
    }
    out
}

/// Criterion 7: classifier versus the restriction-multiset oracle.
pub fn check_classifier_against_oracle() -> CheckOutcome {
    check(7, "classifier vs level-enumeration oracle (520 samples)", 120_000, || {
        let gens = mother_gens(3).expect("degree 3");
        let mut rng = SplitMix64::new(0x5eed_0007);
        let mut agreements = 0usize;
        for _ in 0..520 {
            let g = Element::compose_all(
                3,
                &[
                    gens[rng.below(gens.len())].clone(),
                    gens[rng.below(gens.len())].clone(),
                    gens[rng.below(gens.len())].clone(),
                ],
            )
            .expect("alphabet 3");
            let cls = classify(&g);
            if !cls.kind.is_bounded() {
                return (false, format!("sample classified unbounded: {}", g.describe()));
            }
            let levels = 2 * g.state_count();
            let oracle_max = oracle_activity(&g, levels).into_iter().max().unwrap_or(0);
            if cls.max_activity != Some(oracle_max) {
                return (
                    false,
                    format!(
                        "activity mismatch: classifier {:?} vs oracle {} for {}",
                        cls.max_activity,
                        oracle_max,
                        g.describe()
                    ),
                );
            }
            agreements += 1;
        }

        let [a, b, c, d] = grigorchuk();
        let fixture_ok = classify(&a).kind == Kind::Finitary
            && classify(&a).finitary_depth == Some(1)
            && [&b, &c, &d].iter().all(|g| {
                let cls = classify(g);
                cls.kind == Kind::Directed && cls.period == Some(3)
            });
        (
            fixture_ok,
            format!("{agreements} samples agree, fixture classifications ok={fixture_ok}"),
        )
    })
}

/// Criterion 8: the embedding compiler on the standard fixtures.
pub fn check_embedding_compiler() -> CheckOutcome {
    check(8, "embedding compiler (Grigorchuk, {c}, {a})", 30_000, || {
        let grig = match embed_pipeline(&grigorchuk()) {
            Ok(r) => r,
            Err(e) => return (false, format!("grigorchuk pipeline failed: {e}")),
        };
        let grig_ok = grig.l == 3 && grig.final_alphabet == 8 && grig.all_passed();
        let grig_recursions = grig
            .certificates
            .iter()
            .filter(|c| c.form == MotherForm::Recursion)
            .count();

        let c_run = match embed_pipeline(&[elem_c()]) {
            Ok(r) => r,
            Err(e) => return (false, format!("{{c}} pipeline failed: {e}")),
        };
        let c_ok = c_run.final_alphabet == 3 && c_run.all_passed();

        let a_run = match embed_pipeline(&[Element::rootwise(
            &Perm::parse("(1 2)", 2).expect("valid"),
        )]) {
            Ok(r) => r,
            Err(e) => return (false, format!("{{a}} pipeline failed: {e}")),
        };
        let a_ok = a_run.all_passed();

        let reverified = grig.reverify().unwrap_or(false)
            && c_run.reverify().unwrap_or(false)
            && a_run.reverify().unwrap_or(false);
        (
            grig_ok && c_ok && a_ok && reverified,
            format!(
                "grigorchuk l={} alphabet={} recursions={} | {{c}} alphabet={} | reverified={}",
                grig.l, grig.final_alphabet, grig_recursions, c_run.final_alphabet, reverified
            ),
        )
    })
}

/// Criterion 9: growth tables and coset separation.
pub fn check_metrics() -> CheckOutcome {
    check(9, "growth tables and coset separation", 120_000, || {
        let g2 = WeightedGenSet::unit(vec![(g2_a(), "a".into()), (g2_b(), "b".into())]);
        let g2_sizes = match ball_growth(&g2, 2, 3, 1_000_000) {
            Ok(t) => t.sizes(),
            Err(e) => return (false, format!("G_2 growth failed: {e}")),
        };
        let g2_ok = g2_sizes == vec![1, 3, 5, 7];

        let g3 = WeightedGenSet::unit(
            mother_gens(3)
                .expect("degree 3")
                .into_iter()
                .enumerate()
                .map(|(i, g)| (g, format!("g{i}")))
                .collect(),
        );
        let g3_sizes = match ball_growth(&g3, 3, 1, 1_000_000) {
            Ok(t) => t.sizes(),
            Err(e) => return (false, format!("G_3 growth failed: {e}")),
        };
        let g3_ok = g3_sizes == vec![1, 77];

        let mut separation = true;
        let level1: Vec<Word> = Word::all_of_length(1, 3);
        let report0 = coset_separation_check(0, &level1, 60_000);
        separation &= report0
            .entries
            .iter()
            .all(|e| matches!(e.verdict, CosetVerdict::Separated { .. }));
        let level2: Vec<Word> = Word::all_of_length(2, 3);
        let report1 = coset_separation_check(1, &level2, 60_000);
        separation &= report1
            .entries
            .iter()
            .all(|e| matches!(e.verdict, CosetVerdict::Separated { .. }));
        (
            g2_ok && g3_ok && separation,
            format!(
                "G_2 balls {:?}, |B_1(G_3)| = {}, coset separation n<=1 ok={}",
                g2_sizes, g3_sizes[1], separation
            ),
        )
    })
}

/// Criterion 10: canonical-form infrastructure invariants on random samples.
pub fn check_infrastructure() -> CheckOutcome {
    check(10, "canonical forms, convention pin, cocycle (1000 samples)", 60_000, || {
        let gens = mother_gens(3).expect("degree 3");
        let mut rng = SplitMix64::new(0x5eed_000a);
        let mut random_elem = |rng: &mut SplitMix64| -> Element {
            let len = 1 + rng.below(3);
            let mut acc = Element::identity(3);
            for _ in 0..len {
                acc = acc.compose(&gens[rng.below(gens.len())]).expect("alphabet 3");
            }
            acc
        };
        for i in 0..1000 {
            let g = random_elem(&mut rng);
            let h = random_elem(&mut rng);

            // canonicalize is idempotent and equality is structural
            if g.canonicalize() != g {
                return (false, format!("canonicalize not idempotent at sample {i}"));
            }
            let structural = g == h;
            let group = g
                .compose(&h.inverse())
                .expect("alphabet 3")
                .is_identity();
            if structural != group {
                return (false, format!("equality disagreement at sample {i}"));
            }

            // action convention and cocycle rule
            let gh = g.compose(&h).expect("alphabet 3");
            let mut word_letters = Vec::new();
            for _ in 0..5 {
                word_letters.push(1 + rng.below(3));
            }
            let w = Word::new(word_letters, 3).expect("letters in range");
            if gh.act(&w) != h.act(&g.act(&w)) {
                return (false, format!("action convention broken at sample {i}"));
            }
            for x in 1..=3usize {
                let lhs = gh.section(x);
                let rhs = g
                    .section(x)
                    .compose(&h.section(g.root().apply(x)))
                    .expect("alphabet 3");
                if lhs != rhs {
                    return (false, format!("cocycle broken at sample {i}, letter {x}"));
                }
            }

            // is_identity agrees with the action oracle
            if i % 50 == 0 {
                let probe = g.compose(&g.inverse()).expect("alphabet 3");
                for candidate in [&g, &probe] {
                    let depth = candidate.state_count();
                    let trivial = Word::all_up_to_length(depth.min(6), 3)
                        .iter()
                        .all(|u| candidate.act(u) == *u);
                    // action triviality up to the state count decides identity
                    let oracle = trivial
                        && Word::all_of_length(depth.min(6), 3)
                            .iter()
                            .all(|u| candidate.restrict(u).root().is_identity());
                    if candidate.is_identity() != oracle && depth <= 6 {
                        return (false, format!("identity oracle disagreement at sample {i}"));
                    }
                }
            }
        }
        (true, "1000 samples, all invariants hold".to_string())
    })
}

/// Runs all ten acceptance criteria in order.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        check_wreath_identity(),
        check_lemma_ladder(),
        check_preimage_solver(),
        check_relation_audit(),
        check_conjugation_bijection(),
        check_infinite_rank_witnesses(),
        check_classifier_against_oracle(),
        check_embedding_compiler(),
        check_metrics(),
        check_infrastructure(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_activity_matches_known_values() {
        let c = elem_c();
        let series = oracle_activity(&c, 5);
        assert_eq!(series, vec![1, 2, 2, 2, 2, 2]);

        let t = elem_t();
        let series = oracle_activity(&t, 4);
        assert_eq!(series[1], 2);
        assert_eq!(series[4], 4);
    }

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..32 {
            assert_eq!(a.next(), b.next());
        }
    }
}
