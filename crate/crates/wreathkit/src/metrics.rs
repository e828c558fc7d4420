//! Word metrics and growth: exact Cayley balls under weighted generating
//! sets, the weighted length on the `t_v` family, and desk-scale coset
//! separation checks.
//!
//! The paper-faithful weights assign `t_v^{±1}` the weight `|v|`, which makes
//! `t` itself cost zero; the zero layer is then the whole infinite cyclic
//! group, so every paper-mode search carries explicit caps (maximum total
//! weight, maximum factor count, node budget) and answers are exact relative
//! to those declared bounds. Proper weights (`|v| + 1`) restore properness
//! and make every finite-radius ball genuinely finite.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::machine::Element;
use crate::mother::elem_tv;
use crate::perms::Word;

#[derive(Debug, Error, Clone)]
pub enum MetricsError {
    #[error("generator \"{0}\" has weight 0; exact balls need positive weights (use weight_ball with explicit caps)")]
    ZeroWeightGenerator(String),
    #[error("node budget {budget} exceeded at radius {radius}")]
    BudgetExceeded {
        budget: u64,
        radius: u32,
        partial: GrowthTable,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WeightMode {
    /// `weight(t_v^{±1}) = |v|`: the length function from the coset
    /// separation argument. Not proper: `t` costs zero.
    Paper,
    /// `weight(t_v^{±1}) = |v| + 1`: proper variant.
    Proper,
}

#[derive(Debug, Clone)]
pub struct WeightedGen {
    pub elem: Element,
    pub weight: u32,
    pub label: String,
}

/// A generating set with weights, closed under inverses with equal weights.
#[derive(Debug, Clone)]
pub struct WeightedGenSet {
    pub gens: Vec<WeightedGen>,
    pub mode: Option<WeightMode>,
}

impl WeightedGenSet {
    /// Unit-weight set from labelled elements; inverses are adjoined when
    /// missing.
    pub fn unit(items: Vec<(Element, String)>) -> WeightedGenSet {
        let mut gens: Vec<WeightedGen> = Vec::new();
        for (elem, label) in items {
            gens.push(WeightedGen {
                elem,
                weight: 1,
                label,
            });
        }
        close_under_inverses(&mut gens);
        WeightedGenSet { gens, mode: None }
    }

    /// The family `t_v^{±1}` for `|v| <= max_depth`, weighted by mode.
    pub fn tv_family(max_depth: usize, mode: WeightMode) -> WeightedGenSet {
        let mut gens = Vec::new();
        for v in Word::all_up_to_length(max_depth, 3) {
            let elem = elem_tv(&v);
            let weight = match mode {
                WeightMode::Paper => v.len() as u32,
                WeightMode::Proper => v.len() as u32 + 1,
            };
            gens.push(WeightedGen {
                elem: elem.clone(),
                weight,
                label: format!("t[{v}]"),
            });
            gens.push(WeightedGen {
                elem: elem.inverse(),
                weight,
                label: format!("t[{v}]^-1"),
            });
        }
        WeightedGenSet {
            gens,
            mode: Some(mode),
        }
    }

    pub fn min_weight(&self) -> u32 {
        self.gens.iter().map(|g| g.weight).min().unwrap_or(1)
    }
}

fn close_under_inverses(gens: &mut Vec<WeightedGen>) {
    let have: Vec<Element> = gens.iter().map(|g| g.elem.clone()).collect();
    let mut extra = Vec::new();
    for g in gens.iter() {
        let inv = g.elem.inverse();
        if !have.contains(&inv) && !extra.iter().any(|e: &WeightedGen| e.elem == inv) {
            extra.push(WeightedGen {
                elem: inv,
                weight: g.weight,
                label: format!("{}^-1", g.label),
            });
        }
    }
    gens.extend(extra);
}

/// Declared search bounds: total weight, factor count, distinct-node budget.
#[derive(Debug, Clone, Copy)]
pub struct SearchCaps {
    pub max_weight: u32,
    pub max_factors: usize,
    pub budget: u64,
}

/// The enumerated ball: minimal weight per element over all products of at
/// most `max_factors` generators with total weight at most `max_weight`.
#[derive(Debug, Clone)]
pub struct WeightBall {
    pub dist: HashMap<Element, u32>,
    /// True when the node budget stopped the enumeration early.
    pub saturated: bool,
}

/// Bounded relaxation sweep: each round extends every improved element by
/// every generator, keeping the best known weight. Deterministic regardless
/// of map iteration order because relaxation is order-independent.
pub fn weight_ball(gens: &WeightedGenSet, alphabet: usize, caps: &SearchCaps) -> WeightBall {
    let mut dist: HashMap<Element, u32> = HashMap::new();
    dist.insert(Element::identity(alphabet), 0);
    let mut frontier: Vec<Element> = vec![Element::identity(alphabet)];
    let mut saturated = false;
    for _ in 0..caps.max_factors {
        let mut improved: Vec<Element> = Vec::new();
        for h in &frontier {
            let base = dist[h];
            for g in &gens.gens {
                let w = base.saturating_add(g.weight);
                if w > caps.max_weight {
                    continue;
                }
                if dist.len() as u64 >= caps.budget {
                    saturated = true;
                }
                let hg = h.compose(&g.elem).expect("alphabets agree");
                match dist.get(&hg) {
                    Some(&old) if old <= w => {}
                    _ => {
                        if !dist.contains_key(&hg) && saturated {
                            continue;
                        }
                        dist.insert(hg.clone(), w);
                        improved.push(hg);
                    }
                }
            }
        }
        if improved.is_empty() {
            break;
        }
        frontier = improved;
    }
    WeightBall { dist, saturated }
}

/// Cumulative ball sizes per radius.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub radius: u32,
    pub ball_size: u64,
}

impl GrowthTable {
    fn from_dist(dist: &HashMap<Element, u32>, radius: u32) -> GrowthTable {
        let rows = (0..=radius)
            .map(|r| GrowthRow {
                radius: r,
                ball_size: dist.values().filter(|&&w| w <= r).count() as u64,
            })
            .collect();
        GrowthTable { rows }
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.ball_size).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,ball_size\n");
        for row in &self.rows {
            out.push_str(&format!("{},{}\n", row.radius, row.ball_size));
        }
        out
    }
}

pub const DEFAULT_BALL_BUDGET: u64 = 10_000_000;

/// Exact ball sizes `|B(r)|` for `r <= radius` under a positively weighted
/// generating set.
pub fn ball_growth(
    gens: &WeightedGenSet,
    alphabet: usize,
    radius: u32,
    budget: u64,
) -> Result<GrowthTable, MetricsError> {
    if let Some(zero) = gens.gens.iter().find(|g| g.weight == 0) {
        return Err(MetricsError::ZeroWeightGenerator(zero.label.clone()));
    }
    // with min weight >= 1, products of more than `radius` factors exceed it
    let caps = SearchCaps {
        max_weight: radius,
        max_factors: radius as usize,
        budget,
    };
    let ball = weight_ball(gens, alphabet, &caps);
    let table = GrowthTable::from_dist(&ball.dist, radius);
    if ball.saturated {
        return Err(MetricsError::BudgetExceeded {
            budget,
            radius,
            partial: table,
        });
    }
    Ok(table)
}

/// Result of a length computation, exact relative to the declared caps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LengthResult {
    Found { weight: u32, saturated: bool },
    NotReached { saturated: bool },
}

/// Minimal total weight expressing `g` over `{t_v^{±1} : |v| <= max_gen_depth}`
/// within the caps.
pub fn t_length(
    g: &Element,
    max_gen_depth: usize,
    mode: WeightMode,
    caps: &SearchCaps,
) -> LengthResult {
    let gens = WeightedGenSet::tv_family(max_gen_depth, mode);
    let ball = weight_ball(&gens, 3, caps);
    match ball.dist.get(g) {
        Some(&w) => LengthResult::Found {
            weight: w,
            saturated: ball.saturated,
        },
        None => LengthResult::NotReached {
            saturated: ball.saturated,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CosetVerdict {
    /// `|w| <= n`, so `t_w` generates inside the subgroup; nothing to check.
    InSubgroup,
    /// No enumerated product of weight <= n equals `t_w`.
    Separated { enumerated: u64, saturated: bool },
    /// A product of weight <= n hit `t_w` (would falsify the separation).
    NotSeparated { weight: u32 },
}

#[derive(Debug, Clone, Serialize)]
pub struct CosetEntry {
    pub word: String,
    pub verdict: CosetVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct CosetReport {
    pub n: usize,
    pub entries: Vec<CosetEntry>,
}

impl CosetReport {
    pub fn all_separated(&self) -> bool {
        self.entries
            .iter()
            .all(|e| !matches!(e.verdict, CosetVerdict::NotSeparated { .. }))
    }
}

pub const DEFAULT_COSET_FACTORS: usize = 12;

/// Checks that sampled words of length `n + 1` are separated from the
/// level-`n` subgroup: no product of paper-weight at most `n` equals `t_w`.
/// Exhaustive over products of at most [`DEFAULT_COSET_FACTORS`] generators
/// within the node budget.
pub fn coset_separation_check(n: usize, samples: &[Word], budget: u64) -> CosetReport {
    let gens = WeightedGenSet::tv_family(n + 1, WeightMode::Paper);
    let caps = SearchCaps {
        max_weight: n as u32,
        max_factors: DEFAULT_COSET_FACTORS,
        budget,
    };
    let ball = weight_ball(&gens, 3, &caps);
    let entries = samples
        .iter()
        .map(|w| {
            let verdict = if w.len() <= n {
                CosetVerdict::InSubgroup
            } else {
                match ball.dist.get(&elem_tv(w)) {
                    Some(&weight) => CosetVerdict::NotSeparated { weight },
                    None => CosetVerdict::Separated {
                        enumerated: ball.dist.len() as u64,
                        saturated: ball.saturated,
                    },
                }
            };
            CosetEntry {
                word: w.to_string(),
                verdict,
            }
        })
        .collect();
    CosetReport { n, entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{g2_a, g2_b};
    use crate::mother::{elem_t, mother_gens};

    fn w3(text: &str) -> Word {
        Word::parse(text, 3).unwrap()
    }

    fn g2_gens() -> WeightedGenSet {
        WeightedGenSet::unit(vec![(g2_a(), "a".into()), (g2_b(), "b".into())])
    }

    #[test]
    fn g2_ball_sizes_grow_linearly() {
        let table = ball_growth(&g2_gens(), 2, 3, 100_000).unwrap();
        assert_eq!(table.sizes(), vec![1, 3, 5, 7]);
    }

    #[test]
    fn g3_first_ball_is_the_generating_set() {
        let gens = WeightedGenSet::unit(
            mother_gens(3)
                .unwrap()
                .into_iter()
                .enumerate()
                .map(|(i, g)| (g, format!("g{i}")))
                .collect(),
        );
        let table = ball_growth(&gens, 3, 1, 1_000_000).unwrap();
        assert_eq!(table.sizes(), vec![1, 77]);
    }

    #[test]
    fn radius_zero_ball_is_trivial() {
        let table = ball_growth(&g2_gens(), 2, 0, 100).unwrap();
        assert_eq!(table.sizes(), vec![1]);
    }

    #[test]
    fn ball_growth_rejects_zero_weights() {
        let gens = WeightedGenSet::tv_family(1, WeightMode::Paper);
        assert!(matches!(
            ball_growth(&gens, 3, 2, 1_000),
            Err(MetricsError::ZeroWeightGenerator(_))
        ));
    }

    #[test]
    fn ball_growth_budget_reports_partial() {
        match ball_growth(&g2_gens(), 2, 6, 5) {
            Err(MetricsError::BudgetExceeded { partial, .. }) => {
                assert!(!partial.rows.is_empty());
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn ball_sizes_independent_of_generator_order() {
        let mut reversed = g2_gens();
        reversed.gens.reverse();
        let a = ball_growth(&g2_gens(), 2, 3, 100_000).unwrap();
        let b = ball_growth(&reversed, 2, 3, 100_000).unwrap();
        assert_eq!(a.sizes(), b.sizes());
    }

    #[test]
    fn csv_shape() {
        let table = ball_growth(&g2_gens(), 2, 2, 100_000).unwrap();
        assert_eq!(table.to_csv(), "radius,ball_size\n0,1\n1,3\n2,5\n");
    }

    #[test]
    fn t_length_examples() {
        let caps = SearchCaps {
            max_weight: 2,
            max_factors: 6,
            budget: 200_000,
        };
        assert_eq!(
            t_length(&Element::identity(3), 2, WeightMode::Paper, &caps),
            LengthResult::Found {
                weight: 0,
                saturated: false
            }
        );
        // t costs nothing under the paper weights
        match t_length(&elem_t(), 2, WeightMode::Paper, &caps) {
            LengthResult::Found { weight: 0, .. } => {}
            other => panic!("expected weight 0, got {other:?}"),
        }
        // t_22 is reached at weight 2 and nothing cheaper produces it
        match t_length(&elem_tv(&w3("22")), 2, WeightMode::Paper, &caps) {
            LengthResult::Found { weight: 2, .. } => {}
            other => panic!("expected weight 2, got {other:?}"),
        }
    }

    #[test]
    fn t_length_symmetry_and_triangle() {
        let caps = SearchCaps {
            max_weight: 3,
            max_factors: 5,
            budget: 100_000,
        };
        let samples = [w3("2"), w3("22"), w3("13")];
        for v in &samples {
            let g = elem_tv(v);
            let lg = t_length(&g, 2, WeightMode::Proper, &caps);
            let linv = t_length(&g.inverse(), 2, WeightMode::Proper, &caps);
            assert_eq!(lg, linv);
            // generators are bounded by their declared weight
            if let LengthResult::Found { weight, .. } = lg {
                assert!(weight <= v.len() as u32 + 1);
            } else {
                panic!("generator not reached");
            }
        }
    }

    #[test]
    fn paper_zero_layer_is_powers_of_t() {
        let gens = WeightedGenSet::tv_family(1, WeightMode::Paper);
        let caps = SearchCaps {
            max_weight: 0,
            max_factors: 5,
            budget: 10_000,
        };
        let ball = weight_ball(&gens, 3, &caps);
        let t = elem_t();
        let expected: Vec<Element> = (-5i64..=5).map(|k| t.pow(k)).collect();
        assert_eq!(ball.dist.len(), expected.len());
        for e in expected {
            assert!(ball.dist.contains_key(&e));
        }
    }

    #[test]
    fn proper_mode_balls_are_finite_and_complete() {
        let gens = WeightedGenSet::tv_family(2, WeightMode::Proper);
        let caps = SearchCaps {
            max_weight: 2,
            max_factors: 2,
            budget: 1_000_000,
        };
        let ball = weight_ball(&gens, 3, &caps);
        assert!(!ball.saturated);
        // radius-1 layer: identity plus t^{±1}
        let within_1 = ball.dist.values().filter(|&&w| w <= 1).count();
        assert_eq!(within_1, 3);
    }

    #[test]
    fn coset_separation_examples() {
        let report = coset_separation_check(1, &[w3("22"), w3("2")], 30_000);
        assert_eq!(report.entries.len(), 2);
        assert!(matches!(
            report.entries[0].verdict,
            CosetVerdict::Separated { .. }
        ));
        assert_eq!(report.entries[1].verdict, CosetVerdict::InSubgroup);
        assert!(report.all_separated());

        let report = coset_separation_check(0, &[w3("2")], 20_000);
        assert!(matches!(
            report.entries[0].verdict,
            CosetVerdict::Separated { .. }
        ));
    }

    #[test]
    fn unit_sets_close_under_inverses() {
        let gens = WeightedGenSet::unit(vec![(
            Element::rootwise(&crate::perms::Perm::parse("(1 2 3)", 3).unwrap()),
            "r".into(),
        )]);
        assert_eq!(gens.gens.len(), 2);
        let table = ball_growth(&gens, 3, 1, 100).unwrap();
        assert_eq!(table.sizes(), vec![1, 3]);
    }
}
