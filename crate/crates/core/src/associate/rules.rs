use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{AssocError, Itemset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub antecedent: Vec<String>,
    pub consequent: Vec<String>,
    /// Support of antecedent ∪ consequent.
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

const CONFIDENCE_EPS: f64 = 1e-12;

/// Every rule `A -> B` with `A ∪ B` frequent, `A`, `B` non-empty and
/// disjoint, and confidence at least `min_confidence`.
///
/// Sorted by confidence, then support (both descending), then antecedent
/// and consequent. The itemsets must be downward closed, as produced by
/// [`super::mine_itemsets`].
pub fn derive_rules(itemsets: &[Itemset], min_confidence: f64) -> Result<Vec<Rule>, AssocError> {
    if !(min_confidence > 0.0 && min_confidence <= 1.0) {
        return Err(AssocError::InvalidConfidence(min_confidence));
    }
    let support: HashMap<&[String], f64> = itemsets.iter().map(|s| (s.items.as_slice(), s.support)).collect();

    for set in itemsets {
        if set.items.is_empty() || set.items.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AssocError::MalformedInput(format!(
                "itemset {:?} is empty or not sorted",
                set.items
            )));
        }
        if set.items.len() >= 64 {
            return Err(AssocError::MalformedInput(format!(
                "itemset of {} items is too large",
                set.items.len()
            )));
        }
        if set.items.len() > 1 {
            for skip in 0..set.items.len() {
                let subset = without(&set.items, skip);
                if !support.contains_key(subset.as_slice()) {
                    return Err(AssocError::MalformedInput(format!(
                        "subset {subset:?} of {:?} is missing",
                        set.items
                    )));
                }
            }
        }
    }

    let mut rules = Vec::new();
    for set in itemsets.iter().filter(|s| s.items.len() > 1) {
        let k = set.items.len();
        for mask in 1..(1u64 << k) - 1 {
            let (antecedent, consequent): (Vec<_>, Vec<_>) =
                set.items.iter().enumerate().partition(|(i, _)| mask & (1 << i) != 0);
            let antecedent: Vec<String> = antecedent.into_iter().map(|(_, t)| t.clone()).collect();
            let consequent: Vec<String> = consequent.into_iter().map(|(_, t)| t.clone()).collect();
            let confidence = set.support / support[antecedent.as_slice()];
            if confidence < min_confidence - CONFIDENCE_EPS {
                continue;
            }
            let lift = confidence / support[consequent.as_slice()];
            rules.push(Rule {
                antecedent,
                consequent,
                support: set.support,
                confidence,
                lift,
            });
        }
    }
    rules.sort_by(|a, b| {
        b.confidence
            .total_cmp(&a.confidence)
            .then_with(|| b.support.total_cmp(&a.support))
            .then_with(|| a.antecedent.cmp(&b.antecedent))
            .then_with(|| a.consequent.cmp(&b.consequent))
    });
    Ok(rules)
}

fn without(items: &[String], skip: usize) -> Vec<String> {
    items
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(_, t)| t.clone())
        .collect()
}

/// Writes `antecedent,consequent,support,confidence,lift`; item sets are
/// joined with `;` and numbers printed with four decimals.
pub fn write_rules_csv<W: Write>(rules: &[Rule], out: W) -> Result<(), AssocError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["antecedent", "consequent", "support", "confidence", "lift"])?;
    for r in rules {
        w.write_record([
            r.antecedent.join(";"),
            r.consequent.join(";"),
            format!("{:.4}", r.support),
            format!("{:.4}", r.confidence),
            format!("{:.4}", r.lift),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str], count: usize, n: usize) -> Itemset {
        Itemset {
            items: items.iter().map(|s| s.to_string()).collect(),
            count,
            support: count as f64 / n as f64,
        }
    }

    fn fixture_sets() -> Vec<Itemset> {
        vec![
            set(&["bank"], 3, 4),
            set(&["robbery"], 2, 4),
            set(&["bank", "robbery"], 2, 4),
        ]
    }

    #[test]
    fn fixture_rules() {
        let rules = derive_rules(&fixture_sets(), 0.6).unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(
            (rules[0].antecedent.as_slice(), rules[0].consequent.as_slice()),
            (&["robbery".to_string()][..], &["bank".to_string()][..])
        );
        assert_eq!(rules[0].confidence, 1.0);
        assert!((rules[0].lift - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(rules[1].antecedent, ["bank"]);
        assert!((rules[1].confidence - 2.0 / 3.0).abs() < 1e-12);
        assert!((rules[1].lift - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn full_confidence_only() {
        let rules = derive_rules(&fixture_sets(), 1.0).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].antecedent, ["robbery"]);
    }

    #[test]
    fn singletons_give_no_rules() {
        assert!(derive_rules(&fixture_sets()[..2], 0.1).unwrap().is_empty());
    }

    #[test]
    fn missing_subset_is_malformed() {
        let sets = vec![set(&["bank"], 3, 4), set(&["bank", "robbery"], 2, 4)];
        assert!(matches!(derive_rules(&sets, 0.5), Err(AssocError::MalformedInput(_))));
    }

    #[test]
    fn invalid_confidence() {
        assert!(matches!(
            derive_rules(&fixture_sets(), 0.0),
            Err(AssocError::InvalidConfidence(_))
        ));
    }

    #[test]
    fn three_item_rules_enumerate_all_splits() {
        let sets = vec![
            set(&["a"], 2, 2),
            set(&["b"], 2, 2),
            set(&["c"], 2, 2),
            set(&["a", "b"], 2, 2),
            set(&["a", "c"], 2, 2),
            set(&["b", "c"], 2, 2),
            set(&["a", "b", "c"], 2, 2),
        ];
        // 3 pairs × 2 directions + 6 splits of the triple.
        assert_eq!(derive_rules(&sets, 1.0).unwrap().len(), 12);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_rules_csv(&derive_rules(&fixture_sets(), 0.6).unwrap(), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "antecedent,consequent,support,confidence,lift\nrobbery,bank,0.5000,1.0000,1.3333\nbank,robbery,0.5000,0.6667,1.3333\n"
        );
    }
}
