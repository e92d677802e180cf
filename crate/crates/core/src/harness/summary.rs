use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ckks::Mode;
use crate::fault::{Stage, Target};
use crate::metrics::Category;

use super::record::TrialRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupKey {
    pub mode: Mode,
    pub ring_degree: usize,
    pub q0_bits: u32,
    pub limbs: usize,
    pub delta_log2: u32,
    pub slots: usize,
    pub stage: Stage,
    pub target: Target,
}

/// Per-residue bit profile across all seeds of a group.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitProfile {
    /// Bits whose flips were robust for every seed pair.
    pub robust_bits: u32,
    /// Lowest bit with a non-robust flip.
    pub onset: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupSummary {
    pub key: GroupKey,
    pub trials: usize,
    pub wrapped: usize,
    counts: [usize; 3],
    /// Keyed by `(limb, coeff)`.
    pub residues: BTreeMap<(usize, usize), BitProfile>,
}

impl GroupSummary {
    pub fn count(&self, c: Category) -> usize {
        self.counts[c as usize]
    }

    pub fn percent(&self, c: Category) -> f64 {
        100.0 * self.count(c) as f64 / self.trials.max(1) as f64
    }

    /// Mean robust-bit count over the residues whose index satisfies `keep`.
    pub fn mean_robust_bits<F: Fn(usize, usize) -> bool>(&self, keep: F) -> Option<f64> {
        let sel: Vec<u32> = self
            .residues
            .iter()
            .filter(|((l, c), _)| keep(*l, *c))
            .map(|(_, p)| p.robust_bits)
            .collect();
        (!sel.is_empty()).then(|| sel.iter().map(|&b| f64::from(b)).sum::<f64>() / sel.len() as f64)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub groups: Vec<GroupSummary>,
    pub golden_rows: usize,
}

impl Summary {
    pub fn get(&self, stage: Stage, target: Target) -> Option<&GroupSummary> {
        self.groups
            .iter()
            .find(|g| g.key.stage == stage && g.key.target == target)
    }
}

pub fn summarize(records: &[TrialRecord]) -> Summary {
    #[derive(Default)]
    struct Acc {
        trials: usize,
        wrapped: usize,
        counts: [usize; 3],
        // (limb, coeff, bit) -> every seed robust
        bits: BTreeMap<(usize, usize, u32), bool>,
    }
    let mut groups: BTreeMap<GroupKey, Acc> = BTreeMap::new();
    let mut golden_rows = 0;
    for r in records {
        let Some(f) = r.fault else {
            golden_rows += 1;
            continue;
        };
        let key = GroupKey {
            mode: r.mode,
            ring_degree: r.ring_degree,
            q0_bits: r.q0_bits,
            limbs: r.limbs,
            delta_log2: r.delta_log2,
            slots: r.slots,
            stage: f.stage,
            target: f.target,
        };
        let acc = groups.entry(key).or_default();
        acc.trials += 1;
        acc.wrapped += usize::from(r.wrapped);
        acc.counts[r.metrics.category as usize] += 1;
        let robust = r.metrics.category == Category::Robust;
        *acc.bits.entry((f.limb, f.coeff, f.bit)).or_insert(true) &= robust;
    }
    let groups = groups
        .into_iter()
        .map(|(key, acc)| {
            let mut residues: BTreeMap<(usize, usize), BitProfile> = BTreeMap::new();
            for ((limb, coeff, bit), robust) in acc.bits {
                let p = residues.entry((limb, coeff)).or_default();
                if robust {
                    p.robust_bits += 1;
                } else if p.onset.is_none() {
                    p.onset = Some(bit);
                }
            }
            GroupSummary {
                key,
                trials: acc.trials,
                wrapped: acc.wrapped,
                counts: acc.counts,
                residues,
            }
        })
        .collect();
    Summary { groups, golden_rows }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<8} {:>6} {:>4} {:>2} {:>5} {:>5} {:<13} {:<6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>11}",
            "mode", "N", "q0", "L", "dlog", "slots", "stage", "target", "trials", "robust%",
            "app%", "catast%", "rbits", "onset"
        )?;
        for g in &self.groups {
            let k = &g.key;
            let onsets: BTreeSet<u32> = g.residues.values().filter_map(|p| p.onset).collect();
            let onset = match (onsets.first(), onsets.last()) {
                (Some(a), Some(b)) if a == b => a.to_string(),
                (Some(a), Some(b)) => format!("{a}..{b}"),
                _ => "-".to_string(),
            };
            let rbits = g
                .mean_robust_bits(|_, _| true)
                .map_or("-".to_string(), |b| format!("{b:.1}"));
            writeln!(
                f,
                "{:<8} {:>6} {:>4} {:>2} {:>5} {:>5} {:<13} {:<6} {:>8} {:>8.2} {:>8.2} {:>8.2} {:>8} {:>11}",
                k.mode.as_str(),
                k.ring_degree,
                k.q0_bits,
                k.limbs,
                k.delta_log2,
                k.slots,
                k.stage.as_str(),
                k.target.as_str(),
                g.trials,
                g.percent(Category::Robust),
                g.percent(Category::ApplicationDependent),
                g.percent(Category::Catastrophic),
                rbits,
                onset,
            )?;
        }
        write!(f, "golden rows: {}", self.golden_rows)
    }
}
