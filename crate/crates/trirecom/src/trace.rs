//! Step sequences, their independent verification and compression.

use crate::moves::{recom_valid, shared_district, RecomStep};
use crate::partition::{classify, BalanceClass, District, Partition};
use crate::toolkit::LogEntry;
use thiserror::Error;

/// A sequence of recombination steps starting at `source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub source: Partition,
    pub steps: Vec<RecomStep>,
    /// Which procedure produced each step.
    pub annotations: Vec<String>,
    /// Set only by [`Trace::verify`] after a successful check.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("source partition is not in the state space")]
    BadSource,
    #[error("step {index}: {reason}")]
    Step { index: usize, reason: String },
}

/// Result of re-checking a trace from scratch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub steps: usize,
    pub last: Partition,
}

impl Trace {
    pub fn empty(source: Partition) -> Self {
        Trace { source, steps: Vec::new(), annotations: Vec::new(), verified: false }
    }

    pub(crate) fn from_log(source: Partition, log: Vec<LogEntry>) -> Self {
        let mut t = Trace::empty(source);
        for e in log {
            t.steps.push(RecomStep { untouched: e.untouched, after: e.after });
            t.annotations.push(e.note.to_string());
        }
        t
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The final partition, without validation.
    pub fn last(&self) -> Partition {
        match self.steps.last() {
            Some(s) => self.source.with_labels(s.after.clone()),
            None => self.source.clone(),
        }
    }

    pub fn push(&mut self, step: RecomStep, note: impl Into<String>) {
        self.steps.push(step);
        self.annotations.push(note.into());
        self.verified = false;
    }

    /// Append `other`, which must start where this trace ends.
    pub fn extend(&mut self, other: Trace) {
        debug_assert_eq!(self.last().labels(), other.source.labels());
        self.steps.extend(other.steps);
        self.annotations.extend(other.annotations);
        self.verified = false;
    }

    /// The same walk traversed backwards.
    pub fn reversed(&self) -> Trace {
        let mut states: Vec<Vec<District>> = vec![self.source.labels().to_vec()];
        states.extend(self.steps.iter().map(|s| s.after.clone()));
        let mut out = Trace::empty(self.last());
        for j in (0..self.steps.len()).rev() {
            out.push(
                RecomStep { untouched: self.steps[j].untouched, after: states[j].clone() },
                self.annotations[j].clone(),
            );
        }
        out
    }

    /// Re-check every step independently and mark the trace verified.
    pub fn verify(&mut self) -> Result<VerifyReport, VerifyError> {
        let report = verify_trace(&self.source, &self.steps)?;
        self.verified = true;
        Ok(report)
    }

    /// Merge maximal runs of consecutive steps that keep the same district
    /// fixed into single steps, dropping runs that return to their start.
    pub fn compressed(&self) -> Trace {
        let mut out = Trace::empty(self.source.clone());
        let mut current = self.source.labels().to_vec();
        let mut j = 0;
        while j < self.steps.len() {
            let keep = self.steps[j].untouched;
            let mut end = j;
            while end + 1 < self.steps.len() && self.steps[end + 1].untouched == keep {
                end += 1;
            }
            let after = self.steps[end].after.clone();
            if after != current {
                let mut notes: Vec<&str> = Vec::new();
                for a in &self.annotations[j..=end] {
                    if !notes.contains(&a.as_str()) {
                        notes.push(a);
                    }
                }
                out.push(RecomStep { untouched: keep, after: after.clone() }, notes.join("+"));
                current = after;
            }
            j = end + 1;
        }
        out
    }
}

/// Check `steps` from `source` using only the public move semantics.
pub fn verify_trace(source: &Partition, steps: &[RecomStep]) -> Result<VerifyReport, VerifyError> {
    if classify(source).0 == BalanceClass::OutsideOmega {
        return Err(VerifyError::BadSource);
    }
    let mut current = source.clone();
    for (index, step) in steps.iter().enumerate() {
        let fail = |reason: String| VerifyError::Step { index, reason };
        if step.after.len() != current.labels().len() {
            return Err(fail(format!("assignment has length {}", step.after.len())));
        }
        if step.after.iter().any(|&l| !(1..=3).contains(&l)) {
            return Err(fail("label outside 1..=3".into()));
        }
        let next = current.with_labels(step.after.clone());
        if !recom_valid(&current, &next) {
            let class = classify(&next).0;
            let reason = if class == BalanceClass::OutsideOmega {
                "result is not in the state space".to_string()
            } else if current.labels() == next.labels() {
                "step changes nothing".to_string()
            } else {
                "no district is kept fixed".to_string()
            };
            return Err(fail(reason));
        }
        let kept = current.labels().iter().zip(next.labels()).all(|(&a, &b)| (a == step.untouched) == (b == step.untouched));
        if !kept {
            let actual = shared_district(&current, &next).unwrap_or(0);
            return Err(fail(format!("declared untouched district {} changed (kept: {actual})", step.untouched)));
        }
        current = next;
    }
    Ok(VerifyReport { steps: steps.len(), last: current })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TriRegion;
    use crate::partition::{ground_state, SizeTargets};
    use std::sync::Arc;

    fn ground(perm: [District; 3]) -> Partition {
        ground_state(Arc::new(TriRegion::new(5).unwrap()), SizeTargets::new(5, 5, 5), perm).unwrap()
    }

    /// 123 -> 213 -> 231 -> 321.
    fn three_swaps() -> Trace {
        let mut t = Trace::empty(ground([1, 2, 3]));
        t.push(RecomStep { untouched: 3, after: ground([2, 1, 3]).labels().to_vec() }, "a");
        t.push(RecomStep { untouched: 2, after: ground([2, 3, 1]).labels().to_vec() }, "b");
        t.push(RecomStep { untouched: 1, after: ground([3, 2, 1]).labels().to_vec() }, "c");
        t
    }

    #[test]
    fn valid_trace_verifies() {
        let mut t = three_swaps();
        let report = t.verify().unwrap();
        assert_eq!(report.steps, 3);
        assert_eq!(report.last, ground([3, 2, 1]));
        assert!(t.verified);
        assert!(Trace::empty(ground([1, 2, 3])).verify().is_ok());
    }

    #[test]
    fn corrupted_step_fails_at_its_index() {
        let mut t = three_swaps();
        t.steps[1].untouched = 3;
        match t.verify() {
            Err(VerifyError::Step { index, reason }) => {
                assert_eq!(index, 1);
                assert!(reason.contains("untouched"), "{reason}");
            }
            other => panic!("{other:?}"),
        }
        let mut t = three_swaps();
        t.steps[2].after[0] = 9;
        assert!(matches!(t.verify(), Err(VerifyError::Step { index: 2, .. })));
        let mut t = three_swaps();
        t.steps[0].after = t.source.labels().to_vec();
        assert!(matches!(t.verify(), Err(VerifyError::Step { index: 0, .. })));
    }

    #[test]
    fn reversal_runs_back_to_the_source() {
        let t = three_swaps();
        let mut back = t.reversed();
        assert_eq!(back.source, t.last());
        assert_eq!(back.verify().unwrap().last, t.source);
        assert_eq!(back.annotations, vec!["c", "b", "a"]);
    }

    #[test]
    fn compression_merges_runs_and_drops_round_trips() {
        let mut t = three_swaps();
        // Out and back keeping district 1, then the same again.
        let there = ground([1, 3, 2]).labels().to_vec();
        let home = t.source.labels().to_vec();
        let mut u = Trace::empty(t.source.clone());
        u.push(RecomStep { untouched: 1, after: there.clone() }, "x");
        u.push(RecomStep { untouched: 1, after: home }, "y");
        u.extend(t.clone());
        let mut c = u.compressed();
        assert_eq!(c.len(), 3);
        assert_eq!(c.verify().unwrap().last, t.verify().unwrap().last);
        // Two consecutive steps keeping district 1 become one.
        let mut v = Trace::empty(t.source.clone());
        v.push(RecomStep { untouched: 1, after: there }, "x");
        v.push(RecomStep { untouched: 1, after: t.source.labels().to_vec() }, "y");
        v.push(RecomStep { untouched: 1, after: ground([1, 3, 2]).labels().to_vec() }, "z");
        let mut c = v.compressed();
        assert_eq!(c.len(), 1);
        assert_eq!(c.annotations[0], "x+y+z");
        assert!(c.verify().is_ok());
    }

    #[test]
    fn source_outside_the_state_space_is_rejected() {
        let good = ground([1, 2, 3]);
        let mut labels = good.labels().to_vec();
        labels.swap(0, 14);
        let bad = good.with_labels(labels);
        assert_eq!(verify_trace(&bad, &[]), Err(VerifyError::BadSource));
    }
}
