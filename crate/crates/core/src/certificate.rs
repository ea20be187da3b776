//! Machine-checkable verdicts.
//!
//! A certificate carries an exact transcript of the quantities behind its
//! verdict. [`Certificate::check`] re-verifies the internal arithmetic of a
//! transcript without access to the weight family; full recomputation lives
//! in [`crate::diagnose::replay`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::Exact;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CertificateKind {
    ExactBound,
    Divergence,
    FiniteMembership,
    UnboundednessWitness,
}

impl fmt::Display for CertificateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CertificateKind::ExactBound => "ExactBound",
            CertificateKind::Divergence => "Divergence",
            CertificateKind::FiniteMembership => "FiniteMembership",
            CertificateKind::UnboundednessWitness => "UnboundednessWitness",
        };
        f.write_str(s)
    }
}

/// Whether a verdict covers every vertex or only the probed window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Guarantee {
    Exact,
    WindowOnly,
}

impl fmt::Display for Guarantee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Guarantee::Exact => "exact",
            Guarantee::WindowOnly => "window-only",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertInputs {
    /// Which check produced the certificate (`consistency`, `hyponormal`, ...).
    pub property: String,
    /// Construction spec string, or `custom` for user-supplied families.
    pub spec: String,
    pub address: String,
    pub threshold: Option<Exact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub label: String,
    pub value: Exact,
}

impl TranscriptLine {
    pub fn new(label: impl Into<String>, value: Exact) -> Self {
        TranscriptLine {
            label: label.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub inputs: CertInputs,
    pub transcript: Vec<TranscriptLine>,
    pub verdict: bool,
    pub guarantee: Guarantee,
}

/// A transcript line that fails re-verification. `line` is 1-based; `0`
/// refers to the certificate as a whole.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("transcript line {line}: {reason}")]
pub struct TranscriptError {
    pub line: usize,
    pub reason: String,
}

fn fail<T>(line: usize, reason: impl Into<String>) -> Result<T, TranscriptError> {
    Err(TranscriptError {
        line,
        reason: reason.into(),
    })
}

/// Parses the integer in a `key=N` label suffix.
pub fn label_param(label: &str, key: &str) -> Option<u64> {
    label
        .split_whitespace()
        .find_map(|t| t.strip_prefix(key)?.strip_prefix('='))
        .and_then(|v| v.parse().ok())
}

impl Certificate {
    /// The entry of the transcript with the given label, with its 1-based line.
    pub fn line(&self, label: &str) -> Option<(usize, &Exact)> {
        self.transcript
            .iter()
            .enumerate()
            .find(|(_, l)| l.label == label)
            .map(|(i, l)| (i + 1, &l.value))
    }

    fn lines_with_prefix<'a>(
        &'a self,
        prefix: &'a str,
    ) -> impl Iterator<Item = (usize, &'a TranscriptLine)> + 'a {
        self.transcript
            .iter()
            .enumerate()
            .filter(move |(_, l)| l.label.starts_with(prefix))
            .map(|(i, l)| (i + 1, l))
    }

    /// Re-verifies the arithmetic relations a transcript of this kind must
    /// satisfy.
    pub fn check(&self) -> Result<(), TranscriptError> {
        match self.kind {
            CertificateKind::Divergence => self.check_divergence(),
            CertificateKind::ExactBound => self.check_bound(),
            CertificateKind::FiniteMembership => self.check_membership(),
            CertificateKind::UnboundednessWitness => self.check_witness(),
        }
    }

    fn check_divergence(&self) -> Result<(), TranscriptError> {
        let Some(threshold) = &self.inputs.threshold else {
            return fail(0, "divergence certificate without threshold");
        };
        let mut last: Option<(u64, &Exact)> = None;
        let mut count = 0;
        for (line, l) in self.lines_with_prefix("partial") {
            let Some(m) = label_param(&l.label, "m") else {
                return fail(line, format!("malformed label `{}`", l.label));
            };
            if let Some((pm, pv)) = last {
                if m <= pm {
                    return fail(line, "term counts not increasing");
                }
                if l.value <= *pv {
                    return fail(line, "partial sums not strictly increasing");
                }
            } else if !l.value.is_positive() {
                return fail(line, "first partial sum not positive");
            }
            last = Some((m, &l.value));
            count += 1;
        }
        let Some((_, final_sum)) = last else {
            return fail(0, "no partial sums");
        };
        let reached = final_sum >= threshold;
        if reached != self.verdict {
            let line = self
                .lines_with_prefix("partial")
                .last()
                .map(|(i, _)| i)
                .unwrap_or(0);
            return fail(
                line,
                format!("verdict {} but final partial sum vs threshold says {reached}", self.verdict),
            );
        }
        debug_assert!(count > 0);
        Ok(())
    }

    fn check_sums(&self) -> Result<(), TranscriptError> {
        let terms: Vec<_> = self.lines_with_prefix("term").collect();
        let prefix = self.lines_with_prefix("prefix").next();
        if let (Some((line, p)), false) = (prefix, terms.is_empty()) {
            let sum: Exact = terms.iter().map(|(_, l)| &l.value).sum();
            if sum != p.value {
                return fail(line, "prefix differs from the sum of its terms");
            }
            if label_param(&p.label, "m") != Some(terms.len() as u64) {
                return fail(line, "prefix length differs from the number of terms");
            }
        }
        let tail = self.lines_with_prefix("tail").next();
        let split = match (prefix, tail) {
            (Some((_, p)), Some((_, t))) => Some(&p.value + &t.value),
            _ => None,
        };
        if let Some((line, s)) = self.line("sum") {
            if let Some(split) = &split {
                if split != s {
                    return fail(line, "sum differs from prefix + tail");
                }
            }
            if let (Some((_, lam)), Some((tl, total))) = (self.line("lambda_sq"), self.line("total")) {
                if &(s * lam) != total {
                    return fail(tl, "total differs from sum * lambda_sq");
                }
            }
        } else if let (Some(split), Some((line, total))) = (&split, self.line("total")) {
            if split != total {
                return fail(line, "total differs from prefix + tail");
            }
        }
        Ok(())
    }

    fn check_bound(&self) -> Result<(), TranscriptError> {
        self.check_sums()?;
        let n = self.transcript.len();
        if n < 2 {
            return fail(0, "bound certificate needs total and bound lines");
        }
        let (total, bound) = (&self.transcript[n - 2], &self.transcript[n - 1]);
        if total.label != "total" {
            return fail(n - 1, "expected `total` line");
        }
        let holds = match bound.label.as_str() {
            "bound <=" => total.value <= bound.value,
            "bound =" => total.value == bound.value,
            _ => return fail(n, format!("unknown bound relation `{}`", bound.label)),
        };
        if holds != self.verdict {
            return fail(n, format!("verdict {} but relation evaluates to {holds}", self.verdict));
        }
        Ok(())
    }

    fn check_membership(&self) -> Result<(), TranscriptError> {
        let parts: Vec<_> = self.lines_with_prefix("t ").collect();
        let Some((line, total)) = self.line("total") else {
            return fail(0, "membership certificate without total");
        };
        if !parts.is_empty() {
            let sum: Exact = parts.iter().map(|(_, l)| &l.value).sum();
            if &sum != total {
                return fail(line, "total differs from the sum of per-vertex terms");
            }
        }
        self.check_sums()?;
        if !self.verdict {
            return fail(0, "membership certificates always carry a true verdict");
        }
        Ok(())
    }

    fn check_witness(&self) -> Result<(), TranscriptError> {
        let Some(threshold) = &self.inputs.threshold else {
            return fail(0, "witness certificate without threshold");
        };
        let witness = self.lines_with_prefix("witness").last();
        match (self.verdict, witness) {
            (true, Some((line, w))) => {
                if line != self.transcript.len() {
                    return fail(line, "witness must be the final line");
                }
                if w.value <= *threshold {
                    return fail(line, "witness value does not exceed threshold");
                }
                Ok(())
            }
            (true, None) => fail(0, "positive verdict without witness line"),
            (false, Some((line, _))) => fail(line, "witness line on a negative verdict"),
            (false, None) => {
                for (line, l) in self.transcript.iter().enumerate() {
                    let probed = l.label.starts_with("quantity") || l.label.starts_with("zeta_sq");
                    if probed && l.value > *threshold {
                        return fail(line + 1, "value exceeds threshold but verdict is negative");
                    }
                }
                Ok(())
            }
        }
    }

    /// One-line human summary of the certified value.
    pub fn headline(&self) -> String {
        let pick = |label: &str| self.line(label).map(|(_, v)| v.to_string());
        match self.kind {
            CertificateKind::Divergence => self
                .lines_with_prefix("partial")
                .last()
                .map(|(_, l)| format!("{} = {}", l.label, l.value))
                .unwrap_or_default(),
            CertificateKind::ExactBound | CertificateKind::FiniteMembership => {
                pick("total").unwrap_or_default()
            }
            CertificateKind::UnboundednessWitness => self
                .transcript
                .last()
                .map(|l| format!("{} = {}", l.label, l.value))
                .unwrap_or_default(),
        }
    }
}

/// Accumulates a monotone partial-sum transcript, recording checkpoints at
/// powers of two and at the final term.
#[derive(Debug, Clone)]
pub struct PartialSums {
    threshold: Exact,
    sum: Exact,
    terms: u64,
    next_checkpoint: u64,
    lines: Vec<TranscriptLine>,
}

impl PartialSums {
    pub fn new(threshold: Exact) -> Self {
        PartialSums {
            threshold,
            sum: Exact::zero(),
            terms: 0,
            next_checkpoint: 1,
            lines: Vec::new(),
        }
    }

    /// Adds one non-negative term. Returns `true` once the threshold is
    /// reached.
    pub fn push(&mut self, term: &Exact) -> bool {
        debug_assert!(!term.is_negative());
        self.sum += term;
        self.terms += 1;
        let reached = self.reached();
        if self.terms == self.next_checkpoint || reached {
            self.checkpoint();
            while self.next_checkpoint <= self.terms {
                self.next_checkpoint *= 2;
            }
        }
        reached
    }

    fn checkpoint(&mut self) {
        // zero terms never move the sum; keep the transcript strictly increasing
        if let Some(last) = self.lines.last() {
            if last.value == self.sum {
                self.lines.pop();
            }
        }
        if self.sum.is_positive() {
            self.lines
                .push(TranscriptLine::new(format!("partial m={}", self.terms), self.sum.clone()));
        }
    }

    pub fn reached(&self) -> bool {
        self.sum >= self.threshold
    }

    pub fn sum(&self) -> &Exact {
        &self.sum
    }

    pub fn terms(&self) -> u64 {
        self.terms
    }

    /// Closes the transcript, recording the last term count if it was not
    /// already a checkpoint.
    pub fn finish(mut self) -> Vec<TranscriptLine> {
        let recorded = self
            .lines
            .last()
            .and_then(|l| label_param(&l.label, "m"))
            == Some(self.terms);
        if !recorded && self.terms > 0 {
            self.checkpoint();
        }
        self.lines
    }
}
