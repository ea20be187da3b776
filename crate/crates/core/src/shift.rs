//! Weighted shifts on directed trees, restricted to finitely supported
//! vectors.
//!
//! Weights are handled in the squared domain: a family reports `λ_v²` as an
//! exact positive rational and `λ_v` itself is never formed. Every quantity
//! checked here (`ζ_u² = Σ_{v ∈ Chi(u)} λ_v²`, squared norms of images,
//! criterion sums) is a polynomial or rational function of the squares.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::certificate::{
    CertInputs, Certificate, CertificateKind, Guarantee, PartialSums, TranscriptLine,
};
use crate::exact::{Exact, Extended, ParseRationalError};
use crate::probe::ProbeWindow;
use crate::tree::{Degree, TreeError, TreeModel, VertexAddr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShiftError {
    #[error("window must be at least 1, got {0}")]
    EmptyWindow(u64),
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
}

impl ShiftError {
    fn format(line: usize, reason: impl Into<String>) -> Self {
        ShiftError::Format {
            line,
            reason: reason.into(),
        }
    }
}

impl From<(usize, TreeError)> for ShiftError {
    fn from((line, e): (usize, TreeError)) -> Self {
        ShiftError::format(line, e.to_string())
    }
}

impl From<(usize, ParseRationalError)> for ShiftError {
    fn from((line, e): (usize, ParseRationalError)) -> Self {
        ShiftError::format(line, e.to_string())
    }
}

/// Squared weight and `ζ²` of one child, as produced by a child scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildTerm {
    pub index: u64,
    pub addr: VertexAddr,
    pub lambda_sq: Exact,
    pub zeta_sq: Extended,
}

/// A family of nonzero weights `{λ_v}` on the vertices of a tree, queried
/// lazily.
///
/// `lambda_sq` is defined on `V°`; on a rooted tree the root also carries a
/// squared weight, which is the construction parameter and does not enter
/// the operator.
///
/// Tail sums run over the children of `u` with index `> m`:
///
/// * `tail_sum_sq`: `Σ λ_c²`
/// * `tail_sum_quartic`: `Σ λ_c⁴`
/// * `tail_sum_zeta_weighted`: `Σ ζ_c² λ_c²` (with `0·∞ = 0`)
/// * `tail_sum_normalized`: `Σ λ_c² / ζ_c²`, `None` where some tail child has
///   `ζ_c` zero or infinite, or the value is not available in closed form.
pub trait WeightFamily: Send + Sync {
    fn tree(&self) -> &dyn TreeModel;

    /// Construction spec string; `custom` for hand-built families.
    fn spec(&self) -> String;

    fn lambda_sq(&self, v: &VertexAddr) -> Exact;

    fn tail_sum_sq(&self, u: &VertexAddr, m: u64) -> Extended;

    fn tail_sum_quartic(&self, u: &VertexAddr, m: u64) -> Extended;

    fn tail_sum_zeta_weighted(&self, u: &VertexAddr, m: u64) -> Extended;

    fn tail_sum_normalized(&self, u: &VertexAddr, m: u64) -> Option<Extended>;

    /// Whether the family claims `ζ_v² λ_v² = 1` at every vertex. Checks
    /// verify the claim on their window before relying on it.
    fn reciprocal_identity(&self) -> bool {
        false
    }

    fn zeta_sq(&self, u: &VertexAddr) -> Extended {
        self.tail_sum_sq(u, 0)
    }

    /// Children `start ..= start + count - 1` of `u` (clipped to the degree).
    fn child_terms(&self, u: &VertexAddr, start: u64, count: u64) -> Vec<ChildTerm> {
        let end = match self.tree().degree(u) {
            Degree::Finite(d) => d.min(start.saturating_add(count).saturating_sub(1)),
            Degree::Countable => start.saturating_add(count).saturating_sub(1),
        };
        (start.max(1)..=end)
            .map(|j| {
                let addr = u.child(j);
                ChildTerm {
                    index: j,
                    lambda_sq: self.lambda_sq(&addr),
                    zeta_sq: self.zeta_sq(&addr),
                    addr,
                }
            })
            .collect()
    }
}

/// Chunk size used when streaming through long child scans.
pub(crate) const SCAN_CHUNK: u64 = 4096;

/// Streams child terms of `u` from index 1, in chunks, until `f` returns
/// `false` or the children run out.
pub fn scan_children(
    family: &dyn WeightFamily,
    u: &VertexAddr,
    max_terms: u64,
    mut f: impl FnMut(&ChildTerm) -> bool,
) {
    let mut start = 1u64;
    while start <= max_terms {
        let count = SCAN_CHUNK.min(max_terms - start + 1);
        let chunk = family.child_terms(u, start, count);
        if chunk.is_empty() {
            return;
        }
        for t in &chunk {
            if !f(t) {
                return;
            }
        }
        if (chunk.len() as u64) < count {
            return;
        }
        start += count;
    }
}

/// Complex number with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ComplexQ {
    pub re: Exact,
    pub im: Exact,
}

impl ComplexQ {
    pub fn new(re: Exact, im: Exact) -> Self {
        ComplexQ { re, im }
    }

    pub fn real(re: Exact) -> Self {
        ComplexQ {
            re,
            im: Exact::zero(),
        }
    }

    pub fn one() -> Self {
        ComplexQ::real(Exact::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `|z|²`.
    pub fn norm_sq(&self) -> Exact {
        self.re.square() + self.im.square()
    }

    pub fn add(&self, other: &ComplexQ) -> ComplexQ {
        ComplexQ::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn mul(&self, other: &ComplexQ) -> ComplexQ {
        ComplexQ::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }
}

/// A finitely supported function on the vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FiniteVector {
    support: BTreeMap<VertexAddr, ComplexQ>,
}

impl FiniteVector {
    pub fn zero() -> Self {
        FiniteVector::default()
    }

    /// `e_u`.
    pub fn basis(u: VertexAddr) -> Self {
        let mut f = FiniteVector::zero();
        f.set(u, ComplexQ::one());
        f
    }

    /// Sets a coefficient; zero removes the entry.
    pub fn set(&mut self, u: VertexAddr, c: ComplexQ) {
        if c.is_zero() {
            self.support.remove(&u);
        } else {
            self.support.insert(u, c);
        }
    }

    pub fn get(&self, u: &VertexAddr) -> ComplexQ {
        self.support.get(u).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexAddr, &ComplexQ)> {
        self.support.iter()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: &ComplexQ, other: &FiniteVector, beta: &ComplexQ) -> FiniteVector {
        let mut out = FiniteVector::zero();
        for u in self.support.keys().chain(other.support.keys()) {
            let c = alpha.mul(&self.get(u)).add(&beta.mul(&other.get(u)));
            out.set(u.clone(), c);
        }
        out
    }

    /// One `<address> <re> <im>` line per support vertex.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (u, c) in &self.support {
            let _ = writeln!(s, "{u} {} {}", c.re, c.im);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, ShiftError> {
        let mut f = FiniteVector::zero();
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [addr, re, im] = fields[..] else {
                return Err(ShiftError::format(n, "expected `<address> <re> <im>`"));
            };
            let u: VertexAddr = addr.parse().map_err(|e| (n, e))?;
            let c = ComplexQ::new(re.parse().map_err(|e| (n, e))?, im.parse().map_err(|e| (n, e))?);
            if f.support.contains_key(&u) {
                return Err(ShiftError::format(n, format!("duplicate address {u}")));
            }
            f.set(u, c);
        }
        Ok(f)
    }
}

/// `sqrt(weight_sq) * coeff`, the value of `Λ_T f` at one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageEntry {
    pub weight_sq: Exact,
    pub coeff: ComplexQ,
}

impl ImageEntry {
    pub fn norm_sq(&self) -> Exact {
        &self.weight_sq * &self.coeff.norm_sq()
    }
}

/// The restriction of `Λ_T f` to the first `window` children of every
/// support vertex of `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftImage {
    pub entries: BTreeMap<VertexAddr, ImageEntry>,
    pub window: u64,
    /// Set when some support vertex has children beyond the window, so the
    /// true image has more nonzero values than shown.
    pub truncated: bool,
}

/// `v ↦ λ_v · f(par v)` on the window. The rooted root never appears since
/// it is nobody's child.
pub fn apply_lambda(
    family: &dyn WeightFamily,
    f: &FiniteVector,
    window: u64,
) -> Result<ShiftImage, ShiftError> {
    if window < 1 {
        return Err(ShiftError::EmptyWindow(window));
    }
    let tree = family.tree();
    let mut entries = BTreeMap::new();
    let mut truncated = false;
    for (u, c) in f.iter() {
        let degree = tree.degree(u);
        truncated |= match degree {
            Degree::Finite(d) => d > window,
            Degree::Countable => true,
        };
        for v in tree.children(u, window) {
            let weight_sq = family.lambda_sq(&v);
            entries.insert(
                v,
                ImageEntry {
                    weight_sq,
                    coeff: c.clone(),
                },
            );
        }
    }
    Ok(ShiftImage {
        entries,
        window,
        truncated,
    })
}

/// `ζ_u² = Σ_{v ∈ Chi(u)} λ_v²`.
pub fn zeta_sq(family: &dyn WeightFamily, u: &VertexAddr) -> Extended {
    family.zeta_sq(u)
}

/// `ζ_u²` assembled as an explicit sum over the first `prefix` children
/// plus the closed-form tail.
pub fn zeta_sq_split(family: &dyn WeightFamily, u: &VertexAddr, prefix: u64) -> (Exact, Extended) {
    let head: Exact = family
        .child_terms(u, 1, prefix)
        .iter()
        .map(|t| &t.lambda_sq)
        .sum();
    let tail = family.tail_sum_sq(u, prefix);
    (head, tail)
}

/// Outcome of a single-vertex domain check.
#[derive(Debug, Clone)]
pub struct DomainCheck {
    pub in_domain: bool,
    pub certificate: Certificate,
}

/// `e_u ∈ D(S_λ)` iff `ζ_u² < ∞`.
///
/// A finite `ζ_u²` yields a membership certificate with the exact split
/// `prefix + tail`. An infinite one yields a divergence transcript of the
/// partial sums `Σ_{j ≤ m} λ_{c_j}²`, stopped at `threshold` or after
/// `max_terms` children.
pub fn e_u_in_domain(
    family: &dyn WeightFamily,
    u: &VertexAddr,
    prefix: u64,
    threshold: &Exact,
    max_terms: u64,
) -> DomainCheck {
    let mut inputs = CertInputs {
        property: "domain".into(),
        spec: family.spec(),
        address: u.to_string(),
        threshold: None,
        prefix: Some(prefix),
    };
    match family.zeta_sq(u) {
        Extended::Finite(total) => {
            let (head, tail) = zeta_sq_split(family, u, prefix);
            let tail = tail.into_finite().expect("tail of a finite sum is finite");
            let transcript = vec![
                TranscriptLine::new(format!("prefix m={prefix}"), head),
                TranscriptLine::new(format!("tail m={prefix}"), tail),
                TranscriptLine::new("total", total),
            ];
            DomainCheck {
                in_domain: true,
                certificate: Certificate {
                    kind: CertificateKind::FiniteMembership,
                    inputs,
                    transcript,
                    verdict: true,
                    guarantee: Guarantee::Exact,
                },
            }
        }
        Extended::Infinite => {
            let mut sums = PartialSums::new(threshold.clone());
            scan_children(family, u, max_terms, |t| !sums.push(&t.lambda_sq));
            let verdict = sums.reached();
            inputs.threshold = Some(threshold.clone());
            inputs.prefix = Some(max_terms);
            DomainCheck {
                in_domain: false,
                certificate: Certificate {
                    kind: CertificateKind::Divergence,
                    inputs,
                    transcript: sums.finish(),
                    verdict,
                    guarantee: Guarantee::Exact,
                },
            }
        }
    }
}

/// Result of checking `E ⊆ D(S_λ)` on a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    pub dense: bool,
    /// First probed vertex with `ζ_u = ∞`.
    pub witness: Option<VertexAddr>,
    /// `Exact` when the family's reciprocal identity was confirmed on every
    /// probed vertex, which makes every `ζ_u² = 1/λ_u²` finite.
    pub guarantee: Guarantee,
    pub probed: usize,
}

pub fn densely_defined(family: &dyn WeightFamily, window: &ProbeWindow) -> DensityReport {
    let vertices = window.vertices(family.tree());
    let mut identity_holds = family.reciprocal_identity();
    for u in &vertices {
        match family.zeta_sq(u) {
            Extended::Infinite => {
                return DensityReport {
                    dense: false,
                    witness: Some(u.clone()),
                    guarantee: Guarantee::WindowOnly,
                    probed: vertices.len(),
                }
            }
            Extended::Finite(z) => {
                if identity_holds && &z * &family.lambda_sq(u) != Exact::one() {
                    identity_holds = false;
                }
            }
        }
    }
    DensityReport {
        dense: true,
        witness: None,
        guarantee: if identity_holds {
            Guarantee::Exact
        } else {
            Guarantee::WindowOnly
        },
        probed: vertices.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InjectivityFailure {
    Leaf(VertexAddr),
    ZeroZeta(VertexAddr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectivityReport {
    pub injective: bool,
    pub witness: Option<InjectivityFailure>,
    pub probed: usize,
}

/// Leaflessness plus `ζ_u² > 0` on the window.
pub fn injective_check(family: &dyn WeightFamily, window: &ProbeWindow) -> InjectivityReport {
    let tree = family.tree();
    let vertices = window.vertices(tree);
    for u in &vertices {
        if tree.degree(u) == Degree::Finite(0) {
            return InjectivityReport {
                injective: false,
                witness: Some(InjectivityFailure::Leaf(u.clone())),
                probed: vertices.len(),
            };
        }
        if family.zeta_sq(u) == Extended::zero() {
            return InjectivityReport {
                injective: false,
                witness: Some(InjectivityFailure::ZeroZeta(u.clone())),
                probed: vertices.len(),
            };
        }
    }
    InjectivityReport {
        injective: true,
        witness: None,
        probed: vertices.len(),
    }
}

/// `<address> <p/q>` per vertex, in the given order.
pub fn write_weight_dump(family: &dyn WeightFamily, vertices: &[VertexAddr]) -> String {
    let mut s = String::new();
    for v in vertices {
        let _ = writeln!(s, "{v} {}", family.lambda_sq(v));
    }
    s
}

/// Squared weights read back from a dump.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightTable {
    entries: BTreeMap<VertexAddr, Exact>,
}

impl WeightTable {
    pub fn get(&self, v: &VertexAddr) -> Option<&Exact> {
        self.entries.get(v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexAddr, &Exact)> {
        self.entries.iter()
    }

    pub fn parse(text: &str) -> Result<Self, ShiftError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [addr, value] = fields[..] else {
                return Err(ShiftError::format(n, "expected `<address> <num>/<den>`"));
            };
            let v: VertexAddr = addr.parse().map_err(|e| (n, e))?;
            let w: Exact = value.parse().map_err(|e| (n, e))?;
            if !w.is_positive() {
                return Err(ShiftError::format(n, "squared weight must be positive"));
            }
            if entries.insert(v.clone(), w).is_some() {
                return Err(ShiftError::format(n, format!("duplicate address {v}")));
            }
        }
        Ok(WeightTable { entries })
    }
}
