//! Weight families on the canonical trees, built as lazy local rules.
//!
//! Each vertex carries its squared weight and a [`ChildRule`] that assigns
//! squared weights to its children and answers tail-sum queries in closed
//! form. Walking the address from the root (or from a spine vertex) yields
//! the state of any vertex. Every rule distributes exactly `1/λ_v²` of
//! squared mass over the children of `v`, so `ζ_v² λ_v² = 1` everywhere.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::exact::{Exact, Extended, ParseRationalError};
use crate::shift::{ChildTerm, WeightFamily};
use crate::tree::{CanonicalTree, TreeError, TreeModel, VertexAddr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("theta must be positive, got {0}")]
    NonPositiveTheta(Exact),
    #[error("hyponormal rooted construction needs theta in (0,1), got {0}")]
    ThetaOutOfRange(Exact),
    #[error("perturb mode needs v0")]
    MissingV0,
    #[error("v0 is only meaningful in perturb mode")]
    UnexpectedV0,
    #[error("v0 must be a non-root vertex")]
    V0Root,
    #[error("v0 {0} does not belong to this tree")]
    V0Mismatch(VertexAddr),
    #[error("zeta^2 at v0 {0} is infinite")]
    InfiniteZeta(VertexAddr),
    #[error("perturbation base must be sqtrivial, hypo or nonhypo")]
    NestedPerturbation,
    #[error("invalid spec `{spec}`: {reason}")]
    Parse { spec: String, reason: String },
}

/// Which construction to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    SquareTrivial,
    Hyponormal,
    NonHyponormal,
    Perturbed,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::SquareTrivial => "sqtrivial",
            Mode::Hyponormal => "hypo",
            Mode::NonHyponormal => "nonhypo",
            Mode::Perturbed => "perturb",
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sqtrivial" => Ok(Mode::SquareTrivial),
            "hypo" => Ok(Mode::Hyponormal),
            "nonhypo" => Ok(Mode::NonHyponormal),
            "perturb" => Ok(Mode::Perturbed),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Parsed form of `mode=..;rooted=..;theta=..;v0=..`.
///
/// `theta` is the root's squared weight on rooted trees and is ignored on
/// rootless ones, whose spine weights are fixed. `base` selects the family
/// a perturbation starts from (default `sqtrivial`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionSpec {
    pub mode: Mode,
    pub rooted: bool,
    pub theta: Exact,
    pub v0: Option<VertexAddr>,
    pub base: Mode,
}

impl ConstructionSpec {
    pub fn new(mode: Mode, rooted: bool, theta: Exact) -> Self {
        ConstructionSpec {
            mode,
            rooted,
            theta,
            v0: None,
            base: Mode::SquareTrivial,
        }
    }

    pub fn perturbed(base: Mode, rooted: bool, theta: Exact, v0: VertexAddr) -> Self {
        ConstructionSpec {
            mode: Mode::Perturbed,
            rooted,
            theta,
            v0: Some(v0),
            base,
        }
    }

    pub fn validate(&self) -> Result<(), ConstructError> {
        if !self.theta.is_positive() {
            return Err(ConstructError::NonPositiveTheta(self.theta.clone()));
        }
        let inner = if self.mode == Mode::Perturbed {
            self.base
        } else {
            self.mode
        };
        if inner == Mode::Perturbed {
            return Err(ConstructError::NestedPerturbation);
        }
        if inner == Mode::Hyponormal && self.rooted && self.theta >= Exact::one() {
            return Err(ConstructError::ThetaOutOfRange(self.theta.clone()));
        }
        match (&self.v0, self.mode) {
            (None, Mode::Perturbed) => Err(ConstructError::MissingV0),
            (Some(_), m) if m != Mode::Perturbed => Err(ConstructError::UnexpectedV0),
            (Some(v), _) if v.is_rooted() != self.rooted => Err(ConstructError::V0Mismatch(v.clone())),
            (Some(v), _) if v.is_root() => Err(ConstructError::V0Root),
            _ => Ok(()),
        }
    }

    pub fn build(&self) -> Result<Box<dyn WeightFamily>, ConstructError> {
        self.validate()?;
        if self.mode == Mode::Perturbed {
            let mut base = self.clone();
            base.mode = self.base;
            base.v0 = None;
            base.base = Mode::SquareTrivial;
            let base = RuleFamily::new(base)?;
            let v0 = self.v0.clone().expect("validated");
            Ok(Box::new(build_perturbed(Box::new(base), v0)?))
        } else {
            Ok(Box::new(RuleFamily::new(self.clone())?))
        }
    }
}

impl fmt::Display for ConstructionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mode={};rooted={};theta={}",
            self.mode.as_str(),
            u8::from(self.rooted),
            self.theta
        )?;
        if let Some(v0) = &self.v0 {
            write!(f, ";v0={v0}")?;
        }
        if self.mode == Mode::Perturbed && self.base != Mode::SquareTrivial {
            write!(f, ";base={}", self.base.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for ConstructionSpec {
    type Err = ConstructError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: String| ConstructError::Parse {
            spec: s.to_string(),
            reason,
        };
        let mut mode = None;
        let mut rooted = None;
        let mut theta = None;
        let mut v0 = None;
        let mut base = None;
        for part in s.split(';').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{part}`")))?;
            let (k, v) = (k.trim(), v.trim());
            let dup = || err(format!("duplicate key `{k}`"));
            match k {
                "mode" => {
                    if mode.replace(v.parse::<Mode>().map_err(err)?).is_some() {
                        return Err(dup());
                    }
                }
                "rooted" => {
                    let r = match v {
                        "1" => true,
                        "0" => false,
                        _ => return Err(err(format!("rooted must be 0 or 1, got `{v}`"))),
                    };
                    if rooted.replace(r).is_some() {
                        return Err(dup());
                    }
                }
                "theta" => {
                    let t: Exact = v
                        .parse()
                        .map_err(|e: ParseRationalError| err(e.to_string()))?;
                    if theta.replace(t).is_some() {
                        return Err(dup());
                    }
                }
                "v0" => {
                    let a: VertexAddr = v.parse().map_err(|e: TreeError| err(e.to_string()))?;
                    if v0.replace(a).is_some() {
                        return Err(dup());
                    }
                }
                "base" => {
                    if base.replace(v.parse::<Mode>().map_err(err)?).is_some() {
                        return Err(dup());
                    }
                }
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        let spec = ConstructionSpec {
            mode: mode.ok_or_else(|| err("missing mode".into()))?,
            rooted: rooted.unwrap_or(true),
            theta: theta.unwrap_or_else(Exact::one),
            v0,
            base: base.unwrap_or(Mode::SquareTrivial),
        };
        if spec.mode != Mode::Perturbed && base.is_some() {
            return Err(err("base is only meaningful in perturb mode".into()));
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// The `r_j` schedule at a vertex with squared weight `r`:
/// `r_j = 1/(rn)` for `j < n` and `r_j = 1/(rn) · 2^-(j-n+1)` for `j >= n`,
/// with `n` the least integer `>= 2` such that `1/(r² n) <= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypoSchedule {
    pub r: Exact,
    pub n: BigInt,
    /// `1/(rn)`.
    pub level: Exact,
}

impl HypoSchedule {
    pub fn new(r: &Exact) -> Self {
        assert!(r.is_positive());
        let n = r.square().recip().ceil().max(BigInt::from(2));
        let level = (r * &Exact::from_integer(n.clone())).recip();
        HypoSchedule {
            r: r.clone(),
            n,
            level,
        }
    }

    /// Number of children `j >= 1` with `j < n`, as a u64 when it fits.
    fn flat_len(&self) -> Option<u64> {
        (&self.n - BigInt::one()).to_u64()
    }

    pub fn term(&self, j: u64) -> Exact {
        match self.flat_len() {
            Some(flat) if j > flat => self.level.shl(-((j - flat) as i64)),
            _ => self.level.clone(),
        }
    }

    /// `Σ_{j > m} r_j`.
    pub fn tail_sq(&self, m: u64) -> Exact {
        match self.flat_len() {
            Some(flat) if m >= flat => self.level.shl(-((m - flat) as i64)),
            _ => {
                let flat_left = &self.n - BigInt::one() - BigInt::from(m);
                &self.level * &Exact::from_integer(flat_left) + &self.level
            }
        }
    }

    /// `Σ_{j > m} r_j²`.
    pub fn tail_quartic(&self, m: u64) -> Exact {
        let sq = self.level.square();
        let third = Exact::ratio(1, 3);
        match self.flat_len() {
            Some(flat) if m >= flat => &sq * &third.shl(-2 * ((m - flat) as i64)),
            _ => {
                let flat_left = &self.n - BigInt::one() - BigInt::from(m);
                &sq * &(Exact::from_integer(flat_left) + third)
            }
        }
    }
}

/// A concrete witness for: for every `α² > 0` there are positive `λ_n` with
/// `Σ λ_n² = α²` and `|λ_1 − α| < 1`.
///
/// `λ_1² = α²(1−δ)` and `λ_{1+i}² = α²δ·2^-i` with `δ = min(1, 1/α²)/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaSplit {
    pub alpha_sq: Exact,
    pub delta: Exact,
}

impl AlphaSplit {
    pub fn new(alpha_sq: &Exact) -> Self {
        assert!(alpha_sq.is_positive());
        let delta = alpha_sq.recip().min(Exact::one()).shl(-1);
        AlphaSplit {
            alpha_sq: alpha_sq.clone(),
            delta,
        }
    }

    pub fn first(&self) -> Exact {
        &self.alpha_sq * &(Exact::one() - &self.delta)
    }

    /// Mass `α²δ` spread over children `2, 3, ...`.
    pub fn remainder(&self) -> Exact {
        &self.alpha_sq * &self.delta
    }

    pub fn term(&self, j: u64) -> Exact {
        if j == 1 {
            self.first()
        } else {
            self.remainder().shl(-((j - 1) as i64))
        }
    }

    pub fn tail_sq(&self, m: u64) -> Exact {
        if m == 0 {
            self.alpha_sq.clone()
        } else {
            self.remainder().shl(-((m - 1) as i64))
        }
    }

    pub fn tail_quartic(&self, m: u64) -> Exact {
        let rest = self.remainder().square() * Exact::ratio(1, 3);
        if m == 0 {
            self.first().square() + rest
        } else {
            rest.shl(-2 * ((m - 1) as i64))
        }
    }

    /// Certifies `|λ_1 − α| < 1` without square roots.
    ///
    /// Here `0 < λ_1 < α`. For `α <= 1` the bound is immediate. Otherwise it
    /// reads `λ_1² > (α − 1)²`, i.e. `2α > d + 1` with `d = α² − λ_1²`, and
    /// both sides are positive so squaring gives `4α² > (d + 1)²`.
    pub fn certify(&self) -> bool {
        let first = self.first();
        let d = &self.alpha_sq - &first;
        if !first.is_positive() || !d.is_positive() {
            return false;
        }
        self.alpha_sq <= Exact::one()
            || Exact::from_integer(4) * &self.alpha_sq > (d + Exact::one()).square()
    }
}

/// Spine weights `λ_{u_n}² = 1/2`.
fn spine_weight() -> Exact {
    Exact::ratio(1, 2)
}

/// Branch budget split at spine vertices: child `j >= 2` gets
/// `(3/2)·2^-(j-1)`.
fn branch_weight(j: u64) -> Exact {
    Exact::ratio(3, 2).shl(-((j - 1) as i64))
}

/// How a vertex distributes squared weight over its children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChildRule {
    /// `λ_j² = scale · 2^-j`.
    Geometric { scale: Exact },
    /// Geometric at this vertex, alpha split one level down.
    GeometricThenAlpha { scale: Exact },
    Alpha(AlphaSplit),
    Hypo(HypoSchedule),
    /// Spine vertex `u_{k+1}` with `k >= 1`: child 1 is `u_k`, children
    /// `j >= 2` open branches.
    Spine { k: u64 },
}

impl ChildRule {
    /// The rule a fresh subtree with root weight `lambda_sq` starts with.
    fn seed(mode: Mode, lambda_sq: &Exact) -> ChildRule {
        match mode {
            Mode::SquareTrivial => ChildRule::Geometric {
                scale: lambda_sq.recip(),
            },
            Mode::NonHyponormal => ChildRule::GeometricThenAlpha {
                scale: lambda_sq.recip(),
            },
            Mode::Hyponormal => ChildRule::Hypo(HypoSchedule::new(lambda_sq)),
            Mode::Perturbed => unreachable!("perturbations wrap a rule family"),
        }
    }

    fn child(&self, mode: Mode, j: u64) -> (Exact, ChildRule) {
        match self {
            ChildRule::Geometric { scale } => {
                let w = scale.shl(-(j as i64));
                let rule = ChildRule::Geometric { scale: w.recip() };
                (w, rule)
            }
            ChildRule::GeometricThenAlpha { scale } => {
                let w = scale.shl(-(j as i64));
                let rule = ChildRule::Alpha(AlphaSplit::new(&w.recip()));
                (w, rule)
            }
            ChildRule::Alpha(split) => {
                let w = split.term(j);
                let rule = ChildRule::Geometric { scale: w.recip() };
                (w, rule)
            }
            ChildRule::Hypo(s) => {
                let w = s.term(j);
                let rule = ChildRule::Hypo(HypoSchedule::new(&w));
                (w, rule)
            }
            ChildRule::Spine { k } => {
                if j == 1 {
                    let w = spine_weight();
                    let rule = if *k >= 2 {
                        ChildRule::Spine { k: k - 1 }
                    } else {
                        ChildRule::seed(mode, &w)
                    };
                    (w, rule)
                } else {
                    let w = branch_weight(j);
                    let rule = ChildRule::seed(mode, &w);
                    (w, rule)
                }
            }
        }
    }

    fn tail_sq(&self, m: u64) -> Exact {
        match self {
            ChildRule::Geometric { scale } | ChildRule::GeometricThenAlpha { scale } => {
                scale.shl(-(m as i64))
            }
            ChildRule::Alpha(split) => split.tail_sq(m),
            ChildRule::Hypo(s) => s.tail_sq(m),
            ChildRule::Spine { .. } => {
                let branches = Exact::ratio(3, 2).shl(-(m.saturating_sub(1) as i64));
                if m == 0 {
                    spine_weight() + branches
                } else {
                    branches
                }
            }
        }
    }

    fn tail_quartic(&self, m: u64) -> Exact {
        let third = Exact::ratio(1, 3);
        match self {
            ChildRule::Geometric { scale } | ChildRule::GeometricThenAlpha { scale } => {
                scale.square() * third.shl(-2 * (m as i64))
            }
            ChildRule::Alpha(split) => split.tail_quartic(m),
            ChildRule::Hypo(s) => s.tail_quartic(m),
            ChildRule::Spine { .. } => {
                // (9/4) Σ_{j > max(m,1)} 4^-(j-1) = 3 · 4^-max(m,1)
                let branches = Exact::from_integer(3).shl(-2 * (m.max(1) as i64));
                if m == 0 {
                    spine_weight().square() + branches
                } else {
                    branches
                }
            }
        }
    }
}

/// One of the unperturbed constructions on a canonical tree.
#[derive(Debug, Clone)]
pub struct RuleFamily {
    spec: ConstructionSpec,
    tree: CanonicalTree,
    root: (Exact, ChildRule),
}

impl RuleFamily {
    pub fn new(spec: ConstructionSpec) -> Result<Self, ConstructError> {
        spec.validate()?;
        if spec.mode == Mode::Perturbed {
            return Err(ConstructError::NestedPerturbation);
        }
        let (tree, weight) = if spec.rooted {
            (CanonicalTree::rooted(), spec.theta.clone())
        } else {
            (CanonicalTree::rootless(), spine_weight())
        };
        let rule = ChildRule::seed(spec.mode, &weight);
        Ok(RuleFamily {
            spec,
            tree,
            root: (weight, rule),
        })
    }

    pub fn mode(&self) -> Mode {
        self.spec.mode
    }

    pub fn construction(&self) -> &ConstructionSpec {
        &self.spec
    }

    fn start(&self, v: &VertexAddr) -> (Exact, ChildRule) {
        match v.spine_offset() {
            None => self.root.clone(),
            Some(0) => self.root.clone(),
            Some(k) => (spine_weight(), ChildRule::Spine { k }),
        }
    }

    /// Squared weight and child rule of `v`.
    pub fn state(&self, v: &VertexAddr) -> (Exact, ChildRule) {
        assert_eq!(
            v.is_rooted(),
            self.spec.rooted,
            "address {v} does not belong to this tree"
        );
        v.path()
            .iter()
            .fold(self.start(v), |(_, rule), &j| rule.child(self.spec.mode, j))
    }

    pub fn child_rule(&self, v: &VertexAddr) -> ChildRule {
        self.state(v).1
    }
}

impl WeightFamily for RuleFamily {
    fn tree(&self) -> &dyn TreeModel {
        &self.tree
    }

    fn spec(&self) -> String {
        self.spec.to_string()
    }

    fn lambda_sq(&self, v: &VertexAddr) -> Exact {
        self.state(v).0
    }

    fn tail_sum_sq(&self, u: &VertexAddr, m: u64) -> Extended {
        Extended::Finite(self.child_rule(u).tail_sq(m))
    }

    fn tail_sum_quartic(&self, u: &VertexAddr, m: u64) -> Extended {
        Extended::Finite(self.child_rule(u).tail_quartic(m))
    }

    fn tail_sum_zeta_weighted(&self, _u: &VertexAddr, _m: u64) -> Extended {
        // every child contributes ζ_c² λ_c² = 1 and there are infinitely many
        Extended::Infinite
    }

    fn tail_sum_normalized(&self, u: &VertexAddr, m: u64) -> Option<Extended> {
        // λ_c² / ζ_c² = λ_c⁴ under the reciprocal identity
        Some(self.tail_sum_quartic(u, m))
    }

    fn reciprocal_identity(&self) -> bool {
        true
    }

    fn child_terms(&self, u: &VertexAddr, start: u64, count: u64) -> Vec<ChildTerm> {
        let rule = self.child_rule(u);
        let start = start.max(1);
        (start..start.saturating_add(count))
            .map(|j| {
                let (w, r) = rule.child(self.spec.mode, j);
                ChildTerm {
                    index: j,
                    addr: u.child(j),
                    lambda_sq: w,
                    zeta_sq: Extended::Finite(r.tail_sq(0)),
                }
            })
            .collect()
    }
}

pub fn build_square_trivial_rooted(theta: &Exact) -> Result<RuleFamily, ConstructError> {
    RuleFamily::new(ConstructionSpec::new(Mode::SquareTrivial, true, theta.clone()))
}

pub fn build_square_trivial_rootless() -> RuleFamily {
    RuleFamily::new(ConstructionSpec::new(Mode::SquareTrivial, false, Exact::one()))
        .expect("fixed parameters are valid")
}

pub fn build_hyponormal_rooted(theta: &Exact) -> Result<RuleFamily, ConstructError> {
    RuleFamily::new(ConstructionSpec::new(Mode::Hyponormal, true, theta.clone()))
}

pub fn build_hyponormal_rootless() -> RuleFamily {
    RuleFamily::new(ConstructionSpec::new(Mode::Hyponormal, false, Exact::one()))
        .expect("fixed parameters are valid")
}

pub fn build_non_hyponormal(theta: &Exact, rooted: bool) -> Result<RuleFamily, ConstructError> {
    RuleFamily::new(ConstructionSpec::new(Mode::NonHyponormal, rooted, theta.clone()))
}

/// `family` with the weight at `v0` replaced by `λ̃_{v0}² = 1 + ζ_{v0}²`.
pub struct PerturbedFamily {
    base: Box<dyn WeightFamily>,
    v0: VertexAddr,
    parent: VertexAddr,
    old: Exact,
    new: Exact,
    zeta_v0: Exact,
}

pub fn build_perturbed(
    base: Box<dyn WeightFamily>,
    v0: VertexAddr,
) -> Result<PerturbedFamily, ConstructError> {
    if !base.tree().contains(&v0) {
        return Err(ConstructError::V0Mismatch(v0));
    }
    let Some(parent) = v0.parent() else {
        return Err(ConstructError::V0Root);
    };
    let Extended::Finite(zeta_v0) = base.zeta_sq(&v0) else {
        return Err(ConstructError::InfiniteZeta(v0));
    };
    let old = base.lambda_sq(&v0);
    let new = Exact::one() + &zeta_v0;
    Ok(PerturbedFamily {
        base,
        v0,
        parent,
        old,
        new,
        zeta_v0,
    })
}

impl PerturbedFamily {
    pub fn v0(&self) -> &VertexAddr {
        &self.v0
    }

    fn index_of(v: &VertexAddr) -> u64 {
        v.child_index().expect("non-root")
    }

    /// `λ̃² − λ²` at `v0`.
    fn shift(&self) -> Exact {
        &self.new - &self.old
    }
}

impl WeightFamily for PerturbedFamily {
    fn tree(&self) -> &dyn TreeModel {
        self.base.tree()
    }

    fn spec(&self) -> String {
        let base = self.base.spec();
        match base.parse::<ConstructionSpec>() {
            Ok(b) => ConstructionSpec::perturbed(b.mode, b.rooted, b.theta, self.v0.clone()).to_string(),
            Err(_) => format!("{base};v0={}", self.v0),
        }
    }

    fn lambda_sq(&self, v: &VertexAddr) -> Exact {
        if *v == self.v0 {
            self.new.clone()
        } else {
            self.base.lambda_sq(v)
        }
    }

    fn tail_sum_sq(&self, u: &VertexAddr, m: u64) -> Extended {
        let t = self.base.tail_sum_sq(u, m);
        if *u == self.parent && Self::index_of(&self.v0) > m {
            &t + &self.shift()
        } else {
            t
        }
    }

    fn tail_sum_quartic(&self, u: &VertexAddr, m: u64) -> Extended {
        let t = self.base.tail_sum_quartic(u, m);
        if *u == self.parent && Self::index_of(&self.v0) > m {
            &t + &(self.new.square() - self.old.square())
        } else {
            t
        }
    }

    fn tail_sum_zeta_weighted(&self, u: &VertexAddr, m: u64) -> Extended {
        let mut t = self.base.tail_sum_zeta_weighted(u, m);
        if *u == self.parent && Self::index_of(&self.v0) > m {
            t = &t + &(&self.zeta_v0 * &self.shift());
        }
        if let Some(grand) = self.parent.parent() {
            if *u == grand && Self::index_of(&self.parent) > m {
                // ζ² of the parent grows by the shift
                t = &t + &(&self.shift() * &self.base.lambda_sq(&self.parent));
            }
        }
        t
    }

    fn tail_sum_normalized(&self, u: &VertexAddr, m: u64) -> Option<Extended> {
        let mut t = self.base.tail_sum_normalized(u, m)?;
        if *u == self.parent && Self::index_of(&self.v0) > m {
            t = &t + &(&self.shift() / &self.zeta_v0);
        }
        if let Some(grand) = self.parent.parent() {
            if *u == grand && Self::index_of(&self.parent) > m {
                let lam = self.base.lambda_sq(&self.parent);
                let old = self.base.zeta_sq(&self.parent).into_finite()?;
                let new = &old + &self.shift();
                t = &t + &(&lam / &new - &lam / &old);
            }
        }
        Some(t)
    }

    fn child_terms(&self, u: &VertexAddr, start: u64, count: u64) -> Vec<ChildTerm> {
        let mut terms = self.base.child_terms(u, start, count);
        for t in &mut terms {
            if t.addr == self.v0 {
                t.lambda_sq = self.new.clone();
            }
            if t.addr == self.parent {
                t.zeta_sq = &t.zeta_sq + &self.shift();
            }
        }
        terms
    }
}
