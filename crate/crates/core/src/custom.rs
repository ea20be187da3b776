//! Hand-built weight families on rooted trees.
//!
//! Each vertex gets a [`ChildSchedule`] describing the squared weights of
//! its children; vertices without an explicit entry use the default
//! schedule. An `Explicit` schedule also fixes the number of children, so
//! finite trees and trees with finite-degree vertices come out of the same
//! description.

use std::collections::BTreeMap;

use crate::exact::{Exact, Extended};
use crate::shift::WeightFamily;
use crate::tree::{Degree, TreeModel, VertexAddr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChildSchedule {
    /// Finitely many children with the listed squared weights.
    Explicit(Vec<Exact>),
    /// Countably many children, `λ_j² = scale · 2^-j`.
    Geometric(Exact),
    /// Countably many children, all with squared weight `c`.
    Constant(Exact),
}

impl ChildSchedule {
    pub fn leaf() -> Self {
        ChildSchedule::Explicit(Vec::new())
    }

    pub fn degree(&self) -> Degree {
        match self {
            ChildSchedule::Explicit(w) => Degree::Finite(w.len() as u64),
            _ => Degree::Countable,
        }
    }

    pub fn term(&self, j: u64) -> Option<Exact> {
        match self {
            ChildSchedule::Explicit(w) => w.get((j as usize).checked_sub(1)?).cloned(),
            ChildSchedule::Geometric(s) => Some(s.shl(-(j as i64))),
            ChildSchedule::Constant(c) => Some(c.clone()),
        }
    }

    pub fn tail_sq(&self, m: u64) -> Extended {
        match self {
            ChildSchedule::Explicit(w) => Extended::Finite(w.iter().skip(m as usize).sum()),
            ChildSchedule::Geometric(s) => Extended::Finite(s.shl(-(m as i64))),
            ChildSchedule::Constant(_) => Extended::Infinite,
        }
    }

    pub fn tail_quartic(&self, m: u64) -> Extended {
        match self {
            ChildSchedule::Explicit(w) => {
                Extended::Finite(w.iter().skip(m as usize).map(Exact::square).sum())
            }
            ChildSchedule::Geometric(s) => {
                Extended::Finite(s.square() * Exact::ratio(1, 3).shl(-2 * (m as i64)))
            }
            ChildSchedule::Constant(_) => Extended::Infinite,
        }
    }

    fn validate(&self) -> Result<(), String> {
        let bad = match self {
            ChildSchedule::Explicit(w) => w.iter().any(|x| !x.is_positive()),
            ChildSchedule::Geometric(s) | ChildSchedule::Constant(s) => !s.is_positive(),
        };
        if bad {
            Err("squared weights must be positive".into())
        } else {
            Ok(())
        }
    }
}

/// A rooted tree together with its weights, given by per-vertex child
/// schedules.
#[derive(Debug, Clone)]
pub struct CustomFamily {
    root_lambda_sq: Exact,
    schedules: BTreeMap<VertexAddr, ChildSchedule>,
    default: ChildSchedule,
}

impl CustomFamily {
    pub fn new(default: ChildSchedule) -> Self {
        default.validate().expect("valid default schedule");
        CustomFamily {
            root_lambda_sq: Exact::one(),
            schedules: BTreeMap::new(),
            default,
        }
    }

    /// `λ_v ≡ 1` on the canonical rooted tree.
    pub fn unit_weights() -> Self {
        CustomFamily::new(ChildSchedule::Constant(Exact::one()))
    }

    pub fn with_schedule(mut self, u: VertexAddr, s: ChildSchedule) -> Self {
        self.set_schedule(u, s);
        self
    }

    pub fn set_schedule(&mut self, u: VertexAddr, s: ChildSchedule) {
        assert!(u.is_rooted(), "custom families live on rooted trees");
        s.validate().expect("valid schedule");
        self.schedules.insert(u, s);
    }

    pub fn schedule(&self, u: &VertexAddr) -> &ChildSchedule {
        self.schedules.get(u).unwrap_or(&self.default)
    }

    /// Explicitly scheduled children of `u` with index `> m`.
    fn scheduled_children(&self, u: &VertexAddr, m: u64) -> Vec<(VertexAddr, Exact)> {
        self.schedules
            .keys()
            .filter(|c| c.parent().as_ref() == Some(u) && c.child_index().unwrap_or(0) > m)
            .filter_map(|c| Some((c.clone(), self.schedule(u).term(c.child_index()?)?)))
            .collect()
    }

    /// `Σ g(λ_c², ζ_c²)` over children of `u` with index `> m`, where
    /// children following the default schedule contribute
    /// `remaining mass · per_unit(ζ²_default)`.
    fn weighted_tail(
        &self,
        u: &VertexAddr,
        m: u64,
        term: impl Fn(&Exact, &Extended) -> Option<Extended>,
        per_unit: impl Fn(&Extended) -> Option<Extended>,
    ) -> Option<Extended> {
        let s = self.schedule(u);
        if let ChildSchedule::Explicit(w) = s {
            let mut acc = Extended::zero();
            for (i, lam) in w.iter().enumerate().skip(m as usize) {
                let c = u.child(i as u64 + 1);
                acc = acc + term(lam, &self.zeta_sq(&c))?;
            }
            return Some(acc);
        }
        let mut acc = Extended::zero();
        let mut rest = s.tail_sq(m);
        for (c, lam) in self.scheduled_children(u, m) {
            acc = acc + term(&lam, &self.zeta_sq(&c))?;
            if let Extended::Finite(r) = &rest {
                rest = Extended::Finite(r - &lam);
            }
        }
        let default_zeta = self.default.tail_sq(0);
        let unit = per_unit(&default_zeta)?;
        let rest = match (&rest, &unit) {
            // infinitely many default children, each contributing a fixed positive amount
            (Extended::Infinite, _) => match unit {
                Extended::Finite(ref u) if u.is_zero() => Extended::zero(),
                _ => Extended::Infinite,
            },
            (Extended::Finite(r), _) => unit.scale(r),
        };
        Some(acc + rest)
    }
}

impl TreeModel for CustomFamily {
    fn is_rooted(&self) -> bool {
        true
    }

    fn degree(&self, u: &VertexAddr) -> Degree {
        self.schedule(u).degree()
    }
}

impl WeightFamily for CustomFamily {
    fn tree(&self) -> &dyn TreeModel {
        self
    }

    fn spec(&self) -> String {
        "custom".into()
    }

    fn lambda_sq(&self, v: &VertexAddr) -> Exact {
        match (v.parent(), v.child_index()) {
            (Some(p), Some(j)) => self
                .schedule(&p)
                .term(j)
                .unwrap_or_else(|| panic!("vertex {v} is not in the tree")),
            _ => self.root_lambda_sq.clone(),
        }
    }

    fn tail_sum_sq(&self, u: &VertexAddr, m: u64) -> Extended {
        self.schedule(u).tail_sq(m)
    }

    fn tail_sum_quartic(&self, u: &VertexAddr, m: u64) -> Extended {
        self.schedule(u).tail_quartic(m)
    }

    fn tail_sum_zeta_weighted(&self, u: &VertexAddr, m: u64) -> Extended {
        self.weighted_tail(
            u,
            m,
            |lam, zeta| Some(zeta.scale(lam)),
            |zeta| Some(zeta.clone()),
        )
        .expect("zeta-weighted tails are always defined")
    }

    fn tail_sum_normalized(&self, u: &VertexAddr, m: u64) -> Option<Extended> {
        let ratio = |lam: &Exact, zeta: &Extended| match zeta {
            Extended::Finite(z) if z.is_positive() => Some(Extended::Finite(lam / z)),
            _ => None,
        };
        self.weighted_tail(u, m, ratio, |zeta| ratio(&Exact::one(), zeta))
    }
}
