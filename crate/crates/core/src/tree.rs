//! Directed trees in which vertices are named by canonical addresses.
//!
//! Rooted addresses are child-index paths from the root. Rootless addresses
//! hang off a distinguished spine `u1, u2 = par(u1), u3, ...`: `(k, s)` is
//! the vertex reached from `u_{k+1}` by the child-index path `s`, and child
//! `1` of every spine vertex `u_{k+1}` with `k >= 1` is `u_k`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("above root: vertex {vertex} has depth {depth} < {steps}")]
    AboveRoot {
        vertex: VertexAddr,
        depth: usize,
        steps: u64,
    },
    #[error("invalid address `{0}`")]
    Parse(String),
    #[error("child index must be >= 1")]
    ZeroIndex,
}

/// Canonical name of a vertex.
///
/// `spine` is `None` for rooted trees. The derived ordering is lexicographic
/// on child-index paths, which is the enumeration order used everywhere.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexAddr {
    spine: Option<u64>,
    path: Vec<u64>,
}

impl VertexAddr {
    pub fn root() -> Self {
        VertexAddr {
            spine: None,
            path: Vec::new(),
        }
    }

    pub fn rooted(path: impl Into<Vec<u64>>) -> Result<Self, TreeError> {
        let path = path.into();
        if path.contains(&0) {
            return Err(TreeError::ZeroIndex);
        }
        Ok(VertexAddr { spine: None, path })
    }

    /// Builds and canonicalizes a rootless address.
    pub fn rootless(spine: u64, path: impl Into<Vec<u64>>) -> Result<Self, TreeError> {
        let path = path.into();
        if path.contains(&0) {
            return Err(TreeError::ZeroIndex);
        }
        let mut k = spine;
        let mut start = 0;
        while k >= 1 && path.get(start) == Some(&1) {
            k -= 1;
            start += 1;
        }
        Ok(VertexAddr {
            spine: Some(k),
            path: path[start..].to_vec(),
        })
    }

    /// Spine vertex `u_{k+1}`.
    pub fn spine_vertex(k: u64) -> Self {
        VertexAddr {
            spine: Some(k),
            path: Vec::new(),
        }
    }

    pub fn is_rooted(&self) -> bool {
        self.spine.is_none()
    }

    pub fn spine_offset(&self) -> Option<u64> {
        self.spine
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Rooted: distance from the root. Rootless: length of the path below
    /// the spine vertex.
    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn is_root(&self) -> bool {
        self.spine.is_none() && self.path.is_empty()
    }

    pub fn is_spine(&self) -> bool {
        self.spine.is_some() && self.path.is_empty()
    }

    /// Position of this vertex among its parent's children.
    pub fn child_index(&self) -> Option<u64> {
        match (self.spine, self.path.last()) {
            (_, Some(&j)) => Some(j),
            (Some(_), None) => Some(1),
            (None, None) => None,
        }
    }

    /// Child `j` (1-based), canonical. Panics if `j == 0`.
    pub fn child(&self, j: u64) -> VertexAddr {
        assert!(j >= 1, "child index must be >= 1");
        match self.spine {
            Some(k) if k >= 1 && j == 1 && self.path.is_empty() => VertexAddr::spine_vertex(k - 1),
            _ => {
                let mut path = Vec::with_capacity(self.path.len() + 1);
                path.extend_from_slice(&self.path);
                path.push(j);
                VertexAddr {
                    spine: self.spine,
                    path,
                }
            }
        }
    }

    /// The unique parent; `None` only for the rooted root.
    pub fn parent(&self) -> Option<VertexAddr> {
        match (self.spine, self.path.is_empty()) {
            (None, true) => None,
            (Some(k), true) => Some(VertexAddr::spine_vertex(k + 1)),
            (spine, false) => Some(VertexAddr {
                spine,
                path: self.path[..self.path.len() - 1].to_vec(),
            }),
        }
    }

    /// `par^k(self)`.
    pub fn ancestor(&self, k: u64) -> Result<VertexAddr, TreeError> {
        match self.spine {
            None => {
                if k as usize > self.path.len() || k > usize::MAX as u64 {
                    return Err(TreeError::AboveRoot {
                        vertex: self.clone(),
                        depth: self.path.len(),
                        steps: k,
                    });
                }
                Ok(VertexAddr {
                    spine: None,
                    path: self.path[..self.path.len() - k as usize].to_vec(),
                })
            }
            Some(s) => {
                let len = self.path.len() as u64;
                if k <= len {
                    Ok(VertexAddr {
                        spine: Some(s),
                        path: self.path[..(len - k) as usize].to_vec(),
                    })
                } else {
                    Ok(VertexAddr::spine_vertex(s + (k - len)))
                }
            }
        }
    }

    /// Whether `self` lies in `Des(ancestor)`.
    pub fn is_descendant_of(&self, ancestor: &VertexAddr) -> bool {
        match (self.spine, ancestor.spine) {
            (None, None) => self.path.starts_with(&ancestor.path),
            (Some(s), Some(a)) => {
                if ancestor.path.is_empty() {
                    // everything below u_{a+1}: u's spine anchor is at or below it
                    s <= a
                } else {
                    s == a && self.path.starts_with(&ancestor.path)
                }
            }
            _ => false,
        }
    }
}

impl fmt::Display for VertexAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = self.spine {
            write!(f, "{k}:")?;
        }
        if self.path.is_empty() {
            return f.write_str("ε");
        }
        for (i, j) in self.path.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{j}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VertexAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VertexAddr({self})")
    }
}

fn parse_path(s: &str) -> Option<Vec<u64>> {
    if s == "ε" {
        return Some(Vec::new());
    }
    s.split('.')
        .map(|t| {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            t.parse::<u64>().ok().filter(|&j| j >= 1)
        })
        .collect()
}

impl FromStr for VertexAddr {
    type Err = TreeError;

    /// `ε`, `1.3.2`, `k:ε`, `k:2.5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || TreeError::Parse(s.to_string());
        match s.split_once(':') {
            None => VertexAddr::rooted(parse_path(s).ok_or_else(err)?),
            Some((k, p)) => {
                if k.is_empty() || !k.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(err());
                }
                let k = k.parse::<u64>().map_err(|_| err())?;
                VertexAddr::rootless(k, parse_path(p).ok_or_else(err)?)
            }
        }
    }
}

/// Number of children a vertex declares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degree {
    Finite(u64),
    /// `card Chi(u) = aleph_0`.
    Countable,
}

impl Degree {
    pub fn admits(&self, j: u64) -> bool {
        match self {
            Degree::Finite(n) => j >= 1 && j <= *n,
            Degree::Countable => j >= 1,
        }
    }

    pub fn is_countable(&self) -> bool {
        matches!(self, Degree::Countable)
    }
}

/// Children of any vertex beyond this index are not scanned when a
/// generation slice would otherwise search an infinite child set for
/// nonempty subtrees.
pub const GENERATION_SCAN_LIMIT: u64 = 1 << 16;

/// A directed tree exposed through addresses.
pub trait TreeModel: Send + Sync {
    fn is_rooted(&self) -> bool;

    fn degree(&self, u: &VertexAddr) -> Degree;

    /// Whether `u` names a vertex of this tree.
    fn contains(&self, u: &VertexAddr) -> bool {
        if u.is_rooted() != self.is_rooted() {
            return false;
        }
        // spine vertices always exist; check each edge of the path below
        let mut cur = u.clone();
        while !cur.path().is_empty() {
            let p = cur.parent().expect("nonempty path has a parent");
            let j = cur.child_index().expect("nonempty path has an index");
            if !self.degree(&p).admits(j) {
                return false;
            }
            cur = p;
        }
        true
    }

    fn child(&self, u: &VertexAddr, j: u64) -> Option<VertexAddr> {
        self.degree(u).admits(j).then(|| u.child(j))
    }

    fn parent(&self, u: &VertexAddr) -> Option<VertexAddr> {
        u.parent()
    }

    /// The first `count` children in index order (fewer for small finite
    /// degrees).
    fn children(&self, u: &VertexAddr, count: u64) -> Vec<VertexAddr> {
        let n = match self.degree(u) {
            Degree::Finite(d) => d.min(count),
            Degree::Countable => count,
        };
        (1..=n).map(|j| u.child(j)).collect()
    }

    /// The first `width` members of `Chi<n>(base)` in lexicographic order.
    fn generation(&self, base: &VertexAddr, n: usize, width: usize) -> Vec<VertexAddr> {
        let mut out = Vec::with_capacity(width);
        if width > 0 {
            collect_generation(self, base, n, width, &mut out);
        }
        out
    }

    /// `par^k(u)`.
    fn ancestor_chain(&self, u: &VertexAddr, k: u64) -> Result<VertexAddr, TreeError> {
        u.ancestor(k)
    }
}

fn collect_generation<T: TreeModel + ?Sized>(
    tree: &T,
    u: &VertexAddr,
    n: usize,
    width: usize,
    out: &mut Vec<VertexAddr>,
) {
    if n == 0 {
        out.push(u.clone());
        return;
    }
    let limit = match tree.degree(u) {
        Degree::Finite(d) => d,
        Degree::Countable => GENERATION_SCAN_LIMIT,
    };
    for j in 1..=limit {
        if out.len() >= width {
            return;
        }
        collect_generation(tree, &u.child(j), n - 1, width, out);
    }
}

/// The tree in which every vertex has countably many children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonicalTree {
    rooted: bool,
}

impl CanonicalTree {
    pub fn rooted() -> Self {
        CanonicalTree { rooted: true }
    }

    pub fn rootless() -> Self {
        CanonicalTree { rooted: false }
    }

    /// `ε` or the spine vertex `u1 = 0:ε`.
    pub fn base(&self) -> VertexAddr {
        if self.rooted {
            VertexAddr::root()
        } else {
            VertexAddr::spine_vertex(0)
        }
    }
}

impl TreeModel for CanonicalTree {
    fn is_rooted(&self) -> bool {
        self.rooted
    }

    fn degree(&self, _u: &VertexAddr) -> Degree {
        Degree::Countable
    }

    fn contains(&self, u: &VertexAddr) -> bool {
        u.is_rooted() == self.rooted
    }
}

/// A rooted tree with explicitly declared degrees; undeclared vertices use
/// `default`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclaredTree {
    degrees: BTreeMap<VertexAddr, Degree>,
    default: Degree,
}

impl DeclaredTree {
    pub fn new(default: Degree) -> Self {
        DeclaredTree {
            degrees: BTreeMap::new(),
            default,
        }
    }

    /// A finite tree: every undeclared vertex is a leaf.
    pub fn finite() -> Self {
        DeclaredTree::new(Degree::Finite(0))
    }

    pub fn with_degree(mut self, u: VertexAddr, d: Degree) -> Self {
        self.set_degree(u, d);
        self
    }

    pub fn set_degree(&mut self, u: VertexAddr, d: Degree) {
        assert!(u.is_rooted(), "declared trees are rooted");
        self.degrees.insert(u, d);
    }

    pub fn declared(&self) -> impl Iterator<Item = (&VertexAddr, &Degree)> {
        self.degrees.iter()
    }

    /// All vertices, when the tree is finite.
    pub fn vertices(&self) -> Option<Vec<VertexAddr>> {
        let mut out = Vec::new();
        let mut stack = vec![VertexAddr::root()];
        while let Some(u) = stack.pop() {
            match self.degree(&u) {
                Degree::Countable => return None,
                Degree::Finite(d) => {
                    for j in (1..=d).rev() {
                        stack.push(u.child(j));
                    }
                }
            }
            out.push(u);
        }
        Some(out)
    }
}

impl TreeModel for DeclaredTree {
    fn is_rooted(&self) -> bool {
        true
    }

    fn degree(&self, u: &VertexAddr) -> Degree {
        self.degrees.get(u).copied().unwrap_or(self.default)
    }
}
