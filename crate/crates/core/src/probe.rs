//! Finite probe windows over infinite trees.

use std::collections::BTreeSet;

use crate::tree::{TreeModel, VertexAddr};

pub const DEFAULT_DEPTH: usize = 6;
pub const DEFAULT_WIDTH: usize = 64;

/// The vertices a window-based check visits.
///
/// For each base and each level `n <= depth` the window holds the first
/// `width` members of `Chi<n>(base)` in lexicographic order together with
/// the uniform paths `base.j.j...j` (`n` copies of `j`, `j <= width`), so
/// that large child indices are exercised at every depth. Rooted trees use
/// the root as the only base; rootless trees use the spine vertices
/// `u1 .. u_{depth+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbeWindow {
    pub depth: usize,
    pub width: usize,
}

impl Default for ProbeWindow {
    fn default() -> Self {
        ProbeWindow {
            depth: DEFAULT_DEPTH,
            width: DEFAULT_WIDTH,
        }
    }
}

impl ProbeWindow {
    pub fn new(depth: usize, width: usize) -> Self {
        ProbeWindow { depth, width }
    }

    pub fn bases(&self, tree: &dyn TreeModel) -> Vec<VertexAddr> {
        if tree.is_rooted() {
            vec![VertexAddr::root()]
        } else {
            (0..=self.depth as u64).map(VertexAddr::spine_vertex).collect()
        }
    }

    /// Window vertices in address order, without duplicates.
    pub fn vertices(&self, tree: &dyn TreeModel) -> Vec<VertexAddr> {
        let mut seen = BTreeSet::new();
        for base in self.bases(tree) {
            for n in 0..=self.depth {
                seen.extend(tree.generation(&base, n, self.width));
                if n == 0 {
                    continue;
                }
                for j in 1..=self.width as u64 {
                    let v = (0..n).fold(base.clone(), |v, _| v.child(j));
                    if tree.contains(&v) {
                        seen.insert(v);
                    }
                }
            }
        }
        seen.into_iter().collect()
    }
}
