//! Unordered rooted trees up to root-preserving isomorphism.
//!
//! A tree is encoded as `(` + the sorted codes of its root's subtrees + `)`,
//! so the singleton is `()`, the two-vertex path `(())` and the three-vertex
//! star `(()())`. Equal codes means isomorphic trees.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalTree {
    code: String,
}

impl CanonicalTree {
    pub fn singleton() -> Self {
        CanonicalTree { code: "()".into() }
    }

    /// Tree whose root has the given subtrees, in any order.
    pub fn from_children(mut children: Vec<CanonicalTree>) -> Self {
        children.sort_unstable_by(|a, b| a.code.cmp(&b.code));
        let len = 2 + children.iter().map(|c| c.code.len()).sum::<usize>();
        let mut code = String::with_capacity(len);
        code.push('(');
        for c in &children {
            code.push_str(&c.code);
        }
        code.push(')');
        CanonicalTree { code }
    }

    /// Path on `k >= 1` vertices hanging from the root.
    pub fn path(k: usize) -> Self {
        assert!(k >= 1);
        CanonicalTree {
            code: "(".repeat(k) + &")".repeat(k),
        }
    }

    /// Root with `k - 1` leaf children.
    pub fn star(k: usize) -> Self {
        assert!(k >= 1);
        CanonicalTree::from_children(vec![CanonicalTree::singleton(); k - 1])
    }

    /// Canonical form of the tree with `parents[j]` = parent of vertex `j + 2`
    /// (vertex 1 is the root, parents precede children).
    pub fn from_parents(parents: &[usize]) -> Result<Self> {
        let n = parents.len() + 1;
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for (j, &p) in parents.iter().enumerate() {
            let v = j + 2;
            if p == 0 || p >= v {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} cannot have parent {p}"
                )));
            }
            children[p].push(v);
        }
        let mut codes: Vec<Option<CanonicalTree>> = vec![None; n + 1];
        for v in (1..=n).rev() {
            let kids = children[v]
                .iter()
                .map(|&c| codes[c].take().expect("child encoded"))
                .collect();
            codes[v] = Some(CanonicalTree::from_children(kids));
        }
        Ok(codes[1].take().expect("root encoded"))
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn size(&self) -> usize {
        self.code.len() / 2
    }

    /// Number of children of the root.
    pub fn root_degree(&self) -> usize {
        let mut depth = 0usize;
        let mut count = 0;
        for b in self.code.bytes() {
            if b == b'(' {
                depth += 1;
                if depth == 2 {
                    count += 1;
                }
            } else {
                depth -= 1;
            }
        }
        count
    }

    /// Subtrees rooted at the root's children, in canonical order.
    pub fn root_children(&self) -> Vec<CanonicalTree> {
        let bytes = self.code.as_bytes();
        let mut out = Vec::new();
        let mut depth = 0usize;
        let mut start = 0;
        for (i, &b) in bytes.iter().enumerate().take(bytes.len() - 1).skip(1) {
            if b == b'(' {
                if depth == 0 {
                    start = i;
                }
                depth += 1;
            } else {
                depth -= 1;
                if depth == 0 {
                    out.push(CanonicalTree {
                        code: self.code[start..=i].to_string(),
                    });
                }
            }
        }
        out
    }

    /// A labelled representative: `parents[j]` is the parent of vertex `j + 2`,
    /// numbered in depth-first preorder.
    pub fn to_parents(&self) -> Vec<usize> {
        let mut parents = Vec::with_capacity(self.size().saturating_sub(1));
        let mut stack: Vec<usize> = Vec::new();
        let mut next = 0;
        for b in self.code.bytes() {
            if b == b'(' {
                next += 1;
                if let Some(&p) = stack.last() {
                    parents.push(p);
                }
                stack.push(next);
            } else {
                stack.pop();
            }
        }
        parents
    }

    /// Child count of every vertex of [`Self::to_parents`], indexed from 1.
    pub fn child_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.size() + 1];
        for p in self.to_parents() {
            counts[p] += 1;
        }
        counts
    }

    /// The tree obtained by hanging a new leaf under each vertex of the
    /// preorder representative, one entry per vertex.
    pub fn leaf_extensions(&self) -> Vec<CanonicalTree> {
        let parents = self.to_parents();
        let mut extended = parents.clone();
        extended.push(0);
        (1..=self.size())
            .map(|u| {
                *extended.last_mut().unwrap() = u;
                CanonicalTree::from_parents(&extended).expect("valid extension")
            })
            .collect()
    }

    /// All shapes with exactly `size` vertices, sorted.
    pub fn enumerate(size: usize) -> Vec<CanonicalTree> {
        if size == 0 {
            return Vec::new();
        }
        let mut level: BTreeSet<CanonicalTree> = BTreeSet::from([CanonicalTree::singleton()]);
        for _ in 1..size {
            level = level.iter().flat_map(|t| t.leaf_extensions()).collect();
        }
        level.into_iter().collect()
    }

    /// All shapes with at most `cap` vertices, by size then code.
    pub fn enumerate_up_to(cap: usize) -> Vec<CanonicalTree> {
        (1..=cap).flat_map(CanonicalTree::enumerate).collect()
    }
}

/// `Q(s, t)`: number of subtrees hanging from the root of `s` equal to `t`.
pub fn q_matrix(s: &CanonicalTree, t: &CanonicalTree) -> usize {
    s.root_children().iter().filter(|c| *c == t).count()
}

impl Ord for CanonicalTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code
            .len()
            .cmp(&other.code.len())
            .then_with(|| self.code.cmp(&other.code))
    }
}

impl PartialOrd for CanonicalTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CanonicalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

impl FromStr for CanonicalTree {
    type Err = Error;

    /// Accepts any balanced parenthesisation of a single tree and
    /// canonicalises it.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("'{s}' is not a rooted tree code"));
        let bytes = s.trim().as_bytes();
        if bytes.is_empty() || bytes[0] != b'(' {
            return Err(bad());
        }
        let mut parents = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut next = 0;
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => {
                    if stack.is_empty() && i > 0 {
                        return Err(bad());
                    }
                    next += 1;
                    if let Some(&p) = stack.last() {
                        parents.push(p);
                    }
                    stack.push(next);
                }
                b')' => {
                    stack.pop().ok_or_else(bad)?;
                }
                _ => return Err(bad()),
            }
        }
        if !stack.is_empty() {
            return Err(bad());
        }
        CanonicalTree::from_parents(&parents)
    }
}
