use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub children: Option<[usize; 2]>,
    pub parent: Option<usize>,
    /// Distance from the leaves for clustered trees; informational otherwise.
    pub height: f64,
    /// Length of the edge to the parent.
    pub branch: f64,
}

/// Rooted binary tree. Nodes `0..n` are the leaves, labelled by sequence
/// index; internal nodes follow in creation order and the root is last.
#[derive(Clone, Debug, PartialEq)]
pub struct GuideTree {
    nodes: Vec<Node>,
    leaves: usize,
}

impl GuideTree {
    /// Starts a tree with `n` unattached leaves; complete it with [`join`](Self::join).
    pub(crate) fn leaves(n: usize) -> Self {
        let leaf = Node {
            children: None,
            parent: None,
            height: 0.0,
            branch: 0.0,
        };
        Self {
            nodes: vec![leaf; n],
            leaves: n,
        }
    }

    /// Adds an internal node over `a` and `b`.
    pub(crate) fn join(&mut self, a: usize, b: usize, branch_a: f64, branch_b: f64, height: f64) -> usize {
        let id = self.nodes.len();
        self.nodes[a].parent = Some(id);
        self.nodes[a].branch = branch_a;
        self.nodes[b].parent = Some(id);
        self.nodes[b].branch = branch_b;
        self.nodes.push(Node {
            children: Some([a, b]),
            parent: None,
            height,
            branch: 0.0,
        });
        id
    }

    /// Builds a tree from nested joins, e.g. for tests and file input.
    /// `merges[k]` creates node `n + k`.
    pub fn from_merges(n: usize, merges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || merges.len() + 1 != n {
            return Err(Error::InvalidParameter(format!("{} merges for {n} leaves", merges.len())));
        }
        let mut t = Self::leaves(n);
        for (k, &(a, b)) in merges.iter().enumerate() {
            let id = n + k;
            if a >= id || b >= id || a == b || t.nodes[a].parent.is_some() || t.nodes[b].parent.is_some() {
                return Err(Error::InvalidParameter(format!("bad merge ({a}, {b})")));
            }
            t.join(a, b, 1.0, 1.0, 0.0);
        }
        Ok(t)
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        id < self.leaves
    }

    pub fn children(&self, id: usize) -> Option<[usize; 2]> {
        self.nodes[id].children
    }

    /// Nodes with children before parents, left subtree first.
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root(), false)];
        while let Some((id, expanded)) = stack.pop() {
            match self.nodes[id].children {
                Some([a, b]) if !expanded => {
                    stack.push((id, true));
                    stack.push((b, false));
                    stack.push((a, false));
                }
                _ => out.push(id),
            }
        }
        out
    }

    /// Sorted leaf labels below `id`.
    pub fn leaves_under(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(v) = stack.pop() {
            match self.nodes[v].children {
                Some([a, b]) => {
                    stack.push(a);
                    stack.push(b);
                }
                None => out.push(v),
            }
        }
        out.sort_unstable();
        out
    }

    /// Edges from the root down to `id`.
    pub fn depth(&self, id: usize) -> usize {
        let mut d = 0;
        let mut v = id;
        while let Some(p) = self.nodes[v].parent {
            d += 1;
            v = p;
        }
        d
    }

    /// Leaf sets of all internal nodes.
    pub fn clusters(&self) -> BTreeSet<Vec<usize>> {
        (self.leaves..self.nodes.len()).map(|id| self.leaves_under(id)).collect()
    }

    /// Unrooted edge set: each split (as the side without leaf 0) with its
    /// length. The two root edges form a single split.
    pub fn unrooted_splits(&self) -> BTreeMap<Vec<usize>, f64> {
        let all: Vec<usize> = (0..self.leaves).collect();
        let mut out = BTreeMap::new();
        for id in 0..self.nodes.len() - 1 {
            let below = self.leaves_under(id);
            let side = if below.contains(&0) {
                all.iter().copied().filter(|x| below.binary_search(x).is_err()).collect()
            } else {
                below
            };
            *out.entry(side).or_insert(0.0) += self.nodes[id].branch;
        }
        out
    }

    /// Parenthesised text with branch lengths, e.g. `((a:1,b:2):0.5,c:1);`.
    pub fn to_newick(&self, names: &[String]) -> String {
        let mut out = String::new();
        self.write_newick(self.root(), names, &mut out);
        out.push(';');
        out
    }

    fn write_newick(&self, id: usize, names: &[String], out: &mut String) {
        match self.nodes[id].children {
            Some([a, b]) => {
                out.push('(');
                self.write_newick(a, names, out);
                out.push(',');
                self.write_newick(b, names, out);
                out.push(')');
            }
            None => out.push_str(names.get(id).map(String::as_str).unwrap_or("?")),
        }
        if id != self.root() {
            out.push_str(&format!(":{}", self.nodes[id].branch));
        }
    }

    /// Checks the binary-tree shape and leaf labelling.
    pub fn validate(&self) -> Result<()> {
        let n = self.leaves;
        if self.nodes.len() != 2 * n - 1 {
            return Err(Error::InvalidParameter("node count is not 2n - 1".into()));
        }
        for (id, node) in self.nodes.iter().enumerate() {
            let is_root = id == self.root();
            if node.parent.is_none() != is_root {
                return Err(Error::InvalidParameter(format!("node {id} parent link")));
            }
            if (id < n) != node.children.is_none() {
                return Err(Error::InvalidParameter(format!("node {id} arity")));
            }
            if let Some([a, b]) = node.children {
                if self.nodes[a].parent != Some(id) || self.nodes[b].parent != Some(id) {
                    return Err(Error::InvalidParameter(format!("node {id} child links")));
                }
            }
        }
        if self.leaves_under(self.root()) != (0..n).collect::<Vec<_>>() {
            return Err(Error::InvalidParameter("leaves are not 0..n".into()));
        }
        Ok(())
    }
}

/// Internal nodes of `new` whose subtree (leaf set and branching order, up to
/// child swaps) does not occur anywhere in `old`.
pub fn compare_trees(old: &GuideTree, new: &GuideTree) -> Result<BTreeSet<usize>> {
    if old.num_leaves() != new.num_leaves() {
        return Err(Error::LeafSetMismatch);
    }
    let mut interner: HashMap<(usize, usize), usize> = HashMap::new();
    let old_shapes = shapes(old, &mut interner);
    let present: std::collections::HashSet<usize> = old_shapes.into_iter().collect();
    let new_shapes = shapes(new, &mut interner);
    Ok((new.num_leaves()..new.num_nodes())
        .filter(|&id| !present.contains(&new_shapes[id]))
        .collect())
}

/// Canonical shape id of every node; leaves map to their label.
fn shapes(t: &GuideTree, interner: &mut HashMap<(usize, usize), usize>) -> Vec<usize> {
    let n = t.num_leaves();
    let mut shape = vec![0usize; t.num_nodes()];
    for id in t.postorder() {
        shape[id] = match t.children(id) {
            None => id,
            Some([a, b]) => {
                let key = (shape[a].min(shape[b]), shape[a].max(shape[b]));
                let next = n + interner.len();
                *interner.entry(key).or_insert(next)
            }
        };
    }
    shape
}
