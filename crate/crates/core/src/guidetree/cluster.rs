use super::{DistanceMatrix, GuideTree};
use crate::{Error, Result};

/// Average-linkage agglomeration. `better(a, b)` says whether value `a`
/// beats `b`; ties go to the smallest index pair in the active list.
fn agglomerate(
    n: usize,
    value: impl Fn(usize, usize) -> f64,
    better: impl Fn(f64, f64) -> bool,
    height: impl Fn(f64) -> f64,
) -> GuideTree {
    let mut tree = GuideTree::leaves(n);
    // (node id, size) per active cluster
    let mut active: Vec<(usize, usize)> = (0..n).map(|i| (i, 1)).collect();
    let mut d: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| value(i, j)).collect()).collect();
    while active.len() > 1 {
        let mut best = (0, 1);
        for p in 0..active.len() {
            for q in p + 1..active.len() {
                if better(d[p][q], d[best.0][best.1]) {
                    best = (p, q);
                }
            }
        }
        let (p, q) = best;
        let h = height(d[p][q]);
        let (a, sa) = active[p];
        let (b, sb) = active[q];
        let branch_a = (h - tree.node(a).height).max(0.0);
        let branch_b = (h - tree.node(b).height).max(0.0);
        let id = tree.join(a, b, branch_a, branch_b, h);
        for k in 0..active.len() {
            if k != p && k != q {
                let v = (d[p][k] * sa as f64 + d[q][k] * sb as f64) / (sa + sb) as f64;
                d[p][k] = v;
                d[k][p] = v;
            }
        }
        active[p] = (id, sa + sb);
        active.remove(q);
        d.remove(q);
        for row in &mut d {
            row.remove(q);
        }
    }
    tree
}

/// UPGMA: merge the closest clusters; node height is half the merge distance.
pub fn upgma(d: &DistanceMatrix) -> Result<GuideTree> {
    if d.len() < 2 {
        return Err(Error::InvalidParameter("at least 2 sequences are needed for a tree".into()));
    }
    Ok(agglomerate(d.len(), |i, j| d.get(i, j), |a, b| a < b, |v| v / 2.0))
}

/// Agglomerates on a similarity table, merging the most similar clusters.
pub fn cluster_by_similarity(sim: &[Vec<f64>]) -> Result<GuideTree> {
    if sim.len() < 2 {
        return Err(Error::InvalidParameter("at least 2 sequences are needed for a tree".into()));
    }
    Ok(agglomerate(sim.len(), |i, j| sim[i][j], |a, b| a > b, |v| (1.0 - v).max(0.0) / 2.0))
}

/// Neighbor joining, rooted at the midpoint of the longest leaf-to-leaf path.
pub fn neighbor_joining(d: &DistanceMatrix) -> Result<GuideTree> {
    let n = d.len();
    if n < 2 {
        return Err(Error::InvalidParameter("at least 2 sequences are needed for a tree".into()));
    }
    if n == 2 {
        let mut t = GuideTree::leaves(2);
        let half = d.get(0, 1) / 2.0;
        t.join(0, 1, half, half, half);
        return Ok(t);
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut active: Vec<usize> = (0..n).collect();
    let mut dm: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| d.get(i, j)).collect()).collect();
    while active.len() > 2 {
        let r = active.len();
        let sums: Vec<f64> = dm.iter().map(|row| row.iter().sum()).collect();
        let mut best = (f64::INFINITY, 0, 1);
        for p in 0..r {
            for q in p + 1..r {
                let qv = (r as f64 - 2.0) * dm[p][q] - sums[p] - sums[q];
                if qv < best.0 {
                    best = (qv, p, q);
                }
            }
        }
        let (_, p, q) = best;
        let dpq = dm[p][q];
        let bp = (dpq / 2.0 + (sums[p] - sums[q]) / (2.0 * (r as f64 - 2.0))).max(0.0);
        let bq = (dpq - bp).max(0.0);
        let u = adj.len();
        adj.push(Vec::new());
        link(&mut adj, u, active[p], bp);
        link(&mut adj, u, active[q], bq);
        for k in 0..r {
            if k != p && k != q {
                let v = ((dm[p][k] + dm[q][k] - dpq) / 2.0).max(0.0);
                dm[p][k] = v;
                dm[k][p] = v;
            }
        }
        dm[p][p] = 0.0;
        active[p] = u;
        active.remove(q);
        dm.remove(q);
        for row in &mut dm {
            row.remove(q);
        }
    }
    link(&mut adj, active[0], active[1], dm[0][1].max(0.0));
    Ok(midpoint_root(n, &adj))
}

fn link(adj: &mut [Vec<(usize, f64)>], a: usize, b: usize, len: f64) {
    adj[a].push((b, len));
    adj[b].push((a, len));
}

/// Distances and predecessors from `src` over an unrooted tree.
fn sweep(adj: &[Vec<(usize, f64)>], src: usize) -> (Vec<f64>, Vec<usize>) {
    let mut dist = vec![f64::NAN; adj.len()];
    let mut prev = vec![usize::MAX; adj.len()];
    dist[src] = 0.0;
    let mut stack = vec![src];
    while let Some(v) = stack.pop() {
        for &(w, len) in &adj[v] {
            if dist[w].is_nan() {
                dist[w] = dist[v] + len;
                prev[w] = v;
                stack.push(w);
            }
        }
    }
    (dist, prev)
}

fn midpoint_root(n: usize, adj: &[Vec<(usize, f64)>]) -> GuideTree {
    // longest leaf pair, smallest indices on ties
    let mut far = (f64::NEG_INFINITY, 0, 1);
    let mut from_a = Vec::new();
    for a in 0..n {
        let (dist, prev) = sweep(adj, a);
        for b in a + 1..n {
            if dist[b] > far.0 {
                far = (dist[b], a, b);
                from_a = prev.clone();
            }
        }
    }
    let (total, a, b) = far;
    // walk from b back towards a until the midpoint edge is found
    let half = total / 2.0;
    let (dist_a, _) = sweep(adj, a);
    let mut v = b;
    let mut u = from_a[v];
    while dist_a[u] > half {
        v = u;
        u = from_a[v];
    }
    // root sits on edge (u, v) with u nearer a
    let len = edge_len(adj, u, v);
    let to_u = (half - dist_a[u]).clamp(0.0, len);
    let to_v = len - to_u;

    let mut tree = GuideTree::leaves(n);
    let left = build(adj, u, v, &mut tree);
    let right = build(adj, v, u, &mut tree);
    let hl = tree.node(left).height + to_u;
    let hr = tree.node(right).height + to_v;
    tree.join(left, right, to_u, to_v, hl.max(hr));
    tree
}

fn edge_len(adj: &[Vec<(usize, f64)>], a: usize, b: usize) -> f64 {
    adj[a].iter().find(|&&(w, _)| w == b).map(|&(_, l)| l).expect("adjacent nodes")
}

/// Adds the subtree hanging from `v` (away from `parent`) and returns its node id.
fn build(adj: &[Vec<(usize, f64)>], v: usize, parent: usize, tree: &mut GuideTree) -> usize {
    let kids: Vec<(usize, f64)> = adj[v].iter().copied().filter(|&(w, _)| w != parent).collect();
    match kids.as_slice() {
        [] => v,
        [(a, la), (b, lb)] => {
            let x = build(adj, *a, v, tree);
            let y = build(adj, *b, v, tree);
            let h = (tree.node(x).height + la).max(tree.node(y).height + lb);
            tree.join(x, y, *la, *lb, h)
        }
        _ => unreachable!("joined trees are binary"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn dm(rows: Vec<Vec<f64>>) -> DistanceMatrix {
        let ids = (0..rows.len()).map(|i| format!("s{i}")).collect();
        DistanceMatrix::new(ids, rows).unwrap()
    }

    #[test]
    fn upgma_hand_trace() {
        let t = upgma(&dm(vec![vec![0.0, 2.0, 4.0], vec![2.0, 0.0, 4.0], vec![4.0, 4.0, 0.0]])).unwrap();
        t.validate().unwrap();
        assert_eq!(t.children(3), Some([0, 1]));
        assert_eq!(t.node(3).height, 1.0);
        assert_eq!(t.children(4), Some([3, 2]));
        assert_eq!(t.node(4).height, 2.0);
    }

    #[test]
    fn upgma_two_leaves_and_ties() {
        let t = upgma(&dm(vec![vec![0.0, 3.0], vec![3.0, 0.0]])).unwrap();
        assert_eq!(t.children(t.root()), Some([0, 1]));
        let eq = dm(vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]]);
        assert_eq!(upgma(&eq).unwrap().children(3), Some([0, 1]));
    }

    #[test]
    fn nj_recovers_additive_four_leaf_tree() {
        // ((A:1,B:2):1,(C:3,D:1)) as an unrooted tree
        let d = dm(vec![
            vec![0.0, 3.0, 5.0, 3.0],
            vec![3.0, 0.0, 6.0, 4.0],
            vec![5.0, 6.0, 0.0, 4.0],
            vec![3.0, 4.0, 4.0, 0.0],
        ]);
        let t = neighbor_joining(&d).unwrap();
        t.validate().unwrap();
        let splits = t.unrooted_splits();
        let expect = [
            (vec![1, 2, 3], 1.0),
            (vec![1], 2.0),
            (vec![2], 3.0),
            (vec![3], 1.0),
            (vec![2, 3], 1.0),
        ];
        assert_eq!(splits.len(), expect.len());
        for (side, len) in expect {
            assert!((splits[&side] - len).abs() < 1e-9, "{side:?}");
        }
    }

    #[test]
    fn nj_trivial_and_star() {
        let t = neighbor_joining(&dm(vec![vec![0.0, 2.0], vec![2.0, 0.0]])).unwrap();
        assert_eq!(t.node(0).branch, 1.0);
        let star = dm(vec![vec![0.0, 2.0, 2.0, 2.0], vec![2.0, 0.0, 2.0, 2.0], vec![2.0, 2.0, 0.0, 2.0], vec![2.0, 2.0, 2.0, 0.0]]);
        let a = neighbor_joining(&star).unwrap();
        a.validate().unwrap();
        assert_eq!(a, neighbor_joining(&star).unwrap());
    }

    #[test]
    fn similarity_clustering_merges_most_similar() {
        let sim = vec![vec![1.0, 0.2, 0.9], vec![0.2, 1.0, 0.3], vec![0.9, 0.3, 1.0]];
        let t = cluster_by_similarity(&sim).unwrap();
        assert_eq!(t.clusters(), BTreeSet::from([vec![0, 2], vec![0, 1, 2]]));
    }
}
