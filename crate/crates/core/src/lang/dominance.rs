//! Dominator trees over dense adjacency lists.
//!
//! Uses the iterative reverse-postorder intersection scheme of Cooper, Harvey
//! and Kennedy. Post-dominators are dominators of the reversed graph.

/// Edge-reversed adjacency.
pub fn reverse(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); adj.len()];
    for (from, succs) in adj.iter().enumerate() {
        for &to in succs {
            out[to].push(from);
        }
    }
    out
}

fn postorder(adj: &[Vec<usize>], root: usize) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut order = Vec::with_capacity(adj.len());
    let mut stack = vec![(root, 0usize)];
    seen[root] = true;
    while let Some((n, k)) = stack.pop() {
        if k < adj[n].len() {
            stack.push((n, k + 1));
            let m = adj[n][k];
            if !seen[m] {
                seen[m] = true;
                stack.push((m, 0));
            }
        } else {
            order.push(n);
        }
    }
    order
}

/// Immediate dominator of every node reachable from `root`; `None` for the
/// root itself and for unreachable nodes.
pub fn immediate_dominators(adj: &[Vec<usize>], root: usize) -> Vec<Option<usize>> {
    let n = adj.len();
    let post = postorder(adj, root);
    let mut rank = vec![usize::MAX; n];
    for (i, &v) in post.iter().enumerate() {
        rank[v] = i;
    }
    let preds = reverse(adj);
    let mut idom: Vec<Option<usize>> = vec![None; n];
    idom[root] = Some(root);

    let intersect = |idom: &[Option<usize>], mut a: usize, mut b: usize| {
        while a != b {
            while rank[a] < rank[b] {
                a = idom[a].expect("processed node");
            }
            while rank[b] < rank[a] {
                b = idom[b].expect("processed node");
            }
        }
        a
    };

    let mut changed = true;
    while changed {
        changed = false;
        for &v in post.iter().rev() {
            if v == root {
                continue;
            }
            let mut new: Option<usize> = None;
            for &p in &preds[v] {
                if idom[p].is_none() {
                    continue;
                }
                new = Some(match new {
                    None => p,
                    Some(cur) => intersect(&idom, p, cur),
                });
            }
            if new.is_some() && idom[v] != new {
                idom[v] = new;
                changed = true;
            }
        }
    }
    idom[root] = None;
    idom
}

/// Whether `a` is `b` or an ancestor of `b` in the tree given by `parent`.
pub fn in_tree_above(parent: &[Option<usize>], a: usize, b: usize) -> bool {
    let mut cur = Some(b);
    while let Some(c) = cur {
        if c == a {
            return true;
        }
        cur = parent[c];
    }
    false
}
