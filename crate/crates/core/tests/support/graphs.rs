//! Connected graphs up to isomorphism, and every open graph over them with
//! small input and output sets.

use std::collections::BTreeSet;

use zxverify::flow::{Node, OpenGraph};

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let w = if a == v { b } else if b == v { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// One edge list per isomorphism class of connected graphs on `n` vertices.
pub fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let all = pairs(n);
    let index = |a: usize, b: usize| all.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
    let perms = permutations(n);
    let mut classes = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << all.len()) {
        let edges: Vec<(usize, usize)> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        if !connected(n, &edges) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| edges.iter().fold(0u32, |m, &(a, b)| m | 1 << index(p[a], p[b])))
            .min()
            .unwrap();
        if classes.insert(canon) {
            out.push(edges);
        }
    }
    out
}

fn subsets(n: usize, max: usize) -> Vec<Vec<Node>> {
    let mut out = vec![vec![]];
    for a in 1..=n as Node {
        out.push(vec![a]);
        if max >= 2 {
            for b in a + 1..=n as Node {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

/// Every open graph on a connected graph with at most `max_n` vertices and
/// at most `max_io` inputs and outputs. Vertices are numbered from 1.
pub fn open_graphs(max_n: usize, max_io: usize) -> Vec<OpenGraph> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for edges in connected_graphs(n) {
            let es: Vec<(Node, Node)> = edges.iter().map(|&(a, b)| (a as Node + 1, b as Node + 1)).collect();
            for i in subsets(n, max_io) {
                for o in subsets(n, max_io) {
                    out.push(OpenGraph::new(1..=n as Node, es.clone(), i.clone(), o).unwrap());
                }
            }
        }
    }
    out
}
