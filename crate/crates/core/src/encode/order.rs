//! Component orderings: span measure and the center-of-gravity (FORCE)
//! heuristic over the interaction hypergraph.

use crate::model::System;

/// Participant lists of every interaction, used as hyperedges over
/// component indices.
pub fn hyperedges(s: &System) -> Vec<Vec<usize>> {
    (0..s.interactions().len())
        .map(|sigma| s.participants(sigma).to_vec())
        .collect()
}

/// Sum over hyperedges of `max position - min position` under `order`,
/// where `order[k]` is the vertex placed at position `k`.
pub fn span_sum(edges: &[Vec<usize>], order: &[usize]) -> usize {
    let pos = positions(order);
    edges
        .iter()
        .filter(|e| !e.is_empty())
        .map(|e| {
            let ps = e.iter().map(|&v| pos[v]);
            ps.clone().max().unwrap() - ps.min().unwrap()
        })
        .sum()
}

fn positions(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    pos
}

/// FORCE: place each hyperedge at the mean position of its vertices, move
/// each vertex to the mean of its hyperedges' centers, and re-sort (stable).
/// Stops after `max_iters` rounds or once the span stops decreasing;
/// returns the best order seen.
pub fn force_order(edges: &[Vec<usize>], initial: &[usize], max_iters: usize) -> Vec<usize> {
    let n = initial.len();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, vs) in edges.iter().enumerate() {
        for &v in vs {
            incident[v].push(e);
        }
    }
    let mut order = initial.to_vec();
    let mut best = order.clone();
    let mut best_span = span_sum(edges, &order);
    for _ in 0..max_iters.max(1) {
        let pos = positions(&order);
        let cog: Vec<f64> = edges
            .iter()
            .map(|vs| {
                if vs.is_empty() {
                    0.0
                } else {
                    vs.iter().map(|&v| pos[v] as f64).sum::<f64>() / vs.len() as f64
                }
            })
            .collect();
        let value: Vec<f64> = (0..n)
            .map(|v| {
                if incident[v].is_empty() {
                    pos[v] as f64
                } else {
                    incident[v].iter().map(|&e| cog[e]).sum::<f64>() / incident[v].len() as f64
                }
            })
            .collect();
        let mut next = order.clone();
        next.sort_by(|&a, &b| value[a].total_cmp(&value[b]));
        let span = span_sum(edges, &next);
        order = next;
        if span < best_span {
            best_span = span;
            best = order.clone();
        } else {
            break;
        }
    }
    best
}
