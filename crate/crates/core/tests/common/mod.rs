#![allow(dead_code)]

use raag::SimpleGraph;

/// One representative per isomorphism class of graphs on exactly `n` vertices.
pub fn graphs_on(n: usize) -> Vec<SimpleGraph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let names: Vec<String> = SimpleGraph::null(n).names().to_vec();
    let mut reps: Vec<(Vec<usize>, SimpleGraph)> = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        let g = SimpleGraph::from_indices(names.clone(), &edges).unwrap();
        let mut degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
        degrees.sort_unstable();
        if !reps
            .iter()
            .any(|(d, h)| *d == degrees && h.is_isomorphic(&g, 10).unwrap())
        {
            reps.push((degrees, g));
        }
    }
    reps.into_iter().map(|(_, g)| g).collect()
}

/// Representatives of all graphs with 1 to `n` vertices.
pub fn graphs_up_to(n: usize) -> Vec<SimpleGraph> {
    (1..=n).flat_map(graphs_on).collect()
}

/// Every assignment of values `1..=max` to `n` vertices.
pub fn assignments(n: usize, max: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|a| {
                (1..=max).map(move |r| {
                    let mut b = a.clone();
                    b.push(r);
                    b
                })
            })
            .collect();
    }
    out
}
