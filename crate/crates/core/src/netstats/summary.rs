use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Graph;

/// How nodes with degree < 2 enter the mean clustering coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowDegreeClustering {
    /// Count them with coefficient 0.
    #[default]
    Zero,
    /// Leave them out of the mean.
    Exclude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub avg_degree: f64,
    /// Absent when no node qualifies under [`LowDegreeClustering::Exclude`].
    pub avg_clustering: Option<f64>,
    pub giant_component_size: usize,
    /// Mean over unordered node pairs of the giant component; absent when it
    /// has a single node.
    pub avg_shortest_path: Option<f64>,
}

pub fn summarize(graph: &Graph) -> Result<NetworkSummary> {
    summarize_with(graph, LowDegreeClustering::Zero)
}

pub fn summarize_with(graph: &Graph, low_degree: LowDegreeClustering) -> Result<NetworkSummary> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::EmptyInput("network has no nodes".into()));
    }
    let adj = graph.adjacency();
    let m = graph.edge_count();
    let giant = giant_component(&adj);
    Ok(NetworkSummary {
        n_nodes: n,
        n_edges: m,
        avg_degree: 2.0 * m as f64 / n as f64,
        avg_clustering: avg_clustering(&adj, low_degree),
        giant_component_size: giant.len(),
        avg_shortest_path: avg_shortest_path(&adj, &giant),
    })
}

/// Local clustering coefficient; `None` for degree < 2.
pub(crate) fn local_clustering(adj: &[Vec<usize>], v: usize) -> Option<f64> {
    let nb = &adj[v];
    let k = nb.len();
    if k < 2 {
        return None;
    }
    let mut links = 0usize;
    for (i, &x) in nb.iter().enumerate() {
        for &y in &nb[i + 1..] {
            if adj[x].binary_search(&y).is_ok() {
                links += 1;
            }
        }
    }
    Some(2.0 * links as f64 / (k * (k - 1)) as f64)
}

fn avg_clustering(adj: &[Vec<usize>], low_degree: LowDegreeClustering) -> Option<f64> {
    let vals: Vec<f64> = (0..adj.len())
        .filter_map(|v| match (local_clustering(adj, v), low_degree) {
            (Some(c), _) => Some(c),
            (None, LowDegreeClustering::Zero) => Some(0.0),
            (None, LowDegreeClustering::Exclude) => None,
        })
        .collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

fn bfs(adj: &[Vec<usize>], src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap_or(0);
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Largest connected component; ties go to the one holding the smallest
/// node index.
pub(crate) fn giant_component(adj: &[Vec<usize>]) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut best: Vec<usize> = Vec::new();
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        let comp: Vec<usize> = bfs(adj, s)
            .iter()
            .enumerate()
            .filter_map(|(v, d)| d.map(|_| v))
            .collect();
        for &v in &comp {
            seen[v] = true;
        }
        if comp.len() > best.len() {
            best = comp;
        }
    }
    best
}

fn avg_shortest_path(adj: &[Vec<usize>], component: &[usize]) -> Option<f64> {
    let k = component.len();
    if k < 2 {
        return None;
    }
    let total: u64 = component
        .par_iter()
        .map(|&s| {
            bfs(adj, s)
                .iter()
                .enumerate()
                .filter(|(v, _)| *v > s)
                .filter_map(|(_, d)| d.map(|d| d as u64))
                .sum::<u64>()
        })
        .sum();
    let pairs = (k * (k - 1) / 2) as f64;
    Some(total as f64 / pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Edge, UserId};
    use proptest::prelude::*;

    fn u(i: usize) -> UserId {
        UserId::new(format!("u{i:02}")).unwrap()
    }

    fn graph(n: usize, pairs: &[(usize, usize)]) -> Graph {
        Graph::new(
            (0..n).map(u),
            pairs.iter().filter_map(|(a, b)| Edge::new(u(*a), u(*b))),
        )
    }

    #[test]
    fn average_degree_arithmetic() {
        let chain: Vec<_> = (0..155).map(|i| (i, i + 1)).collect();
        let s = summarize(&graph(157, &chain)).unwrap();
        assert_eq!(s.avg_degree, 310.0 / 157.0);
        assert!((s.avg_degree - 1.98).abs() < 0.01);
    }

    #[test]
    fn complete_k4() {
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let s = summarize(&graph(4, &pairs)).unwrap();
        assert_eq!(s.avg_degree, 3.0);
        assert_eq!(s.avg_clustering, Some(1.0));
        assert_eq!(s.avg_shortest_path, Some(1.0));
        assert_eq!(s.giant_component_size, 4);
    }

    #[test]
    fn clustering_conventions() {
        // triangle plus a pendant: coefficients 1, 1, 1/3, and 0 for the leaf
        let g = graph(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        let zero = summarize(&g).unwrap().avg_clustering.unwrap();
        assert!((zero - (1.0 + 1.0 + 1.0 / 3.0) / 4.0).abs() < 1e-12);
        let excl = summarize_with(&g, LowDegreeClustering::Exclude).unwrap().avg_clustering.unwrap();
        assert!((excl - (1.0 + 1.0 + 1.0 / 3.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn giant_component_only() {
        // path of 3 plus a separate edge and an isolated node
        let s = summarize(&graph(6, &[(0, 1), (1, 2), (3, 4)])).unwrap();
        assert_eq!(s.giant_component_size, 3);
        assert!((s.avg_shortest_path.unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!(summarize(&Graph::default()).is_err());
        let lone = summarize(&graph(1, &[])).unwrap();
        assert_eq!((lone.avg_degree, lone.avg_shortest_path), (0.0, None));
    }

    fn floyd(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<Option<usize>>> {
        let mut d = vec![vec![None; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = Some(0);
        }
        for &(a, b) in pairs {
            if a != b {
                d[a][b] = Some(1);
                d[b][a] = Some(1);
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                        if d[i][j].is_none_or(|c| x + y < c) {
                            d[i][j] = Some(x + y);
                        }
                    }
                }
            }
        }
        d
    }

    proptest! {
        #[test]
        fn brute_force_small_graphs(n in 1usize..=8, raw in proptest::collection::vec((0usize..8, 0usize..8), 0..20)) {
            let pairs: Vec<_> = raw.into_iter().filter(|(a, b)| *a < n && *b < n).collect();
            let g = graph(n, &pairs);
            let s = summarize(&g).unwrap();
            prop_assert_eq!(s.avg_degree, 2.0 * s.n_edges as f64 / s.n_nodes as f64);
            prop_assert!(s.giant_component_size <= s.n_nodes);

            let mut adj = vec![vec![false; n]; n];
            for &(a, b) in &pairs {
                if a != b {
                    adj[a][b] = true;
                    adj[b][a] = true;
                }
            }
            // clustering by enumerating triples
            let mut csum = 0.0;
            for v in 0..n {
                let nb: Vec<usize> = (0..n).filter(|w| adj[v][*w]).collect();
                if nb.len() >= 2 {
                    let mut closed = 0;
                    let mut all = 0;
                    for i in 0..nb.len() {
                        for j in i + 1..nb.len() {
                            all += 1;
                            if adj[nb[i]][nb[j]] {
                                closed += 1;
                            }
                        }
                    }
                    csum += closed as f64 / all as f64;
                }
            }
            prop_assert!((s.avg_clustering.unwrap() - csum / n as f64).abs() < 1e-12);

            // shortest paths by Floyd-Warshall over the component sizes
            let d = floyd(n, &pairs);
            let comp_size = |v: usize| d[v].iter().filter(|x| x.is_some()).count();
            let gsize = (0..n).map(comp_size).max().unwrap();
            prop_assert_eq!(s.giant_component_size, gsize);
            let root = (0..n).find(|v| comp_size(*v) == gsize).unwrap();
            let members: Vec<usize> = (0..n).filter(|v| d[root][*v].is_some()).collect();
            let mut tot = 0;
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    tot += d[members[i]][members[j]].unwrap();
                }
            }
            let expect = (gsize >= 2).then(|| tot as f64 / (gsize * (gsize - 1) / 2) as f64);
            match (s.avg_shortest_path, expect) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
                (a, b) => prop_assert_eq!(a, b),
            }
        }
    }
}
