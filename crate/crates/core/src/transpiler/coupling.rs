use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected connectivity between physical qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CouplingMapDoc", into = "CouplingMapDoc")]
pub struct CouplingMap {
    n_physical: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CouplingMapDoc {
    n_physical: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<CouplingMapDoc> for CouplingMap {
    type Error = Error;

    fn try_from(doc: CouplingMapDoc) -> Result<Self> {
        CouplingMap::new(doc.n_physical, doc.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<CouplingMap> for CouplingMapDoc {
    fn from(map: CouplingMap) -> Self {
        CouplingMapDoc {
            n_physical: map.n_physical,
            edges: map.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

/// Edges of the seven-qubit H-shaped device: two vertical bars (0–1–2 and
/// 4–5–6) joined through qubit 3.
pub const JAKARTA_EDGES: [(usize, usize); 6] = [(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)];

impl CouplingMap {
    /// Build and validate a map. Edges are undirected; the graph must be connected.
    pub fn new(n_physical: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n_physical == 0 {
            return Err(Error::Validation("coupling map has no qubits".into()));
        }
        let mut set = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); n_physical];
        for (a, b) in edges {
            if a >= n_physical || b >= n_physical {
                return Err(Error::Validation(format!(
                    "edge ({a}, {b}) outside {n_physical} qubits"
                )));
            }
            if a == b {
                return Err(Error::Validation(format!("self-loop on qubit {a}")));
            }
            if set.insert((a.min(b), a.max(b))) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for neighbors in &mut adjacency {
            neighbors.sort_unstable();
        }
        let map = CouplingMap {
            n_physical,
            edges: set,
            adjacency,
        };
        let reached = map.bfs_parents(0).iter().filter(|p| p.is_some()).count();
        if reached != n_physical {
            return Err(Error::Validation(format!(
                "coupling map is disconnected ({reached} of {n_physical} qubits reachable from 0)"
            )));
        }
        Ok(map)
    }

    pub fn jakarta() -> Self {
        CouplingMap::new(7, JAKARTA_EDGES).expect("static map is valid")
    }

    pub fn fully_connected(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        CouplingMap::new(n, edges).expect("complete graph is valid")
    }

    pub fn linear(n: usize) -> Self {
        CouplingMap::new(n, (1..n).map(|b| (b - 1, b))).expect("path graph is valid")
    }

    /// Resolve a named map (`jakarta`, `full:N`, `line:N`).
    pub fn named(name: &str) -> Option<Self> {
        if name == "jakarta" {
            return Some(CouplingMap::jakarta());
        }
        let (kind, n) = name.split_once(':')?;
        let n: usize = n.parse().ok().filter(|&n| n > 0)?;
        match kind {
            "full" => Some(CouplingMap::fully_connected(n)),
            "line" => Some(CouplingMap::linear(n)),
            _ => None,
        }
    }

    pub fn n_physical(&self) -> usize {
        self.n_physical
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    fn bfs_parents(&self, from: usize) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.n_physical];
        parent[from] = Some(from);
        let mut queue = VecDeque::from([from]);
        while let Some(node) = queue.pop_front() {
            for &next in &self.adjacency[node] {
                if parent[next].is_none() {
                    parent[next] = Some(node);
                    queue.push_back(next);
                }
            }
        }
        parent
    }

    /// A shortest path `[from, …, to]`. Neighbors are explored in ascending
    /// order, so among equal-length paths the one through lower indices wins.
    pub fn shortest_path(&self, from: usize, to: usize) -> Vec<usize> {
        let parent = self.bfs_parents(from);
        let mut path = vec![to];
        let mut node = to;
        while node != from {
            node = parent[node].expect("map is connected");
            path.push(node);
        }
        path.reverse();
        path
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jakarta_shape() {
        let m = CouplingMap::jakarta();
        assert_eq!(m.n_physical(), 7);
        assert!(m.are_adjacent(1, 0) && m.are_adjacent(3, 5));
        assert!(!m.are_adjacent(0, 2));
        assert_eq!(m.shortest_path(0, 2), vec![0, 1, 2]);
        assert_eq!(m.shortest_path(0, 6), vec![0, 1, 3, 5, 6]);
    }

    #[test]
    fn disconnected_rejected() {
        assert!(matches!(
            CouplingMap::new(4, [(0, 1), (2, 3)]),
            Err(Error::Validation(_))
        ));
        assert!(CouplingMap::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = CouplingMap::jakarta();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<CouplingMap>(&text).unwrap(), m);
        assert!(
            serde_json::from_str::<CouplingMap>(r#"{"n_physical":3,"edges":[[0,1]]}"#).is_err()
        );
    }

    #[test]
    fn named_maps() {
        assert_eq!(CouplingMap::named("jakarta"), Some(CouplingMap::jakarta()));
        assert_eq!(CouplingMap::named("full:3").unwrap().edges().count(), 3);
        assert!(CouplingMap::named("ring:3").is_none());
    }
}
