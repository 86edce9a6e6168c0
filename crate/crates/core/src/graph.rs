//! Finite labeled transition graphs and primitivity of their adjacency
//! structure.
//!
//! The edge shift of a graph is topologically mixing exactly when the
//! adjacency matrix is primitive, i.e. some power is entrywise positive.
//! Primitivity is decided structurally (strong connectivity plus trivial
//! cycle period); the witness exponent then comes from boolean powering,
//! which Wielandt's bound caps at `(n-1)^2 + 1`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Directed multigraph with string edge labels. Every vertex has out-degree
/// at least one, so the edge shift has no dead ends.
///
/// Serializes as `{"vertices": 2, "edges": [[0, 0, "a"], [0, 1, "b"], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    vertices: usize,
    edges: Vec<(usize, usize, String)>,
}

impl LabeledGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize, String)>) -> Result<LabeledGraph> {
        if vertices == 0 {
            return Err(Error::Invalid("graph needs at least one vertex".into()));
        }
        for &(from, to, _) in &edges {
            if from >= vertices || to >= vertices {
                return Err(Error::Invalid(format!(
                    "edge ({from}, {to}) references a vertex outside 0..{vertices}"
                )));
            }
        }
        let mut out_degree = vec![0usize; vertices];
        for &(from, _, _) in &edges {
            out_degree[from] += 1;
        }
        if let Some(v) = out_degree.iter().position(|&d| d == 0) {
            return Err(Error::Invalid(format!("vertex {v} has out-degree 0")));
        }
        Ok(LabeledGraph { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, String)] {
        &self.edges
    }

    /// Wielandt's bound on the primitivity exponent.
    pub fn wielandt_bound(&self) -> usize {
        let n = self.vertices;
        (n - 1) * (n - 1) + 1
    }

    fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut a = vec![vec![false; self.vertices]; self.vertices];
        for &(from, to, _) in &self.edges {
            a[from][to] = true;
        }
        a
    }

    fn out_neighbors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices];
        for &(from, to, _) in &self.edges {
            out[from].push(to);
        }
        out
    }

    fn reachable(neighbors: &[Vec<usize>], start: usize) -> Vec<bool> {
        let mut seen = vec![false; neighbors.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &w in &neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    fn is_strongly_connected(&self) -> bool {
        let out = self.out_neighbors();
        if !Self::reachable(&out, 0).iter().all(|&b| b) {
            return false;
        }
        let mut rev = vec![Vec::new(); self.vertices];
        for &(from, to, _) in &self.edges {
            rev[to].push(from);
        }
        Self::reachable(&rev, 0).iter().all(|&b| b)
    }

    /// gcd of all cycle lengths, valid for strongly connected graphs. Computed
    /// from BFS levels: every edge closes a pseudo-cycle of length
    /// `level(u) + 1 - level(v)`.
    fn cycle_period(&self) -> usize {
        let out = self.out_neighbors();
        let mut level = vec![usize::MAX; self.vertices];
        let mut queue = std::collections::VecDeque::from([0usize]);
        level[0] = 0;
        while let Some(v) = queue.pop_front() {
            for &w in &out[v] {
                if level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        let mut d: usize = 0;
        for &(from, to, _) in &self.edges {
            let diff = (level[from] as i64 + 1 - level[to] as i64).unsigned_abs() as usize;
            d = gcd(d, diff);
        }
        d.max(1)
    }

    /// Structural primitivity decision plus a powering witness.
    pub fn primitivity(&self) -> Primitivity {
        if !self.is_strongly_connected() {
            return Primitivity::Imprimitive(Imprimitivity::NotStronglyConnected);
        }
        let period = self.cycle_period();
        if period > 1 {
            return Primitivity::Imprimitive(Imprimitivity::Period(period));
        }
        let exponent = self
            .smallest_positive_power(self.wielandt_bound())
            .expect("aperiodic strongly connected graphs are primitive within the bound");
        Primitivity::Primitive { exponent }
    }

    /// Smallest k <= bound with A^k entrywise positive, by boolean powering.
    pub fn smallest_positive_power(&self, bound: usize) -> Option<usize> {
        let a = self.adjacency();
        let mut power = a.clone();
        for k in 1..=bound {
            if power.iter().all(|row| row.iter().all(|&b| b)) {
                return Some(k);
            }
            if k < bound {
                power = bool_mat_mul(&power, &a);
            }
        }
        None
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn bool_mat_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut c = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] {
                for j in 0..n {
                    if b[k][j] {
                        c[i][j] = true;
                    }
                }
            }
        }
    }
    c
}

/// Primitivity verdict with a witness exponent or the obstruction found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Primitivity {
    #[serde(rename = "primitive")]
    Primitive { exponent: usize },
    #[serde(rename = "imprimitive")]
    Imprimitive(Imprimitivity),
}

impl Primitivity {
    pub fn is_primitive(&self) -> bool {
        matches!(self, Primitivity::Primitive { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason")]
pub enum Imprimitivity {
    #[serde(rename = "not_strongly_connected")]
    NotStronglyConnected,
    #[serde(rename = "periodic")]
    Period(usize),
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: usize,
    edges: Vec<(usize, usize, String)>,
}

impl Serialize for LabeledGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphFile { vertices: self.vertices, edges: self.edges.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LabeledGraph {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<LabeledGraph, D::Error> {
        let file = GraphFile::deserialize(de)?;
        LabeledGraph::new(file.vertices, file.edges).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(from: usize, to: usize) -> (usize, usize, String) {
        (from, to, "a".to_string())
    }

    #[test]
    fn construction_enforces_out_degree() {
        assert!(LabeledGraph::new(2, vec![e(0, 1)]).is_err());
        assert!(LabeledGraph::new(2, vec![e(0, 1), e(1, 0)]).is_ok());
        assert!(LabeledGraph::new(1, vec![e(0, 1)]).is_err());
    }

    #[test]
    fn single_vertex_with_loops_is_primitive_at_one() {
        let mut g = LabeledGraph::new(1, vec![e(0, 0), (0, 0, "b".into())]).unwrap();
        assert_eq!(g.primitivity(), Primitivity::Primitive { exponent: 1 });
        g = LabeledGraph::new(1, vec![e(0, 0)]).unwrap();
        assert_eq!(g.primitivity(), Primitivity::Primitive { exponent: 1 });
    }

    #[test]
    fn two_cycle_has_period_two() {
        let g = LabeledGraph::new(2, vec![e(0, 1), e(1, 0)]).unwrap();
        assert_eq!(
            g.primitivity(),
            Primitivity::Imprimitive(Imprimitivity::Period(2))
        );
    }

    #[test]
    fn golden_mean_graph_is_primitive_at_two() {
        let g = LabeledGraph::new(2, vec![e(0, 0), (0, 1, "b".into()), e(1, 0)]).unwrap();
        assert_eq!(g.primitivity(), Primitivity::Primitive { exponent: 2 });
    }

    #[test]
    fn disconnected_components_are_imprimitive() {
        let g = LabeledGraph::new(2, vec![e(0, 0), e(1, 1)]).unwrap();
        assert_eq!(
            g.primitivity(),
            Primitivity::Imprimitive(Imprimitivity::NotStronglyConnected)
        );
    }

    #[test]
    fn serde_matches_the_wire_format() {
        let g = LabeledGraph::new(
            2,
            vec![e(0, 0), (0, 1, "b".into()), e(1, 0)],
        )
        .unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(
            json,
            r#"{"vertices":2,"edges":[[0,0,"a"],[0,1,"b"],[1,0,"a"]]}"#
        );
        let back: LabeledGraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<LabeledGraph>(r#"{"vertices":2,"edges":[[0,1,"a"]]}"#)
            .is_err());
    }
}
