//! Finite unit-distance graphs: construction from coordinates, embedding
//! verification, and exact colorability search.
//!
//! ```
//! use chromatic_plane::graphs::builtin_graph;
//!
//! // The Moser spindle: 7 vertices, 11 unit edges, chromatic number 4.
//! let moser = builtin_graph("moser").unwrap();
//! assert!(moser.verify_unit_embedding(1e-9).unwrap().pass);
//! assert_eq!(moser.chromatic_number(7, 1_000_000).unwrap(), 4);
//! ```

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::geometry::PlanePoint;
use crate::{Error, Result};

/// Default edge-length tolerance for double-precision constructions.
pub const DEFAULT_EDGE_TOL: f64 = 1e-9;

/// A finite graph, optionally embedded in the plane with unit edges.
#[derive(Debug, Clone)]
pub struct UnitDistanceGraph {
    n: usize,
    coords: Option<Vec<PlanePoint>>,
    edges: Vec<(usize, usize)>,
    /// Externally certified non-colorability, for graphs too large to check.
    assume_non_colorable: BTreeMap<u32, bool>,
}

/// Result of an exact colorability search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Colorability {
    /// A valid coloring exists; the witness assigns a color to each vertex.
    Colorable(Vec<u32>),
    NotColorable,
}

/// Outcome of checking an embedding's edge lengths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub pass: bool,
    /// Edges whose length is not within tolerance of 1, with their length.
    pub offending: Vec<(usize, usize, f64)>,
}

impl UnitDistanceGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut normalized: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Malformed(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::Malformed(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        let before = normalized.len();
        normalized.dedup();
        if normalized.len() != before {
            return Err(Error::Malformed("duplicate edge".into()));
        }
        Ok(UnitDistanceGraph {
            n,
            coords: None,
            edges: normalized,
            assume_non_colorable: BTreeMap::new(),
        })
    }

    pub fn with_coords(mut self, coords: Vec<PlanePoint>) -> Result<Self> {
        if coords.len() != self.n {
            return Err(Error::Malformed(format!(
                "{} coordinates for {} vertices",
                coords.len(),
                self.n
            )));
        }
        if coords.iter().any(|p| !p.is_finite()) {
            return Err(Error::Malformed("non-finite coordinate".into()));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn assume_non_colorable(mut self, k: u32) -> Self {
        self.assume_non_colorable.insert(k, true);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn coords(&self) -> Option<&[PlanePoint]> {
        self.coords.as_deref()
    }

    pub fn is_assumed_non_colorable(&self, k: u32) -> bool {
        self.assume_non_colorable.get(&k).copied().unwrap_or(false)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Check that every listed edge has length within `tol` of 1.
    pub fn verify_unit_embedding(&self, tol: f64) -> Result<EmbeddingReport> {
        let coords = self.coords.as_ref().ok_or(Error::MissingCoordinates)?;
        let mut offending = Vec::new();
        for &(a, b) in &self.edges {
            let len = coords[a].dist(coords[b]);
            if (len - 1.0).abs() > tol {
                offending.push((a, b, len));
            }
        }
        Ok(EmbeddingReport {
            pass: offending.is_empty(),
            offending,
        })
    }

    /// Exact k-colorability by DSATUR-ordered backtracking. The first vertex
    /// chosen is pinned to color 0 and each vertex may open at most one new
    /// color, which breaks color-permutation symmetry.
    ///
    /// Never wrong: if the node budget runs out the search reports
    /// [`Error::Undecided`] instead of guessing.
    pub fn is_k_colorable(&self, k: u32, node_budget: u64) -> Result<Colorability> {
        if k == 0 {
            return Ok(if self.n == 0 {
                Colorability::Colorable(Vec::new())
            } else {
                Colorability::NotColorable
            });
        }
        if k as usize >= self.n {
            return Ok(Colorability::Colorable((0..self.n as u32).collect()));
        }
        let adj = self.adjacency();
        let mut search = DsaturSearch {
            adj: &adj,
            k,
            colors: vec![NONE; self.n],
            nodes: 0,
            budget: node_budget,
        };
        match search.solve(0) {
            SearchOutcome::Found => Ok(Colorability::Colorable(search.colors.clone())),
            SearchOutcome::Exhausted => Ok(Colorability::NotColorable),
            SearchOutcome::BudgetExceeded => Err(Error::Undecided),
        }
    }

    /// Smallest `k ≤ k_max` admitting a valid coloring.
    pub fn chromatic_number(&self, k_max: u32, node_budget: u64) -> Result<u32> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("empty graph".into()));
        }
        for k in 1..=k_max {
            match self.is_k_colorable(k, node_budget)? {
                Colorability::Colorable(_) => return Ok(k),
                Colorability::NotColorable => continue,
            }
        }
        Err(Error::NoBound(format!(
            "chromatic number exceeds k_max = {k_max}"
        )))
    }
}

const NONE: u32 = u32::MAX;

enum SearchOutcome {
    Found,
    Exhausted,
    BudgetExceeded,
}

struct DsaturSearch<'a> {
    adj: &'a [Vec<usize>],
    k: u32,
    colors: Vec<u32>,
    nodes: u64,
    budget: u64,
}

impl DsaturSearch<'_> {
    fn pick_vertex(&self) -> Option<usize> {
        let mut best: Option<(usize, usize, usize)> = None; // (sat, deg, v)
        for v in 0..self.colors.len() {
            if self.colors[v] != NONE {
                continue;
            }
            let mut seen = 0u64;
            let mut sat = 0usize;
            for &u in &self.adj[v] {
                let c = self.colors[u];
                if c != NONE && seen & (1 << c) == 0 {
                    seen |= 1 << c;
                    sat += 1;
                }
            }
            let key = (sat, self.adj[v].len(), v);
            let better = match best {
                Some((bs, bd, bv)) => (key.0, key.1) > (bs, bd) || ((key.0, key.1) == (bs, bd) && v < bv),
                None => true,
            };
            if better {
                best = Some(key);
            }
        }
        best.map(|(_, _, v)| v)
    }

    fn solve(&mut self, max_used: u32) -> SearchOutcome {
        self.nodes += 1;
        if self.nodes > self.budget {
            return SearchOutcome::BudgetExceeded;
        }
        let Some(v) = self.pick_vertex() else {
            return SearchOutcome::Found;
        };
        let mut forbidden = 0u64;
        for &u in &self.adj[v] {
            if self.colors[u] != NONE {
                forbidden |= 1 << self.colors[u];
            }
        }
        // at most one fresh color beyond those already used
        let limit = self.k.min(max_used + 1);
        for c in 0..limit {
            if forbidden & (1 << c) != 0 {
                continue;
            }
            self.colors[v] = c;
            match self.solve(max_used.max(c + 1)) {
                SearchOutcome::Found => return SearchOutcome::Found,
                SearchOutcome::BudgetExceeded => {
                    self.colors[v] = NONE;
                    return SearchOutcome::BudgetExceeded;
                }
                SearchOutcome::Exhausted => {}
            }
            self.colors[v] = NONE;
        }
        SearchOutcome::Exhausted
    }
}

/// Build a graph from coordinates with an edge for every pair at distance
/// within `tol` of 1.
pub fn infer_edges(coords: Vec<PlanePoint>, tol: f64) -> Result<UnitDistanceGraph> {
    if !(tol > 0.0 && tol < 0.1) {
        return Err(Error::InvalidParameter(format!(
            "edge tolerance must be in (0, 0.1), got {tol}"
        )));
    }
    let n = coords.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if (coords[i].dist(coords[j]) - 1.0).abs() <= tol {
                edges.push((i, j));
            }
        }
    }
    UnitDistanceGraph::new(n, edges)?.with_coords(coords)
}

/// Moser spindle coordinates: two rhombi of unit equilateral triangles
/// sharing the origin, the second rotated so the two far tips land exactly
/// one unit apart.
fn moser_coords() -> Vec<PlanePoint> {
    let beta = 2.0 * (1.0 / (2.0 * 3f64.sqrt())).asin();
    let rhombus = |phi: f64| {
        [
            PlanePoint::cis(phi + PI / 6.0),
            PlanePoint::cis(phi - PI / 6.0),
            PlanePoint::cis(phi).scale(3f64.sqrt()),
        ]
    };
    let [a1, a2, t1] = rhombus(0.0);
    let [b1, b2, t2] = rhombus(beta);
    vec![PlanePoint::ORIGIN, a1, a2, t1, b1, b2, t2]
}

/// Built-in graphs: `triangle`, `moser`, `K2`…`K12`, `path_n`, `cycle_n`.
pub fn builtin_graph(name: &str) -> Result<UnitDistanceGraph> {
    if name == "triangle" {
        let coords = vec![
            PlanePoint::ORIGIN,
            PlanePoint::new(1.0, 0.0),
            PlanePoint::new(0.5, 3f64.sqrt() / 2.0),
        ];
        return infer_edges(coords, DEFAULT_EDGE_TOL);
    }
    if name == "moser" {
        return infer_edges(moser_coords(), DEFAULT_EDGE_TOL);
    }
    if let Some(ns) = name.strip_prefix('K') {
        let n: usize = ns
            .parse()
            .map_err(|_| Error::UnknownGraph(name.to_string()))?;
        if !(2..=12).contains(&n) {
            return Err(Error::UnknownGraph(name.to_string()));
        }
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        return UnitDistanceGraph::new(n, edges);
    }
    if let Some(ns) = name.strip_prefix("path_") {
        let n: usize = ns
            .parse()
            .map_err(|_| Error::UnknownGraph(name.to_string()))?;
        if n < 2 {
            return Err(Error::UnknownGraph(name.to_string()));
        }
        let coords = (0..n).map(|i| PlanePoint::new(i as f64, 0.0)).collect();
        return infer_edges(coords, DEFAULT_EDGE_TOL);
    }
    if let Some(ns) = name.strip_prefix("cycle_") {
        let n: usize = ns
            .parse()
            .map_err(|_| Error::UnknownGraph(name.to_string()))?;
        if n < 3 {
            return Err(Error::UnknownGraph(name.to_string()));
        }
        // regular n-gon with unit sides
        let radius = 0.5 / (PI / n as f64).sin();
        let coords = (0..n)
            .map(|i| PlanePoint::cis(2.0 * PI * i as f64 / n as f64).scale(radius))
            .collect();
        return infer_edges(coords, DEFAULT_EDGE_TOL);
    }
    Err(Error::UnknownGraph(name.to_string()))
}

/// On-disk graph format. If `vertices` are present and `edges` absent, the
/// edges are inferred at the configured tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub assume_non_colorable: BTreeMap<u32, bool>,
}

impl GraphFile {
    pub fn into_graph(self, tol: f64) -> Result<UnitDistanceGraph> {
        let coords: Option<Vec<PlanePoint>> = self
            .vertices
            .map(|vs| vs.into_iter().map(|[x, y]| PlanePoint::new(x, y)).collect());
        let mut g = match (coords, self.edges) {
            (Some(coords), Some(edges)) => {
                UnitDistanceGraph::new(coords.len(), edges.into_iter().map(|[a, b]| (a, b)))?
                    .with_coords(coords)?
            }
            (Some(coords), None) => infer_edges(coords, tol)?,
            (None, Some(edges)) => {
                let n = edges
                    .iter()
                    .flat_map(|e| e.iter().copied())
                    .max()
                    .map_or(0, |m| m + 1);
                UnitDistanceGraph::new(n, edges.into_iter().map(|[a, b]| (a, b)))?
            }
            (None, None) => {
                return Err(Error::Malformed(
                    "graph file needs `vertices` or `edges`".into(),
                ))
            }
        };
        g.assume_non_colorable = self.assume_non_colorable;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u64 = 10_000_000;

    fn assert_valid_witness(g: &UnitDistanceGraph, w: &[u32], k: u32) {
        assert_eq!(w.len(), g.n());
        assert!(w.iter().all(|&c| c < k));
        for &(a, b) in g.edges() {
            assert_ne!(w[a], w[b], "monochromatic edge ({a},{b})");
        }
    }

    #[test]
    fn triangle_basics() {
        let g = builtin_graph("triangle").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges().len(), 3);
        assert!(g.verify_unit_embedding(DEFAULT_EDGE_TOL).unwrap().pass);
        assert_eq!(g.is_k_colorable(2, BUDGET).unwrap(), Colorability::NotColorable);
        assert_eq!(g.chromatic_number(10, BUDGET).unwrap(), 3);
    }

    #[test]
    fn triangle_tolerates_tiny_perturbation() {
        let coords = vec![
            PlanePoint::new(1e-12, 0.0),
            PlanePoint::new(1.0, 0.0),
            PlanePoint::new(0.5, 3f64.sqrt() / 2.0),
        ];
        let g = infer_edges(coords, 1e-9).unwrap();
        assert_eq!(g.edges().len(), 3);
    }

    #[test]
    fn moser_spindle() {
        let g = builtin_graph("moser").unwrap();
        assert_eq!(g.n(), 7);
        assert_eq!(g.edges().len(), 11);
        assert!(g.verify_unit_embedding(1e-9).unwrap().pass);
        assert_eq!(g.is_k_colorable(3, BUDGET).unwrap(), Colorability::NotColorable);
        match g.is_k_colorable(4, BUDGET).unwrap() {
            Colorability::Colorable(w) => assert_valid_witness(&g, &w, 4),
            other => panic!("expected colorable, got {other:?}"),
        }
        assert_eq!(g.chromatic_number(10, BUDGET).unwrap(), 4);
    }

    #[test]
    fn moser_edges_match_brute_force_distances() {
        let coords = moser_coords();
        let mut count = 0;
        for i in 0..coords.len() {
            for j in i + 1..coords.len() {
                if (coords[i].dist(coords[j]) - 1.0).abs() <= 1e-9 {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 11);
    }

    #[test]
    fn complete_graphs() {
        let g = builtin_graph("K5").unwrap();
        assert_eq!(g.edges().len(), 10);
        assert!(g.coords().is_none());
        assert_eq!(g.chromatic_number(12, BUDGET).unwrap(), 5);
    }

    #[test]
    fn square_with_diagonal_fails_verification() {
        let coords = vec![
            PlanePoint::ORIGIN,
            PlanePoint::new(1.0, 0.0),
            PlanePoint::new(1.0, 1.0),
            PlanePoint::new(0.0, 1.0),
        ];
        let g = UnitDistanceGraph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
            .unwrap()
            .with_coords(coords)
            .unwrap();
        let report = g.verify_unit_embedding(1e-9).unwrap();
        assert!(!report.pass);
        assert_eq!(report.offending.len(), 1);
        assert_eq!((report.offending[0].0, report.offending[0].1), (0, 2));
    }

    #[test]
    fn empty_edge_list_verifies_vacuously() {
        let g = UnitDistanceGraph::new(2, [])
            .unwrap()
            .with_coords(vec![PlanePoint::ORIGIN, PlanePoint::new(0.3, 0.0)])
            .unwrap();
        assert!(g.verify_unit_embedding(1e-9).unwrap().pass);
    }

    #[test]
    fn missing_coords_is_an_error() {
        let g = builtin_graph("K3").unwrap();
        assert!(matches!(
            g.verify_unit_embedding(1e-9),
            Err(Error::MissingCoordinates)
        ));
    }

    #[test]
    fn budget_exceeded_is_undecided() {
        let g = builtin_graph("K8").unwrap();
        assert!(matches!(g.is_k_colorable(7, 3), Err(Error::Undecided)));
    }

    #[test]
    fn colorability_is_monotone_in_k() {
        for name in ["triangle", "moser", "K5", "cycle_5", "path_4"] {
            let g = builtin_graph(name).unwrap();
            let mut seen_colorable = false;
            for k in 1..=8 {
                let colorable = matches!(
                    g.is_k_colorable(k, BUDGET).unwrap(),
                    Colorability::Colorable(_)
                );
                assert!(!seen_colorable || colorable, "{name} not monotone at k={k}");
                seen_colorable |= colorable;
            }
        }
    }

    /// Independent oracle: exhaustive enumeration over all k^n colorings.
    fn exhaustive_chromatic(g: &UnitDistanceGraph) -> u32 {
        let n = g.n();
        for k in 1..=n as u32 {
            let total = (k as u64).pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let mut assignment = vec![0u32; n];
                for slot in assignment.iter_mut() {
                    *slot = (c % k as u64) as u32;
                    c /= k as u64;
                }
                if g.edges().iter().all(|&(a, b)| assignment[a] != assignment[b]) {
                    return k;
                }
            }
        }
        unreachable!()
    }

    #[test]
    fn dsatur_matches_exhaustive_oracle() {
        for name in ["triangle", "moser", "K5", "K7", "cycle_5", "cycle_6", "path_5"] {
            let g = builtin_graph(name).unwrap();
            if g.n() > 8 {
                continue;
            }
            assert_eq!(
                g.chromatic_number(g.n() as u32, BUDGET).unwrap(),
                exhaustive_chromatic(&g),
                "mismatch on {name}"
            );
        }
    }

    #[test]
    fn infer_then_verify_round_trip() {
        for name in ["triangle", "moser", "cycle_7", "path_6"] {
            let g = builtin_graph(name).unwrap();
            let coords = g.coords().unwrap().to_vec();
            let h = infer_edges(coords, DEFAULT_EDGE_TOL).unwrap();
            assert!(h.verify_unit_embedding(DEFAULT_EDGE_TOL).unwrap().pass);
            assert_eq!(h.edges(), g.edges());
        }
    }

    #[test]
    fn graph_file_parsing() {
        let json = r#"{"vertices": [[0,0],[1,0],[0.5,0.8660254037844386]]}"#;
        let gf: GraphFile = serde_json::from_str(json).unwrap();
        let g = gf.into_graph(1e-9).unwrap();
        assert_eq!(g.edges().len(), 3);

        let json = r#"{"edges": [[0,1],[1,2]], "assume_non_colorable": {"4": true}}"#;
        let gf: GraphFile = serde_json::from_str(json).unwrap();
        let g = gf.into_graph(1e-9).unwrap();
        assert_eq!(g.n(), 3);
        assert!(g.is_assumed_non_colorable(4));
        assert!(!g.is_assumed_non_colorable(3));

        assert!(serde_json::from_str::<GraphFile>(r#"{"junk": 1}"#).is_err());
    }
}
