//! The coloring game on a finite graph: an edge-weighting player against a
//! coloring player. The game value equals both the weighted minimax
//! quantity and the best achievable per-edge badness on the graph, so one
//! exact LP solve yields certificates for both sides.
//!
//! ```
//! use chromatic_plane::game::{exact_game_value, DEFAULT_ENUMERATION_CAP};
//! use chromatic_plane::graphs::builtin_graph;
//! use num_rational::BigRational;
//!
//! // A triangle cannot be 2-colored; at best one of its three edges is
//! // monochromatic, so the game value is exactly 1/3.
//! let triangle = builtin_graph("triangle").unwrap();
//! let sol = exact_game_value(&triangle, 2, DEFAULT_ENUMERATION_CAP).unwrap();
//! assert_eq!(sol.value, BigRational::new(1.into(), 3.into()));
//! ```

mod mwu;
mod simplex;

pub use mwu::mwu_game_value;
pub use simplex::{rat_int, Rat};

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;

use crate::graphs::{Colorability, UnitDistanceGraph, DEFAULT_EDGE_TOL};
use crate::{Error, Result};

use simplex::simplex_max;

/// Default cap on the number of colorings enumerated exactly.
pub const DEFAULT_ENUMERATION_CAP: u64 = 20_000_000;

/// Which edges a concrete coloring makes monochromatic, as a bit vector
/// (bit `e` set means edge `e` is monochromatic).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColoringProfile(pub u128);

impl ColoringProfile {
    pub fn edge(&self, e: usize) -> bool {
        self.0 >> e & 1 == 1
    }

    pub fn count(&self) -> u32 {
        self.0.count_ones()
    }

    fn dominates(&self, other: &ColoringProfile) -> bool {
        // entrywise ≤, i.e. subset of monochromatic edges
        self.0 & other.0 == self.0
    }
}

fn profile_of(g: &UnitDistanceGraph, assignment: &[u32]) -> ColoringProfile {
    let mut bits = 0u128;
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        if assignment[a] == assignment[b] {
            bits |= 1 << e;
        }
    }
    ColoringProfile(bits)
}

/// All distinct monochromatic-edge profiles over the `k`-colorings of `g`,
/// reduced to the Pareto-minimal antichain. Dominated profiles are never
/// best responses and never bind the LP.
///
/// The first vertex's color is fixed, so `k^(n−1)` colorings are visited;
/// exceeding `cap` is an error pointing at the MWU solver.
pub fn enumerate_coloring_profiles(
    g: &UnitDistanceGraph,
    k: u32,
    cap: u64,
) -> Result<Vec<ColoringProfile>> {
    if g.edges().len() > 128 {
        return Err(Error::InvalidParameter(format!(
            "profile bit vector limited to 128 edges, graph has {}",
            g.edges().len()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let n = g.n();
    if n == 0 {
        return Ok(vec![ColoringProfile(0)]);
    }
    let needed = (k as f64).powi(n as i32 - 1);
    if needed > cap as f64 {
        return Err(Error::CapExceeded { needed, cap });
    }
    let mut seen = BTreeSet::new();
    let mut assignment = vec![0u32; n];
    loop {
        seen.insert(profile_of(g, &assignment));
        // odometer over vertices 1..n, vertex 0 stays color 0
        let mut i = 1;
        while i < n {
            assignment[i] += 1;
            if assignment[i] < k {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    Ok(pareto_minimal(seen.into_iter().collect()))
}

fn pareto_minimal(mut profiles: Vec<ColoringProfile>) -> Vec<ColoringProfile> {
    profiles.sort_by_key(|p| (p.count(), p.0));
    let mut minimal: Vec<ColoringProfile> = Vec::new();
    'outer: for p in profiles {
        for m in &minimal {
            if m.dominates(&p) {
                continue 'outer;
            }
        }
        minimal.push(p);
    }
    minimal
}

/// Exact equilibrium of the coloring game with certificates for both sides.
#[derive(Debug, Clone)]
pub struct GameSolution {
    /// Game value; equals the best per-edge badness guarantee on the graph.
    pub value: Rat,
    /// Optimal edge weighting: nonnegative, sums to 1, every profile's
    /// weighted badness is at least `value`.
    pub weights: Vec<Rat>,
    /// Optimal mixed coloring: profiles with probabilities summing to 1;
    /// every edge's expected badness is at most `value + exploitability`.
    pub mixed_coloring: Vec<(ColoringProfile, Rat)>,
    /// Zero in exact mode; the certified duality gap for MWU.
    pub exploitability: Rat,
}

fn rat_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl Serialize for GameSolution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GameSolution", 4)?;
        st.serialize_field("value", &rat_string(&self.value))?;
        st.serialize_field(
            "weights",
            &self.weights.iter().map(rat_string).collect::<Vec<_>>(),
        )?;
        let mixed: Vec<(String, String)> = self
            .mixed_coloring
            .iter()
            .map(|(p, prob)| (format!("{:b}", p.0), rat_string(prob)))
            .collect();
        st.serialize_field("mixed_coloring", &mixed)?;
        st.serialize_field("exploitability", &rat_string(&self.exploitability))?;
        st.end()
    }
}

impl GameSolution {
    /// Check both certificates against a profile set; exact arithmetic.
    pub fn verify(&self, profiles: &[ColoringProfile], num_edges: usize) -> bool {
        let weight_sum: Rat = self.weights.iter().cloned().sum();
        if !weight_sum.is_one() || self.weights.iter().any(|w| w.is_negative()) {
            return false;
        }
        let prob_sum: Rat = self.mixed_coloring.iter().map(|(_, p)| p.clone()).sum();
        if !prob_sum.is_one() {
            return false;
        }
        let bound = self.value.clone() + self.exploitability.clone();
        for p in profiles {
            let badness: Rat = (0..num_edges)
                .filter(|&e| p.edge(e))
                .map(|e| self.weights[e].clone())
                .sum();
            if badness < self.value {
                return false;
            }
        }
        for e in 0..num_edges {
            let expected: Rat = self
                .mixed_coloring
                .iter()
                .filter(|(p, _)| p.edge(e))
                .map(|(_, prob)| prob.clone())
                .sum();
            if expected > bound {
                return false;
            }
        }
        true
    }
}

/// Exact game value from the Pareto-minimal profile set, by rational
/// simplex; the LP's primal and dual are the two certificates.
pub fn exact_game_value(g: &UnitDistanceGraph, k: u32, cap: u64) -> Result<GameSolution> {
    let num_edges = g.edges().len();
    if num_edges == 0 {
        return Ok(GameSolution {
            value: Rat::zero(),
            weights: Vec::new(),
            mixed_coloring: vec![(ColoringProfile(0), Rat::one())],
            exploitability: Rat::zero(),
        });
    }
    let profiles = enumerate_coloring_profiles(g, k, cap)?;
    solve_from_profiles(&profiles, num_edges)
}

/// LP solve given an explicit profile set (exposed so the losslessness of
/// the Pareto reduction can be checked against the full set).
pub fn solve_from_profiles(
    profiles: &[ColoringProfile],
    num_edges: usize,
) -> Result<GameSolution> {
    let uniform = Rat::one() / rat_int(num_edges as i64);
    if profiles.iter().any(|p| p.0 == 0) {
        // A valid coloring exists: the coloring player achieves zero.
        return Ok(GameSolution {
            value: Rat::zero(),
            weights: vec![uniform; num_edges],
            mixed_coloring: vec![(ColoringProfile(0), Rat::one())],
            exploitability: Rat::zero(),
        });
    }
    // Every profile has a monochromatic edge, so the value is positive and
    // the game reduces to: max Σ_c y_c  s.t.  ∀e: Σ_c [c mono at e]·y_c ≤ 1.
    // Then Σy = 1/value, coloring probabilities are y·value and the edge
    // weights come from the dual prices.
    let a: Vec<Vec<Rat>> = (0..num_edges)
        .map(|e| {
            profiles
                .iter()
                .map(|p| if p.edge(e) { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect();
    let b = vec![Rat::one(); num_edges];
    let c = vec![Rat::one(); profiles.len()];
    let sol = simplex_max(&a, &b, &c)?;
    if sol.objective.is_zero() {
        return Err(Error::Malformed(
            "game LP degenerate: zero objective without a zero profile".into(),
        ));
    }
    let value = Rat::one() / sol.objective.clone();
    let weights: Vec<Rat> = sol.dual.iter().map(|y| y.clone() * value.clone()).collect();
    let mixed_coloring: Vec<(ColoringProfile, Rat)> = profiles
        .iter()
        .zip(&sol.x)
        .filter(|(_, y)| !y.is_zero())
        .map(|(p, y)| (*p, y.clone() * value.clone()))
        .collect();
    Ok(GameSolution {
        value,
        weights,
        mixed_coloring,
        exploitability: Rat::zero(),
    })
}

/// Exact minimizer of the weighted monochromatic-edge total over all
/// `k`-colorings, by branch and bound. The bound is the weight of edges
/// already forced monochromatic.
pub fn best_response(
    g: &UnitDistanceGraph,
    weights: &[Rat],
    k: u32,
    node_budget: u64,
) -> Result<(Vec<u32>, Rat)> {
    if weights.len() != g.edges().len() {
        return Err(Error::InvalidParameter(
            "one weight per edge required".into(),
        ));
    }
    if weights.iter().any(|w| w.is_negative()) || weights.iter().all(|w| w.is_zero()) {
        return Err(Error::InvalidParameter(
            "weights must be nonnegative and not all zero".into(),
        ));
    }
    best_response_generic(g, weights, k, node_budget)
}

pub(crate) fn best_response_generic<T>(
    g: &UnitDistanceGraph,
    weights: &[T],
    k: u32,
    node_budget: u64,
) -> Result<(Vec<u32>, T)>
where
    T: Clone + PartialOrd + Zero + std::ops::Add<Output = T>,
{
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let n = g.n();
    // edges incident to each vertex, with the opposite endpoint
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        incident[a].push((e, b));
        incident[b].push((e, a));
    }
    struct Search<'s, T> {
        incident: &'s [Vec<(usize, usize)>],
        weights: &'s [T],
        k: u32,
        colors: Vec<u32>,
        best_cost: Option<T>,
        best_coloring: Vec<u32>,
        nodes: u64,
        budget: u64,
    }
    impl<T: Clone + PartialOrd + Zero + std::ops::Add<Output = T>> Search<'_, T> {
        fn go(&mut self, v: usize, max_used: u32, cost: T) -> Result<()> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::Undecided);
            }
            if let Some(best) = &self.best_cost {
                if cost >= *best {
                    return Ok(());
                }
            }
            if v == self.colors.len() {
                self.best_cost = Some(cost);
                self.best_coloring = self.colors.clone();
                return Ok(());
            }
            let limit = self.k.min(max_used + 1);
            for c in 0..limit {
                self.colors[v] = c;
                let mut next = cost.clone();
                for &(e, u) in &self.incident[v] {
                    if u < v && self.colors[u] == c {
                        next = next + self.weights[e].clone();
                    }
                }
                self.go(v + 1, max_used.max(c + 1), next)?;
            }
            Ok(())
        }
    }
    let mut search = Search {
        incident: &incident,
        weights,
        k,
        colors: vec![0; n],
        best_cost: None,
        best_coloring: vec![0; n],
        nodes: 0,
        budget: node_budget,
    };
    search.go(0, 0, T::zero())?;
    let cost = search.best_cost.expect("search visits at least one leaf");
    Ok((search.best_coloring, cost))
}

pub(crate) fn profile_of_coloring(
    g: &UnitDistanceGraph,
    assignment: &[u32],
) -> ColoringProfile {
    profile_of(g, assignment)
}

/// Certified lower bound `1/|E|` from a non-`k`-colorable unit-distance
/// graph. Requires a verified embedding and either an exact
/// non-colorability proof or an explicit external certificate flag.
pub fn lower_bound_from_graph(g: &UnitDistanceGraph, k: u32, node_budget: u64) -> Result<Rat> {
    let report = g.verify_unit_embedding(DEFAULT_EDGE_TOL)?;
    if !report.pass {
        return Err(Error::NoBound(format!(
            "{} edges are not unit length",
            report.offending.len()
        )));
    }
    if g.edges().is_empty() {
        return Err(Error::NoBound("graph has no edges".into()));
    }
    if !g.is_assumed_non_colorable(k) {
        match g.is_k_colorable(k, node_budget)? {
            Colorability::Colorable(_) => {
                return Err(Error::NoBound(format!("graph is {k}-colorable")));
            }
            Colorability::NotColorable => {}
        }
    }
    Ok(Rat::one() / rat_int(g.edges().len() as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::builtin_graph;

    const CAP: u64 = DEFAULT_ENUMERATION_CAP;
    const BUDGET: u64 = 10_000_000;

    #[test]
    fn triangle_profiles_k2() {
        let g = builtin_graph("triangle").unwrap();
        let minimal = enumerate_coloring_profiles(&g, 2, CAP).unwrap();
        // brute force: the 2^3 colorings give the all-mono profile and the
        // three single-edge profiles; the minimal antichain is the latter
        let mut expected: Vec<u128> = vec![0b001, 0b010, 0b100];
        expected.sort();
        let mut got: Vec<u128> = minimal.iter().map(|p| p.0).collect();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn single_edge_and_colorable_cases() {
        let g = builtin_graph("K2").unwrap();
        let minimal = enumerate_coloring_profiles(&g, 2, CAP).unwrap();
        assert_eq!(minimal, vec![ColoringProfile(0)]);

        let g = builtin_graph("triangle").unwrap();
        let minimal = enumerate_coloring_profiles(&g, 3, CAP).unwrap();
        assert_eq!(minimal, vec![ColoringProfile(0)]);
    }

    #[test]
    fn cap_exceeded() {
        let g = builtin_graph("K12").unwrap();
        assert!(matches!(
            enumerate_coloring_profiles(&g, 100, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn triangle_value_is_one_third() {
        let g = builtin_graph("triangle").unwrap();
        let sol = exact_game_value(&g, 2, CAP).unwrap();
        assert_eq!(sol.value, Rat::one() / rat_int(3));
        assert_eq!(sol.weights, vec![Rat::one() / rat_int(3); 3]);
        let profiles = enumerate_coloring_profiles(&g, 2, CAP).unwrap();
        assert!(sol.verify(&profiles, 3));
    }

    #[test]
    fn k5_at_four_colors_is_one_tenth() {
        let g = builtin_graph("K5").unwrap();
        let sol = exact_game_value(&g, 4, CAP).unwrap();
        assert_eq!(sol.value, Rat::one() / rat_int(10));
        let profiles = enumerate_coloring_profiles(&g, 4, CAP).unwrap();
        assert!(sol.verify(&profiles, 10));
    }

    #[test]
    fn colorable_graphs_have_value_zero() {
        for (name, k) in [("triangle", 3u32), ("moser", 4), ("cycle_6", 2), ("K5", 5)] {
            let g = builtin_graph(name).unwrap();
            let sol = exact_game_value(&g, k, CAP).unwrap();
            assert!(sol.value.is_zero(), "{name} at k={k}");
        }
    }

    #[test]
    fn value_zero_iff_colorable() {
        for (name, k) in [
            ("triangle", 2u32),
            ("triangle", 3),
            ("moser", 3),
            ("moser", 4),
            ("K5", 4),
            ("K5", 5),
            ("cycle_5", 2),
        ] {
            let g = builtin_graph(name).unwrap();
            let sol = exact_game_value(&g, k, CAP).unwrap();
            let colorable = matches!(
                g.is_k_colorable(k, BUDGET).unwrap(),
                Colorability::Colorable(_)
            );
            assert_eq!(sol.value.is_zero(), colorable, "{name} k={k}");
        }
    }

    #[test]
    fn pareto_reduction_is_lossless() {
        for (name, k) in [("triangle", 2u32), ("K4", 3), ("K5", 4), ("cycle_5", 2)] {
            let g = builtin_graph(name).unwrap();
            // full set: enumerate without reduction
            let n = g.n();
            let mut full = BTreeSet::new();
            let mut assignment = vec![0u32; n];
            loop {
                full.insert(profile_of(&g, &assignment));
                let mut i = 1;
                while i < n {
                    assignment[i] += 1;
                    if assignment[i] < k {
                        break;
                    }
                    assignment[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
            let full: Vec<_> = full.into_iter().collect();
            let minimal = enumerate_coloring_profiles(&g, k, CAP).unwrap();
            let v_full = solve_from_profiles(&full, g.edges().len()).unwrap().value;
            let v_min = solve_from_profiles(&minimal, g.edges().len()).unwrap().value;
            assert_eq!(v_full, v_min, "{name} k={k}");
        }
    }

    #[test]
    fn moser_value_matches_brute_force_minimax() {
        // oracle: sup over rational weightings is hard, but the LP value must
        // equal max_w min_c; we cross-check the inner minimum at the LP's
        // weights and the LP's own certificates over the full profile set.
        let g = builtin_graph("moser").unwrap();
        let sol = exact_game_value(&g, 3, CAP).unwrap();
        assert!(sol.value >= Rat::one() / rat_int(11));
        let (_, br) = best_response(&g, &sol.weights, 3, BUDGET).unwrap();
        assert_eq!(br, sol.value);
        let profiles = enumerate_coloring_profiles(&g, 3, CAP).unwrap();
        assert!(sol.verify(&profiles, 11));
    }

    #[test]
    fn best_response_examples() {
        let g = builtin_graph("triangle").unwrap();
        let w = vec![Rat::one() / rat_int(3); 3];
        let (coloring, cost) = best_response(&g, &w, 2, BUDGET).unwrap();
        assert_eq!(cost, Rat::one() / rat_int(3));
        assert_eq!(profile_of(&g, &coloring).count(), 1);

        let (_, cost) = best_response(&g, &w, 3, BUDGET).unwrap();
        assert!(cost.is_zero());

        let g = builtin_graph("K2").unwrap();
        let (_, cost) = best_response(&g, &[rat_int(5)], 1, BUDGET).unwrap();
        assert_eq!(cost, rat_int(5));
    }

    #[test]
    fn best_response_scaling_invariance() {
        let g = builtin_graph("moser").unwrap();
        let sol = exact_game_value(&g, 3, CAP).unwrap();
        let scaled: Vec<Rat> = sol.weights.iter().map(|w| w.clone() * rat_int(7)).collect();
        let (c1, v1) = best_response(&g, &sol.weights, 3, BUDGET).unwrap();
        let (c2, v2) = best_response(&g, &scaled, 3, BUDGET).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(v2, v1 * rat_int(7));
    }

    #[test]
    fn best_response_rejects_bad_weights() {
        let g = builtin_graph("triangle").unwrap();
        assert!(best_response(&g, &vec![Rat::zero(); 3], 2, BUDGET).is_err());
        assert!(best_response(&g, &[rat_int(-1), rat_int(1), rat_int(1)], 2, BUDGET).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let moser = builtin_graph("moser").unwrap();
        assert_eq!(
            lower_bound_from_graph(&moser, 3, BUDGET).unwrap(),
            Rat::one() / rat_int(11)
        );
        let triangle = builtin_graph("triangle").unwrap();
        assert_eq!(
            lower_bound_from_graph(&triangle, 2, BUDGET).unwrap(),
            Rat::one() / rat_int(3)
        );
        // colorable → no bound
        assert!(lower_bound_from_graph(&moser, 4, BUDGET).is_err());
    }

    #[test]
    fn lower_bound_respects_external_flag() {
        // a long path is 2-colorable, but the flag stands in for an external
        // non-colorability certificate the search cannot reproduce
        let g = builtin_graph("path_2723").unwrap().assume_non_colorable(4);
        assert_eq!(g.edges().len(), 2722);
        assert_eq!(
            lower_bound_from_graph(&g, 4, BUDGET).unwrap(),
            Rat::one() / rat_int(2722)
        );
    }

    #[test]
    fn uniform_weights_sandwich() {
        // 1/|E| ≤ value whenever the graph is not k-colorable
        for (name, k) in [("triangle", 2u32), ("moser", 3), ("K5", 4)] {
            let g = builtin_graph(name).unwrap();
            let sol = exact_game_value(&g, k, CAP).unwrap();
            let uniform_bound = Rat::one() / rat_int(g.edges().len() as i64);
            assert!(sol.value >= uniform_bound, "{name} k={k}");
        }
    }

    #[test]
    fn solution_serializes_rationals_as_strings() {
        let g = builtin_graph("triangle").unwrap();
        let sol = exact_game_value(&g, 2, CAP).unwrap();
        let v = serde_json::to_value(&sol).unwrap();
        assert_eq!(v["value"], "1/3");
        assert_eq!(v["exploitability"], "0/1");
    }
}
