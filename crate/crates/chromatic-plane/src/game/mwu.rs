//! Multiplicative-weights approximation of the coloring game.
//!
//! The edge player runs multiplicative weights against the exact
//! best-response oracle; averaging both players' plays gives an approximate
//! equilibrium whose quality is certified afterwards, exactly, so the
//! reported exploitability is a proof rather than a heuristic.

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};
use std::collections::HashMap;

use crate::graphs::UnitDistanceGraph;
use crate::{Error, Result};

use super::simplex::{rat_int, Rat};
use super::{best_response_generic, profile_of_coloring, ColoringProfile, GameSolution};

const ORACLE_BUDGET: u64 = 50_000_000;
const CERT_INTERVAL: u64 = 512;

fn rat_from_f64(x: f64) -> Rat {
    BigRational::from_f64(x).unwrap_or_else(Rat::zero)
}

/// Exact certificate for a candidate pair of average strategies: the best
/// pure coloring against the averaged weights (lower bound on the value)
/// and the worst edge against the empirical coloring mixture (upper bound).
fn certify(
    g: &UnitDistanceGraph,
    avg_weights: &[f64],
    plays: &HashMap<ColoringProfile, u64>,
    rounds: u64,
) -> Result<(Vec<Rat>, Rat, Vec<(ColoringProfile, Rat)>)> {
    let total: f64 = avg_weights.iter().sum();
    let mut weights: Vec<Rat> = avg_weights.iter().map(|&w| rat_from_f64(w / total)).collect();
    // renormalize exactly
    let sum: Rat = weights.iter().cloned().sum();
    if sum.is_zero() {
        return Err(Error::Malformed("zero weight vector".into()));
    }
    for w in weights.iter_mut() {
        *w /= sum.clone();
    }
    let mixed: Vec<(ColoringProfile, Rat)> = plays
        .iter()
        .map(|(p, &count)| (*p, rat_int(count as i64) / rat_int(rounds as i64)))
        .collect();
    let upper = (0..g.edges().len())
        .map(|e| {
            mixed
                .iter()
                .filter(|(p, _)| p.edge(e))
                .map(|(_, prob)| prob.clone())
                .sum::<Rat>()
        })
        .max()
        .unwrap_or_else(Rat::zero);
    Ok((weights, upper, mixed))
}

/// Approximate the game value to within `eps` with a certified gap.
///
/// Runs `T = ⌈4·ln|E|/eps²⌉` rounds at learning rate `√(ln|E|/T)`, checking
/// the exact certificate periodically and stopping as soon as the gap
/// between the averaged strategies closes to `eps`.
pub fn mwu_game_value(g: &UnitDistanceGraph, k: u32, eps: f64, _seed: u64) -> Result<GameSolution> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be in (0, 1), got {eps}"
        )));
    }
    let m = g.edges().len();
    if m == 0 {
        return Ok(GameSolution {
            value: Rat::zero(),
            weights: Vec::new(),
            mixed_coloring: vec![(ColoringProfile(0), Rat::one())],
            exploitability: Rat::zero(),
        });
    }
    let ln_m = (m.max(2) as f64).ln();
    let rounds_cap = (4.0 * ln_m / (eps * eps)).ceil() as u64;
    let eta = (ln_m / rounds_cap as f64).sqrt();

    let mut weights = vec![1.0f64; m];
    let mut avg = vec![0.0f64; m];
    let mut plays: HashMap<ColoringProfile, u64> = HashMap::new();
    let mut best: Option<GameSolution> = None;

    let mut t = 0u64;
    while t < rounds_cap {
        t += 1;
        let total: f64 = weights.iter().sum();
        let normalized: Vec<f64> = weights.iter().map(|w| w / total).collect();
        for (a, w) in avg.iter_mut().zip(&normalized) {
            *a += w;
        }
        let (coloring, _) = best_response_generic(g, &normalized, k, ORACLE_BUDGET)?;
        let profile = profile_of_coloring(g, &coloring);
        *plays.entry(profile).or_insert(0) += 1;
        for (e, w) in weights.iter_mut().enumerate() {
            if profile.edge(e) {
                *w *= (eta).exp();
            }
        }
        // keep weights in floating range
        if t % 4096 == 0 {
            let total: f64 = weights.iter().sum();
            for w in weights.iter_mut() {
                *w /= total;
            }
        }

        if t % CERT_INTERVAL == 0 || t == rounds_cap {
            let (w_rat, upper, mixed) = certify(g, &avg, &plays, t)?;
            let (_, lower) = best_response_generic(g, &w_rat, k, ORACLE_BUDGET)?;
            let gap = upper.clone() - lower.clone();
            let candidate = GameSolution {
                value: lower,
                weights: w_rat,
                mixed_coloring: mixed,
                exploitability: gap.clone(),
            };
            let improved = match &best {
                Some(b) => candidate.exploitability < b.exploitability,
                None => true,
            };
            if improved {
                best = Some(candidate);
            }
            if gap <= rat_from_f64(eps) {
                break;
            }
        }
    }
    best.ok_or_else(|| Error::Malformed("mwu produced no certificate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{exact_game_value, DEFAULT_ENUMERATION_CAP};
    use crate::graphs::builtin_graph;
    use num_traits::ToPrimitive;

    #[test]
    fn triangle_matches_exact() {
        let g = builtin_graph("triangle").unwrap();
        let exact = exact_game_value(&g, 2, DEFAULT_ENUMERATION_CAP).unwrap();
        let approx = mwu_game_value(&g, 2, 1e-3, 0).unwrap();
        let diff = (approx.value.to_f64().unwrap() - exact.value.to_f64().unwrap()).abs();
        assert!(diff <= 1e-3, "diff = {diff}");
        assert!(approx.exploitability.to_f64().unwrap() <= 1e-3);
    }

    #[test]
    fn colorable_graph_stays_below_eps() {
        let g = builtin_graph("cycle_6").unwrap();
        let sol = mwu_game_value(&g, 2, 1e-2, 0).unwrap();
        assert!(sol.value.to_f64().unwrap() <= 1e-2);
    }

    #[test]
    fn certificate_holds_exactly() {
        let g = builtin_graph("triangle").unwrap();
        let sol = mwu_game_value(&g, 2, 1e-2, 0).unwrap();
        // every profile in the mixture meets the upper certificate; recheck
        // against the full minimal antichain
        let profiles =
            crate::game::enumerate_coloring_profiles(&g, 2, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(sol.verify(&profiles, g.edges().len()));
    }

    #[test]
    fn rejects_bad_eps() {
        let g = builtin_graph("triangle").unwrap();
        assert!(mwu_game_value(&g, 2, 0.0, 0).is_err());
        assert!(mwu_game_value(&g, 2, 1.5, 0).is_err());
    }
}
