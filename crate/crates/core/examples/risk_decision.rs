//! Factor scores, the Bayesian posterior over moves, and the minimum-risk
//! explore/exploit decision for a single step.
//!
//! ```text
//! cargo run --example risk_decision
//! ```

use bayes_aco::aco::{transition_prior, PheromoneField};
use bayes_aco::bayes::{factor_scores, likelihood, min_risk_decision, posterior, FactorWeights, RiskTable};
use bayes_aco::field::{FieldState, MoistureModel};
use bayes_aco::grid::{parse_map, Coord};

fn main() {
    let map = parse_map(concat!(
        "S.cccccc\n",
        "..cccccc\n",
        "..cc##cc\n",
        "cccc##cc\n",
        "cccccccG\n",
    ))
    .unwrap();
    let mut state = FieldState::new(&map);
    // the left half was irrigated last round
    let left: Vec<Coord> = map.coords().filter(|c| c.col < 4).collect();
    state.record_pass(&map, &left, &MoistureModel::default());
    state.apply_maximum_risk(&map, 10);

    let from = Coord::new(1, 3);
    let field = PheromoneField::new(&map, 1.0);
    let cands = transition_prior(&field, &map, 1.0, 2.0, from, &vec![false; map.len()]).unwrap();
    let weights = FactorWeights::default();
    let mut prior = Vec::new();
    let mut lik = Vec::new();
    for c in &cands {
        let s = factor_scores(&map, &state, from, c.to, 10);
        println!("{} f = [{:.3} {:.3} {:.3} {:.3}]", c.to, s.f1, s.f2, s.f3, s.f4);
        prior.push(c.probability);
        lik.push(likelihood(&s, &weights));
    }
    let post = posterior(&prior, &lik).unwrap();
    for (c, (p, q)) in cands.iter().zip(prior.iter().zip(&post)) {
        println!("  {}: prior {p:.3} posterior {q:.3}", c.to);
    }

    let mut table = RiskTable::default();
    for p_unexplored in [0.3, 0.45, 0.6] {
        let d = min_risk_decision(&[p_unexplored, 1.0 - p_unexplored], &table);
        println!("P(unexplored) = {p_unexplored}: {}", if d == RiskTable::EXPLORE { "explore" } else { "exploit" });
    }
    table.relax_exploration(0.3);
    let d = min_risk_decision(&[0.45, 0.55], &table);
    println!("after relaxing, P(unexplored) = 0.45: {}", if d == RiskTable::EXPLORE { "explore" } else { "exploit" });
}
