use ordo::netcfg::{compile, motivating};
use ordo::oracle::oracle_costs;
use ordo::solver::{solve, solve_traced, Mode, SolveConfig};
use ordo::ExtendedCost;

#[test]
fn gcdo_trajectory_and_optimum() {
    let (p, mut th) = compile(&motivating()).unwrap();
    let mut rows = Vec::new();
    let r = solve_traced(&p, &mut th, SolveConfig::default(), |t| rows.push(t.clone())).unwrap();
    for t in &rows {
        eprintln!(
            "{:>3} {} l={} est={} inc={} g={:?} D={:?} std={:?} red={:?} chosen={:?}",
            t.iteration, t.order, t.level, t.estimate, t.incumbent, t.g, t.witness, t.standard_move, t.reducing_move, t.chosen_move
        );
    }
    assert!(r.proved_optimal);
    assert_eq!(r.best_cost, ExtendedCost::finite(1.0));
    let costs: Vec<f64> = r.incumbent_history.iter().map(|h| h.cost.c).collect();
    assert_eq!(costs, [8.0, 3.0, 1.0]);
    assert!(r.incumbent_history.iter().all(|h| h.cost.k == 0));
    assert_eq!(r.best_order.unwrap().to_string(), "23415");
}

#[test]
fn cdito_agrees_on_the_first_solution_and_calls_g_at_least_as_often() {
    let (p, mut th) = compile(&motivating()).unwrap();
    let g = solve(&p, &mut th, SolveConfig::default()).unwrap();
    let (p, mut th) = compile(&motivating()).unwrap();
    let c = solve(&p, &mut th, SolveConfig { mode: Mode::Cdito, ..SolveConfig::default() }).unwrap();
    assert_eq!(g.first_solution().unwrap().cost, c.first_solution().unwrap().cost);
    assert_eq!(g.first_solution().unwrap().order, c.first_solution().unwrap().order);
    assert!(c.stats.g_calls >= g.stats.g_calls);
    assert_eq!(c.best_cost, g.best_cost);
    assert!(c.proved_optimal);
}

#[test]
fn oracle_agrees() {
    let (p, mut th) = compile(&motivating()).unwrap();
    let all = oracle_costs(&p, &mut th).unwrap();
    assert_eq!(all.len(), 120);
    let min = all.iter().map(|(_, c)| *c).min().unwrap();
    assert_eq!(min, ExtendedCost::finite(1.0));
    assert!(all.iter().any(|(o, c)| o.to_string() == "23415" && *c == min));
}
