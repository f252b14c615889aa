use gmfg::env::{make_flocking, make_invest, make_sis, make_toy_leftright, Environment, FlockingConfig, Horizon};
use gmfg::exact::{
    estimate_contraction, exact_best_response, exact_fpi, induced_population, softmax_policy, ExactOptions,
    FpiOptions,
};
use gmfg::graphon::{Graphon, LabelDiscretization, NeighborhoodWeights};
use gmfg::metrics::{exploitability, policy_value};
use gmfg::rng::{derive, Stream};
use gmfg::table::{PolicyTable, PopulationTable};
use rand::Rng;

fn weights(g: &Graphon, classes: usize) -> NeighborhoodWeights {
    NeighborhoodWeights::precompute(g, &LabelDiscretization::new(classes).unwrap(), 1).unwrap()
}

fn suite() -> Vec<Environment> {
    let flocking = make_flocking(&FlockingConfig::default()).unwrap();
    vec![
        make_sis(),
        make_invest(),
        make_toy_leftright(),
        flocking.clone(),
        make_sis().with_horizon(Horizon::Infinite { discount: 0.9 }).unwrap(),
        make_invest().with_horizon(Horizon::Infinite { discount: 0.9 }).unwrap(),
        flocking.with_horizon(Horizon::Infinite { discount: 0.9 }).unwrap(),
    ]
}

fn random_population<R: Rng>(env: &Environment, classes: usize, rng: &mut R) -> PopulationTable {
    let slices = env.horizon().slices();
    let mut pop = PopulationTable::uniform(slices, classes, env.num_states());
    for t in 0..slices {
        for d in 0..classes {
            let raw: Vec<f64> = (0..env.num_states()).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            let row: Vec<f64> = raw.iter().map(|v| v / s).collect();
            pop.set_row(t, d, &row);
        }
    }
    pop
}

#[test]
fn greedy_best_response_is_unexploitable() {
    let mut rng = derive(1, Stream::Misc, &[]);
    let opts = ExactOptions::default();
    for env in suite() {
        let w = weights(&Graphon::RankedAttachment, 3);
        let pop = random_population(&env, 3, &mut rng);
        let q = exact_best_response(&env, &w, &pop, &opts).unwrap();
        let e = exploitability(&env, &w, &pop, &PolicyTable::greedy(&q), &opts).unwrap();
        assert!(e.abs() <= 1e-8, "{}: {e}", env.name());
    }
}

#[test]
fn exploitability_ignores_reward_offsets() {
    let mut rng = derive(2, Stream::Misc, &[]);
    let opts = ExactOptions::default();
    for env in suite() {
        let classes = 2;
        let w = weights(&Graphon::UniformAttachment, classes);
        let pop = random_population(&env, classes, &mut rng);
        let pi = PolicyTable::uniform(env.horizon().slices(), classes, env.num_states(), env.num_actions());
        let base = exploitability(&env, &w, &pop, &pi, &opts).unwrap();
        let shifted_env = env.clone().with_reward_offset(1.0);
        let shifted = exploitability(&shifted_env, &w, &pop, &pi, &opts).unwrap();
        assert!((base - shifted).abs() <= 1e-8, "{}: {base} vs {shifted}", env.name());
        let v0 = policy_value(&env, &w, &pop, &pi).unwrap().mean();
        let v1 = policy_value(&shifted_env, &w, &pop, &pi).unwrap().mean();
        let expected = match env.horizon() {
            Horizon::Finite { steps, .. } => steps as f64,
            Horizon::Infinite { discount } => 1.0 / (1.0 - discount),
        };
        assert!((v1 - v0 - expected).abs() <= 1e-8);
    }
}

#[test]
fn uniform_policy_on_sis_is_exploitable() {
    let env = make_sis();
    let w = weights(&Graphon::ErdosRenyi(0.5), 4);
    let pop = PopulationTable::uniform(51, 4, 2);
    let pi = PolicyTable::uniform(51, 4, 2, 2);
    let e = exploitability(&env, &w, &pop, &pi, &ExactOptions::default()).unwrap();
    assert!(e > 0.0);
    // m = (1/4, 1/4) everywhere; value from an exact rational backward induction
    assert!((e - 4.377_777_777_777_778).abs() < 1e-9, "{e}");
}

#[test]
fn induced_rows_are_stationary_and_on_simplex() {
    let mut rng = derive(3, Stream::Misc, &[]);
    let opts = ExactOptions::default();
    for env in suite() {
        let classes = 3;
        let w = weights(&Graphon::Threshold, classes);
        let pop = random_population(&env, classes, &mut rng);
        let q = exact_best_response(&env, &w, &pop, &opts).unwrap();
        let pi = softmax_policy(&q, 0.5).unwrap();
        let next = induced_population(&env, &w, &pop, &pi, &opts).unwrap();
        assert!(next.simplex_violation() <= 1e-9);
        if env.horizon().is_finite() {
            continue;
        }
        for d in 0..classes {
            let m = w.neighborhood_measure(&pop, 0, d).unwrap();
            let row = next.row(0, d);
            let mut moved = vec![0.0; env.num_states()];
            for x in 0..env.num_states() {
                for a in 0..env.num_actions() {
                    let p = env.transition(x, &m, a).unwrap();
                    for y in 0..env.num_states() {
                        moved[y] += row[x] * pi.probs(0, d, x)[a] * p[y];
                    }
                }
            }
            let resid: f64 = moved.iter().zip(row).map(|(a, b)| (a - b).abs()).sum();
            assert!(resid <= 1e-10, "{} class {d}: {resid}", env.name());
        }
    }
}

#[test]
fn converged_fpi_is_nearly_unexploitable_at_low_temperature() {
    let env = make_sis().with_horizon(Horizon::Finite { steps: 10, discount: 1.0 }).unwrap();
    let w = weights(&Graphon::ErdosRenyi(0.5), 4);
    let opts = FpiOptions {
        damping: 0.5,
        iterations: 2000,
        solver: ExactOptions {
            eta: 0.01,
            ..ExactOptions::default()
        },
        ..FpiOptions::default()
    };
    let res = exact_fpi(&env, &w, &PopulationTable::uniform(11, 4, 2), &opts).unwrap();
    assert!(res.converged);
    let e = exploitability(&env, &w, &res.population, &res.policy, &opts.solver).unwrap();
    let bound = 1e-6 + 0.01 * 2f64.ln() * 10.0;
    assert!(e <= bound, "{e}");
}

#[test]
fn contraction_of_measure_free_game_is_zero() {
    let env = make_toy_leftright();
    let mut rng = derive(4, Stream::Contraction, &[]);
    let w = weights(&Graphon::ErdosRenyi(0.0), 2);
    let c = estimate_contraction(&env, &w, &ExactOptions::default(), 5, &mut rng).unwrap();
    assert_eq!(c, 0.0);
    let smooth = ExactOptions {
        eta: 10.0,
        ..ExactOptions::default()
    };
    let sis = make_sis().with_horizon(Horizon::Finite { steps: 10, discount: 1.0 }).unwrap();
    let ratio = estimate_contraction(&sis, &weights(&Graphon::UniformAttachment, 4), &smooth, 10, &mut rng).unwrap();
    println!("SIS contraction ratio at eta = 10: {ratio:.4}");
    assert!(ratio >= 0.0);
}
