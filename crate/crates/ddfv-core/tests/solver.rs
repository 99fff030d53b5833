//! Newton and continuation behavior on the bundled scenarios.

use ddfv_core::fvm::{solve_constrained_poisson, DiscreteSystem, PoissonSource, StateVector};
use ddfv_core::newton::{
    continuation_solve, equilibrium_state, newton_solve, standard_ladder, ContinuationParameter,
    NewtonConfig, NewtonError, Rung,
};
use ddfv_core::scenarios::{psc_scenario, psc_scenario_with, PscParams, PscSpecies};

fn cfg() -> NewtonConfig {
    NewtonConfig::default()
}

#[test]
fn exact_initial_guess_converges_immediately() {
    let mut scenario = psc_scenario(PscSpecies::Two, 0.0, 0.0).unwrap();
    scenario.applied_voltage = 0.0;
    let eq = equilibrium_state(&scenario).unwrap();
    let sys = DiscreteSystem::new(&scenario).unwrap();
    let report = newton_solve(&sys, &eq, &cfg()).unwrap();
    assert!(report.converged);
    assert!(report.iterations.len() <= 1, "took {} iterations", report.iterations.len());
}

#[test]
fn psc_voltage_ladder_converges_within_budget() {
    // V = 0 -> 2 in 9 uniform rungs at G0 = 0, <= 25 iterations each
    let scenario = psc_scenario(PscSpecies::Two, 2.0, 0.0).unwrap();
    let ladder = standard_ladder(2.0, 0.0);
    assert_eq!(ladder.len(), 9);
    let reports = continuation_solve(&scenario, &ladder, &cfg()).unwrap();
    for (i, rep) in reports.iter().enumerate() {
        assert!(rep.converged, "rung {i}");
        assert!(rep.iterations.len() <= 25, "rung {i}: {}", rep.iterations.len());
    }
}

#[test]
fn infeasible_mass_rejected_before_iterating() {
    // assemble a scenario that skips builder validation, then let the solver
    // gate on validate_assumptions
    let params = PscParams { ion_mass: Some(45.0), ..PscParams::default() };
    let mut scenario = psc_scenario(PscSpecies::Three, 0.0, 0.0).unwrap();
    scenario.species.ion_mass = params.ion_mass.unwrap();
    let sys = DiscreteSystem::new(&scenario).unwrap();
    let state = StateVector::constant(scenario.mesh.n_cells(), 0.0, 0.0, 0.0, Some(0.0));
    match newton_solve(&sys, &state, &cfg()) {
        Err(NewtonError::ValidationFailed(report)) => {
            assert!(report.failures().iter().any(|c| c.name == "mass_compatibility"));
        }
        other => panic!("expected validation failure, got {other:?}"),
    }
}

#[test]
fn quadratic_local_convergence() {
    // log-residual curvature of the last accepted steps is negative
    let scenario = psc_scenario(PscSpecies::Two, 2.0, 0.0).unwrap();
    let ladder = standard_ladder(2.0, 0.0);
    let reports = continuation_solve(&scenario, &ladder, &cfg()).unwrap();
    let history = &reports.last().unwrap().iterations;
    // the final accepted step lands on the rounding floor of the residual,
    // so the contraction is measured on the last three norms above it
    let clean: Vec<f64> = history
        .iter()
        .map(|r| r.residual_norm)
        .filter(|&r| r > 1e-9)
        .collect();
    assert!(clean.len() >= 3, "need three accepted steps above the floor: {clean:?}");
    let logs: Vec<f64> = clean[clean.len() - 3..].iter().map(|r| r.ln()).collect();
    let curvature = (logs[2] - logs[1]) - (logs[1] - logs[0]);
    assert!(curvature < 0.0, "curvature {curvature} (residuals {logs:?})");
    // and the full-step phase is reached
    assert_eq!(history.last().unwrap().damping, 1.0);
}

#[test]
fn accepted_history_is_monotone() {
    let scenario = psc_scenario(PscSpecies::Three, 1.0, 1.0).unwrap();
    let ladder = standard_ladder(1.0, 1.0);
    let reports = continuation_solve(&scenario, &ladder, &cfg()).unwrap();
    for rep in &reports {
        for w in rep.iterations.windows(2) {
            assert!(w[1].residual_norm <= w[0].residual_norm);
        }
    }
}

#[test]
fn warm_start_dominates_cold_start() {
    // iterations with the ladder warm start <= iterations from a cold
    // equilibrium start, at every generation rung
    let scenario = psc_scenario(PscSpecies::Two, 1.0, 100.0).unwrap();
    let ladder = standard_ladder(1.0, 100.0);
    let reports = continuation_solve(&scenario, &ladder, &cfg()).unwrap();
    let eq = equilibrium_state(&scenario).unwrap();
    for (rung, rep) in ladder.iter().zip(&reports) {
        if rung.parameter != ContinuationParameter::Generation {
            continue;
        }
        let cold_scenario = psc_scenario(PscSpecies::Two, 1.0, rung.value).unwrap();
        let sys = DiscreteSystem::new(&cold_scenario).unwrap();
        let cold = match newton_solve(&sys, &eq, &cfg()) {
            Ok(r) => r.iterations.len(),
            Err(_) => usize::MAX,
        };
        assert!(
            rep.iterations.len() <= cold,
            "rung G0={}: warm {} > cold {cold}",
            rung.value,
            rep.iterations.len()
        );
    }
}

#[test]
fn continuation_is_bitwise_deterministic() {
    let scenario = psc_scenario(PscSpecies::Three, 1.0, 1.0).unwrap();
    let ladder = standard_ladder(1.0, 1.0);
    let a = continuation_solve(&scenario, &ladder, &cfg()).unwrap();
    let b = continuation_solve(&scenario, &ladder, &cfg()).unwrap();
    let (sa, sb) = (&a.last().unwrap().state, &b.last().unwrap().state);
    assert_eq!(sa.psi, sb.psi);
    assert_eq!(sa.v_n, sb.v_n);
    assert_eq!(sa.v_p, sb.v_p);
    assert_eq!(sa.v_a, sb.v_a);
}

#[test]
fn empty_ladder_returns_empty_list() {
    let scenario = psc_scenario(PscSpecies::Two, 0.0, 0.0).unwrap();
    let reports = continuation_solve(&scenario, &[], &cfg()).unwrap();
    assert!(reports.is_empty());
}

#[test]
fn single_zero_rung_equals_direct_solve() {
    let scenario = psc_scenario(PscSpecies::Two, 0.0, 0.0).unwrap();
    let ladder = [Rung { parameter: ContinuationParameter::Voltage, value: 0.0 }];
    let via_ladder = continuation_solve(&scenario, &ladder, &cfg()).unwrap();
    let eq = equilibrium_state(&scenario).unwrap();
    let sys = DiscreteSystem::new(&scenario).unwrap();
    let direct = newton_solve(&sys, &eq, &cfg()).unwrap();
    assert_eq!(via_ladder.last().unwrap().state.psi, direct.state.psi);
}

#[test]
fn starved_budget_returns_best_iterate() {
    let scenario = psc_scenario(PscSpecies::Two, 2.0, 0.0).unwrap();
    let mut scenario_hard = scenario.clone();
    scenario_hard.applied_voltage = 2.0;
    let eq = equilibrium_state(&scenario).unwrap();
    let sys = DiscreteSystem::new(&scenario_hard).unwrap();
    let tight = NewtonConfig { max_iter: 1, ..cfg() };
    match newton_solve(&sys, &eq, &tight) {
        Err(NewtonError::MaxIterations { report }) => {
            assert!(!report.converged);
            assert!(report.residual_norm < report.initial_residual_norm);
            assert_eq!(report.iterations.len(), 1);
        }
        other => panic!("expected MaxIterations, got {other:?}"),
    }
}

#[test]
fn frozen_zero_source_gives_flat_potential() {
    // z_a = 0, C = 0, n_n = n_p = 0, zero Dirichlet data: psi = 0
    let params = PscParams { contact_doping: 0.0, spacing: 0.1, ..PscParams::default() };
    let mut scenario = psc_scenario_with(PscSpecies::Two, 0.0, 0.0, &params).unwrap();
    for region in scenario.doping.iter_mut() {
        *region = 0.0;
    }
    for c in scenario.contacts.iter_mut() {
        c.psi_builtin = 0.0;
    }
    let sys = DiscreteSystem::new(&scenario).unwrap();
    let zeros = vec![0.0; scenario.mesh.n_cells()];
    let sol = solve_constrained_poisson(
        &sys,
        PoissonSource::Frozen { n_n: &zeros, n_p: &zeros },
        1.0,
    )
    .unwrap();
    for v in &sol.psi {
        assert_eq!(*v, 0.0);
    }
}
