//! Scan and sweep drivers.

use ddfv_core::bounds::BoundConfig;
use ddfv_core::fvm::DiscreteSystem;
use ddfv_core::newton::{continuation_solve, standard_ladder, NewtonConfig};
use ddfv_core::scenarios::{
    lbic_scan, lbic_scenario, parameter_sweep, psc_scenario, LbicParams, PscParams,
    PscSpecies, ScenarioFamily, SweepParameter,
};

#[test]
fn dark_scan_is_position_independent() {
    // G0 = 0 at zero bias: every position reports the same (dark) current
    let params = LbicParams { beam_amplitude: 0.0, ..LbicParams::default() };
    let positions = [[1.0, 2.0], [4.0, 2.0], [6.5, 2.0]];
    let signal = lbic_scan(&positions, &params, &NewtonConfig::default(), 1);
    assert!(signal.failures.is_empty());
    assert_eq!(signal.points.len(), 3);
    for p in &signal.points {
        assert_eq!(p.current, signal.points[0].current);
        assert!(p.current.abs() < 1e-12, "dark current at zero bias: {}", p.current);
    }
}

#[test]
fn beam_outside_domain_rejected() {
    let params = LbicParams::default();
    assert!(lbic_scenario([9.0, 2.0], &params).is_err());
    assert!(lbic_scenario([0.0, 0.0], &params).is_ok());
}

#[test]
fn single_value_sweep_equals_direct_solve() {
    let family = ScenarioFamily::Psc {
        species: PscSpecies::Two,
        params: PscParams::default(),
        voltage: 2.0,
        generation: 1.0,
    };
    let result = parameter_sweep(
        &family,
        SweepParameter::Generation,
        &[1.0],
        &NewtonConfig::default(),
        &BoundConfig::default(),
    );
    assert!(result.failures.is_empty());
    assert_eq!(result.rows.len(), 1);

    let scenario = psc_scenario(PscSpecies::Two, 2.0, 1.0).unwrap();
    let reports =
        continuation_solve(&scenario, &standard_ladder(2.0, 1.0), &NewtonConfig::default())
            .unwrap();
    let state = &reports.last().unwrap().state;
    let sys = DiscreteSystem::new(&scenario).unwrap();
    let norms = ddfv_core::bounds::linf_norms(&sys, state).unwrap();
    let row = &result.rows[0];
    assert_eq!(row.norms.n_n, norms.n_n);
    assert_eq!(row.norms.psi, norms.psi);
    assert!(row.bounds_hard_ok);
}

#[test]
fn failed_positions_are_recorded_not_dropped() {
    // a corner position is fine; an out-of-domain one must land in failures
    let params = LbicParams::default();
    let positions = [[0.0, 0.0], [8.5, 2.0]];
    let signal = lbic_scan(&positions, &params, &NewtonConfig::default(), 1);
    assert_eq!(signal.points.len(), 1);
    assert_eq!(signal.failures.len(), 1);
    assert_eq!(signal.failures[0].0, [8.5, 2.0]);
}
