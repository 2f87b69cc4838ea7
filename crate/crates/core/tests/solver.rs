use rarefaction_nsf::energy::l1_distances;
use rarefaction_nsf::eos::EosParams;
use rarefaction_nsf::rarefaction::{Family, PrimitiveState, RarefactionWave, DEFAULT_MARGIN};
use rarefaction_nsf::solver::{
    initialize, run, smoothstep, BoundaryData, FluidField, Grid, InitMode, Reconstruction, Solver, SolverConfig,
};

fn default_wave() -> RarefactionWave {
    RarefactionWave::from_left_state(PrimitiveState::new(1.0, 1.0, 1.0), Family::One, 0.5, 0.5, DEFAULT_MARGIN).unwrap()
}

#[test]
fn uniform_state_survives_a_thousand_steps() {
    let state = PrimitiveState::new(0.8, 1.3, 0.6);
    for recon in [Reconstruction::FirstOrder, Reconstruction::Muscl] {
        let eos = EosParams::new(state.z(), 0.05).unwrap();
        let grid = Grid::new(1.0, 100).unwrap();
        let config = SolverConfig {
            grid,
            eos,
            boundary: BoundaryData::uniform(state),
            cfl: 0.8,
            final_time: f64::MAX,
            init: InitMode::MollifiedRiemann { width: 0.1 },
            output_times: vec![],
            reconstruction: recon,
        };
        let mut field = FluidField::uniform(grid, &eos, state).unwrap();
        let reference = field.clone();
        let mut solver = Solver::new(config).unwrap();
        let mut t = 0.0;
        for _ in 0..1000 {
            t += solver.step(&mut field, t, f64::MAX).unwrap().dt;
        }
        for i in 0..field.len() {
            assert!((field.rho[i] - reference.rho[i]).abs() <= 1e-13);
            assert!((field.mom[i] - reference.mom[i]).abs() <= 1e-13);
            assert!((field.energy[i] / reference.energy[i] - 1.0).abs() <= 1e-13);
        }
    }
}

#[test]
fn one_step_mass_change_telescopes_to_boundary_fluxes() {
    let wave = default_wave();
    for recon in [Reconstruction::FirstOrder, Reconstruction::Muscl] {
        let eos = EosParams::new(wave.ztilde, 0.1).unwrap();
        let mut config = SolverConfig::for_wave(&wave, 200, eos).unwrap();
        config.reconstruction = recon;
        let mut field = initialize(&config, &wave).unwrap();
        let mut solver = Solver::new(config).unwrap();
        let before = field.total_mass();
        let info = solver.step(&mut field, 0.0, 1.0).unwrap();
        let after = field.total_mass();
        assert!(info.inflow > 0.0 && info.outflow > 0.0);
        let defect = (after - before - info.inflow + info.outflow).abs() / before;
        assert!(defect <= 1e-14, "{defect}");
    }
}

#[test]
fn wave_run_closes_the_mass_ledger() {
    let wave = default_wave();
    let eos = EosParams::new(wave.ztilde, 0.1).unwrap();
    let mut config = SolverConfig::for_wave(&wave, 200, eos).unwrap();
    config.output_times = vec![0.1, 0.3];
    let mut seen = Vec::new();
    struct Times<'a>(&'a mut Vec<f64>);
    impl rarefaction_nsf::solver::Observer for Times<'_> {
        fn observe(&mut self, _: &FluidField, t: f64) -> Result<(), rarefaction_nsf::solver::SolverError> {
            self.0.push(t);
            Ok(())
        }
    }
    let summary = run(&config, &wave, &mut Times(&mut seen)).unwrap();
    assert_eq!(seen, vec![0.0, 0.1, 0.3, 0.5]);
    assert_eq!(summary.t_final, 0.5);
    assert!(summary.ledger.worst_step_defect <= 1e-10);
    assert!(summary.ledger.defect(summary.field.total_mass()) <= 1e-10);
}

#[test]
fn shock_tube_smoke() {
    // a Sod-like pair with a common drift so the left boundary is inflow
    let left = PrimitiveState::new(1.0, 1.0, 0.5);
    let right = PrimitiveState::new(0.125, 0.8, 0.5);
    let eos = EosParams::new(1.0, 0.002).unwrap();
    let grid = Grid::new(2.0, 400).unwrap();
    let config = SolverConfig {
        grid,
        eos,
        boundary: BoundaryData {
            rho_left: left.rho,
            theta_left: left.theta,
            u_left: left.u,
            theta_right: right.theta,
            u_right: right.u,
        },
        cfl: 0.4,
        final_time: f64::MAX,
        init: InitMode::MollifiedRiemann { width: 0.02 },
        output_times: vec![],
        reconstruction: Reconstruction::Muscl,
    };
    let mut field = FluidField::from_primitives(grid, &eos, |x| {
        let phi = smoothstep((x + 0.01) / 0.02);
        PrimitiveState::new(
            left.rho + (right.rho - left.rho) * phi,
            left.theta + (right.theta - left.theta) * phi,
            left.u,
        )
    })
    .unwrap();
    let mut solver = Solver::new(config).unwrap();
    let mut t = 0.0;
    for _ in 0..1000 {
        let before = field.total_mass();
        let info = solver.step(&mut field, t, f64::MAX).unwrap();
        t += info.dt;
        let defect = (field.total_mass() - before - info.inflow + info.outflow).abs() / before;
        assert!(defect <= 1e-12);
    }
    assert!(t > 0.3, "t = {t}");
    let (lo, hi) = field.rho.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(lo > 0.1 && hi < 1.05, "density range [{lo}, {hi}]");
    assert!(field.theta.iter().all(|&th| th > 0.0));
}

/// `L¹(ρ)` distance between the mollified start and the Riemann datum.
fn mollification_error(width: f64) -> f64 {
    let wave = default_wave();
    let eos = EosParams::new(wave.ztilde, 0.1).unwrap();
    let mut config = SolverConfig::for_wave(&wave, 4000, eos).unwrap();
    config.init = InitMode::MollifiedRiemann { width };
    let field = initialize(&config, &wave).unwrap();
    let g = field.grid;
    (0..field.len())
        .map(|i| (field.rho[i] - wave.riemann_datum(g.center(i)).rho).abs())
        .sum::<f64>()
        * g.h
}

#[test]
fn mollification_error_halves_with_the_width() {
    let coarse = mollification_error(0.08);
    let fine = mollification_error(0.04);
    // exact value: 3/16 width |jump|
    assert!((coarse - 3.0 / 16.0 * 0.08 * 0.5).abs() < 1e-3 * coarse, "{coarse}");
    assert!((coarse / fine - 2.0).abs() < 0.02, "ratio {}", coarse / fine);
}

fn inviscid_error(cells: usize) -> f64 {
    let wave = default_wave();
    let eos = EosParams::inviscid(wave.ztilde).unwrap();
    let mut config = SolverConfig::for_wave(&wave, cells, eos).unwrap();
    config.init = InitMode::ExactWaveAt { t0: 0.1 };
    let summary = run(&config, &wave, &mut ()).unwrap();
    l1_distances(&summary.field, &wave, 0.5).0
}

#[test]
fn inviscid_scheme_converges_to_the_exact_wave() {
    let errors: Vec<f64> = [200, 400, 800].iter().map(|&n| inviscid_error(n)).collect();
    let slope = |a: f64, b: f64| (a / b).log2();
    assert!(errors[1] < errors[0] && errors[2] < errors[1], "{errors:?}");
    let fit = (slope(errors[0], errors[1]) + slope(errors[1], errors[2])) / 2.0;
    assert!(fit >= 0.8, "observed order {fit} from {errors:?}");
}
