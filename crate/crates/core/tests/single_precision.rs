use ndarray::array;
use ofdm_energy::temin::solve_temin;
use ofdm_energy::tsofdma::solve_wstremin;
use ofdm_energy::wsre::solve_wsremin_tdma;
use ofdm_energy::{ChannelMatrixF32, DemandVectorF32, SystemConfigF32, SystemParams, Tolerances};

fn cfg() -> SystemConfigF32 {
    SystemConfigF32::new(SystemParams {
        bandwidth_hz: 1.0,
        noise_psd_w_per_hz: 1.0,
        snr_gap: 1.0,
        p_avg_w: 4.0,
        p_tc_w: 1.0,
        p_rc_w: 0.5,
        alpha0: 0.3,
        alphas: vec![1.0, 1.0, 1.0],
        t_max_s: None,
        tol: Tolerances::default(),
    })
    .unwrap()
}

#[test]
fn solvers_run_in_f32_and_agree_with_f64() {
    let c = cfg();
    let chan = ChannelMatrixF32::new(array![[0.5f32, 2.0, 1.0, 3.0], [1.5, 0.3, 2.2, 0.8], [1.0, 1.0, 0.2, 4.0]], &c).unwrap();
    let demand = DemandVectorF32::new(vec![2.0, 1.5, 3.0]).unwrap();
    let (tdma, _) = solve_wsremin_tdma(&c, &chan, &demand).unwrap();
    let temin = solve_temin(&c, &chan, &demand).unwrap();
    let ts = solve_wstremin(&c, &chan, &demand).unwrap();

    let c64 = ofdm_energy::SystemConfigF64::new(SystemParams {
        bandwidth_hz: 1.0,
        noise_psd_w_per_hz: 1.0,
        snr_gap: 1.0,
        p_avg_w: 4.0,
        p_tc_w: 1.0,
        p_rc_w: 0.5,
        alpha0: 0.3,
        alphas: vec![1.0, 1.0, 1.0],
        t_max_s: None,
        tol: Tolerances::default(),
    })
    .unwrap();
    let chan64 = ofdm_energy::ChannelMatrixF64::new(chan.gains().mapv(f64::from), &c64).unwrap();
    let demand64 = ofdm_energy::DemandVectorF64::new(vec![2.0, 1.5, 3.0]).unwrap();
    let (tdma64, _) = solve_wsremin_tdma(&c64, &chan64, &demand64).unwrap();
    let temin64 = solve_temin(&c64, &chan64, &demand64).unwrap();
    let ts64 = solve_wstremin(&c64, &chan64, &demand64).unwrap();

    let close = |a: f32, b: f64| ((a as f64) - b).abs() <= 1e-4 * b.abs();
    assert!(close(tdma.objective, tdma64.objective));
    assert!(close(temin.report.bs_energy, temin64.report.bs_energy));
    assert!(close(ts.best.objective(), ts64.best.objective()));
}
