//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always printed. The
//! process exits non-zero when any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use helfrich_phase::energy::{c0, c0_constant, EnergyReport, HelfrichParams, PhaseField, PhaseParams};
use helfrich_phase::experiments::{level_set_statistics, run_sweep, sphere_chain_demo, DiscrepancyTable, SweepResult};
use helfrich_phase::geometry::{distance_curvature_check, sharp_helfrich};
use helfrich_phase::minimize::{descend, grad_objective, objective, perturbed, MinimizeConfig};
use helfrich_phase::recovery::{build_recovery_field, RecoveryProfile};
use helfrich_phase::tensor::{project_unchecked, Sym3};
use helfrich_phase::{Grid3, ImplicitSurface, ScalarField3};

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
    seconds: f64,
}

fn run(id: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    let o = Outcome {
        id,
        pass,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    };
    println!(
        "criterion {:<3} {}  [{:.1} s]  {}",
        o.id,
        if o.pass { "PASS" } else { "FAIL" },
        o.seconds,
        o.detail
    );
    o
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

fn criterion_1() -> (bool, String) {
    let c = c0_constant();
    let exact = 2.0 * 2f64.sqrt() / 3.0;
    let gap = (c.value - c.quadrature).abs();
    (c.value == exact && gap <= 1e-10, format!("c0 = {:.16}, |c0 - quadrature| = {gap:.2e}", c.value))
}

fn criterion_2() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_identity: f64 = 0.0;
    let mut worst_contraction: f64 = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let m = Sym3(std::array::from_fn(|_| rng.gen_range(-10.0..10.0)));
        let scale = m.frobenius_sq().max(f64::MIN_POSITIVE);
        worst_identity = worst_identity.max((m.minor_sum() - m.minor_sum_from_invariants()).abs() / scale);
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        let nu = v.map(|c| c / n);
        let pm = project_unchecked(&Sym3::complement_projector(nu), &m);
        let slack = 4.0 * f64::EPSILON * m.frobenius_sq();
        worst_contraction = worst_contraction.max(pm.frobenius_sq() - m.frobenius_sq() - slack);
    }
    (
        worst_identity <= 1e-12 && worst_contraction <= 0.0,
        format!("max identity rel err {worst_identity:.2e}, max |PMP|^2 - |M|^2 - slack {worst_contraction:.2e}"),
    )
}

fn criterion_3() -> (bool, String) {
    let mut ulps: f64 = 0.0;
    let mut errors = Vec::new();
    for eps in [0.2, 0.1, 0.05] {
        let rp = RecoveryProfile::new(eps).expect("valid eps");
        let (dv, ds) = rp.glue_defects_ulps();
        ulps = ulps.max(dv).max(ds);
        errors.push((rp.energy_1d() - c0()).abs());
    }
    (
        ulps <= 4.0 && strictly_decreasing(&errors),
        format!("glue defect {ulps} ulps, |E_1d - c0| at eps 0.2/0.1/0.05 = {errors:?}"),
    )
}

fn sphere_sweep() -> SweepResult {
    let grid = Grid3::cube(128, 2.0).expect("grid");
    let hp = HelfrichParams::new(1.0, -0.5, 0.0).expect("params");
    let s = ImplicitSurface::sphere(1.0).expect("sphere");
    run_sweep(&s, &hp, &grid, &[0.16, 0.08, 0.04]).expect("sweep")
}

fn torus_report() -> EnergyReport {
    let grid = Grid3::cube(128, 3.2).expect("grid");
    let hp = HelfrichParams::new(1.0, -0.5, 0.0).expect("params");
    let s = ImplicitSurface::torus(2.0, 0.6).expect("torus");
    let r = run_sweep(&s, &hp, &grid, &[0.05]).expect("sweep");
    r.rows[0].report.expect("torus row")
}

fn reports(sweep: &SweepResult) -> Vec<EnergyReport> {
    sweep.rows.iter().map(|r| r.report.expect("sphere rows succeed")).collect()
}

fn criterion_4a(sweep: &SweepResult) -> (bool, String) {
    let target = 16.0 * PI;
    let vals: Vec<f64> = reports(sweep).iter().map(|r| r.h_eps / c0()).collect();
    let errs: Vec<f64> = vals.iter().map(|v| (v - target).abs() / target).collect();
    (
        errs[2] <= 0.08 && strictly_decreasing(&errs),
        format!("H/c0 = {} vs 16pi = {target:.4}, rel err {}", fmt_list(&vals), fmt_list(&errs)),
    )
}

fn criterion_4b(sweep: &SweepResult) -> (bool, String) {
    let target = 4.0 * PI;
    let vals: Vec<f64> = reports(sweep).iter().map(|r| r.k_eps / c0()).collect();
    let errs: Vec<f64> = vals.iter().map(|v| (v - target).abs() / target).collect();
    (
        errs[2] <= 0.08 && strictly_decreasing(&errs),
        format!("K/c0 = {} vs 4pi = {target:.4}, rel err {}", fmt_list(&vals), fmt_list(&errs)),
    )
}

fn criterion_4c(sweep: &SweepResult) -> (bool, String) {
    let target = 4.0 * PI;
    let vals: Vec<f64> = reports(sweep).iter().map(|r| r.mu_total / c0()).collect();
    let err = (vals[2] - target).abs() / target;
    (err <= 0.05, format!("mu/c0 = {} vs 4pi = {target:.4}, rel err at eps 0.04 {err:.4}", fmt_list(&vals)))
}

fn criterion_5(torus: &EnergyReport) -> (bool, String) {
    let k = torus.k_eps / c0();
    let bound = 0.08 * 4.0 * PI;
    (k.abs() <= bound, format!("torus K/c0 = {k:.4}, bound {bound:.4}"))
}

fn criterion_6(all: &[EnergyReport]) -> (bool, String) {
    let gaps: Vec<f64> = all.iter().map(|r| r.k_forms().relative_gap()).collect();
    let worst = gaps.iter().cloned().fold(0.0, f64::max);
    (worst <= 1e-10, format!("max relative trace/minors gap {worst:.2e} over {} fields", gaps.len()))
}

fn criterion_7(sweep: &SweepResult) -> (bool, String) {
    let reps = reports(sweep);
    let gaps: Vec<f64> = reps
        .iter()
        .map(|r| (r.k_eps - r.k_alternative.expect("flat boundary")).abs())
        .collect();
    let last = reps.last().expect("rows");
    let rel = gaps[2] / last.k_eps.abs();
    (
        strictly_decreasing(&gaps) && rel <= 0.10,
        format!("|K - K_alt| = {}, final gap / |K| = {rel:.4}", fmt_list(&gaps)),
    )
}

fn criterion_8(sweep: &SweepResult) -> (bool, String) {
    let t = DiscrepancyTable::from_reports(sweep.reports());
    let l1: Vec<f64> = t.rows.iter().map(|r| r.l1).collect();
    let l14: Vec<f64> = t.rows.iter().map(|r| r.l1_4).collect();
    (
        t.l1_strictly_decreasing() && t.l1_4_decreasing(),
        format!("xi L1 = {}, xi L1.4 = {}", fmt_list(&l1), fmt_list(&l14)),
    )
}

fn criterion_9() -> (bool, String) {
    let s = ImplicitSurface::sphere(1.0).expect("sphere");
    let offsets = [0.05, 0.1, 0.2];
    let rows = distance_curvature_check(&s, &offsets).expect("offsets inside the tube");
    let mut ok = true;
    let mut devs = [0.0f64; 3];
    for chunk in rows.chunks(offsets.len()) {
        let d: Vec<f64> = chunk.iter().map(|r| r.k_error_analytic()).collect();
        ok &= chunk.iter().zip(&d).all(|(r, e)| *e <= 3.0 * r.offset * r.exact.k);
        ok &= d.windows(2).all(|w| w[1] > w[0]);
        for (m, e) in devs.iter_mut().zip(&d) {
            *m = m.max(*e);
        }
    }
    (ok, format!("max |minors - K| at t = 0.05/0.1/0.2: {}", fmt_list(&devs)))
}

fn criterion_10() -> (bool, String) {
    let grid = Grid3::cube(128, 2.0).expect("grid");
    let s = ImplicitSurface::sphere(1.0).expect("sphere");
    let eps = 0.08;
    let u = build_recovery_field(&s, &RecoveryProfile::new(eps).expect("eps"), &grid).expect("field");
    let t = level_set_statistics(&u, PhaseParams::new(eps).expect("eps"), 32, Some(4.0 * PI)).expect("bins");
    let target = 4.0 * PI / 2f64.sqrt();
    let err = (t.g_at_zero() - target).abs() / target;
    (err <= 0.10, format!("g(0) = {:.4} vs 4pi/sqrt2 = {target:.4}, rel err {err:.4}", t.g_at_zero()))
}

fn fd_relative_error(u: &ScalarField3, cfg: &MinimizeConfig) -> f64 {
    let g = grad_objective(u, cfg);
    let (mut diff, mut refmax) = (0.0f64, 0.0f64);
    for i in 0..u.values().len() {
        let d = 1e-6 * u.values()[i].abs().max(1.0);
        let mut up = u.clone();
        up.values_mut()[i] += d;
        let mut dn = u.clone();
        dn.values_mut()[i] -= d;
        let fd = (objective(&up, cfg) - objective(&dn, cfg)) / (2.0 * d);
        diff = diff.max((fd - g.values()[i]).abs());
        refmax = refmax.max(fd.abs());
    }
    diff / refmax
}

fn criterion_11() -> (bool, String) {
    let hp = HelfrichParams::new(1.0, -0.5, 0.5).expect("params");
    let mut oracle: f64 = 0.0;
    for seed in 0..3 {
        let g = Grid3::cube(8, 1.0).expect("grid");
        let u = perturbed(&ScalarField3::constant(g, 0.0), 1.0, seed);
        let mut cfg = MinimizeConfig::new(PhaseParams::new(0.4).expect("eps"), hp);
        cfg.lambda_area = 1.0;
        cfg.lambda_vol = 1.0;
        cfg.target_area = 2.0;
        cfg.target_mass = 4.0;
        oracle = oracle.max(fd_relative_error(&u, &cfg));
    }

    let eps = 0.2;
    let grid = Grid3::cube(48, 2.0).expect("grid");
    let s = ImplicitSurface::sphere(1.0).expect("sphere");
    let u = build_recovery_field(&s, &RecoveryProfile::new(eps).expect("eps"), &grid).expect("field");
    let phase = PhaseParams::new(eps).expect("eps");
    let pf = PhaseField::new(&u, phase);
    let mut cfg = MinimizeConfig::new(phase, HelfrichParams::new(1.0, -0.5, 0.0).expect("params"));
    cfg.lambda_area = 1.0;
    cfg.lambda_vol = 1e3;
    cfg.target_area = pf.energy_p();
    cfg.target_mass = pf.mass();
    cfg.max_iters = 200;
    let r = descend(&perturbed(&u, 0.01, 42), &cfg).expect("valid config");
    let residual = r.volume_residual(&cfg);
    let accepted = r.history.len() - 1;
    (
        oracle <= 1e-5 && r.is_monotone() && accepted > 0 && residual <= 0.02,
        format!(
            "FD oracle rel err {oracle:.2e}; descent {} steps ({}), J {:.4} -> {:.4}, monotone {}, volume residual {residual:.2e}",
            accepted,
            r.status.as_str(),
            r.history[0].objective,
            r.final_objective(),
            r.is_monotone()
        ),
    )
}

fn criterion_12() -> (bool, String) {
    let surfaces = [
        ImplicitSurface::sphere(1.0),
        ImplicitSurface::torus(2.0, 0.6),
        ImplicitSurface::ellipsoid(1.2, 1.0, 0.8),
        ImplicitSurface::sphere_chain(3, 1.0, 2.0),
    ]
    .map(|s| s.expect("benchmark surface"));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut ok = true;
    let mut min_margin = f64::INFINITY;
    for _ in 0..20 {
        let kb = rng.gen_range(0.1..5.0);
        let ratio = -rng.gen_range(0.01..0.99);
        let hp = HelfrichParams::new(kb, ratio * kb, rng.gen_range(-3.0..3.0)).expect("params");
        ok &= hp.strict_constraint();
        for s in &surfaces {
            let e = sharp_helfrich(s, &hp);
            let lb = e.lower_bound.expect("strict constraint gives a bound");
            ok &= e.w_hel >= lb;
            min_margin = min_margin.min(e.w_hel - lb);
        }
    }
    let demo = sphere_chain_demo(&[1, 2, 3, 4, 5, 8], &HelfrichParams::new(1.0, -0.5, -2.0).expect("params"))
        .expect("chain demo");
    let per = demo.rows[0].per_sphere();
    let spread = demo.rows.iter().map(|r| (r.per_sphere() - per).abs() / per.abs()).fold(0.0, f64::max);
    let fourpi = demo.rows.iter().all(|r| (r.w_hel - 4.0 * PI * demo.hp.kappa_g * r.count as f64).abs() < 1e-10 * r.w_hel.abs());
    ok &= spread <= 1e-10 && fourpi;
    println!("    chain note: {}", demo.note);
    (
        ok,
        format!(
            "min W_hel + l^2 area = {min_margin:.4}; chain W/h = {per:.10} (4pi kG = {:.10}), spread {spread:.1e}, printed 4pi^2 kG h at h=1: {:.10}",
            4.0 * PI * demo.hp.kappa_g,
            demo.rows[0].paper_printed
        ),
    )
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; list mode
    // must not run the suite.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let _ = env_logger::builder().is_test(true).try_init();
    let mut outcomes = vec![
        run("1", criterion_1),
        run("2", criterion_2),
        run("3", criterion_3),
    ];
    let start = Instant::now();
    let sweep = sphere_sweep();
    let torus = torus_report();
    println!("    (sphere sweep and torus field: {:.1} s)", start.elapsed().as_secs_f64());
    outcomes.push(run("4a", || criterion_4a(&sweep)));
    outcomes.push(run("4b", || criterion_4b(&sweep)));
    outcomes.push(run("4c", || criterion_4c(&sweep)));
    outcomes.push(run("5", || criterion_5(&torus)));
    let mut all = reports(&sweep);
    all.push(torus);
    outcomes.push(run("6", || criterion_6(&all)));
    outcomes.push(run("7", || criterion_7(&sweep)));
    outcomes.push(run("8", || criterion_8(&sweep)));
    outcomes.push(run("9", criterion_9));
    outcomes.push(run("10", criterion_10));
    outcomes.push(run("11", criterion_11));
    outcomes.push(run("12", criterion_12));

    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!(
        "acceptance: {} of {} criteria passed{}",
        outcomes.len() - failed.len(),
        outcomes.len(),
        if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
