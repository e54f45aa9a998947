use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use helfrich_phase::energy::{c0_constant, PhaseField};
use helfrich_phase::experiments::{
    crosscheck_from_sweep, level_set_statistics, run_sweep_on, sphere_chain_demo, DiscrepancyTable, SweepOptions,
};
use helfrich_phase::geometry::{distance_curvature_check, sharp_helfrich};
use helfrich_phase::io::{csv, load_config, write_vtk, write_vtk_fields, Command, RunConfig};
use helfrich_phase::minimize::{descend, perturbed, MinimizeConfig};
use helfrich_phase::recovery::build_recovery_field;
use helfrich_phase::{Error, HelfrichParams, Result, ScalarField3};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Energy,
    Sweep,
    Diagnose,
    Minimize,
    Export,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Energy => Command::Energy,
            Cmd::Sweep => Command::Sweep,
            Cmd::Diagnose => Command::Diagnose,
            Cmd::Minimize => Command::Minimize,
            Cmd::Export => Command::Export,
        }
    }
}

/// Phase-field Helfrich energies on 3D grids.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    command: Cmd,
    /// Path to a `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// 2 for configuration errors, 3 for failed compute preconditions, 1 for
/// I/O failures while writing results.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } => 2,
        Error::Precondition(_) | Error::Evaluation { .. } => 3,
        Error::Io { .. } => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(&cli.config)?.for_command(cli.command.into())?;
    let out = cli.out.clone().unwrap_or_else(|| cfg.out.clone());
    std::fs::create_dir_all(&out).map_err(|source| Error::Io {
        path: out.clone(),
        source,
    })?;
    match cli.command {
        Cmd::Energy => sweep(&cfg, &out, "energy.csv", &[cfg.single_eps()?]),
        Cmd::Sweep => sweep(&cfg, &out, "sweep.csv", &cfg.sweep_eps()?),
        Cmd::Diagnose => diagnose(&cfg, &out),
        Cmd::Minimize => minimize(&cfg, &out),
        Cmd::Export => export(&cfg, &out),
    }
}

fn recovery(cfg: &RunConfig, eps: f64) -> Result<ScalarField3> {
    build_recovery_field(&cfg.surface, &cfg.profile.profile(eps)?, &cfg.grid)
}

fn sweep(cfg: &RunConfig, out: &Path, name: &str, eps_list: &[f64]) -> Result<()> {
    let plan: Vec<_> = eps_list.iter().map(|&e| (e, cfg.grid)).collect();
    let opts = SweepOptions {
        width: cfg.profile,
        grad_floor: cfg.grad_floor,
    };
    let result = run_sweep_on(&cfg.surface, &cfg.hp, &plan, opts)?;
    csv::write_sweep_csv(&result, &out.join(name))?;
    if eps_list.len() > 1 {
        csv::write_discrepancy_csv(&DiscrepancyTable::from_reports(result.reports()), &out.join("discrepancy.csv"))?;
        csv::write_crosscheck_csv(&crosscheck_from_sweep(&result), &out.join("crosscheck.csv"))?;
    }
    let t = result.targets;
    println!("targets: W = {:.10}, H = {:.10}, K = {:.10}, mu = {:.10}", t.w, t.h, t.k, t.mu);
    for row in &result.rows {
        match &row.report {
            Some(r) => println!(
                "eps = {}: W = {:.10} (err {:.3e}), K = {:.10} (err {:.3e}), mu = {:.10}",
                row.eps, r.w_eps, row.err_w, r.k_eps, row.err_k, r.mu_total
            ),
            None => println!("eps = {}: failed: {}", row.eps, row.failure.as_deref().unwrap_or("")),
        }
    }
    if result.rows.iter().all(|r| !r.is_ok()) {
        return Err(Error::Precondition(
            result.rows[0].failure.clone().unwrap_or_else(|| "every row failed".into()),
        ));
    }
    Ok(())
}

fn diagnose(cfg: &RunConfig, out: &Path) -> Result<()> {
    let c0 = c0_constant();
    println!("c0 = {:.17} (quadrature {:.17})", c0.value, c0.quadrature);

    let sharp = sharp_helfrich(&cfg.surface, &cfg.hp);
    println!("sharp: W_hel = {:.10}, area = {:.10}, int K = {:.10}", sharp.w_hel, sharp.area, sharp.int_k);
    match sharp.lower_bound {
        Some(lb) => println!(
            "lower bound: -l^2 area = {lb:.10}, satisfied = {}",
            sharp.satisfies_lower_bound()
        ),
        None => println!("lower bound: not defined outside -1 < kappa_G/kappa_b < 0"),
    }

    let rows = distance_curvature_check(&cfg.surface, &cfg.offsets)?;
    csv::write_distance_csv(&rows, &out.join("distance_curvature.csv"))?;
    let worst = rows.iter().map(|r| r.k_error_analytic()).fold(0.0, f64::max);
    println!(
        "distance/curvature: {} rows, max |minors - K| = {worst:.3e}, all within bound = {}",
        rows.len(),
        rows.iter().all(|r| r.within_bound())
    );

    let eps = cfg.single_eps()?;
    let u = recovery(cfg, eps)?;
    let table = level_set_statistics(&u, cfg.phase(eps)?, cfg.nbins, Some(sharp.area))?;
    csv::write_level_set_csv(&table, &out.join("level_set.csv"))?;
    println!(
        "level sets: g(0) = {:.10}, reference = {:.10}",
        table.g_at_zero(),
        sharp.area / 2f64.sqrt()
    );
    let pf = PhaseField::new(&u, cfg.phase(eps)?);
    let forms = pf.energy_k_forms();
    println!("K forms: trace = {:.12}, minors = {:.12}, gap = {:.3e}", forms.trace, forms.minors, forms.relative_gap());

    let chain_hp = HelfrichParams::new(cfg.hp.kappa_b, cfg.hp.kappa_g, -2.0)?;
    let demo = sphere_chain_demo(&cfg.chain_counts, &chain_hp)?;
    csv::write_chain_csv(&demo, &out.join("chain.csv"))?;
    for r in &demo.rows {
        println!("chain h = {}: W_hel = {:.10}, paper_printed = {:.10}", r.count, r.w_hel, r.paper_printed);
    }
    println!("note: {}", demo.note);
    Ok(())
}

fn minimize(cfg: &RunConfig, out: &Path) -> Result<()> {
    let eps = cfg.single_eps()?;
    let phase = cfg.phase(eps)?;
    let u_rec = recovery(cfg, eps)?;
    let pf = PhaseField::new(&u_rec, phase);
    let spec = cfg.minimize;
    let mc = MinimizeConfig {
        phase,
        hp: cfg.hp,
        lambda_area: spec.lambda_area,
        lambda_vol: spec.lambda_vol,
        target_area: spec.target_area.unwrap_or_else(|| pf.energy_p()),
        target_mass: spec.target_mass.unwrap_or_else(|| pf.mass()),
        max_iters: spec.max_iters,
        step0: spec.step0,
        grad_tol: spec.grad_tol,
        backtrack: spec.backtrack,
    };
    let u0 = perturbed(&u_rec, spec.noise, cfg.seed);
    let result = descend(&u0, &mc)?;
    csv::write_history_csv(&result, &out.join("history.csv"))?;
    write_vtk(&result.u, &out.join("minimized.vtk"))?;
    println!(
        "status = {}, iterations = {}, objective {:.10} -> {:.10}, volume residual = {:.3e}",
        result.status.as_str(),
        result.history.len() - 1,
        result.history[0].objective,
        result.final_objective(),
        if mc.target_mass != 0.0 { result.volume_residual(&mc) } else { f64::NAN }
    );
    Ok(())
}

fn export(cfg: &RunConfig, out: &Path) -> Result<()> {
    let eps = cfg.single_eps()?;
    let u = recovery(cfg, eps)?;
    let pf = PhaseField::new(&u, cfg.phase(eps)?);
    let d = pf.densities();
    let h0 = cfg.hp.h0;
    let h_density: Vec<f64> = (0..u.grid().len()).map(|i| pf.point(i).h_density(h0)).collect();
    let k_density: Vec<f64> = (0..u.grid().len()).map(|i| pf.point(i).k_density_trace()).collect();
    let path = out.join("field.vtk");
    write_vtk_fields(
        u.grid(),
        &[
            ("u", u.values()),
            ("mu", d.mu.values()),
            ("xi", d.xi.values()),
            ("h_density", &h_density),
            ("k_density", &k_density),
        ],
        &path,
    )?;
    println!("wrote {}", path.display());
    Ok(())
}
