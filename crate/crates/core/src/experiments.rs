//! Epsilon sweeps toward the sharp limit and related diagnostics.

use std::f64::consts::PI;

use crate::energy::{c0, double_well, EnergyReport, HelfrichParams, PhaseField, PhaseParams};
use crate::error::{Error, Result};
use crate::geometry::{sharp_helfrich, ImplicitSurface, SharpHelfrich};
use crate::grid::{Grid3, ScalarField3};
use crate::recovery::{recovery_from_distance, sample_distance, ProfileWidth, RecoveryProfile};

/// `c₀`-scaled sharp values approached by the diffuse energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepTargets {
    /// `c₀ W_hel`.
    pub w: f64,
    /// `c₀ ∫(H − H₀)²`.
    pub h: f64,
    /// `c₀ ∫K`.
    pub k: f64,
    /// `c₀ · area`, the limit of `μ_ε(Ω)`.
    pub mu: f64,
}

impl SweepTargets {
    pub fn from_sharp(s: &SharpHelfrich) -> Self {
        let c = c0();
        SweepTargets {
            w: c * s.w_hel,
            h: c * s.int_bending,
            k: c * s.int_k,
            mu: c * s.area,
        }
    }
}

/// Error of `value` against `target`: relative when the target is nonzero,
/// otherwise absolute in units of `c₀`.
pub fn target_error(value: f64, target: f64) -> f64 {
    if target != 0.0 {
        (value - target).abs() / target.abs()
    } else {
        value.abs() / c0()
    }
}

/// Empirical order `log(e₀/e₁)/log(ε₀/ε₁)` between consecutive rows.
pub fn empirical_order(eps0: f64, err0: f64, eps1: f64, err1: f64) -> Option<f64> {
    (err0 > 0.0 && err1 > 0.0 && eps0 != eps1).then(|| (err0 / err1).ln() / (eps0 / eps1).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub grid: Grid3,
    /// `None` when the row failed; see `failure`.
    pub report: Option<EnergyReport>,
    pub failure: Option<String>,
    pub err_w: f64,
    pub err_h: f64,
    pub err_k: f64,
    pub err_mu: f64,
    pub order_w: Option<f64>,
    pub order_h: Option<f64>,
    pub order_k: Option<f64>,
    pub order_mu: Option<f64>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.report.is_some()
    }

    pub fn status(&self) -> &str {
        if self.is_ok() {
            "ok"
        } else {
            "failed"
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub surface: ImplicitSurface,
    pub hp: HelfrichParams,
    pub sharp: SharpHelfrich,
    pub targets: SweepTargets,
    /// Ordered by decreasing `ε`.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn reports(&self) -> impl Iterator<Item = &EnergyReport> {
        self.rows.iter().filter_map(|r| r.report.as_ref())
    }

    /// Recomputes the order columns from the stored errors.
    fn fill_orders(&mut self) {
        for i in 1..self.rows.len() {
            let (a, b) = (&self.rows[i - 1], &self.rows[i]);
            if !(a.is_ok() && b.is_ok()) {
                continue;
            }
            let o = |e0: f64, e1: f64| empirical_order(a.eps, e0, b.eps, e1);
            let orders = (o(a.err_w, b.err_w), o(a.err_h, b.err_h), o(a.err_k, b.err_k), o(a.err_mu, b.err_mu));
            let r = &mut self.rows[i];
            (r.order_w, r.order_h, r.order_k, r.order_mu) = orders;
        }
    }
}

fn check_decreasing(eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() {
        return Err(Error::precondition("eps list is empty"));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::precondition(format!("eps list must be strictly decreasing, got {eps_list:?}")));
    }
    Ok(())
}

/// Profile width and flat-set floor used by a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub width: ProfileWidth,
    pub grad_floor: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            width: ProfileWidth::Sqrt2,
            grad_floor: crate::energy::DEFAULT_GRAD_FLOOR,
        }
    }
}

/// Builds the recovery field of `surface` for every `ε` on one grid and
/// evaluates all diffuse energies against the sharp targets.
pub fn run_sweep(surface: &ImplicitSurface, hp: &HelfrichParams, grid: &Grid3, eps_list: &[f64]) -> Result<SweepResult> {
    let plan: Vec<(f64, Grid3)> = eps_list.iter().map(|&e| (e, *grid)).collect();
    run_sweep_on(surface, hp, &plan, SweepOptions::default())
}

/// Like [`run_sweep`] with a separate grid per `ε` and explicit options.
pub fn run_sweep_on(
    surface: &ImplicitSurface,
    hp: &HelfrichParams,
    plan: &[(f64, Grid3)],
    opts: SweepOptions,
) -> Result<SweepResult> {
    let eps_list: Vec<f64> = plan.iter().map(|p| p.0).collect();
    check_decreasing(&eps_list)?;
    let sharp = sharp_helfrich(surface, hp);
    let targets = SweepTargets::from_sharp(&sharp);
    let mut distance: Option<ScalarField3> = None;
    let mut rows = Vec::with_capacity(plan.len());
    for &(eps, grid) in plan {
        if distance.as_ref().is_none_or(|d| *d.grid() != grid) {
            distance = Some(sample_distance(surface, &grid)?);
        }
        let d = distance.as_ref().expect("sampled above");
        let outcome = opts
            .width
            .profile(eps)
            .and_then(|rp| recovery_from_distance(d, &rp))
            .and_then(|u| {
                let p = PhaseParams::with_floor(eps, opts.grad_floor)?;
                p.check_grid(&grid)?;
                Ok(PhaseField::new(&u, p).report(hp))
            });
        let row = match outcome {
            Ok(r) => {
                log::info!("eps = {eps}: W = {:.6}, K/c0 = {:.6}", r.w_eps, r.k_eps / c0());
                SweepRow {
                    eps,
                    grid,
                    err_w: target_error(r.w_eps, targets.w),
                    err_h: target_error(r.h_eps, targets.h),
                    err_k: target_error(r.k_eps, targets.k),
                    err_mu: target_error(r.mu_total, targets.mu),
                    report: Some(r),
                    failure: None,
                    order_w: None,
                    order_h: None,
                    order_k: None,
                    order_mu: None,
                }
            }
            Err(e) => {
                log::warn!("eps = {eps}: row failed: {e}");
                SweepRow {
                    eps,
                    grid,
                    report: None,
                    failure: Some(match e {
                        Error::Precondition(m) => m,
                        other => other.to_string(),
                    }),
                    err_w: f64::NAN,
                    err_h: f64::NAN,
                    err_k: f64::NAN,
                    err_mu: f64::NAN,
                    order_w: None,
                    order_h: None,
                    order_k: None,
                    order_mu: None,
                }
            }
        };
        rows.push(row);
    }
    let mut result = SweepResult {
        surface: *surface,
        hp: *hp,
        sharp,
        targets,
        rows,
    };
    result.fill_orders();
    Ok(result)
}

/// `‖ξ_ε‖_{L^p}` for `p ∈ {1, 1.25, 1.4}` at one `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyRow {
    pub eps: f64,
    pub l1: f64,
    pub l1_25: f64,
    pub l1_4: f64,
    /// Previous row's norm over this row's, per exponent.
    pub ratios: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyTable {
    pub rows: Vec<DiscrepancyRow>,
}

impl DiscrepancyTable {
    pub fn from_reports<'a>(reports: impl IntoIterator<Item = &'a EnergyReport>) -> Self {
        let mut rows: Vec<DiscrepancyRow> = Vec::new();
        for r in reports {
            let ratios = rows
                .last()
                .map(|p| [p.l1 / r.xi_l1, p.l1_25 / r.xi_l1_25, p.l1_4 / r.xi_l1_4]);
            rows.push(DiscrepancyRow {
                eps: r.eps,
                l1: r.xi_l1,
                l1_25: r.xi_l1_25,
                l1_4: r.xi_l1_4,
                ratios,
            });
        }
        DiscrepancyTable { rows }
    }

    /// `‖ξ‖_{L¹}` strictly decreasing along the rows.
    pub fn l1_strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].l1 < w[0].l1)
    }

    /// `‖ξ‖_{L^{1.4}}` finite and strictly decreasing along the rows.
    pub fn l1_4_decreasing(&self) -> bool {
        self.rows.iter().all(|r| r.l1_4.is_finite()) && self.rows.windows(2).all(|w| w[1].l1_4 < w[0].l1_4)
    }
}

/// Discrepancy norms of the recovery fields of `surface`.
pub fn discrepancy_decay(surface: &ImplicitSurface, grid: &Grid3, eps_list: &[f64]) -> Result<DiscrepancyTable> {
    let hp = HelfrichParams::new(1.0, -0.5, 0.0)?;
    let sweep = run_sweep(surface, &hp, grid, eps_list)?;
    if let Some(row) = sweep.rows.iter().find(|r| !r.is_ok()) {
        return Err(Error::precondition(format!(
            "eps = {}: {}",
            row.eps,
            row.failure.as_deref().unwrap_or("failed")
        )));
    }
    let table = DiscrepancyTable::from_reports(sweep.reports());
    if !table.l1_strictly_decreasing() {
        log::warn!("discrepancy L1 norm is not decreasing over {eps_list:?}");
    }
    Ok(table)
}

/// One equal-width bin of [`LevelSetTable`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSetBin {
    pub center: f64,
    /// `(Σ_{u ∈ bin} ε|∇u|² w h³)/Δs`.
    pub g: f64,
    /// `√(2W(s)) · area`, when an area is supplied.
    pub reference: Option<f64>,
    /// False for the two bins touching `±1`.
    pub comparable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetTable {
    pub eps: f64,
    pub width: f64,
    pub bins: Vec<LevelSetBin>,
}

impl LevelSetTable {
    /// Estimate at `s = 0`: the central bin for odd counts, the mean of the
    /// two central bins otherwise.
    pub fn g_at_zero(&self) -> f64 {
        let n = self.bins.len();
        if n % 2 == 1 {
            self.bins[n / 2].g
        } else {
            0.5 * (self.bins[n / 2 - 1].g + self.bins[n / 2].g)
        }
    }

    /// Largest `|g(s) − g(−s)|` over mirrored bin pairs.
    pub fn asymmetry(&self) -> f64 {
        let n = self.bins.len();
        (0..n / 2)
            .map(|k| (self.bins[k].g - self.bins[n - 1 - k].g).abs())
            .fold(0.0, f64::max)
    }
}

/// Coarea-binned level-set statistic `g_ε(s)` of `u`.
pub fn level_set_statistics(u: &ScalarField3, p: PhaseParams, nbins: usize, area: Option<f64>) -> Result<LevelSetTable> {
    if nbins < 8 {
        return Err(Error::precondition(format!("nbins must be at least 8, got {nbins}")));
    }
    let grid = *u.grid();
    let field = PhaseField::new(u, p);
    let width = 2.0 / nbins as f64;
    let h3 = grid.spacing().powi(3);
    let mut sums = vec![0.0; nbins];
    for idx in 0..grid.len() {
        let s = u.values()[idx];
        if !(s > -1.0 && s < 1.0) {
            continue;
        }
        let k = (((s + 1.0) / width) as usize).min(nbins - 1);
        let [i, j, l] = grid.ijk(idx);
        let g = field.gradient().values()[idx];
        sums[k] += p.eps * crate::tensor::dot(g, g) * grid.trapezoid_weight(i, j, l) * h3;
    }
    let bins = sums
        .iter()
        .enumerate()
        .map(|(k, &sum)| {
            let center = -1.0 + (k as f64 + 0.5) * width;
            LevelSetBin {
                center,
                g: sum / width,
                reference: area.map(|a| (2.0 * double_well(center)).sqrt() * a),
                comparable: k != 0 && k != nbins - 1,
            }
        })
        .collect();
    Ok(LevelSetTable {
        eps: p.eps,
        width,
        bins,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheckRow {
    pub eps: f64,
    pub k: f64,
    pub k_alternative: f64,
}

impl CrossCheckRow {
    pub fn gap(&self) -> f64 {
        (self.k - self.k_alternative).abs()
    }
}

/// `K_ε` against its alternative form on the recovery fields of `surface`.
pub fn gaussian_formula_crosscheck(surface: &ImplicitSurface, grid: &Grid3, eps_list: &[f64]) -> Result<Vec<CrossCheckRow>> {
    check_decreasing(eps_list)?;
    let d = sample_distance(surface, grid)?;
    eps_list
        .iter()
        .map(|&eps| {
            let u = recovery_from_distance(&d, &RecoveryProfile::new(eps)?)?;
            let pf = PhaseField::new(&u, PhaseParams::new(eps)?);
            Ok(CrossCheckRow {
                eps,
                k: pf.energy_k(),
                k_alternative: pf.alternative_k()?,
            })
        })
        .collect()
}

/// Same table from a finished sweep; rows without the alternative form are
/// skipped.
pub fn crosscheck_from_sweep(sweep: &SweepResult) -> Vec<CrossCheckRow> {
    sweep
        .reports()
        .filter_map(|r| {
            r.k_alternative.map(|k_alternative| CrossCheckRow {
                eps: r.eps,
                k: r.k_eps,
                k_alternative,
            })
        })
        .collect()
}

/// Note attached to every chain demonstration.
pub const CHAIN_CONSTANT_NOTE: &str = "Gauss-Bonnet gives 4*pi per unit sphere, so W_hel = 4*pi*kappa_G*h; \
the printed constant 4*pi^2*kappa_G*h is reported alongside as paper_printed and does not match";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainRow {
    pub count: usize,
    pub area: f64,
    pub w_hel: f64,
    /// `4π² κ_G h`, the constant as printed in the source of the example.
    pub paper_printed: f64,
}

impl ChainRow {
    pub fn per_sphere(&self) -> f64 {
        self.w_hel / self.count as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainDemo {
    pub hp: HelfrichParams,
    pub rows: Vec<ChainRow>,
    pub note: &'static str,
}

/// Sharp energies of `h` tangent unit balls centered at spacing 2.
///
/// Needs `κ_G < 0` and `H₀ = −2`, the mean curvature of a unit sphere with
/// `d > 0` inside, so that the bending term vanishes.
pub fn sphere_chain_demo(counts: &[usize], hp: &HelfrichParams) -> Result<ChainDemo> {
    if !(hp.kappa_g < 0.0) {
        return Err(Error::precondition(format!("chain demo needs kappa_G < 0, got {}", hp.kappa_g)));
    }
    if (hp.h0 + 2.0).abs() > 1e-12 {
        return Err(Error::precondition(format!(
            "chain demo needs H0 = -2 (unit spheres, d > 0 inside), got {}",
            hp.h0
        )));
    }
    let rows = counts
        .iter()
        .map(|&count| {
            let s = ImplicitSurface::sphere_chain(count, 1.0, 2.0)?;
            let e = sharp_helfrich(&s, hp);
            Ok(ChainRow {
                count,
                area: e.area,
                w_hel: e.w_hel,
                paper_printed: 4.0 * PI * PI * hp.kappa_g * count as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainDemo {
        hp: *hp,
        rows,
        note: CHAIN_CONSTANT_NOTE,
    })
}
