//! CSV tables with fixed headers. Numbers carry 17 significant digits, so
//! every double parses back bit for bit. Missing values are empty cells.

use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{ChainDemo, CrossCheckRow, DiscrepancyTable, LevelSetTable, SweepResult};
use crate::geometry::DistanceCurvatureRow;
use crate::minimize::DescentResult;

pub const SWEEP_HEADER: &[&str] = &[
    "eps", "P_eps", "H_eps", "K_eps", "W_eps", "mass", "mu_total", "xi_L1", "xi_L1_25", "xi_L1_4", "target_W",
    "rel_err_W", "target_H", "rel_err_H", "target_K", "err_K", "target_mu", "rel_err_mu", "K_eps_minors", "K_alt",
    "B_L2", "order_W", "order_H", "order_K", "order_mu", "status",
];

pub const HISTORY_HEADER: &[&str] = &["iter", "objective", "grad_norm", "step"];

pub const DISCREPANCY_HEADER: &[&str] = &["eps", "xi_L1", "xi_L1_25", "xi_L1_4", "ratio_L1", "ratio_L1_25", "ratio_L1_4"];

pub const LEVEL_SET_HEADER: &[&str] = &["s", "g", "reference", "comparable"];

pub const DISTANCE_HEADER: &[&str] = &[
    "x", "y", "z", "t", "H", "K", "lap_analytic", "minors_analytic", "lap_numeric", "minors_numeric", "k_bound",
];

pub const CHAIN_HEADER: &[&str] = &["count", "area", "W_hel", "W_per_sphere", "paper_printed"];

pub const CROSSCHECK_HEADER: &[&str] = &["eps", "K_eps", "K_alt", "gap"];

/// `x` with 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let io_err = |source: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = ::csv::Writer::from_path(path).map_err(|e| io_err(e.into()))?;
    w.write_record(header).map_err(|e| io_err(e.into()))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        w.write_record(&row).map_err(|e| io_err(e.into()))?;
    }
    w.flush().map_err(io_err)
}

pub fn sweep_rows(result: &SweepResult) -> Vec<Vec<String>> {
    let t = result.targets;
    result
        .rows
        .iter()
        .map(|row| {
            let mut cells = vec![fmt(row.eps)];
            match &row.report {
                Some(r) => cells.extend(
                    [
                        r.p_eps, r.h_eps, r.k_eps, r.w_eps, r.mass, r.mu_total, r.xi_l1, r.xi_l1_25, r.xi_l1_4, t.w,
                        row.err_w, t.h, row.err_h, t.k, row.err_k, t.mu, row.err_mu, r.k_eps_minors,
                    ]
                    .map(fmt),
                ),
                None => cells.extend(std::iter::repeat_n(String::new(), 18)),
            }
            let rep = row.report.as_ref();
            cells.push(opt(rep.and_then(|r| r.k_alternative)));
            cells.push(opt(rep.map(|r| r.b_tensor_l2)));
            cells.extend([row.order_w, row.order_h, row.order_k, row.order_mu].map(opt));
            cells.push(row.status().to_string());
            cells
        })
        .collect()
}

pub fn write_sweep_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write_table(path, SWEEP_HEADER, sweep_rows(result))
}

pub fn write_history_csv(result: &DescentResult, path: &Path) -> Result<()> {
    let rows = result
        .history
        .iter()
        .map(|h| vec![h.iter.to_string(), fmt(h.objective), fmt(h.grad_norm), fmt(h.step)]);
    write_table(path, HISTORY_HEADER, rows)
}

pub fn write_discrepancy_csv(table: &DiscrepancyTable, path: &Path) -> Result<()> {
    let rows = table.rows.iter().map(|r| {
        let mut cells: Vec<String> = [r.eps, r.l1, r.l1_25, r.l1_4].map(fmt).to_vec();
        match r.ratios {
            Some(q) => cells.extend(q.map(fmt)),
            None => cells.extend(std::iter::repeat_n(String::new(), 3)),
        }
        cells
    });
    write_table(path, DISCREPANCY_HEADER, rows)
}

pub fn write_level_set_csv(table: &LevelSetTable, path: &Path) -> Result<()> {
    let rows = table
        .bins
        .iter()
        .map(|b| vec![fmt(b.center), fmt(b.g), opt(b.reference), b.comparable.to_string()]);
    write_table(path, LEVEL_SET_HEADER, rows)
}

pub fn write_distance_csv(rows: &[DistanceCurvatureRow], path: &Path) -> Result<()> {
    let rows = rows.iter().map(|r| {
        let p = r.surface_point;
        [
            p[0],
            p[1],
            p[2],
            r.offset,
            r.exact.h,
            r.exact.k,
            r.laplacian_analytic,
            r.minor_sum_analytic,
            r.laplacian_numeric,
            r.minor_sum_numeric,
            r.k_bound,
        ]
        .map(fmt)
        .to_vec()
    });
    write_table(path, DISTANCE_HEADER, rows)
}

pub fn write_chain_csv(demo: &ChainDemo, path: &Path) -> Result<()> {
    let rows = demo.rows.iter().map(|r| {
        vec![r.count.to_string(), fmt(r.area), fmt(r.w_hel), fmt(r.per_sphere()), fmt(r.paper_printed)]
    });
    write_table(path, CHAIN_HEADER, rows)
}

pub fn write_crosscheck_csv(rows: &[CrossCheckRow], path: &Path) -> Result<()> {
    let rows = rows
        .iter()
        .map(|r| [r.eps, r.k, r.k_alternative, r.gap()].map(fmt).to_vec());
    write_table(path, CROSSCHECK_HEADER, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::HelfrichParams;
    use crate::experiments::run_sweep;
    use crate::geometry::ImplicitSurface;
    use crate::grid::Grid3;
    use proptest::prelude::*;

    fn read(path: &Path) -> Vec<Vec<String>> {
        let mut r = ::csv::Reader::from_path(path).unwrap();
        let mut out = vec![r.headers().unwrap().iter().map(String::from).collect()];
        out.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
        out
    }

    proptest! {
        #[test]
        fn numbers_round_trip(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            prop_assert_eq!(fmt(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn sweep_csv_header_and_empty_sweep() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid3::cube(25, 2.0).unwrap();
        let hp = HelfrichParams::new(1.0, -0.5, 0.0).unwrap();
        let mut sweep = run_sweep(&ImplicitSurface::sphere(1.0).unwrap(), &hp, &g, &[0.3, 0.02]).unwrap();
        let path = dir.path().join("sweep.csv");
        write_sweep_csv(&sweep, &path).unwrap();
        let table = read(&path);
        assert_eq!(table[0], SWEEP_HEADER);
        assert!(table[0].join(",").starts_with(
            "eps,P_eps,H_eps,K_eps,W_eps,mass,mu_total,xi_L1,xi_L1_25,xi_L1_4,target_W,rel_err_W,"
        ));
        assert_eq!(table.len(), 3);
        assert!(table.iter().all(|r| r.len() == SWEEP_HEADER.len()));
        let rep = sweep.rows[0].report.unwrap();
        assert_eq!(table[1][4].parse::<f64>().unwrap(), rep.w_eps);
        assert_eq!(table[1].last().unwrap(), "ok");

        sweep.rows.clear();
        write_sweep_csv(&sweep, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), SWEEP_HEADER.join(",") + "\n");
    }

    #[test]
    fn failed_rows_leave_empty_cells() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid3::cube(17, 1.3).unwrap();
        let hp = HelfrichParams::new(1.0, -0.5, 0.0).unwrap();
        let sweep = run_sweep(&ImplicitSurface::sphere(1.0).unwrap(), &hp, &g, &[0.3]).unwrap();
        let path = dir.path().join("s.csv");
        write_sweep_csv(&sweep, &path).unwrap();
        let table = read(&path);
        assert_eq!(table[1].last().unwrap(), "failed");
        assert_eq!(table[1][1], "");
    }

    #[test]
    fn unwritable_path_reports_path() {
        let g = Grid3::cube(25, 2.0).unwrap();
        let hp = HelfrichParams::new(1.0, -0.5, 0.0).unwrap();
        let sweep = run_sweep(&ImplicitSurface::sphere(1.0).unwrap(), &hp, &g, &[0.3]).unwrap();
        let path = Path::new("/nonexistent-dir/x.csv");
        match write_sweep_csv(&sweep, path) {
            Err(Error::Io { path: p, .. }) => assert_eq!(p, path),
            other => panic!("{other:?}"),
        }
    }
}
