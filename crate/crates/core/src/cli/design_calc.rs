use std::fmt::Write as _;
use std::io::Write as _;

use crate::adaptive::{decision_ratio, interim_size, select_by_ratio};
use crate::design::{required_size, required_size_composite, round_to_allocation, DesignConfig};
use crate::error::Error;
use crate::root::bisect;
use crate::trial_model::{joint_correlation_range, EndpointSpec};

use super::config::{load, DesignCalcConfig};
use super::plot::{line_chart, Series};
use super::{create_dir, write_file, CliError, DesignCalcArgs};

/// One correlation of the grid; size and ratio are `None` where the
/// correlation is infeasible.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignRowReport {
    pub rho: f64,
    pub n_relevant: Option<u64>,
    pub n_composite: Option<u64>,
    pub d: Option<f64>,
    pub valid: bool,
}

pub const HEADER: &str = "rho,n_relevant,n_composite,d,selected";

fn rounded(raw: f64, cfg: &DesignConfig) -> Option<u64> {
    raw.is_finite().then(|| round_to_allocation(raw, cfg.allocation))
}

fn row(e1: &EndpointSpec, e2: &EndpointSpec, rho: f64, cfg: &DesignConfig) -> Result<DesignRowReport, Error> {
    let n_relevant = rounded(required_size(e1.p0(), e1.odds_ratio(), cfg), cfg);
    match required_size_composite(e1, e2, rho, cfg) {
        Ok(raw) => Ok(DesignRowReport {
            rho,
            n_relevant,
            n_composite: rounded(raw, cfg),
            d: Some(decision_ratio(e1, e2, rho, cfg)?),
            valid: true,
        }),
        Err(Error::RhoOutOfBounds { .. }) => {
            Ok(DesignRowReport { rho, n_relevant, n_composite: None, d: None, valid: false })
        }
        Err(e) => Err(e),
    }
}

fn opt<T: ToString>(v: Option<T>, missing: &str) -> String {
    v.map_or_else(|| missing.to_string(), |x| x.to_string())
}

fn csv_line(r: &DesignRowReport) -> String {
    if !r.valid {
        return format!("{},{},,,invalid", r.rho, opt(r.n_relevant, "inf"));
    }
    let d = r.d.expect("valid rows carry d");
    let d_text = if d.is_finite() { format!("{d:.6}") } else { "inf".to_string() };
    format!("{},{},{},{},{}", r.rho, opt(r.n_relevant, "inf"), opt(r.n_composite, "inf"), d_text, select_by_ratio(d))
}

/// Correlation at which the decision ratio equals 1, if it crosses 1 inside
/// the admissible range.
pub fn crossing_point(e1: &EndpointSpec, e2: &EndpointSpec, cfg: &DesignConfig) -> Option<f64> {
    let range = joint_correlation_range(e1, e2);
    let f = |rho: f64| decision_ratio(e1, e2, rho, cfg).map_or(f64::NAN, |d| d - 1.0);
    bisect(f, range.lower, range.upper, 1e-10, 200).map(|b| b.root)
}

/// Computes the design table; fails only when neither endpoint has an effect.
pub fn design_table(cfg: &DesignCalcConfig) -> Result<Vec<DesignRowReport>, Error> {
    interim_size(&cfg.relevant, &cfg.additional, &cfg.design)?;
    cfg.rho.iter().map(|&rho| row(&cfg.relevant, &cfg.additional, rho, &cfg.design)).collect()
}

pub fn run(args: &DesignCalcArgs) -> Result<(), CliError> {
    let cfg: DesignCalcConfig = load(&args.config)?;
    let rows = design_table(&cfg)?;
    let interim = interim_size(&cfg.relevant, &cfg.additional, &cfg.design)?;
    let crossing = crossing_point(&cfg.relevant, &cfg.additional, &cfg.design);
    let range = joint_correlation_range(&cfg.relevant, &cfg.additional);

    let mut csv = String::new();
    csv.push_str(HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&csv_line(r));
        csv.push('\n');
    }

    let mut summary = String::new();
    let _ = writeln!(summary, "interim_size = {interim}");
    match crossing {
        Some(rho) => {
            let _ = writeln!(summary, "crossing_rho = {rho:.4}");
        }
        None => {
            let _ = writeln!(summary, "crossing_rho = none");
        }
    }
    let _ = writeln!(summary, "rho_range = [{:.4}, {:.4}]", range.lower, range.upper);
    let invalid = rows.iter().filter(|r| !r.valid).count();
    if invalid > 0 {
        let _ = writeln!(summary, "invalid_rows = {invalid}");
    }

    match &args.out {
        Some(path) => {
            write_file(path, csv.as_bytes())?;
            print!("{summary}");
        }
        None => {
            print!("{csv}");
            eprint!("{summary}");
        }
    }
    std::io::stdout().flush()?;

    if let Some(dir) = &args.plots {
        write_plots(dir, &rows)?;
    }
    Ok(())
}

fn write_plots(dir: &std::path::Path, rows: &[DesignRowReport]) -> Result<(), CliError> {
    create_dir(dir)?;
    let mut long = String::from("rho,series,n\n");
    let mut relevant = Series { name: "relevant".into(), points: Vec::new() };
    let mut composite = Series { name: "composite".into(), points: Vec::new() };
    for r in rows.iter().filter(|r| r.valid) {
        if let Some(n) = r.n_relevant {
            let _ = writeln!(long, "{},relevant,{n}", r.rho);
            relevant.points.push((r.rho, n as f64));
        }
        if let Some(n) = r.n_composite {
            let _ = writeln!(long, "{},composite,{n}", r.rho);
            composite.points.push((r.rho, n as f64));
        }
    }
    write_file(&dir.join("sample_size_vs_rho.csv"), long.as_bytes())?;
    let svg = line_chart("Sample size by correlation", "rho", "total sample size", &[relevant, composite]);
    write_file(&dir.join("sample_size_vs_rho.svg"), svg.as_bytes())
}
