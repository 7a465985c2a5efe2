use std::fmt::Write as _;

use serde::Serialize;

use crate::adaptive::{multiarm_select, select_and_reassess, AdaptivePlan, SelectionOutcome};

use super::config::{load, SelectConfig};
use super::{write_file, CliError, SelectArgs};

/// Structured selection report written as JSON.
#[derive(Debug, Serialize)]
pub struct SelectReport {
    pub n_tilde: u64,
    pub n_control: u64,
    pub arms: u32,
    pub reassess: bool,
    pub planned_n: u64,
    #[serde(flatten)]
    pub outcome: SelectionOutcome,
}

pub fn evaluate(cfg: &SelectConfig) -> SelectReport {
    let plan = AdaptivePlan {
        relevant: cfg.relevant,
        additional: cfg.additional,
        planned_n: cfg.plan.planned_n,
        planned_endpoint: cfg.plan.planned_endpoint,
        reassess: cfg.plan.reassess,
    };
    let outcome = if cfg.design.arms > 1 {
        multiarm_select(&cfg.blinded, &plan, &cfg.design)
    } else {
        select_and_reassess(&cfg.blinded, &plan, &cfg.design)
    };
    SelectReport {
        n_tilde: cfg.blinded.n_tilde(),
        n_control: cfg.blinded.n0_tilde(),
        arms: cfg.design.arms,
        reassess: cfg.plan.reassess,
        planned_n: cfg.plan.planned_n,
        outcome,
    }
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

pub fn table(r: &SelectReport) -> String {
    let o = &r.outcome;
    let mut t = String::new();
    let _ = writeln!(t, "{:<26}{}", "interim sample (n_tilde)", r.n_tilde);
    if let Some(e) = &o.estimates {
        let _ = writeln!(t, "{:<26}{:.4}", "p1 control", e.p1_control);
        let _ = writeln!(t, "{:<26}{:.4}", "p2 control", e.p2_control);
        let _ = writeln!(t, "{:<26}{:.4}", "p1 treated", e.p1_treated);
        let _ = writeln!(t, "{:<26}{:.4}", "p2 treated", e.p2_treated);
        let _ = writeln!(t, "{:<26}{:.4} (raw {:.4})", "correlation", e.rho, e.rho_raw);
    }
    let _ = writeln!(t, "{:<26}{}", "n relevant", opt(o.n_relevant));
    let _ = writeln!(t, "{:<26}{}", "n composite", opt(o.n_composite));
    let _ = writeln!(t, "{:<26}{}", "decision ratio d", opt(o.d_value.map(|d| format!("{d:.4}"))));
    let _ = writeln!(t, "{:<26}{}", "selected endpoint", o.selected);
    let _ = writeln!(t, "{:<26}{}", "final sample size n_a", o.n_a);
    if let Some(reason) = &o.fallback {
        let _ = writeln!(t, "{:<26}{}", "fallback", reason);
    }
    t
}

pub fn run(args: &SelectArgs) -> Result<(), CliError> {
    let cfg: SelectConfig = load(&args.config)?;
    let report = evaluate(&cfg);
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(e.to_string()))?;
    print!("{}", table(&report));
    match &args.out {
        Some(path) => write_file(path, format!("{json}\n").as_bytes()),
        None => {
            println!("\n{json}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::parse;

    fn config(blinded: &str, reassess: bool) -> Result<SelectConfig, String> {
        parse(&format!(
            "[design]\nalpha = 0.05\npower = 0.8\n\
             [relevant]\np0 = 0.615\nodds_ratio = 0.52\n\
             [additional]\np0 = 0.15\nodds_ratio = 0.66\n\
             [blinded]\n{blinded}\n\
             [plan]\nplanned_n = 240\nplanned_endpoint = \"relevant\"\nreassess = {reassess}\n"
        ))
    }

    #[test]
    fn inconsistent_counts_name_the_invariant() {
        let err = config(
            "n_tilde = 100\nn_control = 50\nevents_relevant = 40\nevents_additional = 10\nevents_composite = 30",
            true,
        )
        .unwrap_err();
        assert!(err.contains("c_star >= max(c1, c2)"), "{err}");
        assert!(err.starts_with("line "), "{err}");
    }

    #[test]
    fn no_reassessment_echoes_planned_n() {
        let cfg = config(
            "n_tilde = 120\nn_control = 60\nevents_relevant = 58\nevents_additional = 15\nevents_composite = 64",
            false,
        )
        .unwrap();
        let r = evaluate(&cfg);
        assert_eq!(r.outcome.n_a, 240);
        assert!(r.outcome.d_value.is_some());
        assert!(table(&r).contains("selected endpoint"));
    }
}
