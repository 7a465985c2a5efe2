use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::path::Path;

use crate::sim::{build_grid, run_scenario, GridSpec, ScenarioResult};

use super::config::{load, SimulateConfig};
use super::manifest::{grid_hash, path_for, Manifest};
use super::plot::{line_chart, Series};
use super::{create_dir, write_file, CliError, SimulateArgs, DEFAULT_SEED};

/// Column order of the results file. Changing it changes every grid hash.
pub const COLUMNS: [&str; 16] = [
    "scenario_id",
    "p1_0",
    "p2_0",
    "or1",
    "or2",
    "rho",
    "omega",
    "design",
    "reassess",
    "sizing_basis",
    "planned_n",
    "rejection_rate",
    "mc_se",
    "mean_n",
    "sd_n",
    "prop_composite_selected",
];

/// Replications used by `--paper-grid` without `--reps`.
pub const PAPER_GRID_REPS: u64 = 100_000;

/// One CSV record. Odds ratios are those generating the data, so null
/// scenarios show 1.
pub fn record(id: usize, r: &ScenarioResult) -> Vec<String> {
    let s = &r.scenario;
    vec![
        id.to_string(),
        s.truth.0.p0().to_string(),
        s.truth.1.p0().to_string(),
        s.truth.0.odds_ratio().to_string(),
        s.truth.1.odds_ratio().to_string(),
        s.rho_true.to_string(),
        s.omega.to_string(),
        s.design_label(),
        s.reassess.to_string(),
        s.sizing_basis.label().to_string(),
        r.planned_n.to_string(),
        r.rejection_rate.to_string(),
        format!("{:.6}", r.mc_se),
        format!("{:.4}", r.mean_n),
        format!("{:.4}", r.sd_n),
        r.prop_composite_selected.map_or_else(String::new, |p| p.to_string()),
    ]
}

fn grid_spec(args: &SimulateArgs) -> Result<GridSpec, CliError> {
    let mut spec = match &args.config {
        Some(path) => load::<SimulateConfig>(path)?.into_grid(),
        None => GridSpec::reference(PAPER_GRID_REPS, DEFAULT_SEED),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(reps) = args.reps {
        spec.replications = reps;
    }
    if spec.replications == 0 {
        return Err(CliError::Config("replications must be positive".into()));
    }
    Ok(spec)
}

fn csv_writer(file: File) -> csv::Writer<File> {
    csv::WriterBuilder::new().has_headers(false).from_writer(file)
}

/// Keeps the first `keep` data rows of an existing results file, dropping
/// anything after them, and returns how many were actually present.
fn truncate_results(path: &Path, keep: usize) -> Result<usize, CliError> {
    let rows: Vec<csv::StringRecord> = match csv::Reader::from_path(path) {
        Ok(mut reader) => {
            let header_ok = reader.headers().map(|h| h.iter().eq(COLUMNS.iter().copied())).unwrap_or(false);
            if !header_ok {
                return Err(CliError::Config(format!("{} does not have the expected results header", path.display())));
            }
            reader
                .records()
                .take(keep)
                .take_while(|r| r.is_ok())
                .map(|r| r.expect("checked"))
                .enumerate()
                .take_while(|(i, r)| r.get(0) == Some(i.to_string().as_str()) && r.len() == COLUMNS.len())
                .map(|(_, r)| r)
                .collect()
        }
        Err(_) => Vec::new(),
    };
    let mut w = csv_writer(File::create(path)?);
    w.write_record(COLUMNS)?;
    for r in &rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(rows.len())
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let spec = grid_spec(args)?;
    let grid = build_grid(&spec)?;
    let header = COLUMNS.join(",");
    let hash = grid_hash(&header, &grid.scenarios);
    let manifest_path = path_for(&args.out);

    let done = match Manifest::load(&manifest_path)? {
        Some(m) if m.grid_hash != hash => {
            return Err(CliError::Config(format!(
                "{} belongs to a different grid or seed; remove it or choose another --out",
                manifest_path.display()
            )))
        }
        Some(m) => truncate_results(&args.out, m.finished_prefix())?,
        None => truncate_results(&args.out, 0)?,
    };
    let mut manifest = Manifest::new(spec.seed, spec.replications, hash, grid.scenarios.len());
    manifest.completed = (0..done).collect();
    manifest.save(&manifest_path)?;

    let pool = match args.threads {
        Some(0) => return Err(CliError::Config("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| CliError::Runtime(e.to_string()))?;

    let file = OpenOptions::new().append(true).open(&args.out)?;
    let mut writer = csv_writer(file);
    for (id, scenario) in grid.scenarios.iter().enumerate().skip(done) {
        let result = pool.install(|| run_scenario(scenario))?;
        writer.write_record(record(id, &result))?;
        writer.flush()?;
        manifest.completed.push(id);
        manifest.save(&manifest_path)?;
    }

    eprintln!(
        "{} scenarios ({} resumed) from {} settings; dropped {} infeasible correlations and {} no-effect sizings",
        grid.scenarios.len(),
        done,
        grid.settings(),
        grid.dropped_invalid_rho,
        grid.dropped_no_effect
    );

    if let Some(dir) = &args.plots {
        write_plots(&args.out, dir)?;
    }
    Ok(())
}

/// Plot key columns and the (rho, rate) points of each design.
type Figure = (Vec<String>, BTreeMap<String, Vec<(f64, f64)>>);

/// Groups the results by every column except correlation and design and
/// writes one long-format CSV plus one SVG per group.
fn write_plots(results: &Path, dir: &Path) -> Result<(), CliError> {
    create_dir(dir)?;
    let mut reader = csv::Reader::from_path(results)?;
    let col = |name: &str| COLUMNS.iter().position(|c| *c == name).expect("known column");
    let key_cols = ["p1_0", "p2_0", "or1", "or2", "omega", "reassess", "sizing_basis", "planned_n"].map(col);
    let (rho, design, rate, se) = (col("rho"), col("design"), col("rejection_rate"), col("mc_se"));

    let mut figures: Vec<Figure> = Vec::new();
    let mut long =
        String::from("figure,p1_0,p2_0,or1,or2,omega,reassess,sizing_basis,planned_n,rho,design,power,mc_se\n");
    for rec in reader.records() {
        let rec = rec?;
        let key: Vec<String> = key_cols.iter().map(|&c| rec[c].to_string()).collect();
        let idx = match figures.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                figures.push((key.clone(), BTreeMap::new()));
                figures.len() - 1
            }
        };
        let x: f64 = rec[rho].parse().unwrap_or(f64::NAN);
        let y: f64 = rec[rate].parse().unwrap_or(f64::NAN);
        figures[idx].1.entry(rec[design].to_string()).or_default().push((x, y));
        let _ = writeln!(long, "{idx},{},{},{},{},{}", key.join(","), &rec[rho], &rec[design], &rec[rate], &rec[se]);
    }
    write_file(&dir.join("power_vs_rho.csv"), long.as_bytes())?;

    for (idx, (key, series)) in figures.iter().enumerate() {
        let title = format!(
            "p1={} p2={} OR1={} OR2={} omega={} reassess={} sizing={} n={}",
            key[0], key[1], key[2], key[3], key[4], key[5], key[6], key[7]
        );
        let series: Vec<Series> =
            series.iter().map(|(name, points)| Series { name: name.clone(), points: points.clone() }).collect();
        let svg = line_chart(&title, "rho", "rejection rate", &series);
        write_file(&dir.join(format!("power_fig_{idx:04}.svg")), svg.as_bytes())?;
    }
    Ok(())
}
