//! Cross-algorithm comparison: convergence curves and fitness/diversity
//! box plots built from saved run stats.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::engine::RunStats;

use super::svg::{box_chart, convergence_chart, five_number_summary};
use super::{write_file, ReportError};

#[derive(Debug, Clone)]
pub struct ComparisonPaths {
    pub convergence_svg: PathBuf,
    pub convergence_csv: PathBuf,
    pub fitness_box_svg: PathBuf,
    pub fitness_box_csv: PathBuf,
    pub diversity_box_svg: PathBuf,
    pub diversity_box_csv: PathBuf,
}

fn load_stats_dir(dir: &Path) -> Result<Vec<RunStats>, ReportError> {
    let entries = fs::read_dir(dir)
        .map_err(|source| ReportError::Read { path: dir.to_path_buf(), source })?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("stats_run_") && n.ends_with(".json"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(ReportError::EmptyStatsDir(dir.to_path_buf()));
    }
    files
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path)
                .map_err(|source| ReportError::Read { path: path.clone(), source })?;
            serde_json::from_str(&text).map_err(|source| ReportError::Parse { path, source })
        })
        .collect()
}

/// Mean best fitness of a set of runs on the union of their evaluation
/// grids, with last-value carry-forward per run. Runs that have not yet
/// produced a feasible solution at a grid point are excluded from the
/// mean at that point.
fn mean_convergence(runs: &[RunStats]) -> Vec<(u64, f64)> {
    let grid: BTreeSet<u64> =
        runs.iter().flat_map(|r| r.convergence.keys().copied()).collect();
    grid.into_iter()
        .filter_map(|n_eval| {
            let values: Vec<f64> = runs
                .iter()
                .filter_map(|r| {
                    r.convergence.range(..=n_eval).next_back().map(|(_, &v)| v)
                })
                .collect();
            if values.is_empty() {
                None
            } else {
                Some((n_eval, values.iter().sum::<f64>() / values.len() as f64))
            }
        })
        .collect()
}

fn csv_escape(name: &str) -> String {
    if name.contains(',') || name.contains('"') {
        format!("\"{}\"", name.replace('"', "\"\""))
    } else {
        name.to_string()
    }
}

/// Compares the saved stats of several experiments and writes the
/// convergence and box-plot artifacts (SVG + CSV each) under `out_dir`.
pub fn compare(
    stats_dirs: &[PathBuf],
    names: &[String],
    out_dir: &Path,
) -> Result<ComparisonPaths, ReportError> {
    if stats_dirs.len() < 2 {
        return Err(ReportError::TooFewDirs(stats_dirs.len()));
    }
    if stats_dirs.len() != names.len() {
        return Err(ReportError::NameCountMismatch {
            dirs: stats_dirs.len(),
            names: names.len(),
        });
    }
    let all_runs: Vec<Vec<RunStats>> =
        stats_dirs.iter().map(|d| load_stats_dir(d)).collect::<Result<_, _>>()?;

    // Convergence curves.
    let series: Vec<(String, Vec<(u64, f64)>)> = names
        .iter()
        .zip(&all_runs)
        .map(|(name, runs)| (name.clone(), mean_convergence(runs)))
        .collect();
    let mut convergence_csv = String::from("name,evaluations,mean_best_fitness\n");
    for (name, points) in &series {
        for &(n_eval, fitness) in points {
            convergence_csv.push_str(&format!("{},{},{}\n", csv_escape(name), n_eval, fitness));
        }
    }

    // Box plots: suite fitness pooled over runs; diversity one value per run.
    let fitness_boxes: Vec<(String, _)> = names
        .iter()
        .zip(&all_runs)
        .map(|(name, runs)| {
            let samples: Vec<f64> =
                runs.iter().flat_map(|r| r.suite_fitness.iter().copied()).collect();
            let samples = if samples.is_empty() { vec![0.0] } else { samples };
            (name.clone(), five_number_summary(&samples))
        })
        .collect();
    let diversity_boxes: Vec<(String, _)> = names
        .iter()
        .zip(&all_runs)
        .map(|(name, runs)| {
            let samples: Vec<f64> = runs.iter().map(|r| r.suite_novelty).collect();
            (name.clone(), five_number_summary(&samples))
        })
        .collect();
    let box_csv = |boxes: &[(String, super::svg::FiveNumbers)]| {
        let mut csv = String::from("name,min,q1,median,q3,max\n");
        for (name, f) in boxes {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                csv_escape(name),
                f.min,
                f.q1,
                f.median,
                f.q3,
                f.max
            ));
        }
        csv
    };

    let paths = ComparisonPaths {
        convergence_svg: out_dir.join("convergence.svg"),
        convergence_csv: out_dir.join("convergence.csv"),
        fitness_box_svg: out_dir.join("fitness_box.svg"),
        fitness_box_csv: out_dir.join("fitness_box.csv"),
        diversity_box_svg: out_dir.join("diversity_box.svg"),
        diversity_box_csv: out_dir.join("diversity_box.csv"),
    };
    write_file(&paths.convergence_svg, &convergence_chart(&series))?;
    write_file(&paths.convergence_csv, &convergence_csv)?;
    write_file(&paths.fitness_box_svg, &box_chart(&fitness_boxes, "suite fitness"))?;
    write_file(&paths.fitness_box_csv, &box_csv(&fitness_boxes))?;
    write_file(&paths.diversity_box_svg, &box_chart(&diversity_boxes, "suite diversity"))?;
    write_file(&paths.diversity_box_csv, &box_csv(&diversity_boxes))?;
    Ok(paths)
}
