use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planner::StrategyKind;

use super::experiment::RunRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub strategy: StrategyKind,
    pub runs: usize,
    pub mean_objects: f64,
    pub sd_objects: f64,
    pub mean_states: f64,
    pub sd_states: f64,
    pub mean_time_s: f64,
    pub sd_time_s: f64,
}

/// Mean and population standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// One row per (scenario, strategy) in first-seen order. Groups without a
/// successful planned run are left out; reactive runs build no map.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, StrategyKind)> = Vec::new();
    for r in records {
        let key = (r.scenario.clone(), r.strategy);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .filter_map(|(scenario, strategy)| {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.scenario == scenario && r.strategy == strategy)
                .collect();
            if !group.iter().any(|r| r.success && r.map.is_some()) {
                return None;
            }
            let col = |f: fn(&RunRecord) -> f64| mean_sd(&group.iter().map(|r| f(r)).collect::<Vec<_>>());
            let (mean_objects, sd_objects) = col(|r| r.n_objects as f64);
            let (mean_states, sd_states) = col(|r| r.n_states as f64);
            let (mean_time_s, sd_time_s) = col(|r| r.planning_time);
            Some(SummaryRow {
                scenario,
                strategy,
                runs: group.len(),
                mean_objects,
                sd_objects,
                mean_states,
                sd_states,
                mean_time_s,
                sd_time_s,
            })
        })
        .collect()
}

/// Product-moment correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "need two equal-length samples of at least 2, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let (mx, sx) = mean_sd(xs);
    let (my, sy) = mean_sd(ys);
    if sx == 0.0 || sy == 0.0 {
        return Err(Error::DegenerateInput("zero variance".into()));
    }
    let cov = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.len() as f64;
    Ok((cov / (sx * sy)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn record(states: usize, success: bool) -> RunRecord {
        RunRecord {
            scenario: "s".into(),
            strategy: StrategyKind::Vanilla,
            variant: 0,
            repetition: 0,
            seed: 0,
            n_objects: states * 2,
            n_states: states,
            planning_time: 0.001,
            outcome: "ok".into(),
            plan: None,
            trajectory: Vec::new(),
            collided: false,
            entered_pocket: false,
            success,
            obstacles: Vec::new(),
            goal: None,
            map: Some(Default::default()),
        }
    }

    #[test]
    fn summary_examples() {
        let one = summarize(&[record(5, true)]);
        assert_eq!(one.len(), 1);
        assert_eq!((one[0].mean_states, one[0].sd_states), (5.0, 0.0));
        let two = summarize(&[record(2, true), record(4, false)]);
        assert_eq!((two[0].mean_states, two[0].sd_states), (3.0, 1.0));
        assert!(summarize(&[record(2, false)]).is_empty());
        let mut reactive = record(0, true);
        reactive.map = None;
        assert!(summarize(&[reactive]).is_empty());
    }

    #[test]
    fn pearson_examples() {
        let xs = [1.0, 2.0, 3.0];
        assert_abs_diff_eq!(pearson(&xs, &xs).unwrap(), 1.0, epsilon = 1e-12);
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert_abs_diff_eq!(pearson(&xs, &neg).unwrap(), -1.0, epsilon = 1e-12);
        // Hand computation: sum dx*dy = 5, sum dx^2 = 2, sum dy^2 = 38/3.
        let r = pearson(&xs, &[2.0, 4.0, 7.0]).unwrap();
        assert_abs_diff_eq!(r, 5.0 / (2.0f64 * 38.0 / 3.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r, 0.9934, epsilon = 5e-4);
        assert!(matches!(pearson(&xs, &[1.0, 1.0, 1.0]), Err(Error::DegenerateInput(_))));
        assert!(matches!(pearson(&[1.0], &[1.0]), Err(Error::DegenerateInput(_))));
    }
}
