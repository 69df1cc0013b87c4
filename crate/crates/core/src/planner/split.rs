use crate::error::{Error, Result};
use crate::geometry::{DisturbanceKind, Pose2};

use super::cost::{chi, gamma, shift};
use super::PlanState;

/// Cut a collided straight-drive state into a chain of sub-states ending at
/// multiples of `d_sub` plus the remainder. Only the last one keeps the
/// collision; the others see the obstacle as looming.
///
/// Sub-states get consecutive ids from `q.id`, parents are chained and costs
/// are recomputed with horizon `r` and the fixed-frame goal.
pub fn split(q: &PlanState, d_sub: f64, r: f64, goal: Option<&crate::geometry::Disturbance>) -> Result<Vec<PlanState>> {
    if q.mode.is_turn() {
        return Err(Error::NotSplittable(q.mode));
    }
    if !q.collided() {
        return Ok(vec![*q]);
    }
    let len = q.length();
    let whole = (len / d_sub).floor() as usize;
    let mut marks: Vec<f64> = (1..=whole).map(|n| n as f64 * d_sub).collect();
    if len - whole as f64 * d_sub > 1e-12 || marks.is_empty() {
        marks.push(len);
    }
    let (fx, fy) = q.v0.forward();
    let last = marks.len() - 1;
    let mut out = Vec::with_capacity(marks.len());
    let mut prev = 0.0;
    for (k, &s) in marks.iter().enumerate() {
        let end = Pose2::new(q.v0.x + fx * s, q.v0.y + fy * s, q.v0.theta);
        let v0 = Pose2::new(q.v0.x + fx * prev, q.v0.y + fy * prev, q.v0.theta);
        let back = (len - s, 0.0);
        let d_i = q.d_i.map(|d| shift(&d, back));
        let d_n = q.d_n.map(|d| {
            let d = shift(&d, back);
            if k == last {
                d
            } else {
                d.with_kind(DisturbanceKind::ObstacleLooming)
            }
        });
        let goal_local = goal.map(|g| crate::geometry::to_moving_frame(&end, g));
        let g = gamma(d_n.as_ref(), r);
        let c = chi(goal_local.as_ref(), r);
        let n_steps = if k == last {
            q.n_steps - out.iter().map(|s: &PlanState| s.n_steps).sum::<usize>()
        } else {
            (((s - prev) / len) * q.n_steps as f64).round() as usize
        };
        out.push(PlanState {
            id: q.id + k,
            mode: q.mode,
            d_i,
            d_n,
            v0: if k == 0 { q.v0 } else { v0 },
            vd: (fx * (s - prev), fy * (s - prev)),
            end,
            n_steps,
            gamma: g,
            chi: c,
            phi: g + c,
            parent: if k == 0 { q.parent } else { Some(q.id + k - 1) },
            counteracted: false,
            propagated: false,
            split: true,
        });
        prev = s;
    }
    Ok(out)
}
