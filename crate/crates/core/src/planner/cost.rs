use std::f64::consts::{FRAC_PI_2, PI};

use crate::geometry::{Disturbance, DisturbanceKind};

/// Collision penalty added to the past cost.
pub const KAPPA: f64 = 2.0;
const MAX_GAMMA: f64 = 6.0;
const MAX_CHI: f64 = 4.0;

/// Past cost of a state from its interrupting disturbance, given in the
/// moving frame at Task end. The preferred stand-off is `r` at a right angle.
pub fn gamma(d_n: Option<&Disturbance>, r: f64) -> f64 {
    let Some(d) = d_n else { return 0.0 };
    let d_max = 2.0 * r;
    let mut num = ((r - d.range()) / d_max).abs() + ((FRAC_PI_2 - d.theta.abs()) / PI).abs();
    if d.kind == DisturbanceKind::ObstacleCollided {
        num += KAPPA;
    }
    num / MAX_GAMMA
}

/// Heuristic cost to the goal, given in the moving frame at Task end.
pub fn chi(goal: Option<&Disturbance>, r: f64) -> f64 {
    let Some(g) = goal else { return 0.0 };
    let d_max = 2.0 * r;
    ((g.range() / d_max).abs() + (g.theta.abs() / PI).abs()) / MAX_CHI
}

/// Translate a disturbance by `v`.
pub fn shift(d: &Disturbance, v: (f64, f64)) -> Disturbance {
    Disturbance {
        x: d.x + v.0,
        y: d.y + v.1,
        ..*d
    }
}
