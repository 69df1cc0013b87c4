//! Resets: the initial disturbance a successor Task starts with. All
//! disturbances here are in the fixed frame.

use crate::automaton::ContinuousState;
use crate::error::{Error, Result};
use crate::geometry::{Disturbance, DisturbanceKind};
use crate::simulator::{in_view, AttentionWindow};

pub fn reset_basic(c_end: &ContinuousState, goal: Option<&Disturbance>) -> Result<Option<Disturbance>> {
    match c_end.d_n {
        Some(d) if d.kind == DisturbanceKind::ObstacleCollided => Err(Error::UndefinedReset),
        Some(d) => Ok(Some(d)),
        None => Ok(goal.copied()),
    }
}

/// Like [`reset_basic`], but an initial disturbance still inside the
/// attention window stays the one to counteract. `window` is anchored at the
/// successor's start pose.
pub fn reset_window(
    c_end: &ContinuousState,
    goal: Option<&Disturbance>,
    window: &AttentionWindow,
) -> Result<Option<Disturbance>> {
    if c_end.d_n.is_some() {
        return reset_basic(c_end, goal);
    }
    match c_end.d_i {
        Some(d) if in_view(window, &d) => Ok(Some(d)),
        _ => Ok(goal.copied()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Pose2, RobotModel};
    use crate::simulator::make_attention_window;

    fn goal() -> Disturbance {
        Disturbance::target(1.0, 0.0, 0.1, 0.1)
    }

    fn window() -> AttentionWindow {
        make_attention_window(&Pose2::origin(), Some(&goal()), &RobotModel::default()).unwrap()
    }

    #[test]
    fn basic_examples() {
        let g = goal();
        assert_eq!(reset_basic(&ContinuousState::default(), Some(&g)).unwrap(), Some(g));
        let box_ = Disturbance::obstacle(0.5, 0.0, 0.1, 0.1);
        let c = ContinuousState::new(None, Some(box_));
        assert_eq!(reset_basic(&c, Some(&g)).unwrap(), Some(box_));
        assert_eq!(reset_basic(&ContinuousState::default(), None).unwrap(), None);
        let hit = ContinuousState::new(None, Some(box_.with_kind(DisturbanceKind::ObstacleCollided)));
        assert!(matches!(reset_basic(&hit, Some(&g)), Err(Error::UndefinedReset)));
    }

    #[test]
    fn window_examples() {
        let g = goal();
        let near = Disturbance::obstacle(0.5, 0.0, 0.1, 0.1);
        let gone = Disturbance::obstacle(0.5, 2.0, 0.1, 0.1);
        let w = window();
        assert_eq!(reset_window(&ContinuousState::new(Some(near), None), Some(&g), &w).unwrap(), Some(near));
        assert_eq!(reset_window(&ContinuousState::new(Some(gone), None), Some(&g), &w).unwrap(), Some(g));
        let loom = Disturbance::obstacle(0.3, 0.3, 0.1, 0.1);
        assert_eq!(reset_window(&ContinuousState::new(Some(near), Some(loom)), Some(&g), &w).unwrap(), Some(loom));
    }
}
