use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{obb_overlap, Disturbance, Pose2, RobotModel};

/// Axis-aligned region, `[xmin, ymin, xmax, ymax]`.
pub type Region = [f64; 4];

/// A rectangle as written in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectSpec {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub theta: f64,
    pub w: f64,
    pub l: f64,
}

impl RectSpec {
    pub fn new(x: f64, y: f64, w: f64, l: f64) -> Self {
        Self { x, y, theta: 0.0, w, l }
    }

    pub fn body(&self) -> Disturbance {
        Disturbance::new(self.x, self.y, self.theta, self.w, self.l, crate::geometry::DisturbanceKind::ObstacleLooming)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub obstacles: Vec<RectSpec>,
    pub robot_start: Pose2,
    pub starting_variants: Vec<Pose2>,
    #[serde(default)]
    pub goal: Option<RectSpec>,
    pub d_sub: f64,
    /// Region the robot should stay out of, if any.
    #[serde(default)]
    pub pocket: Option<Region>,
    /// Standard deviation of range noise in the synthetic scan.
    #[serde(default)]
    pub scan_noise: f64,
}

impl ScenarioSpec {
    pub fn bodies(&self) -> Vec<Disturbance> {
        self.obstacles.iter().map(RectSpec::body).collect()
    }

    pub fn goal(&self) -> Option<Disturbance> {
        self.goal.map(|g| Disturbance::target(g.x, g.y, g.w, g.l))
    }

    pub fn validate(&self, robot: &RobotModel) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(format!("scenario {:?}: {msg}", self.name)));
        if self.starting_variants.is_empty() {
            return bad("no start poses".into());
        }
        if !(self.d_sub > 0.0) {
            return bad(format!("d_sub {} must be positive", self.d_sub));
        }
        if self.obstacles.iter().chain(self.goal.iter()).any(|r| !(r.w > 0.0 && r.l > 0.0)) {
            return bad("rectangles need positive extents".into());
        }
        let bodies = self.bodies();
        for pose in std::iter::once(&self.robot_start).chain(&self.starting_variants) {
            let foot = robot.footprint(pose);
            if bodies.iter().any(|b| obb_overlap(&foot, &b.rect())) {
                return Err(Error::RobotInCollision { x: pose.x, y: pose.y });
            }
        }
        Ok(())
    }

    pub fn in_pocket(&self, pose: &Pose2) -> bool {
        self.pocket
            .is_some_and(|[x0, y0, x1, y1]| pose.x > x0 && pose.x < x1 && pose.y > y0 && pose.y < y1)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::json(path, e))
    }

    /// A built-in scenario by name, or else a scenario file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        if let Some(s) = builtin_scenarios().into_iter().find(|s| s.name == name_or_path) {
            return Ok(s);
        }
        let path = Path::new(name_or_path);
        if path.exists() {
            Self::load(path)
        } else {
            Err(Error::UnknownScenario(name_or_path.to_string()))
        }
    }
}

fn variants(nominal: Pose2) -> Vec<Pose2> {
    [-0.1, 0.0, 0.1]
        .iter()
        .map(|dy| Pose2::new(nominal.x, nominal.y + dy, nominal.theta))
        .collect()
}

/// Three-walled pocket opening towards the robot.
pub fn cul_de_sac() -> ScenarioSpec {
    let start = Pose2::origin();
    ScenarioSpec {
        name: "cul-de-sac".into(),
        obstacles: vec![
            RectSpec::new(0.775, 0.0, 0.05, 0.65),
            RectSpec::new(0.475, 0.325, 0.6, 0.05),
            RectSpec::new(0.475, -0.325, 0.6, 0.05),
        ],
        robot_start: start,
        starting_variants: variants(start),
        goal: None,
        d_sub: 0.5,
        pocket: Some([0.175, -0.3, 0.75, 0.3]),
        scan_noise: 0.003,
    }
}

/// Closed track with one box between the robot and the target.
pub fn overtaking() -> ScenarioSpec {
    let start = Pose2::origin();
    ScenarioSpec {
        name: "overtaking".into(),
        obstacles: vec![
            RectSpec::new(0.6, 0.625, 2.4, 0.05),
            RectSpec::new(0.6, -0.625, 2.4, 0.05),
            RectSpec::new(-0.625, 0.0, 0.05, 1.3),
            RectSpec::new(1.825, 0.0, 0.05, 1.3),
            RectSpec::new(0.5, 0.0, 0.1, 0.2),
        ],
        robot_start: start,
        starting_variants: variants(start),
        goal: Some(RectSpec::new(1.0, 0.0, 0.1, 0.1)),
        d_sub: 0.27,
        pocket: None,
        scan_noise: 0.003,
    }
}

pub fn builtin_scenarios() -> Vec<ScenarioSpec> {
    vec![cul_de_sac(), overtaking()]
}
