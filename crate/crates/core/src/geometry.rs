//! Planar geometry shared by every other module: poses, the robot body,
//! rectangle-shaped disturbances and the fixed/moving frame transforms.
//!
//! The fixed frame is the frame the point cloud was captured in. The moving
//! frame is attached to the simulated robot's centre of mass with `x` pointing
//! forward along the heading and `y` to the left.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Wrap an angle into `(-π, π]`.
pub fn normalize_angle(theta: f64) -> f64 {
    if !theta.is_finite() {
        return theta;
    }
    let mut a = theta % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Position and heading of the robot's centre of mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn origin() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()
    }

    /// Unit vector along the heading.
    pub fn forward(&self) -> (f64, f64) {
        (self.theta.cos(), self.theta.sin())
    }

    /// Express a fixed-frame point in this pose's moving frame.
    pub fn to_local(&self, px: f64, py: f64) -> (f64, f64) {
        let (dx, dy) = (px - self.x, py - self.y);
        let (s, c) = self.theta.sin_cos();
        (c * dx + s * dy, -s * dx + c * dy)
    }

    /// Express a moving-frame point in the fixed frame.
    pub fn to_global(&self, lx: f64, ly: f64) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (self.x + c * lx - s * ly, self.y + s * lx + c * ly)
    }

    /// Pose reached by moving `(dx, dy)` in the fixed frame and rotating by `dtheta`.
    pub fn displaced(&self, dx: f64, dy: f64, dtheta: f64) -> Self {
        Self::new(self.x + dx, self.y + dy, self.theta + dtheta)
    }

    pub fn distance_to(&self, other: &Pose2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Which frame a pose or disturbance is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameTag {
    Fixed,
    Moving,
}

/// Rectangular body of the robot. The centre of mass, about which the robot
/// rotates, sits `com_forward_offset` ahead of the rectangle's centroid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    pub length: f64,
    pub width: f64,
    pub com_forward_offset: f64,
    pub linear_speed: f64,
    pub angular_speed: f64,
}

impl Default for RobotModel {
    fn default() -> Self {
        Self {
            length: 0.27,
            width: 0.18,
            com_forward_offset: 0.05,
            linear_speed: 0.2,
            angular_speed: PI / 4.0,
        }
    }
}

impl RobotModel {
    pub fn is_valid(&self) -> bool {
        self.length > 0.0
            && self.width > 0.0
            && self.com_forward_offset > 0.0
            && self.linear_speed > 0.0
            && self.angular_speed > 0.0
            && self.com_forward_offset < self.length / 2.0
    }

    /// Distance from the centre of mass to the front bumper.
    pub fn front_reach(&self) -> f64 {
        self.length / 2.0 - self.com_forward_offset
    }

    /// Distance from the centre of mass to the rear bumper.
    pub fn rear_reach(&self) -> f64 {
        self.length / 2.0 + self.com_forward_offset
    }

    /// Footprint of the robot at `pose` in the same frame as `pose`.
    pub fn footprint(&self, pose: &Pose2) -> Rect {
        let (cx, cy) = pose.to_global(-self.com_forward_offset, 0.0);
        Rect::new(cx, cy, pose.theta, self.length, self.width)
    }
}

/// What a disturbance means to the robot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DisturbanceKind {
    /// An obstacle the simulated robot has collided with.
    ObstacleCollided,
    /// An obstacle in the way that has not been touched.
    ObstacleLooming,
    /// Something to drive to.
    Target,
}

impl DisturbanceKind {
    pub fn is_obstacle(self) -> bool {
        !matches!(self, DisturbanceKind::Target)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            DisturbanceKind::ObstacleCollided => "■",
            DisturbanceKind::ObstacleLooming => "□",
            DisturbanceKind::Target => "♥",
        }
    }
}

/// Rectangle-shaped stimulus. `w` is the extent along the disturbance's own
/// `x` axis and `l` the extent along its `y` axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disturbance {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub w: f64,
    pub l: f64,
    pub kind: DisturbanceKind,
}

impl Disturbance {
    pub fn new(x: f64, y: f64, theta: f64, w: f64, l: f64, kind: DisturbanceKind) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
            w: w.max(0.0),
            l: l.max(0.0),
            kind,
        }
    }

    pub fn obstacle(x: f64, y: f64, w: f64, l: f64) -> Self {
        Self::new(x, y, 0.0, w, l, DisturbanceKind::ObstacleLooming)
    }

    pub fn target(x: f64, y: f64, w: f64, l: f64) -> Self {
        Self::new(x, y, 0.0, w, l, DisturbanceKind::Target)
    }

    pub fn with_kind(mut self, kind: DisturbanceKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn rect(&self) -> Rect {
        Rect::new(self.x, self.y, self.theta, self.w, self.l)
    }

    /// Distance of the disturbance's centre from the frame origin.
    pub fn range(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Same pose and extent, ignoring the kind.
    pub fn same_body(&self, other: &Disturbance, tol: f64) -> bool {
        (self.x - other.x).abs() <= tol
            && (self.y - other.y).abs() <= tol
            && normalize_angle(self.theta - other.theta).abs() <= tol
            && (self.w - other.w).abs() <= tol
            && (self.l - other.l).abs() <= tol
    }
}

/// Oriented rectangle: centre, orientation, full extent along the local `x`
/// axis (`len`) and along the local `y` axis (`wid`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub cx: f64,
    pub cy: f64,
    pub theta: f64,
    pub len: f64,
    pub wid: f64,
}

impl Rect {
    pub fn new(cx: f64, cy: f64, theta: f64, len: f64, wid: f64) -> Self {
        Self {
            cx,
            cy,
            theta,
            len,
            wid,
        }
    }

    /// Axis-aligned rectangle from its bounds.
    pub fn from_bounds(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Self::new(
            (xmin + xmax) / 2.0,
            (ymin + ymax) / 2.0,
            0.0,
            (xmax - xmin).abs(),
            (ymax - ymin).abs(),
        )
    }

    fn axes(&self) -> [(f64, f64); 2] {
        let (s, c) = self.theta.sin_cos();
        [(c, s), (-s, c)]
    }

    pub fn corners(&self) -> [(f64, f64); 4] {
        let [(ux, uy), (vx, vy)] = self.axes();
        let (hl, hw) = (self.len / 2.0, self.wid / 2.0);
        [
            (self.cx + ux * hl + vx * hw, self.cy + uy * hl + vy * hw),
            (self.cx - ux * hl + vx * hw, self.cy - uy * hl + vy * hw),
            (self.cx - ux * hl - vx * hw, self.cy - uy * hl - vy * hw),
            (self.cx + ux * hl - vx * hw, self.cy + uy * hl - vy * hw),
        ]
    }

    /// Closed containment test.
    pub fn contains(&self, px: f64, py: f64) -> bool {
        let [(ux, uy), (vx, vy)] = self.axes();
        let (dx, dy) = (px - self.cx, py - self.cy);
        let a = dx * ux + dy * uy;
        let b = dx * vx + dy * vy;
        a.abs() <= self.len / 2.0 + GEOM_EPS && b.abs() <= self.wid / 2.0 + GEOM_EPS
    }

    /// Axis-aligned bounds `(xmin, ymin, xmax, ymax)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let cs = self.corners();
        let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (x, y) in cs {
            b.0 = b.0.min(x);
            b.1 = b.1.min(y);
            b.2 = b.2.max(x);
            b.3 = b.3.max(y);
        }
        b
    }

    fn project(&self, ax: f64, ay: f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (x, y) in self.corners() {
            let p = x * ax + y * ay;
            lo = lo.min(p);
            hi = hi.max(p);
        }
        (lo, hi)
    }
}

/// Slack used by the closed overlap and containment tests.
pub const GEOM_EPS: f64 = 1e-12;

/// Separating-axis overlap test for two oriented rectangles. Touching
/// rectangles count as overlapping.
pub fn obb_overlap(a: &Rect, b: &Rect) -> bool {
    for (ax, ay) in a.axes().into_iter().chain(b.axes()) {
        let (alo, ahi) = a.project(ax, ay);
        let (blo, bhi) = b.project(ax, ay);
        if ahi < blo - GEOM_EPS || bhi < alo - GEOM_EPS {
            return false;
        }
    }
    true
}

/// Express a fixed-frame disturbance in the moving frame of `robot`.
pub fn to_moving_frame(robot: &Pose2, d: &Disturbance) -> Disturbance {
    let (x, y) = robot.to_local(d.x, d.y);
    Disturbance {
        x,
        y,
        theta: normalize_angle(d.theta - robot.theta),
        ..*d
    }
}

/// Express a moving-frame disturbance in the fixed frame.
pub fn to_fixed_frame(robot: &Pose2, d: &Disturbance) -> Disturbance {
    let (x, y) = robot.to_global(d.x, d.y);
    Disturbance {
        x,
        y,
        theta: normalize_angle(d.theta + robot.theta),
        ..*d
    }
}
