//! LiDAR stand-in: ray-cast scans against scenario rectangles, per-Task point
//! filtering and single-linkage clustering of the surviving points into
//! rectangular disturbances.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::automaton::ControlMode;
use crate::error::{Error, Result};
use crate::geometry::{obb_overlap, Disturbance, DisturbanceKind, Pose2, Rect, RobotModel};

/// Lateral width of the forward corridor kept for straight-drive Tasks.
pub const CORRIDOR_WIDTH: f64 = 0.2;
/// Side of the square kept around the centre of mass for turning Tasks.
pub const TURN_SQUARE: f64 = 0.39;
/// Linkage distance used to split a filtered cloud into objects.
pub const CLUSTER_EPS: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    /// Sensor pose at capture time, in the fixed frame.
    pub origin: Pose2,
    /// Hit points in the fixed frame.
    pub points: Vec<(f64, f64)>,
    pub max_range: f64,
}

impl PointCloud {
    pub fn new(origin: Pose2, points: Vec<(f64, f64)>, max_range: f64) -> Self {
        Self {
            origin,
            points,
            max_range,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n_beams: usize,
    pub max_range: f64,
    pub noise_std: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            n_beams: 360,
            max_range: 1.0,
            noise_std: 0.0,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_beams < 8 || !(self.max_range > 0.0) || !(self.noise_std >= 0.0) {
            return Err(Error::InvalidConfig(format!("{self:?}")));
        }
        Ok(())
    }
}

/// Distance along the ray `origin + t·dir` to the first edge of `rect`, if any.
fn ray_rect(ox: f64, oy: f64, dx: f64, dy: f64, rect: &Rect) -> Option<f64> {
    let c = rect.corners();
    let mut best: Option<f64> = None;
    for i in 0..4 {
        let (ax, ay) = c[i];
        let (bx, by) = c[(i + 1) % 4];
        let (ex, ey) = (bx - ax, by - ay);
        let denom = dx * ey - dy * ex;
        if denom.abs() < 1e-15 {
            continue;
        }
        let (wx, wy) = (ax - ox, ay - oy);
        let t = (wx * ey - wy * ex) / denom;
        let u = (wx * dy - wy * dx) / denom;
        if t >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) {
            best = Some(best.map_or(t, |b: f64| b.min(t)));
        }
    }
    best
}

/// Ray-cast a scan from `pose` against fixed-frame rectangles. Beam `k`
/// points at `pose.theta + 2πk/n`. Beams that hit nothing within range are
/// dropped; noise, when enabled, perturbs the range of each hit.
pub fn scan_rects(
    bodies: &[Disturbance],
    pose: &Pose2,
    robot: &RobotModel,
    cfg: &ScanConfig,
    seed: u64,
) -> Result<PointCloud> {
    cfg.validate()?;
    let footprint = robot.footprint(pose);
    if bodies.iter().any(|b| b.kind.is_obstacle() && obb_overlap(&footprint, &b.rect())) {
        return Err(Error::RobotInCollision {
            x: pose.x,
            y: pose.y,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = (cfg.noise_std > 0.0)
        .then(|| Normal::new(0.0, cfg.noise_std).expect("finite noise"));
    let mut points = Vec::new();
    for k in 0..cfg.n_beams {
        let a = pose.theta + 2.0 * std::f64::consts::PI * k as f64 / cfg.n_beams as f64;
        let (dy, dx) = a.sin_cos();
        let hit = bodies
            .iter()
            .filter(|b| b.kind.is_obstacle())
            .filter_map(|b| ray_rect(pose.x, pose.y, dx, dy, &b.rect()))
            .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))));
        // Draw for every beam so the noise sequence does not depend on geometry.
        let jitter = noise.as_ref().map_or(0.0, |n| n.sample(&mut rng));
        if let Some(t) = hit {
            if t <= cfg.max_range {
                let t = (t + jitter).clamp(0.0, cfg.max_range);
                points.push((pose.x + t * dx, pose.y + t * dy));
            }
        }
    }
    Ok(PointCloud::new(*pose, points, cfg.max_range))
}

/// Region of the cloud relevant to a Task starting at the robot's current
/// pose, as a rectangle in the moving frame.
///
/// `d_i_local` is the Task's initial disturbance in the same moving frame.
pub fn filter_region(
    mode: ControlMode,
    d_i_local: Option<&Disturbance>,
    r: f64,
    robot: &RobotModel,
) -> Rect {
    match mode {
        ControlMode::Left | ControlMode::Right => Rect::new(0.0, 0.0, 0.0, TURN_SQUARE, TURN_SQUARE),
        ControlMode::Straight | ControlMode::Default => {
            let length = match d_i_local {
                Some(d) if d.kind.is_obstacle() => {
                    let (_, _, xmax, _) = d.rect().bounds();
                    xmax.max(0.0) + robot.width
                }
                _ => r,
            };
            Rect::new(length / 2.0, 0.0, 0.0, length, CORRIDOR_WIDTH)
        }
    }
}

/// Keep only the points inside the Task's filter region. `pose` is the
/// simulated robot's pose at Task start and `d_i` is in the fixed frame.
pub fn filter_points(
    cloud: &PointCloud,
    pose: &Pose2,
    mode: ControlMode,
    d_i: Option<&Disturbance>,
    r: f64,
    robot: &RobotModel,
) -> PointCloud {
    let d_local = d_i.map(|d| crate::geometry::to_moving_frame(pose, d));
    let region = filter_region(mode, d_local.as_ref(), r, robot);
    let points = cloud
        .points
        .iter()
        .copied()
        .filter(|&(x, y)| {
            let (lx, ly) = pose.to_local(x, y);
            region.contains(lx, ly)
        })
        .collect();
    PointCloud::new(cloud.origin, points, cloud.max_range)
}

/// One cluster of points: the bounding rectangle used as a body, the mean of
/// the member coordinates, and the member indices into the input cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub body: Disturbance,
    pub center_of_mass: (f64, f64),
    pub members: Vec<usize>,
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = i;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Single-linkage clustering: points closer than `eps` share a cluster.
/// Boxes are aligned with `frame`; the returned bodies are in the fixed frame.
pub fn cluster_in_frame(cloud: &PointCloud, eps: f64, frame: &Pose2) -> Vec<Cluster> {
    let local: Vec<(f64, f64)> = cloud.points.iter().map(|&(x, y)| frame.to_local(x, y)).collect();
    let n = local.len();
    let mut sets = DisjointSet::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let (dx, dy) = (local[i].0 - local[j].0, local[i].1 - local[j].1);
            if dx.hypot(dy) < eps {
                sets.union(i, j);
            }
        }
    }
    let mut order: Vec<usize> = Vec::new();
    let mut groups: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for i in 0..n {
        let root = sets.find(i);
        groups
            .entry(root)
            .or_insert_with(|| {
                order.push(root);
                Vec::new()
            })
            .push(i);
    }
    order
        .into_iter()
        .map(|root| {
            let members = groups.remove(&root).unwrap_or_default();
            let (mut xmin, mut ymin) = (f64::INFINITY, f64::INFINITY);
            let (mut xmax, mut ymax) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            let (mut sx, mut sy) = (0.0, 0.0);
            for &i in &members {
                let (x, y) = local[i];
                xmin = xmin.min(x);
                xmax = xmax.max(x);
                ymin = ymin.min(y);
                ymax = ymax.max(y);
                let (gx, gy) = cloud.points[i];
                sx += gx;
                sy += gy;
            }
            let (cx, cy) = frame.to_global((xmin + xmax) / 2.0, (ymin + ymax) / 2.0);
            let m = members.len() as f64;
            Cluster {
                body: Disturbance::new(
                    cx,
                    cy,
                    frame.theta,
                    (xmax - xmin).abs(),
                    (ymax - ymin).abs(),
                    DisturbanceKind::ObstacleLooming,
                ),
                center_of_mass: (sx / m, sy / m),
                members,
            }
        })
        .collect()
}

/// Cluster in the cloud's own (fixed) frame.
pub fn cluster(cloud: &PointCloud, eps: f64) -> Vec<Cluster> {
    cluster_in_frame(cloud, eps, &Pose2::origin())
}
