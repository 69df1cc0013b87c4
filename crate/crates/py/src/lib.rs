//! Python bindings for the closed-loop planner.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::closedloop::geometry as geo;
use ::closedloop::harness::{self, export::runs_json, ScenarioSpec};
use ::closedloop::planner::{self, StrategyKind};
use ::closedloop::simulator::{SimConfig, World};

fn err(e: ::closedloop::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kind(strategy: usize) -> PyResult<StrategyKind> {
    StrategyKind::from_index(strategy).map_err(err)
}

#[pyclass(name = "Pose2", from_py_object)]
#[derive(Clone, Copy)]
struct PyPose2(geo::Pose2);

#[pymethods]
impl PyPose2 {
    #[new]
    #[pyo3(signature = (x=0.0, y=0.0, theta=0.0))]
    fn new(x: f64, y: f64, theta: f64) -> Self {
        Self(geo::Pose2::new(x, y, theta))
    }

    #[getter]
    fn x(&self) -> f64 {
        self.0.x
    }

    #[getter]
    fn y(&self) -> f64 {
        self.0.y
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta
    }

    fn to_local(&self, x: f64, y: f64) -> (f64, f64) {
        self.0.to_local(x, y)
    }

    fn to_global(&self, x: f64, y: f64) -> (f64, f64) {
        self.0.to_global(x, y)
    }

    fn __repr__(&self) -> String {
        format!("Pose2({:.4}, {:.4}, {:.4})", self.0.x, self.0.y, self.0.theta)
    }
}

/// Rectangle-shaped stimulus: an obstacle or a target.
#[pyclass(name = "Disturbance", from_py_object)]
#[derive(Clone, Copy)]
struct PyDisturbance(geo::Disturbance);

#[pymethods]
impl PyDisturbance {
    #[staticmethod]
    fn obstacle(x: f64, y: f64, w: f64, l: f64) -> Self {
        Self(geo::Disturbance::obstacle(x, y, w, l))
    }

    #[staticmethod]
    #[pyo3(signature = (x, y, w, l, theta=0.0))]
    fn target(x: f64, y: f64, w: f64, l: f64, theta: f64) -> Self {
        Self(geo::Disturbance::new(x, y, theta, w, l, geo::DisturbanceKind::Target))
    }

    #[getter]
    fn x(&self) -> f64 {
        self.0.x
    }

    #[getter]
    fn y(&self) -> f64 {
        self.0.y
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind.symbol()
    }

    fn overlaps(&self, other: &PyDisturbance) -> bool {
        geo::obb_overlap(&self.0.rect(), &other.0.rect())
    }

    /// The same disturbance seen from `pose`.
    fn in_frame_of(&self, pose: &PyPose2) -> Self {
        Self(geo::to_moving_frame(&pose.0, &self.0))
    }

    fn __repr__(&self) -> String {
        format!("Disturbance({}, {:.3}, {:.3})", self.0.kind.symbol(), self.0.x, self.0.y)
    }
}

/// A built cognitive map together with its extracted plan, if any.
#[pyclass(name = "CognitiveMap")]
struct PyMap {
    map: planner::CognitiveMap,
    plan: Option<planner::Plan>,
}

#[pymethods]
impl PyMap {
    fn __len__(&self) -> usize {
        self.map.len()
    }

    #[getter]
    fn n_objects(&self) -> usize {
        self.map.n_objects
    }

    /// Modes of the plan states after the root, or None without a plan.
    fn plan_modes(&self) -> Option<Vec<&'static str>> {
        self.plan
            .as_ref()
            .map(|p| p.states[1..].iter().map(|&s| self.map.states[s].mode.label()).collect())
    }

    fn motor_commands(&self) -> Option<Vec<usize>> {
        self.plan.as_ref().map(|p| p.n_motor.clone())
    }

    fn end_pose(&self) -> Option<PyPose2> {
        self.plan.as_ref().map(|p| PyPose2(self.map.states[p.last()].end))
    }

    /// (id, mode, phi, collided) for every state.
    fn states(&self) -> Vec<(usize, &'static str, f64, bool)> {
        self.map.states.iter().map(|s| (s.id, s.mode.label(), s.phi, s.collided())).collect()
    }
}

/// Result of one scan-plan-execute run.
#[pyclass(name = "Run")]
struct PyRun(harness::RunRecord);

#[pymethods]
impl PyRun {
    #[getter]
    fn n_states(&self) -> usize {
        self.0.n_states
    }

    #[getter]
    fn n_objects(&self) -> usize {
        self.0.n_objects
    }

    #[getter]
    fn planning_time(&self) -> f64 {
        self.0.planning_time
    }

    #[getter]
    fn success(&self) -> bool {
        self.0.success
    }

    #[getter]
    fn collided(&self) -> bool {
        self.0.collided
    }

    #[getter]
    fn entered_pocket(&self) -> bool {
        self.0.entered_pocket
    }

    #[getter]
    fn outcome(&self) -> String {
        self.0.outcome.clone()
    }

    fn trajectory(&self) -> Vec<(f64, f64, f64)> {
        self.0.trajectory.iter().map(|p| (p.x, p.y, p.theta)).collect()
    }

    fn to_json(&self) -> PyResult<String> {
        runs_json(std::slice::from_ref(&self.0)).map_err(err)
    }
}

#[pyfunction]
fn scenarios() -> Vec<String> {
    harness::builtin_scenarios().into_iter().map(|s| s.name).collect()
}

#[pyfunction]
#[pyo3(signature = (scenario, strategy, variant=0, repetition=0, seed=0))]
fn run_experiment(scenario: &str, strategy: usize, variant: usize, repetition: usize, seed: u64) -> PyResult<PyRun> {
    let spec = ScenarioSpec::resolve(scenario).map_err(err)?;
    harness::run_experiment(&spec, kind(strategy)?, variant, repetition, seed, &SimConfig::default())
        .map(PyRun)
        .map_err(err)
}

/// Every built-in scenario, strategy and variant, as runs.json text.
#[pyfunction]
#[pyo3(signature = (repetitions=3, seed=0))]
fn run_suite(repetitions: usize, seed: u64) -> PyResult<String> {
    let recs = harness::run_suite(&harness::builtin_scenarios(), repetitions, seed, &SimConfig::default()).map_err(err)?;
    runs_json(&recs).map_err(err)
}

/// Build a cognitive map over known obstacles and extract a plan.
#[pyfunction]
#[pyo3(signature = (obstacles, start, goal=None, strategy=1, d_sub=0.5))]
fn synthesize(
    obstacles: Vec<PyDisturbance>,
    start: PyPose2,
    goal: Option<PyDisturbance>,
    strategy: usize,
    d_sub: f64,
) -> PyResult<PyMap> {
    let cfg = SimConfig::default();
    let goal = goal.map(|g| g.0);
    let world = World::new(obstacles.into_iter().map(|d| d.0).collect(), start.0, goal);
    let map = planner::synthesize(&world, planner::Strategy::new(kind(strategy)?, d_sub), goal.as_ref(), &cfg).map_err(err)?;
    let plan = match planner::extract_plan(&map, &cfg) {
        Ok(p) => Some(p),
        Err(::closedloop::Error::NoPlan) => None,
        Err(e) => return Err(err(e)),
    };
    Ok(PyMap { map, plan })
}

#[pyfunction]
fn pearson(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    harness::pearson(&xs, &ys).map_err(err)
}

#[pymodule]
fn closedloop(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPose2>()?;
    m.add_class::<PyDisturbance>()?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    Ok(())
}
