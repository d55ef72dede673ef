//! Experiment plans: JSON task lists run in order, each writing a JSON
//! report and a CSV table.

mod descriptor;
mod output;
mod tasks;

pub use descriptor::{parse_step_law, BuiltSystem, MeasureDescriptor, PointDescriptor, SystemDescriptor};
pub use output::{Table, TaskOutput};
pub use tasks::{
    ClassifyTask, CoreTask, ExpandTask, ExploreTask, MtpTask, TreeTask, WalkTask,
};

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topography::Classification;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub tasks: Vec<Task>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Task {
    Explore(ExploreTask),
    Classify(ClassifyTask),
    Core(CoreTask),
    Mtp(MtpTask),
    Tree(TreeTask),
    Walk(WalkTask),
    Expand(ExpandTask),
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::Explore(_) => "explore",
            Task::Classify(_) => "classify",
            Task::Core(_) => "core",
            Task::Mtp(_) => "mtp",
            Task::Tree(_) => "tree",
            Task::Walk(_) => "walk",
            Task::Expand(_) => "expand",
        }
    }

    pub fn out(&self) -> Option<&str> {
        match self {
            Task::Explore(t) => t.out.as_deref(),
            Task::Classify(t) => t.out.as_deref(),
            Task::Core(t) => t.out.as_deref(),
            Task::Mtp(t) => t.out.as_deref(),
            Task::Tree(t) => t.out.as_deref(),
            Task::Walk(t) => t.out.as_deref(),
            Task::Expand(t) => t.out.as_deref(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Task::Mtp(t) => Some(t.seed),
            Task::Walk(t) => Some(t.seed),
            Task::Expand(t) => t.seed,
            _ => None,
        }
    }

    /// Checks descriptors and parameters without running anything.
    pub fn validate(&self) -> Result<(), (String, String)> {
        match self {
            Task::Explore(t) => t.validate(),
            Task::Classify(t) => t.validate(),
            Task::Core(t) => t.validate(),
            Task::Mtp(t) => t.validate(),
            Task::Tree(t) => t.validate(),
            Task::Walk(t) => t.validate(),
            Task::Expand(t) => t.validate(),
        }
    }

    pub fn execute(&self, base_dir: &Path) -> Result<TaskOutput, String> {
        match self {
            Task::Explore(t) => t.run(),
            Task::Classify(t) => t.run(),
            Task::Core(t) => t.run(),
            Task::Mtp(t) => t.run(),
            Task::Tree(t) => t.run(base_dir),
            Task::Walk(t) => t.run(),
            Task::Expand(t) => t.run(),
        }
    }
}

/// Parses and validates a plan. Unknown fields are rejected; errors carry
/// the path to the offending field.
pub fn parse_plan(document: &str) -> Result<ExperimentPlan, PlanError> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Raw {
        tasks: Vec<serde_json::Map<String, serde_json::Value>>,
    }
    let schema = |path: String, message: String| PlanError::Schema { path, message };
    let de = &mut serde_json::Deserializer::from_str(document);
    let raw: Raw = serde_path_to_error::deserialize(de).map_err(|e| schema(e.path().to_string(), e.inner().to_string()))?;
    let mut tasks = Vec::with_capacity(raw.tasks.len());
    for (i, mut fields) in raw.tasks.into_iter().enumerate() {
        let kind = match fields.remove("kind") {
            Some(serde_json::Value::String(k)) => k,
            Some(_) => return Err(schema(format!("tasks[{i}].kind"), "expected a string".into())),
            None => return Err(schema(format!("tasks[{i}]"), "missing field `kind`".into())),
        };
        let body = serde_json::Value::Object(fields);
        let task = parse_task(&kind, body).map_err(|(path, message)| {
            let path = if path.is_empty() || path == "." { format!("tasks[{i}]") } else { format!("tasks[{i}].{path}") };
            schema(path, message)
        })?;
        tasks.push(task);
    }
    let plan = ExperimentPlan { tasks };
    for (i, task) in plan.tasks.iter().enumerate() {
        task.validate().map_err(|(field, message)| PlanError::Invalid {
            path: format!("tasks[{i}].{field}"),
            message,
        })?;
    }
    Ok(plan)
}

fn parse_task(kind: &str, body: serde_json::Value) -> Result<Task, (String, String)> {
    fn de<T: serde::de::DeserializeOwned>(body: serde_json::Value) -> Result<T, (String, String)> {
        serde_path_to_error::deserialize(body).map_err(|e| (e.path().to_string(), e.inner().to_string()))
    }
    Ok(match kind {
        "explore" => Task::Explore(de(body)?),
        "classify" => Task::Classify(de(body)?),
        "core" => Task::Core(de(body)?),
        "mtp" => Task::Mtp(de(body)?),
        "tree" => Task::Tree(de(body)?),
        "walk" => Task::Walk(de(body)?),
        "expand" => Task::Expand(de(body)?),
        other => {
            return Err((
                "kind".into(),
                format!("unknown task kind `{other}`, expected one of explore, classify, core, mtp, tree, walk, expand"),
            ))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskReport {
    pub index: usize,
    pub kind: &'static str,
    pub status: TaskStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub wall_time_ms: f64,
    /// The task's JSON result when it has no output path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub tasks: Vec<TaskReport>,
    /// One row per successful `classify` task.
    pub summary: Vec<Classification>,
}

impl RunReport {
    pub fn success(&self) -> bool {
        self.tasks.iter().all(|t| t.status == TaskStatus::Ok)
    }
}

fn resolve(base_dir: &Path, out: &str) -> PathBuf {
    let p = Path::new(out);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base_dir.join(p)
    }
}

/// Runs every task in order. Failures are recorded and do not stop later
/// tasks. Relative paths resolve against `base_dir`.
pub fn run_plan(plan: &ExperimentPlan, base_dir: &Path) -> RunReport {
    let mut tasks = Vec::with_capacity(plan.tasks.len());
    let mut summary = Vec::new();
    for (index, task) in plan.tasks.iter().enumerate() {
        let start = Instant::now();
        let mut outputs = Vec::new();
        let mut result = None;
        let outcome = task.execute(base_dir).and_then(|out| {
            if let Some(c) = &out.classification {
                summary.push(c.clone());
            }
            match task.out() {
                Some(prefix) => {
                    outputs = out.write(&resolve(base_dir, prefix)).map_err(|e| e.to_string())?;
                }
                None => result = Some(out.json),
            }
            Ok(())
        });
        tasks.push(TaskReport {
            index,
            kind: task.kind(),
            status: if outcome.is_ok() { TaskStatus::Ok } else { TaskStatus::Failed },
            error: outcome.err(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            seed: task.seed(),
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
            result,
        });
    }
    RunReport {
        version: env!("CARGO_PKG_VERSION"),
        tasks,
        summary,
    }
}
