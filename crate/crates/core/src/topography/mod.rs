//! Truncated end-classification quantities on the trees `T_f`.
//!
//! Exploration always happens in the lifted tree: a vertex is a point together
//! with the path that reached it, so the periodic cycles that eventually
//! periodic points form under the shift-type maps unroll into a tree. Every
//! weight is a product of step cocycles along the lifted path.

mod ball;
mod classify;
mod core;
mod masses;
mod trace;

pub use self::core::{rn_core_truncated, verify_exclusion, CoreEntry, CoreReport, CoreStatus, ExclusionCertificate};
pub use ball::{explore_ball, Ball, BallVertex};
pub use classify::{classify, BackStatus, Classification, ClassifyParams, CoreSummary, ForwardStatus};
pub use masses::{
    back_orbit_mass, back_sphere_mass, back_tail_sup, half_space_mass, sigma_backward, MassReport, TailSup,
};
pub use trace::{back_trace, forward_trace, odometer_extremes, probe_backward, Selector, Trace, TraceExtremes};

use num_rational::BigRational;
use serde::Serialize;

use crate::symbolic::{SystemError, TreeSystem};

pub(crate) fn as_debug<T: std::fmt::Debug, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{v:?}"))
}

/// Default vertex budget for explorations.
pub const DEFAULT_BUDGET: usize = 2_000_000;

/// Direction of a tree edge relative to the map: `Forward` goes `v → f(v)`,
/// `Backward` goes `v → y` with `f(y) = v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Forward,
    Backward,
}

/// How the exploration reached a vertex: from nowhere (the root), by a
/// forward step from the given preimage, or by a backward step from its image.
#[derive(Debug, Clone)]
pub(crate) enum Arrival<P> {
    Root,
    ViaForward(P),
    ViaBackward,
}

/// Lifted edges at `v` other than the one it was reached by, with `ρ^v(w)`.
pub(crate) fn lifted_edges<P, S>(system: &S, v: &P, arrived: &Arrival<P>) -> Result<Vec<(Step, P, BigRational)>, SystemError>
where
    P: Clone + Eq,
    S: TreeSystem<P> + ?Sized,
{
    let mut out = Vec::new();
    if !matches!(arrived, Arrival::ViaBackward) {
        match system.forward(v) {
            Ok(w) => out.push((Step::Forward, w, system.step_cocycle(v)?)),
            Err(SystemError::Truncated { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let mut skip = match arrived {
        Arrival::ViaForward(parent) => Some(parent),
        _ => None,
    };
    for y in system.preimages(v)? {
        if skip.is_some_and(|p| *p == y) {
            skip = None;
            continue;
        }
        let w = system.step_cocycle(&y)?.recip();
        out.push((Step::Backward, y, w));
    }
    Ok(out)
}

/// Per-distance statistics of a lifted-tree exploration.
#[derive(Debug, Clone)]
pub(crate) struct LayerStats {
    /// Number of vertices in each layer.
    pub counts: Vec<usize>,
    /// `Σ ρ^root(v)` over each layer.
    pub sums: Vec<BigRational>,
    /// `max ρ^root(v)` over each layer (`None` for an empty layer).
    pub maxima: Vec<Option<BigRational>>,
    /// `max ρ^root([root, v])` over each layer.
    pub path_maxima: Vec<Option<BigRational>>,
    /// Some vertex of the last layer has further edges.
    pub continues: bool,
}

/// Breadth-first exploration from `root` to distance `depth`, never crossing
/// back over the edge described by `arrival`.
pub(crate) fn explore_layers<P, S>(
    system: &S,
    root: &P,
    arrival: Arrival<P>,
    depth: usize,
    budget: usize,
) -> Result<LayerStats, SystemError>
where
    P: Clone + Eq,
    S: TreeSystem<P> + ?Sized,
{
    let one = BigRational::from_integer(1.into());
    let mut layer = vec![(root.clone(), arrival, one.clone(), one.clone())];
    let mut stats = LayerStats {
        counts: vec![1],
        sums: vec![one.clone()],
        maxima: vec![Some(one.clone())],
        path_maxima: vec![Some(one)],
        continues: false,
    };
    let mut seen = 1usize;
    for d in 0..=depth {
        let mut next = Vec::new();
        for (v, arrived, w, path) in &layer {
            let edges = lifted_edges(system, v, arrived)?;
            if d == depth {
                stats.continues |= !edges.is_empty();
                continue;
            }
            for (step, u, rho) in edges {
                seen += 1;
                if seen > budget {
                    return Err(SystemError::Budget { budget, depth: d });
                }
                let wu = w * rho;
                let pu = path + &wu;
                let arr = match step {
                    Step::Forward => Arrival::ViaForward(v.clone()),
                    Step::Backward => Arrival::ViaBackward,
                };
                next.push((u, arr, wu, pu));
            }
        }
        if d == depth {
            break;
        }
        stats.counts.push(next.len());
        stats.sums.push(next.iter().map(|t| &t.2).sum());
        stats.maxima.push(next.iter().map(|t| &t.2).max().cloned());
        stats.path_maxima.push(next.iter().map(|t| &t.3).max().cloned());
        if next.is_empty() {
            // nothing further: pad the remaining layers
            while stats.sums.len() <= depth {
                stats.counts.push(0);
                stats.sums.push(BigRational::from_integer(0.into()));
                stats.maxima.push(None);
                stats.path_maxima.push(None);
            }
            break;
        }
        layer = next;
    }
    Ok(stats)
}
