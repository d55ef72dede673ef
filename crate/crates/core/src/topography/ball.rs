use num_rational::BigRational;
use num_traits::One;

use super::{lifted_edges, Arrival, Step};
use crate::symbolic::{SystemError, TreeSystem};

#[derive(Debug, Clone)]
pub struct BallVertex<P> {
    pub point: P,
    pub parent: Option<usize>,
    /// The step from the parent to this vertex.
    pub step: Option<Step>,
    pub depth: usize,
    /// `ρ^{base}(v)`.
    pub weight: BigRational,
}

/// All lifted-tree vertices within distance `radius` of the base (index 0).
#[derive(Debug, Clone)]
pub struct Ball<P> {
    pub radius: usize,
    pub vertices: Vec<BallVertex<P>>,
    /// `spheres[j]` lists the indices at distance `j`.
    pub spheres: Vec<Vec<usize>>,
}

impl<P> Ball<P> {
    pub fn base(&self) -> &P {
        &self.vertices[0].point
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.spheres.iter().map(Vec::len).collect()
    }

    /// Indices on the path from the base to `v`, base first.
    pub fn path_to(&self, mut v: usize) -> Vec<usize> {
        let mut path = vec![v];
        while let Some(p) = self.vertices[v].parent {
            path.push(p);
            v = p;
        }
        path.reverse();
        path
    }
}

/// Breadth-first exploration of the lifted tree around `x`.
pub fn explore_ball<P, S>(system: &S, x: &P, radius: usize, budget: usize) -> Result<Ball<P>, SystemError>
where
    P: Clone + Eq,
    S: TreeSystem<P> + ?Sized,
{
    system.validate(x)?;
    let mut ball = Ball {
        radius,
        vertices: vec![BallVertex {
            point: x.clone(),
            parent: None,
            step: None,
            depth: 0,
            weight: BigRational::one(),
        }],
        spheres: vec![vec![0]],
    };
    for depth in 0..radius {
        let mut next = Vec::new();
        for &i in &ball.spheres[depth] {
            let v = &ball.vertices[i];
            let arrived = match (v.parent, v.step) {
                (Some(p), Some(Step::Forward)) => Arrival::ViaForward(ball.vertices[p].point.clone()),
                (Some(_), _) => Arrival::ViaBackward,
                (None, _) => Arrival::Root,
            };
            let edges = lifted_edges(system, &v.point, &arrived)?;
            let base_weight = v.weight.clone();
            for (step, w, rho) in edges {
                if ball.vertices.len() >= budget {
                    return Err(SystemError::Budget { budget, depth });
                }
                next.push(ball.vertices.len());
                ball.vertices.push(BallVertex {
                    point: w,
                    parent: Some(i),
                    step: Some(step),
                    depth: depth + 1,
                    weight: &base_weight * rho,
                });
            }
        }
        ball.spheres.push(next);
    }
    Ok(ball)
}
