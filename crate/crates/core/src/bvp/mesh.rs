use crate::scalar::Scalar;

use super::{BvpError, OdeBvpProblem, ResidualLocation};

/// Strictly increasing partition of `[0, 1]` with exact endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<T> {
    nodes: Vec<T>,
}

impl<T: Scalar> Mesh<T> {
    pub fn new(nodes: Vec<T>) -> Result<Self, BvpError> {
        if nodes.len() < 2 {
            return Err(BvpError::InvalidMesh(format!(
                "need at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        if nodes[0] != T::zero() || nodes[nodes.len() - 1] != T::one() {
            return Err(BvpError::InvalidMesh(
                "endpoints must be exactly 0 and 1".into(),
            ));
        }
        if let Some(i) = nodes.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(BvpError::InvalidMesh(format!(
                "nodes not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self { nodes })
    }

    pub fn uniform(points: usize) -> Result<Self, BvpError> {
        if points < 2 {
            return Err(BvpError::InvalidMesh(format!(
                "need at least 2 nodes, got {points}"
            )));
        }
        let last = T::from_usize_lossy(points - 1);
        let mut nodes: Vec<T> = (0..points).map(|i| T::from_usize_lossy(i) / last).collect();
        nodes[points - 1] = T::one();
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self, interval: usize) -> T {
        self.nodes[interval + 1] - self.nodes[interval]
    }

    /// Inserts the midpoint of every flagged interval.
    pub fn bisect(&self, flagged: &[bool]) -> Result<Self, BvpError> {
        assert_eq!(flagged.len(), self.intervals());
        let half = T::lit(0.5);
        let mut nodes = Vec::with_capacity(self.len() + flagged.len());
        for (i, &split) in flagged.iter().enumerate() {
            nodes.push(self.nodes[i]);
            if split {
                nodes.push(self.nodes[i] + half * self.width(i));
            }
        }
        nodes.push(T::one());
        Self::new(nodes)
    }

    /// Index of the interval containing `theta`, clamped to the mesh.
    pub fn locate(&self, theta: T) -> usize {
        let k = self.nodes.partition_point(|&x| x <= theta);
        k.saturating_sub(1).min(self.intervals() - 1)
    }
}

/// Per-node state vectors on a mesh; the collocation unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionGrid<T> {
    mesh: Mesh<T>,
    dim: usize,
    states: Vec<T>,
}

impl<T: Scalar> SolutionGrid<T> {
    /// `states` is node-major: node `i` occupies `states[i*dim..(i+1)*dim]`.
    pub fn new(mesh: Mesh<T>, dim: usize, states: Vec<T>) -> Result<Self, BvpError> {
        if dim == 0 {
            return Err(BvpError::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        if states.len() != dim * mesh.len() {
            return Err(BvpError::DimensionMismatch {
                expected: dim * mesh.len(),
                actual: states.len(),
            });
        }
        Ok(Self { mesh, dim, states })
    }

    pub fn from_fn<F>(mesh: Mesh<T>, dim: usize, f: F) -> Result<Self, BvpError>
    where
        F: Fn(T) -> Vec<T>,
    {
        let mut states = Vec::with_capacity(dim * mesh.len());
        for &theta in mesh.nodes() {
            let s = f(theta);
            if s.len() != dim {
                return Err(BvpError::DimensionMismatch {
                    expected: dim,
                    actual: s.len(),
                });
            }
            states.extend(s);
        }
        Self::new(mesh, dim, states)
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.mesh.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn state(&self, node: usize) -> &[T] {
        &self.states[node * self.dim..(node + 1) * self.dim]
    }

    pub fn states(&self) -> &[T] {
        &self.states
    }

    pub(crate) fn states_mut(&mut self) -> &mut [T] {
        &mut self.states
    }

    /// Values of one component at every node.
    pub fn component(&self, k: usize) -> Vec<T> {
        self.states
            .iter()
            .skip(k)
            .step_by(self.dim)
            .copied()
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.states.iter().all(|v| v.is_finite())
    }

    pub fn interpolant(&self, problem: &OdeBvpProblem<T>) -> Result<Interpolant<T>, BvpError> {
        Interpolant::new(problem, self)
    }

    /// Evaluates the collocation interpolant on another mesh.
    pub fn resample(
        &self,
        problem: &OdeBvpProblem<T>,
        mesh: Mesh<T>,
    ) -> Result<SolutionGrid<T>, BvpError> {
        let interp = self.interpolant(problem)?;
        let mut states = Vec::with_capacity(self.dim * mesh.len());
        for &theta in mesh.nodes() {
            states.extend(interp.eval(theta));
        }
        SolutionGrid::new(mesh, self.dim, states)
    }
}

/// Piecewise cubic Hermite interpolant through node values and ODE slopes.
#[derive(Debug, Clone)]
pub struct Interpolant<T> {
    nodes: Vec<T>,
    dim: usize,
    values: Vec<T>,
    slopes: Vec<T>,
}

pub(crate) fn node_slopes<T: Scalar>(
    problem: &OdeBvpProblem<T>,
    grid: &SolutionGrid<T>,
) -> Result<Vec<T>, BvpError> {
    let n = grid.dim();
    if n != problem.dimension() {
        return Err(BvpError::DimensionMismatch {
            expected: problem.dimension(),
            actual: n,
        });
    }
    let mut slopes = vec![T::zero(); grid.states().len()];
    for (i, &theta) in grid.mesh().nodes().iter().enumerate() {
        let out = &mut slopes[i * n..(i + 1) * n];
        problem.rhs_into(theta, grid.state(i), out);
        if out.iter().any(|v| !v.is_finite()) {
            let interval = i.min(grid.mesh().intervals() - 1);
            return Err(BvpError::NonFiniteResidual(ResidualLocation::Interval(
                interval,
            )));
        }
    }
    Ok(slopes)
}

impl<T: Scalar> Interpolant<T> {
    fn new(problem: &OdeBvpProblem<T>, grid: &SolutionGrid<T>) -> Result<Self, BvpError> {
        let slopes = node_slopes(problem, grid)?;
        Ok(Self {
            nodes: grid.mesh().nodes().to_vec(),
            dim: grid.dim(),
            values: grid.states().to_vec(),
            slopes,
        })
    }

    fn segment(&self, theta: T) -> (usize, T, T) {
        let k = self.nodes.partition_point(|&x| x <= theta);
        let i = k.saturating_sub(1).min(self.nodes.len() - 2);
        let h = self.nodes[i + 1] - self.nodes[i];
        (i, h, (theta - self.nodes[i]) / h)
    }

    pub fn eval(&self, theta: T) -> Vec<T> {
        let (i, h, t) = self.segment(theta);
        let n = self.dim;
        let (two, three) = (T::lit(2.0), T::lit(3.0));
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        (0..n)
            .map(|k| {
                let (ya, yb) = (self.values[i * n + k], self.values[(i + 1) * n + k]);
                let (fa, fb) = (self.slopes[i * n + k], self.slopes[(i + 1) * n + k]);
                h00 * ya + h10 * h * fa + h01 * yb + h11 * h * fb
            })
            .collect()
    }

    pub fn derivative(&self, theta: T) -> Vec<T> {
        let (i, h, t) = self.segment(theta);
        let n = self.dim;
        let (two, three, four, six) = (T::lit(2.0), T::lit(3.0), T::lit(4.0), T::lit(6.0));
        let t2 = t * t;
        let d00 = six * t2 - six * t;
        let d10 = three * t2 - four * t + T::one();
        let d01 = six * t - six * t2;
        let d11 = three * t2 - two * t;
        (0..n)
            .map(|k| {
                let (ya, yb) = (self.values[i * n + k], self.values[(i + 1) * n + k]);
                let (fa, fb) = (self.slopes[i * n + k], self.slopes[(i + 1) * n + k]);
                (d00 * ya + d01 * yb) / h + d10 * fa + d11 * fb
            })
            .collect()
    }
}
