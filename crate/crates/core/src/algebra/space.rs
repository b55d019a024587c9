use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Interval1d,
    Rectangle2d,
}

/// Which endpoints of an interval carry unknowns (flux-type boundary) and
/// which are eliminated (homogeneous Dirichlet).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointHandling {
    /// Both ends Dirichlet, interior nodes only.
    Dirichlet,
    /// Both endpoints are unknowns.
    BothFree,
    /// Left end Dirichlet, right endpoint is an unknown.
    RightFree,
}

/// Finite-dimensional grid space with the quadrature weights that define its
/// L² inner product.
///
/// Node ordering in 2D is x-fastest: `idx = i + nx * j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSpace {
    kind: SpaceKind,
    lengths: [f64; 2],
    counts: [usize; 2],
    spacing: [f64; 2],
    weights: Vec<f64>,
    origin_offset: usize,
    endpoints: EndpointHandling,
    boundary_nodes: Vec<usize>,
    boundary_measure: f64,
    eliminated_weight: f64,
}

impl DiscreteSpace {
    /// Interior nodes of a uniform Dirichlet grid on (0, length), `h = L/(n+1)`.
    pub fn interval_dirichlet(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0) || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "interval needs length > 0 and n >= 1 (got L = {length}, n = {n})"
            )));
        }
        let h = length / (n + 1) as f64;
        Ok(Self {
            kind: SpaceKind::Interval1d,
            lengths: [length, 0.0],
            counts: [n, 1],
            spacing: [h, 0.0],
            weights: vec![h; n],
            origin_offset: 1,
            endpoints: EndpointHandling::Dirichlet,
            boundary_nodes: Vec::new(),
            boundary_measure: 2.0,
            // trapezoid half cells at x = 0 and x = L
            eliminated_weight: h,
        })
    }

    /// Uniform grid on (0, length) with `cells` cells whose free endpoints are
    /// kept as unknowns with trapezoid weight h/2.
    pub fn interval_with_free_ends(length: f64, cells: usize, ends: EndpointHandling) -> Result<Self> {
        if ends == EndpointHandling::Dirichlet {
            return Self::interval_dirichlet(length, cells.saturating_sub(1));
        }
        if !(length > 0.0) || cells < 2 {
            return Err(Error::InvalidParameter(format!(
                "interval needs length > 0 and at least 2 cells (got L = {length}, cells = {cells})"
            )));
        }
        let h = length / cells as f64;
        let (n, offset, eliminated) = match ends {
            EndpointHandling::BothFree => (cells + 1, 0, 0.0),
            EndpointHandling::RightFree => (cells, 1, 0.5 * h),
            EndpointHandling::Dirichlet => unreachable!(),
        };
        let mut weights = vec![h; n];
        let mut boundary_nodes = Vec::new();
        if ends == EndpointHandling::BothFree {
            weights[0] = 0.5 * h;
            boundary_nodes.push(0);
        }
        weights[n - 1] = 0.5 * h;
        boundary_nodes.push(n - 1);
        let boundary_measure = boundary_nodes.len() as f64;
        Ok(Self {
            kind: SpaceKind::Interval1d,
            lengths: [length, 0.0],
            counts: [n, 1],
            spacing: [h, 0.0],
            weights,
            origin_offset: offset,
            endpoints: ends,
            boundary_nodes,
            boundary_measure,
            eliminated_weight: eliminated,
        })
    }

    /// Interior nodes of a Dirichlet grid on (0, lx) x (0, ly).
    pub fn rectangle_dirichlet(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0) || nx == 0 || ny == 0 {
            return Err(Error::InvalidParameter(format!(
                "rectangle needs positive lengths and counts (got {lx} x {ly}, {nx} x {ny})"
            )));
        }
        let hx = lx / (nx + 1) as f64;
        let hy = ly / (ny + 1) as f64;
        let w = hx * hy;
        let interior = (nx * ny) as f64 * w;
        Ok(Self {
            kind: SpaceKind::Rectangle2d,
            lengths: [lx, ly],
            counts: [nx, ny],
            spacing: [hx, hy],
            weights: vec![w; nx * ny],
            origin_offset: 1,
            endpoints: EndpointHandling::Dirichlet,
            boundary_nodes: Vec::new(),
            boundary_measure: 2.0 * (lx + ly),
            eliminated_weight: trapezoid_total(nx + 2, hx) * trapezoid_total(ny + 2, hy) - interior,
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lengths(&self) -> [f64; 2] {
        self.lengths
    }

    pub fn counts(&self) -> [usize; 2] {
        self.counts
    }

    /// Grid spacing (hx, hy); hy is zero in 1D.
    pub fn spacing(&self) -> [f64; 2] {
        self.spacing
    }

    pub fn h(&self) -> f64 {
        self.spacing[0]
    }

    pub fn endpoints(&self) -> EndpointHandling {
        self.endpoints
    }

    /// Nodes that sit on the boundary and carry unknowns (flux boundary).
    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    pub fn boundary_measure(&self) -> f64 {
        self.boundary_measure
    }

    /// Measure of the domain: trapezoid weights of the full grid, including the
    /// half cells of eliminated Dirichlet nodes.
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum::<f64>() + self.eliminated_weight
    }

    pub fn has_uniform_weights(&self) -> bool {
        self.weights.iter().all(|&w| w == self.weights[0])
    }

    /// Physical coordinates of a node.
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let nx = self.counts[0];
        let (i, j) = (idx % nx, idx / nx);
        let x = (i + self.origin_offset) as f64 * self.spacing[0];
        let y = match self.kind {
            SpaceKind::Interval1d => 0.0,
            SpaceKind::Rectangle2d => (j + 1) as f64 * self.spacing[1],
        };
        (x, y)
    }

    /// Nodes adjacent to the (eliminated) outer boundary; used by the
    /// compact-support monitor for box-truncated Cauchy problems.
    pub fn rim_nodes(&self) -> Vec<usize> {
        let [nx, ny] = self.counts;
        match self.kind {
            SpaceKind::Interval1d => {
                let mut v = vec![0];
                if nx > 1 {
                    v.push(nx - 1);
                }
                v
            }
            SpaceKind::Rectangle2d => (0..nx * ny)
                .filter(|&k| {
                    let (i, j) = (k % nx, k / nx);
                    i == 0 || j == 0 || i + 1 == nx || j + 1 == ny
                })
                .collect(),
        }
    }

    pub fn sample<F: Fn(f64, f64) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.dim())
            .map(|k| {
                let (x, y) = self.coords(k);
                f(x, y)
            })
            .collect()
    }

    pub fn check_vector(&self, v: &[f64]) -> Result<()> {
        check_dim(self.dim(), v.len())
    }
}

fn trapezoid_total(nodes: usize, h: f64) -> f64 {
    (nodes - 1) as f64 * h
}

/// Weighted inner product `sum_i w_i x_i y_i`.
pub fn inner(space: &DiscreteSpace, x: &[f64], y: &[f64]) -> Result<f64> {
    space.check_vector(x)?;
    space.check_vector(y)?;
    Ok(weighted_dot(space.weights(), x, y))
}

pub fn norm(space: &DiscreteSpace, x: &[f64]) -> Result<f64> {
    inner(space, x, x).map(f64::sqrt)
}

pub(crate) fn weighted_dot(w: &[f64], x: &[f64], y: &[f64]) -> f64 {
    w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum()
}
