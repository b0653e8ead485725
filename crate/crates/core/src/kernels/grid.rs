use serde::{Deserialize, Serialize};

use super::spec::HermiteKernelSpec;
use crate::error::{Error, Result};

/// Target share of `‖A_T‖²` lost to the left truncation.
pub const TAIL_TARGET: f64 = 1e-3;

/// Discretization parameters. The space axis is cut into uniform cells of
/// width `h = T / (M · refine)` on `[−near, T]` and geometrically growing
/// cells (ratio `ratio`) on `[−L, −near]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Time steps on `[0, T]`.
    #[serde(rename = "M")]
    pub m: usize,
    /// Space cells per time step.
    #[serde(default = "one")]
    pub refine: usize,
    /// Left truncation point `L`; derived from the tail decay when absent.
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub far: Option<f64>,
    /// Length of the uniform region left of 0; `T/2` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub near: Option<f64>,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    /// Quadrature nodes per cell for the `u` integral.
    #[serde(default = "one")]
    pub nodes: usize,
}

fn one() -> usize {
    1
}

fn default_ratio() -> f64 {
    1.25
}

impl GridSpec {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            refine: 1,
            far: None,
            near: None,
            ratio: default_ratio(),
            nodes: 1,
        }
    }

    pub fn refine(mut self, refine: usize) -> Self {
        self.refine = refine;
        self
    }

    pub fn nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn far(mut self, l: f64) -> Self {
        self.far = Some(l);
        self
    }

    pub fn near(mut self, l: f64) -> Self {
        self.near = Some(l);
        self
    }

    /// Same grid with twice the space and time resolution.
    pub fn doubled(&self) -> Self {
        Self {
            m: 2 * self.m,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.refine == 0 || self.nodes == 0 {
            return Err(Error::InvalidArgument("M, refine and nodes must be positive".into()));
        }
        if !(self.ratio > 1.0 && self.ratio <= 4.0) {
            return Err(Error::InvalidArgument(format!("ratio {} outside (1, 4]", self.ratio)));
        }
        for (name, v) in [("L", self.far), ("near", self.near)] {
            if let Some(x) = v {
                if !(x.is_finite() && x > 0.0) {
                    return Err(Error::InvalidArgument(format!("{name} = {x} must be positive")));
                }
            }
        }
        Ok(())
    }
}

/// A resolved cell grid. Cells are stored left to right: the `far` cells,
/// then `near` uniform cells starting at `x0 = −n_left · h`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub horizon: f64,
    pub m: usize,
    pub refine: usize,
    pub nodes: usize,
    pub h: f64,
    pub n_left: usize,
    pub n_near: usize,
    /// Edges of the far cells, increasing, ending at `x0`.
    pub far_edges: Vec<f64>,
    pub l_far: f64,
    /// Estimated share of `‖A_T‖²` beyond `−L`.
    pub tail_estimate: f64,
}

impl Grid {
    pub fn new(spec: &HermiteKernelSpec, g: &GridSpec) -> Result<Self> {
        g.validate()?;
        let horizon = spec.horizon();
        let h = horizon / (g.m * g.refine) as f64;
        let near = g.near.unwrap_or(0.5 * horizon);
        let n_left = (near / h).ceil() as usize;
        let x0 = -(n_left as f64) * h;
        let e = spec.tail_exponent();
        let l_far = g.far.unwrap_or(horizon * TAIL_TARGET.powf(-1.0 / e)).max(-x0);
        let tail_estimate = (l_far / horizon).powf(-e);
        let mut edges = vec![x0];
        let mut w = h;
        let mut x = x0;
        while x > -l_far {
            w *= g.ratio;
            x = (x - w).max(-l_far);
            if x - (-l_far) < 0.5 * w {
                x = -l_far;
            }
            edges.push(x);
        }
        edges.reverse();
        let n_near = n_left + g.m * g.refine;
        if n_near > 1 << 24 {
            return Err(Error::CapExceeded {
                what: "uniform cells",
                value: n_near,
                cap: 1 << 24,
            });
        }
        Ok(Self {
            horizon,
            m: g.m,
            refine: g.refine,
            nodes: g.nodes,
            h,
            n_left,
            n_near,
            far_edges: edges,
            l_far,
            tail_estimate,
        })
    }

    pub fn x0(&self) -> f64 {
        -(self.n_left as f64) * self.h
    }

    pub fn num_far(&self) -> usize {
        self.far_edges.len() - 1
    }

    /// Total number of cells, i.e. the dimension of the discretized space.
    pub fn dim(&self) -> usize {
        self.num_far() + self.n_near
    }

    /// Cell `i` in global left-to-right order.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let f = self.num_far();
        if i < f {
            (self.far_edges[i], self.far_edges[i + 1])
        } else {
            let j = (i - f) as f64;
            (self.x0() + j * self.h, self.x0() + (j + 1.0) * self.h)
        }
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.m as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.m {
            self.horizon
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.m).map(|k| self.time(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let spec = HermiteKernelSpec::fbm(0.75, 1.0).unwrap();
        let g = Grid::new(&spec, &GridSpec::new(16).refine(2)).unwrap();
        assert_eq!(g.h, 1.0 / 32.0);
        assert_eq!(g.n_left, 16);
        assert_eq!(g.n_near, 48);
        assert!((g.l_far - 1e6).abs() < 1e-3);
        assert!((g.tail_estimate - 1e-3).abs() < 1e-12);
        assert_eq!(g.far_edges[0], -g.l_far);
        assert_eq!(*g.far_edges.last().unwrap(), -0.5);
        for w in g.far_edges.windows(2) {
            assert!(w[1] > w[0]);
        }
        let mut prev = g.cell(0).0;
        for i in 0..g.dim() {
            let (a, b) = g.cell(i);
            assert!((a - prev).abs() < 1e-12 && b > a);
            prev = b;
        }
        assert!((prev - 1.0).abs() < 1e-12);
        assert_eq!(g.time(16), 1.0);
    }

    #[test]
    fn rosenblatt_needs_a_long_tail() {
        let spec = HermiteKernelSpec::rosenblatt(0.7, 1.0).unwrap();
        let g = Grid::new(&spec, &GridSpec::new(64)).unwrap();
        assert!(g.l_far > 1e9);
        assert!(g.num_far() < 200);
    }

    #[test]
    fn validation() {
        let spec = HermiteKernelSpec::fbm(0.5, 1.0).unwrap();
        assert!(Grid::new(&spec, &GridSpec::new(0)).is_err());
        let mut g = GridSpec::new(8);
        g.ratio = 1.0;
        assert!(Grid::new(&spec, &g).is_err());
        assert!(Grid::new(&spec, &GridSpec::new(8).far(-1.0)).is_err());
    }
}
