//! Log-radial × angular tensor grid on the wedge.
//!
//! Radial nodes are uniform in `s = log r` on `[s_min, s_max]`; angular nodes
//! are uniform on `[0, θ]` and include both edges. All fields in the crate
//! are sampled on such a grid, row-major by `s` then `φ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_t_max() -> f64 {
    20.0
}
fn default_n_modes() -> usize {
    257
}

/// Discretization parameters: the physical grid plus the Mellin-line
/// truncation (`t_max`, `n_modes`) used by every transform in a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub s_min: f64,
    pub s_max: f64,
    pub n_radial: usize,
    pub n_angular: usize,
    /// Half-width `T` of the Im λ window `[−T, T]`.
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    /// Number of Im λ samples (odd, so t = 0 is a node).
    #[serde(default = "default_n_modes")]
    pub n_modes: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.s_min < self.s_max) {
            return Err(Error::InvalidArgument(format!(
                "s_min = {} must be < s_max = {}",
                self.s_min, self.s_max
            )));
        }
        if self.n_radial < 16 {
            return Err(Error::InvalidArgument(format!(
                "n_radial = {} < 16",
                self.n_radial
            )));
        }
        if self.n_angular < 8 {
            return Err(Error::InvalidArgument(format!(
                "n_angular = {} < 8",
                self.n_angular
            )));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::InvalidArgument("t_max must be positive".into()));
        }
        if self.n_modes % 2 == 0 || self.n_modes < 3 {
            return Err(Error::InvalidArgument(format!(
                "n_modes = {} must be odd and ≥ 3",
                self.n_modes
            )));
        }
        Ok(())
    }

    pub fn ds(&self) -> f64 {
        (self.s_max - self.s_min) / (self.n_radial - 1) as f64
    }
}

/// A concrete grid: spec plus the wedge opening angle.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub spec: GridSpec,
    pub theta: f64,
}

impl Grid {
    pub fn new(spec: GridSpec, theta: f64) -> Result<Self> {
        spec.validate()?;
        if !(theta > 0.0 && theta < std::f64::consts::PI) {
            return Err(Error::InvalidArgument(format!(
                "theta = {theta} outside (0, π)"
            )));
        }
        Ok(Grid { spec, theta })
    }

    #[inline]
    pub fn n_radial(&self) -> usize {
        self.spec.n_radial
    }
    #[inline]
    pub fn n_angular(&self) -> usize {
        self.spec.n_angular
    }
    #[inline]
    pub fn len(&self) -> usize {
        self.n_radial() * self.n_angular()
    }
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }
    #[inline]
    pub fn ds(&self) -> f64 {
        self.spec.ds()
    }
    #[inline]
    pub fn dphi(&self) -> f64 {
        self.theta / (self.n_angular() - 1) as f64
    }
    #[inline]
    pub fn s(&self, i: usize) -> f64 {
        self.spec.s_min + i as f64 * self.ds()
    }
    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        self.s(i).exp()
    }
    #[inline]
    pub fn phi(&self, j: usize) -> f64 {
        j as f64 * self.dphi()
    }
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n_angular() + j
    }

    pub fn s_nodes(&self) -> Vec<f64> {
        (0..self.n_radial()).map(|i| self.s(i)).collect()
    }
    pub fn phi_nodes(&self) -> Vec<f64> {
        (0..self.n_angular()).map(|j| self.phi(j)).collect()
    }

    pub fn assert_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "grids differ: {:?} θ={} vs {:?} θ={}",
                self.spec, self.theta, other.spec, other.theta
            )))
        }
    }
}

/// Real scalar samples over a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    /// Sample `f(s, φ)` nodewise.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_radial() {
            let s = grid.s(i);
            for j in 0..grid.n_angular() {
                values.push(f(s, grid.phi(j)));
            }
        }
        ScalarField {
            grid: grid.clone(),
            values,
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("scalar field".into()))
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: f64, other: &ScalarField) -> Result<Self> {
        self.grid.assert_same(&other.grid)?;
        Ok(ScalarField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Polar vector samples (`u_r`, `u_φ`) over a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub grid: Grid,
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: &Grid) -> Self {
        VectorField {
            grid: grid.clone(),
            r: vec![0.0; grid.len()],
            phi: vec![0.0; grid.len()],
        }
    }

    pub fn from_components(r: ScalarField, phi: ScalarField) -> Result<Self> {
        r.grid.assert_same(&phi.grid)?;
        Ok(VectorField {
            grid: r.grid,
            r: r.values,
            phi: phi.values,
        })
    }

    pub fn from_fns(
        grid: &Grid,
        fr: impl Fn(f64, f64) -> f64,
        fphi: impl Fn(f64, f64) -> f64,
    ) -> Self {
        VectorField {
            grid: grid.clone(),
            r: ScalarField::from_fn(grid, fr).values,
            phi: ScalarField::from_fn(grid, fphi).values,
        }
    }

    pub fn component_r(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.r.clone(),
        }
    }
    pub fn component_phi(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.phi.clone(),
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.r.iter().chain(&self.phi).all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("vector field".into()))
        }
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: f64, other: &VectorField) -> Result<Self> {
        self.grid.assert_same(&other.grid)?;
        Ok(VectorField {
            grid: self.grid.clone(),
            r: self
                .r
                .iter()
                .zip(&other.r)
                .map(|(a, b)| a + c * b)
                .collect(),
            phi: self
                .phi
                .iter()
                .zip(&other.phi)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.r
            .iter()
            .chain(&self.phi)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Edge traces (φ = 0 and φ = θ) of the radial component.
    pub fn edge_traces_r(&self) -> BoundaryData {
        let n = self.grid.n_radial();
        let na = self.grid.n_angular();
        BoundaryData {
            lower: (0..n).map(|i| self.r[self.grid.idx(i, 0)]).collect(),
            upper: (0..n).map(|i| self.r[self.grid.idx(i, na - 1)]).collect(),
        }
    }
}

/// Edge data `g(r)` sampled on the radial grid; `lower` is the edge φ = 0,
/// `upper` the edge φ = θ.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoundaryData {
    pub fn zeros(n_radial: usize) -> Self {
        BoundaryData {
            lower: vec![0.0; n_radial],
            upper: vec![0.0; n_radial],
        }
    }

    pub fn from_fns(grid: &Grid, lower: impl Fn(f64) -> f64, upper: impl Fn(f64) -> f64) -> Self {
        BoundaryData {
            lower: (0..grid.n_radial()).map(|i| lower(grid.s(i))).collect(),
            upper: (0..grid.n_radial()).map(|i| upper(grid.s(i))).collect(),
        }
    }

    pub fn check_len(&self, n_radial: usize) -> Result<()> {
        if self.lower.len() == n_radial && self.upper.len() == n_radial {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "boundary data lengths {}/{} vs n_radial {}",
                self.lower.len(),
                self.upper.len(),
                n_radial
            )))
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.lower
            .iter()
            .chain(&self.upper)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}
