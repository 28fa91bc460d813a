use serde::{Deserialize, Serialize};

use super::angular::{AngularField, AngularSlice};
use super::grid::RadialGrid;
use crate::error::{Error, Result};

/// Displacements and out-of-plane profile at one radius.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SheetSlice {
    pub u_r: AngularSlice,
    pub u_theta: AngularSlice,
    /// Height above the sphere's tangent plane is `w - r²/(2R)`.
    pub w: AngularSlice,
}

/// Anything that can hand out the sheet state node by node.
pub trait SheetSource: Sync {
    fn grid(&self) -> &RadialGrid;
    fn slice(&self, node: usize) -> SheetSlice;
}

/// A sheet state stored at the nodes of a radial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SheetState {
    pub grid: RadialGrid,
    pub u_r: AngularField,
    pub u_theta: AngularField,
    pub w: AngularField,
}

impl SheetState {
    pub fn new(grid: RadialGrid, u_r: AngularField, u_theta: AngularField, w: AngularField) -> Result<Self> {
        let n = grid.len();
        if u_r.len() != n || u_theta.len() != n || w.len() != n {
            return Err(Error::Grid(format!(
                "fields have {}/{}/{} slices for a grid of {n} nodes",
                u_r.len(),
                u_theta.len(),
                w.len()
            )));
        }
        if u_r.kmax != u_theta.kmax || u_r.kmax != w.kmax {
            return Err(Error::Grid("fields disagree on kmax".into()));
        }
        Ok(SheetState { grid, u_r, u_theta, w })
    }

    /// Copy any source into memory.
    pub fn materialize(src: &dyn SheetSource, kmax: u64) -> Result<Self> {
        let grid = src.grid().clone();
        let (mut ur, mut ut, mut w) = (Vec::new(), Vec::new(), Vec::new());
        for i in 0..grid.len() {
            let s = src.slice(i);
            ur.push(s.u_r);
            ut.push(s.u_theta);
            w.push(s.w);
        }
        let (ur, ut, w) = (AngularField::new(kmax, ur)?, AngularField::new(kmax, ut)?, AngularField::new(kmax, w)?);
        Self::new(grid, ur, ut, w)
    }
}

impl SheetSource for SheetState {
    fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    fn slice(&self, node: usize) -> SheetSlice {
        SheetSlice {
            u_r: self.u_r.slices[node].clone(),
            u_theta: self.u_theta.slices[node].clone(),
            w: self.w.slices[node].clone(),
        }
    }
}
