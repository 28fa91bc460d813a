use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{range, Error, Result};

/// Gauss points per cell. Exact for polynomials of degree 11 in `r`.
pub const DEFAULT_ORDER: usize = 6;

/// How the radial cells are laid out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GridScheme {
    /// `n` equal cells on `[0, r0]`.
    CompositeGauss,
    /// Background of `n` equal cells, refined geometrically towards each focus point.
    Graded {
        focus: Vec<f64>,
        /// Cell size at a focus point.
        finest: f64,
        /// Growth factor between neighbouring cells.
        ratio: f64,
    },
}

impl GridScheme {
    pub fn name(&self) -> &'static str {
        match self {
            GridScheme::CompositeGauss => "composite-gauss",
            GridScheme::Graded { .. } => "graded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub a: f64,
    pub b: f64,
    /// First node index of this cell.
    pub first: usize,
}

/// Composite Gauss quadrature on `[0, r0]` for the measure `r dr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r0: f64,
    pub scheme: GridScheme,
    pub order: usize,
    knots: Vec<f64>,
    cells: Vec<Cell>,
    nodes: Vec<f64>,
    /// Quadrature weights including the factor `r`.
    weights: Vec<f64>,
    /// Plain `dr` weights.
    line_weights: Vec<f64>,
    ref_nodes: Vec<f64>,
    ref_weights: Vec<f64>,
}

fn reference_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(order).expect("order >= 2");
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

fn graded_knots(n: usize, r0: f64, focus: &[f64], finest: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(finest > 0.0) || !(ratio > 1.0) {
        return Err(range("graded grid needs finest > 0 and ratio > 1"));
    }
    let coarse = r0 / n as f64;
    let mut marks: Vec<(f64, bool)> = vec![(0.0, false), (r0, false)];
    for &f in focus {
        if !(0.0..=r0).contains(&f) {
            return Err(range(format!("focus point {f} outside [0, r0]")));
        }
        if let Some(m) = marks.iter_mut().find(|m| (m.0 - f).abs() < 1e-14 * r0) {
            m.1 = true;
        } else {
            marks.push((f, true));
        }
    }
    marks.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut knots = vec![0.0];
    for pair in marks.windows(2) {
        let ((a, fa), (b, fb)) = (pair[0], pair[1]);
        let size = |x: f64| {
            let mut s = coarse;
            if fa {
                s = s.min(finest + (ratio - 1.0) * (x - a));
            }
            if fb {
                s = s.min(finest + (ratio - 1.0) * (b - x));
            }
            s.max(finest)
        };
        let mut steps = Vec::new();
        let mut x = a;
        while x < b {
            let s = size(x);
            steps.push(s);
            x += s;
        }
        // Shrink the steps so that they tile [a, b] exactly.
        let total: f64 = steps.iter().sum();
        let scale = (b - a) / total;
        let mut x = a;
        for s in &steps[..steps.len() - 1] {
            x += s * scale;
            knots.push(x);
        }
        knots.push(b);
    }
    Ok(knots)
}

/// Build a radial grid with `n` background cells.
pub fn build_grid(n: usize, r0: f64, scheme: GridScheme) -> Result<RadialGrid> {
    if n < 16 {
        return Err(range(format!("need at least 16 radial cells, got {n}")));
    }
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(range("r0 must be positive"));
    }
    let knots = match &scheme {
        GridScheme::CompositeGauss => (0..=n).map(|i| r0 * i as f64 / n as f64).collect(),
        GridScheme::Graded { focus, finest, ratio } => graded_knots(n, r0, focus, *finest, *ratio)?,
    };
    RadialGrid::from_knots(knots, scheme, DEFAULT_ORDER)
}

impl RadialGrid {
    /// Grid with explicit cell boundaries, which must start at 0 and increase strictly.
    pub fn from_knots(knots: Vec<f64>, scheme: GridScheme, order: usize) -> Result<Self> {
        if knots.len() < 2 || knots[0] != 0.0 || knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Grid("knots must start at 0 and increase strictly".into()));
        }
        let (ref_nodes, ref_weights) = reference_rule(order);
        let mut cells = Vec::with_capacity(knots.len() - 1);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut line_weights = Vec::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            cells.push(Cell { a, b, first: nodes.len() });
            let half = 0.5 * (b - a);
            for (x, wt) in ref_nodes.iter().zip(&ref_weights) {
                let r = a + half * (x + 1.0);
                nodes.push(r);
                line_weights.push(half * wt);
                weights.push(half * wt * r);
            }
        }
        Ok(RadialGrid {
            r0: *knots.last().unwrap(),
            scheme,
            order,
            knots,
            cells,
            nodes,
            weights,
            line_weights,
            ref_nodes,
            ref_weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights for `∫ f r dr`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights for `∫ f dr`.
    pub fn line_weights(&self) -> &[f64] {
        &self.line_weights
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Reference Gauss points on `[-1, 1]` and their weights.
    pub fn reference(&self) -> (&[f64], &[f64]) {
        (&self.ref_nodes, &self.ref_weights)
    }

    /// `∫ f r dr` from samples at the nodes.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        values.iter().zip(&self.weights).map(|(f, w)| f * w).sum()
    }

    /// `∫ f r dr` of a function of `r`.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, w)| f(r) * w).sum()
    }

    /// Largest cell size on the grid.
    pub fn max_spacing(&self) -> f64 {
        self.cells.iter().map(|c| c.b - c.a).fold(0.0, f64::max)
    }

    /// Size of the cell containing `r`.
    pub fn spacing_at(&self, r: f64) -> f64 {
        let c = &self.cells[self.cell_index(r)];
        c.b - c.a
    }

    /// Index of the cell containing `r` (right-closed at `r0`).
    pub fn cell_index(&self, r: f64) -> usize {
        let i = self.knots.partition_point(|&k| k <= r);
        i.clamp(1, self.cells.len()) - 1
    }

    /// Fails unless cells near the core radius are at most a quarter of it.
    pub fn check_resolves(&self, r_h: f64) -> Result<()> {
        let s = self.spacing_at(r_h);
        if s > r_h / 4.0 {
            return Err(Error::Grid(format!("cell size {s:e} near r_h = {r_h:e} exceeds r_h/4")));
        }
        Ok(())
    }
}
