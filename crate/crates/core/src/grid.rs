//! Uniform grids on boxes in R^n (n = 1, 2), sampled functions, midpoint
//! quadrature, moments, and mollification.
//!
//! Nodes sit at cell centers, so the quadrature rule is the midpoint rule and
//! ball membership of a node is the center-of-cell test (ties on the sphere
//! count as inside).

use crate::bump;
use crate::conv;
use crate::error::{Error, Result};

/// Highest moment order accepted by [`moment`].
pub const MAX_MOMENT_ORDER: usize = 8;

/// Fraction of the box per axis that must stay free of support for inputs
/// that feed the decomposition pipelines.
pub const SUPPORT_MARGIN: f64 = 0.10;

/// Uniform grid over an axis-aligned box, `res` nodes per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    res: usize,
}

impl Grid {
    /// `boxes[k] = [a_k, b_k]` per axis; `res` must be a power of two >= 2.
    pub fn new(dim: usize, boxes: &[[f64; 2]], res: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidParam(format!("dim must be 1 or 2, got {dim}")));
        }
        if boxes.len() != dim {
            return Err(Error::InvalidParam(format!(
                "expected {dim} box intervals, got {}",
                boxes.len()
            )));
        }
        if res < 2 || !res.is_power_of_two() {
            return Err(Error::InvalidParam(format!(
                "resolution must be a power of two >= 2, got {res}"
            )));
        }
        let mut lo = [0.0; 2];
        let mut hi = [0.0; 2];
        for (k, b) in boxes.iter().enumerate() {
            if !(b[1] > b[0]) || !b[0].is_finite() || !b[1].is_finite() {
                return Err(Error::InvalidParam(format!(
                    "degenerate box interval [{}, {}] on axis {k}",
                    b[0], b[1]
                )));
            }
            lo[k] = b[0];
            hi[k] = b[1];
        }
        Ok(Grid { dim, lo, hi, res })
    }

    /// Convenience 1-D constructor.
    pub fn line(a: f64, b: f64, res: usize) -> Result<Self> {
        Grid::new(1, &[[a, b]], res)
    }

    /// Convenience 2-D constructor with the same interval on both axes.
    pub fn square(a: f64, b: f64, res: usize) -> Result<Self> {
        Grid::new(2, &[[a, b], [a, b]], res)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.res
    }

    pub fn node_count(&self) -> usize {
        self.res.pow(self.dim as u32)
    }

    pub fn lo(&self, axis: usize) -> f64 {
        self.lo[axis]
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.hi[axis]
    }

    /// Cell width along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.res as f64
    }

    /// Smallest cell width over the axes.
    pub fn min_spacing(&self) -> f64 {
        (0..self.dim).map(|k| self.spacing(k)).fold(f64::INFINITY, f64::min)
    }

    /// Midpoint-rule weight of one cell.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|k| self.spacing(k)).product()
    }

    /// Coordinate of node `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.lo[axis] + (i as f64 + 0.5) * self.spacing(axis)
    }

    /// Full coordinates of the flat node index (row-major, axis 1 fastest).
    pub fn node(&self, idx: usize) -> [f64; 2] {
        match self.dim {
            1 => [self.coord(0, idx), 0.0],
            _ => [self.coord(0, idx / self.res), self.coord(1, idx % self.res)],
        }
    }

    /// Flat index from per-axis indices.
    pub fn index(&self, i0: usize, i1: usize) -> usize {
        debug_assert!(i0 < self.res && (self.dim == 1 || i1 < self.res));
        match self.dim {
            1 => i0,
            _ => i0 * self.res + i1,
        }
    }

    /// Index range of nodes whose coordinate on `axis` lies in `[a, b]`
    /// (closed, so exact ties are kept), clamped to the grid.
    fn axis_span(&self, axis: usize, a: f64, b: f64) -> std::ops::Range<usize> {
        let h = self.spacing(axis);
        let fi = ((a - self.lo[axis]) / h - 0.5).ceil().max(0.0);
        let li = ((b - self.lo[axis]) / h - 0.5).floor();
        if li < 0.0 || fi > li || fi >= self.res as f64 {
            return 0..0;
        }
        let first = fi as usize;
        let last = (li as usize).min(self.res - 1);
        first..last + 1
    }

    /// Flat indices of the nodes inside `ball` (center-of-cell test, ties in).
    pub fn nodes_in_ball(&self, ball: &Ball) -> Vec<usize> {
        let mut out = Vec::new();
        let r = ball.radius;
        match self.dim {
            1 => {
                let c = ball.center[0];
                for i in self.axis_span(0, c - r, c + r) {
                    if (self.coord(0, i) - c).abs() <= r {
                        out.push(i);
                    }
                }
            }
            _ => {
                let c0 = ball.center[0];
                let c1 = ball.center[1];
                for i0 in self.axis_span(0, c0 - r, c0 + r) {
                    let d0 = self.coord(0, i0) - c0;
                    let rem = r * r - d0 * d0;
                    if rem < 0.0 {
                        continue;
                    }
                    let w = rem.sqrt();
                    for i1 in self.axis_span(1, c1 - w, c1 + w) {
                        let d1 = self.coord(1, i1) - c1;
                        if d0 * d0 + d1 * d1 <= r * r {
                            out.push(self.index(i0, i1));
                        }
                    }
                }
            }
        }
        out
    }

    /// Grid measure of the ball: node count times cell volume.
    pub fn ball_measure(&self, ball: &Ball) -> f64 {
        self.nodes_in_ball(ball).len() as f64 * self.cell_volume()
    }

    /// Squared Euclidean distance from node `idx` to `p`.
    pub fn dist2(&self, idx: usize, p: &[f64; 2]) -> f64 {
        let x = self.node(idx);
        let mut d = 0.0;
        for k in 0..self.dim {
            d += (x[k] - p[k]) * (x[k] - p[k]);
        }
        d
    }
}

/// Open ball `B(center, radius)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Ball {
    pub fn new(center: [f64; 2], radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParam(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn new_1d(center: f64, radius: f64) -> Result<Self> {
        Ball::new([center, 0.0], radius)
    }

    /// Same center, radius scaled by `factor`.
    pub fn dilate(&self, factor: f64) -> Ball {
        Ball { center: self.center, radius: self.radius * factor }
    }
}

/// Finite list of balls standing in for "sup over all balls".
#[derive(Clone, Debug)]
pub struct BallFamily {
    pub balls: Vec<Ball>,
}

impl BallFamily {
    pub fn new(balls: Vec<Ball>) -> Result<Self> {
        if balls.is_empty() {
            return Err(Error::InvalidParam("ball family must be nonempty".into()));
        }
        Ok(BallFamily { balls })
    }

    /// Centers on an edge-aligned sub-grid (`stride` cells apart, so the box
    /// midpoint is included for symmetric boxes), radii geometric between
    /// `r_min` and `r_max` with the given `ratio`. Balls are kept only if at
    /// least one node falls inside.
    pub fn strided(grid: &Grid, stride: usize, r_min: f64, r_max: f64, ratio: f64) -> Result<Self> {
        if stride == 0 || !(ratio > 1.0) || !(r_min > 0.0) || r_max < r_min {
            return Err(Error::InvalidParam("invalid ball family parameters".into()));
        }
        let mut radii = Vec::new();
        let mut r = r_min;
        while r <= r_max * (1.0 + 1e-12) {
            radii.push(r);
            r *= ratio;
        }
        let mut balls = Vec::new();
        let steps = grid.resolution() / stride;
        match grid.dim() {
            1 => {
                for i in 0..=steps {
                    let c = grid.lo(0) + (i * stride) as f64 * grid.spacing(0);
                    for &r in &radii {
                        let b = Ball::new_1d(c, r)?;
                        if !grid.nodes_in_ball(&b).is_empty() {
                            balls.push(b);
                        }
                    }
                }
            }
            _ => {
                for i0 in 0..=steps {
                    for i1 in 0..=steps {
                        let c = [
                            grid.lo(0) + (i0 * stride) as f64 * grid.spacing(0),
                            grid.lo(1) + (i1 * stride) as f64 * grid.spacing(1),
                        ];
                        for &r in &radii {
                            let b = Ball::new(c, r)?;
                            if !grid.nodes_in_ball(&b).is_empty() {
                                balls.push(b);
                            }
                        }
                    }
                }
            }
        }
        BallFamily::new(balls)
    }

    /// FNV-1a hash over the family geometry, for report provenance.
    pub fn geometry_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |v: f64| {
            for b in v.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        for b in &self.balls {
            eat(b.center[0]);
            eat(b.center[1]);
            eat(b.radius);
        }
        h
    }
}

/// Real-valued samples on every node of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.node_count() {
            return Err(Error::InvalidParam(format!(
                "expected {} samples, got {}",
                grid.node_count(),
                samples.len()
            )));
        }
        for (i, &v) in samples.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteSamples { index: i, value: v });
            }
        }
        Ok(GridFunction { grid, samples })
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction { grid, samples: vec![0.0; grid.node_count()] }
    }

    /// Sample a closed-form function at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64; 2]) -> f64) -> Result<Self> {
        let samples = (0..grid.node_count()).map(|i| f(&grid.node(i))).collect();
        GridFunction::new(grid, samples)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.samples[idx]
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            samples: self.samples.iter().map(|v| c * v).collect(),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &GridFunction) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + c * b)
            .collect();
        Ok(GridFunction { grid: self.grid, samples })
    }

    pub fn abs(&self) -> GridFunction {
        GridFunction {
            grid: self.grid,
            samples: self.samples.iter().map(|v| v.abs()).collect(),
        }
    }

    /// Indices of nodes carrying nonzero samples.
    pub fn support(&self) -> Vec<usize> {
        self.samples
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Checks that the support keeps `SUPPORT_MARGIN` of the box free per
    /// axis. Returns the offending node count as `NonCompactSupport`.
    pub fn check_support_margin(&self) -> Result<()> {
        let g = &self.grid;
        let mut bad = 0usize;
        for (i, &v) in self.samples.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let x = g.node(i);
            for k in 0..g.dim() {
                let m = SUPPORT_MARGIN * (g.hi(k) - g.lo(k));
                if x[k] < g.lo(k) + m || x[k] > g.hi(k) - m {
                    bad += 1;
                    break;
                }
            }
        }
        if bad > 0 {
            return Err(Error::NonCompactSupport(bad));
        }
        Ok(())
    }
}

/// Integration region for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    WholeBox,
    Ball(&'a Ball),
}

/// Midpoint-rule integral of `f` over the region. A ball region that captures
/// no node is rejected as an empty region.
pub fn integrate(f: &GridFunction, region: Region<'_>) -> Result<f64> {
    let w = f.grid().cell_volume();
    match region {
        Region::WholeBox => Ok(f.samples().iter().sum::<f64>() * w),
        Region::Ball(ball) => {
            let nodes = f.grid().nodes_in_ball(ball);
            if nodes.is_empty() {
                return Err(Error::EmptyRegion);
            }
            Ok(nodes.iter().map(|&i| f.value(i)).sum::<f64>() * w)
        }
    }
}

/// `integral of f(x) x^alpha dx` over the whole box; `alpha` has one entry
/// per axis.
pub fn moment(f: &GridFunction, alpha: &[usize]) -> Result<f64> {
    let g = f.grid();
    if alpha.len() != g.dim() {
        return Err(Error::InvalidParam(format!(
            "multi-index has {} entries for a {}-D grid",
            alpha.len(),
            g.dim()
        )));
    }
    let order: usize = alpha.iter().sum();
    if order > MAX_MOMENT_ORDER {
        return Err(Error::InvalidParam(format!(
            "moment order {order} above the configured maximum {MAX_MOMENT_ORDER}"
        )));
    }
    let w = g.cell_volume();
    let mut acc = 0.0;
    for i in 0..g.node_count() {
        let x = g.node(i);
        let mut m = f.value(i);
        for k in 0..g.dim() {
            m *= x[k].powi(alpha[k] as i32);
        }
        acc += m;
    }
    Ok(acc * w)
}

/// All multi-indices with `|alpha| <= s` for the grid dimension, in
/// lexicographic order by total degree.
pub fn multi_indices(dim: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for total in 0..=s {
        match dim {
            1 => out.push(vec![total]),
            _ => {
                for a0 in (0..=total).rev() {
                    out.push(vec![a0, total - a0]);
                }
            }
        }
    }
    out
}

/// Discrete convolution of `f` with the unit-mass smooth bump at scale `t`.
///
/// The kernel is the standard `exp(-1/(1-|x|^2))` bump dilated to support
/// `|x| < t` and normalized to unit mass on the grid, so constants are fixed
/// exactly and the integral of `f` is preserved up to rounding.
pub fn mollify(f: &GridFunction, t: f64) -> Result<GridFunction> {
    let g = f.grid();
    let cell = g.min_spacing();
    if !(t >= cell) {
        return Err(Error::ScaleBelowResolution { t, cell });
    }
    let kernel = bump_kernel(g, t);
    let out = conv::convolve(g, f.samples(), &kernel);
    GridFunction::new(*g, out)
}

/// Samples of the normalized bump at scale `t` on grid offsets, as a kernel
/// for [`conv::convolve`]. Weights include the quadrature cell volume and sum
/// to one.
pub(crate) fn bump_kernel(g: &Grid, t: f64) -> conv::Kernel {
    let w = g.cell_volume();
    match g.dim() {
        1 => {
            let h = g.spacing(0);
            let half = ((t / h).ceil() as isize).max(1);
            let mut vals = Vec::with_capacity((2 * half + 1) as usize);
            let mut mass = 0.0;
            for j in -half..=half {
                let v = bump::std_bump(j as f64 * h / t);
                mass += v * w;
                vals.push(v);
            }
            let c = 1.0 / mass;
            for v in &mut vals {
                *v *= c;
            }
            conv::Kernel::new_1d(half, vals)
        }
        _ => {
            let h0 = g.spacing(0);
            let h1 = g.spacing(1);
            let half0 = ((t / h0).ceil() as isize).max(1);
            let half1 = ((t / h1).ceil() as isize).max(1);
            let mut vals = Vec::with_capacity(((2 * half0 + 1) * (2 * half1 + 1)) as usize);
            let mut mass = 0.0;
            for j0 in -half0..=half0 {
                for j1 in -half1..=half1 {
                    let x = j0 as f64 * h0 / t;
                    let y = j1 as f64 * h1 / t;
                    let v = bump::std_bump((x * x + y * y).sqrt());
                    mass += v * w;
                    vals.push(v);
                }
            }
            let c = 1.0 / mass;
            for v in &mut vals {
                *v *= c;
            }
            conv::Kernel::new_2d(half0, half1, vals)
        }
    }
}

/// Reads the CSV function format `x[,y],value` (row-major node order) and
/// validates completeness against `grid`.
pub fn read_csv(grid: &Grid, text: &str) -> Result<GridFunction> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::InvalidParam("empty CSV".into()))?;
    let expect = if grid.dim() == 1 { "x,value" } else { "x,y,value" };
    if header.trim() != expect {
        return Err(Error::InvalidParam(format!(
            "bad CSV header {:?}, expected {:?}",
            header.trim(),
            expect
        )));
    }
    let mut samples = Vec::with_capacity(grid.node_count());
    for (row, line) in lines.enumerate() {
        let cols: Vec<&str> = line.trim().split(',').collect();
        if cols.len() != grid.dim() + 1 {
            return Err(Error::InvalidParam(format!("row {}: wrong column count", row + 2)));
        }
        if row >= grid.node_count() {
            return Err(Error::InvalidParam("more rows than grid nodes".into()));
        }
        let x = grid.node(row);
        for k in 0..grid.dim() {
            let got: f64 = cols[k]
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParam(format!("row {}: bad coordinate", row + 2)))?;
            if (got - x[k]).abs() > 1e-9 * (1.0 + x[k].abs()) {
                return Err(Error::InvalidParam(format!(
                    "row {}: coordinate {got} does not match node {}",
                    row + 2,
                    x[k]
                )));
            }
        }
        let v: f64 = cols[grid.dim()]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParam(format!("row {}: bad value", row + 2)))?;
        samples.push(v);
    }
    if samples.len() != grid.node_count() {
        return Err(Error::InvalidParam(format!(
            "CSV has {} data rows, grid has {} nodes",
            samples.len(),
            grid.node_count()
        )));
    }
    GridFunction::new(*grid, samples)
}

/// Writes the CSV function format accepted by [`read_csv`].
pub fn write_csv(f: &GridFunction) -> String {
    let g = f.grid();
    let mut out = String::new();
    out.push_str(if g.dim() == 1 { "x,value\n" } else { "x,y,value\n" });
    for i in 0..g.node_count() {
        let x = g.node(i);
        if g.dim() == 1 {
            out.push_str(&format!("{},{}\n", x[0], f.value(i)));
        } else {
            out.push_str(&format!("{},{},{}\n", x[0], x[1], f.value(i)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box_grid(res: usize) -> Grid {
        Grid::line(0.0, 1.0, res).unwrap()
    }

    #[test]
    fn constant_one_has_unit_mass() {
        let g = unit_box_grid(256);
        let f = GridFunction::from_fn(g, |_| 1.0).unwrap();
        let m = integrate(&f, Region::WholeBox).unwrap();
        assert!((m - 1.0).abs() < 1e-12, "mass = {m}");
    }

    #[test]
    fn zero_function_integrates_to_zero() {
        let g = unit_box_grid(64);
        let f = GridFunction::zeros(g);
        assert_eq!(integrate(&f, Region::WholeBox).unwrap(), 0.0);
    }

    #[test]
    fn ball_integral_matches_interval_length() {
        // f = 1 on [-2,2]; integral over B(0,1) = 2 up to one cell.
        let g = Grid::line(-2.0, 2.0, 1024).unwrap();
        let f = GridFunction::from_fn(g, |_| 1.0).unwrap();
        let b = Ball::new_1d(0.0, 1.0).unwrap();
        let m = integrate(&f, Region::Ball(&b)).unwrap();
        assert!((m - 2.0).abs() <= g.cell_volume() + 1e-12, "m = {m}");
    }

    #[test]
    fn ball_outside_box_is_empty_region() {
        let g = Grid::line(-2.0, 2.0, 64).unwrap();
        let f = GridFunction::from_fn(g, |_| 1.0).unwrap();
        let b = Ball::new_1d(10.0, 0.5).unwrap();
        assert!(matches!(integrate(&f, Region::Ball(&b)), Err(Error::EmptyRegion)));
    }

    #[test]
    fn moment_oracles() {
        let g = Grid::line(-2.0, 2.0, 4096).unwrap();
        // odd function, alpha = 0 -> 0 by symmetry
        let odd = GridFunction::from_fn(g, |x| x[0].powi(3)).unwrap();
        assert!(moment(&odd, &[0]).unwrap().abs() < 1e-12);
        // chi_[0,1], alpha = 1 -> integral of x over [0,1] = 1/2
        let ind = GridFunction::from_fn(g, |x| if (0.0..=1.0).contains(&x[0]) { 1.0 } else { 0.0 })
            .unwrap();
        let m1 = moment(&ind, &[1]).unwrap();
        assert!((m1 - 0.5).abs() < 1e-3, "m1 = {m1}");
        // chi_[0,1] - chi_[-1,0], alpha = 0 -> cancellation
        let dip = GridFunction::from_fn(g, |x| {
            if x[0] > 0.0 && x[0] <= 1.0 {
                1.0
            } else if x[0] >= -1.0 && x[0] <= 0.0 {
                -1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert!(moment(&dip, &[0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn moment_order_cap() {
        let g = unit_box_grid(8);
        let f = GridFunction::zeros(g);
        assert!(moment(&f, &[MAX_MOMENT_ORDER + 1]).is_err());
    }

    #[test]
    fn mollify_fixes_constants_in_the_interior() {
        let g = Grid::line(-2.0, 2.0, 512).unwrap();
        let f = GridFunction::from_fn(g, |x| if x[0].abs() <= 1.5 { 1.0 } else { 0.0 }).unwrap();
        let t = 16.0 * g.spacing(0);
        let m = mollify(&f, t).unwrap();
        for i in 0..g.node_count() {
            if g.node(i)[0].abs() <= 1.0 {
                assert!((m.value(i) - 1.0).abs() < 1e-12, "node {i}: {}", m.value(i));
            }
        }
    }

    #[test]
    fn mollify_l1_error_decreases_with_scale() {
        let g = Grid::line(-2.0, 2.0, 2048).unwrap();
        let f = GridFunction::from_fn(g, |x| if (0.0..=1.0).contains(&x[0]) { 1.0 } else { 0.0 })
            .unwrap();
        let l1 = |t: f64| {
            let m = mollify(&f, t).unwrap();
            let d = f.axpy(-1.0, &m).unwrap().abs();
            integrate(&d, Region::WholeBox).unwrap()
        };
        let coarse = l1(32.0 * g.spacing(0));
        let fine = l1(16.0 * g.spacing(0));
        assert!(fine < coarse, "fine = {fine}, coarse = {coarse}");
    }

    #[test]
    fn mollify_zero_is_zero() {
        let g = Grid::line(-1.0, 1.0, 128).unwrap();
        let f = GridFunction::zeros(g);
        let m = mollify(&f, 4.0 * g.spacing(0)).unwrap();
        assert_eq!(m.sup_norm(), 0.0);
    }

    #[test]
    fn mollify_rejects_subcell_scale() {
        let g = Grid::line(-1.0, 1.0, 128).unwrap();
        let f = GridFunction::zeros(g);
        assert!(matches!(
            mollify(&f, 0.5 * g.spacing(0)),
            Err(Error::ScaleBelowResolution { .. })
        ));
    }

    #[test]
    fn mollify_preserves_mass_and_commutes_with_cell_shifts() {
        let g = Grid::line(-2.0, 2.0, 1024).unwrap();
        let f = GridFunction::from_fn(g, |x| (-8.0 * x[0] * x[0]).exp()).unwrap();
        let t = 8.0 * g.spacing(0);
        let m = mollify(&f, t).unwrap();
        let mass_f = integrate(&f, Region::WholeBox).unwrap();
        let mass_m = integrate(&m, Region::WholeBox).unwrap();
        assert!((mass_f - mass_m).abs() < 1e-10 * mass_f.abs().max(1.0));

        // shift by 10 whole cells and compare exactly
        let shift = 10usize;
        let mut shifted = vec![0.0; g.node_count()];
        for i in shift..g.node_count() {
            shifted[i] = f.value(i - shift);
        }
        let fs = GridFunction::new(g, shifted).unwrap();
        let ms = mollify(&fs, t).unwrap();
        for i in (shift + 64)..(g.node_count() - 64) {
            assert_eq!(ms.value(i), m.value(i - shift), "node {i}");
        }
    }

    #[test]
    fn nodes_in_ball_2d_matches_direct_scan() {
        let g = Grid::square(-1.0, 1.0, 64).unwrap();
        let b = Ball::new([0.3, -0.2], 0.45).unwrap();
        let listed = g.nodes_in_ball(&b);
        let direct: Vec<usize> =
            (0..g.node_count()).filter(|&i| g.dist2(i, &b.center) <= b.radius * b.radius).collect();
        assert_eq!(listed, direct);
    }

    #[test]
    fn integrate_is_linear() {
        let g = Grid::line(-1.0, 1.0, 256).unwrap();
        let f = GridFunction::from_fn(g, |x| x[0].sin()).unwrap();
        let h = GridFunction::from_fn(g, |x| x[0] * x[0]).unwrap();
        let combo = f.scaled(2.5).axpy(-1.25, &h).unwrap();
        let lhs = integrate(&combo, Region::WholeBox).unwrap();
        let rhs = 2.5 * integrate(&f, Region::WholeBox).unwrap()
            - 1.25 * integrate(&h, Region::WholeBox).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn disjoint_balls_add_up() {
        let g = Grid::line(-2.0, 2.0, 2048).unwrap();
        let f = GridFunction::from_fn(g, |x| 1.0 + x[0] * x[0]).unwrap();
        let b1 = Ball::new_1d(-1.0, 0.4).unwrap();
        let b2 = Ball::new_1d(1.0, 0.4).unwrap();
        let merged: f64 = integrate(&f, Region::Ball(&b1)).unwrap()
            + integrate(&f, Region::Ball(&b2)).unwrap();
        // compare against a direct scan over the union
        let nodes1 = g.nodes_in_ball(&b1);
        let nodes2 = g.nodes_in_ball(&b2);
        let direct: f64 = nodes1.iter().chain(nodes2.iter()).map(|&i| f.value(i)).sum::<f64>()
            * g.cell_volume();
        assert!((merged - direct).abs() < 1e-12);
    }

    #[test]
    fn margin_check_flags_edge_support() {
        let g = Grid::line(-2.0, 2.0, 128).unwrap();
        let inside = GridFunction::from_fn(g, |x| if x[0].abs() < 1.0 { 1.0 } else { 0.0 }).unwrap();
        assert!(inside.check_support_margin().is_ok());
        let edge = GridFunction::from_fn(g, |x| if x[0] > 1.9 { 1.0 } else { 0.0 }).unwrap();
        assert!(matches!(edge.check_support_margin(), Err(Error::NonCompactSupport(_))));
    }

    #[test]
    fn csv_roundtrip_and_validation() {
        let g = Grid::line(-1.0, 1.0, 16).unwrap();
        let f = GridFunction::from_fn(g, |x| x[0].cos()).unwrap();
        let text = write_csv(&f);
        let back = read_csv(&g, &text).unwrap();
        assert_eq!(f, back);

        assert!(read_csv(&g, "bogus\n").is_err());
        let truncated: String = text.lines().take(5).collect::<Vec<_>>().join("\n");
        assert!(read_csv(&g, &truncated).is_err());
    }
}
