//! Grids, sampled space-time fields, finite-difference derivatives,
//! quadrature, and PDE residual evaluators.
//!
//! Everything here is uniform-grid only. Derivatives are 4th-order central
//! stencils in the interior with one-sided 4th-order stencils at the two
//! boundary nodes on each side; weights come from Fornberg's recursion, so
//! the same code path serves orders 1 through 4 in both x and t.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so callers may evaluate operations on disjoint fields in
//! parallel without coordination.

use crate::error::{Error, Result};
use std::path::Path;

/// Tolerance for deciding that a coordinate coincides with a grid node.
const NODE_SNAP_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// axes and grids
// ---------------------------------------------------------------------------

/// Uniform spatial axis. If 0 lies inside the range the constructor shifts
/// the axis so that x = 0 is a node; primitives are normalized there.
#[derive(Debug, Clone, PartialEq)]
pub struct XAxis {
    x_min: f64,
    h: f64,
    nx: usize,
    zero_index: Option<usize>,
}

impl XAxis {
    pub fn new(x_min: f64, x_max: f64, nx: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if nx < 16 {
            return Err(Error::InvalidGrid(format!("need nx >= 16, got {nx}")));
        }
        let h = (x_max - x_min) / (nx - 1) as f64;
        let mut x0 = x_min;
        let mut zero_index = None;
        if x_min <= 0.0 && 0.0 <= x_max {
            // Snap so that 0 is exactly a node.
            let j = (-x_min / h).round();
            x0 = -j * h;
            zero_index = Some(j as usize);
        }
        Ok(XAxis {
            x_min: x0,
            h,
            nx,
            zero_index,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.h * (self.nx - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.h * i as f64
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nx).map(move |i| self.x(i))
    }

    /// Index of the node at x = 0, when the axis contains one.
    pub fn zero_index(&self) -> Option<usize> {
        self.zero_index
    }

    /// Fractional index of a coordinate (0 at x_min, nx-1 at x_max).
    pub fn frac_index(&self, x: f64) -> f64 {
        (x - self.x_min) / self.h
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min - NODE_SNAP_TOL && x <= self.x_max() + NODE_SNAP_TOL
    }

    /// True when this axis covers `[other.x_min, other.x_max]`.
    pub fn covers(&self, other: &XAxis) -> bool {
        self.x_min <= other.x_min() + NODE_SNAP_TOL && self.x_max() >= other.x_max() - NODE_SNAP_TOL
    }

    /// Extend by whole nodes (preserving spacing and alignment) so that at
    /// least `pad` of extra width exists on each side.
    pub fn padded(&self, pad: f64) -> XAxis {
        self.padded_nodes((pad.max(0.0) / self.h).ceil() as usize)
    }

    /// Extend by exactly `extra` nodes on each side.
    pub fn padded_nodes(&self, extra: usize) -> XAxis {
        XAxis {
            x_min: self.x_min - extra as f64 * self.h,
            h: self.h,
            nx: self.nx + 2 * extra,
            zero_index: self.zero_index.map(|j| j + extra),
        }
    }
}

/// Space-time grid: a spatial axis plus uniformly spaced time levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    x: XAxis,
    t0: f64,
    dt: f64,
    nt: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, nx: usize, t0: f64, t_max: f64, nt: usize) -> Result<Self> {
        let x = XAxis::new(x_min, x_max, nx)?;
        if nt < 2 {
            return Err(Error::InvalidGrid(format!("need nt >= 2, got {nt}")));
        }
        if !(t0 < t_max) || !t0.is_finite() || !t_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need t0 < t_max, got [{t0}, {t_max}]"
            )));
        }
        let dt = (t_max - t0) / (nt - 1) as f64;
        Ok(Grid { x, t0, dt, nt })
    }

    /// Attach time levels to an existing axis verbatim (no re-snapping).
    pub fn from_axis(x: XAxis, t0: f64, t_max: f64, nt: usize) -> Result<Self> {
        if nt < 2 {
            return Err(Error::InvalidGrid(format!("need nt >= 2, got {nt}")));
        }
        if !(t0 < t_max) || !t0.is_finite() || !t_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need t0 < t_max, got [{t0}, {t_max}]"
            )));
        }
        let dt = (t_max - t0) / (nt - 1) as f64;
        Ok(Grid { x, t0, dt, nt })
    }

    pub fn x_axis(&self) -> &XAxis {
        &self.x
    }

    pub fn nx(&self) -> usize {
        self.x.nx
    }

    pub fn h(&self) -> f64 {
        self.x.h
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_max(&self) -> f64 {
        self.t0 + self.dt * (self.nt - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x.x(j)
    }

    /// Index of the time level matching `t`, if one does within 1e-9.
    pub fn time_index(&self, t: f64) -> Option<usize> {
        let f = (t - self.t0) / self.dt;
        let i = f.round();
        if i >= 0.0 && (i as usize) < self.nt && (f - i).abs() * self.dt <= 1e-9 {
            Some(i as usize)
        } else {
            None
        }
    }
}

// ---------------------------------------------------------------------------
// slices and fields
// ---------------------------------------------------------------------------

/// Real values sampled on a spatial axis (one time level).
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    axis: XAxis,
    values: Vec<f64>,
}

impl Slice {
    pub fn new(axis: XAxis, values: Vec<f64>) -> Result<Self> {
        if values.len() != axis.nx() {
            return Err(Error::ShapeMismatch(format!(
                "slice has {} values on an axis of {} nodes",
                values.len(),
                axis.nx()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("slice value at x = {}", axis.x(j)),
            });
        }
        Ok(Slice { axis, values })
    }

    pub fn from_fn(axis: &XAxis, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = axis.xs().map(f).collect();
        Slice::new(axis.clone(), values)
    }

    pub fn zeros(axis: &XAxis) -> Self {
        Slice {
            axis: axis.clone(),
            values: vec![0.0; axis.nx()],
        }
    }

    pub fn axis(&self) -> &XAxis {
        &self.axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Slice> {
        Slice::new(self.axis.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// 8-point Lagrange interpolation at an off-node coordinate, exact at
    /// the nodes. The high order keeps the knot-level roughness of the
    /// interpolant far below the finite-difference truncation floor, so
    /// residual evaluators applied to interpolated data are not polluted.
    /// Errors when `x` is outside the axis.
    pub fn interp(&self, x: f64) -> Result<f64> {
        if !self.axis.contains(x) {
            return Err(Error::DomainEscape { t_exit: f64::NAN, x_exit: x });
        }
        let f = self.axis.frac_index(x);
        let r = f.round();
        if (f - r).abs() < 1e-9 && r >= 0.0 && (r as usize) < self.values.len() {
            return Ok(self.values[r as usize]);
        }
        Ok(lagrange_interp(&self.values, f, 8))
    }
}

/// Real values on a rectangular (t, x) grid, row-major over time levels.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<f64>, // [time][space], row-major
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nx() * grid.nt() {
            return Err(Error::ShapeMismatch(format!(
                "field has {} values for a {}x{} grid",
                values.len(),
                grid.nt(),
                grid.nx()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!(
                    "field value at (t = {}, x = {})",
                    grid.t(k / grid.nx()),
                    grid.x(k % grid.nx())
                ),
            });
        }
        Ok(SampledField { grid, values })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.nx() * grid.nt());
        for i in 0..grid.nt() {
            let t = grid.t(i);
            for j in 0..grid.nx() {
                values.push(f(t, grid.x(j)));
            }
        }
        SampledField::new(grid.clone(), values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn level(&self, i: usize) -> &[f64] {
        let nx = self.grid.nx();
        &self.values[i * nx..(i + 1) * nx]
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.nx() + j]
    }

    pub fn slice(&self, i: usize) -> Slice {
        Slice {
            axis: self.grid.x_axis().clone(),
            values: self.level(i).to_vec(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<SampledField> {
        SampledField::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Map each time level through `f` (level index, level values) -> new values.
    pub fn map_levels(&self, mut f: impl FnMut(usize, &[f64]) -> Vec<f64>) -> Result<SampledField> {
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.grid.nt() {
            let row = f(i, self.level(i));
            if row.len() != self.grid.nx() {
                return Err(Error::ShapeMismatch("level map changed row length".into()));
            }
            values.extend_from_slice(&row);
        }
        SampledField::new(self.grid.clone(), values)
    }
}

// ---------------------------------------------------------------------------
// Fornberg finite-difference weights
// ---------------------------------------------------------------------------

/// Finite-difference weights for the m-th derivative at `z` on arbitrary
/// nodes (Fornberg's recursion). `weights[k][j]` gives the j-th node's weight
/// for the k-th derivative, k = 0..=m.
pub fn fd_weights(z: f64, nodes: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Precomputed 4th-order stencils for the m-th derivative on `n` uniform
/// nodes: one row per output node, each row a (start, weights) pair.
struct StencilSet {
    rows: Vec<(usize, Vec<f64>)>,
    scale: f64, // 1/h^m
}

fn build_stencils(n: usize, h: f64, m: usize) -> Result<StencilSet> {
    // 4th-order accuracy: m+4 nodes one-sided; symmetric central stencils of
    // width 5 (m <= 2) or 7 (m = 3, 4) in the interior.
    let width = m + 4;
    let central = if m <= 2 { 5 } else { 7 };
    let needed = width.max(central);
    if n < needed {
        return Err(Error::StencilTooSmall { needed, have: n });
    }
    let half = central / 2;
    let unit: Vec<f64> = (0..width).map(|i| i as f64).collect();
    let cunit: Vec<f64> = (0..central).map(|i| i as f64).collect();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let (start, nodes, z) = if i < half {
            (0usize, &unit[..], i as f64)
        } else if i + half >= n {
            (n - width, &unit[..], (i - (n - width)) as f64)
        } else {
            (i - half, &cunit[..], half as f64)
        };
        let w = fd_weights(z, nodes, m).pop().expect("m-th derivative row");
        rows.push((start, w));
    }
    Ok(StencilSet {
        rows,
        scale: h.powi(-(m as i32)),
    })
}

fn apply_stencils(s: &StencilSet, values: &[f64]) -> Vec<f64> {
    s.rows
        .iter()
        .map(|(start, w)| {
            let mut acc = 0.0;
            for (k, wk) in w.iter().enumerate() {
                acc += wk * values[start + k];
            }
            acc * s.scale
        })
        .collect()
}

/// m-th x-derivative of a slice, 4th-order accurate, one-sided at the edges.
pub fn deriv_x_slice(s: &Slice, order: usize) -> Result<Slice> {
    check_order(order)?;
    let set = build_stencils(s.len(), s.axis().h(), order)?;
    Slice::new(s.axis().clone(), apply_stencils(&set, s.values()))
}

/// m-th x-derivative of every time level of a field.
pub fn deriv_x(f: &SampledField, order: usize) -> Result<SampledField> {
    check_order(order)?;
    let set = build_stencils(f.grid().nx(), f.grid().h(), order)?;
    f.map_levels(|_, row| apply_stencils(&set, row))
}

/// m-th t-derivative of a field, node by node in x, same stencil family.
pub fn deriv_t(f: &SampledField, order: usize) -> Result<SampledField> {
    check_order(order)?;
    let nt = f.grid().nt();
    let nx = f.grid().nx();
    let set = build_stencils(nt, f.grid().dt(), order)?;
    let mut values = vec![0.0; nt * nx];
    let mut column = vec![0.0; nt];
    for j in 0..nx {
        for i in 0..nt {
            column[i] = f.at(i, j);
        }
        let d = apply_stencils(&set, &column);
        for i in 0..nt {
            values[i * nx + j] = d[i];
        }
    }
    SampledField::new(f.grid().clone(), values)
}

fn check_order(order: usize) -> Result<()> {
    if !(1..=4).contains(&order) {
        return Err(Error::InvalidGrid(format!(
            "derivative order must be 1..=4, got {order}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

/// Per-interval integrals of the cubic interpolant: 4th-order accurate and
/// exact on cubics (composite Simpson-class rule on the stencil nodes).
fn interval_integrals(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 4, "quadrature needs at least 4 nodes");
    let mut out = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        let v = if j == 0 {
            h / 24.0 * (9.0 * values[0] + 19.0 * values[1] - 5.0 * values[2] + values[3])
        } else if j == n - 2 {
            h / 24.0 * (values[n - 4] - 5.0 * values[n - 3] + 19.0 * values[n - 2] + 9.0 * values[n - 1])
        } else {
            h / 24.0 * (-values[j - 1] + 13.0 * values[j] + 13.0 * values[j + 1] - values[j + 2])
        };
        out.push(v);
    }
    out
}

/// Cumulative primitive with F = 0 at `base_index`.
pub fn cumulative_integral(values: &[f64], h: f64, base_index: usize) -> Vec<f64> {
    let iv = interval_integrals(values, h);
    let n = values.len();
    let mut out = vec![0.0; n];
    for j in base_index + 1..n {
        out[j] = out[j - 1] + iv[j - 1];
    }
    for j in (0..base_index).rev() {
        out[j] = out[j + 1] - iv[j];
    }
    out
}

/// Cumulative primitive of a slice normalized at the x = 0 node.
pub fn integrate_x(s: &Slice) -> Result<Slice> {
    let base = s.axis().zero_index().ok_or(Error::NoZeroNode)?;
    Slice::new(s.axis().clone(), cumulative_integral(s.values(), s.axis().h(), base))
}

/// Definite integral over the whole axis.
pub fn integral(s: &Slice) -> f64 {
    interval_integrals(s.values(), s.axis().h()).iter().sum()
}

/// L2 norm over the axis.
pub fn l2_norm(s: &Slice) -> f64 {
    let sq: Vec<f64> = s.values().iter().map(|v| v * v).collect();
    interval_integrals(&sq, s.axis().h()).iter().sum::<f64>().max(0.0).sqrt()
}

/// Cubic Lagrange interpolation on uniformly indexed data at fractional
/// index `f` (clamped stencil near the edges).
pub fn cubic_interp(values: &[f64], f: f64) -> f64 {
    let n = values.len();
    debug_assert!(n >= 4);
    let mut j = f.floor() as isize - 1;
    j = j.clamp(0, n as isize - 4);
    let j = j as usize;
    let s = f - j as f64; // local coordinate in [~1, ~2]
    let (v0, v1, v2, v3) = (values[j], values[j + 1], values[j + 2], values[j + 3]);
    let w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
    let w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
    let w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
    let w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
    w0 * v0 + w1 * v1 + w2 * v2 + w3 * v3
}

/// Sliding-window Lagrange interpolation of the given width on uniformly
/// indexed data at fractional index `f` (window clamped near the edges).
pub fn lagrange_interp(values: &[f64], f: f64, width: usize) -> f64 {
    let n = values.len();
    let w = width.min(n);
    debug_assert!(w >= 2);
    let half = (w - 1) as isize / 2;
    let mut j = f.floor() as isize - half;
    j = j.clamp(0, n as isize - w as isize);
    let j = j as usize;
    let s = f - j as f64;
    let mut acc = 0.0;
    for k in 0..w {
        let mut wk = 1.0;
        for m in 0..w {
            if m != k {
                wk *= (s - m as f64) / (k as f64 - m as f64);
            }
        }
        acc += wk * values[j + k];
    }
    acc
}

// ---------------------------------------------------------------------------
// PDE residuals
// ---------------------------------------------------------------------------

/// Width of the boundary band excluded from interior residual maxima:
/// 2 nodes per side in x, 2 levels per end in t.
pub const RESIDUAL_BAND: usize = 2;

/// Pointwise residual field plus interior/boundary maxima. One-sided
/// stencils have larger constants, so the two-node bands are reported
/// separately and excluded from the interior maximum.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub field: SampledField,
    pub interior_max: f64,
    pub boundary_max: f64,
}

fn residual_report(field: SampledField) -> ResidualReport {
    let nt = field.grid().nt();
    let nx = field.grid().nx();
    let b = RESIDUAL_BAND;
    let mut interior_max: f64 = 0.0;
    let mut boundary_max: f64 = 0.0;
    for i in 0..nt {
        for j in 0..nx {
            let v = field.at(i, j).abs();
            if i >= b && i < nt - b && j >= b && j < nx - b {
                interior_max = interior_max.max(v);
            } else {
                boundary_max = boundary_max.max(v);
            }
        }
    }
    ResidualReport {
        field,
        interior_max,
        boundary_max,
    }
}

/// Pointwise q_t - 6 q q_x + q_xxx via finite differences.
pub fn kdv_residual(q: &SampledField) -> Result<ResidualReport> {
    if q.grid().nt() < 5 {
        return Err(Error::StencilTooSmall { needed: 5, have: q.grid().nt() });
    }
    let qt = deriv_t(q, 1)?;
    let qx = deriv_x(q, 1)?;
    let qxxx = deriv_x(q, 3)?;
    let values: Vec<f64> = (0..q.values().len())
        .map(|k| qt.values()[k] - 6.0 * q.values()[k] * qx.values()[k] + qxxx.values()[k])
        .collect();
    Ok(residual_report(SampledField::new(q.grid().clone(), values)?))
}

/// Pointwise r_t - 6 r^2 r_x + r_xxx via finite differences.
pub fn mkdv_residual(r: &SampledField) -> Result<ResidualReport> {
    if r.grid().nt() < 5 {
        return Err(Error::StencilTooSmall { needed: 5, have: r.grid().nt() });
    }
    let rt = deriv_t(r, 1)?;
    let rx = deriv_x(r, 1)?;
    let rxxx = deriv_x(r, 3)?;
    let values: Vec<f64> = (0..r.values().len())
        .map(|k| {
            rt.values()[k] - 6.0 * r.values()[k] * r.values()[k] * rx.values()[k] + rxxx.values()[k]
        })
        .collect();
    Ok(residual_report(SampledField::new(r.grid().clone(), values)?))
}

// ---------------------------------------------------------------------------
// CSV export (C-style %.17g formatting)
// ---------------------------------------------------------------------------

/// Format like C's `%.17g`: 17 significant digits, trailing zeros trimmed,
/// scientific notation outside the usual %g exponent range.
pub fn format_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v < 0.0 { "-inf".into() } else { "inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let s = format!("{:.16e}", v); // d.dddddddddddddddde<exp>, 17 significant digits
    let (mant, exp) = s.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if neg { "-" } else { "" };
    if !(-4..17).contains(&exp) {
        let head = &digits[..1];
        let tail = &digits[1..];
        let e_sign = if exp < 0 { '-' } else { '+' };
        let frac = if tail.is_empty() {
            String::new()
        } else {
            format!(".{tail}")
        };
        format!("{sign}{head}{frac}e{e_sign}{:02}", exp.abs())
    } else if exp >= 0 {
        let e = exp as usize;
        if digits.len() > e + 1 {
            format!("{sign}{}.{}", &digits[..=e], &digits[e + 1..])
        } else {
            format!("{sign}{}{}", digits, "0".repeat(e + 1 - digits.len()))
        }
    } else {
        format!("{sign}0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    }
}

/// Write a field as CSV `t,x,value`, row-major over (t, x).
pub fn write_field_csv(f: &SampledField, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(f.values().len() * 24);
    out.push_str("t,x,value\n");
    for i in 0..f.grid().nt() {
        let t = format_g17(f.grid().t(i));
        for j in 0..f.grid().nx() {
            out.push_str(&t);
            out.push(',');
            out.push_str(&format_g17(f.grid().x(j)));
            out.push(',');
            out.push_str(&format_g17(f.at(i, j)));
            out.push('\n');
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Write a slice as CSV `x,value`.
pub fn write_slice_csv(s: &Slice, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(s.len() * 16);
    out.push_str("x,value\n");
    for (j, v) in s.values().iter().enumerate() {
        out.push_str(&format_g17(s.axis().x(j)));
        out.push(',');
        out.push_str(&format_g17(*v));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a slice from CSV `x,value` (header required). The axis is inferred
/// from the x column, which must be uniform.
pub fn read_slice_csv(path: &Path) -> Result<Slice> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (ln == 0 && line.starts_with(|c: char| c.is_alphabetic())) {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(x), Some(v)) = (parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("{}:{}: expected x,value", path.display(), ln + 1)));
        };
        xs.push(x.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), ln + 1)))?);
        vs.push(v.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), ln + 1)))?);
    }
    if xs.len() < 16 {
        return Err(Error::Parse(format!("{}: need at least 16 rows", path.display())));
    }
    let h = xs[1] - xs[0];
    for w in xs.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0) {
            return Err(Error::Parse(format!("{}: x column is not uniform", path.display())));
        }
    }
    let axis = XAxis::new(xs[0], *xs.last().unwrap(), xs.len())?;
    Slice::new(axis, vs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(n: usize) -> XAxis {
        XAxis::new(-5.0, 5.0, n).unwrap()
    }

    #[test]
    fn grid_snaps_zero_to_node() {
        let ax = XAxis::new(-1.003, 1.0, 64).unwrap();
        let j = ax.zero_index().unwrap();
        assert!(ax.x(j).abs() < 1e-12);
        // off-zero windows carry no zero node
        let ax2 = XAxis::new(3.0, 7.0, 32).unwrap();
        assert!(ax2.zero_index().is_none());
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(XAxis::new(1.0, -1.0, 64).is_err());
        assert!(XAxis::new(-1.0, 1.0, 8).is_err());
        assert!(Grid::new(-1.0, 1.0, 64, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn deriv_of_constant_is_zero() {
        let s = Slice::from_fn(&axis(64), |_| 3.25).unwrap();
        let d = deriv_x_slice(&s, 1).unwrap();
        assert!(d.max_abs() < 1e-13);
    }

    #[test]
    fn deriv_exact_on_cubics_interior() {
        // f = x^3 -> f' = 3x^2 exactly at interior nodes (4th-order stencils)
        let ax = axis(64);
        let s = Slice::from_fn(&ax, |x| x * x * x).unwrap();
        let d = deriv_x_slice(&s, 1).unwrap();
        for j in 2..62 {
            let x = ax.x(j);
            assert!(
                (d.values()[j] - 3.0 * x * x).abs() < 1e-10,
                "node {j}: {} vs {}",
                d.values()[j],
                3.0 * x * x
            );
        }
    }

    #[test]
    fn deriv_exact_on_quartics_everywhere() {
        let ax = axis(64);
        let s = Slice::from_fn(&ax, |x| x.powi(4) - 2.0 * x * x + 1.0).unwrap();
        let d = deriv_x_slice(&s, 1).unwrap();
        for j in 0..64 {
            let x = ax.x(j);
            assert!((d.values()[j] - (4.0 * x.powi(3) - 4.0 * x)).abs() < 1e-9);
        }
    }

    #[test]
    fn deriv_sin_matches_cos_to_1e8() {
        let ax = XAxis::new(-5.0, 5.0, 1001).unwrap(); // h = 0.01
        let s = Slice::from_fn(&ax, f64::sin).unwrap();
        let d = deriv_x_slice(&s, 1).unwrap();
        let err = ax
            .xs()
            .enumerate()
            .map(|(j, x)| (d.values()[j] - x.cos()).abs())
            .fold(0.0f64, f64::max);
        assert!(err <= 1e-8, "max error {err}");
    }

    #[test]
    fn higher_derivatives_converge_at_order_4() {
        // interior nodes only: the stencil family there is homogeneous
        for order in 2..=4usize {
            let err = |n: usize| {
                let ax = XAxis::new(-3.0, 3.0, n).unwrap();
                let s = Slice::from_fn(&ax, f64::sin).unwrap();
                let d = deriv_x_slice(&s, order).unwrap();
                (4..n - 4)
                    .map(|j| {
                        let x = ax.x(j);
                        let exact = match order {
                            2 => -x.sin(),
                            3 => -x.cos(),
                            _ => x.sin(),
                        };
                        (d.values()[j] - exact).abs()
                    })
                    .fold(0.0f64, f64::max)
            };
            // the 4th derivative amplifies roundoff by 1/h^4; stay coarse there
            let (n1, n2) = if order == 4 { (51, 101) } else { (201, 401) };
            let e1 = err(n1);
            let e2 = err(n2);
            let rate = (e1 / e2).log2();
            assert!(rate > 3.5, "order {order}: rate {rate} (e1={e1:.3e}, e2={e2:.3e})");
        }
    }

    #[test]
    fn integrate_zero_and_quadratic() {
        let ax = axis(101);
        let z = integrate_x(&Slice::zeros(&ax)).unwrap();
        assert!(z.max_abs() == 0.0);
        // s = 2x -> x^2 exactly (rule exact on cubics)
        let s = Slice::from_fn(&ax, |x| 2.0 * x).unwrap();
        let f = integrate_x(&s).unwrap();
        for (j, x) in ax.xs().enumerate() {
            assert!((f.values()[j] - x * x).abs() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn integrate_tanh_matches_log_cosh() {
        let ax = XAxis::new(-5.0, 5.0, 1001).unwrap(); // h = 0.01
        let s = Slice::from_fn(&ax, |x| -x.tanh()).unwrap();
        let f = integrate_x(&s).unwrap();
        let err = ax
            .xs()
            .enumerate()
            .map(|(j, x)| (f.values()[j] + x.cosh().ln()).abs())
            .fold(0.0f64, f64::max)
            ;
        assert!(err <= 1e-8, "max error {err}");
    }

    #[test]
    fn integrate_then_deriv_roundtrip() {
        let ax = XAxis::new(-4.0, 4.0, 801).unwrap();
        let s = Slice::from_fn(&ax, |x| (-x * x / 2.0).exp() * (3.0 * x).cos()).unwrap();
        let f = integrate_x(&s).unwrap();
        let d = deriv_x_slice(&f, 1).unwrap();
        let err = (0..ax.nx())
            .map(|j| (d.values()[j] - s.values()[j]).abs())
            .fold(0.0f64, f64::max);
        assert!(err < 2e-7, "roundtrip error {err}");
    }

    #[test]
    fn integrate_requires_zero_node() {
        let ax = XAxis::new(2.0, 6.0, 64).unwrap();
        assert!(matches!(
            integrate_x(&Slice::zeros(&ax)),
            Err(Error::NoZeroNode)
        ));
    }

    #[test]
    fn kdv_residual_zero_and_constant() {
        let grid = Grid::new(-5.0, 5.0, 64, 0.0, 0.1, 6).unwrap();
        let z = SampledField::from_fn(&grid, |_, _| 0.0).unwrap();
        assert!(kdv_residual(&z).unwrap().interior_max == 0.0);
        let c = SampledField::from_fn(&grid, |_, _| 1.7).unwrap();
        assert!(kdv_residual(&c).unwrap().interior_max < 1e-11);
        assert!(mkdv_residual(&c).unwrap().interior_max < 1e-11);
    }

    #[test]
    fn kdv_residual_soliton_small_and_order_4() {
        // q = -2 sech^2(x - 4t), kappa = 1
        let sol = |t: f64, x: f64| {
            let u = x - 4.0 * t;
            -2.0 / u.cosh().powi(2)
        };
        let res = |nx: usize, nt: usize| {
            let grid = Grid::new(-10.0, 10.0, nx, 0.0, 0.1, nt).unwrap();
            let q = SampledField::from_fn(&grid, sol).unwrap();
            kdv_residual(&q).unwrap().interior_max
        };
        let coarse = res(1001, 6); // h = 0.02, dt = 0.02
        let fine = res(2001, 11); // h = dt = 0.01
        assert!(fine <= 1e-4, "residual {fine}");
        let ratio = coarse / fine;
        assert!(ratio > 4.0, "convergence ratio {ratio}");
    }

    #[test]
    fn mkdv_residual_kink() {
        // r = -tanh(x + 2t) solves mKdV
        let grid = Grid::new(-10.0, 10.0, 2001, 0.0, 0.04, 5).unwrap(); // h = dt = 0.01
        let r = SampledField::from_fn(&grid, |t, x| -(x + 2.0 * t).tanh()).unwrap();
        let rep = mkdv_residual(&r).unwrap();
        assert!(rep.interior_max <= 1e-4, "residual {}", rep.interior_max);
    }

    #[test]
    fn g17_formatting_matches_c() {
        assert_eq!(format_g17(0.0), "0");
        assert_eq!(format_g17(0.5), "0.5");
        assert_eq!(format_g17(-1.0), "-1");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1e20), "1e+20");
        assert_eq!(format_g17(1.5e-7), "1.4999999999999999e-07");
        assert_eq!(format_g17(12345.0), "12345");
        assert_eq!(format_g17(f64::NAN), "nan");
    }

    proptest::proptest! {
        #[test]
        fn g17_roundtrips_all_finite_doubles(bits in proptest::num::u64::ANY) {
            let v = f64::from_bits(bits);
            proptest::prop_assume!(v.is_finite());
            // 17 significant digits identify a double uniquely
            let back: f64 = format_g17(v).parse().unwrap();
            proptest::prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn csv_roundtrip() {
        let dir = std::env::temp_dir().join("miura_field_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("slice.csv");
        let ax = axis(32);
        let s = Slice::from_fn(&ax, |x| x.sin()).unwrap();
        write_slice_csv(&s, &path).unwrap();
        let back = read_slice_csv(&path).unwrap();
        assert_eq!(back.len(), s.len());
        for j in 0..s.len() {
            assert_eq!(back.values()[j], s.values()[j]);
        }
    }

    #[test]
    fn interp_is_4th_order() {
        let ax = XAxis::new(-3.0, 3.0, 301).unwrap();
        let s = Slice::from_fn(&ax, |x| (1.3 * x).sin()).unwrap();
        let mut err = 0.0f64;
        let mut x = -2.9; // off-node probes
        while x < 2.9 {
            err = err.max((s.interp(x).unwrap() - (1.3 * x).sin()).abs());
            x += 0.0137;
        }
        assert!(err < 1e-7, "cubic interpolation error {err}");
        assert!(s.interp(4.0).is_err());
    }
}
