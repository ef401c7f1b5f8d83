//! Characteristic-curve solver for the first-order linear PDE
//! `u_t = a(t,x) u_x + b(t,x) u (+ eta)`, with growth-bound diagnostics.
//!
//! The solver traces `dx/dt = -a(t,x)` backward from every output node with
//! classical RK4, so values land exactly on the output grid and no
//! scattered-data interpolation is needed. Path integrals of `b` (or of the
//! inhomogeneity) ride along as an augmented RK4 component, which is the
//! composite Simpson rule on the RK nodes.
//!
//! Traces for distinct output nodes are independent pure computations over
//! read-only coefficient data.

use crate::error::{Error, Result};
use crate::field::{cubic_interp, Grid, SampledField, Slice, XAxis};
use std::path::Path;
use std::sync::Arc;

/// Default cap on the RK substep length, |dt_step| <= 0.001.
pub const DEFAULT_SUBSTEP_CAP: f64 = 1e-3;

/// Step-size policy for characteristic traces.
#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    /// Substep count is chosen as ceil(|t - t'| / substep_cap).
    pub substep_cap: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { substep_cap: DEFAULT_SUBSTEP_CAP }
    }
}

impl TraceOptions {
    pub fn with_cap(substep_cap: f64) -> Self {
        TraceOptions { substep_cap }
    }

    fn steps(&self, span: f64) -> usize {
        ((span.abs() / self.substep_cap).ceil() as usize).max(1)
    }
}

// ---------------------------------------------------------------------------
// coefficient fields
// ---------------------------------------------------------------------------

/// Bicubic (cubic Lagrange in t and in x) interpolant over a sampled field.
#[derive(Debug, Clone)]
pub struct BicubicField {
    field: SampledField,
}

impl BicubicField {
    pub fn new(field: SampledField) -> Result<Self> {
        if field.grid().nt() < 4 {
            return Err(Error::InvalidGrid(
                "bicubic interpolation needs at least 4 time levels".into(),
            ));
        }
        Ok(BicubicField { field })
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let g = self.field.grid();
        let ft = (t - g.t0()) / g.dt();
        let fx = g.x_axis().frac_index(x);
        let nt = g.nt() as isize;
        let mut it = ft.floor() as isize - 1;
        it = it.clamp(0, nt - 4);
        let s = ft - it as f64;
        let mut rows = [0.0; 4];
        for (k, row) in rows.iter_mut().enumerate() {
            *row = cubic_interp(self.field.level((it as usize) + k), fx);
        }
        // cubic Lagrange in the time direction on the 4 interpolated rows
        let w0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
        let w1 = s * (s - 2.0) * (s - 3.0) / 2.0;
        let w2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
        let w3 = s * (s - 1.0) * (s - 2.0) / 6.0;
        w0 * rows[0] + w1 * rows[1] + w2 * rows[2] + w3 * rows[3]
    }

    fn contains(&self, t: f64, x: f64) -> bool {
        let g = self.field.grid();
        let tol = 1e-12 * g.dt().abs().max(1.0);
        t >= g.t0() - tol && t <= g.t_max() + tol && g.x_axis().contains(x)
    }
}

type ClosedFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// One evaluable coefficient of (t, x): a closed form (optionally valid
/// only on a sampled window) or a sampled field with bicubic interpolation.
/// Closed forms are preferred when available.
#[derive(Clone)]
pub enum CoeffField {
    Zero,
    Closed(ClosedFn),
    /// Closed-form evaluator restricted to a grid's domain; used for
    /// pointwise transforms of interpolated fields.
    Windowed { f: ClosedFn, grid: Grid },
    Sampled(Arc<BicubicField>),
}

impl std::fmt::Debug for CoeffField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoeffField::Zero => write!(f, "CoeffField::Zero"),
            CoeffField::Closed(_) => write!(f, "CoeffField::Closed(..)"),
            CoeffField::Windowed { grid, .. } => write!(f, "CoeffField::Windowed({grid:?})"),
            CoeffField::Sampled(b) => write!(f, "CoeffField::Sampled({:?})", b.grid()),
        }
    }
}

fn grid_contains(g: &Grid, t: f64, x: f64) -> bool {
    let tol = 1e-12 * g.dt().abs().max(1.0);
    t >= g.t0() - tol && t <= g.t_max() + tol && g.x_axis().contains(x)
}

impl CoeffField {
    pub fn closed(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        CoeffField::Closed(Arc::new(f))
    }

    pub fn closed_on_domain(grid: Grid, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        CoeffField::Windowed { f: Arc::new(f), grid }
    }

    pub fn constant(c: f64) -> Self {
        if c == 0.0 {
            CoeffField::Zero
        } else {
            CoeffField::closed(move |_, _| c)
        }
    }

    pub fn sampled(field: SampledField) -> Result<Self> {
        Ok(CoeffField::Sampled(Arc::new(BicubicField::new(field)?)))
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            CoeffField::Zero => 0.0,
            CoeffField::Closed(f) => f(t, x),
            CoeffField::Windowed { f, .. } => f(t, x),
            CoeffField::Sampled(b) => b.eval(t, x),
        }
    }

    #[inline]
    fn contains(&self, t: f64, x: f64) -> bool {
        match self {
            CoeffField::Zero | CoeffField::Closed(_) => true,
            CoeffField::Windowed { grid, .. } => grid_contains(grid, t, x),
            CoeffField::Sampled(b) => b.contains(t, x),
        }
    }

    /// Sampled x-window, when there is one.
    pub fn x_window(&self) -> Option<(f64, f64)> {
        match self {
            CoeffField::Sampled(b) => Some((b.grid().x_axis().x_min(), b.grid().x_axis().x_max())),
            CoeffField::Windowed { grid, .. } => {
                Some((grid.x_axis().x_min(), grid.x_axis().x_max()))
            }
            _ => None,
        }
    }
}

/// Joint (a, b) evaluator for the trace hot path; lets catalog potentials
/// serve both coefficients from a single transcendental evaluation.
pub type PairFn = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;

/// Transport (`a`) and zero-order (`b`) coefficients of the PDE.
#[derive(Clone)]
pub struct CoefficientPair {
    pub a: CoeffField,
    pub b: CoeffField,
    fused: Option<PairFn>,
}

impl std::fmt::Debug for CoefficientPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoefficientPair")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("fused", &self.fused.is_some())
            .finish()
    }
}

impl CoefficientPair {
    pub fn new(a: CoeffField, b: CoeffField) -> Self {
        CoefficientPair { a, b, fused: None }
    }

    /// Pair with a fused evaluator that must agree with (a, b) pointwise.
    pub fn with_fused(a: CoeffField, b: CoeffField, fused: PairFn) -> Self {
        CoefficientPair { a, b, fused: Some(fused) }
    }

    /// Constructor with the module's admissibility checks on `a` over the
    /// working window: the sampled linear-growth bound (soft superlinearity
    /// rejection) and, for sampled coefficients, enough domain padding that
    /// no trace from the output window can escape before `t_max`. The
    /// padding requirement is the sharper of the two a-priori flow bounds,
    /// `(1+|x|) e^{C t}` for linearly growing `a` and `|x| + sup|a| t` for
    /// bounded `a`.
    pub fn checked(
        a: CoeffField,
        b: CoeffField,
        out_axis: &XAxis,
        t0: f64,
        t_max: f64,
    ) -> Result<Self> {
        let span = (t_max - t0).abs();
        let probe_hi = out_axis.x_min().abs().max(out_axis.x_max().abs()).max(2.0);
        let fit = fit_growth_constant(&a, t0, t_max, probe_hi);
        if fit.superlinear {
            return Err(Error::GrowthBound {
                t: fit.worst_t,
                x: fit.worst_x,
                value: fit.worst_value,
                bound: fit.c_inner * fit.worst_x.abs().max(1.0),
            });
        }
        if let Some((lo, hi)) = a.x_window() {
            let reach_mult = (1.0 + probe_hi) * (fit.c * span).exp();
            let reach_add = probe_hi + fit.sup_abs * span;
            let reach = reach_mult.min(reach_add);
            let need_lo = (-reach).min(out_axis.x_min());
            let need_hi = reach.max(out_axis.x_max());
            if lo > need_lo || hi < need_hi {
                return Err(Error::InsufficientPadding {
                    have_lo: lo,
                    have_hi: hi,
                    need_lo,
                    need_hi,
                });
            }
        }
        Ok(CoefficientPair { a, b, fused: None })
    }
}

struct GrowthFit {
    c: f64,       // max |a|/max(1,|x|) over the sample lattice
    c_inner: f64, // same, restricted to the inner half of the |x| range
    sup_abs: f64, // max |a| over the lattice
    superlinear: bool,
    worst_t: f64,
    worst_x: f64,
    worst_value: f64,
}

fn fit_growth_constant(a: &CoeffField, t0: f64, t_max: f64, x_hi: f64) -> GrowthFit {
    let nt = 9;
    let nx = 33;
    let mut c: f64 = 0.0;
    let mut c_inner: f64 = 0.0;
    let mut c_outer: f64 = 0.0;
    let mut sup_abs: f64 = 0.0;
    let (mut worst_t, mut worst_x, mut worst_value) = (t0, 0.0, 0.0);
    for i in 0..nt {
        let t = t0 + (t_max - t0) * i as f64 / (nt - 1) as f64;
        for j in 0..nx {
            let x = -x_hi + 2.0 * x_hi * j as f64 / (nx - 1) as f64;
            if !a.contains(t, x) {
                continue;
            }
            let v = a.eval(t, x).abs();
            sup_abs = sup_abs.max(v);
            let ratio = v / x.abs().max(1.0);
            if ratio > c {
                c = ratio;
                worst_t = t;
                worst_x = x;
                worst_value = v;
            }
            if x.abs() >= 1.0 {
                if x.abs() <= x_hi / 2.0 {
                    c_inner = c_inner.max(ratio);
                } else {
                    c_outer = c_outer.max(ratio);
                }
            }
        }
    }
    // Soft superlinearity check: the fitted constant must not grow with |x|.
    let superlinear = c_inner > 0.0 && c_outer > 1.5 * c_inner;
    GrowthFit { c, c_inner, sup_abs, superlinear, worst_t, worst_x, worst_value }
}

// ---------------------------------------------------------------------------
// tracing
// ---------------------------------------------------------------------------

/// RK4 solution of dx/dt = -a(t, x) from (t_from, x0) to t_to.
pub fn trace(a: &CoeffField, t_from: f64, x0: f64, t_to: f64, substeps: usize) -> Result<f64> {
    trace_full(a, None, t_from, x0, t_to, substeps.max(1)).map(|r| r.x)
}

/// Like [`trace`], also accumulating `int_{t_from}^{t_to} g(s, x(s)) ds`
/// along the path (signed with the direction of integration).
pub fn trace_with_quadrature(
    a: &CoeffField,
    g: &CoeffField,
    t_from: f64,
    x0: f64,
    t_to: f64,
    substeps: usize,
) -> Result<(f64, f64)> {
    trace_full(a, Some(g), t_from, x0, t_to, substeps.max(1)).map(|r| (r.x, r.integral))
}

struct TraceResult {
    x: f64,
    integral: f64,
    min_abs_x: f64,
}

fn trace_full(
    a: &CoeffField,
    g: Option<&CoeffField>,
    t_from: f64,
    x0: f64,
    t_to: f64,
    substeps: usize,
) -> Result<TraceResult> {
    let pair = |t: f64, x: f64| {
        let av = a.eval(t, x);
        let gv = g.map(|g| g.eval(t, x)).unwrap_or(0.0);
        (av, gv)
    };
    trace_pair_kernel(&pair, &|t, x| a.contains(t, x), t_from, x0, t_to, substeps)
}

/// Monomorphized RK4 core: one joint (a, g) evaluation per stage.
fn trace_pair_kernel<F, C>(
    pair: &F,
    contains: &C,
    t_from: f64,
    x0: f64,
    t_to: f64,
    substeps: usize,
) -> Result<TraceResult>
where
    F: Fn(f64, f64) -> (f64, f64),
    C: Fn(f64, f64) -> bool,
{
    let dt = (t_to - t_from) / substeps as f64;
    // compensated accumulators: downstream residual evaluators apply third
    // derivatives to the result, and plain summation leaves node-to-node
    // rounding jitter that 1/h^3 amplifies above the scheme error
    let mut x = x0;
    let mut x_c = 0.0;
    let mut integral = 0.0;
    let mut int_c = 0.0;
    let mut min_abs_x = x0.abs();
    let mut t = t_from;
    let escape = |t: f64, x: f64| Error::DomainEscape { t_exit: t, x_exit: x };
    if !contains(t, x) {
        return Err(escape(t, x));
    }
    for step in 0..substeps {
        let t1 = t_from + dt * (step + 1) as f64;
        let th = t + 0.5 * dt;

        let (a1, g1) = pair(t, x);
        let k1 = -a1;
        let x2 = x + 0.5 * dt * k1;
        if !contains(th, x2) {
            return Err(escape(th, x2));
        }
        let (a2, g2) = pair(th, x2);
        let k2 = -a2;
        let x3 = x + 0.5 * dt * k2;
        if !contains(th, x3) {
            return Err(escape(th, x3));
        }
        let (a3, g3) = pair(th, x3);
        let k3 = -a3;
        let x4 = x + dt * k3;
        if !contains(t1, x4) {
            return Err(escape(t1, x4));
        }
        let (a4, g4) = pair(t1, x4);
        let k4 = -a4;

        let dint = dt / 6.0 * (g1 + 2.0 * g2 + 2.0 * g3 + g4) - int_c;
        let int_s = integral + dint;
        int_c = (int_s - integral) - dint;
        integral = int_s;

        let dx = dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4) - x_c;
        let x_s = x + dx;
        x_c = (x_s - x) - dx;
        x = x_s;
        if !contains(t1, x) {
            return Err(escape(t1, x));
        }
        min_abs_x = min_abs_x.min(x.abs());
        t = t1;
    }
    if !x.is_finite() {
        return Err(Error::NonFinite { context: format!("trace from ({t_from}, {x0})") });
    }
    Ok(TraceResult { x, integral, min_abs_x })
}

// ---------------------------------------------------------------------------
// characteristic tables and the two-route Jacobian
// ---------------------------------------------------------------------------

/// Sampled flow xi(t; t', x) and its x-Jacobian along traced paths.
#[derive(Debug, Clone)]
pub struct CharacteristicTable {
    pub t_origin: f64,
    pub times: Vec<f64>,
    pub starts: Vec<f64>,
    /// `xi[time][start]`
    pub xi: Vec<Vec<f64>>,
    /// Jacobian via the exponential-integral formula exp(-int a_x).
    pub xi_x: Vec<Vec<f64>>,
}

impl CharacteristicTable {
    /// Forward-trace diagnostics from `t_origin` to each target time.
    pub fn build(
        a: &CoeffField,
        a_x: &CoeffField,
        t_origin: f64,
        times: &[f64],
        starts: &[f64],
        opts: &TraceOptions,
    ) -> Result<Self> {
        let mut xi = Vec::with_capacity(times.len());
        let mut xi_x = Vec::with_capacity(times.len());
        for &t in times {
            let steps = opts.steps(t - t_origin);
            let mut row = Vec::with_capacity(starts.len());
            let mut row_j = Vec::with_capacity(starts.len());
            for &x0 in starts {
                let (x, int_ax) = trace_with_quadrature(a, a_x, t_origin, x0, t, steps)?;
                row.push(x);
                // equation of variation: d(xi_x)/dt = -a_x(t, xi) xi_x
                row_j.push((-int_ax).exp());
            }
            xi.push(row);
            xi_x.push(row_j);
        }
        Ok(CharacteristicTable {
            t_origin,
            times: times.to_vec(),
            starts: starts.to_vec(),
            xi,
            xi_x,
        })
    }

    /// Diagnostic dump, one row per (time, start) pair.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        use crate::field::format_g17 as g;
        let mut out = String::from("t,x0,xi,xi_x\n");
        for (i, &t) in self.times.iter().enumerate() {
            for (j, &x0) in self.starts.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    g(t),
                    g(x0),
                    g(self.xi[i][j]),
                    g(self.xi_x[i][j])
                ));
            }
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Both Jacobian routes: the exponential-integral formula along traced
/// paths and centered finite differences of xi in the start position.
#[derive(Debug, Clone)]
pub struct JacobianCheck {
    pub table: CharacteristicTable,
    pub fd: Vec<Vec<f64>>,
    pub max_dev: f64,
}

/// Step used by the finite-difference Jacobian route.
const JACOBIAN_FD_STEP: f64 = 3e-4;

pub fn jacobian_check(
    a: &CoeffField,
    a_x: &CoeffField,
    t_origin: f64,
    times: &[f64],
    starts: &[f64],
    opts: &TraceOptions,
    tol: f64,
) -> Result<JacobianCheck> {
    let table = CharacteristicTable::build(a, a_x, t_origin, times, starts, opts)?;
    let mut fd = Vec::with_capacity(times.len());
    let mut max_dev: f64 = 0.0;
    for (i, &t) in times.iter().enumerate() {
        let steps = opts.steps(t - t_origin);
        let mut row = Vec::with_capacity(starts.len());
        for (j, &x0) in starts.iter().enumerate() {
            let d = JACOBIAN_FD_STEP;
            let xp = trace(a, t_origin, x0 + d, t, steps)?;
            let xm = trace(a, t_origin, x0 - d, t, steps)?;
            let v = (xp - xm) / (2.0 * d);
            max_dev = max_dev.max((v - table.xi_x[i][j]).abs());
            row.push(v);
        }
        fd.push(row);
    }
    if max_dev > 100.0 * tol {
        return Err(Error::InconsistentTrace { dev: max_dev, tol });
    }
    Ok(JacobianCheck { table, fd, max_dev })
}

// ---------------------------------------------------------------------------
// PDE solvers
// ---------------------------------------------------------------------------

fn check_axis(u0: &Slice, grid: &Grid) -> Result<()> {
    if !u0.axis().covers(grid.x_axis()) {
        return Err(Error::ShapeMismatch(
            "initial slice axis must cover the output grid window".into(),
        ));
    }
    Ok(())
}

/// Extra initial-data width needed so that no backward trace from the grid
/// leaves the data window: a two-pass sup|a| sweep gives the additive
/// a-priori reach bound for bounded coefficients.
pub fn backward_reach(a: &CoeffField, grid: &Grid) -> f64 {
    let span = (grid.t_max() - grid.t0()).abs();
    let sup = |lo: f64, hi: f64| -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..=12 {
            let t = grid.t0() + (grid.t_max() - grid.t0()) * i as f64 / 12.0;
            for j in 0..=64 {
                let x = lo + (hi - lo) * j as f64 / 64.0;
                if a.contains(t, x) {
                    m = m.max(a.eval(t, x).abs());
                }
            }
        }
        m
    };
    let (lo, hi) = (grid.x_axis().x_min(), grid.x_axis().x_max());
    let first = sup(lo, hi) * span;
    sup(lo - first, hi + first) * span * 1.05 + 2.0 * grid.h()
}

/// Solve u_t = a u_x + b u with u(t0) = u0 on the grid by backward tracing:
/// u(t, x) = u0(xi(t0; t, x)) exp(int_{t0}^{t} b along the path).
/// Positivity of u0 is preserved structurally.
pub fn solve_first_order(
    coeffs: &CoefficientPair,
    u0: &Slice,
    grid: &Grid,
    opts: &TraceOptions,
) -> Result<SampledField> {
    solve_by_tracing(coeffs, u0, grid, opts, |u0_at_x0, int_b| u0_at_x0 * (-int_b).exp())
}

/// Solve s_t = a s_x + eta with s(t0) = s0:
/// s(t, x) = s0(xi(t0; t, x)) + int_{t0}^{t} eta(tau, xi(tau; t, x)) dtau.
pub fn solve_inhomogeneous(
    a: &CoeffField,
    eta: &CoeffField,
    s0: &Slice,
    grid: &Grid,
    opts: &TraceOptions,
) -> Result<SampledField> {
    let pair = CoefficientPair::new(a.clone(), eta.clone());
    solve_by_tracing(&pair, s0, grid, opts, |s0_at_x0, int_eta| s0_at_x0 - int_eta)
}

fn solve_by_tracing(
    coeffs: &CoefficientPair,
    u0: &Slice,
    grid: &Grid,
    opts: &TraceOptions,
    combine: impl Fn(f64, f64) -> f64,
) -> Result<SampledField> {
    let contains = |t: f64, x: f64| coeffs.a.contains(t, x) && coeffs.b.contains(t, x);
    match &coeffs.fused {
        Some(f) => {
            let f = f.clone();
            solve_nodes(u0, grid, opts, combine, move |t, x| f(t, x), contains)
        }
        None => {
            let (a, b) = (coeffs.a.clone(), coeffs.b.clone());
            solve_nodes(
                u0,
                grid,
                opts,
                combine,
                move |t, x| (a.eval(t, x), b.eval(t, x)),
                contains,
            )
        }
    }
}

fn solve_nodes<F, C>(
    u0: &Slice,
    grid: &Grid,
    opts: &TraceOptions,
    combine: impl Fn(f64, f64) -> f64,
    pair: F,
    contains: C,
) -> Result<SampledField>
where
    F: Fn(f64, f64) -> (f64, f64),
    C: Fn(f64, f64) -> bool,
{
    check_axis(u0, grid)?;
    let nt = grid.nt();
    let nx = grid.nx();
    let t0 = grid.t0();
    let mut values = vec![0.0; nt * nx];
    for j in 0..nx {
        values[j] = u0.interp(grid.x(j))?;
    }
    let mut escaped = 0usize;
    let mut first_escape: Option<(f64, f64)> = None;
    for i in 1..nt {
        let t = grid.t(i);
        let steps = opts.steps(t - t0);
        for j in 0..nx {
            let x = grid.x(j);
            // the returned integral runs from t down to t0; the path integral
            // from t0 up to t enters with the opposite sign
            match trace_pair_kernel(&pair, &contains, t, x, t0, steps) {
                Ok(r) => match u0.interp(r.x) {
                    Ok(v) => values[i * nx + j] = combine(v, r.integral),
                    Err(_) => {
                        escaped += 1;
                        first_escape.get_or_insert((t, x));
                    }
                },
                Err(Error::DomainEscape { .. }) => {
                    escaped += 1;
                    first_escape.get_or_insert((t, x));
                }
                Err(e) => return Err(e),
            }
        }
    }
    if escaped > 0 {
        let (t, x) = first_escape.unwrap();
        return Err(Error::NodesEscaped { count: escaped, t, x });
    }
    SampledField::new(grid.clone(), values)
}

// ---------------------------------------------------------------------------
// growth-bound diagnostics
// ---------------------------------------------------------------------------

/// Fitted two-sided flow bounds `C1 |x| <= |xi(t; t', x)| <= C2 |x|`
/// over sampled ordered pairs t' <= t and |x| >= N_floor.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub c1: f64,
    pub c2: f64,
    pub pass: bool,
    /// Minimum of |xi| along any traced path, for the collapse check.
    pub min_path_abs: f64,
    pub n_floor: f64,
}

pub fn check_growth_bounds(
    a: &CoeffField,
    t_window: (f64, f64),
    n_floor: f64,
    opts: &TraceOptions,
) -> Result<GrowthReport> {
    let (t_lo, t_hi) = t_window;
    let n_times = 5;
    let times: Vec<f64> = (0..n_times)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / (n_times - 1) as f64)
        .collect();
    let mut starts = Vec::new();
    for k in 0..7 {
        let m = n_floor * (1.0 + 3.0 * k as f64 / 6.0); // N .. 4N
        starts.push(m);
        starts.push(-m);
    }
    let mut c1 = f64::INFINITY;
    let mut c2: f64 = 0.0;
    let mut min_path = f64::INFINITY;
    for (ia, &tp) in times.iter().enumerate() {
        for &t in &times[ia..] {
            let steps = opts.steps(t - tp);
            for &x0 in &starts {
                let r = trace_full(a, None, tp, x0, t, steps)?;
                let ratio = r.x.abs() / x0.abs();
                c1 = c1.min(ratio);
                c2 = c2.max(ratio);
                min_path = min_path.min(r.min_abs_x);
            }
        }
    }
    let pass = c1 > 0.0 && c2.is_finite() && min_path >= c1 * n_floor / 2.0;
    Ok(GrowthReport { c1, c2, pass, min_path_abs: min_path, n_floor })
}
