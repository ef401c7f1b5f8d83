//! The Miura pipeline: map r to B(r) = r_x + r^2, invert it along a KdV
//! flow by transporting the positive Schrodinger kernel element with
//! Q = 2q d/dx - q_x, and recover r = psi_x / psi. Also the operator
//! identities that make the construction tick: the commutator relation of
//! the Q-L pair, the division identity A = Q_lambda + 4 d/dx L_lambda,
//! Wronskian constancy, and the rho-normalization cross-check.
//!
//! The kernel element grows like exp of the primitive of r, so the pipeline
//! computes and stores p = log psi (its transport equation is
//! p_t = 2 q p_x - q_x) and exponentiates only for diagnostics.

use crate::characteristics::{
    backward_reach, solve_first_order, solve_inhomogeneous, TraceOptions,
};
use crate::error::{Error, Result};
use crate::field::{
    cumulative_integral, deriv_x, deriv_x_slice, integrate_x, l2_norm, mkdv_residual, Grid,
    SampledField, Slice, XAxis, RESIDUAL_BAND,
};
use crate::kdv::Potential;

/// Largest |log psi| that is still exponentiated for diagnostics.
const LOG_CLAMP: f64 = 700.0;

// ---------------------------------------------------------------------------
// Miura map
// ---------------------------------------------------------------------------

/// B(r) = r_x + r^2 on a slice.
pub fn miura_map(r: &Slice) -> Result<Slice> {
    let rx = deriv_x_slice(r, 1)?;
    Slice::new(
        r.axis().clone(),
        r.values()
            .iter()
            .zip(rx.values())
            .map(|(v, d)| d + v * v)
            .collect(),
    )
}

/// B(r) level by level on a field.
pub fn miura_map_field(r: &SampledField) -> Result<SampledField> {
    let rx = deriv_x(r, 1)?;
    SampledField::new(
        r.grid().clone(),
        r.values()
            .iter()
            .zip(rx.values())
            .map(|(v, d)| d + v * v)
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// kernel element initial data
// ---------------------------------------------------------------------------

/// log psi_0 = int_0^x r_0; the overflow-safe representation.
pub fn log_psi_initial(r0: &Slice) -> Result<Slice> {
    integrate_x(r0)
}

/// psi_0(x) = exp(int_0^x r_0), strictly positive with psi_0(0) = 1.
/// Errors when the primitive exceeds the double-precision exponent range.
pub fn psi_initial(r0: &Slice) -> Result<Slice> {
    let p0 = log_psi_initial(r0)?;
    if p0.max_abs() > LOG_CLAMP {
        return Err(Error::NonFinite { context: "psi_0 overflows; use log_psi_initial".into() });
    }
    p0.map(f64::exp)
}

/// Transported kernel element, stored in log form.
#[derive(Debug, Clone)]
pub struct TransportedKernel {
    pub log_psi: SampledField,
}

impl TransportedKernel {
    /// Exponentiated field; errors when values overflow.
    pub fn psi(&self) -> Result<SampledField> {
        if self.log_psi.max_abs() > LOG_CLAMP {
            return Err(Error::NonFinite { context: "psi overflows; use log_psi".into() });
        }
        self.log_psi.map(f64::exp)
    }

    pub fn min_psi(&self) -> f64 {
        let min_log = self.log_psi.values().iter().cloned().fold(f64::INFINITY, f64::min);
        min_log.exp()
    }
}

/// Transport the kernel element under Q_lambda = (4 lambda + 2q) d/dx - q_x:
/// solves p_t = (4 lambda + 2q) p_x - q_x for p = log psi. Positivity of the
/// result is structural. When psi_0 solves L psi = lambda psi, so does psi(t)
/// at every time (up to scheme error).
pub fn transport_psi(
    q: &Potential,
    psi0: &Slice,
    lambda: f64,
    grid: &Grid,
    opts: &TraceOptions,
) -> Result<TransportedKernel> {
    let min = psi0.values().iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        return Err(Error::NonPositive { min });
    }
    let p0 = psi0.map(f64::ln)?;
    transport_log_psi(q, &p0, lambda, grid, opts)
}

/// Same transport with the initial data already in log form.
pub fn transport_log_psi(
    q: &Potential,
    p0: &Slice,
    lambda: f64,
    grid: &Grid,
    opts: &TraceOptions,
) -> Result<TransportedKernel> {
    let a = q.coeff_a(lambda);
    let eta = q.coeff_neg_qx();
    let log_psi = solve_inhomogeneous(&a, &eta, p0, grid, opts)?;
    Ok(TransportedKernel { log_psi })
}

// ---------------------------------------------------------------------------
// the inversion pipeline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub trace: TraceOptions,
    /// Max-norm tolerance of the consistency gate between B(r0) and q(t0).
    pub gate_tol: f64,
    /// Number of time levels used by the Wronskian-drift diagnostic.
    pub wronskian_levels: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            trace: TraceOptions::default(),
            gate_tol: 1e-6,
            wronskian_levels: 9,
        }
    }
}

/// Diagnostics of one pipeline run. `kernel_residual` is the interior
/// maximum of |L psi| = |psi (q - p_xx - p_x^2)|; `kernel_residual_rel` is
/// the psi-relative version that stays meaningful when psi overflows.
#[derive(Debug, Clone)]
pub struct PipelineDiagnostics {
    pub min_psi: f64,
    pub kernel_residual: f64,
    pub kernel_residual_rel: f64,
    pub mkdv_residual: f64,
    pub wronskian_drift: f64,
    pub r0_fidelity: f64,
    pub gate_deviation: f64,
}

/// Result of inverting the Miura map along the flow of q.
#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub q_on_grid: SampledField,
    pub log_psi: SampledField,
    pub r: SampledField,
    pub diagnostics: PipelineDiagnostics,
}

impl PipelineResult {
    pub fn psi(&self) -> Result<SampledField> {
        TransportedKernel { log_psi: self.log_psi.clone() }.psi()
    }
}

/// Initial-data axis wide enough that no backward trace from the output
/// grid leaves it: the output axis padded by the flow's a-priori reach.
pub fn required_initial_axis(q: &Potential, grid: &Grid) -> XAxis {
    let reach = backward_reach(&q.coeff_a(0.0), grid);
    grid.x_axis().padded(reach)
}

/// Full pipeline: consistency gate, kernel transport, r = p_x, diagnostics.
/// `r0` must be supplied on an axis covering [`required_initial_axis`];
/// the gate compares B(r0) with q(t0) on that whole axis.
pub fn invert_miura_flow(
    r0: &Slice,
    q: &Potential,
    grid: &Grid,
    opts: &PipelineOptions,
) -> Result<PipelineResult> {
    let needed = required_initial_axis(q, grid);
    if !r0.axis().covers(&needed) {
        return Err(Error::InsufficientPadding {
            have_lo: r0.axis().x_min(),
            have_hi: r0.axis().x_max(),
            need_lo: needed.x_min(),
            need_hi: needed.x_max(),
        });
    }
    // consistency gate: the inversion is only meaningful on the Miura fiber
    let q0 = q.slice_on(r0.axis(), grid.t0())?;
    let b0 = miura_map(r0)?;
    let gate_deviation = (0..r0.len())
        .map(|j| (b0.values()[j] - q0.values()[j]).abs())
        .fold(0.0f64, f64::max);
    if gate_deviation > opts.gate_tol {
        return Err(Error::MiuraIncompatible { max_dev: gate_deviation, tol: opts.gate_tol });
    }

    let p0 = log_psi_initial(r0)?;
    let kernel = transport_log_psi(q, &p0, 0.0, grid, &opts.trace)?;
    let p = &kernel.log_psi;
    let r = deriv_x(p, 1)?;

    let q_on_grid = SampledField::from_fn(grid, |t, x| q.q(t, x))?;

    // kernel residual via the log-safe identity L psi = psi (q - p_xx - p_x^2)
    let pxx = deriv_x(p, 2)?;
    let nx = grid.nx();
    let nt = grid.nt();
    let b = RESIDUAL_BAND;
    let mut kernel_residual: f64 = 0.0;
    let mut kernel_residual_rel: f64 = 0.0;
    for i in 0..nt {
        for j in b..nx - b {
            let rel = q_on_grid.at(i, j) - pxx.at(i, j) - r.at(i, j) * r.at(i, j);
            kernel_residual_rel = kernel_residual_rel.max(rel.abs());
            let logv = p.at(i, j);
            if logv.abs() <= LOG_CLAMP {
                kernel_residual = kernel_residual.max((logv.exp() * rel).abs());
            }
        }
    }

    // the time stencil needs 5 levels; shorter runs report NaN instead of failing
    let mkdv = if nt >= 5 {
        mkdv_residual(&r)?.interior_max
    } else {
        f64::NAN
    };
    let mut r0_fidelity: f64 = 0.0;
    for j in 0..nx {
        r0_fidelity = r0_fidelity.max((r.at(0, j) - r0.interp(grid.x(j))?).abs());
    }

    let wronskian_drift = wronskian_diagnostic(r0, q, grid, opts).unwrap_or(f64::NAN);

    let diagnostics = PipelineDiagnostics {
        min_psi: TransportedKernel { log_psi: p.clone() }.min_psi(),
        kernel_residual,
        kernel_residual_rel,
        mkdv_residual: mkdv,
        wronskian_drift,
        r0_fidelity,
        gate_deviation,
    };

    Ok(PipelineResult { q_on_grid, log_psi: kernel.log_psi, r, diagnostics })
}

/// Drift of W(phi, psi) for two transported kernel elements: psi from the
/// pipeline data and phi from the reduction-of-order partner
/// phi_0 = psi_0 int_0^x psi_0^{-2}, which has W(phi_0, psi_0) = -1.
/// Runs on a time-subsampled copy of the grid; the dedicated verification
/// suite runs the full-resolution version.
fn wronskian_diagnostic(
    r0: &Slice,
    q: &Potential,
    grid: &Grid,
    opts: &PipelineOptions,
) -> Result<f64> {
    let levels = opts.wronskian_levels.max(2);
    let stride = ((grid.nt() - 1) / (levels - 1)).max(1);
    let n_sub = (grid.nt() - 1) / stride + 1;
    let sub_tmax = grid.t(stride * (n_sub - 1));
    let sub = Grid::from_axis(grid.x_axis().clone(), grid.t0(), sub_tmax, n_sub)?;
    let (phi, psi) = transported_pair(r0, q, &sub, &opts.trace)?;
    let (_, drift) = wronskian(&phi, &psi)?;
    Ok(drift)
}

/// Transport the canonical kernel pair (phi, psi) over q with lambda = 0.
/// psi_0 = e^{int r_0} and phi_0 = psi_0 int_0^x psi_0^{-2} ds.
pub fn transported_pair(
    r0: &Slice,
    q: &Potential,
    grid: &Grid,
    trace: &TraceOptions,
) -> Result<(SampledField, SampledField)> {
    let p0 = log_psi_initial(r0)?;
    if p0.max_abs() > LOG_CLAMP / 4.0 {
        return Err(Error::NonFinite { context: "kernel pair overflows double range".into() });
    }
    let psi0 = p0.map(f64::exp)?;
    let inv_sq = p0.map(|v| (-2.0 * v).exp())?;
    let g = integrate_x(&inv_sq)?;
    let phi0 = Slice::new(
        psi0.axis().clone(),
        psi0.values()
            .iter()
            .zip(g.values())
            .map(|(s, g)| s * g)
            .collect(),
    )?;
    let coeffs = q.coefficients(0.0);
    let phi = solve_first_order(&coeffs, &phi0, grid, trace)?;
    let kernel = transport_log_psi(q, &p0, 0.0, grid, trace)?;
    let psi = kernel.psi()?;
    Ok((phi, psi))
}

/// W(phi, psi) = phi psi_x - psi phi_x, with the relative drift against the
/// value at (t0, x = 0) (middle node when the axis has no zero node).
pub fn wronskian(phi: &SampledField, psi: &SampledField) -> Result<(SampledField, f64)> {
    if phi.grid() != psi.grid() {
        return Err(Error::ShapeMismatch("Wronskian fields on different grids".into()));
    }
    let phix = deriv_x(phi, 1)?;
    let psix = deriv_x(psi, 1)?;
    let values: Vec<f64> = (0..phi.values().len())
        .map(|k| phi.values()[k] * psix.values()[k] - psi.values()[k] * phix.values()[k])
        .collect();
    let w = SampledField::new(phi.grid().clone(), values)?;
    let j0 = phi
        .grid()
        .x_axis()
        .zero_index()
        .unwrap_or(phi.grid().nx() / 2);
    let w0 = w.at(0, j0);
    let scale = w0.abs().max(1.0);
    let drift = w
        .values()
        .iter()
        .map(|v| (v - w0).abs())
        .fold(0.0f64, f64::max)
        / scale;
    Ok((w, drift))
}

// ---------------------------------------------------------------------------
// rho cross-check (independent normalization route)
// ---------------------------------------------------------------------------

/// rho(t,x) = rho_0(t) e^{int_0^x r}, rho_0(t) = e^{int_0^t (2r^3 - r_xx)|_{x=0}}.
/// rho solves the same transport problem as psi, so max |rho - psi| / psi
/// measures the internal consistency of a pipeline run.
#[derive(Debug, Clone)]
pub struct RhoCheck {
    pub log_rho: SampledField,
    pub max_dev: f64,
}

pub fn rho_crosscheck(result: &PipelineResult) -> Result<RhoCheck> {
    let r = &result.r;
    let grid = r.grid();
    let j0 = grid.x_axis().zero_index().ok_or(Error::NoZeroNode)?;
    let rxx = deriv_x(r, 2)?;
    let integrand: Vec<f64> = (0..grid.nt())
        .map(|i| {
            let rv = r.at(i, j0);
            2.0 * rv * rv * rv - rxx.at(i, j0)
        })
        .collect();
    let log_rho0 = cumulative_integral(&integrand, grid.dt(), 0);

    let mut values = Vec::with_capacity(r.values().len());
    for i in 0..grid.nt() {
        let prim = integrate_x(&r.slice(i))?;
        for j in 0..grid.nx() {
            values.push(log_rho0[i] + prim.values()[j]);
        }
    }
    let log_rho = SampledField::new(grid.clone(), values)?;
    let max_dev = log_rho
        .values()
        .iter()
        .zip(result.log_psi.values())
        .map(|(a, b)| ((a - b).exp() - 1.0).abs())
        .fold(0.0f64, f64::max);
    Ok(RhoCheck { log_rho, max_dev })
}

// ---------------------------------------------------------------------------
// operator-identity checks
// ---------------------------------------------------------------------------

/// Finite-difference residuals of the commutator identity
/// Ldot = [Q_lambda, L_lambda] + 4 q_x L_lambda + KdV(q)
/// applied to a test function at the central time level.
#[derive(Debug, Clone)]
pub struct CommutatorCheck {
    pub lambda: f64,
    /// `|| q_t phi - ([Q,L] + 4 q_x L) phi ||_2 / ||phi||_2`: zero (to scheme
    /// error) exactly when q solves KdV.
    pub residual: f64,
    /// || (lhs - rhs) - KdV(q) phi ||_2 / ||phi||_2 : the identity itself,
    /// small for every smooth q.
    pub identity_defect: f64,
}

pub fn commutator_check(
    q: &SampledField,
    testfn: &Slice,
    lambdas: &[f64],
) -> Result<Vec<CommutatorCheck>> {
    let grid = q.grid();
    if grid.nt() < 5 {
        return Err(Error::StencilTooSmall { needed: 5, have: grid.nt() });
    }
    let edge = testfn.values()[0]
        .abs()
        .max(testfn.values()[testfn.len() - 1].abs());
    if edge > 1e-10 {
        return Err(Error::NonDecaying { edge, limit: 1e-10 });
    }
    let ic = grid.nt() / 2;
    let qt = deriv_t(q)?;
    let q_slice = q.slice(ic);
    let qx = deriv_x_slice(&q_slice, 1)?;
    let qt_slice = qt.slice(ic);
    // the explicit KdV(q) term, for the identity route
    let kdv_term = {
        let qxxx = deriv_x_slice(&q_slice, 3)?;
        let mut v = Vec::with_capacity(q_slice.len());
        for j in 0..q_slice.len() {
            v.push(
                qt_slice.values()[j] - 6.0 * q_slice.values()[j] * qx.values()[j]
                    + qxxx.values()[j],
            );
        }
        v
    };
    let phi_norm = l2_norm(testfn).max(1e-300);
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let l_op = |f: &Slice| -> Result<Slice> {
            let fxx = deriv_x_slice(f, 2)?;
            Slice::new(
                f.axis().clone(),
                (0..f.len())
                    .map(|j| -fxx.values()[j] + (q_slice.values()[j] - lambda) * f.values()[j])
                    .collect(),
            )
        };
        let q_op = |f: &Slice| -> Result<Slice> {
            let fx = deriv_x_slice(f, 1)?;
            Slice::new(
                f.axis().clone(),
                (0..f.len())
                    .map(|j| {
                        (4.0 * lambda + 2.0 * q_slice.values()[j]) * fx.values()[j]
                            - qx.values()[j] * f.values()[j]
                    })
                    .collect(),
            )
        };
        let l_phi = l_op(testfn)?;
        let q_phi = q_op(testfn)?;
        let ql = q_op(&l_phi)?;
        let lq = l_op(&q_phi)?;
        let mut resid = Vec::with_capacity(testfn.len());
        let mut defect = Vec::with_capacity(testfn.len());
        for j in 0..testfn.len() {
            let rhs = ql.values()[j] - lq.values()[j] + 4.0 * qx.values()[j] * l_phi.values()[j];
            let lhs = qt_slice.values()[j] * testfn.values()[j];
            let d = lhs - rhs;
            resid.push(d);
            defect.push(d - kdv_term[j] * testfn.values()[j]);
        }
        let residual = l2_norm(&Slice::new(testfn.axis().clone(), resid)?) / phi_norm;
        let identity_defect = l2_norm(&Slice::new(testfn.axis().clone(), defect)?) / phi_norm;
        out.push(CommutatorCheck { lambda, residual, identity_defect });
    }
    Ok(out)
}

fn deriv_t(q: &SampledField) -> Result<SampledField> {
    crate::field::deriv_t(q, 1)
}

/// Residual of the division identity A = Q_lambda + 4 d/dx (L - lambda) on a
/// test function at a fixed time. Third derivatives on both sides are the
/// composition D1(D2 .), so the q = 0 (or constant q) case agrees bit for bit.
pub fn factorization_check(q: &Slice, lambda: f64, testfn: &Slice) -> Result<f64> {
    let qx = deriv_x_slice(q, 1)?;
    let d1 = |f: &Slice| deriv_x_slice(f, 1);
    let d2 = |f: &Slice| deriv_x_slice(f, 2);
    let phix = d1(testfn)?;
    let phixx = d2(testfn)?;
    let d1_of_phixx = d1(&phixx)?;
    // A phi = -4 (phi'')' + 6 q phi' + 3 q_x phi
    let a_phi: Vec<f64> = (0..testfn.len())
        .map(|j| {
            -4.0 * d1_of_phixx.values()[j]
                + 6.0 * q.values()[j] * phix.values()[j]
                + 3.0 * qx.values()[j] * testfn.values()[j]
        })
        .collect();
    // Q_lambda phi + 4 (L_lambda phi)'
    let l_phi = Slice::new(
        testfn.axis().clone(),
        (0..testfn.len())
            .map(|j| -phixx.values()[j] + (q.values()[j] - lambda) * testfn.values()[j])
            .collect(),
    )?;
    let l_phi_x = d1(&l_phi)?;
    let factored: Vec<f64> = (0..testfn.len())
        .map(|j| {
            (4.0 * lambda + 2.0 * q.values()[j]) * phix.values()[j]
                - qx.values()[j] * testfn.values()[j]
                + 4.0 * l_phi_x.values()[j]
        })
        .collect();
    let diff: Vec<f64> = a_phi.iter().zip(&factored).map(|(a, b)| a - b).collect();
    let num = l2_norm(&Slice::new(testfn.axis().clone(), diff)?);
    Ok(num / l2_norm(testfn).max(1e-300))
}
