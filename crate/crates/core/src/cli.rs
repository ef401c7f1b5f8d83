//! Command-line front end: parse solution specs and symbol files, run the
//! pipeline and verification suites, emit CSV/JSON reports.
//!
//! Exit codes: 0 success; 1 verification failure; 2 spec/flag parse error;
//! 3 Miura consistency-gate failure; 4 numerical failure; 5 formal-solution
//! obstruction (asymptotics). `report.json` is written even on failure.

use crate::asymptotics::{
    beta_gate, derivative_star, formal_evolution, integrate_symbol, miura_symbol, GateOutcome,
    Symbol,
};
use crate::characteristics::TraceOptions;
use crate::error::{Error, Result};
use crate::field::{format_g17, write_field_csv, Grid, Slice};
use crate::kdv::{solve_numeric, KdvSolutionSpec, Potential};
use crate::pipeline::{invert_miura_flow, miura_map, required_initial_axis, PipelineOptions};
use crate::report::{PipelineReport, SpectrumReport};
use crate::speclang::{parse_initial_data, parse_kdv_spec, InitialData};
use crate::spectral::{spectrum_invariance, InvarianceOptions};
use crate::verify::{run_suite, SUITES};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const USAGE: &str = "usage:
  miura solve-mkdv --r0 <kink|zero|const:c=..|csv:file=..> --q <spec|auto>
                   [--xmin -10] [--xmax 10] [--nx 1001] [--tmax 0.5] [--nt 251]
                   [--gate-tol 1e-6] [--substep-cap 1e-3] [--out-dir .]
  miura spectrum   --q <spec> --times 0,0.25,0.5 --window -5,0
                   [--xmin -30] [--xmax 30] [--nx 2001] [--tol 1e-9]
                   [--richardson auto|on|off] [--out-dir .]
  miura asymptotics --r0-symbol file.json [--tmax 1] [--nt 101] [--out-dir .]
  miura verify     --suite <commutator|wronskian|spectrum|impedance|asymptotics|characteristics|all>
                   [--seed 414213562] [--out-dir .]
  any command accepts --config <path> with key=value lines overriding flags
  (keys are the flag names without the leading dashes)

KdV spec mini-language:
  zero | const:c=1 | soliton:kappa=1,x0=0 | boost:c=1(soliton:kappa=1,x0=0)
  | numeric:file=q0.csv";

/// Validated run configuration: subcommand plus a last-wins flag map.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    flags: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(args: &[String]) -> Result<RunConfig> {
        let Some(command) = args.first() else {
            return Err(Error::Parse("missing subcommand".into()));
        };
        let mut flags = BTreeMap::new();
        let mut i = 1;
        while i < args.len() {
            let key = args[i]
                .strip_prefix("--")
                .ok_or_else(|| Error::Parse(format!("expected a --flag, got '{}'", args[i])))?;
            let value = args
                .get(i + 1)
                .ok_or_else(|| Error::Parse(format!("flag --{key} needs a value")))?;
            flags.insert(key.to_string(), value.clone());
            i += 2;
        }
        // config file entries override flags
        if let Some(path) = flags.get("config").cloned() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Io { path: path.clone(), message: e.to_string() })?;
            for (ln, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    return Err(Error::Parse(format!("{path}:{}: expected key=value", ln + 1)));
                };
                flags.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(RunConfig { command: command.clone(), flags })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.flags.get(key).map(|s| s.as_str())
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Parse(format!("missing required flag --{key}")))
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| Error::Parse(format!("--{key} {v}: {e}"))),
        }
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| Error::Parse(format!("--{key} {v}: {e}"))),
        }
    }

    fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.get("out-dir").unwrap_or("."))
    }

    fn check_known(&self, allowed: &[&str]) -> Result<()> {
        for key in self.flags.keys() {
            if key != "config" && !allowed.contains(&key.as_str()) {
                return Err(Error::Parse(format!(
                    "unknown flag --{key} for '{}'",
                    self.command
                )));
            }
        }
        Ok(())
    }
}

/// Run the CLI; returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    let config = match RunConfig::parse(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}\n{USAGE}");
            return 2;
        }
    };
    let result = match config.command.as_str() {
        "solve-mkdv" => cmd_solve_mkdv(&config),
        "spectrum" => cmd_spectrum(&config),
        "asymptotics" => cmd_asymptotics(&config),
        "verify" => cmd_verify(&config),
        other => {
            eprintln!("error: unknown command '{other}'\n{USAGE}");
            return 2;
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::Io { .. } => 2,
                Error::MiuraIncompatible { .. } => 3,
                Error::NoFormalSolution { .. } => 5,
                _ => 4,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// solve-mkdv
// ---------------------------------------------------------------------------

fn cmd_solve_mkdv(cfg: &RunConfig) -> Result<i32> {
    cfg.check_known(&[
        "r0", "q", "xmin", "xmax", "nx", "tmax", "nt", "gate-tol", "substep-cap", "out-dir",
    ])?;
    let base = std::env::current_dir().unwrap_or_else(|_| PathBuf::from("."));
    let r0_spec = parse_initial_data(cfg.require("r0")?, &base)?;
    let q_flag = cfg.require("q")?.to_string();
    let grid = Grid::new(
        cfg.f64_or("xmin", -10.0)?,
        cfg.f64_or("xmax", 10.0)?,
        cfg.usize_or("nx", 1001)?,
        0.0,
        cfg.f64_or("tmax", 0.5)?,
        cfg.usize_or("nt", 251)?,
    )?;
    let opts = PipelineOptions {
        trace: TraceOptions::with_cap(cfg.f64_or("substep-cap", 1e-3)?),
        gate_tol: cfg.f64_or("gate-tol", 1e-6)?,
        ..PipelineOptions::default()
    };

    let q = realize_q(&q_flag, &r0_spec, &grid, &base)?;
    let needed = required_initial_axis(&q, &grid);
    let r0 = match &r0_spec {
        InitialData::Csv(_) => r0_spec.materialize(grid.x_axis())?, // own axis from file
        _ => r0_spec.materialize(&needed)?,
    };

    let result = invert_miura_flow(&r0, &q, &grid, &opts)?;
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    write_field_csv(&result.r, &out.join("r.csv"))?;
    PipelineReport::from_diagnostics(&result.diagnostics).write_json(&out.join("psi_diag.json"))?;
    println!(
        "solve-mkdv: mkdv_residual = {}, min_psi = {}, wrote {}",
        format_g17(result.diagnostics.mkdv_residual),
        format_g17(result.diagnostics.min_psi),
        out.join("r.csv").display()
    );
    Ok(0)
}

/// Realize a `--q` flag (a KdV spec or `auto`) as a transport potential.
pub fn realize_q(flag: &str, r0_spec: &InitialData, grid: &Grid, base: &Path) -> Result<Potential> {
    if flag == "auto" {
        // numeric KdV from the Miura image of the initial data
        let r0_on_grid = match r0_spec {
            InitialData::Csv(_) => {
                let s = r0_spec.materialize(grid.x_axis())?;
                resample(&s, grid)?
            }
            _ => r0_spec.materialize(grid.x_axis())?,
        };
        let q0 = miura_map(&r0_on_grid)?;
        return numeric_potential(&q0, grid);
    }
    let spec = parse_kdv_spec(flag, base)?;
    match spec.closed_form() {
        Some(p) => Ok(p),
        None => {
            let KdvSolutionSpec::Numeric { q0 } = spec else { unreachable!() };
            numeric_potential(&q0, grid)
        }
    }
}

fn resample(s: &Slice, grid: &Grid) -> Result<Slice> {
    Slice::new(
        grid.x_axis().clone(),
        (0..grid.nx())
            .map(|j| s.interp(grid.x(j)))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Solve numeric KdV for use as a transport potential, growing nt when the
/// stability bound asks for it.
fn numeric_potential(q0: &Slice, grid: &Grid) -> Result<Potential> {
    let mut nt = grid.nt();
    loop {
        match solve_numeric(q0, grid.t_max(), nt) {
            Ok(sol) => return sol.potential(),
            Err(Error::StepSize { suggested_nt, .. }) => {
                // keep the output levels as a sublattice of the solver levels
                let m = (suggested_nt - 1).div_ceil(grid.nt() - 1) + 1;
                nt = (grid.nt() - 1) * m + 1;
            }
            Err(e) => return Err(e),
        }
    }
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

fn cmd_spectrum(cfg: &RunConfig) -> Result<i32> {
    cfg.check_known(&[
        "q", "times", "window", "xmin", "xmax", "nx", "tol", "richardson", "out-dir",
    ])?;
    let base = std::env::current_dir().unwrap_or_else(|_| PathBuf::from("."));
    let spec = parse_kdv_spec(cfg.require("q")?, &base)?;
    let times = parse_list(cfg.require("times")?)?;
    if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parse("--times must be strictly increasing".into()));
    }
    let window = {
        let w = parse_list(cfg.require("window")?)?;
        if w.len() != 2 {
            return Err(Error::Parse("--window needs exactly lo,hi".into()));
        }
        (w[0], w[1])
    };
    let xmin = cfg.f64_or("xmin", -30.0)?;
    let xmax = cfg.f64_or("xmax", 30.0)?;
    let nx = cfg.usize_or("nx", 2001)?;
    let tol = cfg.f64_or("tol", 1e-9)?;
    let is_numeric = matches!(spec, KdvSolutionSpec::Numeric { .. });
    let richardson = match cfg.get("richardson").unwrap_or("auto") {
        "auto" => is_numeric,
        "on" => true,
        "off" => false,
        other => return Err(Error::Parse(format!("--richardson {other}: use auto|on|off"))),
    };

    // time axis: every requested time must be a level
    let mut t_max = *times.last().unwrap();
    let t0 = if is_numeric { 0.0 } else { times[0] };
    if t_max <= t0 {
        t_max = t0 + 1e-3; // single-instant request: one spare level
    }
    let dt = time_gcd(&times, t0)?;
    let mut nt = ((t_max - t0) / dt).round().max(1.0) as usize + 1;
    let field = loop {
        let grid = Grid::new(xmin, xmax, nx, t0, t_max, nt)?;
        match spec.evaluate(&grid) {
            Ok(f) => break f,
            Err(Error::StepSize { suggested_nt, .. }) => {
                let m = (suggested_nt - 1).div_ceil(nt - 1) + 1;
                nt = (nt - 1) * m + 1;
            }
            Err(e) => return Err(e),
        }
    };
    let rep = spectrum_invariance(&field, &times, window, &InvarianceOptions { tol, richardson })?;
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    SpectrumReport::from_invariance(&rep).write_json(&out.join("report.json"))?;
    if let Some(v) = &rep.violation {
        eprintln!("warning: invariance violation: {v}");
    }
    println!(
        "spectrum: {} times, max pair deviation = {}, wrote {}",
        rep.times.len(),
        format_g17(rep.max_pair_dev),
        out.join("report.json").display()
    );
    Ok(0)
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("'{p}': {e}")))
        })
        .collect()
}

/// Largest dt with every (t - t0) an integer multiple, probing divisors of
/// the smallest gap.
fn time_gcd(times: &[f64], t0: f64) -> Result<f64> {
    if times.len() == 1 {
        return Ok((times[0] - t0).max(1e-3));
    }
    let mut base = f64::INFINITY;
    for w in times.windows(2) {
        base = base.min(w[1] - w[0]);
    }
    if times[0] - t0 > 1e-12 {
        base = base.min(times[0] - t0);
    }
    for k in 1..=64 {
        let dt = base / k as f64;
        let ok = times.iter().all(|&t| {
            let m = (t - t0) / dt;
            (m - m.round()).abs() < 1e-6
        });
        if ok {
            return Ok(dt);
        }
    }
    Err(Error::Parse("times are not commensurate".into()))
}

// ---------------------------------------------------------------------------
// asymptotics
// ---------------------------------------------------------------------------

fn cmd_asymptotics(cfg: &RunConfig) -> Result<i32> {
    cfg.check_known(&["r0-symbol", "tmax", "nt", "out-dir"])?;
    let path = PathBuf::from(cfg.require("r0-symbol")?);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let r0 = Symbol::from_json(&text)?;
    if let GateOutcome::Reject { witness, bound } = beta_gate(&r0, false) {
        eprintln!(
            "no formal solution: the right-hand side produces exponent {witness}, \
             exceeding the admissible maximum {bound}"
        );
        return Ok(5);
    }
    let t_max = cfg.f64_or("tmax", 1.0)?;
    let nt = cfg.usize_or("nt", 101)?;
    if nt < 2 {
        return Err(Error::Parse("--nt must be at least 2".into()));
    }
    let t_grid: Vec<f64> = (0..nt)
        .map(|i| t_max * i as f64 / (nt - 1) as f64)
        .collect();
    let q = miura_symbol(&r0)?;
    let p0 = integrate_symbol(&r0);
    let ev = formal_evolution(&p0, &q, &t_grid)?;
    // report the solution-level symbol: r = d/dx of the evolved primitive
    let r_symbol = derivative_star(&ev.chi);
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let mut csv = String::from("t,k,a_k\n");
    for (k, term) in r_symbol.terms().iter().enumerate() {
        for (i, &t) in t_grid.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{}\n",
                format_g17(t),
                k,
                format_g17(term.coeff.at_index(i))
            ));
        }
    }
    let csv_path = out.join("coefficients.csv");
    std::fs::write(&csv_path, csv).map_err(|e| Error::io(&csv_path, e))?;
    println!("asymptotics: solution-symbol rows, index -> exponent:");
    for (k, term) in r_symbol.terms().iter().enumerate() {
        println!("  {k}: {}", term.exponent);
    }
    println!("wrote {}", csv_path.display());
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(cfg: &RunConfig) -> Result<i32> {
    cfg.check_known(&["suite", "seed", "out-dir"])?;
    let suite = cfg.require("suite")?;
    if !SUITES.contains(&suite) {
        eprintln!("error: unknown suite '{suite}'; choose one of {SUITES:?}\n{USAGE}");
        return Ok(2);
    }
    let seed = match cfg.get("seed") {
        None => 414213562u64,
        Some(v) => v
            .parse()
            .map_err(|e| Error::Parse(format!("--seed {v}: {e}")))?,
    };
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let report = run_suite(suite, seed)?;
    report.write_json(&out.join("report.json"))?;
    for c in &report.checks {
        println!(
            "[{}] {}: measured = {}, threshold = {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            format_g17(c.measured),
            format_g17(c.threshold)
        );
    }
    if report.pass {
        println!("suite '{suite}' passed ({} checks)", report.checks.len());
        Ok(0)
    } else {
        let failing = report.first_failure().expect("non-passing suite has a failure");
        eprintln!("suite '{suite}' FAILED at check '{}'", failing.name);
        Ok(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(parts: &[&str]) -> Vec<String> {
        parts.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn config_parsing_and_unknown_flags() {
        let cfg = RunConfig::parse(&argv(&["solve-mkdv", "--r0", "zero", "--q", "zero"])).unwrap();
        assert_eq!(cfg.command, "solve-mkdv");
        assert_eq!(cfg.require("r0").unwrap(), "zero");
        assert!(RunConfig::parse(&argv(&["solve-mkdv", "--r0"])).is_err());
        assert!(RunConfig::parse(&argv(&["solve-mkdv", "r0", "zero"])).is_err());
        let cfg = RunConfig::parse(&argv(&["verify", "--bogus", "1"])).unwrap();
        assert!(cfg.check_known(&["suite", "seed", "out-dir"]).is_err());
    }

    #[test]
    fn config_file_overrides_flags() {
        let dir = std::env::temp_dir().join("miura_cli_cfg_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "nx=501\n# comment\ntmax = 0.25\n").unwrap();
        let cfg = RunConfig::parse(&argv(&[
            "solve-mkdv",
            "--nx",
            "9999",
            "--config",
            path.to_str().unwrap(),
        ]))
        .unwrap();
        assert_eq!(cfg.usize_or("nx", 0).unwrap(), 501);
        assert_eq!(cfg.f64_or("tmax", 0.0).unwrap(), 0.25);
    }

    #[test]
    fn time_gcd_handles_uneven_lists() {
        let dt = time_gcd(&[0.0, 0.25, 0.5], 0.0).unwrap();
        assert!((dt - 0.25).abs() < 1e-12);
        let dt = time_gcd(&[0.0, 0.1, 0.25], 0.0).unwrap();
        assert!((dt - 0.05).abs() < 1e-9);
    }
}
