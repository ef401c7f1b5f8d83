//! Mini-language for solution specs, shared by the CLI flags:
//! `zero`, `const:c=1`, `soliton:kappa=1,x0=0`,
//! `boost:c=1(soliton:kappa=1,x0=0)`, `numeric:file=q0.csv`.
//! Grammar: identifier, optional `:key=value` comma list, optional
//! parenthesized inner spec. The initial-data presets (`kink`, `zero`,
//! `const:c=..`, `csv:file=..`) ride the same parser.

use crate::error::{Error, Result};
use crate::field::{read_slice_csv, Slice, XAxis};
use crate::kdv::KdvSolutionSpec;
use std::path::{Path, PathBuf};

/// Parsed spec before interpretation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSpec {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub inner: Option<Box<RawSpec>>,
}

pub fn parse_raw(input: &str) -> Result<RawSpec> {
    let mut chars = input.char_indices().peekable();
    let spec = parse_spec(input, &mut chars)?;
    if let Some((i, c)) = chars.next() {
        return Err(Error::Parse(format!("unexpected '{c}' at byte {i} in spec '{input}'")));
    }
    Ok(spec)
}

type Chars<'a> = std::iter::Peekable<std::str::CharIndices<'a>>;

fn parse_spec(input: &str, chars: &mut Chars) -> Result<RawSpec> {
    let mut name = String::new();
    while let Some(&(_, c)) = chars.peek() {
        if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
            name.push(c);
            chars.next();
        } else {
            break;
        }
    }
    if name.is_empty() {
        return Err(Error::Parse(format!("expected an identifier in spec '{input}'")));
    }
    let mut params = Vec::new();
    if let Some(&(_, ':')) = chars.peek() {
        chars.next();
        loop {
            let mut key = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    key.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            match chars.next() {
                Some((_, '=')) => {}
                _ => return Err(Error::Parse(format!("expected '=' after key '{key}' in '{input}'"))),
            }
            let mut value = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c == ',' || c == '(' || c == ')' {
                    break;
                }
                value.push(c);
                chars.next();
            }
            if key.is_empty() || value.is_empty() {
                return Err(Error::Parse(format!("empty key or value in '{input}'")));
            }
            params.push((key, value));
            if let Some(&(_, ',')) = chars.peek() {
                chars.next();
            } else {
                break;
            }
        }
    }
    let mut inner = None;
    if let Some(&(_, '(')) = chars.peek() {
        chars.next();
        let spec = parse_spec(input, chars)?;
        match chars.next() {
            Some((_, ')')) => {}
            _ => return Err(Error::Parse(format!("missing ')' in spec '{input}'"))),
        }
        inner = Some(Box::new(spec));
    }
    Ok(RawSpec { name, params, inner })
}

fn get_f64(raw: &RawSpec, key: &str) -> Result<f64> {
    for (k, v) in &raw.params {
        if k == key {
            return v
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("{key}={v}: {e}")));
        }
    }
    Err(Error::Parse(format!("spec '{}' is missing key '{key}'", raw.name)))
}

fn reject_unknown(raw: &RawSpec, allowed: &[&str]) -> Result<()> {
    for (k, _) in &raw.params {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Parse(format!("unknown key '{k}' for spec '{}'", raw.name)));
        }
    }
    Ok(())
}

/// Interpret a KdV solution spec; `base_dir` anchors relative csv paths.
pub fn parse_kdv_spec(input: &str, base_dir: &Path) -> Result<KdvSolutionSpec> {
    let raw = parse_raw(input)?;
    interpret_kdv(&raw, base_dir)
}

fn interpret_kdv(raw: &RawSpec, base_dir: &Path) -> Result<KdvSolutionSpec> {
    match raw.name.as_str() {
        "zero" => {
            reject_unknown(raw, &[])?;
            Ok(KdvSolutionSpec::Zero)
        }
        "const" => {
            reject_unknown(raw, &["c"])?;
            Ok(KdvSolutionSpec::Constant { c: get_f64(raw, "c")? })
        }
        "soliton" => {
            reject_unknown(raw, &["kappa", "x0"])?;
            KdvSolutionSpec::soliton(get_f64(raw, "kappa")?, get_f64(raw, "x0")?)
        }
        "boost" => {
            reject_unknown(raw, &["c"])?;
            let inner = raw
                .inner
                .as_ref()
                .ok_or_else(|| Error::Parse("boost needs an inner spec".into()))?;
            Ok(interpret_kdv(inner, base_dir)?.boost(get_f64(raw, "c")?))
        }
        "numeric" => {
            reject_unknown(raw, &["file"])?;
            let file = raw
                .params
                .iter()
                .find(|(k, _)| k == "file")
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::Parse("numeric needs file=..".into()))?;
            let q0 = read_slice_csv(&resolve(base_dir, &file))?;
            Ok(KdvSolutionSpec::Numeric { q0 })
        }
        other => Err(Error::Parse(format!("unknown KdV spec '{other}'"))),
    }
}

fn resolve(base: &Path, file: &str) -> PathBuf {
    let p = PathBuf::from(file);
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

/// Initial mKdV data presets for the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Kink,
    Zero,
    Const(f64),
    Csv(PathBuf),
}

pub fn parse_initial_data(input: &str, base_dir: &Path) -> Result<InitialData> {
    let raw = parse_raw(input)?;
    match raw.name.as_str() {
        "kink" => {
            reject_unknown(&raw, &[])?;
            Ok(InitialData::Kink)
        }
        "zero" => {
            reject_unknown(&raw, &[])?;
            Ok(InitialData::Zero)
        }
        "const" => {
            reject_unknown(&raw, &["c"])?;
            Ok(InitialData::Const(get_f64(&raw, "c")?))
        }
        "csv" => {
            reject_unknown(&raw, &["file"])?;
            let file = raw
                .params
                .iter()
                .find(|(k, _)| k == "file")
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::Parse("csv needs file=..".into()))?;
            Ok(InitialData::Csv(resolve(base_dir, &file)))
        }
        other => Err(Error::Parse(format!("unknown initial-data preset '{other}'"))),
    }
}

impl InitialData {
    /// Materialize on the given axis (presets are closed forms; csv data is
    /// returned on its own axis and must cover the caller's needs).
    pub fn materialize(&self, axis: &XAxis) -> Result<Slice> {
        match self {
            InitialData::Kink => Slice::from_fn(axis, |x| -x.tanh()),
            InitialData::Zero => Ok(Slice::zeros(axis)),
            InitialData::Const(c) => {
                let c = *c;
                Slice::from_fn(axis, |_| c)
            }
            InitialData::Csv(path) => read_slice_csv(path),
        }
    }
}
