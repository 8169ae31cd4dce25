//! Text forms for systems, points, open sets and exact numbers.
//!
//! Products are written with `|` between factors in all three grammars.

use std::path::Path;

use dc1lab::arith::parse::{parse_quadratic, parse_ratio};
use dc1lab::construct::ScrambledTupleSpec;
use dc1lab::furstenberg::IndexSet;
use dc1lab::systems::torus::Matrix;
use dc1lab::{BigDistance, BigPoint, BigQuadratic, BigSystem, Distance, OpenSetSpec, Point, SymbolicSequence, SystemSpec};
use num_bigint::BigInt;
use num_rational::Ratio;
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::CliError;
use crate::report::SCHEMA;

type Res<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn quadratic(s: &str) -> Res<BigQuadratic> {
    parse_quadratic::<BigInt>(s).map_err(|e| usage(format!("number {s:?}: {e}")))
}

/// `p/q`, `2^-k`, or any nonnegative element of `Q(√5)`.
pub fn distance(s: &str) -> Res<BigDistance> {
    let t = s.trim();
    if let Some(k) = t.strip_prefix("2^-") {
        let k: i64 = k.parse().map_err(|_| usage(format!("distance {s:?}: bad exponent")))?;
        return Ok(if k == 0 { Distance::one() } else { Distance::Pow2(k) });
    }
    let q = quadratic(t)?;
    if q < BigQuadratic::zero() {
        return Err(usage(format!("distance {s:?} is negative")));
    }
    Ok(Distance::from_quadratic(q))
}

/// Comma-separated distances, e.g. `1/8,1/32,2^-8`.
pub fn distance_list(s: &str) -> Res<Vec<BigDistance>> {
    s.split(',').map(distance).collect()
}

pub fn ratio_u64(s: &str) -> Res<Ratio<u64>> {
    let r = parse_ratio::<i64>(s).map_err(|e| usage(format!("{s:?}: {e}")))?;
    if *r.numer() < 0 || *r.denom() < 0 {
        return Err(usage(format!("{s:?} must be nonnegative")));
    }
    Ok(Ratio::new(*r.numer() as u64, *r.denom() as u64))
}

/// Splits on `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn suffix_u32(s: &str, prefix: &str) -> Option<Res<u32>> {
    s.strip_prefix(prefix).map(|n| n.parse::<u32>().map_err(|_| usage(format!("system {s:?}: expected {prefix}N"))))
}

/// System aliases:
/// `fullshiftN`, `rotation-golden`, `rotation:ANGLE`, `odometerN`, `catmap`,
/// `torus:a,b,c,d`, `orbit:POINT@SYSTEM`, `points:P1;P2@SYSTEM`,
/// products `A|B`, or a path to a JSON file.
pub fn system(s: &str) -> Res<BigSystem> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("orbit:") {
        let (p, sys) = rest.split_once('@').ok_or_else(|| usage(format!("{s:?}: expected orbit:POINT@SYSTEM")))?;
        let parent = system(sys)?;
        let seed = point(&parent, p)?;
        return Ok(SystemSpec::orbit_of(parent, seed)?);
    }
    if let Some(rest) = s.strip_prefix("points:") {
        let (ps, sys) = rest.split_once('@').ok_or_else(|| usage(format!("{s:?}: expected points:P1;P2@SYSTEM")))?;
        let parent = system(sys)?;
        let pts = ps.split(';').map(|p| point(&parent, p)).collect::<Res<Vec<_>>>()?;
        return Ok(SystemSpec::restrict(parent, pts)?);
    }
    let factors = split_top(s, '|');
    if factors.len() > 1 {
        return Ok(SystemSpec::product(factors.into_iter().map(system).collect::<Res<_>>()?));
    }
    if let Some(n) = suffix_u32(s, "fullshift") {
        return Ok(SystemSpec::full_shift(n?));
    }
    if let Some(n) = suffix_u32(s, "odometer") {
        return Ok(SystemSpec::odometer(n?));
    }
    match s {
        "rotation-golden" | "golden" => return Ok(SystemSpec::golden_rotation()),
        "catmap" | "cat" => return Ok(SystemSpec::cat_map()),
        _ => {}
    }
    if let Some(a) = s.strip_prefix("rotation:") {
        return Ok(SystemSpec::rotation(quadratic(a)?.fract()));
    }
    if let Some(m) = s.strip_prefix("torus:") {
        let v = m.split(',').map(|x| x.trim().parse::<i64>()).collect::<Result<Vec<_>, _>>();
        let v = v.ok().filter(|v| v.len() == 4).ok_or_else(|| usage(format!("{s:?}: expected torus:a,b,c,d")))?;
        let matrix: Matrix = [[v[0], v[1]], [v[2], v[3]]];
        return Ok(SystemSpec::TorusAutomorphism { matrix });
    }
    if Path::new(s).is_file() {
        return load_json(Path::new(s), "system");
    }
    Err(usage(format!("unknown system {s:?}")))
}

/// Points by system kind: shift and odometer points as `101(0)`, circle
/// points as numbers, torus points as `x,y`, product points as `p|q`, or a
/// JSON literal starting with `{`.
pub fn point(spec: &BigSystem, s: &str) -> Res<BigPoint> {
    let s = s.trim();
    let p = if s.starts_with('{') {
        serde_json::from_str(s).map_err(|e| json_error("point literal", &e))?
    } else {
        match spec.ambient() {
            SystemSpec::FullShift { symbols } | SystemSpec::Sft { symbols, .. } => Point::shift(SymbolicSequence::parse(*symbols, s)?),
            SystemSpec::Odometer { base } => Point::odometer(SymbolicSequence::parse(*base, s)?),
            SystemSpec::CircleRotation { .. } => Point::circle(quadratic(s)?.fract()),
            SystemSpec::TorusAutomorphism { .. } => {
                let (x, y) = s.split_once(',').ok_or_else(|| usage(format!("torus point {s:?}: expected x,y")))?;
                Point::torus(quadratic(x)?.fract(), quadratic(y)?.fract())
            }
            SystemSpec::Product { factors } => {
                let parts = split_top(s, '|');
                if parts.len() != factors.len() {
                    return Err(usage(format!("point {s:?} has {} components, system has {}", parts.len(), factors.len())));
                }
                Point::product(factors.iter().zip(parts).map(|(f, p)| point(f, p)).collect::<Res<_>>()?)
            }
            SystemSpec::Restriction { .. } => unreachable!("ambient is never a restriction"),
        }
    };
    spec.check_point(&p)?;
    Ok(p)
}

/// Open sets: `cyl:WORD` or `cyl:WORD@OFFSET`, `digits:WORD`, `arc:C:R`,
/// `box:X:Y:R`, products `A|B`, or a JSON literal.
pub fn open_set(s: &str) -> Res<OpenSetSpec<BigInt>> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| json_error("open set literal", &e));
    }
    let parts = split_top(s, '|');
    if parts.len() > 1 {
        return Ok(OpenSetSpec::Product { components: parts.into_iter().map(open_set).collect::<Res<_>>()? });
    }
    let word = |w: &str| -> Res<Vec<u8>> {
        let syms: Result<Vec<u8>, _> = if w.contains(',') {
            w.split(',').map(|t| t.trim().parse::<u8>().map_err(|_| ())).collect()
        } else {
            w.chars().map(|c| c.to_digit(10).map(|d| d as u8).ok_or(())).collect()
        };
        syms.map_err(|_| usage(format!("invalid word {w:?}")))
    };
    let fields: Vec<&str> = s.split(':').collect();
    match fields.as_slice() {
        ["cyl", w] => {
            let (w, offset) = match w.split_once('@') {
                Some((w, o)) => (w, o.parse::<u64>().map_err(|_| usage(format!("bad offset in {s:?}")))?),
                None => (*w, 0),
            };
            Ok(OpenSetSpec::Cylinder { word: word(w)?, offset })
        }
        ["digits", w] => Ok(OpenSetSpec::DigitCylinder { digits: word(w)? }),
        ["arc", c, r] => Ok(OpenSetSpec::arc(quadratic(c)?, quadratic(r)?)),
        ["box", x, y, r] => Ok(OpenSetSpec::square(quadratic(x)?, quadratic(y)?, quadratic(r)?)),
        _ => Err(usage(format!("unknown open set {s:?}"))),
    }
}

pub fn json_error(what: &str, e: &serde_json::Error) -> CliError {
    CliError::Json { source: what.to_string(), line: e.line(), column: e.column(), message: e.to_string() }
}

/// Reads a JSON file holding either a `dc1lab/1` report (its `result` is
/// used) or a bare value.
pub fn read_value(path: &Path) -> Res<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| json_error(&path.display().to_string(), &e))?;
    match v.get("schema") {
        Some(Value::String(s)) if s == SCHEMA => Ok(v.get("result").cloned().unwrap_or(Value::Null)),
        Some(other) => Err(usage(format!("{}: unsupported schema {other}, expected {SCHEMA:?}", path.display()))),
        None => Ok(v),
    }
}

fn from_value<D: DeserializeOwned>(path: &Path, what: &str, v: Value) -> Res<D> {
    serde_json::from_value(v).map_err(|e| usage(format!("{}: not a valid {what}: {e}", path.display())))
}

pub fn load_json<D: DeserializeOwned>(path: &Path, what: &str) -> Res<D> {
    from_value(path, what, read_value(path)?)
}

/// A tuple file: the output of `construct-tuple`, a bare tuple spec, or a
/// list of points (which then needs an explicit system).
pub enum TupleInput {
    Constructed(ScrambledTupleSpec),
    Points(Vec<BigPoint>),
}

pub fn load_tuple(path: &Path) -> Res<TupleInput> {
    let mut v = read_value(path)?;
    if let Some(t) = v.get_mut("tuple") {
        v = t.take();
    }
    if v.is_array() {
        return Ok(TupleInput::Points(from_value(path, "point list", v)?));
    }
    Ok(TupleInput::Constructed(from_value(path, "tuple", v)?))
}

/// An index set file: `{"horizon", "members"}` or a bare member list,
/// whose horizon then defaults to one past the largest member.
pub fn load_index_set(path: &Path, horizon: Option<u64>) -> Res<IndexSet> {
    let v = read_value(path)?;
    if let Value::Array(_) = v {
        let members: Vec<u64> = from_value(path, "member list", v)?;
        let h = horizon.unwrap_or_else(|| members.iter().max().map_or(1, |m| m + 1));
        return Ok(IndexSet::new(h, members)?);
    }
    from_value(path, "index set", v)
}
