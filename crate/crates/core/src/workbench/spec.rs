//! Manifold spec files and the built-in examples.
//!
//! ```text
//! # comment
//! name: kenmotsu-s7
//! coords: x y z
//! domain: z > 0
//! frame: e1 = z, 0, 0
//! frame: e2 = 0, z, 0
//! frame: e3 = 0, 0, -z
//! metric: orthonormal          # or repeated `metric: g12 = <expr>` (i <= j)
//! phi: 0 1 0 / -1 0 0 / 0 0 0  # rows of [φ]^i_j
//! xi: 0, 0, 1
//! points: 1 1 1; 0.5 2 3
//! ```
//!
//! `structure: c i j k = <expr>` sets `c^k_ij`, the `e_k` component of
//! `[e_i, e_j]`, and replaces the `frame:` lines. Missing antisymmetric partners
//! are filled in; unset metric entries default to `δ_ij`.

use std::path::Path;

use ndarray::Array3;

use crate::contact::ContactSpec;
use crate::expr::{parse, Chart, Constraint, Expr, ExprError};
use crate::frame::{FrameSpec, GeometryError, MetricSpec};
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("validation failed ({rule}): {message}")]
    Validation { rule: &'static str, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("unknown built-in manifold `{0}` (known: {known})", known = BUILTINS.join(", "))]
    UnknownBuiltin(String),
}

fn validation(rule: &'static str, message: impl Into<String>) -> SpecError {
    SpecError::Validation { rule, message: message.into() }
}

impl From<GeometryError> for SpecError {
    fn from(e: GeometryError) -> Self {
        let rule = match e {
            GeometryError::JacobiViolated { .. } => "jacobi",
            GeometryError::NotAntisymmetric { .. } => "antisymmetry",
            GeometryError::NonConstantStructure(_) => "constant-structure",
            GeometryError::DimensionMismatch { .. } => "dimension",
            _ => "geometry",
        };
        validation(rule, e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    pub name: String,
    pub frame: FrameSpec,
    pub contact: Option<ContactSpec>,
    /// Explicit evaluation points (constant expressions); empty means sample.
    pub points: Vec<Vec<Expr>>,
}

impl ManifoldSpec {
    pub fn chart(&self) -> &Chart {
        &self.frame.chart
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// Explicit points evaluated in scalar type `S`.
    pub fn explicit_points<S: Scalar>(&self) -> Result<Vec<Vec<S>>, ExprError> {
        self.points.iter().map(|p| p.iter().map(|e| e.eval_constant::<S>()).collect()).collect()
    }
}

pub const BUILTINS: [&str; 5] = ["kenmotsu-s7", "flat3", "hyperbolic3", "sphere3", "kenmotsu-warped"];

/// Loads `target` as a spec file if such a file exists, else as a built-in name.
pub fn resolve(target: &str) -> Result<ManifoldSpec, SpecError> {
    let path = Path::new(target);
    if path.is_file() {
        load_spec(path)
    } else {
        builtin(target)
    }
}

pub fn load_spec(path: &Path) -> Result<ManifoldSpec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpecError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_spec(&text)
}

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
    /// 1-based column where `value` starts.
    column: usize,
}

fn leading_ws(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

pub fn parse_spec(text: &str) -> Result<ManifoldSpec, SpecError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once(':') else {
            return Err(SpecError::Parse { line, column: leading_ws(content) + 1, message: "expected `key: value`".into() });
        };
        let key_trim = key.trim();
        const KEYS: [&str; 9] = ["name", "coords", "domain", "frame", "metric", "structure", "xi", "phi", "points"];
        if !KEYS.contains(&key_trim) {
            return Err(SpecError::Parse { line, column: leading_ws(key) + 1, message: format!("unknown key `{key_trim}`") });
        }
        let column = key.len() + 2 + leading_ws(value);
        entries.push(Entry { line, key: key_trim, value: value.trim(), column });
    }
    SpecBuilder::from_entries(&entries)
}

/// Parses `text` found at (`line`, `column`) as an expression, mapping offsets to columns.
fn expr_at(text: &str, line: usize, column: usize, chart: &Chart) -> Result<Expr, SpecError> {
    let lead = leading_ws(text);
    let trimmed = text.trim();
    let at = |offset: usize| column + lead + offset;
    if trimmed.is_empty() {
        return Err(SpecError::Parse { line, column: at(0), message: "missing expression".into() });
    }
    parse(trimmed, chart).map_err(|e| match e {
        ExprError::Syntax { offset, message } => SpecError::Parse { line, column: at(offset), message },
        ExprError::UnknownIdentifier { name, offset } => {
            SpecError::Parse { line, column: at(offset), message: format!("unknown identifier `{name}`") }
        }
        ExprError::NonIntegerExponent { offset } => {
            SpecError::Parse { line, column: at(offset), message: "exponent must be an integer constant".into() }
        }
        other => SpecError::Parse { line, column: at(0), message: other.to_string() },
    })
}

/// Splits on `sep`, yielding each piece with its column offset relative to `text`.
fn split_cols(text: &str, sep: char) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if c == sep {
            out.push((&text[start..i], start));
            start = i + c.len_utf8();
        }
    }
    out.push((&text[start..], start));
    out
}

fn split_ws_cols(text: &str) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((&text[s..i], s));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((&text[s..], s));
    }
    out
}

fn parse_index(text: &str, n: usize, line: usize, column: usize) -> Result<usize, SpecError> {
    match text.parse::<usize>() {
        Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
        _ => Err(SpecError::Parse { line, column, message: format!("index `{text}` must be between 1 and {n}") }),
    }
}

/// Assembles `c^k_ij` from `((i, j, k), value)` entries, filling `c^k_ji = −c^k_ij`.
pub fn fill_structure(n: usize, entries: &[((usize, usize, usize), Expr)]) -> Result<Array3<Expr>, SpecError> {
    let mut c: Array3<Option<Expr>> = Array3::from_elem((n, n, n), None);
    let value = |e: &Expr| {
        e.eval_constant::<Rational>()
            .map_err(|_| validation("constant-structure", format!("structure constant `{e}` is not an exact constant")))
    };
    for ((i, j, k), e) in entries {
        let (i, j, k) = (*i, *j, *k);
        if i == j && !value(e)?.is_zero() {
            return Err(validation("antisymmetry", format!("c^{}_{}{} must vanish", k + 1, i + 1, j + 1)));
        }
        if let Some(prev) = &c[[k, i, j]] {
            return Err(validation("duplicate", format!("c {} {} {} given twice (`{prev}` and `{e}`)", i + 1, j + 1, k + 1)));
        }
        c[[k, i, j]] = Some(e.clone());
    }
    for k in 0..n {
        for i in 0..n {
            for j in (i + 1)..n {
                match (c[[k, i, j]].clone(), c[[k, j, i]].clone()) {
                    (Some(a), Some(b)) => {
                        if value(&a)? != -value(&b)? {
                            return Err(validation(
                                "antisymmetry",
                                format!("c {} {} {} = {a} but c {} {} {} = {b}", i + 1, j + 1, k + 1, j + 1, i + 1, k + 1),
                            ));
                        }
                    }
                    (Some(a), None) => c[[k, j, i]] = Some(Expr::Neg(Box::new(a))),
                    (None, Some(b)) => c[[k, i, j]] = Some(Expr::Neg(Box::new(b))),
                    (None, None) => {}
                }
            }
        }
    }
    Ok(c.map(|e| e.clone().unwrap_or_else(|| Expr::int(0))))
}

struct SpecBuilder;

impl SpecBuilder {
    fn from_entries(entries: &[Entry<'_>]) -> Result<ManifoldSpec, SpecError> {
        let single = |key: &str| -> Result<Option<&Entry<'_>>, SpecError> {
            let mut found = entries.iter().filter(|e| e.key == key);
            let first = found.next();
            if let Some(dup) = found.next() {
                return Err(SpecError::Parse { line: dup.line, column: 1, message: format!("`{key}` given more than once") });
            }
            Ok(first)
        };
        let of = |key: &'static str| entries.iter().filter(move |e| e.key == key);

        let name = single("name")?.map(|e| e.value.to_string()).unwrap_or_else(|| "unnamed".into());
        let coords = single("coords")?.ok_or_else(|| validation("coords-required", "missing `coords:` line"))?;
        let mut chart = Chart::new(coords.value.split_whitespace()).map_err(|e| SpecError::Parse {
            line: coords.line,
            column: coords.column,
            message: e.to_string(),
        })?;
        let n = chart.dim();
        if n == 0 {
            return Err(validation("coords-required", "`coords:` names no coordinates"));
        }
        for d in of("domain") {
            let c = Constraint::parse(d.value, &chart).map_err(|e| match e {
                ExprError::Syntax { offset, message } => SpecError::Parse { line: d.line, column: d.column + offset, message },
                other => SpecError::Parse { line: d.line, column: d.column, message: other.to_string() },
            })?;
            chart.constraints.push(c);
        }

        let frame_lines: Vec<_> = of("frame").collect();
        let structure_lines: Vec<_> = of("structure").collect();
        let mut frame = match (frame_lines.is_empty(), structure_lines.is_empty()) {
            (false, false) => return Err(validation("frame-structure-exclusive", "give either `frame:` or `structure:` lines, not both")),
            (true, true) => return Err(validation("frame-required", "no `frame:` or `structure:` lines")),
            (false, true) => {
                let mut rows: Vec<Option<Vec<Expr>>> = vec![None; n];
                for f in &frame_lines {
                    let (lhs, rhs) = f.value.split_once('=').ok_or_else(|| SpecError::Parse {
                        line: f.line,
                        column: f.column,
                        message: "expected `e<i> = <expr>, ...`".into(),
                    })?;
                    let label = lhs.trim();
                    let idx_text = label.strip_prefix('e').ok_or_else(|| SpecError::Parse {
                        line: f.line,
                        column: f.column,
                        message: format!("expected a frame label like `e1`, found `{label}`"),
                    })?;
                    let i = parse_index(idx_text, n, f.line, f.column)?;
                    if rows[i].is_some() {
                        return Err(validation("frame-rows", format!("frame vector e{} given twice", i + 1)));
                    }
                    let base = f.column + lhs.len() + 1;
                    let parts = split_cols(rhs, ',');
                    if parts.len() != n {
                        return Err(SpecError::Parse {
                            line: f.line,
                            column: base,
                            message: format!("frame vector needs {n} coefficients, found {}", parts.len()),
                        });
                    }
                    rows[i] = Some(parts.iter().map(|(t, off)| expr_at(t, f.line, base + off, &chart)).collect::<Result<_, _>>()?);
                }
                let rows = rows
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| r.ok_or_else(|| validation("frame-rows", format!("frame vector e{} missing", i + 1))))
                    .collect::<Result<Vec<_>, _>>()?;
                FrameSpec::chart_frame(chart.clone(), rows)?
            }
            (true, false) => {
                let mut items = Vec::new();
                for s in &structure_lines {
                    let (lhs, rhs) = s.value.split_once('=').ok_or_else(|| SpecError::Parse {
                        line: s.line,
                        column: s.column,
                        message: "expected `c i j k = <expr>`".into(),
                    })?;
                    let toks = split_ws_cols(lhs);
                    if toks.len() != 4 || toks[0].0 != "c" {
                        return Err(SpecError::Parse { line: s.line, column: s.column, message: "expected `c i j k = <expr>`".into() });
                    }
                    let idx = |t: usize| parse_index(toks[t].0, n, s.line, s.column + toks[t].1);
                    let (i, j, k) = (idx(1)?, idx(2)?, idx(3)?);
                    let e = expr_at(rhs, s.line, s.column + lhs.len() + 1, &chart)?;
                    items.push(((i, j, k), e));
                }
                FrameSpec::structure_constants(chart.clone(), fill_structure(n, &items)?)?
            }
        };

        let metric_lines: Vec<_> = of("metric").collect();
        if !metric_lines.is_empty() {
            if metric_lines.iter().any(|m| m.value == "orthonormal") {
                if metric_lines.len() > 1 {
                    return Err(validation("metric", "`metric: orthonormal` cannot be combined with entries"));
                }
            } else {
                let mut rows: Vec<Vec<Option<Expr>>> = vec![vec![None; n]; n];
                for m in &metric_lines {
                    let (lhs, rhs) = m.value.split_once('=').ok_or_else(|| SpecError::Parse {
                        line: m.line,
                        column: m.column,
                        message: "expected `metric: orthonormal` or `metric: gij = <expr>`".into(),
                    })?;
                    let label = lhs.trim();
                    let digits: Vec<char> = label.strip_prefix('g').unwrap_or("").chars().collect();
                    if digits.len() != 2 {
                        return Err(SpecError::Parse {
                            line: m.line,
                            column: m.column,
                            message: format!("expected a metric entry like `g12`, found `{label}`"),
                        });
                    }
                    let i = parse_index(&digits[0].to_string(), n, m.line, m.column + 1)?;
                    let j = parse_index(&digits[1].to_string(), n, m.line, m.column + 2)?;
                    if i > j {
                        return Err(validation("metric", format!("give g{}{} as g{}{} (i <= j)", i + 1, j + 1, j + 1, i + 1)));
                    }
                    if rows[i][j].is_some() {
                        return Err(validation("metric", format!("g{}{} given twice", i + 1, j + 1)));
                    }
                    rows[i][j] = Some(expr_at(rhs, m.line, m.column + lhs.len() + 1, &chart)?);
                }
                let rows = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                                rows[a][b].clone().unwrap_or_else(|| Expr::int(i64::from(i == j)))
                            })
                            .collect()
                    })
                    .collect();
                frame = frame.with_metric(MetricSpec::Entries(rows))?;
            }
        }

        let contact = match (single("phi")?, single("xi")?) {
            (None, None) => None,
            (Some(_), None) | (None, Some(_)) => return Err(validation("phi-xi-together", "`phi:` and `xi:` must be given together")),
            (Some(p), Some(x)) => {
                let rows = split_cols(p.value, '/');
                if rows.len() != n {
                    return Err(validation("phi-shape", format!("`phi:` needs {n} rows, found {}", rows.len())));
                }
                let mut phi = Vec::with_capacity(n);
                for (row, off) in rows {
                    let items = split_ws_cols(row);
                    if items.len() != n {
                        return Err(validation("phi-shape", format!("each `phi:` row needs {n} entries, found {}", items.len())));
                    }
                    phi.push(items.iter().map(|(t, o)| expr_at(t, p.line, p.column + off + o, &chart)).collect::<Result<Vec<_>, _>>()?);
                }
                let parts = split_cols(x.value, ',');
                if parts.len() != n {
                    return Err(validation("xi-shape", format!("`xi:` needs {n} components, found {}", parts.len())));
                }
                let xi = parts.iter().map(|(t, o)| expr_at(t, x.line, x.column + o, &chart)).collect::<Result<Vec<_>, _>>()?;
                Some(ContactSpec { phi, xi })
            }
        };

        let mut points = Vec::new();
        for p in of("points") {
            for (chunk, off) in split_cols(p.value, ';') {
                if chunk.trim().is_empty() {
                    continue;
                }
                let items = split_ws_cols(chunk);
                if items.len() != n {
                    return Err(validation("points-shape", format!("point `{}` needs {n} coordinates", chunk.trim())));
                }
                let mut point = Vec::with_capacity(n);
                for (t, o) in items {
                    let e = expr_at(t, p.line, p.column + off + o, &chart)?;
                    if !e.is_constant() {
                        return Err(validation("points-constant", format!("point coordinate `{t}` is not a constant")));
                    }
                    point.push(e);
                }
                points.push(point);
            }
        }

        Ok(ManifoldSpec { name, frame, contact, points })
    }
}

fn ex(chart: &Chart, text: &str) -> Expr {
    parse(text, chart).expect("built-in expression parses")
}

fn rows(chart: &Chart, rows: &[[&str; 3]; 3]) -> Vec<Vec<Expr>> {
    rows.iter().map(|r| r.iter().map(|t| ex(chart, t)).collect()).collect()
}

/// `φ e1 = −e2`, `φ e2 = e1`, `φ e3 = 0`, `ξ = e3`.
fn standard_contact(chart: &Chart) -> ContactSpec {
    ContactSpec {
        phi: rows(chart, &[["0", "1", "0"], ["-1", "0", "0"], ["0", "0", "0"]]),
        xi: vec![ex(chart, "0"), ex(chart, "0"), ex(chart, "1")],
    }
}

pub fn builtin(name: &str) -> Result<ManifoldSpec, SpecError> {
    let xyz = Chart::new(["x", "y", "z"]).expect("valid names");
    let upper = || xyz.clone().with_constraint("z > 0").expect("valid constraint");
    let (frame, contact) = match name {
        "kenmotsu-s7" => {
            let chart = upper();
            let f = FrameSpec::chart_frame(chart.clone(), rows(&chart, &[["z", "0", "0"], ["0", "z", "0"], ["0", "0", "-z"]]))?;
            (f, Some(standard_contact(&chart)))
        }
        "flat3" => {
            let f = FrameSpec::chart_frame(xyz.clone(), rows(&xyz, &[["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]))?;
            (f, Some(standard_contact(&xyz)))
        }
        "hyperbolic3" => {
            let chart = upper();
            (FrameSpec::chart_frame(chart.clone(), rows(&chart, &[["z", "0", "0"], ["0", "z", "0"], ["0", "0", "z"]]))?, None)
        }
        "sphere3" => {
            let two = ex(&xyz, "2");
            let c = fill_structure(3, &[((0, 1, 2), two.clone()), ((1, 2, 0), two.clone()), ((2, 0, 1), two)])?;
            (FrameSpec::structure_constants(xyz.clone(), c)?, Some(standard_contact(&xyz)))
        }
        "kenmotsu-warped" => {
            let chart = Chart::new(["x", "y", "t"]).expect("valid names");
            let h = "exp(-t)*(1 + (x^2 + y^2)/4)";
            let f = FrameSpec::chart_frame(chart.clone(), rows(&chart, &[[h, "0", "0"], ["0", h, "0"], ["0", "0", "1"]]))?;
            (f, Some(standard_contact(&chart)))
        }
        other => return Err(SpecError::UnknownBuiltin(other.to_string())),
    };
    Ok(ManifoldSpec { name: name.to_string(), frame, contact, points: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    const S7: &str = include_str!("../../specs/kenmotsu-s7.spec");

    #[test]
    fn bundled_file_matches_builtin() {
        assert_eq!(parse_spec(S7).unwrap(), builtin("kenmotsu-s7").unwrap());
    }

    #[test]
    fn frame_and_structure_are_exclusive() {
        let text = "coords: x y z\nframe: e1 = 1, 0, 0\nframe: e2 = 0, 1, 0\nframe: e3 = 0, 0, 1\nstructure: c 1 2 3 = 1\n";
        assert!(matches!(parse_spec(text), Err(SpecError::Validation { rule: "frame-structure-exclusive", .. })));
    }

    #[test]
    fn jacobi_violation_is_named() {
        let text = "coords: x y z\nstructure: c 1 2 3 = 1\nstructure: c 1 3 1 = 1\n";
        assert!(matches!(parse_spec(text), Err(SpecError::Validation { rule: "jacobi", .. })));
    }

    #[test]
    fn inconsistent_partner_is_rejected() {
        let text = "coords: x y z\nstructure: c 1 2 3 = 1\nstructure: c 2 1 3 = 1\n";
        assert!(matches!(parse_spec(text), Err(SpecError::Validation { rule: "antisymmetry", .. })));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let text = "coords: x y z\nframe: e1 = z, 0, 0\nframe: e2 = 0, w, 0\nframe: e3 = 0, 0, 1\n";
        match parse_spec(text) {
            Err(SpecError::Parse { line, column, .. }) => assert_eq!((line, column), (3, 16)),
            other => panic!("{other:?}"),
        }
        match parse_spec("coords: x y z\nbogus: 1\n") {
            Err(SpecError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn phi_requires_xi() {
        let text = "coords: x y z\nstructure: c 1 2 3 = 0\nphi: 0 1 0 / -1 0 0 / 0 0 0\n";
        assert!(matches!(parse_spec(text), Err(SpecError::Validation { rule: "phi-xi-together", .. })));
    }

    #[test]
    fn metric_entries_default_to_identity() {
        let text = "coords: x y z\nframe: e1 = 1, 0, 0\nframe: e2 = 0, 1, 0\nframe: e3 = 0, 0, 1\nmetric: g11 = 2\nmetric: g13 = 1/2\n";
        let spec = parse_spec(text).unwrap();
        let MetricSpec::Entries(rows) = &spec.frame.metric else { panic!() };
        assert_eq!(rows[1][1], Expr::int(1));
        assert_eq!(rows[2][0], rows[0][2]);
    }

    #[test]
    fn explicit_points() {
        let text = "coords: x y z\nstructure: c 1 2 3 = 0\npoints: 1 1 1; 0.5 2 -3\n";
        let spec = parse_spec(text).unwrap();
        let pts: Vec<Vec<f64>> = spec.explicit_points().unwrap();
        assert_eq!(pts, vec![vec![1.0, 1.0, 1.0], vec![0.5, 2.0, -3.0]]);
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(builtin("torus"), Err(SpecError::UnknownBuiltin(_))));
        for name in BUILTINS {
            builtin(name).unwrap();
        }
    }
}
