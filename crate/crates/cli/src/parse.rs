//! Text formats for insertions and points on the command line.

use narain_core::lattice::{LatticeVector, Model};
use narain_core::vertex::VertexSymbol;
use num_complex::Complex64;

/// Parses `;`-separated insertions: `1`, `e(1,0)`, `jl(0.5,0)`, `jr(0,1)`, `jl#0`, `jr#0`.
pub fn insertions(model: &Model, spec: &str) -> Result<Vec<VertexSymbol>, String> {
    spec.split(';').map(str::trim).filter(|s| !s.is_empty()).map(|tok| insertion(model, tok)).collect()
}

fn insertion(model: &Model, tok: &str) -> Result<VertexSymbol, String> {
    if tok == "1" {
        return Ok(VertexSymbol::vacuum(model));
    }
    if let Some((side, idx)) = tok.split_once('#') {
        let i: usize = idx.trim().parse().map_err(|_| format!("bad unit index in `{tok}`"))?;
        let res = match side.trim() {
            "jl" if i < model.left_dim() => VertexSymbol::current_left(model, &model.left_unit(i)),
            "jr" if i < model.right_dim() => VertexSymbol::current_right(model, &model.right_unit(i)),
            _ => return Err(format!("bad current `{tok}`")),
        };
        return res.map_err(|e| e.to_string());
    }
    let (head, rest) = tok.split_once('(').ok_or_else(|| format!("cannot parse insertion `{tok}`"))?;
    let body = rest.strip_suffix(')').ok_or_else(|| format!("missing `)` in `{tok}`"))?;
    let fields: Vec<&str> = body.split(',').map(str::trim).collect();
    if fields.len() != model.rank() {
        return Err(format!("`{tok}` has {} components, the lattice has rank {}", fields.len(), model.rank()));
    }
    match head.trim() {
        "e" => {
            let v: Result<Vec<i64>, _> = fields.iter().map(|s| s.parse::<i64>()).collect();
            Ok(VertexSymbol::exponential(model, &LatticeVector(v.map_err(|_| format!("bad charge in `{tok}`"))?)))
        }
        "jl" | "jr" => {
            let h: Vec<f64> = fields
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| format!("bad vector in `{tok}`"))?;
            let res = if head.trim() == "jl" {
                VertexSymbol::current_left(model, &h)
            } else {
                VertexSymbol::current_right(model, &h)
            };
            res.map_err(|e| e.to_string())
        }
        other => Err(format!("unknown insertion kind `{other}`")),
    }
}

/// Parses `;`-separated points written as `re,im`.
pub fn points(spec: &str) -> Result<Vec<Complex64>, String> {
    spec.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| {
            let (re, im) = p.split_once(',').unwrap_or((p, "0"));
            match (re.trim().parse(), im.trim().parse()) {
                (Ok(re), Ok(im)) => Ok(Complex64::new(re, im)),
                _ => Err(format!("cannot parse point `{p}`")),
            }
        })
        .collect()
}

/// Parses a `key=value` tolerance override.
pub fn tol_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected <check>=<value>, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("bad tolerance value `{v}`"))?;
    if !(v > 0.0) {
        return Err(format!("tolerance for `{k}` must be positive"));
    }
    Ok((k.trim().to_string(), v))
}

/// Shortest round-trip decimal, switching to exponent form outside `[1e-5, 1e16)`.
pub fn float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { "-" } else { "+" };
    format!("{}{sign}{}i", float(z.re), float(z.im.abs()))
}
