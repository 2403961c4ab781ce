//! JSON wire format for map descriptors.
//!
//! ```json
//! {"domain": "disk"|"halfplane"|"ball"|"siegel", "N": 1, "expr": <node>}
//! ```
//! with `<node> = {"op": <name>, "args": [<node>...], "params": {...}}`.
//! Complex constants are `{"re": r, "im": s}`; matrices are row-major arrays
//! of complex entries and are checked for unitarity (1e-10) on load.
//!
//! Operation names: `constant`, `variable`, `add`, `multiply`, `divide`,
//! `ipow` (param `k`), `sqrt`, `mobius` (params `a,b,c,d`), `compose`
//! (args `[outer, inner]`), `siegel_translation` (param `b`),
//! `siegel_dilation` (param `factor`), `unitary` (param `matrix`),
//! `psi_automorphism` (params `a`, `matrix`).

use super::expr::Expr;
use super::{Domain, MapDescriptor};
use crate::error::{Error, Result};
use crate::linalg::{norm_sq, CMatrix, CVector};
use crate::scalar::{Real, C};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SchemaNode {
    op: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    args: Vec<SchemaNode>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    params: Map<String, Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SchemaDescriptor {
    domain: String,
    #[serde(rename = "N")]
    n: usize,
    expr: SchemaNode,
}

pub fn from_json<T: Real>(s: &str) -> Result<MapDescriptor<T>> {
    let parsed: SchemaDescriptor =
        serde_json::from_str(s).map_err(|e| Error::Descriptor(format!("bad JSON: {e}")))?;
    if parsed.n < 1 {
        return Err(Error::Descriptor("N must be >= 1".into()));
    }
    let domain = match parsed.domain.as_str() {
        "disk" => {
            require_dim(parsed.n, 1, "disk")?;
            Domain::Disk
        }
        "halfplane" => {
            require_dim(parsed.n, 1, "halfplane")?;
            Domain::HalfPlane
        }
        "ball" => Domain::Ball(parsed.n),
        "siegel" => Domain::Siegel(parsed.n),
        other => return Err(Error::Descriptor(format!("unknown domain '{other}'"))),
    };
    let expr = node_to_expr(&parsed.expr, domain)?;
    MapDescriptor::new(domain, expr)
}

fn require_dim(n: usize, want: usize, name: &str) -> Result<()> {
    if n != want {
        return Err(Error::Descriptor(format!(
            "domain '{name}' requires N = {want}, got {n}"
        )));
    }
    Ok(())
}

pub fn to_json<T: Real>(m: &MapDescriptor<T>) -> String {
    let d = SchemaDescriptor {
        domain: m.domain().name().to_string(),
        n: m.domain().dim(),
        expr: expr_to_node(m.expr()),
    };
    serde_json::to_string_pretty(&d).expect("descriptor serialization")
}

fn complex_to_value<T: Real>(z: C<T>) -> Value {
    json!({ "re": z.re.as_f64(), "im": z.im.as_f64() })
}

fn vector_to_value<T: Real>(v: &[C<T>]) -> Value {
    Value::Array(v.iter().map(|z| complex_to_value(*z)).collect())
}

fn matrix_to_value<T: Real>(m: &CMatrix<T>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| {
                Value::Array(
                    (0..m.cols())
                        .map(|j| complex_to_value(m.get(i, j)))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn expr_to_node<T: Real>(e: &Expr<T>) -> SchemaNode {
    let plain = |op: &str, args: Vec<SchemaNode>| SchemaNode {
        op: op.to_string(),
        args,
        params: Map::new(),
    };
    match e {
        Expr::Var => plain("variable", vec![]),
        Expr::Const(v) => {
            let mut params = Map::new();
            let value = if v.len() == 1 {
                complex_to_value(v[0])
            } else {
                vector_to_value(v)
            };
            params.insert("value".into(), value);
            SchemaNode {
                op: "constant".into(),
                args: vec![],
                params,
            }
        }
        Expr::Add(a, b) => plain("add", vec![expr_to_node(a), expr_to_node(b)]),
        Expr::Mul(a, b) => plain("multiply", vec![expr_to_node(a), expr_to_node(b)]),
        Expr::Div(a, b) => plain("divide", vec![expr_to_node(a), expr_to_node(b)]),
        Expr::Powi(a, k) => {
            let mut params = Map::new();
            params.insert("k".into(), json!(k));
            SchemaNode {
                op: "ipow".into(),
                args: vec![expr_to_node(a)],
                params,
            }
        }
        Expr::Sqrt(a) => plain("sqrt", vec![expr_to_node(a)]),
        Expr::Mobius { a, b, c, d, arg } => {
            let mut params = Map::new();
            params.insert("a".into(), complex_to_value(*a));
            params.insert("b".into(), complex_to_value(*b));
            params.insert("c".into(), complex_to_value(*c));
            params.insert("d".into(), complex_to_value(*d));
            SchemaNode {
                op: "mobius".into(),
                args: vec![expr_to_node(arg)],
                params,
            }
        }
        Expr::Compose { outer, inner } => {
            plain("compose", vec![expr_to_node(outer), expr_to_node(inner)])
        }
        Expr::SiegelTranslate { b, arg } => {
            let mut params = Map::new();
            params.insert("b".into(), vector_to_value(b));
            SchemaNode {
                op: "siegel_translation".into(),
                args: vec![expr_to_node(arg)],
                params,
            }
        }
        Expr::SiegelDilate { factor, arg } => {
            let mut params = Map::new();
            params.insert("factor".into(), json!(factor.as_f64()));
            SchemaNode {
                op: "siegel_dilation".into(),
                args: vec![expr_to_node(arg)],
                params,
            }
        }
        Expr::Unitary { matrix, arg } => {
            let mut params = Map::new();
            params.insert("matrix".into(), matrix_to_value(matrix));
            SchemaNode {
                op: "unitary".into(),
                args: vec![expr_to_node(arg)],
                params,
            }
        }
        Expr::PsiAut {
            anchor,
            unitary,
            arg,
            ..
        } => {
            let mut params = Map::new();
            params.insert("a".into(), vector_to_value(anchor));
            params.insert("matrix".into(), matrix_to_value(unitary));
            SchemaNode {
                op: "psi_automorphism".into(),
                args: vec![expr_to_node(arg)],
                params,
            }
        }
    }
}

fn parse_complex<T: Real>(v: &Value, what: &str) -> Result<C<T>> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Descriptor(format!("{what}: expected {{re, im}}")))?;
    let re = obj
        .get("re")
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Descriptor(format!("{what}: missing 're'")))?;
    let im = obj
        .get("im")
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Descriptor(format!("{what}: missing 'im'")))?;
    Ok(Complex::new(T::of(re), T::of(im)))
}

fn parse_vector<T: Real>(v: &Value, what: &str) -> Result<CVector<T>> {
    // A bare complex object is a length-1 vector.
    if v.is_object() {
        return Ok(vec![parse_complex(v, what)?]);
    }
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Descriptor(format!("{what}: expected array of complex")))?;
    arr.iter()
        .map(|e| parse_complex(e, what))
        .collect::<Result<_>>()
}

fn parse_matrix<T: Real>(v: &Value, what: &str) -> Result<CMatrix<T>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Descriptor(format!("{what}: expected matrix rows")))?;
    let parsed: Result<Vec<Vec<C<T>>>> = rows
        .iter()
        .map(|row| parse_vector(row, what))
        .collect::<Result<_>>();
    CMatrix::from_rows(parsed?)
}

fn param<'a>(node: &'a SchemaNode, key: &str) -> Result<&'a Value> {
    node.params
        .get(key)
        .ok_or_else(|| Error::Descriptor(format!("op '{}': missing param '{key}'", node.op)))
}

fn arity(node: &SchemaNode, want: usize) -> Result<()> {
    if node.args.len() != want {
        return Err(Error::Descriptor(format!(
            "op '{}': expected {want} args, got {}",
            node.op,
            node.args.len()
        )));
    }
    Ok(())
}

fn node_to_expr<T: Real>(node: &SchemaNode, domain: Domain) -> Result<Expr<T>> {
    let n = domain.dim();
    match node.op.as_str() {
        "variable" => {
            arity(node, 0)?;
            Ok(Expr::Var)
        }
        "constant" => {
            arity(node, 0)?;
            let v = parse_vector::<T>(param(node, "value")?, "constant")?;
            if v.len() != n {
                return Err(Error::Descriptor(format!(
                    "constant of length {} in dimension {n}",
                    v.len()
                )));
            }
            Ok(Expr::Const(v))
        }
        "add" | "multiply" | "divide" => {
            arity(node, 2)?;
            let a = node_to_expr(&node.args[0], domain)?;
            let b = node_to_expr(&node.args[1], domain)?;
            Ok(match node.op.as_str() {
                "add" => Expr::add(a, b),
                "multiply" => Expr::mul(a, b),
                _ => Expr::div(a, b),
            })
        }
        "ipow" => {
            arity(node, 1)?;
            let k = param(node, "k")?
                .as_i64()
                .ok_or_else(|| Error::Descriptor("ipow: 'k' must be an integer".into()))?;
            let k = i32::try_from(k)
                .map_err(|_| Error::Descriptor("ipow: exponent out of range".into()))?;
            Ok(Expr::powi(node_to_expr(&node.args[0], domain)?, k))
        }
        "sqrt" => {
            arity(node, 1)?;
            Ok(Expr::sqrt(node_to_expr(&node.args[0], domain)?))
        }
        "mobius" => {
            arity(node, 1)?;
            Ok(Expr::mobius(
                parse_complex(param(node, "a")?, "mobius.a")?,
                parse_complex(param(node, "b")?, "mobius.b")?,
                parse_complex(param(node, "c")?, "mobius.c")?,
                parse_complex(param(node, "d")?, "mobius.d")?,
                node_to_expr(&node.args[0], domain)?,
            ))
        }
        "compose" => {
            arity(node, 2)?;
            Ok(Expr::compose(
                node_to_expr(&node.args[0], domain)?,
                node_to_expr(&node.args[1], domain)?,
            ))
        }
        "siegel_translation" => {
            arity(node, 1)?;
            let b = parse_vector::<T>(param(node, "b")?, "siegel_translation.b")?;
            Ok(Expr::SiegelTranslate {
                b,
                arg: Box::new(node_to_expr(&node.args[0], domain)?),
            })
        }
        "siegel_dilation" => {
            arity(node, 1)?;
            let factor = param(node, "factor")?
                .as_f64()
                .ok_or_else(|| Error::Descriptor("siegel_dilation: bad 'factor'".into()))?;
            Ok(Expr::SiegelDilate {
                factor: T::of(factor),
                arg: Box::new(node_to_expr(&node.args[0], domain)?),
            })
        }
        "unitary" => {
            arity(node, 1)?;
            let raw = parse_matrix::<T>(param(node, "matrix")?, "unitary.matrix")?;
            // On a Siegel domain the wire matrix acts on w' and is stored
            // expanded to block-diag(1, U).
            let matrix = match domain {
                Domain::Siegel(n) if raw.rows() == n - 1 => expand_block(&raw, n),
                _ => raw,
            };
            Ok(Expr::Unitary {
                matrix,
                arg: Box::new(node_to_expr(&node.args[0], domain)?),
            })
        }
        "psi_automorphism" => {
            arity(node, 1)?;
            let anchor = parse_vector::<T>(param(node, "a")?, "psi.a")?;
            let unitary = parse_matrix::<T>(param(node, "matrix")?, "psi.matrix")?;
            if anchor.is_empty() {
                return Err(Error::Descriptor("psi: empty anchor".into()));
            }
            let scale = anchor[0].im - norm_sq(&anchor[1..]);
            Ok(Expr::PsiAut {
                scale,
                anchor,
                unitary,
                arg: Box::new(node_to_expr(&node.args[0], domain)?),
            })
        }
        other => Err(Error::Descriptor(format!("unknown op '{other}'"))),
    }
}

pub(crate) fn expand_block<T: Real>(u: &CMatrix<T>, n: usize) -> CMatrix<T> {
    let mut m = CMatrix::zeros(n, n);
    m.set(0, 0, Complex::new(T::one(), T::zero()));
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            m.set(i + 1, j + 1, u.get(i, j));
        }
    }
    m
}
