//! JSON forms of the public types and a deterministic writer.
//!
//! Complex numbers are `{"re": x, "im": y}`, matrices are row-major nested
//! arrays, points are `{"tau": c, "z": c}`. The writer prints every float with
//! 17 significant digits and keeps object keys sorted, so equal values give
//! byte-identical text.

use num_complex::Complex64;
use num_traits::{Num, Zero};
use serde_json::{Map, Value};

use crate::error::{domain, Result};
use crate::geometry::DistanceBreakdown;
use crate::group::{GHatElement, Sign, Sl2Pair};
use crate::halfspace::{DiskPoint, HatPoint};
use crate::integer::IntAltMat4;
use crate::matrix::Mat;
use crate::picard::{DualPoint, HodgeTable, KernelGroup};
use crate::polarization::{FormKind, LatticeBasis, RiemannFormSpec};
use crate::scalar::Tolerance;

pub trait ToJson {
    fn to_json(&self) -> Value;
}

pub trait FromJson: Sized {
    fn from_json(v: &Value, tol: &Tolerance<f64>) -> Result<Self>;
}

/// A float as a JSON number; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn obj<const N: usize>(fields: [(&str, Value); N]) -> Value {
    Value::Object(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

pub fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| crate::Error::Domain(format!("missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, len: usize, what: &str) -> Result<&'a Vec<Value>> {
    match v.as_array() {
        Some(a) if a.len() == len => Ok(a),
        _ => domain(format!("{what}: expected an array of length {len}")),
    }
}

impl ToJson for f64 {
    fn to_json(&self) -> Value {
        num(*self)
    }
}

impl FromJson for f64 {
    fn from_json(v: &Value, _: &Tolerance<f64>) -> Result<Self> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Ok(x),
            _ => domain("expected a finite number"),
        }
    }
}

impl ToJson for i64 {
    fn to_json(&self) -> Value {
        Value::from(*self)
    }
}

impl FromJson for i64 {
    fn from_json(v: &Value, _: &Tolerance<f64>) -> Result<Self> {
        v.as_i64().map_or_else(|| domain("expected an integer"), Ok)
    }
}

impl ToJson for Complex64 {
    fn to_json(&self) -> Value {
        obj([("re", num(self.re)), ("im", num(self.im))])
    }
}

impl FromJson for Complex64 {
    fn from_json(v: &Value, tol: &Tolerance<f64>) -> Result<Self> {
        // a bare number is read as a real
        if v.is_number() {
            return Ok(Complex64::new(f64::from_json(v, tol)?, 0.0));
        }
        Ok(Complex64::new(f64::from_json(field(v, "re")?, tol)?, f64::from_json(field(v, "im")?, tol)?))
    }
}

impl<S: ToJson, const N: usize> ToJson for [S; N] {
    fn to_json(&self) -> Value {
        Value::Array(self.iter().map(ToJson::to_json).collect())
    }
}

impl<S: FromJson + Copy + Default, const N: usize> FromJson for [S; N] {
    fn from_json(v: &Value, tol: &Tolerance<f64>) -> Result<Self> {
        let a = array(v, N, "vector")?;
        let mut out = [S::default(); N];
        for (o, x) in out.iter_mut().zip(a) {
            *o = S::from_json(x, tol)?;
        }
        Ok(out)
    }
}

impl<S: ToJson, const R: usize, const C: usize> ToJson for Mat<S, R, C> {
    fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(|row| Value::Array(row.iter().map(ToJson::to_json).collect())).collect())
    }
}

impl<S: FromJson + Copy + Num, const R: usize, const C: usize> FromJson for Mat<S, R, C> {
    fn from_json(v: &Value, tol: &Tolerance<f64>) -> Result<Self> {
        let rows = array(v, R, "matrix rows")?;
        let mut m = Mat::<S, R, C>::zeros();
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in array(row, C, "matrix row")?.iter().enumerate() {
                m[(i, j)] = S::from_json(x, tol)?;
            }
        }
        Ok(m)
    }
}

impl ToJson for HatPoint<f64> {
    fn to_json(&self) -> Value {
        obj([("tau", self.tau.to_json()), ("z", self.z.to_json())])
    }
}

impl FromJson for HatPoint<f64> {
    fn from_json(v: &Value, tol: &Tolerance<f64>) -> Result<Self> {
        HatPoint::new(Complex64::from_json(field(v, "tau")?, tol)?, Complex64::from_json(field(v, "z")?, tol)?, tol)
    }
}

impl ToJson for DiskPoint<f64> {
    fn to_json(&self) -> Value {
        obj([("w", self.w.to_json())])
    }
}

impl FromJson for DiskPoint<f64> {
    fn from_json(v: &Value, tol: &Tolerance<f64>) -> Result<Self> {
        DiskPoint::new(Mat::from_json(field(v, "w")?, tol)?, tol)
    }
}

impl ToJson for GHatElement<f64> {
    fn to_json(&self) -> Value {
        obj([("matrix", self.matrix().to_json()), ("epsilon", Value::from(self.epsilon().value()))])
    }
}

impl FromJson for GHatElement<f64> {
    fn from_json(v: &Value, tol: &Tolerance<f64>) -> Result<Self> {
        let m = Mat::from_json(field(v, "matrix")?, tol)?;
        match v.get("epsilon") {
            None => GHatElement::new(m, tol),
            Some(e) => {
                let sign = Sign::from_value(i64::from_json(e, tol)?)
                    .ok_or_else(|| crate::Error::Domain("epsilon must be 1 or -1".into()))?;
                GHatElement::with_sign(m, sign, tol)
            }
        }
    }
}

impl ToJson for Sl2Pair<f64> {
    fn to_json(&self) -> Value {
        obj([("m1", self.m1.to_json()), ("m2", self.m2.to_json())])
    }
}

impl FromJson for Sl2Pair<f64> {
    fn from_json(v: &Value, tol: &Tolerance<f64>) -> Result<Self> {
        Sl2Pair::new(Mat::from_json(field(v, "m1")?, tol)?, Mat::from_json(field(v, "m2")?, tol)?, tol)
    }
}

impl ToJson for RiemannFormSpec<f64> {
    fn to_json(&self) -> Value {
        obj([
            ("kind", Value::from(self.kind.name())),
            ("h", self.h.to_json()),
            ("omega", self.lattice.omega().to_json()),
        ])
    }
}

impl FromJson for RiemannFormSpec<f64> {
    fn from_json(v: &Value, tol: &Tolerance<f64>) -> Result<Self> {
        let kind_name = field(v, "kind")?.as_str().unwrap_or_default();
        let kind = FormKind::parse(kind_name)
            .ok_or_else(|| crate::Error::Domain(format!("unknown form kind \"{kind_name}\"")))?;
        let lattice = LatticeBasis::new(HatPoint::from_json(field(v, "omega")?, tol)?, tol)?;
        let spec = match kind {
            FormKind::Custom => RiemannFormSpec::custom(Mat::from_json(field(v, "h")?, tol)?, lattice, tol)?,
            k => RiemannFormSpec::of_kind(k, lattice, tol)?,
        };
        // an explicit h for a named kind must match it
        if let (Some(h), true) = (v.get("h"), kind != FormKind::Custom) {
            let given: Mat<Complex64, 2, 2> = Mat::from_json(h, tol)?;
            if given.max_abs_diff(&spec.h) > tol.abs_tol + tol.rel_tol * spec.h.max_abs() {
                return domain(format!("h does not match the {kind} form"));
            }
        }
        Ok(spec)
    }
}

impl ToJson for IntAltMat4 {
    fn to_json(&self) -> Value {
        self.as_mat().to_json()
    }
}

impl FromJson for IntAltMat4 {
    fn from_json(v: &Value, tol: &Tolerance<f64>) -> Result<Self> {
        IntAltMat4::new(Mat::<i64, 4, 4>::from_json(v, tol)?.0)
    }
}

impl ToJson for DualPoint<f64> {
    fn to_json(&self) -> Value {
        obj([("c", self.c.to_json())])
    }
}

impl FromJson for DualPoint<f64> {
    fn from_json(v: &Value, tol: &Tolerance<f64>) -> Result<Self> {
        Ok(DualPoint::new(<[Complex64; 2]>::from_json(field(v, "c")?, tol)?))
    }
}

impl ToJson for DistanceBreakdown<f64> {
    fn to_json(&self) -> Value {
        obj([
            ("a", num(self.a)),
            ("b", num(self.b)),
            ("lambda", num(self.lambda)),
            ("mu", num(self.mu)),
            ("log_lambda", num(self.log_lambda)),
            ("log_mu", num(self.log_mu)),
            ("rho", num(self.rho)),
        ])
    }
}

impl ToJson for KernelGroup {
    fn to_json(&self) -> Value {
        obj([
            ("divisors", self.divisors.to_json()),
            ("order", Value::from(self.order)),
            ("structure", Value::from(self.structure())),
        ])
    }
}

impl ToJson for HodgeTable {
    fn to_json(&self) -> Value {
        obj([
            ("h", Value::from(self.h.iter().map(|r| r.to_vec()).collect::<Vec<_>>())),
            ("betti", Value::from(self.betti.to_vec())),
        ])
    }
}

/// `%.17g`-style text for a finite float, always with a decimal point or an
/// exponent so it reads back as a float.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x.is_zero() {
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let s = format!("{:.*}", (16 - exp) as usize, x);
        if s.contains('.') {
            s
        } else {
            s + ".0"
        }
    } else {
        format!("{mantissa}e{exp}")
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize, out: &mut String| out.extend(std::iter::repeat_n("  ", n));
    match v {
        Value::Number(n) if n.is_f64() => out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(x, indent, out);
            }
            out.push(']');
        }
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                pad(indent + 1, out);
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                pad(indent + 1, out);
                out.push_str(&Value::from(k.as_str()).to_string());
                out.push_str(": ");
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Pretty-printed JSON with 17 significant digits for floats.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| crate::Error::Domain(format!("malformed JSON: {e}")))
}
