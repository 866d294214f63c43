use hatsiegel::geometry::{
    distance, laplacian_apply, maass_displayed_apply, volume_change_residual, volume_density, Geodesic,
};
use hatsiegel::group::{compose_sl2_pair, in_g_hat, sample_g_hat_plus_with, sample_g_hat_with, GHatElement, Sl2Pair};
use hatsiegel::halfspace::{cayley_to_disk, cayley_to_halfspace, DiskPoint, HatPoint};
use hatsiegel::integer::{pfaffian4, IntAltMat4};
use hatsiegel::matrix::{det4, symplectic_residual, Mat, Mat4};
use hatsiegel::picard::{
    curvature_matrix, dual_basis, hodge_numbers, kernel_points, kernel_subgroup, pairing_matrix,
    square_theorem_residual, translation_character, translation_ratio_residual, Poincare,
};
use hatsiegel::polarization::{
    automorphic_factor, factor_cocycle_residual, gram_matrices, is_riemann_form, log_automorphic_factor,
    section_dimension, FormKind, LatticeBasis, RiemannFormSpec, SemiCharacter,
};
use hatsiegel::sampling;
use hatsiegel::theta::{principal_bridge_residual, quasi_periodicity_residual, theta_series, Truncation};
use hatsiegel::verify;
use hatsiegel::wire::{field, num, obj, FromJson, ToJson};
use hatsiegel::{Complex64, Error, Result, Tolerance};
use serde_json::{Map, Value};

use crate::{Ctx, Response};

fn get<T: FromJson>(v: &Value, key: &str, tol: &Tolerance<f64>) -> Result<T> {
    T::from_json(field(v, key)?, tol).map_err(|e| match e {
        Error::Domain(m) => Error::Domain(format!("{key}: {m}")),
        other => other,
    })
}

fn get_or<T: FromJson>(v: &Value, key: &str, default: T, tol: &Tolerance<f64>) -> Result<T> {
    match v.get(key) {
        Some(_) => get(v, key, tol),
        None => Ok(default),
    }
}

impl Response {
    fn new(result: Value) -> Self {
        Self { result, diagnostics: Map::new(), passed: true }
    }

    fn note(mut self, key: &str, value: Value) -> Self {
        self.diagnostics.insert(key.into(), value);
        self
    }

    /// Records `measured <= bound` under `key` and folds it into the exit status.
    fn at_most(mut self, key: &str, measured: f64, bound: f64) -> Self {
        let ok = measured <= bound;
        self.passed &= ok;
        self.diagnostics
            .insert(key.into(), obj([("value", num(measured)), ("bound", num(bound)), ("passed", Value::from(ok))]));
        self
    }

    fn require(mut self, key: &str, ok: bool) -> Self {
        self.passed &= ok;
        self.diagnostics.insert(key.into(), Value::from(ok));
        self
    }
}

fn truncation(v: &Value, tol: &Tolerance<f64>) -> Result<Truncation<f64>> {
    match (v.get("radius"), v.get("accuracy")) {
        (Some(_), Some(_)) => Err(Error::Domain("give either radius or accuracy, not both".into())),
        (Some(r), None) => {
            let r = i64::from_json(r, tol)?;
            u32::try_from(r)
                .map(Truncation::Radius)
                .map_err(|_| Error::Domain("radius must be a nonnegative integer".into()))
        }
        (None, Some(a)) => Ok(Truncation::Accuracy(f64::from_json(a, tol)?)),
        (None, None) => Ok(Truncation::Accuracy(1e-14)),
    }
}

fn lattice_vec(v: &Value, key: &str, tol: &Tolerance<f64>) -> Result<[i64; 4]> {
    get(v, key, tol)
}

fn pair2(v: &Value, key: &str, tol: &Tolerance<f64>) -> Result<[i64; 2]> {
    get(v, key, tol)
}

pub fn point(ctx: &Ctx) -> Result<Response> {
    let p: HatPoint<f64> = HatPoint::from_json(&ctx.payload()?, &ctx.tol)?;
    let (w1, w2) = p.factors();
    Ok(Response::new(obj([
        ("point", p.to_json()),
        ("matrix", p.to_matrix().to_json()),
        ("factors", [w1, w2].to_json()),
        ("det_im", num(p.im_matrix().det())),
    ])))
}

pub fn act(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let m: GHatElement<f64> = get(&v, "element", &ctx.tol)?;
    let p: HatPoint<f64> = get(&v, "point", &ctx.tol)?;
    let q = m.act(&p, &ctx.tol)?;
    Ok(Response::new(obj([("point", q.to_json())]))
        .note("epsilon", Value::from(m.epsilon().value()))
        .note("symplectic_residual", num(symplectic_residual(m.matrix())))
        .require("image_inside", q.is_inside(&ctx.tol)))
}

pub fn cayley(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let t = &ctx.tol;
    match (v.get("point"), v.get("disk")) {
        (Some(_), None) => {
            let p: HatPoint<f64> = get(&v, "point", t)?;
            let om = p.to_matrix();
            let w = cayley_to_disk(&om, t)?;
            let back = cayley_to_halfspace(&w, t)?;
            Ok(Response::new(obj([("disk", w.to_json())]))
                .note("round_trip_residual", num(back.max_abs_diff(&om)))
                .require("commutes_with_q", w.commutes_with_q(t)))
        }
        (None, Some(_)) => {
            let w: DiskPoint<f64> = get(&v, "disk", t)?;
            let om = cayley_to_halfspace(&w, t)?;
            let p = HatPoint::from_matrix(&om, t)?;
            let back = cayley_to_disk(&om, t)?;
            Ok(Response::new(obj([("point", p.to_json())])).note("round_trip_residual", num(back.w.max_abs_diff(&w.w))))
        }
        _ => Err(Error::Domain("give exactly one of \"point\" or \"disk\"".into())),
    }
}

pub fn group_check(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let m: Mat4<f64> = get(&v, "matrix", &ctx.tol)?;
    let sign = in_g_hat(&m, &ctx.tol);
    let mut r = Response::new(obj([
        ("member", Value::from(sign.is_some())),
        ("epsilon", sign.map_or(Value::Null, |s| Value::from(s.value()))),
    ]))
    .note("symplectic_residual", num(symplectic_residual(&m)));
    if let Some(s) = sign {
        let el = GHatElement::with_sign(m, s, &ctx.tol)?;
        r = r.note("coefficient_residuals", el.coefficient_residuals().to_json());
    }
    Ok(r.require("member", sign.is_some()))
}

pub fn group_split(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let m: GHatElement<f64> = get(&v, "element", &ctx.tol)?;
    let (pair, sign) = m.split(&ctx.tol)?;
    let dets = [(pair.m1.det() - 1.0).abs(), (pair.m2.det() - 1.0).abs()];
    Ok(Response::new(obj([("pair", pair.to_json()), ("sign", Value::from(sign.value()))]))
        .note("det_residuals", dets.to_json()))
}

pub fn group_fuse(ctx: &Ctx) -> Result<Response> {
    let pair = Sl2Pair::from_json(&ctx.payload()?, &ctx.tol)?;
    let el = compose_sl2_pair(&pair, &ctx.tol)?;
    Ok(Response::new(obj([("element", el.to_json())]))
        .note("symplectic_residual", num(symplectic_residual(el.matrix()))))
}

pub fn group_sample(ctx: &Ctx, count: usize, any_sign: bool) -> Result<Response> {
    let mut rng = sampling::rng(ctx.seed);
    let els: Vec<Value> = (0..count)
        .map(|_| {
            if any_sign { sample_g_hat_with::<f64>(&mut rng) } else { sample_g_hat_plus_with::<f64>(&mut rng) }
                .to_json()
        })
        .collect();
    Ok(Response::new(obj([("elements", Value::Array(els))])).note("seed", Value::from(ctx.seed)))
}

pub fn dist(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let (p1, p2): (HatPoint<f64>, HatPoint<f64>) = (get(&v, "p1", &ctx.tol)?, get(&v, "p2", &ctx.tol)?);
    Ok(Response::new(distance(&p1, &p2, &ctx.tol)?.to_json()))
}

pub fn geodesic(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let t = &ctx.tol;
    let (p1, p2): (HatPoint<f64>, HatPoint<f64>) = (get(&v, "p1", t)?, get(&v, "p2", t)?);
    let g = Geodesic::new(&p1, &p2, t)?;
    let len = g.length();
    let params: Vec<f64> = match v.get("s") {
        Some(s) => s
            .as_array()
            .ok_or_else(|| Error::Domain("s: expected an array of arc lengths".into()))?
            .iter()
            .map(|x| f64::from_json(x, t))
            .collect::<Result<_>>()?,
        None => {
            let n = get_or(&v, "samples", 5i64, t)?;
            if n < 2 {
                return Err(Error::Domain("samples must be at least 2".into()));
            }
            (0..n).map(|i| len * i as f64 / (n - 1) as f64).collect()
        }
    };
    let points = params
        .iter()
        .map(|&s| Ok(obj([("s", num(s)), ("point", g.at(s, t)?.to_json())])))
        .collect::<Result<Vec<_>>>()?;
    let end = g.at(len, t)?.max_diff(&p2) / (1.0 + p2.tau.norm());
    Ok(Response::new(obj([("length", num(len)), ("points", Value::Array(points))])).at_most("end_residual", end, 1e-9))
}

pub fn volume(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let p: HatPoint<f64> = get(&v, "point", &ctx.tol)?;
    let r = Response::new(obj([("density", num(volume_density(&p, &ctx.tol)?))]));
    match v.get("element") {
        Some(_) => {
            let m: GHatElement<f64> = get(&v, "element", &ctx.tol)?;
            Ok(r.at_most("change_of_variables_residual", volume_change_residual(m.matrix(), &p, 1e-5, &ctx.tol)?, 1e-6))
        }
        None => Ok(r),
    }
}

type Field = fn(&HatPoint<f64>) -> Result<f64>;

fn named_field(name: &str) -> Result<Field> {
    Ok(match name {
        "x" => |q| Ok(q.tau.re),
        "y" => |q| Ok(q.tau.im),
        "u" => |q| Ok(q.z.re),
        "v" => |q| Ok(q.z.im),
        "log_det_y" => |q| Ok(q.im_matrix().det().ln()),
        "dist2_identity" => |q| {
            let rho = distance(&HatPoint::scaled_identity(1.0), q, &Tolerance::default())?.rho;
            Ok(rho * rho)
        },
        other => {
            return Err(Error::Domain(format!("unknown field \"{other}\" (x, y, u, v, log_det_y, dist2_identity)")))
        }
    })
}

pub fn laplacian(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let p: HatPoint<f64> = get(&v, "point", &ctx.tol)?;
    let name = field(&v, "field")?.as_str().ok_or_else(|| Error::Domain("field must be a string".into()))?;
    let f = named_field(name)?;
    let h = get_or(&v, "h", 1e-4, &ctx.tol)?;
    let value = laplacian_apply(f, &p, h, &ctx.tol)?;
    let displayed = maass_displayed_apply(f, &p, h.min(1e-3), &ctx.tol)?;
    Ok(Response::new(obj([("value", num(value)), ("displayed_operator", num(displayed))])).note("h", num(h)))
}

fn spec(v: &Value, tol: &Tolerance<f64>) -> Result<RiemannFormSpec<f64>> {
    RiemannFormSpec::from_json(v, tol)
}

pub fn bundle_gram(ctx: &Ctx) -> Result<Response> {
    let s = spec(&ctx.payload()?, &ctx.tol)?;
    let (sym, alt) = gram_matrices(&s);
    let integral = s.integral_form(&ctx.tol).ok();
    Ok(Response::new(obj([
        ("S", sym.to_json()),
        ("E", alt.to_json()),
        ("E_integral", integral.map_or(Value::Null, |e| e.to_json())),
    ])))
}

pub fn bundle_check(ctx: &Ctx) -> Result<Response> {
    let s = spec(&ctx.payload()?, &ctx.tol)?;
    let c = is_riemann_form(&s, &ctx.tol);
    Ok(Response::new(obj([
        ("riemann_form", Value::from(c.is_riemann_form())),
        ("nondegenerate", Value::from(c.nondegenerate)),
        ("integral", Value::from(c.integral)),
        ("positive_definite", Value::from(c.positive_definite)),
        ("reasons", Value::from(c.reasons())),
    ]))
    .note("integrality_gap", num(c.integrality_gap))
    .require("riemann_form", c.is_riemann_form()))
}

pub fn bundle_dim(
    ctx: &Ctx,
    kind: Option<String>,
    imtau: Option<f64>,
    imz: Option<f64>,
    retau: f64,
    rez: f64,
) -> Result<Response> {
    let t = &ctx.tol;
    let s = match (kind, imtau, imz) {
        (Some(k), Some(y), Some(v)) => {
            let kind = FormKind::parse(&k).ok_or_else(|| Error::Domain(format!("unknown form kind \"{k}\"")))?;
            let lat = LatticeBasis::new(HatPoint::new(Complex64::new(retau, y), Complex64::new(rez, v), t)?, t)?;
            RiemannFormSpec::of_kind(kind, lat, t)?
        }
        (None, None, None) => spec(&ctx.payload()?, t)?,
        _ => return Err(Error::Domain("give --kind, --imtau and --imz together, or a request document".into())),
    };
    let e = s.integral_form(t)?;
    Ok(Response::new(obj([("dimension", Value::from(section_dimension(&s, t)?))]))
        .note("kind", Value::from(s.kind.name()))
        .note("pfaffian", Value::from(pfaffian4(&e)?))
        .note("det_e", Value::from(det4(&e.as_mat()))))
}

fn canonical(s: &RiemannFormSpec<f64>, tol: &Tolerance<f64>) -> Result<SemiCharacter<f64>> {
    Ok(SemiCharacter::canonical(s.integral_form(tol)?))
}

pub fn bundle_semichar(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let t = &ctx.tol;
    let chi = match v.get("e") {
        Some(e) => SemiCharacter::canonical(IntAltMat4::from_json(e, t)?),
        None => canonical(&spec(&v, t)?, t)?,
    };
    let n = lattice_vec(&v, "n", t)?;
    let r = Response::new(obj([("value", chi.value(&n)?.to_json()), ("parity", Value::from(chi.parity(&n)?))]));
    match v.get("m") {
        Some(_) => {
            let m = lattice_vec(&v, "m", t)?;
            Ok(r.require("law_holds", chi.law_holds_exactly(&n, &m)?)
                .note("law_residual", num(chi.law_residual(&n, &m)?)))
        }
        None => Ok(r),
    }
}

pub fn bundle_factor(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let t = &ctx.tol;
    let s = spec(&v, t)?;
    let chi = canonical(&s, t)?;
    let alpha = lattice_vec(&v, "alpha", t)?;
    let z: [Complex64; 2] = get(&v, "z", t)?;
    let log = log_automorphic_factor(&s, &chi, &alpha, &z)?;
    let value = automorphic_factor(&s, &chi, &alpha, &z).map_or(Value::Null, |x| x.to_json());
    let trials = get_or(&v, "trials", 500i64, t)?.max(1) as usize;
    Ok(Response::new(obj([("factor", value), ("log_factor", log.to_json())]))
        .note("seed", Value::from(ctx.seed))
        .at_most("cocycle_residual", factor_cocycle_residual(&s, &chi, trials, ctx.seed)?, 1e-9))
}

pub fn theta_eval(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let t = &ctx.tol;
    let om: HatPoint<f64> = get(&v, "omega", t)?;
    let z: [Complex64; 2] = get(&v, "z", t)?;
    let rule = truncation(&v, t)?;
    let th = theta_series(&om, &z, rule)?;
    let value = th.value().map_or(Value::Null, |x| x.to_json());
    let mut r = Response::new(obj([
        ("value", value),
        ("log_scale", num(th.log_scale)),
        ("normalized", th.normalized.to_json()),
        ("log", th.ln().to_json()),
    ]))
    .note("radius", Value::from(th.truncation.radius))
    .note("tail_bound", num(th.truncation.tail_bound));
    if let Truncation::Accuracy(target) = rule {
        if let Some(w) = th.warning(target) {
            r = r.note("warning", Value::from(w));
        }
    }
    Ok(r)
}

pub fn theta_qp(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let t = &ctx.tol;
    let om: HatPoint<f64> = get(&v, "omega", t)?;
    let z: [Complex64; 2] = get(&v, "z", t)?;
    let (m, k) = (pair2(&v, "m", t)?, pair2(&v, "k", t)?);
    let out = quasi_periodicity_residual(&om, &z, m, k, truncation(&v, t)?)?;
    Ok(Response::new(obj([("residual", num(out.residual)), ("z_used", out.z_used.to_json())]))
        .note("retries", Value::from(out.retries))
        .note("tail_bound", num(out.tail_bound))
        .at_most("quasi_periodicity", out.residual, 1e-8))
}

pub fn theta_bridge(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let t = &ctx.tol;
    let s = if v.get("kind").is_some() {
        spec(&v, t)?
    } else {
        RiemannFormSpec::principal(LatticeBasis::new(get(&v, "omega", t)?, t)?, t)?
    };
    let z: [Complex64; 2] = get(&v, "z", t)?;
    let alpha = lattice_vec(&v, "alpha", t)?;
    let out = principal_bridge_residual(&s, &z, &alpha, truncation(&v, t)?, t)?;
    Ok(Response::new(obj([
        ("residual", num(out.residual)),
        ("twist", Value::from(out.twist.to_vec())),
        ("z_used", out.z_used.to_json()),
    ]))
    .note("retries", Value::from(out.retries))
    .note("tail_bound", num(out.tail_bound))
    .at_most("bridge", out.residual, 1e-8)
    .at_most("twist_fit", out.twist_fit_residual, 1e-8))
}

fn lattice_from(v: &Value, tol: &Tolerance<f64>) -> Result<LatticeBasis<f64>> {
    LatticeBasis::new(get(v, "omega", tol)?, tol)
}

pub fn picard_dual(ctx: &Ctx) -> Result<Response> {
    let lat = lattice_from(&ctx.payload()?, &ctx.tol)?;
    let duals = dual_basis(&lat)?;
    let pairing = pairing_matrix(&lat, &duals);
    Ok(Response::new(obj([("basis", duals.to_json()), ("pairing", pairing.to_json())])).at_most(
        "pairing_residual",
        pairing.max_abs_diff(&Mat::identity()),
        1e-11,
    ))
}

pub fn picard_poincare(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let p = Poincare::new(lattice_from(&v, &ctx.tol)?)?;
    let trials = get_or(&v, "trials", 300i64, &ctx.tol)?.max(1) as usize;
    let (law, cocycle) = p.residuals(trials, ctx.seed);
    let restriction = p.restriction_residual(trials, ctx.seed);
    Ok(Response::new(obj([("duals", p.duals.to_json())]))
        .note("seed", Value::from(ctx.seed))
        .at_most("semicharacter_law", law, 1e-10)
        .at_most("cocycle", cocycle, 1e-9)
        .at_most("restriction", restriction, 1e-10))
}

pub fn picard_translate(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let t = &ctx.tol;
    let s = spec(&v, t)?;
    let a: [Complex64; 2] = get(&v, "a", t)?;
    let ch = translation_character(&s, &a);
    let chi = canonical(&s, t)?;
    let z = [Complex64::new(0.1, 0.2), Complex64::new(-0.3, 0.05)];
    let mut ratio = 0f64;
    for i in 0..4 {
        let alpha: [i64; 4] = std::array::from_fn(|k| (k == i) as i64);
        ratio = ratio.max(translation_ratio_residual(&s, &chi, &a, &alpha, &z)?);
    }
    Ok(Response::new(obj([
        ("exponents", ch.exponents.to_json()),
        ("values", ch.values().to_json()),
        ("trivial", Value::from(ch.is_trivial(t))),
    ]))
    .note("triviality_gap", num(ch.triviality_gap()))
    .at_most("factor_ratio", ratio, 1e-9))
}

pub fn picard_kernel(ctx: &Ctx) -> Result<Response> {
    let s = spec(&ctx.payload()?, &ctx.tol)?;
    let k = kernel_subgroup(&s, &ctx.tol)?;
    let mut r = Response::new(k.to_json());
    if k.divisors.iter().all(|&d| d <= 8) {
        let (den, pts) = kernel_points(&s, &ctx.tol)?;
        let pts: Vec<Value> = pts.iter().map(|p| p.to_json()).collect();
        let count = pts.len() as i64;
        r = r
            .note("denominator", Value::from(den))
            .note("points", Value::Array(pts))
            .require("enumeration_matches_order", count == k.order);
    }
    Ok(r)
}

pub fn picard_square(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let t = &ctx.tol;
    let s = spec(&v, t)?;
    let (a, b): ([Complex64; 2], [Complex64; 2]) = (get(&v, "a", t)?, get(&v, "b", t)?);
    let trials = get_or(&v, "trials", 20i64, t)?.max(1) as usize;
    let res = square_theorem_residual(&s, &canonical(&s, t)?, &a, &b, trials, ctx.seed)?;
    Ok(Response::new(obj([("residual", num(res))])).note("seed", Value::from(ctx.seed)).at_most("square", res, 1e-9))
}

pub fn picard_curvature(ctx: &Ctx) -> Result<Response> {
    let v = ctx.payload()?;
    let s = spec(&v, &ctx.tol)?;
    let points = get_or(&v, "points", 10i64, &ctx.tol)?.max(1) as usize;
    let c = curvature_matrix(&s, points, ctx.seed);
    Ok(Response::new(obj([("c", c.c.to_json())])).note("seed", Value::from(ctx.seed)).at_most(
        "constancy",
        c.constancy_residual,
        1e-8,
    ))
}

pub fn picard_hodge(_: &Ctx) -> Result<Response> {
    Ok(Response::new(hodge_numbers().to_json()))
}

pub fn verify(ctx: &Ctx, suite: &str) -> Result<Response> {
    let checks = verify::run(suite, ctx.seed)?;
    let summary = verify::summary(&checks);
    let ok = checks.iter().all(verify::Check::passed);
    Ok(Response::new(summary).note("seed", Value::from(ctx.seed)).require("all_checks", ok))
}
