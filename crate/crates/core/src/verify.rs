//! Seeded property suites over every module, as run by `hatsiegel verify`.

use std::f64::consts::{LN_2, PI, SQRT_2};

use num_complex::Complex64;
use serde_json::Value;

use crate::error::Result;
use crate::geometry::{distance, laplacian_apply, volume_change_residual, Geodesic};
use crate::group::{
    act_via_split, compose_sl2_pair, decompose_sl2_pair, fixed_point_residual, kernel_candidates,
    sample_g_hat_plus_with, sample_sl2_pair, GHatElement, KillingForm, LieHatElement,
};
use crate::halfspace::{cayley_to_disk, cayley_to_halfspace, conjugate_by_t, g_star_residuals, HatPoint};
use crate::integer::{pfaffian4, smith_normal_form4};
use crate::matrix::{det4, j4};
use crate::picard::{hodge_numbers, kernel_subgroup, square_theorem_residual, Poincare};
use crate::polarization::{factor_cocycle_residual, section_dimension, LatticeBasis, RiemannFormSpec, SemiCharacter};
use crate::sampling;
use crate::scalar::Tolerance;
use crate::theta::{principal_bridge_residual, quasi_periodicity_residual, theta_series, Truncation};
use crate::wire::{num, obj};

pub const SUITES: [&str; 6] = ["halfspace", "group", "geometry", "polarization", "theta", "picard"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost(b) => self.measured <= b,
            Bound::AtLeast(b) => self.measured >= b,
        }
    }

    pub fn to_json(&self) -> Value {
        let (op, b) = match self.bound {
            Bound::AtMost(b) => ("<=", b),
            Bound::AtLeast(b) => (">=", b),
        };
        obj([
            ("suite", Value::from(self.suite)),
            ("name", Value::from(self.name.as_str())),
            ("measured", num(self.measured)),
            ("bound", obj([("op", Value::from(op)), ("value", num(b))])),
            ("passed", Value::from(self.passed())),
        ])
    }
}

struct Suite {
    name: &'static str,
    checks: Vec<Check>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self { name, checks: Vec::new() }
    }

    fn at_most(&mut self, name: &str, measured: f64, bound: f64) {
        self.checks.push(Check { suite: self.name, name: name.into(), measured, bound: Bound::AtMost(bound) });
    }

    fn at_least(&mut self, name: &str, measured: f64, bound: f64) {
        self.checks.push(Check { suite: self.name, name: name.into(), measured, bound: Bound::AtLeast(bound) });
    }

    /// An exact identity, recorded as a count of failures that must be zero.
    fn exact(&mut self, name: &str, failures: usize) {
        self.at_most(name, failures as f64, 0.0);
    }
}

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn halfspace_suite(seed: u64) -> Result<Vec<Check>> {
    let t = tol();
    let mut s = Suite::new("halfspace");
    let mut rng = sampling::rng(seed);
    let (mut round, mut closure, mut axiom, mut gstar) = (0f64, 0usize, 0f64, 0f64);
    for _ in 0..100 {
        let p: HatPoint<f64> = sampling::hat_point(&mut rng);
        let om = p.to_matrix();
        round = round.max(cayley_to_halfspace(&cayley_to_disk(&om, &t)?, &t)?.max_abs_diff(&om));
        let (m1, m2) = (sample_g_hat_plus_with::<f64>(&mut rng), sample_g_hat_plus_with::<f64>(&mut rng));
        match m1.act(&p, &t) {
            Ok(q) if q.is_inside(&t) => {
                let lhs = (m1 * m2).act(&p, &t)?;
                let rhs = m1.act(&m2.act(&p, &t)?, &t)?;
                axiom = axiom.max(lhs.max_diff(&rhs) / (1.0 + rhs.tau.norm()));
            }
            _ => closure += 1,
        }
        gstar = gstar.max(g_star_residuals(&conjugate_by_t(m1.matrix())).max() / m1.matrix().max_abs().powi(2));
    }
    s.at_most("Cayley round trip", round, 1e-10);
    s.exact("closure of the special half-space under the action", closure);
    s.at_most("action axiom (relative)", axiom, 1e-10);
    s.at_most("conjugated elements lie in SU(2,2) and Sp(4,C) (relative)", gstar, 1e-10);
    Ok(s.checks)
}

fn upper_half_plane_distance(w: Complex64, v: Complex64) -> f64 {
    (1.0 + (w - v).norm_sqr() / (2.0 * w.im * v.im)).acosh()
}

fn group_suite(seed: u64) -> Result<Vec<Check>> {
    let t = tol();
    let mut s = Suite::new("group");
    let mut rng = sampling::rng(seed);
    let (mut round, mut split, mut det, mut loglam) = (0f64, 0f64, 0f64, 0f64);
    for _ in 0..300 {
        let pair = sample_sl2_pair::<f64>(&mut rng);
        let back = decompose_sl2_pair(&compose_sl2_pair(&pair, &t)?, &t)?;
        round = round.max(back.m1.max_abs_diff(&pair.m1)).max(back.m2.max_abs_diff(&pair.m2));
        let el = crate::group::sample_g_hat_with::<f64>(&mut rng);
        let (p, sign) = el.split(&t)?;
        det = det.max((p.m1.det() - 1.0).abs()).max((p.m2.det() - 1.0).abs());
        let pt = sampling::hat_point(&mut rng);
        let direct = el.act(&pt, &t)?;
        split = split.max(act_via_split(&p, &pt, sign, &t)?.max_diff(&direct) / (1.0 + direct.tau.norm()));
        let q = sampling::hat_point(&mut rng);
        let d = distance(&pt, &q, &t)?;
        loglam = loglam.max((d.log_lambda - upper_half_plane_distance(pt.tau + pt.z, q.tau + q.z)).abs());
    }
    s.at_most("decompose after compose", round, 1e-12);
    s.at_most("split action agrees with the 4x4 action", split, 1e-10);
    s.at_most("split factors have determinant 1", det, 1e-12);
    s.at_most("log lambda is the hyperbolic distance of the first factor", loglam, 1e-10);

    let basis = LieHatElement::<f64>::canonical_basis();
    let kf = KillingForm::new(basis, &t)?;
    let report = kf.report(&t);
    s.at_most("Killing form symmetry", report.symmetry_residual, 1e-12);
    let mut ad = 0f64;
    for _ in 0..100 {
        let mut el =
            || LieHatElement::from_coords(std::array::from_fn(|_| sampling::uniform::<f64>(&mut rng, -1.0, 1.0)));
        let (x, y, z) = (el(), el(), el());
        ad = ad.max(kf.ad_invariance_residual(&x, &y, &z)?);
    }
    s.at_most("Killing form ad-invariance", ad, 1e-10);
    s.at_least("Killing form rank (reported)", report.numeric_rank as f64, 0.0);
    s.at_least("Killing form fitted constant (reported)", report.fitted_c, f64::NEG_INFINITY);

    let probes: Vec<HatPoint<f64>> = (0..20).map(|_| sampling::hat_point(&mut rng)).collect();
    let sample = kernel_candidates::<f64>(seed, 10_000)?;
    let (mut trivial, mut kernel_worst, mut other_best) = (0usize, 0f64, f64::INFINITY);
    let (id, q) = (GHatElement::<f64>::identity(), GHatElement::<f64>::q());
    let kernel = [id, id.neg(), q, q.neg()];
    for m in &sample {
        let r = fixed_point_residual(m.matrix(), &probes, &t)?;
        if kernel.iter().any(|k| k.matrix() == m.matrix()) {
            kernel_worst = kernel_worst.max(r);
            trivial += 1;
        } else {
            other_best = other_best.min(r);
        }
    }
    s.at_least("kernel elements present in the sample", trivial as f64, 4.0);
    s.at_most("kernel elements fix every probe", kernel_worst, 1e-12);
    s.at_least("every other element moves a probe", other_best, 1e-3);
    Ok(s.checks)
}

fn geometry_suite(seed: u64) -> Result<Vec<Check>> {
    let t = tol();
    let mut s = Suite::new("geometry");
    let (p1, p2) = (HatPoint::scaled_identity(1.0), HatPoint::scaled_identity(2.0));
    let g = Geodesic::new(&p1, &p2, &t)?;
    s.at_most("distance from iI to 2iI", (g.length() - SQRT_2 * LN_2).abs(), 1e-12);
    s.at_most("numeric arc length", (g.numeric_length(10_000, &t)? - g.length()).abs(), 1e-5);

    let mut rng = sampling::rng(seed);
    let (mut inv, mut closure, mut vol, mut lap) = (0f64, 0usize, 0f64, 0f64);
    let f = |q: &HatPoint<f64>| -> Result<f64> { Ok(q.tau.re * q.z.re + (q.tau.im * q.tau.im - q.z.im).sin()) };
    for _ in 0..500 {
        let m = sample_g_hat_plus_with::<f64>(&mut rng);
        let (a, b) = (sampling::hat_point(&mut rng), sampling::hat_point(&mut rng));
        let (ma, mb) = match (m.act(&a, &t), m.act(&b, &t)) {
            (Ok(x), Ok(y)) if x.is_inside(&t) && y.is_inside(&t) => (x, y),
            _ => {
                closure += 1;
                continue;
            }
        };
        let d = distance(&a, &b, &t)?.rho;
        inv = inv.max((distance(&ma, &mb, &t)?.rho - d).abs() / d.max(1.0));
        vol = vol.max(volume_change_residual(m.matrix(), &a, 1e-5, &t)?);
        let pulled = |q: &HatPoint<f64>| f(&m.act(q, &t)?);
        let lhs = laplacian_apply(pulled, &a, 1e-4, &t)?;
        let rhs = laplacian_apply(f, &ma, 1e-4, &t)?;
        lap = lap.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
    }
    s.at_most("distance invariance", inv, 1e-9);
    s.exact("closure under the action", closure);
    s.at_most("volume density change of variables", vol, 1e-6);
    s.at_most("Laplacian equivariance", lap, 1e-4);

    let (mut start, mut end, mut mid) = (0usize, 0f64, 0f64);
    for _ in 0..100 {
        let (a, b) = (sampling::hat_point(&mut rng), sampling::hat_point(&mut rng));
        let g = Geodesic::new(&a, &b, &t)?;
        if g.at(0.0, &t)? != a {
            start += 1;
        }
        end = end.max(g.at(g.length(), &t)?.max_diff(&b) / (1.0 + b.tau.norm()));
        for q in [0.25, 0.5, 0.75] {
            let sq = q * g.length();
            mid = mid.max((distance(&a, &g.at(sq, &t)?, &t)?.rho - sq).abs());
        }
    }
    s.exact("geodesic starts exactly at the first point", start);
    s.at_most("geodesic ends at the second point", end, 1e-9);
    s.at_most("geodesic is arc-length parametrized", mid, 1e-6);
    Ok(s.checks)
}

fn lattice(tau: Complex64, z: Complex64) -> Result<LatticeBasis<f64>> {
    LatticeBasis::new(HatPoint::new(tau, z, &tol())?, &tol())
}

/// Integer sweep `Im τ ∈ 1..=5`, `|Im z| < Im τ`, with fixed real parts.
pub fn integral_sweep() -> Vec<(i64, i64)> {
    (1..=5i64).flat_map(|y| (-(y - 1)..y).map(move |v| (y, v))).collect()
}

fn polarization_suite(seed: u64) -> Result<Vec<Check>> {
    let t = tol();
    let mut s = Suite::new("polarization");
    let mut bad = 0usize;
    for (y, v) in integral_sweep() {
        let lat = lattice(c(0.25, y as f64), c(-0.5, v as f64))?;
        let d = y * y - v * v;
        let om = RiemannFormSpec::omega_form(lat);
        let st = RiemannFormSpec::star_form(lat);
        let pr = RiemannFormSpec::principal(lat, &t)?;
        bad += usize::from(section_dimension(&om, &t)? != d);
        bad += usize::from(section_dimension(&st, &t)? != 3 * d);
        bad += usize::from(section_dimension(&pr, &t)? != 1);
        if v == 0 {
            bad += usize::from(section_dimension(&RiemannFormSpec::tau_form(lat, &t)?, &t)? != 1);
        }
        for spec in [om, st, pr] {
            let e = spec.integral_form(&t)?;
            bad += usize::from(pfaffian4(&e)?.pow(2) != det4(&e.as_mat()));
        }
    }
    s.exact("section dimensions and Pf^2 = det E on the integral sweep", bad);

    let specs = [
        RiemannFormSpec::omega_form(lattice(c(0.2, 2.0), c(0.1, 1.0))?),
        RiemannFormSpec::tau_form(lattice(c(0.2, 1.1), c(0.4, 0.0))?, &t)?,
        RiemannFormSpec::star_form(lattice(c(0.3, 4.0 / 3.0), c(-0.1, 1.0 / 3.0))?),
    ];
    let mut law = 0usize;
    for spec in &specs {
        let chi = SemiCharacter::<f64>::canonical(spec.integral_form(&t)?);
        for a in 0..7i64.pow(4) {
            let n: [i64; 4] = std::array::from_fn(|i| (a / 7i64.pow(i as u32)) % 7 - 3);
            for b in (0..7i64.pow(4)).step_by(13) {
                let m: [i64; 4] = std::array::from_fn(|i| (b / 7i64.pow(i as u32)) % 7 - 3);
                law += usize::from(!chi.law_holds_exactly(&n, &m)?);
            }
        }
    }
    s.exact("semi-character law on the box |n|, |m| <= 3", law);
    for spec in &specs {
        let chi = SemiCharacter::canonical(spec.integral_form(&t)?);
        let name = format!("cocycle residual, {} form", spec.kind);
        s.at_most(&name, factor_cocycle_residual(spec, &chi, 500, seed)?, 1e-9);
    }
    let e = specs[0].integral_form(&t)?;
    let bad_chi = SemiCharacter::<f64>::corrupted(e, 0);
    s.at_least("corrupted semi-character is detected", factor_cocycle_residual(&specs[0], &bad_chi, 500, seed)?, 0.5);
    Ok(s.checks)
}

fn theta_suite(seed: u64) -> Result<Vec<Check>> {
    let t = tol();
    let mut s = Suite::new("theta");
    let th = theta_series(&HatPoint::scaled_identity(1.0), &[c(0.0, 0.0); 2], Truncation::Radius(10))?;
    let q = (-PI).exp();
    let jacobi: f64 = (-30i64..=30).map(|n| q.powi((n * n) as i32)).sum();
    s.at_most("theta at the origin for iI", (th.value()? - c(jacobi * jacobi, 0.0)).norm(), 1e-12);

    let mut rng = sampling::rng(seed);
    let (mut qp, mut tail) = (0f64, 0f64);
    for _ in 0..200 {
        let y = sampling::uniform::<f64>(&mut rng, 1.0, 2.0);
        let v = sampling::uniform::<f64>(&mut rng, -0.5, 0.5) * y;
        let om = HatPoint::new(
            c(sampling::uniform(&mut rng, -1.0, 1.0), y),
            c(sampling::uniform(&mut rng, -1.0, 1.0), v),
            &t,
        )?;
        let z = sampling::cvec2(&mut rng);
        let k = sampling::int4(&mut rng, 2);
        let r = quasi_periodicity_residual(&om, &z, [k[0], k[1]], [k[2], k[3]], Truncation::Accuracy(1e-13))?;
        qp = qp.max(r.residual);
        tail = tail.max(r.tail_bound);
    }
    s.at_most("quasi-periodicity", qp, 1e-8);
    s.at_most("tail bound", tail, 1e-12);

    let mut bridge = 0f64;
    for _ in 0..50 {
        let p = sampling::hat_point::<f64>(&mut rng);
        let p = HatPoint::new(p.tau + c(0.0, 1.0), p.z, &t)?;
        let spec = RiemannFormSpec::principal(LatticeBasis::new(p, &t)?, &t)?;
        let out = principal_bridge_residual(
            &spec,
            &sampling::cvec2(&mut rng),
            &sampling::int4(&mut rng, 2),
            Truncation::Accuracy(1e-14),
            &t,
        )?;
        bridge = bridge.max(out.residual).max(out.twist_fit_residual);
    }
    s.at_most("principal bridge", bridge, 1e-8);
    Ok(s.checks)
}

fn picard_suite(seed: u64) -> Result<Vec<Check>> {
    let t = tol();
    let mut s = Suite::new("picard");
    let mut bad = 0usize;
    for (y, v) in integral_sweep() {
        let lat = lattice(c(0.25, y as f64), c(-0.5, v as f64))?;
        for spec in
            [RiemannFormSpec::omega_form(lat), RiemannFormSpec::star_form(lat), RiemannFormSpec::principal(lat, &t)?]
        {
            let d = section_dimension(&spec, &t)?;
            bad += usize::from(kernel_subgroup(&spec, &t)?.order != d * d);
        }
    }
    s.exact("K(F) order equals dimension squared", bad);
    let tau = RiemannFormSpec::tau_form(lattice(c(0.1, 1.5), c(0.3, 0.0))?, &t)?;
    s.exact("tau form has trivial K(F)", usize::from(!kernel_subgroup(&tau, &t)?.is_trivial()));
    let om = RiemannFormSpec::omega_form(lattice(c(0.0, 2.0), c(0.0, 1.0))?);
    let snf = smith_normal_form4(&om.integral_form(&t)?)?;
    s.exact("elementary divisors (1, 1, 3, 3)", usize::from(snf.divisors != [1, 1, 3, 3]));

    let mut rng = sampling::rng(seed);
    let mut sq = 0f64;
    for spec in [tau, RiemannFormSpec::star_form(lattice(c(0.0, 1.0), c(0.2, 0.0))?)] {
        let chi = SemiCharacter::canonical(spec.integral_form(&t)?);
        for _ in 0..20 {
            let (a, b) = (sampling::cvec2(&mut rng), sampling::cvec2(&mut rng));
            sq = sq.max(square_theorem_residual(&spec, &chi, &a, &b, 20, seed)?);
        }
    }
    s.at_most("theorem of the square", sq, 1e-9);
    let p = Poincare::new(LatticeBasis::new(sampling::hat_point(&mut rng), &t)?)?;
    let (law, cocycle) = p.residuals(300, seed);
    s.at_most("Poincare semi-character law", law, 1e-10);
    s.at_most("Poincare cocycle", cocycle, 1e-9);
    let h = hodge_numbers();
    let mut hodge = 0usize;
    let binom2 = [1u64, 2, 1];
    for p in 0..3 {
        for q in 0..3 {
            hodge += usize::from(h.h[p][q] != binom2[p] * binom2[q]);
        }
    }
    hodge += usize::from(h.betti != [1, 4, 6, 4, 1]);
    s.exact("Hodge table", hodge);
    let e_std = crate::integer::IntAltMat4::from_real(&j4::<f64>(), &t)?;
    s.exact(
        "principal form has the standard alternating part",
        usize::from(RiemannFormSpec::principal(p.lattice, &t)?.integral_form(&t)? != e_std),
    );
    Ok(s.checks)
}

/// Runs one suite by name, or all of them for `"all"`.
pub fn run(suite: &str, seed: u64) -> Result<Vec<Check>> {
    let one = |name: &str| -> Result<Vec<Check>> {
        match name {
            "halfspace" => halfspace_suite(seed),
            "group" => group_suite(seed),
            "geometry" => geometry_suite(seed),
            "polarization" => polarization_suite(seed),
            "theta" => theta_suite(seed),
            "picard" => picard_suite(seed),
            other => crate::error::domain(format!("unknown suite \"{other}\"")),
        }
    };
    if suite == "all" {
        let mut out = Vec::new();
        for name in SUITES {
            out.extend(one(name)?);
        }
        Ok(out)
    } else {
        one(suite)
    }
}

/// `{"suites": [...], "checks": [...], "passed": n, "failed": n}`.
pub fn summary(checks: &[Check]) -> Value {
    let mut suites: Vec<&str> = checks.iter().map(|c| c.suite).collect();
    suites.dedup();
    let failed = checks.iter().filter(|c| !c.passed()).count();
    obj([
        ("suites", Value::from(suites)),
        ("checks", Value::Array(checks.iter().map(Check::to_json).collect())),
        ("passed", Value::from(checks.len() - failed)),
        ("failed", Value::from(failed)),
    ])
}
