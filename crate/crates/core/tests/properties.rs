#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;

use hatsiegel::geometry::distance;
use hatsiegel::group::{
    compose_sl2_pair, decompose_sl2_pair, in_g_hat, sample_g_hat_plus, sample_sl2_pair, GHatElement, LieHatElement,
    Sign,
};
use hatsiegel::halfspace::{cayley_to_disk, cayley_to_halfspace, in_hat_h2, HatPoint};
use hatsiegel::integer::{pfaffian4, smith_normal_form4, IntAltMat4};
use hatsiegel::matrix::{det4, mat_exp, symplectic_residual, Mat};
use hatsiegel::picard::{kernel_subgroup, translation_character};
use hatsiegel::polarization::{
    automorphic_factor, gram_matrices, log_automorphic_factor, section_dimension, LatticeBasis, RiemannFormSpec,
    SemiCharacter,
};
use hatsiegel::sampling;
use hatsiegel::theta::{theta_series, Truncation};
use hatsiegel::wire::{parse, to_text, FromJson, ToJson};
use hatsiegel::{Complex64, Tolerance};

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

fn point() -> impl Strategy<Value = HatPoint<f64>> {
    (-2.0..2.0f64, 0.3..3.0f64, -2.0..2.0f64, -0.9..0.9f64)
        .prop_map(|(x, y, u, f)| HatPoint::new_unchecked(Complex64::new(x, y), Complex64::new(u, f * y)))
}

fn cvec() -> impl Strategy<Value = [Complex64; 2]> {
    prop::array::uniform4(-1.0..1.0f64).prop_map(|a| [Complex64::new(a[0], a[1]), Complex64::new(a[2], a[3])])
}

fn alt_matrix() -> impl Strategy<Value = IntAltMat4> {
    prop::array::uniform6(-9i64..=9).prop_map(|u| {
        let mut e = [[0i64; 4]; 4];
        let mut k = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                e[i][j] = u[k];
                e[j][i] = -u[k];
                k += 1;
            }
        }
        IntAltMat4::new(e).unwrap()
    })
}

fn lattice_vec() -> impl Strategy<Value = [i64; 4]> {
    prop::array::uniform4(-3i64..=3)
}

fn integral_lattice() -> impl Strategy<Value = LatticeBasis<f64>> {
    (1i64..=5, -4i64..=4, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("|Im z| < Im tau", |&(y, v, _, _)| v.abs() < y)
        .prop_map(|(y, v, x, u)| {
            let p = HatPoint::new(Complex64::new(x, y as f64), Complex64::new(u, v as f64), &tol()).unwrap();
            LatticeBasis::new(p, &tol()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pfaffian_squared_is_the_determinant(e in alt_matrix()) {
        let pf = pfaffian4(&e).unwrap();
        prop_assert_eq!(pf * pf, det4(&e.as_mat()));
    }

    #[test]
    fn smith_form_is_a_divisor_chain_with_unimodular_factors(e in alt_matrix()) {
        let snf = smith_normal_form4(&e).unwrap();
        let d = snf.divisors;
        for k in 0..3 {
            prop_assert!(d[k] >= 0);
            let divides = if d[k] == 0 { d[k + 1] == 0 } else { d[k + 1] % d[k] == 0 };
            prop_assert!(divides);
        }
        prop_assert_eq!(det4(&snf.left).abs(), 1);
        prop_assert_eq!(det4(&snf.right).abs(), 1);
        let diag = snf.left * e.as_mat() * snf.right;
        prop_assert_eq!(diag, Mat::from_fn(|i, j| if i == j { d[i] } else { 0 }));
    }

    #[test]
    fn exponentials_of_the_lie_algebra_are_symplectic(c in prop::array::uniform6(-1.0..1.0f64)) {
        let x = LieHatElement::from_coords(c).to_matrix();
        let m = mat_exp(&x).unwrap();
        prop_assert!(symplectic_residual(&m) <= 1e-9);
        prop_assert_eq!(in_g_hat(&m, &tol()), Some(Sign::Plus));
    }

    #[test]
    fn cayley_transform_round_trips(p in point()) {
        let om = p.to_matrix();
        let back = cayley_to_halfspace(&cayley_to_disk(&om, &tol()).unwrap(), &tol()).unwrap();
        prop_assert!(back.max_abs_diff(&om) <= 1e-11 * (1.0 + om.max_abs()));
    }

    #[test]
    fn the_action_preserves_the_half_space(p in point(), seed in any::<u64>()) {
        let m = sample_g_hat_plus::<f64>(seed);
        let q = m.act(&p, &tol()).unwrap();
        prop_assert!(in_hat_h2(&q.to_matrix(), &tol()));
    }

    #[test]
    fn decompose_inverts_compose(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let pair = sample_sl2_pair::<f64>(&mut rng);
        let back = decompose_sl2_pair(&compose_sl2_pair(&pair, &tol()).unwrap(), &tol()).unwrap();
        prop_assert!(back.m1.max_abs_diff(&pair.m1) <= 1e-12);
        prop_assert!(back.m2.max_abs_diff(&pair.m2) <= 1e-12);
    }

    #[test]
    fn distance_is_symmetric_and_satisfies_the_triangle_inequality(a in point(), b in point(), c in point()) {
        let t = tol();
        let (ab, ba) = (distance(&a, &b, &t).unwrap().rho, distance(&b, &a, &t).unwrap().rho);
        prop_assert_eq!(ab, ba);
        let (bc, ac) = (distance(&b, &c, &t).unwrap().rho, distance(&a, &c, &t).unwrap().rho);
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert_eq!(distance(&a, &a, &t).unwrap().rho, 0.0);
    }

    #[test]
    fn distance_is_invariant(a in point(), b in point(), seed in any::<u64>()) {
        let t = tol();
        let m = sample_g_hat_plus::<f64>(seed);
        let d = distance(&a, &b, &t).unwrap().rho;
        let e = distance(&m.act(&a, &t).unwrap(), &m.act(&b, &t).unwrap(), &t).unwrap().rho;
        prop_assert!((d - e).abs() <= 1e-9 * d.max(1.0));
    }

    #[test]
    fn gram_matrices_are_exactly_alternating_and_symmetric(p in point(), kind in 0usize..3) {
        let lat = LatticeBasis::new(p, &tol()).unwrap();
        let spec = match kind {
            0 => RiemannFormSpec::omega_form(lat),
            1 => RiemannFormSpec::star_form(lat),
            _ => RiemannFormSpec::principal(lat, &tol()).unwrap(),
        };
        let (s, e) = gram_matrices(&spec);
        prop_assert_eq!(e, e.transpose().scale(-1.0));
        prop_assert_eq!(s, s.transpose());
    }

    #[test]
    fn section_dimension_squared_is_det_e(lat in integral_lattice(), star in any::<bool>()) {
        let spec = if star { RiemannFormSpec::star_form(lat) } else { RiemannFormSpec::omega_form(lat) };
        let d = section_dimension(&spec, &tol()).unwrap();
        let e = spec.integral_form(&tol()).unwrap();
        prop_assert_eq!(d * d, det4(&e.as_mat()));
        prop_assert_eq!(kernel_subgroup(&spec, &tol()).unwrap().order, d * d);
    }

    #[test]
    fn canonical_semicharacter_obeys_the_law(e in alt_matrix(), n in lattice_vec(), m in lattice_vec()) {
        let chi = SemiCharacter::<f64>::canonical(e);
        prop_assert!(chi.law_holds_exactly(&n, &m).unwrap());
        prop_assert!(chi.law_residual(&n, &m).unwrap() <= 1e-12);
    }

    #[test]
    fn factors_multiply_under_tensor_product(lat in integral_lattice(), alpha in lattice_vec(), z in cvec()) {
        let t = tol();
        let (s1, s2) = (RiemannFormSpec::omega_form(lat), RiemannFormSpec::star_form(lat));
        let (c1, c2) = (SemiCharacter::canonical(s1.integral_form(&t).unwrap()), SemiCharacter::canonical(s2.integral_form(&t).unwrap()));
        let (s12, c12) = (s1.add(&s2), c1.mul(&c2).unwrap());
        let lhs = log_automorphic_factor(&s12, &c12, &alpha, &z).unwrap();
        let rhs = log_automorphic_factor(&s1, &c1, &alpha, &z).unwrap()
            + log_automorphic_factor(&s2, &c2, &alpha, &z).unwrap();
        prop_assert!(((lhs - rhs).exp() - 1.0).norm() <= 1e-9);
        let small: [i64; 4] = alpha.map(|k| k.signum());
        prop_assert!(automorphic_factor(&s1, &c1, &small, &z).unwrap().norm().is_finite());
    }

    #[test]
    fn translation_character_exponents_are_additive(lat in integral_lattice(), a in cvec(), b in cvec()) {
        let spec = RiemannFormSpec::omega_form(lat);
        let (ea, eb) = (translation_character(&spec, &a).exponents, translation_character(&spec, &b).exponents);
        let eab = translation_character(&spec, &[a[0] + b[0], a[1] + b[1]]).exponents;
        for i in 0..4 {
            prop_assert!((eab[i] - ea[i] - eb[i]).abs() <= 1e-12 * (1.0 + eab[i].abs()));
        }
    }

    #[test]
    fn doubling_the_radius_stays_within_the_tail_bound(
        y in 1.0..2.0f64, frac in -0.5..0.5f64, x in -1.0..1.0f64, u in -1.0..1.0f64, z in cvec()
    ) {
        let om = HatPoint::new(Complex64::new(x, y), Complex64::new(u, frac * y), &tol()).unwrap();
        let coarse = theta_series(&om, &z, Truncation::Accuracy(1e-12)).unwrap();
        let fine = theta_series(&om, &z, Truncation::Radius(2 * coarse.truncation.radius)).unwrap();
        let diff = (coarse.normalized - fine.normalized).norm();
        prop_assert!(diff <= coarse.truncation.tail_bound + 1e-14 * fine.normalized.norm().max(1.0));
    }

    #[test]
    fn json_round_trips(p in point(), e in alt_matrix(), seed in any::<u64>()) {
        let t = tol();
        let text = to_text(&p.to_json());
        prop_assert_eq!(HatPoint::from_json(&parse(&text).unwrap(), &t).unwrap(), p);
        let text = to_text(&e.to_json());
        prop_assert_eq!(IntAltMat4::from_json(&parse(&text).unwrap(), &t).unwrap(), e);
        let m = sample_g_hat_plus::<f64>(seed);
        let text = to_text(&m.to_json());
        prop_assert_eq!(GHatElement::from_json(&parse(&text).unwrap(), &t).unwrap(), m);
    }
}
