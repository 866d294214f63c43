use hatsiegel::geometry::{distance, Geodesic};
use hatsiegel::group::sample_g_hat_plus;
use hatsiegel::halfspace::{cayley_to_disk, cayley_to_halfspace, HatPoint};
use hatsiegel::polarization::{section_dimension, LatticeBasis, RiemannFormSpec};
use hatsiegel::theta::{theta_series, Truncation};
use hatsiegel::Tolerance;
use num_complex::Complex;

fn tol() -> Tolerance<f32> {
    Tolerance::new(1e-5, 1e-5).unwrap()
}

#[test]
fn distance_and_geodesic_in_f32() {
    let t = tol();
    let (p1, p2) = (HatPoint::<f32>::scaled_identity(1.0), HatPoint::scaled_identity(2.0));
    let rho = distance(&p1, &p2, &t).unwrap().rho;
    assert!((rho - std::f32::consts::SQRT_2 * std::f32::consts::LN_2).abs() < 1e-6);
    let g = Geodesic::new(&p1, &p2, &t).unwrap();
    assert!(g.at(g.length(), &t).unwrap().max_diff(&p2) < 1e-5);
}

#[test]
fn action_and_cayley_in_f32() {
    let t = tol();
    let p = HatPoint::new(Complex::new(0.3f32, 1.2), Complex::new(-0.1, 0.4), &t).unwrap();
    let q = sample_g_hat_plus::<f32>(3).act(&p, &t).unwrap();
    assert!(q.is_inside(&t));
    let om = p.to_matrix();
    let back = cayley_to_halfspace(&cayley_to_disk(&om, &t).unwrap(), &t).unwrap();
    assert!(back.max_abs_diff(&om) < 1e-5);
}

#[test]
fn lattice_invariants_in_f32() {
    let t = tol();
    let p = HatPoint::new(Complex::new(0.0f32, 2.0), Complex::new(0.0, 1.0), &t).unwrap();
    let lat = LatticeBasis::new(p, &t).unwrap();
    assert_eq!(section_dimension(&RiemannFormSpec::omega_form(lat), &t).unwrap(), 3);
    assert_eq!(section_dimension(&RiemannFormSpec::star_form(lat), &t).unwrap(), 9);
}

#[test]
fn theta_in_f32() {
    let th = theta_series(&HatPoint::<f32>::scaled_identity(1.0), &[Complex::new(0.0, 0.0); 2], Truncation::Radius(6))
        .unwrap();
    let q = (-std::f32::consts::PI).exp();
    let theta3 = 1.0 + 2.0 * (q + q.powi(4) + q.powi(9));
    assert!((th.value().unwrap().re - theta3 * theta3).abs() < 1e-5);
}
