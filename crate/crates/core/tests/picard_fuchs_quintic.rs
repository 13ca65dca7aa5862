use std::f64::consts::PI;

use hml_core::picard_fuchs::{
    derivative_frame, integrate_along, integrate_matrix, series_seed, FrobeniusBasis, LocalExpansion, PFOperator,
    PathPlan, PeriodSolver, SingularPoint,
};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

fn r(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn quintic() -> PFOperator {
    PFOperator::new(
        vec![
            vec![r(0), r(-120)],
            vec![r(0), r(-1250)],
            vec![r(0), r(-4375)],
            vec![r(0), r(-6250)],
            vec![r(1), r(-3125)],
        ],
        vec![
            SingularPoint::Finite(Complex64::new(0.0, 0.0)),
            SingularPoint::Finite(Complex64::new(1.0 / 3125.0, 0.0)),
            SingularPoint::Infinity,
        ],
    )
    .unwrap()
}

/// (5k)! / (k!)^5
fn multinomial(k: u64) -> BigInt {
    let fact = |n: u64| (1..=n).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i));
    fact(5 * k) / fact(k).pow(5)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel_col_err(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (0..a.ncols())
        .map(|j| (a.column(j) - b.column(j)).norm() / b.column(j).norm())
        .fold(0.0, f64::max)
}

#[test]
fn series_matches_multinomial_closed_form() {
    let s = series_seed(&quintic(), 200).unwrap();
    assert_eq!(s.coefficients[0], r(1));
    assert_eq!(s.coefficients[1], r(120));
    assert_eq!(s.coefficients[2], r(113400));
    for k in 0..=60u64 {
        assert_eq!(
            s.coefficients[k as usize],
            BigRational::from_integer(multinomial(k)),
            "k={k}"
        );
    }
    assert!(s.check_recursion(&quintic()).is_ok());
    assert!(s.tail_bound < 1e-12, "tail {}", s.tail_bound);
}

#[test]
fn rescaled_coefficients_track_exact_ones() {
    let s = series_seed(&quintic(), 200).unwrap();
    for k in [1usize, 10, 50, 120, 200] {
        let exact = BigRational::new(multinomial(k as u64), BigInt::from(3125).pow(k as u32));
        let exact = exact.to_f64().unwrap();
        assert!((s.scaled[k] - exact).abs() <= 1e-12 * exact.abs(), "k={k}");
    }
}

#[test]
fn frobenius_top_row_equals_series() {
    let f = FrobeniusBasis::new(&quintic(), 200).unwrap();
    let s = series_seed(&quintic(), 200).unwrap();
    let z = c(1e-5, 0.0);
    let j = f.jets(z);
    for rr in 0..4 {
        let want = s.eval_theta(z, rr as u32);
        assert!((j[(rr, 0)] - want).norm() <= 1e-14 * want.norm().max(1.0));
    }
}

#[test]
fn frobenius_log_solution_matches_harmonic_number_oracle() {
    // d/dε log a_k(ε) at 0 is 5 (H_{5k} - H_k)
    let f = FrobeniusBasis::new(&quintic(), 200).unwrap();
    let z = c(2e-5, 1e-5);
    let mut f0 = Complex64::new(0.0, 0.0);
    let mut f1 = Complex64::new(0.0, 0.0);
    let mut zk = Complex64::new(1.0, 0.0);
    let mut harmonic = vec![0.0f64];
    for i in 1..=500 {
        harmonic.push(harmonic[i - 1] + 1.0 / i as f64);
    }
    for k in 0..60u64 {
        let a = multinomial(k).to_f64().unwrap();
        f0 += zk * a;
        f1 += zk * a * 5.0 * (harmonic[5 * k as usize] - harmonic[k as usize]);
        zk *= z;
    }
    let want = (z.ln() * f0 + f1) / Complex64::new(0.0, 2.0 * PI);
    let got = f.jets(z)[(0, 1)];
    assert!((got - want).norm() <= 1e-13 * want.norm(), "{got} vs {want}");
}

#[test]
fn transport_matches_series_at_both_endpoints() {
    let op = quintic();
    let f = FrobeniusBasis::new(&op, 200).unwrap();
    let (a, b) = (c(1e-6, 0.0), c(1e-4, 0.0));
    let plan = PathPlan::plan(&op, a, b, 1e-6).unwrap();
    let moved = integrate_matrix(&op, &f.jets(a), &plan, 1e-12).unwrap();
    assert!(rel_col_err(&moved, &f.jets(b)) <= 1e-10);
}

#[test]
fn zero_length_path_is_identity() {
    let op = quintic();
    let plan = PathPlan::new(&op, vec![c(1e-4, 1e-4)], 1e-6).unwrap();
    let y = DVector::from_vec(vec![c(1.0, 2.0), c(0.5, 0.0), c(0.0, -1.0), c(3.0, 1.0)]);
    assert_eq!(integrate_along(&op, &y, &plan, 1e-12).unwrap(), y);
}

#[test]
fn reversal_returns_initial_jet() {
    let op = quintic();
    let f = FrobeniusBasis::new(&op, 200).unwrap();
    let tol = 1e-12;
    let a = c(1e-4, 5e-5);
    let plan = PathPlan::plan(&op, a, c(-6e-4, 7e-4), 1e-5).unwrap();
    let start = f.jets(a);
    let there = integrate_matrix(&op, &start, &plan, tol).unwrap();
    let back = integrate_matrix(&op, &there, &plan.reversed(), tol).unwrap();
    assert!(rel_col_err(&back, &start) <= 10.0 * tol);
}

#[test]
fn transport_is_linear() {
    let op = quintic();
    let f = FrobeniusBasis::new(&op, 200).unwrap();
    let a = c(-1e-4, 1e-4);
    let plan = PathPlan::plan(&op, a, c(-1e-3, 2e-4), 1e-5).unwrap();
    let jets = f.jets(a);
    let (c1, c2) = (c(0.3, -1.2), c(2.0, 0.5));
    let u = jets.column(0).into_owned();
    let v = jets.column(2).into_owned();
    let tu = integrate_along(&op, &u, &plan, 1e-12).unwrap();
    let tv = integrate_along(&op, &v, &plan, 1e-12).unwrap();
    let tw = integrate_along(&op, &(&u * c1 + &v * c2), &plan, 1e-12).unwrap();
    let lin = tu * c1 + tv * c2;
    assert!((tw - &lin).norm() <= 1e-10 * lin.norm());
}

#[test]
fn homotopic_paths_agree() {
    let op = quintic();
    let f = FrobeniusBasis::new(&op, 200).unwrap();
    let tol = 1e-12;
    let a = c(1e-4, 1e-4);
    let b = c(-3e-4, 6e-4);
    let direct = PathPlan::new(&op, vec![a, b], 1e-5).unwrap();
    let bent = PathPlan::new(&op, vec![a, c(2e-4, 8e-4), b], 1e-5).unwrap();
    let j = f.jets(a);
    let y1 = integrate_matrix(&op, &j, &direct, tol).unwrap();
    let y2 = integrate_matrix(&op, &j, &bent, tol).unwrap();
    assert!(rel_col_err(&y1, &y2) <= 10.0 * tol);
}

#[test]
fn local_taylor_expansion_agrees_with_integrator() {
    let op = quintic();
    let solver = PeriodSolver::new(op.clone(), 200, 1e-12).unwrap();
    let center = c(4e-4, 3e-4);
    let target = center + c(-3e-5, 2e-5);
    let loc = LocalExpansion::new(&op, center).unwrap();
    let jc = solver.jets(center).unwrap();
    let by_taylor = loc.transport_to(target).unwrap() * &jc;
    let plan = PathPlan::new(&op, vec![center, target], 1e-6).unwrap();
    let by_rk = integrate_matrix(&op, &jc, &plan, 1e-12).unwrap();
    assert!(rel_col_err(&by_taylor, &by_rk) <= 1e-10);
}

#[test]
fn wronskian_nonzero_and_stable_across_tolerances() {
    let op = quintic();
    let coarse = PeriodSolver::new(op.clone(), 200, 1e-10).unwrap();
    let fine = PeriodSolver::new(op.clone(), 200, 1e-12).unwrap();
    for &z in &[c(1e-5, 0.0), c(-2e-4, 1e-4), c(5e-4, 5e-4), c(0.0, -1e-3)] {
        let w1 = derivative_frame(&op, z, &coarse.jets(z).unwrap())
            .unwrap()
            .determinant();
        let w2 = derivative_frame(&op, z, &fine.jets(z).unwrap()).unwrap().determinant();
        assert!(w2.norm() > 0.0);
        assert!((w1 - w2).norm() <= 1e-7 * w2.norm(), "z={z}");
    }
}

#[test]
fn degenerate_frame_is_reported() {
    let op = quintic();
    let f = FrobeniusBasis::new(&op, 200).unwrap();
    let z = c(1e-5, 0.0);
    let mut j = f.jets(z);
    let col = j.column(0).into_owned();
    j.set_column(1, &col);
    let err = derivative_frame(&op, z, &j).unwrap_err();
    assert!(err.to_string().contains("frame degenerate at t"));
}

#[test]
fn trivial_operator_frame_is_one() {
    let op = PFOperator::theta();
    let f = FrobeniusBasis::new(&op, 10).unwrap();
    let z = c(0.3, 0.1);
    let frame = derivative_frame(&op, z, &f.jets(z)).unwrap();
    assert_eq!(frame.shape(), (1, 1));
    assert!((frame[(0, 0)] - 1.0).norm() < 1e-15);
}
