use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qbandit::bounds::random;
use qbandit::qmat::*;
use qbandit::rng;
use qbandit::Error;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn to_na(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Independent fidelity: eigen square roots from nalgebra, trace norm from its SVD.
fn fidelity_oracle(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let root = |m: &ComplexMatrix| {
        let eig = to_na(m).symmetric_eigen();
        let d = eig.eigenvalues.map(|x| Complex64::new(x.max(0.0).sqrt(), 0.0));
        &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
    };
    let prod = root(rho.matrix()) * root(sigma.matrix());
    let s: f64 = prod.singular_values().iter().sum();
    s * s
}

#[test]
fn tensor_examples() {
    let i2 = ComplexMatrix::identity(2);
    assert_eq!(tensor(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
    let a = ComplexMatrix::from_diag(&[1.0, 2.0]);
    let b = ComplexMatrix::from_diag(&[3.0, 4.0]);
    assert_eq!(tensor(&a, &b).unwrap(), ComplexMatrix::from_diag(&[3.0, 4.0, 6.0, 8.0]));
    let xi = tensor(&gates::pauli_x(), &i2).unwrap();
    assert_eq!(xi.mul_vec(&gates::basis(4, 0)), gates::basis(4, 2));
}

#[test]
fn tensor_cap() {
    let big = ComplexMatrix::identity(64);
    assert_eq!(tensor(&big, &big).unwrap().rows(), 4096);
    let bigger = ComplexMatrix::identity(65);
    assert!(matches!(tensor(&big, &bigger), Err(Error::DimensionCap(_, 4096))));
    assert!(tensor_with_cap(&ComplexMatrix::identity(4), &ComplexMatrix::identity(4), 8)
        .unwrap_err()
        .to_string()
        .contains("dimension cap exceeded"));
}

#[test]
fn eig_diagonal() {
    let e = hermitian_eig(&ComplexMatrix::from_diag(&[3.0, 1.0, 2.0])).unwrap();
    assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
}

#[test]
fn eig_pauli_x() {
    let e = hermitian_eig(&gates::pauli_x()).unwrap();
    assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let minus = [c(h), c(-h)];
    let plus = [c(h), c(h)];
    assert!((inner(&minus, &e.vectors.column(0)).norm() - 1.0).abs() < 1e-12);
    assert!((inner(&plus, &e.vectors.column(1)).norm() - 1.0).abs() < 1e-12);
}

#[test]
fn eig_rejects_non_hermitian() {
    let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let err = hermitian_eig(&m).unwrap_err();
    assert!(err.to_string().contains("hermitian check failed"));
}

fn eig_residuals(h: &ComplexMatrix) -> (f64, f64) {
    let e = hermitian_eig(h).unwrap();
    let v = &e.vectors;
    let hv = h.matmul(v);
    let vl = v.matmul(&ComplexMatrix::from_diag(&e.values));
    let res = (&hv - &vl).frobenius_norm() / h.frobenius_norm().max(1e-300);
    let orth = v.unitarity_residual();
    assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    (res, orth)
}

#[test]
fn eig_random_16() {
    let mut r = rng::seeded(11);
    for _ in 0..20 {
        let h = random::hermitian(16, &mut r);
        let (res, orth) = eig_residuals(&h);
        assert!(res <= 1e-9 && orth <= 1e-9, "{res} {orth}");
    }
}

#[test]
fn eig_degenerate() {
    let mut r = rng::seeded(12);
    let v = random::unitary(6, &mut r);
    let h = ComplexMatrix::from_diag(&[1.0, 1.0, 1.0, -2.0, -2.0, 0.0]).conjugate_by(&v);
    let mut h = h;
    h.hermitize();
    let (res, orth) = eig_residuals(&h);
    assert!(res <= 1e-12 && orth <= 1e-12);
}

#[test]
fn fidelity_examples() {
    let mut r = rng::seeded(1);
    let rho = random::density(5, &mut r);
    assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
    let zero = PureState::basis(2, 0).density();
    let plus = PureState::uniform(2).density();
    assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-14);
    let err = fidelity(&zero, &DensityMatrix::maximally_mixed(3)).unwrap_err();
    assert!(err.to_string().contains("dim mismatch"));
}

#[test]
fn fidelity_matches_svd_oracle() {
    let mut r = rng::seeded(2);
    for _ in 0..50 {
        let a = random::full_rank_density(8, &mut r);
        let b = random::full_rank_density(8, &mut r);
        let ours = fidelity(&a, &b).unwrap();
        let oracle = fidelity_oracle(&a, &b);
        assert!((ours - oracle).abs() <= 1e-9, "{ours} vs {oracle}");
    }
}

#[test]
fn trace_distance_examples() {
    let mut r = rng::seeded(3);
    let rho = random::density(4, &mut r);
    assert!(trace_distance(&rho, &rho).unwrap().abs() < 1e-12);
    let a = PureState::basis(3, 0).density();
    let b = PureState::basis(3, 2).density();
    assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-14);
    for (p, q) in [(0.3, 0.8), (0.5, 0.5), (0.0, 1.0), (0.91, 0.9)] {
        let x = DensityMatrix::diagonal(&[p, 1.0 - p]).unwrap();
        let y = DensityMatrix::diagonal(&[q, 1.0 - q]).unwrap();
        assert!((trace_distance(&x, &y).unwrap() - f64::abs(p - q)).abs() < 1e-14);
    }
}

#[test]
fn purity_examples() {
    let mut r = rng::seeded(4);
    assert!((purity(&random::pure_state(6, &mut r).density()) - 1.0).abs() < 1e-12);
    assert!((purity(&DensityMatrix::maximally_mixed(7)) - 1.0 / 7.0).abs() < 1e-15);
    let zero = PureState::basis(2, 0).density();
    let plus = PureState::uniform(2).density();
    let mix = DensityMatrix::mixture(&[0.5, 0.5], &[&zero, &plus]);
    assert!((purity(&mix) - 0.75).abs() < 1e-15);
}

/// Double-sum partial trace over the second factor of an (a ⊗ b) operator.
fn trace_second_oracle(m: &ComplexMatrix, a: usize, b: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a, a);
    for i in 0..a {
        for j in 0..a {
            for k in 0..b {
                out[(i, j)] += m[(i * b + k, j * b + k)];
            }
        }
    }
    out
}

#[test]
fn partial_trace_examples() {
    let mut r = rng::seeded(5);
    let ra = random::density(3, &mut r);
    let rb = random::density(2, &mut r);
    let prod = DensityMatrix::from_matrix_unchecked(tensor(ra.matrix(), rb.matrix()).unwrap());
    let kept = partial_trace(&prod, &Subsystems::new(&[3, 2], &[0])).unwrap();
    assert!((kept.matrix() - ra.matrix()).max_abs() < 1e-14);
    let kept_b = partial_trace(&prod, &Subsystems::new(&[3, 2], &[1])).unwrap();
    assert!((kept_b.matrix() - rb.matrix()).max_abs() < 1e-14);

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = PureState::new(vec![c(h), c(0.0), c(0.0), c(h)]).unwrap().density();
    let half = partial_trace(&bell, &Subsystems::new(&[2, 2], &[0])).unwrap();
    assert!((half.matrix() - &ComplexMatrix::identity(2).scale_real(0.5)).max_abs() < 1e-15);

    let err = partial_trace(&bell, &Subsystems::new(&[3, 2], &[0])).unwrap_err();
    assert!(err.to_string().contains("bad subsystem spec"));
    assert!(partial_trace(&bell, &Subsystems::new(&[2, 2], &[2])).is_err());
}

#[test]
fn partial_operator_identity() {
    let mut r = rng::seeded(6);
    for _ in 0..20 {
        let rho = random::density(8, &mut r);
        let o = random::gaussian_matrix(4, 4, &mut r);
        let lifted = tensor(&o, &ComplexMatrix::identity(2)).unwrap().matmul(rho.matrix());
        let lhs = partial_trace_operator(&lifted, &Subsystems::new(&[4, 2], &[0])).unwrap();
        let reduced = trace_second_oracle(rho.matrix(), 4, 2);
        let rhs = o.matmul(&reduced);
        assert!((&lhs - &rhs).max_abs() <= 1e-10);
        assert!((&lhs - &trace_second_oracle(&lifted, 4, 2)).max_abs() <= 1e-12);
    }
}

#[test]
fn helstrom_examples() {
    let mut r = rng::seeded(7);
    let rho = random::density(4, &mut r);
    assert!((helstrom_success(&rho, &rho).unwrap() - 0.5).abs() < 1e-12);
    let a = PureState::basis(2, 0).density();
    let b = PureState::basis(2, 1).density();
    assert!((helstrom_success(&a, &b).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn density_validation() {
    assert!(DensityMatrix::new(ComplexMatrix::from_diag(&[0.5, 0.6])).is_err());
    assert!(DensityMatrix::new(ComplexMatrix::from_diag(&[1.2, -0.2])).is_err());
    assert!(DensityMatrix::new(ComplexMatrix::from_diag(&[1.0 + 1e-11, -1e-11])).is_ok());
    assert!(PureState::new(vec![c(1.0), c(1e-3)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), dim in 1usize..10) {
        let mut r = rng::seeded(seed);
        let h = random::hermitian(dim, &mut r);
        let (res, orth) = eig_residuals(&h);
        prop_assert!(res <= 1e-9 && orth <= 1e-9);
    }

    #[test]
    fn fidelity_symmetric_and_bounded(seed in any::<u64>(), dim in 2usize..7) {
        let mut r = rng::seeded(seed);
        let a = random::density(dim, &mut r);
        let b = random::density(dim, &mut r);
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        prop_assert!((0.0..=1.0).contains(&fab));
        prop_assert!((fab - fba).abs() <= 1e-9);
    }
}
