use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use resolvent_lab::generators::Builtin;
use resolvent_lab::resolvent::{
    certify_uniqueness, closed_form_ex1, closed_form_ex2, derivative_at, solve, solve_with, Certificate,
    SolveOptions,
};
use resolvent_lab::{Cx, DiskGrid};

const SWEEP: [f64; 5] = [0.1, 0.6, 1.0, 2.0, 10.0];

fn random_disk_point(rng: &mut ChaCha8Rng, max_modulus: f64) -> Cx {
    let rho = max_modulus * rng.gen::<f64>().sqrt();
    Cx::from_polar(rho, rng.gen::<f64>() * std::f64::consts::TAU)
}

#[test]
fn residual_schwarz_and_derivative_identities_on_grid() {
    let pts = DiskGrid::standard().points();
    for b in Builtin::ALL {
        let g = b.spec();
        for r in SWEEP {
            let worst = pts
                .par_iter()
                .map(|&w| {
                    let s = solve(&g, r, w).unwrap_or_else(|e| panic!("{} r={r} w={w}: {e}", b.name()));
                    let z = s.z;
                    let residual = (z + g.f(z) * r - w).norm();
                    let schwarz = z.norm() - w.norm();
                    let dj = derivative_at(&g.map, r, z).unwrap();
                    let ident = (dj * (1.0 + g.df(z).unwrap() * r) - 1.0).norm();
                    (residual, schwarz, ident)
                })
                .reduce(|| (0.0, f64::NEG_INFINITY, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1), a.2.max(b.2)));
            assert!(worst.0 < 1e-10, "{} r={r}: residual {}", b.name(), worst.0);
            assert!(worst.1 <= 1e-12, "{} r={r}: Schwarz excess {}", b.name(), worst.1);
            assert!(worst.2 < 1e-12, "{} r={r}: derivative identity {}", b.name(), worst.2);
        }
    }
}

#[test]
fn oracle_equivalence_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cases: Vec<(f64, Cx)> = (0..1000)
        .map(|_| (10f64.powf(rng.gen_range(-2.0..1.0)), random_disk_point(&mut rng, 0.999)))
        .collect();
    for (b, oracle) in [
        (Builtin::Ex1, closed_form_ex1 as fn(f64, Cx) -> resolvent_lab::Result<Cx>),
        (Builtin::Ex2, closed_form_ex2 as fn(f64, Cx) -> resolvent_lab::Result<Cx>),
    ] {
        let g = b.spec();
        let worst = cases
            .par_iter()
            .map(|&(r, w)| (solve(&g, r, w).unwrap().z - oracle(r, w).unwrap()).norm())
            .reduce(|| 0.0, f64::max);
        assert!(worst < 1e-10, "{}: {worst}", b.name());
    }
}

#[test]
fn winding_certificate_is_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for b in Builtin::ALL {
        let g = b.spec();
        for _ in 0..100 {
            let r = rng.gen_range(0.01..10.0);
            let w = random_disk_point(&mut rng, 0.95);
            let s = solve_with(&g, r, w, &SolveOptions::certified()).unwrap();
            assert_eq!(s.certificate, Certificate::Winding(1), "{} r={r} w={w}", b.name());
        }
    }
}

#[test]
fn explicit_certificate_contour() {
    let g = Builtin::Ex2.spec();
    assert_eq!(certify_uniqueness(&g, 0.6, Cx::new(0.5, 0.0), 0.99).unwrap(), 1);
}

#[test]
fn large_r_converges_monotonically_to_origin() {
    let w = Cx::new(0.6, -0.3);
    for b in Builtin::ALL {
        let g = b.spec();
        let d: Vec<f64> = [1.0, 10.0, 100.0, 1000.0]
            .iter()
            .map(|&r| solve(&g, r, w).unwrap().z.norm())
            .collect();
        assert!(d.windows(2).all(|p| p[1] < p[0]), "{}: {d:?}", b.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solve_satisfies_equation(r in 0.0f64..50.0, rho in 0.0f64..0.999, theta in 0.0f64..6.3, b in 0usize..4) {
        let g = Builtin::ALL[b].spec();
        let w = Cx::from_polar(rho, theta);
        let z = solve(&g, r, w).unwrap().z;
        prop_assert!((z + g.f(z) * r - w).norm() < 1e-10);
        prop_assert!(z.norm() <= w.norm() + 1e-12);
    }

    #[test]
    fn resolvent_is_monotone_in_r(r in 0.01f64..10.0, rho in 0.01f64..0.99, theta in 0.0f64..6.3) {
        // |J_s(w)| >= |J_r(w)| for s < r, from the nesting of the images
        let g = Builtin::Ex2.spec();
        let w = Cx::from_polar(rho, theta);
        let a = solve(&g, r, w).unwrap().z.norm();
        let b = solve(&g, 2.0 * r, w).unwrap().z.norm();
        prop_assert!(b <= a + 1e-12);
    }
}
