use instanton::asymptotics::{alg_delta, alh_delta, decay_fit, DecaySamples, ExpansionWindow, Lattice3};
use instanton::deformation::{v_membership_residual, VCoeffs};
use instanton::geometry::{is_definite, normalize_triple, sd_project, wedge_gram, TripleAtPoint, TwoForm};
use instanton::gibbons_hawking::{potential, random_config, verify_point, Family};
use instanton::kodaira::{generate_fiber, validate, FiberType};
use instanton::torelli::{cartan_matrix, periods, roots, TNParams};
use instanton::twistor::{
    glue_check_ak, real_structure_ak, twistor_line_form, SpectralData, SpectralFamily, SpectralParam, TwistorPointAk,
};
use nalgebra::Matrix3;
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn flat_recombined(m: [[f64; 3]; 3]) -> TripleAtPoint<f64> {
    TripleAtPoint::<f64>::flat().recombine(&m)
}

fn near_identity() -> impl Strategy<Value = [[f64; 3]; 3]> {
    prop::array::uniform3(prop::array::uniform3(-0.4..0.4f64)).prop_map(|mut m| {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += 1.0;
        }
        m
    })
}

fn two_form() -> impl Strategy<Value = TwoForm<f64>> {
    prop::array::uniform6(-2.0..2.0f64).prop_map(TwoForm::new)
}

fn param() -> impl Strategy<Value = SpectralParam> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(a_re, a_im, b)| SpectralParam { a_re, a_im, b })
}

fn complex(lo: f64, hi: f64) -> impl Strategy<Value = Complex64> {
    (lo..hi, lo..hi).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_yields_identity_gram(m in near_identity()) {
        let t = flat_recombined(m);
        prop_assume!(Matrix3::from_fn(|i, j| m[i][j]).determinant().abs() > 0.05);
        prop_assert!(is_definite(&t));
        let (q, _) = wedge_gram(&normalize_triple(&t).unwrap());
        prop_assert!((q - Matrix3::identity()).amax() < 1e-12);
    }

    #[test]
    fn self_dual_projection_is_idempotent_and_orthogonal(w in two_form(), k in 1usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(&mut rng, Family::Ak, k, 0.3, 1.0, 0.2).unwrap();
        let chart = instanton::gibbons_hawking::GHChart::away_from_strings(&cfg, [2.0, 1.7, 2.2], 0.3);
        let (_, g) = instanton::gibbons_hawking::gh_triple(&cfg, &chart).unwrap();
        let (sd, asd) = sd_project(&w, &g).unwrap();
        let (sd2, asd2) = sd_project(&sd, &g).unwrap();
        prop_assert!((sd2 - sd.clone()).max_abs() < 1e-12 * (1.0 + sd.max_abs()));
        prop_assert!(asd2.max_abs() < 1e-12 * (1.0 + sd.max_abs()));
        prop_assert!(sd.wedge(&asd).abs() < 1e-12 * (1.0 + w.max_abs()).powi(2));
    }

    #[test]
    fn symmetric_potential_is_even(k in 0usize..6, seed in any::<u64>(), x in prop::array::uniform3(-3.0..3.0f64)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(&mut rng, Family::DkSymmetric, k, 1.0, 1.0, 0.2).unwrap();
        let (a, b) = (potential(&cfg, &x), potential(&cfg, &[-x[0], -x[1], -x[2]]));
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn gibbons_hawking_triple_and_metric(k in 1usize..5, seed in any::<u64>(), x in prop::array::uniform3(1.5..2.5f64)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(&mut rng, Family::Ak, k, 0.5, 1.0, 0.2).unwrap();
        let r = verify_point(&cfg, x, 0.0, 1e-3).unwrap();
        prop_assert!(r.gram < 1e-10);
        prop_assert!(r.metric < 1e-8);
    }

    #[test]
    fn v_reconstitution_is_in_v(c in prop::array::uniform4(-3.0..3.0f64), m in near_identity()) {
        let base = normalize_triple(&flat_recombined(m));
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        let theta = VCoeffs::new(c).reconstitute(&base);
        prop_assert!(v_membership_residual(&theta, &base) < 1e-12);
    }

    #[test]
    fn alh_delta_is_basis_independent(
        rows in prop::array::uniform3(prop::array::uniform3(-2.0..2.0f64)),
        ops in prop::collection::vec((0usize..3, 0usize..3, -2i32..=2), 1..6),
    ) {
        let lat = Lattice3::new(rows);
        prop_assume!(lat.is_ok());
        let lat = lat.unwrap();
        let b = lat.basis();
        prop_assume!(b.determinant().abs() > 0.2);
        let mut r = rows;
        for (i, j, s) in ops {
            if i != j {
                for c in 0..3 {
                    r[i][c] += s as f64 * r[j][c];
                }
            }
        }
        let other = Lattice3::new(r).unwrap();
        let (d1, d2) = (alh_delta(&lat), alh_delta(&other));
        prop_assert!((d1 - d2).abs() <= 1e-9 * d1);
    }

    #[test]
    fn decay_fit_is_exact_and_stable(p in 0.5..5.0f64, c in 0.1..10.0f64, eps in -0.1..0.1f64, q in 0.5..3.0f64) {
        let radii = ExpansionWindow::default().radii();
        let pure = DecaySamples::new(radii.iter().map(|&r| (r, c * r.powf(-p))).collect()).unwrap();
        prop_assert!((decay_fit(&pure).unwrap().exponent - p).abs() < 1e-9);
        let r0 = radii[0];
        let pert = DecaySamples::new(
            radii.iter().map(|&r| (r, c * r.powf(-p) * (1.0 + eps * (r / r0).powf(-q)))).collect(),
        ).unwrap();
        prop_assert!((decay_fit(&pert).unwrap().exponent - p).abs() <= 0.05);
    }

    #[test]
    fn alg_delta_satisfies_its_definition((num, den) in (1i64..40).prop_flat_map(|d| (1..=d, Just(d)))) {
        let beta = Rational64::new(num, den);
        let d = alg_delta(beta).unwrap();
        let two_beta = beta * 2;
        let n = two_beta - d * beta;
        prop_assert!(n.is_integer() && n < two_beta && d > Rational64::from_integer(0));
        // no integer strictly between n and 2β
        prop_assert!(n + 1 >= two_beta);
    }

    #[test]
    fn periods_are_linear(ps in prop::collection::vec(param(), 3..7), dk in any::<bool>()) {
        let family = if dk { SpectralFamily::Dk } else { SpectralFamily::Ak };
        let p = TNParams { family, params: ps };
        let rs = roots(family, p.k()).roots;
        for r1 in &rs {
            for r2 in &rs {
                let s = r1.add(r2);
                if rs.contains(&s) {
                    let (a, b, c) = (periods(&p, r1).unwrap(), periods(&p, r2).unwrap(), periods(&p, &s).unwrap());
                    for i in 0..3 {
                        prop_assert!((a[i] + b[i] - c[i]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn line_form_is_degenerate(m in near_identity(), zeta in complex(-3.0, 3.0)) {
        let t = normalize_triple(&flat_recombined(m));
        prop_assume!(t.is_ok());
        let w = twistor_line_form(&t.unwrap(), zeta);
        prop_assert!(w.wedge(&w).norm() < 1e-10 * (1.0 + zeta.norm()).powi(4));
    }

    #[test]
    fn gluing_and_real_structure(
        ps in prop::collection::vec(param(), 1..5),
        zeta in complex(-3.0, 3.0),
        z in complex(-1.0, 1.0),
        rho in complex(-1.0, 1.0),
    ) {
        prop_assume!(zeta.norm() > 0.1 && rho.norm() > 1e-3);
        let k = ps.len() - 1;
        let sd = SpectralData::new(SpectralFamily::Ak, k, ps).unwrap();
        let pt = TwistorPointAk::on_variety(&sd, zeta, z, rho);
        prop_assert!(glue_check_ak(&sd, &pt).unwrap().residual_rel < 1e-10);
        let img = real_structure_ak(&pt, k).unwrap();
        prop_assert!(img.variety_residual(&sd) < 1e-10);
    }
}

#[test]
fn cartan_matrices_are_symmetric_with_diagonal_two() {
    for k in 1..=10 {
        for family in [SpectralFamily::Ak, SpectralFamily::Dk] {
            if let Ok(m) = cartan_matrix(family, k) {
                for i in 0..m.len() {
                    assert_eq!(m[i][i], 2);
                    for j in 0..m.len() {
                        assert_eq!(m[i][j], m[j][i]);
                    }
                }
            }
        }
    }
}

#[test]
fn generated_fibers_are_valid_with_degree_two() {
    let mut types: Vec<FiberType> = (1..=12).map(FiberType::AChain).collect();
    types.extend((0..=12).map(FiberType::DCase3));
    for t in types {
        let c = generate_fiber(&t, t.dynkin_rank().unwrap()).unwrap();
        assert!(validate(&c).is_valid(), "{t}");
        assert_eq!(c.n.iter().zip(&c.a).map(|(n, a)| n * a).sum::<i64>(), 2, "{t}");
    }
}
