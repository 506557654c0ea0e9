//! Acceptance suite: eight criteria, run in sequence so that the runtime
//! budgets are measured without competing tests. Prints one line per
//! criterion and exits non-zero if any fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use instanton::asymptotics::{alg_delta, expansion_check, ExpansionWindow};
use instanton::deformation::{d_flat, d_via_projection, ddstar_flat, PolyVectorField, VCoeffs};
use instanton::geometry::{wedge_gram, Grid4, TripleAtPoint};
use instanton::gibbons_hawking::{origin_model, random_config, standard_model, verify_sweep, Family, MonopoleConfig};
use instanton::kodaira::{classify, generate_fiber, validate, CurveConfig, FiberType};
use instanton::poly::{exponents_up_to, Poly4};
use instanton::torelli::{
    cartan_matrix, equal_up_to_permutation, is_singular, period_integral_numeric, roots, textbook_cartan, TNParams,
};
use instanton::twistor::{
    chiklr_reduce, dihedral_generators, dihedral_invariants, glue_check_ak, real_structure_ak, spectral_conservation,
    transition_determinant_residual, transition_pq, transition_pq_with_root, SpectralData, SpectralFamily,
    SpectralParam, TwistorPointAk,
};
use nalgebra::Matrix3;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn criterion_1() -> Outcome {
    let r = Rational64::new;
    let betas = [r(1, 1), r(1, 2), r(1, 6), r(5, 6), r(1, 4), r(3, 4), r(1, 3), r(2, 3)];
    let expected = [r(1, 1), r(2, 1), r(2, 1), r(4, 5), r(2, 1), r(2, 3), r(2, 1), r(1, 2)];
    let got: Vec<Rational64> = betas.iter().map(|&b| alg_delta(b).unwrap()).collect();
    let shown: Vec<String> = got.iter().map(|d| d.to_string()).collect();
    outcome(got == expected, format!("δ = [{}]", shown.join(", ")))
}

fn criterion_2() -> Outcome {
    let (q, vol) = wedge_gram(&TripleAtPoint::<f64>::flat());
    let gram_ok = q == Matrix3::identity() && vol == 1.0;
    let mut ddstar_bad = 0;
    let mut basis = 0;
    for e in exponents_up_to(6) {
        for slot in 0..4 {
            let mut c: [Poly4; 4] = Default::default();
            c[slot] = Poly4::monomial(e, num_rational::BigRational::one());
            let v = VCoeffs::new(c);
            basis += 1;
            if ddstar_flat(&v) != v.laplacian() {
                ddstar_bad += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut d_bad = 0;
    let fields = 25;
    for _ in 0..fields {
        let x = PolyVectorField::random(&mut rng, 5, 0.3);
        if d_via_projection(&x).unwrap() != d_flat(&x) {
            d_bad += 1;
        }
    }
    outcome(
        gram_ok && ddstar_bad == 0 && d_bad == 0,
        format!(
            "wedge_gram(flat) = (I, 1): {gram_ok}; DD* ≠ Δ on {ddstar_bad}/{basis} basis elements; \
             D ≠ 2·v_project∘lie_deform on {d_bad}/{fields} fields"
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 32;
    let spacing = 1.0 / (n - 1) as f64;
    let grid = Grid4::new([1.5, 1.5, 1.5, 0.0], [spacing; 4], [n; 4]).unwrap();
    let mut configs: Vec<MonopoleConfig> = (1..=4)
        .map(|k| random_config(&mut rng, Family::Ak, k, 0.1, 1.0, 0.2).unwrap())
        .collect();
    configs.extend((1..=5).map(|k| random_config(&mut rng, Family::DkSymmetric, k, 0.1, 1.0, 0.2).unwrap()));
    let mut ok = true;
    let (mut gram, mut metric) = (0.0f64, 0.0f64);
    let (mut worst_closed, mut worst_curl) = (4.0f64, 4.0f64);
    for cfg in &configs {
        let rep = match verify_sweep(cfg, &grid, spacing) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("sweep failed: {e}")),
        };
        gram = gram.max(rep.max.gram);
        metric = metric.max(rep.max.metric);
        for (r, worst) in [(rep.closedness_ratio, &mut worst_closed), (rep.curl_ratio, &mut worst_curl)] {
            if (r / 4.0 - 1.0).abs() > (*worst / 4.0 - 1.0).abs() {
                *worst = r;
            }
            ok &= (r / 4.0 - 1.0).abs() <= 0.1;
        }
    }
    ok &= gram < 1e-10 && metric < 1e-8;
    outcome(
        ok,
        format!(
            "{} configs × {} nodes; gram {gram:.1e}, metric {metric:.1e}, \
             worst ratios dω {worst_closed:.4}, dη−⋆dV {worst_curl:.4}",
            configs.len(),
            grid.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let w = ExpansionWindow::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let dk = random_config(&mut rng, Family::DkSymmetric, 4, 1.0, 1.0, 0.2).unwrap();
    let d = expansion_check(&dk, standard_model(&dk).center, &w).unwrap();
    let ak = MonopoleConfig::new(Family::Ak, 1.0, vec![[0.0, 0.0, 0.0], [3.0, 0.0, 0.0]]).unwrap();
    let unc = expansion_check(&ak, origin_model(&ak).center, &w).unwrap();
    let cen = expansion_check(&ak, standard_model(&ak).center, &w).unwrap();
    let ok = (d.lead_coeff - 16.0).abs() <= 1e-6
        && (d.remainder.exponent - 3.0).abs() <= 0.05
        && (unc.remainder.exponent - 2.0).abs() <= 0.05
        && (cen.remainder.exponent - 3.0).abs() <= 0.05;
    outcome(
        ok,
        format!(
            "D4 lead {:.9} exponent {:.4}; A1 uncentered {:.4}, centered {:.4}",
            d.lead_coeff, d.remainder.exponent, unc.remainder.exponent, cen.remainder.exponent
        ),
    )
}

fn fibers() -> Vec<(FiberType, CurveConfig)> {
    let mut types: Vec<FiberType> = (1..=12).map(FiberType::AChain).collect();
    types.push(FiberType::DCase1);
    types.push(FiberType::DCase2);
    types.extend((0..=12).map(FiberType::DCase3));
    types
        .into_iter()
        .map(|t| {
            let c = generate_fiber(&t, t.dynkin_rank().unwrap()).unwrap();
            (t, c)
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let fs = fibers();
    let roundtrip_bad = fs.iter().filter(|(t, c)| classify(c).fiber != *t).count();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut undetected = 0;
    let trials = 1000;
    for _ in 0..trials {
        let (_, base) = &fs[rng.random_range(0..fs.len())];
        let mut c = base.clone();
        let len = c.n.len();
        let mut delta = 0;
        while delta == 0 {
            delta = rng.random_range(-3..=3);
        }
        let slots = if c.d.is_some() { 4 } else { 3 };
        match rng.random_range(0..slots) {
            0 => c.n[rng.random_range(0..len)] += delta,
            1 => {
                let (i, j) = (rng.random_range(0..len), rng.random_range(0..len));
                c.s[i][j] += delta;
            }
            2 => c.a[rng.random_range(0..len)] += delta,
            _ => c.d.as_mut().unwrap()[rng.random_range(0..len)] += delta,
        }
        if validate(&c).is_valid() {
            undetected += 1;
        }
    }
    outcome(
        roundtrip_bad == 0 && undetected == 0,
        format!(
            "classify∘generate wrong on {roundtrip_bad}/{} types; {undetected}/{trials} perturbations undetected",
            fs.len()
        ),
    )
}

fn unit_box(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn annulus(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = rng.random_range(0.1f64.ln()..=10f64.ln()).exp();
    Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

fn spectral(rng: &mut ChaCha8Rng, family: SpectralFamily, k: usize) -> SpectralData {
    let n = if family == SpectralFamily::Ak { k + 1 } else { k };
    let params = (0..n)
        .map(|_| SpectralParam {
            a_re: rng.random_range(-1.0..1.0),
            a_im: rng.random_range(-1.0..1.0),
            b: rng.random_range(-1.0..1.0),
        })
        .collect();
    SpectralData::new(family, k, params).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut glue, mut invol, mut quad, mut dih, mut inv) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut branch, mut det, mut cons) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..100 {
        let k = i % 5;
        let sd = spectral(&mut rng, SpectralFamily::Ak, k);
        let pt = TwistorPointAk::on_variety(&sd, annulus(&mut rng), unit_box(&mut rng), unit_box(&mut rng));
        glue = glue.max(glue_check_ak(&sd, &pt).unwrap().residual_rel);
        let back = real_structure_ak(&real_structure_ak(&pt, k).unwrap(), k).unwrap();
        invol = invol.max(rel(back.zeta, pt.zeta).max(rel(back.z, pt.z)).max(rel(back.rho, pt.rho)).max(rel(back.xi, pt.xi)));

        let kd = 1 + i % 6;
        let sd = spectral(&mut rng, SpectralFamily::Dk, kd);
        let (zeta, z, r0, r1) = (annulus(&mut rng), unit_box(&mut rng), unit_box(&mut rng), unit_box(&mut rng));
        quad = quad.max(chiklr_reduce(&sd, zeta, z, r0, r1).unwrap().quadric_residual);
        let c = spectral_conservation(&sd, zeta, z, r0, r1).unwrap();
        cons = cons.max(c.curve_residual).max(c.scaling_residual);

        let kk = 3 + i % 6;
        let (u, v) = (unit_box(&mut rng), unit_box(&mut rng));
        let (x, y, zz, res) = dihedral_invariants(u, v, kk).unwrap();
        dih = dih.max(res);
        for g in dihedral_generators(kk) {
            let (u2, v2) = g(u, v);
            let (x2, y2, z2, _) = dihedral_invariants(u2, v2, kk).unwrap();
            inv = inv.max((x - x2).norm()).max((y - y2).norm()).max((zz - z2).norm());
        }

        let (p, q) = (unit_box(&mut rng), unit_box(&mut rng));
        let s = z.sqrt();
        let a = transition_pq_with_root(p, q, s, zeta, kd).unwrap();
        let b = transition_pq_with_root(p, q, -s, zeta, kd).unwrap();
        let e = transition_pq(p, q, z, zeta, kd).unwrap();
        let scale = a.0.norm() + a.1.norm();
        branch = branch.max(((a.0 - b.0).norm() + (a.1 - b.1).norm()).max((a.0 - e.0).norm() + (a.1 - e.1).norm()) / scale);
        det = det.max(transition_determinant_residual(z, zeta, kd).unwrap());
    }
    let exact = instanton::cli::exact_quadric_golden();
    let ok = glue < 1e-10
        && invol < 1e-12
        && quad < 1e-8
        && exact == 0.0
        && dih < 1e-10
        && inv < 1e-12
        && branch < 1e-12
        && det < 1e-10
        && cons < 1e-8;
    outcome(
        ok,
        format!(
            "glue {glue:.1e}, τ² {invol:.1e}, quadric {quad:.1e} (exact {exact}), dihedral {dih:.1e}/{inv:.1e}, \
             branch {branch:.1e}, det {det:.1e}, conservation {cons:.1e}"
        ),
    )
}

fn brute_singular(p: &TNParams) -> bool {
    let ps = &p.params;
    (0..ps.len()).any(|i| {
        (0..i).any(|j| {
            let (a, b) = (&ps[i], &ps[j]);
            let same = a.a_re == b.a_re && a.a_im == b.a_im && a.b == b.b;
            let opp = a.a_re == -b.a_re && a.a_im == -b.a_im && a.b == -b.b;
            same || (p.family == SpectralFamily::Dk && opp)
        })
    })
}

fn criterion_7() -> Outcome {
    let mut counts_ok = true;
    for k in 1..=8 {
        counts_ok &= roots(SpectralFamily::Ak, k).roots.len() == k * (k + 1);
        counts_ok &= roots(SpectralFamily::Dk, k).roots.len() == 2 * k * (k - 1);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut mismatches, mut planted) = (0, 0);
    for _ in 0..1000 {
        let family = if rng.random_bool(0.5) { SpectralFamily::Ak } else { SpectralFamily::Dk };
        let k = rng.random_range(2..=8);
        let n = if family == SpectralFamily::Ak { k + 1 } else { k };
        // a coarse grid of values makes accidental coincidences possible too
        let mut params: Vec<SpectralParam> = (0..n)
            .map(|_| SpectralParam {
                a_re: rng.random_range(-2..=2) as f64,
                a_im: rng.random_range(-2..=2) as f64,
                b: rng.random_range(-2..=2) as f64,
            })
            .collect();
        if rng.random_bool(0.5) {
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            if i != j {
                let s = if family == SpectralFamily::Dk && rng.random_bool(0.5) { -1.0 } else { 1.0 };
                let src = params[j];
                params[i] = SpectralParam {
                    a_re: s * src.a_re,
                    a_im: s * src.a_im,
                    b: s * src.b,
                };
                planted += 1;
            }
        }
        let p = TNParams { family, params };
        if is_singular(&p).singular != brute_singular(&p) {
            mismatches += 1;
        }
    }
    let mut cartan_ok = true;
    for k in 1..=10 {
        cartan_ok &= cartan_matrix(SpectralFamily::Ak, k).unwrap() == textbook_cartan(SpectralFamily::Ak, k).unwrap();
    }
    for k in 2..=10 {
        let m = cartan_matrix(SpectralFamily::Dk, k).unwrap();
        cartan_ok &= equal_up_to_permutation(&m, &textbook_cartan(SpectralFamily::Dk, k).unwrap());
    }
    let (mut orient, mut additive) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let cfg = random_config(&mut rng, Family::Ak, 2, 0.5, 1.0, 0.2).unwrap();
        let i01 = period_integral_numeric(&cfg, 0, 1, 32).unwrap();
        let i10 = period_integral_numeric(&cfg, 1, 0, 32).unwrap();
        let i12 = period_integral_numeric(&cfg, 1, 2, 32).unwrap();
        let i02 = period_integral_numeric(&cfg, 0, 2, 32).unwrap();
        orient = orient.max((i01 / i10 + 1.0).norm());
        additive = additive.max((i01 + i12 - i02).norm() / i02.norm());
    }
    let ok = counts_ok && mismatches == 0 && cartan_ok && orient < 1e-6 && additive < 1e-4;
    outcome(
        ok,
        format!(
            "root counts {counts_ok}; {mismatches}/1000 criterion mismatches ({planted} planted); cartan {cartan_ok}; \
             orientation {orient:.1e}, additivity {additive:.1e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_instanton");
    let configs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    let runs = [
        ("gh-verify", "gh_verify_dk.json"),
        ("decay-fit", "decay.csv"),
        ("alg-delta", "alg_delta.json"),
        ("alh-delta", "alh_delta.json"),
        ("expansion-check", "expansion_dk.json"),
        ("kodaira-classify", "kodaira_dcase3.json"),
        ("twistor-check", "twistor_ak.json"),
        ("twistor-check", "twistor_dk.json"),
        ("torelli", "torelli_d3.json"),
        ("period-integral", "period_ak.json"),
    ];
    let mut differing = Vec::new();
    for (cmd, file) in runs {
        let out = |threads: &str| {
            Command::new(bin)
                .args([cmd, "--seed", "11", "--threads", threads, "--config"])
                .arg(configs.join(file))
                .output()
                .expect("run instanton")
        };
        let (a, b) = (out("1"), out("8"));
        if a.stdout != b.stdout || a.stdout.is_empty() || a.status.code() != b.status.code() {
            differing.push(format!("{cmd} {file}"));
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} pipelines byte-identical at 1 and 8 threads; differing: {differing:?}", runs.len() - differing.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("delta table", criterion_1, Duration::from_millis(1)),
        ("flat-model identities", criterion_2, Duration::from_secs(5)),
        ("Gibbons-Hawking suite", criterion_3, Duration::from_secs(60)),
        ("decay rates", criterion_4, Duration::from_secs(10)),
        ("Kodaira classifier", criterion_5, Duration::from_secs(1)),
        ("twistor identities", criterion_6, Duration::from_secs(10)),
        ("Torelli suite", criterion_7, Duration::from_secs(30)),
        ("reproducibility", criterion_8, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < *budget;
        let pass = o.ok && in_time;
        failed += usize::from(!pass);
        let budget = if *budget == Duration::MAX { "none".to_string() } else { format!("{budget:?}") };
        println!(
            "acceptance {} {name}: {} [{}; {elapsed:.2?}, budget {budget}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all 8 criteria passed");
}
