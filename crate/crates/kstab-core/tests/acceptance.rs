//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS/FAIL line (visible with `cargo test -- --nocapture`). Criteria 1-7
//! live here; the batch-determinism criterion drives the CLI binary and
//! lives in the CLI crate's acceptance tests.

use kstab_core::analyzer::{analyze, AnalyzerConfig, VerdictState};
use kstab_core::filtration::{LimitConfig, ToricFiltration};
use kstab_core::jnorm::{self, TwistObjective};
use kstab_core::model::ToricFanoModel;
use kstab_core::nafunc;
use kstab_core::pl::{AffinePiece, PlConvexFunction};
use kstab_core::rational::{abs, rat, rat_int};
use kstab_core::sampling;
use kstab_core::vector::QVec;

use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::Instant;

/// Budgeted criteria run one at a time so each wall-clock measurement only
/// covers its own work.
static BUDGET_GATE: Mutex<()> = Mutex::new(());

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn load(name: &str) -> Arc<ToricFanoModel> {
    let path = corpus_dir().join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).expect("corpus file");
    let value: serde_json::Value = serde_json::from_str(&text).expect("corpus json");
    Arc::new(ToricFanoModel::from_json(&value).expect("corpus model"))
}

fn del_pezzo_surfaces() -> Vec<Arc<ToricFanoModel>> {
    ["p2", "p1xp1", "bl1p2", "bl2p2", "bl3p2"]
        .iter()
        .map(|n| load(n))
        .collect()
}

fn report_line(criterion: &str, passed: bool) {
    println!(
        "acceptance {criterion}: {}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "acceptance {criterion} failed");
}

fn random_filtration(
    rng: &mut rand_chacha::ChaCha8Rng,
    model: &Arc<ToricFanoModel>,
) -> ToricFiltration {
    let pieces = sampling::random_convex_pieces(rng, model.dim());
    ToricFiltration::from_pieces(Arc::clone(model), pieces).expect("random filtration")
}

#[test]
fn criterion_1_exact_benchmarks() {
    let _gate = BUDGET_GATE.lock().unwrap();
    let started = Instant::now();
    let p2 = load("p2");
    let p1xp1 = load("p1xp1");
    let bl1 = load("bl1p2");
    assert_eq!(p2.barycenter(), &QVec::from_ints(&[0, 0]));
    assert_eq!(p1xp1.barycenter(), &QVec::from_ints(&[0, 0]));
    assert_eq!(bl1.barycenter(), &QVec(vec![rat(1, 12), rat(1, 12)]));
    assert_eq!(p2.delta_toric().unwrap().0, rat_int(1));
    assert_eq!(p1xp1.delta_toric().unwrap().0, rat_int(1));
    assert_eq!(bl1.delta_toric().unwrap().0, rat(6, 7));
    let elapsed = started.elapsed();
    println!("criterion 1 elapsed: {elapsed:?}");
    report_line(
        "criterion 1 (exact benchmarks)",
        elapsed.as_secs_f64() < 1.0,
    );
}

#[test]
fn criterion_2_del_pezzo_verdict_table() {
    let _gate = BUDGET_GATE.lock().unwrap();
    let started = Instant::now();
    let expected_futaki = [true, true, false, false, true];
    let models = [
        ("p2", expected_futaki[0]),
        ("p1xp1", expected_futaki[1]),
        ("bl1p2", expected_futaki[2]),
        ("bl2p2", expected_futaki[3]),
        ("bl3p2", expected_futaki[4]),
    ];
    let config = AnalyzerConfig::default();
    for (name, futaki_vanishes) in models {
        let report = analyze(&load(name), &config).unwrap();
        assert_eq!(
            report.verdicts.futaki_vanishes, futaki_vanishes,
            "futaki verdict for {name}"
        );
        let expected_g = if futaki_vanishes {
            VerdictState::True
        } else {
            VerdictState::False
        };
        assert_eq!(
            report.verdicts.g_uniformly_k_stable, expected_g,
            "reduced uniform verdict for {name}"
        );
        assert_eq!(
            report.verdicts.uniformly_k_stable,
            VerdictState::False,
            "non-reduced uniform verdict for {name}"
        );
    }
    let elapsed = started.elapsed();
    println!("criterion 2 elapsed: {elapsed:?}");
    report_line(
        "criterion 2 (del Pezzo verdict table)",
        elapsed.as_secs_f64() < 5.0,
    );
}

#[test]
fn criterion_3_twist_identity_suite() {
    let _gate = BUDGET_GATE.lock().unwrap();
    let started = Instant::now();
    let level = 4u32;
    for model in del_pezzo_surfaces() {
        let name = model.name().unwrap_or("anonymous").to_string();
        let mut rng = sampling::rng(&name, 0xc3);
        for _ in 0..100 {
            let filt = random_filtration(&mut rng, &model);
            let xi = sampling::random_qvec(&mut rng, model.dim(), 2, 3);
            let zeta = sampling::random_qvec(&mut rng, model.dim(), 2, 3);
            let twisted = filt.twist(&xi);

            // Mean law: ena(F_xi) = ena(F) - Fut(xi), exactly.
            assert_eq!(
                twisted.ena().unwrap(),
                filt.ena().unwrap() - model.futaki(&xi),
                "mean twist law on {name}"
            );

            // Threshold part is twist-invariant at the finite level.
            assert_eq!(
                nafunc::lna_m(&twisted, level).unwrap(),
                nafunc::lna_m(&filt, level).unwrap(),
                "threshold twist invariance on {name}"
            );

            // Valuation twist law: beta(zeta + xi) = beta(zeta) - Fut(xi).
            assert_eq!(
                model.beta(&(&zeta + &xi)),
                model.beta(&zeta) - model.futaki(&xi),
                "beta twist law on {name}"
            );

            // Metric twist identity, exactly at the finite level.
            assert_eq!(
                twisted.phi_value(level, &zeta).unwrap(),
                filt.phi_value(level, &(&zeta + &xi)).unwrap() + model.theta(&xi, &zeta),
                "metric twist identity on {name}"
            );

            // Twist composition.
            let xi2 = sampling::random_qvec(&mut rng, model.dim(), 2, 3);
            assert_eq!(
                filt.twist(&xi).twist(&xi2).profile().pieces(),
                filt.twist(&(&xi + &xi2)).profile().pieces(),
                "twist composition on {name}"
            );
        }
    }
    let elapsed = started.elapsed();
    println!("criterion 3 elapsed: {elapsed:?}");
    report_line(
        "criterion 3 (twist identity suite)",
        elapsed.as_secs_f64() < 30.0,
    );
}

#[test]
fn criterion_4_sandwich_and_key_inequality() {
    let _gate = BUDGET_GATE.lock().unwrap();
    let started = Instant::now();
    for model in del_pezzo_surfaces() {
        let name = model.name().unwrap_or("anonymous").to_string();
        let n = rat_int(model.dim() as i64);
        let mut rng = sampling::rng(&name, 0xc4);
        for _ in 0..100 {
            let zeta = sampling::random_qvec(&mut rng, model.dim(), 3, 4);
            let filt = ToricFiltration::from_valuation(Arc::clone(&model), &zeta).unwrap();
            let s = model.s_invariant(&zeta);
            let j = filt.jna().unwrap();
            assert!(&s / &n <= j, "lower sandwich on {name}");
            assert!(j <= &n * &s, "upper sandwich on {name}");
        }
        // Key inequality: S(zeta) + phi_m(zeta) >= ena for the filtration's
        // own metric and for sampled configurations.
        for m in [8u32, 16, 32] {
            let zeta = QVec(vec![rat(1, 2); model.dim()]);
            let own = ToricFiltration::from_valuation(Arc::clone(&model), &zeta).unwrap();
            let sample = random_filtration(&mut rng, &model);
            for filt in [&own, &sample] {
                let lhs = model.s_invariant(&zeta) + filt.phi_value(m, &zeta).unwrap();
                assert!(
                    lhs >= filt.ena().unwrap(),
                    "key inequality on {name} at level {m}"
                );
            }
        }
    }
    let elapsed = started.elapsed();
    println!("criterion 4 elapsed: {elapsed:?}");
    report_line("criterion 4 (sandwich suite)", true);
}

#[test]
fn criterion_5_finite_level_convergence() {
    let _gate = BUDGET_GATE.lock().unwrap();
    let started = Instant::now();
    for model in del_pezzo_surfaces() {
        let name = model.name().unwrap_or("anonymous").to_string();
        let mut rng = sampling::rng(&name, 0xc5);
        let zeta = sampling::random_qvec(&mut rng, model.dim(), 2, 2);
        let filt = ToricFiltration::from_valuation(Arc::clone(&model), &zeta).unwrap();
        let exact = filt.ena().unwrap();
        let span = filt.e_plus() - filt.e_minus();
        let a = model.log_discrepancy(&zeta);
        for m in [8u32, 16, 32, 40] {
            let gap = abs(&(filt.ena_m(m).unwrap() - &exact));
            assert!(
                gap <= rat(2, m as i64) * &span,
                "mean convergence bound on {name} at {m}"
            );
            let phi = filt.phi_value(m, &zeta).unwrap();
            assert!(
                abs(&phi) <= &a / rat_int(m as i64),
                "metric discrepancy bound on {name} at {m}"
            );
        }
        // Threshold part of a product configuration approaches the
        // obstruction-consistent value ena - futaki(direction); on models
        // with vanishing obstruction that is the mean itself.
        let mut e1 = vec![0i64; model.dim()];
        e1[0] = 1;
        let direction = QVec::from_ints(&e1);
        let product = ToricFiltration::from_pieces(
            Arc::clone(&model),
            vec![AffinePiece {
                gradient: direction.clone(),
                constant: rat_int(1),
            }],
        )
        .unwrap();
        let lna40 = nafunc::lna_m(&product, 40).unwrap();
        let expected = product.ena().unwrap() - model.futaki(&direction);
        let gap = abs(&(lna40 - &expected));
        assert!(gap <= rat(1, 20), "product threshold limit on {name}");
        if model.futaki_vanishes() {
            assert_eq!(expected, product.ena().unwrap());
        }
        let elapsed_model = started.elapsed();
        assert!(
            elapsed_model.as_secs_f64() < 120.0 * 5.0,
            "per-model budget exceeded"
        );
    }
    let elapsed = started.elapsed();
    println!("criterion 5 elapsed: {elapsed:?}");
    report_line(
        "criterion 5 (finite-level convergence)",
        elapsed.as_secs_f64() < 600.0,
    );
}

#[test]
fn criterion_6_weight_orders_ding() {
    let _gate = BUDGET_GATE.lock().unwrap();
    let started = Instant::now();
    let tol = rat(1, 20);
    for model in del_pezzo_surfaces() {
        let name = model.name().unwrap_or("anonymous").to_string();
        let mut rng = sampling::rng(&name, 0xc6);
        for _ in 0..50 {
            let pieces = sampling::random_convex_pieces(&mut rng, model.dim());
            let Ok(f) = PlConvexFunction::new(model.polytope().clone(), pieces) else {
                continue;
            };
            let weight = nafunc::cm(&model, &f).unwrap().value;
            let ding = nafunc::ding_of_configuration(&f).unwrap();
            assert!(
                weight >= &ding - &tol,
                "weight ordering on {name}: {weight} < {ding}"
            );
        }
        // Product configurations on symmetric models have weight zero; the
        // normalization pin reproduces the obstruction on a lattice basis.
        for k in 0..model.dim() {
            let mut e = vec![0i64; model.dim()];
            e[k] = 1;
            let f = PlConvexFunction::new(
                model.polytope().clone(),
                vec![AffinePiece {
                    gradient: QVec::from_ints(&e),
                    constant: rat(1, 3),
                }],
            )
            .unwrap();
            let weight = nafunc::cm(&model, &f).unwrap().value;
            assert_eq!(weight, model.futaki(&QVec::from_ints(&e)));
            if model.futaki_vanishes() {
                assert_eq!(weight, rat_int(0), "product weight on {name}");
            }
        }
    }
    let elapsed = started.elapsed();
    println!("criterion 6 elapsed: {elapsed:?}");
    report_line("criterion 6 (weight/Ding ordering)", true);
}

#[test]
fn criterion_7_reduced_norm_optimizer() {
    let _gate = BUDGET_GATE.lock().unwrap();
    let started = Instant::now();
    for model in del_pezzo_surfaces() {
        let name = model.name().unwrap_or("anonymous").to_string();
        let mut rng = sampling::rng(&name, 0xc7);

        // Product configurations: zero minimum, argmin flattens the profile.
        for _ in 0..5 {
            let zeta = sampling::random_qvec(&mut rng, model.dim(), 2, 3);
            let filt = ToricFiltration::from_valuation(Arc::clone(&model), &zeta).unwrap();
            let sol = jnorm::jnat(&filt).unwrap();
            assert_eq!(sol.min, rat_int(0), "product minimum on {name}");
            assert_eq!(sol.argmin, zeta, "product argmin on {name}");
            assert!(filt.twist(&sol.argmin).is_product());
        }

        // LP vs grid: the grid never beats the program. One configuration
        // per model is swept at the full default granularity (1/20 steps on
        // [-3,3]^2); the rest at a coarser stride.
        for round in 0..20 {
            let filt = random_filtration(&mut rng, &model);
            let sol = jnorm::jnat(&filt).unwrap();
            let objective = TwistObjective::new(&filt).unwrap();
            assert_eq!(objective.eval(&sol.argmin), sol.min);
            let steps = 20i64;
            let stride = if round == 0 { 1 } else { 6 };
            for a in (-3 * steps..=3 * steps).step_by(stride) {
                for b in (-3 * steps..=3 * steps).step_by(stride) {
                    let xi = QVec(vec![rat(a, steps), rat(b, steps)]);
                    assert!(objective.eval(&xi) >= sol.min, "grid beat LP on {name}");
                }
            }
        }

        // Properness certificate audited on 200 random directions.
        let filt = random_filtration(&mut rng, &model);
        let cert = jnorm::properness_certificate(&filt).unwrap();
        let objective = TwistObjective::new(&filt).unwrap();
        for _ in 0..200 {
            let xi = sampling::random_qvec(&mut rng, model.dim(), 10, 2);
            assert!(
                objective.eval(&xi) >= cert.bound(&xi),
                "certificate bound violated on {name} at {xi}"
            );
        }
    }
    let elapsed = started.elapsed();
    println!("criterion 7 elapsed: {elapsed:?}");
    report_line(
        "criterion 7 (reduced-norm optimizer)",
        elapsed.as_secs_f64() < 30.0,
    );
}

#[test]
fn in_process_report_determinism() {
    // Complementary to the CLI-level batch determinism criterion.
    let config = AnalyzerConfig::default();
    for name in ["p2", "bl1p2"] {
        let a = analyze(&load(name), &config).unwrap().to_json();
        let b = analyze(&load(name), &config).unwrap().to_json();
        assert_eq!(a, b, "in-process determinism for {name}");
    }
    report_line("in-process determinism", true);
}

#[test]
fn fractional_model_full_pipeline() {
    // A model with a larger grading unit exercises the same pipeline.
    let model = load("p113");
    assert_eq!(model.ell0(), 3);
    let report = analyze(&model, &AnalyzerConfig::default()).unwrap();
    assert!(!report.verdicts.futaki_vanishes);
    assert_eq!(report.verdicts.toric_k_semistable, VerdictState::False);
    let (delta, _) = model.delta_toric().unwrap();
    assert!(delta < rat_int(1));
    let lim = ToricFiltration::trivial(Arc::clone(&model))
        .unwrap()
        .phi_limit(&QVec(vec![rat(1, 3), rat(1, 2)]), &LimitConfig::default())
        .unwrap();
    assert!(lim.converged);
    assert_eq!(lim.value, rat_int(0));
    report_line("fractional-vertex model pipeline", true);
}
