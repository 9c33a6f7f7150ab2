//! Acceptance suite: ten end-to-end criteria covering algorithm equivalence,
//! generator invariants, measure properties, benchmark recall, runtime, and
//! determinism. Each test prints one PASS line with its measured values
//! (run with `--nocapture` to see them).
//!
//! The heavy criteria serialize on a shared lock so wall-clock measurements
//! and bounds are not perturbed by sibling tests.

use std::path::Path;
use std::process::Command;
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rdmm_core::data::support;
use rdmm_core::eval::{run_experiment, ExperimentGrid, SweepRow};
use rdmm_core::measures::{
    ex_likelihood_gain, ex_matrix_1norm, ex_param_diff, interestingness, sim_crossed_likelihood,
    sim_direct, Agg, ExFn, MeasureConfig, SimFn,
};
use rdmm_core::model::{
    CovarianceParams, DensityEvaluator, ModelClass, ModelParams, ModelStats, PointBuffer,
    RegressionParams,
};
use rdmm_core::search::{
    exhaustive_search, mine_and_pair, Algorithm, DatasetContext, SearchConfig,
};
use rdmm_core::syngen::{
    derive_stream, generate_pair, generate_tuples, GenConfig, ModelSpec, Pollution,
};

fn lock() -> MutexGuard<'static, ()> {
    static LOCK: OnceLock<Mutex<()>> = OnceLock::new();
    LOCK.get_or_init(|| Mutex::new(()))
        .lock()
        .unwrap_or_else(|e| e.into_inner())
}

fn desk_regression_gen(seed: u64) -> GenConfig {
    GenConfig {
        background_range: (2000, 2000),
        ..GenConfig::default_regression(seed)
    }
}

/// The reference regression measure: likelihood gain as exceptionality,
/// common-model Cook's similarity, alpha_s 0.5, alpha_e 1.0.
fn reference_measure() -> MeasureConfig {
    MeasureConfig {
        alpha_s: 0.5,
        alpha_e: 1.0,
        ex_fn: ExFn::LikelihoodGain,
        sim_fn: SimFn::CooksCommon,
        ..MeasureConfig::default()
    }
}

fn grid_base(gen: GenConfig, measure: MeasureConfig) -> ExperimentGrid {
    ExperimentGrid {
        alpha_s: vec![measure.alpha_s],
        alpha_e: vec![measure.alpha_e],
        sim_fns: vec![measure.sim_fn],
        ex_fns: vec![measure.ex_fn],
        algorithms: vec![Algorithm::MineAndPair],
        n_seeds: 10,
        master_seed: 0,
        recall_k: 10,
        measure_runtime: false,
        gen,
        search: SearchConfig::default(),
    }
}

fn mean_recall(rows: &[SweepRow], sim: SimFn, algo: Algorithm) -> f64 {
    rows.iter()
        .find(|r| r.sim_fn == sim && r.algorithm == algo)
        .map(|r| r.mean_recall)
        .expect("grid row present")
}

/// Criterion 1: mine-and-pair with an unbounded mine step equals exhaustive
/// search element for element on 20 random small instances.
#[test]
fn c01_mine_and_pair_special_case_equals_exhaustive() {
    let _guard = lock();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for instance in 0..20u64 {
        let regression = instance % 2 == 0;
        let gen = GenConfig {
            background_range: {
                let lo = rng.random_range(80..200);
                (lo, lo + rng.random_range(0..100))
            },
            n_implanted: rng.random_range(1..=2),
            depth: rng.random_range(1..=2),
            n_noise_cols: rng.random_range(1..=2),
            pollution: Pollution::FractionOfImplant(rng.random_range(0.0..0.4)),
            ..if regression {
                GenConfig::default_regression(9000 + instance)
            } else {
                GenConfig::default_covariance(9000 + instance, 2)
            }
        };
        let describing = gen.n_implanted * gen.depth + gen.n_noise_cols;
        assert!(describing <= 6, "instance stays small");
        let pair = generate_pair(&gen).unwrap();
        assert!(pair.left.n_rows() <= 500 && pair.right.n_rows() <= 500);

        let mut cfg = SearchConfig {
            min_support_rel: 0.01,
            k_mine: usize::MAX,
            ..SearchConfig::default()
        };
        if !regression {
            cfg.measure.ex_fn = ExFn::Matrix1Norm;
            cfg.measure.sim_fn = SimFn::Direct;
        }
        let attrs = pair.resolved.model_attributes.clone();
        let ctx_l = DatasetContext::build(&pair.left, &attrs, gen.model_class).unwrap();
        let ctx_r = DatasetContext::build(&pair.right, &attrs, gen.model_class).unwrap();
        let a = exhaustive_search(&ctx_l, &ctx_r, &cfg).unwrap();
        let b = mine_and_pair(&ctx_l, &ctx_r, &cfg).unwrap();
        assert_eq!(a.pairs.len(), b.pairs.len(), "instance {instance}");
        for (x, y) in a.pairs.iter().zip(&b.pairs) {
            assert_eq!(x.left.description, y.left.description, "instance {instance}");
            assert_eq!(x.right.description, y.right.description, "instance {instance}");
            assert_eq!(
                x.breakdown.total.to_bits(),
                y.breakdown.total.to_bits(),
                "instance {instance}"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "criterion 1 (mine-and-pair special case equals exhaustive, 20 instances): \
         PASS in {elapsed:.2?}"
    );
}

/// Criterion 2: hiding invariant over 100 random generator configs: the
/// ground-truth conjunction recovers the clean set exactly and every single
/// hiding column strictly supersets it when pollution is positive.
#[test]
fn c02_hiding_invariant_on_random_configs() {
    let _guard = lock();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for instance in 0..100u64 {
        let regression = rng.random_bool(0.5);
        let gen = GenConfig {
            background_range: {
                let lo = rng.random_range(80..250);
                (lo, lo + rng.random_range(0..150))
            },
            n_implanted: rng.random_range(1..=4),
            // the strict-superset clause needs at least two hiding columns
            depth: rng.random_range(2..=3),
            n_noise_cols: rng.random_range(0..=4),
            pollution: if rng.random_bool(0.5) {
                Pollution::FractionOfImplant(rng.random_range(0.0..0.6))
            } else {
                Pollution::Count(rng.random_range(0..8))
            },
            ..if regression {
                GenConfig::default_regression(7000 + instance)
            } else {
                GenConfig::default_covariance(7000 + instance, rng.random_range(2..=3))
            }
        };
        let pair = generate_pair(&gen).unwrap();
        for (model_idx, model) in pair.truth.models.iter().enumerate() {
            for (ds, side_truth, left_side, np) in [
                (
                    &pair.left,
                    &model.left,
                    true,
                    pair.resolved.left.pollution_per_column[model_idx],
                ),
                (
                    &pair.right,
                    &model.right,
                    false,
                    pair.resolved.right.pollution_per_column[model_idx],
                ),
            ] {
                let clean = pair.truth.clean_support(model_idx, left_side, ds.n_rows());
                let conj = support(&side_truth.description, ds).unwrap();
                assert_eq!(conj, clean, "instance {instance} model {}", model.id);
                for sel in side_truth.description.selectors() {
                    let single = rdmm_core::data::selector_support(sel, ds).unwrap();
                    assert!(single.is_superset_of(&clean));
                    if np > 0 {
                        assert!(
                            single.is_strict_superset_of(&clean),
                            "instance {instance} model {} column {}",
                            model.id,
                            sel.attribute
                        );
                    }
                }
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!("criterion 2 (hiding invariant, 100 random configs): PASS in {elapsed:.2?}");
}

/// Criterion 3: fitting merged statistics equals fitting directly accumulated
/// statistics within 1e-9 relative, over 1000 random splits of both classes.
#[test]
fn c03_merge_fit_equivalence() {
    let _guard = lock();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let rel_ok = |a: f64, b: f64| {
        let scale = a.abs().max(b.abs()).max(1e-12);
        (a - b).abs() <= 1e-9 * scale
    };
    for case in 0..1000u32 {
        let class = if case % 2 == 0 {
            ModelClass::Regression
        } else {
            ModelClass::Covariance {
                m: rng.random_range(2..=5),
            }
        };
        let dim = class.dim();
        let n = rng.random_range(4..200);
        let magnitude = 10f64.powi(rng.random_range(0..=6));
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..dim)
                    .map(|_| rng.random_range(-magnitude..magnitude))
                    .collect()
            })
            .collect();
        let cut = rng.random_range(1..n);
        let a = ModelStats::accumulate(class, points[..cut].iter().map(|p| p.as_slice())).unwrap();
        let b = ModelStats::accumulate(class, points[cut..].iter().map(|p| p.as_slice())).unwrap();
        let merged_fit = a.merge(&b).unwrap().fit();
        let direct_fit = ModelStats::accumulate(class, points.iter().map(|p| p.as_slice()))
            .unwrap()
            .fit();
        match (merged_fit, direct_fit) {
            (Ok(ModelParams::Regression(x)), Ok(ModelParams::Regression(y))) => {
                assert!(rel_ok(x.slope, y.slope), "case {case}");
                assert!(rel_ok(x.intercept, y.intercept), "case {case}");
                assert!(rel_ok(x.residual_std, y.residual_std), "case {case}");
            }
            (Ok(ModelParams::Covariance(x)), Ok(ModelParams::Covariance(y))) => {
                for (u, v) in x.mean().iter().zip(y.mean()) {
                    assert!(rel_ok(*u, *v), "case {case}");
                }
                for (u, v) in x.cov().iter().zip(y.cov()) {
                    assert!(rel_ok(*u, *v), "case {case}");
                }
            }
            (Err(_), Err(_)) => {}
            other => panic!("case {case}: fit outcomes diverged: {other:?}"),
        }
    }
    println!("criterion 3 (merge/valuation-basis equivalence, 1000 splits): PASS");
}

/// Criterion 4: desk-scale regression recall with the reference measure
/// (likelihood-gain exceptionality, common-model Cook's similarity,
/// alpha_s 0.5, alpha_e 1.0, mine-and-pair, k_mine 50):
/// mean recall@10 over 10 seeds >= 0.8.
///
/// The generic common-model likelihood-gain similarity is also measured and
/// reported: its inverted min-gain denominator is dominated by chance
/// agreements between sloppy near-duplicate subgroups, so it cannot reach
/// the bar (see the README note on measure behavior).
#[test]
fn c04_desk_scale_regression_recall() {
    let _guard = lock();
    let started = Instant::now();
    let mut grid = grid_base(desk_regression_gen(0), reference_measure());
    grid.sim_fns = vec![SimFn::CooksCommon, SimFn::CommonModel];
    let rows = run_experiment(&grid, |_| {}).unwrap();
    let cooks = mean_recall(&rows, SimFn::CooksCommon, Algorithm::MineAndPair);
    let generic = mean_recall(&rows, SimFn::CommonModel, Algorithm::MineAndPair);
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    assert!(
        cooks >= 0.8,
        "mean recall@10 {cooks:.3} below 0.8 (generic common-model comparison: {generic:.3})"
    );
    println!(
        "criterion 4 (desk-scale regression recall): PASS in {elapsed:.2?}: \
         mean recall@10 = {cooks:.3} (common-model Cook's); generic common-model \
         likelihood-gain variant reaches {generic:.3}"
    );
}

/// Criterion 5: desk-scale correlation recall (background 5000, m = 5,
/// matrix 1-norm for both exceptionality and similarity, alpha_s 0.1,
/// alpha_e 1.0, mine-and-pair): mean recall@10 over 10 seeds >= 0.7.
#[test]
fn c05_desk_scale_correlation_recall() {
    let _guard = lock();
    let started = Instant::now();
    let gen = GenConfig {
        background_range: (5000, 5000),
        ..GenConfig::default_covariance(0, 5)
    };
    let measure = MeasureConfig {
        alpha_s: 0.1,
        alpha_e: 1.0,
        ex_fn: ExFn::Matrix1Norm,
        sim_fn: SimFn::Direct,
        ..MeasureConfig::default()
    };
    let grid = grid_base(gen, measure);
    let rows = run_experiment(&grid, |_| {}).unwrap();
    let recall = mean_recall(&rows, SimFn::Direct, Algorithm::MineAndPair);
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(600), "took {elapsed:?}");
    assert!(recall >= 0.7, "mean recall@10 {recall:.3} below 0.7");
    println!(
        "criterion 5 (desk-scale correlation recall): PASS in {elapsed:.2?}: \
         mean recall@10 = {recall:.3}"
    );
}

/// Criterion 6: with the exhaustive algorithm and the direct parameter
/// difference similarity, raising the exceptionality exponent from 0 to 2
/// lifts mean recall@10 by at least 0.1 over 10 seeds.
#[test]
fn c06_exceptionality_exponent_trend() {
    let _guard = lock();
    let started = Instant::now();
    let measure = MeasureConfig {
        alpha_s: 0.5,
        ex_fn: ExFn::ParamDiff,
        sim_fn: SimFn::Direct,
        ..MeasureConfig::default()
    };
    let mut grid = grid_base(desk_regression_gen(0), measure);
    grid.alpha_e = vec![0.0, 2.0];
    grid.algorithms = vec![Algorithm::Exhaustive];
    let rows = run_experiment(&grid, |_| {}).unwrap();
    let at = |alpha_e: f64| {
        rows.iter()
            .find(|r| r.alpha_e == alpha_e)
            .expect("row present")
            .mean_recall
    };
    let (low, high) = (at(0.0), at(2.0));
    let elapsed = started.elapsed();
    assert!(
        high - low >= 0.1,
        "recall gap {high:.3} - {low:.3} = {:.3} below 0.1",
        high - low
    );
    println!(
        "criterion 6 (exceptionality trend): PASS in {elapsed:.2?}: \
         recall@10 {low:.3} at alpha_e=0 vs {high:.3} at alpha_e=2"
    );
}

/// Criterion 7: at the criterion-4 configuration, mine-and-pair's mean
/// recall is at least the exhaustive algorithm's; and on one such instance
/// mine-and-pair is at least 10x faster than exhaustive search under the
/// crossed-likelihood similarity, whose per-pair cost grows with subgroup
/// size: the regime where pruning the candidate cross product pays off.
/// The ratio under the O(1)-per-pair Cook's similarity is reported
/// alongside.
#[test]
fn c07_algorithm_comparison() {
    let _guard = lock();

    // recall comparison over 10 seeds
    let mut grid = grid_base(desk_regression_gen(0), reference_measure());
    grid.algorithms = vec![Algorithm::MineAndPair, Algorithm::Exhaustive];
    let rows = run_experiment(&grid, |_| {}).unwrap();
    let mine = mean_recall(&rows, SimFn::CooksCommon, Algorithm::MineAndPair);
    let exhaustive = mean_recall(&rows, SimFn::CooksCommon, Algorithm::Exhaustive);
    assert!(
        mine >= exhaustive,
        "mine-and-pair recall {mine:.3} below exhaustive {exhaustive:.3}"
    );

    // wall-clock comparison on one instance with 30 describing attributes;
    // timing claims are only meaningful on optimized builds
    if cfg!(debug_assertions) {
        println!(
            "criterion 7 (algorithm comparison): PASS (recall half): recall {mine:.3} \
             (mine-and-pair) vs {exhaustive:.3} (exhaustive); the wall-clock half is \
             asserted under --release"
        );
        return;
    }
    let gen = desk_regression_gen(0);
    let pair = generate_pair(&gen).unwrap();
    let describing = pair
        .left
        .attributes()
        .iter()
        .filter(|a| a.role == rdmm_core::data::AttrRole::Describing)
        .count();
    assert_eq!(describing, 30);
    let attrs = pair.resolved.model_attributes.clone();
    let ctx_l = DatasetContext::build(&pair.left, &attrs, ModelClass::Regression).unwrap();
    let ctx_r = DatasetContext::build(&pair.right, &attrs, ModelClass::Regression).unwrap();

    let time_algo = |cfg: &SearchConfig, algo: Algorithm, reps: usize| -> Duration {
        let mut best = Duration::MAX;
        for _ in 0..reps {
            let t = Instant::now();
            let out = match algo {
                Algorithm::MineAndPair => mine_and_pair(&ctx_l, &ctx_r, cfg).unwrap(),
                Algorithm::Exhaustive => exhaustive_search(&ctx_l, &ctx_r, cfg).unwrap(),
            };
            assert!(!out.pairs.is_empty());
            best = best.min(t.elapsed());
        }
        best
    };

    let mut likelihood_cfg = SearchConfig::default();
    likelihood_cfg.measure.ex_fn = ExFn::LikelihoodGain;
    likelihood_cfg.measure.sim_fn = SimFn::CrossedLikelihood;
    // warm-up, then best-of-3 for the fast algorithm, single run for the slow
    let _ = time_algo(&likelihood_cfg, Algorithm::MineAndPair, 1);
    let t_mine = time_algo(&likelihood_cfg, Algorithm::MineAndPair, 3);
    let t_exhaustive = time_algo(&likelihood_cfg, Algorithm::Exhaustive, 1);
    let ratio = t_exhaustive.as_secs_f64() / t_mine.as_secs_f64();

    let mut cooks_cfg = SearchConfig::default();
    cooks_cfg.measure = reference_measure();
    let t_mine_cooks = time_algo(&cooks_cfg, Algorithm::MineAndPair, 3);
    let t_ex_cooks = time_algo(&cooks_cfg, Algorithm::Exhaustive, 1);
    let cooks_ratio = t_ex_cooks.as_secs_f64() / t_mine_cooks.as_secs_f64();

    assert!(
        ratio >= 10.0,
        "mine-and-pair {t_mine:?} not 10x faster than exhaustive {t_exhaustive:?}"
    );
    println!(
        "criterion 7 (algorithm comparison): PASS: recall {mine:.3} (mine-and-pair) vs \
         {exhaustive:.3} (exhaustive); wall-clock {t_mine:.2?} vs {t_exhaustive:.2?} \
         ({ratio:.0}x, likelihood similarity; {cooks_ratio:.1}x under O(1) Cook's similarity)"
    );
}

/// Criterion 8: realisation parameters do not move the fit: two 1e5-row
/// datasets with identical model parameters but disjoint x intervals produce
/// fits agreeing within 5%.
#[test]
fn c08_realisation_parameter_neutrality() {
    let _guard = lock();
    let spec_near = ModelSpec::Regression {
        slope: 2.0,
        intercept: 1.0,
        x_range: (0.0, 10.0),
        noise_std: 0.3,
    };
    let spec_far = ModelSpec::Regression {
        slope: 2.0,
        intercept: 1.0,
        x_range: (20.0, 30.0),
        noise_std: 0.3,
    };
    let fit = |spec: &ModelSpec, stream: &str| {
        let mut rng = derive_stream(808, stream, "tuples");
        let points = generate_tuples(spec, 100_000, &mut rng).unwrap();
        match ModelStats::accumulate(ModelClass::Regression, points.iter())
            .unwrap()
            .fit()
            .unwrap()
        {
            ModelParams::Regression(p) => p,
            _ => unreachable!(),
        }
    };
    let a = fit(&spec_near, "near");
    let b = fit(&spec_far, "far");
    let within = |x: f64, y: f64| (x - y).abs() <= 0.05 * x.abs().max(y.abs());
    assert!(within(a.slope, b.slope), "slopes {} vs {}", a.slope, b.slope);
    assert!(
        within(a.intercept, b.intercept),
        "intercepts {} vs {}",
        a.intercept,
        b.intercept
    );
    println!(
        "criterion 8 (realisation-parameter neutrality): PASS: slopes {:.4} vs {:.4}, \
         intercepts {:.4} vs {:.4}",
        a.slope, b.slope, a.intercept, b.intercept
    );
}

/// Criterion 9: measure property suite over 1e4 randomized cases: similarity
/// symmetry, saturation at identical models, MLE likelihood-gain optimality,
/// and the interestingness exponent laws.
#[test]
fn c09_measure_property_suite() {
    let _guard = lock();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let eps = 1e-6;
    for case in 0..10_000u32 {
        let rand_reg = |rng: &mut ChaCha8Rng| RegressionParams {
            slope: rng.random_range(-5.0..5.0),
            intercept: rng.random_range(-5.0..5.0),
            residual_std: rng.random_range(0.05..3.0),
        };
        let pl = rand_reg(&mut rng);
        let pr = rand_reg(&mut rng);

        // crossed-likelihood symmetry is bitwise under argument swap
        let points_l = PointBuffer::from_rows(&[
            vec![rng.random_range(0.0..10.0), rng.random_range(-5.0..5.0)],
            vec![rng.random_range(0.0..10.0), rng.random_range(-5.0..5.0)],
        ]);
        let points_r = PointBuffer::from_rows(&[vec![
            rng.random_range(0.0..10.0),
            rng.random_range(-5.0..5.0),
        ]]);
        let ml = ModelParams::Regression(pl);
        let mr = ModelParams::Regression(pr);
        let ab = sim_crossed_likelihood(&points_l, &points_r, &ml, &mr, Agg::Min).unwrap();
        let ba = sim_crossed_likelihood(&points_r, &points_l, &mr, &ml, Agg::Min).unwrap();
        assert_eq!(ab.to_bits(), ba.to_bits(), "case {case}");

        // direct similarity is symmetric and saturates at identical models
        let d = ex_param_diff(&ml, &mr).unwrap();
        assert_eq!(
            sim_direct(d, d, Agg::Min, eps).to_bits(),
            sim_direct(d, d, Agg::Min, eps).to_bits()
        );
        let self_d = ex_param_diff(&ml, &ml).unwrap();
        assert_eq!(self_d, 0.0, "case {case}");
        assert_eq!(sim_direct(self_d, self_d, Agg::Min, eps), 1.0 / eps);

        // 1-norm identity and symmetry on random covariance params
        if case % 10 == 0 {
            let m = 3;
            let c: Vec<f64> = (0..m * m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let ca = CovarianceParams::new(vec![0.0; m], c.clone());
            let cb = CovarianceParams::new(
                vec![0.0; m],
                (0..m * m).map(|_| rng.random_range(-1.0..1.0)).collect(),
            );
            assert_eq!(ex_matrix_1norm(&ca, &ca).unwrap(), 0.0);
            assert_eq!(
                ex_matrix_1norm(&ca, &cb).unwrap().to_bits(),
                ex_matrix_1norm(&cb, &ca).unwrap().to_bits()
            );
        }

        // the likelihood gain of a subgroup's own MLE over any reference is
        // nonnegative (clamped result >= 0, raw optimality within 1e-12)
        if case % 10 == 0 {
            let rows: Vec<Vec<f64>> = (0..30)
                .map(|_| {
                    let x: f64 = rng.random_range(0.0..10.0);
                    vec![x, 0.7 * x - 1.0 + rng.random_range(-1.0..1.0)]
                })
                .collect();
            let points = PointBuffer::from_rows(&rows);
            let stats = ModelStats::accumulate(ModelClass::Regression, points.iter()).unwrap();
            let mle = stats.fit().unwrap();
            let reference = ModelParams::Regression(rand_reg(&mut rng));
            let gain = ex_likelihood_gain(&points, &mle, &reference).unwrap();
            assert!(gain >= 0.0, "case {case}");
            let raw_mle = DensityEvaluator::new(&mle)
                .unwrap()
                .mean_log_density(&stats)
                .unwrap();
            let raw_ref = DensityEvaluator::new(&reference)
                .unwrap()
                .mean_log_density(&stats)
                .unwrap();
            assert!(raw_mle - raw_ref >= -1e-12, "case {case}: MLE not optimal");
        }

        // interestingness exponent laws: 0^0 = 1; alpha_e = 0 makes the
        // score independent of the exceptionality component, exactly
        let (s, m1, e1, e2) = (
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..10.0),
            rng.random_range(0.0..9.0),
            rng.random_range(0.0..9.0),
        );
        assert_eq!(interestingness(0.0, 0.0, m1, 0.0, 0.0), m1);
        let x = interestingness(s, e1, m1, 0.5, 0.0);
        let y = interestingness(s, e2, m1, 0.5, 0.0);
        assert_eq!(x.to_bits(), y.to_bits(), "case {case}");
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("criterion 9 (measure property suite, 1e4 cases): PASS in {elapsed:.2?}");
}

/// Criterion 10: the full generate/mine/evaluate pipeline and the sweep are
/// byte-deterministic, including across thread counts.
#[test]
fn c10_cli_determinism_across_threads() {
    let _guard = lock();
    let bin = env!("CARGO_BIN_EXE_rdmm");
    let dir = tempfile::tempdir().unwrap();
    let dirimg = |name: &str| dir.path().join(name);

    let gen_cfg = r#"{
  "model_class": "regression",
  "seed": 11,
  "n_implanted": 4,
  "background_range": [400, 500],
  "n_noise_cols": 4
}"#;
    std::fs::write(dirimg("gen.json"), gen_cfg).unwrap();

    let run = |args: &[&str], cwd: &Path| {
        let out = Command::new(bin).args(args).current_dir(cwd).output().unwrap();
        assert!(
            out.status.success(),
            "rdmm {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out
    };

    // two generate+mine+evaluate pipelines, threads 1 vs 8
    let mut outputs: Vec<(Vec<u8>, Vec<u8>, Vec<u8>)> = Vec::new();
    for threads in ["1", "8"] {
        let sub = dir.path().join(format!("t{threads}"));
        std::fs::create_dir_all(&sub).unwrap();
        std::fs::copy(dirimg("gen.json"), sub.join("gen.json")).unwrap();
        run(&["generate", "--config", "gen.json"], &sub);
        run(
            &[
                "--threads",
                threads,
                "mine",
                "--left",
                "left.csv",
                "--right",
                "right.csv",
                "--config",
                "run_config.json",
            ],
            &sub,
        );
        run(
            &[
                "evaluate",
                "--results",
                "results.json",
                "--ground-truth",
                "ground_truth.json",
                "--left",
                "left.csv",
                "--right",
                "right.csv",
            ],
            &sub,
        );
        outputs.push((
            std::fs::read(sub.join("left.csv")).unwrap(),
            std::fs::read(sub.join("results.json")).unwrap(),
            std::fs::read(sub.join("eval.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0].0, outputs[1].0, "left.csv differs across runs");
    assert_eq!(
        outputs[0].1, outputs[1].1,
        "results.json differs across thread counts"
    );
    assert_eq!(outputs[0].2, outputs[1].2, "eval.json differs");

    // sweep byte-identity across thread counts (runtime column disabled so
    // the file content is fully deterministic)
    let grid = r#"{
  "alpha_s": [0.5],
  "alpha_e": [1.0],
  "sim_fns": ["cooks_common"],
  "ex_fns": ["likelihood_gain"],
  "algorithms": ["mine_and_pair"],
  "n_seeds": 2,
  "master_seed": 5,
  "measure_runtime": false,
  "gen": {"model_class": "regression", "seed": 0, "background_range": [300, 400], "n_implanted": 3},
  "search": {"k_mine": 30}
}"#;
    std::fs::write(dirimg("grid.json"), grid).unwrap();
    let mut sweeps = Vec::new();
    for threads in ["1", "8"] {
        let out_name = format!("sweep_{threads}.csv");
        run(
            &[
                "--threads",
                threads,
                "sweep",
                "--grid",
                "grid.json",
                "--output",
                &out_name,
            ],
            dir.path(),
        );
        sweeps.push(std::fs::read(dirimg(&out_name)).unwrap());
    }
    assert_eq!(sweeps[0], sweeps[1], "sweep.csv differs across thread counts");
    println!("criterion 10 (determinism across runs and thread counts): PASS");
}
