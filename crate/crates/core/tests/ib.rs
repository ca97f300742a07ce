mod common;

use approx::assert_abs_diff_eq;
use common::{is_stochastic, line_palette, random_encoder, random_simplex, random_space};
use ibcolor::ib::{
    accuracy, anneal_curve, bayesian_decoder, effective_lexicon_size, expected_distortion, fixed_point_step,
    geometric_schedule, ib_objective, meaning_information, solve_ib, AnnealConfig, AnnealMode, Encoder, Prior,
};
use ibcolor::info::{entropy, kl_divergence, mutual_information};
use ibcolor::meaning_space::MeaningSpace;
use ibcolor::Error;
use ndarray::{array, Array2};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space_on_line(n: usize, step: f64) -> MeaningSpace {
    MeaningSpace::build(&line_palette(n, step), 64.0).unwrap()
}

#[test]
fn mutual_information_examples() {
    let px = [0.3, 0.7];
    let py = [0.6, 0.4];
    let product = Array2::from_shape_fn((2, 2), |(i, j)| px[i] * py[j]);
    assert_abs_diff_eq!(mutual_information(product.view()).unwrap(), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(
        mutual_information(array![[0.5, 0.0], [0.0, 0.5]].view()).unwrap(),
        1.0,
        epsilon = 1e-15
    );
    let hand = 2.0 * 0.4 * (0.4f64 / 0.25).log2() + 2.0 * 0.1 * (0.1f64 / 0.25).log2();
    let mi = mutual_information(array![[0.4, 0.1], [0.1, 0.4]].view()).unwrap();
    assert_abs_diff_eq!(mi, hand, epsilon = 1e-15);
    assert_abs_diff_eq!(mi, 0.2781, epsilon = 1e-4);
    assert!(mutual_information(array![[0.6, -0.1], [0.1, 0.4]].view()).is_err());
    assert!(mutual_information(array![[0.5, 0.1], [0.1, 0.4]].view()).is_err());
}

#[test]
fn kl_examples() {
    let p = [0.2, 0.5, 0.3];
    assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
    assert_abs_diff_eq!(kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap(), 1.0, epsilon = 1e-15);
    let hand = 0.7 * (0.7f64 / 0.5).log2() + 0.3 * (0.3f64 / 0.5).log2();
    let d = kl_divergence(&[0.7, 0.3], &[0.5, 0.5]).unwrap();
    assert_abs_diff_eq!(d, hand, epsilon = 1e-15);
    assert_abs_diff_eq!(d, 0.1187, epsilon = 1e-4);
    assert!(matches!(
        kl_divergence(&[0.5, 0.5], &[1.0, 0.0]),
        Err(Error::InfiniteDivergence { index: 1 })
    ));
}

#[test]
fn decoder_examples() {
    let space = space_on_line(3, 10.0);
    let prior = Prior::new(vec![0.2, 0.5, 0.3]).unwrap();
    let id = bayesian_decoder(&Encoder::identity(&prior), &prior, &space).unwrap();
    assert_eq!(id.rows(), space.rows());

    let single = bayesian_decoder(&Encoder::single_word(&prior), &prior, &space).unwrap();
    let m0 = prior.probs().dot(space.rows());
    for (a, b) in single.row(0).unwrap().iter().zip(m0.iter()) {
        assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
    }

    // two words: q(w|m) rows (1,0), (0.5,0.5), (0,1)
    let enc = Encoder::new(array![[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]], &prior).unwrap();
    let dec = bayesian_decoder(&enc, &prior, &space).unwrap();
    let m = space.rows();
    let w0 = (0.2 * &m.row(0) + 0.25 * &m.row(1)) / 0.45;
    let w1 = (0.25 * &m.row(1) + 0.3 * &m.row(2)) / 0.55;
    for (a, b) in dec.row(0).unwrap().iter().zip(w0.iter()) {
        assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
    }
    for (a, b) in dec.row(1).unwrap().iter().zip(w1.iter()) {
        assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
    }

    let unused = Encoder::new(array![[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]], &prior).unwrap();
    let dec = bayesian_decoder(&unused, &prior, &space).unwrap();
    assert!(matches!(dec.row(1), Err(Error::UndefinedWord { word: 1 })));
}

#[test]
fn objective_examples() {
    let space = space_on_line(5, 8.0);
    let prior = Prior::new(vec![0.1, 0.2, 0.3, 0.25, 0.15]).unwrap();
    for beta in [0.0, 1.0, 7.5, 1e4] {
        let p = ib_objective(&Encoder::single_word(&prior), &prior, &space, beta).unwrap();
        assert_abs_diff_eq!(p.complexity, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.accuracy, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.free_energy, 0.0, epsilon = 1e-8);
    }
    let p = ib_objective(&Encoder::identity(&prior), &prior, &space, 3.0).unwrap();
    assert_abs_diff_eq!(
        p.complexity,
        entropy(prior.probs().as_slice().unwrap()),
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(
        p.accuracy,
        meaning_information(&prior, &space).unwrap(),
        epsilon = 1e-12
    );

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let imy = meaning_information(&prior, &space).unwrap();
    for k in 1..=20 {
        let enc = random_encoder(&mut rng, &prior, 1 + k % 6);
        let a = accuracy(&enc, &prior, &space).unwrap();
        let d = expected_distortion(&enc, &prior, &space).unwrap();
        assert_abs_diff_eq!(a, imy - d, epsilon = 1e-9);
    }
    let wrong = Prior::uniform(4);
    assert!(matches!(
        ib_objective(&Encoder::identity(&wrong), &prior, &space, 1.0),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn update_rule_examples() {
    let space = space_on_line(4, 12.0);
    let prior = Prior::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let init = random_encoder(&mut rng, &prior, 4);

    // β = 0: every row becomes the word marginal
    let step = fixed_point_step(&init, &prior, &space, 0.0).unwrap();
    for row in step.matrix().rows() {
        for (a, b) in row.iter().zip(init.word_marginal().iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    // ten steps never raise F
    let beta = 4.0;
    let mut enc = init.clone();
    let mut f = ib_objective(&enc, &prior, &space, beta).unwrap().free_energy;
    for _ in 0..10 {
        enc = fixed_point_step(&enc, &prior, &space, beta).unwrap();
        let next = ib_objective(&enc, &prior, &space, beta).unwrap().free_energy;
        assert!(next <= f + 1e-12, "{next} > {f}");
        f = next;
    }

    // a converged solution is a fixed point
    let sol = solve_ib(&prior, &space, beta, &init, 1e-13, 100_000).unwrap();
    assert!(sol.converged);
    let again = fixed_point_step(&sol.encoder, &prior, &space, beta).unwrap();
    let f2 = ib_objective(&again, &prior, &space, beta).unwrap().free_energy;
    assert!((f2 - sol.point.free_energy).abs() < 1e-10);

    // extreme β must not underflow whole rows
    let hot = fixed_point_step(&init, &prior, &space, 1e9).unwrap();
    assert!(is_stochastic(hot.matrix(), 1e-12));
}

#[test]
fn subcritical_beta_is_uninformative() {
    let space = space_on_line(6, 6.0);
    let prior = Prior::uniform(6);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let init = random_encoder(&mut rng, &prior, 6);
        let sol = solve_ib(&prior, &space, 0.5, &init, 1e-10, 100_000).unwrap();
        assert!(sol.point.complexity <= 1e-6, "{}", sol.point.complexity);
    }
}

#[test]
fn huge_beta_is_near_identity() {
    let space = space_on_line(4, 40.0);
    let prior = Prior::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut init = Encoder::identity(&prior).matrix().clone();
    init += &(0.05 * common::random_stochastic(&mut rng, 4, 4));
    init /= 1.05;
    let init = Encoder::new(init, &prior).unwrap();
    let sol = solve_ib(&prior, &space, 2f64.powi(20), &init, 1e-10, 10_000).unwrap();
    let h = entropy(prior.probs().as_slice().unwrap());
    assert_abs_diff_eq!(sol.point.complexity, h, epsilon = 1e-6);
    let modes = ibcolor::wcs::mode_map(sol.encoder.matrix()).assignment;
    let mut sorted = modes.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), 4);
}

#[test]
fn solver_reports_non_convergence() {
    let space = space_on_line(6, 6.0);
    let prior = Prior::uniform(6);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let init = random_encoder(&mut rng, &prior, 6);
    let sol = solve_ib(&prior, &space, 3.0, &init, 1e-15, 2).unwrap();
    assert!(!sol.converged);
    assert!(sol.delta_f.is_finite());
    assert!(is_stochastic(sol.encoder.matrix(), 1e-12));
    assert!(solve_ib(&prior, &space, -1.0, &init, 1e-8, 10).is_err());
}

#[test]
fn anneal_examples() {
    let space = space_on_line(12, 7.0);
    let prior = Prior::uniform(12);
    let low = anneal_curve(&prior, &space, &AnnealConfig::new(vec![0.1, 0.5, 0.9, 1.0], 12)).unwrap();
    assert!(low.points.iter().all(|p| p.complexity < 1e-6));
    assert_eq!(low.points[3].effective_k, 1);

    let grid = geometric_schedule(1.0, 512.0, 80).unwrap();
    for mode in [AnnealMode::Forward, AnnealMode::Reverse, AnnealMode::Both] {
        let mut cfg = AnnealConfig::new(grid.clone(), 12);
        cfg.mode = mode;
        let curve = anneal_curve(&prior, &space, &cfg).unwrap();
        assert_eq!(curve.points[0].effective_k, 1, "{mode:?}");
        assert!(curve.converged.iter().all(|&c| c));
        for w in curve.points.windows(2) {
            assert!(w[1].complexity >= w[0].complexity - 1e-6, "{mode:?} {w:?}");
            assert!(w[1].accuracy >= w[0].accuracy - 1e-6, "{mode:?} {w:?}");
        }
        if mode == AnnealMode::Both {
            assert!(!curve.transitions().is_empty());
            assert_concave(
                &curve
                    .points
                    .iter()
                    .map(|p| (p.complexity, p.accuracy))
                    .collect::<Vec<_>>(),
            );
        }
    }
}

/// Accuracy against complexity is concave up to 1e-6.
fn assert_concave(pts: &[(f64, f64)]) {
    let mut v: Vec<(f64, f64)> = pts.to_vec();
    v.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-9);
    for w in v.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        let t = (b.0 - a.0) / (c.0 - a.0);
        let chord = a.1 + t * (c.1 - a.1);
        assert!(b.1 >= chord - 1e-6, "not concave at {b:?}");
    }
}

#[test]
fn effective_size_examples() {
    let space = space_on_line(5, 15.0);
    let prior = Prior::uniform(5);
    assert_eq!(
        effective_lexicon_size(&Encoder::single_word(&prior), &prior, &space, 1e-3).unwrap(),
        1
    );
    assert_eq!(
        effective_lexicon_size(&Encoder::identity(&prior), &prior, &space, 1e-3).unwrap(),
        5
    );
    let q = array![
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.5, 0.5, 0.0],
        [0.0, 0.5, 0.5, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0, 1.0]
    ];
    let enc = Encoder::new(q, &prior).unwrap();
    assert_eq!(effective_lexicon_size(&enc, &prior, &space, 1e-3).unwrap(), 3);
}

fn instance() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 2usize..8, 1usize..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encoders_stay_stochastic((seed, n, k) in instance(), beta in 0.0..50.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prior = Prior::new(random_simplex(&mut rng, n)).unwrap();
        let space = random_space(&mut rng, n);
        let enc = random_encoder(&mut rng, &prior, k);
        let next = fixed_point_step(&enc, &prior, &space, beta).unwrap();
        prop_assert!(is_stochastic(next.matrix(), 1e-12));
        let qw = prior.probs().dot(next.matrix());
        for (a, b) in qw.iter().zip(next.word_marginal().iter()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn data_processing((seed, n, k) in instance()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prior = Prior::new(random_simplex(&mut rng, n)).unwrap();
        let space = random_space(&mut rng, n);
        let enc = random_encoder(&mut rng, &prior, k);
        let p = ib_objective(&enc, &prior, &space, 1.0).unwrap();
        prop_assert!(p.complexity >= 0.0 && p.accuracy >= 0.0);
        prop_assert!(p.accuracy <= p.complexity + 1e-9);
        prop_assert!(p.accuracy <= meaning_information(&prior, &space).unwrap() + 1e-9);
    }

    #[test]
    fn accuracy_identity((seed, n, k) in instance()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prior = Prior::new(random_simplex(&mut rng, n)).unwrap();
        let space = random_space(&mut rng, n);
        let enc = random_encoder(&mut rng, &prior, k);
        let lhs = accuracy(&enc, &prior, &space).unwrap();
        let rhs = meaning_information(&prior, &space).unwrap() - expected_distortion(&enc, &prior, &space).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn steps_never_raise_f((seed, n, k) in instance(), beta in 0.0..50.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prior = Prior::new(random_simplex(&mut rng, n)).unwrap();
        let space = random_space(&mut rng, n);
        let mut enc = random_encoder(&mut rng, &prior, k);
        let mut f = ib_objective(&enc, &prior, &space, beta).unwrap().free_energy;
        for _ in 0..5 {
            enc = fixed_point_step(&enc, &prior, &space, beta).unwrap();
            let next = ib_objective(&enc, &prior, &space, beta).unwrap().free_energy;
            prop_assert!(next <= f + 1e-12);
            f = next;
        }
    }

    #[test]
    fn word_labels_do_not_matter((seed, n, k) in instance(), shift in 0usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prior = Prior::new(random_simplex(&mut rng, n)).unwrap();
        let space = random_space(&mut rng, n);
        let enc = random_encoder(&mut rng, &prior, k);
        let perm: Vec<usize> = (0..k).map(|w| (w + shift) % k).rev().collect();
        let other = enc.permute_words(&perm);
        let a = ib_objective(&enc, &prior, &space, 2.0).unwrap();
        let b = ib_objective(&other, &prior, &space, 2.0).unwrap();
        prop_assert_eq!(a.complexity, b.complexity);
        prop_assert_eq!(a.accuracy, b.accuracy);
        prop_assert_eq!(a.effective_k, b.effective_k);
    }
}
