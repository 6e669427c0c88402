//! Randomized properties of the estimators against the ball oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use outfn::cancellation::{certify, lemma1_constants, CancellationReport, CertifyConfig};
use outfn::oracle::{build_ball, exact_norm, verify_lower_bound, BallIndex, Norm};
use outfn::random::random_generator_word;
use outfn::translen::{tau_estimate, Status, TauConfig};
use outfn::Automorphism;

fn report(rank: usize) -> CancellationReport {
    let mut r = lemma1_constants(rank, 6).unwrap();
    let cfg = CertifyConfig {
        exhaustive_max_len: 6,
        samples: 1000,
        ..CertifyConfig::default()
    };
    certify(&mut r, &cfg).unwrap();
    r
}

fn ball() -> BallIndex {
    build_ball(2, 8, 10_000_000, 0).unwrap()
}

#[test]
fn brackets_are_ordered_on_fuzz_corpus() {
    let reps = [report(2), report(3)];
    let cfg = TauConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut certified = 0;
    let mut worst = 0f64;
    for case in 0..200 {
        let rank = 2 + case % 2;
        let (word, o) = random_generator_word(rank, 15, &mut rng);
        let e = tau_estimate(&o, &reps[rank - 2], &cfg).unwrap();
        assert!(e.lower >= 0.0 && e.lower <= e.upper, "{word:?}: [{}, {}]", e.lower, e.upper);
        // greedy decomposition is not geodesic, but must stay within a small factor of 15
        worst = worst.max(e.upper);
        if e.status == Status::Certified && e.lower > 0.0 {
            certified += 1;
        }
    }
    println!("largest upper bound {worst}");
    assert!(worst <= 60.0, "upper bound {worst} for a 15-step product");
    assert!(certified > 50, "only {certified} positive lower bounds");
}

#[test]
fn lower_bounds_hold_in_the_ball() {
    let b = ball();
    let rep = report(2);
    let cfg = TauConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    for _ in 0..150 {
        let steps = rng.gen_range(1..=4);
        let (_, o) = random_generator_word(2, steps, &mut rng);
        let e = tau_estimate(&o, &rep, &cfg).unwrap();
        let r = verify_lower_bound(&b, &o, e.lower, 64).unwrap();
        assert_eq!(r.violations, 0, "{o}: lower {} checks {:?}", e.lower, r.checks);
        checked += r.checks.len();
    }
    assert!(checked > 300);
}

#[test]
fn decomposition_length_bounds_the_norm() {
    let b = ball();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..500 {
        let steps = rng.gen_range(0..=8);
        let (_, o) = random_generator_word(2, steps, &mut rng);
        let d = o.nielsen_decompose().unwrap().len() as u32;
        match exact_norm(&b, &o).unwrap() {
            Norm::Known(n) => assert!(n <= d && n as usize <= steps, "{o}: norm {n}, decomposition {d}"),
            Norm::Unknown => panic!("{steps}-step product outside radius 8"),
        }
    }
}

#[test]
fn lower_bounds_are_out_conjugation_invariant() {
    let rep = report(2);
    let cfg = TauConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..60 {
        let (_, o) = random_generator_word(2, rng.gen_range(1..=10), &mut rng);
        let (_, x) = random_generator_word(2, rng.gen_range(1..=3), &mut rng);
        let conj = x.compose(&o).unwrap().compose(&x.inverse().unwrap()).unwrap();
        let (a, c) = (tau_estimate(&o, &rep, &cfg).unwrap(), tau_estimate(&conj, &rep, &cfg).unwrap());
        if a.status == Status::Certified && c.status == Status::Certified {
            assert!((a.lower - c.lower).abs() <= 1e-9 * a.lower.max(1.0), "{o} vs {conj}");
            assert_eq!(a.method, c.method);
        }
    }
}

#[test]
fn inner_automorphisms_are_trivial() {
    let rep = report(3);
    let cfg = TauConfig::default();
    let c = outfn::ReducedWord::parse(3, "abCa").unwrap();
    let e = tau_estimate(&Automorphism::inner(&c), &rep, &cfg).unwrap();
    assert_eq!((e.lower, e.upper), (0.0, 0.0));
}
