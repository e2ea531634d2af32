use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use switchmix::config::PermutationSpace;
use switchmix::enumerate::DEFAULT_CAP;
use switchmix::kernels::{qc_rate, qu_rate};
use switchmix::spectral::*;
use switchmix::Error;

fn r(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

const GRID: [(usize, usize); 4] = [(3, 2), (4, 2), (5, 2), (4, 3)];

#[test]
fn spaces_have_known_sizes_and_unit_mass() {
    for (n, d, simple, size) in [(3, 2, true, 6), (3, 2, false, 21), (4, 3, true, 24), (4, 2, true, 90), (4, 2, false, 282)] {
        let s = StateSpace::enumerate(n, d, simple, DEFAULT_CAP).unwrap();
        assert_eq!(s.len(), size);
        assert_eq!(s.total_mass(), r(1, 1));
    }
    let s = StateSpace::enumerate(3, 2, false, DEFAULT_CAP).unwrap();
    let mut strata: Vec<BigRational> = s.measure.clone();
    strata.sort();
    strata.dedup();
    assert_eq!(strata, vec![r(1, 90), r(2, 45), r(4, 45)]);
}

#[test]
fn every_enumerated_chain_is_exactly_reversible() {
    for &(n, d) in &GRID {
        for simple in [true, false] {
            let s = StateSpace::enumerate(n, d, simple, DEFAULT_CAP).unwrap();
            s.generator().unwrap().check_reversible(&s.measure).unwrap();
        }
    }
    let ps = PermutationSpace::new(6).unwrap();
    let uniform = vec![r(1, 720); 720];
    Generator::random_transposition(&ps).check_reversible(&uniform).unwrap();
}

#[test]
fn non_reversible_generators_are_rejected() {
    let z = Ratio::zero();
    let one = Ratio::new(1, 1);
    let cyc = Generator::from_rates(&[vec![z, one, z], vec![z, z, one], vec![one, z, z]]).unwrap();
    let mu = vec![r(1, 3); 3];
    assert!(matches!(ReversibleChain::new(mu, cyc), Err(Error::NotReversible(_))));
}

#[test]
fn dirichlet_form_matches_the_rate_double_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for simple in [true, false] {
        let s = StateSpace::enumerate(3, 2, simple, DEFAULT_CAP).unwrap();
        let chain = s.chain().unwrap();
        for _ in 0..10 {
            let f: Vec<BigRational> = (0..s.len()).map(|_| r(rng.random_range(-5..=5), rng.random_range(1..=4))).collect();
            let mut oracle = BigRational::zero();
            for (x, gx) in s.states.iter().enumerate() {
                for (y, gy) in s.states.iter().enumerate() {
                    if x == y {
                        continue;
                    }
                    let q = if simple { qu_rate(gx, gy) } else { qc_rate(gx, gy) }.unwrap().0;
                    let q = BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()));
                    let diff = &f[x] - &f[y];
                    oracle += q * &diff * &diff * &s.measure[x];
                }
            }
            oracle /= r(2, 1);
            assert_eq!(dirichlet_exact(&chain.mu, &chain.q, &f), oracle);
            let ff: Vec<f64> = f.iter().map(|v| v.to_f64().unwrap()).collect();
            assert!((dirichlet(&chain.mu_f64, &chain.q, &ff) - oracle.to_f64().unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn constant_functions_have_zero_forms() {
    let s = StateSpace::enumerate(3, 2, false, DEFAULT_CAP).unwrap();
    let chain = s.chain().unwrap();
    let c = vec![r(3, 2); s.len()];
    assert!(dirichlet_exact(&chain.mu, &chain.q, &c).is_zero());
    assert!(variance_exact(&chain.mu, &c).is_zero());
    assert!(entropy_sq_exact(&chain.mu, &c).unwrap().canonical().is_empty());
    assert!(matches!(entropy_sq_exact(&chain.mu, &vec![r(-1, 1); s.len()]), Err(Error::NegativeForEntropy)));
}

#[test]
fn edge_indicator_forms_at_three_two() {
    let s = StateSpace::enumerate(3, 2, true, DEFAULT_CAP).unwrap();
    let mut chain = s.chain().unwrap();
    let f = s.edge_indicator(0, 0);
    let var = variance_exact(&chain.mu, &f);
    let dir = dirichlet_exact(&chain.mu, &chain.q, &f);
    assert_eq!(var, r(2, 9));
    assert!(dir <= r(2, 9));
    let ent = entropy_sq_exact(&chain.mu, &f).unwrap();
    assert!(ent.exact_eq(&LogCombination::term(r(-2, 3), r(2, 3))));
    let rq = (var / dir).to_f64().unwrap();
    let p = chain.poincare_constant();
    assert!(p >= 1.0);
    assert!(rq <= p * (1.0 + 1e-12));
}

#[test]
fn complete_graph_kernel_has_the_closed_form_gap() {
    for m in [3usize, 5, 8] {
        let rate = Ratio::new(1, 2 * m as i64);
        let rates: Vec<Vec<Ratio<i64>>> = (0..m).map(|_| vec![rate; m]).collect();
        let q = Generator::from_rates(&rates).unwrap();
        let mut chain = ReversibleChain::new(vec![r(1, m as i64); m], q).unwrap();
        // −Q = (1/2m)(mI − J): eigenvalues 0 and 1/2.
        assert!((chain.poincare_constant() - 2.0).abs() < 1e-12);
        assert!((chain.rayleigh_gap(3) - 0.5).abs() < 1e-12);
    }
}

#[test]
fn eigensolver_agrees_with_the_rayleigh_quotient() {
    for &(n, d) in &GRID {
        for simple in [true, false] {
            let s = StateSpace::enumerate(n, d, simple, DEFAULT_CAP).unwrap();
            if s.len() > 400 {
                continue;
            }
            let mut chain = s.chain().unwrap();
            let gap = chain.spectrum().gap;
            let rq = chain.rayleigh_gap(7);
            assert!((rq - gap).abs() <= 1e-8 * gap, "({n},{d},{simple}): {rq} vs {gap}");
        }
    }
}

#[test]
fn heat_kernel_matches_the_pade_exponential() {
    for simple in [true, false] {
        let s = StateSpace::enumerate(3, 2, simple, DEFAULT_CAP).unwrap();
        let mut chain = s.chain().unwrap();
        for t in [0.0, 0.3, 2.0, 17.5] {
            let a = chain.heat_kernel(t);
            let b = chain.heat_kernel_expm(t);
            assert!((a - b).abs().max() <= 1e-10);
        }
    }
}

#[test]
fn mixing_curve_starts_at_one_minus_pi_and_decreases() {
    let s = StateSpace::enumerate(3, 2, false, DEFAULT_CAP).unwrap();
    let mut chain = s.chain().unwrap();
    let ts: Vec<f64> = (0..60).map(|k| k as f64 * 0.5).collect();
    for start in [Some(0), Some(5), None] {
        let curve = chain.mixing_curve(start, &ts);
        if let Some(x) = start {
            assert!((curve[0].1 - (1.0 - chain.mu_f64[x])).abs() < 1e-15);
        }
        assert!(curve.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
    }
}

#[test]
fn mixing_time_respects_the_relaxation_sandwich() {
    for simple in [true, false] {
        let s = StateSpace::enumerate(3, 2, simple, DEFAULT_CAP).unwrap();
        let mut chain = s.chain().unwrap();
        let eps: f64 = 0.25;
        let pi_min = chain.pi_min();
        let sp = chain.spectrum().clone();
        let t = chain.t_mix(eps).unwrap();
        let lo = (sp.t_rel() - 1.0) * (1.0 / (2.0 * eps)).ln();
        let hi = (1.0 / (2.0 * eps * pi_min)).ln() * sp.t_rel();
        assert!(lo <= t + 1e-8 && t <= hi + 1e-8, "{lo} ≤ {t} ≤ {hi}");
        let td = chain.t_mix_discrete(eps, 10_000).unwrap() as f64;
        let (lo, hi) = ((sp.t_rel_discrete() - 1.0) * (1.0 / (2.0 * eps)).ln(), (1.0 / (2.0 * eps * pi_min)).ln() * sp.t_rel_discrete());
        assert!(lo <= td + 1e-8 && td <= hi.ceil() + 1e-8, "{lo} ≤ {td} ≤ {hi}");
    }
}

#[test]
fn smallest_eigenvalue_bound() {
    for &(n, d) in &GRID {
        for simple in [true, false] {
            let s = StateSpace::enumerate(n, d, simple, DEFAULT_CAP).unwrap();
            let mut chain = s.chain().unwrap();
            let rep = lambda_min_check(&mut chain, n);
            assert!(rep.holds, "({n},{d},{simple}) {rep:?}");
        }
    }
    let s = StateSpace::enumerate(3, 2, false, DEFAULT_CAP).unwrap();
    let q = s.generator().unwrap();
    let half: Vec<Vec<(usize, Ratio<i64>)>> = q.off.iter().map(|row| row.iter().map(|(y, v)| (*y, v / 2)).collect()).collect();
    let mut lazy = ReversibleChain::new(s.measure.clone(), Generator::new(half)).unwrap();
    assert!(lazy.spectrum().lambda_min() >= -1e-12);
    let one = Ratio::new(1, 1);
    let flip = Generator::from_rates(&[vec![Ratio::zero(), one], vec![one, Ratio::zero()]]).unwrap();
    let mut flip = ReversibleChain::new(vec![r(1, 2), r(1, 2)], flip).unwrap();
    assert!(!lambda_min_check(&mut flip, 2).holds);
}

#[test]
fn two_point_log_sobolev_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    // Kernel K(x, y) = π(y) with π = (θ, 1 − θ): sup Ent/E = log((1−θ)/θ) / (1 − 2θ), and 2 at θ = ½.
    for (a, b) in [(1i64, 4i64), (1, 3), (1, 2)] {
        let theta = a as f64 / b as f64;
        let p0 = Ratio::new(a, b);
        let p1 = Ratio::new(b - a, b);
        let q = Generator::from_rates(&[vec![Ratio::zero(), p1], vec![p0, Ratio::zero()]]).unwrap();
        let mut chain = ReversibleChain::new(vec![r(a, b), r(b - a, b)], q).unwrap();
        let exact = if a * 2 == b { 2.0 } else { ((1.0 - theta) / theta).ln() / (1.0 - 2.0 * theta) };
        let num = logsob_sup(&mut chain, 32, &[], &mut rng);
        assert!(num <= exact * (1.0 + 1e-9), "{num} > {exact}");
        assert!(num >= exact * (1.0 - 1e-4), "{num} < {exact}");
    }
}

#[test]
fn log_sobolev_numeric_dominates_the_test_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = StateSpace::enumerate(3, 2, true, DEFAULT_CAP).unwrap();
    let mut chain = s.chain().unwrap();
    let ls = logsob_constant(&s, &mut chain, 32, &mut rng).unwrap();
    assert!(ls.numeric_sup >= ls.lower);
    assert!(ls.lower_ent.exact_eq(&LogCombination::term(r(-2, 3), r(2, 3))));
    let p = chain.poincare_constant();
    assert!(ls.numeric_sup.is_finite() && p.is_finite());
}

#[test]
fn lift_identities_hold_exactly_on_six_stubs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let setup = LiftSetup::new(3, 2, DEFAULT_CAP).unwrap();
    let chain = setup.space.chain().unwrap();
    for _ in 0..100 {
        let f: Vec<BigRational> = (0..setup.space.len()).map(|_| r(rng.random_range(0..=6), rng.random_range(1..=3))).collect();
        let rep = setup.check(&chain, &f).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.expected_factor, r(5, 6));
    }
}

#[test]
fn comparison_experiment_reports_finite_ratios() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for source in [FunctionSource::EdgeIndicator, FunctionSource::Random { levels: 4 }] {
        let rep = comparison_experiment(3, 2, source, 50, DEFAULT_CAP, &mut rng).unwrap();
        assert!(!rep.ratios.is_empty());
        assert!(rep.ratios.iter().all(|(a, b)| a.is_finite() && b.is_finite()));
        assert!(rep.rayleigh_below_poincare);
    }
}

#[test]
fn lanczos_agrees_with_the_dense_spectrum() {
    for &(n, d) in &GRID {
        for simple in [true, false] {
            let s = StateSpace::enumerate(n, d, simple, DEFAULT_CAP).unwrap();
            if s.len() > DENSE_LIMIT {
                continue;
            }
            let mut chain = s.chain().unwrap();
            let sp = chain.spectrum().clone();
            let lz = chain.lanczos_extremes(600, 3);
            assert!((lz.gap - sp.gap).abs() <= 1e-9 * sp.gap, "({n},{d},{simple}) {lz:?} vs {}", sp.gap);
            assert!((lz.top - sp.top).abs() <= 1e-9 * sp.top, "({n},{d},{simple}) {lz:?} vs {}", sp.top);
        }
    }
}

#[test]
fn multigraph_poincare_constant_grows_with_nd() {
    let rep = scaling_report(&GRID, false, DEFAULT_CAP).unwrap();
    println!("multigraph {rep:?}");
    assert!(rep.monotone);
    let simple = scaling_report(&GRID, true, DEFAULT_CAP).unwrap();
    println!("simple {simple:?}");
}

#[test]
fn lanczos_converges_on_the_large_spaces() {
    for &(n, d) in &GRID {
        for simple in [true, false] {
            let s = StateSpace::enumerate(n, d, simple, DEFAULT_CAP).unwrap();
            if s.len() <= DENSE_LIMIT {
                continue;
            }
            let chain = s.chain().unwrap();
            let lz = chain.lanczos_extremes(600, 1);
            println!("({n},{d},{simple}) {} states {lz:?}", s.len());
            assert!(lz.residual <= 1e-10 * lz.top, "{lz:?}");
        }
    }
}
