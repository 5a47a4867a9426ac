use num_traits::{One, Pow, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treerep::calculus::{boundary_edges, d_nu_dp, d_nu_dr, octopus_params, span_edges, BasePoint, Multiset, Param};
use treerep::chain::{brute_force_prob_all_zero, exact_law, prob_all_zero, ChainParams, RecursiveSampler};
use treerep::measure::{nu_connected, nu_full, restrict_measure, Sign};
use treerep::montecarlo::{compare_laws, fit_law, tally};
use treerep::rational::{q, to_f64, Q};
use treerep::representability::is_representable;
use treerep::thresholds::{eulerian, f_poly_last_sign_change, r0, r1, r_tilde};
use treerep::tree::{octopus, random_tree, spider_vertex, RootedTree, VertexSet};

fn instance(seed: u64, max_n: usize) -> (RootedTree, ChainParams, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n);
    let t = random_tree(n, &mut rng).unwrap();
    let root = rng.random_range(0..n);
    let t = t.rerooted(root).unwrap();
    let c = ChainParams::random(&t, 9, &mut rng);
    (t, c, rng)
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> VertexSet {
    VertexSet(rng.random_range(1..1u64 << n))
}

fn random_connected(rng: &mut ChaCha8Rng, t: &RootedTree, min: usize) -> Option<VertexSet> {
    let sets: Vec<VertexSet> = t.connected_subsets().into_iter().filter(|s| s.len() >= min).collect();
    (!sets.is_empty()).then(|| sets[rng.random_range(0..sets.len())])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn message_passing_matches_percolation_enumeration(seed in any::<u64>()) {
        let (t, c, mut rng) = instance(seed, 13);
        for _ in 0..4 {
            let a = random_subset(&mut rng, t.n());
            prop_assert_eq!(prob_all_zero(&t, &c, a).unwrap(), brute_force_prob_all_zero(&t, &c, a).unwrap());
        }
    }

    #[test]
    fn zero_probability_is_monotone_and_positively_associated(seed in any::<u64>()) {
        let (t, _, mut rng) = instance(seed, 10);
        let r = q(rng.random_range(1..=7), 8);
        let c = ChainParams::uniform(&t, &r, &q(rng.random_range(0..=5), 5)).unwrap();
        let a = random_subset(&mut rng, t.n());
        let bigger = a.union(random_subset(&mut rng, t.n()));
        let pa = prob_all_zero(&t, &c, a).unwrap();
        prop_assert!(pa >= prob_all_zero(&t, &c, bigger).unwrap());
        prop_assert!(pa >= Pow::pow(r, a.len()));
    }

    #[test]
    fn boundary_and_span_structure(seed in any::<u64>()) {
        let (t, _, mut rng) = instance(seed, 12);
        let s = random_subset(&mut rng, t.n());
        let b = t.boundaries(s).unwrap();
        prop_assert!(b.inner.is_subset(s));
        prop_assert!(b.outer.intersection(s).is_empty());
        for v in b.outer.iter() {
            prop_assert!(!t.neighbors(v).intersection(s).is_empty());
        }
        let sp = t.spanning_subtree(s).unwrap();
        for v in sp.vertices.iter() {
            if t.neighbors(v).intersection(sp.vertices).len() <= 1 {
                prop_assert!(s.contains(v), "span leaf {} outside the set", v);
            }
        }
        let closed = b.inner.iter().all(|v| t.neighbors(v).intersection(sp.vertices).len() <= 1);
        if closed {
            prop_assert!(sp.r_set.is_empty());
        }
    }

    #[test]
    fn subdivision_contracts_back(seed in any::<u64>(), k in 1usize..4) {
        let (t, _, _) = instance(seed, 6);
        let (sub, v0) = t.subdivide(k).unwrap();
        prop_assert_eq!(sub.n(), (t.n() - 1) * k + 1);
        for &(a, b) in t.edges() {
            let pair = VertexSet::from_iter([a, b]);
            let route = sub.span(pair);
            prop_assert_eq!(route.len(), k + 1);
            prop_assert_eq!(route.intersection(v0), pair);
        }
    }

    #[test]
    fn measure_inverts_zero_probabilities(seed in any::<u64>()) {
        let (t, c, _) = instance(seed, 7);
        let m = nu_full(&t, &c).unwrap();
        let z = m.zero_probabilities();
        for i in 1..1u64 << t.n() {
            let set = VertexSet(i);
            prop_assert_eq!(&z[m.index_of(set)], &prob_all_zero(&t, &c, set).unwrap());
        }
        for s in m.sets() {
            let v = m.get(s).unwrap();
            if t.is_connected(s).unwrap() {
                prop_assert!(nu_connected(&t, &c, s).unwrap().value_eq(&v));
                if s.len() == 1 {
                    prop_assert!(v.sign() != Sign::Negative);
                }
            } else {
                prop_assert!(v.is_zero(), "disconnected {} has nonzero mass", s);
            }
        }
    }

    #[test]
    fn measure_ignores_the_root(seed in any::<u64>()) {
        let (t, _, mut rng) = instance(seed, 7);
        let c = ChainParams::uniform(&t, &q(rng.random_range(1..=4), 5), &q(rng.random_range(0..=4), 4)).unwrap();
        let other = t.rerooted(rng.random_range(0..t.n())).unwrap();
        let a = nu_full(&t, &c).unwrap();
        let b = nu_full(&other, &ChainParams::uniform(&other, &c.r[0], &c.p[0]).unwrap()).unwrap();
        prop_assert!(a.equals_relabelled(&b, |v| v));
        prop_assert_eq!(
            is_representable(&t, &c).unwrap().representable,
            is_representable(&other, &ChainParams::uniform(&other, &c.r[0], &c.p[0]).unwrap()).unwrap().representable
        );
    }

    #[test]
    fn restricting_a_nonnegative_measure_stays_nonnegative(seed in any::<u64>()) {
        let (t, c, mut rng) = instance(seed, 7);
        let m = nu_full(&t, &c).unwrap();
        if m.entries().iter().all(|(_, v)| v.sign() != Sign::Negative) {
            let b = random_subset(&mut rng, t.n());
            let rm = restrict_measure(&m, b).unwrap();
            prop_assert!(rm.entries().iter().all(|(_, v)| v.sign() != Sign::Negative));
        }
    }

    #[test]
    fn low_order_and_off_target_derivatives_vanish(seed in any::<u64>()) {
        let (t, c, mut rng) = instance(seed, 9);
        let Some(s) = random_connected(&mut rng, &t, 2) else { return Ok(()) };
        let es = boundary_edges(&t, s);
        let span = span_edges(&t, s);
        let pick = |rng: &mut ChaCha8Rng, len: usize| -> Multiset {
            Multiset::edges((0..len).map(|_| rng.random_range(0..t.edge_count())))
        };
        if !es.is_empty() {
            let len = rng.random_range(0..es.len());
            let low = pick(&mut rng, len);
            if !low.is_empty() {
                prop_assert!(d_nu_dp(&t, &c, s, &low, BasePoint::P0, 6).unwrap().is_zero());
            }
            if es.len() <= 5 {
                let same = pick(&mut rng, es.len());
                if same != Multiset::edges(es.iter().copied()) {
                    prop_assert!(d_nu_dp(&t, &c, s, &same, BasePoint::P0, 6).unwrap().is_zero());
                }
            }
        }
        let len = rng.random_range(0..span.len());
        let low = pick(&mut rng, len);
        if !low.is_empty() {
            prop_assert!(d_nu_dp(&t, &c, s, &low, BasePoint::P1, 6).unwrap().is_zero());
        }
        if span.len() <= 5 {
            let same = pick(&mut rng, span.len());
            if same != Multiset::edges(span.iter().copied()) {
                prop_assert!(d_nu_dp(&t, &c, s, &same, BasePoint::P1, 6).unwrap().is_zero());
            }
        }
        let at_one = ChainParams::uniform(&t, &c.r[0], &Q::one()).unwrap();
        prop_assert!(nu_connected(&t, &at_one, s).unwrap().is_zero());
    }
}

#[test]
fn eulerian_coefficients_sum_to_factorial() {
    for m in 1..=12usize {
        let a = eulerian(m);
        assert!(a.iter().all(|x| x.is_positive()));
        let fact: num_bigint::BigInt = (1..=m).map(num_bigint::BigInt::from).product();
        assert_eq!(a.iter().sum::<num_bigint::BigInt>(), fact);
    }
}

#[test]
fn r_tilde_matches_r0_when_its_bell_term_is_positive() {
    let mut hits = 0;
    for k in 4..=12 {
        if let Some(rt) = r_tilde(k).unwrap() {
            let best = r0(k).unwrap().unwrap();
            assert!(rt <= best + 1e-12);
            if (rt - best).abs() < 1e-12 {
                hits += 1;
            }
        }
    }
    assert!(hits >= 3);
}

#[test]
fn last_sign_change_of_f_is_r1() {
    for m in 3..=8 {
        let x = f_poly_last_sign_change(m, 4000, 1e-13).unwrap().unwrap();
        assert!((x - r1(m).unwrap()).abs() < 1e-10, "m = {m}: {x}");
    }
}

#[test]
fn recursive_sampler_fits_exact_law_on_small_trees() {
    for (i, desc) in ["path:3", "star:3", "path:4"].iter().enumerate() {
        let t = treerep::tree::parse_tree(desc, 8).unwrap();
        let c = ChainParams::uniform(&t, &q(2, 5), &q(1, 3)).unwrap();
        let law: Vec<f64> = exact_law(&t, &c).unwrap().iter().map(to_f64).collect();
        let s = RecursiveSampler { tree: &t, params: (&c).into() };
        let rep = fit_law(&s, &law, 200_000, 100 + i as u64, 0.001).unwrap();
        assert!(rep.passed, "{desc}: {rep:?}");
    }
}

#[test]
fn identical_seeds_identical_draws() {
    let t = octopus(3, 1).unwrap();
    let c = ChainParams::uniform(&t, &q(1, 2), &q(1, 2)).unwrap();
    let s = RecursiveSampler { tree: &t, params: (&c).into() };
    assert_eq!(tally(&s, 4, 50_000, 9).unwrap(), tally(&s, 4, 50_000, 9).unwrap());
}

#[test]
fn chi_square_self_comparison_is_calibrated() {
    let t = treerep::tree::path(3).unwrap();
    let c = ChainParams::uniform(&t, &q(1, 2), &q(1, 2)).unwrap();
    let s = RecursiveSampler { tree: &t, params: (&c).into() };
    let passes = (0..50u64).filter(|&k| compare_laws(&s, &s, 3, 20_000, 1000 + k, 0.01).unwrap().passed).count();
    assert!(passes >= 49, "{passes}/50");
}

#[test]
fn octopus_second_r_derivatives_scale_with_the_arm_product() {
    let t = octopus(3, 2).unwrap();
    let s = VertexSet::from_iter([0, spider_vertex(2, 0, 0), spider_vertex(2, 1, 0), spider_vertex(2, 2, 0)]);
    let grid = [q(1, 5), q(1, 2), q(4, 5)];
    let mut worst = 0.0f64;
    for r in [q(1, 2), q(3, 4), q(19, 20)] {
        for p1 in &grid {
            for p2 in &grid {
                let c = octopus_params(&t, 3, &r, &[p1.clone(), p1.clone(), p1.clone()], &[p2.clone(), p2.clone(), p2.clone()]).unwrap();
                let arm: Q = Pow::pow((Q::one() - p1) * p2, 3u32);
                for (v, w) in [(0, 0), (0, 1), (1, 2), (1, 1), (2, 4)] {
                    let mut k = Multiset::new();
                    k.push(Param::Vertex(v));
                    k.push(Param::Vertex(w));
                    let d = d_nu_dr(&t, &c, s, &k, 6).unwrap();
                    let ratio = to_f64(&(d.abs() * Pow::pow(r.clone(), 3u32) / &arm));
                    worst = worst.max(ratio);
                }
            }
        }
    }
    assert!(worst.is_finite() && worst < 50.0, "{worst}");
}
