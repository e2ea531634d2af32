use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use switchmix::connections::*;
use switchmix::verify::{fixture_rows, random_row_graph, scramble, LARGE_FIXTURES};

fn replay(h: &RowGraph, ops: &[switchmix::SwitchOp]) -> RowGraph {
    let mut g = h.clone();
    for &op in ops {
        g.switch(op).unwrap();
    }
    g
}

#[test]
fn small_paths_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut stage_counts: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..1000 {
        let m = rng.random_range(2..=6);
        let n = rng.random_range(6..=12);
        let h1 = random_row_graph(m, n, 3, &mut rng);
        let h2 = scramble(&h1, 30, &mut rng);
        let p = build_path_small(&h1, &h2).unwrap();
        assert_eq!(replay(&h1, &p.ops()), h2);
        assert!(p.len() <= h1.disc(&h2) + 2);
        if m >= 3 {
            assert!(p.steps.iter().all(SmallStep::disjunction_holds));
        }
        for s in &p.steps {
            *stage_counts.entry(format!("{:?}", s.stage)).or_default() += 1;
        }
    }
    println!("{stage_counts:?}");
    assert!(stage_counts.get("Stage1B").copied().unwrap_or(0) > 0);
}

#[test]
fn large_paths_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cases: BTreeMap<String, usize> = BTreeMap::new();
    let mut tried = 0;
    while tried < 1000 {
        let m = rng.random_range(4..=7);
        let n = rng.random_range(m + 3..=14);
        let h1 = random_row_graph(m, n, 3, &mut rng);
        let h2 = scramble(&h1, 30, &mut rng);
        let (Some(start), Some(end)) = (anchored_pair(&h1, &[]), anchored_pair(&h2, &[])) else { continue };
        tried += 1;
        let p = build_path_large(&h1, &h2, Anchors { start, end }).unwrap();
        assert_eq!(replay(&h1, &p.ops()), h2);
        let k = h1.disc(&h2);
        assert!(p.len() <= (3 * k).div_ceil(2));
        for s in &p.steps {
            *cases.entry(s.case.to_string()).or_default() += 1;
        }
    }
    println!("{cases:?}");
}

#[test]
fn sampled_tuples_validate() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut stats: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..300 {
        let t = sample_tuple(30, 3, 2, &mut rng).unwrap();
        let c = build_connection(&t).unwrap();
        let r = validate_connection(&t, &c.states);
        assert!(r.passed(), "{:?}", r.failures);
        assert!(ns_discrepancy(&t) <= ns_discrepancy_bound(&t));
        for w in canonical_partition(&t).unwrap().blocks {
            let (m1, m2) = block_multiedges(&t, &w);
            assert!(w.len() <= 2 + m1 + m2);
            assert!(shared_right_vertex(&t, &w).is_some());
        }
        *stats.entry(format!("type{} {:?}", t.ttype, t.kind)).or_default() += 1;
        for b in &c.blocks {
            *stats.entry(format!("{:?} |W|={}", b.lemma, b.rows.len())).or_default() += 1;
        }
    }
    println!("{stats:?}");
}

#[test]
fn large_path_subcase_fixtures() {
    for &(case, a, b) in LARGE_FIXTURES {
        let (h1, h2) = (fixture_rows(a), fixture_rows(b));
        let anchors = Anchors { start: anchored_pair(&h1, &[]).unwrap(), end: anchored_pair(&h2, &[]).unwrap() };
        let p = build_path_large(&h1, &h2, anchors).unwrap();
        assert_eq!(p.steps[0].case, case);
        assert_eq!(replay(&h1, &p.ops()), h2);
        let k = h1.disc(&h2);
        assert!(p.len() <= (3 * k).div_ceil(2), "{case}: {} > 3*{k}/2", p.len());
        for s in &p.steps {
            assert!(![s.op.i1, s.op.i2].contains(&s.anchors.0) && ![s.op.i1, s.op.i2].contains(&s.anchors.1));
        }
    }
}
