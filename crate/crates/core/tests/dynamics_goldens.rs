use alphacf::dynamics::*;
use alphacf::words::{char_seq, hat, Letter, Word};
use alphacf::ExactNumber;

fn q(p: i64, r: i64) -> ExactNumber {
    ExactNumber::from_ratio(p, r)
}

fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

#[test]
fn digit_examples() {
    let s = digit(&q(1, 2), &q(1, 2)).unwrap();
    assert_eq!(s.letter, Letter::pos(2));
    assert_eq!(s.next, ExactNumber::zero());
    let s = digit(&ExactNumber::one(), &ExactNumber::zero()).unwrap();
    assert_eq!(s.letter, Letter::ZERO);
    assert!(digit(&q(1, 2), &q(3, 4)).is_err());
    assert!(digit(&q(1, 2), &q(-3, 4)).is_err());
}

#[test]
fn orbit_37_97() {
    let a = q(37, 97);
    let st = orbit(&a, &(&a - &ExactNumber::one()), 4).unwrap();
    assert_eq!(letters(&st), w("(-1:2)(-1:3)(-1:3)(-1:2)"));
    assert_eq!(st.last().unwrap().next, q(1, 4));
}

#[test]
fn orbit_58_195() {
    let a = q(58, 195);
    let st = orbit(&a, &(&a - &ExactNumber::one()), 5).unwrap();
    // T^4(alpha-1) = 1/5 > 0, so the fifth digit carries the sign +1
    assert_eq!(letters(&st), w("(-1:2)(-1:2)(-1:4)(-1:4)(+1:5)"));
    assert_eq!(st[3].next, q(1, 5));
    assert_eq!(st.last().unwrap().next, ExactNumber::zero());
    let st = orbit(&a, &a, 5).unwrap();
    assert_eq!(letters(&st), w("(+1:4)(-1:2)(-1:3)(-1:2)(-1:2)"));
    // exact iteration gives T^5(alpha) = -1/6 and T^6(alpha) = 0 = T^5(alpha-1)
    assert_eq!(st.last().unwrap().next, q(-1, 6));
    assert_eq!(iterate(&a, &a, 6).unwrap(), ExactNumber::zero());
}

#[test]
fn orbit_of_zero() {
    let st = orbit(&q(2, 5), &ExactNumber::zero(), 10).unwrap();
    assert_eq!(st.len(), 1);
    assert_eq!(st[0].letter, Letter::ZERO);
}

#[test]
fn by_excess_examples() {
    let e = by_excess_expansion(&q(-1, 1), 100).unwrap();
    assert!(e.pre.is_empty());
    assert_eq!(e.period, vec![Letter::neg(2)]);
    let e = by_excess_expansion(&q(-1, 2), 100).unwrap();
    assert_eq!(e.pre, vec![Letter::neg(3)]);
    assert_eq!(e.period, vec![Letter::neg(2)]);
    let e = by_excess_expansion(&q(-3, 5), 100).unwrap();
    assert_eq!(e.pre, vec![Letter::neg(2), Letter::neg(4)]);
    assert_eq!(e.period, vec![Letter::neg(2)]);
}

#[test]
fn char_to_rcf_examples() {
    for (p, r, want) in [(1, 2, vec![1u64, 1]), (2, 5, vec![2, 2])] {
        let a = q(p, r);
        let cs = periodic_char_seq(&by_excess_expansion(&(&a - &ExactNumber::one()), 100).unwrap()).unwrap();
        let rcf = char_to_rcf(&cs);
        assert_eq!(rcf.pre, want);
        assert!(rcf.period.is_empty());
        // [0; a_1, ..., a_n] evaluated exactly, and the direct expansion of
        // alpha agrees up to the two finite forms [.., n, 1] = [.., n+1]
        let mut val = ExactNumber::zero();
        for d in want.iter().rev() {
            val = (&val + &ExactNumber::from_int(*d as i64)).recip().unwrap();
        }
        assert_eq!(val, a);
        let direct = rcf_digits(&a, 50).unwrap();
        let mut merged = want.clone();
        if merged.len() > 1 && merged.last() == Some(&1) {
            merged.pop();
            *merged.last_mut().unwrap() += 1;
        }
        assert_eq!(direct, merged);
    }
    let g2 = ExactNumber::g2();
    let cs = periodic_char_seq(&by_excess_expansion(&(&g2 - &ExactNumber::one()), 100).unwrap()).unwrap();
    let rcf = char_to_rcf(&cs);
    assert_eq!(rcf.prefix(8), vec![2, 1, 1, 1, 1, 1, 1, 1]);
    assert_eq!(rcf_digits(&g2, 8).unwrap(), rcf.prefix(8));
}

#[test]
fn rewrite_examples() {
    let out = rcf_rewrite_with(&[Letter::pos(3), Letter::neg(4), Letter::pos(5)], false).unwrap();
    assert_eq!(&out[..3], &[Letter::pos(2), Letter::pos(1), Letter::pos(3)]);
    let out = rcf_rewrite(&w("(+1:2)(-1:2)(-1:2)(+1:inf)").0).unwrap();
    assert_eq!(out, w("(+1:1)(+1:3)(+1:inf)").0);
    let pos = w("(+1:3)(+1:1)(+1:7)(+1:inf)").0;
    assert_eq!(rcf_rewrite(&pos).unwrap(), pos);
    assert!(rcf_rewrite(&w("(+1:1)(-1:3)(+1:inf)").0).is_err());
}

#[test]
fn sync_37_97() {
    let r = synchronize(&q(37, 97), MAX_ITER).unwrap();
    match r.status {
        SyncStatus::Synchronizing { v, k, k_prime, .. } => {
            assert_eq!(v, w("(-1:2)(-1:3)(-1:3)(-1:2)"));
            assert_eq!(hat(&v).unwrap(), w("(-1:4)(-1:3)(-1:4)"));
            assert_eq!((k, k_prime), (5, 4));
        }
        s => panic!("{:?}", s),
    }
    let a = q(37, 97);
    assert_eq!(iterate(&a, &(&a - &ExactNumber::one()), 5).unwrap(), ExactNumber::zero());
    assert_eq!(iterate(&a, &a, 4).unwrap(), ExactNumber::zero());
}

#[test]
fn sync_58_195() {
    let r = synchronize(&q(58, 195), MAX_ITER).unwrap();
    match r.status {
        SyncStatus::Synchronizing { v, .. } => {
            assert_eq!(char_seq(&v).unwrap(), vec![3, 2, 1, 2, 1]);
            assert_eq!(v.len(), 4);
            assert_eq!(hat(&v).unwrap().len(), 5);
        }
        s => panic!("{:?}", s),
    }
}

#[test]
fn sync_g2_non_synchronizing() {
    let r = synchronize(&ExactNumber::g2(), MAX_ITER).unwrap();
    match r.status {
        SyncStatus::NonSynchronizing { certificate, .. } => {
            assert_eq!(certificate.prefix(6), vec![2, 1, 1, 1, 1, 1]);
        }
        s => panic!("{:?}", s),
    }
}

#[test]
fn sync_right_endpoints() {
    for (alpha, v) in [(ExactNumber::g(), "(-1:2)"), (ExactNumber::sqrt2_minus_1(), "(-1:2)(-1:3)")] {
        let r = synchronize(&alpha, MAX_ITER).unwrap();
        match r.status {
            SyncStatus::NonSynchronizing { right_endpoint_of, .. } => assert_eq!(right_endpoint_of, Some(w(v))),
            s => panic!("{:?}", s),
        }
    }
}

#[test]
fn sync_large_alpha() {
    for a in [ExactNumber::one(), q(1, 2), q(7, 10), q(2, 3)] {
        let r = synchronize(&a, MAX_ITER).unwrap();
        assert!(r.is_synchronizing(), "{}", a);
    }
}

#[test]
fn one_over_r_example() {
    for r in 2..12i64 {
        let a = q(1, r);
        assert_eq!(iterate(&a, &a, 1).unwrap(), ExactNumber::zero());
        assert_eq!(iterate(&a, &(&a - &ExactNumber::one()), (r - 1) as usize).unwrap(), ExactNumber::zero());
        let s = synchronize(&a, MAX_ITER).unwrap();
        assert!(s.is_synchronizing());
    }
}

#[test]
fn boundaries_examples() {
    assert_eq!(fiber_boundaries(&q(1, 2), MAX_ITER).unwrap(), vec![q(-1, 2), ExactNumber::zero()]);
    let a = q(7, 10);
    let b = fiber_boundaries(&a, MAX_ITER).unwrap();
    assert_eq!(b, vec![&a - &ExactNumber::one(), iterate(&a, &a, 1).unwrap()]);
    let b = fiber_boundaries(&q(113, 292), MAX_ITER).unwrap();
    assert_eq!(b.len(), 9, "{:?}", b);
}
