use alphacf::hiprec::{self, mu_invariance_check, mu_rect, PRECISION};
use alphacf::{ExactNumber, Letter, Mobius, Rect, Word};
use astro_float::RoundingMode;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn q(p: i64, r: i64) -> ExactNumber {
    ExactNumber::from_ratio(p, r)
}

fn mu(r: &Rect) -> f64 {
    hiprec::to_f64(&mu_rect(r, PRECISION).unwrap())
}

fn rect(x1: ExactNumber, x2: ExactNumber, y1: ExactNumber, y2: ExactNumber) -> Rect {
    Rect::new(x1, x2, y1, y2).unwrap()
}

#[test]
fn mobius_examples() {
    assert_eq!(Mobius::e().apply(&q(1, 2)).unwrap(), q(-1, 2));
    let g = ExactNumber::g();
    assert_eq!(Mobius::identity().apply(&g).unwrap(), g);
    // -1/x - 3 at x = -1/2
    assert_eq!(Letter::neg(3).m().apply(&q(-1, 2)).unwrap(), q(-1, 1));
    assert_eq!(Letter::neg(3).m().apply(&ExactNumber::zero()), Err(alphacf::Error::Pole));
    // surds stay in their field
    let y = Letter::neg(2).m().apply(&ExactNumber::sqrt2_minus_1()).unwrap();
    assert_eq!(y.field(), ExactNumber::sqrt2_minus_1().field());
}

#[test]
fn letter_matrix_examples() {
    let l = Letter::neg(2);
    assert_eq!(l.m(), Mobius::new(2, 1, -1, 0).unwrap());
    assert_eq!(l.n(), Mobius::new(0, 1, -1, 2).unwrap());
    // (+1:1) acts as 1/x - 1
    let m = Letter::pos(1).m();
    for x in [q(3, 4), q(2, 3), q(1, 1), q(5, 9)] {
        assert_eq!(m.apply(&x).unwrap(), &x.recip().unwrap() - &ExactNumber::one());
    }
    for eps in [-1i8, 1] {
        for d in 2..20 {
            let l = Letter::new(eps, d).unwrap();
            assert_eq!(l.m().det(), BigInt::from(-eps));
            assert_eq!(l.n().det(), BigInt::from(-eps));
            assert_eq!(l.n(), l.m().transpose().inverse());
        }
    }
}

#[test]
fn mu_rect_examples() {
    let unit = rect(q(0, 1), q(1, 1), q(0, 1), q(1, 1));
    assert!((mu(&unit) - 2f64.ln()).abs() < 1e-15);
    let flat = rect(q(1, 3), q(1, 3), q(0, 1), q(1, 2));
    assert_eq!(mu(&flat), 0.0);
    let g2 = ExactNumber::g2();
    let r = rect(q(-1, 2), q(1, 2), q(0, 1), g2.clone());
    let g2f = g2.to_f64();
    let oracle = ((2.0 + g2f) / (2.0 - g2f)).ln();
    assert!((mu(&r) - oracle).abs() < 1e-14);
    assert!((mu(&r) - 0.3867140).abs() < 1e-6);
}

#[test]
fn mu_rect_rejects_hyperbola() {
    assert!(Rect::new(q(-1, 1), q(0, 1), q(0, 1), q(1, 1)).is_err());
    assert!(Rect::new(q(-2, 1), q(0, 1), q(0, 1), q(2, 3)).is_err());
    assert!(Rect::new(q(0, 1), q(1, 1), q(1, 2), q(1, 3)).is_err());
}

#[test]
fn mu_invariance_examples() {
    let r = rect(q(-1, 2), q(-2, 5), q(0, 1), q(1, 3));
    assert!(mu_invariance_check(&Letter::neg(2).m(), &r).unwrap());
    assert!(mu_invariance_check(&Mobius::identity(), &r).unwrap());
    let r = rect(q(-1, 2), q(-1, 3), q(0, 1), q(1, 4));
    assert!(mu_invariance_check(&Mobius::w(), &r).unwrap());
}

#[test]
fn w_is_an_involution() {
    assert!(Mobius::w().mul(&Mobius::w()).eq_up_to_sign(&Mobius::identity()));
}

#[test]
fn w_and_e_identities() {
    let (w, e) = (Mobius::w(), Mobius::e());
    for d in 2..=50u64 {
        for eps in [-1i8, 1] {
            let l = Letter::new(eps, d).unwrap();
            let lw = Letter::new(-eps, (d as i64 + eps as i64) as u64).unwrap();
            assert!(l.m().mul(&w).eq_up_to_sign(&lw.m()), "W identity at {}", l);
            assert!(e.mul(&l.m()).eq_up_to_sign(&l.shifted(1).unwrap().m()));
            if let Ok(down) = l.shifted(-1) {
                if !(down.is_negative() && down.d < 2) {
                    assert!(e.inverse().mul(&l.m()).eq_up_to_sign(&down.m()));
                }
            }
        }
    }
}

#[test]
fn surd_floor_agrees_with_high_precision() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let squares: Vec<u64> = (1..100).map(|k| k * k).collect();
    for _ in 0..10_000 {
        let d = loop {
            let d = rng.gen_range(2..500u64);
            if !squares.iter().any(|s| d % s == 0 && *s > 1) {
                break d;
            }
        };
        let r = |rng: &mut rand_chacha::ChaCha8Rng| {
            BigRational::new(rng.gen_range(-1000..1000i64).into(), rng.gen_range(1..200i64).into())
        };
        let (a, mut b) = (r(&mut rng), r(&mut rng));
        if b == BigRational::from_integer(0.into()) {
            b = BigRational::from_integer(1.into());
        }
        let x = ExactNumber::surd(a, b, d);
        // 100 decimal digits is about 333 bits
        let hp = hiprec::from_exact(&x, 340);
        assert_eq!(x.floor(), hiprec::to_bigint(&hp, false), "floor of {}", x);
    }
}

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![(2u64..9).prop_map(Letter::neg), (1u64..9).prop_map(Letter::pos)]
}

/// `p/r` with `0 <= p <= r`.
fn unit_rational() -> impl Strategy<Value = ExactNumber> {
    (1i64..60).prop_flat_map(|r| (0..=r).prop_map(move |p| ExactNumber::from_ratio(p, r)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn n_is_transpose_inverse_of_m(v in prop::collection::vec(letter(), 0..10)) {
        let v = Word(v);
        prop_assert_eq!(v.n(), v.m().transpose().inverse());
    }

    #[test]
    fn mu_is_additive(
        xs in (unit_rational(), unit_rational()), ys in (unit_rational(), unit_rational()),
        negative in any::<bool>(), t in 1i64..10, horizontal in any::<bool>(),
    ) {
        let (mut x1, mut x2) = if xs.0 <= xs.1 { xs } else { (xs.1, xs.0) };
        if negative {
            (x1, x2) = (-&x2, -&x1);
        }
        let (y1, y2) = if ys.0 <= ys.1 { ys } else { (ys.1, ys.0) };
        prop_assume!(x1 < x2 && y1 < y2 && !(x1 == -ExactNumber::one() && y2 == ExactNumber::one()));
        let (dx, dy) = (&x2 - &x1, &y2 - &y1);
        let frac = ExactNumber::from_ratio(t, 10);
        let whole = rect(x1.clone(), x2.clone(), y1.clone(), y2.clone());
        let (a, b) = if horizontal {
            let m = &x1 + &(&dx * &frac);
            (rect(x1.clone(), m.clone(), y1.clone(), y2.clone()), rect(m, x2.clone(), y1.clone(), y2.clone()))
        } else {
            let m = &y1 + &(&dy * &frac);
            (rect(x1.clone(), x2.clone(), y1.clone(), m.clone()), rect(x1.clone(), x2.clone(), m, y2.clone()))
        };
        let p = PRECISION;
        let sum = mu_rect(&a, p).unwrap().add(&mu_rect(&b, p).unwrap(), p, RoundingMode::ToEven);
        let diff = hiprec::to_f64(&sum.sub(&mu_rect(&whole, p).unwrap(), p, RoundingMode::ToEven));
        prop_assert!(diff.abs() < 1e-12);
    }

    #[test]
    fn letter_maps_preserve_mu(l in letter(), xs in (unit_rational(), unit_rational()), ys in (unit_rational(), unit_rational())) {
        let (x1, x2) = if xs.0 <= xs.1 { xs } else { (xs.1, xs.0) };
        let (y1, y2) = if ys.0 <= ys.1 { ys } else { (ys.1, ys.0) };
        let (x1, x2) = if l.is_negative() { (-&x2, -&x1) } else { (x1, x2) };
        prop_assume!(x1 < x2 && !(x1 == -ExactNumber::one() && y2 == ExactNumber::one()));
        let r = rect(x1, x2, y1, y2);
        // images touching the pole or the hyperbola 1 + xy = 0 are not rectangles of the domain
        let res = mu_invariance_check(&l.m(), &r);
        prop_assume!(res.is_ok());
        prop_assert!(res.unwrap());
    }
}
