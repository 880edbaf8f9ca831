//! One pass/fail line per acceptance criterion. Runs without the libtest
//! harness so the lines are printed as they are produced, with timings.

use std::time::{Duration, Instant};

use alphacf::dynamics::*;
use alphacf::hiprec;
use alphacf::natext::*;
use alphacf::simulation::{mc_entropy, simulate_domain, McConfig, Precision};
use alphacf::words::*;
use alphacf::{ExactNumber, Letter, Mobius, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn q(p: i64, r: i64) -> ExactNumber {
    ExactNumber::from_ratio(p, r)
}

fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Duration, limit: f64) -> Result<(), String> {
    ensure(t.as_secs_f64() < limit, || format!("took {:.2} s, limit {} s", t.as_secs_f64(), limit))
}

fn err(e: alphacf::Error) -> String {
    e.to_string()
}

fn bracket_check(alphas: &[ExactNumber], target: impl Fn(&ExactNumber) -> f64, width: f64) -> Result<f64, String> {
    let mut widest: f64 = 0.0;
    for a in alphas {
        let b = measure_bracket(a, width).map_err(err)?;
        let t = target(a);
        ensure(b.contains(t), || format!("[{}, {}] misses {} at {}", b.lo_f64(), b.hi_f64(), t, a))?;
        ensure(b.width() <= width, || format!("width {:e} at {}", b.width(), a))?;
        ensure(b.certified, || format!("uncertified at {}", a))?;
        widest = widest.max(b.width());
    }
    Ok(widest)
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let width = bracket_check(&[ExactNumber::one()], |_| 2f64.ln(), 1e-10)?;
    within(t.elapsed(), 1.0)?;
    Ok(format!("log 2 inside, width {:.1e}, {:.2} s", width, t.elapsed().as_secs_f64()))
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let alphas = [q(13, 20), q(7, 10), q(4, 5), q(9, 10)];
    let width = bracket_check(&alphas, |a| (1.0 + a.to_f64()).ln(), 1e-8)?;
    within(t.elapsed(), 5.0)?;
    Ok(format!("log(1+alpha) inside at 4 points, widest {:.1e}, {:.2} s", width, t.elapsed().as_secs_f64()))
}

fn criterion_3() -> Check {
    let t = Instant::now();
    let target = (1.0 + ExactNumber::g().to_f64()).ln();
    ensure((target - 0.481211825).abs() < 1e-9, || format!("log(1+g) = {}", target))?;
    let alphas = [q(2, 5), ExactNumber::sqrt2_minus_1(), q(9, 20), q(1, 2), q(11, 20), q(3, 5)];
    let width = bracket_check(&alphas, |_| target, 1e-6)?;
    within(t.elapsed(), 60.0)?;
    Ok(format!("log(1+g) inside at 6 points, widest {:.1e}, {:.2} s", width, t.elapsed().as_secs_f64()))
}

fn criterion_4() -> Check {
    let t = Instant::now();
    let one = ExactNumber::one();
    let a = q(37, 97);
    let r = synchronize(&a, MAX_ITER).map_err(err)?;
    let SyncStatus::Synchronizing { v, data, .. } = &r.status else { return Err(format!("{:?}", r.status)) };
    ensure(*v == w("(-1:2)(-1:3)(-1:3)(-1:2)"), || format!("v = {}", v))?;
    ensure(data.vhat == w("(-1:4)(-1:3)(-1:4)"), || format!("v^ = {}", data.vhat))?;
    let l5 = iterate(&a, &(&a - &one), 5).map_err(err)?;
    let r4 = iterate(&a, &a, 4).map_err(err)?;
    ensure(l5.is_zero() && r4.is_zero(), || format!("T^5(a-1) = {}, T^4(a) = {}", l5, r4))?;
    let a = q(58, 195);
    let r = synchronize(&a, MAX_ITER).map_err(err)?;
    let SyncStatus::Synchronizing { v, data, .. } = &r.status else { return Err(format!("{:?}", r.status)) };
    let cs = char_seq(v).map_err(err)?;
    ensure(cs == [3, 2, 1, 2, 1], || format!("char seq {:?}", cs))?;
    ensure(v.len() == 4 && data.vhat.len() == 5, || format!("|v| = {}, |v^| = {}", v.len(), data.vhat.len()))?;
    within(t.elapsed(), 0.1)?;
    Ok(format!("37/97 and 58/195 exact, {:.3} s", t.elapsed().as_secs_f64()))
}

fn criterion_5() -> Check {
    let d = interval_data(&w("(-1:2)")).map_err(err)?;
    ensure(d.zeta == ExactNumber::sqrt2_minus_1(), || format!("zeta = {}", d.zeta))?;
    ensure(d.eta == ExactNumber::g(), || format!("eta = {}", d.eta))?;
    let d = interval_data(&w("(-1:2)(-1:3)")).map_err(err)?;
    ensure(d.zeta.to_decimal(4) == "0.3874", || format!("zeta = {}", d.zeta.to_decimal(10)))?;
    ensure(d.eta == ExactNumber::sqrt2_minus_1(), || format!("eta = {}", d.eta))?;
    let th = theta(&w("(-1:2)(-1:3)")).map_err(err)?;
    ensure(th == w("(-1:2)(-1:3)(-1:4)(-1:2)"), || format!("Theta = {}", th))?;
    Ok(format!("zeta = {}, Theta = {}", d.zeta.to_decimal(6), th))
}

fn criterion_6() -> Check {
    let t = Instant::now();
    let tv = tau(&Word::empty(), 1e-15, THETA_WORD_CAP).map_err(err)?;
    let s = hiprec::to_decimal_string(&tv.value, 16);
    ensure(s == "0.3867499707143007", || format!("tau = {}", s))?;
    let listed = [2u64, 1, 1, 2, 2, 2, 1, 1, 2, 1, 1, 2, 1, 1, 2, 2, 2, 1, 1, 2, 2, 2, 1, 1, 2, 2, 2];
    let rcf = rcf_digits(&tv.zeta, 27).map_err(err)?;
    ensure(rcf == listed, || format!("rcf {:?}", rcf))?;
    let mut fixed = vec![2u64];
    while fixed.len() < 27 {
        fixed = fixed.iter().flat_map(|&c| if c == 2 { vec![2, 1, 1] } else { vec![2] }).collect();
    }
    ensure(fixed[..27] == listed, || "morphism prefix differs".into())?;
    within(t.elapsed(), 1.0)?;
    Ok(format!("tau = {}, 27 digits match, {:.2} s", s, t.elapsed().as_secs_f64()))
}

fn criterion_7() -> Check {
    let mut parts = Vec::new();
    for (a, want) in [(1.0, 2.3731), (0.5, 3.4183)] {
        let t = Instant::now();
        let cfg = McConfig { iterations: 10_000_000, burn_in: 1_000, seed: 1, precision: Precision::DoubleDouble };
        let e = mc_entropy(a, &cfg).map_err(err)?;
        ensure(e.stderr <= 0.01, || format!("stderr {} at {}", e.stderr, a))?;
        ensure((e.estimate - want).abs() <= 3.0 * e.stderr, || format!("{} +- {} vs {} at {}", e.estimate, e.stderr, want, a))?;
        within(t.elapsed(), 30.0)?;
        parts.push(format!("{}: {:.4} +- {:.4} in {:.1} s", a, e.estimate, e.stderr, t.elapsed().as_secs_f64()));
    }
    Ok(parts.join(", "))
}

fn matrix_identities() -> Result<usize, String> {
    let (mw, me) = (Mobius::w(), Mobius::e());
    let mut n = 0;
    for d in 2..=50u64 {
        for eps in [-1i8, 1] {
            let l = Letter::new(eps, d).map_err(err)?;
            let lw = Letter::new(-eps, (d as i64 + eps as i64) as u64).map_err(err)?;
            ensure(l.m().mul(&mw).eq_up_to_sign(&lw.m()), || format!("W identity at {}", l))?;
            ensure(me.mul(&l.m()).eq_up_to_sign(&l.shifted(1).map_err(err)?.m()), || format!("E identity at {}", l))?;
            n += 2;
        }
    }
    let ew = me.mul(&mw);
    let mut stack = vec![Word::empty()];
    while let Some(v) = stack.pop() {
        ensure(hat(&v).map_err(err)?.m().eq_up_to_sign(&ew.mul(&v.m()).mul(&ew)), || format!("conversion at {}", v))?;
        n += 1;
        if v.len() < 7 {
            for d in 2..=6 {
                let mut u = v.clone();
                u.0.push(Letter::neg(d));
                stack.push(u);
            }
        }
    }
    Ok(n)
}

fn random_alpha(rng: &mut ChaCha8Rng) -> ExactNumber {
    let r = rng.gen_range(1..5000);
    q(rng.gen_range(1..=r), r)
}

fn reconstruction(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let one = ExactNumber::one();
    for _ in 0..10_000 {
        let a = random_alpha(rng);
        let r = rng.gen_range(1..100_000);
        let x = &(&a - &one) + &q(rng.gen_range(1..=r), r);
        let steps = orbit(&a, &x, rng.gen_range(0..=30)).map_err(err)?;
        let end = steps.last().map(|s| s.next.clone()).unwrap_or_else(|| x.clone());
        ensure(letters(&steps).value(&end).map_err(err)? == x, || format!("x = {} at {}", x, a))?;
    }
    Ok(10_000)
}

fn alternating_order(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let cs = |x: &ExactNumber| -> Result<PeriodicSeq, String> {
        periodic_char_seq(&by_excess_expansion(x, MAX_ITER).map_err(err)?).map_err(err)
    };
    for _ in 0..10_000 {
        let mut pick = || {
            let r = rng.gen_range(1..2000);
            -q(rng.gen_range(1..=r), r)
        };
        let (x, y) = (pick(), pick());
        let (a, b) = (cs(&x)?, cs(&y)?);
        let n = a.pre.len().max(b.pre.len()) + 2;
        let c = alt_compare(&a.prefix(n), &b.prefix(n));
        ensure(c == Some(x.cmp(&y).reverse()), || format!("{} vs {}", x, y))?;
    }
    Ok(10_000)
}

fn two_bounded(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let one = ExactNumber::one();
    let zero = num_rational::BigRational::from_integer(0.into());
    for _ in 0..200 {
        let a = random_alpha(rng);
        let d = digit(&a, &a).map_err(err)?.letter.d as usize;
        let s = [2u64, 3, 5, 6, 7, 10, 11, 13][rng.gen_range(0..8)];
        let y = ExactNumber::surd(zero.clone(), num_rational::BigRational::new(rng.gen_range(1..1000).into(), rng.gen_range(1..1000).into()), s);
        let x = &(&a - &one) + &(&y - &ExactNumber::from_bigint(y.floor()));
        let mut run = 0;
        for st in orbit(&a, &x, 200).map_err(err)? {
            run = if st.letter == Letter::neg(2) { run + 1 } else { 0 };
            ensure(run < d, || format!("(-1:2)^{} for {} at {}", d, x, a))?;
        }
    }
    Ok(200)
}

fn covered(a: f64, b: f64, outer: &[(f64, f64)], slack: f64) -> bool {
    outer.iter().any(|&(lo, hi)| lo - slack <= a && b <= hi + slack)
}

fn fibers() -> Result<(), String> {
    let te = |y: f64| y / (1.0 - y);
    let te_inv = |y: f64| y / (1.0 + y);
    for (a, tol) in [(q(1, 2), 1e-6), (q(2, 5), 1e-3)] {
        let (_, au) = automaton_for(&a).map_err(err)?;
        let all: Vec<usize> = (0..au.len()).collect();
        let en = enumerate_fibers(&au, &all, 1e-3, 50_000, Priority::Length).map_err(err)?;
        let refs: Vec<&IntervalSet> = en.sets.iter().collect();
        let pair = IntervalSet::union(&refs).overlapping_pair();
        ensure(pair.is_none(), || format!("overlap {:?} at {}", pair, a))?;
        let (psi, prime) = psi_sets(&au, tol, 200_000).map_err(err)?;
        for &(lo, hi) in &psi.merged() {
            ensure(covered(te(lo), te(hi), &prime.outer(), 1e-12), || format!("tE Psi not in Psi' at {}", a))?;
        }
        for &(lo, hi) in &prime.merged() {
            ensure(covered(te_inv(lo), te_inv(hi), &psi.outer(), 1e-12), || format!("Psi' not in tE Psi at {}", a))?;
        }
        // monotone in x
        let (lo, hi) = ((&a - &ExactNumber::one()).to_f64(), a.to_f64());
        let grid: Vec<f64> = (0..=64).map(|i| lo + (hi - lo) * i as f64 / 64.0).collect();
        for p in grid.windows(2) {
            let (inner, _) = fiber_at(&au, &en.sets, p[0]);
            let (_, outer) = fiber_at(&au, &en.sets, p[1]);
            ensure(inner.iter().all(|&(y1, y2)| covered(y1, y2, &outer, 1e-12)), || format!("fiber shrinks after {} at {}", p[0], a))?;
        }
    }
    Ok(())
}

fn cloud_containment() -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for a in [q(1, 2), q(2, 5), q(37, 97), q(58, 195), q(113, 292)] {
        let (_, au) = automaton_for(&a).map_err(err)?;
        let d = omega_decomposition(&au, 1e-4, 50_000).map_err(err)?;
        let mut boxes: Vec<_> = d.rectangles.iter().map(|r| (r.x1.to_f64(), r.x2.to_f64(), r.y1.to_f64(), r.y2.to_f64())).collect();
        boxes.extend(d.frontier.iter().cloned());
        let pts = simulate_domain(a.to_f64(), 10_000, 60, 5).map_err(err)?;
        let s = 1e-9;
        let inside = pts
            .iter()
            .filter(|&&(x, y)| boxes.iter().any(|&(x1, x2, y1, y2)| x1 - s <= x && x <= x2 + s && y1 - s <= y && y <= y2 + s))
            .count();
        let frac = inside as f64 / pts.len() as f64;
        ensure(frac >= 0.999, || format!("{} inside at {}", frac, a))?;
        worst = worst.max(1.0 - frac);
    }
    Ok(1.0 - worst)
}

fn mu_evolution() -> Result<f64, String> {
    let v = w("(-1:2)");
    let mut diff: f64 = 0.0;
    for a in [q(21, 50), q(9, 20), q(1, 2), q(11, 20), q(3, 5)] {
        let (lo, hi) = mu_along_interval(&v, &a, 1e-7).map_err(err)?;
        let b = measure_bracket(&a, 1e-7).map_err(err)?;
        let dd = ((lo + hi) / 2.0 - (b.lo_f64() + b.hi_f64()) / 2.0).abs();
        ensure(dd < 1e-6, || format!("{} apart at {}", dd, a))?;
        diff = diff.max(dd);
    }
    Ok(diff)
}

fn criterion_8() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ids = matrix_identities()?;
    let rec = reconstruction(&mut rng)?;
    let alt = alternating_order(&mut rng)?;
    let tb = two_bounded(&mut rng)?;
    fibers()?;
    let inside = cloud_containment()?;
    let mu = mu_evolution()?;
    Ok(format!(
        "{} identities, {} orbits, {} pairs, {} expansions, fibers ok, cloud {:.4} inside, mu formula within {:.1e}, {:.1} s",
        ids,
        rec,
        alt,
        tb,
        inside,
        mu,
        t.elapsed().as_secs_f64()
    ))
}

fn criterion_9() -> Check {
    let t = Instant::now();
    let s = ExactNumber::sqrt2_minus_1();
    let mut gaps = Vec::new();
    for k in [3u32, 4, 5] {
        let scale = 10i64.pow(k);
        // the grid points of spacing 10^-k on either side of sqrt2 - 1
        let below = (&s * &ExactNumber::from_int(scale)).floor();
        let left = &ExactNumber::from_bigint(below) / &ExactNumber::from_int(scale);
        let right = &left + &q(1, scale);
        ensure(left < s && s < right, || "grid does not straddle".into())?;
        let tol = 1e-3 / scale as f64;
        let l = measure_bracket(&left, tol).map_err(err)?;
        let r = measure_bracket(&right, tol).map_err(err)?;
        gaps.push((r.hi_f64() - l.lo_f64()).max(l.hi_f64() - r.lo_f64()));
    }
    let shrinking = gaps.windows(2).all(|p| p[1] < p[0]);
    ensure(shrinking && gaps[2] < 1e-7, || format!("gaps {:?}", gaps))?;
    within(t.elapsed(), 120.0)?;
    Ok(format!("gaps {:.1e} > {:.1e} > {:.1e}, {:.1} s", gaps[0], gaps[1], gaps[2], t.elapsed().as_secs_f64()))
}

fn main() {
    let criteria: [(usize, fn() -> Check); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        match f() {
            Ok(msg) => println!("criterion {}: PASS  {}", n, msg),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {}", n, msg);
            }
        }
    }
    println!("acceptance: {} of 9 passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
