//! Containment fuzzing against exact arithmetic.
//!
//! Every finite double is `m·2^e`, so sums and products of endpoints are
//! computed exactly as dyadic numbers. Quotients and square roots are checked
//! by cross-multiplying, which keeps the comparison exact.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Float, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tiltcert::interval::{ComplexBox, RealInterval};

#[derive(Clone, Debug)]
pub struct Dyadic {
    m: BigInt,
    e: i64,
}

impl Dyadic {
    pub fn of(x: f64) -> Dyadic {
        assert!(x.is_finite());
        let (mant, exp, sign) = x.integer_decode();
        Dyadic { m: BigInt::from(sign as i64) * BigInt::from(mant), e: exp as i64 }
    }

    fn align(&self, other: &Dyadic) -> (BigInt, BigInt) {
        let e = self.e.min(other.e);
        (&self.m << (self.e - e) as usize, &other.m << (other.e - e) as usize)
    }

    fn cmp(&self, other: &Dyadic) -> Ordering {
        let (a, b) = self.align(other);
        a.cmp(&b)
    }

    fn is_negative(&self) -> bool {
        self.m.is_negative()
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, o: &Dyadic) -> Dyadic {
        let (a, b) = self.align(o);
        Dyadic { m: a + b, e: self.e.min(o.e) }
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, o: &Dyadic) -> Dyadic {
        self + &(-o)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { m: -&self.m, e: self.e }
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, o: &Dyadic) -> Dyadic {
        Dyadic { m: &self.m * &o.m, e: self.e + o.e }
    }
}

fn le(a: &Dyadic, b: &Dyadic) -> bool {
    a.cmp(b) != Ordering::Greater
}

/// Infinite endpoints (from overflow) bound everything on their side.
fn inside(x: &Dyadic, r: &RealInterval) -> bool {
    let lo_ok = r.lo() == f64::NEG_INFINITY || (r.lo().is_finite() && le(&Dyadic::of(r.lo()), x));
    let hi_ok = r.hi() == f64::INFINITY || (r.hi().is_finite() && le(x, &Dyadic::of(r.hi())));
    lo_ok && hi_ok
}

/// `lo ≤ num/den ≤ hi` for `den > 0`.
fn quotient_inside(num: &Dyadic, den: &Dyadic, r: &RealInterval) -> bool {
    assert!(den.m.is_positive());
    let lo_ok = r.lo() == f64::NEG_INFINITY || le(&(&Dyadic::of(r.lo()) * den), num);
    let hi_ok = r.hi() == f64::INFINITY || le(num, &(&Dyadic::of(r.hi()) * den));
    lo_ok && hi_ok
}

fn sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        -1.0
    } else {
        1.0
    }
}

fn random_double(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..40) {
        0 | 1 => 0.0,
        2..=5 => rng.gen_range(-20i32..=20) as f64,
        // Near underflow and overflow, where rounding shortcuts break down.
        6 => sign(rng) * rng.gen_range(1.0..2.0) * 2f64.powi(-1000) * 2f64.powi(rng.gen_range(-74..=60)),
        7 => sign(rng) * rng.gen_range(1.0..2.0) * 2f64.powi(rng.gen_range(480..=1023)),
        _ => sign(rng) * rng.gen_range(1.0..2.0) * 2f64.powi(rng.gen_range(-40..=40)),
    }
}

fn random_interval(rng: &mut ChaCha8Rng) -> RealInterval {
    let a = random_double(rng);
    let b = match rng.gen_range(0..4) {
        0 => a,
        1 => a + a.abs().max(1e-300) * 2f64.powi(-rng.gen_range(1..50)),
        _ => random_double(rng),
    };
    RealInterval::new(a.min(b), a.max(b)).unwrap()
}

fn nonzero_interval(rng: &mut ChaCha8Rng) -> RealInterval {
    loop {
        let r = random_interval(rng);
        if !r.contains_zero() {
            return r;
        }
    }
}

fn corners(r: &RealInterval) -> [Dyadic; 2] {
    [Dyadic::of(r.lo()), Dyadic::of(r.hi())]
}

/// A point strictly between the endpoints of `r` (when it has width).
fn interior(rng: &mut ChaCha8Rng, r: &RealInterval) -> Dyadic {
    let t = Dyadic { m: BigInt::from(rng.gen_range(1..1024)), e: -10 };
    let lo = Dyadic::of(r.lo());
    let w = &Dyadic::of(r.hi()) - &lo;
    &lo + &(&w * &t)
}

fn random_box(rng: &mut ChaCha8Rng) -> ComplexBox {
    ComplexBox::new(random_interval(rng), random_interval(rng))
}

fn box_corners(z: &ComplexBox) -> Vec<(Dyadic, Dyadic)> {
    let mut out = Vec::with_capacity(4);
    for x in corners(&z.re) {
        for y in corners(&z.im) {
            out.push((x.clone(), y));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    ComplexAdd,
    ComplexSub,
    ComplexMul,
    ComplexDiv,
}

#[allow(dead_code)] // read by the acceptance suite
pub const OPS: [Op; 9] =
    [Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Sqrt, Op::ComplexAdd, Op::ComplexSub, Op::ComplexMul, Op::ComplexDiv];

/// One random trial; `true` when the result encloses the exact value.
///
/// Real products and quotients, and complex sums and products, are monotone
/// or multilinear in each coordinate, so the corners decide containment.
/// Complex quotients are not, so interior points are sampled as well.
fn trial(op: Op, rng: &mut ChaCha8Rng) -> bool {
    match op {
        Op::Add | Op::Sub | Op::Mul => {
            let (a, b) = (random_interval(rng), random_interval(rng));
            let r = match op {
                Op::Add => a + b,
                Op::Sub => a - b,
                _ => a * b,
            };
            corners(&a).iter().all(|x| {
                corners(&b).iter().all(|y| {
                    let exact = match op {
                        Op::Add => x + y,
                        Op::Sub => x - y,
                        _ => x * y,
                    };
                    inside(&exact, &r)
                })
            })
        }
        Op::Div => {
            let (a, b) = (random_interval(rng), nonzero_interval(rng));
            let r = a.div(b).unwrap();
            corners(&a).iter().all(|x| {
                corners(&b).iter().all(|y| if y.is_negative() { quotient_inside(&-x, &-y, &r) } else { quotient_inside(x, y, &r) })
            })
        }
        Op::Sqrt => {
            let a = random_interval(rng);
            let a = RealInterval::new(a.lo().abs().min(a.hi().abs()), a.lo().abs().max(a.hi().abs())).unwrap();
            let r = a.sqrt().unwrap();
            let (lo, hi) = (Dyadic::of(r.lo()), Dyadic::of(r.hi()));
            (lo.is_negative() || le(&(&lo * &lo), &Dyadic::of(a.lo()))) && !hi.is_negative() && le(&Dyadic::of(a.hi()), &(&hi * &hi))
        }
        Op::ComplexAdd | Op::ComplexSub | Op::ComplexMul => {
            let (z, w) = (random_box(rng), random_box(rng));
            let r = match op {
                Op::ComplexAdd => z + w,
                Op::ComplexSub => z - w,
                _ => z * w,
            };
            box_corners(&z).iter().all(|(a, b)| {
                box_corners(&w).iter().all(|(c, d)| {
                    let (re, im) = match op {
                        Op::ComplexAdd => (a + c, b + d),
                        Op::ComplexSub => (a - c, b - d),
                        _ => (&(a * c) - &(b * d), &(a * d) + &(b * c)),
                    };
                    inside(&re, &r.re) && inside(&im, &r.im)
                })
            })
        }
        Op::ComplexDiv => {
            let z = random_box(rng);
            let w = ComplexBox::new(nonzero_interval(rng), random_interval(rng));
            // Refusing is sound only when |w|² underflowed to an interval
            // touching zero.
            let Ok(r) = z.div(w) else { return w.norm_sqr().contains_zero() };
            let mut ws = box_corners(&w);
            ws.push((interior(rng, &w.re), interior(rng, &w.im)));
            let mut zs = box_corners(&z);
            zs.push((interior(rng, &z.re), interior(rng, &z.im)));
            zs.iter().all(|(a, b)| {
                ws.iter().all(|(c, d)| {
                    let den = &(c * c) + &(d * d);
                    quotient_inside(&(&(a * c) + &(b * d)), &den, &r.re) && quotient_inside(&(&(b * c) - &(a * d)), &den, &r.im)
                })
            })
        }
    }
}

/// Number of trials out of `trials` whose result misses the exact value.
pub fn violations(op: Op, trials: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ op as u64);
    (0..trials).filter(|_| !trial(op, &mut rng)).count()
}
