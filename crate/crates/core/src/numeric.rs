//! Multi-precision complex numbers for the numerical cross-checks.

use std::cell::RefCell;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_rational::BigRational;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision in bits for `digits` correct decimal digits, with guard bits.
pub fn bits_for_digits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64
}

fn big_from_int(b: &num_bigint::BigInt, p: usize) -> BigFloat {
    with_consts(|cc| BigFloat::parse(&b.to_string(), Radix::Dec, p, RM, cc))
}

fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    format!("{x}").parse().unwrap_or(f64::NAN)
}

#[derive(Clone)]
pub struct Cplx {
    re: BigFloat,
    im: BigFloat,
    p: usize,
}

impl Cplx {
    fn new(re: BigFloat, im: BigFloat, p: usize) -> Self {
        Cplx { re, im, p }
    }

    pub fn zero(p: usize) -> Self {
        Self::new(BigFloat::from_i64(0, p), BigFloat::from_i64(0, p), p)
    }

    pub fn one(p: usize) -> Self {
        Self::new(BigFloat::from_i64(1, p), BigFloat::from_i64(0, p), p)
    }

    pub fn from_f64(re: f64, im: f64, p: usize) -> Self {
        Self::new(BigFloat::from_f64(re, p), BigFloat::from_f64(im, p), p)
    }

    pub fn from_rational(r: &BigRational, p: usize) -> Self {
        let n = big_from_int(r.numer(), p);
        let d = big_from_int(r.denom(), p);
        Self::new(n.div(&d, p, RM), BigFloat::from_i64(0, p), p)
    }

    /// Parses decimal strings for the real and imaginary parts.
    pub fn parse(re: &str, im: &str, p: usize) -> Option<Self> {
        let (r, i) = with_consts(|cc| {
            (
                BigFloat::parse(re, Radix::Dec, p, RM, cc),
                BigFloat::parse(im, Radix::Dec, p, RM, cc),
            )
        });
        (!r.is_nan() && !i.is_nan()).then(|| Self::new(r, i, p))
    }

    pub fn prec(&self) -> usize {
        self.p
    }

    /// The same value carried at precision `p`.
    pub fn with_prec(&self, p: usize) -> Self {
        let (mut re, mut im) = (self.re.clone(), self.im.clone());
        re.set_precision(p, RM).expect("precision change");
        im.set_precision(p, RM).expect("precision change");
        Self::new(re, im, p)
    }

    /// `e^{2πi·w}`.
    pub fn exp_2pi_i(w: &Cplx) -> Self {
        let p = w.p;
        with_consts(|cc| {
            let two_pi = cc.pi(p, RM).mul(&BigFloat::from_i64(2, p), p, RM);
            let ang = w.re.mul(&two_pi, p, RM);
            let modulus = w.im.mul(&two_pi, p, RM).neg().exp(p, RM, cc);
            let c = ang.cos(p, RM, cc).mul(&modulus, p, RM);
            let s = ang.sin(p, RM, cc).mul(&modulus, p, RM);
            Self::new(c, s, p)
        })
    }

    /// `2πi` at precision `p`.
    pub fn two_pi_i(p: usize) -> Self {
        with_consts(|cc| {
            let two_pi = cc.pi(p, RM).mul(&BigFloat::from_i64(2, p), p, RM);
            Self::new(BigFloat::from_i64(0, p), two_pi, p)
        })
    }

    /// `e^{2πi·j/n}`.
    pub fn root_of_unity(j: i64, n: i64, p: usize) -> Self {
        let frac = BigFloat::from_i64(j.rem_euclid(n), p).div(&BigFloat::from_i64(n, p), p, RM);
        Self::exp_2pi_i(&Self::new(frac, BigFloat::from_i64(0, p), p))
    }

    pub fn add(&self, o: &Cplx) -> Self {
        let p = self.p;
        Self::new(self.re.add(&o.re, p, RM), self.im.add(&o.im, p, RM), p)
    }

    pub fn sub(&self, o: &Cplx) -> Self {
        let p = self.p;
        Self::new(self.re.sub(&o.re, p, RM), self.im.sub(&o.im, p, RM), p)
    }

    pub fn mul(&self, o: &Cplx) -> Self {
        let p = self.p;
        let re = self
            .re
            .mul(&o.re, p, RM)
            .sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self
            .re
            .mul(&o.im, p, RM)
            .add(&self.im.mul(&o.re, p, RM), p, RM);
        Self::new(re, im, p)
    }

    fn norm_sqr(&self) -> BigFloat {
        let p = self.p;
        self.re
            .mul(&self.re, p, RM)
            .add(&self.im.mul(&self.im, p, RM), p, RM)
    }

    pub fn recip(&self) -> Self {
        let p = self.p;
        let n = self.norm_sqr();
        Self::new(self.re.div(&n, p, RM), self.im.neg().div(&n, p, RM), p)
    }

    pub fn div(&self, o: &Cplx) -> Self {
        self.mul(&o.recip())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.re.neg(), self.im.neg(), self.p)
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        self.mul(&Cplx::from_rational(r, self.p))
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        let p = self.p;
        let f = BigFloat::from_i64(k, p);
        Self::new(self.re.mul(&f, p, RM), self.im.mul(&f, p, RM), p)
    }

    pub fn powi(&self, e: i64) -> Self {
        let mut base = if e < 0 { self.recip() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Cplx::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `e^{z}`.
    pub fn exp(&self) -> Self {
        let p = self.p;
        let two_pi = with_consts(|cc| cc.pi(p, RM)).mul(&BigFloat::from_i64(2, p), p, RM);
        // e^{a+bi} = e^{2πi·(b − a i)/(2π)}
        let w = Self::new(
            self.im.div(&two_pi, p, RM),
            self.re.neg().div(&two_pi, p, RM),
            p,
        );
        Self::exp_2pi_i(&w)
    }

    pub fn abs_f64(&self) -> f64 {
        to_f64(&self.norm_sqr().sqrt(self.p, RM))
    }

    /// `log10 |z|`, usable far outside the `f64` range.
    pub fn log10_abs(&self) -> f64 {
        let n = self.norm_sqr();
        if n.is_zero() {
            return f64::NEG_INFINITY;
        }
        let p = self.p;
        with_consts(|cc| to_f64(&n.log10(p, RM, cc)) / 2.0)
    }

    pub fn re_f64(&self) -> f64 {
        to_f64(&self.re)
    }

    pub fn im_f64(&self) -> f64 {
        to_f64(&self.im)
    }

    pub fn dist_f64(&self, re: f64, im: f64) -> f64 {
        self.sub(&Cplx::from_f64(re, im, self.p)).abs_f64()
    }
}

impl fmt::Debug for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_and_exp() {
        let p = bits_for_digits(40);
        let z = Cplx::root_of_unity(1, 4, p);
        assert!(z.sub(&Cplx::from_f64(0.0, 1.0, p)).log10_abs() < -39.0);
        let w = Cplx::root_of_unity(5, 6, p).mul(&Cplx::root_of_unity(1, 6, p));
        assert!(w.sub(&Cplx::one(p)).log10_abs() < -39.0);
        assert!(Cplx::parse("0.5", "-1.25", p).unwrap().dist_f64(0.5, -1.25) < 1e-15);
        let e = Cplx::from_f64(1.0, 0.0, p).exp();
        assert!((e.re_f64() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn tiny_magnitudes() {
        let p = bits_for_digits(40);
        let q = Cplx::exp_2pi_i(&Cplx::from_f64(0.0, 60.0, p));
        let expect = -60.0 * 2.0 * std::f64::consts::PI / std::f64::consts::LN_10;
        assert!((q.log10_abs() - expect).abs() < 1e-9);
    }
}
