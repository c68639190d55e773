//! Exact arithmetic in the cyclotomic field `Q(ζ_N)`.
//!
//! Elements are stored as coefficient vectors of a polynomial in `ζ_N`
//! reduced modulo the cyclotomic polynomial `Φ_N`, so the representation is
//! canonical and equality is coefficient equality.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{self, Cplx};

/// Reduction tables for one cyclotomic field.
#[derive(Debug)]
pub struct CycloField {
    order: u32,
    /// `Φ_N` coefficients, low degree first, monic.
    modulus: Vec<i64>,
    /// `ζ^k mod Φ_N` for `k = 0..N`.
    powers: Vec<Vec<i64>>,
    /// Exponents `k` in `1..N` coprime to `N`, excluding `k = 1`.
    conjugates: Vec<u32>,
}

impl CycloField {
    fn build(order: u32) -> Self {
        assert!(order > 0, "cyclotomic order must be positive");
        let modulus = cyclotomic_poly(order);
        let phi = modulus.len() - 1;
        let n = order as usize;
        let mut powers = Vec::with_capacity(n);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..n {
            powers.push(cur.clone());
            // multiply by ζ
            let top = cur[phi - 1];
            for i in (1..phi).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..phi {
                    cur[i] -= top * modulus[i];
                }
            }
        }
        let conjugates = (2..order.max(2)).filter(|k| k.gcd(&order) == 1).collect();
        CycloField {
            order,
            modulus,
            powers,
            conjugates,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Degree of `Φ_N`, i.e. Euler's totient of `N`.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Reduced coefficients of `ζ^k`.
    pub fn power(&self, k: i64) -> &[i64] {
        let n = self.order as i64;
        &self.powers[k.rem_euclid(n) as usize]
    }

    pub fn modulus(&self) -> &[i64] {
        &self.modulus
    }

    pub(crate) fn conjugate_exponents(&self) -> &[u32] {
        &self.conjugates
    }
}

fn poly_divexact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // den monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = num.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Integer coefficients of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u32) -> Vec<i64> {
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_divexact(&p, &cyclotomic_poly(d));
        }
    }
    p
}

/// Shared, cached tables for `Q(ζ_order)`.
pub fn field(order: u32) -> Arc<CycloField> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CycloField>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("cyclotomic cache poisoned");
    guard
        .entry(order)
        .or_insert_with(|| Arc::new(CycloField::build(order)))
        .clone()
}

/// An element of `Q(ζ_N)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloNum {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl CycloNum {
    pub fn zero(order: u32) -> Self {
        let d = field(order).degree();
        CycloNum {
            order,
            coeffs: vec![BigRational::zero(); d],
        }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(order, BigRational::one())
    }

    pub fn from_rational(order: u32, r: BigRational) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(order: u32, v: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(v.into()))
    }

    /// Builds an element from already reduced coefficients.
    pub fn from_coeffs(order: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        let d = field(order).degree();
        if coeffs.len() != d {
            return Err(Error::Parse(format!(
                "Q(zeta_{order}) needs {d} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(CycloNum { order, coeffs })
    }

    /// Builds an element from integer coefficients over a common denominator.
    pub fn from_scaled_ints(order: u32, nums: &[i128], den: i128) -> Self {
        let d = BigInt::from(den);
        let coeffs = nums
            .iter()
            .map(|&n| BigRational::new(BigInt::from(n), d.clone()))
            .collect();
        CycloNum { order, coeffs }
    }

    /// `e^{2πi·num/den}` inside `Q(ζ_order)`.
    pub fn root_of_unity(order: u32, num: i64, den: u32) -> Result<Self> {
        if den == 0 || !order.is_multiple_of(den) {
            return Err(Error::OrderMismatch(format!(
                "root of unity of order {den} does not live in Q(zeta_{order})"
            )));
        }
        let k = num * (order / den) as i64;
        let f = field(order);
        let coeffs = f
            .power(k)
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        Ok(CycloNum { order, coeffs })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then(|| &self.coeffs[0])
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(format!(
                "Q(zeta_{}) vs Q(zeta_{})",
                self.order, other.order
            )));
        }
        Ok(())
    }

    /// Lifts a rational element into `order`, leaving non-rationals untouched.
    fn align(&self, other: &Self) -> Result<(Self, Self)> {
        if self.order == other.order {
            return Ok((self.clone(), other.clone()));
        }
        if let Some(r) = self.as_rational() {
            return Ok((Self::from_rational(other.order, r.clone()), other.clone()));
        }
        if let Some(r) = other.as_rational() {
            return Ok((self.clone(), Self::from_rational(self.order, r.clone())));
        }
        self.check(other).map(|_| unreachable!())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Ok(CycloNum {
            order: a.order,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CycloNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CycloNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        let f = field(a.order);
        let d = f.degree();
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        Ok(CycloNum {
            order: a.order,
            coeffs: reduce_rational(&f, prod),
        })
    }

    /// Image under the Galois automorphism `ζ ↦ ζ^k`.
    pub fn galois(&self, k: i64) -> Self {
        let f = field(self.order);
        let d = f.degree();
        let mut out = vec![BigRational::zero(); d];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (i, &p) in f.power(j as i64 * k).iter().enumerate() {
                if p != 0 {
                    out[i] += c * BigRational::from_integer(p.into());
                }
            }
        }
        CycloNum {
            order: self.order,
            coeffs: out,
        }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = field(self.order);
        // adj = product of the nontrivial conjugates; self·adj is the norm.
        let mut adj = Self::one(self.order);
        for &k in f.conjugate_exponents() {
            adj = adj.mul(&self.galois(k as i64))?;
        }
        let norm = self.mul(&adj)?;
        let n = norm
            .as_rational()
            .expect("field norm must be rational")
            .clone();
        Ok(adj.scale(&n.recip()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.order);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same order");
            }
            base = base.mul(&base).expect("same order");
            e >>= 1;
        }
        acc
    }

    /// Image under the inclusion `Q(ζ_N) ⊂ Q(ζ_M)` for `N | M`.
    pub fn embed(&self, order: u32) -> Result<Self> {
        if order == self.order {
            return Ok(self.clone());
        }
        if !order.is_multiple_of(self.order) {
            return Err(Error::OrderMismatch(format!(
                "Q(zeta_{}) is not a subfield of Q(zeta_{order})",
                self.order
            )));
        }
        let step = (order / self.order) as i64;
        let f = field(order);
        let mut out = vec![BigRational::zero(); f.degree()];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(f.power(j as i64 * step)) {
                if p != 0 {
                    *o += c * BigRational::from_integer(p.into());
                }
            }
        }
        Ok(CycloNum { order, coeffs: out })
    }

    /// Numerical value, accurate to better than `10^(1-digits)`.
    pub fn to_complex(&self, digits: u32) -> Cplx {
        let prec = numeric::bits_for_digits(digits.max(16));
        let n = self.order as i64;
        let mut acc = Cplx::zero(prec);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = Cplx::root_of_unity(j as i64, n, prec);
            acc = acc.add(&z.mul_rational(c));
        }
        acc
    }
}

fn reduce_rational(f: &CycloField, mut buf: Vec<BigRational>) -> Vec<BigRational> {
    let d = f.degree();
    let m = f.modulus();
    for i in (d..buf.len()).rev() {
        let c = std::mem::take(&mut buf[i]);
        if c.is_zero() {
            continue;
        }
        for (j, &mj) in m[..d].iter().enumerate() {
            if mj != 0 {
                buf[i - d + j] -= &c * BigRational::from_integer(mj.into());
            }
        }
    }
    buf.truncate(d);
    buf
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Serialize, Deserialize)]
struct CycloRepr {
    order: u32,
    coeffs: Vec<String>,
}

impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloRepr {
            order: self.order,
            coeffs: self.coeffs.iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CycloRepr::deserialize(d)?;
        if r.order == 0 {
            return Err(D::Error::custom("order must be positive"));
        }
        let coeffs = r
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        CycloNum::from_coeffs(r.order, coeffs).map_err(D::Error::custom)
    }
}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let a = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => write!(f, "z{}^{j}", self.order)?,
                _ => write!(f, "{a}*z{}^{j}", self.order)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rou(n: u32, k: i64, d: u32) -> CycloNum {
        CycloNum::root_of_unity(n, k, d).unwrap()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(field(30).degree(), 8);
    }

    #[test]
    fn root_of_unity_basics() {
        assert!(rou(12, 0, 1).is_one());
        assert_eq!(rou(4, 2, 4), CycloNum::from_int(4, -1));
        let s = rou(3, 1, 3).add(&rou(3, 2, 3)).unwrap();
        assert_eq!(s, CycloNum::from_int(3, -1));
        assert!(matches!(
            CycloNum::root_of_unity(10, 1, 4),
            Err(Error::OrderMismatch(_))
        ));
    }

    #[test]
    fn norm_of_one_minus_zeta3() {
        let one = CycloNum::one(3);
        let a = rou(3, 1, 3).sub(&one).unwrap();
        let b = rou(3, 2, 3).sub(&one).unwrap();
        assert_eq!(a.mul(&b).unwrap(), CycloNum::from_int(3, 3));
    }

    #[test]
    fn inverse_and_errors() {
        assert!(CycloNum::one(5).inv().unwrap().is_one());
        assert!(matches!(
            CycloNum::zero(5).inv(),
            Err(Error::DivisionByZero)
        ));
        let x = rou(12, 1, 12).sub(&CycloNum::from_int(12, 2)).unwrap();
        assert!(x.mul(&x.inv().unwrap()).unwrap().is_one());
    }

    #[test]
    fn galois_sums_vanish() {
        for n in 2..=12u32 {
            let mut acc = CycloNum::zero(n);
            for k in 0..n as i64 {
                acc = acc.add(&rou(n, k, n)).unwrap();
            }
            assert!(acc.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn complex_values() {
        let one = CycloNum::one(8).to_complex(30);
        assert!(one.dist_f64(1.0, 0.0) < 1e-29);
        let i = rou(8, 1, 4).to_complex(30);
        assert!(i.dist_f64(0.0, 1.0) < 1e-29);
        let s = rou(6, 1, 6).to_complex(30);
        // (ζ₆ − 1/2)² = −3/4 pins the imaginary part to ±√3/2; the sign is checked separately.
        let d = s.sub(&Cplx::from_f64(0.5, 0.0, s.prec()));
        assert!(d.mul(&d).dist_f64(-0.75, 0.0) < 1e-29);
        assert!(s.im_f64() > 0.86);
    }

    #[test]
    fn rational_embedding() {
        let r = CycloNum::from_int(1, 7);
        let z = rou(5, 1, 5);
        let p = r.mul(&z).unwrap();
        assert_eq!(p.order(), 5);
        assert_eq!(p, z.scale(&BigRational::from_integer(7.into())));
        assert!(matches!(z.add(&rou(7, 1, 7)), Err(Error::OrderMismatch(_))));
    }

    #[test]
    fn json_round_trip() {
        let x = rou(12, 5, 12).scale(&BigRational::new(3.into(), 7.into()));
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains("\"order\":12"));
        let y: CycloNum = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }

    fn arb(order: u32) -> impl Strategy<Value = CycloNum> {
        let d = field(order).degree();
        prop::collection::vec((-20i64..20, 1i64..6), d).prop_map(move |v| {
            let c = v
                .into_iter()
                .map(|(n, d)| BigRational::new(n.into(), d.into()))
                .collect();
            CycloNum::from_coeffs(order, c).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn field_axioms(a in arb(12), b in arb(12), c in arb(12)) {
            let l = a.mul(&b).unwrap().mul(&c).unwrap();
            let r = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
            prop_assert!(a.add(&a.neg()).unwrap().is_zero());
            if !a.is_zero() {
                prop_assert!(a.mul(&a.inv().unwrap()).unwrap().is_one());
            }
        }

        #[test]
        fn complex_is_homomorphism(a in arb(10), b in arb(10)) {
            let p = a.mul(&b).unwrap().to_complex(30);
            let q = a.to_complex(30).mul(&b.to_complex(30));
            prop_assert!(p.sub(&q).abs_f64() < 1e-25);
        }
    }
}
