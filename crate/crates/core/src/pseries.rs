//! Sparse Puiseux-Laurent series in `q = e^{2πiτ}` and `y = e^{2πiz}`.
//!
//! Exponents live in `(1/N)·Z` and are stored pre-multiplied by `N`. A series
//! carries its own truncation region `eq ≤ qmax`, `|ey| ≤ ywindow`; every
//! coefficient inside the region is exact, nothing outside it is stored.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclo::{format_rational, parse_rational, CycloNum};
use crate::error::{Error, Result};
use crate::numeric::Cplx;

/// A pair of exponents `(eq, ey)` of a monomial `q^eq y^ey`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentPair {
    pub eq: BigRational,
    pub ey: BigRational,
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q^{} y^{}", self.eq, self.ey)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct PuiseuxSeries {
    denom: u32,
    qmax: BigRational,
    ywindow: BigRational,
    terms: BTreeMap<(i64, i64), CycloNum>,
}

/// `n/d` as a rational.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn floor_units(r: &BigRational, denom: u32) -> i64 {
    (r * BigRational::from_integer(denom.into()))
        .floor()
        .to_integer()
        .to_i64()
        .expect("exponent bound fits in i64")
}

/// Exact `r·N` for an exponent that must lie on the lattice `(1/N)·Z`.
pub(crate) fn to_units(r: &BigRational, denom: u32) -> Result<i64> {
    let s = r * BigRational::from_integer(denom.into());
    if !s.is_integer() {
        return Err(Error::OrderMismatch(format!(
            "exponent {r} is not a multiple of 1/{denom}"
        )));
    }
    s.to_integer()
        .to_i64()
        .ok_or(Error::Overflow("exponent units"))
}

impl PuiseuxSeries {
    /// The zero series with the given truncation region.
    pub fn zero(denom: u32, qmax: BigRational, ywindow: BigRational) -> Self {
        assert!(denom > 0, "series denominator must be positive");
        PuiseuxSeries {
            denom,
            qmax,
            ywindow: ywindow.max(BigRational::zero()),
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(
        denom: u32,
        eq: &BigRational,
        ey: &BigRational,
        coeff: CycloNum,
        qmax: BigRational,
        ywindow: BigRational,
    ) -> Result<Self> {
        let mut s = Self::zero(denom, qmax, ywindow);
        let (a, b) = (to_units(eq, denom)?, to_units(ey, denom)?);
        s.add_term(a, b, coeff)?;
        Ok(s)
    }

    pub fn constant(
        denom: u32,
        c: CycloNum,
        qmax: BigRational,
        ywindow: BigRational,
    ) -> Result<Self> {
        Self::monomial(
            denom,
            &BigRational::zero(),
            &BigRational::zero(),
            c,
            qmax,
            ywindow,
        )
    }

    /// Builds a series from `(eq, ey, coeff)` triples; terms outside the region are dropped.
    pub fn from_terms<I>(
        denom: u32,
        qmax: BigRational,
        ywindow: BigRational,
        terms: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (BigRational, BigRational, CycloNum)>,
    {
        let mut s = Self::zero(denom, qmax, ywindow);
        for (eq, ey, c) in terms {
            let (a, b) = (to_units(&eq, denom)?, to_units(&ey, denom)?);
            s.add_term(a, b, c)?;
        }
        Ok(s)
    }

    pub(crate) fn from_units(
        denom: u32,
        qmax: BigRational,
        ywindow: BigRational,
        terms: BTreeMap<(i64, i64), CycloNum>,
    ) -> Self {
        let mut s = Self::zero(denom, qmax, ywindow);
        let (qb, yb) = (s.q_bound(), s.y_bound());
        s.terms = terms
            .into_iter()
            .filter(|((a, b), c)| *a <= qb && b.abs() <= yb && !c.is_zero())
            .collect();
        s
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    pub fn qmax(&self) -> &BigRational {
        &self.qmax
    }

    pub fn ywindow(&self) -> &BigRational {
        &self.ywindow
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest stored q-exponent in lattice units.
    pub(crate) fn q_bound(&self) -> i64 {
        floor_units(&self.qmax, self.denom)
    }

    pub(crate) fn y_bound(&self) -> i64 {
        floor_units(&self.ywindow, self.denom)
    }

    fn exp(&self, units: i64) -> BigRational {
        rat(units, self.denom as i64)
    }

    /// Terms in `(eq, ey)` order.
    pub fn terms(&self) -> impl Iterator<Item = (ExponentPair, &CycloNum)> + '_ {
        self.terms.iter().map(|(&(a, b), c)| {
            (
                ExponentPair {
                    eq: self.exp(a),
                    ey: self.exp(b),
                },
                c,
            )
        })
    }

    pub fn coeff(&self, eq: &BigRational, ey: &BigRational) -> CycloNum {
        match (to_units(eq, self.denom), to_units(ey, self.denom)) {
            (Ok(a), Ok(b)) => self.terms.get(&(a, b)).cloned(),
            _ => None,
        }
        .unwrap_or_else(|| CycloNum::zero(self.denom))
    }

    fn in_region(&self, a: i64, b: i64) -> bool {
        a <= self.q_bound() && b.abs() <= self.y_bound()
    }

    fn add_term(&mut self, a: i64, b: i64, c: CycloNum) -> Result<()> {
        if !self.in_region(a, b) || c.is_zero() {
            return Ok(());
        }
        let c = c.embed(self.denom)?;
        match self.terms.entry((a, b)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c)?;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
        Ok(())
    }

    fn check_denom(&self, other: &Self) -> Result<()> {
        if self.denom != other.denom {
            return Err(Error::OrderMismatch(format!(
                "series denominators {} and {} differ",
                self.denom, other.denom
            )));
        }
        Ok(())
    }

    fn region_meet(&self, other: &Self) -> (BigRational, BigRational) {
        (
            self.qmax.clone().min(other.qmax.clone()),
            self.ywindow.clone().min(other.ywindow.clone()),
        )
    }

    /// The same series on the finer lattice `(1/denom)·Z`, `self.denom | denom`.
    pub fn lift(&self, denom: u32) -> Result<Self> {
        if !denom.is_multiple_of(self.denom) {
            return Err(Error::OrderMismatch(format!(
                "cannot lift denominator {} to {denom}",
                self.denom
            )));
        }
        let k = (denom / self.denom) as i64;
        let mut out = Self::zero(denom, self.qmax.clone(), self.ywindow.clone());
        for (&(a, b), c) in &self.terms {
            out.terms.insert((a * k, b * k), c.embed(denom)?);
        }
        Ok(out)
    }

    /// Restricts to a smaller region.
    pub fn truncate(&self, qmax: &BigRational, ywindow: &BigRational) -> Self {
        let mut out = Self::zero(
            self.denom,
            qmax.clone().min(self.qmax.clone()),
            ywindow.clone().min(self.ywindow.clone()),
        );
        let (qb, yb) = (out.q_bound(), out.y_bound());
        out.terms = self
            .terms
            .iter()
            .filter(|((a, b), _)| *a <= qb && b.abs() <= yb)
            .map(|(k, c)| (*k, c.clone()))
            .collect();
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_denom(other)?;
        let (qm, w) = self.region_meet(other);
        let mut out = self.truncate(&qm, &w);
        for (&(a, b), c) in &other.terms {
            out.add_term(a, b, c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CycloNum) -> Result<Self> {
        let mut out = Self::zero(self.denom, self.qmax.clone(), self.ywindow.clone());
        for (&(a, b), x) in &self.terms {
            out.add_term(a, b, x.mul(c)?)?;
        }
        Ok(out)
    }

    /// Multiplies by the monomial `c·q^eq·y^ey`, shifting the region with it.
    pub fn mul_monomial(&self, eq: &BigRational, ey: &BigRational, c: &CycloNum) -> Result<Self> {
        let (da, db) = (to_units(eq, self.denom)?, to_units(ey, self.denom)?);
        let mut out = Self::zero(self.denom, &self.qmax + eq, self.ywindow.clone() - ey.abs());
        for (&(a, b), x) in &self.terms {
            out.add_term(a + da, b + db, x.mul(c)?)?;
        }
        Ok(out)
    }

    fn mul_bounded(
        &self,
        other: &Self,
        qb: i64,
        yb: i64,
    ) -> Result<BTreeMap<(i64, i64), CycloNum>> {
        let mut acc: BTreeMap<(i64, i64), CycloNum> = BTreeMap::new();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                let (a, b) = (a1 + a2, b1 + b2);
                if a > qb || b.abs() > yb {
                    continue;
                }
                let p = c1.mul(c2)?;
                match acc.get_mut(&(a, b)) {
                    Some(s) => *s = s.add(&p)?,
                    None => {
                        acc.insert((a, b), p);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(acc)
    }

    /// Most negative stored y-exponent, or 0.
    fn y_floor(&self) -> BigRational {
        let m = self.terms.keys().map(|&(_, b)| b).min().unwrap_or(0).min(0);
        self.exp(m)
    }

    /// Truncated product.
    ///
    /// Only positive-side y-tails can be cut off (the expansions converge for
    /// `|q| < |y| < 1`), so a factor reaching down to `y^{−k}` pulls unknown
    /// terms of the other factor down by `k`; the window shrinks accordingly.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_denom(other)?;
        let (qm, w) = self.region_meet(other);
        let w = w
            .min(&self.ywindow + other.y_floor())
            .min(&other.ywindow + self.y_floor())
            .max(BigRational::zero());
        let mut out = Self::zero(self.denom, qm, w);
        out.terms = self.mul_bounded(other, out.q_bound(), out.y_bound())?;
        Ok(out)
    }

    /// Multiplicative inverse under the expansion-direction rule.
    ///
    /// The lowest q-slice must be a monomial `m` or a binomial `m·(1 − u)`;
    /// `m` is always taken to be the term of smallest y-exponent so that `u`
    /// has positive y-exponent and `1/(1 − u)` expands as `Σ u^k`
    /// (convergent for `|q| < |y| < 1`).
    pub fn invert(&self) -> Result<Self> {
        let Some((&(e0, _), _)) = self.terms.iter().next() else {
            return Err(Error::SingularLeadingTerm("the series is zero".into()));
        };
        let slice: Vec<_> = self.terms.range((e0, i64::MIN)..=(e0, i64::MAX)).collect();
        let &(_, ym) = slice[0].0;
        let m_inv = slice[0].1.inv()?;
        let d = self.denom;
        let qmax_r = &self.qmax - self.exp(2 * e0);
        let w = self.ywindow.clone();
        let mut r = Self::zero(d, qmax_r, w);
        let (qb, yb) = (r.q_bound(), r.y_bound());
        // b0 = m^{-1}·Σ u^k with u = −(c2/c1)·y^{dy}
        let mut b0 = BTreeMap::new();
        match slice.len() {
            1 => {
                b0.insert((-e0, -ym), m_inv.clone());
            }
            2 => {
                let (&(_, y2), c2) = slice[1];
                let dy = y2 - ym;
                let u = c2.mul(&m_inv)?.neg();
                let mut term = m_inv.clone();
                let mut ey = -ym;
                while ey <= yb {
                    if ey >= -yb {
                        b0.insert((-e0, ey), term.clone());
                    }
                    term = term.mul(&u)?;
                    ey += dy;
                }
            }
            _ => {
                let lead: Vec<String> = slice
                    .iter()
                    .map(|((_, b), c)| format!("({c})·y^{}", self.exp(*b)))
                    .collect();
                return Err(Error::SingularLeadingTerm(format!(
                    "leading slice {} is neither a monomial nor a binomial",
                    lead.join(" + ")
                )));
            }
        }
        let b0 = Self::from_units(d, r.qmax.clone(), r.ywindow.clone(), b0);
        // E = 1 − a·b0 has only positive q-exponents inside the region.
        let ab = self.mul_bounded(&b0, qb + e0, yb)?;
        let mut e = Self::zero(d, r.qmax.clone() + self.exp(e0), r.ywindow.clone());
        for ((a, b), c) in ab {
            if a > 0 {
                e.terms.insert((a, b), c.neg());
            }
        }
        // b = b0·(1 + E + E² + ⋯)
        let mut geo = Self::constant(d, CycloNum::one(d), e.qmax.clone(), e.ywindow.clone())?;
        let mut power = geo.clone();
        let top = qb + e0;
        loop {
            let next = power.mul_bounded(&e, top, yb)?;
            if next.is_empty() {
                break;
            }
            power.terms = next;
            for (&(a, b), c) in &power.terms {
                geo.add_term(a, b, c.clone())?;
            }
        }
        r.terms = b0.mul_bounded(&geo, qb, yb)?;
        Ok(r)
    }

    /// Applies `z ↦ z + shift + r·τ`: `q^a y^b ↦ e^{2πi·shift·b}·q^{a + r·b}·y^b`.
    ///
    /// The new `qmax` is `qmax − |r|·ywindow`, the worst case of the shift.
    pub fn substitute_y_scale(&self, shift: &BigRational, r: &BigRational) -> Result<Self> {
        let d = self.denom;
        let qmax = &self.qmax - r.abs() * &self.ywindow;
        let mut out = Self::zero(d, qmax, self.ywindow.clone());
        for (&(a, b), c) in &self.terms {
            let turns = shift * self.exp(b);
            let phase = CycloNum::root_of_unity(d, to_units(&turns, d)?, d)?;
            let da = to_units(&(r * self.exp(b)), d)?;
            out.add_term(a + da, b, c.mul(&phase)?)?;
        }
        Ok(out)
    }

    /// Applies `τ ↦ τ + 1`: `q^a ↦ e^{2πia}·q^a`.
    pub fn substitute_q_phase(&self) -> Result<Self> {
        let d = self.denom;
        let mut out = self.clone();
        for (&(a, _), c) in out.terms.iter_mut() {
            *c = c.mul(&CycloNum::root_of_unity(d, a.rem_euclid(d as i64), d)?)?;
        }
        Ok(out)
    }

    /// The `q⁰` slice, a Laurent polynomial in `y`.
    pub fn q_limit(&self) -> Result<Self> {
        if let Some((&(a, _), _)) = self.terms.iter().next() {
            if a < 0 {
                return Err(Error::NotHolomorphicAtCusp(self.exp(a).to_string()));
            }
        }
        let mut out = Self::zero(self.denom, BigRational::zero(), self.ywindow.clone());
        out.terms = self
            .terms
            .range((0, i64::MIN)..=(0, i64::MAX))
            .map(|(k, c)| (*k, c.clone()))
            .collect();
        Ok(out)
    }

    /// `y·d/dy`, i.e. `(2πi)^{-1}·d/dz`.
    pub fn y_derivative(&self) -> Self {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(&(a, b), c)| ((a, b), c.scale(&self.exp(b))))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        out
    }

    /// Substitutes `y = 1` into the `q^eq` slice.
    pub fn slice_at_y1(&self, eq: &BigRational) -> Result<CycloNum> {
        let a = to_units(eq, self.denom)?;
        let mut acc = CycloNum::zero(self.denom);
        for (_, c) in self.terms.range((a, i64::MIN)..=(a, i64::MAX)) {
            acc = acc.add(c)?;
        }
        Ok(acc)
    }

    /// Numerical value at `(z, τ)` of the truncated sum.
    pub fn eval(&self, z: &Cplx, tau: &Cplx, digits: u32) -> Cplx {
        let p = z.prec();
        let n = Cplx::from_f64(self.denom as f64, 0.0, p);
        let q1 = Cplx::exp_2pi_i(&tau.div(&n));
        let y1 = Cplx::exp_2pi_i(&z.div(&n));
        let mut acc = Cplx::zero(p);
        for (&(a, b), c) in &self.terms {
            let t = c.to_complex(digits).mul(&q1.powi(a)).mul(&y1.powi(b));
            acc = acc.add(&t);
        }
        acc
    }

    /// Whether every y-exponent is integral.
    pub fn integral_y(&self) -> bool {
        self.terms
            .keys()
            .all(|(_, b)| b.is_multiple_of(&(self.denom as i64)))
    }
}

/// Outcome of [`series_equal`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesComparison {
    pub equal: bool,
    /// Compared region as `"qmax"`, `"ywindow"` fraction strings.
    pub qmax: String,
    pub ywindow: String,
    pub compared_terms: usize,
    pub mismatch: Option<Mismatch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub q: String,
    pub y: String,
    pub left: CycloNum,
    pub right: CycloNum,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at q^{} y^{}: {} vs {}",
            self.q, self.y, self.left, self.right
        )
    }
}

/// Compares two series on the intersection of their regions.
pub fn series_equal(a: &PuiseuxSeries, b: &PuiseuxSeries) -> Result<SeriesComparison> {
    a.check_denom(b)?;
    let (qm, w) = a.region_meet(b);
    let (ta, tb) = (a.truncate(&qm, &w), b.truncate(&qm, &w));
    let mut keys: Vec<_> = ta.terms.keys().chain(tb.terms.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let zero = CycloNum::zero(a.denom);
    let mut mismatch = None;
    for k in &keys {
        let (l, r) = (
            ta.terms.get(k).unwrap_or(&zero),
            tb.terms.get(k).unwrap_or(&zero),
        );
        if l != r {
            mismatch = Some(Mismatch {
                q: ta.exp(k.0).to_string(),
                y: ta.exp(k.1).to_string(),
                left: l.clone(),
                right: r.clone(),
            });
            break;
        }
    }
    Ok(SeriesComparison {
        equal: mismatch.is_none(),
        qmax: ta.qmax.to_string(),
        ywindow: ta.ywindow.to_string(),
        compared_terms: keys.len(),
        mismatch,
    })
}

impl fmt::Debug for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn show_exp(r: &BigRational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        format!("({r})")
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tail = show_exp(&self.qmax);
        if self.terms.is_empty() {
            return write!(f, "0 + O(q^>{tail})");
        }
        let mut first = true;
        for (&(a, b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if a != 0 {
                write!(f, "·q^{}", show_exp(&self.exp(a)))?;
            }
            if b != 0 {
                write!(f, "·y^{}", show_exp(&self.exp(b)))?;
            }
        }
        write!(f, " + O(q^>{tail})")
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    denom: u32,
    qmax: String,
    ywindow: String,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    q: String,
    y: String,
    coeff: CycloNum,
}

impl Serialize for PuiseuxSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            denom: self.denom,
            qmax: format_rational(&self.qmax),
            ywindow: format_rational(&self.ywindow),
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| TermRepr {
                    q: format_rational(&self.exp(a)),
                    y: format_rational(&self.exp(b)),
                    coeff: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PuiseuxSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = SeriesRepr::deserialize(d)?;
        if r.denom == 0 {
            return Err(D::Error::custom("denom must be positive"));
        }
        let p = |s: &str| parse_rational(s).map_err(D::Error::custom);
        let terms = r
            .terms
            .iter()
            .map(|t| Ok((p(&t.q)?, p(&t.y)?, t.coeff.clone())))
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        PuiseuxSeries::from_terms(r.denom, p(&r.qmax)?, p(&r.ywindow)?, terms)
            .map_err(D::Error::custom)
    }
}

/// `lcm` of series denominators, used to bring results onto a common lattice.
pub fn common_denom(ds: &[u32]) -> u32 {
    ds.iter().fold(1u32, |acc, &d| acc.lcm(&d))
}

/// Integer `n` as a rational.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: i64) -> CycloNum {
        CycloNum::from_int(4, v)
    }

    fn mono(eq: BigRational, ey: BigRational, v: i64) -> PuiseuxSeries {
        PuiseuxSeries::monomial(4, &eq, &ey, c(v), int(4), int(6)).unwrap()
    }

    #[test]
    fn binomial_square() {
        let s = mono(int(0), rat(1, 2), 1)
            .sub(&mono(int(0), rat(-1, 2), 1))
            .unwrap();
        let sq = s.mul(&s).unwrap();
        let want = mono(int(0), int(1), 1)
            .add(&mono(int(0), int(0), -2))
            .unwrap()
            .add(&mono(int(0), int(-1), 1))
            .unwrap();
        assert!(series_equal(&sq, &want).unwrap().equal);
        // the factor reaching y^{−1/2} costs half a unit of window
        assert_eq!(sq.ywindow(), &rat(11, 2));
    }

    #[test]
    fn invert_geometric() {
        let a = mono(int(0), int(0), 1)
            .sub(&mono(int(1), int(1), 1))
            .unwrap();
        let b = a.invert().unwrap();
        for k in 0..=4 {
            assert_eq!(b.coeff(&int(k), &int(k)), c(1));
        }
        assert_eq!(b.num_terms(), 5);
        let one = a.mul(&b).unwrap();
        assert_eq!(one, mono(int(0), int(0), 1));
    }

    #[test]
    fn invert_theta_leading_factor() {
        let a = mono(int(0), rat(1, 2), 1)
            .sub(&mono(int(0), rat(-1, 2), 1))
            .unwrap();
        let b = a.invert().unwrap();
        // −y^{1/2}(1 + y + y² + ⋯)
        assert_eq!(b.coeff(&int(0), &rat(1, 2)), c(-1));
        assert_eq!(b.coeff(&int(0), &rat(11, 2)), c(-1));
        assert_eq!(b.coeff(&int(0), &rat(-1, 2)), c(0));
        let prod = a.mul(&b).unwrap().truncate(&int(4), &int(5));
        assert_eq!(prod, mono(int(0), int(0), 1).truncate(&int(4), &int(5)));
    }

    #[test]
    fn invert_constant_and_zero() {
        let two = mono(int(0), int(0), 2);
        let half = two.invert().unwrap();
        assert_eq!(
            half.coeff(&int(0), &int(0)),
            CycloNum::from_rational(4, rat(1, 2))
        );
        let z = PuiseuxSeries::zero(4, int(2), int(2));
        assert!(matches!(z.invert(), Err(Error::SingularLeadingTerm(_))));
        let tri = mono(int(0), int(0), 1)
            .add(&mono(int(0), int(1), 1))
            .unwrap()
            .add(&mono(int(0), int(2), 1))
            .unwrap();
        assert!(tri.invert().is_err());
    }

    #[test]
    fn substitutions() {
        let s = mono(int(0), rat(1, 2), 1);
        let t = s.substitute_y_scale(&int(1), &int(0)).unwrap();
        assert_eq!(t.coeff(&int(0), &rat(1, 2)), c(-1));
        let y = PuiseuxSeries::monomial(4, &int(0), &int(1), c(1), int(4), int(1)).unwrap();
        let t = y.substitute_y_scale(&int(0), &int(1)).unwrap();
        assert_eq!(t.coeff(&int(1), &int(1)), c(1));
        assert_eq!(t.qmax(), &int(3));
        // composing shifts adds them
        let s = mono(int(0), int(1), 1)
            .add(&mono(int(1), int(-1), 2))
            .unwrap();
        let two = s
            .substitute_y_scale(&int(0), &int(1))
            .unwrap()
            .substitute_y_scale(&int(0), &int(1))
            .unwrap();
        let once = s.substitute_y_scale(&int(0), &int(2)).unwrap();
        assert!(series_equal(&two, &once).unwrap().equal);
        let h = PuiseuxSeries::monomial(8, &rat(1, 8), &int(0), CycloNum::one(8), int(2), int(2))
            .unwrap();
        let p = h.substitute_q_phase().unwrap();
        assert_eq!(
            p.coeff(&rat(1, 8), &int(0)),
            CycloNum::root_of_unity(8, 1, 8).unwrap()
        );
        let half = mono(rat(1, 2), int(0), 1).substitute_q_phase().unwrap();
        assert_eq!(half.coeff(&rat(1, 2), &int(0)), c(-1));
    }

    #[test]
    fn q_limit_and_cusp() {
        let s = mono(int(0), int(0), 1)
            .add(&mono(int(1), int(1), 1))
            .unwrap();
        assert_eq!(s.q_limit().unwrap().num_terms(), 1);
        let bad = mono(rat(-1, 2), int(0), 1);
        assert!(matches!(bad.q_limit(), Err(Error::NotHolomorphicAtCusp(_))));
    }

    #[test]
    fn comparison_region() {
        let s = mono(int(0), int(1), 3);
        let t = s.add(&PuiseuxSeries::monomial(4, &int(5), &int(0), c(1), int(6), int(6)).unwrap());
        // adding a term beyond qmax = 4 is dropped by truncation
        assert!(series_equal(&s, &t.unwrap()).unwrap().equal);
        let u = s.add(&mono(int(1), int(0), 1)).unwrap();
        let cmp = series_equal(&s, &u).unwrap();
        assert!(!cmp.equal);
        assert_eq!(cmp.mismatch.unwrap().q, "1");
    }

    #[test]
    fn json_round_trip() {
        let s = mono(int(0), rat(1, 2), 1)
            .sub(&mono(rat(1, 4), rat(-1, 2), 2))
            .unwrap();
        let j = serde_json::to_string(&s).unwrap();
        let back: PuiseuxSeries = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        assert!(j.find("\"1/4\"").is_some());
    }
}
