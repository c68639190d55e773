//! Expansion engine for products of theta functions.
//!
//! A product of thetas, eta powers and monomials is lowered to a monomial
//! prefactor, an exact coefficient factor in the nilpotent cohomology ring, and
//! a list of binomials `(1 − u)^{±1}`. The binomials act on a dense integer body:
//! one row per q-exponent, each row a run of y-exponents, each cell an element
//! of `Z[C_L] ⊗ Z[η]` where `C_L` is the cyclic group of `L`-th roots of unity
//! (reduced modulo `Φ_L` only at the end) and `η_g = e^{x_g/2} − 1`.
//!
//! Operations that keep every row a finite polynomial run first and are exact.
//! Divisions by `1 − c·y^b` (`b > 0`), which produce infinite y-tails, run last
//! after the rows are cut at the y cap, so every stored cell up to the cap is exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::cyclo::{field, CycloNum};
use crate::error::{Error, Result};

/// Truncated polynomial algebra `Q[η_1..η_k]/(η_g^{m_g})`, index bookkeeping only.
#[derive(Clone, Debug)]
pub(crate) struct NilAlg {
    dims: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
    /// `(i, j, i+j)` for every pair of multi-indices whose sum survives.
    triples: Vec<(usize, usize, usize)>,
}

impl NilAlg {
    pub fn new(dims: &[usize]) -> Self {
        let dims: Vec<usize> = dims.iter().map(|&d| d.max(1)).collect();
        let mut strides = vec![1; dims.len()];
        let mut size = 1;
        for (g, &d) in dims.iter().enumerate() {
            strides[g] = size;
            size *= d;
        }
        let mut alg = NilAlg {
            dims,
            strides,
            size,
            triples: Vec::new(),
        };
        for i in 0..size {
            for j in 0..size {
                if let Some(k) = alg.add_index(i, j) {
                    alg.triples.push((i, j, k));
                }
            }
        }
        alg
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn multi(&self, idx: usize) -> Vec<usize> {
        self.dims
            .iter()
            .zip(&self.strides)
            .map(|(&d, &s)| (idx / s) % d)
            .collect()
    }

    pub fn index(&self, multi: &[usize]) -> Option<usize> {
        let mut idx = 0;
        for ((&e, &d), &s) in multi.iter().zip(&self.dims).zip(&self.strides) {
            if e >= d {
                return None;
            }
            idx += e * s;
        }
        Some(idx)
    }

    fn add_index(&self, i: usize, j: usize) -> Option<usize> {
        let (a, b) = (self.multi(i), self.multi(j));
        let sum: Vec<usize> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        self.index(&sum)
    }

    /// `∏_g (1 + η_g)^{e_g}` with integer coefficients.
    pub fn pow1p(&self, e: &[i64]) -> Vec<i128> {
        let mut out = vec![0i128; self.size];
        out[0] = 1;
        for (g, &eg) in e.iter().enumerate() {
            if eg == 0 {
                continue;
            }
            let mut f = vec![0i128; self.size];
            // binomial(eg, t) for t < dims[g]
            let mut c = BigInt::one();
            for t in 0..self.dims[g] {
                if t > 0 {
                    c = c * BigInt::from(eg - (t as i64 - 1)) / BigInt::from(t as i64);
                }
                f[t * self.strides[g]] = c.to_i128().expect("binomial fits");
            }
            out = self.mul_int(&out, &f);
        }
        out
    }

    fn mul_int(&self, a: &[i128], b: &[i128]) -> Vec<i128> {
        let mut out = vec![0i128; self.size];
        for &(i, j, k) in &self.triples {
            out[k] += a[i] * b[j];
        }
        out
    }
}

/// An element of `Q(ζ_L)[η]` with exact coefficients.
#[derive(Clone, Debug)]
pub(crate) struct CoeffElt {
    pub c: Vec<CycloNum>,
}

impl CoeffElt {
    pub fn one(alg: &NilAlg, order: u32) -> Self {
        let mut c = vec![CycloNum::zero(order); alg.size()];
        c[0] = CycloNum::one(order);
        CoeffElt { c }
    }

    pub fn from_ints(ints: &[i128], order: u32) -> Self {
        CoeffElt {
            c: ints
                .iter()
                .map(|&v| CycloNum::from_rational(order, BigRational::from_integer(v.into())))
                .collect(),
        }
    }

    pub fn mul(&self, o: &Self, alg: &NilAlg) -> Result<Self> {
        let order = self.c[0].order();
        let mut out = vec![CycloNum::zero(order); alg.size()];
        for &(i, j, k) in &alg.triples {
            if self.c[i].is_zero() || o.c[j].is_zero() {
                continue;
            }
            out[k] = out[k].add(&self.c[i].mul(&o.c[j])?)?;
        }
        Ok(CoeffElt { c: out })
    }

    pub fn scale(&self, s: &CycloNum) -> Result<Self> {
        Ok(CoeffElt {
            c: self.c.iter().map(|x| x.mul(s)).collect::<Result<_>>()?,
        })
    }

    /// Inverse of an element with invertible constant term.
    pub fn inv(&self, alg: &NilAlg) -> Result<Self> {
        let a0 = self.c[0].inv()?;
        let order = a0.order();
        // a = a0·(1 − n) with n nilpotent; a^{-1} = a0^{-1}·Σ n^t
        let mut n = self.scale(&a0)?;
        for x in n.c.iter_mut() {
            *x = x.neg();
        }
        n.c[0] = CycloNum::zero(order);
        let mut acc = CoeffElt::one(alg, order);
        let mut p = CoeffElt::one(alg, order);
        let depth: usize = alg.dims().iter().map(|d| d - 1).sum();
        for _ in 0..depth {
            p = p.mul(&n, alg)?;
            for (a, b) in acc.c.iter_mut().zip(&p.c) {
                *a = a.add(b)?;
            }
        }
        acc.scale(&a0)
    }
}

/// Argument `r·z + α + β·τ + Σ_g k_g·x_g/(2πi)` of a theta function.
#[derive(Clone, Debug)]
pub(crate) struct Arg {
    pub r: BigRational,
    pub alpha: BigRational,
    pub beta: BigRational,
    pub k: Vec<i64>,
}

#[derive(Clone, Debug)]
pub(crate) enum Factor {
    /// `θ(arg)^pow`, `pow = ±1`.
    Theta(Arg, i32),
    /// `(θ'(0)/2πi)^pow = (q^{1/8}·∏(1 − q^j)³)^pow`.
    EtaCube(i32),
    /// `k·x_g·(θ'(0)/2πi)/θ(k·x_g/2πi)`, the regular part of a Chern-root factor.
    XOverTheta(usize, i64),
    /// `y^β`.
    YPow(BigRational),
    Scalar(CycloNum),
}

#[derive(Clone, Debug)]
struct Binom {
    a: i64,
    b: i64,
    phase: i64,
    e: Vec<i64>,
    div: bool,
}

struct Lowered {
    q: i64,
    e8: i64,
    y: i64,
    phase: i64,
    epow: Vec<i64>,
    coeff: CoeffElt,
    scalar: CycloNum,
    binoms: Vec<Binom>,
    zero: bool,
}

/// Fixed data of one expansion: lattice `1/L`, truncation in lattice units.
#[derive(Clone, Debug)]
pub(crate) struct Ctx {
    pub l: u32,
    pub alg: NilAlg,
    pub qmax: i64,
    pub ymax: i64,
}

fn units(r: &BigRational, l: u32, what: &str) -> Result<i64> {
    let s = r * BigRational::from_integer(l.into());
    if !s.is_integer() {
        return Err(Error::OrderMismatch(format!(
            "{what} {r} is not on the lattice (1/{l})Z; use a larger denominator"
        )));
    }
    s.to_integer()
        .to_i64()
        .ok_or(Error::Overflow("lattice units"))
}

fn half_units(r: &BigRational, l: u32, what: &str) -> Result<i64> {
    units(&(r / BigRational::from_integer(2.into())), l, what)
}

/// `k·x/(e^{kx} − 1)` in the η-basis of generator `g`, where `1 + η = e^{x/2}`.
fn todd_inverse(alg: &NilAlg, g: usize, k: i64, order: u32) -> CoeffElt {
    let m = alg.dims()[g];
    // numerator 2k·log(1+η)/η, denominator ((1+η)^{2k} − 1)/η
    let num: Vec<BigRational> = (0..m)
        .map(|j| {
            let s = if j % 2 == 0 { 2 * k } else { -2 * k };
            BigRational::new(BigInt::from(s), BigInt::from(j as i64 + 1))
        })
        .collect();
    let two_k = BigInt::from(2 * k);
    let den: Vec<BigRational> = (0..m)
        .map(|j| {
            // C(2k, j+1), valid for negative k as well
            let mut c = BigRational::one();
            for t in 0..=j as i64 {
                c *= BigRational::new(&two_k - BigInt::from(t), BigInt::from(t + 1));
            }
            c
        })
        .collect();
    let mut inv = vec![BigRational::zero(); m];
    inv[0] = den[0].recip();
    for t in 1..m {
        let mut acc = BigRational::zero();
        for j in 1..=t {
            acc += &den[j] * &inv[t - j];
        }
        inv[t] = -acc / &den[0];
    }
    let mut out = CoeffElt {
        c: vec![CycloNum::zero(order); alg.size()],
    };
    for (i, ni) in num.iter().enumerate().take(m) {
        for (j, ij) in inv.iter().enumerate().take(m - i) {
            let idx = (i + j) * alg.strides[g];
            let v = CycloNum::from_rational(order, ni * ij);
            out.c[idx] = out.c[idx].add(&v).expect("same order");
        }
    }
    out
}

impl Lowered {
    fn new(ctx: &Ctx) -> Self {
        let ng = ctx.alg.dims().len();
        Lowered {
            q: 0,
            e8: 0,
            y: 0,
            phase: 0,
            epow: vec![0; ng],
            coeff: CoeffElt::one(&ctx.alg, ctx.l),
            scalar: CycloNum::one(ctx.l),
            binoms: Vec::new(),
            zero: false,
        }
    }

    fn binom(&mut self, a: i64, b: i64, phase: i64, e: Vec<i64>, div: bool, rows: Option<i64>) {
        if let Some(r) = rows {
            if a <= r {
                self.binoms.push(Binom {
                    a,
                    b,
                    phase,
                    e,
                    div,
                });
            }
        }
    }

    /// Multiplies the coefficient factor by `(1 − ζ_L^phase·∏(1+η_g)^{e_g})^pow`.
    fn coeff_binom(&mut self, ctx: &Ctx, phase: i64, e: &[i64], pow: i32) -> Result<()> {
        let l = ctx.l;
        let mut p = CoeffElt::from_ints(&ctx.alg.pow1p(e), l)
            .scale(&CycloNum::root_of_unity(l, phase, l)?)?;
        for x in p.c.iter_mut() {
            *x = x.neg();
        }
        p.c[0] = p.c[0].add(&CycloNum::one(l))?;
        let f = if pow > 0 { p } else { p.inv(&ctx.alg)? };
        self.coeff = self.coeff.mul(&f, &ctx.alg)?;
        Ok(())
    }

    fn theta(&mut self, ctx: &Ctx, arg: &Arg, pow: i32, rows: Option<i64>) -> Result<()> {
        let l = ctx.l as i64;
        let p = pow as i64;
        let div = pow < 0;
        let r = units(&arg.r, ctx.l, "z-coefficient")?;
        let r2 = half_units(&arg.r, ctx.l, "z-coefficient")?;
        let jb = arg
            .beta
            .floor()
            .to_integer()
            .to_i64()
            .ok_or(Error::Overflow("tau shift"))?;
        let b0 = arg.beta.clone() - BigRational::from_integer(jb.into());
        let ja = arg
            .alpha
            .floor()
            .to_integer()
            .to_i64()
            .ok_or(Error::Overflow("shift"))?;
        let a0 = arg.alpha.clone() - BigRational::from_integer(ja.into());
        let (beta, beta2) = (
            units(&b0, ctx.l, "tau shift")?,
            half_units(&b0, ctx.l, "tau shift")?,
        );
        let (alpha, alpha2) = (
            units(&a0, ctx.l, "shift")?,
            half_units(&a0, ctx.l, "shift")?,
        );
        let half = l / 2;
        // θ(w0 + ja + jb·τ) = (−1)^{ja+jb}·q^{−jb²/2}·e^{−2πi·jb·w0}·θ(w0)
        if (jb * jb * l) % 2 != 0 {
            return Err(Error::OrderMismatch(format!(
                "lattice 1/{l} cannot hold q^(1/2)"
            )));
        }
        self.phase += p * (half * (ja + jb) - jb * alpha);
        self.q += p * (-(jb * jb * l) / 2 - jb * beta);
        self.y += p * (-jb * r);
        for (g, &kg) in arg.k.iter().enumerate() {
            self.epow[g] += p * (-2 * jb * kg);
        }
        // θ(w0) = q^{1/8}·(−ζ^{−α0/2}·y^{−r/2}·q^{−β0/2}·e^{−K/2})·(1 − u0)·∏_{j≥1}(1 − q^j u0)(1 − q^j/u0)(1 − q^j)
        self.e8 += p;
        self.phase += p * (half - alpha2);
        self.y -= p * r2;
        self.q -= p * beta2;
        for (g, &kg) in arg.k.iter().enumerate() {
            self.epow[g] -= p * kg;
        }
        let e: Vec<i64> = arg.k.iter().map(|&kg| 2 * kg).collect();
        let e_neg: Vec<i64> = e.iter().map(|v| -v).collect();
        if beta > 0 {
            self.binom(beta, r, alpha, e.clone(), div, rows);
        } else if r != 0 {
            if div && r < 0 {
                // 1 − u0 = −u0·(1 − 1/u0), expanded in the positive y direction
                self.phase += p * (half + alpha);
                self.y += p * r;
                for (g, &kg) in arg.k.iter().enumerate() {
                    self.epow[g] += p * 2 * kg;
                }
                self.binom(0, -r, -alpha, e_neg.clone(), div, rows);
            } else {
                self.binom(0, r, alpha, e.clone(), div, rows);
            }
        } else if alpha == 0 && arg.k.iter().all(|&k| k == 0) {
            if div {
                return Err(Error::SingularLeadingTerm(
                    "theta vanishes identically at this argument".into(),
                ));
            }
            self.zero = true;
        } else if alpha == 0 && div {
            return Err(Error::SingularLeadingTerm(
                "theta of a nilpotent class in a denominator needs the paired x-factor".into(),
            ));
        } else {
            self.coeff_binom(ctx, alpha, &e, pow)?;
        }
        if let Some(rows) = rows {
            let mut j = 1;
            while j * l - beta <= rows {
                self.binom(j * l + beta, r, alpha, e.clone(), div, Some(rows));
                self.binom(j * l - beta, -r, -alpha, e_neg.clone(), div, Some(rows));
                self.binom(j * l, 0, 0, vec![0; e.len()], div, Some(rows));
                j += 1;
            }
        }
        Ok(())
    }

    fn eta_cube(&mut self, ctx: &Ctx, pow: i32, rows: Option<i64>) {
        self.e8 += pow as i64;
        if let Some(rows) = rows {
            let l = ctx.l as i64;
            let ng = ctx.alg.dims().len();
            let mut j = 1;
            while j * l <= rows {
                for _ in 0..3 {
                    self.binom(j * l, 0, 0, vec![0; ng], pow < 0, Some(rows));
                }
                j += 1;
            }
        }
    }

    fn x_over_theta(&mut self, ctx: &Ctx, g: usize, k: i64, rows: Option<i64>) -> Result<()> {
        // kx·η³/θ(kX) = e^{kx/2}·kx/(e^{kx} − 1)·∏(1 − q^j)²/((1 − q^j e^{kx})(1 − q^j e^{−kx}))
        if k == 0 {
            return Err(Error::Invalid("Chern root with zero nilpotent part".into()));
        }
        self.epow[g] += k;
        self.coeff = self
            .coeff
            .mul(&todd_inverse(&ctx.alg, g, k, ctx.l), &ctx.alg)?;
        let Some(rows) = rows else { return Ok(()) };
        let l = ctx.l as i64;
        let ng = ctx.alg.dims().len();
        let mut e = vec![0; ng];
        e[g] = 2 * k;
        let mut j = 1;
        while j * l <= rows {
            self.binom(j * l, 0, 0, vec![0; ng], false, Some(rows));
            self.binom(j * l, 0, 0, vec![0; ng], false, Some(rows));
            self.binom(j * l, 0, 0, e.clone(), true, Some(rows));
            self.binom(
                j * l,
                0,
                0,
                e.iter().map(|v| -v).collect(),
                true,
                Some(rows),
            );
            j += 1;
        }
        Ok(())
    }

    fn lower(ctx: &Ctx, plan: &[Factor], rows: Option<i64>) -> Result<Self> {
        let mut lw = Lowered::new(ctx);
        for f in plan {
            match f {
                Factor::Theta(arg, pow) => lw.theta(ctx, arg, *pow, rows)?,
                Factor::EtaCube(pow) => lw.eta_cube(ctx, *pow, rows),
                Factor::XOverTheta(g, k) => lw.x_over_theta(ctx, *g, *k, rows)?,
                Factor::YPow(b) => lw.y += units(b, ctx.l, "y exponent")?,
                Factor::Scalar(c) => lw.scalar = lw.scalar.mul(c)?,
            }
        }
        Ok(lw)
    }

    /// Total q-exponent of the prefactor in lattice units.
    fn q_total(&self, l: u32) -> Result<i64> {
        let l = l as i64;
        if (self.e8 * l) % 8 != 0 {
            return Err(Error::OrderMismatch(format!(
                "q^({}/8) needs a denominator divisible by 8, have {l}",
                self.e8
            )));
        }
        Ok(self.q + self.e8 * l / 8)
    }
}

/// One row of the body: cells for y-exponents `lo, lo+1, …`, each `stride` integers.
#[derive(Clone, Default)]
struct Row {
    lo: i64,
    data: Vec<i128>,
}

struct Body<'a> {
    l: usize,
    alg: &'a NilAlg,
    stride: usize,
    rows: Vec<Row>,
    overflow: bool,
}

/// Precomputed action of `u = ζ^phase·∏(1+η_g)^{e_g}` on a single cell.
struct UOp {
    phase: usize,
    /// `(src index, dst index, coefficient)` of the η-multiplication, if not the identity.
    poly: Option<Vec<(usize, usize, i128)>>,
}

impl<'a> Body<'a> {
    fn new(rows: usize, l: u32, alg: &'a NilAlg) -> Self {
        let stride = l as usize * alg.size();
        let mut v = vec![Row::default(); rows];
        v[0] = Row {
            lo: 0,
            data: {
                let mut d = vec![0; stride];
                d[0] = 1;
                d
            },
        };
        Body {
            l: l as usize,
            alg,
            stride,
            rows: v,
            overflow: false,
        }
    }

    fn uop(&self, phase: i64, e: &[i64]) -> UOp {
        let poly = if e.iter().all(|&v| v == 0) {
            None
        } else {
            let p = self.alg.pow1p(e);
            Some(
                self.alg
                    .triples
                    .iter()
                    .filter(|&&(_, j, _)| p[j] != 0)
                    .map(|&(i, j, k)| (i, k, p[j]))
                    .collect(),
            )
        };
        UOp {
            phase: phase.rem_euclid(self.l as i64) as usize,
            poly,
        }
    }

    /// `dst += sign·u·src` on one cell.
    fn cell_mac(l: usize, u: &UOp, sign: i128, dst: &mut [i128], src: &[i128], ovf: &mut bool) {
        let add = |d: &mut i128, v: i128, ovf: &mut bool| match d.checked_add(v) {
            Some(s) => *d = s,
            None => *ovf = true,
        };
        match &u.poly {
            None => {
                for (t, &s) in src.iter().enumerate() {
                    if s != 0 {
                        let k = t % l;
                        let base = t - k;
                        let v = s.checked_mul(sign).unwrap_or_else(|| {
                            *ovf = true;
                            0
                        });
                        add(&mut dst[base + (k + u.phase) % l], v, ovf);
                    }
                }
            }
            Some(poly) => {
                for &(i, k, c) in poly {
                    let Some(c) = c.checked_mul(sign) else {
                        *ovf = true;
                        continue;
                    };
                    for t in 0..l {
                        let s = src[i * l + t];
                        if s != 0 {
                            match s.checked_mul(c) {
                                Some(v) => add(&mut dst[k * l + (t + u.phase) % l], v, ovf),
                                None => *ovf = true,
                            }
                        }
                    }
                }
            }
        }
    }

    fn ensure(&mut self, i: usize, lo: i64, hi: i64) {
        let stride = self.stride;
        let row = &mut self.rows[i];
        if row.data.is_empty() {
            row.lo = lo;
            row.data = vec![0; ((hi - lo + 1) as usize) * stride];
            return;
        }
        let top = row.lo + (row.data.len() / stride) as i64 - 1;
        if lo < row.lo {
            let pad = ((row.lo - lo) as usize) * stride;
            let mut d = vec![0; pad];
            d.extend_from_slice(&row.data);
            row.data = d;
            row.lo = lo;
        }
        if hi > top {
            row.data
                .resize(row.data.len() + ((hi - top) as usize) * stride, 0);
        }
    }

    fn top(&self, i: usize) -> Option<i64> {
        let r = &self.rows[i];
        (!r.data.is_empty()).then(|| r.lo + (r.data.len() / self.stride) as i64 - 1)
    }

    /// `rows[i] += sign·u·y^b·rows[src]` for `src ≠ i`.
    fn row_mac(&mut self, i: usize, src: usize, b: i64, u: &UOp, sign: i128) {
        let Some(stop) = self.top(src) else { return };
        let slo = self.rows[src].lo;
        self.ensure(i, slo + b, stop + b);
        let stride = self.stride;
        let l = self.l;
        let (dst_row, src_row) = if i > src {
            let (a, c) = self.rows.split_at_mut(i);
            (&mut c[0], &a[src])
        } else {
            let (a, c) = self.rows.split_at_mut(src);
            (&mut a[i], &c[0])
        };
        let off = ((slo + b - dst_row.lo) as usize) * stride;
        let mut ovf = false;
        for (n, cell) in src_row.data.chunks(stride).enumerate() {
            if cell.iter().all(|&v| v == 0) {
                continue;
            }
            let d = off + n * stride;
            Self::cell_mac(l, u, sign, &mut dst_row.data[d..d + stride], cell, &mut ovf);
        }
        self.overflow |= ovf;
    }

    fn apply(&mut self, bn: &Binom, ycap: Option<i64>) {
        let u = self.uop(bn.phase, &bn.e);
        let nrows = self.rows.len() as i64;
        let (a, b) = (bn.a, bn.b);
        if a > 0 {
            if bn.div {
                for i in a..nrows {
                    self.row_mac(i as usize, (i - a) as usize, b, &u, 1);
                }
            } else {
                for i in (a..nrows).rev() {
                    self.row_mac(i as usize, (i - a) as usize, b, &u, -1);
                }
            }
            return;
        }
        for i in 0..self.rows.len() {
            let Some(top) = self.top(i) else { continue };
            let lo = self.rows[i].lo;
            let stride = self.stride;
            let mut ovf = false;
            if bn.div {
                // T[e] = S[e] + u·T[e − b], b > 0, filled up to the cap
                let cap = ycap.expect("tail division needs a y cap");
                if lo > cap {
                    continue;
                }
                self.ensure(i, lo, cap.max(top));
                let data = &mut self.rows[i].data;
                let n = (cap - lo + 1) as usize;
                for e in b as usize..n {
                    let (head, tail) = data.split_at_mut(e * stride);
                    let src = &head[(e - b as usize) * stride..(e - b as usize + 1) * stride];
                    if src.iter().all(|&v| v == 0) {
                        continue;
                    }
                    Self::cell_mac(self.l, &u, 1, &mut tail[..stride], src, &mut ovf);
                }
            } else {
                let src = self.rows[i].data.clone();
                self.ensure(i, lo.min(lo + b), top.max(top + b));
                let row = &mut self.rows[i];
                let off = ((lo + b - row.lo) as usize) * stride;
                for (n, cell) in src.chunks(stride).enumerate() {
                    if cell.iter().all(|&v| v == 0) {
                        continue;
                    }
                    let d = off + n * stride;
                    Self::cell_mac(self.l, &u, -1, &mut row.data[d..d + stride], cell, &mut ovf);
                }
            }
            self.overflow |= ovf;
        }
    }

    fn cap(&mut self, ycap: i64) {
        for i in 0..self.rows.len() {
            let Some(top) = self.top(i) else { continue };
            if top > ycap {
                let lo = self.rows[i].lo;
                let keep = if ycap < lo {
                    0
                } else {
                    (ycap - lo + 1) as usize * self.stride
                };
                self.rows[i].data.truncate(keep);
            }
        }
    }
}

/// Reduces a group-ring vector `Σ g_k ζ^k` to the power basis of `Q(ζ_L)`.
fn reduce_group_ring(l: u32, g: &[i128]) -> Vec<i128> {
    let f = field(l);
    let mut out = vec![0i128; f.degree()];
    for (k, &v) in g.iter().enumerate() {
        if v == 0 {
            continue;
        }
        for (o, &p) in out.iter_mut().zip(f.power(k as i64)) {
            *o += v * p as i128;
        }
    }
    out
}

/// `[x^t] (e^{x/2} − 1)^j`.
fn eta_power_coeff(j: usize, t: usize) -> BigRational {
    // (e^{x/2} − 1)^j = Σ_i C(j,i)(−1)^{j−i} e^{ix/2}
    let mut acc = BigRational::zero();
    let mut binom = BigInt::one();
    let mut fact = BigInt::one();
    for s in 1..=t {
        fact *= BigInt::from(s);
    }
    for i in 0..=j {
        if i > 0 {
            binom = binom * BigInt::from((j - i + 1) as i64) / BigInt::from(i as i64);
        }
        let sign = if (j - i).is_multiple_of(2) { 1 } else { -1 };
        let val = BigRational::new(
            BigInt::from(i as i64).pow(t as u32),
            BigInt::from(2).pow(t as u32) * &fact,
        );
        acc += val * BigRational::from_integer(&binom * sign);
    }
    acc
}

/// Linear functional `η^{idx} ↦ [∏ x_g^{t_g}] η^{idx}` for a target monomial `t`.
fn extraction(alg: &NilAlg, target: &[usize]) -> Vec<BigRational> {
    (0..alg.size())
        .map(|idx| {
            alg.multi(idx)
                .iter()
                .zip(target)
                .map(|(&j, &t)| {
                    if j > t {
                        BigRational::zero()
                    } else {
                        eta_power_coeff(j, t)
                    }
                })
                .fold(BigRational::one(), |a, b| a * b)
        })
        .collect()
}

/// Exact coefficients of one x-monomial of an expanded product, keyed by lattice units.
pub(crate) type Terms = BTreeMap<(i64, i64), CycloNum>;

/// Expands `plan` and extracts the coefficient of each x-monomial in `targets`.
pub(crate) fn expand(ctx: &Ctx, plan: &[Factor], targets: &[Vec<usize>]) -> Result<Vec<Terms>> {
    let l = ctx.l;
    if !l.is_multiple_of(2) {
        return Err(Error::OrderMismatch(format!(
            "lattice denominator {l} must be even"
        )));
    }
    let probe = Lowered::lower(ctx, plan, None)?;
    let empty = vec![Terms::new(); targets.len()];
    if probe.zero {
        return Ok(empty);
    }
    let rows = ctx.qmax - probe.q_total(l)?;
    if rows < 0 {
        return Ok(empty);
    }
    let lw = Lowered::lower(ctx, plan, Some(rows))?;
    let qpre = lw.q_total(l)?;
    let ycap = ctx.ymax - lw.y;
    let mut body = Body::new(rows as usize + 1, l, &ctx.alg);
    let (tails, exact): (Vec<&Binom>, Vec<&Binom>) =
        lw.binoms.iter().partition(|b| b.a == 0 && b.div);
    for bn in exact {
        body.apply(bn, None);
    }
    body.cap(ycap);
    for bn in tails {
        body.apply(bn, Some(ycap));
    }
    if body.overflow {
        return Err(Error::Overflow("i128 series coefficients"));
    }
    // coefficient factor with the remaining (1+η)^epow, then extraction weights
    let mut coeff = lw.coeff.clone();
    coeff = coeff.mul(&CoeffElt::from_ints(&ctx.alg.pow1p(&lw.epow), l), &ctx.alg)?;
    coeff = coeff.scale(&lw.scalar)?;
    coeff = coeff.scale(&CycloNum::root_of_unity(l, lw.phase, l)?)?;
    let alg = &ctx.alg;
    let mut out = Vec::with_capacity(targets.len());
    for t in targets {
        let ext = extraction(alg, t);
        // w_i = Σ_j coeff_j·ext(i + j)
        let mut w = vec![CycloNum::zero(l); alg.size()];
        for &(i, j, k) in &alg.triples {
            if ext[k].is_zero() || coeff.c[j].is_zero() {
                continue;
            }
            w[i] = w[i].add(&coeff.c[j].scale(&ext[k]))?;
        }
        out.push(collect_terms(ctx, &body, &w, qpre, lw.y)?);
    }
    Ok(out)
}

fn collect_terms(ctx: &Ctx, body: &Body, w: &[CycloNum], qpre: i64, ypre: i64) -> Result<Terms> {
    let l = ctx.l;
    let f = field(l);
    let d = f.degree();
    // common denominator for the weights
    let mut den = BigInt::one();
    for c in w {
        for r in c.coeffs() {
            den = den.lcm(r.denom());
        }
    }
    let wint: Vec<Option<Vec<i128>>> = w
        .iter()
        .map(|c| {
            if c.is_zero() {
                return Ok(None);
            }
            c.coeffs()
                .iter()
                .map(|r| {
                    (r.numer() * (&den / r.denom()))
                        .to_i128()
                        .ok_or(Error::Overflow("weights"))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some)
        })
        .collect::<Result<_>>()?;
    let den_r = BigRational::from_integer(den);
    let lsz = l as usize;
    let mut terms = Terms::new();
    for (i, row) in body.rows.iter().enumerate() {
        let q = i as i64 + qpre;
        if q > ctx.qmax {
            break;
        }
        for (n, cell) in row.data.chunks(body.stride).enumerate() {
            let y = row.lo + n as i64 + ypre;
            if y.abs() > ctx.ymax || cell.iter().all(|&v| v == 0) {
                continue;
            }
            let mut acc = vec![0i128; 2 * d];
            let mut ovf = false;
            for (idx, wi) in wint.iter().enumerate() {
                let Some(wi) = wi else { continue };
                let g = &cell[idx * lsz..(idx + 1) * lsz];
                if g.iter().all(|&v| v == 0) {
                    continue;
                }
                let red = reduce_group_ring(l, g);
                for (a, &x) in red.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (b, &y) in wi.iter().enumerate() {
                        match x.checked_mul(y).and_then(|v| acc[a + b].checked_add(v)) {
                            Some(s) => acc[a + b] = s,
                            None => ovf = true,
                        }
                    }
                }
            }
            if ovf {
                return Err(Error::Overflow("i128 extraction"));
            }
            // reduce modulo Φ_L
            let m = f.modulus();
            for k in (d..2 * d).rev() {
                let c = acc[k];
                if c != 0 {
                    for (j, &mj) in m[..d].iter().enumerate() {
                        acc[k - d + j] -= c * mj as i128;
                    }
                    acc[k] = 0;
                }
            }
            if acc[..d].iter().all(|&v| v == 0) {
                continue;
            }
            let coeffs = acc[..d]
                .iter()
                .map(|&v| BigRational::from_integer(v.into()) / &den_r)
                .collect();
            terms.insert((q, y), CycloNum::from_coeffs(l, coeffs)?);
        }
    }
    Ok(terms)
}

/// Adds `b` into `a`, dropping cancelled terms.
pub(crate) fn add_terms(a: &mut Terms, b: Terms) -> Result<()> {
    for (k, v) in b {
        match a.get_mut(&k) {
            Some(x) => {
                *x = x.add(&v)?;
                if x.is_zero() {
                    a.remove(&k);
                }
            }
            None => {
                a.insert(k, v);
            }
        }
    }
    Ok(())
}


#[cfg(test)]
mod scaled_tests {
    use super::*;

    #[test]
    fn scaled_root_closed_form() {
        // kx/(e^{kx/2} − e^{−kx/2}) = 1 − k²x²/24 + 7k⁴x⁴/5760
        let c = Ctx {
            l: 8,
            alg: NilAlg::new(&[5]),
            qmax: 0,
            ymax: 8,
        };
        for k in [-2i64, 3] {
            let t = expand(
                &c,
                &[Factor::XOverTheta(0, k)],
                &[vec![0], vec![1], vec![2], vec![3], vec![4]],
            )
            .unwrap();
            let at = |i: usize| t[i].get(&(0, 0)).map(|v| v.as_rational().unwrap().clone());
            assert_eq!(at(0), Some(BigRational::one()));
            assert_eq!(at(1), None);
            assert_eq!(at(2), Some(BigRational::new((-k * k).into(), 24.into())));
            assert_eq!(at(3), None);
            assert_eq!(
                at(4),
                Some(BigRational::new((7 * k.pow(4)).into(), 5760.into()))
            );
        }
    }
}
