//! The odd Jacobi theta function
//! `θ(z, τ) = q^{1/8}(y^{1/2} − y^{−1/2}) ∏_{k≥1} (1 − q^k)(1 − q^k y)(1 − q^k/y)`
//! as exact Puiseux series at shifted arguments, plus a numerical evaluator.
//!
//! Cohomology classes enter arguments pre-divided by `2πi`, so a nilpotent
//! summand `x` means `θ(w + x/2πi)` and no transcendental constants appear.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::cohring::{frac, CohomRing, CohomSeries};
use crate::cyclo::CycloNum;
use crate::engine::{self, Arg, Ctx, Factor, NilAlg};
use crate::error::{Error, Result};
use crate::numeric::{bits_for_digits, Cplx};
use crate::pseries::{to_units, PuiseuxSeries};

/// Integer combination `Σ k_g·x_g` of the generators of a cohomology ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nilp {
    pub ring: CohomRing,
    pub coeffs: Vec<i64>,
}

impl Nilp {
    pub fn new(ring: CohomRing, coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() != ring.gens().len() {
            return Err(Error::RingMismatch(format!(
                "{} coefficients for {} generators",
                coeffs.len(),
                ring.gens().len()
            )));
        }
        Ok(Nilp { ring, coeffs })
    }

    /// The generator `x_g` itself.
    pub fn generator(ring: CohomRing, g: usize) -> Result<Self> {
        let mut coeffs = vec![0; ring.gens().len()];
        *coeffs
            .get_mut(g)
            .ok_or_else(|| Error::RingMismatch(format!("no generator {g}")))? = 1;
        Ok(Nilp { ring, coeffs })
    }
}

/// The argument `zcoef·z + ashift + tshift·τ + nilp/(2πi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaArg {
    pub zcoef: BigRational,
    /// Always in `[0, 1)`.
    pub ashift: BigRational,
    pub tshift: BigRational,
    pub nilp: Option<Nilp>,
    /// `θ(w + m) = (−1)^m θ(w)`; the sign dropped when `ashift` was reduced.
    sign_flip: bool,
}

impl ThetaArg {
    pub fn new(zcoef: BigRational, ashift: BigRational, tshift: BigRational) -> Self {
        let m = ashift.floor().to_integer();
        let odd = m.is_odd();
        ThetaArg {
            zcoef,
            ashift: frac(&ashift),
            tshift,
            nilp: None,
            sign_flip: odd,
        }
    }

    /// `r·z`.
    pub fn z(r: BigRational) -> Self {
        Self::new(r, BigRational::zero(), BigRational::zero())
    }

    pub fn with_nilp(mut self, nilp: Nilp) -> Self {
        self.nilp = Some(nilp);
        self
    }

    fn ring(&self) -> CohomRing {
        self.nilp
            .as_ref()
            .map(|n| n.ring.clone())
            .unwrap_or_else(CohomRing::point)
    }

    fn engine_arg(&self, ng: usize) -> Arg {
        Arg {
            r: self.zcoef.clone(),
            alpha: self.ashift.clone(),
            beta: self.tshift.clone(),
            k: self
                .nilp
                .as_ref()
                .map(|n| n.coeffs.clone())
                .unwrap_or_else(|| vec![0; ng]),
        }
    }

    fn sign(&self, l: u32) -> Factor {
        Factor::Scalar(CycloNum::from_int(l, if self.sign_flip { -1 } else { 1 }))
    }

    /// The scalar part `zcoef·z + ashift + tshift·τ` at a numerical point.
    pub fn point(&self, z: &Cplx, tau: &Cplx) -> Cplx {
        let p = z.prec();
        let w = z
            .mul_rational(&self.zcoef)
            .add(&Cplx::from_rational(&self.ashift, p))
            .add(&tau.mul_rational(&self.tshift));
        if self.sign_flip {
            // carried as θ(w + 1) = −θ(w)
            w.add(&Cplx::one(p))
        } else {
            w
        }
    }
}

fn check_rings(args: &[&ThetaArg]) -> Result<CohomRing> {
    let ring = args[0].ring();
    for a in &args[1..] {
        let r = a.ring();
        // a scalar argument is compatible with any ring
        if a.nilp.is_some() && r != ring && args[0].nilp.is_some() {
            return Err(Error::RingMismatch(format!("{ring:?} vs {r:?}")));
        }
    }
    Ok(args
        .iter()
        .find(|a| a.nilp.is_some())
        .map(|a| a.ring())
        .unwrap_or(ring))
}

/// Expands a product of theta factors and extracts every monomial of `ring`.
pub(crate) fn run_plan(
    plan: &[Factor],
    ring: &CohomRing,
    denom: u32,
    qmax: &BigRational,
    ywindow: &BigRational,
) -> Result<CohomSeries> {
    let template = PuiseuxSeries::zero(denom, qmax.clone(), ywindow.clone());
    let l = BigRational::from_integer(denom.into());
    let ctx = Ctx {
        l: denom,
        alg: NilAlg::new(&ring.dims()),
        qmax: (qmax * &l)
            .floor()
            .to_integer()
            .to_i64()
            .ok_or(Error::Overflow("qmax"))?,
        ymax: (ywindow * &l)
            .floor()
            .to_integer()
            .to_i64()
            .ok_or(Error::Overflow("ywindow"))?,
    };
    let monos = ring.monomials();
    let terms = engine::expand(&ctx, plan, &monos)?;
    let mut out = CohomSeries::zero(ring.clone(), &template);
    for (m, t) in monos.into_iter().zip(terms) {
        out.set(
            m,
            PuiseuxSeries::from_units(denom, qmax.clone(), ywindow.clone(), t),
        )?;
    }
    Ok(out)
}

/// `θ(arg)` as a class; a scalar argument gives a class in the point ring.
///
/// The `q^{1/8}` prefactor needs `8 | denom`.
pub fn theta(
    arg: &ThetaArg,
    denom: u32,
    qmax: &BigRational,
    ywindow: &BigRational,
) -> Result<CohomSeries> {
    let ring = arg.ring();
    let ng = ring.gens().len();
    run_plan(
        &[Factor::Theta(arg.engine_arg(ng), 1), arg.sign(denom)],
        &ring,
        denom,
        qmax,
        ywindow,
    )
}

/// `θ(num)/θ(den)`; the `q^{1/8}` prefactors cancel.
pub fn theta_ratio(
    num: &ThetaArg,
    den: &ThetaArg,
    denom: u32,
    qmax: &BigRational,
    ywindow: &BigRational,
) -> Result<CohomSeries> {
    let ring = check_rings(&[num, den])?;
    let ng = ring.gens().len();
    let plan = [
        Factor::Theta(num.engine_arg(ng), 1),
        Factor::Theta(den.engine_arg(ng), -1),
        num.sign(denom),
        den.sign(denom),
    ];
    run_plan(&plan, &ring, denom, qmax, ywindow)
}

/// `x_g·θ(x_g/2πi − z)/θ(x_g/2πi)`, the Chern-root factor of an untwisted
/// coordinate, computed without dividing by the vanishing `θ(0)`.
///
/// With `x` pre-divided by `2πi` the value at `x = 0` is `θ(−z)/(θ'(0)/2πi)`,
/// whose `q⁰` slice is `y^{−1/2} − y^{1/2}`.
pub fn unit_ratio(
    ring: &CohomRing,
    g: usize,
    denom: u32,
    qmax: &BigRational,
    ywindow: &BigRational,
) -> Result<CohomSeries> {
    let ng = ring.gens().len();
    if g >= ng {
        return Err(Error::RingMismatch(format!("no generator {g}")));
    }
    let mut k = vec![0; ng];
    k[g] = 1;
    let minus_z = Arg {
        r: BigRational::from_integer((-1).into()),
        alpha: BigRational::zero(),
        beta: BigRational::zero(),
        k,
    };
    run_plan(
        &[
            Factor::XOverTheta(g, 1),
            Factor::EtaCube(-1),
            Factor::Theta(minus_z, 1),
        ],
        ring,
        denom,
        qmax,
        ywindow,
    )
}

/// `Ψ(a, b, q) = θ(X + (q−1)z + qa − qbτ)/θ(X + qz + qa − qbτ)·e^{2πi·qb·z}`.
///
/// `X = nilp/2πi`; `a`, `b` are the integer lifts of the group element pair.
pub fn psi(
    a: i64,
    b: i64,
    qq: &BigRational,
    nilp: Option<Nilp>,
    denom: u32,
    qmax: &BigRational,
    ywindow: &BigRational,
) -> Result<CohomSeries> {
    let one = BigRational::from_integer(1.into());
    let (qa, qb) = (
        qq * BigRational::from_integer(a.into()),
        qq * BigRational::from_integer(b.into()),
    );
    let mut num = ThetaArg::new(qq - &one, qa.clone(), -qb.clone());
    let mut den = ThetaArg::new(qq.clone(), qa, -qb.clone());
    if let Some(n) = nilp {
        num = num.with_nilp(n.clone());
        den = den.with_nilp(n);
    }
    let ring = num.ring();
    let ng = ring.gens().len();
    let plan = [
        Factor::Theta(num.engine_arg(ng), 1),
        Factor::Theta(den.engine_arg(ng), -1),
        num.sign(denom),
        den.sign(denom),
        Factor::YPow(qb),
    ];
    run_plan(&plan, &ring, denom, qmax, ywindow)
}

/// `Ψ(a, b, q)` at a numerical point, scalar part only.
pub fn psi_numeric(
    a: i64,
    b: i64,
    qq: &BigRational,
    z: &Cplx,
    tau: &Cplx,
    digits: u32,
) -> Result<Cplx> {
    let one = BigRational::from_integer(1.into());
    let (qa, qb) = (
        qq * BigRational::from_integer(a.into()),
        qq * BigRational::from_integer(b.into()),
    );
    let num = ThetaArg::new(qq - &one, qa.clone(), -qb.clone());
    let den = ThetaArg::new(qq.clone(), qa, -qb.clone());
    let ratio =
        theta_numeric_arg(&num, z, tau, digits)?.div(&theta_numeric_arg(&den, z, tau, digits)?);
    Ok(ratio.mul(&Cplx::exp_2pi_i(&z.mul_rational(&qb))))
}

/// `Σ_n (−1)^n q^{(n+1/2)²/2} Y^{n+1/2}` with `Y = e^{2πi·ashift} y^{zcoef} q^{tshift}`.
///
/// Independent of the product expansion; scalar arguments only.
pub fn theta_alternating(
    arg: &ThetaArg,
    denom: u32,
    qmax: &BigRational,
    ywindow: &BigRational,
) -> Result<PuiseuxSeries> {
    if arg.nilp.is_some() {
        return Err(Error::Invalid(
            "the alternating-sum form takes scalar arguments".into(),
        ));
    }
    let t = arg.tshift.to_f64().unwrap_or(0.0);
    let qm = qmax.to_f64().unwrap_or(0.0).max(0.0);
    // (n + 1/2 + t)² ≤ 2·qmax + t² bounds the surviving n
    let reach = (2.0 * qm + t * t).sqrt() + t.abs() + 2.0;
    let reach = reach.ceil() as i64;
    let mut terms = std::collections::BTreeMap::<(i64, i64), CycloNum>::new();
    let half = BigRational::new(1.into(), 2.into());
    for n in -reach..=reach {
        let e = BigRational::from_integer(n.into()) + &half;
        let qe = &e * &e / BigRational::from_integer(2.into()) + &arg.tshift * &e;
        if &qe > qmax {
            continue;
        }
        let ye = &arg.zcoef * &e;
        let mut c = CycloNum::root_of_unity(denom, to_units(&(&arg.ashift * &e), denom)?, denom)?;
        if (n % 2 != 0) != arg.sign_flip {
            c = c.neg();
        }
        // with zcoef = 0 the terms for ±e share a key
        match terms.entry((to_units(&qe, denom)?, to_units(&ye, denom)?)) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&c)?;
                o.insert(sum);
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }
    Ok(PuiseuxSeries::from_units(
        denom,
        qmax.clone(),
        ywindow.clone(),
        terms,
    ))
}

/// `θ(z, τ)` from the product formula, with error below `10^{1−digits}`.
pub fn theta_numeric(z: &Cplx, tau: &Cplx, digits: u32) -> Result<Cplx> {
    let im_tau = tau.im_f64();
    if im_tau.is_nan() || im_tau <= 0.0 {
        return Err(Error::Invalid(format!("Im τ = {im_tau} must be positive")));
    }
    let p = bits_for_digits(digits + 10);
    let (z, tau) = (z.with_prec(p), tau.with_prec(p));
    let q = Cplx::exp_2pi_i(&tau);
    let y = Cplx::exp_2pi_i(&z);
    let yinv = y.recip();
    let half = BigRational::new(1.into(), 2.into());
    let pref = Cplx::exp_2pi_i(&tau.mul_rational(&BigRational::new(1.into(), 8.into()))).mul(
        &Cplx::exp_2pi_i(&z.mul_rational(&half)).sub(&Cplx::exp_2pi_i(&z.mul_rational(&-half))),
    );
    // tail: |∏_{k>K}(1+δ_k) − 1| ≤ 2·Σ|δ_k| once that sum is below 1
    let lq = -2.0 * std::f64::consts::PI * im_tau / std::f64::consts::LN_10;
    let ly = (1.0 + y.abs_f64() + yinv.abs_f64()).log10();
    let lgeo = -(1.0 - 10f64.powf(lq)).log10();
    let total = 10f64.powf(lq + ly + lgeo);
    let size = pref.log10_abs().max(0.0) + total / std::f64::consts::LN_10;
    let target = -(digits as f64) - 2.0 - size;
    let mut kmax = 1i64;
    while (kmax + 1) as f64 * lq + ly + lgeo + 2f64.log10() > target.min(-1.0) {
        kmax += 1;
    }
    let one = Cplx::one(p);
    let mut acc = pref;
    let mut qk = one.clone();
    for _ in 1..=kmax {
        qk = qk.mul(&q);
        let f = one
            .sub(&qk)
            .mul(&one.sub(&qk.mul(&y)))
            .mul(&one.sub(&qk.mul(&yinv)));
        acc = acc.mul(&f);
    }
    Ok(acc)
}

/// `θ(arg)` at a numerical point, scalar part only.
pub fn theta_numeric_arg(arg: &ThetaArg, z: &Cplx, tau: &Cplx, digits: u32) -> Result<Cplx> {
    theta_numeric(&arg.point(z, tau), tau, digits)
}

/// Whether `θ(arg)` vanishes identically at the scalar level (zero coefficient of every `y`).
pub fn is_zero_point(arg: &ThetaArg) -> bool {
    arg.zcoef.is_zero() && arg.ashift.is_zero() && arg.tshift.is_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohring::frac;
    use crate::pseries::{int, rat, series_equal};

    fn point(s: &CohomSeries) -> PuiseuxSeries {
        s.coeff(&[0]).clone()
    }

    #[test]
    fn leading_terms() {
        let t = point(&theta(&ThetaArg::z(int(1)), 8, &int(2), &int(3)).unwrap());
        let c = |q, y| t.coeff(&q, &y).as_rational().cloned().unwrap_or_default();
        assert_eq!(c(rat(1, 8), rat(1, 2)), int(1));
        assert_eq!(c(rat(1, 8), rat(-1, 2)), int(-1));
        assert_eq!(c(rat(9, 8), rat(3, 2)), int(-1));
        assert_eq!(c(rat(9, 8), rat(-3, 2)), int(1));
        assert_eq!(t.num_terms(), 4);
    }

    #[test]
    fn product_matches_alternating_sum() {
        let cases = [
            ThetaArg::z(int(1)),
            ThetaArg::new(rat(-1, 2), rat(1, 4), rat(-1, 2)),
            ThetaArg::new(rat(1, 3), rat(5, 6), rat(-2, 3)),
            ThetaArg::new(int(2), rat(7, 4), rat(1, 4)),
            ThetaArg::new(rat(-1, 1), rat(1, 2), int(0)),
            // constant argument: the ±e terms of the sum collide
            ThetaArg::new(int(0), rat(1, 8), int(0)),
        ];
        for a in cases {
            let (qm, w) = (int(6), int(4));
            let prod = point(&theta(&a, 48, &qm, &w).unwrap());
            let alt = theta_alternating(&a, 48, &qm, &w).unwrap();
            let cmp = series_equal(&prod, &alt).unwrap();
            assert!(cmp.equal, "{a:?}: {:?}", cmp.mismatch);
            assert!(cmp.compared_terms >= 3, "{a:?}");
        }
    }

    #[test]
    fn ashift_is_mod_one() {
        let a = ThetaArg::new(int(1), rat(1, 3), int(0));
        let b = ThetaArg::new(int(1), rat(7, 3), int(0));
        assert_eq!(
            a,
            ThetaArg {
                sign_flip: false,
                ..b.clone()
            }
        );
        // an even integer advance changes nothing, an odd one flips the sign
        let (qm, w) = (int(3), int(3));
        assert_eq!(
            theta(&a, 24, &qm, &w).unwrap(),
            theta(&b, 24, &qm, &w).unwrap()
        );
        let c = ThetaArg::new(int(1), rat(4, 3), int(0));
        assert_eq!(
            point(&theta(&c, 24, &qm, &w).unwrap()),
            point(&theta(&a, 24, &qm, &w).unwrap()).neg()
        );
    }

    #[test]
    fn oddness_and_periodicity() {
        let (qm, w) = (int(5), int(4));
        let t = point(&theta(&ThetaArg::z(int(1)), 8, &qm, &w).unwrap());
        let tm = point(&theta(&ThetaArg::z(int(-1)), 8, &qm, &w).unwrap());
        assert!(series_equal(&tm, &t.neg()).unwrap().equal);
        // z → z + 1
        let shifted = t.substitute_y_scale(&int(1), &int(0)).unwrap();
        assert!(series_equal(&shifted, &t.neg()).unwrap().equal);
        // z → z + τ gives −q^{−1/2}y^{−1}θ
        let shifted = t.substitute_y_scale(&int(0), &int(1)).unwrap();
        let want = t
            .mul_monomial(&rat(-1, 2), &int(-1), &CycloNum::from_int(8, -1))
            .unwrap();
        let cmp = series_equal(&shifted, &want).unwrap();
        assert!(cmp.equal && cmp.compared_terms > 2, "{cmp:?}");
    }

    #[test]
    fn ratios() {
        let (qm, w) = (int(3), int(3));
        let a = ThetaArg::new(rat(1, 2), rat(1, 3), rat(-1, 3));
        let r = point(&theta_ratio(&a, &a, 12, &qm, &w).unwrap());
        assert_eq!(
            r,
            PuiseuxSeries::constant(12, CycloNum::one(12), qm.clone(), w.clone()).unwrap()
        );
        // q⁰ slice of θ(−z + 1/4)/θ(1/4) is (ζ·y^{−1/2} − ζ⁻¹·y^{1/2})/(ζ − ζ⁻¹), ζ = e^{πi/4}
        let num = ThetaArg::new(int(-1), rat(1, 4), int(0));
        let den = ThetaArg::new(int(0), rat(1, 4), int(0));
        let r = point(&theta_ratio(&num, &den, 8, &qm, &w).unwrap())
            .q_limit()
            .unwrap();
        let i = CycloNum::root_of_unity(8, 1, 4).unwrap();
        let half = CycloNum::from_rational(8, rat(1, 2));
        let lo = half.sub(&i.mul(&half).unwrap()).unwrap();
        let hi = half.add(&i.mul(&half).unwrap()).unwrap();
        let want = PuiseuxSeries::from_terms(
            8,
            int(0),
            w.clone(),
            [(int(0), rat(-1, 2), lo), (int(0), rat(1, 2), hi)],
        )
        .unwrap();
        assert_eq!(r, want);
        let zero = ThetaArg::new(int(0), int(0), int(0));
        assert!(theta_ratio(&a, &zero, 12, &qm, &w).is_err());
    }

    #[test]
    fn unit_ratio_genera_of_projective_spaces() {
        let (qm, w) = (int(2), int(3));
        // a point: R(0) = θ(−z)/η³
        let p = CohomRing::point();
        let r0 = unit_ratio(&p, 0, 8, &qm, &w).unwrap().coeff(&[0]).clone();
        let mz = point(&theta(&ThetaArg::z(int(-1)), 8, &qm, &w).unwrap());
        let eta3 = run_plan(&[Factor::EtaCube(1)], &p, 8, &qm, &w)
            .unwrap()
            .coeff(&[0])
            .clone();
        assert!(series_equal(&r0.mul(&eta3).unwrap(), &mz).unwrap().equal);
        // P¹: ∫ R(x)²/R(0) has q⁰ slice y^{−1/2} + y^{1/2}
        let ring = CohomRing::projective(2);
        let u = unit_ratio(&ring, 0, 8, &qm, &w).unwrap();
        let top = u
            .mul(&u)
            .unwrap()
            .pushforward(&ring)
            .unwrap()
            .mul(&r0.invert().unwrap())
            .unwrap();
        let q0 = top.q_limit().unwrap();
        let one = CycloNum::one(8);
        let want = PuiseuxSeries::from_terms(
            8,
            int(0),
            q0.ywindow().clone(),
            [(int(0), rat(1, 2), one.clone()), (int(0), rat(-1, 2), one)],
        )
        .unwrap();
        assert_eq!(q0, want);
    }

    #[test]
    fn nilpotent_taylor_matches_derivative() {
        let ring = CohomRing::projective(3);
        let (qm, w) = (int(4), int(4));
        let base = ThetaArg::new(rat(1, 2), rat(1, 4), rat(-1, 4));
        let scalar = point(&theta(&base, 16, &qm, &w).unwrap());
        let full = theta(
            &base
                .clone()
                .with_nilp(Nilp::generator(ring.clone(), 0).unwrap()),
            16,
            &qm,
            &w,
        )
        .unwrap();
        assert_eq!(full.coeff(&[0]), &scalar);
        // d/dx of θ(z/2 + … + x/2πi) is 2·y·d/dy
        let first = scalar
            .y_derivative()
            .scale(&CycloNum::from_int(16, 2))
            .unwrap();
        assert!(series_equal(full.coeff(&[1]), &first).unwrap().equal);
        let second = scalar
            .y_derivative()
            .y_derivative()
            .scale(&CycloNum::from_int(16, 2))
            .unwrap();
        assert!(series_equal(full.coeff(&[2]), &second).unwrap().equal);
    }

    #[test]
    fn numeric_basics() {
        let tau = Cplx::from_f64(0.07, 1.21, 200);
        let z = Cplx::from_f64(0.11, 0.13, 200);
        assert!(theta_numeric(&Cplx::zero(200), &tau, 40).unwrap().abs_f64() < 1e-39);
        let a = theta_numeric(&z, &tau, 40).unwrap();
        let b = theta_numeric(&z.neg(), &tau, 40).unwrap();
        assert!(a.add(&b).abs_f64() < 1e-39);
        assert!(theta_numeric(&z, &Cplx::from_f64(0.1, -0.2, 200), 40).is_err());
    }

    #[test]
    fn series_matches_numeric() {
        let tau = Cplx::from_f64(0.07, 1.21, 200);
        let z = Cplx::from_f64(0.11, 0.13, 200);
        let s = point(&theta(&ThetaArg::z(int(1)), 8, &int(14), &int(6)).unwrap());
        let v = s.eval(&z, &tau, 40);
        let exact = theta_numeric(&z, &tau, 40).unwrap();
        // first omitted term is q^{(11/2)²/2} ≈ 10^{−49.8}
        assert!(v.sub(&exact).abs_f64() < 1e-40);
    }

    #[test]
    fn psi_identities() {
        let (qm, w) = (int(4), int(2));
        let mut shifted = 0;
        for n in 2..=6i64 {
            let l = 2 * n as u32;
            for k in 1..n {
                let qq = rat(k, n);
                let ps = |a, b| point(&psi(a, b, &qq, None, l, &qm, &w).unwrap());
                for a in 0..n {
                    for b in 0..n {
                        let base = ps(a, b);
                        let qb = &qq * int(b);
                        let qa = &qq * int(a);
                        // z → z + 1 picks up e^{2πi·qb} besides the sign
                        let lhs = ps(a - 1, b).substitute_y_scale(&int(1), &int(0)).unwrap();
                        let ph = CycloNum::root_of_unity(l, to_units(&qb, l).unwrap(), l)
                            .unwrap()
                            .neg();
                        let cmp = series_equal(&lhs, &base.scale(&ph).unwrap()).unwrap();
                        assert!(
                            cmp.equal,
                            "id1 n={n} q={qq} a={a} b={b}: {:?}",
                            cmp.mismatch
                        );
                        // z → z + τ, b → b + 1. Series expand just inside |y| = 1, so the shifted
                        // series is the expansion just inside |y| = |q|^{−1}; the two agree only when
                        // Ψ(a, b) has no pole with Im z/Im τ = (k + qb)/q in (−1, 0].
                        if frac(&-qb.clone()) < qq {
                            let lhs = ps(a + b, b).substitute_q_phase().unwrap();
                            assert!(series_equal(&lhs, &base).unwrap().equal);
                            continue;
                        }
                        let lhs = ps(a, b + 1).substitute_y_scale(&int(0), &int(1)).unwrap();
                        let ph = CycloNum::root_of_unity(l, to_units(&qa, l).unwrap(), l)
                            .unwrap()
                            .neg();
                        let rhs = base
                            .mul_monomial(&(&qq - rat(1, 2)), &(int(2) * &qq - int(1)), &ph)
                            .unwrap();
                        let cmp = series_equal(&lhs, &rhs).unwrap();
                        shifted += 1;
                        assert!(
                            cmp.equal && cmp.compared_terms > 0,
                            "id2 n={n} q={qq} a={a} b={b}: {:?}",
                            cmp.mismatch
                        );
                        // τ → τ + 1, a → a + b
                        let lhs = ps(a + b, b).substitute_q_phase().unwrap();
                        let cmp = series_equal(&lhs, &base).unwrap();
                        assert!(
                            cmp.equal,
                            "id3 n={n} q={qq} a={a} b={b}: {:?}",
                            cmp.mismatch
                        );
                    }
                }
            }
        }
        assert!(shifted > 100, "{shifted}");
    }

    #[test]
    fn psi_nilpotent_quasi_periodicity() {
        // the z → z + τ law carries e^{x} when x is switched on
        let ring = CohomRing::projective(2);
        let x = Nilp::generator(ring.clone(), 0).unwrap();
        let (qm, w) = (int(4), int(2));
        let qq = rat(1, 3);
        let l = 6;
        let ps = |a, b| psi(a, b, &qq, Some(x.clone()), l, &qm, &w).unwrap();
        let (lhs, base) = (ps(1, 2), ps(1, 1));
        let ph = CycloNum::root_of_unity(l, 2, 6).unwrap().neg();
        let shift = |s: &PuiseuxSeries| s.substitute_y_scale(&int(0), &int(1)).unwrap();
        let twist = |s: &PuiseuxSeries| s.mul_monomial(&rat(-1, 6), &rat(-1, 3), &ph).unwrap();
        let (b0, b1) = (base.coeff(&[0]), base.coeff(&[1]));
        // (1 + x)(b0 + b1·x) = b0 + (b0 + b1)·x
        assert!(
            series_equal(&shift(lhs.coeff(&[0])), &twist(b0))
                .unwrap()
                .equal
        );
        assert!(
            series_equal(&shift(lhs.coeff(&[1])), &twist(&b0.add(b1).unwrap()))
                .unwrap()
                .equal
        );
    }

    #[test]
    fn psi_quasi_periodicity_numeric() {
        let p = 200;
        let tau = Cplx::from_f64(0.07, 1.21, p);
        let z = Cplx::from_f64(0.11, 0.13, p);
        for (a, b, qq) in [
            (0, 0, rat(2, 3)),
            (1, 2, rat(1, 3)),
            (2, 3, rat(1, 2)),
            (5, 1, rat(5, 6)),
        ] {
            let lhs = psi_numeric(a, b + 1, &qq, &z.add(&tau), &tau, 40).unwrap();
            let e = z
                .mul_rational(&(int(2) * &qq - int(1)))
                .add(&Cplx::from_rational(&(&qq * int(a)), p))
                .add(&tau.mul_rational(&(&qq - rat(1, 2))));
            let rhs = Cplx::exp_2pi_i(&e)
                .mul(&psi_numeric(a, b, &qq, &z, &tau, 40).unwrap())
                .neg();
            assert!(
                lhs.sub(&rhs).abs_f64() < 1e-30 * rhs.abs_f64().max(1.0),
                "a={a} b={b} q={qq}"
            );
        }
    }
}
