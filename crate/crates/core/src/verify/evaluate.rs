//! Direct numerical evaluation of the defining theta expressions, independent
//! of the series engine, and the checks built on it.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CheckReport;
use crate::cohring::frac;
use crate::cyclo::parse_rational;
use crate::error::{Error, Result};
use crate::genus::{group_from_params, GenusReport, GroupSpec, WeightSystem};
use crate::numeric::{bits_for_digits, Cplx};
use crate::theta::theta_numeric;

/// A sample point `(z, τ)` given as decimal strings `[re, im]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub z: [String; 2],
    pub tau: [String; 2],
}

impl Sample {
    pub fn new(z: (&str, &str), tau: (&str, &str)) -> Self {
        Sample {
            z: [z.0.into(), z.1.into()],
            tau: [tau.0.into(), tau.1.into()],
        }
    }

    /// Three generic points with `Im τ ≥ 1.1`.
    pub fn defaults() -> Vec<Sample> {
        vec![
            Sample::new(("0.11", "0.07"), ("0.05", "1.4")),
            Sample::new(("0.23", "-0.04"), ("-0.13", "1.2")),
            Sample::new(("-0.31", "0.12"), ("0.21", "1.1")),
        ]
    }

    pub fn point(&self, digits: u32) -> Result<(Cplx, Cplx)> {
        let p = bits_for_digits(digits + 10);
        let parse = |v: &[String; 2]| {
            Cplx::parse(&v[0], &v[1], p)
                .ok_or_else(|| Error::Parse(format!("bad complex number {v:?}")))
        };
        Ok((parse(&self.z)?, parse(&self.tau)?))
    }

    fn label(&self) -> String {
        format!(
            "z={}{:+}i tau={}{:+}i",
            self.z[0],
            self.z[1].parse::<f64>().unwrap_or(f64::NAN),
            self.tau[0],
            self.tau[1].parse::<f64>().unwrap_or(f64::NAN)
        )
    }
}

fn two_pi_im(tau: &Cplx) -> Result<f64> {
    let t = tau.im_f64();
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Invalid(format!("Im tau = {t} must be positive")));
    }
    Ok(2.0 * std::f64::consts::PI * t)
}

/// `θ'(0)/2πi = q^{1/8}·∏(1 − q^j)³`.
pub fn eta_cubed(tau: &Cplx, digits: u32) -> Result<Cplx> {
    let decay = two_pi_im(tau)?;
    let p = bits_for_digits(digits + 10);
    let tau = tau.with_prec(p);
    let q = Cplx::exp_2pi_i(&tau);
    let terms = ((digits + 10) as f64 * std::f64::consts::LN_10 / decay).ceil() as i64 + 1;
    let mut acc = Cplx::exp_2pi_i(&tau.mul_rational(&BigRational::new(1.into(), 8.into())));
    let mut qj = Cplx::one(p);
    for _ in 0..terms {
        qj = qj.mul(&q);
        let f = Cplx::one(p).sub(&qj);
        acc = acc.mul(&f.mul(&f).mul(&f));
    }
    Ok(acc)
}

fn lin(z: &Cplx, zc: &BigRational, alpha: &BigRational, tau: &Cplx, beta: &BigRational) -> Cplx {
    let p = z.prec();
    z.mul_rational(zc)
        .add(&Cplx::from_rational(alpha, p))
        .sub(&tau.mul_rational(beta))
}

/// `(1/|H|) Σ_{h_a,h_b} ∏_i θ((q_i−1)z + θ_i(h_b) − θ_i(h_a)τ)/θ(q_i z + θ_i(h_b) − θ_i(h_a)τ)·e^{2πi θ_i(h_a) z}`.
pub fn lg_numeric(
    w: &WeightSystem,
    h: &GroupSpec,
    z: &Cplx,
    tau: &Cplx,
    digits: u32,
) -> Result<Cplx> {
    let one = BigRational::from_integer(1.into());
    let p = bits_for_digits(digits + 10);
    let (z, tau) = (z.with_prec(p), tau.with_prec(p));
    let mut acc = Cplx::zero(p);
    for ha in h.elements() {
        for hb in h.elements() {
            let mut term = Cplx::one(p);
            for (i, q) in w.charges().iter().enumerate() {
                let num = theta_numeric(&lin(&z, &(q - &one), &hb[i], &tau, &ha[i]), &tau, digits)?;
                let den = theta_numeric(&lin(&z, q, &hb[i], &tau, &ha[i]), &tau, digits)?;
                term = term
                    .mul(&num.div(&den))
                    .mul(&Cplx::exp_2pi_i(&z.mul_rational(&ha[i])));
            }
            acc = acc.add(&term);
        }
    }
    Ok(acc.mul_rational(&BigRational::new(1.into(), (h.order() as i64).into())))
}

/// The origin contribution with an independent equivariant parameter `u`:
/// `(1/D) Σ_{a,b} ∏_i θ(q_i u − z + λ_i(a) − λ_i(b)τ)/θ(q_i u + λ_i(a) − λ_i(b)τ)·e^{2πi λ_i(b) z}`
/// with `λ_i(a) = frac(a·w_i/D)`.
pub fn origin_numeric(
    w: &WeightSystem,
    u: &Cplx,
    z: &Cplx,
    tau: &Cplx,
    digits: u32,
) -> Result<Cplx> {
    let p = bits_for_digits(digits + 10);
    let (u, z, tau) = (u.with_prec(p), z.with_prec(p), tau.with_prec(p));
    let d = w.degree as i64;
    let mut acc = Cplx::zero(p);
    for a in 0..d {
        for b in 0..d {
            let mut term = Cplx::one(p);
            for (&wi, q) in w.weights.iter().zip(w.charges()) {
                let la = frac(&BigRational::new((a * wi as i64).into(), d.into()));
                let lb = frac(&BigRational::new((b * wi as i64).into(), d.into()));
                let base = u
                    .mul_rational(&q)
                    .add(&Cplx::from_rational(&la, p))
                    .sub(&tau.mul_rational(&lb));
                let num = theta_numeric(&base.sub(&z), &tau, digits)?;
                let den = theta_numeric(&base, &tau, digits)?;
                term = term
                    .mul(&num.div(&den))
                    .mul(&Cplx::exp_2pi_i(&z.mul_rational(&lb)));
            }
            acc = acc.add(&term);
        }
    }
    Ok(acc.mul_rational(&BigRational::new(1.into(), d.into())))
}

/// `∫_{P^{n−1}} R(x)^n/R(0)·θ(nX)/θ(nX − z)` by the trapezoid rule on a circle
/// `|X| = ρ` inside the nearest singularity, where `x = 2πi·X`.
///
/// The top coefficient is `(1/K) Σ_k 2πi·X_k·(θ(X_k − z)/θ(X_k))^n·θ(nX_k)/θ(nX_k − z)·η³/θ(−z)`.
/// Aliasing error is of order `2^{−K}` with `ρ` half the singular radius.
pub fn cy_fermat_numeric(n: u32, z: &Cplx, tau: &Cplx, digits: u32) -> Result<Cplx> {
    two_pi_im(tau)?;
    let p = bits_for_digits(digits + 10);
    let (z, tau) = (z.with_prec(p), tau.with_prec(p));
    let (zr, zi, tr, ti) = (z.re_f64(), z.im_f64(), tau.re_f64(), tau.im_f64());
    let nf = n as f64;
    let span = n as i64 + 1;
    let mut radius = f64::INFINITY;
    for a in -span..=span {
        for b in -span..=span {
            let (lr, li) = (a as f64 + b as f64 * tr, b as f64 * ti);
            if a != 0 || b != 0 {
                radius = radius.min(lr.hypot(li));
            }
            radius = radius.min(((zr + lr) / nf).hypot((zi + li) / nf));
        }
    }
    if radius < 1e-6 {
        return Err(Error::Invalid(
            "sample point too close to a pole of the integrand".into(),
        ));
    }
    let rho = Cplx::from_f64(radius / 2.0, 0.0, p);
    let k = ((digits + 10) as f64 / std::f64::consts::LOG10_2).ceil() as i64 + 8;
    let mut acc = Cplx::zero(p);
    for j in 0..k {
        let x = rho.mul(&Cplx::root_of_unity(j, k, p));
        let ratio = theta_numeric(&x.sub(&z), &tau, digits)?.div(&theta_numeric(&x, &tau, digits)?);
        let nx = x.mul_i64(n as i64);
        let normal =
            theta_numeric(&nx, &tau, digits)?.div(&theta_numeric(&nx.sub(&z), &tau, digits)?);
        acc = acc.add(&x.mul(&ratio.powi(n as i64)).mul(&normal));
    }
    let trivial = eta_cubed(&tau, digits)?.div(&theta_numeric(&z.neg(), &tau, digits)?);
    Ok(acc
        .mul(&Cplx::two_pi_i(p))
        .mul(&trivial)
        .mul_rational(&BigRational::new(1.into(), k.into())))
}

fn params_weights(params: &Value) -> Result<WeightSystem> {
    let weights: Vec<u32> =
        serde_json::from_value(params.get("weights").cloned().unwrap_or(Value::Null))?;
    let degree = params
        .get("degree")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("params carry no degree".into()))?;
    WeightSystem::new(weights, degree as u32)
}

/// The defining expression of a report, evaluated directly at `(z, τ)`.
///
/// Available for LG orbifolds, origin contributions and Fermat hypersurfaces.
pub fn genus_numeric(r: &GenusReport, z: &Cplx, tau: &Cplx, digits: u32) -> Result<Cplx> {
    let none = || Error::Invalid(format!("no numeric evaluator for formula {:?}", r.formula));
    match r.formula.as_str() {
        "lg" => {
            let w = params_weights(&r.params)?;
            lg_numeric(&w, &group_from_params(&w, &r.params)?, z, tau, digits)
        }
        "origin" => {
            let w = params_weights(&r.params)?;
            let c = parse_rational(r.params.get("c").and_then(Value::as_str).unwrap_or("1"))?;
            origin_numeric(&w, &z.mul_rational(&c), z, tau, digits)
        }
        "cy-fermat" => {
            let n = r.params.get("n").and_then(Value::as_u64).ok_or_else(none)?;
            cy_fermat_numeric(n as u32, z, tau, digits)
        }
        "cy-weighted" => {
            let w = params_weights(&r.params)?;
            if w.weights.iter().all(|&x| x == 1) {
                cy_fermat_numeric(w.degree, z, tau, digits)
            } else {
                Err(none())
            }
        }
        _ => Err(none()),
    }
}

/// Estimated bound on the omitted tail of the series at `(z, τ)`.
///
/// For a Calabi–Yau report of index `m` every term with `q^a`, `a ≤ qmax`, has
/// `|b| ≤ √(4am + m²)`, so the y-window is complete when it covers that range.
/// The q-tail is extrapolated from the growth of the stored slices, with a
/// safety factor of 100. `None` when no honest estimate is possible.
fn tail_bound(r: &GenusReport, z: &Cplx, tau: &Cplx) -> Option<f64> {
    let s = &r.series;
    let qmax = s.qmax().to_f64()?;
    let m = r.index().to_f64()?;
    if !r.cy_flag || s.ywindow().to_f64()? < (4.0 * qmax * m + m * m).sqrt() {
        return None;
    }
    let qabs = (-2.0 * std::f64::consts::PI * tau.im_f64()).exp();
    let ylog = -2.0 * std::f64::consts::PI * z.im_f64();
    let mut slices: Vec<(f64, f64)> = Vec::new();
    for (e, c) in s.terms() {
        let a = e.eq.to_f64()?;
        let v = c.to_complex(20).abs_f64() * (ylog * e.ey.to_f64()?).exp();
        match slices.last_mut() {
            Some((last, acc)) if *last == a => *acc += v,
            _ => slices.push((a, v)),
        }
    }
    let Some(&(a_top, top)) = slices.last() else {
        return Some(0.0);
    };
    let mut growth: f64 = 1.0;
    for w in slices.windows(2) {
        growth = growth.max((w[1].1 / w[0].1).powf(1.0 / (w[1].0 - w[0].0)));
    }
    let step = if s.terms().all(|(e, _)| e.eq.is_integer()) {
        1.0
    } else {
        1.0 / s.denom() as f64
    };
    let ratio = (growth * qabs).powf(step);
    if ratio >= 0.5 {
        return None;
    }
    let lead = top * qabs.powf(a_top) * (growth * qabs).powf(qmax - a_top);
    Some(100.0 * lead * ratio / (1.0 - ratio))
}

/// Evaluates the exact series and, independently, the defining expression at
/// each sample; passes when they agree within the estimated tail bound plus
/// the working-precision floor.
pub fn check_numeric(r: &GenusReport, samples: &[Sample], digits: u32) -> CheckReport {
    let name = format!("numeric {}", r.formula);
    let region = format!(
        "q <= {}, |y| <= {}, {} samples, {digits} digits",
        r.series.qmax(),
        r.series.ywindow(),
        samples.len()
    );
    if samples.is_empty() {
        return CheckReport::inconclusive(name, "no samples", region);
    }
    let floor = 10f64.powi(-(digits as i32 - 10));
    let mut worst = (0.0f64, 0.0f64, String::new());
    for smp in samples {
        let res = (|| -> Result<(f64, Option<f64>)> {
            let (z, tau) = smp.point(digits)?;
            let direct = genus_numeric(r, &z, &tau, digits)?;
            let series = r.series.eval(&z, &tau, digits);
            Ok((series.sub(&direct).abs_f64(), tail_bound(r, &z, &tau)))
        })();
        match res {
            Err(e) => {
                return CheckReport::inconclusive(name, format!("{}: {e}", smp.label()), region)
            }
            Ok((_, None)) => {
                return CheckReport::inconclusive(
                    name,
                    format!("{}: no tail bound available", smp.label()),
                    region,
                )
            }
            Ok((dev, Some(bound))) => {
                if dev > bound + floor {
                    return CheckReport::fail(
                        name,
                        format!(
                            "{}: deviation {dev:.3e} exceeds bound {:.3e}",
                            smp.label(),
                            bound + floor
                        ),
                        region,
                    );
                }
                if dev >= worst.0 {
                    worst = (dev, bound + floor, smp.label());
                }
            }
        }
    }
    CheckReport::pass(
        name,
        format!(
            "{region}, max deviation {:.3e} within {:.3e} at {}",
            worst.0, worst.1, worst.2
        ),
    )
}

/// `φ(z/τ, −1/τ) = e^{2πi·m·z²/τ}·φ(z, τ)` on the defining expression, at
/// each sample, within `tolerance`.
pub fn check_s_law(
    r: &GenusReport,
    samples: &[Sample],
    digits: u32,
    tolerance: f64,
) -> CheckReport {
    let name = format!("s-law {}", r.formula);
    let region = format!(
        "{} samples, {digits} digits, tolerance {tolerance:e}",
        samples.len()
    );
    if samples.is_empty() {
        return CheckReport::inconclusive(name, "no samples", region);
    }
    let m = r.index();
    for smp in samples {
        let res = (|| -> Result<f64> {
            let (z, tau) = smp.point(digits)?;
            let p = z.prec();
            let zs = z.div(&tau);
            let taus = Cplx::one(p).neg().div(&tau);
            let lhs = genus_numeric(r, &zs, &taus, digits)?;
            let phase = Cplx::exp_2pi_i(&z.mul(&z).div(&tau).mul_rational(&m));
            let rhs = phase.mul(&genus_numeric(r, &z, &tau, digits)?);
            Ok(lhs.sub(&rhs).abs_f64())
        })();
        match res {
            Err(e) => {
                return CheckReport::inconclusive(name, format!("{}: {e}", smp.label()), region)
            }
            Ok(dev) if dev > tolerance => {
                return CheckReport::fail(
                    name,
                    format!("{}: deviation {dev:.3e}", smp.label()),
                    region,
                )
            }
            Ok(_) => {}
        }
    }
    CheckReport::pass(name, region)
}
