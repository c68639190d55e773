//! Combinatorial oracles that share no code with the theta expansions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclo::CycloNum;
use crate::error::{Error, Result};
use crate::genus::WeightSystem;
use crate::pseries::{int, PuiseuxSeries};

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `y^{−N/2}·χ_{−y}` of a smooth degree-`d` hypersurface of dimension `N = n − 2` in `P^{n−1}`.
///
/// Primitive middle Hodge numbers come from Griffiths residues: `h^{p,N−p}_prim`
/// is the coefficient of `t^{(N−p+1)d−n}` in `((1 − t^{d−1})/(1 − t))^n`.
/// The hyperplane powers add `1` to every `h^{p,p}`.
pub fn hodge_oracle(n: u32, d: u32) -> Result<PuiseuxSeries> {
    if n < 2 || d == 0 {
        return Err(Error::Invalid(format!(
            "need n >= 2 and d >= 1, got n={n}, d={d}"
        )));
    }
    let dim = n as i64 - 2;
    let base: Vec<BigInt> = (0..d.saturating_sub(1)).map(|_| BigInt::one()).collect();
    let mut jac = vec![BigInt::one()];
    for _ in 0..n {
        jac = poly_mul(&jac, &base);
    }
    let at = |k: i64| -> BigInt {
        if k < 0 {
            BigInt::zero()
        } else {
            jac.get(k as usize).cloned().unwrap_or_default()
        }
    };
    let size = dim as usize + 1;
    let mut h = vec![vec![BigInt::zero(); size]; size];
    for p in 0..=dim {
        h[p as usize][(dim - p) as usize] += at((dim - p + 1) * d as i64 - n as i64);
        h[p as usize][p as usize] += 1;
    }
    let mut terms = Vec::new();
    for (p, row) in h.iter().enumerate() {
        let chi: BigInt = row
            .iter()
            .enumerate()
            .map(|(q, v)| if q % 2 == 0 { v.clone() } else { -v.clone() })
            .sum();
        let signed = if p % 2 == 0 { chi } else { -chi };
        let ey = BigRational::new(BigInt::from(2 * p as i64 - dim), BigInt::from(2));
        terms.push((
            int(0),
            ey,
            CycloNum::from_rational(2, BigRational::from_integer(signed)),
        ));
    }
    PuiseuxSeries::from_terms(2, int(0), int(n as i64), terms)
}

/// The Steenbrink spectrum product `∏_i (t^{q_i} − t)/(1 − t^{q_i})`, written in `y`.
///
/// Errors if some `q_i ∉ (0, 1)` or the product is not a polynomial in `t^{1/D}`.
pub fn spectrum_oracle(w: &WeightSystem) -> Result<PuiseuxSeries> {
    let dd = w.degree as usize;
    if w.weights.iter().any(|&x| x as usize >= dd) {
        return Err(Error::Invalid(format!("charges of {w} must lie in (0, 1)")));
    }
    // in s = t^{1/D}: ∏(s^{w_i} − s^D) / ∏(1 − s^{w_i})
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for &wi in &w.weights {
        let wi = wi as usize;
        let mut f = vec![BigInt::zero(); dd + 1];
        f[wi] += 1;
        f[dd] -= 1;
        num = poly_mul(&num, &f);
        let mut g = vec![BigInt::zero(); wi + 1];
        g[0] += 1;
        g[wi] -= 1;
        den = poly_mul(&den, &g);
    }
    // power-series division; den has constant term 1
    let mut quo = vec![BigInt::zero(); num.len()];
    let mut rem = num.clone();
    for k in 0..num.len() {
        let c = rem[k].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            if k + j < rem.len() {
                rem[k + j] -= &c * dj;
            }
        }
        quo[k] = c;
    }
    let back = poly_mul(&quo, &den);
    let exact = back
        .iter()
        .enumerate()
        .all(|(k, v)| num.get(k).map_or(v.is_zero(), |x| x == v));
    if !exact {
        return Err(Error::Invalid(format!(
            "spectrum product of {w} is not a polynomial"
        )));
    }
    let denom = 2 * w.degree;
    let terms = quo
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| {
            (
                int(0),
                BigRational::new(BigInt::from(k), BigInt::from(w.degree)),
                CycloNum::from_rational(denom, BigRational::from_integer(c.clone())),
            )
        })
        .collect::<Vec<_>>();
    PuiseuxSeries::from_terms(denom, int(0), int(w.n() as i64), terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseries::rat;

    fn ints(s: &PuiseuxSeries) -> Vec<(BigRational, i64)> {
        s.terms()
            .map(|(e, c)| {
                (
                    e.ey,
                    c.as_rational().unwrap().to_integer().try_into().unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn hodge_small() {
        assert_eq!(ints(&hodge_oracle(2, 2).unwrap()), vec![(int(0), 2)]);
        assert!(hodge_oracle(3, 3).unwrap().is_zero());
        assert_eq!(
            ints(&hodge_oracle(4, 4).unwrap()),
            vec![(int(-1), 2), (int(0), 20), (int(1), 2)]
        );
        assert_eq!(
            ints(&hodge_oracle(5, 5).unwrap()),
            vec![(rat(-1, 2), -100), (rat(1, 2), -100)]
        );
        // cubic surface: h^{1,1} = 7
        assert_eq!(
            ints(&hodge_oracle(4, 3).unwrap()),
            vec![(int(-1), 1), (int(0), 7), (int(1), 1)]
        );
        // plane quartic, genus 3
        assert_eq!(
            ints(&hodge_oracle(3, 4).unwrap()),
            vec![(rat(-1, 2), -2), (rat(1, 2), -2)]
        );
        assert!(hodge_oracle(1, 2).is_err());
    }

    #[test]
    fn spectra() {
        let sp =
            |w: Vec<u32>, d| ints(&spectrum_oracle(&WeightSystem::new(w, d).unwrap()).unwrap());
        assert_eq!(sp(vec![1], 2), vec![(rat(1, 2), 1)]);
        assert_eq!(sp(vec![1], 3), vec![(rat(1, 3), 1), (rat(2, 3), 1)]);
        // Milnor number is the value at t = 1
        let total: i64 = sp(vec![1, 1, 1], 3).iter().map(|(_, c)| c).sum();
        assert_eq!(total, 8);
        let total: i64 = sp(vec![1, 2, 3], 6).iter().map(|(_, c)| c).sum();
        assert_eq!(total, (5 * 2));
        assert!(spectrum_oracle(&WeightSystem::new(vec![2], 2).unwrap()).is_err());
        // weights that do not divide the degree give no polynomial here
        assert!(spectrum_oracle(&WeightSystem::new(vec![2, 3], 7).unwrap()).is_err());
    }
}
