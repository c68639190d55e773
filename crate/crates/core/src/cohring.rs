//! Truncated cohomology rings of products of projective spaces, fixed loci of
//! coordinatewise abelian actions, and pushforward to a point.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::pseries::PuiseuxSeries;

/// `Q[x_1..x_k]/(x_g^{m_g})`, the cohomology of `P^{m_1−1} × ⋯ × P^{m_k−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomRing {
    gens: Vec<(String, usize)>,
}

impl CohomRing {
    pub fn new(gens: Vec<(String, usize)>) -> Self {
        CohomRing { gens }
    }

    /// `H^*(P^{m−1})` with generator `x`.
    pub fn projective(m: usize) -> Self {
        Self::new(vec![("x".into(), m)])
    }

    pub fn point() -> Self {
        Self::projective(1)
    }

    pub fn gens(&self) -> &[(String, usize)] {
        &self.gens
    }

    pub fn dims(&self) -> Vec<usize> {
        self.gens.iter().map(|(_, m)| *m).collect()
    }

    /// Exponent of the fundamental class monomial.
    pub fn top(&self) -> Vec<usize> {
        self.gens.iter().map(|(_, m)| m.saturating_sub(1)).collect()
    }

    /// All surviving monomials in lexicographic order.
    pub fn monomials(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for (_, m) in &self.gens {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..*m).map(move |e| {
                        let mut v = p.clone();
                        v.push(e);
                        v
                    })
                })
                .collect();
        }
        out
    }

    fn allows(&self, e: &[usize]) -> bool {
        e.len() == self.gens.len() && e.iter().zip(&self.gens).all(|(x, (_, m))| x < m)
    }
}

/// A class `Σ c_e·x^e` with series coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomSeries {
    ring: CohomRing,
    zero: PuiseuxSeries,
    coeffs: BTreeMap<Vec<usize>, PuiseuxSeries>,
}

impl CohomSeries {
    /// The zero class; `template` fixes the lattice and truncation of coefficients.
    pub fn zero(ring: CohomRing, template: &PuiseuxSeries) -> Self {
        CohomSeries {
            ring,
            zero: PuiseuxSeries::zero(
                template.denom(),
                template.qmax().clone(),
                template.ywindow().clone(),
            ),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn ring(&self) -> &CohomRing {
        &self.ring
    }

    pub fn set(&mut self, e: Vec<usize>, s: PuiseuxSeries) -> Result<()> {
        if !self.ring.allows(&e) {
            return Err(Error::RingMismatch(format!(
                "monomial {e:?} is not in the ring"
            )));
        }
        if s.is_zero() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, s);
        }
        Ok(())
    }

    pub fn coeff(&self, e: &[usize]) -> &PuiseuxSeries {
        self.coeffs.get(e).unwrap_or(&self.zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &PuiseuxSeries)> {
        self.coeffs.iter()
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.ring != o.ring {
            return Err(Error::RingMismatch(format!(
                "{:?} vs {:?}",
                self.ring, o.ring
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = self.clone();
        for (e, s) in &o.coeffs {
            let v = out.coeff(e).add(s)?;
            out.set(e.clone(), v)?;
        }
        Ok(out)
    }

    /// Product truncated by the nilpotency degrees.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = Self::zero(self.ring.clone(), &self.zero);
        for (e1, s1) in &self.coeffs {
            for (e2, s2) in &o.coeffs {
                let e: Vec<usize> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                if !self.ring.allows(&e) {
                    continue;
                }
                let v = out.coeff(&e).add(&s1.mul(s2)?)?;
                out.set(e, v)?;
            }
        }
        Ok(out)
    }

    /// Evaluation on the fundamental class: the coefficient of the top monomial.
    pub fn pushforward(&self, ring: &CohomRing) -> Result<PuiseuxSeries> {
        if ring != &self.ring {
            return Err(Error::RingMismatch(format!(
                "class lives in {:?}, asked to integrate over {:?}",
                self.ring, ring
            )));
        }
        Ok(self.coeff(&ring.top()).clone())
    }
}

/// A component `P(J) ⊂ P^{n−1}` of the fixed set of a pair `(g, h)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedLocus {
    /// Zero-based coordinate indices in `J`.
    pub coords: Vec<usize>,
    /// `(θ_J(g), θ_J(h))` reduced to `[0, 1)`.
    pub charpair: (BigRational, BigRational),
    pub dim: usize,
}

pub(crate) fn frac(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// Partitions the coordinates by their character pair under `(g, h)`.
///
/// `g` and `h` are character vectors `θ_i ∈ Q/Z`, one entry per coordinate.
pub fn fixed_loci(g: &[BigRational], h: &[BigRational]) -> Result<Vec<FixedLocus>> {
    if g.len() != h.len() {
        return Err(Error::Invalid(
            "character vectors of different lengths".into(),
        ));
    }
    let mut classes: BTreeMap<(BigRational, BigRational), Vec<usize>> = BTreeMap::new();
    for (i, (a, b)) in g.iter().zip(h).enumerate() {
        classes.entry((frac(a), frac(b))).or_default().push(i);
    }
    let mut loci: Vec<FixedLocus> = classes
        .into_iter()
        .map(|(charpair, coords)| FixedLocus {
            dim: coords.len() - 1,
            coords,
            charpair,
        })
        .collect();
    loci.sort_by(|a, b| a.coords.cmp(&b.coords));
    Ok(loci)
}

/// A Chern root `x + (character)` of `T P^{n−1}|_{P(J)} ⊕ O`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernRoot {
    pub coord: usize,
    pub character: (BigRational, BigRational),
    /// The trivial summand of the Euler sequence, to be divided out.
    pub trivial: bool,
}

/// Euler-sequence roots on a locus: `O(1) ⊗ (θ_i − θ_J)` for every coordinate.
pub fn tangent_chern_roots(
    locus: &FixedLocus,
    g: &[BigRational],
    h: &[BigRational],
) -> Vec<ChernRoot> {
    let (cg, ch) = &locus.charpair;
    let mut flagged = false;
    g.iter()
        .zip(h)
        .enumerate()
        .map(|(i, (a, b))| {
            let character = (frac(&(a - cg)), frac(&(b - ch)));
            let trivial = !flagged && character.0.is_zero() && character.1.is_zero();
            flagged |= trivial;
            ChernRoot {
                coord: i,
                character,
                trivial,
            }
        })
        .collect()
}
