//! Elliptic genera of Witten phases: LG orbifolds, equivariant origin
//! contributions, Calabi–Yau hypersurfaces and the three hybrid phases.
//!
//! Every formula is a sum of sectors, each a product of theta factors expanded
//! exactly by the engine; sectors run in parallel and are summed in a fixed
//! order, so output does not depend on the thread count.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cohring::frac;
use crate::cyclo::{format_rational, CycloNum};
use crate::engine::{self, add_terms, Arg, Ctx, Factor, NilAlg, Terms};
use crate::error::{Error, Result};
use crate::pseries::PuiseuxSeries;

fn ri(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn rq(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Weights `w_i` and degree `D` of a quasi-homogeneous polynomial; charges `q_i = w_i/D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    pub weights: Vec<u32>,
    pub degree: u32,
}

impl WeightSystem {
    pub fn new(weights: Vec<u32>, degree: u32) -> Result<Self> {
        if weights.is_empty() || degree == 0 || weights.contains(&0) {
            return Err(Error::Invalid("weights and degree must be positive".into()));
        }
        Ok(WeightSystem { weights, degree })
    }

    /// `x_1^n + ⋯ + x_n^n`.
    pub fn fermat(n: u32) -> Result<Self> {
        Self::new(vec![1; n as usize], n)
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn charges(&self) -> Vec<BigRational> {
        self.weights
            .iter()
            .map(|&w| rq(w as i64, self.degree as i64))
            .collect()
    }

    /// `Σ w_i = D`.
    pub fn cy_flag(&self) -> bool {
        self.weights.iter().map(|&w| w as u64).sum::<u64>() == self.degree as u64
    }

    /// `ĉ = Σ(1 − 2q_i)`, which is `n − 2` under the Calabi–Yau condition.
    pub fn central_charge(&self) -> BigRational {
        self.charges().iter().map(|q| ri(1) - ri(2) * q).sum()
    }

    /// The exponential grading operator `J_W = (q_1, …, q_n)`.
    pub fn grading(&self) -> Vec<BigRational> {
        self.charges()
    }
}

/// A finite abelian group acting diagonally, given by character vectors in `(Q/Z)^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    n: usize,
    generators: Vec<Vec<BigRational>>,
    elements: Vec<Vec<BigRational>>,
}

impl GroupSpec {
    /// The group generated by `generators`; enumerated by closure, sorted.
    pub fn new(n: usize, generators: Vec<Vec<BigRational>>) -> Result<Self> {
        let generators: Vec<Vec<BigRational>> = generators
            .into_iter()
            .map(|g| g.iter().map(frac).collect())
            .collect();
        if generators.iter().any(|g| g.len() != n) {
            return Err(Error::Invalid(format!("generators must have {n} entries")));
        }
        let mut seen: BTreeSet<Vec<BigRational>> = BTreeSet::new();
        let mut frontier = vec![vec![BigRational::zero(); n]];
        seen.insert(frontier[0].clone());
        while let Some(e) = frontier.pop() {
            for g in &generators {
                let s: Vec<BigRational> = e.iter().zip(g).map(|(a, b)| frac(&(a + b))).collect();
                if seen.insert(s.clone()) {
                    if seen.len() > 1 << 16 {
                        return Err(Error::Invalid("group too large".into()));
                    }
                    frontier.push(s);
                }
            }
        }
        Ok(GroupSpec {
            n,
            generators,
            elements: seen.into_iter().collect(),
        })
    }

    pub fn trivial(n: usize) -> Self {
        Self::new(n, vec![]).expect("trivial group")
    }

    /// `⟨J_W⟩`.
    pub fn grading(w: &WeightSystem) -> Self {
        Self::new(w.n(), vec![w.grading()]).expect("grading operator")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<BigRational>] {
        &self.generators
    }

    pub fn elements(&self) -> &[Vec<BigRational>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        let v: Vec<BigRational> = v.iter().map(frac).collect();
        self.elements.binary_search(&v).is_ok()
    }

    fn denominators(&self) -> impl Iterator<Item = u64> + '_ {
        self.elements
            .iter()
            .flatten()
            .map(|r| r.denom().to_u64().unwrap_or(1))
    }
}

/// The two blocks of a hybrid model: `n` fibre coordinates over `P^{m−1}` (phase H1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HybridSpec {
    pub n: u32,
    pub m: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HybridPhase {
    /// `μ_n` orbifold of `O(−m)^n` over `P^{m−1}`.
    H1,
    /// `μ_m` orbifold of `O(−n)^m` over `P^{n−1}`.
    H2,
    /// The bidegree `(n, m)` hypersurface in `P^{n−1} × P^{m−1}`.
    H3,
}

impl std::str::FromStr for HybridPhase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h1" => Ok(HybridPhase::H1),
            "h2" => Ok(HybridPhase::H2),
            "h3" => Ok(HybridPhase::H3),
            _ => Err(Error::Parse(format!("unknown hybrid phase {s:?}"))),
        }
    }
}

impl HybridPhase {
    pub fn tag(self) -> &'static str {
        match self {
            HybridPhase::H1 => "H1",
            HybridPhase::H2 => "H2",
            HybridPhase::H3 => "H3",
        }
    }
}

/// Truncation region and optional lattice override for a genus computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub qmax: BigRational,
    pub ywindow: BigRational,
    /// Exponent denominator; must be a multiple of the one the formula needs.
    pub denom: Option<u32>,
}

impl Truncation {
    pub fn new(qmax: BigRational, ywindow: BigRational) -> Self {
        Truncation {
            qmax,
            ywindow,
            denom: None,
        }
    }

    pub fn with_denom(mut self, denom: u32) -> Self {
        self.denom = Some(denom);
        self
    }
}

/// A genus series with the data needed to check it.
#[derive(Clone, Debug, PartialEq)]
pub struct GenusReport {
    pub series: PuiseuxSeries,
    /// `d`; the claimed Jacobi index is `d/2` and the weight 0.
    pub dimension: BigRational,
    pub cy_flag: bool,
    pub formula: String,
    pub params: Value,
}

impl GenusReport {
    pub fn index(&self) -> BigRational {
        &self.dimension / ri(2)
    }

    pub fn to_json(&self) -> Result<Value> {
        let mut v = serde_json::to_value(&self.series)?;
        let obj = v.as_object_mut().expect("series serializes to an object");
        obj.insert("formula".into(), json!(self.formula));
        obj.insert("params".into(), self.params.clone());
        obj.insert("dimension".into(), json!(format_rational(&self.dimension)));
        obj.insert("index".into(), json!(format_rational(&self.index())));
        obj.insert("weight".into(), json!(0));
        obj.insert("cy_flag".into(), json!(self.cy_flag));
        Ok(v)
    }

    /// Reads a report, or a bare series (then `dimension` must be given by the caller).
    pub fn from_json(v: &Value) -> Result<Self> {
        let series: PuiseuxSeries = serde_json::from_value(v.clone())?;
        let dimension = match v.get("dimension").and_then(Value::as_str) {
            Some(s) => crate::cyclo::parse_rational(s)?,
            None => return Err(Error::Parse("missing \"dimension\"".into())),
        };
        Ok(GenusReport {
            series,
            dimension,
            cy_flag: v.get("cy_flag").and_then(Value::as_bool).unwrap_or(true),
            formula: v
                .get("formula")
                .and_then(Value::as_str)
                .unwrap_or("input")
                .to_string(),
            params: v.get("params").cloned().unwrap_or(Value::Null),
        })
    }
}

/// The exponent lattice: twice the lcm of every denominator in the formula.
fn lattice(dens: impl IntoIterator<Item = u64>, trunc: &Truncation) -> Result<u32> {
    let mut l: u64 = 2;
    for d in dens {
        l = l.lcm(&d.max(1));
    }
    for r in [&trunc.qmax, &trunc.ywindow] {
        l = l.lcm(&r.denom().to_u64().unwrap_or(1));
    }
    let need = 2 * l;
    let n = match trunc.denom {
        None => need,
        Some(d) if (d as u64).is_multiple_of(need) => d as u64,
        Some(d) => {
            return Err(Error::OrderMismatch(format!(
                "denominator {d} is not a multiple of the required {need}"
            )))
        }
    };
    u32::try_from(n).map_err(|_| Error::Overflow("lattice denominator"))
}

/// One sector: a theta product over a ring, and the monomial to extract.
struct Job {
    label: String,
    dims: Vec<usize>,
    target: Vec<usize>,
    plan: Vec<Factor>,
}

fn run_jobs(jobs: Vec<Job>, l: u32, trunc: &Truncation) -> Result<Terms> {
    let lr = ri(l as i64);
    let qmax = (&trunc.qmax * &lr)
        .floor()
        .to_integer()
        .to_i64()
        .ok_or(Error::Overflow("qmax"))?;
    let ymax = (&trunc.ywindow * &lr)
        .floor()
        .to_integer()
        .to_i64()
        .ok_or(Error::Overflow("ywindow"))?;
    let results: Vec<Result<Terms>> = jobs
        .par_iter()
        .map(|j| {
            let ctx = Ctx {
                l,
                alg: NilAlg::new(&j.dims),
                qmax,
                ymax,
            };
            engine::expand(&ctx, &j.plan, std::slice::from_ref(&j.target))
                .map(|mut v| v.pop().unwrap_or_default())
                .map_err(|e| match e {
                    Error::SingularLeadingTerm(detail) => Error::SingularSector {
                        sector: j.label.clone(),
                        detail,
                    },
                    e => e,
                })
        })
        .collect();
    let mut total = Terms::new();
    for r in results {
        add_terms(&mut total, r?)?;
    }
    Ok(total)
}

fn finish(terms: Terms, l: u32, trunc: &Truncation, scale: BigRational) -> Result<PuiseuxSeries> {
    PuiseuxSeries::from_units(l, trunc.qmax.clone(), trunc.ywindow.clone(), terms)
        .scale(&CycloNum::from_rational(l, scale))
}

fn arg(r: BigRational, alpha: BigRational, beta: BigRational, k: Vec<i64>) -> Arg {
    Arg { r, alpha, beta, k }
}

fn unit_k(ng: usize, g: usize, c: i64) -> Vec<i64> {
    let mut k = vec![0; ng];
    k[g] = c;
    k
}

/// `R(x_g) = x_g·θ(X_g − z)/θ(X_g)`.
fn root_untwisted(plan: &mut Vec<Factor>, ng: usize, g: usize) {
    plan.push(Factor::XOverTheta(g, 1));
    plan.push(Factor::EtaCube(-1));
    plan.push(Factor::Theta(
        arg(ri(-1), ri(0), ri(0), unit_k(ng, g, 1)),
        1,
    ));
}

/// `1/R(0) = θ'(0)/(2πi·θ(−z))`: removes the trivial summand of the Euler sequence.
fn remove_trivial(plan: &mut Vec<Factor>, ng: usize) {
    plan.push(Factor::Theta(arg(ri(-1), ri(0), ri(0), vec![0; ng]), -1));
    plan.push(Factor::EtaCube(1));
}

/// `θ(X + α − βτ + cz − z)/θ(X + α − βτ + cz)·y^β`: a Chern root with character `(α, β)`.
fn root_twisted(
    plan: &mut Vec<Factor>,
    k: Vec<i64>,
    c: &BigRational,
    alpha: &BigRational,
    beta: &BigRational,
) {
    plan.push(Factor::Theta(
        arg(c - ri(1), alpha.clone(), -beta.clone(), k.clone()),
        1,
    ));
    plan.push(Factor::Theta(
        arg(c.clone(), alpha.clone(), -beta.clone(), k),
        -1,
    ));
    plan.push(Factor::YPow(beta.clone()));
}

/// Inverse of a root factor: the normal bundle of a hypersurface.
fn normal_factor(plan: &mut Vec<Factor>, k: Vec<i64>, alpha: &BigRational, beta: &BigRational) {
    plan.push(Factor::Theta(
        arg(ri(0), alpha.clone(), -beta.clone(), k.clone()),
        1,
    ));
    plan.push(Factor::Theta(
        arg(ri(-1), alpha.clone(), -beta.clone(), k),
        -1,
    ));
    plan.push(Factor::YPow(-beta.clone()));
}

/// Parses a character vector written as `[a, b/c, …]`.
pub fn parse_characters(s: &str) -> Result<Vec<BigRational>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [..], got {s:?}")))?;
    if inner.trim().is_empty() {
        return Ok(vec![]);
    }
    inner
        .split(',')
        .map(|t| crate::cyclo::parse_rational(t.trim()))
        .collect()
}

/// The group recorded in the params of an LG report.
pub fn group_from_params(w: &WeightSystem, params: &Value) -> Result<GroupSpec> {
    let gens = params
        .get("group")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("params carry no \"group\"".into()))?;
    let gens = gens
        .iter()
        .map(|g| {
            g.as_str()
                .ok_or_else(|| Error::Parse("group generator is not a string".into()))
                .and_then(parse_characters)
        })
        .collect::<Result<Vec<_>>>()?;
    GroupSpec::new(w.n(), gens)
}

fn fmt_vec(v: &[BigRational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("[{}]", parts.join(","))
}

fn weight_params(w: &WeightSystem) -> Value {
    json!({"weights": w.weights, "degree": w.degree})
}

/// `Z[W, H] = (1/|H|) Σ_{h_a,h_b} ∏_i θ((q_i−1)z + θ_i(h_b) − θ_i(h_a)τ)/θ(q_i z + θ_i(h_b) − θ_i(h_a)τ)·y^{θ_i(h_a)}`.
pub fn lg_genus(w: &WeightSystem, h: &GroupSpec, trunc: &Truncation) -> Result<GenusReport> {
    if h.n() != w.n() {
        return Err(Error::Invalid(format!(
            "group acts on {} coordinates, W has {}",
            h.n(),
            w.n()
        )));
    }
    let l = lattice(
        w.weights
            .iter()
            .map(|&x| x as u64)
            .chain([w.degree as u64])
            .chain(h.denominators()),
        trunc,
    )?;
    let qs = w.charges();
    let mut jobs = Vec::new();
    for ha in h.elements() {
        for hb in h.elements() {
            let mut plan = Vec::new();
            for (i, q) in qs.iter().enumerate() {
                root_twisted(&mut plan, vec![0], q, &hb[i], &ha[i]);
            }
            jobs.push(Job {
                label: format!("h_a={}, h_b={}", fmt_vec(ha), fmt_vec(hb)),
                dims: vec![1],
                target: vec![0],
                plan,
            });
        }
    }
    let terms = run_jobs(jobs, l, trunc)?;
    let gens: Vec<String> = h.generators().iter().map(|g| fmt_vec(g)).collect();
    let mut params = weight_params(w);
    params["group"] = json!(gens);
    Ok(GenusReport {
        series: finish(terms, l, trunc, rq(1, h.order() as i64))?,
        dimension: w.central_charge(),
        cy_flag: w.cy_flag(),
        formula: "lg".into(),
        params,
    })
}

/// The `(h_a, h_b) = (1, 1)` summand of [`lg_genus`], without the `1/|H|`.
pub fn lg_identity_sector(w: &WeightSystem, trunc: &Truncation) -> Result<PuiseuxSeries> {
    let l = lattice(
        w.weights.iter().map(|&x| x as u64).chain([w.degree as u64]),
        trunc,
    )?;
    let mut plan = Vec::new();
    for q in w.charges() {
        root_twisted(&mut plan, vec![0], &q, &ri(0), &ri(0));
    }
    let job = Job {
        label: "identity".into(),
        dims: vec![1],
        target: vec![0],
        plan,
    };
    finish(run_jobs(vec![job], l, trunc)?, l, trunc, ri(1))
}

/// The equivariant contribution of the origin of `C^n/μ_D` at `u = c·z`:
/// `(1/D) Σ_{a,b<D} ∏_i θ(c·q_i z + λ_i(a) − λ_i(b)τ − z)/θ(c·q_i z + λ_i(a) − λ_i(b)τ)·y^{λ_i(b)}`
/// with `λ_i(a) = a·w_i/D mod 1`.
pub fn origin_contrib_equivariant(
    w: &WeightSystem,
    c: &BigRational,
    trunc: &Truncation,
) -> Result<GenusReport> {
    let d = w.degree as i64;
    let cq: Vec<u64> = w
        .charges()
        .iter()
        .map(|q| (c * q).denom().to_u64().unwrap_or(1))
        .collect();
    let l = lattice(
        w.weights
            .iter()
            .map(|&x| x as u64)
            .chain([w.degree as u64])
            .chain(cq),
        trunc,
    )?;
    let mut jobs = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let mut plan = Vec::new();
            for &wi in &w.weights {
                let la = frac(&rq(a * wi as i64, d));
                let lb = frac(&rq(b * wi as i64, d));
                let cq = c * rq(wi as i64, d);
                root_twisted(&mut plan, vec![0], &cq, &la, &lb);
            }
            jobs.push(Job {
                label: format!("a={a}, b={b}"),
                dims: vec![1],
                target: vec![0],
                plan,
            });
        }
    }
    let terms = run_jobs(jobs, l, trunc)?;
    let mut params = weight_params(w);
    params["c"] = json!(format_rational(c));
    Ok(GenusReport {
        series: finish(terms, l, trunc, rq(1, d))?,
        dimension: w.central_charge(),
        cy_flag: w.cy_flag(),
        formula: "origin".into(),
        params,
    })
}

/// `∫_{P^{n−1}} R(x)^n/R(0)·θ(nX)/θ(nX − z)`: the smooth degree-`n` hypersurface.
pub fn cy_fermat_genus(n: u32, trunc: &Truncation) -> Result<GenusReport> {
    if n < 2 {
        return Err(Error::Invalid("need n ≥ 2".into()));
    }
    let l = lattice([n as u64], trunc)?;
    let mut plan = Vec::new();
    for _ in 0..n {
        root_untwisted(&mut plan, 1, 0);
    }
    remove_trivial(&mut plan, 1);
    normal_factor(&mut plan, vec![n as i64], &ri(0), &ri(0));
    let job = Job {
        label: "P^{n-1}".into(),
        dims: vec![n as usize],
        target: vec![n as usize - 1],
        plan,
    };
    Ok(GenusReport {
        series: finish(run_jobs(vec![job], l, trunc)?, l, trunc, ri(1))?,
        dimension: ri(n as i64 - 2),
        cy_flag: true,
        formula: "cy-fermat".into(),
        params: json!({"n": n}),
    })
}

/// The degree-`D` hypersurface in the weighted projective stack `P(w_1, …, w_n)`.
///
/// Sums over inertia pairs `(λ_g, λ_h) ∈ (Q/Z)²` whose fixed locus
/// `P(w_J)`, `J = {i : w_i·λ_g, w_i·λ_h ∈ Z}`, is nonempty. Roots are `w_i·x`
/// with characters `w_i·λ`, the `O(D)` factor carries `D·λ`, and
/// `∫_{P(w_J)} x^{|J|−1} = 1/∏_J w_j`.
pub fn weighted_cy_genus(w: &WeightSystem, trunc: &Truncation) -> Result<GenusReport> {
    if !w.cy_flag() {
        return Err(Error::Invalid(format!(
            "weights {:?} do not sum to the degree {}",
            w.weights, w.degree
        )));
    }
    let big_l = w.weights.iter().fold(1u64, |acc, &x| acc.lcm(&(x as u64)));
    let l = lattice(
        w.weights
            .iter()
            .map(|&x| x as u64)
            .chain([w.degree as u64, big_l]),
        trunc,
    )?;
    let dd = w.degree as i64;
    let lq = big_l as i64;
    let mut jobs = Vec::new();
    for a in 0..lq {
        for b in 0..lq {
            let (lg, lh) = (rq(a, lq), rq(b, lq));
            let chars: Vec<(BigRational, BigRational)> = w
                .weights
                .iter()
                .map(|&wi| (frac(&(&lg * ri(wi as i64))), frac(&(&lh * ri(wi as i64)))))
                .collect();
            let j: Vec<usize> = (0..w.n())
                .filter(|&i| chars[i].0.is_zero() && chars[i].1.is_zero())
                .collect();
            if j.is_empty() {
                continue;
            }
            let mut plan = Vec::new();
            for (i, (ca, cb)) in chars.iter().enumerate() {
                let wi = w.weights[i] as i64;
                if ca.is_zero() && cb.is_zero() {
                    plan.push(Factor::XOverTheta(0, wi));
                    plan.push(Factor::EtaCube(-1));
                    plan.push(Factor::Theta(arg(ri(-1), ri(0), ri(0), vec![wi]), 1));
                } else {
                    root_twisted(&mut plan, vec![wi], &ri(0), ca, cb);
                }
            }
            remove_trivial(&mut plan, 1);
            let nd = (frac(&(&lg * ri(dd))), frac(&(&lh * ri(dd))));
            normal_factor(&mut plan, vec![dd], &nd.0, &nd.1);
            let vol: i64 = j.iter().map(|&i| w.weights[i] as i64).product();
            plan.push(Factor::Scalar(CycloNum::from_rational(l, rq(1, vol))));
            jobs.push(Job {
                label: format!(
                    "lambda=({}, {}), J={:?}",
                    format_rational(&lg),
                    format_rational(&lh),
                    j
                ),
                dims: vec![j.len()],
                target: vec![j.len() - 1],
                plan,
            });
        }
    }
    let terms = run_jobs(jobs, l, trunc)?;
    Ok(GenusReport {
        series: finish(terms, l, trunc, ri(1))?,
        dimension: ri(w.n() as i64 - 2),
        cy_flag: true,
        formula: "cy-weighted".into(),
        params: weight_params(w),
    })
}

/// The elliptic genus of a phase of the `(n, m)` hybrid model.
pub fn hybrid_genus(
    spec: HybridSpec,
    phase: HybridPhase,
    trunc: &Truncation,
) -> Result<GenusReport> {
    let HybridSpec { n, m } = spec;
    if n < 2 || m < 2 {
        return Err(Error::Invalid("need n, m ≥ 2".into()));
    }
    let l = lattice([n as u64, m as u64], trunc)?;
    let (n64, m64) = (n as i64, m as i64);
    let jobs = match phase {
        HybridPhase::H1 | HybridPhase::H2 => {
            // fibre rank and group order k, base P^{p−1}. The fibre roots are
            // −(p/k)·x, so the ring generator is u = x/k.
            let (k, p) = if phase == HybridPhase::H1 {
                (n64, m64)
            } else {
                (m64, n64)
            };
            let mut jobs = Vec::new();
            for a in 0..k {
                for b in 0..k {
                    let mut plan = Vec::new();
                    for _ in 0..k {
                        root_twisted(&mut plan, vec![-p], &rq(1, k), &rq(a, k), &rq(b, k));
                    }
                    for _ in 0..p {
                        plan.push(Factor::XOverTheta(0, k));
                        plan.push(Factor::EtaCube(-1));
                        plan.push(Factor::Theta(arg(ri(-1), ri(0), ri(0), vec![k]), 1));
                    }
                    remove_trivial(&mut plan, 1);
                    jobs.push(Job {
                        label: format!("a={a}, b={b}"),
                        dims: vec![p as usize],
                        target: vec![p as usize - 1],
                        plan,
                    });
                }
            }
            jobs
        }
        HybridPhase::H3 => {
            let mut plan = Vec::new();
            for _ in 0..n {
                root_untwisted(&mut plan, 2, 0);
            }
            remove_trivial(&mut plan, 2);
            for _ in 0..m {
                root_untwisted(&mut plan, 2, 1);
            }
            remove_trivial(&mut plan, 2);
            normal_factor(&mut plan, vec![n64, m64], &ri(0), &ri(0));
            vec![Job {
                label: "P^{n-1} x P^{m-1}".into(),
                dims: vec![n as usize, m as usize],
                target: vec![n as usize - 1, m as usize - 1],
                plan,
            }]
        }
    };
    // 1/k for the orbifold average, k^{1−p} from x^{p−1} = k^{p−1}·u^{p−1}
    let scale = match phase {
        HybridPhase::H1 => rq(1, n64.pow(m)),
        HybridPhase::H2 => rq(1, m64.pow(n)),
        HybridPhase::H3 => BigRational::one(),
    };
    Ok(GenusReport {
        series: finish(run_jobs(jobs, l, trunc)?, l, trunc, scale)?,
        dimension: ri(n64 + m64 - 3),
        cy_flag: true,
        formula: format!("hybrid-{}", phase.tag()),
        params: json!({"n": n, "m": m}),
    })
}
