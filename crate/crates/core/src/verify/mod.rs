//! Checks on computed genera: Jacobi laws on series, correspondence
//! equalities between phases, independent oracles, window-stability audits
//! and numeric cross-checks.
//!
//! A check never reports a vacuous pass. When the compared region is empty or
//! too small it reports [`Status::Inconclusive`].

mod evaluate;
mod oracle;

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cyclo::{parse_rational, CycloNum};
use crate::error::{Error, Result};
use crate::genus::{
    cy_fermat_genus, hybrid_genus, lg_genus, lg_identity_sector, origin_contrib_equivariant,
    parse_characters, weighted_cy_genus, GenusReport, GroupSpec, HybridPhase, HybridSpec,
    Truncation, WeightSystem,
};
use crate::pseries::{int, series_equal, PuiseuxSeries};

pub use evaluate::{
    check_numeric, check_s_law, cy_fermat_numeric, eta_cubed, genus_numeric, lg_numeric,
    origin_numeric, Sample,
};
pub use oracle::{hodge_oracle, spectrum_oracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub passed: bool,
    /// First mismatch or largest deviation; empty on a pass.
    pub detail: String,
    /// The truncation region actually compared.
    pub region: String,
}

impl CheckReport {
    pub fn pass(name: impl Into<String>, region: impl Into<String>) -> Self {
        Self::with(name, Status::Pass, String::new(), region)
    }

    pub fn fail(
        name: impl Into<String>,
        detail: impl Into<String>,
        region: impl Into<String>,
    ) -> Self {
        Self::with(name, Status::Fail, detail, region)
    }

    pub fn inconclusive(
        name: impl Into<String>,
        detail: impl Into<String>,
        region: impl Into<String>,
    ) -> Self {
        Self::with(name, Status::Inconclusive, detail, region)
    }

    fn with(
        name: impl Into<String>,
        status: Status,
        detail: impl Into<String>,
        region: impl Into<String>,
    ) -> Self {
        let detail = if status == Status::Pass {
            String::new()
        } else {
            detail.into()
        };
        CheckReport {
            name: name.into(),
            passed: status == Status::Pass,
            status,
            detail,
            region: region.into(),
        }
    }

    /// Combines sub-checks: any failure fails, otherwise any inconclusive part
    /// makes the whole inconclusive.
    pub fn all(name: impl Into<String>, parts: Vec<CheckReport>) -> Self {
        let name = name.into();
        let region = parts.first().map(|p| p.region.clone()).unwrap_or_default();
        let pick = |s: Status| parts.iter().find(|p| p.status == s);
        if let Some(p) = pick(Status::Fail) {
            return Self::fail(name, format!("{}: {}", p.name, p.detail), p.region.clone());
        }
        if let Some(p) = pick(Status::Inconclusive) {
            return Self::inconclusive(name, format!("{}: {}", p.name, p.detail), p.region.clone());
        }
        if parts.is_empty() {
            return Self::inconclusive(name, "nothing was compared", region);
        }
        Self::pass(name, region)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        write!(f, "{tag} {} [{}]", self.name, self.region)?;
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

fn region_of(s: &PuiseuxSeries) -> String {
    format!("q <= {}, |y| <= {}", s.qmax(), s.ywindow())
}

fn lifted(a: &PuiseuxSeries, b: &PuiseuxSeries) -> Result<(PuiseuxSeries, PuiseuxSeries)> {
    let d = num_integer::lcm(a.denom(), b.denom());
    Ok((a.lift(d)?, b.lift(d)?))
}

/// Exact comparison of two series on the meet of their regions.
///
/// On a mismatch, reports whether the two differ only by a constant factor.
pub fn compare_series(name: &str, a: &PuiseuxSeries, b: &PuiseuxSeries) -> Result<CheckReport> {
    let (a, b) = lifted(a, b)?;
    let cmp = series_equal(&a, &b)?;
    let region = format!("q <= {}, |y| <= {}", cmp.qmax, cmp.ywindow);
    if cmp.qmax.starts_with('-') || cmp.ywindow.starts_with('-') {
        return Ok(CheckReport::inconclusive(
            name,
            "empty comparison region",
            region,
        ));
    }
    match cmp.mismatch {
        None => Ok(CheckReport::pass(name, region)),
        Some(m) => {
            let mut detail = format!("first mismatch {m}");
            if let Some(c) = constant_factor(&a, &b)? {
                detail.push_str(&format!("; the sides differ by the constant factor {c}"));
            }
            Ok(CheckReport::fail(name, detail, region))
        }
    }
}

fn constant_factor(a: &PuiseuxSeries, b: &PuiseuxSeries) -> Result<Option<CycloNum>> {
    let Some((e, cb)) = b.terms().next() else {
        return Ok(None);
    };
    let ca = a.coeff(&e.eq, &e.ey);
    if ca.is_zero() {
        return Ok(None);
    }
    let c = ca.div(cb)?;
    Ok(series_equal(a, &b.scale(&c)?)?.equal.then_some(c))
}

/// The three transformation laws of a weak Jacobi form of weight 0 and index
/// `m = d/2` that are visible on q-expansions:
/// `z ↦ z+1` (sign `(−1)^{2m}`), `z ↦ z+τ` (factor `(−1)^{2m}q^{−m}y^{−2m}`) and `τ ↦ τ+1`.
pub fn check_jacobi(r: &GenusReport) -> CheckReport {
    let s = &r.series;
    let m = r.index();
    let region = region_of(s);
    let name = format!("jacobi {} index {m}", r.formula);
    if !r.cy_flag {
        return CheckReport::inconclusive(
            name,
            "not a Calabi-Yau report, no index is claimed",
            region,
        );
    }
    if s.ywindow() < &(int(2) * &m) || s.ywindow().is_zero() {
        return CheckReport::inconclusive(name, "y-window smaller than twice the index", region);
    }
    let parts = match jacobi_parts(s, &m) {
        Ok(p) => p,
        Err(e) => return CheckReport::inconclusive(name, e.to_string(), region),
    };
    CheckReport::all(name, parts)
}

fn jacobi_parts(s: &PuiseuxSeries, m: &BigRational) -> Result<Vec<CheckReport>> {
    let mut parts = Vec::new();
    // z → z+1
    let shifted = s.substitute_y_scale(&int(1), &int(0))?;
    let sign = CycloNum::from_int(s.denom(), parity_sign(m));
    let expect = s.scale(&sign)?;
    parts.push(compare_series("z -> z+1", &shifted, &expect)?);
    // τ → τ+1
    parts.push(compare_series("tau -> tau+1", &s.substitute_q_phase()?, s)?);
    parts.push(elliptic_law(s, m));
    Ok(parts)
}

/// `(−1)^{2m}`; half-integral index comes with half-integral powers of `y`.
fn parity_sign(m: &BigRational) -> i64 {
    let twice = (int(2) * m).to_integer();
    if num_integer::Integer::is_odd(&twice) {
        -1
    } else {
        1
    }
}

/// `φ(z+τ) = (−1)^{2m}q^{−m}y^{−2m}φ(z)` read on coefficients:
/// `c(a, b) = (−1)^{2m}·c(a+b+m, b+2m)`.
///
/// Every stored term is paired with its image and its preimage; pairs leaving
/// the truncation region are skipped.
fn elliptic_law(s: &PuiseuxSeries, m: &BigRational) -> CheckReport {
    let name = "z -> z+tau";
    let region = region_of(s);
    let inside = |a: &BigRational, b: &BigRational| a <= s.qmax() && b.abs() <= *s.ywindow();
    let two_m = int(2) * m;
    let flip = parity_sign(m) < 0;
    let mut compared = 0usize;
    for (e, c) in s.terms() {
        let image = (&e.eq + &e.ey + m, &e.ey + &two_m);
        let pre_y = &e.ey - &two_m;
        let pre = (&e.eq - &pre_y - m, pre_y);
        for (a, b) in [image, pre] {
            if !inside(&a, &b) {
                continue;
            }
            compared += 1;
            let other = s.coeff(&a, &b);
            let other = if flip { other.neg() } else { other };
            if &other != c {
                return CheckReport::fail(
                    name,
                    format!(
                        "c(q^{}, y^{}) = {c} but c(q^{a}, y^{b}) = {other}",
                        e.eq, e.ey
                    ),
                    region,
                );
            }
        }
    }
    if compared == 0 && !s.is_zero() {
        return CheckReport::inconclusive(name, "no coefficient pair fits in the region", region);
    }
    CheckReport::pass(name, region)
}

fn trunc(qmax: i64, ywindow: i64) -> Truncation {
    Truncation::new(int(qmax), int(ywindow))
}

/// LG orbifold of the Fermat polynomial of degree `n` against the smooth CY hypersurface.
pub fn verify_lg_cy(n: u32, qmax: i64, ywindow: i64) -> Result<CheckReport> {
    let t = trunc(qmax, ywindow);
    let w = WeightSystem::fermat(n)?;
    let lg = lg_genus(&w, &GroupSpec::grading(&w), &t)?;
    let cy = cy_fermat_genus(n, &t)?;
    compare_series(&format!("lg-cy n={n}"), &lg.series, &cy.series)
}

/// LG orbifold against the weighted hypersurface. Quasi-smoothness of `W` is
/// the caller's responsibility.
pub fn verify_weighted_lg_cy(w: &WeightSystem, qmax: i64, ywindow: i64) -> Result<CheckReport> {
    let t = trunc(qmax, ywindow);
    let lg = lg_genus(w, &GroupSpec::grading(w), &t)?;
    let cy = weighted_cy_genus(w, &t)?;
    compare_series(&format!("weighted lg-cy {w}"), &lg.series, &cy.series)
}

/// Pairwise equality of the three hybrid phases.
pub fn verify_hybrid(spec: HybridSpec, qmax: i64, ywindow: i64) -> Result<CheckReport> {
    let t = trunc(qmax, ywindow);
    let phases = [HybridPhase::H1, HybridPhase::H2, HybridPhase::H3];
    let series = phases
        .par_iter()
        .map(|&p| hybrid_genus(spec, p, &t).map(|r| r.series))
        .collect::<Result<Vec<_>>>()?;
    let mut parts = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            let name = format!("{} = {}", phases[i].tag(), phases[j].tag());
            parts.push(compare_series(&name, &series[i], &series[j])?);
        }
    }
    Ok(CheckReport::all(
        format!("hybrid ({},{})", spec.n, spec.m),
        parts,
    ))
}

/// The equivariant origin contribution at `u = z` against the LG genus.
pub fn verify_origin(w: &WeightSystem, qmax: i64, ywindow: i64) -> Result<CheckReport> {
    let t = trunc(qmax, ywindow);
    let o = origin_contrib_equivariant(w, &int(1), &t)?;
    let lg = lg_genus(w, &GroupSpec::grading(w), &t)?;
    compare_series(&format!("origin {w}"), &o.series, &lg.series)
}

/// LG Fermat 4 against the quintic: must fail with a located mismatch.
pub fn negative_control(qmax: i64, ywindow: i64) -> Result<CheckReport> {
    let t = trunc(qmax, ywindow);
    let w = WeightSystem::fermat(4)?;
    let lg = lg_genus(&w, &GroupSpec::grading(&w), &t)?;
    let cy = cy_fermat_genus(5, &t)?;
    compare_series("negative control lg4 vs cy5", &lg.series, &cy.series)
}

/// The identity sector of the LG genus at `q⁰` against `(−1)^n·y^{−n/2}·Sp_W(y)`.
pub fn check_untwisted_q0(w: &WeightSystem) -> Result<CheckReport> {
    let n = w.n() as i64;
    let ident = lg_identity_sector(w, &trunc(0, n))?.q_limit()?;
    let sp = spectrum_oracle(w)?;
    let sign = CycloNum::from_int(sp.denom(), if n % 2 == 0 { 1 } else { -1 });
    let expect = sp.mul_monomial(&int(0), &BigRational::new((-n).into(), 2.into()), &sign)?;
    compare_series(&format!("untwisted q0 {w}"), &ident, &expect)
}

/// The `q⁰` slice of the Fermat CY genus against the Hodge-number oracle.
pub fn check_hodge(n: u32) -> Result<CheckReport> {
    let t = trunc(0, n as i64);
    let g = cy_fermat_genus(n, &t)?.series.q_limit()?;
    compare_series(&format!("hodge n={n}"), &g, &hodge_oracle(n, n)?)
}

/// A genus computation, independent of its truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Computation {
    Lg {
        weights: Vec<u32>,
        degree: u32,
        /// Generators as `[a, b, …]` strings; empty means `⟨J_W⟩`.
        #[serde(default)]
        group: Vec<String>,
    },
    CyFermat {
        n: u32,
    },
    CyWeighted {
        weights: Vec<u32>,
        degree: u32,
    },
    Hybrid {
        n: u32,
        m: u32,
        phase: String,
    },
    Origin {
        weights: Vec<u32>,
        degree: u32,
        #[serde(default = "one_str")]
        c: String,
    },
}

fn one_str() -> String {
    "1".into()
}

impl Computation {
    pub fn run(&self, t: &Truncation) -> Result<GenusReport> {
        match self {
            Computation::Lg {
                weights,
                degree,
                group,
            } => {
                let w = WeightSystem::new(weights.clone(), *degree)?;
                let h = if group.is_empty() {
                    GroupSpec::grading(&w)
                } else {
                    let gens = group
                        .iter()
                        .map(|g| parse_characters(g))
                        .collect::<Result<Vec<_>>>()?;
                    GroupSpec::new(w.n(), gens)?
                };
                lg_genus(&w, &h, t)
            }
            Computation::CyFermat { n } => cy_fermat_genus(*n, t),
            Computation::CyWeighted { weights, degree } => {
                weighted_cy_genus(&WeightSystem::new(weights.clone(), *degree)?, t)
            }
            Computation::Hybrid { n, m, phase } => {
                hybrid_genus(HybridSpec { n: *n, m: *m }, phase.parse()?, t)
            }
            Computation::Origin { weights, degree, c } => origin_contrib_equivariant(
                &WeightSystem::new(weights.clone(), *degree)?,
                &parse_rational(c)?,
                t,
            ),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Computation::Lg {
                weights, degree, ..
            } => format!("lg {weights:?};{degree}"),
            Computation::CyFermat { n } => format!("cy-fermat {n}"),
            Computation::CyWeighted { weights, degree } => {
                format!("cy-weighted {weights:?};{degree}")
            }
            Computation::Hybrid { n, m, phase } => format!("hybrid ({n},{m}) {phase}"),
            Computation::Origin { weights, degree, c } => {
                format!("origin {weights:?};{degree} c={c}")
            }
        }
    }
}

/// Recomputes at windows `w1 < w2` and asserts agreement on `|y| ≤ w1`.
pub fn check_window_stability(
    comp: &Computation,
    qmax: i64,
    w1: i64,
    w2: i64,
) -> Result<CheckReport> {
    if w1 >= w2 {
        return Err(Error::Invalid(format!("need w1 < w2, got {w1} and {w2}")));
    }
    let a = comp.run(&trunc(qmax, w1))?;
    let b = comp.run(&trunc(qmax, w2))?;
    compare_series(
        &format!("window {w1}/{w2} {}", comp.label()),
        &a.series,
        &b.series,
    )
}

/// One entry of a campaign file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignItem {
    pub check: String,
    #[serde(default)]
    pub params: Value,
}

fn param<'a>(p: &'a Value, key: &str) -> Result<&'a Value> {
    p.get(key)
        .ok_or_else(|| Error::Parse(format!("missing parameter {key:?}")))
}

fn param_i64(p: &Value, key: &str, default: Option<i64>) -> Result<i64> {
    match (p.get(key), default) {
        (Some(v), _) => v
            .as_i64()
            .ok_or_else(|| Error::Parse(format!("parameter {key:?} is not an integer"))),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(Error::Parse(format!("missing parameter {key:?}"))),
    }
}

fn param_u32(p: &Value, key: &str) -> Result<u32> {
    let v = param_i64(p, key, None)?;
    u32::try_from(v).map_err(|_| Error::Parse(format!("parameter {key:?} out of range")))
}

fn param_weights(p: &Value) -> Result<WeightSystem> {
    let weights: Vec<u32> = serde_json::from_value(param(p, "weights")?.clone())?;
    WeightSystem::new(weights, param_u32(p, "degree")?)
}

fn param_computation(p: &Value) -> Result<Computation> {
    Ok(serde_json::from_value(param(p, "computation")?.clone())?)
}

fn param_samples(p: &Value) -> Result<Vec<Sample>> {
    match p.get("samples") {
        None => Ok(Sample::defaults()),
        Some(v) => serde_json::from_value(v.clone()).map_err(Into::into),
    }
}

/// Runs one campaign entry. `"expect": "fail"` in the params inverts the
/// outcome, for negative controls.
pub fn run_check(item: &CampaignItem) -> Result<CheckReport> {
    let p = &item.params;
    let (q, w) = (
        param_i64(p, "qmax", Some(2))?,
        param_i64(p, "ywindow", Some(4))?,
    );
    let digits = param_i64(p, "digits", Some(40))? as u32;
    let report = match item.check.as_str() {
        "lgcy" => verify_lg_cy(param_u32(p, "n")?, q, w)?,
        "weighted-lgcy" => verify_weighted_lg_cy(&param_weights(p)?, q, w)?,
        "hybrid" => verify_hybrid(
            HybridSpec {
                n: param_u32(p, "n")?,
                m: param_u32(p, "m")?,
            },
            q,
            w,
        )?,
        "origin" => verify_origin(&param_weights(p)?, q, w)?,
        "jacobi" => check_jacobi(&param_computation(p)?.run(&trunc(q, w))?),
        "window-stability" => check_window_stability(
            &param_computation(p)?,
            q,
            param_i64(p, "w1", None)?,
            param_i64(p, "w2", None)?,
        )?,
        "numeric" => check_numeric(
            &param_computation(p)?.run(&trunc(q, w))?,
            &param_samples(p)?,
            digits,
        ),
        "s-law" => {
            let r = param_computation(p)?.run(&trunc(0, 0))?;
            let tol = p.get("tolerance").and_then(Value::as_f64).unwrap_or(1e-20);
            check_s_law(&r, &param_samples(p)?, digits, tol)
        }
        "untwisted-q0" => check_untwisted_q0(&param_weights(p)?)?,
        "hodge" => check_hodge(param_u32(p, "n")?)?,
        "negative-control" => negative_control(q, w)?,
        other => return Err(Error::Parse(format!("unknown check {other:?}"))),
    };
    let expect_fail = p.get("expect").and_then(Value::as_str) == Some("fail");
    Ok(if expect_fail { invert(report) } else { report })
}

fn invert(r: CheckReport) -> CheckReport {
    let name = format!("{} (expected to fail)", r.name);
    match r.status {
        Status::Fail => CheckReport {
            name,
            status: Status::Pass,
            passed: true,
            detail: format!("failed as expected: {}", r.detail),
            region: r.region,
        },
        Status::Pass => CheckReport::fail(name, "passed but was expected to fail", r.region),
        Status::Inconclusive => CheckReport { name, ..r },
    }
}

/// Runs all entries concurrently. Reports are ordered by name; an entry that
/// errors becomes a failing report carrying the error.
pub fn run_campaign(items: &[CampaignItem]) -> Vec<CheckReport> {
    let mut out: Vec<CheckReport> = items
        .par_iter()
        .map(|it| {
            run_check(it)
                .unwrap_or_else(|e| CheckReport::fail(it.check.clone(), format!("error: {e}"), ""))
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

impl fmt::Display for WeightSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weights.iter().map(u32::to_string).collect();
        write!(f, "({};{})", w.join(","), self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(v: i64, w: i64) -> GenusReport {
        let s = PuiseuxSeries::constant(8, CycloNum::from_int(8, v), int(3), int(w)).unwrap();
        GenusReport {
            series: s,
            dimension: int(0),
            cy_flag: true,
            formula: "const".into(),
            params: Value::Null,
        }
    }

    #[test]
    fn jacobi_on_constants() {
        assert!(check_jacobi(&constant(2, 2)).passed);
        // a nonzero constant is not of index 1
        let mut r = constant(2, 4);
        r.dimension = int(2);
        let c = check_jacobi(&r);
        assert_eq!(c.status, Status::Fail);
        assert!(c.detail.contains("z -> z+tau"), "{}", c.detail);
        // window too small for the index
        let mut r = constant(0, 1);
        r.dimension = int(2);
        assert_eq!(check_jacobi(&r).status, Status::Inconclusive);
    }

    #[test]
    fn jacobi_on_k3_and_zero() {
        let t = trunc(2, 4);
        assert!(check_jacobi(&cy_fermat_genus(4, &t).unwrap()).passed);
        assert!(check_jacobi(&cy_fermat_genus(3, &t).unwrap()).passed);
        // half-integral index: the elliptic law carries a sign
        let quintic = cy_fermat_genus(5, &trunc(1, 5)).unwrap();
        assert!(check_jacobi(&quintic).passed, "{}", check_jacobi(&quintic));
        // a perturbed K3 series fails the elliptic law
        let mut r = cy_fermat_genus(4, &t).unwrap();
        let d = r.series.denom();
        let bump = PuiseuxSeries::monomial(
            d,
            &int(1),
            &int(0),
            CycloNum::from_int(d, 1),
            int(2),
            int(4),
        )
        .unwrap();
        r.series = r.series.add(&bump).unwrap();
        assert_eq!(check_jacobi(&r).status, Status::Fail);
    }

    #[test]
    fn combining() {
        let p = CheckReport::pass("a", "r");
        let f = CheckReport::fail("b", "bad", "r");
        let i = CheckReport::inconclusive("c", "small", "r");
        assert!(CheckReport::all("x", vec![p.clone(), p.clone()]).passed);
        assert_eq!(
            CheckReport::all("x", vec![p.clone(), i.clone()]).status,
            Status::Inconclusive
        );
        assert_eq!(CheckReport::all("x", vec![i, f, p]).status, Status::Fail);
        assert_eq!(CheckReport::all("x", vec![]).status, Status::Inconclusive);
    }

    #[test]
    fn constant_factor_is_reported() {
        let t = trunc(1, 3);
        let k3 = cy_fermat_genus(4, &t).unwrap().series;
        let twice = k3.scale(&CycloNum::from_int(k3.denom(), 2)).unwrap();
        let r = compare_series("x", &twice, &k3).unwrap();
        assert!(!r.passed);
        assert!(r.detail.contains("constant factor 2"), "{}", r.detail);
    }

    #[test]
    fn small_correspondences() {
        assert!(verify_lg_cy(2, 2, 4).unwrap().passed);
        assert!(verify_lg_cy(3, 2, 4).unwrap().passed);
        let r = negative_control(1, 3).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.detail.contains("at q^"));
    }

    #[test]
    fn campaign_entries() {
        let items: Vec<CampaignItem> = serde_json::from_str(
            r#"[
                {"check": "lgcy", "params": {"n": 2, "qmax": 1, "ywindow": 3}},
                {"check": "negative-control", "params": {"qmax": 0, "ywindow": 3, "expect": "fail"}},
                {"check": "window-stability", "params": {"computation": {"kind": "cy-fermat", "n": 3}, "qmax": 1, "w1": 2, "w2": 4}},
                {"check": "nonsense"}
            ]"#,
        )
        .unwrap();
        let out = run_campaign(&items);
        assert_eq!(out.len(), 4);
        let names: Vec<&str> = out.iter().map(|r| r.name.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert_eq!(out.iter().filter(|r| r.passed).count(), 3);
        assert!(out.iter().any(|r| r.detail.contains("unknown check")));
    }
}
