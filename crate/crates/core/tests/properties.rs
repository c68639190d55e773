use epg_core::cyclo::CycloNum;
use epg_core::pseries::{int, rat, series_equal, PuiseuxSeries};
use epg_core::theta::{is_zero_point, theta, theta_alternating, ThetaArg};
use num_rational::BigRational;
use proptest::prelude::*;

const D: u32 = 4;

fn cyclo(order: u32) -> impl Strategy<Value = CycloNum> {
    let deg = match order {
        1 | 2 => 1,
        3 | 4 | 6 => 2,
        _ => 4,
    };
    prop::collection::vec((-5i64..=5, 1i64..=3), deg).prop_map(move |cs| {
        let coeffs = cs.into_iter().map(|(n, d)| rat(n, d)).collect();
        CycloNum::from_coeffs(order, coeffs).unwrap()
    })
}

/// Series in `q^{1/4}, y^{1/4}` through `q^2`, window `|y| ≤ 3`.
///
/// The y-window is two-sided, so truncated products are only exact while
/// every partial product stays inside it; terms keep `|y| ≤ 1` so that
/// triple products do.
fn series() -> impl Strategy<Value = PuiseuxSeries> {
    prop::collection::vec((0i64..=8, -4i64..=4, cyclo(D)), 0..6).prop_map(|ts| {
        let terms = ts.into_iter().map(|(a, b, c)| (rat(a, 4), rat(b, 4), c));
        PuiseuxSeries::from_terms(D, int(2), int(3), terms).unwrap()
    })
}

/// A nonzero constant term plus higher q powers, so the inverse exists.
fn unit_series() -> impl Strategy<Value = PuiseuxSeries> {
    (
        1i64..=4,
        prop::collection::vec((1i64..=8, -4i64..=4, cyclo(D)), 0..4),
    )
        .prop_map(|(c0, ts)| {
            let mut terms: Vec<_> = ts
                .into_iter()
                .map(|(a, b, c)| (rat(a, 4), rat(b, 4), c))
                .collect();
            terms.push((int(0), int(0), CycloNum::from_int(D, c0)));
            PuiseuxSeries::from_terms(D, int(2), int(3), terms).unwrap()
        })
}

fn same(a: &PuiseuxSeries, b: &PuiseuxSeries) -> bool {
    series_equal(a, b).unwrap().equal
}

fn small_rat() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_ring_laws(a in series(), b in series(), c in series()) {
        prop_assert!(same(&a.add(&b).unwrap(), &b.add(&a).unwrap()));
        prop_assert!(same(&a.mul(&b).unwrap(), &b.mul(&a).unwrap()));
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(same(&left, &right));
        let dist = a.mul(&b.add(&c).unwrap()).unwrap();
        prop_assert!(same(&dist, &a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()));
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn series_inverse(u in unit_series()) {
        let one = PuiseuxSeries::constant(D, CycloNum::one(D), int(2), int(3)).unwrap();
        let inv = u.invert().unwrap();
        // products only hold on the shrunken y-window of the inverse
        let prod = u.mul(&inv).unwrap();
        let w = prod.ywindow().clone();
        prop_assert!(same(&prod, &one.truncate(&int(2), &w)));
    }

    #[test]
    fn cyclo_field_laws(x in cyclo(12), y in cyclo(12), k in prop::sample::select(vec![1i64, 5, 7, 11])) {
        if !x.is_zero() {
            prop_assert!(x.mul(&x.inv().unwrap()).unwrap().is_one());
        }
        let xy = x.mul(&y).unwrap();
        prop_assert_eq!(xy.galois(k), x.galois(k).mul(&y.galois(k)).unwrap());
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert_eq!(x.embed(24).unwrap().mul(&y.embed(24).unwrap()).unwrap(), xy.embed(24).unwrap());
    }

    #[test]
    fn theta_product_equals_alternating_sum(r in small_rat(), a in 0i64..8, t in 0i64..4) {
        let arg = ThetaArg::new(r, rat(a, 8), rat(t, 4));
        prop_assume!(!is_zero_point(&arg));
        let (qmax, yw) = (int(3), int(6));
        let product = theta(&arg, 48, &qmax, &yw).unwrap().coeff(&[0]).clone();
        let alternating = theta_alternating(&arg, 48, &qmax, &yw).unwrap();
        let cmp = series_equal(&product, &alternating).unwrap();
        prop_assert!(cmp.equal, "{:?}", cmp);
    }
}
