use std::sync::OnceLock;

use proptest::prelude::*;

use pzeta_core::special::{theorem_a_membership, SpecialContext};
use pzeta_core::{AElem, CurveDatum, Fq, FqElem, IdealHandle, Prec, RamSeries};

fn field(i: usize) -> Fq {
    let (q, e) = [(2, 1), (3, 1), (2, 2), (3, 2)][i];
    Fq::new(q, e).unwrap()
}

/// A field index and a dense series over it; `prec` is infinite half the time.
fn series_in(fi: usize) -> impl Strategy<Value = RamSeries> {
    let size = field(fi).size() as u16;
    (-3i64..4, prop::collection::vec(0..size, 0..10), prop::option::of(0i64..6)).prop_map(move |(start, c, extra)| {
        let f = field(fi);
        let n = c.len() as i64;
        let prec = extra.map_or(Prec::Infinite, |x| Prec::at(start + n + x));
        RamSeries::from_dense(&f, start, c.into_iter().map(FqElem).collect(), prec)
    })
}

fn triple() -> impl Strategy<Value = (RamSeries, RamSeries, RamSeries)> {
    (0usize..4).prop_flat_map(|fi| (series_in(fi), series_in(fi), series_in(fi)))
}

fn nonzero(s: &RamSeries) -> bool {
    s.valuation().is_some()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_laws((a, b, c) in triple()) {
        prop_assert!(a.add(&b).sub(&b.add(&a)).is_zero());
        prop_assert!(a.mul(&b).sub(&b.mul(&a)).is_zero());
        prop_assert!(a.mul(&b).mul(&c).sub(&a.mul(&b.mul(&c))).is_zero());
        prop_assert!(a.mul(&b.add(&c)).sub(&a.mul(&b).add(&a.mul(&c))).is_zero());
        prop_assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn precision_rule((a, b, _c) in triple()) {
        prop_assert_eq!(a.add(&b).prec(), a.prec().min(b.prec()));
        if nonzero(&a) && nonzero(&b) {
            let (va, vb) = (a.valuation().unwrap(), b.valuation().unwrap());
            prop_assert_eq!(a.mul(&b).prec(), a.prec().plus(vb).min(b.prec().plus(va)));
            prop_assert_eq!(a.mul(&b).valuation(), Some(va + vb));
        }
    }

    #[test]
    fn twist_is_a_ring_map((a, b, _c) in triple(), n in 0i64..3) {
        prop_assert!(a.mul(&b).twist(n).sub(&a.twist(n).mul(&b.twist(n))).is_zero());
        prop_assert!(a.add(&b).twist(n).sub(&a.twist(n).add(&b.twist(n))).is_zero());
        let back = a.twist(n).twist(-n);
        prop_assert!(back.sub(&a).is_zero());
        prop_assert_eq!(back.prec(), a.prec());
    }

    #[test]
    fn inverse((a, _b, _c) in triple()) {
        prop_assume!(nonzero(&a));
        let inv = a.inv_to(a.prec().min(Prec::at(40))).unwrap();
        let one = a.mul(&inv);
        prop_assert!(one.sub(&RamSeries::one(a.field())).is_zero());
    }

    #[test]
    fn text_round_trip((a, _b, _c) in triple()) {
        let back = RamSeries::parse_text(a.field(), &a.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), a.to_text());
        prop_assert_eq!(back.prec(), a.prec());
    }
}

fn elliptic() -> CurveDatum {
    let f = Fq::new(2, 1).unwrap();
    CurveDatum::genus1(&f, [FqElem(0), FqElem(0), FqElem(1), FqElem(0), FqElem(0)]).unwrap()
}

fn a_elem(max_index: usize) -> impl Strategy<Value = AElem> {
    prop::collection::vec(0u16..2, 0..max_index).prop_map(|c| AElem::from_coords(c.into_iter().map(FqElem).collect()))
}

fn point_ideal(c: &CurveDatum) -> IdealHandle {
    IdealHandle::new(c, vec![c.parse_a("x").unwrap(), c.parse_a("y").unwrap()]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_is_multiplicative(a in a_elem(8), b in a_elem(8)) {
        let c = elliptic();
        let prod = c.mul(&a, &b);
        let lhs = c.expand(&prod, 40);
        let rhs = c.expand(&a, 60).mul(&c.expand(&b, 60));
        prop_assert!(lhs.sub(&rhs).certified_valuation() >= Prec::at(40));
        if !a.is_zero() && !b.is_zero() {
            prop_assert_eq!(c.degree(&prod), c.degree(&a) + c.degree(&b));
        }
    }

    #[test]
    fn ideal_is_closed(a in a_elem(8), b in a_elem(8), r in a_elem(6)) {
        let c = elliptic();
        let i = point_ideal(&c);
        let x = c.parse_a("x").unwrap();
        let y = c.parse_a("y").unwrap();
        let ia = c.add(&c.mul(&a, &x), &c.mul(&b, &y));
        prop_assert!(i.contains(&ia));
        prop_assert!(i.contains(&c.mul(&r, &ia)));
        prop_assert!(i.contains(&c.add(&ia, &c.mul(&r, &x))));
        prop_assert_eq!(i.contains(&r), i.contains(&c.add(&r, &ia)));
    }
}

fn context() -> &'static SpecialContext {
    static CTX: OnceLock<SpecialContext> = OnceLock::new();
    CTX.get_or_init(|| {
        let c = elliptic();
        SpecialContext::new(&point_ideal(&c), 24).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Integrality is additive and matches membership on A(<= 5).
    #[test]
    fn membership_verdicts_are_additive(a in a_elem(5), b in a_elem(5)) {
        let ctx = context();
        let c = ctx.ideal.curve();
        let n = 20;
        let va = theorem_a_membership(ctx, &a, n).unwrap().is_integral();
        let vb = theorem_a_membership(ctx, &b, n).unwrap().is_integral();
        let sum = c.add(&a, &b);
        let vs = theorem_a_membership(ctx, &sum, n).unwrap().is_integral();
        prop_assert_eq!(va, ctx.ideal.contains(&a));
        if va && vb {
            prop_assert!(vs);
        }
        if va != vb {
            prop_assert!(!vs);
        }
    }
}
