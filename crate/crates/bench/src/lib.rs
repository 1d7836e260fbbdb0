//! Fixtures shared by the benchmarks.

use pzeta_core::{CurveDatum, Fq, FqElem, IdealHandle};

/// `A = F_q[t]` as an ideal of itself.
pub fn carlitz(q: u32) -> IdealHandle {
    let f = Fq::new(q, 1).expect("prime q");
    IdealHandle::unit(&CurveDatum::genus0(&f))
}

/// The ideal of the point (0, 0) on `y^2 + y = x^3` over F_2.
pub fn point_ideal() -> IdealHandle {
    let f = Fq::new(2, 1).unwrap();
    let c = CurveDatum::genus1(&f, [FqElem(0), FqElem(0), FqElem(1), FqElem(0), FqElem(0)]).unwrap();
    let gens = vec![c.parse_a("x").unwrap(), c.parse_a("y").unwrap()];
    IdealHandle::new(&c, gens).unwrap()
}
