//! Finite fields F_{q^e} in a polynomial basis over the prime field.
//!
//! An element is stored as the integer `sum d_i p^i`, where `d_i` is the
//! coefficient of `X^i` modulo the (lexicographically least) monic irreducible
//! polynomial of degree `n = r*e` over F_p, with `q = p^r`.
//! Arithmetic goes through precomputed tables, so an [`Fq`] handle is cheap to
//! clone and safe to share between threads.

use std::fmt;
use std::sync::Arc;

use crate::error::FieldError;

/// Largest field size supported by the table-driven arithmetic.
pub const MAX_FIELD_SIZE: u32 = 4096;
const FULL_TABLE_LIMIT: u32 = 256;

/// An element of a finite field, as an index into the field tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FqElem(pub u16);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    p: u32,
    n: u32,
    r: u32,
    size: u32,
    modulus: Vec<u32>,
    add: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    mul: Vec<u16>,
    log: Vec<u16>,
    exp: Vec<u16>,
    frob: Vec<u16>,
    frob_inv: Vec<u16>,
}

/// Handle to the finite field F_{q^e}; `q`-power Frobenius is the twist map.
#[derive(Clone)]
pub struct Fq(Arc<Tables>);

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.n == other.0.n && self.0.r == other.0.r && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Fq {}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} (p={}, modulus={:?})", self.q(), self.e(), self.0.p, self.0.modulus)
    }
}

fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let (mut m, mut r) = (q, 0);
    while m % p == 0 {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p, r))
}

fn digits(mut x: u32, p: u32, n: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

// Remainder of a modulo b over F_p; b monic.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - lead * bi % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    for d in 1..=n / 2 {
        for idx in 0..p.pow(d as u32) {
            let mut g = digits(idx, p, d as u32);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn least_irreducible(p: u32, n: u32) -> Vec<u32> {
    if n == 1 {
        return vec![0, 1];
    }
    for idx in 0..p.pow(n) {
        let mut f = digits(idx, p, n);
        f.push(1);
        if f[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Fq {
    /// Builds F_{q^e} for a prime power `q` and extension degree `e >= 1`.
    pub fn new(q: u32, e: u32) -> Result<Fq, FieldError> {
        let (p, r) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if e == 0 {
            return Err(FieldError::BadExtension(e));
        }
        let n = r * e;
        let size = (p as u64).checked_pow(n).filter(|&s| s <= MAX_FIELD_SIZE as u64).ok_or(FieldError::TooLarge { q, e })? as u32;
        let modulus = least_irreducible(p, n);
        let s = size as usize;

        let mut add = vec![0u16; s * s];
        let mut neg = vec![0u16; s];
        for a in 0..size {
            let da = digits(a, p, n);
            neg[a as usize] = undigits(&da.iter().map(|&x| (p - x) % p).collect::<Vec<_>>(), p) as u16;
            for b in 0..size {
                let db = digits(b, p, n);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                add[a as usize * s + b as usize] = undigits(&sum, p) as u16;
            }
        }
        let mulpoly = |a: u32, b: u32| -> u32 {
            let da = digits(a, p, n);
            let db = digits(b, p, n);
            let mut prod = vec![0u32; 2 * n as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let mut r = poly_rem(&prod, &modulus, p);
            r.resize(n as usize, 0);
            undigits(&r, p)
        };
        // Primitive element by search; the multiplicative group is cyclic.
        let order = size - 1;
        let mut log = vec![0u16; s];
        let mut exp = vec![0u16; 2 * s];
        'search: for g in 1..size {
            let mut x = 1u32;
            let mut seen = vec![false; s];
            for k in 0..order {
                if seen[x as usize] {
                    continue 'search;
                }
                seen[x as usize] = true;
                exp[k as usize] = x as u16;
                log[x as usize] = k as u16;
                x = mulpoly(x, g);
            }
            for k in order..2 * size {
                exp[k as usize] = exp[(k % order) as usize];
            }
            break;
        }
        let lmul = |a: u32, b: u32| -> u32 {
            if a == 0 || b == 0 {
                0
            } else {
                exp[(log[a as usize] as u32 + log[b as usize] as u32) as usize] as u32
            }
        };
        let mut inv = vec![0u16; s];
        for a in 1..size {
            inv[a as usize] = exp[((order - log[a as usize] as u32) % order) as usize];
        }
        let mul = if size <= FULL_TABLE_LIMIT {
            let mut t = vec![0u16; s * s];
            for a in 0..size {
                for b in 0..size {
                    t[(a * size + b) as usize] = lmul(a, b) as u16;
                }
            }
            t
        } else {
            Vec::new()
        };
        let qq = p.pow(r);
        let powq = |a: u32| -> u32 {
            if a == 0 {
                0
            } else {
                exp[((log[a as usize] as u64 * qq as u64) % order as u64) as usize] as u32
            }
        };
        let mut frob = vec![0u16; s];
        let mut frob_inv = vec![0u16; s];
        for a in 0..size {
            let b = powq(a);
            frob[a as usize] = b as u16;
            frob_inv[b as usize] = a as u16;
        }
        Ok(Fq(Arc::new(Tables { p, n, r, size, modulus, add, neg, inv, mul, log, exp, frob, frob_inv })))
    }

    /// Characteristic.
    pub fn p(&self) -> u32 {
        self.0.p
    }
    /// Size of the constant field F_q whose Frobenius defines twists.
    pub fn q(&self) -> u32 {
        self.0.p.pow(self.0.r)
    }
    /// Degree over F_q.
    pub fn e(&self) -> u32 {
        self.0.n / self.0.r
    }
    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.0.n
    }
    pub fn size(&self) -> u32 {
        self.0.size
    }
    /// Coefficients (low to high) of the defining polynomial.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.0.p == 2 {
            FqElem(a.0 ^ b.0)
        } else {
            FqElem(self.0.add[a.0 as usize * self.0.size as usize + b.0 as usize])
        }
    }
    #[inline]
    pub fn neg(&self, a: FqElem) -> FqElem {
        FqElem(self.0.neg[a.0 as usize])
    }
    #[inline]
    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        let t = &self.0;
        if !t.mul.is_empty() {
            FqElem(t.mul[a.0 as usize * t.size as usize + b.0 as usize])
        } else if a.0 == 0 || b.0 == 0 {
            FqElem::ZERO
        } else {
            FqElem(t.exp[t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize])
        }
    }
    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        (!a.is_zero()).then(|| FqElem(self.0.inv[a.0 as usize]))
    }
    pub fn pow(&self, a: FqElem, k: u64) -> FqElem {
        if k == 0 {
            return FqElem::ONE;
        }
        if a.is_zero() {
            return FqElem::ZERO;
        }
        let order = (self.0.size - 1) as u64;
        FqElem(self.0.exp[((self.0.log[a.0 as usize] as u64 * (k % order)) % order) as usize])
    }
    /// `a^(q^n)` for any integer `n`, negative meaning the inverse Frobenius.
    pub fn frobenius(&self, a: FqElem, n: i64) -> FqElem {
        let e = self.e() as i64;
        let k = n.rem_euclid(e);
        let mut x = a;
        for _ in 0..k {
            x = FqElem(self.0.frob[x.0 as usize]);
        }
        x
    }
    #[inline]
    pub fn frob_once(&self, a: FqElem) -> FqElem {
        FqElem(self.0.frob[a.0 as usize])
    }
    #[inline]
    pub fn frob_inv_once(&self, a: FqElem) -> FqElem {
        FqElem(self.0.frob_inv[a.0 as usize])
    }
    /// Whether Frobenius acts trivially (e = 1).
    pub fn frobenius_trivial(&self) -> bool {
        self.e() == 1
    }

    pub fn from_int(&self, k: i64) -> FqElem {
        let p = self.0.p as i64;
        FqElem(k.rem_euclid(p) as u16)
    }

    /// All field elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.0.size).map(|i| FqElem(i as u16))
    }
    /// Elements of the constant subfield F_q in index order.
    pub fn base_elements(&self) -> Vec<FqElem> {
        self.elements().filter(|&x| self.frob_once(x) == x).collect()
    }
    pub fn in_base_field(&self, a: FqElem) -> bool {
        self.frob_once(a) == a
    }

    /// `dst[i] += c * src[i]`.
    #[inline]
    pub fn axpy(&self, dst: &mut [FqElem], c: FqElem, src: &[FqElem]) {
        if c.is_zero() {
            return;
        }
        let t = &self.0;
        let s = t.size as usize;
        if !t.mul.is_empty() {
            let row = &t.mul[c.0 as usize * s..(c.0 as usize + 1) * s];
            if t.p == 2 {
                for (d, x) in dst.iter_mut().zip(src) {
                    d.0 ^= row[x.0 as usize];
                }
            } else {
                for (d, x) in dst.iter_mut().zip(src) {
                    d.0 = t.add[d.0 as usize * s + row[x.0 as usize] as usize];
                }
            }
        } else {
            for (d, x) in dst.iter_mut().zip(src) {
                let m = self.mul(c, *x);
                *d = self.add(*d, m);
            }
        }
    }

    /// Polynomial-basis digits, highest power first.
    pub fn format(&self, a: FqElem) -> String {
        let d = digits(a.0 as u32, self.0.p, self.0.n);
        if self.0.p < 10 {
            d.iter().rev().map(|x| char::from_digit(*x, 10).unwrap()).collect()
        } else {
            d.iter().rev().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
        }
    }

    /// Inverse of [`Fq::format`]; shorter digit strings are zero-padded on the left.
    pub fn parse(&self, s: &str) -> Result<FqElem, FieldError> {
        let s = s.trim();
        let bad = || FieldError::BadElement(s.to_string());
        let ds: Vec<u32> = if self.0.p < 10 {
            let (neg, body) = match s.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, s),
            };
            if body.is_empty() {
                return Err(bad());
            }
            let mut v: Vec<u32> = body.chars().rev().map(|c| c.to_digit(10).ok_or_else(bad)).collect::<Result<_, _>>()?;
            if neg {
                v = v.iter().map(|&x| (self.0.p - x % self.0.p) % self.0.p).collect();
            }
            v
        } else {
            s.split('.').rev().map(|t| t.parse::<u32>().map_err(|_| bad())).collect::<Result<_, _>>()?
        };
        if ds.len() > self.0.n as usize || ds.iter().any(|&x| x >= self.0.p) {
            return Err(bad());
        }
        Ok(FqElem(undigits(&ds, self.0.p) as u16))
    }

    /// Roots of `x^k = a`, in increasing index order.
    pub fn roots_of(&self, a: FqElem, k: u64) -> Vec<FqElem> {
        self.elements().filter(|&x| self.pow(x, k) == a).collect()
    }

    /// Embedding of `self` into `big`, sending the generator `X` to the least
    /// root of the defining polynomial in `big`; `None` if no embedding exists.
    pub fn embedding_into(&self, big: &Fq) -> Option<Vec<FqElem>> {
        if self == big {
            return Some(self.elements().collect());
        }
        if self.p() != big.p() || !big.degree().is_multiple_of(self.degree()) {
            return None;
        }
        let m: Vec<FqElem> = self.modulus().iter().map(|&c| FqElem(c as u16)).collect();
        let root = big.elements().find(|&x| {
            let mut acc = FqElem::ZERO;
            for &c in m.iter().rev() {
                acc = big.add(big.mul(acc, x), c);
            }
            acc.is_zero()
        })?;
        let n = self.degree();
        let map = (0..self.size())
            .map(|a| {
                let d = digits(a, self.p(), n);
                let mut acc = FqElem::ZERO;
                for &c in d.iter().rev() {
                    acc = big.add(big.mul(acc, root), FqElem(c as u16));
                }
                acc
            })
            .collect();
        Some(map)
    }
}
