use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::gl2z::{eigenvector_eigenvalue_one, EigenOne, Mat2, Vec2};

/// `(a, b, k)`: the element `x^a y^b t^k` of `Z² ⋊_φ Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pi1Element {
    pub v: Vec2,
    pub k: i64,
}

impl Pi1Element {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, k: i64) -> Self {
        Pi1Element {
            v: [a.into(), b.into()],
            k,
        }
    }

    pub fn fiber(v: Vec2) -> Self {
        Pi1Element { v, k: 0 }
    }

    pub fn identity() -> Self {
        Pi1Element::new(0, 0, 0)
    }

    pub fn x() -> Self {
        Pi1Element::new(1, 0, 0)
    }

    pub fn y() -> Self {
        Pi1Element::new(0, 1, 0)
    }

    pub fn t() -> Self {
        Pi1Element::new(0, 0, 1)
    }

    pub fn in_fiber(&self) -> bool {
        self.k == 0
    }
}

impl fmt::Display for Pi1Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.v[0], self.v[1], self.k)
    }
}

impl FromStr for Pi1Element {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("expected (a,b,k), found `{s}`"))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 3 {
            return Err(format!("expected three components, found {}", parts.len()));
        }
        let int = |p: &str| {
            p.parse::<BigInt>()
                .map_err(|_| format!("invalid integer `{p}`"))
        };
        let k = parts[2]
            .parse::<i64>()
            .map_err(|_| format!("invalid base exponent `{}`", parts[2]))?;
        Ok(Pi1Element::new(int(parts[0])?, int(parts[1])?, k))
    }
}

/// Mapping torus `M_φ`; carries the group law of its fundamental group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusBundleOverCircle {
    pub phi: Mat2,
}

impl TorusBundleOverCircle {
    pub fn new(phi: Mat2) -> Self {
        TorusBundleOverCircle { phi }
    }

    pub fn action(&self, k: i64) -> Mat2 {
        self.phi.pow(k).expect("unimodular monodromy")
    }

    pub fn mul(&self, e1: &Pi1Element, e2: &Pi1Element) -> Pi1Element {
        let w = self.action(e1.k).apply(&e2.v);
        Pi1Element {
            v: [&e1.v[0] + &w[0], &e1.v[1] + &w[1]],
            k: e1.k + e2.k,
        }
    }

    pub fn inverse(&self, e: &Pi1Element) -> Pi1Element {
        let w = self.action(-e.k).apply(&e.v);
        Pi1Element {
            v: [-&w[0], -&w[1]],
            k: -e.k,
        }
    }

    pub fn pow(&self, e: &Pi1Element, n: i64) -> Pi1Element {
        let base = if n < 0 { self.inverse(e) } else { e.clone() };
        let mut acc = Pi1Element::identity();
        let mut sq = base;
        let mut m = n.unsigned_abs();
        while m > 0 {
            if m & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            m >>= 1;
            if m > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    pub fn pow_big(&self, e: &Pi1Element, n: &BigInt) -> Pi1Element {
        if e.k == 0 {
            return Pi1Element::fiber([&e.v[0] * n, &e.v[1] * n]);
        }
        let n: i64 = n
            .try_into()
            .expect("exponent of a non-fiber element fits in i64");
        self.pow(e, n)
    }

    pub fn conjugate(&self, g: &Pi1Element, e: &Pi1Element) -> Pi1Element {
        self.mul(&self.mul(g, e), &self.inverse(g))
    }

    pub fn product(&self, es: &[Pi1Element]) -> Pi1Element {
        es.iter()
            .fold(Pi1Element::identity(), |acc, e| self.mul(&acc, e))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlueingViolation {
    Relation(&'static str),
    NotSurjective(String),
}

impl fmt::Display for GlueingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlueingViolation::Relation(r) => write!(f, "relation {r} fails on images"),
            GlueingViolation::NotSurjective(why) => write!(f, "not surjective: {why}"),
        }
    }
}

/// A homomorphism `π₁(source) → π₁(target)` given by the images of
/// `x = (1,0,0)`, `y = (0,1,0)`, `t = (0,0,1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryIso {
    pub source: TorusBundleOverCircle,
    pub target: TorusBundleOverCircle,
    pub x: Pi1Element,
    pub y: Pi1Element,
    pub t: Pi1Element,
}

/// Source element paired with its image, so that products stay in sync.
#[derive(Clone, Debug)]
struct Pair {
    src: Pi1Element,
    dst: Pi1Element,
}

impl BoundaryIso {
    pub fn new(
        source: TorusBundleOverCircle,
        target: TorusBundleOverCircle,
        x: Pi1Element,
        y: Pi1Element,
        t: Pi1Element,
    ) -> Self {
        BoundaryIso {
            source,
            target,
            x,
            y,
            t,
        }
    }

    pub fn identity(bundle: TorusBundleOverCircle) -> Self {
        BoundaryIso::new(
            bundle.clone(),
            bundle,
            Pi1Element::x(),
            Pi1Element::y(),
            Pi1Element::t(),
        )
    }

    /// Fiber-preserving map `(v, k) ↦ (C v + w_k, ε k)` determined by
    /// `x, y ↦ C e₁, C e₂` and `t ↦ (w, ε)`.
    pub fn fiber_map(
        source: TorusBundleOverCircle,
        target: TorusBundleOverCircle,
        c: &Mat2,
        w: Vec2,
        eps: i64,
    ) -> Self {
        BoundaryIso::new(
            source,
            target,
            Pi1Element::fiber(c.column(0)),
            Pi1Element::fiber(c.column(1)),
            Pi1Element { v: w, k: eps },
        )
    }

    pub fn apply(&self, e: &Pi1Element) -> Pi1Element {
        let g = &self.target;
        let fiber = g.mul(&g.pow_big(&self.x, &e.v[0]), &g.pow_big(&self.y, &e.v[1]));
        g.mul(&fiber, &g.pow(&self.t, e.k))
    }

    pub fn compose(&self, then: &BoundaryIso) -> BoundaryIso {
        BoundaryIso::new(
            self.source.clone(),
            then.target.clone(),
            then.apply(&self.x),
            then.apply(&self.y),
            then.apply(&self.t),
        )
    }

    fn relation_violations(&self) -> Vec<GlueingViolation> {
        let g = &self.target;
        let phi = &self.source.phi;
        let (x, y, t) = (&self.x, &self.y, &self.t);
        let mut out = Vec::new();
        if g.mul(x, y) != g.mul(y, x) {
            out.push(GlueingViolation::Relation("[X,Y] = 1"));
        }
        let rhs = |p: &BigInt, q: &BigInt| g.mul(&g.pow_big(x, p), &g.pow_big(y, q));
        if g.conjugate(t, x) != rhs(&phi.a, &phi.c) {
            out.push(GlueingViolation::Relation("T X T⁻¹ = X^φ₁₁ Y^φ₂₁"));
        }
        if g.conjugate(t, y) != rhs(&phi.b, &phi.d) {
            out.push(GlueingViolation::Relation("T Y T⁻¹ = X^φ₁₂ Y^φ₂₂"));
        }
        out
    }

    fn multiply(&self, p: &Pair, q: &Pair) -> Pair {
        Pair {
            src: self.source.mul(&p.src, &q.src),
            dst: self.target.mul(&p.dst, &q.dst),
        }
    }

    fn invert(&self, p: &Pair) -> Pair {
        Pair {
            src: self.source.inverse(&p.src),
            dst: self.target.inverse(&p.dst),
        }
    }

    fn power(&self, p: &Pair, n: &BigInt) -> Pair {
        Pair {
            src: self.source.pow_big(&p.src, n),
            dst: self.target.pow_big(&p.dst, n),
        }
    }

    /// Hermite basis `[(g₁, *), (0, g₂)]` of the lattice spanned by the
    /// fiber images, carrying source elements along.
    fn lattice_basis(&self, mut pairs: Vec<Pair>) -> Vec<Pair> {
        let mut basis = Vec::new();
        for coord in 0..2 {
            loop {
                pairs.retain(|p| !(p.dst.v[0].is_zero() && p.dst.v[1].is_zero()));
                let Some(pivot) = pairs
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.dst.v[coord].is_zero())
                    .min_by_key(|(_, p)| p.dst.v[coord].abs())
                    .map(|(i, _)| i)
                else {
                    break;
                };
                let mut done = true;
                for i in 0..pairs.len() {
                    if i == pivot || pairs[i].dst.v[coord].is_zero() {
                        continue;
                    }
                    let q = pairs[i].dst.v[coord].div_floor(&pairs[pivot].dst.v[coord]);
                    let reduced = self.multiply(&pairs[i], &self.power(&pairs[pivot], &-q));
                    if !reduced.dst.v[coord].is_zero() {
                        done = false;
                    }
                    pairs[i] = reduced;
                }
                if done {
                    let mut p = pairs.swap_remove(pivot);
                    if p.dst.v[coord].is_negative() {
                        p = self.invert(&p);
                    }
                    basis.push(p);
                    break;
                }
            }
        }
        if basis.len() == 2 && !basis[0].dst.v[1].is_zero() {
            let q = basis[0].dst.v[1].div_floor(&basis[1].dst.v[1]);
            basis[0] = self.multiply(&basis[0], &self.power(&basis[1], &-q));
        }
        basis
    }

    /// Preimages of `x`, `y`, `t` under the map, or why none exist.
    fn preimages(&self) -> Result<[Pi1Element; 3], String> {
        let gens = [
            (Pi1Element::x(), &self.x),
            (Pi1Element::y(), &self.y),
            (Pi1Element::t(), &self.t),
        ];
        let mut pairs: Vec<Pair> = gens
            .iter()
            .map(|(s, d)| Pair {
                src: s.clone(),
                dst: (*d).clone(),
            })
            .collect();
        // Euclid on the base exponents
        let mut fiber = Vec::new();
        let top = loop {
            let nonfiber: Vec<usize> = (0..pairs.len()).filter(|&i| pairs[i].dst.k != 0).collect();
            let Some(&pivot) = nonfiber.iter().min_by_key(|&&i| pairs[i].dst.k.abs()) else {
                return Err("image lies in the fiber subgroup".into());
            };
            let pk = pairs[pivot].dst.k;
            for &i in &nonfiber {
                if i != pivot {
                    let q = Integer::div_floor(&pairs[i].dst.k, &pk);
                    pairs[i] =
                        self.multiply(&pairs[i], &self.power(&pairs[pivot], &BigInt::from(-q)));
                }
            }
            if nonfiber.iter().all(|&i| i == pivot || pairs[i].dst.k == 0) {
                let p = pairs.swap_remove(pivot);
                fiber.append(&mut pairs);
                break p;
            }
        };
        let top = match top.dst.k {
            1 => top,
            -1 => self.invert(&top),
            k => return Err(format!("base exponents generate {}Z", k.abs())),
        };
        let top_inv = self.invert(&top);
        let mut basis = self.lattice_basis(fiber);
        loop {
            let mut grown = basis.clone();
            for b in &basis {
                grown.push(self.multiply(&self.multiply(&top, b), &top_inv));
                grown.push(self.multiply(&self.multiply(&top_inv, b), &top));
            }
            let next = self.lattice_basis(grown);
            let same =
                next.len() == basis.len() && next.iter().zip(&basis).all(|(p, q)| p.dst == q.dst);
            basis = next;
            if same {
                break;
            }
        }
        let unit = basis.len() == 2
            && basis[0].dst.v[0].is_one()
            && basis[1].dst.v[1].is_one()
            && basis[0].dst.v[1].is_zero();
        if !unit {
            let index: Vec<String> = basis.iter().map(|p| p.dst.to_string()).collect();
            return Err(format!("fiber image spanned by [{}]", index.join(", ")));
        }
        let (bx, by) = (&basis[0], &basis[1]);
        // t = (−w, 0) · top where top ↦ (w, 1)
        let w = &top.dst.v;
        let correction = self.multiply(&self.power(bx, &-&w[0]), &self.power(by, &-&w[1]));
        let bt = self.multiply(&correction, &top);
        Ok([bx.src.clone(), by.src.clone(), bt.src.clone()])
    }

    pub fn violations(&self) -> Vec<GlueingViolation> {
        let rel = self.relation_violations();
        if !rel.is_empty() {
            return rel;
        }
        match self.preimages() {
            Ok(_) => Vec::new(),
            Err(why) => vec![GlueingViolation::NotSurjective(why)],
        }
    }

    /// Inverse isomorphism, if this is a valid glueing.
    pub fn inverse(&self) -> Option<BoundaryIso> {
        if !self.relation_violations().is_empty() {
            return None;
        }
        let [x, y, t] = self.preimages().ok()?;
        Some(BoundaryIso::new(
            self.target.clone(),
            self.source.clone(),
            x,
            y,
            t,
        ))
    }

    pub fn is_fiber_preserving(&self) -> bool {
        self.x.in_fiber() && self.y.in_fiber()
    }

    /// Matrix `C` of the map on fiber coordinates, when fiber-preserving.
    pub fn fiber_matrix(&self) -> Option<Mat2> {
        self.is_fiber_preserving()
            .then(|| Mat2::from_columns(&self.x.v, &self.y.v))
    }

    /// Orientation character (±1) of the induced map of closed 3-manifolds,
    /// `None` outside the cases the normal form covers.
    pub fn degree(&self) -> Option<i8> {
        if self.is_fiber_preserving() {
            let c = self.fiber_matrix()?;
            let det: i64 = (&c.det()).try_into().ok()?;
            return Some((det * self.t.k.signum()) as i8);
        }
        if self.source.phi.is_identity() {
            let cols = [&self.x, &self.y, &self.t];
            let m: Vec<[BigInt; 3]> = cols
                .iter()
                .map(|e| [e.v[0].clone(), e.v[1].clone(), BigInt::from(e.k)])
                .collect();
            let det = &m[0][0] * (&m[1][1] * &m[2][2] - &m[2][1] * &m[1][2])
                - &m[1][0] * (&m[0][1] * &m[2][2] - &m[2][1] * &m[0][2])
                + &m[2][0] * (&m[0][1] * &m[1][2] - &m[1][1] * &m[0][2]);
            return Some(if det.is_positive() { 1 } else { -1 });
        }
        // non-fiber-preserving isomorphisms with φ ≠ I only exist between
        // nilmanifolds; orient by center ∧ (G / center)
        let v = match eigenvector_eigenvalue_one(&self.source.phi) {
            EigenOne::Vector(v) => v,
            _ => return None,
        };
        let v2 = match eigenvector_eigenvalue_one(&self.target.phi) {
            EigenOne::Vector(v) => v,
            _ => return None,
        };
        if !self.source.phi.det().is_one() {
            return None;
        }
        let coord = |e: &Pi1Element| -> [BigInt; 2] {
            [&v2[0] * &e.v[1] - &v2[1] * &e.v[0], BigInt::from(e.k)]
        };
        let center = self.apply(&Pi1Element::fiber(v.clone()));
        if !center.in_fiber() {
            return None;
        }
        let lambda = if center.v == v2 {
            1
        } else if center.v == [-&v2[0], -&v2[1]] {
            -1
        } else {
            return None;
        };
        let g = v[0].extended_gcd(&v[1]);
        let u = [-&g.y, g.x.clone()];
        let c1 = coord(&self.apply(&Pi1Element::fiber(u)));
        let c2 = coord(&self.t);
        let det = &c1[0] * &c2[1] - &c1[1] * &c2[0];
        let s = if det.is_positive() { 1 } else { -1 };
        Some(lambda * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle(m: Mat2) -> TorusBundleOverCircle {
        TorusBundleOverCircle::new(m)
    }

    #[test]
    fn product_rule() {
        let g = bundle(Mat2::r());
        assert_eq!(
            g.mul(&Pi1Element::t(), &Pi1Element::y()),
            Pi1Element::new(1, 1, 1)
        );
        assert_eq!(
            g.mul(&Pi1Element::x(), &Pi1Element::y()),
            g.mul(&Pi1Element::y(), &Pi1Element::x())
        );
        assert_eq!(
            g.conjugate(&Pi1Element::t(), &Pi1Element::y()),
            g.mul(&Pi1Element::x(), &Pi1Element::y())
        );
    }

    #[test]
    fn identity_glueing_is_valid() {
        let iso = BoundaryIso::identity(bundle(Mat2::r()));
        assert!(iso.violations().is_empty());
        assert_eq!(iso.degree(), Some(1));
    }

    #[test]
    fn t3_coordinate_permutation() {
        let g = bundle(Mat2::identity());
        let iso = BoundaryIso::new(
            g.clone(),
            g,
            Pi1Element::t(),
            Pi1Element::y(),
            Pi1Element::x(),
        );
        assert!(iso.violations().is_empty());
        assert!(!iso.is_fiber_preserving());
        assert_eq!(iso.degree(), Some(-1));
    }

    #[test]
    fn swapped_fiber_fails_relations() {
        let g = bundle(Mat2::r());
        let iso = BoundaryIso::new(
            g.clone(),
            g,
            Pi1Element::y(),
            Pi1Element::x(),
            Pi1Element::t(),
        );
        let v = iso.violations();
        assert!(matches!(v[..], [GlueingViolation::Relation(_), ..]));
    }

    #[test]
    fn fiber_preserving_examples() {
        let g = bundle(Mat2::r());
        let iso = BoundaryIso::new(
            g.clone(),
            g.clone(),
            Pi1Element::x(),
            Pi1Element::y(),
            Pi1Element::new(1, 0, 1),
        );
        assert!(iso.violations().is_empty());
        assert!(iso.is_fiber_preserving());
        let odd = BoundaryIso::new(
            g.clone(),
            g,
            Pi1Element::new(-1, 0, 0),
            Pi1Element::t(),
            Pi1Element::y(),
        );
        assert!(odd.violations().is_empty());
        assert!(!odd.is_fiber_preserving());
    }

    #[test]
    fn nil_swap_reverses_orientation() {
        let iso = BoundaryIso::new(
            bundle(Mat2::unipotent(3)),
            bundle(Mat2::unipotent(-3)),
            Pi1Element::x(),
            Pi1Element::t(),
            Pi1Element::y(),
        );
        assert!(iso.violations().is_empty());
        assert_eq!(iso.degree(), Some(-1));
    }

    #[test]
    fn index_two_image_rejected() {
        let g = bundle(Mat2::identity());
        let iso = BoundaryIso::new(
            g.clone(),
            g,
            Pi1Element::new(2, 0, 0),
            Pi1Element::y(),
            Pi1Element::t(),
        );
        assert!(matches!(
            iso.violations()[..],
            [GlueingViolation::NotSurjective(_)]
        ));
    }

    #[test]
    fn inverse_round_trip() {
        let src = bundle(Mat2::new(2, 1, 1, 1));
        let c = Mat2::new(1, 1, 0, 1);
        let tgt = bundle(src.phi.conjugated_by(&c));
        let iso = BoundaryIso::fiber_map(src, tgt, &c, [BigInt::from(3), BigInt::from(-2)], 1);
        assert!(iso.violations().is_empty());
        let inv = iso.inverse().unwrap();
        let round = iso.compose(&inv);
        assert_eq!(round.x, Pi1Element::x());
        assert_eq!(round.y, Pi1Element::y());
        assert_eq!(round.t, Pi1Element::t());
    }

    #[test]
    fn parse_display() {
        let e: Pi1Element = " (1, -2, 3)".parse().unwrap();
        assert_eq!(e, Pi1Element::new(1, -2, 3));
        assert_eq!(e.to_string(), "(1,-2,3)");
    }
}
