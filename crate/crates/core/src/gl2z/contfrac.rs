//! Continued fractions of the quadratic fixed points of hyperbolic
//! (and determinant −1, nonzero trace) elements of GL(2,Z).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::Mat2;

/// `K⁻¹ · M · K = eps · G^power` where `G` is the product of
/// `(p 1; 1 0)` over `period` and `period` is the minimal period.
#[derive(Clone, Debug)]
pub(crate) struct StabilizerForm {
    pub conjugator: Mat2,
    pub period: Vec<BigInt>,
    pub eps: i8,
    pub power: usize,
}

/// Partial quotients of `(p + √disc) / q`: the sequence, the index where the
/// period starts and the period length. Requires `q | disc − p²`.
fn periodic_expansion(mut p: BigInt, mut q: BigInt, disc: &BigInt) -> (Vec<BigInt>, usize, usize) {
    let root = disc.sqrt();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut quotients = Vec::new();
    loop {
        if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
            let len = quotients.len() - start;
            return (quotients, start, len);
        }
        seen.insert((p.clone(), q.clone()), quotients.len());
        let a = if q.is_positive() {
            (&p + &root).div_floor(&q)
        } else {
            -((&p + &root).div_floor(&(-&q))) - 1
        };
        let next_p = &a * &q - &p;
        let next_q = (disc - &next_p * &next_p) / &q;
        quotients.push(a);
        p = next_p;
        q = next_q;
    }
}

fn step(a: &BigInt) -> Mat2 {
    Mat2::new(a.clone(), 1, 1, 0)
}

pub(crate) fn period_matrix(period: &[BigInt]) -> Mat2 {
    period
        .iter()
        .fold(Mat2::identity(), |acc, a| acc.compose(&step(a)))
}

/// Normal form of `m` inside the stabilizer of one of its fixed points.
/// With `even_prefix` the conjugator has determinant +1.
pub(crate) fn stabilizer_form(m: &Mat2, even_prefix: bool) -> Option<StabilizerForm> {
    if m.c.is_zero() {
        return None;
    }
    let diff = &m.a - &m.d;
    let disc = &diff * &diff + BigInt::from(4) * &m.b * &m.c;
    if !disc.is_positive() || disc.sqrt().pow(2) == disc {
        return None;
    }
    let two_c = BigInt::from(2) * &m.c;
    // the two fixed points ((a−d) ± √disc) / 2c
    let roots = [(diff.clone(), two_c.clone()), (-&diff, -&two_c)];
    for (p, q) in roots {
        let (quotients, start, len) = periodic_expansion(p, q, &disc);
        let at = |i: usize| -> BigInt {
            if i < start {
                quotients[i].clone()
            } else {
                quotients[start + (i - start) % len].clone()
            }
        };
        let prefix = if even_prefix && start % 2 == 1 {
            start + 1
        } else {
            start
        };
        let conjugator = (0..prefix).fold(Mat2::identity(), |acc, i| acc.compose(&step(&at(i))));
        let period: Vec<BigInt> = (prefix..prefix + len).map(at).collect();
        let g = period_matrix(&period);
        let target = conjugator.inv().compose(m).compose(&conjugator);
        let bound = target.trace().abs();
        let mut power = g.clone();
        let mut q = 1usize;
        loop {
            if power == target {
                return Some(StabilizerForm {
                    conjugator,
                    period,
                    eps: 1,
                    power: q,
                });
            }
            if -&power == target {
                return Some(StabilizerForm {
                    conjugator,
                    period,
                    eps: -1,
                    power: q,
                });
            }
            if q > 2 && power.trace().abs() > bound {
                break;
            }
            power = power.compose(&g);
            q += 1;
        }
    }
    None
}

/// Index of the lexicographically least rotation of `seq`.
pub(crate) fn least_rotation<T: Ord>(seq: &[T]) -> usize {
    let n = seq.len();
    (0..n)
        .min_by(|&i, &j| {
            (0..n)
                .map(|k| &seq[(i + k) % n])
                .cmp((0..n).map(|k| &seq[(j + k) % n]))
        })
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn golden_ratio_expansion() {
        // (1 + √5)/2 = [1; 1, 1, ...]
        let (q, start, len) = periodic_expansion(BigInt::one(), BigInt::from(2), &BigInt::from(5));
        assert_eq!(start, 0);
        assert_eq!(len, 1);
        assert_eq!(q[0], BigInt::one());
    }

    #[test]
    fn sqrt_two_expansion() {
        // √2 = [1; 2, 2, ...]
        let (q, start, len) = periodic_expansion(BigInt::zero(), BigInt::one(), &BigInt::from(2));
        assert_eq!((start, len), (1, 1));
        assert_eq!(q, vec![BigInt::from(1), BigInt::from(2)]);
    }

    #[test]
    fn stabilizer_form_reconstructs() {
        for m in [
            Mat2::new(2, 1, 1, 1),
            Mat2::new(5, 2, 2, 1),
            Mat2::new(-3, 1, 7, -2),
            Mat2::new(-4, -7, -1, -2),
            Mat2::new(1, 1, 1, 0),
        ] {
            let form = stabilizer_form(&m, false).unwrap();
            let mut rebuilt = period_matrix(&form.period).pow(form.power as i64).unwrap();
            if form.eps < 0 {
                rebuilt = -rebuilt;
            }
            let k = &form.conjugator;
            assert_eq!(k.compose(&rebuilt).compose(&k.inv()), m);
        }
    }

    #[test]
    fn least_rotation_index() {
        assert_eq!(least_rotation(&[3, 1, 2, 1, 1]), 3);
        assert_eq!(least_rotation(&[1]), 0);
    }
}
