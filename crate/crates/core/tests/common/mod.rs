//! Oracles shared by the integration tests. They use their own small exact
//! fraction type and plain loops, and share no code with the library's
//! unit-fraction engine.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Reduced fraction with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Q {
    pub n: i128,
    pub d: i128,
}

impl Q {
    pub fn new(n: i128, d: i128) -> Q {
        assert!(d != 0);
        let g = gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        Q { n: s * n / g, d: s * d / g }
    }

    pub fn unit(x: i128) -> Q {
        Q::new(1, x)
    }

    pub fn is_pos(self) -> bool {
        self.n > 0
    }

    /// Parses `a/b` or `a`.
    pub fn parse(s: &str) -> Q {
        match s.split_once('/') {
            Some((a, b)) => Q::new(a.parse().unwrap(), b.parse().unwrap()),
            None => Q::new(s.parse().unwrap(), 1),
        }
    }

    pub fn text(self) -> String {
        if self.d == 1 {
            self.n.to_string()
        } else {
            format!("{}/{}", self.n, self.d)
        }
    }
}

impl Add for Q {
    type Output = Q;
    fn add(self, o: Q) -> Q {
        Q::new(self.n * o.d + o.n * self.d, self.d * o.d)
    }
}

impl Sub for Q {
    type Output = Q;
    fn sub(self, o: Q) -> Q {
        Q::new(self.n * o.d - o.n * self.d, self.d * o.d)
    }
}

impl Mul for Q {
    type Output = Q;
    fn mul(self, o: Q) -> Q {
        Q::new(self.n * o.n, self.d * o.d)
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Q) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Q {
    fn cmp(&self, o: &Q) -> Ordering {
        (self.n * o.d).cmp(&(o.n * self.d))
    }
}

/// Is there a sum of `k` unit fractions, every denominator at least `amin`,
/// strictly inside `(lo, hi)`?
pub fn exists_in_open(k: usize, lo: Q, hi: Q, amin: i128) -> bool {
    if k == 0 || !hi.is_pos() {
        return false;
    }
    if !lo.is_pos() {
        // tiny terms land in (0, hi)
        return true;
    }
    // the largest term 1/a satisfies 1/a < hi and 1/a > lo/k
    let start = amin.max(hi.d / hi.n + 1);
    let mut a = start;
    while Q::new(k as i128, a) > lo {
        let u = Q::unit(a);
        if k == 1 {
            if u > lo && u < hi {
                return true;
            }
        } else if exists_in_open(k - 1, lo - u, hi - u, a) {
            return true;
        }
        a += 1;
    }
    false
}

/// All non-decreasing `k`-tuples of denominators with `Σ 1/x = p/q`, found by
/// direct search with the last denominator solved for. Returned largest first.
pub fn brute_solutions(k: usize, p: u64, q: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    brute(k, p as u128, q as u128, 1, &mut prefix, &mut out);
    for s in &mut out {
        s.reverse();
    }
    out.sort();
    out
}

fn brute(k: usize, p: u128, q: u128, amin: u128, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if k == 1 {
        if q.is_multiple_of(p) && q / p >= amin {
            prefix.push((q / p) as u64);
            out.push(prefix.clone());
            prefix.pop();
        }
        return;
    }
    let lo = amin.max(q / p + 1);
    let hi = k as u128 * q / p;
    for a in lo..=hi {
        let num = p * a - q;
        let den = q * a;
        let g = {
            let (mut x, mut y) = (num, den);
            while y != 0 {
                (x, y) = (y, x % y);
            }
            x
        };
        prefix.push(a as u64);
        brute(k - 1, num / g, den / g, a, prefix, out);
        prefix.pop();
    }
}
