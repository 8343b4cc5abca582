//! Error-free floating point accumulation.
//!
//! The solver certifies every accepted vertex move by the sign of an exactly
//! computed energy change, and reports energies as correctly rounded exact
//! sums. Both rest on the two primitives below.

/// `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `a * b = p + e` exactly (barring over/underflow).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Exact running sum of floats, kept as non-overlapping partials
/// (Shewchuk / `math.fsum`).
#[derive(Clone, Debug, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, mut x: f64) {
        if x == 0.0 {
            return;
        }
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    pub fn add_all(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
    }

    pub fn sub_all(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(-p);
        }
    }

    /// Adds `a * b` exactly.
    pub fn add_product(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.add(p);
        self.add(e);
    }

    pub fn partials(&self) -> &[f64] {
        &self.partials
    }

    /// Correctly rounded value of the exact sum.
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

/// Correctly rounded sum of a slice.
pub fn fsum(xs: &[f64]) -> f64 {
    let mut s = ExactSum::new();
    for &x in xs {
        s.add(x);
    }
    s.value()
}

/// Adds the exact value of `0.5 * w * l^2` to `acc`, where `l` is given as
/// the exact sum of `l_parts`.
pub fn add_half_weighted_square(acc: &mut ExactSum, w: f64, l_parts: &[f64]) {
    for &a in l_parts {
        for &b in l_parts {
            let (p, e) = two_prod(a, b);
            for c in [p, e] {
                if c != 0.0 {
                    let (q, f) = two_prod(c, w);
                    // scaling by one half is exact
                    acc.add(0.5 * q);
                    acc.add(0.5 * f);
                }
            }
        }
    }
}
