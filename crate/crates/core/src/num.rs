use alloc::vec::Vec;

/// Error-free transformation: `a + b == hi + lo` exactly.
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let hi = a + b;
    let bv = hi - a;
    let av = hi - bv;
    (hi, (a - av) + (b - bv))
}

/// Correctly rounded summation (Shewchuk partials, as in Python's `math.fsum`).
#[derive(Debug, Default, Clone)]
pub(crate) struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, mut x: f64) {
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                core::mem::swap(&mut x, &mut y);
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

    /// Adds `|a - b|` without rounding the difference first.
    pub(crate) fn add_abs_diff(&mut self, a: f64, b: f64) {
        let (hi, lo) = two_sum(a, -b);
        // sign of the exact difference is the sign of `hi`
        if hi < 0.0 {
            self.add(-hi);
            self.add(-lo);
        } else {
            self.add(hi);
            self.add(lo);
        }
    }

    pub(crate) fn total(&self) -> f64 {
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
        // round-half-even correction when the remaining partials push past a tie
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

/// `max(1, |v|)` over a set of magnitudes; the scale used by every relative tolerance.
pub(crate) fn unit_scale(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(1.0_f64, |acc, v| acc.max(v.abs()))
}

/// Sign of `v` with `|v| <= tol` mapped to zero.
pub(crate) fn sign_with_tol(v: f64, tol: f64) -> i8 {
    if v > tol {
        1
    } else if v < -tol {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sum_recovers_cancelled_terms() {
        let mut s = ExactSum::new();
        for v in [1e100, 1.0, -1e100, 1e-16, 1e-16] {
            s.add(v);
        }
        assert_eq!(s.total(), 1.0000000000000002);
    }

    #[test]
    fn abs_diff_is_exact() {
        let mut s = ExactSum::new();
        s.add_abs_diff(0.1, 0.3);
        s.add_abs_diff(0.3, 0.1);
        let mut t = ExactSum::new();
        t.add_abs_diff(0.1, 0.3);
        t.add_abs_diff(0.1, 0.3);
        assert_eq!(s.total(), t.total());
    }
}
