//! Order-independent floating point summation.
//!
//! Every ball sum in the crate goes through [`ExactSum`]: the accumulator keeps
//! the running total as a list of non-overlapping partials (Shewchuk's
//! algorithm) and rounds the exact total once when read. The result is the
//! correctly rounded sum of the inputs, so it does not depend on the order in
//! which points are visited. Profile prefix sums (distance order), the
//! brute-force oracle (id order) and any thread partitioning therefore agree
//! bit for bit.

/// Exact accumulator with correctly rounded read-out.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a finite value.
    pub fn add(&mut self, value: f64) {
        let mut x = value;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    /// Correctly rounded value of the exact running total.
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
            let y_rounded = hi - x;
            lo = y - y_rounded;
            if lo != 0.0 {
                break;
            }
        }
        // Half-way case: the discarded tail pushes the rounding the other way.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let y_rounded = x - hi;
            if y == y_rounded {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Correctly rounded sum of an iterator.
pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = ExactSum::new();
    acc.extend(values);
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cancellation_is_exact() {
        assert_eq!(exact_sum([1e100, 1.0, -1e100]), 1.0);
        assert_eq!(exact_sum([0.1; 10]), 1.0);
        assert_eq!(exact_sum(std::iter::empty()), 0.0);
    }

    #[test]
    fn half_way_rounding() {
        // 1 + 2^-53 + 2^-106 rounds up, the naive sum does not.
        let v = [1.0, 2f64.powi(-53), 2f64.powi(-106)];
        assert_eq!(exact_sum(v), 1.0 + f64::EPSILON);
    }

    proptest! {
        #[test]
        fn order_independent(mut xs in prop::collection::vec(-1e6f64..1e6, 0..60), seed in any::<u64>()) {
            let forward = exact_sum(xs.iter().copied());
            // deterministic shuffle
            let mut s = seed | 1;
            for i in (1..xs.len()).rev() {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                xs.swap(i, (s % (i as u64 + 1)) as usize);
            }
            prop_assert_eq!(forward, exact_sum(xs.iter().copied()));
            prop_assert_eq!(forward, exact_sum(xs.iter().rev().copied()));
        }
    }
}
