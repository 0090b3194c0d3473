use serde::Serialize;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.extend(values);
    acc.value()
}

/// Terminal probabilities for one signal photon.
///
/// `p_bob` covers Bob's blocking device (and D4); `p_noise` covers
/// obstructions in the channel that are not Bob's.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct OutcomeDistribution {
    pub p_d1: f64,
    pub p_d2: f64,
    pub p_d3: f64,
    pub p_bob: f64,
    pub p_noise: f64,
}

impl OutcomeDistribution {
    pub const FIELD_NAMES: [&'static str; 5] = ["p_d1", "p_d2", "p_d3", "p_bob", "p_noise"];

    pub fn to_array(&self) -> [f64; 5] {
        [self.p_d1, self.p_d2, self.p_d3, self.p_bob, self.p_noise]
    }

    pub fn from_array(values: [f64; 5]) -> Self {
        let [p_d1, p_d2, p_d3, p_bob, p_noise] = values;
        Self {
            p_d1,
            p_d2,
            p_d3,
            p_bob,
            p_noise,
        }
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.to_array())
    }

    /// Largest per-field absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..1_000_000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1e-10)).abs() < 1e-22);
    }

    #[test]
    fn compensated_sum_handles_cancellation() {
        assert_eq!(compensated_sum([1.0, 1e100, 1.0, -1e100]), 2.0);
    }
}
