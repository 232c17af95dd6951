//! Measured bitstring counts.

use std::collections::BTreeMap;

/// Map from measured bitstrings (qubit 0 = least significant bit) to
/// counts. Ordered storage keeps downstream output byte-reproducible.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShotCounts {
    pub n_qubits: usize,
    pub counts: BTreeMap<u64, u64>,
    pub total: u64,
    pub seed: u64,
}

impl ShotCounts {
    pub fn new(n_qubits: usize, seed: u64) -> Self {
        ShotCounts {
            n_qubits,
            counts: BTreeMap::new(),
            total: 0,
            seed,
        }
    }

    pub fn record(&mut self, bits: u64) {
        *self.counts.entry(bits).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn record_many(&mut self, bits: u64, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(bits).or_insert(0) += n;
        self.total += n;
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&b, &c)| (b, c))
    }

    /// Keep only the entries satisfying `pred`, preserving metadata.
    pub fn filtered(&self, pred: impl Fn(u64) -> bool) -> ShotCounts {
        let mut out = ShotCounts::new(self.n_qubits, self.seed);
        for (bits, n) in self.iter() {
            if pred(bits) {
                out.record_many(bits, n);
            }
        }
        out
    }

    /// Fraction of shots matching `pred`.
    pub fn fraction(&self, pred: impl Fn(u64) -> bool) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let hits: u64 = self.iter().filter(|&(b, _)| pred(b)).map(|(_, n)| n).sum();
        hits as f64 / self.total as f64
    }

    /// Mean of a per-bitstring statistic over all shots.
    pub fn mean(&self, stat: impl Fn(u64) -> f64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let sum: f64 = self.iter().map(|(b, n)| stat(b) * n as f64).sum();
        sum / self.total as f64
    }

    /// Render one bitstring with qubit 0 first.
    pub fn bitstring(&self, bits: u64) -> String {
        (0..self.n_qubits)
            .map(|q| if (bits >> q) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_and_filter() {
        let mut s = ShotCounts::new(3, 1);
        s.record_many(0b000, 4);
        s.record_many(0b101, 6);
        assert_eq!(s.total, 10);
        let kept = s.filtered(|b| b.count_ones() == 2);
        assert_eq!(kept.total, 6);
        assert!((s.fraction(|b| b == 0) - 0.4).abs() < 1e-15);
        assert_eq!(s.bitstring(0b101), "101");
    }
}
