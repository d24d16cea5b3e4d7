//! Compensated and deterministic summation.

/// Neumaier-compensated accumulator.
///
/// The state is a plain `(sum, compensation)` pair, so snapshots taken at two
/// points of the same accumulation reproduce every intermediate total exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.add(other.sum);
        self.add(other.comp);
    }
}

/// Compensated sum of a slice in index order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = Accumulator::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// Block size for [`deterministic_sum`]. Partitions are fixed by this
/// constant, not by the worker count.
pub const BLOCK: usize = 4096;

/// Parallel compensated sum whose result does not depend on the number of
/// rayon workers: the input is cut into fixed blocks, each block is summed
/// sequentially, and the block totals are combined by a fixed pairwise tree.
pub fn deterministic_sum(values: &[f64]) -> f64 {
    use rayon::prelude::*;
    if values.len() <= BLOCK {
        return compensated_sum(values);
    }
    let partials: Vec<Accumulator> = values
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut acc = Accumulator::new();
            chunk.iter().for_each(|&v| acc.add(v));
            acc
        })
        .collect();
    pairwise(&partials).value()
}

fn pairwise(parts: &[Accumulator]) -> Accumulator {
    match parts.len() {
        0 => Accumulator::new(),
        1 => parts[0],
        n => {
            let (l, r) = parts.split_at(n / 2);
            let mut a = pairwise(l);
            a.merge(&pairwise(r));
            a
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut v = vec![1.0e16];
        v.extend(std::iter::repeat(1.0).take(1000));
        v.push(-1.0e16);
        assert_eq!(compensated_sum(&v), 1000.0);
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let v: Vec<f64> = (0..50_000).map(|i| ((i as f64) * 0.37).sin() / (1.0 + i as f64)).collect();
        let a = deterministic_sum(&v);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| deterministic_sum(&v));
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
