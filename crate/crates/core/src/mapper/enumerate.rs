use std::cmp::Ordering;
use std::collections::BinaryHeap;

use ndarray::Array2;

use crate::util::splitmix;

/// Product of the chosen entries, multiplied in row order.
pub fn joint_probability(p: &Array2<f64>, assignment: &[usize]) -> f64 {
    assignment.iter().enumerate().fold(1.0, |acc, (i, &j)| acc * p[[i, j]])
}

struct Entry {
    prob: f64,
    columns: Vec<usize>,
    ranks: Vec<usize>,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // max-heap: higher probability first, then the lexicographically
    // smaller column vector
    fn cmp(&self, other: &Self) -> Ordering {
        self.prob.total_cmp(&other.prob).then_with(|| other.columns.cmp(&self.columns))
    }
}

/// Lazy stream of every assignment of `p`, in non-increasing joint
/// probability. Equal probabilities come out in lexicographic order of the
/// chosen columns.
pub struct MappingStream {
    p: Array2<f64>,
    /// Columns of each row sorted by probability, ties by index.
    order: Vec<Vec<usize>>,
    heap: BinaryHeap<Entry>,
}

pub fn enumerate_mappings(p: &Array2<f64>) -> MappingStream {
    let order: Vec<Vec<usize>> = p
        .rows()
        .into_iter()
        .map(|row| {
            let mut cols: Vec<usize> = (0..row.len()).collect();
            cols.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
            cols
        })
        .collect();
    let mut heap = BinaryHeap::new();
    if p.ncols() > 0 || p.nrows() == 0 {
        let ranks = vec![0; p.nrows()];
        heap.push(make_entry(p, &order, ranks));
    }
    MappingStream {
        p: p.clone(),
        order,
        heap,
    }
}

fn make_entry(p: &Array2<f64>, order: &[Vec<usize>], ranks: Vec<usize>) -> Entry {
    let columns: Vec<usize> = ranks.iter().enumerate().map(|(i, &r)| order[i][r]).collect();
    Entry {
        prob: joint_probability(p, &columns),
        columns,
        ranks,
    }
}

impl Iterator for MappingStream {
    type Item = (Vec<usize>, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let top = self.heap.pop()?;
        // Each state has a unique parent (decrement its last nonzero rank),
        // so advancing only rows at or after that position never repeats.
        let start = top.ranks.iter().rposition(|&r| r > 0).unwrap_or(0);
        let m = self.p.ncols();
        for j in start..top.ranks.len() {
            if top.ranks[j] + 1 < m {
                let mut ranks = top.ranks.clone();
                ranks[j] += 1;
                self.heap.push(make_entry(&self.p, &self.order, ranks));
            }
        }
        Some((top.columns, top.prob))
    }
}

/// Every assignment from `rows` variables to `cols` variables exactly once,
/// in a seeded pseudo-random order.
pub struct UniformMappings {
    rows: usize,
    cols: usize,
    domain: u128,
    next_index: u128,
    perm: Feistel,
}

pub fn uniform_mappings(rows: usize, cols: usize, seed: u64) -> UniformMappings {
    let domain = if rows == 0 {
        1
    } else if cols == 0 {
        0
    } else {
        (cols as u128).checked_pow(rows as u32).unwrap_or(u128::MAX)
    };
    UniformMappings {
        rows,
        cols,
        domain,
        next_index: 0,
        perm: Feistel::new(domain, seed),
    }
}

impl UniformMappings {
    /// Total number of assignments the stream will produce.
    pub fn total(&self) -> u128 {
        self.domain
    }
}

impl Iterator for UniformMappings {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.next_index >= self.domain {
            return None;
        }
        let mut code = self.perm.permute(self.next_index);
        self.next_index += 1;
        let mut out = vec![0; self.rows];
        for slot in out.iter_mut() {
            *slot = (code % self.cols as u128) as usize;
            code /= self.cols as u128;
        }
        Some(out)
    }
}

/// Balanced Feistel network over the smallest even bit width covering the
/// domain, with cycle walking to stay inside it.
struct Feistel {
    domain: u128,
    half_bits: u32,
    seed: u64,
}

const ROUNDS: u64 = 6;

impl Feistel {
    fn new(domain: u128, seed: u64) -> Self {
        let bits = 128 - domain.saturating_sub(1).leading_zeros();
        let half_bits = bits.div_ceil(2).max(1);
        Feistel { domain, half_bits, seed }
    }

    fn round(&self, r: u64, x: u64) -> u64 {
        let mask = if self.half_bits >= 64 { u64::MAX } else { (1u64 << self.half_bits) - 1 };
        splitmix(splitmix(self.seed ^ r.wrapping_mul(0xA24B_AED4_963E_E407)) ^ x) & mask
    }

    fn encrypt(&self, x: u128) -> u128 {
        let h = self.half_bits;
        let mask = if h >= 64 { u64::MAX } else { (1u64 << h) - 1 };
        let mut left = ((x >> h) as u64) & mask;
        let mut right = (x as u64) & mask;
        for r in 0..ROUNDS {
            let next = left ^ self.round(r, right);
            left = right;
            right = next;
        }
        ((left as u128) << h) | right as u128
    }

    fn permute(&self, index: u128) -> u128 {
        let mut x = self.encrypt(index);
        while x >= self.domain {
            x = self.encrypt(x);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use std::collections::HashSet;

    #[test]
    fn single_row_in_probability_order() {
        let got: Vec<_> = enumerate_mappings(&array![[0.9, 0.1]]).map(|(c, _)| c).collect();
        assert_eq!(got, vec![vec![0], vec![1]]);
    }

    #[test]
    fn two_by_two_joint_probabilities() {
        let p = array![[0.6, 0.4], [0.7, 0.3]];
        let probs: Vec<f64> = enumerate_mappings(&p).map(|(_, q)| q).collect();
        let expect = [0.42, 0.28, 0.18, 0.12];
        assert_eq!(probs.len(), 4);
        for (a, b) in probs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{probs:?}");
        }
    }

    #[test]
    fn uniform_two_by_two_ties_are_lexicographic() {
        let p = array![[0.5, 0.5], [0.5, 0.5]];
        let got: Vec<_> = enumerate_mappings(&p).map(|(c, _)| c).collect();
        assert_eq!(got, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn empty_sides() {
        assert_eq!(enumerate_mappings(&Array2::zeros((0, 3))).count(), 1);
        assert_eq!(enumerate_mappings(&Array2::zeros((2, 0))).count(), 0);
        assert_eq!(uniform_mappings(0, 3, 1).count(), 1);
        assert_eq!(uniform_mappings(2, 0, 1).count(), 0);
    }

    #[test]
    fn uniform_streams_are_exhaustive_and_distinct() {
        assert_eq!(uniform_mappings(1, 1, 5).collect::<Vec<_>>(), vec![vec![0]]);
        for (r, c, n) in [(2, 2, 4), (3, 3, 27), (4, 5, 625), (2, 7, 49)] {
            let all: Vec<_> = uniform_mappings(r, c, 99).collect();
            assert_eq!(all.len(), n);
            assert_eq!(all.iter().collect::<HashSet<_>>().len(), n);
            assert!(all.iter().all(|a| a.iter().all(|&j| j < c)));
        }
    }

    #[test]
    fn uniform_order_depends_on_seed() {
        let a: Vec<_> = uniform_mappings(3, 4, 1).collect();
        let b: Vec<_> = uniform_mappings(3, 4, 2).collect();
        let a2: Vec<_> = uniform_mappings(3, 4, 1).collect();
        assert_ne!(a, b);
        assert_eq!(a, a2);
    }
}
