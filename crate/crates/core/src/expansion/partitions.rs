/// All tuples `(m_1, …, m_n)` of nonnegative integers with `Σ j·m_j = n`,
/// in descending lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSet {
    n: usize,
    tuples: Vec<Vec<u32>>,
}

/// Largest order whose Faà di Bruno denominators fit in `u128`.
pub const MAX_ORDER: usize = 30;

impl PartitionSet {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Vec<u32>] {
        &self.tuples
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.tuples.iter().map(Vec::as_slice)
    }
}

/// Enumerates the multiplicity tuples of `n`; `n = 0` gives the single
/// empty tuple.
pub fn partitions(n: usize) -> PartitionSet {
    assert!(n <= MAX_ORDER, "partition order {n} exceeds {MAX_ORDER}");
    let mut tuples = Vec::new();
    let mut current = vec![0u32; n];
    fill(1, n, &mut current, &mut tuples);
    PartitionSet { n, tuples }
}

fn fill(j: usize, remaining: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let n = current.len();
    if j > n {
        if remaining == 0 {
            out.push(current.clone());
        }
        return;
    }
    for m in (0..=remaining / j).rev() {
        current[j - 1] = m as u32;
        fill(j + 1, remaining - m * j, current, out);
    }
    current[j - 1] = 0;
}

/// `m_1 + … + m_n`.
pub fn block_count(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// `Π_j m_j! (j!)^{m_j}`.
pub fn denominator(m: &[u32]) -> u128 {
    let mut den: u128 = 1;
    for (j, &mj) in m.iter().enumerate() {
        let jf = factorial(j + 1);
        den *= factorial(mj as usize);
        for _ in 0..mj {
            den *= jf;
        }
    }
    den
}

/// Faà di Bruno weight `n! / Π_j m_j! (j!)^{m_j}`, the number of set
/// partitions of `n` labelled items with the given block sizes.
pub fn faa_di_bruno_weight(m: &[u32]) -> u128 {
    factorial(m.len()) / denominator(m)
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=10).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    }

    #[test]
    fn order_three_listing() {
        let p = partitions(3);
        assert_eq!(p.tuples(), &[vec![3, 0, 0], vec![1, 1, 0], vec![0, 0, 1]]);
        assert_eq!(partitions(0).tuples(), &[Vec::<u32>::new()]);
    }

    #[test]
    fn weights_count_set_partitions() {
        // Σ weights over tuples of n = Bell number
        let bell = [1u128, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, &b) in bell.iter().enumerate() {
            let total: u128 = partitions(n).iter().map(faa_di_bruno_weight).sum();
            assert_eq!(total, b);
        }
    }
}
