//! Size-biased sampling and size-biased orderings of partitions.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::SboError;
use crate::genealogy::GenerationPartition;
use crate::rng::{exact_law, map_law, Draw, Law, Weights};

/// Largest multiset accepted by [`exact_sbo_distribution`].
pub const EXACT_SBO_LIMIT: usize = 9;

/// Finite multiset of non-negative reals; position identifies repeated
/// values.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMultiset(Vec<f64>);

impl WeightedMultiset {
    pub fn new(values: Vec<f64>) -> Result<Self, SboError> {
        if values.is_empty() {
            return Err(SboError::EmptyInput);
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(SboError::InvalidWeight);
        }
        Ok(Self(values))
    }

    pub fn from_sizes(sizes: &[usize]) -> Result<Self, SboError> {
        Self::new(sizes.iter().map(|&s| s as f64).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pick {
    pub position: usize,
    pub value: f64,
}

/// Picks position `i` with probability `value_i / total`; when every value
/// is zero the position is uniform and the value is 0.
pub fn size_biased_sample<D: Draw>(s: &WeightedMultiset, draw: &mut D) -> Pick {
    let position = if s.total() > 0.0 {
        draw.weighted(Weights::Float(s.values()))
    } else {
        draw.uniform(s.len())
    };
    Pick {
        position,
        value: s.values()[position],
    }
}

/// Blocks of a partition in a chosen order. `order[i]` is the index in the
/// source partition's block list of `blocks[i]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OrderedBlocks {
    pub blocks: Vec<Vec<usize>>,
    pub order: Vec<usize>,
}

impl OrderedBlocks {
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    fn from_order(p: &GenerationPartition, order: Vec<usize>) -> Self {
        Self {
            blocks: order.iter().map(|&b| p.blocks()[b].clone()).collect(),
            order,
        }
    }
}

/// Draws the elements uniformly without replacement and lists blocks in the
/// order they are discovered.
pub fn size_biased_order_discovery<D: Draw>(p: &GenerationPartition, draw: &mut D) -> OrderedBlocks {
    let mut elements: Vec<usize> = (0..p.len()).collect();
    draw.shuffle(&mut elements);
    let block_of = p.block_of();
    let mut seen = vec![false; p.blocks().len()];
    let mut order = Vec::with_capacity(seen.len());
    for x in elements {
        let b = block_of[x];
        if !seen[b] {
            seen[b] = true;
            order.push(b);
        }
    }
    OrderedBlocks::from_order(p, order)
}

/// Scrambles the underlying set by a uniform bijection, sorts the scrambled
/// blocks by least element and returns their preimages.
pub fn size_biased_order_scramble<D: Draw>(p: &GenerationPartition, draw: &mut D) -> OrderedBlocks {
    let mut sigma: Vec<usize> = (0..p.len()).collect();
    draw.shuffle(&mut sigma);
    let mut least: Vec<(usize, usize)> = p
        .blocks()
        .iter()
        .enumerate()
        .map(|(b, block)| (block.iter().map(|&x| sigma[x]).min().unwrap(), b))
        .collect();
    least.sort_unstable();
    OrderedBlocks::from_order(p, least.into_iter().map(|(_, b)| b).collect())
}

/// Exact law of the sequential size-biased ordering of positions: each step
/// picks a remaining position with probability proportional to its value,
/// uniformly once the remaining mass is zero.
pub fn exact_sbo_distribution(s: &WeightedMultiset) -> Result<Law<Vec<usize>>, SboError> {
    if s.len() > EXACT_SBO_LIMIT {
        return Err(SboError::BudgetExceeded {
            limit: EXACT_SBO_LIMIT,
            found: s.len(),
        });
    }
    let weights: Vec<BigRational> = s
        .values()
        .iter()
        .map(|&v| BigRational::from_float(v).expect("validated finite"))
        .collect();
    let mut law = Law::new();
    let mut prefix = Vec::with_capacity(s.len());
    let mut used = vec![false; s.len()];
    extend_orders(&weights, &mut prefix, &mut used, BigRational::from_integer(1.into()), &mut law);
    Ok(law)
}

fn extend_orders(
    w: &[BigRational],
    prefix: &mut Vec<usize>,
    used: &mut [bool],
    p: BigRational,
    law: &mut Law<Vec<usize>>,
) {
    if prefix.len() == w.len() {
        law.insert(prefix.clone(), p);
        return;
    }
    let remaining: Vec<usize> = (0..w.len()).filter(|&i| !used[i]).collect();
    let total: BigRational = remaining.iter().map(|&i| &w[i]).sum();
    for &i in &remaining {
        let step = if total.is_zero() {
            BigRational::new(1.into(), remaining.len().into())
        } else if w[i].is_zero() {
            continue;
        } else {
            &w[i] / &total
        };
        used[i] = true;
        prefix.push(i);
        extend_orders(w, prefix, used, &p * step, law);
        prefix.pop();
        used[i] = false;
    }
}

/// Exact law of the size sequence of a size-biased ordering of blocks with
/// the given sizes.
pub fn exact_sbo_size_law(sizes: &[usize]) -> Result<Law<Vec<usize>>, SboError> {
    let law = exact_sbo_distribution(&WeightedMultiset::from_sizes(sizes)?)?;
    Ok(map_law(&law, |order| order.iter().map(|&i| sizes[i]).collect()))
}

/// Exact law of the block-size sequence produced by an ordering algorithm,
/// obtained by enumerating its internal randomness.
pub fn exact_algorithm_size_law<F>(p: &GenerationPartition, budget: u64, mut algorithm: F) -> Result<Law<Vec<usize>>, crate::error::EnumerationError>
where
    F: FnMut(&GenerationPartition, &mut crate::rng::Enumerator) -> OrderedBlocks,
{
    exact_law(budget, |e| algorithm(p, e).sizes())
}

/// Random partition of `0..len`: a block count uniform on `1..=len`, then
/// uniform labels, relabelled by least element.
pub fn random_partition<D: Draw>(len: usize, draw: &mut D) -> GenerationPartition {
    let k = draw.uniform(len) + 1;
    let labels: Vec<usize> = (0..len).map(|_| draw.uniform(k)).collect();
    GenerationPartition::from_labels(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{ratio, SeedSpec, Stream};

    fn partition(blocks: Vec<Vec<usize>>) -> GenerationPartition {
        GenerationPartition::new(blocks).unwrap()
    }

    #[test]
    fn sample_law_is_size_biased() {
        let s = WeightedMultiset::new(vec![2.0, 1.0, 1.0]).unwrap();
        let law = exact_law(100, |e| {
            let p = size_biased_sample(&s, e);
            p.value as u64
        })
        .unwrap();
        assert_eq!(law[&2], ratio(1, 2));
        assert_eq!(law[&1], ratio(1, 2));
    }

    #[test]
    fn zero_total_returns_zero() {
        let s = WeightedMultiset::new(vec![0.0, 0.0]).unwrap();
        let mut r = SeedSpec::new(1).rng(Stream::SizeBiased, 0);
        assert_eq!(size_biased_sample(&s, &mut r).value, 0.0);
        let s = WeightedMultiset::new(vec![5.0]).unwrap();
        assert_eq!(size_biased_sample(&s, &mut r).value, 5.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(WeightedMultiset::new(vec![]), Err(SboError::EmptyInput));
        assert_eq!(WeightedMultiset::new(vec![-1.0]), Err(SboError::InvalidWeight));
        assert_eq!(WeightedMultiset::new(vec![f64::NAN]), Err(SboError::InvalidWeight));
    }

    #[test]
    fn product_formula_examples() {
        let law = exact_sbo_size_law(&[2, 1]).unwrap();
        assert_eq!(law[&vec![2, 1]], ratio(2, 3));
        assert_eq!(law[&vec![1, 2]], ratio(1, 3));
        let law = exact_sbo_size_law(&[3, 1]).unwrap();
        assert_eq!(law[&vec![3, 1]], ratio(3, 4));
        let law = exact_sbo_distribution(&WeightedMultiset::from_sizes(&[1, 1, 1]).unwrap()).unwrap();
        assert_eq!(law.len(), 6);
        assert!(law.values().all(|p| *p == ratio(1, 6)));
        let law = exact_sbo_distribution(&WeightedMultiset::new(vec![0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(law.len(), 2);
        assert!(exact_sbo_distribution(&WeightedMultiset::new(vec![1.0; 10]).unwrap()).is_err());
    }

    #[test]
    fn zero_weights_go_last() {
        let law = exact_sbo_distribution(&WeightedMultiset::new(vec![0.0, 1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(law.len(), 2);
        assert!(law.keys().all(|o| o[0] == 1));
    }

    #[test]
    fn algorithms_on_small_examples() {
        let p = partition(vec![vec![0, 1], vec![2]]);
        for law in [
            exact_algorithm_size_law(&p, 100, size_biased_order_discovery).unwrap(),
            exact_algorithm_size_law(&p, 100, size_biased_order_scramble).unwrap(),
        ] {
            assert_eq!(law[&vec![2, 1]], ratio(2, 3));
            assert_eq!(law[&vec![1, 2]], ratio(1, 3));
        }
        let p = partition(vec![vec![0], vec![1], vec![2]]);
        let law = exact_law(100, |e| size_biased_order_scramble(&p, e).order).unwrap();
        assert_eq!(law.len(), 6);
        assert!(law.values().all(|q| *q == ratio(1, 6)));
        let p = partition(vec![vec![0, 1, 2]]);
        let law = exact_law(100, |e| size_biased_order_discovery(&p, e).order).unwrap();
        assert_eq!(law.len(), 1);
    }

    fn integer_partitions(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            integer_partitions(n - k, k, prefix, out);
            prefix.pop();
        }
    }

    #[test]
    fn algorithms_match_product_formula_up_to_six() {
        for n in 1..=6 {
            let mut all = Vec::new();
            integer_partitions(n, n, &mut Vec::new(), &mut all);
            for sizes in all {
                let p = GenerationPartition::contiguous(&sizes);
                let oracle = exact_sbo_size_law(&sizes).unwrap();
                assert_eq!(exact_algorithm_size_law(&p, 1_000_000, size_biased_order_discovery).unwrap(), oracle);
                assert_eq!(exact_algorithm_size_law(&p, 1_000_000, size_biased_order_scramble).unwrap(), oracle);
            }
        }
    }

    #[test]
    fn first_draw_dominates_uniform() {
        for sizes in [vec![3, 1, 1], vec![4, 2, 1, 1], vec![1, 1], vec![5, 3, 2, 2, 1]] {
            let law = exact_sbo_size_law(&sizes).unwrap();
            let first = map_law(&law, |o| o[0]);
            let n = sizes.len() as i64;
            for t in 0..=*sizes.iter().max().unwrap() {
                let biased: BigRational = first.iter().filter(|(k, _)| **k <= t).map(|(_, p)| p.clone()).sum();
                let uniform = ratio(sizes.iter().filter(|&&k| k <= t).count() as i64, n);
                assert!(biased <= uniform);
            }
        }
    }

    #[test]
    fn random_partitions_are_valid() {
        let mut r = SeedSpec::new(4).rng(Stream::Partition, 0);
        for len in 1..20 {
            let p = random_partition(len, &mut r);
            assert_eq!(p.len(), len);
            assert!(p.sorted_by_least_element());
        }
    }
}
