//! Minimum-norm signings of a matrix ensemble.
//!
//! Exact search walks the `2^{n-1}` signings with `x_1 = +1` in
//! binary-reflected Gray order, so consecutive signings differ in one
//! coordinate and the running sum is updated in `O(m^2)`. The running sum is
//! rebuilt from scratch whenever the Gray index is a multiple of
//! [`REFRESH_INTERVAL`]; parallel blocks start on those same indices, which
//! makes every worker see bit-identical sums and the result independent of
//! the worker count.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::rmt::{flip_in_place, signed_sum, spectral_norm, MatrixEnsemble, Signing, SymmetricMatrix};
use crate::rng::RandomStream;

use rand::Rng;

pub const DEFAULT_CAP: usize = 26;
pub const REFRESH_INTERVAL: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exact,
    Heuristic,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Exact => "exact",
            SearchMode::Heuristic => "heuristic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyResult {
    pub value: f64,
    /// Minimizing signing with `x_1 = +1`.
    pub argmin: Signing,
    /// Number of signings whose norm was evaluated.
    pub explored: u64,
    pub mode: SearchMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountResult {
    pub count: u64,
    pub epsilon: f64,
    pub n: usize,
    pub m: usize,
}

/// `i XOR (i >> 1)`
#[inline]
pub fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

/// Signing at Gray index `i`: coordinate `j + 1` is negative iff bit `j` of
/// `gray(i)` is set; coordinate 0 is always positive.
pub fn signing_at(n: usize, i: u64) -> Signing {
    Signing::from_minus_mask(n, gray(i) << 1)
}

/// A position in the Gray walk with its incrementally maintained signed sum.
pub struct GrayWalker<'a> {
    ensemble: &'a MatrixEnsemble,
    index: u64,
    minus_mask: u64,
    sum: SymmetricMatrix,
}

impl<'a> GrayWalker<'a> {
    /// Starts at Gray index `start`, building the sum from scratch.
    pub fn new(ensemble: &'a MatrixEnsemble, start: u64) -> Result<Self> {
        let minus_mask = gray(start) << 1;
        let sum = signed_sum(ensemble, &Signing::from_minus_mask(ensemble.len(), minus_mask), false)?;
        Ok(Self {
            ensemble,
            index: start,
            minus_mask,
            sum,
        })
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn sum(&self) -> &SymmetricMatrix {
        &self.sum
    }

    pub fn minus_mask(&self) -> u64 {
        self.minus_mask
    }

    pub fn signing(&self) -> Signing {
        Signing::from_minus_mask(self.ensemble.len(), self.minus_mask)
    }

    /// Moves to the next Gray index by one coordinate flip, refreshing the
    /// sum from scratch on multiples of [`REFRESH_INTERVAL`].
    pub fn advance(&mut self) -> Result<()> {
        self.index += 1;
        let coord = self.index.trailing_zeros() as usize + 1;
        let bit = 1u64 << coord;
        if self.index.is_multiple_of(REFRESH_INTERVAL) {
            self.minus_mask ^= bit;
            self.sum = signed_sum(self.ensemble, &self.signing(), false)?;
        } else {
            let old_sign = if self.minus_mask & bit != 0 { -1.0 } else { 1.0 };
            flip_in_place(&mut self.sum, self.ensemble.get(coord), old_sign)?;
            self.minus_mask ^= bit;
        }
        Ok(())
    }

    /// Largest entry difference between the running sum and a from-scratch
    /// recomputation at the current signing.
    pub fn drift(&self) -> Result<f64> {
        let fresh = signed_sum(self.ensemble, &self.signing(), false)?;
        Ok(self
            .sum
            .packed()
            .iter()
            .zip(fresh.packed())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

fn check_size(ensemble: &MatrixEnsemble, cap: usize) -> Result<u64> {
    let n = ensemble.len();
    if n > cap.min(63) {
        return Err(Error::SearchTooLarge { n, cap });
    }
    Ok(1u64 << (n - 1))
}

#[derive(Clone)]
struct Best {
    value: f64,
    mask: u64,
}

impl Best {
    fn none() -> Self {
        Self {
            value: f64::INFINITY,
            mask: 0,
        }
    }

    // smaller value wins; equal values go to the lexicographically smallest
    // bit pattern (false < true, i.e. a minus sign sorts first)
    fn offer(&mut self, value: f64, mask: u64, n: usize) {
        if value < self.value
            || (value == self.value
                && Signing::from_minus_mask(n, mask) < Signing::from_minus_mask(n, self.mask))
        {
            self.value = value;
            self.mask = mask;
        }
    }
}

fn search_block(ensemble: &MatrixEnsemble, start: u64, end: u64) -> Result<Best> {
    let n = ensemble.len();
    let mut best = Best::none();
    let mut walker = GrayWalker::new(ensemble, start)?;
    loop {
        best.offer(spectral_norm(walker.sum())?, walker.minus_mask(), n);
        if walker.index() + 1 >= end {
            break;
        }
        walker.advance()?;
    }
    Ok(best)
}

/// Exact discrepancy with the default cap of 26 matrices.
pub fn disc_exact(ensemble: &MatrixEnsemble) -> Result<DiscrepancyResult> {
    disc_exact_with_cap(ensemble, DEFAULT_CAP)
}

pub fn disc_exact_with_cap(ensemble: &MatrixEnsemble, cap: usize) -> Result<DiscrepancyResult> {
    let total = check_size(ensemble, cap)?;
    let best = search_block(ensemble, 0, total)?;
    Ok(finish(ensemble, best, total))
}

fn finish(ensemble: &MatrixEnsemble, best: Best, total: u64) -> DiscrepancyResult {
    DiscrepancyResult {
        value: best.value,
        argmin: Signing::from_minus_mask(ensemble.len(), best.mask),
        explored: total,
        mode: SearchMode::Exact,
    }
}

/// Contiguous blocks of Gray indices, each starting on a refresh boundary.
pub fn partition(total: u64, workers: usize) -> Vec<(u64, u64)> {
    let chunks = total.div_ceil(REFRESH_INTERVAL);
    let workers = (workers.max(1) as u64).min(chunks);
    (0..workers)
        .map(|w| {
            let lo = chunks * w / workers * REFRESH_INTERVAL;
            let hi = (chunks * (w + 1) / workers * REFRESH_INTERVAL).min(total);
            (lo, hi)
        })
        .collect()
}

/// [`disc_exact`] split across `workers` threads; the result does not depend
/// on the worker count.
pub fn disc_exact_parallel(ensemble: &MatrixEnsemble, workers: usize) -> Result<DiscrepancyResult> {
    let total = check_size(ensemble, DEFAULT_CAP)?;
    let blocks = partition(total, workers);
    let results: Vec<Result<Best>> = std::thread::scope(|s| {
        let handles: Vec<_> = blocks
            .iter()
            .map(|&(lo, hi)| s.spawn(move || search_block(ensemble, lo, hi)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("search worker panicked")).collect()
    });
    let n = ensemble.len();
    let mut best = Best::none();
    for r in results {
        let b = r?;
        best.offer(b.value, b.mask, n);
    }
    Ok(finish(ensemble, best, total))
}

/// `S_n(eps)`: the number of signings with `||sum x_i A_i|| <= eps`, counted
/// over half the space and doubled.
pub fn count_low_disc(ensemble: &MatrixEnsemble, epsilon: f64) -> Result<CountResult> {
    let total = check_size(ensemble, DEFAULT_CAP)?;
    let mut count = 0u64;
    let mut walker = GrayWalker::new(ensemble, 0)?;
    loop {
        if spectral_norm(walker.sum())? <= epsilon {
            count += 1;
        }
        if walker.index() + 1 >= total {
            break;
        }
        walker.advance()?;
    }
    Ok(CountResult {
        count: 2 * count,
        epsilon,
        n: ensemble.len(),
        m: ensemble.dim(),
    })
}

/// Steepest-descent single-flip local search with random restarts.
///
/// Restart `r` draws its initial signing from `stream.substream(r)`, then
/// repeatedly applies the flip with the largest norm decrease until no flip
/// improves or `max_iters` flips were made.
pub fn disc_heuristic(
    ensemble: &MatrixEnsemble,
    restarts: usize,
    max_iters: usize,
    stream: RandomStream,
) -> Result<DiscrepancyResult> {
    if restarts == 0 {
        return Err(domain("restarts", 0.0, "restarts >= 1"));
    }
    if max_iters == 0 {
        return Err(domain("max_iters", 0.0, "max_iters >= 1"));
    }
    let n = ensemble.len();
    let mut explored = 0u64;
    let mut best: Option<(f64, Signing)> = None;
    for r in 0..restarts {
        let mut rng = stream.substream(r as u64).rng();
        let mut x = Signing::new((0..n).map(|_| rng.random::<bool>()).collect());
        let mut sum = signed_sum(ensemble, &x, false)?;
        let mut current = spectral_norm(&sum)?;
        explored += 1;
        for _ in 0..max_iters {
            let mut step: Option<(usize, f64)> = None;
            for i in 0..n {
                let mut trial = sum.clone();
                flip_in_place(&mut trial, ensemble.get(i), x.sign(i))?;
                let v = spectral_norm(&trial)?;
                explored += 1;
                if v < current && step.is_none_or(|(_, b)| v < b) {
                    step = Some((i, v));
                }
            }
            let Some((i, v)) = step else { break };
            flip_in_place(&mut sum, ensemble.get(i), x.sign(i))?;
            x.flip(i);
            current = v;
        }
        let candidate = x.canonical();
        let better = match &best {
            None => true,
            Some((bv, bx)) => current < *bv || (current == *bv && candidate < *bx),
        };
        if better {
            best = Some((current, candidate));
        }
    }
    let (value, argmin) = best.expect("at least one restart");
    Ok(DiscrepancyResult {
        value,
        argmin,
        explored,
        mode: SearchMode::Heuristic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmt::sample_ensemble;

    fn ensemble(n: usize, m: usize, seed: u64) -> MatrixEnsemble {
        sample_ensemble(n, m, &mut RandomStream::new(seed, 0).rng()).unwrap()
    }

    // every signing with x_1 = +1, each sum rebuilt from scratch
    fn naive(ens: &MatrixEnsemble) -> (f64, Signing) {
        let n = ens.len();
        let mut best: Option<(f64, Signing)> = None;
        for mask in 0..(1u64 << (n - 1)) {
            let x = Signing::from_minus_mask(n, mask << 1);
            let v = spectral_norm(&signed_sum(ens, &x, false).unwrap()).unwrap();
            if best.as_ref().is_none_or(|(b, bx)| v < *b || (v == *b && x < *bx)) {
                best = Some((v, x));
            }
        }
        best.unwrap()
    }

    #[test]
    fn single_matrix() {
        let ens = ensemble(1, 3, 1);
        let r = disc_exact(&ens).unwrap();
        assert_eq!(r.value, spectral_norm(ens.get(0)).unwrap());
        assert_eq!(r.explored, 1);
        assert_eq!(r.argmin, Signing::all_plus(1));
    }

    #[test]
    fn duplicate_pair_cancels() {
        let a = ensemble(1, 2, 2).get(0).clone();
        let ens = MatrixEnsemble::new(vec![a.clone(), a]).unwrap();
        let r = disc_exact(&ens).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.argmin, Signing::from_signs(&[1, -1]));
    }

    #[test]
    fn matches_naive_enumeration() {
        for seed in 0..20 {
            let ens = ensemble(12, 2, 100 + seed);
            let r = disc_exact(&ens).unwrap();
            let (v, x) = naive(&ens);
            assert!((r.value - v).abs() < 1e-9, "seed {seed}");
            assert_eq!(r.argmin.canonical(), x.canonical(), "seed {seed}");
            assert_eq!(r.explored, 1 << 11);
            let check = spectral_norm(&signed_sum(&ens, &r.argmin, false).unwrap()).unwrap();
            assert!((check - r.value).abs() < 1e-9);
        }
    }

    #[test]
    fn walker_tracks_signed_sum() {
        let ens = ensemble(3, 2, 3);
        let mut w = GrayWalker::new(&ens, 0).unwrap();
        for i in 0..4u64 {
            assert_eq!(w.signing(), signing_at(3, i));
            assert!(w.drift().unwrap() < 1e-9);
            if i < 3 {
                w.advance().unwrap();
            }
        }
        let ens = ensemble(20, 4, 4);
        let mut w = GrayWalker::new(&ens, 0).unwrap();
        while w.index() + 1 < 1 << 19 {
            w.advance().unwrap();
            if w.index().is_multiple_of(1 << 12) {
                assert!(w.drift().unwrap() < 1e-9, "index {}", w.index());
            }
        }
    }

    #[test]
    fn block_start_is_gray_decode() {
        let ens = ensemble(20, 2, 5);
        for &(lo, _) in &partition(1 << 19, 8) {
            let w = GrayWalker::new(&ens, lo).unwrap();
            assert_eq!(w.minus_mask(), gray(lo) << 1);
            assert_eq!(lo % REFRESH_INTERVAL, 0);
        }
        let parts = partition(1 << 19, 3);
        assert_eq!(parts.first().unwrap().0, 0);
        assert_eq!(parts.last().unwrap().1, 1 << 19);
        assert!(parts.windows(2).all(|w| w[0].1 == w[1].0));
        assert_eq!(partition(8, 4), vec![(0, 8)]);
    }

    #[test]
    fn parallel_independent_of_workers() {
        let ens = ensemble(20, 2, 6);
        let one = disc_exact_parallel(&ens, 1).unwrap();
        let eight = disc_exact_parallel(&ens, 8).unwrap();
        assert_eq!(one, eight);
        assert_eq!(one.value.to_bits(), disc_exact(&ens).unwrap().value.to_bits());
        let three = disc_exact_parallel(&ens, 3).unwrap();
        assert_eq!(one, three);
    }

    #[test]
    fn cap_is_enforced() {
        let ens = ensemble(27, 1, 7);
        assert_eq!(disc_exact(&ens), Err(Error::SearchTooLarge { n: 27, cap: 26 }));
        assert!(disc_exact_with_cap(&ensemble(6, 2, 7), 5).is_err());
        assert!(count_low_disc(&ens, 1.0).is_err());
    }

    #[test]
    fn permutation_invariance() {
        let ens = ensemble(8, 3, 8);
        let base = disc_exact(&ens).unwrap().value;
        let mut rng = RandomStream::new(8, 1).rng();
        for _ in 0..5 {
            let mut perm: Vec<usize> = (0..8).collect();
            for i in (1..8).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let v = disc_exact(&ens.permuted(&perm).unwrap()).unwrap().value;
            assert!((v - base).abs() < 1e-12 * base.max(1.0));
        }
    }

    #[test]
    fn scales_linearly() {
        let ens = ensemble(10, 2, 9);
        let r = disc_exact(&ens).unwrap();
        let h = disc_exact(&ens.scaled(0.5)).unwrap();
        assert!((h.value - 0.5 * r.value).abs() < 1e-12 * r.value);
        assert_eq!(h.argmin.canonical(), r.argmin.canonical());
    }

    #[test]
    fn counts() {
        let ens = ensemble(10, 2, 10);
        let d = disc_exact(&ens).unwrap().value;
        assert_eq!(count_low_disc(&ens, 0.99 * d).unwrap().count, 0);
        assert_eq!(count_low_disc(&ens, 1e6).unwrap().count, 1024);
        let mut last = 0;
        for i in 0..30 {
            let c = count_low_disc(&ens, d + 0.5 * i as f64).unwrap().count;
            assert_eq!(c % 2, 0);
            assert!(c >= last);
            last = c;
        }
        assert!(count_low_disc(&ens, d).unwrap().count >= 2);
    }

    #[test]
    fn heuristic_never_beats_exact() {
        for seed in 0..50 {
            let ens = ensemble(12, 2, 300 + seed);
            let exact = disc_exact(&ens).unwrap();
            let h = disc_heuristic(&ens, 20, 1000, RandomStream::new(seed, 9)).unwrap();
            assert!(h.value >= exact.value - 1e-12);
            assert!(h.argmin.bits()[0]);
            let check = spectral_norm(&signed_sum(&ens, &h.argmin, false).unwrap()).unwrap();
            assert!((check - h.value).abs() < 1e-9);
        }
    }

    #[test]
    fn heuristic_finds_paired_cancellation() {
        let base = ensemble(6, 2, 11);
        let ens = MatrixEnsemble::new(base.matrices().iter().flat_map(|a| [a.clone(), a.clone()]).collect()).unwrap();
        let h = disc_heuristic(&ens, 20, 100, RandomStream::new(11, 0)).unwrap();
        assert!(h.value < 1e-12, "{}", h.value);
    }

    #[test]
    fn heuristic_is_deterministic() {
        let ens = ensemble(16, 2, 12);
        let a = disc_heuristic(&ens, 5, 50, RandomStream::new(3, 4)).unwrap();
        let b = disc_heuristic(&ens, 5, 50, RandomStream::new(3, 4)).unwrap();
        assert_eq!(a, b);
        assert!(disc_heuristic(&ens, 0, 5, RandomStream::new(3, 4)).is_err());
    }
}
