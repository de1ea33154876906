//! Switch between the rayon-backed and the plain sequential code paths.
//!
//! Every hot loop in the crate goes through [`Execution`]. With the `parallel`
//! feature disabled, [`Execution::Parallel`] silently runs sequentially, so
//! results never depend on the feature set. Reductions are always combined in
//! index order, which keeps outputs bit-identical between the two modes.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Maps `f` over `0..len`, returning results in index order.
    pub fn map_range<R, F>(self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Maps `f` over a slice, returning results in order.
    pub fn map_slice<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Runs `f(chunk_index, chunk)` over consecutive chunks of `data`.
    pub fn for_each_chunk_mut<T, F>(self, data: &mut [T], chunk_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        let chunk_len = chunk_len.max(1);
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            data.par_chunks_mut(chunk_len)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
            return;
        }
        data.chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
    }

    /// Applies `f` to fixed-size index blocks of `0..len` and returns the
    /// per-block results in block order.
    pub fn map_blocks<R, F>(self, len: usize, block: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(std::ops::Range<usize>) -> R + Sync + Send,
    {
        let block = block.max(1);
        let nblocks = len.div_ceil(block);
        self.map_range(nblocks, |b| {
            let lo = b * block;
            f(lo..(lo + block).min(len))
        })
    }
}
