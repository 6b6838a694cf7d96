//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) independent work items run on the
//! rayon pool; without it every helper degrades to a plain sequential loop.
//! Results are always returned in input order, so output is identical in
//! both modes.

/// Execution strategy for batches of independent work.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Parallelism {
    /// Use the rayon pool when the crate is built with `parallel`.
    #[default]
    Auto,
    Sequential,
}

impl Parallelism {
    /// Whether this mode actually fans out in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Auto
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_ordered<T, R, F>(items: &[T], mode: Parallelism, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = mode;
    items.iter().map(f).collect()
}

/// Applies `f` to every element of the zipped per-node buffers.
///
/// Only fans out when `work` (an estimate of the total flop count) is large
/// enough to amortise scheduling.
pub(crate) fn for_each_node<A, B, C, F>(
    a: &mut [A],
    b: &mut [B],
    c: &mut [C],
    work: usize,
    f: F,
) where
    A: Send,
    B: Send,
    C: Send,
    F: Fn(usize, &mut A, &mut B, &mut C) + Sync + Send,
{
    const PAR_THRESHOLD: usize = 1 << 16;
    #[cfg(feature = "parallel")]
    if work >= PAR_THRESHOLD {
        use rayon::prelude::*;
        a.par_iter_mut()
            .zip(b.par_iter_mut())
            .zip(c.par_iter_mut())
            .enumerate()
            .for_each(|(i, ((x, y), z))| f(i, x, y, z));
        return;
    }
    let _ = (work, PAR_THRESHOLD);
    for (i, ((x, y), z)) in a.iter_mut().zip(b.iter_mut()).zip(c.iter_mut()).enumerate() {
        f(i, x, y, z);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_in_both_modes() {
        let items: Vec<u64> = (0..100).collect();
        let a = map_ordered(&items, Parallelism::Auto, |x| x * x);
        let b = map_ordered(&items, Parallelism::Sequential, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[7], 49);
    }
}
