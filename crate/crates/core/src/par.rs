//! Data-parallel helpers. With the `parallel` feature these fan out over the
//! rayon pool; without it they run as plain sequential iterators.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(lo..hi).map(f).collect()`, possibly in parallel. Order is preserved.
pub fn map_range<T, F>(lo: usize, hi: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (lo..hi).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (lo..hi).map(f).collect()
    }
}

/// `items.iter().map(f).collect()`, possibly in parallel. Order is preserved.
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Fill `out[i] = f(i)`.
pub fn fill_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        out.par_iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
    }
    #[cfg(not(feature = "parallel"))]
    {
        out.iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
    }
}

/// Maximum of `f(i)` over `lo..hi`; `f64::NEG_INFINITY` when empty.
pub fn max_range<F>(lo: usize, hi: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (lo..hi).into_par_iter().map(f).reduce(|| f64::NEG_INFINITY, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (lo..hi).map(f).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let v = map_range(3, 10, |i| i * i);
        assert_eq!(v, (3..10).map(|i| i * i).collect::<Vec<_>>());
        let w = map_slice(&v, |x| x + 1);
        assert_eq!(w[0], 10);
        let mut out = vec![0usize; 5];
        fill_indexed(&mut out, |i| 2 * i);
        assert_eq!(out, vec![0, 2, 4, 6, 8]);
        assert_eq!(max_range(0, 4, |i| i as f64), 3.0);
        assert_eq!(max_range(0, 0, |i| i as f64), f64::NEG_INFINITY);
    }
}
