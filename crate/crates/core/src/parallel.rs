use rayon::prelude::*;

use crate::error::{Error, Result};

/// Evaluates `f` over `items` on a pool of `threads` workers (rayon's global
/// pool when `None`) and returns results in input order.
pub(crate) fn map_ordered<T, R, F>(items: &[T], threads: Option<usize>, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match threads {
        None => Ok(items.par_iter().map(&f).collect()),
        Some(0) => Err(Error::invalid("thread count must be at least 1")),
        Some(1) => Ok(items.iter().map(&f).collect()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(|| items.par_iter().map(&f).collect()))
        }
    }
}
