//! Seeded substreams. Work is cut into fixed-size blocks and block `b`
//! always draws from stream `b` of the master seed, so results do not depend
//! on how many workers run the blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub const BLOCK: usize = 256;

pub fn substream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f(rng, block_index, block_len)` over `ceil(total / BLOCK)` blocks and
/// returns the block results in block order.
pub fn run_blocks<T, F>(seed: u64, stream_base: u64, total: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut SimRng, usize, usize) -> T + Sync + Send,
{
    let blocks = total.div_ceil(BLOCK);
    let job = |b: usize| {
        let len = BLOCK.min(total - b * BLOCK);
        let mut rng = substream(seed, stream_base.wrapping_add(b as u64));
        f(&mut rng, b, len)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..blocks).into_par_iter().map(job).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..blocks).map(job).collect()
    }
}

/// Runs `f` on a pool of `workers` threads (0 means the default pool).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    {
        if workers > 0 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                return pool.install(f);
            }
        }
        f()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn block_results_ignore_worker_count() {
        let run = |w| {
            with_workers(w, || {
                run_blocks(9, 0, 1000, |rng, _, len| {
                    (0..len).map(|_| rng.random::<f64>()).sum::<f64>()
                })
            })
        };
        assert_eq!(run(1), run(4));
    }
}
