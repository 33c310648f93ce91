use rayon::prelude::*;

/// Runs one independent replication per seed and returns the results in seed
/// order. With `parallel` set, replications fan out over the rayon pool; each
/// one owns its whole simulation so the outputs are identical either way.
pub fn run_replications<T, F>(seeds: &[u64], parallel: bool, run: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    if parallel {
        seeds.par_iter().map(|&s| run(s)).collect()
    } else {
        seeds.iter().map(|&s| run(s)).collect()
    }
}
