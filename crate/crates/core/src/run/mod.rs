//! Config-driven runs behind the command-line tool.

pub mod config;
pub mod scan;
pub mod simulate;
pub mod verify;
pub mod wigner;

pub const THREADS_ENV: &str = "ERMAKOV_THREADS";

/// Sizes the global rayon pool from `ERMAKOV_THREADS` when it is set to a
/// positive integer. A pool that is already built is left alone.
pub fn configure_threads() {
    let n = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
