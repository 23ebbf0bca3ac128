//! Benchmark-only crate: the crate itself exports nothing.  The criterion
//! targets under `benches/` time the reward-sampling primitive and one full
//! run of each protocol family against a shared one-spike instance.
