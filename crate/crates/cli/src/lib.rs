//! Configuration, orchestration and report emission for the `levicert` binary.

pub mod config;
pub mod emit;
pub mod error;
pub mod report;
pub mod run;

pub use config::RunConfig;
pub use emit::emit;
pub use error::CliError;
pub use report::Report;
pub use run::run;

/// Runs `cfg` on a pool of `workers` threads (all cores when `None`).
pub fn run_with_workers(cfg: &RunConfig, workers: Option<usize>) -> Result<Report, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers.or(cfg.workers) {
        builder = builder.num_threads(w);
    }
    builder.build()?.install(|| run(cfg))
}
