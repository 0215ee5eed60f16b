//! Edge-preserving smoothing of 1D signals with bilateral and guided filters,
//! treated as graph Laplacians on the sample chain, and acceleration of
//! their repeated application with truncated, restarted preconditioned
//! conjugate gradients.
//!
//! ```
//! use cgsmooth::{add_noise, generate_clean, CleanSignalSpec, NoiseSpec};
//! use cgsmooth::{compute_metrics, pcg_restarted, Bilateral, BfParams, CgSchedule, IterationLog};
//!
//! let clean = generate_clean(&CleanSignalSpec::default().resized(600).unwrap()).unwrap();
//! let noisy = add_noise(&clean, &NoiseSpec::new(0.01, 1).unwrap()).unwrap();
//! let bf = Bilateral::new(BfParams::default()).unwrap();
//! let mut log = IterationLog::with_reference(clean.clone());
//! let out = pcg_restarted(&noisy, &bf, &CgSchedule::self_guided(3, 11), &mut log).unwrap();
//! assert_eq!(log.applications(), 33);
//! let before = compute_metrics(&clean, &noisy).unwrap();
//! let after = compute_metrics(&clean, &out).unwrap();
//! assert!(after.psnr_db > before.psnr_db);
//! ```

pub mod cg;
pub mod error;
pub mod filters;
pub mod iterate;
pub mod log;
pub mod method;
pub mod metrics;
pub mod operator;
pub mod rng;
pub mod signal;

pub use cg::{pcg_restarted, pcg_truncated, Breakdown, CgSchedule, FreezePolicy, PcgState};
pub use error::{Error, Result};
pub use filters::{
    bf_build, bf_step, box_mean, gf_build, gf_coefficients, gf_step_fast, mean_filter, BfParams,
    Bilateral, FilterParams, FilterRegistry, GfParams, GraphFilter, Guided,
};
pub use iterate::{iterate_filter, GuidancePolicy};
pub use log::{IterationLog, IterationRecord, LogEvent};
pub use method::{Denoiser, Iterated, MethodParams, MethodRegistry, RestartedCg, TruncatedCg};
pub use metrics::{compute_metrics, Metrics};
pub use operator::{BandedSymOperator, DenseMatrix, DENSE_LIMIT};
pub use signal::{
    add_noise, gaussian_noise, generate_clean, CleanSignalSpec, NoiseSpec, Segment, SegmentShape,
    Signal,
};
