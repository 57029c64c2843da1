//! Multiple testing procedures controlling the FWER, k-FWER, FDR and FDP
//! exceedance, with Monte Carlo tools for checking their error rates.
//!
//! Hypotheses are indexed `0..m`; ranks of ordered p-values are 1-based.
//!
//! ```
//! use multitest::{stepup, PValueFamily};
//!
//! let p = PValueFamily::new(vec![0.01, 0.02, 0.30, 0.90])?;
//! let r = stepup::linear_step_up(&p, 0.05)?;
//! assert_eq!(r.indices(), &[0, 1]);
//! assert_eq!(r.threshold(), Some(0.025));
//! # Ok::<(), multitest::Error>(())
//! ```

pub mod binomial;
pub mod error;
pub mod family;
pub mod fdp;
pub mod kfwer;
pub mod numeric;
pub mod procedure;
pub mod pvalue;
pub mod sim;
pub mod stepup;

pub use error::{Error, Result};
pub use family::{
    false_discovery_proportion, false_rejections, GroundTruth, OrderedPValues, PValueFamily,
    RejectionSet,
};
pub use procedure::{Outcome, PreparedProcedure, Procedure};
pub use sim::{ErrorRateEstimate, Execution, Metric};
