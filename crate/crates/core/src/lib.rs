//! Climbing-session analytics over accelerometer traces.
//!
//! The pipeline runs raw CSV logs through [`ingest`] (axis collapse and
//! 20 Hz resampling), scores the resulting trace with [`metrics`], keeps
//! climbs in a JSON-file [`store`], aligns linked videos with [`videosync`]
//! and draws traces with [`graphout`].
//!
//! ```
//! use climbtrace_core::ingest::{parse_csv, resample};
//! use climbtrace_core::metrics::SmoothnessReport;
//!
//! let log = parse_csv(b"t,mag\n0,1.0\n0.05,1.2\n0.1,0.9\n").unwrap();
//! let trace = resample(&log).unwrap();
//! let report = SmoothnessReport::compute(trace.series()).unwrap();
//! assert_eq!(report.display_score, 2);
//! ```

pub mod graphout;
pub mod ingest;
pub mod metrics;
pub mod store;
pub mod videosync;

pub use graphout::{layout, render_svg, GraphMode, GraphSpec};
pub use ingest::{parse_csv, resample, ClimbTrace, RawSampleLog};
pub use metrics::{MagnitudeSeries, SmoothnessReport};
pub use store::{ClimbRecord, ClimbStore, ClimbSummary, StoreError};
pub use videosync::VideoLink;
