//! Classical building blocks of the hybrid estimator.

mod correction;
mod oracle;
mod precision;
mod segment;
mod series;

pub use correction::{correction_totals, corrected_snr, exact_joint_prob_sum};
pub use oracle::oracle_snr;
pub(crate) use oracle::{check_compatible, correlate};
pub use precision::{predict_precision, predict_precision_with_discards, Precision};
pub use segment::{preprocess, EncodedSegment, MIN_PADDED_LEN};
pub use series::{Provenance, SeriesMeta, SnrEstimate, SnrSeries, TimeSeries};
