//! Empirical statistics of grown trees.

mod clt;
mod degree;
mod delay;
mod fringe;
mod root;

pub use clt::{leaf_clt_statistic, CltStatistic};
pub use degree::{degree_hist, DegreeHist};
pub use delay::{
    clamp_probability, delay_condition_scan, e_n_exact, inverse_snapshot_mean, random_centering,
    CenteringPoint, DelayScan, DelayScanRow, ScanMethod, Verdict,
};
pub use fringe::{
    census_from_codes, extended_census_from_codes, extended_fringe_census, fringe_census,
    fringe_codes, ExtendedFringeCensus, FringeCensus,
};
pub use root::{geometric_grid, root_trajectory, RootPoint, RootTrajectory};
