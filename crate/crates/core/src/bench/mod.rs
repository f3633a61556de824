//! Experiment layer: the scalar demo, seeded VQE ensembles and their CSV output.

mod experiment;
mod gradcheck;
mod records;
mod revisit;
mod toy;

pub use experiment::{
    run_experiment, run_sample, sample_seed, Experiment, ExperimentConfig, Method, Problem, ProblemKind,
    SampleResult,
};
pub use gradcheck::{central_difference, check_circuit, gradcheck_suite, GradCheckCase, FD_STEP};
pub use records::{
    format_value, histogram_csv, profile_csv, read_histogram, read_profile, write_histogram, write_profile,
    HistogramRecord, ProfileRecord, HISTOGRAM_HEADER, PROFILE_HEADER,
};
pub use revisit::{revisit_statistics, RevisitStats, HS_REVISIT_TOL};
pub use toy::{grid_minimum, toy_cost, ToyOracle, TOY_PERIOD};
