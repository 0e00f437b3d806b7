//! On-disk formats and grid alignment.

pub mod benchfile;
pub mod calfile;
pub mod csv;
pub mod resample;
pub mod touchstone;

pub use benchfile::{read_bench_config, read_bench_config_with, write_bench_config};
pub use calfile::{read_calibration, write_calibration, CalibrationProvenance};
pub use csv::{
    read_impedance_csv, read_trace_csv, write_bands_csv, write_compare_csv, write_impedance_csv,
    write_trace_csv,
};
pub use resample::{resample, resample_calibration};
pub use touchstone::{
    parse_touchstone_1port, write_touchstone_1port, DataFormat, FrequencyUnit, TouchstoneDocument,
};
