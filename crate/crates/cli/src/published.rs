//! Published simulation benchmark for the reference yaw loop.
//!
//! Transient characteristics of three PI gain sets on the nominal plant,
//! simulated under a unit step. These are the only externally sourced
//! numbers in the tool and are always displayed apart from computed values.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PublishedRow {
    pub label: &'static str,
    pub kp: f64,
    pub ki: f64,
    pub peak_time: f64,
    pub percent_overshoot: f64,
    pub settling_time: f64,
}

/// Provenance label attached to every published value in reports.
pub const SOURCE: &str = "published simulation benchmark";

pub const GA: PublishedRow = PublishedRow {
    label: "GA",
    kp: 260.0,
    ki: 70.0,
    peak_time: 1.34,
    percent_overshoot: 18.0,
    settling_time: 4.52,
};

pub const SA: PublishedRow = PublishedRow {
    label: "SA",
    kp: 296.0,
    ki: 81.0,
    peak_time: 1.73,
    percent_overshoot: 21.6,
    settling_time: 4.1,
};

/// Root-locus design used as the classical baseline.
pub const ROOT_LOCUS: PublishedRow = PublishedRow {
    label: "r-locus",
    kp: 230.0,
    ki: 90.0,
    peak_time: 2.0,
    percent_overshoot: 24.0,
    settling_time: 3.45,
};

pub const SIMULATION_TABLE: [PublishedRow; 3] = [GA, SA, ROOT_LOCUS];
