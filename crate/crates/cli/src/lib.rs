//! Scenario-driven batch runner for the `ergolab` checks.

pub mod config;
pub mod runner;
pub mod suite;

use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use config::{ConfigError, Prepared};
use runner::{Report, RunOptions};

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const NUMERICAL: u8 = 3;
}

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Usage(String),
    Io(String),
    Library(ergolab::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Library(e) if e.is_numerical() => exit::NUMERICAL,
            _ => exit::CONFIG,
        }
    }
}

impl From<ergolab::Error> for Failure {
    fn from(e: ergolab::Error) -> Self {
        Failure::Library(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e}"),
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Library(e) if e.is_numerical() => write!(f, "numerical error: {e}"),
            Failure::Library(e) => write!(f, "error: {e}"),
        }
    }
}

impl std::error::Error for Failure {}

/// Runs prepared scenarios on `jobs` threads; results keep input order.
pub fn run_all(prepared: &[Prepared], opts: RunOptions, jobs: usize) -> Vec<Result<Report, ergolab::Error>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| prepared.par_iter().map(|p| runner::run(p, opts)).collect())
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// CSV with columns `n,index,re,im`.
pub fn trajectory_csv(rows: &[(u64, i64, Complex64)]) -> String {
    let mut out = String::from("n,index,re,im\n");
    for (n, index, z) in rows {
        writeln!(out, "{n},{index},{:?},{:?}", z.re, z.im).expect("writing to a string");
    }
    out
}
