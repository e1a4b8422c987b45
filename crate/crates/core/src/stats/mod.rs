//! Paired significance testing and normality checks.

mod shapiro;
mod special;
mod ttest;

pub use shapiro::{shapiro_wilk, ShapiroWilk};
pub use special::{beta_reg, ln_gamma, student_t_two_tailed};
pub use ttest::{paired_t_test, PairedSample, TTest};
