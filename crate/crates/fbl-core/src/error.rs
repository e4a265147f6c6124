// SPDX-License-Identifier: Apache-2.0
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FblError {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("factor sets overlap: {0:?}")]
    OverlappingFactors(Vec<usize>),
    #[error("budget exceeded: {what} needs {needed} cells, budget is {budget}")]
    Budget { what: String, needed: u128, budget: u128 },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("l = {l} is below l* = {l_star}")]
    BelowLStar { l: String, l_star: String },
    #[error("p_U is not a type at block length {0}")]
    NotAType(String),
    #[error("empty typical set")]
    EmptyTypicalSet,
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, FblError>;
