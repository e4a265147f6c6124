// SPDX-License-Identifier: Apache-2.0
//! Fixed block-length coding of correlated sources over multiple-access and
//! interference channels.
//!
//! | module      | contents                                                |
//! |-------------|---------------------------------------------------------|
//! | `info_core` | pmfs, channels, joint tables, entropies, typical sets   |
//! | `exponents` | random coding exponent, `l*`, `g`, `tau`, `xi^[l]`, `L_l` |
//! | `dueck`     | generalized Dueck sources and their closed forms        |
//! | `regions`   | sufficient-condition checkers and separation scans      |
//! | `sim`       | matrix-scheme Monte Carlo and exact lemma verifiers     |

pub mod dueck;
pub mod error;
pub mod info_core;
pub mod exponents;
pub mod logreal;
pub mod regions;
pub mod sim;

pub use error::{FblError, Result};
pub use logreal::LogReal;
