// SPDX-License-Identifier: Apache-2.0
//! Library side of the `ffratpg` command: run files, comparison reports and
//! the shared configuration file.

pub mod config;
pub mod report;
pub mod runfile;
