//! Compilation of quantum circuits onto multi-core processors and
//! characterization of the resulting inter-core qubit traffic.
//!
//! Pipeline: [`bench`] generates a [`circuit::Circuit`], [`mapper`] slices
//! and partitions it over the cores of an [`arch::Architecture`] inserting
//! teleport-swaps, [`schedule`] times every operation, [`traffic`] derives
//! the spatial and temporal metrics and [`report`] writes them to disk.

pub mod arch;
pub mod bench;
pub mod circuit;
pub mod mapper;
pub mod pipeline;
pub mod report;
pub mod schedule;
pub mod seed;
pub mod traffic;
