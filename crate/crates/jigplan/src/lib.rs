//! File formats, reports and the `jigplan` command line on top of
//! [`jigplan_core`].

pub mod cli;
pub mod descriptor;
pub mod measurements;
pub mod mesh_io;
pub mod report;
