#![no_std]
//! Exact filtered L∞ algebra machinery and the numerical disk geometry
//! that feeds it.

extern crate alloc;

pub mod combinat;
pub mod graded;
pub mod linfty;
pub mod rational;
pub mod linalg;
pub mod morphism;
pub mod transfer;
pub mod filtered;
pub mod disks;
pub mod trees;
