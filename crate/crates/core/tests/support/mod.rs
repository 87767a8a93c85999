#![allow(dead_code)]

pub mod graphs;
pub mod spiders;
pub mod statevec;
