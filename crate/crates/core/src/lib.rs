pub mod bench;
pub mod float;
pub mod frontend;
pub mod gentest;
pub mod interval;
pub mod pipeline;
pub mod report;
pub mod search;
pub mod store;
