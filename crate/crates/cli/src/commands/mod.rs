pub mod dataset;
pub mod report;
pub mod run;
