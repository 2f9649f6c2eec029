use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error("risk list of customer {customer} is corrupted")]
    ScheduleCorrupted { customer: usize },
}
