use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter `{name}` must be positive and finite, got {value}")]
    Domain { name: &'static str, value: f64 },
    #[error("exp({exponent}) overflows; Mf/(cA1) is far outside the model's range")]
    Overflow { exponent: f64 },
    #[error("model breakdown at customer {customer}: {reason}")]
    Breakdown { customer: usize, reason: String },
}
