use crate::ModelError;

pub const SECONDS_PER_HOUR: f64 = 3600.0;

/// Macroscopic parameters shared by every analytic layer.
///
/// `a1_hours` is the shopping time in an empty store, `delta_seconds` the
/// entry interval. The flow rate is derived, in customers per hour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Money spent per customer.
    pub m: f64,
    /// Effective-capacity coefficient.
    pub c: f64,
    pub a1_hours: f64,
    pub delta_seconds: f64,
}

impl ModelParams {
    pub fn new(m: f64, c: f64, a1_hours: f64, delta_seconds: f64) -> Result<Self, ModelError> {
        let p = Self {
            m,
            c,
            a1_hours,
            delta_seconds,
        };
        p.check()?;
        Ok(p)
    }

    /// The constants used for the worked examples: M = 0.148, c = 70.58,
    /// A1 = 0.2108 h.
    pub fn reference(delta_seconds: f64) -> Self {
        Self {
            m: 0.148,
            c: 70.58,
            a1_hours: 0.2108,
            delta_seconds,
        }
    }

    pub fn with_delta(self, delta_seconds: f64) -> Self {
        Self {
            delta_seconds,
            ..self
        }
    }

    pub fn check(&self) -> Result<(), ModelError> {
        for (name, value) in [
            ("M", self.m),
            ("c", self.c),
            ("A1", self.a1_hours),
            ("delta", self.delta_seconds),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::Domain { name, value });
            }
        }
        Ok(())
    }

    /// Customers admitted per hour.
    pub fn flow_per_hour(&self) -> f64 {
        SECONDS_PER_HOUR / self.delta_seconds
    }

    pub fn delta_hours(&self) -> f64 {
        self.delta_seconds / SECONDS_PER_HOUR
    }

    /// `cA1`, the scale of the slowdown in entry-interval units.
    pub fn c_a1(&self) -> f64 {
        self.c * self.a1_hours
    }

    /// `Mf`, the money target expressed as best-rate entry intervals.
    pub fn mf(&self) -> f64 {
        self.m * self.flow_per_hour()
    }

    pub fn a1_seconds(&self) -> f64 {
        self.a1_hours * SECONDS_PER_HOUR
    }

    /// Relative spending rate of one customer while `others` share the store.
    pub fn relative_rate(&self, others: f64) -> f64 {
        1.0 / (1.0 + others / self.c_a1())
    }

    /// Spending rate (currency per hour) of one customer among `others`.
    pub fn customer_rate(&self, others: f64) -> f64 {
        self.m / (self.a1_hours + others / self.c)
    }

    /// Total spending rate (currency per hour) with `n` customers present.
    pub fn total_rate(&self, n: f64) -> f64 {
        if n <= 0.0 {
            0.0
        } else {
            n * self.customer_rate(n - 1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flow_and_delta_agree() {
        let p = ModelParams::reference(42.0);
        assert!((p.flow_per_hour() * p.delta_hours() - 1.0).abs() < 1e-15);
        assert!((p.flow_per_hour() - 3600.0 / 42.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(matches!(
            ModelParams::new(0.0, 1.0, 1.0, 1.0),
            Err(ModelError::Domain { name: "M", .. })
        ));
        assert!(ModelParams::new(1.0, -2.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn rate_forms_agree() {
        let p = ModelParams::reference(60.0);
        let others = 7.0;
        let direct = p.customer_rate(others) / (p.m / p.a1_hours);
        assert!((direct - p.relative_rate(others)).abs() < 1e-14);
        assert_eq!(p.total_rate(0.0), 0.0);
    }
}
