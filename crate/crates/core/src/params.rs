use std::fmt;


use crate::error::{Error, Result};
use crate::scalar::{format_rational, rational, Rational, RealScalar};

/// Central charge `c > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralCharge<S>(S);

/// Lowest weight `h ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowestWeight<S>(S);

impl<S: RealScalar> CentralCharge<S> {
    pub fn new(value: S) -> Result<Self> {
        if value > S::zero() {
            Ok(Self(value))
        } else {
            Err(Error::Precondition(format!("central charge must be positive, got {}", value.as_f64())))
        }
    }

    /// Like [`CentralCharge::new`], additionally requiring `c ≥ 1` or
    /// `c = 1 − 6/((m+2)(m+3))` for an integer `m ≥ 1`.
    pub fn admissible(value: S) -> Result<Self> {
        let c = Self::new(value)?;
        if c.is_admissible() {
            Ok(c)
        } else {
            Err(Error::Precondition(format!("central charge {} is not an admissible value", c.0.as_f64())))
        }
    }

    pub fn value(&self) -> &S {
        &self.0
    }

    /// Whether `c` lies in the set of values carrying unitary lowest-weight
    /// representations.
    pub fn is_admissible(&self) -> bool {
        let c = self.0.as_f64();
        if self.0 >= S::one() {
            return true;
        }
        // 1 - c = 6/((m+2)(m+3)) decreases in m; scan until it drops below.
        let mut m: i64 = 1;
        loop {
            let candidate = S::one() - S::from_int(6) / S::from_int((m + 2) * (m + 3));
            if S::EXACT {
                if candidate == self.0 {
                    return true;
                }
            } else if (candidate.as_f64() - c).abs() <= 1e-12 {
                return true;
            }
            if candidate > self.0 {
                return false;
            }
            m += 1;
        }
    }
}

/// The discrete series value `1 − 6/((m+2)(m+3))`, `m ≥ 1`.
pub fn discrete_series_charge(m: u32) -> Rational {
    let m = i64::from(m);
    rational(1, 1) - rational(6, (m + 2) * (m + 3))
}

impl<S: RealScalar> LowestWeight<S> {
    pub fn new(value: S) -> Result<Self> {
        if value >= S::zero() {
            Ok(Self(value))
        } else {
            Err(Error::Precondition(format!("lowest weight must be nonnegative, got {}", value.as_f64())))
        }
    }

    pub fn vacuum() -> Self {
        Self(S::zero())
    }

    pub fn value(&self) -> &S {
        &self.0
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_zero()
    }
}

/// Human-readable rendering used in reports and error messages.
pub trait ParamDisplay {
    fn render(&self) -> String;
}

impl ParamDisplay for Rational {
    fn render(&self) -> String {
        format_rational(self)
    }
}

impl ParamDisplay for f64 {
    fn render(&self) -> String {
        format!("{self:?}")
    }
}

impl<S: ParamDisplay> fmt::Display for CentralCharge<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.render())
    }
}

impl<S: ParamDisplay> fmt::Display for LowestWeight<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_series_values() {
        assert_eq!(discrete_series_charge(1), rational(1, 2));
        assert_eq!(discrete_series_charge(2), rational(7, 10));
        assert_eq!(discrete_series_charge(3), rational(4, 5));
    }

    #[test]
    fn admissibility_exact() {
        for ok in [rational(1, 2), rational(7, 10), rational(4, 5), rational(99, 100), rational(1, 1), rational(5, 2)] {
            assert!(CentralCharge::admissible(ok.clone()).is_ok(), "{ok}");
        }
        for bad in [rational(3, 5), rational(3, 4), rational(49, 50)] {
            assert!(CentralCharge::admissible(bad.clone()).is_err(), "{bad}");
        }
    }

    #[test]
    fn admissibility_float() {
        assert!(CentralCharge::new(0.7).unwrap().is_admissible());
        assert!(!CentralCharge::new(0.75).unwrap().is_admissible());
    }

    #[test]
    fn positivity() {
        assert!(CentralCharge::new(rational(0, 1)).is_err());
        assert!(LowestWeight::new(rational(-1, 2)).is_err());
        assert!(LowestWeight::new(0.0).is_ok());
    }
}
