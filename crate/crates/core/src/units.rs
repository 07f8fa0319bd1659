//! Power quantities in logarithmic and linear scale.

use core::ops::{Add, Neg, Sub};

/// A dimensionless ratio expressed in dB (gains, losses, SNR).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Decibel(pub f64);

/// An absolute power level referenced to 1 mW.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct DbmPower(pub f64);

/// A non-negative dimensionless power ratio in linear scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct LinearRatio(f64);

impl LinearRatio {
    pub const ONE: LinearRatio = LinearRatio(1.0);

    /// Returns `None` for negative or NaN input.
    pub fn new(value: f64) -> Option<Self> {
        (value >= 0.0).then_some(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn db_to_linear(x: Decibel) -> LinearRatio {
    LinearRatio(libm::pow(10.0, x.0 / 10.0))
}

/// Zero maps to negative infinity.
pub fn linear_to_db(x: LinearRatio) -> Decibel {
    Decibel(10.0 * libm::log10(x.0))
}

impl Decibel {
    pub fn to_linear(self) -> LinearRatio {
        db_to_linear(self)
    }
}

impl DbmPower {
    pub fn to_milliwatts(self) -> f64 {
        libm::pow(10.0, self.0 / 10.0)
    }

    pub fn from_milliwatts(mw: f64) -> Self {
        DbmPower(10.0 * libm::log10(mw))
    }
}

impl Add for Decibel {
    type Output = Decibel;
    fn add(self, rhs: Decibel) -> Decibel {
        Decibel(self.0 + rhs.0)
    }
}

impl Sub for Decibel {
    type Output = Decibel;
    fn sub(self, rhs: Decibel) -> Decibel {
        Decibel(self.0 - rhs.0)
    }
}

impl Neg for Decibel {
    type Output = Decibel;
    fn neg(self) -> Decibel {
        Decibel(-self.0)
    }
}

impl Add<Decibel> for DbmPower {
    type Output = DbmPower;
    fn add(self, rhs: Decibel) -> DbmPower {
        DbmPower(self.0 + rhs.0)
    }
}

impl Sub<Decibel> for DbmPower {
    type Output = DbmPower;
    fn sub(self, rhs: Decibel) -> DbmPower {
        DbmPower(self.0 - rhs.0)
    }
}

impl Sub for DbmPower {
    type Output = Decibel;
    fn sub(self, rhs: DbmPower) -> Decibel {
        Decibel(self.0 - rhs.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn definitional_values() {
        assert_eq!(db_to_linear(Decibel(0.0)).value(), 1.0);
        assert!((db_to_linear(Decibel(30.0)).value() - 1000.0).abs() < 1e-9);
        assert!((db_to_linear(Decibel(-3.0103)).value() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn zero_is_minus_infinity() {
        assert_eq!(linear_to_db(LinearRatio::new(0.0).unwrap()).0, f64::NEG_INFINITY);
        assert!(LinearRatio::new(-1.0).is_none());
    }

    #[test]
    fn dbm_arithmetic() {
        let p = DbmPower(30.0) + Decibel(3.0) - Decibel(100.0);
        assert!((p.0 + 67.0).abs() < 1e-12);
        assert!((DbmPower::from_milliwatts(DbmPower(-79.0).to_milliwatts()).0 + 79.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn db_round_trip(x in -200.0f64..200.0) {
            let back = linear_to_db(db_to_linear(Decibel(x)));
            prop_assert!((back.0 - x).abs() < 1e-9);
        }

        #[test]
        fn linear_round_trip(x in 1e-12f64..1e12) {
            let back = db_to_linear(linear_to_db(LinearRatio::new(x).unwrap())).value();
            prop_assert!(((back - x) / x).abs() < 1e-12);
        }
    }
}
