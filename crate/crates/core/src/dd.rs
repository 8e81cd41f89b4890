//! Double-double arithmetic for sums that cancel heavily.

use num_complex::Complex64;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[allow(clippy::should_implement_trait)]
impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };

    pub fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    pub fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn normalize(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Self {
            hi: s,
            lo: lo - (s - hi),
        }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    pub fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        let t = Self::two_sum(self.lo, o.lo);
        let v = Self::normalize(s.hi, s.lo + t.hi);
        Self::normalize(v.hi, v.lo + t.lo)
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let p = self.hi * b;
        let err = self.hi.mul_add(b, -p);
        Self::normalize(p, err + self.lo * b)
    }

    pub fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        Self::normalize(p, err + (self.hi * o.lo + self.lo * o.hi))
    }

    pub fn div_f64(self, b: f64) -> Self {
        self.div(Self::from(b))
    }

    pub fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        Self::normalize(q1, q2).add(Self::from(q3))
    }
}

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDD {
    pub re: DoubleDouble,
    pub im: DoubleDouble,
}

#[allow(clippy::should_implement_trait)]
impl ComplexDD {
    pub const ONE: Self = Self {
        re: DoubleDouble { hi: 1.0, lo: 0.0 },
        im: DoubleDouble::ZERO,
    };
    pub const ZERO: Self = Self {
        re: DoubleDouble::ZERO,
        im: DoubleDouble::ZERO,
    };

    pub fn new(re: f64, im: f64) -> Self {
        Self {
            re: DoubleDouble::from(re),
            im: DoubleDouble::from(im),
        }
    }

    pub fn conj(self) -> Self {
        Self {
            re: self.re,
            im: self.im.neg(),
        }
    }

    pub fn add(self, o: Self) -> Self {
        Self {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    pub fn mul(self, o: Self) -> Self {
        Self {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn scale(self, s: DoubleDouble) -> Self {
        Self {
            re: self.re.mul(s),
            im: self.im.mul(s),
        }
    }

    pub fn powu(self, n: u32) -> Self {
        (0..n).fold(Self::ONE, |acc, _| acc.mul(self))
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_bits() {
        let a = DoubleDouble::from(1.0).add(DoubleDouble::from(1e-20));
        assert_eq!(a.sub(DoubleDouble::from(1.0)).value(), 1e-20);
        let third = DoubleDouble::from(1.0).div_f64(3.0);
        let back = third.mul_f64(3.0).sub(DoubleDouble::from(1.0));
        assert!(back.value().abs() < 1e-31);
        let z = ComplexDD::new(0.3, -1.7);
        let p = z.powu(5).to_complex();
        let want = Complex64::new(0.3, -1.7).powu(5);
        assert!((p - want).norm() < 1e-14 * want.norm());
    }
}
