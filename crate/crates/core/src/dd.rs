//! Compact double-double arithmetic (~31 significant digits).
//!
//! The scheduler evaluates irrational powers such as `(5+k)^beta` with
//! rational `beta`, and the propagator reduces large phases `t*xi^2` modulo
//! `2*pi`. Both need more headroom than f64 carries, but nowhere near
//! arbitrary precision, so an unevaluated sum of two doubles is the right
//! tool. Algorithms are the classical error-free transformations
//! (two_sum / two_prod with FMA) plus Taylor/Newton kernels for exp and ln.

/// Double-double number: value = hi + lo with |lo| <= ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

pub const DD_ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
pub const DD_ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
/// ln 2 to double-double precision.
pub const DD_LN2: Dd = Dd {
    hi: 6.931471805599453e-1,
    lo: 2.3190468138462996e-17,
};
/// pi to double-double precision.
pub const DD_PI: Dd = Dd {
    hi: 3.141592653589793,
    lo: 1.2246467991473532e-16,
};
/// 2*pi to double-double precision.
pub const DD_TWO_PI: Dd = Dd {
    hi: 6.283185307179586,
    lo: 2.4492935982947064e-16,
};

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact product of two f64 values.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, other: f64) -> Dd {
        self.add(Dd::from_f64(other))
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        let (p, e) = two_prod(self.hi, other);
        let e = e + self.lo * other;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add_f64(q3)
    }

    pub fn recip(self) -> Dd {
        DD_ONE.div(self)
    }

    /// exp(self) by halving reduction and a short Taylor kernel.
    pub fn exp(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return DD_ONE;
        }
        // x = m*ln2 + r, |r| <= ln2/2
        let m = (self.hi / DD_LN2.hi).round();
        let r = self.sub(DD_LN2.mul_f64(m));
        // Further reduce: s = r / 2^9.
        let scale = 512.0;
        let s = r.mul_f64(1.0 / scale);
        // expm1(s) Taylor: s small (|s| < 7e-4), 8 terms reach ~1e-34.
        let mut term = s;
        let mut sum = s;
        for k in 2..=10 {
            term = term.mul(s).mul_f64(1.0 / k as f64);
            sum = sum.add(term);
        }
        // Undo halving: (1+y) -> (1+y)^2, i.e. y <- 2y + y^2, 9 times.
        let mut y = sum;
        for _ in 0..9 {
            y = y.mul_f64(2.0).add(y.mul(y));
        }
        let e = y.add(DD_ONE);
        // Multiply by 2^m exactly.
        let p = f64::powi(2.0, m as i32);
        Dd {
            hi: e.hi * p,
            lo: e.lo * p,
        }
    }

    /// Natural log by one Newton step on top of the f64 seed.
    pub fn ln(self) -> Dd {
        assert!(self.hi > 0.0, "ln of non-positive double-double");
        let mut y = Dd::from_f64(self.hi.ln());
        // y <- y + x*exp(-y) - 1, twice for good measure.
        for _ in 0..2 {
            let e = y.neg().exp();
            y = y.add(self.mul(e)).add_f64(-1.0);
        }
        y
    }

    /// self^e for f64 exponent, self > 0.
    pub fn powf(self, e: f64) -> Dd {
        self.ln().mul_f64(e).exp()
    }

    /// Reduce self modulo 2*pi into (-pi, pi].
    pub fn rem_two_pi(self) -> Dd {
        let k = (self.hi / DD_TWO_PI.hi).round();
        self.sub(DD_TWO_PI.mul_f64(k))
    }
}

/// `base^(num/den)` for positive `base`, evaluated in double-double and
/// returned as f64. The exponent is formed in double-double so that large
/// integer numerators and denominators lose nothing.
pub fn pow_rational(base: f64, num: i64, den: i64) -> f64 {
    assert!(base > 0.0 && den != 0);
    let e = Dd::from_f64(num as f64).div(Dd::from_f64(den as f64));
    Dd::from_f64(base).ln().mul(e).exp().to_f64()
}
