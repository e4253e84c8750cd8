//! Exact integer and rational arithmetic underneath everything else:
//! Möbius, totient, reduced rational points on the unit interval, and an
//! exact rational type for arc geometry where a single misrounded
//! comparison would misclassify a grid point.

use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Möbius function by trial division. 0 on any squared factor,
/// otherwise (-1)^(number of prime factors).
pub fn mobius(n: u64) -> i8 {
    assert!(n >= 1, "mobius undefined at 0");
    let mut n = n;
    let mut mu = 1i8;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Euler totient by trial division: n * prod_{p|n} (1 - 1/p).
pub fn totient(n: u64) -> u64 {
    assert!(n >= 1, "totient undefined at 0");
    let mut n = n;
    let mut phi = n;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            phi -= phi / d;
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// Bulk Möbius/totient tables from a linear sieve.
///
/// `mu[n]` and `phi[n]` are valid for 0 < n <= limit; index 0 is a
/// placeholder. Preferred over the trial-division fallbacks whenever a
/// whole range of moduli is needed (singular-series truncations, arc
/// families).
pub struct MultTables {
    pub mu: Vec<i8>,
    pub phi: Vec<u64>,
}

impl MultTables {
    pub fn up_to(limit: usize) -> MultTables {
        let n = limit + 1;
        let mut mu = vec![0i8; n.max(2)];
        let mut phi = vec![0u64; n.max(2)];
        let mut spf = vec![0u32; n.max(2)];
        let mut primes: Vec<usize> = Vec::new();
        mu[1] = 1;
        phi[1] = 1;
        for i in 2..n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                mu[i] = -1;
                phi[i] = i as u64 - 1;
                primes.push(i);
            }
            for &p in &primes {
                let ip = i * p;
                if p > spf[i] as usize || ip >= n {
                    break;
                }
                spf[ip] = p as u32;
                if i % p == 0 {
                    mu[ip] = 0;
                    phi[ip] = phi[i] * p as u64;
                    break;
                } else {
                    mu[ip] = -mu[i];
                    phi[ip] = phi[i] * (p as u64 - 1);
                }
            }
        }
        MultTables { mu, phi }
    }
}

/// A reduced fraction a/q representing a point of the unit interval,
/// with 1 <= a <= q and gcd(a, q) = 1. The value 0 is represented as
/// 1/1 (same point of the circle), so every value lies in (0, 1].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    a: u64,
    q: u64,
}

impl RationalPoint {
    /// Reduce an arbitrary integer numerator modulo q into (0, 1] and
    /// divide out the gcd. q must be positive.
    pub fn reduce(a: i64, q: u64) -> Result<RationalPoint> {
        if q == 0 {
            return Err(Error::InvalidParams("rational point needs q >= 1".into()));
        }
        let mut r = a.rem_euclid(q as i64) as u64;
        if r == 0 {
            r = q;
        }
        let g = gcd(r, q);
        Ok(RationalPoint { a: r / g, q: q / g })
    }

    /// Construct from an already-reduced pair; checked.
    pub fn new(a: u64, q: u64) -> Result<RationalPoint> {
        if q == 0 || a == 0 || a > q || gcd(a, q) != 1 {
            return Err(Error::InvalidParams(format!(
                "not a reduced unit-interval fraction: {a}/{q}"
            )));
        }
        Ok(RationalPoint { a, q })
    }

    pub fn numer(&self) -> u64 {
        self.a
    }

    pub fn denom(&self) -> u64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.a as f64 / self.q as f64
    }

    pub fn as_rational(&self) -> ExactRational {
        ExactRational::new(self.a as i128, self.q as i128)
    }
}

impl std::fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.a, self.q)
    }
}

/// Exact rational over i128, always reduced with positive denominator.
///
/// Supports the handful of operations arc geometry needs: ordering,
/// addition/subtraction, absolute value, and exact conversion from f64
/// (every finite f64 is a dyadic rational). Arithmetic panics on i128
/// overflow; the arc-geometry domain (denominators q*Q and dyadic floats
/// within the unit interval) stays far below that.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactRational {
    num: i128,
    den: i128,
}

impl ExactRational {
    pub fn new(num: i128, den: i128) -> ExactRational {
        assert!(den != 0, "exact rational with zero denominator");
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd128(num.unsigned_abs(), den.unsigned_abs());
        if g > 1 {
            num /= g as i128;
            den /= g as i128;
        }
        ExactRational { num, den }
    }

    pub fn zero() -> ExactRational {
        ExactRational { num: 0, den: 1 }
    }

    pub fn from_integer(n: i128) -> ExactRational {
        ExactRational { num: n, den: 1 }
    }

    /// Exact conversion of a finite f64. Errors when the dyadic
    /// representation does not fit in i128 (|x| >= 2^100 or a subnormal
    /// tail below 2^-100), which is far outside the unit-interval
    /// geometry this type serves.
    pub fn from_f64(x: f64) -> Result<ExactRational> {
        if !x.is_finite() {
            return Err(Error::InvalidParams(format!("not a finite value: {x}")));
        }
        if x == 0.0 {
            return Ok(ExactRational::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i128 } else { 1i128 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i128;
        // value = mantissa * 2^e2
        let (mut mantissa, mut e2) = if exp_bits == 0 {
            (frac, -1074i64)
        } else {
            (frac + (1i128 << 52), exp_bits - 1075)
        };
        while mantissa & 1 == 0 && e2 < 0 {
            mantissa >>= 1;
            e2 += 1;
        }
        if e2 > 47 || e2 < -100 {
            return Err(Error::InvalidParams(format!(
                "float {x} outside the exact-rational range"
            )));
        }
        Ok(if e2 >= 0 {
            ExactRational {
                num: sign * (mantissa << e2),
                den: 1,
            }
        } else {
            ExactRational {
                num: sign * mantissa,
                den: 1i128 << (-e2),
            }
        })
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn abs(&self) -> ExactRational {
        ExactRational {
            num: self.num.abs(),
            den: self.den,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    fn checked(v: Option<i128>) -> i128 {
        v.expect("exact rational overflow: operands outside the supported domain")
    }

    pub fn add(&self, other: &ExactRational) -> ExactRational {
        let g = gcd128(self.den.unsigned_abs(), other.den.unsigned_abs()) as i128;
        let l = Self::checked(self.den.checked_mul(other.den / g));
        let a = Self::checked(self.num.checked_mul(other.den / g));
        let b = Self::checked(other.num.checked_mul(self.den / g));
        ExactRational::new(Self::checked(a.checked_add(b)), l)
    }

    pub fn sub(&self, other: &ExactRational) -> ExactRational {
        self.add(&ExactRational {
            num: -other.num,
            den: other.den,
        })
    }
}

impl PartialOrd for ExactRational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Cross-multiplication with positive denominators preserves order.
        let lhs = ExactRational::checked(self.num.checked_mul(other.den));
        let rhs = ExactRational::checked(other.num.checked_mul(self.den));
        lhs.cmp(&rhs)
    }
}

impl std::fmt::Display for ExactRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}
