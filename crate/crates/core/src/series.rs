//! Truncated power series with exact coefficients.
//!
//! A series truncated at degree `N` stores exactly `N + 1` coefficients; the
//! coefficients of `z^k` for `k > N` are unknown and never read. Binary
//! operations require equal truncation degrees.
//!
//! Two coefficient rings are used: [`BigInt`] for ordinary generating
//! functions and for counting sequences, and [`BigRational`] for exponential
//! generating functions, whose coefficients carry the `1/n!` normalisation.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("series has a non-zero constant term; sets and sequences need objects of size at least 1")]
    InvalidAtom,
    #[error("coefficient of z^{degree} is not an integer ({value})")]
    NonIntegral { degree: usize, value: String },
}

/// Power series truncated at a fixed degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PowerSeries<T> {
    coeffs: Vec<T>,
}

/// Integer-coefficient series: ordinary generating functions and counts.
pub type Series = PowerSeries<BigInt>;

/// Rational-coefficient series: exponential generating functions.
pub type RationalSeries = PowerSeries<BigRational>;

impl<T: Clone + Num> PowerSeries<T> {
    /// The zero series truncated at degree `trunc`.
    pub fn zero(trunc: usize) -> Self {
        PowerSeries { coeffs: vec![T::zero(); trunc + 1] }
    }

    /// The constant series `1`.
    pub fn one(trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = T::one();
        s
    }

    /// The series `z` (a single atom).
    pub fn atom(trunc: usize) -> Self {
        Self::monomial(1, T::one(), trunc)
    }

    /// `c * z^k`, or zero if `k` exceeds the truncation degree.
    pub fn monomial(k: usize, c: T, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        if k <= trunc {
            s.coeffs[k] = c;
        }
        s
    }

    /// Builds a series from explicit coefficients, padding with zeros (or
    /// cutting) so that exactly `trunc + 1` coefficients remain.
    pub fn from_coeffs(mut coeffs: Vec<T>, trunc: usize) -> Self {
        coeffs.resize(trunc + 1, T::zero());
        PowerSeries { coeffs }
    }

    pub fn trunc_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: T) {
        self.coeffs[k] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first non-zero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Same series with a (possibly) smaller truncation degree.
    pub fn truncate(&self, trunc: usize) -> Self {
        Self::from_coeffs(self.coeffs[..=trunc.min(self.trunc_degree())].to_vec(), trunc)
    }

    fn check_degree(&self, other: &Self) -> Result<(), SeriesError> {
        if self.trunc_degree() != other.trunc_degree() {
            return Err(SeriesError::DegreeMismatch { left: self.trunc_degree(), right: other.trunc_degree() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_degree(other)?;
        Ok(PowerSeries { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_degree(other)?;
        Ok(PowerSeries { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect() })
    }

    /// Cauchy product truncated at the common degree.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_degree(other)?;
        let n = self.trunc_degree();
        let mut out = Self::zero(n);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out.coeffs[i + j] = out.coeffs[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    /// `self^k` truncated; `self^0 = 1`.
    pub fn pow(&self, k: usize) -> Self {
        let n = self.trunc_degree();
        let mut acc = Self::one(n);
        for _ in 0..k {
            acc = acc.mul(self).expect("same degree");
        }
        acc
    }

    /// Plethystic substitution `A(z^i)`. Reads coefficients `0..=floor(N/i)`.
    ///
    /// # Panics
    /// If `i == 0`.
    pub fn substitute_power(&self, i: usize) -> Self {
        assert!(i >= 1, "substitute_power needs a positive exponent");
        let n = self.trunc_degree();
        let mut out = Self::zero(n);
        for (k, c) in self.coeffs[..=n / i].iter().enumerate() {
            out.coeffs[k * i] = c.clone();
        }
        out
    }

    fn require_no_constant(&self) -> Result<(), SeriesError> {
        if self.coeffs[0].is_zero() {
            Ok(())
        } else {
            Err(SeriesError::InvalidAtom)
        }
    }

    /// Sequences of at least `k` objects: `A^k / (1 - A)`.
    pub fn seq_atleast(&self, k: usize) -> Result<Self, SeriesError> {
        self.require_no_constant()?;
        let n = self.trunc_degree();
        // 1/(1 - A) by the recurrence S[m] = sum_{j>=1} A[j] S[m-j].
        let mut inv = Self::one(n);
        for m in 1..=n {
            let mut acc = T::zero();
            for j in 1..=m {
                if !self.coeffs[j].is_zero() {
                    acc = acc + self.coeffs[j].clone() * inv.coeffs[m - j].clone();
                }
            }
            inv.coeffs[m] = acc;
        }
        self.pow(k).mul(&inv)
    }
}

impl<T: Clone + Num + Signed> PowerSeries<T> {
    /// First coefficient that is strictly negative, with its degree.
    pub fn first_negative(&self) -> Option<(usize, &T)> {
        self.coeffs.iter().enumerate().find(|(_, c)| c.is_negative())
    }
}

impl Series {
    /// Unlabeled multisets (Euler transform): `exp(sum_{i>=1} A(z^i)/i)`.
    ///
    /// Uses `n M[n] = sum_{k=1..n} c_k M[n-k]` with `c_k = sum_{d|k} d A[d]`.
    pub fn mset(&self) -> Result<Series, SeriesError> {
        self.require_no_constant()?;
        let n = self.trunc_degree();
        let c = divisor_weighted_sums(&self.coeffs);
        let mut m = Series::one(n);
        for deg in 1..=n {
            let mut acc = BigInt::zero();
            for k in 1..=deg {
                if !c[k].is_zero() && !m.coeffs[deg - k].is_zero() {
                    acc += &c[k] * &m.coeffs[deg - k];
                }
            }
            m.coeffs[deg] = exact_div(acc, &BigInt::from(deg), deg)?;
        }
        Ok(m)
    }

    /// Unlabeled multisets of exactly `k` objects (cycle index of the
    /// symmetric group `S_k` evaluated at `A`).
    ///
    /// `h_0 = 1`, `h_j = (1/j) sum_{i=1..j} A(z^i) h_{j-i}`. Each `h_j` is
    /// checked to have integral coefficients before it is used.
    pub fn mset_exact(&self, k: usize) -> Result<Series, SeriesError> {
        self.require_no_constant()?;
        let n = self.trunc_degree();
        let powers: Vec<Series> = (1..=k).map(|i| self.substitute_power(i)).collect();
        let mut h: Vec<Series> = vec![Series::one(n)];
        for j in 1..=k {
            let mut acc = Series::zero(n);
            for i in 1..=j {
                acc = acc.add(&powers[i - 1].mul(&h[j - i])?)?;
            }
            let q = RationalSeries::from_coeffs(
                acc.coeffs.into_iter().map(|c| BigRational::new(c, BigInt::from(j))).collect(),
                n,
            );
            h.push(q.to_integer_series()?);
        }
        Ok(h.pop().expect("h_0 is always present"))
    }

    /// Unlabeled multisets of at least `k` objects.
    pub fn mset_atleast(&self, k: usize) -> Result<Series, SeriesError> {
        let mut out = self.mset()?;
        for j in 0..k {
            out = out.sub(&self.mset_exact(j)?)?;
        }
        Ok(out)
    }

    pub fn to_rational(&self) -> RationalSeries {
        RationalSeries { coeffs: self.coeffs.iter().cloned().map(BigRational::from_integer).collect() }
    }

    /// Reads an exponential generating function given as counts: coefficient
    /// `k` becomes `counts[k] / k!`.
    pub fn counts_to_egf(&self) -> RationalSeries {
        let mut fact = BigInt::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                fact *= k;
            }
            coeffs.push(BigRational::new(c.clone(), fact.clone()));
        }
        RationalSeries { coeffs }
    }
}

impl RationalSeries {
    /// Exact conversion; fails on the first non-integral coefficient.
    pub fn to_integer_series(&self) -> Result<Series, SeriesError> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(SeriesError::NonIntegral { degree: k, value: c.to_string() })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Series { coeffs })
    }

    /// Multiplies coefficient `k` by `k!`, turning an exponential generating
    /// function into its counting sequence. Fails if a count is not integral.
    pub fn egf_to_counts(&self) -> Result<Series, SeriesError> {
        let mut fact = BigInt::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                fact *= k;
            }
            let v = c * BigRational::from_integer(fact.clone());
            if !v.is_integer() {
                return Err(SeriesError::NonIntegral { degree: k, value: v.to_string() });
            }
            coeffs.push(v.to_integer());
        }
        Ok(Series { coeffs })
    }

    /// Labeled sets. With `k_exact = Some(k)` returns `A^k / k!`; otherwise
    /// `sum_{j >= k_min} A^j / j!`, where terms with `j > N` vanish because
    /// `A` has valuation at least one.
    pub fn labeled_set(&self, k_min: usize, k_exact: Option<usize>) -> Result<RationalSeries, SeriesError> {
        self.require_no_constant()?;
        let n = self.trunc_degree();
        if let Some(k) = k_exact {
            let fact: BigInt = (1..=k).map(BigInt::from).product();
            return Ok(self.pow(k).scale(&BigRational::new(BigInt::one(), fact)));
        }
        let mut out = RationalSeries::zero(n);
        // term = A^j / j!, updated incrementally.
        let mut term = RationalSeries::one(n);
        for j in 0..=n {
            if j > 0 {
                term = term.mul(self)?.scale(&BigRational::new(BigInt::one(), BigInt::from(j)));
            }
            if j >= k_min {
                out = out.add(&term)?;
            }
            if term.is_zero() {
                break;
            }
        }
        Ok(out)
    }
}

/// `c_k = sum_{d | k} d * a[d]` for `k = 0..len`, with `c_0 = 0`.
pub(crate) fn divisor_weighted_sums(a: &[BigInt]) -> Vec<BigInt> {
    let n = a.len();
    let mut c = vec![BigInt::zero(); n];
    for d in 1..n {
        if a[d].is_zero() {
            continue;
        }
        let term = &a[d] * d;
        let mut k = d;
        while k < n {
            c[k] += &term;
            k += d;
        }
    }
    c
}

pub(crate) fn exact_div(num: BigInt, den: &BigInt, degree: usize) -> Result<BigInt, SeriesError> {
    let (q, r) = num.div_rem(den);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(SeriesError::NonIntegral { degree, value: format!("{num}/{den}") })
    }
}

impl<T: fmt::Display + Zero> fmt::Debug for PowerSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "] + O(z^{})", self.coeffs.len())
    }
}

impl<T: fmt::Display + Zero> fmt::Display for PowerSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.coeffs.len())
    }
}

impl<T: Clone + Num> Add for &PowerSeries<T> {
    type Output = PowerSeries<T>;
    fn add(self, rhs: Self) -> PowerSeries<T> {
        PowerSeries::add(self, rhs).expect("series degrees differ")
    }
}

impl<T: Clone + Num> Sub for &PowerSeries<T> {
    type Output = PowerSeries<T>;
    fn sub(self, rhs: Self) -> PowerSeries<T> {
        PowerSeries::sub(self, rhs).expect("series degrees differ")
    }
}

impl<T: Clone + Num> Mul for &PowerSeries<T> {
    type Output = PowerSeries<T>;
    fn mul(self, rhs: Self) -> PowerSeries<T> {
        PowerSeries::mul(self, rhs).expect("series degrees differ")
    }
}

/// Convenience constructor for integer series from small coefficients.
pub fn series_from_i64(coeffs: &[i64], trunc: usize) -> Series {
    Series::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect(), trunc)
}
