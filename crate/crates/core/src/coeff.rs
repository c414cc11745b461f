//! Exact arithmetic in the coefficient field `ℚ(v)` with `v = q^{1/2}`.
//!
//! Scalars are rational functions in one variable `v` over the rationals,
//! stored as a reduced fraction of Laurent polynomials in a canonical form:
//! the denominator is an ordinary monic polynomial with nonzero constant term
//! (lowest exponent `0`), and numerator/denominator share no polynomial
//! factor. Two scalars are equal exactly when their canonical representatives
//! are syntactically equal, so `==` is a complete zero test.
//!
//! The module also provides the standard symmetric q-combinatorics built on
//! `q_i = q^{d_i} = v^{2 d_i}`: q-integers `[n]_i`, q-factorials `[n]_i!`,
//! and q-binomial coefficients, all of which are bar-invariant Laurent
//! polynomials.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number.
pub type Rat = BigRational;

/// Convenience constructor for a rational number `n / d`.
///
/// Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "rational with zero denominator");
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// ---- Laurent polynomials ----

/// A Laurent polynomial in `v` over `ℚ`: a finite sum `Σ c_k v^k`, `k ∈ ℤ`.
///
/// The coefficient map never stores zero coefficients, so derived equality is
/// exact equality of polynomials.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Rat>,
}

impl LaurentPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        LaurentPoly {
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `c · v^exp`.
    pub fn monomial(exp: i64, c: Rat) -> Self {
        let mut p = Self::zero();
        p.insert_term(exp, c);
        p
    }

    /// `v^exp`.
    pub fn v_pow(exp: i64) -> Self {
        Self::monomial(exp, Rat::one())
    }

    /// Constant polynomial with rational value `c`.
    pub fn from_rat(c: Rat) -> Self {
        Self::monomial(0, c)
    }

    /// Constant polynomial with integer value `n`.
    pub fn from_int(n: i64) -> Self {
        Self::from_rat(Rat::from_integer(BigInt::from(n)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeff(0).is_one()
    }

    /// Coefficient of `v^exp` (zero if absent).
    pub fn coeff(&self, exp: i64) -> Rat {
        self.coeffs.get(&exp).cloned().unwrap_or_else(Rat::zero)
    }

    /// Iterator over `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.coeffs.iter()
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Lowest exponent with nonzero coefficient, if any.
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Highest exponent with nonzero coefficient, if any.
    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Coefficient of the highest-exponent term, if any.
    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.max_exp().and_then(|e| self.coeffs.get(&e))
    }

    /// The polynomial multiplied by `v^k`.
    pub fn shifted(&self, k: i64) -> Self {
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e + k, c.clone()))
                .collect(),
        }
    }

    /// The polynomial multiplied by the rational scalar `c`.
    pub fn scaled(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, k)| (*e, k * c))
                .collect(),
        }
    }

    /// Bar involution `v ↦ v^{-1}` (negates every exponent).
    pub fn bar(&self) -> Self {
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (-e, c.clone()))
                .collect(),
        }
    }

    /// Exact evaluation at a nonzero rational point.
    pub fn eval_rat(&self, x: &Rat) -> Rat {
        assert!(
            !x.is_zero() || self.min_exp().map_or(true, |e| e >= 0),
            "evaluating a Laurent polynomial with negative exponents at 0"
        );
        let mut acc = Rat::zero();
        for (e, c) in &self.coeffs {
            let mut pw = Rat::one();
            let (base, n) = if *e >= 0 {
                (x.clone(), *e)
            } else {
                (x.recip(), -*e)
            };
            for _ in 0..n {
                pw *= &base;
            }
            acc += c * pw;
        }
        acc
    }

    fn insert_term(&mut self, exp: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(exp) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.insert_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.insert_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                out.insert_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (*e, -c.clone()))
                .collect(),
        }
    }
}

macro_rules! delegate_binop {
    ($trait:ident, $method:ident, $ty:ty) => {
        impl $trait for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                (&self).$method(rhs)
            }
        }
        impl $trait<$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                self.$method(&rhs)
            }
        }
    };
}

delegate_binop!(Add, add, LaurentPoly);
delegate_binop!(Sub, sub, LaurentPoly);
delegate_binop!(Mul, mul, LaurentPoly);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Terms printed in descending exponent order.
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_is_one = mag.is_one();
            match (*e, coeff_is_one) {
                (0, _) => write!(f, "{}", mag)?,
                (1, true) => write!(f, "v")?,
                (1, false) => write!(f, "{}*v", mag)?,
                (_, true) => write!(f, "v^{}", e)?,
                (_, false) => write!(f, "{}*v^{}", mag, e)?,
            }
        }
        Ok(())
    }
}

// ---- Polynomial division and gcd (nonnegative supports) ----

/// Quotient and remainder of `a` by `b` in `ℚ[v]`.
///
/// Both inputs must have nonnegative supports and `b` must be nonzero.
fn poly_divrem(a: &LaurentPoly, b: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
    assert!(!b.is_zero(), "polynomial division by zero");
    debug_assert!(a.min_exp().map_or(true, |e| e >= 0));
    debug_assert!(b.min_exp().map_or(true, |e| e >= 0));
    let mut rem = a.clone();
    let mut quo = LaurentPoly::zero();
    let db = b.max_exp().unwrap();
    let lb = b.leading_coeff().unwrap().clone();
    while let Some(dr) = rem.max_exp() {
        if dr < db {
            break;
        }
        let lr = rem.leading_coeff().unwrap().clone();
        let t = LaurentPoly::monomial(dr - db, lr / &lb);
        rem = &rem - &(&t * b);
        quo = &quo + &t;
    }
    (quo, rem)
}

/// Monic gcd of `a` and `b` in `ℚ[v]` (nonnegative supports).
///
/// Returns `1` if both are constants, and the monic gcd otherwise; the gcd of
/// `(0, 0)` is defined as `0`.
fn poly_gcd_monic(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
        // Keep remainders monic to keep coefficients small.
        if let Some(lc) = y.leading_coeff().cloned() {
            y = y.scaled(&lc.recip());
        }
    }
    match x.leading_coeff().cloned() {
        Some(lc) => x.scaled(&lc.recip()),
        None => x,
    }
}

// ---- Rational functions ----

/// A rational function in `v` over `ℚ`, kept in canonical form.
///
/// Invariants: the denominator is a monic polynomial in `v` with nonzero
/// constant term (lowest exponent `0`), and the numerator (a Laurent
/// polynomial) shares no nonconstant polynomial factor with it. The zero
/// element is `0 / 1`. Derived equality is therefore exact equality in `ℚ(v)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc {
            num: LaurentPoly::one(),
            den: LaurentPoly::one(),
        }
    }

    /// Builds `num / den` in canonical form. Panics if `den` is zero.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "division by zero in Q(v)");
        Self::canonicalize(num, den)
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        RatFunc {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(LaurentPoly::from_int(n))
    }

    pub fn from_rat(c: Rat) -> Self {
        Self::from_poly(LaurentPoly::from_rat(c))
    }

    /// `v^k`.
    pub fn v_pow(k: i64) -> Self {
        Self::from_poly(LaurentPoly::v_pow(k))
    }

    /// `q^k = v^{2k}`.
    pub fn q_pow(k: i64) -> Self {
        Self::v_pow(2 * k)
    }

    /// `q_i^k` where `q_i = v^{2d}`.
    pub fn qi_pow(k: i64, d: i64) -> Self {
        Self::v_pow(2 * d * k)
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        self.checked_inv().expect("division by zero in Q(v)")
    }

    pub fn checked_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::canonicalize(self.den.clone(), self.num.clone()))
        }
    }

    /// Bar involution `v ↦ v^{-1}`.
    pub fn bar(&self) -> Self {
        Self::canonicalize(self.num.bar(), self.den.bar())
    }

    /// Exact evaluation at `v = 1`, when the canonical denominator allows it.
    pub fn eval_at_one(&self) -> Option<Rat> {
        let one = Rat::one();
        let d = self.den.eval_rat(&one);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_rat(&one) / d)
        }
    }

    fn canonicalize(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "division by zero in Q(v)");
        if num.is_zero() {
            return Self::zero();
        }
        // Split off v-powers so both parts live in ℚ[v] with nonzero constant term.
        let a = num.min_exp().unwrap();
        let b = den.min_exp().unwrap();
        let n = num.shifted(-a);
        let d = den.shifted(-b);
        let g = poly_gcd_monic(&n, &d);
        let (n, rn) = poly_divrem(&n, &g);
        debug_assert!(rn.is_zero());
        let (d, rd) = poly_divrem(&d, &g);
        debug_assert!(rd.is_zero());
        // Make the denominator monic; the fraction is scaled accordingly.
        let lc = d.leading_coeff().unwrap().clone();
        let n = n.scaled(&lc.recip());
        let d = d.scaled(&lc.recip());
        RatFunc {
            num: n.shifted(a - b),
            den: d,
        }
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::canonicalize(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::canonicalize(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::canonicalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        assert!(!rhs.is_zero(), "division by zero in Q(v)");
        RatFunc::canonicalize(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

delegate_binop!(Add, add, RatFunc);
delegate_binop!(Sub, sub, RatFunc);
delegate_binop!(Mul, mul, RatFunc);
delegate_binop!(Div, div, RatFunc);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<LaurentPoly> for RatFunc {
    fn from(p: LaurentPoly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

// ---- q-combinatorics ----

/// Symmetric q-integer `[n]_i = (q_i^n - q_i^{-n}) / (q_i - q_i^{-1})` with
/// `q_i = v^{2d}`.
///
/// `[0] = 0`, `[-n] = -[n]`; for `n > 0` this is
/// `q_i^{n-1} + q_i^{n-3} + … + q_i^{1-n}`, a bar-invariant Laurent polynomial.
pub fn q_int(n: i64, d: i64) -> LaurentPoly {
    assert!(d >= 1, "q_int requires d >= 1");
    if n == 0 {
        return LaurentPoly::zero();
    }
    if n < 0 {
        return -q_int(-n, d);
    }
    let mut p = LaurentPoly::zero();
    let mut e = n - 1;
    while e >= 1 - n {
        p.insert_term(2 * d * e, Rat::one());
        e -= 2;
    }
    p
}

/// q-factorial `[n]_i! = [n]_i [n-1]_i ⋯ [1]_i`; `[0]! = 1`. Panics for `n < 0`.
pub fn q_fact(n: i64, d: i64) -> LaurentPoly {
    assert!(n >= 0, "q_fact of a negative integer");
    let mut p = LaurentPoly::one();
    for k in 1..=n {
        p = &p * &q_int(k, d);
    }
    p
}

/// q-binomial coefficient `[n choose r]_i = [n]_i! / ([r]_i! [n-r]_i!)`.
///
/// Defined for `n ≥ 0`, `r ≥ 0`; equals zero when `r > n`. The division is
/// exact and the result is a bar-invariant Laurent polynomial.
pub fn q_binom(n: i64, r: i64, d: i64) -> LaurentPoly {
    assert!(n >= 0 && r >= 0, "q_binom requires nonnegative arguments");
    if r > n {
        return LaurentPoly::zero();
    }
    let num = q_fact(n, d);
    let den = &q_fact(r, d) * &q_fact(n - r, d);
    let q = RatFunc::new(num, den);
    assert!(
        q.den().is_one(),
        "q_binom division was not exact (internal error)"
    );
    q.num().clone()
}

/// Formats a list of rational functions as a comma-separated string
/// (used by diagnostic output).
pub fn format_scalars(cs: &[RatFunc]) -> String {
    let parts: Vec<String> = cs.iter().map(|c| alloc::format!("{}", c)).collect();
    parts.join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vp(k: i64) -> LaurentPoly {
        LaurentPoly::v_pow(k)
    }

    #[test]
    fn laurent_basic_arithmetic() {
        // (v + 1)(v - 1) = v^2 - 1
        let a = &vp(1) + &LaurentPoly::one();
        let b = &vp(1) - &LaurentPoly::one();
        let p = &a * &b;
        let expected = &vp(2) - &LaurentPoly::one();
        assert_eq!(p, expected);
        // Laurent part: v^-1 * v = 1
        assert_eq!(&vp(-1) * &vp(1), LaurentPoly::one());
    }

    #[test]
    fn laurent_zero_cleanup() {
        let a = &vp(3) - &vp(3);
        assert!(a.is_zero());
        assert_eq!(a.term_count(), 0);
    }

    #[test]
    fn laurent_bar_negates_exponents() {
        let p = &vp(2) + &LaurentPoly::monomial(-1, rat(3, 2));
        let b = p.bar();
        assert_eq!(b.coeff(-2), rat(1, 1));
        assert_eq!(b.coeff(1), rat(3, 2));
        assert_eq!(b.bar(), p);
    }

    #[test]
    fn poly_divrem_exact_and_remainder() {
        // v^2 - 1 = (v - 1)(v + 1) exactly
        let a = &vp(2) - &LaurentPoly::one();
        let b = &vp(1) - &LaurentPoly::one();
        let (q, r) = poly_divrem(&a, &b);
        assert!(r.is_zero());
        assert_eq!(q, &vp(1) + &LaurentPoly::one());
        // v^2 + 1 by v + 1: quotient v - 1, remainder 2
        let a2 = &vp(2) + &LaurentPoly::one();
        let b2 = &vp(1) + &LaurentPoly::one();
        let (q2, r2) = poly_divrem(&a2, &b2);
        assert_eq!(q2, &vp(1) - &LaurentPoly::one());
        assert_eq!(r2, LaurentPoly::from_int(2));
    }

    #[test]
    fn gcd_of_cyclotomic_products() {
        // gcd(v^2 - 1, v^3 - 1) = v - 1 (monic)
        let a = &vp(2) - &LaurentPoly::one();
        let b = &vp(3) - &LaurentPoly::one();
        let g = poly_gcd_monic(&a, &b);
        assert_eq!(g, &vp(1) - &LaurentPoly::one());
    }

    #[test]
    fn ratfunc_canonical_form() {
        // (v^2 - 1)/(v - 1) reduces to the polynomial v + 1
        let r = RatFunc::new(&vp(2) - &LaurentPoly::one(), &vp(1) - &LaurentPoly::one());
        assert!(r.den().is_one());
        assert_eq!(*r.num(), &vp(1) + &LaurentPoly::one());
        // denominator normalization: 1/(2v - 2) has monic denominator v - 1
        let r2 = RatFunc::new(
            LaurentPoly::one(),
            (&vp(1) - &LaurentPoly::one()).scaled(&rat(2, 1)),
        );
        assert_eq!(*r2.den(), &vp(1) - &LaurentPoly::one());
        assert_eq!(*r2.num(), LaurentPoly::from_rat(rat(1, 2)));
        // v-powers migrate to the numerator: 1/v^3 = v^-3 / 1
        let r3 = RatFunc::new(LaurentPoly::one(), vp(3));
        assert!(r3.den().is_one());
        assert_eq!(*r3.num(), vp(-3));
    }

    #[test]
    fn ratfunc_field_identities() {
        let x = RatFunc::new(&vp(1) + &LaurentPoly::one(), &vp(2) + &LaurentPoly::from_int(3));
        let y = &x * &x.inv();
        assert!(y.is_one());
        let z = &x - &x;
        assert!(z.is_zero());
        assert_eq!(z, RatFunc::zero());
    }

    #[test]
    #[should_panic(expected = "division by zero in Q(v)")]
    fn ratfunc_zero_inverse_panics() {
        let _ = RatFunc::zero().inv();
    }

    #[test]
    fn ratfunc_bar_involution() {
        let x = RatFunc::new(&vp(3) - &vp(-1), &vp(2) + &LaurentPoly::one());
        assert_eq!(x.bar().bar(), x);
        // bar(v^k) = v^-k
        assert_eq!(RatFunc::v_pow(5).bar(), RatFunc::v_pow(-5));
    }

    #[test]
    fn eval_at_one_detects_poles() {
        // (v - 1)/(v + 1) at v = 1 is 0
        let x = RatFunc::new(&vp(1) - &LaurentPoly::one(), &vp(1) + &LaurentPoly::one());
        assert_eq!(x.eval_at_one(), Some(rat(0, 1)));
        // 1/(v - 1) has a pole at v = 1
        let y = RatFunc::new(LaurentPoly::one(), &vp(1) - &LaurentPoly::one());
        assert_eq!(y.eval_at_one(), None);
    }

    #[test]
    fn q_int_small_values() {
        // [1] = 1, [2] = q + q^{-1} = v^2 + v^-2 (d = 1)
        assert_eq!(q_int(1, 1), LaurentPoly::one());
        let two = q_int(2, 1);
        assert_eq!(two, &vp(2) + &vp(-2));
        // [3] = q^2 + 1 + q^-2
        let three = q_int(3, 1);
        assert_eq!(three, &(&vp(4) + &LaurentPoly::one()) + &vp(-4));
        // [-n] = -[n]
        assert_eq!(q_int(-3, 1), -q_int(3, 1));
        // specialization at v = 1 recovers n
        assert_eq!(q_int(5, 1).eval_rat(&rat(1, 1)), rat(5, 1));
    }

    #[test]
    fn q_int_definition_oracle() {
        // [n] agrees with the defining ratio (q^n - q^-n)/(q - q^-1).
        for n in -6..=6 {
            let num = &vp(2 * n) - &vp(-2 * n);
            let den = &vp(2) - &vp(-2);
            let ratio = RatFunc::new(num, den);
            assert_eq!(ratio, RatFunc::from_poly(q_int(n, 1)), "n = {}", n);
        }
    }

    #[test]
    fn q_fact_and_binom_values() {
        // [3]! = [3][2][1]
        let f3 = q_fact(3, 1);
        assert_eq!(f3, &q_int(3, 1) * &q_int(2, 1));
        // [4 choose 2] = [4]![2]!^-1[2]!^-1 is a polynomial with 5 terms
        // q^4 + q^2 + 2 + q^-2 + q^-4
        let b = q_binom(4, 2, 1);
        assert_eq!(b.coeff(0), rat(2, 1));
        assert_eq!(b.coeff(8), rat(1, 1));
        assert_eq!(b.coeff(-8), rat(1, 1));
        assert_eq!(b.eval_rat(&rat(1, 1)), rat(6, 1));
        // r > n gives zero
        assert!(q_binom(2, 3, 1).is_zero());
    }

    #[test]
    fn q_binom_pascal_oracle() {
        // Independent recurrence oracle:
        // [n r] = q^r [n-1 r] + q^{r-n} [n-1 r-1]  (q = q_i, d = 1)
        for n in 1..=6i64 {
            for r in 0..=n {
                let lhs = RatFunc::from_poly(q_binom(n, r, 1));
                let t1 = &RatFunc::q_pow(r) * &RatFunc::from_poly(q_binom(n - 1, r, 1));
                let t2 = if r >= 1 {
                    &RatFunc::q_pow(r - n) * &RatFunc::from_poly(q_binom(n - 1, r - 1, 1))
                } else {
                    RatFunc::zero()
                };
                assert_eq!(lhs, &t1 + &t2, "Pascal failed at n={}, r={}", n, r);
            }
        }
    }

    #[test]
    fn q_combinatorics_bar_invariant() {
        for n in 0..=5i64 {
            assert_eq!(q_fact(n, 1).bar(), q_fact(n, 1));
            for r in 0..=n {
                assert_eq!(q_binom(n, r, 1).bar(), q_binom(n, r, 1));
            }
        }
    }

    #[test]
    fn display_round_shape() {
        let p = &(&vp(2).scaled(&rat(2, 1)) - &LaurentPoly::one()) + &vp(-1);
        let s = alloc::format!("{}", p);
        assert_eq!(s, "2*v^2 - 1 + v^-1");
        let r = RatFunc::new(LaurentPoly::one(), &vp(1) + &LaurentPoly::one());
        assert_eq!(alloc::format!("{}", r), "(1)/(v + 1)");
    }

    // ---- property tests ----

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-4i64..=4, arb_rat()), 0..5).prop_map(|terms| {
            let mut p = LaurentPoly::zero();
            for (e, c) in terms {
                p.insert_term(e, c);
            }
            p
        })
    }

    fn arb_ratfunc() -> impl Strategy<Value = RatFunc> {
        (arb_poly(), arb_poly()).prop_map(|(n, d)| {
            if d.is_zero() {
                RatFunc::from_poly(n)
            } else {
                RatFunc::new(n, d)
            }
        })
    }

    proptest! {
        #[test]
        fn prop_poly_ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &LaurentPoly::zero(), a.clone());
            prop_assert_eq!(&a * &LaurentPoly::one(), a.clone());
            prop_assert_eq!(&a - &a, LaurentPoly::zero());
        }

        #[test]
        fn prop_poly_bar_is_ring_involution(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.bar().bar(), a.clone());
            prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
            prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        }

        #[test]
        fn prop_ratfunc_field_axioms(x in arb_ratfunc(), y in arb_ratfunc(), z in arb_ratfunc()) {
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            if !x.is_zero() {
                prop_assert!((&x * &x.inv()).is_one());
            }
        }

        #[test]
        fn prop_ratfunc_canonical_invariants(x in arb_ratfunc()) {
            // Denominator is monic with constant term nonzero (lowest exp 0).
            prop_assert!(x.den().leading_coeff().map_or(false, |c| c.is_one()));
            prop_assert_eq!(x.den().min_exp(), Some(0));
            if x.is_zero() {
                prop_assert!(x.den().is_one());
            } else {
                // num/den share no factor: gcd of shifted num and den is 1.
                let a = x.num().shifted(-x.num().min_exp().unwrap());
                let g = poly_gcd_monic(&a, x.den());
                prop_assert!(g.is_one());
            }
        }

        #[test]
        fn prop_ratfunc_bar_involution(x in arb_ratfunc(), y in arb_ratfunc()) {
            prop_assert_eq!(x.bar().bar(), x.clone());
            prop_assert_eq!((&x + &y).bar(), &x.bar() + &y.bar());
            prop_assert_eq!((&x * &y).bar(), &x.bar() * &y.bar());
        }
    }
}
