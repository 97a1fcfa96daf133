//! Exact rational arithmetic, sparse multivariate polynomials and reduced
//! rational functions. Everything downstream (operators, Gröbner bases,
//! b-functions) sits on this substrate, so all arithmetic here is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exact rational coefficient. `num_rational` keeps the invariants we need:
/// reduced fraction, positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Exponent vector of a monomial. Length always matches the ambient
/// variable count of whatever object carries it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// |α| = α_1 + ⋯ + α_n
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// α! = α_1! ⋯ α_n!
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&e| factorial(e)).product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise subtraction; `None` when not componentwise ≥.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Componentwise partial order γ ≥ β.
    pub fn geq(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn scale(&self, k: u32) -> MultiIndex {
        MultiIndex(self.0.iter().map(|e| e * k).collect())
    }
}

pub fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Sparse multivariate polynomial over ℚ in canonical form: the term map
/// never stores a zero coefficient, so equality is map equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Polynomial::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(MultiIndex::zero(nvars), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut p = Polynomial::zero(nvars);
        p.add_term(MultiIndex::unit(nvars, i), Rational::one());
        p
    }

    pub fn monomial(nvars: usize, exps: &[u32], c: Rational) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Polynomial::zero(nvars);
        p.add_term(MultiIndex(exps.to_vec()), c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (MultiIndex, Rational)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.len(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &MultiIndex) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> Vec<MultiIndex> {
        self.terms.keys().cloned().collect()
    }

    pub fn add_term(&mut self, m: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            // remove the key we just zeroed
            let dead: Vec<MultiIndex> = self
                .terms
                .iter()
                .filter(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "variable-count mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars, "variable-count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.add(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scalar_mul(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// ∂^β • f = Σ_{γ≥β} c_γ γ!/(γ−β)! x^{γ−β}
    pub fn partial_derive(&self, beta: &MultiIndex) -> Polynomial {
        assert_eq!(beta.len(), self.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (gamma, c) in &self.terms {
            if let Some(diff) = gamma.checked_sub(beta) {
                let factor =
                    Rational::from(gamma.factorial() / diff.factorial());
                out.add_term(diff, c * factor);
            }
        }
        out
    }

    /// Single first-order derivative ∂f/∂x_i.
    pub fn derive(&self, i: usize) -> Polynomial {
        self.partial_derive(&MultiIndex::unit(self.nvars, i))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total()).max()
    }

    /// Leading term under graded lex with x_1 > x_2 > ⋯ (the fixed
    /// canonical order used for normalization).
    pub fn leading_grlex(&self) -> Option<(&MultiIndex, &Rational)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| grlex_cmp(a, b))
    }

    /// Divide by the integer content and the sign of the grlex-leading
    /// coefficient, yielding an integer-coefficient primitive multiple.
    pub fn primitive_part(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(&(c.numer() * &den_lcm / c.denom()));
        }
        let mut scale = Rational::new(den_lcm, num_gcd);
        if self.leading_grlex().unwrap().1 .is_negative() {
            scale = -scale;
        }
        self.scalar_mul(&scale)
    }

    /// Make the grlex-leading coefficient 1.
    pub fn monic_grlex(&self) -> Polynomial {
        match self.leading_grlex() {
            None => self.clone(),
            Some((_, lc)) => {
                let inv = lc.recip();
                self.scalar_mul(&inv)
            }
        }
    }

    pub fn eval_rational(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Embed into a ring with `extra` additional trailing variables.
    pub fn extend_vars(&self, extra: usize) -> Polynomial {
        let n = self.nvars + extra;
        Polynomial {
            nvars: n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(n, 0);
                    (MultiIndex(e), c.clone())
                })
                .collect(),
        }
    }
}

pub fn grlex_cmp(a: &MultiIndex, b: &MultiIndex) -> std::cmp::Ordering {
    a.total().cmp(&b.total()).then_with(|| a.0.cmp(&b.0))
}

/// Exact division f / g; `None` when the division is not exact.
pub fn exact_div(f: &Polynomial, g: &Polynomial) -> Option<Polynomial> {
    assert!(!g.is_zero(), "division by zero polynomial");
    let mut rem = f.clone();
    let mut quot = Polynomial::zero(f.nvars());
    let (gm, gc) = {
        let (m, c) = g.leading_grlex().unwrap();
        (m.clone(), c.clone())
    };
    while !rem.is_zero() {
        let (rm, rc) = {
            let (m, c) = rem.leading_grlex().unwrap();
            (m.clone(), c.clone())
        };
        let diff = rm.checked_sub(&gm)?;
        let c = rc / &gc;
        let t = Polynomial::monomial(f.nvars(), &diff.0, c);
        quot = quot.add(&t);
        rem = rem.sub(&t.mul(g));
    }
    Some(quot)
}

/// Multivariate gcd over ℚ via primitive PRS in the highest occurring
/// variable. Output is primitive with positive grlex-leading coefficient.
pub fn poly_gcd(f: &Polynomial, g: &Polynomial) -> Polynomial {
    assert_eq!(f.nvars(), g.nvars());
    if f.is_zero() {
        return if g.is_zero() { g.clone() } else { g.primitive_part() };
    }
    if g.is_zero() {
        return f.primitive_part();
    }
    let top = top_var(f).max(top_var(g));
    match top {
        None => Polynomial::one(f.nvars()),
        Some(var) => gcd_in_var(&f.primitive_part(), &g.primitive_part(), var),
    }
}

fn top_var(p: &Polynomial) -> Option<usize> {
    p.terms()
        .flat_map(|(m, _)| {
            m.0.iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, _)| i)
        })
        .max()
}

fn univar_coeffs(p: &Polynomial, var: usize) -> BTreeMap<u32, Polynomial> {
    // p viewed as a univariate polynomial in `var` with polynomial coefficients
    let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
    for (m, c) in p.terms() {
        let e = m.0[var];
        let mut rest = m.clone();
        rest.0[var] = 0;
        out.entry(e)
            .or_insert_with(|| Polynomial::zero(p.nvars()))
            .add_term(rest, c.clone());
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn content_in_var(p: &Polynomial, var: usize) -> Polynomial {
    let coeffs = univar_coeffs(p, var);
    let mut acc = Polynomial::zero(p.nvars());
    for c in coeffs.values() {
        acc = poly_gcd(&acc, c);
        if acc.is_constant() && !acc.is_zero() {
            return Polynomial::one(p.nvars());
        }
    }
    acc
}

fn degree_in(p: &Polynomial, var: usize) -> u32 {
    p.terms().map(|(m, _)| m.0[var]).max().unwrap_or(0)
}

/// Pseudo-remainder of f by g in variable `var`.
fn pseudo_rem(f: &Polynomial, g: &Polynomial, var: usize) -> Polynomial {
    let dg = degree_in(g, var);
    let gc = univar_coeffs(g, var);
    let lead_g = gc.get(&dg).unwrap().clone();
    let mut rem = f.clone();
    loop {
        let dr = degree_in(&rem, var);
        if rem.is_zero() || dr < dg {
            return rem;
        }
        let rc = univar_coeffs(&rem, var);
        let lead_r = rc.get(&dr).unwrap().clone();
        // rem <- lead_g * rem - lead_r * x^(dr-dg) * g
        let shift = Polynomial::monomial(
            f.nvars(),
            &MultiIndex::unit(f.nvars(), var).scale(dr - dg).0,
            Rational::one(),
        );
        rem = rem.mul(&lead_g).sub(&lead_r.mul(&shift).mul(g));
    }
}

/// Both arguments nonzero; `var` is the highest variable occurring in
/// either. Contents recurse through `poly_gcd`, which re-derives the top
/// variable, so the mutual recursion strictly descends.
fn gcd_in_var(f: &Polynomial, g: &Polynomial, var: usize) -> Polynomial {
    let ca = content_in_var(f, var);
    let cb = content_in_var(g, var);
    let cont = poly_gcd(&ca, &cb);
    let mut a = exact_div(f, &ca).unwrap();
    let mut b = exact_div(g, &cb).unwrap();
    if degree_in(&a, var) < degree_in(&b, var) {
        std::mem::swap(&mut a, &mut b);
    }
    // primitive PRS
    while !b.is_zero() {
        let r = pseudo_rem(&a, &b, var);
        a = b;
        b = if r.is_zero() {
            r
        } else {
            let cr = content_in_var(&r, var);
            exact_div(&r, &cr).unwrap()
        };
    }
    let ce = content_in_var(&a, var);
    a = exact_div(&a, &ce).unwrap();
    cont.mul(&a).primitive_part()
}

/// Reduced fraction of two polynomials. Canonical form: gcd(num, den) = 1
/// and the denominator grlex-monic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    /// Build the reduced representative of num/den.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, crate::error::Error> {
        if den.is_zero() {
            return Err(crate::error::Error::ZeroDenominator);
        }
        assert_eq!(num.nvars(), den.nvars(), "variable-count mismatch");
        if num.is_zero() {
            return Ok(RationalFunction {
                num,
                den: Polynomial::one(den.nvars()),
            });
        }
        let g = poly_gcd(&num, &den);
        let mut num = exact_div(&num, &g).unwrap();
        let mut den = exact_div(&den, &g).unwrap();
        let lc = den.leading_grlex().unwrap().1.clone();
        let inv = lc.recip();
        num = num.scalar_mul(&inv);
        den = den.scalar_mul(&inv);
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let one = Polynomial::one(p.nvars());
        RationalFunction { num: p, den: one }
    }

    /// 1/f^k for k ≥ 1.
    pub fn inverse_power(f: &Polynomial, k: u32) -> Result<Self, crate::error::Error> {
        RationalFunction::new(Polynomial::one(f.nvars()), f.pow(k))
    }

    pub fn zero(nvars: usize) -> Self {
        RationalFunction::from_poly(Polynomial::zero(nvars))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        let num = self
            .num
            .mul(&other.den)
            .add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RationalFunction::new(num, den).unwrap()
    }

    pub fn sub(&self, other: &RationalFunction) -> RationalFunction {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction::new(self.num.mul(&other.num), self.den.mul(&other.den)).unwrap()
    }

    pub fn mul_poly(&self, p: &Polynomial) -> RationalFunction {
        RationalFunction::new(self.num.mul(p), self.den.clone()).unwrap()
    }

    pub fn scalar_mul(&self, c: &Rational) -> RationalFunction {
        RationalFunction {
            num: self.num.scalar_mul(c),
            den: self.den.clone(),
        }
    }

    /// ∂/∂x_i by the quotient rule, reduced.
    pub fn derive(&self, i: usize) -> RationalFunction {
        let num = self
            .num
            .derive(i)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derive(i)));
        let den = self.den.mul(&self.den);
        RationalFunction::new(num, den).unwrap()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.coeff(&MultiIndex::zero(self.nvars())).is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

pub(crate) fn var_name(i: usize, n: usize) -> String {
    if n <= 3 {
        ["x", "y", "z"][i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| grlex_cmp(b, a));
        let mut first = true;
        for (m, c) in terms {
            let neg = c.is_negative();
            let ac = c.abs();
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
            let mut pieces: Vec<String> = Vec::new();
            if !ac.is_one() || m.is_zero() {
                pieces.push(format!("{}", ac));
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 1 {
                    pieces.push(var_name(i, self.nvars));
                } else if e > 1 {
                    pieces.push(format!("{}^{}", var_name(i, self.nvars), e));
                }
            }
            write!(f, "{}", pieces.join("*"))?;
        }
        Ok(())
    }
}
