//! Operators in the Weyl algebra and its extensions: the homogenized
//! algebra (central h with ∂_i x_i = x_i ∂_i + h²), adjoined central
//! parameters (s), and the shift-algebra tensor factor (σ, ∂_t with
//! σ∂_t = ∂_tσ + ∂_t). Operators are kept normally ordered: all x's (and
//! σ) to the left of all ∂'s (and ∂_t).

use crate::error::{Error, Result};
use crate::poly::{binomial, factorial, MultiIndex, Polynomial, Rational, RationalFunction};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Which algebra an operator lives in: `n` Weyl pairs (x_i, ∂_i), a list
/// of commuting central parameters, and optionally the shift pair (σ, ∂_t).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraSignature {
    n: usize,
    var_names: Vec<String>,
    central: Vec<String>,
    shift_pair: bool,
    homogenized: bool,
}

impl AlgebraSignature {
    pub fn weyl(n: usize) -> Self {
        let names = (0..n).map(|i| crate::poly::var_name(i, n)).collect();
        AlgebraSignature::weyl_named(names)
    }

    pub fn weyl_named(var_names: Vec<String>) -> Self {
        let sig = AlgebraSignature {
            n: var_names.len(),
            var_names,
            central: Vec::new(),
            shift_pair: false,
            homogenized: false,
        };
        sig.check_names();
        sig
    }

    pub fn with_central(mut self, name: &str) -> Self {
        self.central.push(name.to_string());
        self.check_names();
        self
    }

    /// D_n^(h): adds the central homogenization variable h and switches the
    /// commutation rule to ∂_i x_i = x_i ∂_i + h².
    pub fn homogenized(mut self) -> Self {
        assert!(!self.homogenized, "already homogenized");
        self.central.push("h".to_string());
        self.homogenized = true;
        self.check_names();
        self
    }

    /// D_n ⊗ S with the shift algebra S = C⟨∂_t, σ | σ∂_t = ∂_tσ + ∂_t⟩.
    pub fn with_shift_pair(mut self) -> Self {
        assert!(!self.shift_pair, "shift pair already present");
        self.shift_pair = true;
        self.check_names();
        self
    }

    fn check_names(&self) {
        let mut all: Vec<&str> = self.var_names.iter().map(|s| s.as_str()).collect();
        all.extend(self.central.iter().map(|s| s.as_str()));
        if self.shift_pair {
            all.push("sg");
            all.push("dt");
        }
        let mut sorted = all.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len(), "variable names must be unique");
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn central_params(&self) -> &[String] {
        &self.central
    }

    pub fn has_shift_pair(&self) -> bool {
        self.shift_pair
    }

    pub fn is_homogenized(&self) -> bool {
        self.homogenized
    }

    pub fn is_plain(&self) -> bool {
        self.central.is_empty() && !self.shift_pair
    }

    /// Number of slots on the x side: vars, central params, then σ.
    pub fn alpha_len(&self) -> usize {
        self.n + self.central.len() + usize::from(self.shift_pair)
    }

    /// Number of slots on the ∂ side: partials, then ∂_t.
    pub fn beta_len(&self) -> usize {
        self.n + usize::from(self.shift_pair)
    }

    pub fn central_slot(&self, name: &str) -> Option<usize> {
        self.central.iter().position(|c| c == name).map(|i| self.n + i)
    }

    pub fn sigma_slot(&self) -> Option<usize> {
        self.shift_pair.then(|| self.n + self.central.len())
    }

    pub fn dt_slot(&self) -> Option<usize> {
        self.shift_pair.then(|| self.n)
    }

    pub fn alpha_slot_name(&self, i: usize) -> String {
        if i < self.n {
            self.var_names[i].clone()
        } else if i < self.n + self.central.len() {
            self.central[i - self.n].clone()
        } else {
            "sg".to_string()
        }
    }

    pub fn beta_slot_name(&self, i: usize) -> String {
        if i < self.n {
            format!("d{}", self.var_names[i])
        } else {
            "dt".to_string()
        }
    }
}

/// Exponent pair of a normally ordered monomial x^α ∂^β. The α block also
/// carries central parameters and σ; the β block carries ∂_t last.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OpMono {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
}

impl OpMono {
    pub fn one(sig: &AlgebraSignature) -> Self {
        OpMono {
            alpha: MultiIndex::zero(sig.alpha_len()),
            beta: MultiIndex::zero(sig.beta_len()),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.alpha.total() + self.beta.total()
    }

    pub fn mul(&self, other: &OpMono) -> OpMono {
        OpMono {
            alpha: self.alpha.add(&other.alpha),
            beta: self.beta.add(&other.beta),
        }
    }

    pub fn divides(&self, other: &OpMono) -> bool {
        other.alpha.geq(&self.alpha) && other.beta.geq(&self.beta)
    }

    pub fn checked_div(&self, other: &OpMono) -> Option<OpMono> {
        Some(OpMono {
            alpha: self.alpha.checked_sub(&other.alpha)?,
            beta: self.beta.checked_sub(&other.beta)?,
        })
    }

    pub fn lcm(&self, other: &OpMono) -> OpMono {
        OpMono {
            alpha: MultiIndex(
                self.alpha
                    .0
                    .iter()
                    .zip(&other.alpha.0)
                    .map(|(a, b)| *a.max(b))
                    .collect(),
            ),
            beta: MultiIndex(
                self.beta
                    .0
                    .iter()
                    .zip(&other.beta.0)
                    .map(|(a, b)| *a.max(b))
                    .collect(),
            ),
        }
    }
}

/// Normally ordered operator: finite sum of terms c · x^α ∂^β.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeylOperator {
    sig: AlgebraSignature,
    terms: BTreeMap<OpMono, Rational>,
}

impl WeylOperator {
    pub fn zero(sig: &AlgebraSignature) -> Self {
        WeylOperator {
            sig: sig.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(sig: &AlgebraSignature, c: Rational) -> Self {
        let mut op = WeylOperator::zero(sig);
        op.add_term(OpMono::one(sig), c);
        op
    }

    pub fn one(sig: &AlgebraSignature) -> Self {
        WeylOperator::constant(sig, Rational::one())
    }

    /// x_i
    pub fn x_var(sig: &AlgebraSignature, i: usize) -> Self {
        assert!(i < sig.n());
        let mut m = OpMono::one(sig);
        m.alpha.0[i] = 1;
        WeylOperator::from_terms(sig, [(m, Rational::one())])
    }

    /// ∂_i
    pub fn d_var(sig: &AlgebraSignature, i: usize) -> Self {
        assert!(i < sig.n());
        let mut m = OpMono::one(sig);
        m.beta.0[i] = 1;
        WeylOperator::from_terms(sig, [(m, Rational::one())])
    }

    pub fn central(sig: &AlgebraSignature, name: &str) -> Self {
        let slot = sig
            .central_slot(name)
            .unwrap_or_else(|| panic!("no central parameter {name}"));
        let mut m = OpMono::one(sig);
        m.alpha.0[slot] = 1;
        WeylOperator::from_terms(sig, [(m, Rational::one())])
    }

    pub fn sigma(sig: &AlgebraSignature) -> Self {
        let slot = sig.sigma_slot().expect("no shift pair");
        let mut m = OpMono::one(sig);
        m.alpha.0[slot] = 1;
        WeylOperator::from_terms(sig, [(m, Rational::one())])
    }

    pub fn dt(sig: &AlgebraSignature) -> Self {
        let slot = sig.dt_slot().expect("no shift pair");
        let mut m = OpMono::one(sig);
        m.beta.0[slot] = 1;
        WeylOperator::from_terms(sig, [(m, Rational::one())])
    }

    /// A single normally ordered term c · x^α ∂^β.
    pub fn term(sig: &AlgebraSignature, alpha: &[u32], beta: &[u32], c: Rational) -> Self {
        assert_eq!(alpha.len(), sig.alpha_len());
        assert_eq!(beta.len(), sig.beta_len());
        WeylOperator::from_terms(
            sig,
            [(
                OpMono {
                    alpha: MultiIndex(alpha.to_vec()),
                    beta: MultiIndex(beta.to_vec()),
                },
                c,
            )],
        )
    }

    pub fn from_terms(
        sig: &AlgebraSignature,
        terms: impl IntoIterator<Item = (OpMono, Rational)>,
    ) -> Self {
        let mut op = WeylOperator::zero(sig);
        for (m, c) in terms {
            op.add_term(m, c);
        }
        op
    }

    /// Embed a commutative polynomial in the x variables.
    pub fn from_poly(sig: &AlgebraSignature, f: &Polynomial) -> Self {
        assert_eq!(f.nvars(), sig.n(), "variable-count mismatch");
        WeylOperator::from_terms(
            sig,
            f.terms().map(|(m, c)| {
                let mut alpha = MultiIndex::zero(sig.alpha_len());
                alpha.0[..sig.n()].copy_from_slice(&m.0);
                (
                    OpMono {
                        alpha,
                        beta: MultiIndex::zero(sig.beta_len()),
                    },
                    c.clone(),
                )
            }),
        )
    }

    /// The Euler symbol s = ω_1 x_1∂_1 + ⋯ + ω_n x_n∂_n.
    pub fn euler(sig: &AlgebraSignature, omega: &[Rational]) -> Self {
        assert_eq!(omega.len(), sig.n());
        let mut op = WeylOperator::zero(sig);
        for (i, w) in omega.iter().enumerate() {
            let mut m = OpMono::one(sig);
            m.alpha.0[i] = 1;
            m.beta.0[i] = 1;
            op.add_term(m, w.clone());
        }
        op
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.sig
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OpMono, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &OpMono) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: OpMono, c: Rational) {
        if c.is_zero() {
            return;
        }
        assert_eq!(m.alpha.len(), self.sig.alpha_len());
        assert_eq!(m.beta.len(), self.sig.beta_len());
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &WeylOperator) -> WeylOperator {
        assert_eq!(self.sig, other.sig, "signature mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> WeylOperator {
        WeylOperator {
            sig: self.sig.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &WeylOperator) -> WeylOperator {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: &Rational) -> WeylOperator {
        if c.is_zero() {
            return WeylOperator::zero(&self.sig);
        }
        WeylOperator {
            sig: self.sig.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    /// Normally ordered product. The reordering rules are
    /// ∂^b x^a = Σ_k C(a,k) C(b,k) k! x^{a−k} ∂^{b−k} (· h^{2k} in D^(h))
    /// per Weyl pair and ∂_t^b σ^c = (σ−b)^c ∂_t^b for the shift pair.
    pub fn mul(&self, other: &WeylOperator) -> Result<WeylOperator> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch(format!(
                "cannot multiply operators over {:?} and {:?}",
                self.sig.var_names, other.sig.var_names
            )));
        }
        let sig = &self.sig;
        let n = sig.n();
        let h_slot = if sig.homogenized {
            sig.central_slot("h")
        } else {
            None
        };
        let mut out = WeylOperator::zero(sig);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                // partial products after reordering ∂^{β1} past x^{α2}
                let mut partial: Vec<(OpMono, Rational)> =
                    vec![(m1.mul(m2), c1 * c2)];
                for i in 0..n {
                    let b = m1.beta.0[i];
                    let a = m2.alpha.0[i];
                    let kmax = b.min(a);
                    if kmax == 0 {
                        continue;
                    }
                    let mut next = Vec::with_capacity(partial.len() * (kmax as usize + 1));
                    for (m, c) in &partial {
                        for k in 0..=kmax {
                            let coef = binomial(a, k) * binomial(b, k) * factorial(k);
                            let mut mm = m.clone();
                            mm.alpha.0[i] -= k;
                            mm.beta.0[i] -= k;
                            if let Some(h) = h_slot {
                                mm.alpha.0[h] += 2 * k;
                            }
                            next.push((mm, c * Rational::from(coef)));
                        }
                    }
                    partial = next;
                }
                if sig.shift_pair {
                    let b = m1.beta.0[sig.dt_slot().unwrap()];
                    let c_exp = m2.alpha.0[sig.sigma_slot().unwrap()];
                    if b > 0 && c_exp > 0 {
                        // ∂_t^b σ^c = Σ_j C(c,j) (−b)^{c−j} σ^j ∂_t^b
                        let sigma = sig.sigma_slot().unwrap();
                        let mut next = Vec::new();
                        for (m, c) in &partial {
                            for j in 0..=c_exp {
                                let coef = Rational::from(
                                    binomial(c_exp, j)
                                        * BigInt::from(-(b as i64)).pow(c_exp - j),
                                );
                                let mut mm = m.clone();
                                mm.alpha.0[sigma] -= c_exp - j;
                                next.push((mm, c * coef));
                            }
                        }
                        partial = next;
                    }
                }
                for (m, c) in partial {
                    out.add_term(m, c);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<WeylOperator> {
        let mut out = WeylOperator::one(&self.sig);
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Left module action P • f on a polynomial.
    pub fn apply_to_poly(&self, f: &Polynomial) -> Result<Polynomial> {
        self.check_actionable(f.nvars())?;
        let n = self.sig.n();
        let mut out = Polynomial::zero(n);
        for (m, c) in &self.terms {
            let beta = MultiIndex(m.beta.0[..n].to_vec());
            let alpha = MultiIndex(m.alpha.0[..n].to_vec());
            let derived = f.partial_derive(&beta);
            let shifted = Polynomial::monomial(n, &alpha.0, c.clone()).mul(&derived);
            out = out.add(&shifted);
        }
        Ok(out)
    }

    /// Left module action P • g on a rational function, via the quotient
    /// rule. P • g = 0 characterizes membership of P in the annihilator.
    pub fn apply_to_ratfun(&self, g: &RationalFunction) -> Result<RationalFunction> {
        self.check_actionable(g.nvars())?;
        let n = self.sig.n();
        let mut out = RationalFunction::zero(n);
        for (m, c) in &self.terms {
            let mut acted = g.clone();
            for (i, &e) in m.beta.0[..n].iter().enumerate() {
                for _ in 0..e {
                    acted = acted.derive(i);
                }
            }
            let alpha = MultiIndex(m.alpha.0[..n].to_vec());
            let mono = Polynomial::monomial(n, &alpha.0, c.clone());
            out = out.add(&acted.mul_poly(&mono));
        }
        Ok(out)
    }

    fn check_actionable(&self, nvars: usize) -> Result<()> {
        if !self.sig.is_plain() {
            return Err(Error::SignatureMismatch(
                "only plain D_n operators act on functions".into(),
            ));
        }
        if self.sig.n() != nvars {
            return Err(Error::VariableMismatch(format!(
                "operator over {} variables applied to {}-variable function",
                self.sig.n(),
                nvars
            )));
        }
        Ok(())
    }

    /// Replace a central parameter by a rational constant, removing its slot.
    pub fn substitute_central(&self, name: &str, value: &Rational) -> WeylOperator {
        let slot = self
            .sig
            .central_slot(name)
            .unwrap_or_else(|| panic!("no central parameter {name}"));
        let mut sig = self.sig.clone();
        sig.central.retain(|c| c != name);
        if name == "h" {
            sig.homogenized = false;
        }
        let mut out = WeylOperator::zero(&sig);
        for (m, c) in &self.terms {
            let e = m.alpha.0[slot];
            let mut alpha = m.alpha.0.clone();
            alpha.remove(slot);
            let mut scale = Rational::one();
            for _ in 0..e {
                scale *= value;
            }
            out.add_term(
                OpMono {
                    alpha: MultiIndex(alpha),
                    beta: m.beta.clone(),
                },
                c * scale,
            );
        }
        out
    }

    /// Rename σ into a central parameter. Every term must be free of ∂_t;
    /// the shift pair is removed from the signature.
    pub fn sigma_to_central(&self, name: &str) -> Result<WeylOperator> {
        let sigma = self.sig.sigma_slot().ok_or_else(|| {
            Error::SignatureMismatch("operator has no shift pair".into())
        })?;
        let dt = self.sig.dt_slot().unwrap();
        let mut sig = self.sig.clone();
        sig.shift_pair = false;
        sig = sig.with_central(name);
        let new_slot = sig.central_slot(name).unwrap();
        let mut out = WeylOperator::zero(&sig);
        for (m, c) in &self.terms {
            if m.beta.0[dt] != 0 {
                return Err(Error::InvalidInput(
                    "operator still involves dt; eliminate it first".into(),
                ));
            }
            let e = m.alpha.0[sigma];
            let mut alpha = m.alpha.0.clone();
            alpha.remove(sigma);
            alpha.insert(new_slot, e);
            let mut beta = m.beta.0.clone();
            beta.remove(dt);
            out.add_term(
                OpMono {
                    alpha: MultiIndex(alpha),
                    beta: MultiIndex(beta),
                },
                c.clone(),
            );
        }
        Ok(out)
    }

    /// Re-express over a larger signature that contains all of this one's
    /// slots by name (e.g. embed D_n into D_n[s] or D_n ⊗ S).
    pub fn cast_to(&self, sig: &AlgebraSignature) -> Result<WeylOperator> {
        if sig.n() != self.sig.n() || sig.var_names != self.sig.var_names {
            return Err(Error::SignatureMismatch(
                "cast must preserve the Weyl variables".into(),
            ));
        }
        let mut out = WeylOperator::zero(sig);
        for (m, c) in &self.terms {
            let mut alpha = MultiIndex::zero(sig.alpha_len());
            let mut beta = MultiIndex::zero(sig.beta_len());
            alpha.0[..sig.n()].copy_from_slice(&m.alpha.0[..self.sig.n()]);
            beta.0[..sig.n()].copy_from_slice(&m.beta.0[..self.sig.n()]);
            for (i, cname) in self.sig.central.iter().enumerate() {
                let e = m.alpha.0[self.sig.n() + i];
                if e > 0 {
                    let slot = sig.central_slot(cname).ok_or_else(|| {
                        Error::SignatureMismatch(format!(
                            "target signature lacks central parameter {cname}"
                        ))
                    })?;
                    alpha.0[slot] = e;
                }
            }
            if self.sig.shift_pair {
                let se = m.alpha.0[self.sig.sigma_slot().unwrap()];
                let de = m.beta.0[self.sig.dt_slot().unwrap()];
                if se > 0 || de > 0 {
                    if !sig.shift_pair {
                        return Err(Error::SignatureMismatch(
                            "target signature lacks the shift pair".into(),
                        ));
                    }
                    alpha.0[sig.sigma_slot().unwrap()] = se;
                    beta.0[sig.dt_slot().unwrap()] = de;
                }
            }
            out.add_term(OpMono { alpha, beta }, c.clone());
        }
        Ok(out)
    }

    /// Divide by the integer content; sign fixed so the structurally-largest
    /// term has positive coefficient. Keeps Gröbner arithmetic in Z.
    pub fn primitive_part(&self) -> WeylOperator {
        use num_integer::Integer;
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
        if self.terms.iter().next_back().unwrap().1.is_negative() {
            scale = -scale;
        }
        self.scalar_mul(&scale)
    }
}

/// Evaluate the partition-sum formula for ∂^β • (1/f) literally: the sum
/// runs over unordered partitions β = β_1 + ⋯ + β_r into nonzero vectors,
/// with coefficient (−1)^r r!/(i_1!⋯i_s!) · β!/(β_1!⋯β_r!), where the i_j
/// are the multiplicities of the distinct parts.
pub fn inverse_derivative_formula(f: &Polynomial, beta: &MultiIndex) -> Result<RationalFunction> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    assert_eq!(beta.len(), f.nvars());
    if beta.is_zero() {
        return RationalFunction::new(Polynomial::one(f.nvars()), f.clone());
    }
    let max_r = beta.total();
    let mut numerator = Polynomial::zero(f.nvars());
    for parts in multiset_partitions(beta) {
        let r = parts.iter().map(|(_, mult)| mult).sum::<u32>();
        let mut coef = Rational::from(factorial(r) * beta.factorial());
        if r % 2 == 1 {
            coef = -coef;
        }
        let mut denom = BigInt::one();
        for (part, mult) in &parts {
            denom *= factorial(*mult);
            for _ in 0..*mult {
                denom *= part.factorial();
            }
        }
        coef /= Rational::from(denom);
        let mut prod = Polynomial::constant(f.nvars(), coef);
        for (part, mult) in &parts {
            let d = f.partial_derive(part);
            for _ in 0..*mult {
                prod = prod.mul(&d);
            }
        }
        // common denominator f^{max_r + 1}
        prod = prod.mul(&f.pow(max_r - r));
        numerator = numerator.add(&prod);
    }
    RationalFunction::new(numerator, f.pow(max_r + 1))
}

/// Unordered partitions of β into nonzero multi-indices, each returned as a
/// list of (distinct part, multiplicity).
fn multiset_partitions(beta: &MultiIndex) -> Vec<Vec<(MultiIndex, u32)>> {
    let mut out = Vec::new();
    let mut current: Vec<(MultiIndex, u32)> = Vec::new();
    descend(beta.clone(), None, &mut current, &mut out);
    return out;

    fn descend(
        remaining: MultiIndex,
        bound: Option<&MultiIndex>,
        current: &mut Vec<(MultiIndex, u32)>,
        out: &mut Vec<Vec<(MultiIndex, u32)>>,
    ) {
        if remaining.is_zero() {
            out.push(current.clone());
            return;
        }
        for part in parts_below(&remaining, bound) {
            let mut left = remaining.clone();
            let mut mult = 0;
            while let Some(next) = left.checked_sub(&part) {
                left = next;
                mult += 1;
                current.push((part.clone(), mult));
                descend(left.clone(), Some(&part), current, out);
                current.pop();
            }
        }
    }

    fn parts_below(remaining: &MultiIndex, bound: Option<&MultiIndex>) -> Vec<MultiIndex> {
        // all nonzero vectors ≤ remaining componentwise, strictly below the
        // bound in lex order so each multiset is produced exactly once
        let mut parts = vec![MultiIndex::zero(remaining.len())];
        for (i, &cap) in remaining.0.iter().enumerate() {
            let mut next = Vec::new();
            for p in &parts {
                for e in 0..=cap {
                    let mut q = p.clone();
                    q.0[i] = e;
                    next.push(q);
                }
            }
            parts = next;
        }
        parts.retain(|p| !p.is_zero());
        if let Some(b) = bound {
            parts.retain(|p| p.0 < b.0);
        }
        parts.sort();
        parts.reverse();
        parts
    }
}

/// Commutative polynomial in the symbols θ_1,…,θ_n with θ_i = x_i∂_i.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ThetaPolynomial(pub Polynomial);

impl ThetaPolynomial {
    pub fn nvars(&self) -> usize {
        self.0.nvars()
    }

    /// Substitute θ_i = x_i∂_i and normally order.
    pub fn to_weyl(&self, sig: &AlgebraSignature) -> Result<WeylOperator> {
        assert_eq!(self.0.nvars(), sig.n());
        let mut out = WeylOperator::zero(sig);
        for (m, c) in self.0.terms() {
            let mut term = WeylOperator::constant(sig, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                let theta = WeylOperator::euler(
                    sig,
                    &(0..sig.n())
                        .map(|j| {
                            if j == i {
                                Rational::one()
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect::<Vec<_>>(),
                );
                term = term.mul(&theta.pow(e)?)?;
            }
            out = out.add(&term);
        }
        Ok(out)
    }
}

pub fn theta_to_weyl(p: &ThetaPolynomial, sig: &AlgebraSignature) -> Result<WeylOperator> {
    p.to_weyl(sig)
}

impl fmt::Display for WeylOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            b.total_degree()
                .cmp(&a.total_degree())
                .then_with(|| b.cmp(a))
        });
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
            let trivial = m.alpha.is_zero() && m.beta.is_zero();
            if !ac.is_one() || trivial {
                pieces.push(format!("{}", ac));
            }
            for (i, &e) in m.alpha.0.iter().enumerate() {
                if e == 1 {
                    pieces.push(self.sig.alpha_slot_name(i));
                } else if e > 1 {
                    pieces.push(format!("{}^{}", self.sig.alpha_slot_name(i), e));
                }
            }
            for (i, &e) in m.beta.0.iter().enumerate() {
                if e == 1 {
                    pieces.push(self.sig.beta_slot_name(i));
                } else if e > 1 {
                    pieces.push(format!("{}^{}", self.sig.beta_slot_name(i), e));
                }
            }
            write!(f, "{}", pieces.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat_int, MultiIndex};

    fn d2() -> AlgebraSignature {
        AlgebraSignature::weyl(2)
    }

    fn d1() -> AlgebraSignature {
        AlgebraSignature::weyl(1)
    }

    /// Naive product that reorders by iterated single swaps ∂x → x∂ + 1.
    /// Independent of the closed-form path in `WeylOperator::mul`.
    fn naive_mul(p: &WeylOperator, q: &WeylOperator) -> WeylOperator {
        let sig = p.signature().clone();
        assert!(sig.is_plain());
        let n = sig.n();
        // word = sequence of generators; false = x_i, true = ∂_i
        let mut out = WeylOperator::zero(&sig);
        for (m1, c1) in p.terms() {
            for (m2, c2) in q.terms() {
                let mut word: Vec<(usize, bool)> = Vec::new();
                for (i, &e) in m1.alpha.0[..n].iter().enumerate() {
                    word.extend(std::iter::repeat((i, false)).take(e as usize));
                }
                for (i, &e) in m1.beta.0[..n].iter().enumerate() {
                    word.extend(std::iter::repeat((i, true)).take(e as usize));
                }
                for (i, &e) in m2.alpha.0[..n].iter().enumerate() {
                    word.extend(std::iter::repeat((i, false)).take(e as usize));
                }
                for (i, &e) in m2.beta.0[..n].iter().enumerate() {
                    word.extend(std::iter::repeat((i, true)).take(e as usize));
                }
                let reduced = reduce_word(&sig, &word);
                out = out.add(&reduced.scalar_mul(&(c1 * c2)));
            }
        }
        out
    }

    fn reduce_word(sig: &AlgebraSignature, word: &[(usize, bool)]) -> WeylOperator {
        // find one inversion ∂_i x_i and rewrite; x_j/∂_i with i≠j commute
        for k in 0..word.len().saturating_sub(1) {
            let (i, di) = word[k];
            let (j, dj) = word[k + 1];
            if di && !dj {
                // ∂_i x_j
                if i == j {
                    let mut swapped = word.to_vec();
                    swapped.swap(k, k + 1);
                    let mut dropped = word.to_vec();
                    dropped.drain(k..=k + 1);
                    return reduce_word(sig, &swapped).add(&reduce_word(sig, &dropped));
                } else {
                    let mut swapped = word.to_vec();
                    swapped.swap(k, k + 1);
                    return reduce_word(sig, &swapped);
                }
            }
        }
        // normally ordered word
        let mut alpha = MultiIndex::zero(sig.alpha_len());
        let mut beta = MultiIndex::zero(sig.beta_len());
        for &(i, d) in word {
            if d {
                beta.0[i] += 1;
            } else {
                alpha.0[i] += 1;
            }
        }
        WeylOperator::from_terms(sig, [(OpMono { alpha, beta }, Rational::one())])
    }

    #[test]
    fn defining_relation() {
        let sig = d1();
        let dx = WeylOperator::d_var(&sig, 0);
        let x = WeylOperator::x_var(&sig, 0);
        let got = dx.mul(&x).unwrap();
        // x∂_x + 1
        let want = WeylOperator::term(&sig, &[1], &[1], rat_int(1))
            .add(&WeylOperator::one(&sig));
        assert_eq!(got, want);
    }

    #[test]
    fn euler_square() {
        let sig = d1();
        let theta = WeylOperator::term(&sig, &[1], &[1], rat_int(1));
        let got = theta.mul(&theta).unwrap();
        // x^2 ∂_x^2 + x ∂_x
        let want = WeylOperator::term(&sig, &[2], &[2], rat_int(1))
            .add(&WeylOperator::term(&sig, &[1], &[1], rat_int(1)));
        assert_eq!(got, want);
    }

    #[test]
    fn shift_pair_relation() {
        let sig = AlgebraSignature::weyl(0).with_shift_pair();
        let dt = WeylOperator::dt(&sig);
        let sg = WeylOperator::sigma(&sig);
        // ∂_t σ = σ∂_t − ∂_t
        let got = dt.mul(&sg).unwrap();
        let want = sg.mul(&dt).unwrap().sub(&dt);
        assert_eq!(got, want);
        // σ∂_t = ∂_tσ + ∂_t rearranged the paper's way
        let lhs = sg.mul(&dt).unwrap();
        let rhs = dt.mul(&sg).unwrap().add(&dt);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn shift_power_rule_matches_single_swaps() {
        // ∂_t^a σ^c expanded by the closed form must match iterated swaps
        let sig = AlgebraSignature::weyl(0).with_shift_pair();
        let dt = WeylOperator::dt(&sig);
        let sg = WeylOperator::sigma(&sig);
        for a in 0..4u32 {
            for c in 0..4u32 {
                let closed = dt.pow(a).unwrap().mul(&sg.pow(c).unwrap()).unwrap();
                // iterate: multiply σ one factor at a time from the right
                let mut iter = dt.pow(a).unwrap();
                for _ in 0..c {
                    iter = iter.mul(&sg).unwrap();
                }
                assert_eq!(closed, iter, "a={a} c={c}");
            }
        }
    }

    #[test]
    fn homogenized_relation() {
        let sig = AlgebraSignature::weyl(1).homogenized();
        let dx = WeylOperator::d_var(&sig, 0);
        let x = WeylOperator::x_var(&sig, 0);
        let h = WeylOperator::central(&sig, "h");
        let got = dx.mul(&x).unwrap();
        let want = x.mul(&dx).unwrap().add(&h.mul(&h).unwrap());
        assert_eq!(got, want);
    }

    #[test]
    fn closed_form_matches_naive_reordering() {
        let sig = d2();
        let cases = [
            WeylOperator::term(&sig, &[2, 0], &[1, 1], rat_int(3)),
            WeylOperator::term(&sig, &[0, 1], &[2, 0], rat_int(-1))
                .add(&WeylOperator::term(&sig, &[1, 1], &[0, 0], rat_int(2))),
            WeylOperator::term(&sig, &[1, 2], &[2, 1], rat_int(5)),
        ];
        for p in &cases {
            for q in &cases {
                assert_eq!(p.mul(q).unwrap(), naive_mul(p, q));
            }
        }
    }

    #[test]
    fn apply_examples() {
        let sig = d2();
        // ∂_x • x^2 = 2x
        let dx = WeylOperator::d_var(&sig, 0);
        let x2 = Polynomial::var(2, 0).pow(2);
        assert_eq!(
            dx.apply_to_poly(&x2).unwrap(),
            Polynomial::var(2, 0).scalar_mul(&rat_int(2))
        );
        // Euler identity: (3x∂_x + 2y∂_y − 6) • (x^2+y^3) = 0
        let f = Polynomial::var(2, 0)
            .pow(2)
            .add(&Polynomial::var(2, 1).pow(3));
        let op = WeylOperator::term(&sig, &[1, 0], &[1, 0], rat_int(3))
            .add(&WeylOperator::term(&sig, &[0, 1], &[0, 1], rat_int(2)))
            .add(&WeylOperator::constant(&sig, rat_int(-6)));
        assert!(op.apply_to_poly(&f).unwrap().is_zero());
        // (2x∂_y) • (y + x^3 + y^2) = 2x + 4xy
        let g = Polynomial::from_terms(
            2,
            [
                (MultiIndex(vec![0, 1]), rat_int(1)),
                (MultiIndex(vec![3, 0]), rat_int(1)),
                (MultiIndex(vec![0, 2]), rat_int(1)),
            ],
        );
        let op = WeylOperator::term(&sig, &[1, 0], &[0, 1], rat_int(2));
        let want = Polynomial::from_terms(
            2,
            [
                (MultiIndex(vec![1, 0]), rat_int(2)),
                (MultiIndex(vec![1, 1]), rat_int(4)),
            ],
        );
        assert_eq!(op.apply_to_poly(&g).unwrap(), want);
    }

    #[test]
    fn ratfun_action() {
        let sig = d1();
        // ∂_x • (1/x) = −1/x^2
        let dx = WeylOperator::d_var(&sig, 0);
        let inv_x = RationalFunction::inverse_power(&Polynomial::var(1, 0), 1).unwrap();
        let got = dx.apply_to_ratfun(&inv_x).unwrap();
        let want = RationalFunction::new(
            Polynomial::constant(1, rat_int(-1)),
            Polynomial::var(1, 0).pow(2),
        )
        .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn annihilates_hyperplane_arrangement_inverse() {
        // (x∂_x + y∂_y + 3) • 1/(xy(x+y)) = 0
        let sig = d2();
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let f = x.mul(&y).mul(&x.add(&y));
        let g = RationalFunction::inverse_power(&f, 1).unwrap();
        let op = WeylOperator::term(&sig, &[1, 0], &[1, 0], rat_int(1))
            .add(&WeylOperator::term(&sig, &[0, 1], &[0, 1], rat_int(1)))
            .add(&WeylOperator::constant(&sig, rat_int(3)));
        assert!(op.apply_to_ratfun(&g).unwrap().is_zero());
    }

    #[test]
    fn annihilates_cusp_inverse() {
        // (3x^2∂_y − 4y^3∂_x) • 1/(x^3+y^4) = 0
        let sig = d2();
        let f = Polynomial::var(2, 0)
            .pow(3)
            .add(&Polynomial::var(2, 1).pow(4));
        let g = RationalFunction::inverse_power(&f, 1).unwrap();
        let op = WeylOperator::term(&sig, &[2, 0], &[0, 1], rat_int(3))
            .add(&WeylOperator::term(&sig, &[0, 3], &[1, 0], rat_int(-4)));
        assert!(op.apply_to_ratfun(&g).unwrap().is_zero());
    }

    #[test]
    fn inverse_derivative_single_and_double() {
        // f = x, β = (2): ∂^2 • (1/x) = 2/x^3
        let f = Polynomial::var(1, 0);
        let got = inverse_derivative_formula(&f, &MultiIndex(vec![2])).unwrap();
        let want = RationalFunction::new(
            Polynomial::constant(1, rat_int(2)),
            Polynomial::var(1, 0).pow(3),
        )
        .unwrap();
        assert_eq!(got, want);
        // f = xy, β = (1,1): 1/(x^2 y^2)
        let f = Polynomial::var(2, 0).mul(&Polynomial::var(2, 1));
        let got = inverse_derivative_formula(&f, &MultiIndex(vec![1, 1])).unwrap();
        let want = RationalFunction::inverse_power(
            &Polynomial::var(2, 0).mul(&Polynomial::var(2, 1)),
            2,
        )
        .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn partition_formula_equals_direct_action() {
        let corpus: Vec<Polynomial> = vec![
            Polynomial::var(2, 0),
            Polynomial::var(2, 0).mul(&Polynomial::var(2, 1)),
            Polynomial::var(2, 0).add(&Polynomial::var(2, 1)),
            Polynomial::var(2, 0)
                .pow(2)
                .add(&Polynomial::var(2, 1).pow(3)),
            Polynomial::one(2)
                .add(&Polynomial::var(2, 0))
                .add(&Polynomial::var(2, 1)),
        ];
        let sig = d2();
        for f in &corpus {
            let inv = RationalFunction::inverse_power(f, 1).unwrap();
            for b1 in 0..=3u32 {
                for b2 in 0..=(3 - b1) {
                    let beta = MultiIndex(vec![b1, b2]);
                    let mut mono = OpMono::one(&sig);
                    mono.beta = beta.clone();
                    let op = WeylOperator::from_terms(&sig, [(mono, Rational::one())]);
                    let direct = op.apply_to_ratfun(&inv).unwrap();
                    let formula = inverse_derivative_formula(f, &beta).unwrap();
                    assert_eq!(direct, formula, "f={f} beta={beta:?}");
                }
            }
        }
    }

    #[test]
    fn theta_substitution() {
        let sig = d1();
        // θ_1 ↦ x∂_x
        let theta = ThetaPolynomial(Polynomial::var(1, 0));
        assert_eq!(
            theta.to_weyl(&sig).unwrap(),
            WeylOperator::term(&sig, &[1], &[1], rat_int(1))
        );
        // θ_1 + 1 = normally ordered ∂_x x
        let theta1 = ThetaPolynomial(Polynomial::var(1, 0).add(&Polynomial::one(1)));
        let dx_x = WeylOperator::d_var(&sig, 0)
            .mul(&WeylOperator::x_var(&sig, 0))
            .unwrap();
        assert_eq!(theta1.to_weyl(&sig).unwrap(), dx_x);
        // θ_1^2 = x^2∂_x^2 + x∂_x  (weyl_mul oracle)
        let theta2 = ThetaPolynomial(Polynomial::var(1, 0).pow(2));
        let e = WeylOperator::term(&sig, &[1], &[1], rat_int(1));
        assert_eq!(theta2.to_weyl(&sig).unwrap(), e.mul(&e).unwrap());
    }

    #[test]
    fn eq_t_identity() {
        // ∂_i^m x_i^m = (θ_i+1)(θ_i+2)⋯(θ_i+m)
        let sig = d1();
        for m in 1..=4u32 {
            let lhs = WeylOperator::d_var(&sig, 0)
                .pow(m)
                .unwrap()
                .mul(&WeylOperator::x_var(&sig, 0).pow(m).unwrap())
                .unwrap();
            let mut prod = ThetaPolynomial(Polynomial::one(1));
            for k in 1..=m {
                prod = ThetaPolynomial(prod.0.mul(
                    &Polynomial::var(1, 0).add(&Polynomial::constant(1, rat_int(k as i64))),
                ));
            }
            assert_eq!(lhs, prod.to_weyl(&sig).unwrap());
        }
    }

    #[test]
    fn sigma_rename_and_substitution() {
        let sig = AlgebraSignature::weyl(1).with_shift_pair();
        // x∂_x − σ
        let op = WeylOperator::term(&sig, &[1, 0], &[1, 0], rat_int(1))
            .sub(&WeylOperator::sigma(&sig));
        let renamed = op.sigma_to_central("s").unwrap();
        let dns = AlgebraSignature::weyl(1).with_central("s");
        let want = WeylOperator::term(&dns, &[1, 0], &[1], rat_int(1))
            .sub(&WeylOperator::central(&dns, "s"));
        assert_eq!(renamed, want);
        let specialized = renamed.substitute_central("s", &rat_int(-3));
        let dn = AlgebraSignature::weyl(1);
        let want = WeylOperator::term(&dn, &[1], &[1], rat_int(1))
            .add(&WeylOperator::constant(&dn, rat_int(3)));
        assert_eq!(specialized, want);
    }
}
