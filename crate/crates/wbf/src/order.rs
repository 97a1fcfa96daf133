//! Weight filtrations, weighted degrees, initial forms, admissible term
//! orders (weight-matrix orders with a fixed lex tie-break) and the
//! homogenization used to make Gröbner computation terminate for weight
//! orders with negative entries.

use crate::error::{Error, Result};
use crate::poly::Rational;
use crate::weyl::{AlgebraSignature, OpMono, WeylOperator};
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

/// A filtration weight (u, v) on the Weyl pairs, with u_i + v_i ≥ 0,
/// plus weights for central parameters (default 0). The paper's ω enters
/// as (−ω, ω).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightSpec {
    u: Vec<Rational>,
    v: Vec<Rational>,
    central: Vec<(String, Rational)>,
}

impl WeightSpec {
    pub fn new(u: Vec<Rational>, v: Vec<Rational>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::VariableMismatch(
                "u and v must have equal length".into(),
            ));
        }
        for (a, b) in u.iter().zip(&v) {
            if (a + b).is_negative() {
                return Err(Error::InvalidInput(format!(
                    "not a weight vector: u_i + v_i = {} < 0",
                    a + b
                )));
            }
        }
        Ok(WeightSpec {
            u,
            v,
            central: Vec::new(),
        })
    }

    /// The weight (−ω, ω) attached to a weight vector ω ∈ Q^n \ {0}.
    pub fn minus_omega_omega(omega: &[Rational]) -> Result<Self> {
        if omega.iter().all(|w| w.is_zero()) {
            return Err(Error::ZeroWeight);
        }
        WeightSpec::new(omega.iter().map(|w| -w.clone()).collect(), omega.to_vec())
    }

    pub fn with_central_weight(mut self, name: &str, w: Rational) -> Self {
        self.central.push((name.to_string(), w));
        self
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> &[Rational] {
        &self.u
    }

    pub fn v(&self) -> &[Rational] {
        &self.v
    }

    fn central_weight(&self, name: &str) -> Rational {
        self.central
            .iter()
            .find(|(c, _)| c == name)
            .map(|(_, w)| w.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// ⟨u, α⟩ + ⟨v, β⟩ of a single monomial.
    pub fn degree_of_mono(&self, sig: &AlgebraSignature, m: &OpMono) -> Rational {
        assert_eq!(sig.n(), self.n(), "weight length must match signature");
        let mut acc = Rational::zero();
        for i in 0..sig.n() {
            acc += &self.u[i] * Rational::from_integer(m.alpha.0[i].into());
            acc += &self.v[i] * Rational::from_integer(m.beta.0[i].into());
        }
        for (k, name) in sig.central_params().iter().enumerate() {
            let e = m.alpha.0[sig.n() + k];
            if e > 0 {
                acc += self.central_weight(name) * Rational::from_integer(e.into());
            }
        }
        acc
    }
}

/// max over terms of ⟨u, α⟩ + ⟨v, β⟩.
pub fn weighted_degree(p: &WeylOperator, w: &WeightSpec) -> Result<Rational> {
    if p.is_zero() {
        return Err(Error::ZeroOperator("weighted degree"));
    }
    Ok(p.terms()
        .map(|(m, _)| w.degree_of_mono(p.signature(), m))
        .max()
        .unwrap())
}

/// The terms of P achieving its weighted degree.
pub fn initial_form(p: &WeylOperator, w: &WeightSpec) -> Result<WeylOperator> {
    let top = weighted_degree(p, w)?;
    Ok(WeylOperator::from_terms(
        p.signature(),
        p.terms().filter_map(|(m, c)| {
            (w.degree_of_mono(p.signature(), m) == top).then(|| (m.clone(), c.clone()))
        }),
    ))
}

/// in_{(−ω,ω)}(P).
pub fn initial_form_omega(p: &WeylOperator, omega: &[Rational]) -> Result<WeylOperator> {
    initial_form(p, &WeightSpec::minus_omega_omega(omega)?)
}

/// One weight row of a matrix order, spanning all slots of a signature.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightRow {
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
}

impl WeightRow {
    fn dot(&self, m: &OpMono) -> Rational {
        let mut acc = Rational::zero();
        for (w, &e) in self.alpha.iter().zip(&m.alpha.0) {
            if e > 0 {
                acc += w * Rational::from_integer(e.into());
            }
        }
        for (w, &e) in self.beta.iter().zip(&m.beta.0) {
            if e > 0 {
                acc += w * Rational::from_integer(e.into());
            }
        }
        acc
    }
}

/// Admissible term order: weight rows compared in sequence, ties broken
/// lexicographically on (β, α) with ∂_1 > ⋯ > ∂_n > x_1 > ⋯ > x_n.
/// Admissibility (1 minimal) holds iff the first nonzero entry of every
/// slot column is positive, which is checked at construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TermOrder {
    sig: AlgebraSignature,
    rows: Vec<WeightRow>,
}

impl TermOrder {
    pub fn new(sig: &AlgebraSignature, rows: Vec<WeightRow>) -> Result<Self> {
        for row in &rows {
            if row.alpha.len() != sig.alpha_len() || row.beta.len() != sig.beta_len() {
                return Err(Error::SignatureMismatch(
                    "weight row length does not match signature".into(),
                ));
            }
        }
        let order = TermOrder {
            sig: sig.clone(),
            rows,
        };
        order.check_admissible()?;
        Ok(order)
    }

    fn check_admissible(&self) -> Result<()> {
        let a_len = self.sig.alpha_len();
        let b_len = self.sig.beta_len();
        for col in 0..a_len + b_len {
            for row in &self.rows {
                let w = if col < a_len {
                    &row.alpha[col]
                } else {
                    &row.beta[col - a_len]
                };
                if w.is_zero() {
                    continue;
                }
                if w.is_negative() {
                    return Err(Error::NonAdmissibleOrder(format!(
                        "first nonzero weight of slot {} is negative",
                        col
                    )));
                }
                break;
            }
        }
        Ok(())
    }

    /// Graded lexicographic: total degree first.
    pub fn graded_lex(sig: &AlgebraSignature) -> Self {
        let row = WeightRow {
            alpha: vec![Rational::from_integer(1.into()); sig.alpha_len()],
            beta: vec![Rational::from_integer(1.into()); sig.beta_len()],
        };
        TermOrder::new(sig, vec![row]).unwrap()
    }

    /// Single (u, v) weight row over the Weyl slots (central and shift
    /// slots get weight 0), refined by the lex tie-break.
    pub fn from_uv(sig: &AlgebraSignature, u: &[Rational], v: &[Rational]) -> Result<Self> {
        if u.len() != sig.n() || v.len() != sig.n() {
            return Err(Error::VariableMismatch(
                "(u, v) must match the number of Weyl pairs".into(),
            ));
        }
        let mut alpha = u.to_vec();
        alpha.resize(sig.alpha_len(), Rational::zero());
        let mut beta = v.to_vec();
        beta.resize(sig.beta_len(), Rational::zero());
        TermOrder::new(sig, vec![WeightRow { alpha, beta }])
    }

    /// Block elimination order: any monomial meeting the block beats any
    /// monomial avoiding it, refined by total degree then the tie-break.
    pub fn eliminating(sig: &AlgebraSignature, block: &BlockSpec) -> Result<Self> {
        let mut indicator = WeightRow {
            alpha: vec![Rational::zero(); sig.alpha_len()],
            beta: vec![Rational::zero(); sig.beta_len()],
        };
        for &slot in &block.alpha_slots {
            indicator.alpha[slot] = Rational::from_integer(1.into());
        }
        for &slot in &block.beta_slots {
            indicator.beta[slot] = Rational::from_integer(1.into());
        }
        let degree = WeightRow {
            alpha: vec![Rational::from_integer(1.into()); sig.alpha_len()],
            beta: vec![Rational::from_integer(1.into()); sig.beta_len()],
        };
        TermOrder::new(sig, vec![indicator, degree])
    }

    /// The homogenized order of <_(−ω,ω): total degree (including h),
    /// then the (−ω, ω) weight with h at 0, then the tie-break. This is a
    /// genuine term order on D^(h) for any ω.
    pub fn homogenized_weight(sig: &AlgebraSignature, omega: &[Rational]) -> Result<Self> {
        if !sig.is_homogenized() {
            return Err(Error::NonAdmissibleOrder(
                "homogenized weight order needs a homogenized signature".into(),
            ));
        }
        if omega.len() != sig.n() {
            return Err(Error::VariableMismatch(
                "weight length must match signature".into(),
            ));
        }
        let degree = WeightRow {
            alpha: vec![Rational::from_integer(1.into()); sig.alpha_len()],
            beta: vec![Rational::from_integer(1.into()); sig.beta_len()],
        };
        let mut alpha = omega.iter().map(|w| -w.clone()).collect::<Vec<_>>();
        alpha.resize(sig.alpha_len(), Rational::zero());
        let mut beta = omega.to_vec();
        beta.resize(sig.beta_len(), Rational::zero());
        TermOrder::new(sig, vec![degree, WeightRow { alpha, beta }])
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.sig
    }

    pub fn cmp_mono(&self, a: &OpMono, b: &OpMono) -> Ordering {
        for row in &self.rows {
            match row.dot(a).cmp(&row.dot(b)) {
                Ordering::Equal => {}
                other => return other,
            }
        }
        // fixed tie-break: lex on β then α
        a.beta.0.cmp(&b.beta.0).then_with(|| a.alpha.0.cmp(&b.alpha.0))
    }

    /// Leading monomial and coefficient of a nonzero operator.
    pub fn leading<'a>(&self, p: &'a WeylOperator) -> Option<(&'a OpMono, &'a Rational)> {
        p.terms().max_by(|(a, _), (b, _)| self.cmp_mono(a, b))
    }
}

/// Order used on initial ideals: compare by (−ω, ω)-degree first, ties
/// broken by an admissible refinement. Not itself a term order when ω has
/// a nonzero entry; Gröbner computation against it goes through the
/// homogenized order above.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedOrderForWeight {
    pub omega: Vec<Rational>,
    pub refinement: TermOrder,
}

impl GradedOrderForWeight {
    pub fn new(omega: Vec<Rational>, refinement: TermOrder) -> Result<Self> {
        if omega.iter().all(|w| w.is_zero()) {
            return Err(Error::ZeroWeight);
        }
        Ok(GradedOrderForWeight { omega, refinement })
    }

    pub fn cmp_mono(&self, sig: &AlgebraSignature, a: &OpMono, b: &OpMono) -> Ordering {
        let w = WeightSpec::minus_omega_omega(&self.omega).unwrap();
        w.degree_of_mono(sig, a)
            .cmp(&w.degree_of_mono(sig, b))
            .then_with(|| self.refinement.cmp_mono(a, b))
    }
}

/// Variable block for elimination, resolved to slots of a signature.
#[derive(Clone, Debug, Default)]
pub struct BlockSpec {
    pub alpha_slots: Vec<usize>,
    pub beta_slots: Vec<usize>,
}

impl BlockSpec {
    /// Resolve names like "x", "dt", "sg", "dy" against a signature.
    pub fn from_names(sig: &AlgebraSignature, names: &[&str]) -> Result<Self> {
        let mut block = BlockSpec::default();
        for name in names {
            let mut found = false;
            for i in 0..sig.alpha_len() {
                if sig.alpha_slot_name(i) == *name {
                    block.alpha_slots.push(i);
                    found = true;
                }
            }
            for i in 0..sig.beta_len() {
                if sig.beta_slot_name(i) == *name {
                    block.beta_slots.push(i);
                    found = true;
                }
            }
            if !found {
                return Err(Error::InvalidInput(format!(
                    "unknown variable {name} in elimination block"
                )));
            }
        }
        Ok(block)
    }

    pub fn is_empty(&self) -> bool {
        self.alpha_slots.is_empty() && self.beta_slots.is_empty()
    }

    pub fn meets(&self, m: &OpMono) -> bool {
        self.alpha_slots.iter().any(|&s| m.alpha.0[s] > 0)
            || self.beta_slots.iter().any(|&s| m.beta.0[s] > 0)
    }
}

/// Multiply each term by the h-power equalizing total degree.
/// The result lives in the homogenized signature; dehomogenize inverts it.
pub fn homogenize(p: &WeylOperator) -> Result<WeylOperator> {
    if p.signature().is_homogenized() {
        return Err(Error::SignatureMismatch("operator is already homogenized".into()));
    }
    if !p.signature().is_plain() {
        return Err(Error::SignatureMismatch(
            "homogenization is defined for plain D_n operators".into(),
        ));
    }
    let sig_h = p.signature().clone().homogenized();
    let h_slot = sig_h.central_slot("h").unwrap();
    if p.is_zero() {
        return Ok(WeylOperator::zero(&sig_h));
    }
    let max_deg = p.terms().map(|(m, _)| m.total_degree()).max().unwrap();
    Ok(WeylOperator::from_terms(
        &sig_h,
        p.terms().map(|(m, c)| {
            let mut alpha = m.alpha.0.clone();
            alpha.resize(sig_h.alpha_len(), 0);
            alpha[h_slot] = max_deg - m.total_degree();
            (
                OpMono {
                    alpha: crate::poly::MultiIndex(alpha),
                    beta: m.beta.clone(),
                },
                c.clone(),
            )
        }),
    ))
}

/// Substitute h = 1, back to the plain signature.
pub fn dehomogenize(p: &WeylOperator) -> WeylOperator {
    p.substitute_central("h", &Rational::from_integer(1.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, rat_int};
    use crate::weyl::WeylOperator;

    fn omega(vals: &[i64]) -> Vec<Rational> {
        vals.iter().map(|&v| rat_int(v)).collect()
    }

    #[test]
    fn weighted_degree_examples() {
        let sig = AlgebraSignature::weyl(2);
        // x∂_x balanced under (−e, e)
        let p = WeylOperator::term(&sig, &[1, 0], &[1, 0], rat_int(1));
        let w = WeightSpec::minus_omega_omega(&omega(&[1, 1])).unwrap();
        assert_eq!(weighted_degree(&p, &w).unwrap(), rat_int(0));
        // ∂_x^2 has degree 2ω_1
        let p = WeylOperator::term(&sig, &[0, 0], &[2, 0], rat_int(1));
        let w = WeightSpec::minus_omega_omega(&omega(&[3, 5])).unwrap();
        assert_eq!(weighted_degree(&p, &w).unwrap(), rat_int(6));
        // 3x^2∂_y − 4y^3∂_x at ω = (1,1): max(−2+1, −3+1) = −1
        let p = WeylOperator::term(&sig, &[2, 0], &[0, 1], rat_int(3))
            .add(&WeylOperator::term(&sig, &[0, 3], &[1, 0], rat_int(-4)));
        let w = WeightSpec::minus_omega_omega(&omega(&[1, 1])).unwrap();
        assert_eq!(weighted_degree(&p, &w).unwrap(), rat_int(-1));
        // and its initial form is 3x^2∂_y
        let init = initial_form(&p, &w).unwrap();
        assert_eq!(
            init,
            WeylOperator::term(&sig, &[2, 0], &[0, 1], rat_int(3))
        );
    }

    #[test]
    fn weighted_degree_additive_under_mul() {
        let sig = AlgebraSignature::weyl(2);
        let p = WeylOperator::term(&sig, &[1, 0], &[0, 1], rat_int(2))
            .add(&WeylOperator::term(&sig, &[0, 0], &[1, 0], rat_int(1)));
        let q = WeylOperator::term(&sig, &[0, 2], &[1, 1], rat_int(1))
            .add(&WeylOperator::constant(&sig, rat_int(5)));
        let w = WeightSpec::minus_omega_omega(&omega(&[2, -1])).unwrap();
        let dp = weighted_degree(&p, &w).unwrap();
        let dq = weighted_degree(&q, &w).unwrap();
        let pq = p.mul(&q).unwrap();
        assert_eq!(weighted_degree(&pq, &w).unwrap(), dp + dq);
    }

    #[test]
    fn initial_form_multiplicative() {
        let sig = AlgebraSignature::weyl(2);
        let p = WeylOperator::term(&sig, &[1, 0], &[1, 0], rat_int(1))
            .add(&WeylOperator::constant(&sig, rat_int(-6)));
        let q = WeylOperator::term(&sig, &[0, 3], &[1, 0], rat_int(-4))
            .add(&WeylOperator::term(&sig, &[2, 0], &[0, 1], rat_int(3)));
        let w = WeightSpec::minus_omega_omega(&omega(&[1, -2])).unwrap();
        let lhs = initial_form(&p.mul(&q).unwrap(), &w).unwrap();
        let rhs = initial_form(&p, &w)
            .unwrap()
            .mul(&initial_form(&q, &w).unwrap())
            .unwrap();
        // in the associated graded the product of initial forms survives
        assert_eq!(lhs, initial_form(&rhs, &w).unwrap());
    }

    #[test]
    fn negative_uv_rejected() {
        let sig = AlgebraSignature::weyl(1);
        assert!(TermOrder::from_uv(&sig, &[rat_int(-1)], &[rat_int(0)]).is_err());
        assert!(TermOrder::from_uv(&sig, &[rat_int(1)], &[rat_int(0)]).is_ok());
        assert!(WeightSpec::new(vec![rat_int(-2)], vec![rat_int(1)]).is_err());
        assert!(WeightSpec::new(vec![rat(-1, 2)], vec![rat(1, 2)]).is_ok());
    }

    #[test]
    fn term_order_total_and_multiplicative() {
        let sig = AlgebraSignature::weyl(2);
        let ord = TermOrder::graded_lex(&sig);
        let mk = |a: &[u32], b: &[u32]| OpMono {
            alpha: crate::poly::MultiIndex(a.to_vec()),
            beta: crate::poly::MultiIndex(b.to_vec()),
        };
        let m1 = mk(&[1, 0], &[0, 0]);
        let m2 = mk(&[0, 1], &[0, 0]);
        let m3 = mk(&[0, 0], &[1, 0]);
        assert_ne!(ord.cmp_mono(&m1, &m2), Ordering::Equal);
        // multiplicativity
        for a in [&m1, &m2, &m3] {
            for b in [&m1, &m2, &m3] {
                for t in [&m1, &m2, &m3] {
                    assert_eq!(
                        ord.cmp_mono(a, b),
                        ord.cmp_mono(&a.mul(t), &b.mul(t))
                    );
                }
            }
        }
        // 1 minimal
        let one = mk(&[0, 0], &[0, 0]);
        for m in [&m1, &m2, &m3] {
            assert_eq!(ord.cmp_mono(&one, m), Ordering::Less);
        }
    }

    #[test]
    fn homogenize_examples() {
        let sig = AlgebraSignature::weyl(1);
        // x∂_x + 1 → x∂_x + h^2
        let p = WeylOperator::term(&sig, &[1], &[1], rat_int(1))
            .add(&WeylOperator::one(&sig));
        let ph = homogenize(&p).unwrap();
        let sig_h = sig.clone().homogenized();
        let want = WeylOperator::term(&sig_h, &[1, 0], &[1], rat_int(1))
            .add(&WeylOperator::term(&sig_h, &[0, 2], &[0], rat_int(1)));
        assert_eq!(ph, want);
        assert_eq!(dehomogenize(&ph), p);
        // already homogeneous stays put (up to the embedding)
        let q = WeylOperator::term(&sig, &[1], &[1], rat_int(2))
            .add(&WeylOperator::term(&sig, &[2], &[0], rat_int(-1)));
        let qh = homogenize(&q).unwrap();
        assert!(qh.terms().all(|(m, _)| m.alpha.0[1] == 0));
    }

    #[test]
    fn homogenized_cusp_euler() {
        // Ē_ℓ for (p,q,d) = (4,6,2), ℓ = −1: q1 x∂_x + p1 y∂_y − ℓ(pq/d) h^2
        let sig = AlgebraSignature::weyl(2);
        let e = WeylOperator::term(&sig, &[1, 0], &[1, 0], rat_int(3))
            .add(&WeylOperator::term(&sig, &[0, 1], &[0, 1], rat_int(2)))
            .add(&WeylOperator::constant(&sig, rat_int(12)));
        let eh = homogenize(&e).unwrap();
        let sig_h = sig.clone().homogenized();
        let want = WeylOperator::term(&sig_h, &[1, 0, 0], &[1, 0], rat_int(3))
            .add(&WeylOperator::term(&sig_h, &[0, 1, 0], &[0, 1], rat_int(2)))
            .add(&WeylOperator::term(&sig_h, &[0, 0, 2], &[0, 0], rat_int(12)));
        assert_eq!(eh, want);
    }
}
