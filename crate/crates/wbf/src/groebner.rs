//! Buchberger's algorithm in the (possibly homogenized or shift-extended)
//! Weyl algebra, normal forms, initial ideals in_{(−ω,ω)}(I) via the
//! homogenization route, block elimination, and Gröbner-basis
//! verification.
//!
//! Leading-monomial bookkeeping is commutative: reordering corrections are
//! always componentwise below the straight exponent sum, so they stay
//! under the leading monomial for every admissible order, and divisibility
//! of monomials is componentwise on (α, β). No pair-discarding criteria
//! are applied; the classical coprimality criterion is not valid verbatim
//! in the Weyl algebra, and at this scale reducing every S-pair is cheap.

use crate::error::{Error, Result};
use crate::order::{
    dehomogenize, homogenize, initial_form_omega, BlockSpec, GradedOrderForWeight, TermOrder,
};
use crate::poly::Rational;
use crate::weyl::{AlgebraSignature, OpMono, WeylOperator};
use num_traits::Zero;

/// Finite presentation of a left ideal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IdealPresentation {
    sig: AlgebraSignature,
    generators: Vec<WeylOperator>,
}

impl IdealPresentation {
    pub fn new(sig: &AlgebraSignature, generators: Vec<WeylOperator>) -> Result<Self> {
        let generators: Vec<WeylOperator> =
            generators.into_iter().filter(|g| !g.is_zero()).collect();
        if generators.is_empty() {
            return Err(Error::InvalidInput(
                "ideal presentation needs at least one nonzero generator".into(),
            ));
        }
        for g in &generators {
            if g.signature() != sig {
                return Err(Error::SignatureMismatch(
                    "generators must share the ideal's signature".into(),
                ));
            }
        }
        Ok(IdealPresentation {
            sig: sig.clone(),
            generators,
        })
    }

    pub fn signature(&self) -> &AlgebraSignature {
        &self.sig
    }

    pub fn generators(&self) -> &[WeylOperator] {
        &self.generators
    }
}

/// Gröbner computation budget; exceeding it is an error so callers can
/// retry larger.
#[derive(Clone, Debug)]
pub struct Budget {
    pub max_pairs: usize,
    pub max_degree: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_pairs: 10_000,
            max_degree: 60,
        }
    }
}

/// The order a Gröbner basis is taken with respect to.
#[derive(Clone, Debug)]
pub enum OrderSpec {
    Term(TermOrder),
    WeightGraded(GradedOrderForWeight),
}

#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub ideal: IdealPresentation,
    pub order: OrderSpec,
    pub elements: Vec<WeylOperator>,
    pub reduced: bool,
    term_order: TermOrder,
    leads: Vec<OpMono>,
}

impl GroebnerBasis {
    pub fn elements(&self) -> &[WeylOperator] {
        &self.elements
    }

    pub fn term_order(&self) -> &TermOrder {
        &self.term_order
    }

    /// Fully reduced normal form of P modulo this basis.
    pub fn normal_form(&self, p: &WeylOperator) -> WeylOperator {
        normal_form_impl(p, &self.elements, &self.leads, &self.term_order)
    }

    pub fn contains(&self, p: &WeylOperator) -> bool {
        self.normal_form(p).is_zero()
    }

    /// True when the basis contains a nonzero constant.
    pub fn is_unit_ideal(&self) -> bool {
        self.elements
            .iter()
            .any(|g| g.terms().all(|(m, _)| m.total_degree() == 0))
    }
}

/// Buchberger's algorithm with the normal pair-selection strategy
/// (minimal lcm in the term order). The result is the reduced, monic
/// Gröbner basis, sorted by leading monomial, hence deterministic.
pub fn buchberger(
    ideal: &IdealPresentation,
    order: &TermOrder,
    budget: &Budget,
) -> Result<GroebnerBasis> {
    if order.signature() != ideal.signature() {
        return Err(Error::SignatureMismatch(
            "order signature must match ideal signature".into(),
        ));
    }
    let mut basis: Vec<WeylOperator> = Vec::new();
    let mut leads: Vec<OpMono> = Vec::new();
    for g in ideal.generators() {
        push_element(g.primitive_part(), &mut basis, &mut leads, order);
    }

    // pending S-pairs keyed by lcm of leading monomials
    let mut pairs: Vec<(OpMono, usize, usize)> = Vec::new();
    for i in 0..basis.len() {
        for j in 0..i {
            pairs.push((leads[i].lcm(&leads[j]), j, i));
        }
    }

    let mut processed = 0usize;
    while !pairs.is_empty() {
        processed += 1;
        if processed > budget.max_pairs {
            return Err(Error::ResourceCap(format!(
                "S-pair budget {} exhausted",
                budget.max_pairs
            )));
        }
        let next = pairs
            .iter()
            .enumerate()
            .min_by(|(_, (ma, ia, ja)), (_, (mb, ib, jb))| {
                order.cmp_mono(ma, mb).then_with(|| (ia, ja).cmp(&(ib, jb)))
            })
            .map(|(idx, _)| idx)
            .unwrap();
        let (lcm, i, j) = pairs.swap_remove(next);
        let s = s_polynomial(&basis[i], &basis[j], &leads[i], &leads[j], &lcm, order)?;
        let r = normal_form_impl(&s, &basis, &leads, order);
        if r.is_zero() {
            continue;
        }
        let deg = r.terms().map(|(m, _)| m.total_degree()).max().unwrap();
        if deg > budget.max_degree {
            return Err(Error::ResourceCap(format!(
                "total degree {} exceeds budget {}",
                deg, budget.max_degree
            )));
        }
        let r = r.primitive_part();
        let k = basis.len();
        push_element(r, &mut basis, &mut leads, order);
        for m in 0..k {
            pairs.push((leads[k].lcm(&leads[m]), m, k));
        }
    }

    let (elements, leads) = reduce_basis(basis, order);
    Ok(GroebnerBasis {
        ideal: ideal.clone(),
        order: OrderSpec::Term(order.clone()),
        elements,
        reduced: true,
        term_order: order.clone(),
        leads,
    })
}

fn push_element(
    g: WeylOperator,
    basis: &mut Vec<WeylOperator>,
    leads: &mut Vec<OpMono>,
    order: &TermOrder,
) {
    if g.is_zero() {
        return;
    }
    let lm = order.leading(&g).unwrap().0.clone();
    basis.push(g);
    leads.push(lm);
}

fn s_polynomial(
    f: &WeylOperator,
    g: &WeylOperator,
    lm_f: &OpMono,
    lm_g: &OpMono,
    lcm: &OpMono,
    order: &TermOrder,
) -> Result<WeylOperator> {
    let uf = lcm.checked_div(lm_f).unwrap();
    let ug = lcm.checked_div(lm_g).unwrap();
    let lc_f = order.leading(f).unwrap().1.clone();
    let lc_g = order.leading(g).unwrap().1.clone();
    let mf = WeylOperator::term(f.signature(), &uf.alpha.0, &uf.beta.0, lc_g);
    let mg = WeylOperator::term(g.signature(), &ug.alpha.0, &ug.beta.0, lc_f);
    Ok(mf.mul(f)?.sub(&mg.mul(g)?))
}

/// Fully reduced normal form: repeatedly rewrites the order-largest term
/// divisible by some leading monomial, taking the first matching reducer
/// in basis order.
fn normal_form_impl(
    p: &WeylOperator,
    basis: &[WeylOperator],
    leads: &[OpMono],
    order: &TermOrder,
) -> WeylOperator {
    let mut r = p.clone();
    loop {
        let mut terms: Vec<(OpMono, Rational)> =
            r.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        terms.sort_by(|(a, _), (b, _)| order.cmp_mono(b, a));
        let mut hit = None;
        'outer: for (m, c) in &terms {
            for (gi, lm) in leads.iter().enumerate() {
                if lm.divides(m) {
                    hit = Some((m.clone(), c.clone(), gi));
                    break 'outer;
                }
            }
        }
        let Some((m, c, gi)) = hit else {
            return r;
        };
        let q = m.checked_div(&leads[gi]).unwrap();
        let lc = order.leading(&basis[gi]).unwrap().1.clone();
        let mono = WeylOperator::term(r.signature(), &q.alpha.0, &q.beta.0, c / lc);
        r = r.sub(&mono.mul(&basis[gi]).expect("signature match"));
    }
}

/// Inter-reduce: drop elements whose lead is divisible by another's lead,
/// tail-reduce the rest, normalize monic, sort by leading monomial.
fn reduce_basis(basis: Vec<WeylOperator>, order: &TermOrder) -> (Vec<WeylOperator>, Vec<OpMono>) {
    let mut kept: Vec<WeylOperator> = Vec::new();
    let mut kept_lms: Vec<OpMono> = Vec::new();
    'next: for g in &basis {
        let lm = order.leading(g).unwrap().0.clone();
        for other in &kept_lms {
            if other.divides(&lm) {
                continue 'next;
            }
        }
        // later elements can also supersede earlier ones
        let mut i = 0;
        while i < kept_lms.len() {
            if lm.divides(&kept_lms[i]) {
                kept.remove(i);
                kept_lms.remove(i);
            } else {
                i += 1;
            }
        }
        kept.push(g.clone());
        kept_lms.push(lm);
    }
    let mut reduced: Vec<WeylOperator> = Vec::with_capacity(kept.len());
    for i in 0..kept.len() {
        let others: Vec<WeylOperator> = kept
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let other_lms: Vec<OpMono> = others
            .iter()
            .map(|g| order.leading(g).unwrap().0.clone())
            .collect();
        let nf = normal_form_impl(&kept[i], &others, &other_lms, order);
        let lc = order.leading(&nf).unwrap().1.clone();
        reduced.push(nf.scalar_mul(&lc.recip()));
    }
    let mut indexed: Vec<(OpMono, WeylOperator)> = reduced
        .into_iter()
        .map(|g| (order.leading(&g).unwrap().0.clone(), g))
        .collect();
    indexed.sort_by(|(a, _), (b, _)| order.cmp_mono(a, b));
    indexed.into_iter().map(|(m, g)| (m, g)).fold(
        (Vec::new(), Vec::new()),
        |(mut gs, mut ms), (m, g)| {
            gs.push(g);
            ms.push(m);
            (gs, ms)
        },
    )
}

/// True iff every S-polynomial of the given set reduces to zero against
/// the set itself.
pub fn is_groebner(elements: &[WeylOperator], order: &TermOrder, budget: &Budget) -> Result<bool> {
    let elements: Vec<WeylOperator> =
        elements.iter().filter(|g| !g.is_zero()).cloned().collect();
    let leads: Vec<OpMono> = elements
        .iter()
        .map(|g| order.leading(g).unwrap().0.clone())
        .collect();
    let mut count = 0usize;
    for i in 0..elements.len() {
        for j in 0..i {
            count += 1;
            if count > budget.max_pairs {
                return Err(Error::ResourceCap("S-pair budget exhausted".into()));
            }
            let lcm = leads[i].lcm(&leads[j]);
            let s = s_polynomial(
                &elements[i],
                &elements[j],
                &leads[i],
                &leads[j],
                &lcm,
                order,
            )?;
            if !normal_form_impl(&s, &elements, &leads, order).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct InitialIdeal {
    pub ideal: IdealPresentation,
    pub unit_ideal: bool,
    pub omega: Vec<Rational>,
}

/// Generators of in_{(−ω,ω)}(I), computed the paper's way: homogenize the
/// generators, run Buchberger in D^(h) under the homogenized order of
/// <_(−ω,ω), dehomogenize, and take initial forms.
pub fn initial_ideal(
    ideal: &IdealPresentation,
    omega: &[Rational],
    budget: &Budget,
) -> Result<InitialIdeal> {
    if omega.iter().all(|w| w.is_zero()) {
        return Err(Error::ZeroWeight);
    }
    if omega.len() != ideal.signature().n() {
        return Err(Error::VariableMismatch(
            "weight length must match the number of variables".into(),
        ));
    }
    let gens_h: Vec<WeylOperator> = ideal
        .generators()
        .iter()
        .map(homogenize)
        .collect::<Result<_>>()?;
    let sig_h = gens_h[0].signature().clone();
    let order_h = TermOrder::homogenized_weight(&sig_h, omega)?;
    let ideal_h = IdealPresentation::new(&sig_h, gens_h)?;
    let gb_h = buchberger(&ideal_h, &order_h, budget)?;

    let sig = ideal.signature();
    let mut in_gens: Vec<WeylOperator> = Vec::new();
    for g in gb_h.elements() {
        let de = dehomogenize(g);
        if de.is_zero() {
            continue;
        }
        in_gens.push(initial_form_omega(&de, omega)?);
    }
    let ideal_in = IdealPresentation::new(sig, in_gens)?;
    let unit = buchberger(&ideal_in, &TermOrder::graded_lex(sig), budget)?.is_unit_ideal();
    Ok(InitialIdeal {
        ideal: ideal_in,
        unit_ideal: unit,
        omega: omega.to_vec(),
    })
}

/// Generators of I ∩ (subalgebra avoiding `block`), via a block
/// elimination order. Any block is closed here: reordering corrections
/// never introduce variables absent from the product.
pub fn eliminate(
    ideal: &IdealPresentation,
    block: &BlockSpec,
    budget: &Budget,
) -> Result<IdealPresentation> {
    if block.is_empty() {
        return Ok(ideal.clone());
    }
    let order = TermOrder::eliminating(ideal.signature(), block)?;
    let gb = buchberger(ideal, &order, budget)?;
    let kept: Vec<WeylOperator> = gb
        .elements()
        .iter()
        .filter(|g| g.terms().all(|(m, _)| !block.meets(m)))
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::InvalidInput(
            "elimination produced no generators; the intersection may be zero".into(),
        ));
    }
    IdealPresentation::new(ideal.signature(), kept)
}

/// Ideal equality via mutual normal-form membership under graded lex.
pub fn ideal_equals(
    a: &IdealPresentation,
    b: &IdealPresentation,
    budget: &Budget,
) -> Result<bool> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch(
            "ideal comparison needs a common signature".into(),
        ));
    }
    let order = TermOrder::graded_lex(a.signature());
    let gb_a = buchberger(a, &order, budget)?;
    let gb_b = buchberger(b, &order, budget)?;
    Ok(a.generators().iter().all(|g| gb_b.contains(g))
        && b.generators().iter().all(|g| gb_a.contains(g)))
}
