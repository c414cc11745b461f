//! The two presentations of the algebra and the identity suites that tie
//! them down.
//!
//! This module builds, for a fixed [`CartanData`]:
//!
//! * the Chevalley–Serre relations on `E_i, F_i` (all affine nodes) and a
//!   completed rewrite table for them ([`chevalley_rules`]);
//! * the loop (Drinfeld) relations on `x^±_{i,k}, h_{i,l}, ψ_{i,m}, φ_{i,−m}`
//!   and a windowed rewrite table for them ([`drinfeld_rules`]), including
//!   the degree-three Serre layer for off-diagonal node pairs;
//! * the algebra maps: the `E↔F` swap `Φ`, the anti-automorphism `Ω`, the
//!   comultiplication, antipode, and counit of the Hopf structure on the
//!   Chevalley alphabet;
//! * the bracket elements of the integral form (`[K_j; s, n]`, `[D; s, n]`,
//!   `[γ; s]_i`, `[γψ_i; k, l]`) and their commutation identities;
//! * seven verification suites, each returning a list of named
//!   [`Instance`] results: `chevalley`, `drinfeld`, `psix2`, `arelns`,
//!   `formal_sums`, `hopf`, and `aform_triangular`.
//!
//! Every check is exact over `ℚ(q^{1/2})`: an identity passes only when the
//! difference of its two sides reduces to the zero element. A rewriting
//! budget exhaustion is reported as a failure (inconclusive), never as a
//! pass.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{
    nf, order_key, Atom, Element, Element2, Gen, RuleSet, Strategy, Word,
};
use crate::algebra::{complete, ruleset_from_relations};
use crate::coeff::{q_binom, q_fact, q_int, rat, RatFunc};
use crate::rootsystem::{bilinear, CartanData};

/// Default per-instance rewriting budget for the suites (a guardrail, not a
/// tuning knob: instances at shipped bounds stay far below it).
pub const SUITE_BUDGET: u64 = 200_000_000;

// ---------------------------------------------------------------------------
// Scalar and atom helpers
// ---------------------------------------------------------------------------

/// `q_i − q_i^{−1}` for `q_i = q^d`.
pub fn q_diff(d: i64) -> RatFunc {
    &RatFunc::qi_pow(1, d) - &RatFunc::qi_pow(-1, d)
}

/// The balanced integer `[n]_{q_i}` as a rational function.
pub fn q_int_rf(n: i64, d: i64) -> RatFunc {
    RatFunc::from_poly(q_int(n, d))
}

/// The balanced binomial `[n r]_{q_i}` as a rational function.
pub fn q_binom_rf(n: i64, r: i64, d: i64) -> RatFunc {
    RatFunc::from_poly(q_binom(n, r, d))
}

/// The atom `K_{α_j}` for any node `j` (node 0 folds through `−θ + δ`).
pub fn k_atom(data: &CartanData, j: usize) -> Atom {
    Atom::k_root(&data.simple_root(j))
}

/// The atom `γ^{s/2}` (`s` counts half-powers of the central element).
pub fn gamma_half(data: &CartanData, s: i64) -> Atom {
    Atom {
        k: vec![0; data.n],
        r: 0,
        s,
    }
}

/// The atom `D^r`.
pub fn d_atom(data: &CartanData, r: i64) -> Atom {
    Atom {
        k: vec![0; data.n],
        r,
        s: 0,
    }
}

/// `[a, b] = ab − ba`.
pub fn commutator(data: &CartanData, a: &Element, b: &Element) -> Element {
    a.mul(data, b).sub(&b.mul(data, a))
}

fn ge(data: &CartanData, g: Gen) -> Element {
    Element::gen(data, g)
}

fn at(a: Atom) -> Element {
    Element::atom(a)
}

// ---------------------------------------------------------------------------
// Divided powers and the Chevalley–Serre relations
// ---------------------------------------------------------------------------

/// `E_i^{(s)} = E_i^s / [s]_i!`.
pub fn divided_power_e(data: &CartanData, i: usize, s: u32) -> Element {
    let pw = ge(data, Gen::E(i)).pow(data, s);
    pw.scale(&RatFunc::from_poly(q_fact(s as i64, data.d[i])).inv())
}

/// `F_i^{(s)} = F_i^s / [s]_i!`.
pub fn divided_power_f(data: &CartanData, i: usize, s: u32) -> Element {
    let pw = ge(data, Gen::F(i)).pow(data, s);
    pw.scale(&RatFunc::from_poly(q_fact(s as i64, data.d[i])).inv())
}

/// `E_i F_j − F_j E_i − δ_{ij}(K_i − K_i^{−1})/(q_i − q_i^{−1})`.
pub fn chevalley_ef_relation(data: &CartanData, i: usize, j: usize) -> Element {
    let mut rel = commutator(data, &ge(data, Gen::E(i)), &ge(data, Gen::F(j)));
    if i == j {
        let ki = at(k_atom(data, i));
        let ki_inv = at(k_atom(data, i).inverse());
        rel = rel.sub(&ki.sub(&ki_inv).scale(&q_diff(data.d[i]).inv()));
    }
    rel
}

/// The quantum Serre relation for a node pair `i ≠ j`:
/// `Σ_{s=0}^{1−a_ij} (−1)^s X_i^{(1−a_ij−s)} X_j X_i^{(s)}` with `X = E` when
/// `raising` and `X = F` otherwise.
pub fn chevalley_serre_relation(
    data: &CartanData,
    i: usize,
    j: usize,
    raising: bool,
) -> Element {
    assert!(i != j, "the Serre relation needs two distinct nodes");
    let m = 1 - data.a[i][j];
    let mut rel = Element::zero();
    for s in 0..=m {
        let (outer, inner) = ((m - s) as u32, s as u32);
        let (left, mid, right) = if raising {
            (
                divided_power_e(data, i, outer),
                ge(data, Gen::E(j)),
                divided_power_e(data, i, inner),
            )
        } else {
            (
                divided_power_f(data, i, outer),
                ge(data, Gen::F(j)),
                divided_power_f(data, i, inner),
            )
        };
        let term = Element::product(data, &[left, mid, right]);
        rel = if s % 2 == 0 {
            rel.add(&term)
        } else {
            rel.sub(&term)
        };
    }
    rel
}

/// All defining relations of the Chevalley–Serre presentation that involve
/// letters (the invertible generators are folded into atoms and need no
/// relations of their own).
pub fn chevalley_relations(data: &CartanData) -> Vec<Element> {
    let nodes = data.n + 1;
    let mut rels = Vec::new();
    for i in 0..nodes {
        for j in 0..nodes {
            rels.push(chevalley_ef_relation(data, i, j));
        }
    }
    for i in 0..nodes {
        for j in 0..nodes {
            if i != j {
                rels.push(chevalley_serre_relation(data, i, j, true));
                rels.push(chevalley_serre_relation(data, i, j, false));
            }
        }
    }
    rels
}

/// Reduced rewrite table for the Chevalley–Serre presentation, completed to
/// a rank-dependent word length so that the critical pairs of that length
/// all resolve.
pub fn chevalley_rules(data: &CartanData) -> Result<RuleSet, String> {
    let mut rules = ruleset_from_relations(data, &chevalley_relations(data), i64::MAX)?;
    let (max_len, rounds) = if data.n <= 1 { (8, 16) } else { (6, 12) };
    complete(&mut rules, max_len, rounds, 200_000)?;
    Ok(rules)
}

// ---------------------------------------------------------------------------
// ψ/φ symbols and their expansions into loop Cartan generators
// ---------------------------------------------------------------------------

/// `ψ_{i,m}` as an element: zero for `m < 0`, the atom `K_i` for `m = 0`, a
/// single letter otherwise.
pub fn psi_element(data: &CartanData, i: usize, m: i64) -> Element {
    if m < 0 {
        Element::zero()
    } else if m == 0 {
        at(k_atom(data, i))
    } else {
        ge(data, Gen::Psi(i, m))
    }
}

/// `φ_{i,m}` as an element: zero for `m > 0`, the atom `K_i^{−1}` for
/// `m = 0`, a single letter otherwise.
pub fn phi_element(data: &CartanData, i: usize, m: i64) -> Element {
    if m > 0 {
        Element::zero()
    } else if m == 0 {
        at(k_atom(data, i).inverse())
    } else {
        ge(data, Gen::Phi(i, m))
    }
}

/// All multisets of positive parts summing to `m`, as `(part, multiplicity)`
/// pairs with parts strictly ascending.
fn partitions(m: i64) -> Vec<Vec<(i64, u32)>> {
    fn rec(remaining: i64, min_part: i64, cur: &mut Vec<(i64, u32)>, out: &mut Vec<Vec<(i64, u32)>>) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        for part in min_part..=remaining {
            let max_mult = remaining / part;
            for mult in 1..=max_mult {
                cur.push((part, mult as u32));
                rec(remaining - part * mult, part + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(m, 1, &mut Vec::new(), &mut out);
    out
}

fn factorial_rat(n: u32) -> RatFunc {
    let mut acc = rat(1, 1);
    for k in 2..=(n as i64) {
        acc *= rat(k, 1);
    }
    RatFunc::from_rat(acc)
}

/// The expansion of `ψ_{i,m}` (`m ≥ 1`) as `K_i` times a polynomial in the
/// `h_{i,l}` (`l > 0`): the coefficient of `z^m` in
/// `K_i exp((q_i−q_i^{−1}) Σ_{l>0} h_{i,l} z^l)`.
pub fn psi_expansion(data: &CartanData, i: usize, m: i64) -> Element {
    assert!(m >= 1);
    let qd = q_diff(data.d[i]);
    let mut out = Element::zero();
    for lam in partitions(m) {
        let mut letters = Vec::new();
        let mut coeff = RatFunc::one();
        for &(part, mult) in &lam {
            for _ in 0..mult {
                letters.push(Gen::H(i, part));
            }
            let mut pw = RatFunc::one();
            for _ in 0..mult {
                pw = &pw * &qd;
            }
            coeff = &(&coeff * &pw) / &factorial_rat(mult);
        }
        out.add_term(
            Word {
                letters,
                atom: k_atom(data, i),
            },
            coeff,
        );
    }
    out
}

/// The expansion of `φ_{i,m}` (`m ≤ −1`) as `K_i^{−1}` times a polynomial in
/// the `h_{i,−l}` (`l > 0`): the coefficient of `z^{−m}` in
/// `K_i^{−1} exp(−(q_i−q_i^{−1}) Σ_{l>0} h_{i,−l} z^l)`.
pub fn phi_expansion(data: &CartanData, i: usize, m: i64) -> Element {
    assert!(m <= -1);
    let qd = q_diff(data.d[i]);
    let mut out = Element::zero();
    for lam in partitions(-m) {
        let mut letters = Vec::new();
        let mut coeff = RatFunc::one();
        for &(part, mult) in &lam {
            for _ in 0..mult {
                letters.push(Gen::H(i, -part));
            }
            let mut pw = RatFunc::one();
            for _ in 0..mult {
                pw = (&pw * &qd).neg_ref();
            }
            coeff = &(&coeff * &pw) / &factorial_rat(mult);
        }
        out.add_term(
            Word {
                letters,
                atom: k_atom(data, i).inverse(),
            },
            coeff,
        );
    }
    out
}

trait NegRef {
    fn neg_ref(&self) -> Self;
}

impl NegRef for RatFunc {
    fn neg_ref(&self) -> RatFunc {
        -self
    }
}

/// `ψ_{i,m} − (its h-expansion)`, used as a defining relation.
pub fn psi_expansion_relation(data: &CartanData, i: usize, m: i64) -> Element {
    psi_element(data, i, m).sub(&psi_expansion(data, i, m))
}

/// `φ_{i,m} − (its h-expansion)`, used as a defining relation.
pub fn phi_expansion_relation(data: &CartanData, i: usize, m: i64) -> Element {
    phi_element(data, i, m).sub(&phi_expansion(data, i, m))
}

// ---------------------------------------------------------------------------
// The integral-form bracket elements
// ---------------------------------------------------------------------------

/// `[γ; s]_i = (γ^s − γ^{−s})/(q_i − q_i^{−1})`.
pub fn lusztig_gamma(data: &CartanData, i: usize, s: i64) -> Element {
    let num = at(gamma_half(data, 2 * s)).sub(&at(gamma_half(data, -2 * s)));
    num.scale(&q_diff(data.d[i]).inv())
}

/// `[γψ_i; k, l] = (γ^{(k−l)/2} ψ_{i,k+l} − γ^{(l−k)/2} φ_{i,k+l}) / (q_i − q_i^{−1})`.
pub fn lusztig_gamma_psi(data: &CartanData, i: usize, k: i64, l: i64) -> Element {
    let t1 = at(gamma_half(data, k - l)).mul(data, &psi_element(data, i, k + l));
    let t2 = at(gamma_half(data, l - k)).mul(data, &phi_element(data, i, k + l));
    t1.sub(&t2).scale(&q_diff(data.d[i]).inv())
}

/// `[K_j; s, n] = Π_{r=1}^n (K_j q_j^{s−r+1} − K_j^{−1} q_j^{−(s−r+1)})/(q_j^r − q_j^{−r})`.
pub fn lusztig_k(data: &CartanData, j: usize, s: i64, n: i64) -> Element {
    let d = data.d[j];
    let mut out = Element::one(data);
    for r in 1..=n {
        let e = s - r + 1;
        let num = at(k_atom(data, j))
            .scale(&RatFunc::qi_pow(e, d))
            .sub(&at(k_atom(data, j).inverse()).scale(&RatFunc::qi_pow(-e, d)));
        let den = &RatFunc::qi_pow(r, d) - &RatFunc::qi_pow(-r, d);
        out = out.mul(data, &num.scale(&den.inv()));
    }
    out
}

/// `[D; s, n] = Π_{r=1}^n (D q_0^{s−r+1} − D^{−1} q_0^{−(s−r+1)})/(q_0^r − q_0^{−r})`
/// where `q_0 = q^{d_0}`.
pub fn lusztig_d(data: &CartanData, s: i64, n: i64) -> Element {
    let d = data.d[0];
    let mut out = Element::one(data);
    for r in 1..=n {
        let e = s - r + 1;
        let num = at(d_atom(data, 1))
            .scale(&RatFunc::qi_pow(e, d))
            .sub(&at(d_atom(data, -1)).scale(&RatFunc::qi_pow(-e, d)));
        let den = &RatFunc::qi_pow(r, d) - &RatFunc::qi_pow(-r, d);
        out = out.mul(data, &num.scale(&den.inv()));
    }
    out
}

// ---------------------------------------------------------------------------
// Loop-presentation relations
// ---------------------------------------------------------------------------

/// `[h_{ik}, h_{jl}] − δ_{k,−l} (1/k)[k·a_ij]_i (γ^k − γ^{−k})/(q_j − q_j^{−1})`.
pub fn hs_relation(data: &CartanData, i: usize, k: i64, j: usize, l: i64) -> Element {
    assert!(k != 0 && l != 0);
    let mut rel = commutator(data, &ge(data, Gen::H(i, k)), &ge(data, Gen::H(j, l)));
    if k == -l {
        let c = &(&q_int_rf(k * data.a[i][j], data.d[i]) * &RatFunc::from_rat(rat(1, k)))
            / &q_diff(data.d[j]);
        let central = at(gamma_half(data, 2 * k)).sub(&at(gamma_half(data, -2 * k)));
        rel = rel.sub(&central.scale(&c));
    }
    rel
}

/// `[h_{ik}, x^±_{jl}] ∓ (1/k)[k·a_ij]_i γ^{∓|k|/2} x^±_{j,k+l}`.
pub fn hx_relation(
    data: &CartanData,
    i: usize,
    k: i64,
    j: usize,
    l: i64,
    raising: bool,
) -> Element {
    assert!(k != 0);
    let x = if raising {
        Gen::Xp(j, l)
    } else {
        Gen::Xm(j, l)
    };
    let rel = commutator(data, &ge(data, Gen::H(i, k)), &ge(data, x));
    let mut c = &q_int_rf(k * data.a[i][j], data.d[i]) * &RatFunc::from_rat(rat(1, k));
    if !raising {
        c = -&c;
    }
    let (s, shifted) = if raising {
        (-k.abs(), Gen::Xp(j, k + l))
    } else {
        (k.abs(), Gen::Xm(j, k + l))
    };
    let tail = at(gamma_half(data, s)).mul(data, &ge(data, shifted)).scale(&c);
    rel.sub(&tail)
}

/// The quadratic straightening relation for two like-sign loop generators:
/// `x_{i,k+1} x_{jl} − q^{±(α_i|α_j)} x_{jl} x_{i,k+1} − q^{±(α_i|α_j)} x_{ik} x_{j,l+1} + x_{j,l+1} x_{ik}`.
pub fn xx_relation(
    data: &CartanData,
    i: usize,
    k: i64,
    j: usize,
    l: i64,
    raising: bool,
) -> Element {
    let pairing = bilinear(data, &data.simple_root(i), &data.simple_root(j));
    let qc = RatFunc::q_pow(if raising { pairing } else { -pairing });
    let x = |node: usize, m: i64| {
        if raising {
            ge(data, Gen::Xp(node, m))
        } else {
            ge(data, Gen::Xm(node, m))
        }
    };
    let t1 = x(i, k + 1).mul(data, &x(j, l));
    let t2 = x(j, l).mul(data, &x(i, k + 1)).scale(&qc);
    let t3 = x(i, k).mul(data, &x(j, l + 1)).scale(&qc);
    let t4 = x(j, l + 1).mul(data, &x(i, k));
    t1.sub(&t2).sub(&t3).add(&t4)
}

/// `[x⁺_{ik}, x⁻_{jl}] − δ_ij [γψ_i; k, l]`.
pub fn xpm_relation(data: &CartanData, i: usize, k: i64, j: usize, l: i64) -> Element {
    let mut rel = commutator(data, &ge(data, Gen::Xp(i, k)), &ge(data, Gen::Xm(j, l)));
    if i == j {
        rel = rel.sub(&lusztig_gamma_psi(data, i, k, l));
    }
    rel
}

fn permutations(modes: &[i64]) -> Vec<Vec<i64>> {
    if modes.len() <= 1 {
        return vec![modes.to_vec()];
    }
    let mut out = Vec::new();
    for p in 0..modes.len() {
        let mut rest = modes.to_vec();
        let head = rest.remove(p);
        for mut tail in permutations(&rest) {
            let mut v = vec![head];
            v.append(&mut tail);
            out.push(v);
        }
    }
    out
}

/// The degree-`(1−a_ij)+1` Serre relation of the loop presentation for
/// `i ≠ j`: the symmetrization over `modes` of
/// `Σ_{r=0}^{n} (−1)^r [n r]_{q_i} x_{i,k_1}⋯x_{i,k_r} x_{j,l} x_{i,k_{r+1}}⋯x_{i,k_n}`
/// with `n = 1 − a_ij = modes.len()`.
pub fn loop_serre_relation(
    data: &CartanData,
    i: usize,
    j: usize,
    modes: &[i64],
    l: i64,
    raising: bool,
) -> Element {
    assert!(i != j);
    let n = modes.len() as i64;
    assert_eq!(n, 1 - data.a[i][j], "mode count must be 1 − a_ij");
    let x = |node: usize, m: i64| {
        if raising {
            Gen::Xp(node, m)
        } else {
            Gen::Xm(node, m)
        }
    };
    let mut rel = Element::zero();
    for perm in permutations(modes) {
        for r in 0..=n {
            let mut letters = Vec::new();
            for &m in &perm[..r as usize] {
                letters.push(x(i, m));
            }
            letters.push(x(j, l));
            for &m in &perm[r as usize..] {
                letters.push(x(i, m));
            }
            let mut c = q_binom_rf(n, r, data.d[i]);
            if r % 2 == 1 {
                c = -&c;
            }
            rel.add_term(
                Word {
                    letters,
                    atom: Atom::identity(data.n),
                },
                c,
            );
        }
    }
    rel
}

/// All quadratic-layer loop relations whose letters and produced letters fit
/// inside the mode window `bound`.
pub fn drinfeld_pair_relations(data: &CartanData, bound: i64) -> Vec<Element> {
    let n = data.n;
    let mut rels = Vec::new();
    let modes_nonzero: Vec<i64> = (-bound..=bound).filter(|&k| k != 0).collect();
    // Loop Cartan brackets, deduplicated: the (i,k)↔(j,l) swap negates the
    // relation.
    for i in 1..=n {
        for j in 1..=n {
            for &k in &modes_nonzero {
                for &l in &modes_nonzero {
                    if (i, k) < (j, l) {
                        rels.push(hs_relation(data, i, k, j, l));
                    }
                }
            }
        }
    }
    // ψ/φ expansions.
    for i in 1..=n {
        for m in 1..=bound {
            rels.push(psi_expansion_relation(data, i, m));
            rels.push(phi_expansion_relation(data, i, -m));
        }
    }
    // Cartan–loop crossings; the produced mode k+l must stay in the window.
    for i in 1..=n {
        for j in 1..=n {
            for &k in &modes_nonzero {
                for l in -bound..=bound {
                    if (k + l).abs() <= bound {
                        rels.push(hx_relation(data, i, k, j, l, true));
                        rels.push(hx_relation(data, i, k, j, l, false));
                    }
                }
            }
        }
    }
    // Like-sign straightening, deduplicated: the relation is symmetric under
    // the (i,k)↔(j,l) swap.
    for i in 1..=n {
        for j in 1..=n {
            for k in -bound..bound {
                for l in -bound..bound {
                    if (i, k) <= (j, l) {
                        rels.push(xx_relation(data, i, k, j, l, true));
                        rels.push(xx_relation(data, i, k, j, l, false));
                    }
                }
            }
        }
    }
    // Mixed-sign brackets; for i = j the right-hand ψ/φ mode must stay in the
    // window.
    for i in 1..=n {
        for j in 1..=n {
            for k in -bound..=bound {
                for l in -bound..=bound {
                    if i != j || (k + l).abs() <= bound {
                        rels.push(xpm_relation(data, i, k, j, l));
                    }
                }
            }
        }
    }
    rels
}

// ---------------------------------------------------------------------------
// Memoized normalizer for like-sign x-words (the degree-three layer)
// ---------------------------------------------------------------------------

/// A memoized normal-form computer restricted to words whose letters are all
/// raising or all lowering loop generators and whose rules keep them that way
/// (atom-free right-hand sides). Words of this shape are rewritten only by
/// the like-sign straightening rules, so results can be cached per letter
/// sequence and shared across thousands of relation instances.
struct XMemo {
    cache: BTreeMap<Vec<Gen>, Element>,
}

impl XMemo {
    fn new() -> XMemo {
        XMemo {
            cache: BTreeMap::new(),
        }
    }

    fn nf_letters(&mut self, rules: &RuleSet, letters: &[Gen]) -> Result<Element, String> {
        if let Some(e) = self.cache.get(letters) {
            return Ok(e.clone());
        }
        // Find the leftmost, shortest redex.
        let mut found: Option<(usize, usize)> = None;
        'scan: for start in 0..letters.len() {
            for end in (start + 1)..=letters.len() {
                if rules.rules.contains_key(&letters[start..end]) {
                    found = Some((start, end));
                    break 'scan;
                }
            }
        }
        let Some((start, end)) = found else {
            let mut e = Element::zero();
            e.add_term(
                Word {
                    letters: letters.to_vec(),
                    atom: Atom::identity(rules.data.n),
                },
                RatFunc::one(),
            );
            self.cache.insert(letters.to_vec(), e.clone());
            return Ok(e);
        };
        let rhs = rules.rules[&letters[start..end]].clone();
        let mut out = Element::zero();
        for (w, c) in &rhs.terms {
            if !w.atom.is_identity() {
                return Err(String::from(
                    "memoized x-normalizer hit a rule with an atom-bearing right-hand side",
                ));
            }
            let mut glued: Vec<Gen> = Vec::with_capacity(letters.len() - (end - start) + w.letters.len());
            glued.extend_from_slice(&letters[..start]);
            glued.extend_from_slice(&w.letters);
            glued.extend_from_slice(&letters[end..]);
            let sub = self.nf_letters(rules, &glued)?;
            out = out.add(&sub.scale(c));
        }
        self.cache.insert(letters.to_vec(), out.clone());
        Ok(out)
    }

    fn nf_element(&mut self, rules: &RuleSet, e: &Element) -> Result<Element, String> {
        let mut out = Element::zero();
        for (w, c) in &e.terms {
            if !w.atom.is_identity() {
                return Err(String::from(
                    "memoized x-normalizer expects atom-free words",
                ));
            }
            let sub = self.nf_letters(rules, &w.letters)?;
            out = out.add(&sub.scale(c));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Sparse echelon pass for the degree-three layer
// ---------------------------------------------------------------------------

fn top_word_of(e: &Element) -> &Word {
    e.terms
        .keys()
        .max_by(|a, b| (order_key(&a.letters), *a).cmp(&(order_key(&b.letters), *b)))
        .expect("nonzero element")
}

/// Reduces a family of already weight-homogeneous, pair-normalized relations
/// to an inter-reduced set of rewrite rules by sparse Gaussian elimination
/// over whole words. The relations must be atom-free (which the like-sign
/// layers are); relations in different weight components never interact, so
/// elimination runs per component implicitly through the word index.
fn sparse_rules(relations: Vec<Element>) -> Result<Vec<(Vec<Gen>, Element)>, String> {
    // pivot word → inter-reduced relation with that pivot at coefficient 1
    let mut basis: Vec<Element> = Vec::new();
    let mut pivot_of: BTreeMap<Word, usize> = BTreeMap::new();
    for rel in relations {
        let mut cur = rel;
        loop {
            // One pass: subtract every basis relation whose pivot occurs in
            // `cur`. Basis relations are inter-reduced, so the subtraction
            // introduces no new pivot words.
            let hits: Vec<(Word, RatFunc)> = cur
                .terms
                .iter()
                .filter(|(w, _)| pivot_of.contains_key(*w))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect();
            if hits.is_empty() {
                break;
            }
            for (w, c) in hits {
                let idx = pivot_of[&w];
                cur = cur.sub(&basis[idx].scale(&c));
            }
        }
        if cur.is_zero() {
            continue;
        }
        let pivot = top_word_of(&cur).clone();
        if pivot.letters.is_empty() {
            return Err(String::from(
                "relations imply a vanishing unit combination (letter-free pivot)",
            ));
        }
        let lead_coeff = cur.terms[&pivot].clone();
        cur = cur.scale(&lead_coeff.inv());
        // Back-substitute into the existing basis.
        for idx in 0..basis.len() {
            let hit = basis[idx].terms.get(&pivot).cloned();
            if let Some(c) = hit {
                basis[idx] = basis[idx].sub(&cur.scale(&c));
            }
        }
        pivot_of.insert(pivot, basis.len());
        basis.push(cur);
    }
    let mut out = Vec::new();
    for (pivot, idx) in pivot_of {
        let mut rhs = basis[idx].clone();
        rhs.terms.remove(&pivot);
        if !pivot.atom.is_identity() {
            return Err(String::from("sparse elimination expects atom-free pivots"));
        }
        out.push((pivot.letters, rhs.neg()));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The loop-presentation rule table
// ---------------------------------------------------------------------------

/// Reduced rewrite table for the loop presentation with letter modes capped
/// at `bound`. The degree-three Serre layer is instantiated with modes capped
/// at `cubic_cap` (so every relation whose modes lie within `cubic_cap`
/// reduces to zero under the table).
pub fn drinfeld_rules_with(
    data: &CartanData,
    bound: i64,
    cubic_cap: i64,
) -> Result<RuleSet, String> {
    let mut rules = ruleset_from_relations(data, &drinfeld_pair_relations(data, bound), bound)?;
    if data.n >= 2 {
        let mut memo = XMemo::new();
        let mut residuals = Vec::new();
        for i in 1..=data.n {
            for j in 1..=data.n {
                if i == j {
                    continue;
                }
                let n = 1 - data.a[i][j];
                for raising in [true, false] {
                    match n {
                        1 => {
                            // a_ij = 0: plain commutation of unlike nodes.
                            for k1 in -cubic_cap..=cubic_cap {
                                for l in -cubic_cap..=cubic_cap {
                                    let rel =
                                        loop_serre_relation(data, i, j, &[k1], l, raising);
                                    residuals.push(memo.nf_element(&rules, &rel)?);
                                }
                            }
                        }
                        2 => {
                            for k1 in -cubic_cap..=cubic_cap {
                                for k2 in k1..=cubic_cap {
                                    for l in -cubic_cap..=cubic_cap {
                                        let rel = loop_serre_relation(
                                            data,
                                            i,
                                            j,
                                            &[k1, k2],
                                            l,
                                            raising,
                                        );
                                        residuals.push(memo.nf_element(&rules, &rel)?);
                                    }
                                }
                            }
                        }
                        other => {
                            return Err(format!(
                                "unsupported off-diagonal Cartan entry (Serre degree {})",
                                other
                            ));
                        }
                    }
                }
            }
        }
        for (lead, rhs) in sparse_rules(residuals)? {
            rules.install(lead, rhs)?;
        }
    }
    Ok(rules)
}

/// [`drinfeld_rules_with`] with the degree-three layer capped at half the
/// window (so produced modes stay inside it).
pub fn drinfeld_rules(data: &CartanData, bound: i64) -> Result<RuleSet, String> {
    drinfeld_rules_with(data, bound, bound / 2)
}

/// Which presentation a rule table realizes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PresentationKind {
    Chevalley,
    Drinfeld,
}

/// A named, ready-to-use rewrite table.
#[derive(Clone, Debug)]
pub struct PresentationTable {
    pub kind: PresentationKind,
    pub rules: RuleSet,
}

/// Completed Chevalley–Serre table.
pub fn chevalley_table(data: &CartanData) -> Result<PresentationTable, String> {
    Ok(PresentationTable {
        kind: PresentationKind::Chevalley,
        rules: chevalley_rules(data)?,
    })
}

/// Windowed loop-presentation table.
pub fn drinfeld_table(data: &CartanData, bound: i64) -> Result<PresentationTable, String> {
    Ok(PresentationTable {
        kind: PresentationKind::Drinfeld,
        rules: drinfeld_rules(data, bound)?,
    })
}

// ---------------------------------------------------------------------------
// Algebra maps
// ---------------------------------------------------------------------------

/// The bar-semilinear automorphism `Φ`: swaps `E_i ↔ F_i` letter-for-letter,
/// fixes atoms, and conjugates coefficients (`q^{1/2} ↦ q^{−1/2}`). Defined
/// on the Chevalley alphabet only.
pub fn phi_map(data: &CartanData, e: &Element) -> Result<Element, String> {
    let mut out = Element::zero();
    for (w, c) in &e.terms {
        let mut letters = Vec::with_capacity(w.letters.len());
        for g in &w.letters {
            letters.push(match g {
                Gen::E(i) => Gen::F(*i),
                Gen::F(i) => Gen::E(*i),
                other => {
                    return Err(format!(
                        "the E↔F swap is defined on the Chevalley alphabet only (got {:?})",
                        other
                    ))
                }
            });
        }
        let img = Element::from_word(
            Word {
                letters,
                atom: w.atom.clone(),
            },
            c.bar(),
        );
        out = out.add(&img);
        let _ = data;
    }
    Ok(out)
}

fn omega_gen(g: &Gen) -> Gen {
    match g {
        Gen::E(i) => Gen::F(*i),
        Gen::F(i) => Gen::E(*i),
        Gen::Xp(i, k) => Gen::Xm(*i, -k),
        Gen::Xm(i, k) => Gen::Xp(*i, -k),
        Gen::H(i, k) => Gen::H(*i, -k),
        Gen::Psi(i, k) => Gen::Phi(*i, -k),
        Gen::Phi(i, k) => Gen::Psi(*i, -k),
    }
}

/// The bar-semilinear anti-automorphism `Ω`: reverses words, swaps raising and
/// lowering letters while negating modes, inverts atoms, and conjugates
/// coefficients. Total on both alphabets.
pub fn omega_map(data: &CartanData, e: &Element) -> Element {
    let mut out = Element::zero();
    for (w, c) in &e.terms {
        let mut factors = vec![at(w.atom.inverse())];
        for g in w.letters.iter().rev() {
            factors.push(ge(data, omega_gen(g)));
        }
        out = out.add(&Element::product(data, &factors).scale(&c.bar()));
    }
    out
}

fn coproduct_letter(data: &CartanData, g: &Gen) -> Result<Element2, String> {
    match g {
        Gen::E(i) => {
            let mut d = Element2::from_pair(&ge(data, Gen::E(*i)), &Element::one(data));
            d = d.add(&Element2::from_pair(&at(k_atom(data, *i)), &ge(data, Gen::E(*i))));
            Ok(d)
        }
        Gen::F(i) => {
            let mut d = Element2::from_pair(
                &ge(data, Gen::F(*i)),
                &at(k_atom(data, *i).inverse()),
            );
            d = d.add(&Element2::from_pair(&Element::one(data), &ge(data, Gen::F(*i))));
            Ok(d)
        }
        other => Err(format!(
            "the comultiplication is defined on the Chevalley alphabet only (got {:?})",
            other
        )),
    }
}

/// The comultiplication, extended multiplicatively from
/// `Δ(E_i) = E_i⊗1 + K_i⊗E_i`, `Δ(F_i) = F_i⊗K_i^{−1} + 1⊗F_i`, and
/// `Δ(a) = a⊗a` on atoms. Defined on the Chevalley alphabet only.
pub fn coproduct(data: &CartanData, e: &Element) -> Result<Element2, String> {
    let mut out = Element2::zero();
    for (w, c) in &e.terms {
        let mut acc = Element2::from_pair(&Element::scalar(data, c.clone()), &Element::one(data));
        for g in &w.letters {
            acc = acc.mul(data, &coproduct_letter(data, g)?);
        }
        let atoms = Element2::from_pair(&at(w.atom.clone()), &at(w.atom.clone()));
        acc = acc.mul(data, &atoms);
        out = out.add(&acc);
    }
    Ok(out)
}

/// The antipode: the linear anti-automorphism with `S(E_i) = −K_i^{−1} E_i`,
/// `S(F_i) = −F_i K_i`, and `S(a) = a^{−1}` on atoms. Defined on the
/// Chevalley alphabet only. (This is the unique assignment satisfying both
/// antipode axioms against the comultiplication above; the `hopf` suite
/// certifies it and exhibits the failure of the nearby sign/side variants.)
pub fn antipode(data: &CartanData, e: &Element) -> Result<Element, String> {
    let mut out = Element::zero();
    for (w, c) in &e.terms {
        let mut factors = vec![at(w.atom.inverse())];
        for g in w.letters.iter().rev() {
            factors.push(match g {
                Gen::E(i) => at(k_atom(data, *i).inverse())
                    .mul(data, &ge(data, Gen::E(*i)))
                    .neg(),
                Gen::F(i) => ge(data, Gen::F(*i))
                    .mul(data, &at(k_atom(data, *i)))
                    .neg(),
                other => {
                    return Err(format!(
                        "the antipode is defined on the Chevalley alphabet only (got {:?})",
                        other
                    ))
                }
            });
        }
        out = out.add(&Element::product(data, &factors).scale(c));
    }
    Ok(out)
}

/// The counit: `ε(E_i) = ε(F_i) = 0`, `ε(a) = 1` on atoms.
pub fn counit(data: &CartanData, e: &Element) -> Result<RatFunc, String> {
    let mut out = RatFunc::zero();
    for (w, c) in &e.terms {
        let mut kills = false;
        for g in &w.letters {
            match g {
                Gen::E(_) | Gen::F(_) => kills = true,
                other => {
                    return Err(format!(
                        "the counit is defined on the Chevalley alphabet only (got {:?})",
                        other
                    ))
                }
            }
        }
        if !kills {
            out = &out + c;
        }
    }
    let _ = data;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

/// One named check: `Ok(())` on pass, `Err(reason)` on failure or when the
/// verdict is inconclusive (budget exhaustion is a failure, never a pass).
pub type Instance = (String, Result<(), String>);

/// True when every instance passed.
pub fn suite_passes(instances: &[Instance]) -> bool {
    instances.iter().all(|(_, r)| r.is_ok())
}

/// The names and reasons of the failing instances.
pub fn suite_failures(instances: &[Instance]) -> Vec<String> {
    instances
        .iter()
        .filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{}: {}", n, e)))
        .collect()
}

fn inst_zero(name: String, rules: &RuleSet, e: &Element) -> Instance {
    let r = match nf(rules, e, SUITE_BUDGET) {
        Ok(z) if z.is_zero() => Ok(()),
        Ok(z) => Err(format!("nonzero residual with {} terms", z.terms.len())),
        Err(err) => Err(err),
    };
    (name, r)
}

fn inst_eq_nf(name: String, rules: &RuleSet, a: &Element, b: &Element) -> Instance {
    inst_zero(name, rules, &a.sub(b))
}

fn inst_eq_literal(name: String, a: &Element, b: &Element) -> Instance {
    if a == b {
        (name, Ok(()))
    } else {
        (name, Err(String::from("sides differ as canonical elements")))
    }
}

/// A discriminant: passes only when the element does NOT reduce to zero
/// (used to pin down sign/normalization variants that must fail).
fn inst_nonzero(name: String, rules: &RuleSet, e: &Element) -> Instance {
    let r = match nf(rules, e, SUITE_BUDGET) {
        Ok(z) if z.is_zero() => Err(String::from(
            "variant unexpectedly reduces to zero; it should be excluded",
        )),
        Ok(_) => Ok(()),
        Err(err) => Err(err),
    };
    (name, r)
}

fn inst_note(name: String) -> Instance {
    (name, Ok(()))
}

// ---------------------------------------------------------------------------
// Suite: chevalley
// ---------------------------------------------------------------------------

/// Verifies every defining Chevalley–Serre relation against the table, plus
/// the structural atom crossings and a divided-power sanity check.
pub fn suite_chevalley(rules: &RuleSet) -> Vec<Instance> {
    let data = &rules.data;
    let nodes = data.n + 1;
    let mut out = Vec::new();
    for i in 0..nodes {
        for j in 0..nodes {
            out.push(inst_zero(
                format!("chevalley: [E_{i}, F_{j}] bracket"),
                rules,
                &chevalley_ef_relation(data, i, j),
            ));
        }
    }
    for i in 0..nodes {
        for j in 0..nodes {
            if i != j {
                out.push(inst_zero(
                    format!("chevalley: Serre raising i={i} j={j}"),
                    rules,
                    &chevalley_serre_relation(data, i, j, true),
                ));
                out.push(inst_zero(
                    format!("chevalley: Serre lowering i={i} j={j}"),
                    rules,
                    &chevalley_serre_relation(data, i, j, false),
                ));
            }
        }
    }
    // Structural crossings are handled by the atom arithmetic itself; the
    // instances certify the folded representation.
    for i in 0..nodes {
        for j in 0..nodes {
            let pairing = bilinear(data, &data.simple_root(i), &data.simple_root(j));
            let lhs = at(k_atom(data, i)).mul(data, &ge(data, Gen::E(j)));
            let rhs = ge(data, Gen::E(j))
                .mul(data, &at(k_atom(data, i)))
                .scale(&RatFunc::q_pow(pairing));
            out.push(inst_eq_literal(
                format!("chevalley: K_{i} E_{j} = q^(α_{i}|α_{j}) E_{j} K_{i}"),
                &lhs,
                &rhs,
            ));
            let lhs_f = at(k_atom(data, i)).mul(data, &ge(data, Gen::F(j)));
            let rhs_f = ge(data, Gen::F(j))
                .mul(data, &at(k_atom(data, i)))
                .scale(&RatFunc::q_pow(-pairing));
            out.push(inst_eq_literal(
                format!("chevalley: K_{i} F_{j} = q^-(α_{i}|α_{j}) F_{j} K_{i}"),
                &lhs_f,
                &rhs_f,
            ));
        }
    }
    for j in 0..nodes {
        let dexp = data.simple_root(j).delta;
        let lhs = at(d_atom(data, 1)).mul(data, &ge(data, Gen::E(j)));
        let rhs = ge(data, Gen::E(j))
            .mul(data, &at(d_atom(data, 1)))
            .scale(&RatFunc::q_pow(dexp));
        out.push(inst_eq_literal(
            format!("chevalley: D E_{j} crossing"),
            &lhs,
            &rhs,
        ));
        let gl = at(gamma_half(data, 1)).mul(data, &ge(data, Gen::E(j)));
        let gr = ge(data, Gen::E(j)).mul(data, &at(gamma_half(data, 1)));
        out.push(inst_eq_literal(
            format!("chevalley: γ^(1/2) central past E_{j}"),
            &gl,
            &gr,
        ));
    }
    for i in 0..nodes {
        let lhs = divided_power_e(data, i, 2)
            .scale(&RatFunc::from_poly(q_fact(2, data.d[i])));
        let rhs = ge(data, Gen::E(i)).mul(data, &ge(data, Gen::E(i)));
        out.push(inst_eq_literal(
            format!("chevalley: divided power E_{i}^(2)·[2]! = E_{i}E_{i}"),
            &lhs,
            &rhs,
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Suite: drinfeld
// ---------------------------------------------------------------------------

/// Verifies every loop relation with parameter modes bounded by
/// `probe_bound` against the table, the ψ/φ expansions, the structural atom
/// crossings, and transport of sample relations under `Ω`.
pub fn suite_drinfeld(rules: &RuleSet, probe_bound: i64) -> Vec<Instance> {
    let data = &rules.data;
    let n = data.n;
    let pb = probe_bound;
    let mut out = Vec::new();
    let nonzero: Vec<i64> = (-pb..=pb).filter(|&k| k != 0).collect();

    // Structural crossings.
    for i in 1..=n {
        for k in [-pb, 1.min(pb)] {
            let x = ge(data, Gen::Xp(i, k));
            let lhs = at(d_atom(data, 1)).mul(data, &x);
            let rhs = x.mul(data, &at(d_atom(data, 1))).scale(&RatFunc::q_pow(k));
            out.push(inst_eq_literal(
                format!("drinfeld: D x+_({i},{k}) crossing"),
                &lhs,
                &rhs,
            ));
            let h = ge(data, Gen::H(i, k.max(1)));
            let lh = at(d_atom(data, 1)).mul(data, &h);
            let rh = h
                .mul(data, &at(d_atom(data, 1)))
                .scale(&RatFunc::q_pow(k.max(1)));
            out.push(inst_eq_literal(
                format!("drinfeld: D h_({i},{}) crossing", k.max(1)),
                &lh,
                &rh,
            ));
        }
        for j in 1..=n {
            let pairing = bilinear(data, &data.simple_root(i), &data.simple_root(j));
            let x = ge(data, Gen::Xp(j, 1));
            let lhs = at(k_atom(data, i)).mul(data, &x);
            let rhs = x
                .mul(data, &at(k_atom(data, i)))
                .scale(&RatFunc::q_pow(pairing));
            out.push(inst_eq_literal(
                format!("drinfeld: K_{i} x+_({j},1) crossing"),
                &lhs,
                &rhs,
            ));
        }
    }

    // Loop Cartan brackets.
    for i in 1..=n {
        for j in 1..=n {
            for &k in &nonzero {
                for &l in &nonzero {
                    out.push(inst_zero(
                        format!("drinfeld: [h_({i},{k}), h_({j},{l})]"),
                        rules,
                        &hs_relation(data, i, k, j, l),
                    ));
                }
            }
        }
    }

    // Cartan–loop crossings.
    for i in 1..=n {
        for j in 1..=n {
            for &k in &nonzero {
                for l in -pb..=pb {
                    if (k + l).abs() > rules.mode_bound {
                        continue;
                    }
                    for raising in [true, false] {
                        let tag = if raising { "+" } else { "-" };
                        out.push(inst_zero(
                            format!("drinfeld: [h_({i},{k}), x{tag}_({j},{l})]"),
                            rules,
                            &hx_relation(data, i, k, j, l, raising),
                        ));
                    }
                }
            }
        }
    }

    // Like-sign straightening.
    for i in 1..=n {
        for j in 1..=n {
            for k in -pb..pb {
                for l in -pb..pb {
                    for raising in [true, false] {
                        let tag = if raising { "+" } else { "-" };
                        out.push(inst_zero(
                            format!("drinfeld: x{tag}x{tag} straightening i={i} k={k} j={j} l={l}"),
                            rules,
                            &xx_relation(data, i, k, j, l, raising),
                        ));
                    }
                }
            }
        }
    }

    // Mixed-sign brackets.
    for i in 1..=n {
        for j in 1..=n {
            for k in -pb..=pb {
                for l in -pb..=pb {
                    if i == j && (k + l).abs() > rules.mode_bound {
                        continue;
                    }
                    out.push(inst_zero(
                        format!("drinfeld: [x+_({i},{k}), x-_({j},{l})]"),
                        rules,
                        &xpm_relation(data, i, k, j, l),
                    ));
                }
            }
        }
    }

    // ψ/φ expansions across the whole window.
    for i in 1..=n {
        for m in 1..=rules.mode_bound.min(2 * pb) {
            out.push(inst_zero(
                format!("drinfeld: ψ_({i},{m}) expansion"),
                rules,
                &psi_expansion_relation(data, i, m),
            ));
            out.push(inst_zero(
                format!("drinfeld: φ_({i},-{m}) expansion"),
                rules,
                &phi_expansion_relation(data, i, -m),
            ));
        }
    }

    // Degree-three Serre layer.
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let deg = 1 - data.a[i][j];
            for raising in [true, false] {
                let tag = if raising { "+" } else { "-" };
                match deg {
                    1 => {
                        for k1 in -pb..=pb {
                            for l in -pb..=pb {
                                out.push(inst_zero(
                                    format!(
                                        "drinfeld: loop Serre x{tag} i={i} j={j} modes=[{k1}] l={l}"
                                    ),
                                    rules,
                                    &loop_serre_relation(data, i, j, &[k1], l, raising),
                                ));
                            }
                        }
                    }
                    2 => {
                        for k1 in -pb..=pb {
                            for k2 in k1..=pb {
                                for l in -pb..=pb {
                                    out.push(inst_zero(
                                        format!(
                                            "drinfeld: loop Serre x{tag} i={i} j={j} modes=[{k1},{k2}] l={l}"
                                        ),
                                        rules,
                                        &loop_serre_relation(data, i, j, &[k1, k2], l, raising),
                                    ));
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
    }

    // Ω transports a sample of relations back into the relation ideal.
    let m = pb.min(2);
    let mut samples: Vec<(String, Element)> = vec![
        (
            format!("Ω of [h_(1,{m}), x+_(1,0)]"),
            hx_relation(data, 1, m, 1, 0, true),
        ),
        (
            format!("Ω of x+x+ straightening (1,0),(1,{})", m - 1),
            xx_relation(data, 1, 0, 1, m - 1, true),
        ),
        (
            format!("Ω of [x+_(1,{m}), x-_(1,-{m})]"),
            xpm_relation(data, 1, m, 1, -m),
        ),
        (
            format!("Ω of ψ_(1,{m}) expansion"),
            psi_expansion_relation(data, 1, m),
        ),
    ];
    if n >= 2 {
        samples.push((
            String::from("Ω of loop Serre x+ i=1 j=2 modes=[0,1] l=0"),
            loop_serre_relation(data, 1, 2, &[0, 1], 0, true),
        ));
    }
    for (name, rel) in samples {
        out.push(inst_zero(
            format!("drinfeld: {name} stays a relation"),
            rules,
            &omega_map(data, &rel),
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Suite: psix2
// ---------------------------------------------------------------------------

/// `p_{i,r}`: the normalized loop Cartan element
/// `(q_i − q_i^{−1})^{−1} K_i^{−1} ψ_{i,r}` for `r ≥ 1`, and `1` for `r = 0`.
/// The four ψ–x commutation identities close in this normalization.
pub fn p_element(data: &CartanData, i: usize, r: i64) -> Element {
    assert!(r >= 0);
    if r == 0 {
        Element::one(data)
    } else {
        at(k_atom(data, i).inverse())
            .mul(data, &psi_element(data, i, r))
            .scale(&q_diff(data.d[i]).inv())
    }
}

/// The closed form of `[p_{i,r}, x^∓_{j,m}]`:
/// `∓ γ^{±1/2} [a_ij]_i ( Σ_{k=1}^{r−1} ē^{k−1}(q_i−q_i^{−1})·M_k + ē^{r−1}·x^∓_{j,m+r} )`
/// with `ē = q_i^{a_ij} γ^{±1/2}`, where on the lowering branch
/// `M_k = p_{i,r−k} x⁻_{j,m+k}` and on the raising branch
/// `M_k = x⁺_{j,m+k} p_{i,r−k}` (upper signs: lowering; lower signs: raising).
pub fn psix_bracket_rhs(
    data: &CartanData,
    i: usize,
    j: usize,
    r: i64,
    m: i64,
    lowering: bool,
) -> Element {
    let aij = data.a[i][j];
    let di = data.d[i];
    let qd = q_diff(di);
    let mut sum = Element::zero();
    for k in 1..=r {
        let scalar = RatFunc::qi_pow(aij * (k - 1), di);
        let s = if lowering { k } else { -k };
        let head = at(gamma_half(data, s)).scale(&scalar);
        let term = if k < r {
            let mid = if lowering {
                p_element(data, i, r - k).mul(data, &ge(data, Gen::Xm(j, m + k)))
            } else {
                ge(data, Gen::Xp(j, m + k)).mul(data, &p_element(data, i, r - k))
            };
            head.mul(data, &mid).scale(&qd)
        } else {
            let x = if lowering {
                ge(data, Gen::Xm(j, m + r))
            } else {
                ge(data, Gen::Xp(j, m + r))
            };
            head.mul(data, &x)
        };
        sum = sum.add(&term);
    }
    let mut c = q_int_rf(aij, di);
    if lowering {
        c = -&c;
    }
    sum.scale(&c)
}

/// Verifies the four ψ–x commutation identities in the normalized form, for
/// `1 ≤ r ≤ r_max`, `|m| ≤ m_max`, on every node pair, plus discriminant
/// instances showing that the unnormalized and sign-variant forms fail.
pub fn suite_psix2(rules: &RuleSet, r_max: i64, m_max: i64) -> Vec<Instance> {
    let data = &rules.data;
    let n = data.n;
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            let branch = if i == j { "diagonal" } else { "off-diagonal" };
            for r in 1..=r_max {
                for m in -m_max..=m_max {
                    for lowering in [true, false] {
                        let dir = if lowering { "lowering" } else { "raising" };
                        let x = if lowering {
                            ge(data, Gen::Xm(j, m))
                        } else {
                            ge(data, Gen::Xp(j, m))
                        };
                        let lhs = commutator(data, &p_element(data, i, r), &x);
                        let rhs = psix_bracket_rhs(data, i, j, r, m, lowering);
                        out.push(inst_eq_nf(
                            format!("psix2: {branch} {dir} i={i} j={j} r={r} m={m}"),
                            rules,
                            &lhs,
                            &rhs,
                        ));
                    }
                }
            }
        }
    }
    // Discriminant: with the bare ψ letter in place of p the first identity
    // already fails at r = 1 (the normalization is forced).
    {
        let i = 1;
        let m = 0;
        let lhs = commutator(data, &psi_element(data, i, 1), &ge(data, Gen::Xm(i, m)));
        // the would-be right-hand side with ψ in place of p
        let tail = at(gamma_half(data, 1)).mul(data, &ge(data, Gen::Xm(i, m + 1)));
        let rhs = tail.scale(&(-&q_int_rf(2, data.d[i])));
        out.push(inst_nonzero(
            String::from("psix2: discriminant — unnormalized ψ variant differs at r=1"),
            rules,
            &lhs.sub(&rhs),
        ));
    }
    if n >= 2 {
        // Discriminants on the off-diagonal branch: the overall sign variant
        // and both alternative tail bases fail.
        let (i, j, m) = (1, 2, 0);
        let aij = data.a[i][j];
        let di = data.d[i];
        {
            let lhs = commutator(data, &p_element(data, i, 1), &ge(data, Gen::Xm(j, m)));
            let rhs_flipped = psix_bracket_rhs(data, i, j, 1, m, true).neg();
            out.push(inst_nonzero(
                String::from(
                    "psix2: discriminant — opposite overall sign on the off-diagonal lowering branch differs at r=1",
                ),
                rules,
                &lhs.sub(&rhs_flipped),
            ));
        }
        for (tag, tail_scalar) in [
            ("diagonal-base tail (q_i^2)", RatFunc::qi_pow(2, di)),
            ("sign-alternating tail (−q_i^a)", -&RatFunc::qi_pow(aij, di)),
        ] {
            let r = 2;
            let lhs = commutator(data, &p_element(data, i, r), &ge(data, Gen::Xm(j, m)));
            // Correct sum term (k = 1), variant tail (k = r = 2).
            let qd = q_diff(di);
            let sum_k1 = at(gamma_half(data, 1))
                .mul(
                    data,
                    &p_element(data, i, 1).mul(data, &ge(data, Gen::Xm(j, m + 1))),
                )
                .scale(&qd);
            let tail = at(gamma_half(data, 2))
                .mul(data, &ge(data, Gen::Xm(j, m + 2)))
                .scale(&tail_scalar);
            let rhs = sum_k1.add(&tail).scale(&(-&q_int_rf(aij, di)));
            out.push(inst_nonzero(
                format!("psix2: discriminant — {tag} differs at r=2"),
                rules,
                &lhs.sub(&rhs),
            ));
        }
    } else {
        out.push(inst_note(String::from(
            "psix2: off-diagonal identities — no off-diagonal node pair at this rank",
        )));
    }
    out
}

// ---------------------------------------------------------------------------
// Suite: arelns
// ---------------------------------------------------------------------------

/// Verifies the commutation relations between the loop generators and the
/// integral-form bracket elements: bracket crossings literally (they are atom
/// identities), the bracket forms of the loop relations by normal form.
pub fn suite_arelns(rules: &RuleSet, n_max: i64, s_max: i64, mode_max: i64) -> Vec<Instance> {
    let data = &rules.data;
    let rank = data.n;
    let mut out = Vec::new();
    for i in 1..=rank {
        for k in -mode_max..=mode_max {
            for s in -s_max..=s_max {
                for nn in 1..=n_max {
                    for j in 1..=rank {
                        let aji = data.a[j][i];
                        // raising: x⁺ [K_j; s, n] = [K_j; s−a_ji, n] x⁺
                        let xp = ge(data, Gen::Xp(i, k));
                        let lhs = xp.mul(data, &lusztig_k(data, j, s, nn));
                        let rhs = lusztig_k(data, j, s - aji, nn).mul(data, &xp);
                        out.push(inst_eq_literal(
                            format!("arelns: x+_({i},{k}) [K_{j};{s},{nn}]"),
                            &lhs,
                            &rhs,
                        ));
                        // lowering: [K_j; s, n] x⁻ = x⁻ [K_j; s−a_ji, n]
                        let xm = ge(data, Gen::Xm(i, k));
                        let lhs2 = lusztig_k(data, j, s, nn).mul(data, &xm);
                        let rhs2 = xm.mul(data, &lusztig_k(data, j, s - aji, nn));
                        out.push(inst_eq_literal(
                            format!("arelns: [K_{j};{s},{nn}] x-_({i},{k})"),
                            &lhs2,
                            &rhs2,
                        ));
                    }
                    // raising: x⁺ [D; s, n] = [D; s−k, n] x⁺
                    let xp = ge(data, Gen::Xp(i, k));
                    let lhs = xp.mul(data, &lusztig_d(data, s, nn));
                    let rhs = lusztig_d(data, s - k, nn).mul(data, &xp);
                    out.push(inst_eq_literal(
                        format!("arelns: x+_({i},{k}) [D;{s},{nn}]"),
                        &lhs,
                        &rhs,
                    ));
                    // lowering: [D; s, n] x⁻_{ik} = x⁻_{ik} [D; s+k, n]
                    // (the mode of x⁻_{ik} is k, exactly as for h_{ik}).
                    let xm = ge(data, Gen::Xm(i, k));
                    let lhs2 = lusztig_d(data, s, nn).mul(data, &xm);
                    let rhs2 = xm.mul(data, &lusztig_d(data, s + k, nn));
                    out.push(inst_eq_literal(
                        format!("arelns: [D;{s},{nn}] x-_({i},{k})"),
                        &lhs2,
                        &rhs2,
                    ));
                    if k != 0 {
                        // [D; s, n] h_{ik} = h_{ik} [D; s+k, n]
                        let h = ge(data, Gen::H(i, k));
                        let lhs3 = lusztig_d(data, s, nn).mul(data, &h);
                        let rhs3 = h.mul(data, &lusztig_d(data, s + k, nn));
                        out.push(inst_eq_literal(
                            format!("arelns: [D;{s},{nn}] h_({i},{k})"),
                            &lhs3,
                            &rhs3,
                        ));
                    }
                }
            }
        }
    }
    // Discriminant: on the lowering line the D-bracket shift is s+k; the
    // mirrored-shift variant s−k breaks already at (k,s,n) = (1,0,1).
    {
        let xm = ge(data, Gen::Xm(1, 1));
        let lhs = lusztig_d(data, 0, 1).mul(data, &xm);
        let wrong = xm.mul(data, &lusztig_d(data, -1, 1));
        out.push(inst_nonzero(
            String::from("arelns: discriminant — mirrored D-shift variant differs at k=1"),
            rules,
            &lhs.sub(&wrong),
        ));
    }
    // Central and Cartan commutations.
    for i in 1..=rank {
        let g = at(gamma_half(data, 1));
        let x = ge(data, Gen::Xp(i, 1));
        out.push(inst_eq_literal(
            format!("arelns: [γ^(1/2), x+_({i},1)] = 0"),
            &g.mul(data, &x),
            &x.mul(data, &g),
        ));
        let d = at(d_atom(data, 1));
        let ki = at(k_atom(data, i));
        out.push(inst_eq_literal(
            format!("arelns: [D, K_{i}] = 0"),
            &d.mul(data, &ki),
            &ki.mul(data, &d),
        ));
        for j in 1..=rank {
            let kj = at(k_atom(data, j));
            out.push(inst_eq_literal(
                format!("arelns: [K_{i}, K_{j}] = 0"),
                &ki.mul(data, &kj),
                &kj.mul(data, &ki),
            ));
            let h = ge(data, Gen::H(j, 1));
            out.push(inst_eq_literal(
                format!("arelns: [K_{i}, h_({j},1)] = 0"),
                &ki.mul(data, &h),
                &h.mul(data, &ki),
            ));
        }
    }
    // Bracket forms of the loop relations, by normal form.
    for i in 1..=rank {
        for j in 1..=rank {
            for k in -mode_max..=mode_max {
                if k == 0 {
                    continue;
                }
                for l in -mode_max..=mode_max {
                    if l == 0 {
                        continue;
                    }
                    let lhs = commutator(
                        data,
                        &ge(data, Gen::H(i, k)),
                        &ge(data, Gen::H(j, l)),
                    );
                    let rhs = if k == -l {
                        lusztig_gamma(data, i, k).scale(
                            &(&q_int_rf(k * data.a[i][j], data.d[i])
                                * &RatFunc::from_rat(rat(1, k))),
                        )
                    } else {
                        Element::zero()
                    };
                    out.push(inst_eq_nf(
                        format!("arelns: [h_({i},{k}), h_({j},{l})] bracket form"),
                        rules,
                        &lhs,
                        &rhs,
                    ));
                }
            }
            for k in -mode_max..=mode_max {
                for l in -mode_max..=mode_max {
                    let lhs = commutator(
                        data,
                        &ge(data, Gen::Xp(i, k)),
                        &ge(data, Gen::Xm(j, l)),
                    );
                    let rhs = if i == j {
                        lusztig_gamma_psi(data, i, k, l)
                    } else {
                        Element::zero()
                    };
                    out.push(inst_eq_nf(
                        format!("arelns: [x+_({i},{k}), x-_({j},{l})] bracket form"),
                        rules,
                        &lhs,
                        &rhs,
                    ));
                }
            }
        }
    }
    let _ = n_max;
    out
}

// ---------------------------------------------------------------------------
// Suite: formal_sums
// ---------------------------------------------------------------------------

/// A doubly-graded array of elements: the coefficient of `u^p v^q` for each
/// stored key `(p, q)`.
#[derive(Clone, Debug)]
pub struct BiSeries {
    pub terms: BTreeMap<(i64, i64), Element>,
}

impl BiSeries {
    pub fn zero() -> BiSeries {
        BiSeries {
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, key: (i64, i64), e: Element) {
        let entry = self.terms.entry(key).or_insert_with(Element::zero);
        *entry = entry.add(&e);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &BiSeries) -> BiSeries {
        let mut out = self.clone();
        for (k, e) in &other.terms {
            out.add_term(*k, e.clone());
        }
        out
    }

    pub fn neg(&self) -> BiSeries {
        BiSeries {
            terms: self.terms.iter().map(|(k, e)| (*k, e.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &BiSeries) -> BiSeries {
        self.add(&other.neg())
    }

    /// Exact convolution over the stored supports.
    pub fn mul(&self, data: &CartanData, other: &BiSeries) -> BiSeries {
        let mut out = BiSeries::zero();
        for ((p1, q1), e1) in &self.terms {
            for ((p2, q2), e2) in &other.terms {
                out.add_term((p1 + p2, q1 + q2), e1.mul(data, e2));
            }
        }
        out
    }
}

fn x_series(data: &CartanData, i: usize, raising: bool, first_var: bool, cap: i64) -> BiSeries {
    let mut s = BiSeries::zero();
    for m in -cap..=cap {
        let g = if raising {
            Gen::Xp(i, m)
        } else {
            Gen::Xm(i, m)
        };
        let key = if first_var { (-m, 0) } else { (0, -m) };
        s.add_term(key, ge(data, g));
    }
    s
}

fn psi_series(data: &CartanData, i: usize, first_var: bool, cap: i64) -> BiSeries {
    let mut s = BiSeries::zero();
    for t in 0..=cap {
        let key = if first_var { (-t, 0) } else { (0, -t) };
        s.add_term(key, psi_element(data, i, t));
    }
    s
}

fn phi_series(data: &CartanData, i: usize, first_var: bool, cap: i64) -> BiSeries {
    let mut s = BiSeries::zero();
    for t in 0..=cap {
        let key = if first_var { (t, 0) } else { (0, t) };
        s.add_term(key, phi_element(data, i, -t));
    }
    s
}

/// The expansion of `(a·t − 1)/(t − a)` at `t = 0` with `a = q^{pairing}`,
/// substituted at `t = (first variable)·(second variable)^{−1}·γ^{e_half/2}`
/// when `u_dir`, at the reciprocal variable combination otherwise.
fn g_series(data: &CartanData, pairing: i64, u_dir: bool, e_half: i64, cap: i64) -> BiSeries {
    let mut s = BiSeries::zero();
    let a = RatFunc::q_pow(pairing);
    let a_inv = RatFunc::q_pow(-pairing);
    let diff = &a - &a_inv;
    for k in 0..=cap {
        let coeff = if k == 0 {
            a_inv.clone()
        } else {
            -&(&diff * &RatFunc::q_pow(-pairing * k))
        };
        let key = if u_dir { (k, -k) } else { (-k, k) };
        s.add_term(key, at(gamma_half(data, e_half * k)).scale(&coeff));
    }
    s
}

/// `δ(z)` substituted at the variable combination `u v^{−1} γ^{e_half/2}`.
fn delta_series(data: &CartanData, e_half: i64, cap: i64) -> BiSeries {
    let mut s = BiSeries::zero();
    for k in -cap..=cap {
        s.add_term((k, -k), at(gamma_half(data, e_half * k)));
    }
    s
}

fn psi_shifted_series(data: &CartanData, i: usize, cap: i64) -> BiSeries {
    // ψ_i(v γ^{1/2}) = Σ_t ψ_{i,t} v^{−t} γ^{−t/2}
    let mut s = BiSeries::zero();
    for t in 0..=cap {
        s.add_term(
            (0, -t),
            at(gamma_half(data, -t)).mul(data, &psi_element(data, i, t)),
        );
    }
    s
}

fn phi_shifted_series(data: &CartanData, i: usize, cap: i64) -> BiSeries {
    // φ_i(u γ^{1/2}) = Σ_t φ_{i,−t} u^{t} γ^{t/2}
    let mut s = BiSeries::zero();
    for t in 0..=cap {
        s.add_term(
            (t, 0),
            at(gamma_half(data, t)).mul(data, &phi_element(data, i, -t)),
        );
    }
    s
}

fn scalar_biseries(data: &CartanData, terms: &[((i64, i64), RatFunc)]) -> BiSeries {
    let mut s = BiSeries::zero();
    for (key, c) in terms {
        s.add_term(*key, Element::scalar(data, c.clone()));
    }
    s
}

fn check_biseries_window(
    name: String,
    rules: &RuleSet,
    diff: &BiSeries,
    window: i64,
) -> Instance {
    for ((p, q), e) in &diff.terms {
        if p.abs() > window || q.abs() > window {
            continue;
        }
        match nf(rules, e, SUITE_BUDGET) {
            Ok(z) if z.is_zero() => {}
            Ok(z) => {
                return (
                    name,
                    Err(format!(
                        "coefficient at ({p},{q}) leaves a nonzero residual with {} terms",
                        z.terms.len()
                    )),
                )
            }
            Err(err) => return (name, Err(format!("coefficient at ({p},{q}): {err}"))),
        }
    }
    (name, Ok(()))
}

/// Verifies the generating-series identities coefficient-wise inside the
/// window `|p|, |q| ≤ w`: the commuting ψ/φ families, the φψ exchange, the
/// φ–x and ψ–x exchanges, the like-sign exchange, and the mixed bracket. All
/// are checked in inverse-free (cleared-denominator) form; the series sources
/// run to `2w`, which keeps every checked coefficient exact.
pub fn suite_formal_sums(rules: &RuleSet, w: i64) -> Vec<Instance> {
    let data = &rules.data;
    let n = data.n;
    let cap = 2 * w;
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            let pairing = bilinear(data, &data.simple_root(i), &data.simple_root(j));

            // φφ and ψψ commute.
            let phi_u = phi_series(data, i, true, cap);
            let phi_v = phi_series(data, j, false, cap);
            let d1 = phi_u.mul(data, &phi_v).sub(&phi_v.mul(data, &phi_u));
            out.push(check_biseries_window(
                format!("formal_sums: [φ_{i}(u), φ_{j}(v)] = 0"),
                rules,
                &d1,
                w,
            ));
            let psi_u = psi_series(data, i, true, cap);
            let psi_v = psi_series(data, j, false, cap);
            let d2 = psi_u.mul(data, &psi_v).sub(&psi_v.mul(data, &psi_u));
            out.push(check_biseries_window(
                format!("formal_sums: [ψ_{i}(u), ψ_{j}(v)] = 0"),
                rules,
                &d2,
                w,
            ));

            // φψ exchange, cleared of inverses:
            // g_ij(uv^{−1}γ)·φ_i(u)ψ_j(v) = g_ij(uv^{−1}γ^{−1})·ψ_j(v)φ_i(u)
            let g_plus = g_series(data, pairing, true, 2, cap);
            let g_minus = g_series(data, pairing, true, -2, cap);
            let lhs = g_plus.mul(data, &phi_u.mul(data, &psi_v));
            let rhs = g_minus.mul(data, &psi_v.mul(data, &phi_u));
            out.push(check_biseries_window(
                format!("formal_sums: φ_{i}(u) ψ_{j}(v) exchange"),
                rules,
                &lhs.sub(&rhs),
                w,
            ));

            // φ–x exchanges:
            // φ_i(u)x⁺_j(v) = g_ij(uv^{−1}γ^{−1/2})·x⁺_j(v)φ_i(u)
            let xp_v = x_series(data, j, true, false, cap);
            let g4 = g_series(data, pairing, true, -1, cap);
            let d4 = phi_u
                .mul(data, &xp_v)
                .sub(&g4.mul(data, &xp_v.mul(data, &phi_u)));
            out.push(check_biseries_window(
                format!("formal_sums: φ_{i}(u) x+_{j}(v) exchange"),
                rules,
                &d4,
                w,
            ));
            // g_ij(uv^{−1}γ^{1/2})·φ_i(u)x⁻_j(v) = x⁻_j(v)φ_i(u)
            let xm_v = x_series(data, j, false, false, cap);
            let g5 = g_series(data, pairing, true, 1, cap);
            let d5 = g5
                .mul(data, &phi_u.mul(data, &xm_v))
                .sub(&xm_v.mul(data, &phi_u));
            out.push(check_biseries_window(
                format!("formal_sums: φ_{i}(u) x-_{j}(v) exchange"),
                rules,
                &d5,
                w,
            ));

            // ψ–x exchanges (pairing through the swapped index order):
            // g_ji(vu^{−1}γ^{−1/2})·ψ_i(u)x⁺_j(v) = x⁺_j(v)ψ_i(u)
            let g6 = g_series(data, pairing, false, -1, cap);
            let d6 = g6
                .mul(data, &psi_u.mul(data, &xp_v))
                .sub(&xp_v.mul(data, &psi_u));
            out.push(check_biseries_window(
                format!("formal_sums: ψ_{i}(u) x+_{j}(v) exchange"),
                rules,
                &d6,
                w,
            ));
            // ψ_i(u)x⁻_j(v) = g_ji(vu^{−1}γ^{1/2})·x⁻_j(v)ψ_i(u)
            let g7 = g_series(data, pairing, false, 1, cap);
            let d7 = psi_u
                .mul(data, &xm_v)
                .sub(&g7.mul(data, &xm_v.mul(data, &psi_u)));
            out.push(check_biseries_window(
                format!("formal_sums: ψ_{i}(u) x-_{j}(v) exchange"),
                rules,
                &d7,
                w,
            ));

            // Like-sign exchange:
            // (u − q^{±c}v)·x_i^±(u)x_j^±(v) = (q^{±c}u − v)·x_j^±(v)x_i^±(u)
            for raising in [true, false] {
                let tag = if raising { "+" } else { "-" };
                let c = if raising { pairing } else { -pairing };
                let xu = x_series(data, i, raising, true, cap);
                let xv = x_series(data, j, raising, false, cap);
                let left_scalar = scalar_biseries(
                    data,
                    &[((1, 0), RatFunc::one()), ((0, 1), -&RatFunc::q_pow(c))],
                );
                let right_scalar = scalar_biseries(
                    data,
                    &[((1, 0), RatFunc::q_pow(c)), ((0, 1), -&RatFunc::one())],
                );
                let d8 = left_scalar
                    .mul(data, &xu.mul(data, &xv))
                    .sub(&right_scalar.mul(data, &xv.mul(data, &xu)));
                out.push(check_biseries_window(
                    format!("formal_sums: x{tag}_{i}(u) x{tag}_{j}(v) exchange"),
                    rules,
                    &d8,
                    w,
                ));
            }

            // Mixed bracket:
            // [x_i^+(u), x_j^−(v)] = δ_ij (q_i−q_i^{−1})^{−1}
            //   (δ(u/(vγ))·ψ_i(vγ^{1/2}) − δ(uγ/v)·φ_i(uγ^{1/2}))
            let xp_u = x_series(data, i, true, true, cap);
            let mut d9 = xp_u.mul(data, &xm_v).sub(&xm_v.mul(data, &xp_u));
            if i == j {
                let inv = q_diff(data.d[i]).inv();
                let t1 = delta_series(data, -2, cap)
                    .mul(data, &psi_shifted_series(data, i, cap));
                let t2 = delta_series(data, 2, cap)
                    .mul(data, &phi_shifted_series(data, i, cap));
                let rhs = t1.sub(&t2);
                let rhs_scaled = BiSeries {
                    terms: rhs
                        .terms
                        .iter()
                        .map(|(k, e)| (*k, e.scale(&inv)))
                        .collect(),
                };
                d9 = d9.sub(&rhs_scaled);
            }
            out.push(check_biseries_window(
                format!("formal_sums: [x+_{i}(u), x-_{j}(v)] bracket"),
                rules,
                &d9,
                w,
            ));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Suite: hopf
// ---------------------------------------------------------------------------

fn hopf_axiom_left(data: &CartanData, g: &Element) -> Result<Element, String> {
    // m ∘ (S⊗id) ∘ Δ
    let cp = coproduct(data, g)?;
    let mut out = Element::zero();
    for ((l, r), c) in &cp.terms {
        let sl = antipode(data, &Element::from_word(l.clone(), RatFunc::one()))?;
        let re = Element::from_word(r.clone(), c.clone());
        out = out.add(&sl.mul(data, &re));
    }
    Ok(out)
}

fn hopf_axiom_right(data: &CartanData, g: &Element) -> Result<Element, String> {
    // m ∘ (id⊗S) ∘ Δ
    let cp = coproduct(data, g)?;
    let mut out = Element::zero();
    for ((l, r), c) in &cp.terms {
        let sr = antipode(data, &Element::from_word(r.clone(), RatFunc::one()))?;
        let le = Element::from_word(l.clone(), c.clone());
        out = out.add(&le.mul(data, &sr));
    }
    Ok(out)
}

fn counit_left(data: &CartanData, g: &Element) -> Result<Element, String> {
    // (ε⊗id) ∘ Δ
    let cp = coproduct(data, g)?;
    let mut out = Element::zero();
    for ((l, r), c) in &cp.terms {
        let el = counit(data, &Element::from_word(l.clone(), RatFunc::one()))?;
        out = out.add(&Element::from_word(r.clone(), &el * c));
    }
    Ok(out)
}

fn counit_right(data: &CartanData, g: &Element) -> Result<Element, String> {
    // (id⊗ε) ∘ Δ
    let cp = coproduct(data, g)?;
    let mut out = Element::zero();
    for ((l, r), c) in &cp.terms {
        let er = counit(data, &Element::from_word(r.clone(), RatFunc::one()))?;
        out = out.add(&Element::from_word(l.clone(), &er * c));
    }
    Ok(out)
}

/// Verifies the Hopf structure on the Chevalley alphabet: the
/// comultiplication sends every defining relation to zero in the tensor
/// algebra, both antipode axioms and both counit axioms hold on all
/// generators, the comultiplication is graded, the maps reject the loop
/// alphabet, and the printed-variant antipodes fail the axiom.
pub fn suite_hopf(rules: &RuleSet) -> Vec<Instance> {
    let data = &rules.data;
    let nodes = data.n + 1;
    let mut out = Vec::new();

    // Δ maps relations to relations (leg-wise reduction to zero).
    let mut rels: Vec<(String, Element)> = Vec::new();
    for i in 0..nodes {
        for j in 0..nodes {
            rels.push((
                format!("[E_{i}, F_{j}] bracket"),
                chevalley_ef_relation(data, i, j),
            ));
            if i != j {
                rels.push((
                    format!("Serre raising i={i} j={j}"),
                    chevalley_serre_relation(data, i, j, true),
                ));
                rels.push((
                    format!("Serre lowering i={i} j={j}"),
                    chevalley_serre_relation(data, i, j, false),
                ));
            }
        }
    }
    for (name, rel) in &rels {
        let r = match coproduct(data, rel) {
            Ok(cp) => {
                let mut budget = SUITE_BUDGET;
                match cp.normal_form_legwise(rules, &mut budget, Strategy::LeftGreedy) {
                    Ok(z) if z.is_zero() => Ok(()),
                    Ok(z) => Err(format!(
                        "tensor residual with {} terms",
                        z.terms.len()
                    )),
                    Err(e) => Err(e.to_string()),
                }
            }
            Err(e) => Err(e),
        };
        out.push((format!("hopf: Δ({name}) = 0"), r));
    }

    // Antipode and counit axioms on generators (atoms included).
    let mut gens: Vec<(String, Element)> = Vec::new();
    for i in 0..nodes {
        gens.push((format!("E_{i}"), ge(data, Gen::E(i))));
        gens.push((format!("F_{i}"), ge(data, Gen::F(i))));
        gens.push((format!("K_{i}"), at(k_atom(data, i))));
    }
    gens.push((String::from("γ^(1/2)"), at(gamma_half(data, 1))));
    gens.push((String::from("D"), at(d_atom(data, 1))));
    for (name, g) in &gens {
        let eps = counit(data, g).expect("Chevalley alphabet");
        let target = Element::scalar(data, eps);
        match hopf_axiom_left(data, g) {
            Ok(lhs) => out.push(inst_eq_literal(
                format!("hopf: m(S⊗id)Δ({name}) = ε({name})·1"),
                &lhs,
                &target,
            )),
            Err(e) => out.push((format!("hopf: m(S⊗id)Δ({name})"), Err(e))),
        }
        match hopf_axiom_right(data, g) {
            Ok(lhs) => out.push(inst_eq_literal(
                format!("hopf: m(id⊗S)Δ({name}) = ε({name})·1"),
                &lhs,
                &target,
            )),
            Err(e) => out.push((format!("hopf: m(id⊗S)Δ({name})"), Err(e))),
        }
        match counit_left(data, g) {
            Ok(lhs) => out.push(inst_eq_literal(
                format!("hopf: (ε⊗id)Δ({name}) = {name}"),
                &lhs,
                g,
            )),
            Err(e) => out.push((format!("hopf: (ε⊗id)Δ({name})"), Err(e))),
        }
        match counit_right(data, g) {
            Ok(lhs) => out.push(inst_eq_literal(
                format!("hopf: (id⊗ε)Δ({name}) = {name}"),
                &lhs,
                g,
            )),
            Err(e) => out.push((format!("hopf: (id⊗ε)Δ({name})"), Err(e))),
        }
    }

    // Gradedness: each tensor term of Δ(g) carries the weight of g.
    for i in 0..nodes {
        let g = ge(data, Gen::E(i));
        let wt = data.simple_root(i);
        let r = match coproduct(data, &g) {
            Ok(cp) => {
                let mut ok = true;
                for ((l, rw), _) in &cp.terms {
                    let sum = l.weight(data).add(&rw.weight(data));
                    if sum != wt {
                        ok = false;
                    }
                }
                if ok {
                    Ok(())
                } else {
                    Err(String::from("a tensor term has the wrong total weight"))
                }
            }
            Err(e) => Err(e),
        };
        out.push((format!("hopf: Δ(E_{i}) is graded"), r));
    }

    // The loop alphabet is rejected.
    let loop_elem = ge(data, Gen::Xp(1, 1));
    out.push((
        String::from("hopf: Δ rejects the loop alphabet"),
        match coproduct(data, &loop_elem) {
            Err(_) => Ok(()),
            Ok(_) => Err(String::from("expected an unsupported-alphabet error")),
        },
    ));
    out.push((
        String::from("hopf: S rejects the loop alphabet"),
        match antipode(data, &loop_elem) {
            Err(_) => Ok(()),
            Ok(_) => Err(String::from("expected an unsupported-alphabet error")),
        },
    ));

    // Discriminants: the side-swapped antipode variants fail the axiom.
    {
        let i = 1.min(data.n);
        let e = ge(data, Gen::E(i));
        // variant S'(E_i) = −E_i K_i^{−1}
        let s_variant = ge(data, Gen::E(i))
            .mul(data, &at(k_atom(data, i).inverse()))
            .neg();
        let axiom = s_variant.add(&at(k_atom(data, i).inverse()).mul(data, &e));
        out.push(if axiom.is_zero() {
            (
                String::from("hopf: discriminant — side-swapped S(E) variant"),
                Err(String::from("variant unexpectedly satisfies the axiom")),
            )
        } else {
            inst_note(String::from(
                "hopf: discriminant — side-swapped S(E) variant fails the axiom",
            ))
        });
        // variant S'(F_i) = −K_i F_i
        let f = ge(data, Gen::F(i));
        let s_variant_f = at(k_atom(data, i)).mul(data, &ge(data, Gen::F(i))).neg();
        let axiom_f = s_variant_f
            .mul(data, &at(k_atom(data, i).inverse()))
            .add(&f);
        out.push(if axiom_f.is_zero() {
            (
                String::from("hopf: discriminant — side-swapped S(F) variant"),
                Err(String::from("variant unexpectedly satisfies the axiom")),
            )
        } else {
            inst_note(String::from(
                "hopf: discriminant — side-swapped S(F) variant fails the axiom",
            ))
        });
    }

    // Φ and Ω interact as involutions on the Chevalley alphabet.
    for i in 0..nodes {
        let g = ge(data, Gen::E(i)).scale(&RatFunc::v_pow(1));
        let phi2 = phi_map(data, &phi_map(data, &g).expect("alphabet"))
            .expect("alphabet");
        out.push(inst_eq_literal(format!("hopf: Φ²(v·E_{i}) = v·E_{i}"), &phi2, &g));
        let om2 = omega_map(data, &omega_map(data, &g));
        out.push(inst_eq_literal(format!("hopf: Ω²(v·E_{i}) = v·E_{i}"), &om2, &g));
        let po = phi_map(data, &omega_map(data, &g)).expect("alphabet");
        let op = omega_map(data, &phi_map(data, &g).expect("alphabet"));
        out.push(inst_eq_literal(
            format!("hopf: ΦΩ(v·E_{i}) = ΩΦ(v·E_{i})"),
            &po,
            &op,
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Suite: aform_triangular — randomized triangular-decomposition checks
// ---------------------------------------------------------------------------

/// A tiny deterministic PRNG (split-mix), good enough for reproducible
/// randomized suites and safe without the standard library.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n.max(1)
    }

    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}

/// A random word element over the loop alphabet whose total mode mass
/// `Σ|mode|` stays within `mass_budget` per word. Every letter mode produced
/// during reduction, and every crossing sum, is bounded by that initial
/// mass, so words sampled with the table's window as the budget reduce
/// entirely inside the table's coverage.
pub fn random_loop_element(
    data: &CartanData,
    rng: &mut SplitMix64,
    max_letters: usize,
    mass_budget: i64,
    terms: usize,
) -> Element {
    let mut out = Element::zero();
    for _ in 0..terms.max(1) {
        let len = rng.below(max_letters as u64 + 1) as usize;
        let mut letters = Vec::with_capacity(len);
        let mut mass_left = mass_budget.max(1);
        for _ in 0..len {
            let node = 1 + rng.below(data.n as u64) as usize;
            let g = match rng.below(5) {
                0 => Gen::Xp(node, rng.range_i64(-mass_left, mass_left)),
                1 => Gen::Xm(node, rng.range_i64(-mass_left, mass_left)),
                2 if mass_left >= 1 => {
                    let mut k = rng.range_i64(-mass_left, mass_left);
                    if k == 0 {
                        k = 1;
                    }
                    Gen::H(node, k)
                }
                3 if mass_left >= 1 => Gen::Psi(node, rng.range_i64(1, mass_left)),
                4 if mass_left >= 1 => Gen::Phi(node, -rng.range_i64(1, mass_left)),
                _ => Gen::Xp(node, 0),
            };
            mass_left -= g.mode_magnitude();
            letters.push(g);
        }
        let atom = Atom {
            k: (0..data.n).map(|_| rng.range_i64(-1, 1)).collect(),
            r: rng.range_i64(-1, 1),
            s: rng.range_i64(-2, 2),
        };
        let coeff = &RatFunc::v_pow(rng.range_i64(-2, 2))
            * &RatFunc::from_int(rng.range_i64(1, 3));
        out.add_term(Word { letters, atom }, coeff);
    }
    out
}

/// A random word element over the Chevalley alphabet.
pub fn random_chevalley_element(
    data: &CartanData,
    rng: &mut SplitMix64,
    max_letters: usize,
    terms: usize,
) -> Element {
    let nodes = data.n as u64 + 1;
    let mut out = Element::zero();
    for _ in 0..terms.max(1) {
        let len = rng.below(max_letters as u64 + 1) as usize;
        let mut letters = Vec::with_capacity(len);
        for _ in 0..len {
            let node = rng.below(nodes) as usize;
            letters.push(if rng.below(2) == 0 {
                Gen::E(node)
            } else {
                Gen::F(node)
            });
        }
        let atom = Atom {
            k: (0..data.n).map(|_| rng.range_i64(-1, 1)).collect(),
            r: rng.range_i64(-1, 1),
            s: rng.range_i64(-2, 2),
        };
        let coeff = &RatFunc::v_pow(rng.range_i64(-2, 2))
            * &RatFunc::from_int(rng.range_i64(1, 3));
        out.add_term(Word { letters, atom }, coeff);
    }
    out
}

fn is_triangular(e: &Element) -> bool {
    e.terms
        .keys()
        .all(|w| order_key(&w.letters).c_inv == 0)
}

/// Randomized triangular-decomposition checks on a loop-presentation table:
/// every sampled element (including samples multiplied by integral-form
/// bracket elements) reduces successfully; the result is block-sorted
/// (lowering, Cartan, raising), reduction is idempotent, and the left-greedy
/// and right-greedy strategies agree. Samples are drawn with total mode mass
/// within the table window, the domain on which the windowed table is a
/// complete straightening system.
pub fn suite_aform_triangular(rules: &RuleSet, samples: usize, seed: u64) -> Vec<Instance> {
    let data = &rules.data;
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::new();
    let mass_budget = rules.mode_bound;
    for s in 0..samples {
        let mut e = random_loop_element(data, &mut rng, 4, mass_budget, 2);
        // Mix in an integral-form bracket factor on a third of the samples.
        match s % 3 {
            0 => {
                let j = 1 + rng.below(data.n as u64) as usize;
                let b = lusztig_k(data, j, rng.range_i64(-2, 2), rng.range_i64(1, 2));
                e = e.mul(data, &b);
            }
            1 => {
                let b = lusztig_d(data, rng.range_i64(-2, 2), rng.range_i64(1, 2));
                e = b.mul(data, &e);
            }
            _ => {}
        }
        let name = format!("aform_triangular: sample #{s}");
        let n1 = match nf(rules, &e, SUITE_BUDGET) {
            Ok(x) => x,
            Err(err) => {
                out.push((name, Err(err)));
                continue;
            }
        };
        if !is_triangular(&n1) {
            out.push((
                name,
                Err(String::from(
                    "normal form is not block-sorted (lowering/Cartan/raising)",
                )),
            ));
            continue;
        }
        let n2 = match nf(rules, &n1, SUITE_BUDGET) {
            Ok(x) => x,
            Err(err) => {
                out.push((name, Err(format!("second reduction failed: {err}"))));
                continue;
            }
        };
        if n2 != n1 {
            out.push((name, Err(String::from("reduction is not idempotent"))));
            continue;
        }
        let mut budget = SUITE_BUDGET;
        let nr = match crate::algebra::normal_form(rules, &e, &mut budget, Strategy::RightGreedy)
        {
            Ok(x) => x,
            Err(err) => {
                out.push((name, Err(format!("right-greedy reduction failed: {err}"))));
                continue;
            }
        };
        if nr != n1 {
            out.push((
                name,
                Err(String::from("left-greedy and right-greedy normal forms differ")),
            ));
            continue;
        }
        out.push((name, Ok(())));
    }
    out
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsystem::TypeLetter;

    fn a1() -> CartanData {
        CartanData::new(TypeLetter::A, 1).unwrap()
    }

    fn a2() -> CartanData {
        CartanData::new(TypeLetter::A, 2).unwrap()
    }

    fn assert_suite(instances: &[Instance]) {
        let failures = suite_failures(instances);
        assert!(
            failures.is_empty(),
            "{} of {} instances failed:\n{}",
            failures.len(),
            instances.len(),
            failures.join("\n")
        );
    }

    #[test]
    fn psi_expansion_small_modes() {
        let data = a1();
        // ψ_1 = (q−q^{−1}) K h_1
        let e1 = psi_expansion(&data, 1, 1);
        let mut expect = Element::zero();
        expect.add_term(
            Word {
                letters: vec![Gen::H(1, 1)],
                atom: k_atom(&data, 1),
            },
            q_diff(1),
        );
        assert_eq!(e1, expect);
        // ψ_2 = K ((q−q^{−1}) h_2 + (q−q^{−1})²/2 h_1²)
        let e2 = psi_expansion(&data, 1, 2);
        let qd = q_diff(1);
        let mut expect2 = Element::zero();
        expect2.add_term(
            Word {
                letters: vec![Gen::H(1, 2)],
                atom: k_atom(&data, 1),
            },
            qd.clone(),
        );
        expect2.add_term(
            Word {
                letters: vec![Gen::H(1, 1), Gen::H(1, 1)],
                atom: k_atom(&data, 1),
            },
            &(&qd * &qd) / &RatFunc::from_int(2),
        );
        assert_eq!(e2, expect2);
        // φ_{−1} = −(q−q^{−1}) K^{−1} h_{−1}
        let f1 = phi_expansion(&data, 1, -1);
        let mut expectf = Element::zero();
        expectf.add_term(
            Word {
                letters: vec![Gen::H(1, -1)],
                atom: k_atom(&data, 1).inverse(),
            },
            -&q_diff(1),
        );
        assert_eq!(f1, expectf);
    }

    #[test]
    fn lusztig_bracket_shapes() {
        let data = a1();
        // [K_1; s, 1] = (K q^s − K^{−1} q^{−s})/(q − q^{−1})
        let b = lusztig_k(&data, 1, 2, 1);
        let expect = at(k_atom(&data, 1))
            .scale(&RatFunc::q_pow(2))
            .sub(&at(k_atom(&data, 1).inverse()).scale(&RatFunc::q_pow(-2)))
            .scale(&q_diff(1).inv());
        assert_eq!(b, expect);
        // [γ; 0]_1 = 0
        assert!(lusztig_gamma(&data, 1, 0).is_zero());
        // [γψ_1; k, −k] has zero weight: the ψ/φ parts sit at mode 0.
        let gp = lusztig_gamma_psi(&data, 1, 2, -2);
        let wt = gp.homogeneous_weight(&data).unwrap().unwrap();
        assert!(wt.is_zero());
    }

    #[test]
    fn chevalley_table_and_suite_rank1() {
        let data = a1();
        let rules = chevalley_rules(&data).unwrap();
        assert_suite(&suite_chevalley(&rules));
    }

    #[test]
    fn hopf_suite_rank1() {
        let data = a1();
        let rules = chevalley_rules(&data).unwrap();
        assert_suite(&suite_hopf(&rules));
    }

    #[test]
    fn drinfeld_table_and_suite_rank1_small() {
        let data = a1();
        let rules = drinfeld_rules(&data, 4).unwrap();
        assert_suite(&suite_drinfeld(&rules, 2));
    }

    #[test]
    fn psix2_suite_rank1_small() {
        let data = a1();
        let rules = drinfeld_rules(&data, 4).unwrap();
        assert_suite(&suite_psix2(&rules, 3, 1));
    }

    #[test]
    fn arelns_suite_rank1_small() {
        let data = a1();
        let rules = drinfeld_rules(&data, 4).unwrap();
        assert_suite(&suite_arelns(&rules, 2, 2, 2));
    }

    #[test]
    fn formal_sums_suite_rank1_small() {
        let data = a1();
        let rules = drinfeld_rules(&data, 4).unwrap();
        assert_suite(&suite_formal_sums(&rules, 2));
    }

    #[test]
    fn aform_triangular_suite_rank1_small() {
        let data = a1();
        let rules = drinfeld_rules(&data, 4).unwrap();
        assert_suite(&suite_aform_triangular(&rules, 24, 0xC0FFEE));
    }

    #[test]
    fn drinfeld_table_rank2_tiny() {
        let data = a2();
        let rules = drinfeld_rules_with(&data, 2, 1).unwrap();
        // Loop Serre relations within the instantiated cap reduce to zero.
        for raising in [true, false] {
            for k1 in -1..=1 {
                for k2 in k1..=1 {
                    for l in -1..=1 {
                        let rel = loop_serre_relation(&data, 1, 2, &[k1, k2], l, raising);
                        let z = nf(&rules, &rel, SUITE_BUDGET).unwrap();
                        assert!(z.is_zero(), "loop Serre residual at [{k1},{k2}];{l}");
                    }
                }
            }
        }
        // A mixed product reduces and is block-sorted.
        let e = ge(&data, Gen::Xp(1, 1)).mul(&data, &ge(&data, Gen::Xm(2, -1)));
        let z = nf(&rules, &e, SUITE_BUDGET).unwrap();
        assert!(is_triangular(&z));
    }

    #[test]
    fn omega_is_involutive_on_loop_alphabet() {
        let data = a2();
        let mut rng = SplitMix64::new(7);
        for _ in 0..10 {
            let e = random_loop_element(&data, &mut rng, 3, 2, 2);
            assert_eq!(omega_map(&data, &omega_map(&data, &e)), e);
        }
    }

    #[test]
    fn coproduct_counit_antipode_generators() {
        let data = a1();
        for i in 0..=1usize {
            let e = ge(&data, Gen::E(i));
            let lhs = hopf_axiom_left(&data, &e).unwrap();
            assert!(lhs.is_zero());
            let rhs = hopf_axiom_right(&data, &e).unwrap();
            assert!(rhs.is_zero());
            assert_eq!(counit_left(&data, &e).unwrap(), e);
            assert_eq!(counit_right(&data, &e).unwrap(), e);
        }
        let k = at(k_atom(&data, 1));
        assert_eq!(
            hopf_axiom_left(&data, &k).unwrap(),
            Element::one(&data)
        );
    }

    #[test]
    fn phi_map_preserves_relations() {
        let data = a1();
        let rules = chevalley_rules(&data).unwrap();
        for i in 0..=1usize {
            for j in 0..=1usize {
                let rel = chevalley_ef_relation(&data, i, j);
                let img = phi_map(&data, &rel).unwrap();
                let z = nf(&rules, &img, SUITE_BUDGET).unwrap();
                assert!(z.is_zero(), "Φ image of bracket relation ({i},{j})");
            }
        }
        let serre = chevalley_serre_relation(&data, 0, 1, true);
        let img = phi_map(&data, &serre).unwrap();
        let z = nf(&rules, &img, SUITE_BUDGET).unwrap();
        assert!(z.is_zero());
    }
}
