//! Braid-group operators on the Chevalley presentation.
//!
//! For each affine node `i` this module realizes the algebra automorphism
//! `T_i` (and its inverse), the diagram-twist automorphisms `T_τ`, and their
//! composites `T_w` for extended affine Weyl elements `w`, acting on
//! elements written in the Chevalley alphabet. The signed translation
//! operators `T̂_{ω_i} = o(i)·T_{ω_i}` are the workhorses for building loop
//! root vectors inside the Chevalley presentation.
//!
//! Letter images:
//!
//! * `T_i(E_i) = −F_i K_i`, `T_i(F_i) = −K_i^{−1} E_i`;
//! * `T_i(E_j) = Σ_{r=0}^{m} (−1)^{r+m} q_i^{−r} E_i^{(m−r)} E_j E_i^{(r)}`
//!   and
//!   `T_i(F_j) = Σ_{r=0}^{m} (−1)^{r+m} q_i^{r} F_i^{(r)} F_j F_i^{(m−r)}`
//!   for `j ≠ i`, `m = −a_ij`;
//! * on atoms, `T_i(K_μ) = K_{s_i μ}` and `T_0(D) = D K_{α_0}^{−1}` (`T_i`
//!   fixes `D` for `i ≠ 0`); `γ^{±1/2}` is always fixed.
//!
//! The inverses swap the divided powers to the other side:
//! `T_i^{−1}(E_i) = −K_i^{−1} F_i`, `T_i^{−1}(F_i) = −E_i K_i`,
//! `T_i^{−1}(E_j) = Σ (−1)^{r+m} q_i^{−r} E_i^{(r)} E_j E_i^{(m−r)}`,
//! `T_i^{−1}(F_j) = Σ (−1)^{r+m} q_i^{r} F_i^{(m−r)} F_j F_i^{(r)}`.
//!
//! A diagram twist relabels letters and maps `K_{α_j} ↦ K_{α_{τ(j)}}`; it is
//! undefined on atoms containing `D` (the twist of the grading operator
//! leaves the atom lattice), and the maps return an error there.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{nf, Atom, Element, Gen, RuleSet, Word};
use crate::coeff::RatFunc;
use crate::presentations::{
    divided_power_e, divided_power_f, k_atom, Instance, SplitMix64, SUITE_BUDGET,
};
use crate::presentations::{omega_map, random_chevalley_element};
use crate::rootsystem::{
    length, omega, reduced_tau_right, CartanData, DiagramAut, ExtWeyl,
};

fn ge(data: &CartanData, g: Gen) -> Element {
    Element::gen(data, g)
}

fn at(a: Atom) -> Element {
    Element::atom(a)
}

/// The image of an atom under `T_i` (an involution on the atom group).
pub fn braid_atom(data: &CartanData, i: usize, a: &Atom) -> Atom {
    let mut out = Atom {
        k: vec![0; data.n],
        r: a.r,
        s: a.s,
    };
    for j in 1..=data.n {
        let c = a.k[j - 1];
        if c == 0 {
            continue;
        }
        // s_i(α_j) = α_j − a_ij α_i
        let img = data
            .simple_root(j)
            .sub(&data.simple_root(i).scaled(data.a[i][j]));
        for m in 0..data.n {
            out.k[m] += c * img.finite[m];
        }
        out.s += 2 * c * img.delta;
    }
    if i == 0 && a.r != 0 {
        // T_0(D) = D K_{α_0}^{−1} = D γ^{−1} K_θ
        for m in 0..data.n {
            out.k[m] += a.r * data.theta[m];
        }
        out.s -= 2 * a.r;
    }
    out
}

fn tau_atom_by<F: Fn(usize) -> usize>(
    data: &CartanData,
    node_map: F,
    trivial: bool,
    a: &Atom,
) -> Result<Atom, String> {
    if a.r != 0 && !trivial {
        return Err(String::from(
            "a diagram twist is undefined on atoms containing the grading operator D",
        ));
    }
    let mut out = Atom {
        k: vec![0; data.n],
        r: a.r,
        s: a.s,
    };
    for j in 1..=data.n {
        let c = a.k[j - 1];
        if c == 0 {
            continue;
        }
        let img = data.simple_root(node_map(j));
        for m in 0..data.n {
            out.k[m] += c * img.finite[m];
        }
        out.s += 2 * c * img.delta;
    }
    Ok(out)
}

/// The image of one Chevalley letter under `T_i` (`inverse: false`) or
/// `T_i^{−1}` (`inverse: true`).
pub fn braid_letter(
    data: &CartanData,
    i: usize,
    g: &Gen,
    inverse: bool,
) -> Result<Element, String> {
    match g {
        Gen::E(j) if *j == i => Ok(if !inverse {
            ge(data, Gen::F(i)).mul(data, &at(k_atom(data, i))).neg()
        } else {
            at(k_atom(data, i).inverse())
                .mul(data, &ge(data, Gen::F(i)))
                .neg()
        }),
        Gen::F(j) if *j == i => Ok(if !inverse {
            at(k_atom(data, i).inverse())
                .mul(data, &ge(data, Gen::E(i)))
                .neg()
        } else {
            ge(data, Gen::E(i)).mul(data, &at(k_atom(data, i))).neg()
        }),
        Gen::E(j) => {
            let m = -data.a[i][*j];
            let mut out = Element::zero();
            for r in 0..=m {
                let (first, last) = if !inverse { (m - r, r) } else { (r, m - r) };
                let term = Element::product(
                    data,
                    &[
                        divided_power_e(data, i, first as u32),
                        ge(data, Gen::E(*j)),
                        divided_power_e(data, i, last as u32),
                    ],
                )
                .scale(&RatFunc::qi_pow(-r, data.d[i]));
                out = if (r + m) % 2 == 0 {
                    out.add(&term)
                } else {
                    out.sub(&term)
                };
            }
            Ok(out)
        }
        Gen::F(j) => {
            let m = -data.a[i][*j];
            let mut out = Element::zero();
            for r in 0..=m {
                let (first, last) = if !inverse { (r, m - r) } else { (m - r, r) };
                let term = Element::product(
                    data,
                    &[
                        divided_power_f(data, i, first as u32),
                        ge(data, Gen::F(*j)),
                        divided_power_f(data, i, last as u32),
                    ],
                )
                .scale(&RatFunc::qi_pow(r, data.d[i]));
                out = if (r + m) % 2 == 0 {
                    out.add(&term)
                } else {
                    out.sub(&term)
                };
            }
            Ok(out)
        }
        other => Err(format!(
            "braid operators act on the Chevalley alphabet only (got {:?})",
            other
        )),
    }
}

fn braid_t_dir(
    data: &CartanData,
    i: usize,
    e: &Element,
    inverse: bool,
) -> Result<Element, String> {
    let mut out = Element::zero();
    for (w, c) in &e.terms {
        let mut acc = Element::scalar(data, c.clone());
        for g in &w.letters {
            acc = acc.mul(data, &braid_letter(data, i, g, inverse)?);
        }
        acc = acc.mul(data, &at(braid_atom(data, i, &w.atom)));
        out = out.add(&acc);
    }
    Ok(out)
}

/// `T_i` on an element of the Chevalley alphabet.
pub fn braid_t(data: &CartanData, i: usize, e: &Element) -> Result<Element, String> {
    braid_t_dir(data, i, e, false)
}

/// `T_i^{−1}` on an element of the Chevalley alphabet.
pub fn braid_t_inv(data: &CartanData, i: usize, e: &Element) -> Result<Element, String> {
    braid_t_dir(data, i, e, true)
}

fn braid_tau_by<F: Fn(usize) -> usize>(
    data: &CartanData,
    node_map: F,
    trivial: bool,
    e: &Element,
) -> Result<Element, String> {
    let mut out = Element::zero();
    for (w, c) in &e.terms {
        let mut letters = Vec::with_capacity(w.letters.len());
        for g in &w.letters {
            letters.push(match g {
                Gen::E(j) => Gen::E(node_map(*j)),
                Gen::F(j) => Gen::F(node_map(*j)),
                other => {
                    return Err(format!(
                        "diagram twists act on the Chevalley alphabet only (got {:?})",
                        other
                    ))
                }
            });
        }
        let atom = tau_atom_by(data, &node_map, trivial, &w.atom)?;
        out.add_term(Word { letters, atom }, c.clone());
    }
    Ok(out)
}

/// The diagram-twist automorphism `T_τ`.
pub fn braid_tau(data: &CartanData, tau: &DiagramAut, e: &Element) -> Result<Element, String> {
    braid_tau_by(data, |j| tau.apply(j), tau.is_identity(), e)
}

/// The inverse diagram-twist automorphism `T_τ^{−1}`.
pub fn braid_tau_inv(
    data: &CartanData,
    tau: &DiagramAut,
    e: &Element,
) -> Result<Element, String> {
    braid_tau_by(data, |j| tau.inverse_apply(j), tau.is_identity(), e)
}

/// `T` along an explicit node word: `T_{w_0} ∘ T_{w_1} ∘ ⋯` (the last node of
/// the word acts first).
pub fn braid_word(data: &CartanData, word: &[usize], e: &Element) -> Result<Element, String> {
    let mut cur = e.clone();
    for &j in word.iter().rev() {
        cur = braid_t(data, j, &cur)?;
    }
    Ok(cur)
}

/// `T_w` for an extended affine Weyl element, through the deterministic
/// τ-right reduced form `w = s_{j_1}⋯s_{j_l}·τ` (so `T_τ` acts first).
pub fn braid_ext(data: &CartanData, w: &ExtWeyl, e: &Element) -> Result<Element, String> {
    let (word, tau) = reduced_tau_right(data, w);
    let mut cur = braid_tau(data, &tau, e)?;
    for &j in word.iter().rev() {
        cur = braid_t(data, j, &cur)?;
    }
    Ok(cur)
}

/// `T_w^{−1}` for an extended affine Weyl element.
pub fn braid_ext_inv(data: &CartanData, w: &ExtWeyl, e: &Element) -> Result<Element, String> {
    let (word, tau) = reduced_tau_right(data, w);
    let mut cur = e.clone();
    for &j in word.iter() {
        cur = braid_t_inv(data, j, &cur)?;
    }
    braid_tau_inv(data, &tau, &cur)
}

/// The signed translation operator power `T̂_{ω_i}^k = o(i)^k · T_{ω_i}^k`
/// (`i` a finite node, any `k ∈ ℤ`).
pub fn omega_hat_power(
    data: &CartanData,
    i: usize,
    k: i64,
    e: &Element,
) -> Result<Element, String> {
    let t = ExtWeyl::translation(omega(data, i));
    let mut cur = e.clone();
    for _ in 0..k.abs() {
        cur = if k >= 0 {
            braid_ext(data, &t, &cur)?
        } else {
            braid_ext_inv(data, &t, &cur)?
        };
    }
    if data.o_signs()[i] < 0 && k.rem_euclid(2) == 1 {
        cur = cur.neg();
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// Suite: braid
// ---------------------------------------------------------------------------

fn generator_list(data: &CartanData) -> Vec<(String, Element)> {
    let mut gens = Vec::new();
    for j in 0..=data.n {
        gens.push((format!("E_{j}"), ge(data, Gen::E(j))));
        gens.push((format!("F_{j}"), ge(data, Gen::F(j))));
        gens.push((format!("K_{j}"), at(k_atom(data, j))));
    }
    gens.push((
        String::from("γ^(1/2)"),
        at(Atom {
            k: vec![0; data.n],
            r: 0,
            s: 1,
        }),
    ));
    gens.push((
        String::from("D"),
        at(Atom {
            k: vec![0; data.n],
            r: 1,
            s: 0,
        }),
    ));
    gens
}

fn eq_nf(name: String, rules: &RuleSet, a: &Element, b: &Element) -> Instance {
    let diff = a.sub(b);
    match nf(rules, &diff, SUITE_BUDGET) {
        Ok(z) if z.is_zero() => (name, Ok(())),
        Ok(z) => (
            name,
            Err(format!("sides differ by {} terms after reduction", z.terms.len())),
        ),
        Err(e) => (name, Err(e)),
    }
}

/// The braid suite on a Chevalley table: `T_i T_i^{−1} = id` both ways on
/// every generator, the braid relations on every finite-order node pair, the
/// reduced-word independence of `T_w` up to length 3, the interaction with
/// `Ω` on randomized elements, and spot checks of the atom action.
pub fn suite_braid(rules: &RuleSet, samples: usize, seed: u64) -> Vec<Instance> {
    let data = &rules.data;
    let gens = generator_list(data);
    let mut out = Vec::new();

    // T_i T_i^{-1} = id = T_i^{-1} T_i on every generator.
    for i in 0..=data.n {
        for (gname, g) in &gens {
            let fwd_back = braid_t(data, i, &braid_t_inv(data, i, g).expect("alphabet"))
                .expect("alphabet");
            out.push(eq_nf(
                format!("braid: T_{i} T_{i}^-1 ({gname})"),
                rules,
                &fwd_back,
                g,
            ));
            let back_fwd = braid_t_inv(data, i, &braid_t(data, i, g).expect("alphabet"))
                .expect("alphabet");
            out.push(eq_nf(
                format!("braid: T_{i}^-1 T_{i} ({gname})"),
                rules,
                &back_fwd,
                g,
            ));
        }
    }

    // Braid relations on node pairs of finite braid order.
    for i in 0..=data.n {
        for j in (i + 1)..=data.n {
            let prod = data.a[i][j] * data.a[j][i];
            let (wi, wj): (Vec<usize>, Vec<usize>) = match prod {
                0 => (vec![i, j], vec![j, i]),
                1 => (vec![i, j, i], vec![j, i, j]),
                _ => continue, // order ≥ 4 or ∞: no finite braid relation checked
            };
            for (gname, g) in &gens {
                let a = braid_word(data, &wi, g).expect("alphabet");
                let b = braid_word(data, &wj, g).expect("alphabet");
                out.push(eq_nf(
                    format!("braid: braid relation ({i},{j}) on {gname}"),
                    rules,
                    &a,
                    &b,
                ));
            }
        }
    }

    // Reduced-word independence: all reduced words of length ≤ 3 for the same
    // element induce the same operator; the canonical decomposition agrees.
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    for len in 1..=3usize {
        let mut next = Vec::new();
        for w in words.iter().filter(|w| w.len() == len - 1) {
            for j in 0..=data.n {
                let mut w2 = w.clone();
                w2.push(j);
                next.push(w2);
            }
        }
        words.extend(next);
    }
    let mut by_element: Vec<(ExtWeyl, Vec<Vec<usize>>)> = Vec::new();
    for w in words.iter().filter(|w| !w.is_empty()) {
        let mut elt = ExtWeyl::identity(data);
        for &j in w {
            elt = elt.mul(&ExtWeyl::simple(data, j));
        }
        if length(data, &elt) != w.len() {
            continue; // not reduced
        }
        match by_element.iter_mut().find(|(e, _)| *e == elt) {
            Some((_, ws)) => ws.push(w.clone()),
            None => by_element.push((elt, vec![w.clone()])),
        }
    }
    for (elt, ws) in &by_element {
        if ws.len() < 2 {
            continue;
        }
        let probe: Vec<&(String, Element)> = gens.iter().collect();
        for (gname, g) in probe {
            let first = braid_word(data, &ws[0], g).expect("alphabet");
            for w2 in &ws[1..] {
                let other = braid_word(data, w2, g).expect("alphabet");
                out.push(eq_nf(
                    format!(
                        "braid: reduced words {:?} vs {:?} on {gname}",
                        ws[0], w2
                    ),
                    rules,
                    &other,
                    &first,
                ));
            }
            let canonical = braid_ext(data, elt, g).expect("alphabet");
            out.push(eq_nf(
                format!("braid: canonical T_w vs word {:?} on {gname}", ws[0]),
                rules,
                &canonical,
                &first,
            ));
        }
    }

    // T_j commutes with Ω on randomized elements.
    let mut rng = SplitMix64::new(seed);
    for s in 0..samples {
        let e = random_chevalley_element(data, &mut rng, 4, 2);
        let j = rng.below(data.n as u64 + 1) as usize;
        let a = braid_t(data, j, &omega_map(data, &e)).expect("alphabet");
        let b = omega_map(data, &braid_t(data, j, &e).expect("alphabet"));
        out.push(eq_nf(
            format!("braid: T_{j} Ω = Ω T_{j} on sample #{s}"),
            rules,
            &a,
            &b,
        ));
    }

    // Atom action spot check: T_1(K_0) = K_0 K_1^{−a_10}.
    {
        let img = braid_atom(data, 1, &k_atom(data, 0));
        let expect = k_atom(data, 0).combine(&Atom {
            k: {
                let mut k = vec![0; data.n];
                k[0] = -data.a[1][0];
                k
            },
            r: 0,
            s: 0,
        });
        out.push((
            String::from("braid: T_1(K_0) matches the reflected root"),
            if img == expect {
                Ok(())
            } else {
                Err(format!("got {:?}, expected {:?}", img, expect))
            },
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{chevalley_rules, suite_failures, suite_passes};
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
    fn braid_atom_rank1_example() {
        let data = a1();
        // T_1(K_0) = K_0 K_1^2 in the rank-1 affine algebra
        let img = braid_atom(&data, 1, &k_atom(&data, 0));
        assert_eq!(img.k, vec![1]);
        assert_eq!(img.s, 2);
        assert_eq!(img.r, 0);
        // involution
        assert_eq!(braid_atom(&data, 1, &img), k_atom(&data, 0));
        // T_0 on D
        let d = Atom {
            k: vec![0],
            r: 1,
            s: 0,
        };
        let dimg = braid_atom(&data, 0, &d);
        assert_eq!(dimg.k, vec![1]);
        assert_eq!(dimg.s, -2);
        assert_eq!(dimg.r, 1);
        assert_eq!(braid_atom(&data, 0, &dimg), d);
    }

    #[test]
    fn braid_suite_rank1() {
        let data = a1();
        let rules = chevalley_rules(&data).unwrap();
        let s = suite_braid(&rules, 10, 0xB1A1D);
        assert_suite(&s);
        assert!(suite_passes(&s));
    }

    #[test]
    fn braid_suite_rank2() {
        let data = a2();
        let rules = chevalley_rules(&data).unwrap();
        let s = suite_braid(&rules, 6, 0xB1A2D);
        assert_suite(&s);
    }

    #[test]
    fn translation_operator_sends_f_to_loop_letter_weight() {
        // T̂_{ω_1}(F_1) must be homogeneous of weight −α_1 + δ.
        let data = a1();
        let f1 = Element::gen(&data, Gen::F(1));
        let img = omega_hat_power(&data, 1, 1, &f1).unwrap();
        let wt = img.homogeneous_weight(&data).unwrap().unwrap();
        let expect = data.simple_root(1).neg().add(&data.delta());
        assert_eq!(wt, expect);
    }

    #[test]
    fn omega_hat_round_trip() {
        let data = a1();
        let rules = chevalley_rules(&data).unwrap();
        let f1 = Element::gen(&data, Gen::F(1));
        let there = omega_hat_power(&data, 1, 2, &f1).unwrap();
        let back = omega_hat_power(&data, 1, -2, &there).unwrap();
        let z = nf(&rules, &back.sub(&f1), SUITE_BUDGET).unwrap();
        assert!(z.is_zero());
    }
}
