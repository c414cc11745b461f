//! The exact computation engine: words, elements, rewriting.
//!
//! Elements of the algebra are finite `Q(v)`-linear combinations of *words*.
//! A word is a sequence of non-invertible generator letters together with a
//! single *Cartan atom* `K_x D^r γ^{s/2}` kept at the right end; the atom part
//! is a canonical normal form for the invertible generators, because they
//! commute with each other and move across letters by explicit `q`-power
//! scalars:
//!
//! * `K_x · L = q^{(x | wt₀ L)} · L · K_x` where `wt₀` is the finite part of
//!   the `Q`-weight of the letter `L`,
//! * `D^r · L = q^{r·m} · L · D^r` where `m` is the δ-part of the weight,
//! * `γ^{s/2}` is central.
//!
//! Letters come in two dialects that may be mixed in a word: the
//! Chevalley–Serre generators `E_i, F_i` (nodes `0..=N`) and the loop
//! generators `x^±_{i,k}, h_{i,k}, ψ_{i,k}, φ_{i,−k}` (nodes `1..=N`).
//!
//! Rewriting: a `RuleSet` maps concrete letter sequences to elements. Every
//! rule is validated at install time against a well-founded word order that
//! is stable under contexts, so rule application always terminates; a step
//! budget and a mode-window guard turn the remaining failure modes
//! (combinatorial blowup, probes that leave the region the rules cover) into
//! explicit errors instead of wrong answers. Local confluence on a region is
//! a separate, checkable property (`check_overlaps`), and rule sets can be
//! saturated by bounded Knuth–Bendix completion (`complete`).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::coeff::RatFunc;
use crate::rootsystem::{CartanData, RootQ};

// ---- Letters ----

/// A non-invertible generator letter.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Gen {
    /// Chevalley raising generator, node `0..=N`.
    E(usize),
    /// Chevalley lowering generator, node `0..=N`.
    F(usize),
    /// Loop raising generator `x^+_{i,k}`, node `1..=N`, any mode.
    Xp(usize, i64),
    /// Loop lowering generator `x^-_{i,k}`, node `1..=N`, any mode.
    Xm(usize, i64),
    /// Imaginary loop generator `h_{i,k}`, node `1..=N`, mode `k ≠ 0`.
    H(usize, i64),
    /// `ψ_{i,k}`, node `1..=N`, mode `k ≥ 1` (the mode-0 part is `K_i`).
    Psi(usize, i64),
    /// `φ_{i,k}`, node `1..=N`, mode `k ≤ −1` (the mode-0 part is `K_i^{-1}`).
    Phi(usize, i64),
}

impl Gen {
    /// Straightening class: lowering letters sort left, raising letters right.
    pub fn class(&self) -> u8 {
        match self {
            Gen::F(_) | Gen::Xm(_, _) => 0,
            Gen::Phi(_, _) => 1,
            Gen::H(_, k) => {
                if *k < 0 {
                    1
                } else {
                    2
                }
            }
            Gen::Psi(_, _) => 2,
            Gen::E(_) | Gen::Xp(_, _) => 3,
        }
    }

    pub fn node(&self) -> usize {
        match self {
            Gen::E(i) | Gen::F(i) | Gen::Xp(i, _) | Gen::Xm(i, _) | Gen::H(i, _)
            | Gen::Psi(i, _) | Gen::Phi(i, _) => *i,
        }
    }

    /// The `Q`-weight of the letter.
    pub fn weight(&self, data: &CartanData) -> RootQ {
        match self {
            Gen::E(i) => data.simple_root(*i),
            Gen::F(i) => data.simple_root(*i).neg(),
            Gen::Xp(i, k) => {
                let mut w = data.simple_root(*i);
                w.delta = *k;
                w
            }
            Gen::Xm(i, k) => {
                let mut w = data.simple_root(*i).neg();
                w.delta = *k;
                w
            }
            Gen::H(_, k) | Gen::Psi(_, k) | Gen::Phi(_, k) => RootQ {
                finite: vec![0; data.n],
                delta: *k,
            },
        }
    }

    /// Mode key used by the word order: a pair of non-negative integers,
    /// chosen so that the canonical factor sequence of each block is
    /// key-ascending.
    pub fn mode_key(&self) -> (i64, i64) {
        match self {
            Gen::E(_) | Gen::F(_) => (0, 0),
            Gen::Xp(_, m) => {
                if *m >= 0 {
                    (0, *m)
                } else {
                    (1, -m)
                }
            }
            Gen::Xm(_, m) => {
                if *m <= 0 {
                    (0, -m)
                } else {
                    (1, *m)
                }
            }
            Gen::H(_, k) | Gen::Psi(_, k) | Gen::Phi(_, k) => (k.abs(), 0),
        }
    }

    /// Largest |mode| mentioned by the letter (0 for Chevalley letters).
    pub fn mode_magnitude(&self) -> i64 {
        match self {
            Gen::E(_) | Gen::F(_) => 0,
            Gen::Xp(_, m) | Gen::Xm(_, m) | Gen::H(_, m) | Gen::Psi(_, m) | Gen::Phi(_, m) => {
                m.abs()
            }
        }
    }

    pub fn is_psi_phi(&self) -> bool {
        matches!(self, Gen::Psi(_, _) | Gen::Phi(_, _))
    }

    pub fn is_x_class(&self) -> bool {
        matches!(self, Gen::E(_) | Gen::F(_) | Gen::Xp(_, _) | Gen::Xm(_, _))
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::E(i) => write!(f, "E[{}]", i),
            Gen::F(i) => write!(f, "F[{}]", i),
            Gen::Xp(i, k) => write!(f, "x+[{},{}]", i, k),
            Gen::Xm(i, k) => write!(f, "x-[{},{}]", i, k),
            Gen::H(i, k) => write!(f, "h[{},{}]", i, k),
            Gen::Psi(i, k) => write!(f, "psi[{},{}]", i, k),
            Gen::Phi(i, k) => write!(f, "phi[{},{}]", i, k),
        }
    }
}

// ---- Cartan atoms ----

/// The invertible part of a word: `K_{Σ k_i α_i} D^r γ^{s/2}` with `k` over
/// the finite simple roots. `K_δ` is identified with `γ` (so `K_{α_0}`
/// becomes `k = −θ, s = 2`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Atom {
    pub k: Vec<i64>,
    pub r: i64,
    pub s: i64,
}

impl Atom {
    pub fn identity(n: usize) -> Atom {
        Atom {
            k: vec![0; n],
            r: 0,
            s: 0,
        }
    }

    /// `K_α` for an affine lattice element `α = x + nδ` (δ-part becomes `γ`).
    pub fn k_root(alpha: &RootQ) -> Atom {
        Atom {
            k: alpha.finite.clone(),
            r: 0,
            s: 2 * alpha.delta,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.r == 0 && self.s == 0 && self.k.iter().all(|&c| c == 0)
    }

    pub fn combine(&self, other: &Atom) -> Atom {
        Atom {
            k: self.k.iter().zip(&other.k).map(|(a, b)| a + b).collect(),
            r: self.r + other.r,
            s: self.s + other.s,
        }
    }

    pub fn inverse(&self) -> Atom {
        Atom {
            k: self.k.iter().map(|c| -c).collect(),
            r: -self.r,
            s: -self.s,
        }
    }

    /// Exponent `e` with `atom · w = q^e · w · atom` for a letter sequence of
    /// total weight `w`.
    pub fn cross_exponent(&self, data: &CartanData, w: &RootQ) -> i64 {
        data.bilinear_fin(&self.k, &w.finite) + self.r * w.delta
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.k.iter().any(|&c| c != 0) {
            let coords: Vec<String> = self.k.iter().map(|c| c.to_string()).collect();
            parts.push(format!("K[{}]", coords.join(",")));
        }
        if self.r != 0 {
            if self.r == 1 {
                parts.push("Dp".to_string());
            } else if self.r == -1 {
                parts.push("Dm".to_string());
            } else if self.r > 0 {
                parts.push(format!("Dp^{}", self.r));
            } else {
                parts.push(format!("Dm^{}", -self.r));
            }
        }
        if self.s != 0 {
            parts.push(format!("g[{}]", self.s));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

// ---- Words and elements ----

/// A word: letters followed (on the right) by a Cartan atom.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Word {
    pub letters: Vec<Gen>,
    pub atom: Atom,
}

impl Word {
    pub fn one(data: &CartanData) -> Word {
        Word {
            letters: Vec::new(),
            atom: Atom::identity(data.n),
        }
    }

    pub fn from_gen(data: &CartanData, g: Gen) -> Word {
        Word {
            letters: vec![g],
            atom: Atom::identity(data.n),
        }
    }

    pub fn from_atom(atom: Atom) -> Word {
        Word {
            letters: Vec::new(),
            atom,
        }
    }

    /// Total `Q`-weight of the word (atoms have weight zero).
    pub fn weight(&self, data: &CartanData) -> RootQ {
        let mut w = RootQ::zero(data.n);
        for l in &self.letters {
            w = w.add(&l.weight(data));
        }
        w
    }

    pub fn is_scalar(&self) -> bool {
        self.letters.is_empty() && self.atom.is_identity()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        if !self.atom.is_identity() {
            parts.push(self.atom.to_string());
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Multiplies two words; returns the concatenated word and the `q`-power
/// picked up by moving the left word's atom across the right word's letters.
pub fn word_mul(data: &CartanData, a: &Word, b: &Word) -> (Word, RatFunc) {
    let wb = b.weight(data);
    let e = a.atom.cross_exponent(data, &wb);
    let mut letters = a.letters.clone();
    letters.extend_from_slice(&b.letters);
    (
        Word {
            letters,
            atom: a.atom.combine(&b.atom),
        },
        RatFunc::q_pow(e),
    )
}

/// A finite `Q(v)`-linear combination of words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Element {
    pub terms: BTreeMap<Word, RatFunc>,
}

impl Element {
    pub fn zero() -> Element {
        Element {
            terms: BTreeMap::new(),
        }
    }

    pub fn one(data: &CartanData) -> Element {
        Element::from_word(Word::one(data), RatFunc::one())
    }

    pub fn scalar(data: &CartanData, c: RatFunc) -> Element {
        Element::from_word(Word::one(data), c)
    }

    pub fn gen(data: &CartanData, g: Gen) -> Element {
        Element::from_word(Word::from_gen(data, g), RatFunc::one())
    }

    pub fn atom(atom: Atom) -> Element {
        Element::from_word(Word::from_atom(atom), RatFunc::one())
    }

    pub fn from_word(w: Word, c: RatFunc) -> Element {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        Element { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_insert_with(RatFunc::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            // remove the key we just zeroed
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        Element {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), -c))
                .collect(),
        }
    }

    pub fn scale(&self, c: &RatFunc) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self
                .terms
                .iter()
                .map(|(w, k)| (w.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, data: &CartanData, other: &Element) -> Element {
        let mut out = Element::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let (w, s) = word_mul(data, wa, wb);
                out.add_term(w, &(ca * cb) * &s);
            }
        }
        out
    }

    /// Product of a list of elements, left to right.
    pub fn product(data: &CartanData, factors: &[Element]) -> Element {
        let mut out = Element::one(data);
        for f in factors {
            out = out.mul(data, f);
        }
        out
    }

    /// Integer power (panics on negative exponents).
    pub fn pow(&self, data: &CartanData, n: u32) -> Element {
        let mut out = Element::one(data);
        for _ in 0..n {
            out = out.mul(data, self);
        }
        out
    }

    /// If the element is a pure scalar (multiple of the empty word with
    /// trivial atom), returns it.
    pub fn as_scalar(&self, data: &CartanData) -> Option<RatFunc> {
        if self.terms.is_empty() {
            return Some(RatFunc::zero());
        }
        if self.terms.len() == 1 {
            let (w, c) = self.terms.iter().next().unwrap();
            if *w == Word::one(data) {
                return Some(c.clone());
            }
        }
        None
    }

    /// Checks that all words share one `Q`-weight and returns it (`None` for
    /// the zero element); errors on inhomogeneous elements.
    pub fn homogeneous_weight(&self, data: &CartanData) -> Result<Option<RootQ>, String> {
        let mut seen: Option<RootQ> = None;
        for w in self.terms.keys() {
            let wt = w.weight(data);
            match &seen {
                None => seen = Some(wt),
                Some(s) => {
                    if *s != wt {
                        return Err(format!(
                            "inhomogeneous element: weights {:?} and {:?}",
                            s, wt
                        ));
                    }
                }
            }
        }
        Ok(seen)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if w.is_scalar() {
                write!(f, "({})", c)?;
            } else if c.is_one() {
                write!(f, "{}", w)?;
            } else {
                write!(f, "({})*{}", c, w)?;
            }
        }
        Ok(())
    }
}

// ---- Tensor-square elements ----

/// An element of the tensor square, used for coproduct computations. The
/// product is componentwise: `(a⊗b)(c⊗d) = ac ⊗ bd`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Element2 {
    pub terms: BTreeMap<(Word, Word), RatFunc>,
}

impl Element2 {
    pub fn zero() -> Element2 {
        Element2 {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_pair(l: &Element, r: &Element) -> Element2 {
        let mut out = Element2::zero();
        for (wl, cl) in &l.terms {
            for (wr, cr) in &r.terms {
                out.add_term(wl.clone(), wr.clone(), cl * cr);
            }
        }
        out
    }

    pub fn add_term(&mut self, l: Word, r: Word, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry((l, r))
            .or_insert_with(RatFunc::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &Element2) -> Element2 {
        let mut out = self.clone();
        for ((l, r), c) in &other.terms {
            out.add_term(l.clone(), r.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Element2 {
        Element2 {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), -c))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Element2) -> Element2 {
        self.add(&other.neg())
    }

    pub fn mul(&self, data: &CartanData, other: &Element2) -> Element2 {
        let mut out = Element2::zero();
        for ((la, ra), ca) in &self.terms {
            for ((lb, rb), cb) in &other.terms {
                let (lw, ls) = word_mul(data, la, lb);
                let (rw, rs) = word_mul(data, ra, rb);
                out.add_term(lw, rw, &(&(ca * cb) * &ls) * &rs);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Reduces both tensor legs to normal form.
    pub fn normal_form_legwise(
        &self,
        rules: &RuleSet,
        budget: &mut u64,
        strategy: Strategy,
    ) -> Result<Element2, EngineError> {
        let mut out = Element2::zero();
        for ((l, r), c) in &self.terms {
            let nl = normal_form(
                rules,
                &Element::from_word(l.clone(), RatFunc::one()),
                budget,
                strategy,
            )?;
            let nr = normal_form(
                rules,
                &Element::from_word(r.clone(), RatFunc::one()),
                budget,
                strategy,
            )?;
            for (wl, cl) in &nl.terms {
                for (wr, cr) in &nr.terms {
                    out.add_term(wl.clone(), wr.clone(), &(c * cl) * cr);
                }
            }
        }
        Ok(out)
    }
}

// ---- The word order ----

/// The well-founded word order used to orient rules. Lexicographic on:
/// (ψ/φ-letter count, x-letter count, total letter count, class-inversion
/// count, mode-key sequence, node sequence). Atoms are invisible to the order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct OrderKey {
    pub c_psiphi: usize,
    pub c_x: usize,
    pub c_len: usize,
    pub c_inv: usize,
    pub modes: Vec<(i64, i64)>,
    pub nodes: Vec<usize>,
}

pub fn order_key(letters: &[Gen]) -> OrderKey {
    let mut inv = 0usize;
    for p in 0..letters.len() {
        for p2 in (p + 1)..letters.len() {
            if letters[p].class() > letters[p2].class() {
                inv += 1;
            }
        }
    }
    OrderKey {
        c_psiphi: letters.iter().filter(|l| l.is_psi_phi()).count(),
        c_x: letters.iter().filter(|l| l.is_x_class()).count(),
        c_len: letters.len(),
        c_inv: inv,
        modes: letters.iter().map(|l| l.mode_key()).collect(),
        nodes: letters.iter().map(|l| l.node()).collect(),
    }
}

/// Decides whether replacing `lead` by `w` strictly decreases the word order
/// *in every context*. This is stronger than `order_key(w) < order_key(lead)`:
/// the inversion count may only decide when the class multiset is unchanged,
/// and the sequence components only when the earlier sequences agree.
pub fn context_stable_decrease(lead: &[Gen], w: &[Gen]) -> bool {
    let kl = order_key(lead);
    let kw = order_key(w);
    if kw.c_psiphi != kl.c_psiphi {
        return kw.c_psiphi < kl.c_psiphi;
    }
    if kw.c_x != kl.c_x {
        return kw.c_x < kl.c_x;
    }
    if kw.c_len != kl.c_len {
        return kw.c_len < kl.c_len;
    }
    // Same letter counts. Inversions decide only for equal class multisets.
    let mut ml: Vec<u8> = lead.iter().map(|g| g.class()).collect();
    let mut mw: Vec<u8> = w.iter().map(|g| g.class()).collect();
    let seq_equal = ml == mw;
    ml.sort_unstable();
    mw.sort_unstable();
    if ml != mw {
        return false;
    }
    if kw.c_inv != kl.c_inv {
        return kw.c_inv < kl.c_inv;
    }
    // Equal inversion counts: the class sequences must agree for the
    // remaining components to be stable under contexts.
    if !seq_equal {
        return false;
    }
    if kw.modes != kl.modes {
        return kw.modes < kl.modes;
    }
    kw.nodes < kl.nodes
}

// ---- Rule sets and rewriting ----

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EngineError {
    /// The step budget ran out before a normal form was reached.
    BudgetExhausted { limit: u64 },
    /// A word left the mode window the rule set covers; the result would not
    /// be trustworthy, so the computation is refused.
    WindowViolation { detail: String },
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::BudgetExhausted { limit } => {
                write!(f, "step budget exhausted (limit {})", limit)
            }
            EngineError::WindowViolation { detail } => {
                write!(f, "mode window violation: {}", detail)
            }
        }
    }
}

/// Redex selection strategy; confluent regions must make them agree.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    /// Leftmost redex position, first matching lead in map order.
    LeftGreedy,
    /// Rightmost redex position, last matching lead in map order.
    RightGreedy,
}

/// A set of oriented, validated rewrite rules over concrete letter sequences.
#[derive(Clone, Debug)]
pub struct RuleSet {
    pub data: CartanData,
    pub rules: BTreeMap<Vec<Gen>, Element>,
    by_first: BTreeMap<Gen, Vec<Vec<Gen>>>,
    /// Letters with |mode| beyond this bound trigger `WindowViolation` when
    /// produced during reduction (`i64::MAX` disables the guard).
    pub mode_bound: i64,
}

impl RuleSet {
    pub fn new(data: &CartanData, mode_bound: i64) -> RuleSet {
        RuleSet {
            data: data.clone(),
            rules: BTreeMap::new(),
            by_first: BTreeMap::new(),
            mode_bound,
        }
    }

    /// Validates and installs `lead → rhs`. The lead must be a non-empty
    /// letter sequence; every word of `rhs` must decrease the word order in
    /// every context. Reinstalling an identical rule is a no-op; conflicting
    /// right-hand sides are an error.
    pub fn install(&mut self, lead: Vec<Gen>, rhs: Element) -> Result<(), String> {
        if lead.is_empty() {
            return Err(String::from("rule lead must be non-empty"));
        }
        for w in rhs.terms.keys() {
            if !context_stable_decrease(&lead, &w.letters) {
                return Err(format!(
                    "rule is not order-decreasing: {:?} -> word {:?}",
                    lead, w.letters
                ));
            }
        }
        if let Some(existing) = self.rules.get(&lead) {
            if *existing == rhs {
                return Ok(());
            }
            return Err(format!("conflicting rule for lead {:?}", lead));
        }
        self.by_first
            .entry(lead[0])
            .or_default()
            .push(lead.clone());
        self.by_first.get_mut(&lead[0]).unwrap().sort();
        self.rules.insert(lead, rhs);
        Ok(())
    }

    /// Finds a redex in `letters` under the strategy: returns (position, lead).
    fn find_redex(&self, letters: &[Gen], strategy: Strategy) -> Option<(usize, &Vec<Gen>)> {
        match strategy {
            Strategy::LeftGreedy => {
                for p in 0..letters.len() {
                    if let Some(leads) = self.by_first.get(&letters[p]) {
                        for lead in leads {
                            if p + lead.len() <= letters.len()
                                && letters[p..p + lead.len()] == lead[..]
                            {
                                return Some((p, lead));
                            }
                        }
                    }
                }
                None
            }
            Strategy::RightGreedy => {
                for p in (0..letters.len()).rev() {
                    if let Some(leads) = self.by_first.get(&letters[p]) {
                        for lead in leads.iter().rev() {
                            if p + lead.len() <= letters.len()
                                && letters[p..p + lead.len()] == lead[..]
                            {
                                return Some((p, lead));
                            }
                        }
                    }
                }
                None
            }
        }
    }

    fn window_check(&self, w: &Word) -> Result<(), EngineError> {
        if self.mode_bound == i64::MAX {
            return Ok(());
        }
        for l in &w.letters {
            if l.mode_magnitude() > self.mode_bound {
                return Err(EngineError::WindowViolation {
                    detail: format!(
                        "letter {} exceeds mode bound {}",
                        l, self.mode_bound
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Rewrites `elem` to normal form under `rules`. Every rule application costs
/// one unit of `budget`. Errors on budget exhaustion or window escape.
pub fn normal_form(
    rules: &RuleSet,
    elem: &Element,
    budget: &mut u64,
    strategy: Strategy,
) -> Result<Element, EngineError> {
    let data = &rules.data;
    let mut cur = elem.clone();
    'outer: loop {
        let mut pick: Option<(Word, RatFunc, usize, Vec<Gen>)> = None;
        let iter_terms: Vec<(&Word, &RatFunc)> = match strategy {
            Strategy::LeftGreedy => cur.terms.iter().collect(),
            Strategy::RightGreedy => cur.terms.iter().rev().collect(),
        };
        for (w, c) in iter_terms {
            rules.window_check(w)?;
            if let Some((p, lead)) = rules.find_redex(&w.letters, strategy) {
                pick = Some((w.clone(), c.clone(), p, lead.clone()));
                break;
            }
        }
        match pick {
            None => return Ok(cur),
            Some((w, c, p, lead)) => {
                if *budget == 0 {
                    return Err(EngineError::BudgetExhausted { limit: 0 });
                }
                *budget -= 1;
                cur.terms.remove(&w);
                let rhs = rules.rules.get(&lead).unwrap();
                let prefix = Element::from_word(
                    Word {
                        letters: w.letters[..p].to_vec(),
                        atom: Atom::identity(data.n),
                    },
                    c,
                );
                let suffix = Element::from_word(
                    Word {
                        letters: w.letters[p + lead.len()..].to_vec(),
                        atom: w.atom.clone(),
                    },
                    RatFunc::one(),
                );
                let replaced = prefix.mul(data, rhs).mul(data, &suffix);
                for (nw, nc) in replaced.terms {
                    rules.window_check(&nw)?;
                    cur.add_term(nw, nc);
                }
                continue 'outer;
            }
        }
    }
}

/// Convenience wrapper: normal form with a fresh budget, errors mapped to
/// strings.
pub fn nf(rules: &RuleSet, elem: &Element, budget: u64) -> Result<Element, String> {
    let mut b = budget;
    normal_form(rules, elem, &mut b, Strategy::LeftGreedy).map_err(|e| e.to_string())
}

// ---- Rule extraction from relations (per-weight reduced echelon form) ----

/// Right-multiplies every word of `rel` by `shift` (a unit atom): atoms
/// combine at the right end, no letters are crossed, no scalars appear.
fn shift_atoms(rel: &Element, shift: &Atom) -> Element {
    Element {
        terms: rel
            .terms
            .iter()
            .map(|(w, c)| {
                (
                    Word {
                        letters: w.letters.clone(),
                        atom: w.atom.combine(shift),
                    },
                    c.clone(),
                )
            })
            .collect(),
    }
}

/// The order-maximal word of a nonzero element under (order key, structural).
fn top_word(rel: &Element) -> &Word {
    rel.terms
        .keys()
        .max_by(|a, b| (order_key(&a.letters), *a).cmp(&(order_key(&b.letters), *b)))
        .expect("nonzero element")
}

/// Turns a list of homogeneous relations (elements equal to zero) into
/// oriented rules. Each relation is first normalized so its order-maximal
/// word has a trivial atom (right multiplication by the inverse atom, a
/// unit): different instances of one family then expose structurally equal
/// pivot candidates as a single matrix column. Relations are grouped by
/// weight; within each group the words are ordered descending by the word
/// order and the coefficient matrix is brought to reduced row-echelon form,
/// so each surviving row exposes its order-maximal word as the pivot. Rows
/// whose pivot still has a non-trivial atom (Gauss-Jordan can move pivots)
/// are normalized the same way at extraction.
pub fn rref_rules(
    data: &CartanData,
    relations: &[Element],
) -> Result<Vec<(Vec<Gen>, Element)>, String> {
    let mut by_weight: BTreeMap<Vec<i64>, Vec<Element>> = BTreeMap::new();
    for rel in relations {
        if rel.is_zero() {
            continue;
        }
        let top_atom = top_word(rel).atom.clone();
        let normalized = if top_atom.is_identity() {
            rel.clone()
        } else {
            shift_atoms(rel, &top_atom.inverse())
        };
        let wt = normalized
            .homogeneous_weight(data)?
            .expect("nonzero relation has a weight");
        let mut key = wt.finite.clone();
        key.push(wt.delta);
        by_weight.entry(key).or_default().push(normalized);
    }

    let mut out = Vec::new();
    for group in by_weight.values() {
        // Column order: descending by (order key, then structural order).
        let mut words: Vec<Word> = group
            .iter()
            .flat_map(|rel| rel.terms.keys().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        words.sort_by(|a, b| {
            (order_key(&b.letters), b).cmp(&(order_key(&a.letters), a))
        });
        let col_of: BTreeMap<&Word, usize> =
            words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let ncols = words.len();
        let mut rows: Vec<Vec<RatFunc>> = group
            .iter()
            .map(|rel| {
                let mut row = vec![RatFunc::zero(); ncols];
                for (w, c) in &rel.terms {
                    row[col_of[w]] = c.clone();
                }
                row
            })
            .collect();

        // Gauss-Jordan over Q(v).
        let mut pivot_rows: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut next_row = 0usize;
        for col in 0..ncols {
            let mut sel = None;
            for (r, row) in rows.iter().enumerate().skip(next_row) {
                if !row[col].is_zero() {
                    sel = Some(r);
                    break;
                }
            }
            let Some(sel) = sel else { continue };
            rows.swap(next_row, sel);
            let inv = rows[next_row][col].inv();
            for c in col..ncols {
                rows[next_row][c] = &rows[next_row][c] * &inv;
            }
            for r in 0..rows.len() {
                if r != next_row && !rows[r][col].is_zero() {
                    let f = rows[r][col].clone();
                    for c in col..ncols {
                        let delta = &f * &rows[next_row][c];
                        rows[r][c] = &rows[r][c] - &delta;
                    }
                }
            }
            pivot_rows.push((next_row, col));
            next_row += 1;
            if next_row == rows.len() {
                break;
            }
        }

        for (r, col) in pivot_rows {
            let pivot_word = words[col].clone();
            if pivot_word.letters.is_empty() {
                return Err(String::from(
                    "relations imply a vanishing unit combination (letter-free pivot)",
                ));
            }
            let mut rhs = Element::zero();
            for c in (col + 1)..ncols {
                if !rows[r][c].is_zero() {
                    rhs.add_term(words[c].clone(), -&rows[r][c]);
                }
            }
            // Normalize away a non-trivial pivot atom by right-multiplying the
            // whole row with its inverse (shifts every atom, no scalars).
            let shift = pivot_word.atom.inverse();
            let lead = pivot_word.letters.clone();
            if !pivot_word.atom.is_identity() {
                rhs = Element {
                    terms: rhs
                        .terms
                        .into_iter()
                        .map(|(w, c)| {
                            (
                                Word {
                                    letters: w.letters,
                                    atom: w.atom.combine(&shift),
                                },
                                c,
                            )
                        })
                        .collect(),
                };
            }
            out.push((lead, rhs));
        }
    }
    let mut seen: BTreeMap<&Vec<Gen>, &Element> = BTreeMap::new();
    for (lead, rhs) in &out {
        if let Some(prev) = seen.insert(lead, rhs) {
            if prev != rhs {
                return Err(format!(
                    "relations yield conflicting rules for one leading word: {}",
                    Word {
                        letters: lead.clone(),
                        atom: Atom::identity(data.n)
                    }
                ));
            }
        }
    }
    Ok(out)
}

/// Builds a rule set directly from relations.
pub fn ruleset_from_relations(
    data: &CartanData,
    relations: &[Element],
    mode_bound: i64,
) -> Result<RuleSet, String> {
    let mut rs = RuleSet::new(data, mode_bound);
    for (lead, rhs) in rref_rules(data, relations)? {
        rs.install(lead, rhs)?;
    }
    Ok(rs)
}

// ---- Critical pairs, confluence checking, completion ----

/// One critical superposition of two rules.
struct CriticalPair {
    word: Vec<Gen>,
    pos1: usize,
    lead1: Vec<Gen>,
    pos2: usize,
    lead2: Vec<Gen>,
}

fn critical_pairs(rules: &RuleSet, max_len: usize) -> Vec<CriticalPair> {
    let leads: Vec<&Vec<Gen>> = rules.rules.keys().collect();
    let mut out = Vec::new();
    for l1 in &leads {
        for l2 in &leads {
            // Proper overlap: a non-empty suffix of l1 equals a prefix of l2.
            for t in 1..l1.len().min(l2.len()) {
                if l1[l1.len() - t..] == l2[..t] {
                    let mut w = (*l1).clone();
                    w.extend_from_slice(&l2[t..]);
                    if w.len() <= max_len {
                        out.push(CriticalPair {
                            word: w,
                            pos1: 0,
                            lead1: (*l1).clone(),
                            pos2: l1.len() - t,
                            lead2: (*l2).clone(),
                        });
                    }
                }
            }
            // Containment: l2 occurs inside l1 (excluding the identical case).
            if l2.len() < l1.len() {
                for p in 0..=(l1.len() - l2.len()) {
                    if l1[p..p + l2.len()] == l2[..] && l1.len() <= max_len {
                        out.push(CriticalPair {
                            word: (*l1).clone(),
                            pos1: 0,
                            lead1: (*l1).clone(),
                            pos2: p,
                            lead2: (*l2).clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

fn apply_rule_at(
    rules: &RuleSet,
    letters: &[Gen],
    pos: usize,
    lead: &[Gen],
) -> Element {
    let data = &rules.data;
    let rhs = rules.rules.get(lead).unwrap();
    let prefix = Element::from_word(
        Word {
            letters: letters[..pos].to_vec(),
            atom: Atom::identity(data.n),
        },
        RatFunc::one(),
    );
    let suffix = Element::from_word(
        Word {
            letters: letters[pos + lead.len()..].to_vec(),
            atom: Atom::identity(data.n),
        },
        RatFunc::one(),
    );
    prefix.mul(data, rhs).mul(data, &suffix)
}

/// Result of an overlap (local-confluence) check.
///
/// `boundary_skipped` counts critical pairs whose normal forms still contain a
/// class-inverted word (a letter of a lower class after one of a higher
/// class). Such words witness that the reduction left the mode window the
/// rule set covers — a commutation instance whose output mode exceeds the
/// window has no rule, so the pocket stays stuck — not that two rules
/// genuinely disagree. A rule set that is complete on its region sorts every
/// normal word by class, so interior non-joinability is never misfiled here.
#[derive(Clone, Debug)]
pub struct OverlapReport {
    pub pairs_checked: usize,
    pub joinable: usize,
    pub boundary_skipped: usize,
    pub failures: Vec<String>,
}

impl OverlapReport {
    pub fn all_joinable(&self) -> bool {
        self.failures.is_empty()
    }
}

fn has_class_inversion(e: &Element) -> bool {
    e.terms
        .keys()
        .any(|w| order_key(&w.letters).c_inv > 0)
}

/// Checks local confluence of all critical pairs with superposition length
/// at most `max_len`. For a terminating system this certifies confluence on
/// the closure of the checked region; pairs that demonstrably escape the mode
/// window are tallied as `boundary_skipped` rather than as failures.
pub fn check_overlaps(
    rules: &RuleSet,
    max_len: usize,
    budget_per_pair: u64,
) -> Result<OverlapReport, EngineError> {
    let mut report = OverlapReport {
        pairs_checked: 0,
        joinable: 0,
        boundary_skipped: 0,
        failures: Vec::new(),
    };
    for cp in critical_pairs(rules, max_len) {
        report.pairs_checked += 1;
        let e1 = apply_rule_at(rules, &cp.word, cp.pos1, &cp.lead1);
        let e2 = apply_rule_at(rules, &cp.word, cp.pos2, &cp.lead2);
        let mut b1 = budget_per_pair;
        let mut b2 = budget_per_pair;
        let n1 = normal_form(rules, &e1, &mut b1, Strategy::LeftGreedy)?;
        let n2 = normal_form(rules, &e2, &mut b2, Strategy::LeftGreedy)?;
        if n1 == n2 {
            report.joinable += 1;
        } else if has_class_inversion(&n1) || has_class_inversion(&n2) {
            report.boundary_skipped += 1;
        } else {
            let w: Vec<String> = cp.word.iter().map(|g| g.to_string()).collect();
            report.failures.push(format!(
                "critical pair on {} not joinable",
                w.join("*")
            ));
        }
    }
    Ok(report)
}

/// Bounded Knuth-Bendix completion: turns non-joinable critical pairs into new
/// rules (oriented through `rref_rules`) until the system is locally confluent
/// on superpositions of length ≤ `max_len` or `max_rounds` is hit. Returns the
/// number of rules added.
pub fn complete(
    rules: &mut RuleSet,
    max_len: usize,
    max_rounds: usize,
    budget_per_pair: u64,
) -> Result<usize, String> {
    let mut added_total = 0usize;
    for _ in 0..max_rounds {
        let mut new_relations: Vec<Element> = Vec::new();
        for cp in critical_pairs(rules, max_len) {
            let e1 = apply_rule_at(rules, &cp.word, cp.pos1, &cp.lead1);
            let e2 = apply_rule_at(rules, &cp.word, cp.pos2, &cp.lead2);
            let mut b1 = budget_per_pair;
            let mut b2 = budget_per_pair;
            let n1 = normal_form(rules, &e1, &mut b1, Strategy::LeftGreedy)
                .map_err(|e| e.to_string())?;
            let n2 = normal_form(rules, &e2, &mut b2, Strategy::LeftGreedy)
                .map_err(|e| e.to_string())?;
            let diff = n1.sub(&n2);
            if !diff.is_zero() {
                new_relations.push(diff);
            }
        }
        if new_relations.is_empty() {
            return Ok(added_total);
        }
        let mut added_this_round = 0usize;
        for (lead, rhs) in rref_rules(&rules.data, &new_relations)? {
            if !rules.rules.contains_key(&lead) {
                rules.install(lead, rhs)?;
                added_this_round += 1;
            }
        }
        if added_this_round == 0 {
            // Non-joinable pairs remain but yield only known leads: the
            // relations derived must already reduce to zero next round.
            return Ok(added_total);
        }
        added_total += added_this_round;
    }
    Ok(added_total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{q_int, RatFunc};
    use crate::rootsystem::{CartanData, TypeLetter};

    fn a2() -> CartanData {
        CartanData::new(TypeLetter::A, 2).unwrap()
    }

    fn a1() -> CartanData {
        CartanData::new(TypeLetter::A, 1).unwrap()
    }

    fn k_i(data: &CartanData, i: usize) -> Atom {
        Atom::k_root(&data.simple_root(i))
    }

    #[test]
    fn atom_transport_across_letters() {
        let d = a2();
        // K_1 E_2 = q^{(α_1|α_2)} E_2 K_1 = q^{-1} E_2 K_1
        let kw = Word::from_atom(k_i(&d, 1));
        let ew = Word::from_gen(&d, Gen::E(2));
        let (w, s) = word_mul(&d, &kw, &ew);
        assert_eq!(w.letters, vec![Gen::E(2)]);
        assert_eq!(s, RatFunc::q_pow(-1));
        // K_1 E_1 = q^2 E_1 K_1
        let (_, s2) = word_mul(&d, &kw, &Word::from_gen(&d, Gen::E(1)));
        assert_eq!(s2, RatFunc::q_pow(2));
        // D E_0 D^{-1} = q E_0, i.e. (D-atom) · E_0 = q · E_0 · (D-atom)
        let dw = Word::from_atom(Atom {
            k: vec![0, 0],
            r: 1,
            s: 0,
        });
        let (_, s3) = word_mul(&d, &dw, &Word::from_gen(&d, Gen::E(0)));
        assert_eq!(s3, RatFunc::q_pow(1));
        // D E_1 D^{-1} = E_1
        let (_, s4) = word_mul(&d, &dw, &Word::from_gen(&d, Gen::E(1)));
        assert_eq!(s4, RatFunc::one());
        // γ^{1/2} is central
        let gw = Word::from_atom(Atom {
            k: vec![0, 0],
            r: 0,
            s: 1,
        });
        let (_, s5) = word_mul(&d, &gw, &Word::from_gen(&d, Gen::E(0)));
        assert_eq!(s5, RatFunc::one());
    }

    #[test]
    fn k_alpha0_folds_gamma() {
        // K_{α_0} = γ K_{-θ}: atom with k = -θ and s = 2.
        let d = a2();
        let a = k_i(&d, 0);
        assert_eq!(a.k, vec![-1, -1]);
        assert_eq!(a.s, 2);
        assert_eq!(a.r, 0);
    }

    #[test]
    fn word_multiplication_is_associative() {
        let d = a2();
        let samples = [
            Element::gen(&d, Gen::E(1)),
            Element::gen(&d, Gen::F(2)).scale(&RatFunc::v_pow(3)),
            Element::atom(Atom {
                k: vec![1, -2],
                r: 2,
                s: 1,
            }),
            Element::gen(&d, Gen::Xp(1, -2)),
            Element::atom(k_i(&d, 0)).add(&Element::gen(&d, Gen::Xm(2, 1))),
        ];
        for a in &samples {
            for b in &samples {
                for c in &samples {
                    let lhs = a.mul(&d, b).mul(&d, c);
                    let rhs = a.mul(&d, &b.mul(&d, c));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn element_arithmetic_cancels() {
        let d = a2();
        let e = Element::gen(&d, Gen::E(1));
        assert!(e.sub(&e).is_zero());
        let sum = e.add(&e);
        let two = RatFunc::from_int(2);
        assert_eq!(sum, e.scale(&two));
    }

    #[test]
    fn order_key_inversions_and_classes() {
        // E (class 3) before F (class 0) is one inversion.
        let k = order_key(&[Gen::E(1), Gen::F(1)]);
        assert_eq!(k.c_inv, 1);
        assert_eq!(k.c_x, 2);
        let k2 = order_key(&[Gen::F(1), Gen::E(1)]);
        assert_eq!(k2.c_inv, 0);
        assert!(k2 < k);
        // ψ counts in both the ψφ component and not in the x component.
        let k3 = order_key(&[Gen::Psi(1, 2)]);
        assert_eq!(k3.c_psiphi, 1);
        assert_eq!(k3.c_x, 0);
        // h_{-k} sorts as a lowering class.
        assert_eq!(Gen::H(1, -3).class(), 1);
        assert_eq!(Gen::H(1, 3).class(), 2);
    }

    #[test]
    fn context_stability_cases() {
        // Length decrease: fine.
        assert!(context_stable_decrease(
            &[Gen::E(1), Gen::E(1)],
            &[Gen::E(1)]
        ));
        // Pure swap with fewer inversions: fine.
        assert!(context_stable_decrease(
            &[Gen::E(1), Gen::F(1)],
            &[Gen::F(1), Gen::E(1)]
        ));
        // Same class sequence, smaller mode sequence: fine.
        assert!(context_stable_decrease(
            &[Gen::Xp(1, 1), Gen::Xp(1, 0)],
            &[Gen::Xp(1, 0), Gen::Xp(1, 1)]
        ));
        // Same classes and modes, smaller node sequence: fine.
        assert!(context_stable_decrease(
            &[Gen::Xp(2, 0), Gen::Xp(1, 0)],
            &[Gen::Xp(1, 0), Gen::Xp(2, 0)]
        ));
        // Equal word: not a decrease.
        assert!(!context_stable_decrease(&[Gen::E(1)], &[Gen::E(1)]));
        // An x-count decrease fires before any multiset considerations.
        assert!(context_stable_decrease(
            &[Gen::E(1), Gen::F(1)],
            &[Gen::H(1, 1), Gen::H(1, -1)]
        ));
        // With all counts tied, a *different* class multiset is rejected even
        // though the plain order would allow it (fewer inversions).
        assert!(!context_stable_decrease(
            &[Gen::E(1), Gen::F(1)],
            &[Gen::E(1), Gen::E(1)]
        ));
        // Growth is rejected.
        assert!(!context_stable_decrease(
            &[Gen::E(1)],
            &[Gen::E(1), Gen::E(1)]
        ));
    }

    #[test]
    fn install_rejects_non_decreasing_rules() {
        let d = a2();
        let mut rs = RuleSet::new(&d, i64::MAX);
        // E_1 -> E_1 E_1 grows: rejected.
        let bad = Element::from_word(
            Word {
                letters: vec![Gen::E(1), Gen::E(1)],
                atom: Atom::identity(d.n),
            },
            RatFunc::one(),
        );
        assert!(rs.install(vec![Gen::E(1)], bad).is_err());
    }

    /// The rank-1 commutator rule set on node i of A_2:
    /// E_i F_i -> F_i E_i + (K_i - K_i^{-1})/(q_i - q_i^{-1}).
    fn ef_ruleset(d: &CartanData, i: usize) -> RuleSet {
        let mut rs = RuleSet::new(d, i64::MAX);
        let denom = &RatFunc::q_pow(1) - &RatFunc::q_pow(-1);
        let mut rhs = Element::from_word(
            Word {
                letters: vec![Gen::F(i), Gen::E(i)],
                atom: Atom::identity(d.n),
            },
            RatFunc::one(),
        );
        rhs.add_term(Word::from_atom(k_i(d, i)), denom.inv());
        rhs.add_term(Word::from_atom(k_i(d, i).inverse()), -&denom.inv());
        rs.install(vec![Gen::E(i), Gen::F(i)], rhs).unwrap();
        rs
    }

    #[test]
    fn normal_form_straightens_ef() {
        let d = a2();
        let rs = ef_ruleset(&d, 1);
        let e = Element::gen(&d, Gen::E(1));
        let f = Element::gen(&d, Gen::F(1));
        let ef = e.mul(&d, &f);
        let mut budget = 1000;
        let nf1 = normal_form(&rs, &ef, &mut budget, Strategy::LeftGreedy).unwrap();
        // F E + (K - K^{-1})/(q - q^{-1})
        assert_eq!(nf1.terms.len(), 3);
        // E F F needs two rewrites and equals F E F + lower; fully reduced it
        // has only F-before-E words.
        let eff = ef.mul(&d, &f);
        let mut budget = 1000;
        let nf2 = normal_form(&rs, &eff, &mut budget, Strategy::LeftGreedy).unwrap();
        for w in nf2.terms.keys() {
            assert!(rs.find_redex(&w.letters, Strategy::LeftGreedy).is_none());
        }
        // Idempotence.
        let mut budget = 1000;
        let nf3 = normal_form(&rs, &nf2, &mut budget, Strategy::LeftGreedy).unwrap();
        assert_eq!(nf2, nf3);
        // Both strategies agree here (one rule, no overlaps).
        let mut budget = 1000;
        let nf4 = normal_form(&rs, &eff, &mut budget, Strategy::RightGreedy).unwrap();
        assert_eq!(nf2, nf4);
    }

    #[test]
    fn casimir_commutation_in_rank_one() {
        // [E_i, F_i E_i] reduction sanity: E F E reduces to F E E + scalar E.
        let d = a2();
        let rs = ef_ruleset(&d, 1);
        let e = Element::gen(&d, Gen::E(1));
        let f = Element::gen(&d, Gen::F(1));
        let efe = e.mul(&d, &f).mul(&d, &e);
        let mut budget = 1000;
        let nf1 = normal_form(&rs, &efe, &mut budget, Strategy::LeftGreedy).unwrap();
        // Expect F E E plus (K - K^{-1})/(q-q^{-1}) E with the atom moved:
        // the atom-bearing terms combine to ([K;..] style) E-words.
        let has_fee = nf1.terms.keys().any(|w| {
            w.letters == vec![Gen::F(1), Gen::E(1), Gen::E(1)] && w.atom.is_identity()
        });
        assert!(has_fee);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let d = a2();
        let rs = ef_ruleset(&d, 1);
        let e = Element::gen(&d, Gen::E(1));
        let f = Element::gen(&d, Gen::F(1));
        let big = e.mul(&d, &f).mul(&d, &f).mul(&d, &f);
        let mut budget = 1;
        let r = normal_form(&rs, &big, &mut budget, Strategy::LeftGreedy);
        assert_eq!(r, Err(EngineError::BudgetExhausted { limit: 0 }));
    }

    #[test]
    fn window_violation_is_reported() {
        let d = a1();
        let mut rs = RuleSet::new(&d, 1);
        // A mode-coupling rule that produces an out-of-window letter:
        // x+_{1,1} x-_{1,1} -> x-_{1,1} x+_{1,1} + h_{1,2}-word.
        let mut rhs = Element::from_word(
            Word {
                letters: vec![Gen::Xm(1, 1), Gen::Xp(1, 1)],
                atom: Atom::identity(d.n),
            },
            RatFunc::one(),
        );
        rhs.add_term(
            Word {
                letters: vec![Gen::H(1, 2)],
                atom: Atom::identity(d.n),
            },
            RatFunc::one(),
        );
        rs.install(vec![Gen::Xp(1, 1), Gen::Xm(1, 1)], rhs).unwrap();
        let probe = Element::from_word(
            Word {
                letters: vec![Gen::Xp(1, 1), Gen::Xm(1, 1)],
                atom: Atom::identity(d.n),
            },
            RatFunc::one(),
        );
        let mut budget = 100;
        let r = normal_form(&rs, &probe, &mut budget, Strategy::LeftGreedy);
        assert!(matches!(r, Err(EngineError::WindowViolation { .. })));
    }

    #[test]
    fn rref_orients_the_commutator_relation() {
        // Relation: E F - F E - (K - K^{-1})/(q-q^{-1}) = 0 must orient with
        // lead [E, F] (the inversion-maximal word).
        let d = a2();
        let denom = &RatFunc::q_pow(1) - &RatFunc::q_pow(-1);
        let mut rel = Element::from_word(
            Word {
                letters: vec![Gen::E(1), Gen::F(1)],
                atom: Atom::identity(d.n),
            },
            RatFunc::one(),
        );
        rel.add_term(
            Word {
                letters: vec![Gen::F(1), Gen::E(1)],
                atom: Atom::identity(d.n),
            },
            -&RatFunc::one(),
        );
        rel.add_term(Word::from_atom(k_i(&d, 1)), -&denom.inv());
        rel.add_term(Word::from_atom(k_i(&d, 1).inverse()), denom.inv());
        let rules = rref_rules(&d, &[rel]).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].0, vec![Gen::E(1), Gen::F(1)]);
        assert_eq!(rules[0].1.terms.len(), 3);
    }

    #[test]
    fn rref_normalizes_pivot_atoms() {
        // q E K_1 - E' relation with an atom on the order-maximal word: the
        // extracted lead must be letters-only. Use E_1 K_1 - q^2 K_1-shifted
        // E_1: concretely  (E_1 with atom K_1) = q^{-2} (K_1 E_1) so the
        // relation (E_1,K_1-atom) - q^{-2}(E_1, K_1-atom) ... simpler: take
        // 2-term relation between the same letters with different atoms is
        // rejected by rule validation; instead check a relation whose pivot
        // word carries an atom and whose lower words have fewer letters.
        let d = a2();
        let mut rel = Element::from_word(
            Word {
                letters: vec![Gen::E(1), Gen::F(1)],
                atom: k_i(&d, 1),
            },
            RatFunc::one(),
        );
        rel.add_term(Word::from_atom(k_i(&d, 1)), -&RatFunc::one());
        let rules = rref_rules(&d, &[rel]).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].0, vec![Gen::E(1), Gen::F(1)]);
        // rhs word: the pure atom-word shifted by K_1^{-1}: trivial atom.
        let (w, c) = rules[0].1.terms.iter().next().unwrap();
        assert!(w.letters.is_empty());
        assert!(w.atom.is_identity());
        assert!(c.is_one());
    }

    #[test]
    fn rref_combines_circular_instances() {
        // Two relations sharing words must produce triangular rules, not a
        // 2-cycle: a - b = 0 and b - c = 0 over words of equal counts.
        let d = a1();
        let wa = Word {
            letters: vec![Gen::Xp(1, 1), Gen::Xp(1, 0)],
            atom: Atom::identity(d.n),
        };
        let wb = Word {
            letters: vec![Gen::Xp(1, 0), Gen::Xp(1, 1)],
            atom: Atom::identity(d.n),
        };
        let mut r1 = Element::from_word(wa.clone(), RatFunc::one());
        r1.add_term(wb.clone(), -&RatFunc::q_pow(2));
        let rules = rref_rules(&d, &[r1]).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].0, vec![Gen::Xp(1, 1), Gen::Xp(1, 0)]);
        let mut rs = RuleSet::new(&d, i64::MAX);
        for (lead, rhs) in rules {
            rs.install(lead, rhs).unwrap();
        }
    }

    #[test]
    fn overlap_check_reports_joinable_serre_style_system() {
        // A commutative toy: x_{1,k} x_{1,l} = x_{1,l} x_{1,k} for k > l in
        // 0..3 (all pairs commute): fully confluent.
        let d = a1();
        let mut rs = RuleSet::new(&d, i64::MAX);
        for k in 0..4i64 {
            for l in 0..k {
                let rhs = Element::from_word(
                    Word {
                        letters: vec![Gen::Xp(1, l), Gen::Xp(1, k)],
                        atom: Atom::identity(d.n),
                    },
                    RatFunc::one(),
                );
                rs.install(vec![Gen::Xp(1, k), Gen::Xp(1, l)], rhs).unwrap();
            }
        }
        let rep = check_overlaps(&rs, 6, 10_000).unwrap();
        assert!(rep.pairs_checked > 0);
        assert!(rep.all_joinable());
    }

    #[test]
    fn overlap_check_detects_broken_system() {
        // A mutated system: the swap rule says x1 x0 -> q^2 x0 x1, but a bogus
        // 3-letter rule kills x1 x1 x0 outright. The containment overlap is
        // then not joinable (0 vs q^4 x0 x1 x1).
        let d = a1();
        let mut rs = RuleSet::new(&d, i64::MAX);
        let swap_rhs = Element::from_word(
            Word {
                letters: vec![Gen::Xp(1, 0), Gen::Xp(1, 1)],
                atom: Atom::identity(d.n),
            },
            RatFunc::q_pow(2),
        );
        rs.install(vec![Gen::Xp(1, 1), Gen::Xp(1, 0)], swap_rhs)
            .unwrap();
        rs.install(
            vec![Gen::Xp(1, 1), Gen::Xp(1, 1), Gen::Xp(1, 0)],
            Element::zero(),
        )
        .unwrap();
        let rep = check_overlaps(&rs, 3, 10_000).unwrap();
        assert!(!rep.all_joinable());
    }

    #[test]
    fn completion_adds_missing_commutation() {
        // Start from a non-confluent fragment and let completion derive the
        // missing scalar-corrected rule.
        let d = a1();
        let mut rs = RuleSet::new(&d, i64::MAX);
        // x2 x1 -> q^2 x1 x2, x1 x0 -> q^2 x0 x1 (no rule for x2 x0).
        for (k, l) in [(2i64, 1i64), (1, 0)] {
            let rhs = Element::from_word(
                Word {
                    letters: vec![Gen::Xp(1, l), Gen::Xp(1, k)],
                    atom: Atom::identity(d.n),
                },
                RatFunc::q_pow(2),
            );
            rs.install(vec![Gen::Xp(1, k), Gen::Xp(1, l)], rhs).unwrap();
        }
        // The overlap x2 x1 x0 reduces to q^4 (x0 x2 x1-style) words via both
        // routes only if x2 x0 commutation exists; completion must add it.
        let added = complete(&mut rs, 3, 5, 10_000).unwrap();
        assert!(added >= 1);
        let rep = check_overlaps(&rs, 3, 10_000).unwrap();
        assert!(rep.all_joinable());
    }

    #[test]
    fn element2_componentwise_product() {
        let d = a2();
        let e = Element::gen(&d, Gen::E(1));
        let one = Element::one(&d);
        // (E ⊗ 1 + K ⊗ E)^2 has 4 contributions; check the product rule
        // against hand-multiplied components.
        let k = Element::atom(k_i(&d, 1));
        let t = Element2::from_pair(&e, &one).add(&Element2::from_pair(&k, &e));
        let sq = t.mul(&d, &t);
        let manual = Element2::from_pair(&e.mul(&d, &e), &one)
            .add(&Element2::from_pair(&e.mul(&d, &k), &e))
            .add(&Element2::from_pair(&k.mul(&d, &e), &e))
            .add(&Element2::from_pair(&k.mul(&d, &k), &e.mul(&d, &e)));
        assert_eq!(sq, manual);
    }

    #[test]
    fn display_renders_words_and_atoms() {
        let _d = a2();
        let w = Word {
            letters: vec![Gen::E(0), Gen::Xm(2, -3)],
            atom: Atom {
                k: vec![1, 0],
                r: -2,
                s: 1,
            },
        };
        assert_eq!(format!("{}", w), "E[0]*x-[2,-3]*K[1,0]*Dm^2*g[1]");
        let e = Element::from_word(w, q_int(2, 1).into());
        assert_eq!(format!("{}", e), "(v^2 + v^-2)*E[0]*x-[2,-3]*K[1,0]*Dm^2*g[1]");
        assert_eq!(format!("{}", Element::zero()), "0");
    }

    #[test]
    fn homogeneous_weight_detects_mixtures() {
        let d = a2();
        let e = Element::gen(&d, Gen::E(1));
        let f = Element::gen(&d, Gen::F(1));
        assert!(e.homogeneous_weight(&d).is_ok());
        assert!(e.add(&f).homogeneous_weight(&d).is_err());
        let ef = e.mul(&d, &f);
        // E F has weight 0.
        assert_eq!(
            ef.homogeneous_weight(&d).unwrap().unwrap(),
            RootQ::zero(d.n)
        );
    }
}
