//! Word combinatorics over the alphabet `{1, ..., N}`.
//!
//! A word sigma carries a weight `e(sigma)`, the sum of the scaling
//! exponents `a_i` of its letters, and a predecessor weight `e_minus`
//! obtained by dropping the last letter. The level-`k` index set
//! `Omega_k` collects exactly the words with `e(sigma) > k >= e_minus(sigma)`;
//! its members label the tiles of the level-`k` tiling. Everything here
//! is independent of the geometry.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::par;

/// Levels above this are refused unless the spec raises the cap
/// explicitly; `Omega_k` grows geometrically in `k`.
pub const DEFAULT_MAX_LEVEL: u32 = 25;

/// Letters are 1-based. 0 is never a letter.
pub type Letter = u8;

/// A finite word over `{1, ..., N}`. The empty word is allowed and has
/// weight 0. Ordering is by length first, then lexicographic, which is
/// the canonical enumeration order used everywhere in the crate.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, rejecting the letter 0. Range checking against a
    /// concrete alphabet happens where a `PowerVector` is in scope.
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::InvalidWord("letters are 1-based, found 0".into()));
        }
        Ok(Word(letters))
    }

    pub fn single(letter: Letter) -> Self {
        debug_assert!(letter >= 1);
        Word(vec![letter])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// The word with its last letter removed; `None` for the empty word.
    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// The word extended by one letter on the right.
    pub fn child(&self, letter: Letter) -> Word {
        debug_assert!(letter >= 1);
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// The prefix of length `min(len, self.len())`.
    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len.min(self.0.len())].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> Word {
        Word(self.0[start.min(self.0.len())..].to_vec())
    }

    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.len() >= prefix.0.len() && self.0[..prefix.0.len()] == prefix.0[..]
    }

    /// 0-based index of the first position where the two words disagree;
    /// `None` if one is a prefix of the other.
    pub fn first_disagreement(&self, other: &Word) -> Option<usize> {
        self.0
            .iter()
            .zip(other.0.iter())
            .position(|(a, b)| a != b)
    }

    pub fn validate_for(&self, pv: &PowerVector) -> Result<()> {
        for &l in &self.0 {
            if l == 0 || l as usize > pv.n() {
                return Err(Error::InvalidWord(format!(
                    "letter {} outside alphabet of size {}",
                    l,
                    pv.n()
                )));
            }
        }
        Ok(())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    /// Digit string for alphabets up to 9 letters, comma separated above.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&l| l <= 9) {
            for &l in &self.0 {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "Word(\u{2205})")
        } else {
            write!(f, "Word({self})")
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s == "\u{2205}" {
            return Ok(Word::empty());
        }
        let letters: Result<Vec<Letter>> = if s.contains(',') {
            s.split(',')
                .map(|part| {
                    part.trim()
                        .parse::<Letter>()
                        .map_err(|_| Error::InvalidWord(format!("bad letter {part:?}")))
                })
                .collect()
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .filter(|&d| d >= 1)
                        .map(|d| d as Letter)
                        .ok_or_else(|| Error::InvalidWord(format!("bad letter {c:?}")))
                })
                .collect()
        };
        Word::new(letters?)
    }
}

/// The scaling exponents `(a_1, ..., a_N)` of an IFS, `gcd = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerVector(Vec<u32>);

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl PowerVector {
    pub fn new(a: Vec<u32>) -> Result<Self> {
        if a.len() < 2 {
            return Err(Error::InvalidPowerVector(format!(
                "need at least 2 maps, got {}",
                a.len()
            )));
        }
        if a.len() > Letter::MAX as usize {
            return Err(Error::InvalidPowerVector("too many maps".into()));
        }
        if a.contains(&0) {
            return Err(Error::InvalidPowerVector("every a_i must be >= 1".into()));
        }
        let g = a.iter().copied().fold(0, gcd);
        if g != 1 {
            return Err(Error::InvalidPowerVector(format!(
                "gcd of {a:?} is {g}, must be 1"
            )));
        }
        Ok(PowerVector(a))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Exponent of a 1-based letter.
    pub fn a(&self, letter: Letter) -> u32 {
        self.0[(letter - 1) as usize]
    }

    pub fn a_max(&self) -> u32 {
        *self.0.iter().max().unwrap()
    }

    pub fn a_min(&self) -> u32 {
        *self.0.iter().min().unwrap()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        1..=self.0.len() as Letter
    }
}

/// `e(sigma)`, the sum of the letter exponents. `e(empty) = 0`.
pub fn e_weight(w: &Word, pv: &PowerVector) -> Result<u32> {
    w.validate_for(pv)?;
    Ok(w.letters().iter().map(|&l| pv.a(l)).sum())
}

/// `e_minus(sigma) = e(sigma with last letter dropped)`. `e_minus(empty) = 0`.
pub fn e_minus(w: &Word, pv: &PowerVector) -> Result<u32> {
    match w.parent() {
        Some(p) => e_weight(&p, pv),
        None => Ok(0),
    }
}

/// Membership in `Omega_k` is the pair of inequalities
/// `e(w) > k >= e_minus(w)`; no enumeration is needed.
pub fn omega_member(w: &Word, k: u32, pv: &PowerVector) -> Result<bool> {
    Ok(e_weight(w, pv)? > k && e_minus(w, pv)? <= k)
}

fn sort_words(words: &mut [Word]) {
    words.sort();
}

/// Direct enumeration of `Omega_k` by depth-first search: descend while
/// the running weight stays `<= k`, emit as soon as it exceeds `k`.
/// Independent of the prepend recursion; also serves as a low-level
/// fallback for `k < a_max` where the recursion does not apply.
fn enumerate_level(k: u32, pv: &PowerVector) -> Vec<Word> {
    fn rec(prefix: &mut Vec<Letter>, weight: u32, k: u32, pv: &PowerVector, out: &mut Vec<Word>) {
        for i in pv.letters() {
            let w2 = weight + pv.a(i);
            prefix.push(i);
            if w2 > k {
                out.push(Word(prefix.clone()));
            } else {
                rec(prefix, w2, k, pv, out);
            }
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), 0, k, pv, &mut out);
    sort_words(&mut out);
    out
}

/// `Omega_k` in canonical order, built by the prepend recursion
/// `Omega_k = union over i of i * Omega_{k - a_i}` once `k >= a_max`,
/// seeded with directly enumerated low levels. The union is disjoint;
/// a debug assertion checks that no duplicates appear.
pub fn omega_level_capped(k: u32, pv: &PowerVector, cap: u32) -> Result<Vec<Word>> {
    if k > cap {
        return Err(Error::LevelCap { k, cap });
    }
    let a_max = pv.a_max();
    let mut levels: Vec<Vec<Word>> = Vec::with_capacity(k as usize + 1);
    for j in 0..=k {
        let level = if j < a_max {
            enumerate_level(j, pv)
        } else {
            let letters: Vec<Letter> = pv.letters().collect();
            let branches = par::map_collect(&letters, |&i| {
                let src = &levels[(j - pv.a(i)) as usize];
                src.iter().map(|w| Word::single(i).concat(w)).collect::<Vec<_>>()
            });
            let mut merged: Vec<Word> = branches.into_iter().flatten().collect();
            sort_words(&mut merged);
            debug_assert!(merged.windows(2).all(|p| p[0] != p[1]));
            merged
        };
        levels.push(level);
    }
    Ok(levels.pop().unwrap())
}

/// `Omega_k` under the default level cap (or a spec-raised one via
/// [`omega_level_capped`]).
pub fn omega_level(k: u32, pv: &PowerVector) -> Result<Vec<Word>> {
    omega_level_capped(k, pv, DEFAULT_MAX_LEVEL)
}

/// The members of `Omega_k` whose weight is exactly `k + 1`; these are
/// the words that get extended when stepping to level `k + 1`.
pub fn omega_prime(omega_k: &[Word], k: u32, pv: &PowerVector) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for w in omega_k {
        if e_weight(w, pv)? == k + 1 {
            out.push(w.clone());
        }
    }
    Ok(out)
}

/// One step of the level recursion: keep the words of weight `> k + 1`
/// and extend each word of weight exactly `k + 1` by every letter.
/// Given `Omega_k`, returns `Omega_{k+1}`.
pub fn omega_step(k: u32, omega_k: &[Word], pv: &PowerVector) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for w in omega_k {
        if e_weight(w, pv)? == k + 1 {
            for i in pv.letters() {
                out.push(w.child(i));
            }
        } else {
            out.push(w.clone());
        }
    }
    sort_words(&mut out);
    Ok(out)
}

/// Result of a cylinder-partition audit. `witness`, when present, is a
/// depth-`d` word covered by zero or by at least two members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionCheck {
    pub ok: bool,
    pub witness: Option<Word>,
}

/// Checks that the cylinders of the given set partition the depth-`d`
/// tree: every length-`d` word has exactly one prefix in the set.
/// `depth` must be at least the longest member, otherwise members deeper
/// than the horizon would be invisible.
pub fn cylinder_partition_check_with_set(
    set: &[Word],
    depth: u32,
    pv: &PowerVector,
) -> Result<PartitionCheck> {
    for w in set {
        w.validate_for(pv)?;
    }
    let max_len = set.iter().map(|w| w.len()).max().unwrap_or(0);
    if (depth as usize) < max_len {
        return Err(Error::Precondition(format!(
            "depth {depth} is below the longest member length {max_len}"
        )));
    }

    // Trie over the member words; nodes exist only for member prefixes,
    // so the walk below touches O(total member length) nodes.
    #[derive(Default)]
    struct Node {
        children: HashMap<Letter, usize>,
        is_member: bool,
    }
    let mut trie: Vec<Node> = vec![Node::default()];
    for w in set {
        let mut cur = 0usize;
        for &l in w.letters() {
            cur = match trie[cur].children.get(&l) {
                Some(&c) => c,
                None => {
                    trie.push(Node::default());
                    let idx = trie.len() - 1;
                    trie[cur].children.insert(l, idx);
                    idx
                }
            };
        }
        trie[cur].is_member = true;
    }

    fn pad(prefix: &[Letter], depth: u32) -> Word {
        let mut v = prefix.to_vec();
        while v.len() < depth as usize {
            v.push(1);
        }
        Word(v)
    }

    // Walks every branch that still has member prefixes below it. A
    // branch leaving the trie with one member seen is covered exactly
    // once and is pruned; zero or two members is a violation.
    fn walk(
        trie: &[Node],
        node: Option<usize>,
        prefix: &mut Vec<Letter>,
        seen: u32,
        depth: u32,
        pv: &PowerVector,
    ) -> Option<Word> {
        if seen >= 2 {
            return Some(pad(prefix, depth));
        }
        match node {
            None => {
                if seen == 0 {
                    Some(pad(prefix, depth))
                } else {
                    None
                }
            }
            Some(idx) => {
                if prefix.len() == depth as usize {
                    return if seen == 1 { None } else { Some(pad(prefix, depth)) };
                }
                for i in pv.letters() {
                    let child = trie[idx].children.get(&i).copied();
                    let seen2 = seen + child.map_or(0, |c| trie[c].is_member as u32);
                    prefix.push(i);
                    let bad = walk(trie, child, prefix, seen2, depth, pv);
                    prefix.pop();
                    if bad.is_some() {
                        return bad;
                    }
                }
                None
            }
        }
    }

    let root_seen = trie[0].is_member as u32;
    let witness = walk(&trie, Some(0), &mut Vec::new(), root_seen, depth, pv);
    Ok(PartitionCheck {
        ok: witness.is_none(),
        witness,
    })
}

/// Partition audit for the computed `Omega_k`.
pub fn cylinder_partition_check(k: u32, depth: u32, pv: &PowerVector) -> Result<PartitionCheck> {
    let set = omega_level(k, pv)?;
    cylinder_partition_check_with_set(&set, depth, pv)
}

/// The level-`k` address labels, grown by repeated application of the
/// extend-or-keep step starting from the single letters. Must coincide
/// with `Omega_k`; the equality is what property tests assert.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledAddressSet {
    pub k: u32,
    pub entries: Vec<Word>,
}

pub fn labelled_addresses(k: u32, pv: &PowerVector) -> Result<LabelledAddressSet> {
    labelled_addresses_capped(k, pv, DEFAULT_MAX_LEVEL)
}

pub fn labelled_addresses_capped(
    k: u32,
    pv: &PowerVector,
    cap: u32,
) -> Result<LabelledAddressSet> {
    if k > cap {
        return Err(Error::LevelCap { k, cap });
    }
    let mut entries: Vec<Word> = pv.letters().map(Word::single).collect();
    sort_words(&mut entries);
    for j in 0..k {
        entries = omega_step(j, &entries, pv)?;
    }
    Ok(LabelledAddressSet { k, entries })
}

/// The address of a tile of a blown-up tiling: a backward word `theta`
/// (the expansion applied) and a forward word `omega in Omega_{e(theta)}`.
/// Stored in reduced form: a trailing letter of `theta` equal to the
/// leading letter of `omega` cancels, since the corresponding map and
/// its inverse compose to the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbsoluteAddress {
    theta: Word,
    omega: Word,
}

impl AbsoluteAddress {
    /// Stores the pair as given, without reduction.
    pub fn raw(theta: Word, omega: Word) -> Self {
        AbsoluteAddress { theta, omega }
    }

    /// Cancels matching letters across the dot. For a valid address the
    /// cancellation never consumes all of `omega`: a full collapse would
    /// force `e(omega) <= e(theta)`, contradicting membership in
    /// `Omega_{e(theta)}`.
    pub fn normalized(theta: &Word, omega: &Word) -> Self {
        let mut t = theta.letters().to_vec();
        let mut o = omega.letters().to_vec();
        let mut start = 0usize;
        while !t.is_empty() && start < o.len() && *t.last().unwrap() == o[start] {
            t.pop();
            start += 1;
        }
        AbsoluteAddress {
            theta: Word(t),
            omega: Word(o.split_off(start)),
        }
    }

    pub fn theta(&self) -> &Word {
        &self.theta
    }

    pub fn omega(&self) -> &Word {
        &self.omega
    }

    pub fn is_reduced(&self) -> bool {
        match (self.theta.last(), self.omega.first()) {
            (Some(t), Some(o)) => t != o,
            _ => true,
        }
    }
}

impl fmt::Display for AbsoluteAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.theta, self.omega)
    }
}

impl FromStr for AbsoluteAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (t, o) = s
            .split_once('.')
            .ok_or_else(|| Error::InvalidWord(format!("address {s:?} lacks a '.'")))?;
        Ok(AbsoluteAddress::raw(t.parse()?, o.parse()?))
    }
}

/// An address is valid when it is reduced and its forward word lies in
/// `Omega_{e(theta)}`.
pub fn absolute_address_validate(addr: &AbsoluteAddress, pv: &PowerVector) -> Result<bool> {
    addr.theta().validate_for(pv)?;
    addr.omega().validate_for(pv)?;
    if !addr.is_reduced() {
        return Ok(false);
    }
    let k = e_weight(addr.theta(), pv)?;
    omega_member(addr.omega(), k, pv)
}

/// An infinite word `head cycle cycle cycle ...`; prefixes of these
/// parameterize the blow-up sequences with a self-similarity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    head: Word,
    cycle: Word,
}

impl EventuallyPeriodic {
    pub fn new(head: Word, cycle: Word) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidWord("cycle must be nonempty".into()));
        }
        Ok(EventuallyPeriodic { head, cycle })
    }

    pub fn head(&self) -> &Word {
        &self.head
    }

    pub fn cycle(&self) -> &Word {
        &self.cycle
    }

    pub fn prefix(&self, len: usize) -> Word {
        let mut v = Vec::with_capacity(len);
        v.extend_from_slice(self.head.letters());
        while v.len() < len {
            v.extend_from_slice(self.cycle.letters());
        }
        v.truncate(len);
        Word(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden_pv() -> PowerVector {
        PowerVector::new(vec![1, 2]).unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn words(list: &[&str]) -> Vec<Word> {
        list.iter().map(|s| w(s)).collect()
    }

    #[test]
    fn weights_on_the_golden_power_vector() {
        let pv = golden_pv();
        assert_eq!(e_weight(&Word::empty(), &pv).unwrap(), 0);
        assert_eq!(e_minus(&Word::empty(), &pv).unwrap(), 0);
        assert_eq!(e_weight(&w("122"), &pv).unwrap(), 5);
        assert_eq!(e_minus(&w("122"), &pv).unwrap(), 3);
        assert_eq!(e_weight(&w("1"), &pv).unwrap(), 1);
        assert_eq!(e_minus(&w("1"), &pv).unwrap(), 0);
    }

    #[test]
    fn weight_rejects_letters_outside_alphabet() {
        let pv = golden_pv();
        assert!(e_weight(&w("13"), &pv).is_err());
    }

    #[test]
    fn omega_zero_is_the_alphabet() {
        let pv = golden_pv();
        assert_eq!(omega_level(0, &pv).unwrap(), words(&["1", "2"]));
        let pv3 = PowerVector::new(vec![1, 1, 2]).unwrap();
        assert_eq!(omega_level(0, &pv3).unwrap(), words(&["1", "2", "3"]));
    }

    #[test]
    fn omega_one_golden() {
        let pv = golden_pv();
        assert_eq!(omega_level(1, &pv).unwrap(), words(&["2", "11", "12"]));
    }

    #[test]
    fn omega_sizes_follow_the_fibonacci_recursion() {
        let pv = golden_pv();
        let sizes: Vec<usize> = (0..=5)
            .map(|k| omega_level(k, &pv).unwrap().len())
            .collect();
        assert_eq!(sizes, vec![2, 3, 5, 8, 13, 21]);
    }

    #[test]
    fn omega_members_satisfy_the_defining_inequalities() {
        let pv = PowerVector::new(vec![2, 3]).unwrap();
        for k in 0..=9 {
            for word in omega_level(k, &pv).unwrap() {
                assert!(e_weight(&word, &pv).unwrap() > k);
                assert!(e_minus(&word, &pv).unwrap() <= k);
                assert!(omega_member(&word, k, &pv).unwrap());
            }
        }
    }

    #[test]
    fn level_cap_is_enforced() {
        let pv = golden_pv();
        let err = omega_level(DEFAULT_MAX_LEVEL + 1, &pv).unwrap_err();
        assert!(matches!(err, Error::LevelCap { .. }));
        assert!(omega_level_capped(DEFAULT_MAX_LEVEL + 1, &pv, 30).is_ok());
    }

    #[test]
    fn step_matches_direct_enumeration() {
        let pv = golden_pv();
        for k in 0..8 {
            let cur = omega_level(k, &pv).unwrap();
            let stepped = omega_step(k, &cur, &pv).unwrap();
            assert_eq!(stepped, omega_level(k + 1, &pv).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn step_is_the_identity_when_no_word_has_weight_k_plus_one() {
        // With a = (2, 3) no word has weight 1, so stepping from level 0
        // changes nothing.
        let pv = PowerVector::new(vec![2, 3]).unwrap();
        let cur = omega_level(0, &pv).unwrap();
        assert_eq!(omega_step(0, &cur, &pv).unwrap(), cur);
    }

    #[test]
    fn omega_prime_selects_the_extendable_words() {
        let pv = golden_pv();
        let omega1 = omega_level(1, &pv).unwrap();
        let prime = omega_prime(&omega1, 1, &pv).unwrap();
        assert_eq!(prime, words(&["2", "11"]));
    }

    #[test]
    fn cylinder_partition_holds_for_computed_levels() {
        let pv = golden_pv();
        for k in 0..=4 {
            let check = cylinder_partition_check(k, k + 2, &pv).unwrap();
            assert!(check.ok, "k = {k}: witness {:?}", check.witness);
        }
        let check = cylinder_partition_check(0, 1, &pv).unwrap();
        assert!(check.ok);
    }

    #[test]
    fn cylinder_partition_rejects_shallow_depth() {
        let pv = golden_pv();
        let err = cylinder_partition_check(2, 2, &pv).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn cylinder_partition_flags_a_missing_branch() {
        let pv = golden_pv();
        // Omega_1 with the word 11 deleted: branch 11... is uncovered.
        let set = words(&["2", "12"]);
        let check = cylinder_partition_check_with_set(&set, 4, &pv).unwrap();
        assert!(!check.ok);
        assert_eq!(check.witness.unwrap(), w("1111"));
    }

    #[test]
    fn cylinder_partition_flags_a_double_cover() {
        let pv = golden_pv();
        // 1 covers everything 11 covers.
        let set = words(&["1", "2", "11"]);
        let check = cylinder_partition_check_with_set(&set, 3, &pv).unwrap();
        assert!(!check.ok);
        let witness = check.witness.unwrap();
        assert!(witness.starts_with(&w("11")));
    }

    #[test]
    fn labelled_addresses_match_omega() {
        let pv = golden_pv();
        assert_eq!(
            labelled_addresses(0, &pv).unwrap().entries,
            words(&["1", "2"])
        );
        assert_eq!(
            labelled_addresses(1, &pv).unwrap().entries,
            words(&["2", "11", "12"])
        );
        let l3 = labelled_addresses(3, &pv).unwrap();
        assert_eq!(l3.entries.len(), 8);
        assert_eq!(l3.entries, omega_level(3, &pv).unwrap());
    }

    #[test]
    fn address_normalization_cancels_across_the_dot() {
        let a = AbsoluteAddress::normalized(&w("12"), &w("22"));
        assert_eq!(a.theta(), &w("1"));
        assert_eq!(a.omega(), &w("2"));
        assert_eq!(a.to_string(), "1.2");

        let b = AbsoluteAddress::normalized(&w("12"), &w("11"));
        assert_eq!(b.to_string(), "12.11");

        let c = AbsoluteAddress::normalized(&Word::empty(), &w("21"));
        assert_eq!(c.to_string(), ".21");
    }

    #[test]
    fn address_validation_checks_membership_and_reduction() {
        let pv = golden_pv();
        let ok = AbsoluteAddress::raw(Word::empty(), w("2"));
        assert!(absolute_address_validate(&ok, &pv).unwrap());

        // e(1) = 1 and Omega_1 contains 12, but theta = 1 followed by
        // omega = 12 is unreduced.
        let unreduced = AbsoluteAddress::raw(w("1"), w("12"));
        assert!(!absolute_address_validate(&unreduced, &pv).unwrap());

        // e(11) = 2, not > e(2) = 2.
        let not_member = AbsoluteAddress::raw(w("2"), w("11"));
        assert!(!absolute_address_validate(&not_member, &pv).unwrap());

        let member = AbsoluteAddress::raw(w("2"), w("112"));
        assert!(absolute_address_validate(&member, &pv).unwrap());
    }

    #[test]
    fn address_round_trips_through_display() {
        let a = AbsoluteAddress::normalized(&w("121"), &w("22"));
        let parsed: AbsoluteAddress = a.to_string().parse().unwrap();
        assert_eq!(parsed, a);
        let empty_theta: AbsoluteAddress = ".21".parse().unwrap();
        assert_eq!(empty_theta.theta(), &Word::empty());
        assert_eq!(empty_theta.omega(), &w("21"));
    }

    #[test]
    fn eventually_periodic_prefixes() {
        let theta = EventuallyPeriodic::new(w("1"), w("21")).unwrap();
        assert_eq!(theta.prefix(0), Word::empty());
        assert_eq!(theta.prefix(1), w("1"));
        assert_eq!(theta.prefix(4), w("1212"));
        assert_eq!(theta.prefix(6), w("121212"));
        assert!(EventuallyPeriodic::new(w("1"), Word::empty()).is_err());
    }

    #[test]
    fn word_ordering_is_by_length_then_lexicographic() {
        let mut v = words(&["2", "11", "1", "12", "111"]);
        v.sort();
        assert_eq!(v, words(&["1", "2", "11", "12", "111"]));
    }

    #[test]
    fn first_disagreement_indexes_the_symbolic_metric() {
        assert_eq!(w("1212").first_disagreement(&w("1221")), Some(2));
        assert_eq!(w("12").first_disagreement(&w("1212")), None);
        assert_eq!(w("").first_disagreement(&w("1")), None);
    }
}
