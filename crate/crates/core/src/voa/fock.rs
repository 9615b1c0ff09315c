use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Element, VertexAlgebra};
use crate::error::Error;
use crate::linalg::SparseVec;
use crate::scalar::{frac, ibinom, int, sign, Scalar};

/// Monomial `h(-n_1) ... h(-n_k) 1` of the rank-one Heisenberg Fock space,
/// stored as the weakly decreasing list of parts.
///
/// Ordered by weight first, then lexicographically on the parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FockWord {
    parts: Vec<u32>,
}

impl FockWord {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn new(mut parts: Vec<u32>) -> Result<Self, Error> {
        if parts.contains(&0) {
            return Err(Error::Parse("Fock word parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_vacuum(&self) -> bool {
        self.parts.is_empty()
    }

    fn with_part(&self, p: u32) -> Self {
        let mut parts = self.parts.clone();
        let at = parts.partition_point(|&x| x >= p);
        parts.insert(at, p);
        Self { parts }
    }

    fn without_part(&self, p: u32) -> Option<Self> {
        let at = self.parts.iter().position(|&x| x == p)?;
        let mut parts = self.parts.clone();
        parts.remove(at);
        Some(Self { parts })
    }

    /// All words of the given weight in ascending order.
    pub fn of_weight(weight: u32) -> Vec<Self> {
        fn go(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<FockWord>) {
            if rest == 0 {
                out.push(FockWord {
                    parts: prefix.clone(),
                });
                return;
            }
            for p in 1..=max.min(rest) {
                prefix.push(p);
                go(rest - p, p, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        go(weight, weight, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl Ord for FockWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.parts.cmp(&other.parts))
    }
}

impl PartialOrd for FockWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FockWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.parts {
            write!(f, "h(-{p})")?;
        }
        write!(f, "1")
    }
}

impl fmt::Debug for FockWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for FockWord {
    type Err = Error;

    /// Accepts `"1"`, `"h(-2)h(-1)1"` and `"h(-2)h(-1)"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("not a Fock word: {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut rest = compact.as_str();
        let mut parts = Vec::new();
        while let Some(tail) = rest.strip_prefix("h(-") {
            let close = tail.find(')').ok_or_else(bad)?;
            let p: u32 = tail[..close].parse().map_err(|_| bad())?;
            parts.push(p);
            rest = &tail[close + 1..];
        }
        if !(rest.is_empty() || rest == "1") {
            return Err(bad());
        }
        FockWord::new(parts)
    }
}

impl Serialize for FockWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FockWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Automorphism {
    Trivial,
    /// The involution `h -> -h`.
    Theta,
}

impl Automorphism {
    pub fn order(self) -> u32 {
        match self {
            Automorphism::Trivial => 1,
            Automorphism::Theta => 2,
        }
    }
}

impl FromStr for Automorphism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "trivial" => Ok(Automorphism::Trivial),
            "theta" => Ok(Automorphism::Theta),
            other => Err(Error::Parse(format!("unknown automorphism {other:?}"))),
        }
    }
}

type ProductKey = (FockWord, i64, FockWord);

/// The Heisenberg vertex operator algebra `M(1)` with `<h, h> = 1`,
/// `omega = h(-1)^2 1 / 2` and central charge 1.
pub struct FreeBoson {
    automorphism: Automorphism,
    memo: RwLock<HashMap<ProductKey, Element<FockWord>>>,
}

impl FreeBoson {
    pub fn new(automorphism: Automorphism) -> Self {
        Self {
            automorphism,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn automorphism(&self) -> Automorphism {
        self.automorphism
    }

    /// Action of the Heisenberg mode `h(n)` on a word.
    pub fn heis_mode_word(n: i64, w: &FockWord) -> Element<FockWord> {
        match n.cmp(&0) {
            Ordering::Less => SparseVec::unit(w.with_part((-n) as u32)),
            Ordering::Equal => SparseVec::new(),
            Ordering::Greater => {
                let p = n as u32;
                let count = w.parts.iter().filter(|&&x| x == p).count() as i64;
                match w.without_part(p) {
                    Some(rest) => SparseVec::term(rest, int(n * count)),
                    None => SparseVec::new(),
                }
            }
        }
    }

    pub fn heis_mode(n: i64, v: &Element<FockWord>) -> Element<FockWord> {
        let mut out = SparseVec::new();
        for (w, c) in v.iter() {
            out.axpy(c, &Self::heis_mode_word(n, w));
        }
        out
    }

    /// Iterate formula with `a = h(-1) 1`, peeling the largest part `m` off
    /// `u = a_{-m} u'`:
    ///
    /// `(a_{-m} u')_n v = sum_i C(m+i-1, i) [ a_{-m-i} u'_{n+i} v - (-1)^m u'_{n-m-i} a_i v ]`
    fn compute_product(&self, u: &FockWord, n: i64, v: &FockWord) -> Element<FockWord> {
        let m = u.parts[0];
        let rest = FockWord {
            parts: u.parts[1..].to_vec(),
        };
        let mi = m as i64;
        let rest_wt = rest.weight() as i64;
        let v_wt = v.weight() as i64;
        let mut out = SparseVec::new();

        let mut i = 0i64;
        while n + i < rest_wt + v_wt {
            let inner = self.nth_product(&rest, n + i, v);
            if !inner.is_zero() {
                let c = ibinom(mi + i - 1, i as u32);
                out.axpy(&c, &Self::heis_mode(-mi - i, &inner));
            }
            i += 1;
        }

        let outer_sign = -sign(mi);
        for i in 1..=v_wt {
            let lowered = Self::heis_mode_word(i, v);
            if lowered.is_zero() {
                continue;
            }
            let c = &outer_sign * ibinom(mi + i - 1, i as u32);
            for (w, cw) in lowered.iter() {
                out.axpy(&(&c * cw), &self.nth_product(&rest, n - mi - i, w));
            }
        }
        out
    }
}

impl VertexAlgebra for FreeBoson {
    type Word = FockWord;

    fn order(&self) -> u32 {
        self.automorphism.order()
    }

    fn vacuum(&self) -> FockWord {
        FockWord::vacuum()
    }

    fn parse_word(&self, s: &str) -> Result<FockWord, Error> {
        s.parse()
    }

    fn weight(&self, w: &FockWord) -> u32 {
        w.weight()
    }

    fn residue(&self, w: &FockWord) -> u32 {
        match self.automorphism {
            Automorphism::Trivial => 0,
            Automorphism::Theta => (w.len() % 2) as u32,
        }
    }

    fn basis(&self, weight: u32) -> Vec<FockWord> {
        FockWord::of_weight(weight)
    }

    fn nth_product(&self, u: &FockWord, n: i64, v: &FockWord) -> Element<FockWord> {
        if u.is_vacuum() {
            return if n == -1 {
                SparseVec::unit(v.clone())
            } else {
                SparseVec::new()
            };
        }
        if n >= (u.weight() + v.weight()) as i64 {
            return SparseVec::new();
        }
        if u.parts == [1] {
            return Self::heis_mode_word(n, v);
        }
        let key = (u.clone(), n, v.clone());
        if let Some(hit) = self.memo.read().expect("memo lock").get(&key) {
            return hit.clone();
        }
        let value = self.compute_product(u, n, v);
        self.memo
            .write()
            .expect("memo lock")
            .entry(key)
            .or_insert(value)
            .clone()
    }

    fn conformal_vector(&self) -> Element<FockWord> {
        SparseVec::term(FockWord { parts: vec![1, 1] }, frac(1, 2))
    }

    fn central_charge(&self) -> Scalar {
        int(1)
    }

    /// Normal-ordered quadratic `L(n) = 1/2 sum_k :h(k) h(n-k):`.
    fn virasoro(&self, n: i64, w: &FockWord) -> Element<FockWord> {
        let wt = w.weight() as i64;
        let mut out = SparseVec::new();
        let half = frac(1, 2);
        for k in (n - wt)..=wt {
            let (lo, hi) = if k <= n - k { (k, n - k) } else { (n - k, k) };
            if hi > wt || lo == 0 || hi == 0 {
                continue;
            }
            let once = Self::heis_mode_word(hi, w);
            if once.is_zero() {
                continue;
            }
            out.axpy(&half, &Self::heis_mode(lo, &once));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voa::{nth_product, phi_map, virasoro_mode};

    fn w(parts: &[u32]) -> FockWord {
        FockWord::new(parts.to_vec()).unwrap()
    }

    fn e(parts: &[u32]) -> Element<FockWord> {
        SparseVec::unit(w(parts))
    }

    #[test]
    fn word_parsing_and_order() {
        assert_eq!("1".parse::<FockWord>().unwrap(), FockWord::vacuum());
        assert_eq!("h(-2)h(-1)1".parse::<FockWord>().unwrap(), w(&[2, 1]));
        assert_eq!("h(-1) h(-2)".parse::<FockWord>().unwrap(), w(&[2, 1]));
        assert!("x(-1)".parse::<FockWord>().is_err());
        assert!("h(-0)1".parse::<FockWord>().is_err());
        assert_eq!(w(&[3, 1]).to_string(), "h(-3)h(-1)1");
        assert!(w(&[1, 1, 1]) < w(&[2, 1]));
        assert!(w(&[3]) < w(&[1, 1, 1, 1]));
        assert_eq!(FockWord::of_weight(4).len(), 5);
        assert_eq!(FockWord::of_weight(0), vec![FockWord::vacuum()]);
    }

    #[test]
    fn heisenberg_mode_examples() {
        assert_eq!(FreeBoson::heis_mode(1, &e(&[1])), e(&[]));
        assert!(FreeBoson::heis_mode(0, &e(&[3, 2])).is_zero());
        assert_eq!(
            FreeBoson::heis_mode(2, &e(&[2, 1])),
            SparseVec::term(w(&[1]), int(2))
        );
        assert_eq!(
            FreeBoson::heis_mode(1, &e(&[1, 1])),
            SparseVec::term(w(&[1]), int(2))
        );
    }

    #[test]
    fn nth_product_examples() {
        let voa = FreeBoson::new(Automorphism::Trivial);
        let h = e(&[1]);
        let one = e(&[]);
        let v = e(&[3, 1]);
        assert_eq!(nth_product(&voa, &one, -1, &v), v);
        assert!(nth_product(&voa, &one, 0, &v).is_zero());
        assert!(nth_product(&voa, &one, -2, &v).is_zero());
        assert!(nth_product(&voa, &h, 0, &h).is_zero());
        assert_eq!(nth_product(&voa, &h, 1, &h), one);
        assert_eq!(nth_product(&voa, &h, -1, &h), e(&[1, 1]));
        // u_{-1} 1 = u and u_{-2} 1 = L(-1) u
        let u = e(&[2, 1, 1]);
        assert_eq!(nth_product(&voa, &u, -1, &one), u);
        assert_eq!(nth_product(&voa, &u, -2, &one), virasoro_mode(&voa, -1, &u));
    }

    #[test]
    fn virasoro_examples() {
        let voa = FreeBoson::new(Automorphism::Trivial);
        let omega = voa.conformal_vector();
        assert_eq!(
            virasoro_mode(&voa, 0, &e(&[3, 1])),
            SparseVec::term(w(&[3, 1]), int(4))
        );
        assert!(virasoro_mode(&voa, 1, &omega).is_zero());
        assert!(virasoro_mode(&voa, -1, &e(&[])).is_zero());
        assert_eq!(virasoro_mode(&voa, -1, &e(&[1])), e(&[2]));
        // L(2) omega = c/2
        assert_eq!(
            virasoro_mode(&voa, 2, &omega),
            SparseVec::term(FockWord::vacuum(), frac(1, 2))
        );
    }

    #[test]
    fn phi_examples() {
        let voa = FreeBoson::new(Automorphism::Trivial);
        assert_eq!(phi_map(&voa, &e(&[])), e(&[]));
        assert_eq!(phi_map(&voa, &e(&[1])), e(&[1]).scaled(&int(-1)));
        let omega = voa.conformal_vector();
        assert_eq!(phi_map(&voa, &omega), omega);
        // L(1) h(-2)1 = 2 h(-1)1, so phi(h(-2)1) = h(-2)1 + 2 h(-1)1
        let expected = e(&[2]).add(&e(&[1]).scaled(&int(2)));
        assert_eq!(phi_map(&voa, &e(&[2])), expected);
    }

    #[test]
    fn residues() {
        let theta = FreeBoson::new(Automorphism::Theta);
        assert_eq!(theta.residue(&w(&[])), 0);
        assert_eq!(theta.residue(&w(&[2])), 1);
        assert_eq!(theta.residue(&w(&[2, 1])), 0);
        let triv = FreeBoson::new(Automorphism::Trivial);
        assert_eq!(triv.residue(&w(&[2])), 0);
    }
}
