use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{basis_upto, Element, VertexAlgebra};
use crate::error::{Error, Result};
use crate::linalg::SparseVec;
use crate::scalar::{parse_fraction, to_fraction_string, Scalar};

/// Basis word of a [`TableAlgebra`], ordered by weight and then label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableWord {
    weight: u32,
    label: Arc<str>,
}

impl TableWord {
    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Display for TableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl fmt::Debug for TableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub label: String,
    pub weight: u32,
    #[serde(default)]
    pub residue: u32,
}

/// One structure constant record `u_n v = result`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureRecord {
    pub u: String,
    pub n: i64,
    pub v: String,
    /// Label to exact fraction string.
    pub result: BTreeMap<String, String>,
}

/// On-disk description of a vertex algebra truncated at `weight_cap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureTable {
    pub order: u32,
    pub weight_cap: u32,
    pub central_charge: String,
    pub vacuum: String,
    pub conformal: BTreeMap<String, String>,
    pub basis: Vec<BasisEntry>,
    pub products: Vec<StructureRecord>,
}

impl StructureTable {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Tabulates every product of `alg` whose output weight stays within `cap`.
    pub fn from_algebra<A: VertexAlgebra>(alg: &A, cap: u32) -> Self {
        let words = basis_upto(alg, cap);
        let vec_map = |v: &Element<A::Word>| {
            v.iter()
                .map(|(w, c)| (w.to_string(), to_fraction_string(c)))
                .collect::<BTreeMap<_, _>>()
        };
        let mut products = Vec::new();
        for u in &words {
            for v in &words {
                let total = (alg.weight(u) + alg.weight(v)) as i64;
                for n in (total - 1 - cap as i64)..total {
                    let out = alg.nth_product(u, n, v);
                    if out.is_zero() {
                        continue;
                    }
                    products.push(StructureRecord {
                        u: u.to_string(),
                        n,
                        v: v.to_string(),
                        result: vec_map(&out),
                    });
                }
            }
        }
        StructureTable {
            order: alg.order(),
            weight_cap: cap,
            central_charge: to_fraction_string(&alg.central_charge()),
            vacuum: alg.vacuum().to_string(),
            conformal: vec_map(&alg.conformal_vector()),
            basis: words
                .iter()
                .map(|w| BasisEntry {
                    label: w.to_string(),
                    weight: alg.weight(w),
                    residue: alg.residue(w),
                })
                .collect(),
            products,
        }
    }
}

/// Vertex algebra given by a finite structure-constant table.
///
/// Products not listed, or whose output weight exceeds the cap, are zero.
#[derive(Clone, Debug)]
pub struct TableAlgebra {
    order: u32,
    cap: u32,
    central_charge: Scalar,
    vacuum: TableWord,
    conformal: Element<TableWord>,
    words: BTreeMap<String, (TableWord, u32)>,
    by_weight: BTreeMap<u32, Vec<TableWord>>,
    products: HashMap<(TableWord, i64, TableWord), Element<TableWord>>,
}

impl TableAlgebra {
    pub fn from_table(table: &StructureTable) -> Result<Self> {
        let bad = |msg: String| Error::InvalidTable(msg);
        if table.order == 0 {
            return Err(bad("order must be positive".into()));
        }
        let mut words = BTreeMap::new();
        let mut by_weight: BTreeMap<u32, Vec<TableWord>> = BTreeMap::new();
        for entry in &table.basis {
            if entry.weight > table.weight_cap {
                return Err(bad(format!("{} lies above the weight cap", entry.label)));
            }
            if entry.residue >= table.order {
                return Err(bad(format!("{} has residue out of range", entry.label)));
            }
            let word = TableWord {
                weight: entry.weight,
                label: Arc::from(entry.label.as_str()),
            };
            if words
                .insert(entry.label.clone(), (word.clone(), entry.residue))
                .is_some()
            {
                return Err(bad(format!("duplicate label {}", entry.label)));
            }
            by_weight.entry(entry.weight).or_default().push(word);
        }
        for list in by_weight.values_mut() {
            list.sort();
        }

        let lookup = |label: &str| -> Result<(TableWord, u32)> {
            words
                .get(label)
                .cloned()
                .ok_or_else(|| bad(format!("unknown label {label}")))
        };
        let read_vec = |m: &BTreeMap<String, String>| -> Result<Element<TableWord>> {
            let mut out = SparseVec::new();
            for (label, c) in m {
                out.add_term(lookup(label)?.0, parse_fraction(c)?);
            }
            Ok(out)
        };

        let (vacuum, vac_res) = lookup(&table.vacuum)?;
        if vacuum.weight != 0 || vac_res != 0 {
            return Err(bad("vacuum must have weight 0 and residue 0".into()));
        }
        let conformal = read_vec(&table.conformal)?;
        if conformal.keys().any(|w| w.weight != 2) {
            return Err(bad("conformal vector must have weight 2".into()));
        }

        let mut products = HashMap::new();
        for rec in &table.products {
            let (u, ru) = lookup(&rec.u)?;
            let (v, rv) = lookup(&rec.v)?;
            let result = read_vec(&rec.result)?;
            let expected = u.weight as i64 + v.weight as i64 - rec.n - 1;
            for w in result.keys() {
                if w.weight as i64 != expected {
                    return Err(bad(format!(
                        "{}_{} {} has a term {} of weight {}, expected {}",
                        rec.u, rec.n, rec.v, w, w.weight, expected
                    )));
                }
                let rw = words[w.label()].1;
                if rw != (ru + rv) % table.order {
                    return Err(bad(format!(
                        "{}_{} {} has a term {} outside eigenspace {}",
                        rec.u,
                        rec.n,
                        rec.v,
                        w,
                        (ru + rv) % table.order
                    )));
                }
            }
            if products.insert((u, rec.n, v), result).is_some() {
                return Err(bad(format!(
                    "duplicate record {}_{} {}",
                    rec.u, rec.n, rec.v
                )));
            }
        }

        Ok(Self {
            order: table.order,
            cap: table.weight_cap,
            central_charge: parse_fraction(&table.central_charge)?,
            vacuum,
            conformal,
            words,
            by_weight,
            products,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_table(&StructureTable::from_json(text)?)
    }
}

impl VertexAlgebra for TableAlgebra {
    type Word = TableWord;

    fn order(&self) -> u32 {
        self.order
    }

    fn vacuum(&self) -> TableWord {
        self.vacuum.clone()
    }

    fn parse_word(&self, s: &str) -> Result<TableWord> {
        self.words
            .get(s.trim())
            .map(|(w, _)| w.clone())
            .ok_or_else(|| Error::Parse(format!("unknown basis label {s:?}")))
    }

    fn weight(&self, w: &TableWord) -> u32 {
        w.weight
    }

    fn residue(&self, w: &TableWord) -> u32 {
        self.words.get(w.label()).map_or(0, |(_, r)| *r)
    }

    fn basis(&self, weight: u32) -> Vec<TableWord> {
        self.by_weight.get(&weight).cloned().unwrap_or_default()
    }

    fn nth_product(&self, u: &TableWord, n: i64, v: &TableWord) -> Element<TableWord> {
        if *u == self.vacuum {
            return if n == -1 {
                SparseVec::unit(v.clone())
            } else {
                SparseVec::new()
            };
        }
        self.products
            .get(&(u.clone(), n, v.clone()))
            .cloned()
            .unwrap_or_default()
    }

    fn conformal_vector(&self) -> Element<TableWord> {
        self.conformal.clone()
    }

    fn central_charge(&self) -> Scalar {
        self.central_charge.clone()
    }

    fn weight_cap(&self) -> Option<u32> {
        Some(self.cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voa::{Automorphism, FreeBoson};

    #[test]
    fn round_trip_through_json() {
        let fb = FreeBoson::new(Automorphism::Theta);
        let table = StructureTable::from_algebra(&fb, 3);
        let alg = TableAlgebra::from_json(&table.to_json()).unwrap();
        assert_eq!(alg.order(), 2);
        for u in basis_upto(&fb, 3) {
            for v in basis_upto(&fb, 3) {
                let total = (u.weight() + v.weight()) as i64;
                for n in (total - 4)..total {
                    let want = fb.nth_product(&u, n, &v);
                    let tu = alg.parse_word(&u.to_string()).unwrap();
                    let tv = alg.parse_word(&v.to_string()).unwrap();
                    let got = alg.nth_product(&tu, n, &tv);
                    let got = got.map_keys(|w| w.to_string());
                    let want = want.map_keys(|w| w.to_string());
                    assert_eq!(got, want, "{u}_{n} {v}");
                }
            }
        }
        assert_eq!(alg.residue(&alg.parse_word("h(-2)1").unwrap()), 1);
    }

    #[test]
    fn loader_rejects_grading_violation() {
        let fb = FreeBoson::new(Automorphism::Trivial);
        let mut table = StructureTable::from_algebra(&fb, 2);
        let rec = table
            .products
            .iter_mut()
            .find(|r| r.u == "h(-1)1" && r.n == 1 && r.v == "h(-1)1")
            .unwrap();
        rec.result = [("h(-1)1".to_string(), "1/1".to_string())].into();
        let err = TableAlgebra::from_table(&table).unwrap_err();
        assert!(matches!(err, Error::InvalidTable(_)));
    }

    #[test]
    fn loader_rejects_unknown_label() {
        let fb = FreeBoson::new(Automorphism::Trivial);
        let mut table = StructureTable::from_algebra(&fb, 1);
        table.vacuum = "nope".into();
        assert!(TableAlgebra::from_table(&table).is_err());
    }
}
