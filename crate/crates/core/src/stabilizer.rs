//! Stabilizer groups, syndromes and the fidelity expansion.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{r, ComplexMatrix};
use crate::pauli::{Pauli, PauliString, Phase};

/// Generators of the five-qubit code, original labelling.
pub const STANDARD_GENERATORS: [&str; 4] = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"];

/// The same generators written on the relabelled wires `1'..5'`.
pub const RELABELED_GENERATORS: [&str; 4] = ["XIZXZ", "IXXZZ", "XZIZX", "ZZXXI"];

/// Independent, mutually commuting generators with phase `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerSet {
    generators: Vec<PauliString>,
}

impl StabilizerSet {
    pub fn new(generators: Vec<PauliString>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::InvalidGenerators("no generators".into()));
        };
        let n = first.num_qubits();
        for g in &generators {
            if g.num_qubits() != n {
                return Err(Error::LengthMismatch { left: n, right: g.num_qubits() });
            }
            if g.phase() != Phase::PLUS_ONE {
                return Err(Error::InvalidGenerators(format!("{g} has phase other than +1")));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !a.commutes(b)? {
                    return Err(Error::InvalidGenerators(format!("{a} and {b} anticommute")));
                }
            }
        }
        let set = Self { generators };
        // Independence: every nonempty subset product must differ from identity.
        for mask in 1..(1u32 << set.len()) {
            if set.product_of_subset(mask).is_identity() {
                return Err(Error::InvalidGenerators(format!("subset {mask:#b} multiplies to identity")));
            }
        }
        Ok(set)
    }

    fn parse(strings: &[&str]) -> Self {
        let gens = strings.iter().map(|s| s.parse().expect("static generator")).collect();
        Self::new(gens).expect("static generators are valid")
    }

    /// `g1..g4` in the original labelling.
    pub fn standard() -> Self {
        Self::parse(&STANDARD_GENERATORS)
    }

    /// `g1..g4` on the relabelled wires.
    pub fn relabeled() -> Self {
        Self::parse(&RELABELED_GENERATORS)
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.generators[0].num_qubits()
    }

    /// Moves the letter on qubit `q` to qubit `map[q]` in every generator.
    pub fn permuted(&self, map: &[usize]) -> Self {
        Self { generators: self.generators.iter().map(|g| g.permuted(map)).collect() }
    }

    /// Product of the generators selected by the bits of `mask`, lowest bit
    /// first.
    pub fn product_of_subset(&self, mask: u32) -> PauliString {
        let mut acc = PauliString::identity(self.num_qubits());
        for (i, g) in self.generators.iter().enumerate() {
            if mask & (1 << i) != 0 {
                acc = acc.multiply(g).expect("equal lengths checked at construction");
            }
        }
        acc
    }

    /// All `2^k` group elements, indexed by generator subset mask.
    pub fn group_elements(&self) -> Vec<PauliString> {
        (0..(1u32 << self.len())).map(|m| self.product_of_subset(m)).collect()
    }

    /// Projector onto the joint `+1` eigenspace: `2^{-k} Σ_{s ∈ S} s`.
    pub fn code_projector(&self) -> ComplexMatrix {
        let dim = 1 << self.num_qubits();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for s in self.group_elements() {
            acc = &acc + &s.matrix();
        }
        acc.scale(r(1.0 / (1u64 << self.len()) as f64))
    }

    /// Sign `i` is `-1` iff `error` anticommutes with generator `i`.
    pub fn syndrome_of(&self, error: &PauliString) -> Result<Syndrome> {
        let signs = self
            .generators
            .iter()
            .map(|g| Ok(if g.commutes(error)? { 1 } else { -1 }))
            .collect::<Result<Vec<i8>>>()?;
        Ok(Syndrome { signs })
    }

    /// Syndromes of all `3n` single-qubit errors. Fails unless they are
    /// pairwise distinct and nontrivial.
    pub fn syndrome_table(&self) -> Result<SyndromeTable> {
        let n = self.num_qubits();
        let mut entries = Vec::with_capacity(3 * n);
        let mut seen = BTreeMap::new();
        for q in 0..n {
            for p in Pauli::NONTRIVIAL {
                let err = PauliString::single(n, q, p);
                let s = self.syndrome_of(&err)?;
                if s.is_trivial() {
                    return Err(Error::InvalidGenerators(format!("{err} is undetected")));
                }
                if let Some(prev) = seen.insert(s.clone(), err.clone()) {
                    return Err(Error::InvalidGenerators(format!("{prev} and {err} share syndrome {s}")));
                }
                entries.push(((q, p), s));
            }
        }
        Ok(SyndromeTable { entries })
    }
}

/// Generator measurement outcomes, `+1` or `-1` each, in generator order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syndrome {
    signs: Vec<i8>,
}

impl Syndrome {
    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidGenerators(format!("syndrome signs must be +-1, got {signs:?}")));
        }
        Ok(Self { signs })
    }

    /// Rounds measured expectations to signs; zero counts as `+1`.
    pub fn from_expectations(values: &[f64]) -> Self {
        Self { signs: values.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect() }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_trivial(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }

    /// All `2^k` syndromes on `k` generators.
    pub fn all(k: usize) -> Vec<Syndrome> {
        (0..(1u32 << k))
            .map(|m| Syndrome { signs: (0..k).map(|i| if m & (1 << i) != 0 { -1 } else { 1 }).collect() })
            .collect()
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<&str> = self.signs.iter().map(|&s| if s > 0 { "+" } else { "-" }).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Single-qubit error `(qubit, letter)` to syndrome, in qubit-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeTable {
    entries: Vec<((usize, Pauli), Syndrome)>,
}

impl SyndromeTable {
    pub fn entries(&self) -> &[((usize, Pauli), Syndrome)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, qubit: usize, p: Pauli) -> Option<&Syndrome> {
        self.entries.iter().find(|((q, l), _)| *q == qubit && *l == p).map(|(_, s)| s)
    }

    /// Inverse lookup: the unique single-qubit error with this syndrome.
    pub fn decode(&self, s: &Syndrome) -> Option<(usize, Pauli)> {
        self.entries.iter().find(|(_, t)| t == s).map(|(e, _)| *e)
    }
}

/// A real combination `Σ c_k P_k` of Hermitian Pauli strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliCombination {
    pub terms: Vec<(f64, PauliString)>,
}

impl PauliCombination {
    pub fn single(p: PauliString) -> Self {
        Self { terms: vec![(1.0, p)] }
    }

    /// `c_x X + c_y Y + c_z Z` for pairwise anticommuting strings; squares
    /// of the coefficients must sum to one so the combination squares to
    /// the identity.
    pub fn bloch(c: [f64; 3], x: &PauliString, y: &PauliString, z: &PauliString) -> Result<Self> {
        let norm: f64 = c.iter().map(|v| v * v).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::UnnormalizedFifth(norm));
        }
        let terms = [(c[0], x), (c[1], y), (c[2], z)]
            .into_iter()
            .filter(|(w, _)| *w != 0.0)
            .map(|(w, p)| (w, p.clone()))
            .collect();
        Ok(Self { terms })
    }

    pub fn matrix(&self, num_qubits: usize) -> ComplexMatrix {
        let dim = 1 << num_qubits;
        self.terms
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, (w, p)| &acc + &p.matrix().scale(r(*w)))
    }

    /// Right-multiplies every term by `p`.
    fn times(&self, p: &PauliString) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(w, q)| (*w, q.multiply(p).expect("equal lengths")))
                .collect(),
        }
    }
}

/// One of the `2^{k+1}` terms of `Π_i (I + g_i)/2` over the generators and
/// the state-specific fifth stabilizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    /// Bit `i` set iff generator `i` is a factor; bit `k` marks the fifth.
    pub mask: u32,
    /// Product of the selected factors, already scaled by `2^{-(k+1)}`.
    pub operator: PauliCombination,
}

impl ExpansionTerm {
    pub fn is_identity(&self) -> bool {
        self.mask == 0
    }
}

/// Expands `Π_{i=1}^{k+1} (I + g_i) / 2^{k+1}` into its `2^{k+1}` terms.
/// With independent commuting generators and a fifth stabilizer that squares
/// to the identity, the weighted sum is the projector onto the fixed state.
pub fn expand_group(gens: &StabilizerSet, fifth: &PauliCombination) -> Result<Vec<ExpansionTerm>> {
    let n = gens.num_qubits();
    for (_, p) in &fifth.terms {
        if p.num_qubits() != n {
            return Err(Error::LengthMismatch { left: n, right: p.num_qubits() });
        }
    }
    let k = gens.len();
    let weight = 1.0 / (1u64 << (k + 1)) as f64;
    let mut out = Vec::with_capacity(1 << (k + 1));
    for mask in 0..(1u32 << (k + 1)) {
        let base = gens.product_of_subset(mask & ((1 << k) - 1));
        let combo = if mask & (1 << k) != 0 {
            fifth.times(&base)
        } else {
            PauliCombination::single(base)
        };
        let operator = PauliCombination {
            terms: combo.terms.into_iter().map(|(w, p)| (w * weight, p)).collect(),
        };
        out.push(ExpansionTerm { mask, operator });
    }
    Ok(out)
}
