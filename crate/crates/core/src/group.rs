//! Canonical-form arithmetic for the supported groups and the structure of an
//! amenable normal subgroup `N ⊴ Γ` with quotient `Q = Γ/N`.
//!
//! Every element of a described group has exactly one coordinate encoding, so
//! equality is literal coordinate equality and all iteration over sets of
//! elements is deterministic (lexicographic on coordinates).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A concrete finitely generated group with decidable canonical forms.
///
/// `Heisenberg3` is the integer Heisenberg group on coordinates `(a, b, c)`
/// with multiplication `(a,b,c)·(a',b',c') = (a+a', b+b', c+c'+a·b')`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GroupDescriptor {
    FreeAbelian(u32),
    FiniteCyclic(u64),
    Heisenberg3,
    DirectProduct(Arc<Vec<GroupDescriptor>>),
}

/// Indecomposable coordinate blocks of a descriptor.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Atom {
    Z,
    Cyclic(u64),
    Heis,
}

impl Atom {
    pub fn dim(self) -> usize {
        match self {
            Atom::Z | Atom::Cyclic(_) => 1,
            Atom::Heis => 3,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Atom::Cyclic(_))
    }

    fn descriptor(self) -> GroupDescriptor {
        match self {
            Atom::Z => GroupDescriptor::FreeAbelian(1),
            Atom::Cyclic(m) => GroupDescriptor::FiniteCyclic(m),
            Atom::Heis => GroupDescriptor::Heisenberg3,
        }
    }
}

/// Canonical descriptor for an ordered product of atoms: runs of `Z` collapse
/// to `FreeAbelian`, a single factor stands alone, the empty product is the
/// trivial group `Z/1`.
pub fn product_descriptor(atoms: &[Atom]) -> GroupDescriptor {
    let mut parts: Vec<GroupDescriptor> = Vec::new();
    let mut run = 0u32;
    for &a in atoms {
        match a {
            Atom::Z => run += 1,
            other => {
                if run > 0 {
                    parts.push(GroupDescriptor::FreeAbelian(run));
                    run = 0;
                }
                parts.push(other.descriptor());
            }
        }
    }
    if run > 0 {
        parts.push(GroupDescriptor::FreeAbelian(run));
    }
    match parts.len() {
        0 => GroupDescriptor::FiniteCyclic(1),
        1 => parts.pop().unwrap(),
        _ => GroupDescriptor::DirectProduct(Arc::new(parts)),
    }
}

impl GroupDescriptor {
    pub fn parse(spec: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for token in spec.split('x') {
            let token = token.trim();
            if token == "Heis3" {
                atoms.push(Atom::Heis);
            } else if token == "Z" {
                atoms.push(Atom::Z);
            } else if let Some(rank) = token.strip_prefix("Z^") {
                let d: u32 = rank
                    .parse()
                    .map_err(|_| Error::GroupSpec(spec.into(), format!("bad rank `{rank}`")))?;
                if d == 0 {
                    return Err(Error::GroupSpec(spec.into(), "rank must be positive".into()));
                }
                atoms.extend(std::iter::repeat(Atom::Z).take(d as usize));
            } else if let Some(m) = token.strip_prefix("Z/") {
                let m: u64 = m
                    .parse()
                    .map_err(|_| Error::GroupSpec(spec.into(), format!("bad modulus `{m}`")))?;
                if m == 0 {
                    return Err(Error::GroupSpec(spec.into(), "modulus must be ≥ 1".into()));
                }
                atoms.push(Atom::Cyclic(m));
            } else {
                return Err(Error::GroupSpec(spec.into(), format!("unknown factor `{token}`")));
            }
        }
        Ok(product_descriptor(&atoms))
    }

    pub fn atoms(&self) -> Vec<Atom> {
        match self {
            GroupDescriptor::FreeAbelian(d) => vec![Atom::Z; *d as usize],
            GroupDescriptor::FiniteCyclic(m) => vec![Atom::Cyclic(*m)],
            GroupDescriptor::Heisenberg3 => vec![Atom::Heis],
            GroupDescriptor::DirectProduct(fs) => fs.iter().flat_map(|f| f.atoms()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            GroupDescriptor::FreeAbelian(d) => *d as usize,
            GroupDescriptor::FiniteCyclic(_) => 1,
            GroupDescriptor::Heisenberg3 => 3,
            GroupDescriptor::DirectProduct(fs) => fs.iter().map(|f| f.dim()).sum(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.atoms().iter().all(|a| !matches!(a, Atom::Heis))
    }

    pub fn is_finite(&self) -> bool {
        self.atoms().iter().all(|a| a.is_finite())
    }

    /// Order of the group, when finite.
    pub fn order(&self) -> Option<u128> {
        self.atoms().iter().try_fold(1u128, |acc, a| match a {
            Atom::Cyclic(m) => acc.checked_mul(*m as u128),
            _ => None,
        })
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { descriptor: self.clone(), coords: vec![0; self.dim()] }
    }

    /// Standard generating set: unit vectors for free-abelian coordinates,
    /// the residue 1 for nontrivial cyclic factors, `(1,0,0)` and `(0,1,0)`
    /// for a Heisenberg factor (they generate; the center is a commutator).
    pub fn standard_generators(&self) -> Vec<GroupElement> {
        let dim = self.dim();
        let mut gens = Vec::new();
        let mut offset = 0;
        for atom in self.atoms() {
            match atom {
                Atom::Z => {
                    let mut c = vec![0; dim];
                    c[offset] = 1;
                    gens.push(GroupElement { descriptor: self.clone(), coords: c });
                }
                Atom::Cyclic(m) => {
                    if m > 1 {
                        let mut c = vec![0; dim];
                        c[offset] = 1;
                        gens.push(GroupElement { descriptor: self.clone(), coords: c });
                    }
                }
                Atom::Heis => {
                    for j in 0..2 {
                        let mut c = vec![0; dim];
                        c[offset + j] = 1;
                        gens.push(GroupElement { descriptor: self.clone(), coords: c });
                    }
                }
            }
            offset += atom.dim();
        }
        gens
    }

    /// All elements of a finite group, in canonical order.
    pub fn enumerate(&self) -> Result<Vec<GroupElement>> {
        let atoms = self.atoms();
        if !self.is_finite() {
            return Err(Error::InfiniteNormalSubgroup);
        }
        let mut coords: Vec<Vec<i64>> = vec![vec![]];
        for atom in &atoms {
            let Atom::Cyclic(m) = atom else { unreachable!() };
            let mut next = Vec::with_capacity(coords.len() * *m as usize);
            for c in &coords {
                for r in 0..*m as i64 {
                    let mut c = c.clone();
                    c.push(r);
                    next.push(c);
                }
            }
            coords = next;
        }
        let mut out: Vec<GroupElement> =
            coords.into_iter().map(|c| GroupElement { descriptor: self.clone(), coords: c }).collect();
        out.sort();
        Ok(out)
    }

    fn reduce(&self, coords: &mut [i64]) {
        let mut offset = 0;
        for atom in self.atoms() {
            if let Atom::Cyclic(m) = atom {
                coords[offset] = coords[offset].rem_euclid(m as i64);
            }
            offset += atom.dim();
        }
    }

    fn compose_coords(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let mut out = Vec::with_capacity(x.len());
        let mut offset = 0;
        for atom in self.atoms() {
            match atom {
                Atom::Z => out.push(x[offset] + y[offset]),
                Atom::Cyclic(m) => out.push((x[offset] + y[offset]).rem_euclid(m as i64)),
                Atom::Heis => {
                    let (a, b, c) = (x[offset], x[offset + 1], x[offset + 2]);
                    let (a2, b2, c2) = (y[offset], y[offset + 1], y[offset + 2]);
                    out.push(a + a2);
                    out.push(b + b2);
                    out.push(c + c2 + a * b2);
                }
            }
            offset += atom.dim();
        }
        out
    }

    fn inverse_coords(&self, x: &[i64]) -> Vec<i64> {
        let mut out = Vec::with_capacity(x.len());
        let mut offset = 0;
        for atom in self.atoms() {
            match atom {
                Atom::Z => out.push(-x[offset]),
                Atom::Cyclic(m) => out.push((-x[offset]).rem_euclid(m as i64)),
                Atom::Heis => {
                    let (a, b, c) = (x[offset], x[offset + 1], x[offset + 2]);
                    out.push(-a);
                    out.push(-b);
                    out.push(-c + a * b);
                }
            }
            offset += atom.dim();
        }
        out
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::FreeAbelian(1) => write!(f, "Z"),
            GroupDescriptor::FreeAbelian(d) => write!(f, "Z^{d}"),
            GroupDescriptor::FiniteCyclic(m) => write!(f, "Z/{m}"),
            GroupDescriptor::Heisenberg3 => write!(f, "Heis3"),
            GroupDescriptor::DirectProduct(fs) => {
                let parts: Vec<String> = fs.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", parts.join("x"))
            }
        }
    }
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupDescriptor::parse(s)
    }
}

impl Serialize for GroupDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        GroupDescriptor::parse(&s).map_err(de::Error::custom)
    }
}

/// An element in canonical form: cyclic coordinates reduced to `[0, m)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupElement {
    descriptor: GroupDescriptor,
    coords: Vec<i64>,
}

impl GroupElement {
    pub fn new(descriptor: GroupDescriptor, mut coords: Vec<i64>) -> Result<Self> {
        if coords.len() != descriptor.dim() {
            return Err(Error::InvalidElement(format!(
                "{} coordinates given for {} (needs {})",
                coords.len(),
                descriptor,
                descriptor.dim()
            )));
        }
        descriptor.reduce(&mut coords);
        Ok(GroupElement { descriptor, coords })
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check_same(&self, other: &GroupElement) -> Result<()> {
        if self.descriptor != other.descriptor {
            return Err(Error::DescriptorMismatch {
                expected: self.descriptor.to_string(),
                found: other.descriptor.to_string(),
            });
        }
        Ok(())
    }

    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check_same(other)?;
        Ok(self.compose_unchecked(other))
    }

    /// Group law without a descriptor check; callers guarantee matching
    /// descriptors (used in inner loops).
    pub(crate) fn compose_unchecked(&self, other: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.descriptor, other.descriptor);
        GroupElement {
            descriptor: self.descriptor.clone(),
            coords: self.descriptor.compose_coords(&self.coords, &other.coords),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            descriptor: self.descriptor.clone(),
            coords: self.descriptor.inverse_coords(&self.coords),
        }
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupElement {
    /// Lexicographic on coordinates; the descriptor only breaks ties between
    /// elements of different groups so that `Ord` stays total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords.cmp(&other.coords).then_with(|| self.descriptor.cmp(&other.descriptor))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All products of at most `radius` generators and inverse generators,
/// deduplicated in canonical form. `radius = 0` gives the identity alone.
pub fn enumerate_ball(
    descriptor: &GroupDescriptor,
    generators: &[GroupElement],
    radius: usize,
) -> Result<BTreeSet<GroupElement>> {
    for g in generators {
        if g.descriptor() != descriptor {
            return Err(Error::DescriptorMismatch {
                expected: descriptor.to_string(),
                found: g.descriptor().to_string(),
            });
        }
    }
    let mut steps: Vec<GroupElement> = Vec::with_capacity(generators.len() * 2);
    for g in generators {
        steps.push(g.clone());
        steps.push(g.inverse());
    }
    let mut ball: BTreeSet<GroupElement> = BTreeSet::new();
    ball.insert(descriptor.identity());
    let mut frontier: Vec<GroupElement> = ball.iter().cloned().collect();
    for _ in 0..radius {
        let mut next = Vec::new();
        for g in &frontier {
            for s in &steps {
                let h = g.compose_unchecked(s);
                if ball.insert(h.clone()) {
                    next.push(h);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(ball)
}

/// How the normal subgroup sits inside `Γ`.
#[derive(Clone, PartialEq, Eq, Debug)]
enum ExtensionKind {
    /// `N` is the product of the atoms with the given indices; `Q` is the
    /// product of the remaining atoms.
    FactorKill { killed: BTreeSet<usize> },
    /// `Γ = Heis3`, `N = ⟨(0,0,1)⟩ ≅ Z` (the center), `Q ≅ Z²`.
    HeisenbergCenter,
    /// `Γ = Z`, `N = mZ ≅ Z`, `Q = Z/m`.
    FiniteIndexInZ { index: u64 },
}

/// A parsed description of the normal subgroup, as accepted by the CLI.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NormalSpec {
    /// Atom indices of `Γ` spanning `N` (`coords:0,2`).
    Coords(Vec<usize>),
    /// The center of `Heis3` (`center`).
    Center,
    /// The subgroup `mZ` of `Z` (`index:m`).
    Index(u64),
    /// All of `Γ` (`full`).
    Full,
    /// The trivial subgroup (`none`).
    None,
}

impl FromStr for NormalSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "center" {
            return Ok(NormalSpec::Center);
        }
        if s == "full" {
            return Ok(NormalSpec::Full);
        }
        if s == "none" {
            return Ok(NormalSpec::None);
        }
        if let Some(rest) = s.strip_prefix("index:") {
            let m: u64 = rest
                .parse()
                .map_err(|_| Error::Config(format!("bad subgroup index `{rest}`")))?;
            if m == 0 {
                return Err(Error::Config("subgroup index must be ≥ 1".into()));
            }
            return Ok(NormalSpec::Index(m));
        }
        if let Some(rest) = s.strip_prefix("coords:") {
            let mut idx = Vec::new();
            for part in rest.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                idx.push(
                    part.parse::<usize>()
                        .map_err(|_| Error::Config(format!("bad coordinate index `{part}`")))?,
                );
            }
            return Ok(NormalSpec::Coords(idx));
        }
        Err(Error::Config(format!(
            "unknown normal subgroup spec `{s}` (expected coords:…, center, index:m, full or none)"
        )))
    }
}

impl fmt::Display for NormalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalSpec::Coords(v) => {
                let parts: Vec<String> = v.iter().map(|i| i.to_string()).collect();
                write!(f, "coords:{}", parts.join(","))
            }
            NormalSpec::Center => write!(f, "center"),
            NormalSpec::Index(m) => write!(f, "index:{m}"),
            NormalSpec::Full => write!(f, "full"),
            NormalSpec::None => write!(f, "none"),
        }
    }
}

/// The triple `(Γ, N ⊴ Γ, Q = Γ/N)` with projection, embedding and a
/// deterministic set-theoretic section `Q → Γ`.
#[derive(Clone, PartialEq, Debug)]
pub struct AmenableExtension {
    gamma: GroupDescriptor,
    normal: GroupDescriptor,
    quotient: GroupDescriptor,
    kind: ExtensionKind,
}

impl AmenableExtension {
    pub fn new(gamma: GroupDescriptor, spec: &NormalSpec) -> Result<Self> {
        let atoms = gamma.atoms();
        let kind = match spec {
            NormalSpec::Center => {
                if gamma != GroupDescriptor::Heisenberg3 {
                    return Err(Error::Config(format!(
                        "`center` requires the group Heis3, got {gamma}"
                    )));
                }
                ExtensionKind::HeisenbergCenter
            }
            NormalSpec::Index(m) => {
                if gamma != GroupDescriptor::FreeAbelian(1) {
                    return Err(Error::Config(format!("`index:{m}` requires the group Z, got {gamma}")));
                }
                ExtensionKind::FiniteIndexInZ { index: *m }
            }
            NormalSpec::Full => {
                ExtensionKind::FactorKill { killed: (0..atoms.len()).collect() }
            }
            NormalSpec::None => ExtensionKind::FactorKill { killed: BTreeSet::new() },
            NormalSpec::Coords(idx) => {
                let killed: BTreeSet<usize> = idx.iter().copied().collect();
                if let Some(&bad) = killed.iter().find(|&&i| i >= atoms.len()) {
                    return Err(Error::Config(format!(
                        "coordinate index {bad} out of range for {gamma} ({} factors)",
                        atoms.len()
                    )));
                }
                ExtensionKind::FactorKill { killed }
            }
        };
        let (normal, quotient) = match &kind {
            ExtensionKind::FactorKill { killed } => {
                let n_atoms: Vec<Atom> =
                    atoms.iter().enumerate().filter(|(i, _)| killed.contains(i)).map(|(_, a)| *a).collect();
                let q_atoms: Vec<Atom> =
                    atoms.iter().enumerate().filter(|(i, _)| !killed.contains(i)).map(|(_, a)| *a).collect();
                (product_descriptor(&n_atoms), product_descriptor(&q_atoms))
            }
            ExtensionKind::HeisenbergCenter => (GroupDescriptor::FreeAbelian(1), GroupDescriptor::FreeAbelian(2)),
            ExtensionKind::FiniteIndexInZ { index } => {
                (GroupDescriptor::FreeAbelian(1), GroupDescriptor::FiniteCyclic(*index))
            }
        };
        Ok(AmenableExtension { gamma, normal, quotient, kind })
    }

    pub fn gamma(&self) -> &GroupDescriptor {
        &self.gamma
    }

    pub fn normal(&self) -> &GroupDescriptor {
        &self.normal
    }

    pub fn quotient(&self) -> &GroupDescriptor {
        &self.quotient
    }

    pub fn normal_is_finite(&self) -> bool {
        self.normal.is_finite()
    }

    /// Whether averaging over subsets of `N` reduces to difference
    /// coordinates: `η₀⁻¹·g·η₁ = g·embed(η₁ − η₀)`. Holds for every
    /// supported kind with abelian `N` (`N` is then a central subgroup or a
    /// direct abelian factor).
    pub fn difference_coordinate_averaging(&self) -> bool {
        self.normal.is_abelian()
    }

    /// Coordinate offsets (into `Γ`-coordinates) of the killed atoms, in
    /// order, for `FactorKill` extensions.
    fn factor_offsets(&self) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let ExtensionKind::FactorKill { killed } = &self.kind else {
            unreachable!("factor_offsets on non-factor extension")
        };
        let mut n_blocks = Vec::new();
        let mut q_blocks = Vec::new();
        let mut offset = 0;
        for (i, atom) in self.gamma.atoms().iter().enumerate() {
            let block = (offset, atom.dim());
            if killed.contains(&i) {
                n_blocks.push(block);
            } else {
                q_blocks.push(block);
            }
            offset += atom.dim();
        }
        (n_blocks, q_blocks)
    }

    fn check(&self, g: &GroupElement, expected: &GroupDescriptor) -> Result<()> {
        if g.descriptor() != expected {
            return Err(Error::DescriptorMismatch {
                expected: expected.to_string(),
                found: g.descriptor().to_string(),
            });
        }
        Ok(())
    }

    /// The injective homomorphism `N → Γ`.
    pub fn embed(&self, n: &GroupElement) -> Result<GroupElement> {
        self.check(n, &self.normal)?;
        let coords = match &self.kind {
            ExtensionKind::FactorKill { .. } => {
                let (n_blocks, _) = self.factor_offsets();
                let mut out = vec![0; self.gamma.dim()];
                let mut src = 0;
                for (offset, dim) in n_blocks {
                    out[offset..offset + dim].copy_from_slice(&n.coords()[src..src + dim]);
                    src += dim;
                }
                out
            }
            ExtensionKind::HeisenbergCenter => vec![0, 0, n.coords()[0]],
            ExtensionKind::FiniteIndexInZ { index } => vec![n.coords()[0] * *index as i64],
        };
        GroupElement::new(self.gamma.clone(), coords)
    }

    /// The canonical projection `Γ → Q`, a homomorphism with kernel `N`.
    pub fn project(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g, &self.gamma)?;
        let coords = match &self.kind {
            ExtensionKind::FactorKill { .. } => {
                let (_, q_blocks) = self.factor_offsets();
                let mut out = Vec::with_capacity(self.quotient.dim());
                for (offset, dim) in q_blocks {
                    out.extend_from_slice(&g.coords()[offset..offset + dim]);
                }
                out
            }
            ExtensionKind::HeisenbergCenter => vec![g.coords()[0], g.coords()[1]],
            ExtensionKind::FiniteIndexInZ { index } => vec![g.coords()[0].rem_euclid(*index as i64)],
        };
        GroupElement::new(self.quotient.clone(), coords)
    }

    /// Deterministic set-theoretic section `Q → Γ` with
    /// `project ∘ section = id` and `section(identity) = identity`.
    pub fn section(&self, q: &GroupElement) -> Result<GroupElement> {
        self.check(q, &self.quotient)?;
        let coords = match &self.kind {
            ExtensionKind::FactorKill { .. } => {
                let (_, q_blocks) = self.factor_offsets();
                let mut out = vec![0; self.gamma.dim()];
                let mut src = 0;
                for (offset, dim) in q_blocks {
                    out[offset..offset + dim].copy_from_slice(&q.coords()[src..src + dim]);
                    src += dim;
                }
                out
            }
            ExtensionKind::HeisenbergCenter => vec![q.coords()[0], q.coords()[1], 0],
            ExtensionKind::FiniteIndexInZ { .. } => vec![q.coords()[0]],
        };
        GroupElement::new(self.gamma.clone(), coords)
    }

    /// Inverts `embed` on the kernel of the projection; fails when `g` does
    /// not project to the identity of `Q`.
    pub fn preimage_in_normal(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g, &self.gamma)?;
        if !self.project(g)?.is_identity() {
            return Err(Error::NotInNormalSubgroup(g.to_string()));
        }
        let coords = match &self.kind {
            ExtensionKind::FactorKill { .. } => {
                let (n_blocks, _) = self.factor_offsets();
                let mut out = Vec::with_capacity(self.normal.dim());
                for (offset, dim) in n_blocks {
                    out.extend_from_slice(&g.coords()[offset..offset + dim]);
                }
                out
            }
            ExtensionKind::HeisenbergCenter => vec![g.coords()[2]],
            ExtensionKind::FiniteIndexInZ { index } => vec![g.coords()[0] / *index as i64],
        };
        GroupElement::new(self.normal.clone(), coords)
    }

    /// Membership of a `Γ`-element in the embedded normal subgroup.
    pub fn contains_in_normal(&self, g: &GroupElement) -> bool {
        self.project(g).map(|q| q.is_identity()).unwrap_or(false)
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use rand::rngs::StdRng;
    use rand::Rng;

    pub fn z(d: u32) -> GroupDescriptor {
        GroupDescriptor::FreeAbelian(d)
    }

    pub fn zmod(m: u64) -> GroupDescriptor {
        GroupDescriptor::FiniteCyclic(m)
    }

    pub fn heis() -> GroupDescriptor {
        GroupDescriptor::Heisenberg3
    }

    pub fn el(desc: &GroupDescriptor, coords: &[i64]) -> GroupElement {
        GroupElement::new(desc.clone(), coords.to_vec()).unwrap()
    }

    pub fn random_element(desc: &GroupDescriptor, rng: &mut StdRng, bound: i64) -> GroupElement {
        let coords: Vec<i64> = (0..desc.dim()).map(|_| rng.gen_range(-bound..=bound)).collect();
        GroupElement::new(desc.clone(), coords).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn composition_examples() {
        let z2 = z(2);
        let prod = el(&z2, &[2, 3]).compose(&el(&z2, &[4, 4])).unwrap();
        assert_eq!(prod, el(&z2, &[6, 7]));

        let h = heis();
        let prod = el(&h, &[1, 0, 0]).compose(&el(&h, &[0, 1, 0])).unwrap();
        assert_eq!(prod, el(&h, &[1, 1, 1]));

        let z4 = zmod(4);
        let prod = el(&z4, &[3]).compose(&el(&z4, &[2])).unwrap();
        assert_eq!(prod, el(&z4, &[1]));
    }

    #[test]
    fn composition_rejects_descriptor_mismatch() {
        let a = el(&z(2), &[1, 0]);
        let b = el(&heis(), &[1, 0, 0]);
        assert!(matches!(a.compose(&b), Err(Error::DescriptorMismatch { .. })));
    }

    #[test]
    fn group_axioms_hold_on_random_samples() {
        let descriptors = [
            z(1),
            z(2),
            zmod(4),
            heis(),
            GroupDescriptor::parse("Z/2xZ").unwrap(),
            GroupDescriptor::parse("Heis3xZ/3").unwrap(),
        ];
        let mut rng = StdRng::seed_from_u64(7);
        for desc in &descriptors {
            let e = desc.identity();
            for _ in 0..1000 {
                let a = random_element(desc, &mut rng, 6);
                let b = random_element(desc, &mut rng, 6);
                let c = random_element(desc, &mut rng, 6);
                let ab_c = a.compose(&b).unwrap().compose(&c).unwrap();
                let a_bc = a.compose(&b.compose(&c).unwrap()).unwrap();
                assert_eq!(ab_c, a_bc, "associativity in {desc}");
                assert_eq!(a.compose(&e).unwrap(), a);
                assert_eq!(e.compose(&a).unwrap(), a);
                assert_eq!(a.compose(&a.inverse()).unwrap(), e);
                assert_eq!(a.inverse().compose(&a).unwrap(), e);
            }
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for (input, canonical) in [
            ("Z", "Z"),
            ("Z^3", "Z^3"),
            ("ZxZ", "Z^2"),
            ("Z/6", "Z/6"),
            ("Heis3", "Heis3"),
            ("Z/2xZ", "Z/2xZ"),
            ("ZxZ/2xZ", "ZxZ/2xZ"),
            ("Z^2 x Z/5", "Z^2xZ/5"),
        ] {
            let desc = GroupDescriptor::parse(input).unwrap();
            assert_eq!(desc.to_string(), canonical);
            assert_eq!(GroupDescriptor::parse(canonical).unwrap(), desc);
        }
        assert!(GroupDescriptor::parse("Z^0").is_err());
        assert!(GroupDescriptor::parse("Z/0").is_err());
        assert!(GroupDescriptor::parse("F2").is_err());
    }

    #[test]
    fn ball_in_z_and_z2() {
        let zd = z(1);
        let ball = enumerate_ball(&zd, &[el(&zd, &[1])], 2).unwrap();
        let expected: BTreeSet<_> = [-2i64, -1, 0, 1, 2].iter().map(|&c| el(&zd, &[c])).collect();
        assert_eq!(ball, expected);

        let z2 = z(2);
        let ball = enumerate_ball(&z2, &z2.standard_generators(), 1).unwrap();
        assert_eq!(ball.len(), 5);
    }

    /// Independent oracle: expand every word of length ≤ radius over the
    /// generators and their inverses, then deduplicate canonical forms.
    fn ball_by_word_enumeration(
        desc: &GroupDescriptor,
        gens: &[GroupElement],
        radius: usize,
    ) -> BTreeSet<GroupElement> {
        let mut letters: Vec<GroupElement> = Vec::new();
        for g in gens {
            letters.push(g.clone());
            letters.push(g.inverse());
        }
        let mut words: Vec<GroupElement> = vec![desc.identity()];
        let mut all: BTreeSet<GroupElement> = words.iter().cloned().collect();
        for _ in 0..radius {
            let mut next = Vec::new();
            for w in &words {
                for l in &letters {
                    let e = w.compose(l).unwrap();
                    all.insert(e.clone());
                    next.push(e);
                }
            }
            words = next;
        }
        all
    }

    #[test]
    fn heisenberg_ball_matches_word_enumeration() {
        let h = heis();
        let gens = h.standard_generators();
        let oracle = ball_by_word_enumeration(&h, &gens, 2);
        // The two-generator radius-2 ball splits the abelianized diamond's
        // diagonal points by the central coordinate: 17 elements in total.
        assert_eq!(oracle.len(), 17);
        assert_eq!(enumerate_ball(&h, &gens, 2).unwrap(), oracle);
        assert_eq!(enumerate_ball(&h, &gens, 0).unwrap().len(), 1);
    }

    #[test]
    fn ball_is_monotone_in_radius() {
        let h = heis();
        let gens = h.standard_generators();
        let mut previous = enumerate_ball(&h, &gens, 0).unwrap();
        for r in 1..=4 {
            let ball = enumerate_ball(&h, &gens, r).unwrap();
            assert!(previous.is_subset(&ball), "radius {r}");
            previous = ball;
        }
    }

    #[test]
    fn empty_generating_set_gives_identity() {
        let ball = enumerate_ball(&z(2), &[], 3).unwrap();
        assert_eq!(ball.len(), 1);
        assert!(ball.iter().next().unwrap().is_identity());
    }

    fn extensions_under_test() -> Vec<AmenableExtension> {
        vec![
            AmenableExtension::new(z(2), &NormalSpec::Coords(vec![0])).unwrap(),
            AmenableExtension::new(z(2), &NormalSpec::Coords(vec![1])).unwrap(),
            AmenableExtension::new(heis(), &NormalSpec::Center).unwrap(),
            AmenableExtension::new(GroupDescriptor::parse("Z/2xZ").unwrap(), &NormalSpec::Coords(vec![0])).unwrap(),
            AmenableExtension::new(z(1), &NormalSpec::Index(2)).unwrap(),
            AmenableExtension::new(z(1), &NormalSpec::Full).unwrap(),
            AmenableExtension::new(zmod(2), &NormalSpec::Full).unwrap(),
            AmenableExtension::new(z(3), &NormalSpec::Coords(vec![0, 2])).unwrap(),
            AmenableExtension::new(z(2), &NormalSpec::None).unwrap(),
        ]
    }

    #[test]
    fn projection_examples() {
        let ext = AmenableExtension::new(z(2), &NormalSpec::Coords(vec![0])).unwrap();
        assert_eq!(ext.quotient(), &z(1));
        assert_eq!(ext.project(&el(&z(2), &[3, 5])).unwrap(), el(&z(1), &[5]));
        assert!(ext.project(&z(2).identity()).unwrap().is_identity());

        let ext = AmenableExtension::new(heis(), &NormalSpec::Center).unwrap();
        assert_eq!(ext.project(&el(&heis(), &[1, 2, 7])).unwrap(), el(&z(2), &[1, 2]));
    }

    #[test]
    fn extension_invariants_on_random_samples() {
        let mut rng = StdRng::seed_from_u64(11);
        for ext in extensions_under_test() {
            for _ in 0..1000 {
                let g = random_element(ext.gamma(), &mut rng, 5);
                let h = random_element(ext.gamma(), &mut rng, 5);
                let n = random_element(ext.normal(), &mut rng, 5);
                let q = random_element(ext.quotient(), &mut rng, 5);

                // projection is a homomorphism
                let lhs = ext.project(&g.compose(&h).unwrap()).unwrap();
                let rhs = ext.project(&g).unwrap().compose(&ext.project(&h).unwrap()).unwrap();
                assert_eq!(lhs, rhs);

                // projection kills the embedded subgroup and splits the section
                assert!(ext.project(&ext.embed(&n).unwrap()).unwrap().is_identity());
                assert_eq!(ext.project(&ext.section(&q).unwrap()).unwrap(), q);

                // embedding is a homomorphism with a left inverse
                let m = random_element(ext.normal(), &mut rng, 5);
                assert_eq!(
                    ext.embed(&n.compose(&m).unwrap()).unwrap(),
                    ext.embed(&n).unwrap().compose(&ext.embed(&m).unwrap()).unwrap()
                );
                assert_eq!(ext.preimage_in_normal(&ext.embed(&n).unwrap()).unwrap(), n);

                // normality: γ·ν·γ⁻¹ stays in the embedded subgroup
                let conj = g.compose(&ext.embed(&n).unwrap()).unwrap().compose(&g.inverse()).unwrap();
                assert!(ext.contains_in_normal(&conj));
            }
        }
    }

    #[test]
    fn section_is_identity_preserving() {
        for ext in extensions_under_test() {
            let e = ext.quotient().identity();
            assert!(ext.section(&e).unwrap().is_identity());
        }
    }

    #[test]
    fn finite_enumeration() {
        let d = GroupDescriptor::parse("Z/2xZ/3").unwrap();
        let all = d.enumerate().unwrap();
        assert_eq!(all.len(), 6);
        assert_eq!(d.order(), Some(6));
        assert!(z(1).enumerate().is_err());
        assert_eq!(z(1).order(), None);
    }

    #[test]
    fn normal_spec_parsing() {
        assert_eq!("coords:0,2".parse::<NormalSpec>().unwrap(), NormalSpec::Coords(vec![0, 2]));
        assert_eq!("center".parse::<NormalSpec>().unwrap(), NormalSpec::Center);
        assert_eq!("index:4".parse::<NormalSpec>().unwrap(), NormalSpec::Index(4));
        assert!("coords:x".parse::<NormalSpec>().is_err());
        assert!("index:0".parse::<NormalSpec>().is_err());
        assert!("middle".parse::<NormalSpec>().is_err());
        assert!(AmenableExtension::new(z(2), &NormalSpec::Center).is_err());
        assert!(AmenableExtension::new(z(2), &NormalSpec::Coords(vec![2])).is_err());
        assert!(AmenableExtension::new(z(2), &NormalSpec::Index(2)).is_err());
    }
}
