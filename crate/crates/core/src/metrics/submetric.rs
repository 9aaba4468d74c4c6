use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::MetricError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Keyword,
    Coupling,
    Complexity,
    Size,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Keyword,
        Category::Coupling,
        Category::Complexity,
        Category::Size,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Keyword => "keyword",
            Category::Coupling => "coupling",
            Category::Complexity => "complexity",
            Category::Size => "size",
        }
    }
}

impl FromStr for Category {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| MetricError::UnknownCategory(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Total,
    Field,
    Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SizeScope {
    Segment,
    MethodDeclaration,
}

/// One configurable measurement. Serialized by its stable dotted name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubmetricId {
    KeywordTotal,
    KeywordDensity,
    CouplingTotal(Connectivity),
    CouplingDensity(Connectivity),
    ComplexityTotalArea,
    ComplexityAreaDensity,
    ComplexityMethodArea,
    ComplexityMethodDepthDensity,
    SizeLines(SizeScope),
    SizeSymbols(SizeScope),
    SizeSymbolDensity(SizeScope),
}

impl SubmetricId {
    pub const ALL: [SubmetricId; 18] = {
        use Connectivity as C;
        use SizeScope as S;
        use SubmetricId::*;
        [
            KeywordTotal,
            KeywordDensity,
            CouplingTotal(C::Total),
            CouplingTotal(C::Field),
            CouplingTotal(C::Method),
            CouplingDensity(C::Total),
            CouplingDensity(C::Field),
            CouplingDensity(C::Method),
            ComplexityTotalArea,
            ComplexityAreaDensity,
            ComplexityMethodArea,
            ComplexityMethodDepthDensity,
            SizeLines(S::Segment),
            SizeLines(S::MethodDeclaration),
            SizeSymbols(S::Segment),
            SizeSymbols(S::MethodDeclaration),
            SizeSymbolDensity(S::Segment),
            SizeSymbolDensity(S::MethodDeclaration),
        ]
    };

    pub fn category(self) -> Category {
        use SubmetricId::*;
        match self {
            KeywordTotal | KeywordDensity => Category::Keyword,
            CouplingTotal(_) | CouplingDensity(_) => Category::Coupling,
            ComplexityTotalArea
            | ComplexityAreaDensity
            | ComplexityMethodArea
            | ComplexityMethodDepthDensity => Category::Complexity,
            SizeLines(_) | SizeSymbols(_) | SizeSymbolDensity(_) => Category::Size,
        }
    }

    pub fn name(self) -> &'static str {
        use Connectivity as C;
        use SizeScope as S;
        use SubmetricId::*;
        match self {
            KeywordTotal => "keyword.total",
            KeywordDensity => "keyword.density",
            CouplingTotal(C::Total) => "coupling.total.total",
            CouplingTotal(C::Field) => "coupling.total.field",
            CouplingTotal(C::Method) => "coupling.total.method",
            CouplingDensity(C::Total) => "coupling.density.total",
            CouplingDensity(C::Field) => "coupling.density.field",
            CouplingDensity(C::Method) => "coupling.density.method",
            ComplexityTotalArea => "complexity.total_area",
            ComplexityAreaDensity => "complexity.area_density",
            ComplexityMethodArea => "complexity.method_area",
            ComplexityMethodDepthDensity => "complexity.method_depth_density",
            SizeLines(S::Segment) => "size.lines.segment",
            SizeLines(S::MethodDeclaration) => "size.lines.method_declaration",
            SizeSymbols(S::Segment) => "size.symbols.segment",
            SizeSymbols(S::MethodDeclaration) => "size.symbols.method_declaration",
            SizeSymbolDensity(S::Segment) => "size.symbol_density.segment",
            SizeSymbolDensity(S::MethodDeclaration) => "size.symbol_density.method_declaration",
        }
    }
}

// Ordered by name so every map keyed by submetric prints in sorted order.
impl Ord for SubmetricId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name().cmp(other.name())
    }
}

impl PartialOrd for SubmetricId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SubmetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SubmetricId {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SubmetricId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| MetricError::UnknownSubmetric(s.to_string()))
    }
}

impl Serialize for SubmetricId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for SubmetricId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

/// Value of every submetric for one scope.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MetricVector(BTreeMap<SubmetricId, f64>);

impl MetricVector {
    pub fn get(&self, id: SubmetricId) -> Option<f64> {
        self.0.get(&id).copied()
    }

    pub fn set(&mut self, id: SubmetricId, value: f64) {
        self.0.insert(id, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (SubmetricId, f64)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(SubmetricId, f64)> for MetricVector {
    fn from_iter<I: IntoIterator<Item = (SubmetricId, f64)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// The configurable keyword catalogue.
pub const KEYWORD_CATALOGUE: [&str; 31] = [
    "continue",
    "for",
    "new",
    "switch",
    "assert",
    "synchronized",
    "boolean",
    "do",
    "if",
    "this",
    "break",
    "double",
    "throw",
    "byte",
    "else",
    "case",
    "instanceof",
    "return",
    "transient",
    "catch",
    "int",
    "short",
    "try",
    "char",
    "final",
    "finally",
    "long",
    "float",
    "super",
    "while",
    "strictfp",
];

/// A subset of [`KEYWORD_CATALOGUE`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordSet(BTreeSet<&'static str>);

impl KeywordSet {
    pub fn all() -> Self {
        Self(KEYWORD_CATALOGUE.into_iter().collect())
    }

    pub fn none() -> Self {
        Self(BTreeSet::new())
    }

    pub fn from_names<S: AsRef<str>>(
        names: impl IntoIterator<Item = S>,
    ) -> Result<Self, MetricError> {
        let mut set = BTreeSet::new();
        for name in names {
            let name = name.as_ref();
            let known = KEYWORD_CATALOGUE
                .into_iter()
                .find(|k| *k == name)
                .ok_or_else(|| MetricError::UnknownKeyword(name.to_string()))?;
            set.insert(known);
        }
        Ok(Self(set))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.0.iter().copied()
    }
}

impl Default for KeywordSet {
    fn default() -> Self {
        Self::all()
    }
}

impl Serialize for KeywordSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter())
    }
}

impl<'de> Deserialize<'de> for KeywordSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(deserializer)?;
        KeywordSet::from_names(names).map_err(serde::de::Error::custom)
    }
}
