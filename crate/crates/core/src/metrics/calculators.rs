use crate::source_model::syntax::scan_declarations;
use crate::source_model::{
    count_symbols, nesting_profile, ClassContext, Fragment, MethodUnit, Token, TokenKind,
};

use super::submetric::{Connectivity, KeywordSet, MetricVector, SizeScope, SubmetricId};
use super::MetricError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeywordMetrics {
    pub total: u32,
    pub density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConnectivityCounts {
    pub field: u32,
    pub method: u32,
}

impl ConnectivityCounts {
    pub fn total(&self) -> u32 {
        self.field + self.method
    }

    pub fn select(&self, connectivity: Connectivity) -> u32 {
        match connectivity {
            Connectivity::Total => self.total(),
            Connectivity::Field => self.field,
            Connectivity::Method => self.method,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMetrics {
    pub counts: ConnectivityCounts,
    pub count: u32,
    pub density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityMetrics {
    pub total_area: u32,
    pub area_density: f64,
    pub method_area: u32,
    pub method_depth_density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeMetrics {
    pub lines: u32,
    pub symbols: u32,
    pub symbol_density: f64,
}

/// The measurable view of a code segment: a pasted fragment or a whole body.
struct Segment<'a> {
    tokens: &'a [Token],
    lines: u32,
    symbols: u32,
    area: u32,
}

impl<'a> Segment<'a> {
    fn of_fragment(fragment: &'a Fragment) -> Result<Self, MetricError> {
        if !fragment.valid {
            return Err(MetricError::InvalidFragment);
        }
        let profile = nesting_profile(fragment)?;
        Ok(Self {
            tokens: &fragment.tokens,
            lines: fragment.line_count,
            symbols: fragment.symbol_count,
            area: profile.iter().sum(),
        })
    }

    fn of_method(method: &'a MethodUnit) -> Self {
        Self {
            tokens: &method.body_tokens,
            lines: method.line_count(),
            symbols: count_symbols(&method.body_text),
            area: method.nesting_profile.iter().sum(),
        }
    }
}

fn per_line(total: u32, lines: u32) -> f64 {
    f64::from(total) / f64::from(lines)
}

fn count_keywords(tokens: &[Token], enabled: &KeywordSet) -> u32 {
    tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Keyword && enabled.contains(&t.text))
        .count() as u32
}

/// References from `tokens` to the owner's fields and methods.
///
/// A field name counts unless a local of the same name was declared earlier
/// in the same token run. Qualified accesses (`a.x`) only count when the
/// qualifier is `this`.
pub fn count_connectivity(tokens: &[Token], owner: &ClassContext) -> ConnectivityCounts {
    let declarations = scan_declarations(tokens);
    let mut counts = ConnectivityCounts::default();
    for (i, t) in tokens.iter().enumerate() {
        if !t.is_identifier() {
            continue;
        }
        let qualified = i > 0 && tokens[i - 1].is(".");
        let via_this = qualified && i > 1 && tokens[i - 2].is_keyword("this");
        if qualified && !via_this {
            continue;
        }
        let is_call = tokens.get(i + 1).is_some_and(|n| n.is("("));
        if is_call {
            if owner.method_names.contains(&t.text) {
                counts.method += 1;
            }
            continue;
        }
        if !owner.field_names.contains_key(&t.text) {
            continue;
        }
        let shadowed = declarations
            .iter()
            .any(|d| d.name == t.text && d.index <= i);
        if via_this || !shadowed {
            counts.field += 1;
        }
    }
    counts
}

pub fn keyword_metrics(
    fragment: &Fragment,
    enabled: &KeywordSet,
) -> Result<KeywordMetrics, MetricError> {
    let seg = Segment::of_fragment(fragment)?;
    let total = count_keywords(seg.tokens, enabled);
    Ok(KeywordMetrics {
        total,
        density: per_line(total, seg.lines),
    })
}

pub fn coupling_metrics(
    fragment: &Fragment,
    owner: Option<&ClassContext>,
    connectivity: Connectivity,
) -> Result<CouplingMetrics, MetricError> {
    let owner = owner.ok_or(MetricError::MissingContext)?;
    let seg = Segment::of_fragment(fragment)?;
    let counts = count_connectivity(seg.tokens, owner);
    let count = counts.select(connectivity);
    Ok(CouplingMetrics {
        counts,
        count,
        density: per_line(count, seg.lines),
    })
}

pub fn complexity_metrics(
    fragment: &Fragment,
    enclosing: &MethodUnit,
) -> Result<ComplexityMetrics, MetricError> {
    let seg = Segment::of_fragment(fragment)?;
    let method_area: u32 = nesting_profile(enclosing)?.iter().sum();
    Ok(ComplexityMetrics {
        total_area: seg.area,
        area_density: per_line(seg.area, seg.lines),
        method_area,
        method_depth_density: per_line(method_area, enclosing.line_count()),
    })
}

pub fn size_metrics(
    fragment: &Fragment,
    enclosing: Option<&MethodUnit>,
    scope: SizeScope,
) -> Result<SizeMetrics, MetricError> {
    let (lines, symbols) = match scope {
        SizeScope::Segment => {
            let seg = Segment::of_fragment(fragment)?;
            (seg.lines, seg.symbols)
        }
        SizeScope::MethodDeclaration => {
            let method = Segment::of_method(enclosing.ok_or(MetricError::MissingContext)?);
            (method.lines, method.symbols)
        }
    };
    Ok(SizeMetrics {
        lines,
        symbols,
        symbol_density: per_line(symbols, lines),
    })
}

fn assemble(
    seg: &Segment<'_>,
    method: &Segment<'_>,
    owner: &ClassContext,
    keywords: &KeywordSet,
) -> MetricVector {
    use SubmetricId::*;
    let keyword_total = count_keywords(seg.tokens, keywords);
    let coupling = count_connectivity(seg.tokens, owner);
    let mut v = MetricVector::default();
    v.set(KeywordTotal, f64::from(keyword_total));
    v.set(KeywordDensity, per_line(keyword_total, seg.lines));
    for c in [
        Connectivity::Total,
        Connectivity::Field,
        Connectivity::Method,
    ] {
        let n = coupling.select(c);
        v.set(CouplingTotal(c), f64::from(n));
        v.set(CouplingDensity(c), per_line(n, seg.lines));
    }
    v.set(ComplexityTotalArea, f64::from(seg.area));
    v.set(ComplexityAreaDensity, per_line(seg.area, seg.lines));
    v.set(ComplexityMethodArea, f64::from(method.area));
    v.set(
        ComplexityMethodDepthDensity,
        per_line(method.area, method.lines),
    );
    for (scope, s) in [
        (SizeScope::Segment, seg),
        (SizeScope::MethodDeclaration, method),
    ] {
        v.set(SizeLines(scope), f64::from(s.lines));
        v.set(SizeSymbols(scope), f64::from(s.symbols));
        v.set(SizeSymbolDensity(scope), per_line(s.symbols, s.lines));
    }
    v
}

/// Every submetric for a fragment pasted into `enclosing`.
pub fn fragment_vector(
    fragment: &Fragment,
    enclosing: &MethodUnit,
    keywords: &KeywordSet,
) -> Result<MetricVector, MetricError> {
    let seg = Segment::of_fragment(fragment)?;
    let method = Segment::of_method(enclosing);
    Ok(assemble(&seg, &method, &enclosing.owner, keywords))
}

/// Every submetric for a method body taken as its own segment.
pub fn method_vector(method: &MethodUnit, keywords: &KeywordSet) -> MetricVector {
    let seg = Segment::of_method(method);
    assemble(&seg, &seg, &method.owner, keywords)
}
