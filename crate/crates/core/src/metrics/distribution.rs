use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::source_model::MethodUnit;

use super::calculators::method_vector;
use super::submetric::{Category, KeywordSet, MetricVector, SubmetricId};
use super::MetricError;

pub const DEFAULT_SENSITIVITY: u32 = 50;

/// Slider position (1..=100) for each metric family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategorySensitivity {
    pub keyword: u32,
    pub coupling: u32,
    pub complexity: u32,
    pub size: u32,
}

impl Default for CategorySensitivity {
    fn default() -> Self {
        Self {
            keyword: DEFAULT_SENSITIVITY,
            coupling: DEFAULT_SENSITIVITY,
            complexity: DEFAULT_SENSITIVITY,
            size: DEFAULT_SENSITIVITY,
        }
    }
}

impl CategorySensitivity {
    pub fn get(&self, category: Category) -> u32 {
        match category {
            Category::Keyword => self.keyword,
            Category::Coupling => self.coupling,
            Category::Complexity => self.complexity,
            Category::Size => self.size,
        }
    }

    pub fn set(&mut self, category: Category, value: u32) -> Result<(), MetricError> {
        check_sensitivity(value)?;
        match category {
            Category::Keyword => self.keyword = value,
            Category::Coupling => self.coupling = value,
            Category::Complexity => self.complexity = value,
            Category::Size => self.size = value,
        }
        Ok(())
    }
}

pub fn check_sensitivity(value: u32) -> Result<u32, MetricError> {
    if (1..=100).contains(&value) {
        Ok(value)
    } else {
        Err(MetricError::InvalidSensitivity(value))
    }
}

/// Nearest-rank percentile: the element at 1-based rank
/// `ceil(sensitivity / 100 * n)` of the ascending `sample`.
pub fn percentile_threshold(sample: &[f64], sensitivity: u32) -> Result<f64, MetricError> {
    check_sensitivity(sensitivity)?;
    if sample.is_empty() {
        return Err(MetricError::EmptyDistribution);
    }
    let n = sample.len();
    let rank = (sensitivity as usize * n).div_ceil(100).max(1);
    Ok(sample[rank - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleSummary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

/// Sorted per-method samples of every submetric across a project.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectDistribution {
    samples: BTreeMap<SubmetricId, Vec<f64>>,
    sample_size: usize,
}

impl ProjectDistribution {
    /// Builds the distribution from already computed per-method vectors.
    pub fn from_vectors<'v>(
        vectors: impl IntoIterator<Item = &'v MetricVector>,
    ) -> Result<Self, MetricError> {
        let mut samples: BTreeMap<SubmetricId, Vec<f64>> = SubmetricId::ALL
            .iter()
            .map(|id| (*id, Vec::new()))
            .collect();
        let mut sample_size = 0;
        for v in vectors {
            sample_size += 1;
            for (id, value) in v.iter() {
                samples.entry(id).or_default().push(value);
            }
        }
        if sample_size == 0 {
            return Err(MetricError::EmptyDistribution);
        }
        for sample in samples.values_mut() {
            sample.sort_by(f64::total_cmp);
        }
        Ok(Self {
            samples,
            sample_size,
        })
    }

    pub fn sample(&self, id: SubmetricId) -> &[f64] {
        self.samples.get(&id).map_or(&[], Vec::as_slice)
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    pub fn threshold(&self, id: SubmetricId, sensitivity: u32) -> Result<f64, MetricError> {
        percentile_threshold(self.sample(id), sensitivity)
    }

    pub fn thresholds(
        &self,
        sensitivity: &CategorySensitivity,
    ) -> Result<BTreeMap<SubmetricId, f64>, MetricError> {
        SubmetricId::ALL
            .iter()
            .map(|&id| Ok((id, self.threshold(id, sensitivity.get(id.category()))?)))
            .collect()
    }

    pub fn summary(&self, id: SubmetricId) -> Option<SampleSummary> {
        let s = self.sample(id);
        Some(SampleSummary {
            min: *s.first()?,
            median: percentile_threshold(s, 50).ok()?,
            max: *s.last()?,
        })
    }
}

/// Computes every submetric over each method body and sorts the samples.
pub fn build_distributions(
    methods: &[MethodUnit],
    keywords: &KeywordSet,
) -> Result<ProjectDistribution, MetricError> {
    let vectors: Vec<MetricVector> = methods.iter().map(|m| method_vector(m, keywords)).collect();
    ProjectDistribution::from_vectors(&vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::SizeScope;
    use crate::source_model::index_file;

    fn one_to_ten() -> Vec<f64> {
        (1..=10).map(f64::from).collect()
    }

    #[test]
    fn nearest_rank_examples() {
        assert_eq!(percentile_threshold(&one_to_ten(), 50), Ok(5.0));
        assert_eq!(percentile_threshold(&one_to_ten(), 100), Ok(10.0));
        assert_eq!(percentile_threshold(&one_to_ten(), 1), Ok(1.0));
        assert_eq!(percentile_threshold(&one_to_ten(), 51), Ok(6.0));
    }

    #[test]
    fn threshold_errors() {
        assert_eq!(
            percentile_threshold(&[], 50),
            Err(MetricError::EmptyDistribution)
        );
        assert_eq!(
            percentile_threshold(&one_to_ten(), 0),
            Err(MetricError::InvalidSensitivity(0))
        );
        assert_eq!(
            percentile_threshold(&one_to_ten(), 101),
            Err(MetricError::InvalidSensitivity(101))
        );
    }

    #[test]
    fn lines_sample_is_sorted() {
        let src = "class S {\n  void five() {\n    a();\n    a();\n    a();\n    a();\n    a();\n  }\n  void two() {\n    b();\n    b();\n  }\n  void nine() {\n    c();\n    c();\n    c();\n    c();\n    c();\n    c();\n    c();\n    c();\n    c();\n  }\n}";
        let idx = index_file(src, "S.java").unwrap();
        let dist = build_distributions(&idx.methods, &KeywordSet::all()).unwrap();
        assert_eq!(dist.sample_size(), 3);
        assert_eq!(
            dist.sample(SubmetricId::SizeLines(SizeScope::Segment)),
            &[2.0, 5.0, 9.0]
        );
        let summary = dist
            .summary(SubmetricId::SizeLines(SizeScope::Segment))
            .unwrap();
        assert_eq!((summary.min, summary.median, summary.max), (2.0, 5.0, 9.0));
    }

    #[test]
    fn empty_project_has_no_distribution() {
        assert_eq!(
            build_distributions(&[], &KeywordSet::all()).unwrap_err(),
            MetricError::EmptyDistribution
        );
    }

    #[test]
    fn category_sensitivity_validates() {
        let mut s = CategorySensitivity::default();
        assert_eq!(s.get(Category::Size), 50);
        s.set(Category::Size, 90).unwrap();
        assert_eq!(s.size, 90);
        assert!(s.set(Category::Size, 150).is_err());
    }
}
