// Copyright 2026 The qweval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Correlation with human judgments, annotator agreement and the score
// transforms used when comparing metrics against human grades.

#pragma once

#include <array>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qweval {

/// Every randomized routine takes this generator explicitly.
using Rng = std::mt19937_64;

/// Raised when a coefficient is undefined (a coordinate has zero variance).
class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct CorrelationResult {
  double coefficient = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

enum class CorrelationMethod { kPearson, kSpearman };

/// Sample Pearson r with a two-sided p-value from Student's t with n - 2
/// degrees of freedom. Requires n >= 3 and equal lengths.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

/// Pearson on average ranks (ties share the mean of their ranks).
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

CorrelationResult correlate(CorrelationMethod method, std::span<const double> x,
                            std::span<const double> y);

/// 1-based ranks; tied values get the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Two-sided p-value of the t statistic r * sqrt((n-2) / (1-r^2)).
double t_test_p_value(double r, std::size_t n);

/// Exact-style alternative for small n: the share of y-permutations whose
/// |coefficient| reaches the observed one, with the usual +1 correction.
/// At most 10^4 shuffles.
double permutation_p_value(CorrelationMethod method, std::span<const double> x,
                           std::span<const double> y, std::size_t shuffles,
                           Rng& rng);

struct AnnotationRecord {
  std::string item_id;
  std::array<int, 2> grades{};  // one grade in 1..5 per annotator
};

enum class KappaWeights { kLinear, kQuadratic };

/// Cohen's weighted kappa over the 5x5 grade table with disagreement
/// weights |i-j| or (i-j)^2. Needs at least two records; returns 1 when the
/// expected disagreement vanishes and no disagreement was observed.
double cohen_weighted_kappa(std::span<const AnnotationRecord> records,
                            KappaWeights weights = KappaWeights::kLinear);

struct HumanBaseline {
  CorrelationResult spearman;
  CorrelationResult pearson;
};

/// Splits each record's two grades between groups A and B at random and
/// correlates the groups.
HumanBaseline human_human_baseline(std::span<const AnnotationRecord> records,
                                   Rng& rng);

/// y = scale * x + offset.
struct AffineMap {
  double scale = 1.0;
  double offset = 0.0;
  double operator()(double x) const { return scale * x + offset; }
};

/// Maps metric scores onto the human mean and (population) standard
/// deviation. Throws std::invalid_argument on zero variance.
AffineMap fit_to_human(std::span<const double> metric_scores,
                       std::span<const double> human_scores);

/// fit_to_human() followed by clipping to [lo, hi].
std::vector<double> normalize_to_human(std::span<const double> metric_scores,
                                       std::span<const double> human_scores,
                                       double lo = 1.0, double hi = 5.0);

/// (grade - 1) / 4 for a grade in 1..5.
double normalize_quality(int grade);
/// Same map for an averaged grade in [1, 5].
double normalize_quality(double mean_grade);

/// Adds i.i.d. N(0, sigma^2) noise; sigma == 0 returns the input.
std::vector<double> jitter(std::span<const double> scores, double sigma,
                           Rng& rng);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // population
};
Summary summarize(std::span<const double> values);

}  // namespace qweval
