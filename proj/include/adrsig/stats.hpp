/*
 * Copyright 2026 The adrsignal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ADRSIG_STATS_HPP_
#define ADRSIG_STATS_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adrsig/feature_matrix.hpp"
#include "adrsig/readcode.hpp"

namespace adrsig {

class InsufficientGroups : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class TestKind { student_pooled, welch, paired };

std::string_view to_string(TestKind kind);
/// Throws std::invalid_argument for an unknown name.
TestKind parse_test_kind(std::string_view name);

struct TestConfig {
  TestKind kind = TestKind::student_pooled;
  double alpha = 0.05;
};

struct TTestResult {
  double t;
  double df;
  double p;
};

struct Ratios {
  double r1;
  /// Fraction of the cohort; reports print it as a percentage.
  double r2;
};

struct EventStats {
  ReadCode code;
  std::string term;
  std::uint64_t n_before;
  std::uint64_t n_after;
  double t;
  double df;
  double p;
  double r1;
  double r2;
};

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
/// `one_minus_x` must equal 1 - x; passing it separately keeps precision
/// when x is close to 1.
double incomplete_beta(double a, double b, double x, double one_minus_x);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with `df`
/// degrees of freedom. Infinite t gives 0. Throws std::invalid_argument
/// unless df > 0.
double t_cdf_two_sided(double t, double df);

/// Two-sample t statistic between equal-length samples. Constant samples
/// give t = 0, p = 1 when equal and t = +-inf, p = 0 otherwise.
/// Throws InsufficientGroups (fewer than 2 values) or DimensionMismatch.
TTestResult t_test(std::span<const double> x, std::span<const double> y, TestKind kind);

/// R1 = N_A / N_B, or N_A when N_B = 0. R2 = N_A / N.
Ratios ratios(std::uint64_t n_before, std::uint64_t n_after, std::uint64_t n);

/// One EventStats per column of the before (X) and after (Y) matrices, in
/// index order. `n` is the cohort size used for R2.
std::vector<EventStats> test_all_events(const FeatureMatrix& before, const FeatureMatrix& after,
                                        const EventIndex& index, std::uint64_t n,
                                        const TestConfig& config, const Dictionary& terms);

}  // namespace adrsig

#endif  // ADRSIG_STATS_HPP_
