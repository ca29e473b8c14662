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

#include "adrsig/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace adrsig {

std::string_view to_string(TestKind kind) {
  switch (kind) {
    case TestKind::student_pooled: return "student_pooled";
    case TestKind::welch: return "welch";
    case TestKind::paired: return "paired";
  }
  return "?";
}

TestKind parse_test_kind(std::string_view name) {
  if (name == "student_pooled") return TestKind::student_pooled;
  if (name == "welch") return TestKind::welch;
  if (name == "paired") return TestKind::paired;
  throw std::invalid_argument(fmt::format("unknown test kind '{}'", name));
}

namespace {

// Continued fraction for I_x(a,b) (modified Lentz), valid for
// x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// Stirling series remainder: lgamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2].
double stirling_tail(double x) {
  const double r = 1.0 / x;
  const double r2 = r * r;
  return r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 * (1.0 / 1680 - r2 / 1188))));
}

// ln B(a, b). For a large argument, lgamma(big + small) - lgamma(big) is
// formed directly from the Stirling expansion instead of by subtraction.
double log_beta(double a, double b) {
  const double big = std::max(a, b);
  const double small = std::min(a, b);
  if (big < 20.0) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double lgamma_ratio = small * std::log(big) + (big + small - 0.5) * std::log1p(small / big) -
                              small + stirling_tail(big + small) - stirling_tail(big);
  return std::lgamma(small) - lgamma_ratio;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Unbiased sample variance.
double variance(std::span<const double> v, double m) {
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

TTestResult degenerate(double diff, double df) {
  if (diff == 0.0) return {0.0, df, 1.0};
  return {std::copysign(std::numeric_limits<double>::infinity(), diff), df, 0.0};
}

}  // namespace

double incomplete_beta(double a, double b, double x, double one_minus_x) {
  if (x <= 0.0) return 0.0;
  if (one_minus_x <= 0.0) return 1.0;
  const double log_x = x > 0.5 ? std::log1p(-one_minus_x) : std::log(x);
  const double log_1mx = x > 0.5 ? std::log(one_minus_x) : std::log1p(-x);
  const double log_front = a * log_x + b * log_1mx - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, one_minus_x) / b;
}

double t_cdf_two_sided(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument(fmt::format("df must be positive, got {}", df));
  if (std::isnan(t)) throw std::invalid_argument("t is NaN");
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double one_minus_x = t2 / (df + t2);
  const double p = incomplete_beta(0.5 * df, 0.5, x, one_minus_x);
  return std::clamp(p, 0.0, 1.0);
}

TTestResult t_test(std::span<const double> x, std::span<const double> y, TestKind kind) {
  if (x.size() != y.size()) {
    throw DimensionMismatch(fmt::format("sample sizes differ: {} vs {}", x.size(), y.size()));
  }
  if (x.size() < 2) {
    throw InsufficientGroups(fmt::format("need at least 2 groups, got {}", x.size()));
  }
  const double g = static_cast<double>(x.size());

  if (kind == TestKind::paired) {
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
    const double md = mean(d);
    const double vd = variance(d, md);
    const double df = g - 1.0;
    if (vd == 0.0) return degenerate(md, df);
    const double t = md / std::sqrt(vd / g);
    return {t, df, t_cdf_two_sided(t, df)};
  }

  const double mx = mean(x);
  const double my = mean(y);
  const double vx = variance(x, mx);
  const double vy = variance(y, my);
  const double diff = mx - my;

  if (kind == TestKind::student_pooled) {
    const double df = 2.0 * g - 2.0;
    const double pooled = ((g - 1.0) * vx + (g - 1.0) * vy) / df;
    if (pooled == 0.0) return degenerate(diff, df);
    const double t = diff / std::sqrt(pooled * (2.0 / g));
    return {t, df, t_cdf_two_sided(t, df)};
  }

  // Welch
  const double sx = vx / g;
  const double sy = vy / g;
  const double se2 = sx + sy;
  if (se2 == 0.0) return degenerate(diff, 2.0 * g - 2.0);
  const double df = se2 * se2 / (sx * sx / (g - 1.0) + sy * sy / (g - 1.0));
  const double t = diff / std::sqrt(se2);
  return {t, df, t_cdf_two_sided(t, df)};
}

Ratios ratios(std::uint64_t n_before, std::uint64_t n_after, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("cohort size must be positive");
  const double na = static_cast<double>(n_after);
  const double r1 = n_before == 0 ? na : na / static_cast<double>(n_before);
  return {r1, na / static_cast<double>(n)};
}

std::vector<EventStats> test_all_events(const FeatureMatrix& before, const FeatureMatrix& after,
                                        const EventIndex& index, std::uint64_t n,
                                        const TestConfig& config, const Dictionary& terms) {
  if (before.groups() != after.groups() || before.events() != after.events() ||
      before.group_sizes() != after.group_sizes()) {
    throw DimensionMismatch(fmt::format("before matrix is {}x{}, after matrix is {}x{}",
                                        before.groups(), before.events(), after.groups(),
                                        after.events()));
  }
  if (index.size() != before.events()) {
    throw DimensionMismatch(fmt::format("event index has {} codes, matrices have {} columns",
                                        index.size(), before.events()));
  }

  std::vector<EventStats> out;
  out.reserve(index.size());
  for (std::size_t e = 0; e < index.size(); ++e) {
    const std::vector<double> x = before.column(e);
    const std::vector<double> y = after.column(e);
    // x is "before": a rise after exposure yields negative t.
    const TTestResult tt = t_test(x, y, config.kind);
    const std::uint64_t nb = before.column_sum(e);
    const std::uint64_t na = after.column_sum(e);
    const Ratios r = ratios(nb, na, n);
    out.push_back(EventStats{index.code(e), terms.term(index.code(e)), nb, na, tt.t, tt.df, tt.p,
                             r.r1, r.r2});
  }
  return out;
}

}  // namespace adrsig
