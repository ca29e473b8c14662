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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "adrsig/stats.hpp"
#include "oracle.hpp"

using adrsig::t_cdf_two_sided;

TEST_CASE("oracle agrees with the mpmath golden constants") {
  for (const auto& g : oracle::kGoldenP) {
    CAPTURE(g.t);
    CAPTURE(g.df);
    CHECK(oracle::t_two_sided(g.t, g.df) == doctest::Approx(g.p).epsilon(1e-12));
  }
}

TEST_CASE("t_cdf_two_sided matches golden constants") {
  for (const auto& g : oracle::kGoldenP) {
    CAPTURE(g.t);
    CAPTURE(g.df);
    CHECK(std::fabs(t_cdf_two_sided(g.t, g.df) - g.p) < 1e-11);
    CHECK(t_cdf_two_sided(-g.t, g.df) == t_cdf_two_sided(g.t, g.df));
  }
}

TEST_CASE("t_cdf_two_sided edge values") {
  CHECK(t_cdf_two_sided(0.0, 10.0) == 1.0);
  CHECK(t_cdf_two_sided(std::numeric_limits<double>::infinity(), 3.0) == 0.0);
  CHECK(t_cdf_two_sided(-std::numeric_limits<double>::infinity(), 3.0) == 0.0);
  CHECK(t_cdf_two_sided(1e6, 5.0) < 1e-25);
  CHECK(t_cdf_two_sided(1e-12, 5.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(t_cdf_two_sided(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(t_cdf_two_sided(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("t_cdf_two_sided matches oracle on 1000 random pairs") {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> df_dist(1.0, 500.0);
  std::uniform_real_distribution<double> t_dist(-12.0, 12.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double df = df_dist(rng);
    const double t = t_dist(rng);
    worst = std::max(worst, std::fabs(t_cdf_two_sided(t, df) - oracle::t_two_sided(t, df)));
  }
  MESSAGE("worst |p - oracle| = " << worst);
  CHECK(worst < 1e-9);
}

TEST_CASE("t_cdf_two_sided is monotone in |t|") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> df_dist(0.5, 1000.0);
  std::uniform_real_distribution<double> t_dist(0.0, 30.0);
  for (int i = 0; i < 2000; ++i) {
    const double df = df_dist(rng);
    double a = t_dist(rng);
    double b = t_dist(rng);
    if (a > b) std::swap(a, b);
    const double pa = t_cdf_two_sided(a, df);
    const double pb = t_cdf_two_sided(b, df);
    REQUIRE(pa >= pb);
    REQUIRE(pa <= 1.0);
    REQUIRE(pb >= 0.0);
  }
}
