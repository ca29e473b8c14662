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

#include <numeric>
#include <random>
#include <sstream>

#include "adrsig/feature_matrix.hpp"

using namespace adrsig;

namespace {

Cohort one_patient(std::vector<std::pair<const char*, int>> events) {
  Cohort c;
  c.drug_code = "D";
  PatientTimeline p;
  p.patient_id = "p1";
  p.index_date = *parse_iso_date("2010-06-01");
  for (auto [code, off] : events) {
    p.events.push_back({ReadCode::parse(code), p.index_date + std::chrono::days{off}});
  }
  std::sort(p.events.begin(), p.events.end(), [](const DatedCode& a, const DatedCode& b) {
    return a.date != b.date ? a.date < b.date : a.code < b.code;
  });
  c.patients.push_back(p);
  return c;
}

PatientMatrix random_matrix(std::size_t n, std::size_t e, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution on(density);
  PatientMatrix m(e);
  std::vector<std::uint32_t> cols;
  for (std::size_t i = 0; i < n; ++i) {
    cols.clear();
    for (std::uint32_t j = 0; j < e; ++j) {
      if (on(rng)) cols.push_back(j);
    }
    m.push_row(cols);
  }
  return m;
}

}  // namespace

TEST_CASE("event index") {
  const Cohort c = one_patient({{"N245.16", -3}, {"N245111", 4}, {"A00..00", 0}});
  const EventIndex full = build_event_index(c, false);
  REQUIRE(full.size() == 2);
  CHECK(full.code(0).text() == "N245.16");
  CHECK(full.code(1).text() == "N245111");
  CHECK(full.column(ReadCode::parse("N245111")) == 1u);
  CHECK_FALSE(full.column(ReadCode::parse("A00..00")));

  const EventIndex l3 = build_event_index(c, true);
  REQUIRE(l3.size() == 1);
  CHECK(l3.code(0).text() == "N24..00");

  CHECK(build_event_index(one_patient({{"A00..00", 0}, {"B00..00", 90}}), false).empty());
}

TEST_CASE("patient matrices are binary after rollup") {
  const Cohort c = one_patient({{"N245.16", -3}, {"N245111", -2}});
  const EventIndex idx = build_event_index(c, true);
  const PatientMatrices m = build_patient_matrices(c, idx, true);
  REQUIRE(m.before.rows() == 1);
  CHECK(m.before.at(0, 0));
  CHECK(m.before.row(0).size() == 1);
  CHECK(m.after.row(0).empty());
  CHECK(m.before.column_sums() == std::vector<std::uint64_t>{1});

  const EventIndex wrong = build_event_index(c, false);
  CHECK_THROWS_AS(build_patient_matrices(c, wrong, true), std::invalid_argument);
}

TEST_CASE("group sizes") {
  SUBCASE("14905 patients into 149 groups") {
    const PatientMatrix m = random_matrix(14905, 3, 0.1, 1);
    const FeatureMatrix x = group(m, 100, RemainderPolicy::merge);
    CHECK(x.groups() == 149);
    CHECK(x.group_sizes().back() == 105);
    CHECK(std::count(x.group_sizes().begin(), x.group_sizes().end(), 100u) == 148);
    CHECK(x.patients() == 14905);

    const FeatureMatrix dropped = group(m, 100, RemainderPolicy::drop);
    CHECK(dropped.groups() == 149);
    CHECK(dropped.group_sizes().back() == 100);
    CHECK(dropped.patients() == 14900);
  }
  SUBCASE("exact multiple") {
    const FeatureMatrix x = group(random_matrix(200, 2, 0.5, 2), 100);
    CHECK(x.group_sizes() == std::vector<std::uint32_t>{100, 100});
  }
  SUBCASE("degenerate") {
    CHECK_THROWS_AS(group(random_matrix(5, 2, 0.5, 3), 100), GroupSizeExceedsCohort);
    CHECK_THROWS_AS(group(random_matrix(5, 2, 0.5, 3), 0), std::invalid_argument);
  }
}

TEST_CASE("grouping preserves column sums and bounds") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 50 + rng() % 400;
    const std::size_t gs = 1 + rng() % 60;
    const PatientMatrix m = random_matrix(n, 17, 0.2, seed);
    const FeatureMatrix x = group(m, gs, RemainderPolicy::merge);
    const auto sums = m.column_sums();
    for (std::size_t e = 0; e < x.events(); ++e) {
      REQUIRE(x.column_sum(e) == sums[e]);
      for (std::size_t g = 0; g < x.groups(); ++g) REQUIRE(x.at(g, e) <= x.group_sizes()[g]);
    }
    REQUIRE(x.patients() == n);
  }
}

TEST_CASE("grouping is invariant to column order") {
  const PatientMatrix m = random_matrix(300, 9, 0.3, 5);
  std::vector<std::uint32_t> perm(9);
  std::iota(perm.begin(), perm.end(), 0u);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(11));
  PatientMatrix permuted(9);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<std::uint32_t> cols;
    for (auto c : m.row(i)) cols.push_back(perm[c]);
    std::sort(cols.begin(), cols.end());
    permuted.push_row(cols);
  }
  const FeatureMatrix a = group(m, 40);
  const FeatureMatrix b = group(permuted, 40);
  for (std::size_t g = 0; g < a.groups(); ++g) {
    for (std::size_t e = 0; e < 9; ++e) REQUIRE(a.at(g, e) == b.at(g, perm[e]));
  }
}

TEST_CASE("level-3 column sums are bounded by their children") {
  std::mt19937_64 rng(3);
  Cohort cohort;
  cohort.drug_code = "D";
  for (int i = 0; i < 200; ++i) {
    PatientTimeline p;
    p.patient_id = "p" + std::to_string(i);
    p.index_date = *parse_iso_date("2010-06-01");
    for (const char* child : {"N245.16", "N245111", "N245.13", "N24..11", "N2451AB"}) {
      if (rng() % 3 != 0) continue;
      const auto offset = std::chrono::days{1 + static_cast<int>(rng() % 60)};
      p.events.push_back({ReadCode::parse(child), p.index_date - offset});
    }
    std::sort(p.events.begin(), p.events.end(), [](const DatedCode& a, const DatedCode& b) {
      return a.date != b.date ? a.date < b.date : a.code < b.code;
    });
    cohort.patients.push_back(p);
  }

  const EventIndex full = build_event_index(cohort, false);
  const EventIndex l3 = build_event_index(cohort, true);
  const auto full_sums = build_patient_matrices(cohort, full, false).before.column_sums();
  const auto l3_sums = build_patient_matrices(cohort, l3, true).before.column_sums();
  REQUIRE(l3.size() == 1);
  const std::uint64_t parent = l3_sums[0];
  std::uint64_t total = 0;
  for (std::size_t e = 0; e < full.size(); ++e) {
    CHECK(parent >= full_sums[e]);
    total += full_sums[e];
  }
  CHECK(parent <= total);
}

TEST_CASE("dump_matrix lists non-zero entries in order") {
  PatientMatrix m(2);
  const std::uint32_t r0[] = {1};
  const std::uint32_t r1[] = {0, 1};
  m.push_row(r0);
  m.push_row({});
  m.push_row(r1);
  const FeatureMatrix x = group(m, 2);  // one group of 3
  const EventIndex idx({ReadCode::parse("B00..00"), ReadCode::parse("A00..00")});
  std::ostringstream out;
  dump_matrix(x, idx, out);
  CHECK(out.str() == "group,code,count\n1,A00..00,1\n1,B00..00,2\n");
}
