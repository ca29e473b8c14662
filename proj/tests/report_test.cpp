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

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

#include "adrsig/csv.hpp"
#include "adrsig/report.hpp"

using namespace adrsig;

namespace {

EventStats stat(const char* code, double p, std::uint64_t nb, std::uint64_t na,
                std::uint64_t n = 14905) {
  const Ratios r = ratios(nb, na, n);
  return EventStats{ReadCode::parse(code), std::string("term ") + code, nb, na, 0.0, 296.0, p,
                    r.r1, r.r2};
}

std::string to_csv(const std::vector<SignalRow>& rows) {
  std::ostringstream out;
  render_csv(rows, out);
  return out.str();
}

}  // namespace

TEST_CASE("rank by p ascending") {
  const std::vector<EventStats> stats = {
      stat("M03z000", 2e-10, 98, 503), stat("I2I2.00", 1e-20, 185, 1095),
      stat("F4C0.00", 2e-10, 113, 525), stat("N131.00", 0.2, 140, 609),
      stat("A00..00", 0.05, 1, 2)};
  ReportSpec spec;
  const auto rows = make_report(stats, spec);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].code.text() == "I2I2.00");
  CHECK(rows[1].code.text() == "F4C0.00");  // tie on p, code order
  CHECK(rows[2].code.text() == "M03z000");
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].rank == i + 1);

  spec.top_k = 1;
  CHECK(make_report(stats, spec).size() == 1);
}

TEST_CASE("rank by R1 descending") {
  const std::vector<EventStats> stats = {stat("I2I1E00", 1e-3, 0, 40), stat("Eu32000", 1e-3, 1, 39),
                                         stat("C106.00", 1e-3, 1, 39), stat("S646000", 1e-3, 2, 51)};
  ReportSpec spec;
  spec.rank_by = RankBy::r1_desc;
  const auto rows = make_report(stats, spec);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].code.text() == "I2I1E00");
  CHECK(rows[1].code.text() == "C106.00");
  CHECK(rows[2].code.text() == "Eu32000");
  CHECK(rows[3].code.text() == "S646000");
}

TEST_CASE("chapter filter with extra codes") {
  const std::vector<EventStats> stats = {stat("B33..00", 1e-5, 46, 241), stat("170..00", 1e-3, 4, 33),
                                         stat("N24..00", 1e-9, 807, 2643), stat("B22..00", 1e-4, 5, 47)};
  ReportSpec spec;
  spec.chapter_filter = ChapterFilter{{'B'}, {"170..00"}};
  const auto rows = make_report(stats, spec);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].code.text() == "B33..00");
  CHECK(rows[1].code.text() == "B22..00");
  CHECK(rows[2].code.text() == "170..00");
}

TEST_CASE("alpha 1 keeps everything") {
  const std::vector<EventStats> stats = {stat("A00..00", 1.0, 3, 3), stat("B00..00", 0.3, 1, 2),
                                         stat("C00..00", 0.0, 0, 9)};
  ReportSpec spec;
  spec.alpha = 1.0;
  spec.top_k = std::nullopt;
  const auto rows = make_report(stats, spec);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].code.text() == "C00..00");
  std::vector<std::string> got, want = {"A00..00", "B00..00", "C00..00"};
  for (const auto& r : rows) got.push_back(r.code.str());
  std::sort(got.begin(), got.end());
  CHECK(got == want);
}

TEST_CASE("reports keep only rows passing the filters, in total order") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  const char chapters[] = {'A', 'B', 'C'};
  std::vector<EventStats> stats;
  for (int i = 0; i < 300; ++i) {
    const std::string code = std::string(1, chapters[i % 3]) + std::to_string(10 + i % 90) + "..0" +
                             std::to_string(i / 90);
    stats.push_back(stat(code.c_str(), i % 7 == 0 ? 0.01 : u(rng), rng() % 50, rng() % 80));
  }
  ReportSpec spec;
  spec.top_k = std::nullopt;
  spec.chapter_filter = ChapterFilter{{'B'}, {}};
  for (RankBy by : {RankBy::pvalue_asc, RankBy::r1_desc}) {
    spec.rank_by = by;
    const auto rows = make_report(stats, spec);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      REQUIRE(rows[i].p < 0.05);
      REQUIRE(rows[i].code.chapter() == 'B');
      REQUIRE(rows[i].rank == i + 1);
    }
    auto shuffled = stats;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(to_csv(make_report(shuffled, spec)) == to_csv(rows));
  }
}

TEST_CASE("render_csv formatting") {
  ReportSpec spec;
  const auto rows = make_report({stat("I2I2.00", 1.23456789e-30, 185, 1095)}, spec);
  CHECK(to_csv(rows) == "rank,readcode,term,p_value,NB,NA,R1,R2_percent\n"
                        "1,I2I2.00,term I2I2.00,1.23457e-30,185,1095,5.92,7.35\n");
  CHECK(to_csv({}) == "rank,readcode,term,p_value,NB,NA,R1,R2_percent\n");

  auto quoted = rows;
  quoted[0].term = "Cervicalgia, \"neck\"";
  CHECK(to_csv(quoted).find("\"Cervicalgia, \"\"neck\"\"\"") != std::string::npos);
}

TEST_CASE("render_csv round-trips at printed precision") {
  std::vector<EventStats> stats;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> logp(-300.0, -1.31);
  for (int i = 0; i < 50; ++i) {
    const std::string code = "K" + std::to_string(10 + i) + "..00";
    stats.push_back(stat(code.c_str(), std::pow(10.0, logp(rng)), rng() % 500, rng() % 3000));
  }
  ReportSpec spec;
  spec.top_k = std::nullopt;
  const auto rows = make_report(stats, spec);
  std::istringstream in(to_csv(rows));
  csv::Reader reader(in);
  std::vector<std::string_view> f;
  REQUIRE(reader.next(f));
  for (const auto& r : rows) {
    REQUIRE(reader.next(f));
    REQUIRE(f.size() == 8);
    CHECK(std::stoul(std::string(f[0])) == r.rank);
    CHECK(f[1] == r.code.text());
    CHECK(f[2] == r.term);
    CHECK(std::stod(std::string(f[3])) == doctest::Approx(r.p).epsilon(5e-6));
    CHECK(std::stoull(std::string(f[4])) == r.n_before);
    CHECK(std::stoull(std::string(f[5])) == r.n_after);
    CHECK(std::fabs(std::stod(std::string(f[6])) - r.r1) <= 0.005 + 1e-12);
    CHECK(std::fabs(std::stod(std::string(f[7])) - r.r2 * 100.0) <= 0.005 + 1e-12);
  }
  CHECK_FALSE(reader.next(f));
}

TEST_CASE("render_json carries full precision") {
  ReportSpec spec;
  const auto rows = make_report({stat("I2I2.00", 1.2345678901234e-30, 185, 1095)}, spec);
  std::ostringstream out;
  render_json(rows, out);
  const auto j = nlohmann::json::parse(out.str());
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 1);
  CHECK(j[0]["rank"] == 1);
  CHECK(j[0]["readcode"] == "I2I2.00");
  CHECK(j[0]["p_value"].get<double>() == rows[0].p);
  CHECK(j[0]["NB"] == 185);
  CHECK(j[0]["NA"] == 1095);
  CHECK(j[0]["R1"].get<double>() == rows[0].r1);
  CHECK(j[0]["R2_percent"].get<double>() == rows[0].r2 * 100.0);
}

TEST_CASE("render_csv reports sink failure") {
  std::ostringstream out;
  out.setstate(std::ios::badbit);
  CHECK_THROWS_AS(render_csv({}, out), std::ios_base::failure);
}
