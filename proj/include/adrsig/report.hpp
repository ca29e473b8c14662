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

#ifndef ADRSIG_REPORT_HPP_
#define ADRSIG_REPORT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "adrsig/readcode.hpp"
#include "adrsig/stats.hpp"

namespace adrsig {

enum class RankBy { pvalue_asc, r1_desc };

std::string_view to_string(RankBy rank_by);
RankBy parse_rank_by(std::string_view name);

/// Keeps rows whose chapter is listed or whose full code is listed.
struct ChapterFilter {
  std::set<char> chapters;
  std::set<std::string> extra_codes;
};

struct ReportSpec {
  RankBy rank_by = RankBy::pvalue_asc;
  /// Rows need p < alpha. alpha >= 1 keeps everything, including p = 1.
  double alpha = 0.05;
  /// nullopt means no limit.
  std::optional<std::size_t> top_k = 30;
  std::optional<ChapterFilter> chapter_filter;
  bool level3 = false;
};

struct SignalRow {
  std::size_t rank;
  ReadCode code;
  std::string term;
  double p;
  std::uint64_t n_before;
  std::uint64_t n_after;
  double r1;
  double r2;
};

/// Filters by alpha and chapter, sorts by the ranking key with ties broken
/// by ascending code text, truncates to top_k and numbers ranks from 1.
std::vector<SignalRow> make_report(const std::vector<EventStats>& stats, const ReportSpec& spec);

inline constexpr std::string_view kReportHeader = "rank,readcode,term,p_value,NB,NA,R1,R2_percent";

/// CSV with R1 and R2_percent at 2 decimals and p in 6-significant-digit
/// scientific notation. Throws std::ios_base::failure if the stream fails.
void render_csv(const std::vector<SignalRow>& rows, std::ostream& out);

/// JSON array of objects keyed like the CSV header, full precision.
void render_json(const std::vector<SignalRow>& rows, std::ostream& out);

}  // namespace adrsig

#endif  // ADRSIG_REPORT_HPP_
