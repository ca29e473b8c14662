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

#include "adrsig/report.hpp"

#include <algorithm>
#include <ios>
#include <iterator>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "adrsig/csv.hpp"

namespace adrsig {

std::string_view to_string(RankBy rank_by) {
  return rank_by == RankBy::pvalue_asc ? "pvalue_asc" : "r1_desc";
}

RankBy parse_rank_by(std::string_view name) {
  if (name == "pvalue_asc") return RankBy::pvalue_asc;
  if (name == "r1_desc") return RankBy::r1_desc;
  throw std::invalid_argument(fmt::format("unknown ranking '{}'", name));
}

std::vector<SignalRow> make_report(const std::vector<EventStats>& stats, const ReportSpec& spec) {
  std::vector<const EventStats*> kept;
  for (const auto& s : stats) {
    if (spec.alpha < 1.0 && !(s.p < spec.alpha)) continue;
    if (spec.chapter_filter) {
      const auto& f = *spec.chapter_filter;
      if (!f.chapters.contains(s.code.chapter()) && !f.extra_codes.contains(s.code.str())) {
        continue;
      }
    }
    kept.push_back(&s);
  }

  if (spec.rank_by == RankBy::pvalue_asc) {
    std::sort(kept.begin(), kept.end(), [](const EventStats* a, const EventStats* b) {
      return a->p != b->p ? a->p < b->p : a->code < b->code;
    });
  } else {
    std::sort(kept.begin(), kept.end(), [](const EventStats* a, const EventStats* b) {
      return a->r1 != b->r1 ? a->r1 > b->r1 : a->code < b->code;
    });
  }
  if (spec.top_k && kept.size() > *spec.top_k) kept.resize(*spec.top_k);

  std::vector<SignalRow> rows;
  rows.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const EventStats& s = *kept[i];
    rows.push_back(SignalRow{i + 1, s.code, s.term, s.p, s.n_before, s.n_after, s.r1, s.r2});
  }
  return rows;
}

void render_csv(const std::vector<SignalRow>& rows, std::ostream& out) {
  std::string buf(kReportHeader);
  buf.push_back('\n');
  auto it = std::back_inserter(buf);
  for (const auto& r : rows) {
    fmt::format_to(it, "{},{},", r.rank, r.code.text());
    csv::append_field(buf, r.term);
    fmt::format_to(it, ",{:.5e},{},{},{:.2f},{:.2f}\n", r.p, r.n_before, r.n_after, r.r1,
                   r.r2 * 100.0);
  }
  out << buf;
  out.flush();
  if (!out) throw std::ios_base::failure("failed to write report");
}

void render_json(const std::vector<SignalRow>& rows, std::ostream& out) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"rank", r.rank},
                   {"readcode", r.code.str()},
                   {"term", r.term},
                   {"p_value", r.p},
                   {"NB", r.n_before},
                   {"NA", r.n_after},
                   {"R1", r.r1},
                   {"R2_percent", r.r2 * 100.0}});
  }
  out << arr.dump(2) << '\n';
  out.flush();
  if (!out) throw std::ios_base::failure("failed to write report");
}

}  // namespace adrsig
