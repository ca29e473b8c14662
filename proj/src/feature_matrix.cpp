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

#include "adrsig/feature_matrix.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

namespace adrsig {

GroupSizeExceedsCohort::GroupSizeExceedsCohort(std::size_t group_size, std::size_t n_patients)
    : std::runtime_error(
          fmt::format("group size {} exceeds cohort size {}", group_size, n_patients)) {}

EventIndex::EventIndex(std::vector<ReadCode> codes) : codes_(std::move(codes)) {
  std::sort(codes_.begin(), codes_.end());
  codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
  positions_.reserve(codes_.size());
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    positions_.emplace(codes_[i], static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> EventIndex::column(const ReadCode& code) const {
  auto it = positions_.find(code);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

void PatientMatrix::push_row(std::span<const std::uint32_t> columns) {
  cols_.insert(cols_.end(), columns.begin(), columns.end());
  offsets_.push_back(cols_.size());
}

bool PatientMatrix::at(std::size_t i, std::size_t e) const {
  auto r = row(i);
  return std::binary_search(r.begin(), r.end(), static_cast<std::uint32_t>(e));
}

std::vector<std::uint64_t> PatientMatrix::column_sums() const {
  std::vector<std::uint64_t> sums(n_cols_, 0);
  for (std::uint32_t c : cols_) ++sums[c];
  return sums;
}

FeatureMatrix::FeatureMatrix(std::vector<std::uint32_t> group_sizes, std::size_t n_events)
    : group_sizes_(std::move(group_sizes)),
      n_events_(n_events),
      entries_(group_sizes_.size() * n_events, 0) {}

std::uint64_t FeatureMatrix::column_sum(std::size_t e) const {
  std::uint64_t sum = 0;
  for (std::size_t g = 0; g < groups(); ++g) sum += at(g, e);
  return sum;
}

std::vector<double> FeatureMatrix::column(std::size_t e) const {
  std::vector<double> out(groups());
  for (std::size_t g = 0; g < groups(); ++g) out[g] = at(g, e);
  return out;
}

std::size_t FeatureMatrix::patients() const {
  return std::accumulate(group_sizes_.begin(), group_sizes_.end(), std::size_t{0});
}

namespace {

ReadCode maybe_rollup(const ReadCode& c, bool level3) { return level3 ? c.rollup3() : c; }

}  // namespace

EventIndex build_event_index(const Cohort& cohort, bool level3) {
  std::vector<ReadCode> all;
  for (const auto& p : cohort.patients) {
    WindowCodes w = window_events(p, cohort.window_days);
    for (const auto* v : {&w.before, &w.after}) {
      for (const auto& c : *v) all.push_back(maybe_rollup(c, level3));
    }
  }
  return EventIndex(std::move(all));
}

PatientMatrices build_patient_matrices(const Cohort& cohort, const EventIndex& index,
                                       bool level3) {
  PatientMatrices out{PatientMatrix(index.size()), PatientMatrix(index.size())};
  std::vector<std::uint32_t> cols;
  auto fill = [&](const std::vector<ReadCode>& codes, PatientMatrix& m) {
    cols.clear();
    for (const auto& c : codes) {
      const ReadCode key = maybe_rollup(c, level3);
      auto col = index.column(key);
      if (!col) {
        throw std::invalid_argument(
            fmt::format("code '{}' is not in the event index", key.text()));
      }
      cols.push_back(*col);
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    m.push_row(cols);
  };
  for (const auto& p : cohort.patients) {
    WindowCodes w = window_events(p, cohort.window_days);
    fill(w.before, out.before);
    fill(w.after, out.after);
  }
  return out;
}

FeatureMatrix group(const PatientMatrix& m, std::size_t group_size, RemainderPolicy policy) {
  if (group_size == 0) throw std::invalid_argument("group size must be positive");
  const std::size_t n = m.rows();
  if (group_size > n) throw GroupSizeExceedsCohort(group_size, n);

  const std::size_t n_groups = n / group_size;
  std::vector<std::uint32_t> sizes(n_groups, static_cast<std::uint32_t>(group_size));
  const std::size_t remainder = n % group_size;
  std::size_t used = n;
  if (remainder != 0) {
    if (policy == RemainderPolicy::merge) {
      sizes.back() += static_cast<std::uint32_t>(remainder);
    } else {
      used = n - remainder;
    }
  }

  FeatureMatrix out(std::move(sizes), m.cols());
  for (std::size_t i = 0; i < used; ++i) {
    const std::size_t g = std::min(i / group_size, n_groups - 1);
    for (std::uint32_t e : m.row(i)) ++out.at(g, e);
  }
  return out;
}

void dump_matrix(const FeatureMatrix& m, const EventIndex& index, std::ostream& out) {
  std::string buf = "group,code,count\n";
  for (std::size_t g = 0; g < m.groups(); ++g) {
    for (std::size_t e = 0; e < m.events(); ++e) {
      if (const auto v = m.at(g, e); v != 0) {
        fmt::format_to(std::back_inserter(buf), "{},{},{}\n", g + 1, index.code(e).text(), v);
      }
    }
  }
  out << buf;
}

}  // namespace adrsig
