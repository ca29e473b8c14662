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

#ifndef ADRSIG_FEATURE_MATRIX_HPP_
#define ADRSIG_FEATURE_MATRIX_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "adrsig/cohort.hpp"
#include "adrsig/readcode.hpp"

namespace adrsig {

class GroupSizeExceedsCohort : public std::runtime_error {
public:
  GroupSizeExceedsCohort(std::size_t group_size, std::size_t n_patients);
};

/// The event universe: distinct codes in byte-lexicographic order.
class EventIndex {
public:
  EventIndex() = default;
  explicit EventIndex(std::vector<ReadCode> codes);

  const std::vector<ReadCode>& codes() const { return codes_; }
  std::size_t size() const { return codes_.size(); }
  bool empty() const { return codes_.empty(); }
  const ReadCode& code(std::size_t column) const { return codes_[column]; }
  std::optional<std::uint32_t> column(const ReadCode& code) const;

private:
  std::vector<ReadCode> codes_;
  std::unordered_map<ReadCode, std::uint32_t> positions_;
};

/// N x E binary patient-by-event matrix in compressed row form.
class PatientMatrix {
public:
  PatientMatrix() : offsets_{0} {}
  explicit PatientMatrix(std::size_t n_cols) : n_cols_(n_cols), offsets_{0} {}

  /// Appends a row given its set columns; `columns` must be sorted and unique.
  void push_row(std::span<const std::uint32_t> columns);

  std::size_t rows() const { return offsets_.size() - 1; }
  std::size_t cols() const { return n_cols_; }
  std::span<const std::uint32_t> row(std::size_t i) const {
    return {cols_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  bool at(std::size_t i, std::size_t e) const;
  std::vector<std::uint64_t> column_sums() const;

private:
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> cols_;
};

struct PatientMatrices {
  PatientMatrix before;  // A
  PatientMatrix after;   // B
};

enum class RemainderPolicy { merge, drop };

/// G x E matrix of per-group patient counts.
class FeatureMatrix {
public:
  FeatureMatrix(std::vector<std::uint32_t> group_sizes, std::size_t n_events);

  std::size_t groups() const { return group_sizes_.size(); }
  std::size_t events() const { return n_events_; }
  const std::vector<std::uint32_t>& group_sizes() const { return group_sizes_; }

  std::uint32_t at(std::size_t g, std::size_t e) const { return entries_[g * n_events_ + e]; }
  std::uint32_t& at(std::size_t g, std::size_t e) { return entries_[g * n_events_ + e]; }

  std::uint64_t column_sum(std::size_t e) const;
  /// Column `e` as reals, one value per group.
  std::vector<double> column(std::size_t e) const;

  /// Sum of group sizes.
  std::size_t patients() const;

private:
  std::vector<std::uint32_t> group_sizes_;
  std::size_t n_events_;
  std::vector<std::uint32_t> entries_;
};

/// Every distinct code in any patient's before or after window, optionally
/// rolled up to level 3 first.
EventIndex build_event_index(const Cohort& cohort, bool level3);

/// Binary presence rows per patient, in cohort order. Throws
/// std::invalid_argument if a window code is missing from `index`.
PatientMatrices build_patient_matrices(const Cohort& cohort, const EventIndex& index, bool level3);

/// Sums consecutive blocks of `group_size` rows. The N mod group_size
/// leftover rows join the last block under `merge` and are discarded under
/// `drop`. Throws GroupSizeExceedsCohort, std::invalid_argument for size 0.
FeatureMatrix group(const PatientMatrix& m, std::size_t group_size,
                    RemainderPolicy policy = RemainderPolicy::merge);

/// CSV `group,code,count` of non-zero entries, sorted by (group, code);
/// groups are numbered from 1.
void dump_matrix(const FeatureMatrix& m, const EventIndex& index, std::ostream& out);

}  // namespace adrsig

#endif  // ADRSIG_FEATURE_MATRIX_HPP_
