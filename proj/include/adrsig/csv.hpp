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

#ifndef ADRSIG_CSV_HPP_
#define ADRSIG_CSV_HPP_

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace adrsig::csv {

/// Minimal RFC 4180 reader: `"` quoting with `""` doubling, quoted fields
/// may span lines. A trailing CR is dropped from each physical line.
class Reader {
public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record. Returned views stay valid until the next call.
  /// Returns false at end of input. Throws std::runtime_error on an
  /// unterminated quote.
  bool next(std::vector<std::string_view>& fields);

  /// 1-based physical line on which the last record started.
  std::size_t line() const { return record_line_; }

private:
  bool read_physical_line(std::string& out);

  std::istream& in_;
  std::string line_;
  std::string unquoted_;
  std::vector<std::size_t> bounds_;
  std::size_t physical_line_ = 0;
  std::size_t record_line_ = 0;
};

/// Appends `field` to `out`, quoting it if it contains a comma, quote, CR or LF.
void append_field(std::string& out, std::string_view field);

std::string escape(std::string_view field);

}  // namespace adrsig::csv

#endif  // ADRSIG_CSV_HPP_
