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

#include "adrsig/csv.hpp"

#include <stdexcept>

namespace adrsig::csv {

bool Reader::read_physical_line(std::string& out) {
  if (!std::getline(in_, out)) return false;
  ++physical_line_;
  if (!out.empty() && out.back() == '\r') out.pop_back();
  return true;
}

bool Reader::next(std::vector<std::string_view>& fields) {
  fields.clear();
  if (!read_physical_line(line_)) return false;
  record_line_ = physical_line_;

  if (line_.find('"') == std::string::npos) {
    std::string_view rest(line_);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return true;
  }

  // Quoted path: unescape into unquoted_, remember field end offsets.
  unquoted_.clear();
  bounds_.clear();
  bool in_quotes = false;
  std::string pending = line_;
  std::size_t i = 0;
  for (;;) {
    if (i == pending.size()) {
      if (!in_quotes) break;
      std::string more;
      if (!read_physical_line(more)) {
        throw std::runtime_error("unterminated quoted field");
      }
      unquoted_.push_back('\n');
      pending = std::move(more);
      i = 0;
      continue;
    }
    const char c = pending[i++];
    if (in_quotes) {
      if (c == '"') {
        if (i < pending.size() && pending[i] == '"') {
          unquoted_.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        unquoted_.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      bounds_.push_back(unquoted_.size());
    } else {
      unquoted_.push_back(c);
    }
  }
  bounds_.push_back(unquoted_.size());

  std::size_t start = 0;
  for (std::size_t end : bounds_) {
    fields.emplace_back(unquoted_.data() + start, end - start);
    start = end;
  }
  return true;
}

void append_field(std::string& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

std::string escape(std::string_view field) {
  std::string out;
  append_field(out, field);
  return out;
}

}  // namespace adrsig::csv
