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

#include "adrsig/readcode.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "adrsig/csv.hpp"

namespace adrsig {

namespace {

bool is_hierarchy_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.';
}

bool is_suffix_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

MalformedDictionaryRow::MalformedDictionaryRow(std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("dictionary line {}: {}", line, what)), line_(line) {}

DuplicateCode::DuplicateCode(std::size_t line, const std::string& code)
    : std::runtime_error(fmt::format("dictionary line {}: duplicate code '{}'", line, code)),
      line_(line) {}

std::string ReadCode::validate(std::string_view text) {
  if (text.size() != kLength) {
    return fmt::format("expected {} characters, got {}", kLength, text.size());
  }
  if (text[0] == '.') return "leading '.'";
  bool seen_dot = false;
  for (std::size_t i = 0; i < kHierarchyLength; ++i) {
    const char c = text[i];
    if (!is_hierarchy_char(c)) return fmt::format("invalid character at position {}", i + 1);
    if (c == '.') {
      seen_dot = true;
    } else if (seen_dot) {
      return fmt::format("'{}' after '.' padding at position {}", c, i + 1);
    }
  }
  for (std::size_t i = kHierarchyLength; i < kLength; ++i) {
    if (!is_suffix_char(text[i])) return fmt::format("invalid term suffix at position {}", i + 1);
  }
  return {};
}

ReadCode ReadCode::parse(std::string_view raw) {
  const std::string_view text = trim(raw);
  if (auto err = validate(text); !err.empty()) {
    throw MalformedCode(fmt::format("malformed readcode '{}': {}", raw, err));
  }
  ReadCode code;
  std::copy(text.begin(), text.end(), code.chars_.begin());
  return code;
}

int ReadCode::level() const {
  return static_cast<int>(std::count_if(chars_.begin(), chars_.begin() + kHierarchyLength,
                                        [](char c) { return c != '.'; }));
}

ReadCode ReadCode::rollup3() const {
  ReadCode out = *this;
  out.chars_[3] = '.';
  out.chars_[4] = '.';
  out.chars_[5] = '0';
  out.chars_[6] = '0';
  return out;
}

std::uint64_t ReadCode::packed() const {
  std::uint64_t v = 0;
  for (char c : chars_) v = (v << 8) | static_cast<unsigned char>(c);
  return v;
}

Dictionary Dictionary::load(std::istream& in) {
  Dictionary dict;
  csv::Reader reader(in);
  std::vector<std::string_view> fields;
  bool header = true;
  try {
    while (reader.next(fields)) {
      if (header) {
        header = false;
        if (fields.size() != 2 || fields[0] != "readcode" || fields[1] != "term") {
          throw MalformedDictionaryRow(reader.line(), "expected header 'readcode,term'");
        }
        continue;
      }
      if (fields.size() != 2) {
        throw MalformedDictionaryRow(reader.line(),
                                     fmt::format("expected 2 fields, got {}", fields.size()));
      }
      ReadCode code = [&] {
        try {
          return ReadCode::parse(fields[0]);
        } catch (const MalformedCode& e) {
          throw MalformedDictionaryRow(reader.line(), e.what());
        }
      }();
      auto [it, inserted] = dict.terms_.emplace(code.str(), std::string(fields[1]));
      if (!inserted) throw DuplicateCode(reader.line(), code.str());
    }
  } catch (const MalformedDictionaryRow&) {
    throw;
  } catch (const DuplicateCode&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw MalformedDictionaryRow(reader.line(), e.what());
  }
  return dict;
}

const std::string& Dictionary::term(std::string_view code) const {
  static const std::string unknown(kUnknownTerm);
  auto it = terms_.find(std::string(code));
  return it == terms_.end() ? unknown : it->second;
}

bool Dictionary::contains(std::string_view code) const {
  return terms_.find(std::string(code)) != terms_.end();
}

}  // namespace adrsig
