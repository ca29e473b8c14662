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

#ifndef ADRSIG_READCODE_HPP_
#define ADRSIG_READCODE_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>

namespace adrsig {

class MalformedCode : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class MalformedDictionaryRow : public std::runtime_error {
public:
  MalformedDictionaryRow(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

class DuplicateCode : public std::runtime_error {
public:
  DuplicateCode(std::size_t line, const std::string& code);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// A 7-character hierarchical clinical code. Positions 1-5 carry the
/// hierarchy, right-padded with '.', positions 6-7 are the term suffix.
/// Ordering is byte-lexicographic on the text, and comparison is
/// case-sensitive.
class ReadCode {
public:
  static constexpr std::size_t kLength = 7;
  static constexpr std::size_t kHierarchyLength = 5;

  /// Trims surrounding whitespace and validates. Throws MalformedCode.
  static ReadCode parse(std::string_view raw);

  /// Returns a description of the first violated invariant, or an empty
  /// string if `text` is a valid code. Does not trim.
  static std::string validate(std::string_view text);

  std::string_view text() const { return {chars_.data(), chars_.size()}; }
  std::string str() const { return std::string(text()); }

  /// Number of non-'.' characters in the hierarchy part, 1..5.
  int level() const;

  /// Truncates the hierarchy to three characters and resets the term
  /// suffix to "00". Idempotent.
  ReadCode rollup3() const;

  char chapter() const { return chars_[0]; }

  /// Packs the seven bytes big-endian so integer order equals text order.
  std::uint64_t packed() const;

  friend auto operator<=>(const ReadCode&, const ReadCode&) = default;
  friend bool operator==(const ReadCode&, const ReadCode&) = default;

private:
  ReadCode() = default;
  std::array<char, kLength> chars_{};
};

inline int level(const ReadCode& code) { return code.level(); }
inline ReadCode rollup3(const ReadCode& code) { return code.rollup3(); }
inline char chapter(const ReadCode& code) { return code.chapter(); }

/// Code text to human-readable term. Immutable once loaded.
class Dictionary {
public:
  static constexpr std::string_view kUnknownTerm = "<unknown>";

  Dictionary() = default;

  /// Reads the `readcode,term` CSV format. Throws MalformedDictionaryRow or
  /// DuplicateCode; line numbers are 1-based and include the header.
  static Dictionary load(std::istream& in);

  /// Term for `code`, or "<unknown>".
  const std::string& term(std::string_view code) const;
  const std::string& term(const ReadCode& code) const { return term(code.text()); }

  bool contains(std::string_view code) const;
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

private:
  std::unordered_map<std::string, std::string> terms_;
};

}  // namespace adrsig

template <>
struct std::hash<adrsig::ReadCode> {
  std::size_t operator()(const adrsig::ReadCode& code) const noexcept {
    return std::hash<std::uint64_t>{}(code.packed());
  }
};

#endif  // ADRSIG_READCODE_HPP_
