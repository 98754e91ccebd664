// Copyright 2026 The versekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace versekit {

/// Base class for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class TrainingError : public Error {
 public:
  TrainingError(std::int64_t step, const std::string& what);
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

/// Reading a serialized artifact failed (bad magic, version or truncation).
class FormatError : public Error {
 public:
  using Error::Error;
};

namespace str {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::string_view rtrim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with(std::string_view s, std::string_view prefix);

/// Lowercase, drop punctuation, collapse whitespace. Used wherever two lines
/// must compare equal modulo trivial re-punctuation.
std::string normalize_line(std::string_view s);

}  // namespace str

/// Reads a whole file; throws Error naming the path when it is unreadable.
std::string read_file(const std::filesystem::path& path);

/// Reads a one-entry-per-line config file, skipping blanks and `#` comments.
std::vector<std::string> read_entries(const std::filesystem::path& path);

std::set<std::string> load_word_set(const std::filesystem::path& path);

/// `key<TAB>value` file into a map. Keys are lowercased.
std::map<std::string, std::string> load_tsv_map(
    const std::filesystem::path& path);

/// Little-endian binary writer/reader for the versioned artifact formats.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void magic(std::string_view eight_bytes);
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v);
  void f32(float v);
  void f64(double v);
  void str(std::string_view s);
  void f64s(const double* data, std::size_t n);
  void f32s(const float* data, std::size_t n);

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string source)
      : in_(in), source_(std::move(source)) {}

  void expect_magic(std::string_view eight_bytes);
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32();
  float f32();
  double f64();
  std::string str();
  void f64s(double* data, std::size_t n);
  void f32s(float* data, std::size_t n);

 private:
  void read(void* dst, std::size_t n);

  std::istream& in_;
  std::string source_;
};

std::ofstream open_for_write(const std::filesystem::path& path);
std::ifstream open_for_read(const std::filesystem::path& path);

}  // namespace versekit
