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

#include "versekit/common.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <sstream>

namespace versekit {

static_assert(std::endian::native == std::endian::little,
              "artifact formats assume a little-endian host");

ParseError::ParseError(const std::string& source, std::size_t line,
                       const std::string& what)
    : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

TrainingError::TrainingError(std::int64_t step, const std::string& what)
    : Error("training step " + std::to_string(step) + ": " + what),
      step_(step) {}

namespace str {

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

static bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  return rtrim(s);
}

std::string_view rtrim(std::string_view s) {
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::string normalize_line(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80 || c == '\'') {
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += static_cast<char>(std::tolower(u));
    } else if (is_space(c) || c == '-') {
      pending_space = true;
    }
  }
  return out;
}

}  // namespace str

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_entries(const std::filesystem::path& path) {
  std::vector<std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    auto t = str::trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(t);
  }
  return out;
}

std::set<std::string> load_word_set(const std::filesystem::path& path) {
  std::set<std::string> out;
  for (const auto& e : read_entries(path)) out.insert(str::to_lower(e));
  return out;
}

std::map<std::string, std::string> load_tsv_map(
    const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = str::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto tab = t.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(path.string(), lineno, "expected key<TAB>value");
    }
    out[str::to_lower(str::trim(t.substr(0, tab)))] =
        std::string(str::trim(t.substr(tab + 1)));
  }
  return out;
}

void BinaryWriter::magic(std::string_view eight_bytes) {
  if (eight_bytes.size() != 8) throw Error("magic must be 8 bytes");
  out_.write(eight_bytes.data(), 8);
}
void BinaryWriter::u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
void BinaryWriter::u32(std::uint32_t v) {
  out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void BinaryWriter::u64(std::uint64_t v) {
  out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void BinaryWriter::i32(std::int32_t v) {
  out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void BinaryWriter::f32(float v) {
  out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void BinaryWriter::f64(double v) {
  out_.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void BinaryWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void BinaryWriter::f64s(const double* data, std::size_t n) {
  out_.write(reinterpret_cast<const char*>(data),
             static_cast<std::streamsize>(n * sizeof(double)));
}
void BinaryWriter::f32s(const float* data, std::size_t n) {
  out_.write(reinterpret_cast<const char*>(data),
             static_cast<std::streamsize>(n * sizeof(float)));
}

void BinaryReader::read(void* dst, std::size_t n) {
  in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) {
    throw FormatError(source_ + ": truncated file");
  }
}

void BinaryReader::expect_magic(std::string_view eight_bytes) {
  char buf[8];
  read(buf, 8);
  if (std::memcmp(buf, eight_bytes.data(), 8) != 0) {
    throw FormatError(source_ + ": bad magic, expected " +
                      std::string(eight_bytes));
  }
}
std::uint8_t BinaryReader::u8() {
  std::uint8_t v;
  read(&v, 1);
  return v;
}
std::uint32_t BinaryReader::u32() {
  std::uint32_t v;
  read(&v, sizeof v);
  return v;
}
std::uint64_t BinaryReader::u64() {
  std::uint64_t v;
  read(&v, sizeof v);
  return v;
}
std::int32_t BinaryReader::i32() {
  std::int32_t v;
  read(&v, sizeof v);
  return v;
}
float BinaryReader::f32() {
  float v;
  read(&v, sizeof v);
  return v;
}
double BinaryReader::f64() {
  double v;
  read(&v, sizeof v);
  return v;
}
std::string BinaryReader::str() {
  std::uint32_t n = u32();
  if (n > (1u << 28)) throw FormatError(source_ + ": implausible string size");
  std::string s(n, '\0');
  if (n) read(s.data(), n);
  return s;
}
void BinaryReader::f64s(double* data, std::size_t n) {
  read(data, n * sizeof(double));
}
void BinaryReader::f32s(float* data, std::size_t n) {
  read(data, n * sizeof(float));
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

}  // namespace versekit
