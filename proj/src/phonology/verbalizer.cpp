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

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cctype>

#include "versekit/phonology.hpp"

namespace versekit::phonology {

namespace {

constexpr std::array<std::string_view, 20> kOnes = {
    "zero",    "one",     "two",       "three",    "four",
    "five",    "six",     "seven",     "eight",    "nine",
    "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
    "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
constexpr std::array<std::string_view, 10> kTens = {
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy",
    "eighty", "ninety"};

void below_thousand(std::uint64_t n, std::vector<std::string>& out) {
  if (n >= 100) {
    out.emplace_back(kOnes[n / 100]);
    out.emplace_back("hundred");
    n %= 100;
    if (n == 0) return;
  }
  if (n < 20) {
    out.emplace_back(kOnes[n]);
    return;
  }
  out.emplace_back(kTens[n / 10]);
  if (n % 10) out.emplace_back(kOnes[n % 10]);
}

// Leading apostrophe words that keep their apostrophe.
constexpr std::array<std::string_view, 9> kElisions = {
    "'tis", "'twas", "'neath", "'em", "'til", "'round", "'bout", "'cause",
    "'twill"};

bool is_letter(unsigned char c) { return std::isalpha(c) || c >= 0x80; }
bool is_digit(unsigned char c) { return std::isdigit(c) != 0; }

// Punctuation that only separates tokens.
bool is_separator(char c) {
  static constexpr std::string_view kSep = ".,;:!?\"()[]{}-/\\*_~`<>|^'";
  return kSep.find(c) != std::string_view::npos;
}

std::string normalize_unicode(std::string_view text) {
  // Typographic punctuation folded onto ASCII before tokenizing.
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 7>
      kFold = {{{"\xE2\x80\x99", "'"},
                {"\xE2\x80\x98", "'"},
                {"\xE2\x80\x9C", "\""},
                {"\xE2\x80\x9D", "\""},
                {"\xE2\x80\x94", " "},
                {"\xE2\x80\x93", " "},
                {"\xE2\x80\xA6", "..."}}};
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    bool folded = false;
    if (static_cast<unsigned char>(text[i]) == 0xE2) {
      for (auto [from, to] : kFold) {
        if (text.substr(i, from.size()) == from) {
          out += to;
          i += from.size();
          folded = true;
          break;
        }
      }
    }
    if (!folded) out += text[i++];
  }
  return out;
}

void digits_one_by_one(std::string_view digits,
                       std::vector<std::string>& out) {
  for (char d : digits) out.emplace_back(kOnes[d - '0']);
}

struct NumberToken {
  bool currency = false;
  std::string integer;  // digits only, commas removed
  bool had_commas = false;
  std::string fraction;  // digits after '.', may be empty
  bool has_point = false;
  bool ordinal = false;
  bool percent = false;
};

void expand_integer(const std::string& digits, bool had_commas,
                    std::vector<std::string>& out) {
  if (digits.empty()) {
    out.emplace_back("zero");
    return;
  }
  if (digits.size() > 1 && digits[0] == '0') {
    digits_one_by_one(digits, out);
    return;
  }
  if (digits.size() > 15) {
    digits_one_by_one(digits, out);
    return;
  }
  std::uint64_t n = std::stoull(digits);
  if (!had_commas && digits.size() == 4 &&
      ((n >= 1100 && n <= 1999) || (n >= 2010 && n <= 2099))) {
    auto words = year_words(n);
    out.insert(out.end(), words.begin(), words.end());
    return;
  }
  auto words = cardinal_words(n);
  out.insert(out.end(), words.begin(), words.end());
}

void expand_number(const NumberToken& t, std::vector<std::string>& out) {
  if (t.currency) {
    std::uint64_t dollars = t.integer.empty() || t.integer.size() > 15
                                ? 0
                                : std::stoull(t.integer);
    if (t.fraction.size() > 2) {
      // Sub-cent precision reads as a decimal amount of dollars.
      expand_integer(t.integer, t.had_commas, out);
      out.emplace_back("point");
      digits_one_by_one(t.fraction, out);
      out.emplace_back("dollars");
      return;
    }
    std::uint64_t cents = 0;
    if (!t.fraction.empty()) {
      cents = std::stoull(t.fraction);
      if (t.fraction.size() == 1) cents *= 10;
    }
    if (dollars > 0 || cents == 0) {
      auto words = cardinal_words(dollars);
      out.insert(out.end(), words.begin(), words.end());
      out.emplace_back(dollars == 1 ? "dollar" : "dollars");
    }
    if (cents > 0) {
      if (dollars > 0) out.emplace_back("and");
      auto words = cardinal_words(cents);
      out.insert(out.end(), words.begin(), words.end());
      out.emplace_back(cents == 1 ? "cent" : "cents");
    }
    return;
  }
  if (t.ordinal && !t.has_point && !t.integer.empty() &&
      t.integer.size() <= 15) {
    auto words = ordinal_words(std::stoull(t.integer));
    out.insert(out.end(), words.begin(), words.end());
    return;
  }
  if (t.has_point) {
    if (t.integer.empty()) {
      out.emplace_back("point");
    } else {
      std::vector<std::string> words;
      expand_integer(t.integer, true, words);
      out.insert(out.end(), words.begin(), words.end());
      out.emplace_back("point");
    }
    digits_one_by_one(t.fraction, out);
  } else {
    expand_integer(t.integer, t.had_commas, out);
  }
  if (t.percent) out.emplace_back("percent");
}

}  // namespace

std::vector<std::string> cardinal_words(std::uint64_t n) {
  std::vector<std::string> out;
  if (n == 0) {
    out.emplace_back("zero");
    return out;
  }
  static constexpr std::array<std::pair<std::uint64_t, std::string_view>, 4>
      kScales = {{{1000000000000ULL, "trillion"},
                  {1000000000ULL, "billion"},
                  {1000000ULL, "million"},
                  {1000ULL, "thousand"}}};
  for (auto [scale, name] : kScales) {
    if (n >= scale) {
      std::uint64_t head = n / scale;
      if (head >= 1000) {
        auto words = cardinal_words(head);
        out.insert(out.end(), words.begin(), words.end());
      } else {
        below_thousand(head, out);
      }
      out.emplace_back(name);
      n %= scale;
    }
  }
  if (n > 0) below_thousand(n, out);
  return out;
}

std::vector<std::string> ordinal_words(std::uint64_t n) {
  auto words = cardinal_words(n);
  std::string& last = words.back();
  static const std::unordered_map<std::string, std::string> kIrregular = {
      {"one", "first"},  {"two", "second"}, {"three", "third"},
      {"five", "fifth"}, {"eight", "eighth"}, {"nine", "ninth"},
      {"twelve", "twelfth"}};
  if (auto it = kIrregular.find(last); it != kIrregular.end()) {
    last = it->second;
  } else if (last.back() == 'y') {
    last.pop_back();
    last += "ieth";
  } else {
    last += "th";
  }
  return words;
}

std::vector<std::string> year_words(std::uint64_t n) {
  std::uint64_t hi = n / 100;
  std::uint64_t lo = n % 100;
  std::vector<std::string> out;
  below_thousand(hi, out);
  if (lo == 0) {
    out.emplace_back("hundred");
  } else if (lo < 10) {
    out.emplace_back("oh");
    below_thousand(lo, out);
  } else {
    below_thousand(lo, out);
  }
  return out;
}

Verbalizer Verbalizer::from_file(const std::filesystem::path& rules) {
  Verbalizer v;
  for (const auto& [token, expansion] : load_tsv_map(rules)) {
    v.add_rule(token, expansion);
  }
  return v;
}

void Verbalizer::add_rule(std::string_view token, std::string_view expansion) {
  std::vector<std::string> words;
  for (auto& w : str::split_ws(expansion)) words.push_back(str::to_lower(w));
  rules_[str::to_lower(token)] = std::move(words);
}

bool Verbalizer::emit_rule(std::string_view token,
                           std::vector<std::string>& out) const {
  if (rules_.empty()) return false;
  auto it = rules_.find(str::to_lower(token));
  if (it == rules_.end()) return false;
  out.insert(out.end(), it->second.begin(), it->second.end());
  return true;
}

std::vector<std::string> Verbalizer::verbalize(std::string_view text) const {
  std::vector<std::string> out;
  std::string folded = normalize_unicode(text);
  for (const auto& chunk : str::split_ws(folded)) emit_chunk(chunk, out);
  return out;
}

void Verbalizer::emit_chunk(std::string_view chunk,
                            std::vector<std::string>& out) const {
  if (emit_rule(chunk, out)) return;
  {
    std::string_view inner = chunk;
    static constexpr std::string_view kWrap = "\"'()[]{},;:!?";
    while (!inner.empty() && kWrap.find(inner.front()) != std::string_view::npos)
      inner.remove_prefix(1);
    while (!inner.empty() && kWrap.find(inner.back()) != std::string_view::npos)
      inner.remove_suffix(1);
    if (inner.size() != chunk.size() && !inner.empty() &&
        emit_rule(inner, out)) {
      return;
    }
  }

  const std::size_t n = chunk.size();
  auto at = [&](std::size_t i) -> unsigned char {
    return i < n ? static_cast<unsigned char>(chunk[i]) : 0;
  };
  std::size_t i = 0;
  while (i < n) {
    unsigned char c = at(i);
    bool starts_number = is_digit(c) || (c == '$' && (is_digit(at(i + 1)) ||
                                                      (at(i + 1) == '.' &&
                                                       is_digit(at(i + 2))))) ||
                         (c == '.' && is_digit(at(i + 1)) &&
                          (i == 0 || !is_digit(at(i - 1))));
    if (starts_number) {
      NumberToken t;
      if (c == '$') {
        t.currency = true;
        ++i;
      }
      while (i < n) {
        if (is_digit(at(i))) {
          t.integer += static_cast<char>(at(i++));
        } else if (at(i) == ',' && !t.integer.empty() && is_digit(at(i + 1)) &&
                   is_digit(at(i + 2)) && is_digit(at(i + 3)) &&
                   !is_digit(at(i + 4))) {
          t.had_commas = true;
          ++i;
        } else {
          break;
        }
      }
      if (at(i) == '.' && is_digit(at(i + 1))) {
        t.has_point = true;
        ++i;
        while (i < n && is_digit(at(i))) t.fraction += static_cast<char>(at(i++));
      }
      if (!t.currency && !t.has_point && i < n) {
        std::string suffix = str::to_lower(chunk.substr(i, 2));
        if ((suffix == "st" || suffix == "nd" || suffix == "rd" ||
             suffix == "th") &&
            !is_letter(at(i + 2))) {
          t.ordinal = true;
          i += 2;
        }
      }
      if (at(i) == '%') {
        t.percent = true;
        ++i;
      }
      expand_number(t, out);
      continue;
    }

    bool elision = false;
    if (c == '\'' && is_letter(at(i + 1)) && (i == 0 || !is_letter(at(i - 1)))) {
      std::size_t j = i + 1;
      while (j < n && is_letter(at(j))) ++j;
      std::string candidate = str::to_lower(chunk.substr(i, j - i));
      elision = std::find(kElisions.begin(), kElisions.end(), candidate) !=
                kElisions.end();
    }
    if (is_letter(c) || elision) {
      std::size_t j = i + 1;
      while (j < n) {
        unsigned char d = at(j);
        if (is_letter(d)) {
          ++j;
        } else if ((d == '\'' || d == '-') && is_letter(at(j + 1))) {
          j += 2;
        } else {
          break;
        }
      }
      std::string_view word = chunk.substr(i, j - i);
      if (!emit_rule(word, out)) out.push_back(str::to_lower(word));
      i = j;
      continue;
    }

    if (is_separator(static_cast<char>(c))) {
      std::string_view sym = chunk.substr(i, 1);
      if (c != '\'' && c != '.' && c != ',' && c != '-') emit_rule(sym, out);
      ++i;
      continue;
    }
    std::string_view sym = chunk.substr(i, 1);
    if (!emit_rule(sym, out)) {
      spdlog::debug("verbalize: dropping unknown symbol '{}'", sym);
    }
    ++i;
  }
}

}  // namespace versekit::phonology
