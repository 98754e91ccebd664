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

#include <algorithm>
#include <cctype>
#include <sstream>

#include "versekit/phonology.hpp"

namespace versekit::phonology {

namespace {

// Vowels first; Phone::is_vowel relies on this order.
constexpr std::array<std::string_view, Phone::kNumBases> kBaseNames = {
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH",
    "IY", "OW", "OY", "UH", "UW", "B",  "CH", "D",  "DH", "F",
    "G",  "HH", "JH", "K",  "L",  "M",  "N",  "NG", "P",  "R",
    "S",  "SH", "T",  "TH", "V",  "W",  "Y",  "Z",  "ZH"};

int find_base(std::string_view name) {
  for (int i = 0; i < Phone::kNumBases; ++i) {
    if (kBaseNames[i] == name) return i;
  }
  return -1;
}

}  // namespace

std::optional<Phone> Phone::parse(std::string_view symbol) {
  std::string up;
  for (char c : symbol) {
    up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  int stress = -1;
  if (!up.empty() && up.back() >= '0' && up.back() <= '2') {
    stress = up.back() - '0';
    up.pop_back();
  }
  int base = find_base(up);
  if (base < 0) return std::nullopt;
  if (base < kNumVowels) return make(base, stress < 0 ? 0 : stress);
  if (stress >= 0) return std::nullopt;
  return make(base, 3);
}

Phone Phone::make(int base, int stress) {
  if (base < 0 || base >= kNumBases) throw Error("phone base out of range");
  if (base < kNumVowels) {
    if (stress < 0 || stress > 2) throw Error("vowel stress must be 0..2");
  } else {
    stress = 3;
  }
  return Phone(static_cast<std::uint8_t>(base * 4 + stress));
}

std::string_view Phone::base_name() const { return kBaseNames[base()]; }

std::string Phone::str() const {
  std::string s(base_name());
  if (is_vowel()) s += static_cast<char>('0' + stress());
  return s;
}

std::string to_string(const PhonemeSeq& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ' ';
    out += seq[i].str();
  }
  return out;
}

PhonemeSeq parse_phonemes(std::string_view text) {
  PhonemeSeq out;
  for (const auto& tok : str::split_ws(text)) {
    auto p = Phone::parse(tok);
    if (!p) throw Error("unknown phoneme '" + tok + "'");
    out.push_back(*p);
  }
  return out;
}

int vowel_count(const PhonemeSeq& seq) {
  return static_cast<int>(
      std::count_if(seq.begin(), seq.end(), [](Phone p) { return p.is_vowel(); }));
}

PronunciationDict PronunciationDict::load(const std::filesystem::path& path) {
  PronunciationDict dict;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (auto hash = body.find(" #"); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = str::trim(body);
    if (body.empty() || str::starts_with(body, ";;;") || body.front() == '#') {
      continue;
    }
    auto fields = str::split_ws(body);
    if (fields.size() < 2) {
      throw ParseError(path.string(), lineno, "entry has no phonemes");
    }
    std::string word = str::to_lower(fields[0]);
    if (auto paren = word.find('('); paren != std::string::npos && paren > 0 &&
                                     word.back() == ')') {
      word.resize(paren);
    }
    PhonemeSeq pron;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto p = Phone::parse(fields[i]);
      if (!p) {
        throw ParseError(path.string(), lineno,
                         "unknown phoneme '" + fields[i] + "'");
      }
      pron.push_back(*p);
    }
    dict.add(word, std::move(pron));
  }
  return dict;
}

void PronunciationDict::add(std::string_view word, PhonemeSeq pron) {
  auto& variants = entries_[std::string(word)];
  if (std::find(variants.begin(), variants.end(), pron) == variants.end()) {
    variants.push_back(std::move(pron));
  }
}

const std::vector<PhonemeSeq>* PronunciationDict::find(
    std::string_view word) const {
  auto it = entries_.find(str::to_lower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

ConsonantSimilarityTable ConsonantSimilarityTable::default_table() {
  ConsonantSimilarityTable t;
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 10>
      kPairs = {{{"S", "Z"},
                 {"T", "D"},
                 {"K", "G"},
                 {"F", "V"},
                 {"P", "B"},
                 {"M", "N"},
                 {"N", "NG"},
                 {"CH", "JH"},
                 {"SH", "ZH"},
                 {"TH", "DH"}}};
  for (auto [a, b] : kPairs) t.add(*Phone::parse(a), *Phone::parse(b));
  return t;
}

ConsonantSimilarityTable ConsonantSimilarityTable::load(
    const std::filesystem::path& path) {
  ConsonantSimilarityTable t;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = str::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = str::split_ws(body);
    if (fields.size() != 2) {
      throw ParseError(path.string(), lineno, "expected two consonants");
    }
    auto a = Phone::parse(fields[0]);
    auto b = Phone::parse(fields[1]);
    if (!a || !b || a->is_vowel() || b->is_vowel()) {
      throw ParseError(path.string(), lineno, "not a consonant pair");
    }
    t.add(*a, *b);
  }
  return t;
}

void ConsonantSimilarityTable::add(Phone a, Phone b) {
  rows_[a.base()] |= std::uint64_t{1} << b.base();
  rows_[b.base()] |= std::uint64_t{1} << a.base();
}

bool ConsonantSimilarityTable::similar(Phone a, Phone b) const {
  if (a.base() == b.base()) return true;
  return (rows_[a.base()] >> b.base()) & 1;
}

}  // namespace versekit::phonology
