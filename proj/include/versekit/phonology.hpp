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

// Text to sound: verbalization of numerals and symbols, dictionary and
// letter-to-sound pronunciation, syllable counts, rhyme keys and rhyme
// classification.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "versekit/common.hpp"

namespace versekit::phonology {

/// One ARPAbet phoneme. Vowels carry a stress level in {0,1,2}.
class Phone {
 public:
  static constexpr int kNumBases = 39;
  static constexpr int kNumVowels = 15;  // bases [0, kNumVowels) are vowels

  constexpr Phone() = default;

  /// "AY1", "T", "ah0". Vowels without a digit get stress 0.
  static std::optional<Phone> parse(std::string_view symbol);
  static Phone make(int base, int stress);

  int base() const { return code_ >> 2; }
  bool is_vowel() const { return base() < kNumVowels; }
  /// -1 for consonants.
  int stress() const { return is_vowel() ? (code_ & 3) : -1; }
  std::uint8_t code() const { return code_; }
  std::string str() const;
  std::string_view base_name() const;

  friend auto operator<=>(Phone, Phone) = default;

 private:
  explicit constexpr Phone(std::uint8_t code) : code_(code) {}
  std::uint8_t code_ = 0;
};

using PhonemeSeq = std::vector<Phone>;

std::string to_string(const PhonemeSeq& seq);
/// Space-separated symbols; throws Error on an unknown symbol.
PhonemeSeq parse_phonemes(std::string_view text);
int vowel_count(const PhonemeSeq& seq);

/// Expands numerals, currency, ordinals and listed symbols to words and
/// splits the rest into lowercase word tokens.
class Verbalizer {
 public:
  Verbalizer() = default;
  /// Rules file: `token<TAB>expansion`, matched case-insensitively.
  static Verbalizer from_file(const std::filesystem::path& rules);

  void add_rule(std::string_view token, std::string_view expansion);
  std::vector<std::string> verbalize(std::string_view text) const;

 private:
  void emit_chunk(std::string_view chunk, std::vector<std::string>& out) const;
  bool emit_rule(std::string_view token, std::vector<std::string>& out) const;

  std::unordered_map<std::string, std::vector<std::string>> rules_;
};

/// Number grammar used by the verbalizer, exposed for tests.
std::vector<std::string> cardinal_words(std::uint64_t n);
std::vector<std::string> ordinal_words(std::uint64_t n);
std::vector<std::string> year_words(std::uint64_t n);

/// CMU-dict-compatible pronunciation dictionary.
class PronunciationDict {
 public:
  /// Accepts `WORD  PH1 PH2 ...`, variant markers `WORD(2)`, trailing
  /// `# comments` and either letter case for the headword.
  static PronunciationDict load(const std::filesystem::path& path);

  void add(std::string_view word, PhonemeSeq pron);
  /// Variants in file order; nullptr when absent. `word` must be lowercase.
  const std::vector<PhonemeSeq>* find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  const std::unordered_map<std::string, std::vector<PhonemeSeq>>& entries()
      const {
    return entries_;
  }

 private:
  std::unordered_map<std::string, std::vector<PhonemeSeq>> entries_;
};

/// Rule-based letter-to-sound conversion for out-of-dictionary words. Always
/// yields at least one vowel, with primary stress on exactly one of them.
PhonemeSeq letter_to_sound(std::string_view word);

enum class RhymeClass { kNone, kImperfect, kPerfect };

std::string_view to_string(RhymeClass c);
/// "perfect" | "imperfect" | "none"; throws Error otherwise.
RhymeClass parse_rhyme_class(std::string_view s);

/// Phonemes from the rhyming vowel of the final word to its end.
struct RhymeKey {
  PhonemeSeq key_phonemes;
  std::string final_word;

  friend auto operator<=>(const RhymeKey&, const RhymeKey&) = default;
};

/// Sorted, duplicate-free. One entry per pronunciation variant.
using RhymeKeySet = std::vector<RhymeKey>;

/// Index of the rhyming vowel: last primary stress, else last secondary,
/// else last vowel. nullopt when there is no vowel.
std::optional<std::size_t> rhyme_vowel_index(const PhonemeSeq& pron);

class NoRhymeKeyError : public Error {
 public:
  using Error::Error;
};

/// Symmetric, reflexive consonant similarity used for imperfect rhymes.
class ConsonantSimilarityTable {
 public:
  ConsonantSimilarityTable() = default;
  /// Voicing and place pairs: S-Z T-D K-G F-V P-B M-N N-NG CH-JH SH-ZH TH-DH.
  static ConsonantSimilarityTable default_table();
  /// One `A B` pair per line.
  static ConsonantSimilarityTable load(const std::filesystem::path& path);

  void add(Phone a, Phone b);
  bool similar(Phone a, Phone b) const;

 private:
  std::array<std::uint64_t, Phone::kNumBases> rows_{};
};

RhymeKeySet make_rhyme_keys(std::string_view final_word,
                            const std::vector<PhonemeSeq>& prons);

/// Perfect when some key pair has identical phonemes; Imperfect when some
/// pair shares the rhyming vowel and codas align under `table`; identical
/// final words never rhyme; either set empty gives None.
RhymeClass classify_rhyme(const RhymeKeySet& a, const RhymeKeySet& b,
                          const ConsonantSimilarityTable& table);

/// Dictionary, letter-to-sound fallback, verbalizer and similarity table
/// bundled together. Immutable after construction; safe to share.
class Phonology {
 public:
  Phonology(PronunciationDict dict, Verbalizer verbalizer,
            ConsonantSimilarityTable table);

  /// Loads cmudict.dict, verbalization_rules.tsv and
  /// consonant_similarity.txt from `phonology_dir`.
  static Phonology load(const std::filesystem::path& phonology_dir);

  std::vector<std::string> verbalize(std::string_view text) const {
    return verbalizer_.verbalize(text);
  }
  /// Every dictionary variant, or one letter-to-sound result. Never empty.
  std::vector<PhonemeSeq> phonemize(std::string_view word) const;
  int syllable_count(std::string_view line) const;
  /// Throws NoRhymeKeyError when the line verbalizes to nothing.
  RhymeKeySet rhyme_key(std::string_view line) const;
  RhymeClass classify(const RhymeKeySet& a, const RhymeKeySet& b) const {
    return classify_rhyme(a, b, table_);
  }

  const PronunciationDict& dict() const { return dict_; }
  const ConsonantSimilarityTable& table() const { return table_; }

 private:
  PhonemeSeq primary_pronunciation(std::string_view word) const;

  PronunciationDict dict_;
  Verbalizer verbalizer_;
  ConsonantSimilarityTable table_;
};

}  // namespace versekit::phonology
