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

#include "versekit/phonology.hpp"

namespace versekit::phonology {

std::string_view to_string(RhymeClass c) {
  switch (c) {
    case RhymeClass::kPerfect: return "perfect";
    case RhymeClass::kImperfect: return "imperfect";
    case RhymeClass::kNone: return "none";
  }
  return "none";
}

RhymeClass parse_rhyme_class(std::string_view s) {
  std::string l = str::to_lower(s);
  if (l == "perfect") return RhymeClass::kPerfect;
  if (l == "imperfect") return RhymeClass::kImperfect;
  if (l == "none") return RhymeClass::kNone;
  throw Error("unknown rhyme class '" + std::string(s) + "'");
}

std::optional<std::size_t> rhyme_vowel_index(const PhonemeSeq& pron) {
  std::optional<std::size_t> primary, secondary, any;
  for (std::size_t i = 0; i < pron.size(); ++i) {
    if (!pron[i].is_vowel()) continue;
    any = i;
    if (pron[i].stress() == 1) primary = i;
    if (pron[i].stress() == 2) secondary = i;
  }
  if (primary) return primary;
  if (secondary) return secondary;
  return any;
}

RhymeKeySet make_rhyme_keys(std::string_view final_word,
                            const std::vector<PhonemeSeq>& prons) {
  RhymeKeySet keys;
  std::string word = str::to_lower(final_word);
  for (const auto& pron : prons) {
    auto at = rhyme_vowel_index(pron);
    if (!at) continue;
    keys.push_back(RhymeKey{
        PhonemeSeq(pron.begin() + static_cast<std::ptrdiff_t>(*at), pron.end()),
        word});
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

namespace {

PhonemeSeq coda_consonants(const PhonemeSeq& key) {
  PhonemeSeq out;
  for (std::size_t i = 1; i < key.size(); ++i) {
    if (!key[i].is_vowel()) out.push_back(key[i]);
  }
  return out;
}

// Codas are aligned from the end. When lengths differ the shorter, which
// must be non-empty, has to match the tail of the longer.
bool codas_align(const PhonemeSeq& a, const PhonemeSeq& b,
                 const ConsonantSimilarityTable& table) {
  const PhonemeSeq& shorter = a.size() <= b.size() ? a : b;
  const PhonemeSeq& longer = a.size() <= b.size() ? b : a;
  if (shorter.size() != longer.size() && shorter.empty()) return false;
  std::size_t offset = longer.size() - shorter.size();
  for (std::size_t i = 0; i < shorter.size(); ++i) {
    if (!table.similar(shorter[i], longer[offset + i])) return false;
  }
  return true;
}

}  // namespace

RhymeClass classify_rhyme(const RhymeKeySet& a, const RhymeKeySet& b,
                          const ConsonantSimilarityTable& table) {
  bool imperfect = false;
  for (const auto& ka : a) {
    for (const auto& kb : b) {
      if (ka.final_word == kb.final_word) continue;
      if (ka.key_phonemes.empty() || kb.key_phonemes.empty()) continue;
      if (ka.key_phonemes == kb.key_phonemes) return RhymeClass::kPerfect;
      if (imperfect) continue;
      if (ka.key_phonemes.front().base() != kb.key_phonemes.front().base()) {
        continue;
      }
      imperfect = codas_align(coda_consonants(ka.key_phonemes),
                              coda_consonants(kb.key_phonemes), table);
    }
  }
  return imperfect ? RhymeClass::kImperfect : RhymeClass::kNone;
}

Phonology::Phonology(PronunciationDict dict, Verbalizer verbalizer,
                     ConsonantSimilarityTable table)
    : dict_(std::move(dict)),
      verbalizer_(std::move(verbalizer)),
      table_(std::move(table)) {}

Phonology Phonology::load(const std::filesystem::path& phonology_dir) {
  return Phonology(
      PronunciationDict::load(phonology_dir / "cmudict.dict"),
      Verbalizer::from_file(phonology_dir / "verbalization_rules.tsv"),
      ConsonantSimilarityTable::load(phonology_dir / "consonant_similarity.txt"));
}

std::vector<PhonemeSeq> Phonology::phonemize(std::string_view word) const {
  std::string w = str::to_lower(word);
  if (w.empty()) throw Error("phonemize: empty word");
  if (const auto* variants = dict_.find(w)) return *variants;

  if (w.find('-') != std::string::npos) {
    PhonemeSeq joined;
    for (const auto& part : str::split(w, '-')) {
      if (part.empty()) continue;
      auto p = primary_pronunciation(part);
      joined.insert(joined.end(), p.begin(), p.end());
    }
    if (vowel_count(joined) > 0) return {joined};
  }
  if (w.size() > 2 && w.ends_with("'s")) {
    if (const auto* stem = dict_.find(w.substr(0, w.size() - 2))) {
      PhonemeSeq p = stem->front();
      std::string_view last = p.back().base_name();
      if (last == "S" || last == "Z" || last == "SH" || last == "ZH" ||
          last == "CH" || last == "JH") {
        p.push_back(*Phone::parse("IH0"));
        p.push_back(*Phone::parse("Z"));
      } else if (last == "P" || last == "T" || last == "K" || last == "F" ||
                 last == "TH") {
        p.push_back(*Phone::parse("S"));
      } else {
        p.push_back(*Phone::parse("Z"));
      }
      return {p};
    }
  }
  return {letter_to_sound(w)};
}

PhonemeSeq Phonology::primary_pronunciation(std::string_view word) const {
  return phonemize(word).front();
}

int Phonology::syllable_count(std::string_view line) const {
  int total = 0;
  for (const auto& token : verbalize(line)) {
    total += vowel_count(primary_pronunciation(token));
  }
  return total;
}

RhymeKeySet Phonology::rhyme_key(std::string_view line) const {
  auto tokens = verbalize(line);
  if (tokens.empty()) {
    throw NoRhymeKeyError("no pronounceable word in '" + std::string(line) +
                          "'");
  }
  const std::string& last = tokens.back();
  return make_rhyme_keys(last, phonemize(last));
}

}  // namespace versekit::phonology
