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

#include "versekit/filters.hpp"

#include <algorithm>
#include <cctype>

namespace versekit::filters {

namespace {

constexpr std::array<std::string_view, 12> kTagNames{
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET",
    "ADP",  "CONJ", "NUM", "PRT", "PUNCT", "X"};

constexpr std::array<std::string_view, kFilterCount> kFilterNames{
    "balance", "syllables", "blocklist", "originality", "pos", "combo"};

bool ends_with(std::string_view w, std::string_view suffix, std::size_t min_stem) {
  return w.size() >= suffix.size() + min_stem && w.ends_with(suffix);
}

bool is_number_word(std::string_view w) {
  static const std::set<std::string, std::less<>> kWords = [] {
    std::set<std::string, std::less<>> s;
    for (std::uint64_t n : {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15,
                            16, 17, 18, 19, 20, 30, 40, 50, 60, 70, 80, 90, 100,
                            1000, 1000000, 1000000000}) {
      for (auto& word : phonology::cardinal_words(n)) s.insert(word);
      for (auto& word : phonology::ordinal_words(n)) s.insert(word);
    }
    s.insert("point");
    return s;
  }();
  return kWords.count(w) > 0;
}

}  // namespace

std::string_view to_string(PosTag t) {
  return kTagNames[static_cast<std::size_t>(t)];
}

PosTag parse_pos_tag(std::string_view s) {
  std::string up;
  for (char c : s) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (kTagNames[i] == up) return static_cast<PosTag>(i);
  }
  throw Error("unknown part-of-speech tag '" + std::string(s) + "'");
}

std::string_view to_string(FilterKind k) {
  return kFilterNames[static_cast<std::size_t>(k)];
}

PosTagger PosTagger::from_file(const std::filesystem::path& lexicon,
                               phonology::Verbalizer verbalizer) {
  PosTagger t(std::move(verbalizer));
  for (const auto& [word, tag] : load_tsv_map(lexicon)) {
    try {
      t.add(word, parse_pos_tag(str::trim(tag)));
    } catch (const Error& e) {
      throw ParseError(lexicon.string(), 0, e.what());
    }
  }
  return t;
}

void PosTagger::add(std::string_view word, PosTag tag) {
  lexicon_[str::to_lower(word)] = tag;
}

PosTag PosTagger::tag_word(std::string_view raw) const {
  std::string w = str::to_lower(raw);
  if (w.empty()) return PosTag::kX;
  if (auto it = lexicon_.find(w); it != lexicon_.end()) return it->second;
  if (std::all_of(w.begin(), w.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      })) {
    return PosTag::kNum;
  }
  if (is_number_word(w)) return PosTag::kNum;
  if (!std::any_of(w.begin(), w.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || (c & 0x80);
      })) {
    return PosTag::kPunct;
  }
  if (ends_with(w, "'s", 1) || ends_with(w, "s'", 1)) return PosTag::kNoun;
  if (ends_with(w, "ing", 2) || ends_with(w, "ed", 2)) return PosTag::kVerb;
  if (ends_with(w, "ly", 2)) return PosTag::kAdv;
  for (std::string_view s : {"ness", "tion", "sion", "ment", "ity", "ship",
                             "hood", "ism", "dom"}) {
    if (ends_with(w, s, 2)) return PosTag::kNoun;
  }
  for (std::string_view s : {"ous", "ful", "less", "able", "ible", "ive", "ic",
                             "al", "ish", "est"}) {
    if (ends_with(w, s, 2)) return PosTag::kAdj;
  }
  // Inflected forms of known words: "-s"/"-es" keep the stem's tag.
  for (std::string_view s : {"es", "s"}) {
    if (ends_with(w, s, 2)) {
      auto it = lexicon_.find(w.substr(0, w.size() - s.size()));
      if (it != lexicon_.end() &&
          (it->second == PosTag::kVerb || it->second == PosTag::kNoun)) {
        return it->second;
      }
    }
  }
  return PosTag::kNoun;
}

std::vector<PosTag> PosTagger::tag(std::string_view line) const {
  std::vector<PosTag> out;
  for (const auto& token : verbalizer_.verbalize(line)) {
    out.push_back(tag_word(token));
  }
  return out;
}

std::string fingerprint(const std::vector<PosTag>& tags) {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out += '-';
    out += to_string(tags[i]);
  }
  return out;
}

FingerprintSet build_fingerprints(const corpus::Corpus& c,
                                  const PosTagger& tagger) {
  FingerprintSet out;
  for (const auto& poem : c.poems) {
    for (const auto& stanza : poem.stanzas) {
      for (const auto& line : stanza) out.insert(fingerprint(tagger.tag(line)));
    }
  }
  return out;
}

void FilterConfig::validate() const {
  if (min_syllables < 0 || min_syllables > max_syllables) {
    throw Error("filter config: need 0 <= min_syllables <= max_syllables");
  }
  for (const auto& group : combo_blocklist) {
    if (group.empty()) throw Error("filter config: empty combo group");
  }
}

void FilterConfig::load_lists(const std::filesystem::path& blocklist_file,
                              const std::filesystem::path& combo_file) {
  blocklist = load_word_set(blocklist_file);
  combo_blocklist.clear();
  for (const auto& entry : read_entries(combo_file)) {
    std::set<std::string> group;
    for (auto& w : str::split_ws(entry)) group.insert(str::to_lower(w));
    if (!group.empty()) combo_blocklist.push_back(std::move(group));
  }
}

std::map<std::string, std::set<std::string>> build_originality_index(
    const corpus::Corpus& c) {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& poem : c.poems) {
    auto& lines = out[poem.poet_id];
    for (const auto& stanza : poem.stanzas) {
      for (const auto& line : stanza) lines.insert(str::normalize_line(line));
    }
  }
  return out;
}

std::size_t RejectionReport::rejected() const {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

void RejectionReport::merge(const RejectionReport& other) {
  input += other.input;
  kept += other.kept;
  for (std::size_t i = 0; i < kFilterCount; ++i) {
    counts[i] += other.counts[i];
    for (const auto& v : other.samples[i]) {
      if (samples[i].size() < kSampleCap) samples[i].push_back(v);
    }
  }
}

bool balanced(std::string_view text) {
  int depth = 0;
  int straight_quotes = 0;
  int open_curly = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) return false;
    if (c == '"') ++straight_quotes;
    if (text.substr(i, 3) == "\xE2\x80\x9C") ++open_curly;   // left quote
    if (text.substr(i, 3) == "\xE2\x80\x9D" && --open_curly < 0) return false;
  }
  return depth == 0 && straight_quotes % 2 == 0 && open_curly == 0;
}

std::optional<FilterKind> first_failure(const Verse& v, const FilterConfig& cfg,
                                        const FingerprintSet& fps,
                                        const PosTagger& tagger,
                                        const phonology::Phonology& phon) {
  if (!balanced(v.text)) return FilterKind::kBalance;

  int syl = phon.syllable_count(v.text);
  if (syl < cfg.min_syllables || syl > cfg.max_syllables) {
    return FilterKind::kSyllables;
  }
  auto tokens = phon.verbalize(v.text);
  for (const auto& t : tokens) {
    if (cfg.blocklist.count(t)) return FilterKind::kBlocklist;
  }
  if (auto it = cfg.originality_index.find(v.poet_id);
      it != cfg.originality_index.end() &&
      it->second.count(str::normalize_line(v.text))) {
    return FilterKind::kOriginality;
  }
  if (!fps.count(fingerprint(tagger.tag(v.text)))) return FilterKind::kPos;

  std::set<std::string> token_set(tokens.begin(), tokens.end());
  for (const auto& group : cfg.combo_blocklist) {
    if (std::includes(token_set.begin(), token_set.end(), group.begin(),
                      group.end())) {
      return FilterKind::kCombo;
    }
  }
  return std::nullopt;
}

FilterResult apply_filters(const std::vector<Verse>& verses,
                           const FilterConfig& cfg, const FingerprintSet& fps,
                           const PosTagger& tagger,
                           const phonology::Phonology& phon) {
  cfg.validate();
  FilterResult out;
  out.report.input = verses.size();
  for (const auto& v : verses) {
    auto fail = first_failure(v, cfg, fps, tagger, phon);
    if (!fail) {
      out.kept.push_back(v);
      continue;
    }
    auto i = static_cast<std::size_t>(*fail);
    ++out.report.counts[i];
    if (out.report.samples[i].size() < RejectionReport::kSampleCap) {
      out.report.samples[i].push_back(v);
    }
  }
  out.report.kept = out.kept.size();
  return out;
}

}  // namespace versekit::filters
