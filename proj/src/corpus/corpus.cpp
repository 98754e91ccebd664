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

#include "versekit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

namespace versekit::corpus {

std::string_view to_string(SourceTag tag) {
  return tag == SourceTag::kPoetic ? "poetic" : "comments";
}

SourceTag parse_source_tag(std::string_view s) {
  if (s == "poetic") return SourceTag::kPoetic;
  if (s == "comments") return SourceTag::kComments;
  throw Error("source tag must be 'poetic' or 'comments', got '" +
              std::string(s) + "'");
}

std::size_t Corpus::line_count() const {
  std::size_t n = 0;
  for (const auto& p : poems) {
    for (const auto& s : p.stanzas) n += s.size();
  }
  return n;
}

std::vector<std::string> Corpus::lines() const {
  std::vector<std::string> out;
  out.reserve(line_count());
  for (const auto& p : poems) {
    for (const auto& s : p.stanzas) out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

std::set<std::string> Corpus::poet_ids() const {
  std::set<std::string> out;
  for (const auto& p : poems) out.insert(p.poet_id);
  return out;
}

Corpus Corpus::for_poet(std::string_view poet_id) const {
  Corpus out;
  out.source_tag = source_tag;
  for (const auto& p : poems) {
    if (p.poet_id == poet_id) out.poems.push_back(p);
  }
  return out;
}

void Corpus::merge(const Corpus& other) {
  if (!other.poems.empty() && !poems.empty() &&
      other.source_tag != source_tag) {
    throw Error("cannot merge corpora with different source tags");
  }
  if (poems.empty()) source_tag = other.source_tag;
  poems.insert(poems.end(), other.poems.begin(), other.poems.end());
}

namespace {

// "#key: value" -> (key, value). nullopt when there is no colon.
std::optional<std::pair<std::string, std::string>> parse_header(
    std::string_view line) {
  std::string_view body = line.substr(1);
  auto colon = body.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  return std::make_pair(str::to_lower(str::trim(body.substr(0, colon))),
                        std::string(str::trim(body.substr(colon + 1))));
}

}  // namespace

Corpus parse_corpus(std::string_view text, SourceTag tag,
                    const std::string& source_name) {
  Corpus corpus;
  corpus.source_tag = tag;
  if (str::trim(text).empty()) {
    throw EmptyCorpusError(source_name + ": empty corpus");
  }

  Poem* poem = nullptr;
  std::size_t poem_line = 0;
  bool stanza_open = false;
  auto finish_poem = [&]() {
    if (poem && poem->stanzas.empty()) {
      throw ParseError(source_name, poem_line, "poem has no verses");
    }
  };

  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = str::rtrim(raw);
    if (lineno == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (str::trim(line).empty()) {
      stanza_open = false;
      continue;
    }
    if (line.front() == '#') {
      auto header = parse_header(line);
      std::string_view key_raw = str::trim(line.substr(1));
      bool looks_like_poet = str::starts_with(str::to_lower(key_raw), "poet");
      bool looks_like_title = str::starts_with(str::to_lower(key_raw), "title");
      if ((looks_like_poet || looks_like_title) && !header) {
        throw ParseError(source_name, lineno, "malformed header '" +
                                                  std::string(line) + "'");
      }
      if (header && header->first == "poet") {
        if (header->second.empty()) {
          throw ParseError(source_name, lineno, "empty poet id");
        }
        finish_poem();
        corpus.poems.push_back(Poem{header->second, {}, std::nullopt});
        poem = &corpus.poems.back();
        poem_line = lineno;
        stanza_open = false;
      } else if (header && header->first == "title") {
        if (!poem) {
          throw ParseError(source_name, lineno, "#title before #poet header");
        }
        poem->title = header->second;
      }
      continue;
    }
    if (!poem) {
      throw ParseError(source_name, lineno, "missing '#poet:' header");
    }
    if (!stanza_open) {
      poem->stanzas.emplace_back();
      stanza_open = true;
    }
    poem->stanzas.back().emplace_back(line);
  }
  finish_poem();
  if (corpus.poems.empty()) {
    throw EmptyCorpusError(source_name + ": no poems");
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, SourceTag tag) {
  return parse_corpus(read_file(path), tag, path.string());
}

Corpus load_corpus_dir(const std::filesystem::path& dir, SourceTag tag) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  Corpus out;
  out.source_tag = tag;
  for (const auto& f : files) out.merge(load_corpus(f, tag));
  if (out.poems.empty()) throw EmptyCorpusError(dir.string() + ": no corpus files");
  return out;
}

std::vector<VersePair> extract_pairs(const Corpus& c) {
  std::vector<VersePair> out;
  for (const auto& poem : c.poems) {
    for (const auto& stanza : poem.stanzas) {
      for (std::size_t i = 1; i < stanza.size(); ++i) {
        out.push_back(VersePair{stanza[i - 1], stanza[i], c.source_tag});
      }
    }
  }
  return out;
}

bool detect_demographic_mention(std::string_view text,
                                const std::set<std::string>& lexicon,
                                const phonology::Verbalizer& verbalizer) {
  for (const auto& token : verbalizer.verbalize(text)) {
    if (lexicon.count(token)) return true;
  }
  return false;
}

std::string substitute_antonyms(
    std::string_view text, const std::map<std::string, std::string>& antonyms) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  auto is_word = [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalpha(u) || u >= 0x80 || c == '\'';
  };
  while (i < text.size()) {
    if (!is_word(text[i])) {
      out += text[i++];
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word(text[j])) ++j;
    std::string_view word = text.substr(i, j - i);
    auto it = antonyms.find(str::to_lower(word));
    if (it == antonyms.end()) {
      out += word;
    } else {
      std::string repl = it->second;
      if (!repl.empty() && std::isupper(static_cast<unsigned char>(word[0]))) {
        repl[0] = static_cast<char>(
            std::toupper(static_cast<unsigned char>(repl[0])));
      }
      out += repl;
    }
    i = j;
  }
  return out;
}

std::vector<VersePair> augment_positivize(
    const std::vector<VersePair>& pairs,
    const std::map<std::string, std::string>& sentiment_lexicon,
    const std::set<std::string>& demo_lexicon, double fraction,
    std::uint64_t seed, const phonology::Verbalizer& verbalizer) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw Error("augment fraction must be in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<VersePair> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    // One draw per pair keeps the selection aligned with pair positions.
    double draw = unit(rng);
    bool selected = detect_demographic_mention(pair.parent, demo_lexicon,
                                               verbalizer) ||
                    draw < fraction;
    VersePair copy = pair;
    if (selected) copy.child = substitute_antonyms(pair.child, sentiment_lexicon);
    out.push_back(std::move(copy));
  }
  return out;
}

}  // namespace versekit::corpus
