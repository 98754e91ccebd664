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

#include "versekit/suggest.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

namespace versekit::suggest {

using phonology::RhymeClass;

std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::kQuatrain: return "quatrain";
    case Structure::kCouplet: return "couplet";
    case Structure::kFreeVerse: return "free_verse";
  }
  return "?";
}

Structure parse_structure(std::string_view s) {
  auto l = str::to_lower(s);
  if (l == "quatrain") return Structure::kQuatrain;
  if (l == "couplet") return Structure::kCouplet;
  if (l == "free_verse" || l == "freeverse" || l == "free") return Structure::kFreeVerse;
  throw Error("unknown structure '" + std::string(s) + "'");
}

void SuggestRequest::validate() const {
  if (poets.empty()) throw Error("poets: must name at least one poet");
  if (n < 1) throw Error("n: must be >= 1");
  if (syllables && *syllables < 1) throw Error("syllables: must be >= 1");
}

Suggester::Suggester(const index::QuantizedIndex& idx,
                     const dualenc::DualEncoder& enc,
                     const phonology::Phonology& phon, int nprobe)
    : idx_(idx),
      enc_(enc),
      phon_(phon),
      nprobe_(nprobe == 0 ? idx.nprobe_default() : nprobe),
      poet_counts_(idx.poet_counts()) {
  if (idx.size() == 0) throw Error("suggester: empty index");
  if (nprobe_ < 1 || nprobe_ > idx.centroid_count()) {
    throw Error("suggester: nprobe out of range");
  }
  if (idx.dim() != enc.embedding_dim()) {
    throw Error("suggester: index and encoder dimensions differ");
  }
}

std::vector<index::Hit> Suggester::search(const index::Embedding& q,
                                          const index::FilterSpec& spec,
                                          int k) const {
  auto hits = idx_.search(q, spec, k, nprobe_);
  if (static_cast<int>(hits.size()) < k && nprobe_ < idx_.centroid_count()) {
    hits = idx_.search(q, spec, k, idx_.centroid_count());
  }
  return hits;
}

RhymeClass Suggester::rhyme_between(std::string_view a, std::string_view b) const {
  try {
    return phon_.classify(phon_.rhyme_key(a), phon_.rhyme_key(b));
  } catch (const phonology::NoRhymeKeyError&) {
    return RhymeClass::kNone;
  }
}

SuggestResponse Suggester::suggest_next(const SuggestRequest& req) const {
  req.validate();
  SuggestResponse out;
  const auto query = enc_.encode_parent(req.previous_verse);

  index::FilterSpec base;
  base.syllables = req.syllables;
  base.exclude_texts.insert(str::normalize_line(req.previous_verse));
  if (req.rhyme_with) base.exclude_texts.insert(str::normalize_line(*req.rhyme_with));
  for (const auto& e : req.exclude) base.exclude_texts.insert(str::normalize_line(e));

  std::optional<phonology::RhymeKeySet> keys;
  if (req.rhyme_with && req.structure != Structure::kFreeVerse) {
    try {
      keys = phon_.rhyme_key(*req.rhyme_with);
    } catch (const phonology::NoRhymeKeyError& e) {
      out.diagnostics.push_back(std::string("rhyme_with has no rhyme key: ") + e.what());
      out.fallback_used = true;
    }
  }

  for (const auto& poet : req.poets) {
    auto& list = out.by_poet[poet];
    index::FilterSpec spec = base;
    spec.poets = {poet};
    auto add = [&](const std::vector<index::Hit>& hits, RhymeClass cls) {
      for (const auto& h : hits) {
        if (static_cast<int>(list.size()) >= req.n) return;
        list.push_back({h.id, idx_.record(h.id).text, h.score, cls});
      }
    };

    if (keys) {
      auto with_class = [&](RhymeClass c) {
        index::FilterSpec s = spec;
        s.rhyme = index::RhymeFilter{*keys, {c}, phon_.table()};
        return search(query, s, req.n);
      };
      auto perfect = with_class(RhymeClass::kPerfect);
      auto imperfect = with_class(RhymeClass::kImperfect);
      // Alternate, perfect first; either side may run out early.
      for (std::size_t i = 0; static_cast<int>(list.size()) < req.n &&
                              (i < perfect.size() || i < imperfect.size());
           ++i) {
        if (i < perfect.size()) add({perfect[i]}, RhymeClass::kPerfect);
        if (i < imperfect.size()) add({imperfect[i]}, RhymeClass::kImperfect);
      }
      if (!list.empty()) continue;
      out.fallback_used = true;
    }
    for (const auto& h : search(query, spec, req.n)) {
      auto cls = keys ? phon_.classify(*keys, idx_.record(h.id).rhyme_keys)
                      : RhymeClass::kNone;
      add({h}, cls);
    }
  }
  return out;
}

QuatrainCompletion Suggester::complete_quatrain(const std::string& first_line,
                                                const std::string& poet) const {
  if (!has_poet(poet)) throw Error("no verses for poet '" + poet + "' in the index");
  QuatrainCompletion out;
  std::vector<std::string> poem{first_line};
  for (int step = 0; step < 3; ++step) {
    SuggestRequest req;
    req.previous_verse = poem.back();
    if (step > 0) req.rhyme_with = poem[poem.size() - 2];
    req.poets = {poet};
    req.n = 1;
    req.exclude = poem;
    auto res = suggest_next(req);
    const auto& list = res.by_poet[poet];
    if (list.empty()) {
      throw Error("poet '" + poet + "' ran out of verses after line " +
                  std::to_string(poem.size()));
    }
    if (step > 0) out.fallback[static_cast<std::size_t>(step - 1)] = res.fallback_used;
    poem.push_back(list.front().text);
    out.lines.push_back(list.front().text);
  }
  return out;
}

EvalReport Suggester::eval_report(
    const std::vector<filters::Verse>& first_lines) const {
  if (first_lines.empty()) throw Error("eval_report: no first lines");
  EvalReport r;
  r.quatrains = first_lines.size();
  std::size_t compliant = 0, compliant_with = 0, fallbacks = 0;
  std::vector<double> syllables;
  std::set<std::string> distinct;
  std::size_t suggested = 0;
  auto rhymes = [](RhymeClass c) { return c != RhymeClass::kNone; };
  for (const auto& first : first_lines) {
    const auto& line = first.text;
    const auto& poet = first.poet_id;
    QuatrainCompletion q;
    try {
      q = complete_quatrain(line, poet);
    } catch (const Error& e) {
      r.errors.push_back(poet + ": " + e.what());
      continue;
    }
    ++r.completed;
    bool ok = rhymes(rhyme_between(line, q.lines[1])) &&
              rhymes(rhyme_between(q.lines[0], q.lines[2]));
    compliant += ok ? 1 : 0;
    if (!q.fallback[0] && !q.fallback[1]) {
      ++r.with_candidates;
      compliant_with += ok ? 1 : 0;
    }
    fallbacks += (q.fallback[0] ? 1 : 0) + (q.fallback[1] ? 1 : 0);
    for (const auto& l : q.lines) {
      syllables.push_back(phon_.syllable_count(l));
      distinct.insert(l);
      ++suggested;
    }
  }
  if (r.completed > 0) {
    auto n = static_cast<double>(r.completed);
    r.abab_compliance = static_cast<double>(compliant) / n;
    r.fallback_rate = static_cast<double>(fallbacks) / (2.0 * n);
    double sum = 0.0;
    for (double s : syllables) sum += s;
    r.syllable_mean = sum / static_cast<double>(syllables.size());
    double var = 0.0;
    for (double s : syllables) var += (s - r.syllable_mean) * (s - r.syllable_mean);
    r.syllable_stddev = std::sqrt(var / static_cast<double>(syllables.size()));
    r.duplicate_rate = 1.0 - static_cast<double>(distinct.size()) /
                                 static_cast<double>(suggested);
  }
  if (r.with_candidates > 0) {
    r.abab_compliance_with_candidates =
        static_cast<double>(compliant_with) / static_cast<double>(r.with_candidates);
  }
  return r;
}

}  // namespace versekit::suggest
