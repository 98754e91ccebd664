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
#include <cmath>

#include "versekit/generator.hpp"

namespace versekit::generator {

std::set<TokenId> starting_tokens(
    std::string_view poet_id,
    const std::map<std::string, corpus::Corpus>& corpora,
    const SubwordModel& sp, const GenConfig& cfg) {
  auto own = corpora.find(std::string(poet_id));
  if (own == corpora.end()) {
    throw Error("unknown poet '" + std::string(poet_id) + "'");
  }
  auto initials = [&](const corpus::Corpus& c) {
    std::set<TokenId> out;
    for (const auto& line : c.lines()) {
      auto ids = sp.encode(line);
      if (!ids.empty()) out.insert(ids.front());
    }
    return out;
  };
  std::map<TokenId, int> poets_using;
  for (const auto& [poet, c] : corpora) {
    for (TokenId t : initials(c)) ++poets_using[t];
  }
  std::set<TokenId> out = initials(own->second);
  for (const auto& [t, n] : poets_using) {
    if (n >= cfg.min_poets_for_start_token) out.insert(t);
  }
  return out;
}

namespace {

struct Partial {
  std::vector<TokenId> tokens;
  double score = 0.0;  // cumulative log-probability
};

}  // namespace

std::set<std::vector<TokenId>> expand_tokens(const NextTokenModel& lm,
                                             const std::set<TokenId>& starts,
                                             const GenConfig& cfg) {
  cfg.validate();
  const TokenId end = lm.end_token();
  std::set<std::vector<TokenId>> done;
  std::vector<Partial> frontier;
  for (TokenId t : starts) {
    if (t != end) frontier.push_back(Partial{{t}, 0.0});
  }

  for (int iter = 0; iter < cfg.max_iterations && !frontier.empty(); ++iter) {
    std::vector<std::vector<TokenId>> prefixes;
    prefixes.reserve(frontier.size());
    for (const auto& p : frontier) prefixes.push_back(p.tokens);
    auto dists = lm.next_distributions(prefixes);

    std::vector<Partial> next;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const auto& dist = dists[i];
      double best = *std::max_element(dist.begin(), dist.end());
      if (!(best > 0.0)) continue;
      for (std::size_t t = 0; t < dist.size(); ++t) {
        if (dist[t] / best < cfg.threshold) continue;
        if (static_cast<TokenId>(t) == end) {
          done.insert(frontier[i].tokens);
          continue;
        }
        Partial ext = frontier[i];
        ext.tokens.push_back(static_cast<TokenId>(t));
        ext.score += std::log(dist[t]);
        next.push_back(std::move(ext));
      }
    }
    if (static_cast<std::int64_t>(next.size()) > cfg.beam_cap) {
      auto cap = static_cast<std::ptrdiff_t>(cfg.beam_cap);
      std::partial_sort(next.begin(), next.begin() + cap, next.end(),
                        [](const Partial& a, const Partial& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return a.tokens < b.tokens;
                        });
      next.resize(static_cast<std::size_t>(cap));
    }
    frontier = std::move(next);
  }
  return done;
}

std::set<std::string> expand(const NextTokenModel& lm, const SubwordModel& sp,
                             const std::set<TokenId>& starts,
                             const GenConfig& cfg) {
  std::set<std::string> out;
  for (const auto& tokens : expand_tokens(lm, starts, cfg)) {
    std::string text = sp.detokenize(tokens);
    if (!str::trim(text).empty()) out.insert(std::move(text));
  }
  return out;
}

}  // namespace versekit::generator
