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
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "versekit/generator.hpp"

namespace versekit::testing {

using generator::TokenId;

/// Prefix-hashed random distributions with many near-ties, so thresholds
/// around 0.9 branch often.
class ToyLm : public generator::NextTokenModel {
 public:
  ToyLm(int vocab, TokenId end, std::uint64_t seed)
      : vocab_(vocab), end_(end), seed_(seed) {}

  int vocab_size() const override { return vocab_; }
  TokenId end_token() const override { return end_; }

  std::vector<double> dist(const std::vector<TokenId>& prefix) const {
    std::uint64_t h = seed_ * 0x9E3779B97F4A7C15ULL + 17;
    for (TokenId t : prefix) h = (h ^ static_cast<std::uint64_t>(t + 1)) * 0x100000001B3ULL;
    std::mt19937_64 rng(h);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(static_cast<std::size_t>(vocab_));
    double total = 0.0;
    for (auto& x : w) {
      double r = u(rng);
      x = r < 0.3 ? 1.0 : r < 0.6 ? 0.85 + 0.15 * u(rng) : 0.8 * u(rng);
      total += x;
    }
    for (auto& x : w) x /= total;
    return w;
  }

  std::vector<std::vector<double>> next_distributions(
      const std::vector<std::vector<TokenId>>& prefixes) const override {
    std::vector<std::vector<double>> out;
    for (const auto& p : prefixes) out.push_back(dist(p));
    return out;
  }

 private:
  int vocab_;
  TokenId end_;
  std::uint64_t seed_;
};

/// Fixed table: prefix length -> distribution; independent of content.
class TableLm : public generator::NextTokenModel {
 public:
  TableLm(std::vector<std::vector<double>> by_len, TokenId end)
      : by_len_(std::move(by_len)), end_(end) {}
  int vocab_size() const override {
    return static_cast<int>(by_len_.front().size());
  }
  TokenId end_token() const override { return end_; }
  std::vector<std::vector<double>> next_distributions(
      const std::vector<std::vector<TokenId>>& prefixes) const override {
    std::vector<std::vector<double>> out;
    for (const auto& p : prefixes) {
      out.push_back(by_len_[std::min(p.size(), by_len_.size()) - 1]);
    }
    return out;
  }

 private:
  std::vector<std::vector<double>> by_len_;
  TokenId end_;
};

/// Brute-force tree enumeration of every threshold-satisfying path.
inline std::set<std::vector<TokenId>> enumerate_paths(
    const generator::NextTokenModel& lm, const std::set<TokenId>& starts,
    double threshold, int max_iterations) {
  std::set<std::vector<TokenId>> out;
  std::function<void(std::vector<TokenId>&, int)> dfs =
      [&](std::vector<TokenId>& prefix, int depth) {
        if (depth == max_iterations) return;
        auto d = lm.next_distributions({prefix}).front();
        double mx = 0.0;
        for (double p : d) mx = std::max(mx, p);
        for (std::size_t t = 0; t < d.size(); ++t) {
          if (d[t] / mx < threshold) continue;
          if (static_cast<TokenId>(t) == lm.end_token()) {
            out.insert(prefix);
          } else {
            prefix.push_back(static_cast<TokenId>(t));
            dfs(prefix, depth + 1);
            prefix.pop_back();
          }
        }
      };
  for (TokenId s : starts) {
    if (s == lm.end_token()) continue;
    std::vector<TokenId> p{s};
    dfs(p, 0);
  }
  return out;
}

}  // namespace versekit::testing
