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

// Unigram tokenizer trained by hard EM: seed with frequent substrings, then
// alternate Viterbi segmentation and pruning of the least used pieces.

#include <algorithm>
#include <array>
#include <cmath>

#include "versekit/generator.hpp"

namespace versekit::generator {

namespace {

constexpr char kMagic[] = "VKSUBW01";
constexpr double kEscapeCost = -40.0;  // per unseen byte, three tokens

// Words keep their single leading space, so " tide" and "tide" differ.
std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    std::size_t j = i + 1;
    while (j < line.size() && line[j] != ' ') ++j;
    out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

struct Lattice {
  std::vector<double> best;
  std::vector<int> back_len;      // piece length ending here, 0 = escape
  std::vector<TokenId> back_id;
};

}  // namespace

std::optional<TokenId> SubwordModel::find(std::string_view piece) const {
  auto it = lookup_.find(std::string(piece));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

void SubwordModel::rebuild_lookup() {
  lookup_.clear();
  max_piece_bytes_ = 1;
  for (std::size_t i = kReserved; i < pieces_.size(); ++i) {
    lookup_.emplace(pieces_[i], static_cast<TokenId>(i));
    max_piece_bytes_ = std::max(max_piece_bytes_, pieces_[i].size());
  }
}

std::vector<TokenId> SubwordModel::encode(std::string_view text) const {
  const std::size_t n = text.size();
  Lattice lat{std::vector<double>(n + 1, -1e300), std::vector<int>(n + 1, 0),
              std::vector<TokenId>(n + 1, -1)};
  lat.best[0] = 0.0;
  for (std::size_t end = 1; end <= n; ++end) {
    std::size_t max_len = std::min(max_piece_bytes_, end);
    for (std::size_t len = 1; len <= max_len; ++len) {
      std::size_t start = end - len;
      if (lat.best[start] <= -1e299) continue;
      auto it = lookup_.find(std::string(text.substr(start, len)));
      if (it == lookup_.end()) continue;
      double s = lat.best[start] + scores_[static_cast<std::size_t>(it->second)];
      // Strict comparison; ties go to the shorter piece found first.
      if (s > lat.best[end]) {
        lat.best[end] = s;
        lat.back_len[end] = static_cast<int>(len);
        lat.back_id[end] = it->second;
      }
    }
    if (lat.back_id[end] < 0 && lat.best[end - 1] > -1e299) {
      lat.best[end] = lat.best[end - 1] + kEscapeCost;
      lat.back_len[end] = 0;
    }
  }
  std::vector<TokenId> rev;
  std::size_t at = n;
  while (at > 0) {
    if (lat.back_len[at] == 0) {
      auto byte = static_cast<unsigned char>(text[at - 1]);
      rev.push_back(kFirstNibble + (byte & 0x0F));
      rev.push_back(kFirstNibble + (byte >> 4));
      rev.push_back(kEscape);
      at -= 1;
    } else {
      rev.push_back(lat.back_id[at]);
      at -= static_cast<std::size_t>(lat.back_len[at]);
    }
  }
  return {rev.rbegin(), rev.rend()};
}

std::vector<TokenId> SubwordModel::tokenize(std::string_view text) const {
  std::vector<TokenId> out{kStart};
  auto body = encode(text);
  out.insert(out.end(), body.begin(), body.end());
  out.push_back(kEnd);
  return out;
}

std::string SubwordModel::detokenize(const std::vector<TokenId>& ids) const {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    TokenId id = ids[i];
    if (id == kEscape) {
      if (i + 2 >= ids.size()) {
        throw Error("detokenize: truncated byte escape");
      }
      int hi = ids[i + 1] - kFirstNibble, lo = ids[i + 2] - kFirstNibble;
      if (hi < 0 || hi > 15 || lo < 0 || lo > 15) {
        throw Error("detokenize: malformed byte escape");
      }
      out += static_cast<char>((hi << 4) | lo);
      i += 2;
    } else if (id >= kReserved && id < size()) {
      out += pieces_[static_cast<std::size_t>(id)];
    } else if (id < 0 || id >= size()) {
      throw Error("detokenize: token id out of range");
    }
  }
  return out;
}

void SubwordModel::write(BinaryWriter& w) const {
  w.magic(kMagic);
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(pieces_.size()));
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    w.str(pieces_[i]);
    w.f64(scores_[i]);
  }
}

SubwordModel SubwordModel::read(BinaryReader& r) {
  r.expect_magic(kMagic);
  if (r.u32() != 1) throw FormatError("unsupported tokenizer version");
  SubwordModel m;
  auto n = r.u32();
  if (n < static_cast<std::uint32_t>(kReserved)) {
    throw FormatError("tokenizer too small");
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    m.pieces_.push_back(r.str());
    m.scores_.push_back(r.f64());
  }
  m.rebuild_lookup();
  return m;
}

void SubwordModel::save(const std::filesystem::path& path) const {
  auto out = open_for_write(path);
  BinaryWriter w(out);
  write(w);
}

SubwordModel SubwordModel::load(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  BinaryReader r(in, path.string());
  return read(r);
}

SubwordModel train_tokenizer(const std::vector<std::string>& lines,
                             int vocab_size, int max_piece_bytes) {
  if (vocab_size < 64) throw TrainingError(0, "vocab_size must be at least 64");
  if (lines.empty()) throw TrainingError(0, "tokenizer corpus is empty");

  std::map<std::string, std::int64_t> word_freq;
  std::array<std::int64_t, 256> byte_freq{};
  for (const auto& line : lines) {
    for (auto& w : split_words(line)) ++word_freq[w];
    for (char c : line) ++byte_freq[static_cast<unsigned char>(c)];
  }

  SubwordModel m;
  m.pieces_.assign(SubwordModel::kReserved, "");
  m.pieces_[0] = "<s>";
  m.pieces_[1] = "</s>";
  m.pieces_[2] = "<byte>";
  m.scores_.assign(SubwordModel::kReserved, 0.0);
  std::vector<std::string> bytes;
  for (int b = 0; b < 256; ++b) {
    if (byte_freq[static_cast<std::size_t>(b)] > 0) {
      bytes.emplace_back(1, static_cast<char>(b));
    }
  }

  std::map<std::string, std::int64_t> cand;
  for (const auto& [w, f] : word_freq) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t len = 2;
           len <= static_cast<std::size_t>(max_piece_bytes) && i + len <= w.size();
           ++len) {
        cand[w.substr(i, len)] += f;
      }
    }
  }
  std::vector<std::pair<std::string, std::int64_t>> seeds;
  for (auto& [s, f] : cand) {
    if (f >= 2) seeds.emplace_back(s, f);
  }
  const int base = SubwordModel::kReserved + static_cast<int>(bytes.size());
  const int budget = base + static_cast<int>(seeds.size());
  if (vocab_size < base) {
    throw TrainingError(0, "vocab_size " + std::to_string(vocab_size) +
                               " is smaller than the base alphabet (" +
                               std::to_string(base) + ")");
  }
  if (vocab_size > budget) {
    throw TrainingError(0, "vocab_size " + std::to_string(vocab_size) +
                               " exceeds the candidate piece budget (" +
                               std::to_string(budget) + ")");
  }
  const std::size_t target = static_cast<std::size_t>(vocab_size - base);

  // Seed ranking favours frequent long pieces.
  auto by_seed_value = [](const auto& a, const auto& b) {
    double va = static_cast<double>(a.second) * static_cast<double>(a.first.size());
    double vb = static_cast<double>(b.second) * static_cast<double>(b.first.size());
    if (va != vb) return va > vb;
    return a.first < b.first;
  };
  std::sort(seeds.begin(), seeds.end(), by_seed_value);
  seeds.resize(std::min(seeds.size(), std::max<std::size_t>(target * 4, target)));

  std::vector<std::string> learned;
  std::vector<double> learned_score;
  for (const auto& [s, f] : seeds) {
    learned.push_back(s);
    learned_score.push_back(static_cast<double>(f));
  }

  auto install = [&](const std::vector<std::string>& pieces,
                     const std::vector<double>& counts,
                     const std::vector<double>& byte_counts) {
    m.pieces_.resize(SubwordModel::kReserved);
    m.scores_.resize(SubwordModel::kReserved);
    double total = 0.0;
    for (double c : counts) total += c;
    for (double c : byte_counts) total += c;
    total = std::max(total, 1.0);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      m.pieces_.push_back(bytes[i]);
      m.scores_.push_back(std::log((byte_counts[i] + 0.5) / total));
    }
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      m.pieces_.push_back(pieces[i]);
      m.scores_.push_back(std::log((counts[i] + 0.5) / total));
    }
    m.rebuild_lookup();
  };

  std::vector<double> byte_counts(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    byte_counts[i] =
        static_cast<double>(byte_freq[static_cast<unsigned char>(bytes[i][0])]);
  }
  install(learned, learned_score, byte_counts);

  for (int round = 0; round < 32; ++round) {
    // E step (hard): usage counts under the current Viterbi segmentation.
    std::vector<double> usage(m.pieces_.size(), 0.0);
    for (const auto& [w, f] : word_freq) {
      for (TokenId id : m.encode(w)) usage[static_cast<std::size_t>(id)] += static_cast<double>(f);
    }
    const std::size_t first_learned = SubwordModel::kReserved + bytes.size();
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = first_learned; i < m.pieces_.size(); ++i) {
      ranked.emplace_back(usage[i], i);
    }
    std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return m.pieces_[a.second] < m.pieces_[b.second];
    });
    std::size_t keep = ranked.size();
    if (keep > target) keep = std::max(target, (keep * 3) / 4);
    std::vector<std::string> next;
    std::vector<double> next_counts;
    for (std::size_t i = 0; i < keep; ++i) {
      next.push_back(m.pieces_[ranked[i].second]);
      next_counts.push_back(ranked[i].first);
    }
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      byte_counts[i] = usage[SubwordModel::kReserved + i];
    }
    bool done = keep == target && ranked.size() == target;
    install(next, next_counts, byte_counts);
    if (done && round > 0) break;
  }
  return m;
}

SubwordModel train_tokenizer(const corpus::Corpus& c, int vocab_size) {
  return train_tokenizer(c.lines(), vocab_size);
}

}  // namespace versekit::generator
