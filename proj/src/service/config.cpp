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

#include "versekit/config.hpp"

#include <set>

namespace versekit::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads known keys out of one JSON object and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw Error("config: '" + name_ + "' must be an object");
  }

  template <class T>
  Section& field(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return *this;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw Error("config: " + name_ + "." + key + ": " + e.what());
    }
    return *this;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw Error("config: unknown key '" + name_ + "." + k + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

fs::path resolve(const fs::path& p, const fs::path& base) {
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

}  // namespace

fs::path Artifacts::lm_poet(std::string_view poet) const {
  return root / "lm" / ("poet_" + std::string(poet) + ".bin");
}

Config Config::for_profile(std::string_view name) {
  Config c;
  c.profile = std::string(name);
  if (name == "desk") return c;
  if (name == "paper") {
    auto& g = c.generator;
    g.layers = 8;
    g.heads = 8;
    g.hidden = 128;
    g.feed_forward = 512;
    g.epochs_pretrain = 400;
    g.epochs_finetune = 50;
    g.beam_cap = 100'000'000;
    auto& e = c.encoder;
    e.vocab_size = 128'000;
    e.layers = 4;
    e.heads = 4;
    e.hidden = 1024;
    e.feed_forward = 4096;
    e.head_hidden = 500;
    c.encoder_training = dualenc::TrainConfig{};
    return c;
  }
  if (name == "smoke") {
    auto& g = c.generator;
    g.vocab_size = 200;
    g.layers = 1;
    g.heads = 2;
    g.hidden = 32;
    g.feed_forward = 64;
    g.max_len = 24;
    g.epochs_pretrain = 20;
    g.epochs_finetune = 5;
    g.max_iterations = 24;
    g.beam_cap = 2000;
    g.lr_factor = 2.0;
    g.warmup_steps = 20;
    g.finetune_lr = 2e-3;
    c.max_poets = 3;
    auto& e = c.encoder;
    e.vocab_size = 300;
    e.layers = 1;
    e.hidden = 16;
    e.feed_forward = 32;
    e.max_len = 16;
    e.head_hidden = 16;
    auto& t = c.encoder_training;
    t.pretrain_steps = 20;
    t.finetune_steps = 20;
    t.batch_size = 16;
    c.server.threads = 4;
    return c;
  }
  throw Error("unknown profile '" + std::string(name) + "' (desk, paper, smoke)");
}

Config Config::from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw Error("config: top level must be an object");
  std::string profile = j.value("profile", std::string("desk"));
  Config c = for_profile(profile);
  Section top(j, "config");
  std::string data, work;
  top.field("profile", c.profile).field("seed", c.seed).field("max_poets", c.max_poets)
      .field("augment_fraction", c.augment_fraction);
  if (const json* p = top.child("paths")) {
    Section s(*p, "paths");
    s.field("data", data).field("work", work).finish();
  }
  if (const json* p = top.child("generator")) {
    auto& g = c.generator;
    Section s(*p, "generator");
    s.field("threshold", g.threshold).field("max_iterations", g.max_iterations)
        .field("beam_cap", g.beam_cap)
        .field("min_poets_for_start_token", g.min_poets_for_start_token)
        .field("epochs_pretrain", g.epochs_pretrain).field("epochs_finetune", g.epochs_finetune)
        .field("batch_size", g.batch_size).field("dropout", g.dropout)
        .field("vocab_size", g.vocab_size).field("layers", g.layers).field("heads", g.heads)
        .field("hidden", g.hidden).field("feed_forward", g.feed_forward)
        .field("max_len", g.max_len).field("lr_factor", g.lr_factor)
        .field("warmup_steps", g.warmup_steps).field("finetune_lr", g.finetune_lr)
        .finish();
  }
  if (const json* p = top.child("encoder")) {
    auto& e = c.encoder;
    Section s(*p, "encoder");
    s.field("vocab_size", e.vocab_size).field("layers", e.layers).field("heads", e.heads)
        .field("hidden", e.hidden).field("feed_forward", e.feed_forward)
        .field("max_len", e.max_len).field("head_hidden", e.head_hidden).finish();
  }
  if (const json* p = top.child("encoder_training")) {
    auto& t = c.encoder_training;
    Section s(*p, "encoder_training");
    s.field("pretrain_steps", t.pretrain_steps).field("pretrain_lr", t.pretrain_lr)
        .field("finetune_steps", t.finetune_steps).field("finetune_lr", t.finetune_lr)
        .field("batch_size", t.batch_size).field("dropout", t.dropout)
        .field("use_parent_negative", t.use_parent_negative).finish();
  }
  if (const json* p = top.child("filters")) {
    Section s(*p, "filters");
    s.field("min_syllables", c.min_syllables).field("max_syllables", c.max_syllables)
        .finish();
  }
  if (const json* p = top.child("index")) {
    Section s(*p, "index");
    s.field("centroids", c.index.centroids).field("nprobe", c.index.nprobe)
        .field("kmeans_iterations", c.index.kmeans_iterations).finish();
  }
  if (const json* p = top.child("server")) {
    auto& v = c.server;
    Section s(*p, "server");
    s.field("host", v.host).field("port", v.port).field("threads", v.threads)
        .field("p50_budget_ms", v.p50_budget_ms).finish();
  }
  top.finish();
  if (!data.empty()) c.data_dir = resolve(data, base_dir);
  c.work_dir = resolve(work.empty() ? c.work_dir : fs::path(work), base_dir);
  c.validate();
  return c;
}

Config Config::load(const fs::path& path) {
  if (!fs::exists(path)) throw Error("config file not found: " + path.string());
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return from_json(j, fs::absolute(path).parent_path());
}

json Config::to_json() const {
  const auto& g = generator;
  const auto& e = encoder;
  const auto& t = encoder_training;
  return {
      {"profile", profile},
      {"paths", {{"data", data_dir.string()}, {"work", work_dir.string()}}},
      {"seed", seed},
      {"max_poets", max_poets},
      {"augment_fraction", augment_fraction},
      {"generator",
       {{"threshold", g.threshold}, {"max_iterations", g.max_iterations},
        {"beam_cap", g.beam_cap}, {"min_poets_for_start_token", g.min_poets_for_start_token},
        {"epochs_pretrain", g.epochs_pretrain}, {"epochs_finetune", g.epochs_finetune},
        {"batch_size", g.batch_size}, {"dropout", g.dropout}, {"vocab_size", g.vocab_size},
        {"layers", g.layers}, {"heads", g.heads}, {"hidden", g.hidden},
        {"feed_forward", g.feed_forward}, {"max_len", g.max_len},
        {"lr_factor", g.lr_factor}, {"warmup_steps", g.warmup_steps},
        {"finetune_lr", g.finetune_lr}}},
      {"encoder",
       {{"vocab_size", e.vocab_size}, {"layers", e.layers}, {"heads", e.heads},
        {"hidden", e.hidden}, {"feed_forward", e.feed_forward}, {"max_len", e.max_len},
        {"head_hidden", e.head_hidden}}},
      {"encoder_training",
       {{"pretrain_steps", t.pretrain_steps}, {"pretrain_lr", t.pretrain_lr},
        {"finetune_steps", t.finetune_steps}, {"finetune_lr", t.finetune_lr},
        {"batch_size", t.batch_size}, {"dropout", t.dropout},
        {"use_parent_negative", t.use_parent_negative}}},
      {"filters", {{"min_syllables", min_syllables}, {"max_syllables", max_syllables}}},
      {"index",
       {{"centroids", index.centroids}, {"nprobe", index.nprobe},
        {"kmeans_iterations", index.kmeans_iterations}}},
      {"server",
       {{"host", server.host}, {"port", server.port}, {"threads", server.threads},
        {"p50_budget_ms", server.p50_budget_ms}}},
  };
}

void Config::validate() const {
  generator.validate();
  encoder.validate();
  encoder_training.validate();
  if (max_poets < 0) throw Error("config: max_poets must be >= 0");
  if (augment_fraction < 0.0 || augment_fraction > 1.0) {
    throw Error("config: augment_fraction must be in [0, 1]");
  }
  if (min_syllables < 1 || min_syllables > max_syllables) {
    throw Error("config: filters need 1 <= min_syllables <= max_syllables");
  }
  if (index.centroids < 0 || index.nprobe < 0 || index.kmeans_iterations < 0) {
    throw Error("config: index values must be >= 0");
  }
  if (server.port < 0 || server.port > 65535) throw Error("config: server.port out of range");
  if (server.threads < 1) throw Error("config: server.threads must be >= 1");
  if (server.p50_budget_ms <= 0) throw Error("config: server.p50_budget_ms must be > 0");
}

}  // namespace versekit::service
