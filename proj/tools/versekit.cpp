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

// Pipeline and server entry point. Every subcommand reads the same JSON
// config; see configs/ for the shipped profiles.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <pthread.h>

#include <csignal>
#include <iostream>
#include <thread>

#include "versekit/pipeline.hpp"
#include "versekit/service.hpp"

namespace {

using namespace versekit;
using namespace versekit::service;
using nlohmann::json;

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_stats(const Config& cfg) {
  require_artifact(artifacts(cfg).index(), "build-index");
  auto idx = index::QuantizedIndex::load(artifacts(cfg).index());
  std::size_t smallest = idx.size(), largest = 0, empty = 0;
  for (const auto& p : idx.postings()) {
    smallest = std::min(smallest, p.size());
    largest = std::max(largest, p.size());
    empty += p.empty() ? 1 : 0;
  }
  json poets = json::object();
  for (const auto& [p, n] : idx.poet_counts()) poets[p] = n;
  print({{"records", idx.size()},
         {"dim", idx.dim()},
         {"centroids", idx.centroid_count()},
         {"nprobe_default", idx.nprobe_default()},
         {"list_size", {{"min", smallest}, {"max", largest}, {"empty", empty}}},
         {"poets", poets}});
  return 0;
}

int cmd_audit(const Config& cfg, const std::string& words) {
  require_artifact(artifacts(cfg).index(), "build-index");
  auto idx = index::QuantizedIndex::load(artifacts(cfg).index());
  auto verbalizer = phonology::Verbalizer::from_file(data_files(cfg).verbalization_rules());
  std::set<std::string> group;
  for (const auto& w : str::split_ws(words)) group.insert(str::to_lower(w));
  if (group.empty()) throw Error("audit: --words names no words");
  auto res = idx.audit(group, verbalizer);
  json samples = json::array();
  for (auto id : res.samples) {
    const auto& r = idx.record(id);
    samples.push_back({{"id", id}, {"poet", r.poet_id}, {"text", r.text}});
  }
  print({{"words", group}, {"count", res.count}, {"samples", samples}});
  return 0;
}

int cmd_serve(const Config& cfg, const std::string& host, int port) {
  Engine engine(cfg);
  PoemStore store(artifacts(cfg).poems_db());
  Api api(engine.suggester(), store);
  // Signals are taken synchronously by one thread; every other thread,
  // including the server's workers, inherits the blocked mask.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  Server server(api, cfg.server.threads);
  int bound = server.bind(host, port);
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&set, &sig);
    spdlog::info("signal {}: shutting down", sig);
    server.stop();
  });
  spdlog::info("serving {} records on http://{}:{}", engine.index().size(), host, bound);
  try {
    server.listen();
  } catch (...) {
    pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
    throw;
  }
  watcher.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"versekit: verse generation, retrieval and suggestion pipeline"};
  app.require_subcommand(1);
  std::string config_path;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "JSON config file (see configs/)")->required();
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  auto* train_lm_cmd = app.add_subcommand("train-lm", "Train the tokenizer, base LM and poet LMs");
  auto* gen = app.add_subcommand("generate", "Expand every poet LM into generated.tsv");
  auto* filter_cmd = app.add_subcommand("filter", "Filter generated verses into kept.tsv");
  auto* train_enc = app.add_subcommand("train-encoder", "Train the dual encoder");
  auto* build = app.add_subcommand("build-index", "Embed kept verses and build the index");
  auto* stats = app.add_subcommand("stats", "Print index statistics and per-poet counts");

  auto* audit = app.add_subcommand("audit", "Count indexed verses containing a word group");
  std::string words;
  audit->add_option("--words", words, "Space-separated word group")->required();

  auto* eval = app.add_subcommand("eval", "Complete quatrains from first lines and report");
  std::string first_lines;
  eval->add_option("--first-lines", first_lines, "poet<TAB>line file (default: bundled)");

  auto* sug = app.add_subcommand("suggest", "Suggest next verses");
  std::string prev, rhyme, poets, structure = "quatrain";
  int n = 3, syllables = 0;
  sug->add_option("--prev", prev, "Previous verse")->required();
  sug->add_option("--rhyme", rhyme, "Verse to rhyme with");
  sug->add_option("--poets", poets, "Comma-separated poet ids")->required();
  sug->add_option("--n", n, "Suggestions per poet");
  sug->add_option("--structure", structure, "quatrain | couplet | free_verse");
  sug->add_option("--syllables", syllables, "Required syllable count (0 = any)");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string host;
  int port = -1;
  serve->add_option("--host", host, "Bind address (default from config)");
  serve->add_option("--port", port, "Port (default from config, 0 = any)");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);

  try {
    auto cfg = Config::load(config_path);
    if (train_lm_cmd->parsed()) {
      auto s = train_lm(cfg);
      print({{"lines", s.lines}, {"poets", s.poets}, {"final_pretrain_loss", s.final_pretrain_loss}});
    } else if (gen->parsed()) {
      print({{"generated", generate(cfg)}, {"file", artifacts(cfg).generated().string()}});
    } else if (filter_cmd->parsed()) {
      auto res = filter(cfg);
      print(report_json(res.report));
    } else if (train_enc->parsed()) {
      auto s = train_encoder(cfg);
      print({{"comment_pairs", s.comment_pairs}, {"poetic_pairs", s.poetic_pairs},
             {"final_loss", s.final_loss}});
    } else if (build->parsed()) {
      auto idx = build_index(cfg);
      print({{"records", idx.size()}, {"centroids", idx.centroid_count()},
             {"file", artifacts(cfg).index().string()}});
    } else if (stats->parsed()) {
      return cmd_stats(cfg);
    } else if (audit->parsed()) {
      return cmd_audit(cfg, words);
    } else if (eval->parsed()) {
      Engine engine(cfg);
      auto path = first_lines.empty() ? data_files(cfg).first_lines()
                                      : std::filesystem::path(first_lines);
      print(report_json(engine.suggester().eval_report(read_first_lines(path))));
    } else if (sug->parsed()) {
      Engine engine(cfg);
      suggest::SuggestRequest req;
      req.previous_verse = prev;
      if (!rhyme.empty()) req.rhyme_with = rhyme;
      for (const auto& p : str::split(poets, ',')) {
        auto t = std::string(str::trim(p));
        if (!t.empty()) req.poets.insert(t);
      }
      req.n = n;
      req.structure = suggest::parse_structure(structure);
      if (syllables > 0) req.syllables = syllables;
      for (const auto& p : req.poets) {
        if (!engine.suggester().has_poet(p)) throw Error("unknown poet '" + p + "'");
      }
      print(to_json(engine.suggester().suggest_next(req)));
    } else if (serve->parsed()) {
      return cmd_serve(cfg, host.empty() ? cfg.server.host : host,
                       port < 0 ? cfg.server.port : port);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
