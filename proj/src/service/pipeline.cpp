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

#include "versekit/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

namespace versekit::service {

namespace fs = std::filesystem;
using nlohmann::json;

MissingArtifactError::MissingArtifactError(const fs::path& path, std::string_view stage)
    : Error("missing " + path.string() + "; run `versekit " + std::string(stage) +
            "` first") {}

void require_artifact(const fs::path& path, std::string_view stage) {
  if (!fs::exists(path)) throw MissingArtifactError(path, stage);
}

void write_verses(const fs::path& path, const std::vector<filters::Verse>& verses) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto out = open_for_write(path);
  for (const auto& v : verses) {
    if (v.poet_id.find('\t') != std::string::npos ||
        v.text.find_first_of("\t\n") != std::string::npos) {
      throw Error("write_verses: tab or newline inside a field");
    }
    out << v.poet_id << '\t' << v.text << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<filters::Verse> read_verses(const fs::path& path) {
  return read_first_lines(path);
}

std::vector<filters::Verse> read_first_lines(const fs::path& path) {
  std::vector<filters::Verse> out;
  auto text = read_file(path);
  std::size_t lineno = 0;
  for (const auto& raw : str::split(text, '\n')) {
    ++lineno;
    auto line = str::rtrim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw ParseError(path.string(), lineno, "expected poet_id<TAB>verse");
    }
    out.push_back({std::string(line.substr(0, tab)), std::string(line.substr(tab + 1))});
  }
  return out;
}

json report_json(const filters::RejectionReport& r) {
  json counts = json::object(), samples = json::object();
  for (std::size_t i = 0; i < filters::kFilterCount; ++i) {
    auto name = std::string(to_string(static_cast<filters::FilterKind>(i)));
    counts[name] = r.counts[i];
    json s = json::array();
    for (const auto& v : r.samples[i]) s.push_back({{"poet", v.poet_id}, {"text", v.text}});
    samples[name] = s;
  }
  return {{"input", r.input}, {"kept", r.kept}, {"rejected", r.rejected()},
          {"counts", counts}, {"samples", samples}};
}

json report_json(const suggest::EvalReport& r) {
  return {{"quatrains", r.quatrains},
          {"completed", r.completed},
          {"abab_compliance", r.abab_compliance},
          {"abab_compliance_with_candidates", r.abab_compliance_with_candidates},
          {"with_candidates", r.with_candidates},
          {"syllable_mean", r.syllable_mean},
          {"syllable_stddev", r.syllable_stddev},
          {"fallback_rate", r.fallback_rate},
          {"duplicate_rate", r.duplicate_rate},
          {"errors", r.errors}};
}

namespace {

corpus::Corpus load_poetic(const Config& cfg) {
  return corpus::load_corpus_dir(data_files(cfg).poetic(), corpus::SourceTag::kPoetic);
}

std::vector<std::string> selected_poets(const Config& cfg, const corpus::Corpus& poetic) {
  auto ids = poetic.poet_ids();
  std::vector<std::string> out(ids.begin(), ids.end());
  if (cfg.max_poets > 0 && out.size() > static_cast<std::size_t>(cfg.max_poets)) {
    out.resize(static_cast<std::size_t>(cfg.max_poets));
  }
  return out;
}

phonology::Verbalizer load_verbalizer(const Config& cfg) {
  return phonology::Verbalizer::from_file(data_files(cfg).verbalization_rules());
}

filters::PosTagger load_tagger(const Config& cfg) {
  return filters::PosTagger::from_file(data_files(cfg).pos_lexicon(), load_verbalizer(cfg));
}

}  // namespace

LmSummary train_lm(const Config& cfg) {
  cfg.validate();
  const auto art = artifacts(cfg);
  auto poetic = load_poetic(cfg);
  LmSummary s;
  s.lines = poetic.line_count();
  s.poets = selected_poets(cfg, poetic);

  spdlog::info("train-lm: tokenizer over {} lines, vocab {}", s.lines,
               cfg.generator.vocab_size);
  auto sp = generator::train_tokenizer(poetic, cfg.generator.vocab_size);
  fs::create_directories(art.lm_tokenizer().parent_path());
  sp.save(art.lm_tokenizer());

  generator::TrainingStats stats;
  auto base = generator::pretrain(generator::encode_lines(sp, poetic.lines()), cfg.generator,
                                  cfg.seed, &stats);
  if (!stats.epoch_losses.empty()) s.final_pretrain_loss = stats.epoch_losses.back();
  spdlog::info("train-lm: pretrained {} epochs, loss {:.4f}", stats.epoch_losses.size(),
               s.final_pretrain_loss);
  base.save(art.lm_base());

  for (std::size_t i = 0; i < s.poets.size(); ++i) {
    const auto& poet = s.poets[i];
    auto lines = generator::encode_lines(sp, poetic.for_poet(poet).lines());
    generator::TrainingStats ps;
    auto lm = generator::finetune(base, lines, cfg.generator, cfg.seed + 1 + i, &ps);
    lm.save(art.lm_poet(poet));
    spdlog::info("train-lm: fine-tuned {} ({} lines, loss {:.4f})", poet, lines.size(),
                 ps.epoch_losses.empty() ? 0.0 : ps.epoch_losses.back());
  }
  return s;
}

std::size_t generate(const Config& cfg) {
  cfg.validate();
  const auto art = artifacts(cfg);
  require_artifact(art.lm_tokenizer(), "train-lm");
  auto sp = generator::SubwordModel::load(art.lm_tokenizer());
  auto poetic = load_poetic(cfg);
  std::map<std::string, corpus::Corpus> by_poet;
  for (const auto& p : poetic.poet_ids()) by_poet.emplace(p, poetic.for_poet(p));

  std::vector<filters::Verse> out;
  for (const auto& poet : selected_poets(cfg, poetic)) {
    require_artifact(art.lm_poet(poet), "train-lm");
    auto lm = generator::LanguageModel::load(art.lm_poet(poet));
    auto starts = generator::starting_tokens(poet, by_poet, sp, cfg.generator);
    auto verses = generator::expand(lm, sp, starts, cfg.generator);
    std::size_t kept = 0;
    for (const auto& v : verses) {
      // Field separators cannot survive the TSV format.
      if (v.find_first_of("\t\n") != std::string::npos || str::trim(v).empty()) continue;
      out.push_back({poet, v});
      ++kept;
    }
    spdlog::info("generate: {} -> {} verses from {} starting tokens", poet, kept,
                 starts.size());
  }
  write_verses(art.generated(), out);
  return out.size();
}

filters::FilterResult filter(const Config& cfg) {
  cfg.validate();
  const auto art = artifacts(cfg);
  const auto data = data_files(cfg);
  require_artifact(art.generated(), "generate");
  auto verses = read_verses(art.generated());
  auto poetic = load_poetic(cfg);
  auto tagger = load_tagger(cfg);
  auto phon = phonology::Phonology::load(data.phonology());

  filters::FilterConfig fc;
  fc.min_syllables = cfg.min_syllables;
  fc.max_syllables = cfg.max_syllables;
  fc.load_lists(data.blocklist(), data.combo_blocklist());
  fc.originality_index = filters::build_originality_index(poetic);
  auto fps = filters::build_fingerprints(poetic, tagger);

  auto res = filters::apply_filters(verses, fc, fps, tagger, phon);
  write_verses(art.kept(), res.kept);
  auto out = open_for_write(art.filter_report());
  out << report_json(res.report).dump(2) << '\n';
  return res;
}

EncoderSummary train_encoder(const Config& cfg) {
  cfg.validate();
  const auto art = artifacts(cfg);
  const auto data = data_files(cfg);
  auto poetic = load_poetic(cfg);
  auto comments =
      corpus::load_corpus_dir(data.comments(), corpus::SourceTag::kComments);
  auto comment_pairs = corpus::extract_pairs(comments);
  auto poetic_pairs = corpus::augment_positivize(
      corpus::extract_pairs(poetic), load_tsv_map(data.sentiment()),
      load_word_set(data.demographic()), cfg.augment_fraction, cfg.seed, load_verbalizer(cfg));

  auto sp = dualenc::train_encoder_tokenizer(poetic, comments, cfg.encoder.vocab_size);
  dualenc::DualEncoder model(sp, cfg.encoder, cfg.seed);
  spdlog::info("train-encoder: {} comment pairs, {} poetic pairs, vocab {}",
               comment_pairs.size(), poetic_pairs.size(), sp.size());
  dualenc::TrainingStats stats;
  auto trained = dualenc::train(std::move(model), comment_pairs, poetic_pairs,
                                cfg.encoder_training, cfg.seed, &stats);
  fs::create_directories(art.root);
  trained.save(art.encoder());

  EncoderSummary s;
  s.comment_pairs = comment_pairs.size();
  s.poetic_pairs = poetic_pairs.size();
  if (!stats.window_losses.empty()) s.final_loss = stats.window_losses.back();
  spdlog::info("train-encoder: {} steps, final window loss {:.4f}", stats.steps, s.final_loss);
  return s;
}

index::QuantizedIndex build_index(const Config& cfg) {
  cfg.validate();
  const auto art = artifacts(cfg);
  require_artifact(art.kept(), "filter");
  require_artifact(art.encoder(), "train-encoder");
  auto verses = read_verses(art.kept());
  if (verses.empty()) throw Error("build-index: " + art.kept().string() + " has no verses");
  auto enc = dualenc::DualEncoder::load(art.encoder());
  auto phon = phonology::Phonology::load(data_files(cfg).phonology());
  std::vector<std::string> diagnostics;
  auto records = index::build_catalog(verses, enc, phon, load_tagger(cfg), &diagnostics);
  for (const auto& d : diagnostics) spdlog::warn("build-index: {}", d);

  int k = cfg.index.centroids > 0 ? cfg.index.centroids
                                  : index::default_centroid_count(records.size());
  k = std::min(k, static_cast<int>(records.size()));
  auto idx = index::QuantizedIndex::build(std::move(records), k, cfg.seed,
                                          cfg.index.kmeans_iterations);
  if (cfg.index.nprobe > 0) idx.set_nprobe_default(std::min(cfg.index.nprobe, k));
  idx.save(art.index());
  spdlog::info("build-index: {} records, {} centroids, nprobe {}", idx.size(),
               idx.centroid_count(), idx.nprobe_default());
  return idx;
}

namespace {

index::QuantizedIndex load_index(const Config& cfg) {
  require_artifact(artifacts(cfg).index(), "build-index");
  return index::QuantizedIndex::load(artifacts(cfg).index());
}

dualenc::DualEncoder load_encoder(const Config& cfg) {
  require_artifact(artifacts(cfg).encoder(), "train-encoder");
  return dualenc::DualEncoder::load(artifacts(cfg).encoder());
}

}  // namespace

Engine::Engine(const Config& cfg)
    : Engine(phonology::Phonology::load(data_files(cfg).phonology()), load_encoder(cfg),
             load_index(cfg), cfg.index.nprobe) {}

Engine::Engine(phonology::Phonology phon, dualenc::DualEncoder enc,
               index::QuantizedIndex idx, int nprobe)
    : phon_(std::move(phon)), enc_(std::move(enc)), idx_(std::move(idx)) {
  suggester_ = std::make_unique<suggest::Suggester>(
      idx_, enc_, phon_, std::min(nprobe, idx_.centroid_count()));
}

}  // namespace versekit::service
