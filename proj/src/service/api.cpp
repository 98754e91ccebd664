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

#include <spdlog/spdlog.h>

#include <atomic>
#include <cstdio>

#include "versekit/service.hpp"

namespace versekit::service {

using nlohmann::json;

namespace {

constexpr int kMaxSuggestions = 50;

std::string describe(const std::map<std::string, std::string>& fields) {
  std::string out = "invalid request:";
  for (const auto& [k, v] : fields) out += " " + k + " " + v + ";";
  return out;
}

// Field-by-field reader that collects every problem before failing.
class Fields {
 public:
  explicit Fields(const json& j) : j_(j) {
    if (!j.is_object()) fail("body", "must be a JSON object");
  }

  const json* get(const std::string& key) {
    known_.insert(key);
    if (!j_.is_object()) return nullptr;
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  std::optional<std::string> string(const std::string& key, bool required, bool non_empty) {
    const json* v = get(key);
    if (!v) {
      if (required) fail(key, "is required");
      return std::nullopt;
    }
    if (!v->is_string()) return fail(key, "must be a string"), std::nullopt;
    auto s = v->get<std::string>();
    if (non_empty && str::trim(s).empty()) return fail(key, "must not be empty"), std::nullopt;
    return s;
  }

  std::optional<std::vector<std::string>> strings(const std::string& key, bool required) {
    const json* v = get(key);
    if (!v) {
      if (required) fail(key, "is required");
      return std::nullopt;
    }
    if (!v->is_array()) return fail(key, "must be an array of strings"), std::nullopt;
    std::vector<std::string> out;
    for (const auto& e : *v) {
      if (!e.is_string()) return fail(key, "must be an array of strings"), std::nullopt;
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  std::optional<int> integer(const std::string& key, int lo, int hi) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer() || v->get<std::int64_t>() < lo || v->get<std::int64_t>() > hi) {
      fail(key, "must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return std::nullopt;
    }
    return v->get<int>();
  }

  std::optional<suggest::Structure> structure(const std::string& key) {
    auto s = string(key, false, false);
    if (!s) return std::nullopt;
    try {
      return suggest::parse_structure(*s);
    } catch (const Error&) {
      fail(key, "must be one of quatrain, couplet, free_verse");
      return std::nullopt;
    }
  }

  void fail(const std::string& key, const std::string& msg) { errors_.emplace(key, msg); }

  /// Throws ValidationError when anything failed or an unknown key appeared.
  void finish(const std::set<std::string>& ignored = {}) {
    if (j_.is_object()) {
      for (const auto& [k, v] : j_.items()) {
        if (!known_.count(k) && !ignored.count(k)) fail(k, "is not a known field");
      }
    }
    if (!errors_.empty()) throw ValidationError(errors_);
  }

 private:
  const json& j_;
  std::set<std::string> known_;
  std::map<std::string, std::string> errors_;
};

std::string new_error_id() {
  static std::atomic<std::uint64_t> counter{0};
  auto n = counter.fetch_add(1) + 1;
  auto t = static_cast<std::uint64_t>(
      std::chrono::steady_clock::now().time_since_epoch().count());
  char buf[20];
  std::snprintf(buf, sizeof buf, "e%08llx%06llx",
                static_cast<unsigned long long>(t & 0xffffffffULL),
                static_cast<unsigned long long>(n & 0xffffffULL));
  return buf;
}

HttpResponse json_response(int status, const json& body) {
  return {status, body.dump(), "application/json"};
}

std::vector<std::string_view> segments(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) out.push_back(path.substr(i, j - i));
    i = j;
  }
  return out;
}

json parse_body(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ValidationError({{"body", std::string("is not valid JSON: ") + e.what()}});
  }
}

}  // namespace

std::string_view to_string(LineOrigin o) {
  switch (o) {
    case LineOrigin::kUser: return "user";
    case LineOrigin::kSuggested: return "suggested";
    case LineOrigin::kEditedSuggestion: return "edited_suggestion";
  }
  return "?";
}

LineOrigin parse_line_origin(std::string_view s) {
  if (s == "user") return LineOrigin::kUser;
  if (s == "suggested") return LineOrigin::kSuggested;
  if (s == "edited_suggestion") return LineOrigin::kEditedSuggestion;
  throw Error("unknown line origin '" + std::string(s) + "'");
}

std::string export_text(const Poem& p) {
  std::string out;
  if (p.title) out += *p.title + "\n\n";
  for (const auto& l : p.lines) out += l.text + "\n";
  return out;
}

ValidationError::ValidationError(std::map<std::string, std::string> fields)
    : Error(describe(fields)), fields_(std::move(fields)) {}

suggest::SuggestRequest parse_suggest_request(const json& j) {
  Fields f(j);
  suggest::SuggestRequest r;
  if (auto v = f.string("previous_verse", true, true)) r.previous_verse = *v;
  if (auto v = f.string("rhyme_with", false, false)) r.rhyme_with = *v;
  if (auto v = f.strings("poets", true)) {
    if (v->empty()) f.fail("poets", "must name at least one poet");
    r.poets.insert(v->begin(), v->end());
  }
  if (auto v = f.structure("structure")) r.structure = *v;
  if (auto v = f.integer("syllables", 1, 100)) r.syllables = *v;
  if (auto v = f.integer("n", 1, kMaxSuggestions)) r.n = *v;
  if (auto v = f.strings("exclude", false)) r.exclude = *v;
  f.finish();
  return r;
}

json to_json(const suggest::SuggestRequest& r) {
  json j = {{"previous_verse", r.previous_verse},
            {"poets", r.poets},
            {"structure", suggest::to_string(r.structure)},
            {"n", r.n},
            {"exclude", r.exclude}};
  j["rhyme_with"] = r.rhyme_with ? json(*r.rhyme_with) : json(nullptr);
  j["syllables"] = r.syllables ? json(*r.syllables) : json(nullptr);
  return j;
}

json to_json(const suggest::SuggestResponse& r) {
  json by_poet = json::object();
  for (const auto& [poet, list] : r.by_poet) {
    json a = json::array();
    for (const auto& s : list) {
      a.push_back({{"id", s.id},
                   {"text", s.text},
                   {"score", s.score},
                   {"rhyme_class", phonology::to_string(s.rhyme_class)}});
    }
    by_poet[poet] = a;
  }
  return {{"suggestions", by_poet},
          {"fallback_used", r.fallback_used},
          {"diagnostics", r.diagnostics}};
}

Poem parse_poem_body(const json& j) {
  Fields f(j);
  Poem p;
  if (auto v = f.string("title", false, false)) p.title = *v;
  if (p.title && p.title->find('\n') != std::string::npos) {
    f.fail("title", "must be a single line");
  }
  if (auto v = f.strings("poets", false)) p.poets.insert(v->begin(), v->end());
  if (auto v = f.structure("structure")) p.structure = *v;
  if (const json* lines = f.get("lines")) {
    if (!lines->is_array()) {
      f.fail("lines", "must be an array");
    } else {
      for (std::size_t i = 0; i < lines->size(); ++i) {
        const auto& l = (*lines)[i];
        const std::string key = "lines[" + std::to_string(i) + "]";
        if (!l.is_object() || !l.contains("text") || !l["text"].is_string()) {
          f.fail(key, "must be an object with a string 'text'");
          continue;
        }
        PoemLine pl{l["text"].get<std::string>(), LineOrigin::kUser};
        if (pl.text.find('\n') != std::string::npos) f.fail(key + ".text", "must be one line");
        if (l.contains("origin")) {
          try {
            pl.origin = parse_line_origin(l["origin"].get<std::string>());
          } catch (const std::exception&) {
            f.fail(key + ".origin", "must be one of user, suggested, edited_suggestion");
          }
        }
        for (const auto& [k, v] : l.items()) {
          if (k != "text" && k != "origin") f.fail(key + "." + k, "is not a known field");
        }
        p.lines.push_back(std::move(pl));
      }
    }
  }
  f.finish({"id", "created_at", "updated_at"});
  return p;
}

json to_json(const Poem& p) {
  json lines = json::array();
  for (const auto& l : p.lines) lines.push_back({{"text", l.text}, {"origin", to_string(l.origin)}});
  return {{"id", p.id},
          {"title", p.title ? json(*p.title) : json(nullptr)},
          {"poets", p.poets},
          {"structure", suggest::to_string(p.structure)},
          {"lines", lines},
          {"created_at", p.created_at},
          {"updated_at", p.updated_at}};
}

json error_body(int status, const std::string& message) {
  return {{"error", {{"status", status}, {"message", message}}}};
}

HttpResponse Api::handle(std::string_view method, std::string_view path,
                         std::string_view body) const {
  try {
    return route(method, path, body);
  } catch (const ValidationError& e) {
    auto j = error_body(400, "invalid request");
    j["error"]["fields"] = e.fields();
    return json_response(400, j);
  } catch (const NotFoundError& e) {
    return json_response(404, error_body(404, e.what()));
  } catch (const std::exception& e) {
    auto id = new_error_id();
    spdlog::error("request {} {} failed [{}]: {}", method, path, id, e.what());
    auto j = error_body(500, "internal error");
    j["error"]["id"] = id;
    return json_response(500, j);
  }
}

HttpResponse Api::route(std::string_view method, std::string_view path,
                        std::string_view body) const {
  const auto seg = segments(path);
  auto method_not_allowed = [&] {
    return json_response(405, error_body(405, "method not allowed"));
  };

  if (seg.size() == 1 && seg[0] == "healthz") {
    if (method != "GET") return method_not_allowed();
    return json_response(200, {{"status", "ok"}});
  }
  if (seg.size() < 2 || seg[0] != "v1") throw NotFoundError("no such endpoint");

  if (seg.size() == 2 && seg[1] == "poets") {
    if (method != "GET") return method_not_allowed();
    json a = json::array();
    for (const auto& [poet, n] : suggester_.poet_counts()) {
      a.push_back({{"id", poet}, {"verses", n}});
    }
    return json_response(200, {{"poets", a}});
  }

  if (seg.size() == 2 && seg[1] == "suggest") {
    if (method != "POST") return method_not_allowed();
    auto req = parse_suggest_request(parse_body(body));
    std::vector<std::string> unknown;
    for (const auto& p : req.poets) {
      if (!suggester_.has_poet(p)) unknown.push_back(p);
    }
    if (!unknown.empty()) throw NotFoundError("unknown poet: " + str::join(unknown, ", "));
    return json_response(200, to_json(suggester_.suggest_next(req)));
  }

  if (seg[1] == "poems") {
    if (seg.size() == 2) {
      if (method != "POST") return method_not_allowed();
      auto poem = store_.create(parse_poem_body(parse_body(body)));
      return json_response(201, to_json(poem));
    }
    const std::string id(seg[2]);
    if (seg.size() == 3) {
      if (method == "GET") {
        auto p = store_.get(id);
        if (!p) throw NotFoundError("unknown poem '" + id + "'");
        return json_response(200, to_json(*p));
      }
      if (method == "PUT") {
        auto p = store_.update(id, parse_poem_body(parse_body(body)));
        if (!p) throw NotFoundError("unknown poem '" + id + "'");
        return json_response(200, to_json(*p));
      }
      return method_not_allowed();
    }
    if (seg.size() == 4 && seg[3] == "export") {
      if (method != "GET") return method_not_allowed();
      auto p = store_.get(id);
      if (!p) throw NotFoundError("unknown poem '" + id + "'");
      return {200, export_text(*p), "text/plain; charset=utf-8"};
    }
  }
  throw NotFoundError("no such endpoint");
}

}  // namespace versekit::service
