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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "versekit/suggest.hpp"

struct sqlite3;

namespace httplib {
class Server;
}

namespace versekit::service {

enum class LineOrigin { kUser, kSuggested, kEditedSuggestion };

std::string_view to_string(LineOrigin o);
LineOrigin parse_line_origin(std::string_view s);

struct PoemLine {
  std::string text;
  LineOrigin origin = LineOrigin::kUser;

  friend bool operator==(const PoemLine&, const PoemLine&) = default;
};

struct Poem {
  std::string id;
  std::optional<std::string> title;
  std::set<std::string> poets;
  suggest::Structure structure = suggest::Structure::kQuatrain;
  std::vector<PoemLine> lines;
  /// ISO-8601 UTC, millisecond precision.
  std::string created_at;
  std::string updated_at;

  friend bool operator==(const Poem&, const Poem&) = default;
};

/// Title line and a blank line when titled, then one verse per line.
std::string export_text(const Poem& p);

/// Request body carried a bad value. `fields` maps JSON field to message.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::map<std::string, std::string> fields);
  const std::map<std::string, std::string>& fields() const { return fields_; }

 private:
  std::map<std::string, std::string> fields_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

suggest::SuggestRequest parse_suggest_request(const nlohmann::json& j);
nlohmann::json to_json(const suggest::SuggestRequest& r);
nlohmann::json to_json(const suggest::SuggestResponse& r);
/// Reads the client-writable fields (title, poets, structure, lines).
Poem parse_poem_body(const nlohmann::json& j);
nlohmann::json to_json(const Poem& p);

/// Single-file SQLite store of user poems. Calls are serialized.
class PoemStore {
 public:
  /// ":memory:" gives a private in-memory store.
  explicit PoemStore(const std::filesystem::path& path);
  ~PoemStore();
  PoemStore(const PoemStore&) = delete;
  PoemStore& operator=(const PoemStore&) = delete;

  /// Assigns id and timestamps.
  Poem create(Poem p);
  std::optional<Poem> get(const std::string& id) const;
  /// Replaces the content of an existing poem; nullopt when absent.
  std::optional<Poem> update(const std::string& id, Poem p);
  std::size_t size() const;

 private:
  void exec(const char* sql) const;

  sqlite3* db_ = nullptr;
  mutable std::mutex mu_;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Transport-free router for the /v1 API.
class Api {
 public:
  Api(const suggest::Suggester& suggester, PoemStore& store)
      : suggester_(suggester), store_(store) {}

  HttpResponse handle(std::string_view method, std::string_view path,
                      std::string_view body) const;

 private:
  HttpResponse route(std::string_view method, std::string_view path,
                     std::string_view body) const;

  const suggest::Suggester& suggester_;
  PoemStore& store_;
};

nlohmann::json error_body(int status, const std::string& message);

/// HTTP front end over `Api`, backed by a fixed worker pool.
class Server {
 public:
  Server(const Api& api, int threads);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Port 0 binds any free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  const Api& api_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace versekit::service
