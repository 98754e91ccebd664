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

#include <sqlite3.h>

#include <chrono>
#include <ctime>
#include <random>

#include "versekit/service.hpp"

namespace versekit::service {

using nlohmann::json;

namespace {

std::string now_iso() {
  using namespace std::chrono;
  auto now = system_clock::now();
  auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

std::string new_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

// Owns one prepared statement.
class Stmt {
 public:
  Stmt(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &s_, nullptr) != SQLITE_OK) {
      throw Error(std::string("sqlite prepare: ") + sqlite3_errmsg(db));
    }
  }
  ~Stmt() { sqlite3_finalize(s_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  void bind(int i, const std::string& v) {
    check(sqlite3_bind_text(s_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
  }
  void bind(int i, const std::optional<std::string>& v) {
    if (v) {
      bind(i, *v);
    } else {
      check(sqlite3_bind_null(s_, i));
    }
  }
  /// True while rows remain.
  bool step() {
    int rc = sqlite3_step(s_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw Error(std::string("sqlite step: ") + sqlite3_errmsg(db_));
  }
  std::optional<std::string> text(int col) const {
    if (sqlite3_column_type(s_, col) == SQLITE_NULL) return std::nullopt;
    auto* p = reinterpret_cast<const char*>(sqlite3_column_text(s_, col));
    return std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(s_, col)));
  }
  std::int64_t integer(int col) const { return sqlite3_column_int64(s_, col); }

 private:
  void check(int rc) const {
    if (rc != SQLITE_OK) throw Error(std::string("sqlite bind: ") + sqlite3_errmsg(db_));
  }

  sqlite3* db_;
  sqlite3_stmt* s_ = nullptr;
};

json lines_json(const std::vector<PoemLine>& lines) {
  json a = json::array();
  for (const auto& l : lines) a.push_back({{"text", l.text}, {"origin", to_string(l.origin)}});
  return a;
}

}  // namespace

PoemStore::PoemStore(const std::filesystem::path& path) {
  if (path != ":memory:" && path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  int rc = sqlite3_open_v2(path.c_str(), &db_,
                           SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                           nullptr);
  if (rc != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw Error("cannot open poem store " + path.string() + ": " + msg);
  }
  exec("PRAGMA journal_mode=WAL");
  exec(
      "CREATE TABLE IF NOT EXISTS poems ("
      " id TEXT PRIMARY KEY, title TEXT, poets TEXT NOT NULL,"
      " structure TEXT NOT NULL, lines TEXT NOT NULL,"
      " created_at TEXT NOT NULL, updated_at TEXT NOT NULL)");
}

PoemStore::~PoemStore() { sqlite3_close(db_); }

void PoemStore::exec(const char* sql) const {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw Error("sqlite: " + msg);
  }
}

Poem PoemStore::create(Poem p) {
  std::lock_guard lock(mu_);
  p.created_at = p.updated_at = now_iso();
  for (;;) {
    p.id = new_id();
    Stmt s(db_, "SELECT 1 FROM poems WHERE id = ?");
    s.bind(1, p.id);
    if (!s.step()) break;
  }
  Stmt s(db_,
         "INSERT INTO poems (id, title, poets, structure, lines, created_at, updated_at)"
         " VALUES (?, ?, ?, ?, ?, ?, ?)");
  s.bind(1, p.id);
  s.bind(2, p.title);
  s.bind(3, json(p.poets).dump());
  s.bind(4, std::string(suggest::to_string(p.structure)));
  s.bind(5, lines_json(p.lines).dump());
  s.bind(6, p.created_at);
  s.bind(7, p.updated_at);
  s.step();
  return p;
}

std::optional<Poem> PoemStore::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  Stmt s(db_,
         "SELECT id, title, poets, structure, lines, created_at, updated_at"
         " FROM poems WHERE id = ?");
  s.bind(1, id);
  if (!s.step()) return std::nullopt;
  Poem p;
  p.id = *s.text(0);
  p.title = s.text(1);
  p.poets = json::parse(*s.text(2)).get<std::set<std::string>>();
  p.structure = suggest::parse_structure(*s.text(3));
  for (const auto& l : json::parse(*s.text(4))) {
    p.lines.push_back({l.at("text").get<std::string>(),
                       parse_line_origin(l.at("origin").get<std::string>())});
  }
  p.created_at = *s.text(5);
  p.updated_at = *s.text(6);
  return p;
}

std::optional<Poem> PoemStore::update(const std::string& id, Poem p) {
  auto old = get(id);
  if (!old) return std::nullopt;
  std::lock_guard lock(mu_);
  p.id = id;
  p.created_at = old->created_at;
  p.updated_at = now_iso();
  Stmt s(db_,
         "UPDATE poems SET title = ?, poets = ?, structure = ?, lines = ?, updated_at = ?"
         " WHERE id = ?");
  s.bind(1, p.title);
  s.bind(2, json(p.poets).dump());
  s.bind(3, std::string(suggest::to_string(p.structure)));
  s.bind(4, lines_json(p.lines).dump());
  s.bind(5, p.updated_at);
  s.bind(6, id);
  s.step();
  return p;
}

std::size_t PoemStore::size() const {
  std::lock_guard lock(mu_);
  Stmt s(db_, "SELECT COUNT(*) FROM poems");
  s.step();
  return static_cast<std::size_t>(s.integer(0));
}

}  // namespace versekit::service
