// Copyright 2026 The optimeta-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Durable key-value store on SQLite. Each value carries its schema version
// and a SHA-256 digest that is checked on every read.

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <sqlite3.h>

#include "optimeta/digest.hpp"
#include "optimeta/error.hpp"

namespace optimeta {

struct StoredValue {
  int schema_version = 0;
  std::string payload;
};

class RecordStore {
 public:
  /// Opens (creating if needed) the database at `path`; ":memory:" gives a
  /// private in-memory store.
  explicit RecordStore(const std::string& path = ":memory:") {
    sqlite3* raw = nullptr;
    int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
    if (sqlite3_open_v2(path.c_str(), &raw, flags, nullptr) != SQLITE_OK) {
      std::string msg = raw ? sqlite3_errmsg(raw) : "out of memory";
      sqlite3_close(raw);
      throw Error(Errc::StorageCorrupt, "cannot open store " + path + ": " + msg);
    }
    db_.reset(raw);
    exec("PRAGMA journal_mode=WAL");
    exec("PRAGMA synchronous=NORMAL");
    exec("CREATE TABLE IF NOT EXISTS records ("
         " key TEXT PRIMARY KEY,"
         " schema_version INTEGER NOT NULL,"
         " payload TEXT NOT NULL,"
         " digest TEXT NOT NULL)");
  }

  /// Write-then-read returns exactly `payload`.
  void put(std::string_view key, int schema_version, std::string_view payload) {
    std::lock_guard lock(mutex_);
    Statement st(db_.get(),
                 "INSERT INTO records(key, schema_version, payload, digest) VALUES(?1, ?2, ?3, ?4)"
                 " ON CONFLICT(key) DO UPDATE SET schema_version=excluded.schema_version,"
                 " payload=excluded.payload, digest=excluded.digest");
    auto digest = sha256_hex(payload);
    st.bind(1, key);
    sqlite3_bind_int(st.get(), 2, schema_version);
    st.bind(3, payload);
    st.bind(4, digest);
    st.step_done();
  }

  /// Throws StorageCorrupt when the payload no longer matches its digest.
  std::optional<StoredValue> get(std::string_view key) const {
    std::lock_guard lock(mutex_);
    Statement st(db_.get(), "SELECT schema_version, payload, digest FROM records WHERE key = ?1");
    st.bind(1, key);
    int rc = sqlite3_step(st.get());
    if (rc == SQLITE_DONE) return std::nullopt;
    if (rc != SQLITE_ROW) throw Error(Errc::StorageCorrupt, sqlite3_errmsg(db_.get()));
    StoredValue v;
    v.schema_version = sqlite3_column_int(st.get(), 0);
    v.payload = column_text(st.get(), 1);
    if (sha256_hex(v.payload) != column_text(st.get(), 2))
      throw Error(Errc::StorageCorrupt, "integrity check failed for '" + std::string(key) + "'");
    return v;
  }

  bool remove(std::string_view key) {
    std::lock_guard lock(mutex_);
    Statement st(db_.get(), "DELETE FROM records WHERE key = ?1");
    st.bind(1, key);
    st.step_done();
    return sqlite3_changes(db_.get()) > 0;
  }

  std::vector<std::string> keys_with_prefix(std::string_view prefix) const {
    std::lock_guard lock(mutex_);
    Statement st(db_.get(), "SELECT key FROM records WHERE substr(key, 1, ?2) = ?1 ORDER BY key");
    st.bind(1, prefix);
    sqlite3_bind_int(st.get(), 2, static_cast<int>(prefix.size()));
    std::vector<std::string> out;
    while (sqlite3_step(st.get()) == SQLITE_ROW) out.push_back(column_text(st.get(), 0));
    return out;
  }

  /// Raw SQL access for tests that simulate on-disk damage.
  void exec(const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_.get(), sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw Error(Errc::StorageCorrupt, msg);
    }
  }

 private:
  struct Closer {
    void operator()(sqlite3* db) const { sqlite3_close(db); }
  };

  class Statement {
   public:
    Statement(sqlite3* db, const char* sql) : db_(db) {
      if (sqlite3_prepare_v2(db, sql, -1, &st_, nullptr) != SQLITE_OK)
        throw Error(Errc::StorageCorrupt, sqlite3_errmsg(db));
    }
    ~Statement() { sqlite3_finalize(st_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    sqlite3_stmt* get() const { return st_; }
    void bind(int index, std::string_view value) {
      sqlite3_bind_text(st_, index, value.data(), static_cast<int>(value.size()), SQLITE_TRANSIENT);
    }
    void step_done() {
      if (sqlite3_step(st_) != SQLITE_DONE) throw Error(Errc::StorageCorrupt, sqlite3_errmsg(db_));
    }

   private:
    sqlite3* db_;
    sqlite3_stmt* st_ = nullptr;
  };

  static std::string column_text(sqlite3_stmt* st, int col) {
    auto* p = reinterpret_cast<const char*>(sqlite3_column_text(st, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(st, col))) : std::string{};
  }

  std::unique_ptr<sqlite3, Closer> db_;
  mutable std::mutex mutex_;
};

}  // namespace optimeta
