// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "transel/strategies.hpp"
#include "transel/training_engine.hpp"

namespace transel {

std::string record_to_json_line(const RunRecord& record);
RunRecord record_from_json_line(const std::string& line);

/// Append-only run store in a directory:
///   runs.jsonl        one RunRecord per line
///   blobs/<hash>.bin  checkpoint tokens referenced by state hashes
/// A trailing line cut short by a crash is dropped (and truncated away) on
/// open. Appends are serialized by an internal mutex.
class RunStore {
 public:
  enum class AppendResult { kAppended, kSkipped };

  explicit RunStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path runs_path() const { return dir_ / "runs.jsonl"; }

  /// Identical record already present -> kSkipped. Same run_id with
  /// different content -> kIntegrity.
  AppendResult append(const RunRecord& record);

  bool contains(const std::string& run_id) const;
  std::optional<RunRecord> find(const std::string& run_id) const;
  std::vector<RunRecord> records() const;  // file order
  std::size_t size() const;
  bool dropped_partial_line() const { return dropped_partial_; }

  void put_blob(const StateToken& token);  // keyed by token_hash(token)
  std::optional<StateToken> get_blob(const std::string& hash) const;

 private:
  void load();

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::vector<RunRecord> records_;
  std::map<std::string, std::size_t> index_;
  bool dropped_partial_ = false;
};

}  // namespace transel
