// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "transel/run_store.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "transel/error.hpp"

namespace transel {

using json = nlohmann::json;

namespace {

SubsampleMode parse_subsample_mode(const std::string& text) {
  for (auto m : {SubsampleMode::kFraction, SubsampleMode::kCount, SubsampleMode::kProportionOfTarget}) {
    if (to_string(m) == text) return m;
  }
  throw Error(ErrorCode::kParse, "unknown subsample mode '" + text + "'");
}

json manifest_json(const SubsampleManifest& m) { return json::parse(m.to_line()); }

SubsampleManifest manifest_from_json(const json& j) {
  SubsampleManifest m;
  m.task_id = j.at("task_id").get<std::string>();
  m.mode = parse_subsample_mode(j.at("mode").get<std::string>());
  m.value = j.at("value").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.source_count = j.at("source_count").get<std::size_t>();
  m.result_count = j.at("result_count").get<std::size_t>();
  return m;
}

}  // namespace

std::string record_to_json_line(const RunRecord& r) {
  json j;
  j["run_id"] = r.run_id;
  j["experiment"] = r.experiment;
  j["strategy"] = std::string(to_string(r.strategy));
  j["target_task"] = r.target_task;
  j["support_tasks"] = r.support_tasks;
  j["stage"] = std::string(to_string(r.stage));
  j["seed"] = r.seed;
  j["sampling_policy"] = std::string(to_string(r.sampling_policy));
  j["config"] = r.config;
  j["final_score"] = r.final_score;
  j["task_scores"] = r.task_scores;
  json history = json::array();
  for (const auto& c : r.checkpoint_history) {
    history.push_back({{"step", c.step},
                       {"epoch_position", c.epoch_position},
                       {"selection_score", c.selection_score},
                       {"state_hash", c.state_hash}});
  }
  j["checkpoint_history"] = std::move(history);
  j["best_checkpoint"] = r.best_checkpoint;
  j["best_selection_score"] = r.best_selection_score;
  j["best_state_hash"] = r.best_state_hash;
  j["parent_run_id"] = r.parent_run_id;
  json provenance = json::array();
  for (const auto& m : r.provenance) provenance.push_back(manifest_json(m));
  j["provenance"] = std::move(provenance);
  return j.dump();
}

RunRecord record_from_json_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    RunRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.experiment = j.at("experiment").get<std::string>();
    r.strategy = parse_strategy(j.at("strategy").get<std::string>());
    r.target_task = j.at("target_task").get<std::string>();
    r.support_tasks = j.at("support_tasks").get<std::vector<std::string>>();
    r.stage = parse_stage(j.at("stage").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.sampling_policy = parse_policy_kind(j.at("sampling_policy").get<std::string>());
    r.config = j.at("config").get<std::string>();
    r.final_score = j.at("final_score").get<double>();
    r.task_scores = j.at("task_scores").get<std::map<std::string, double>>();
    for (const auto& c : j.at("checkpoint_history")) {
      r.checkpoint_history.push_back({c.at("step").get<std::size_t>(), c.at("epoch_position").get<double>(),
                                      c.at("selection_score").get<double>(),
                                      c.at("state_hash").get<std::string>()});
    }
    r.best_checkpoint = j.at("best_checkpoint").get<std::size_t>();
    r.best_selection_score = j.at("best_selection_score").get<double>();
    r.best_state_hash = j.at("best_state_hash").get<std::string>();
    r.parent_run_id = j.at("parent_run_id").get<std::string>();
    for (const auto& m : j.at("provenance")) r.provenance.push_back(manifest_from_json(m));
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad run record: ") + e.what());
  }
}

RunStore::RunStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_ / "blobs", ec);
  require(!ec, ErrorCode::kIo, "cannot create store directory " + dir_.string() + ": " + ec.message());
  load();
}

void RunStore::load() {
  const auto path = runs_path();
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot read " + path.string());
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  std::size_t pos = 0;
  std::size_t good_end = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    const std::size_t nl = content.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) {
      // Unterminated tail: the writer died mid-line.
      dropped_partial_ = true;
      break;
    }
    const std::string line = content.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) {
      good_end = pos;
      continue;
    }
    RunRecord r;
    try {
      r = record_from_json_line(line);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    auto it = index_.find(r.run_id);
    if (it != index_.end()) {
      require(records_[it->second] == r, ErrorCode::kIntegrity,
              "run " + r.run_id + " appears twice with different content");
    } else {
      index_.emplace(r.run_id, records_.size());
      records_.push_back(std::move(r));
    }
    good_end = pos;
  }
  if (dropped_partial_) std::filesystem::resize_file(path, good_end);
}

RunStore::AppendResult RunStore::append(const RunRecord& record) {
  require(!record.run_id.empty(), ErrorCode::kValidation, "record has no run_id");
  std::lock_guard lock(mutex_);
  auto it = index_.find(record.run_id);
  if (it != index_.end()) {
    require(records_[it->second] == record, ErrorCode::kIntegrity,
            "run " + record.run_id + " already stored with different content");
    return AppendResult::kSkipped;
  }
  const std::string line = record_to_json_line(record) + "\n";
  std::ofstream out(runs_path(), std::ios::binary | std::ios::app);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot append to " + runs_path().string());
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.flush();
  require(static_cast<bool>(out), ErrorCode::kIo, "write failed on " + runs_path().string());
  index_.emplace(record.run_id, records_.size());
  records_.push_back(record);
  return AppendResult::kAppended;
}

bool RunStore::contains(const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  return index_.count(run_id) > 0;
}

std::optional<RunRecord> RunStore::find(const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  auto it = index_.find(run_id);
  if (it == index_.end()) return std::nullopt;
  return records_[it->second];
}

std::vector<RunRecord> RunStore::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::size_t RunStore::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

void RunStore::put_blob(const StateToken& token) {
  const auto final_path = dir_ / "blobs" / (token_hash(token) + ".bin");
  if (std::filesystem::exists(final_path)) return;
  const auto tmp = final_path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(token.data()), static_cast<std::streamsize>(token.size()));
    require(static_cast<bool>(out), ErrorCode::kIo, "write failed on " + tmp);
  }
  std::filesystem::rename(tmp, final_path);
}

std::optional<StateToken> RunStore::get_blob(const std::string& hash) const {
  const auto path = dir_ / "blobs" / (hash + ".bin");
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  StateToken token((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (token_hash(token) != hash) return std::nullopt;  // torn or foreign file
  return token;
}

}  // namespace transel
