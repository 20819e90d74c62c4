// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "transel/task_registry.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "transel/error.hpp"

namespace transel {

using json = nlohmann::json;

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::kAccuracy: return "accuracy";
    case MetricKind::kF1: return "f1";
    case MetricKind::kMatthewsCorr: return "matthews_corr";
    case MetricKind::kPearsonSpearmanAvg: return "pearson_spearman_avg";
  }
  return "accuracy";
}

std::string_view to_string(DataFormat format) {
  switch (format) {
    case DataFormat::kTsv: return "tsv";
    case DataFormat::kJsonl: return "jsonl";
    case DataFormat::kSynthetic: return "synthetic";
  }
  return "tsv";
}

MetricKind parse_metric_kind(std::string_view text) {
  for (auto kind : {MetricKind::kAccuracy, MetricKind::kF1, MetricKind::kMatthewsCorr,
                    MetricKind::kPearsonSpearmanAvg}) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorCode::kParse, "unknown metric kind '" + std::string(text) + "'");
}

DataFormat parse_data_format(std::string_view text) {
  for (auto format : {DataFormat::kTsv, DataFormat::kJsonl, DataFormat::kSynthetic}) {
    if (to_string(format) == text) return format;
  }
  throw Error(ErrorCode::kParse, "unknown data format '" + std::string(text) + "'");
}

double normalize_metric(MetricKind kind, double raw) {
  switch (kind) {
    case MetricKind::kAccuracy:
    case MetricKind::kF1:
      return raw;
    case MetricKind::kMatthewsCorr:
    case MetricKind::kPearsonSpearmanAvg:
      return (raw + 1.0) / 2.0;
  }
  return raw;
}

std::optional<std::size_t> TaskSpec::label_index(std::string_view label) const {
  for (std::size_t i = 0; i < label_space.size(); ++i) {
    if (label_space[i] == label) return i;
  }
  return std::nullopt;
}

TaskId Registry::register_task(TaskSpec spec) {
  require(!spec.task_id.empty(), ErrorCode::kValidation, "task_id must not be empty");
  require(!index_.contains(spec.task_id), ErrorCode::kDuplicateTask,
          "task '" + spec.task_id + "' is already registered");
  require(spec.regression || !spec.label_space.empty(), ErrorCode::kValidation,
          "classification task '" + spec.task_id + "' needs a label space");
  index_.emplace(spec.task_id, tasks_.size());
  tasks_.push_back(std::move(spec));
  return tasks_.back().task_id;
}

const TaskSpec& Registry::get(std::string_view task_id) const {
  auto it = index_.find(std::string(task_id));
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownTask, "task '" + std::string(task_id) + "' is not registered");
  }
  return tasks_[it->second];
}

bool Registry::contains(std::string_view task_id) const {
  return index_.contains(std::string(task_id));
}

std::vector<TaskId> Registry::ids() const {
  std::vector<TaskId> out;
  out.reserve(tasks_.size());
  for (const auto& t : tasks_) out.push_back(t.task_id);
  return out;
}

std::vector<TaskId> Registry::ids_by_size_descending() const {
  std::vector<std::size_t> order(tasks_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return tasks_[a].train_size > tasks_[b].train_size;
  });
  std::vector<TaskId> out;
  out.reserve(order.size());
  for (auto i : order) out.push_back(tasks_[i].task_id);
  return out;
}

void Registry::set_sizes(std::string_view task_id, std::size_t train_size, std::size_t dev_size) {
  get(task_id);
  auto& spec = tasks_[index_.at(std::string(task_id))];
  spec.train_size = train_size;
  spec.dev_size = dev_size;
}

namespace {

json to_json(const TaskSpec& spec) {
  json j;
  j["task_id"] = spec.task_id;
  j["display_name"] = spec.display_name;
  j["train_size"] = spec.train_size;
  j["dev_size"] = spec.dev_size;
  j["metric_kind"] = std::string(to_string(spec.metric_kind));
  j["data_format"] = std::string(to_string(spec.data_format));
  if (spec.regression) {
    j["labels"] = "REGRESSION";
  } else {
    j["labels"] = spec.label_space;
  }
  j["columns"] = {{"text_a", spec.columns.text_a},
                  {"text_b", spec.columns.text_b},
                  {"label", spec.columns.label}};
  return j;
}

TaskSpec from_json(const json& j) {
  TaskSpec spec;
  spec.task_id = j.at("task_id").get<std::string>();
  spec.display_name = j.value("display_name", spec.task_id);
  spec.train_size = j.at("train_size").get<std::size_t>();
  spec.dev_size = j.value("dev_size", std::size_t{0});
  spec.metric_kind = parse_metric_kind(j.at("metric_kind").get<std::string>());
  spec.data_format = parse_data_format(j.at("data_format").get<std::string>());
  const auto& labels = j.at("labels");
  if (labels.is_string()) {
    require(labels.get<std::string>() == "REGRESSION", ErrorCode::kParse,
            "labels must be a list or \"REGRESSION\"");
    spec.regression = true;
  } else {
    spec.label_space = labels.get<std::vector<std::string>>();
  }
  if (j.contains("columns")) {
    const auto& c = j["columns"];
    spec.columns.text_a = c.value("text_a", spec.columns.text_a);
    spec.columns.text_b = c.value("text_b", spec.columns.text_b);
    spec.columns.label = c.value("label", spec.columns.label);
  }
  return spec;
}

}  // namespace

void Registry::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& spec : tasks_) out << to_json(spec).dump() << '\n';
}

Registry Registry::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path.string());
  Registry registry;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      registry.register_task(from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return registry;
}

Registry builtin_glue_registry() {
  // Training sizes are the published GLUE split sizes. Dev sizes are the
  // standard dev splits (MNLI: matched only).
  const std::vector<std::string> binary = {"0", "1"};
  const std::vector<std::string> entail2 = {"entailment", "not_entailment"};
  const std::vector<std::string> nli3 = {"entailment", "neutral", "contradiction"};

  auto make = [](std::string id, std::size_t train, std::size_t dev, MetricKind metric,
                 std::vector<std::string> labels, TsvColumns columns) {
    TaskSpec s;
    s.task_id = id;
    s.display_name = id;
    s.train_size = train;
    s.dev_size = dev;
    s.metric_kind = metric;
    s.data_format = DataFormat::kTsv;
    s.regression = labels.empty();
    s.label_space = std::move(labels);
    s.columns = std::move(columns);
    return s;
  };

  Registry r;
  r.register_task(make("MNLI", 392'662, 9'815, MetricKind::kAccuracy, nli3,
                       {"sentence1", "sentence2", "gold_label"}));
  r.register_task(make("QQP", 363'846, 40'430, MetricKind::kAccuracy, binary,
                       {"question1", "question2", "is_duplicate"}));
  r.register_task(make("QNLI", 104'743, 5'463, MetricKind::kAccuracy, entail2,
                       {"question", "sentence", "label"}));
  r.register_task(make("SST-2", 67'349, 872, MetricKind::kAccuracy, binary,
                       {"sentence", "", "label"}));
  r.register_task(make("CoLA", 8'551, 1'043, MetricKind::kMatthewsCorr, binary,
                       {"sentence", "", "label"}));
  r.register_task(make("STS-B", 5'749, 1'500, MetricKind::kPearsonSpearmanAvg, {},
                       {"sentence1", "sentence2", "score"}));
  r.register_task(make("MRPC", 3'668, 408, MetricKind::kF1, binary,
                       {"#1 String", "#2 String", "Quality"}));
  r.register_task(make("RTE", 2'490, 277, MetricKind::kAccuracy, entail2,
                       {"sentence1", "sentence2", "label"}));
  r.register_task(make("WNLI", 635, 71, MetricKind::kAccuracy, binary,
                       {"sentence1", "sentence2", "label"}));
  return r;
}

std::size_t training_size(const Registry& registry, std::string_view task_id) {
  return registry.get(task_id).train_size;
}

}  // namespace transel
