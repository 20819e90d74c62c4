// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "transel/data_pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "transel/error.hpp"
#include "transel/rng.hpp"

namespace transel {

using json = nlohmann::json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

std::string_view to_string(SubsampleMode mode) {
  switch (mode) {
    case SubsampleMode::kFraction: return "fraction";
    case SubsampleMode::kCount: return "count";
    case SubsampleMode::kProportionOfTarget: return "proportion_of_target";
  }
  return "fraction";
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
    fields.back().pop_back();
  }
  return fields;
}

[[noreturn]] void parse_error(const std::filesystem::path& path, std::size_t line_no,
                              const std::string& what) {
  throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": " + what);
}

double parse_label(const TaskSpec& spec, const std::string& raw,
                   const std::filesystem::path& path, std::size_t line_no) {
  if (spec.regression) {
    double value = 0.0;
    const auto* end = raw.data() + raw.size();
    auto [ptr, ec] = std::from_chars(raw.data(), end, value);
    if (ec != std::errc() || ptr != end) {
      parse_error(path, line_no, "non-numeric regression label '" + raw + "'");
    }
    return value;
  }
  auto idx = spec.label_index(raw);
  if (!idx) parse_error(path, line_no, "label '" + raw + "' not in label space of " + spec.task_id);
  return static_cast<double>(*idx);
}

std::string json_label_text(const json& label) {
  if (label.is_string()) return label.get<std::string>();
  if (label.is_number_integer()) return std::to_string(label.get<long long>());
  if (label.is_number()) {
    const double v = label.get<double>();
    if (std::floor(v) == v) return std::to_string(static_cast<long long>(v));
    std::ostringstream os;
    os << v;
    return os.str();
  }
  return label.dump();
}

SplitData load_tsv(std::ifstream& in, const std::filesystem::path& path, const TaskSpec& spec,
                   Split split) {
  SplitData out{spec.task_id, split, {}};
  std::string line;
  if (!std::getline(in, line)) return out;
  const auto header = split_tabs(line);
  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) parse_error(path, 1, "missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t col_a = column(spec.columns.text_a);
  const std::optional<std::size_t> col_b =
      spec.columns.text_b.empty() ? std::nullopt : std::optional(column(spec.columns.text_b));
  const std::size_t col_label = column(spec.columns.label);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_tabs(line);
    if (fields.size() != header.size()) {
      parse_error(path, line_no,
                  "expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    Example ex;
    ex.example_id = out.examples.size();
    ex.text_a = fields[col_a];
    if (col_b) ex.text_b = fields[*col_b];
    ex.label = parse_label(spec, fields[col_label], path, line_no);
    out.examples.push_back(std::move(ex));
  }
  return out;
}

SplitData load_jsonl(std::ifstream& in, const std::filesystem::path& path, const TaskSpec& spec,
                     Split split) {
  SplitData out{spec.task_id, split, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      parse_error(path, line_no, e.what());
    }
    if (!record.is_object() || !record.contains("text_a") || !record.contains("label")) {
      parse_error(path, line_no, "record needs text_a and label");
    }
    Example ex;
    ex.example_id = out.examples.size();
    ex.text_a = record["text_a"].get<std::string>();
    if (record.contains("text_b") && !record["text_b"].is_null()) {
      ex.text_b = record["text_b"].get<std::string>();
    }
    const auto& label = record["label"];
    if (spec.regression) {
      if (!label.is_number()) parse_error(path, line_no, "regression label must be numeric");
      ex.label = label.get<double>();
    } else {
      ex.label = parse_label(spec, json_label_text(label), path, line_no);
    }
    out.examples.push_back(std::move(ex));
  }
  return out;
}

}  // namespace

SplitData load_split(const std::filesystem::path& path, const TaskSpec& spec, Split split) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path.string());
  switch (spec.data_format) {
    case DataFormat::kTsv: return load_tsv(in, path, spec, split);
    case DataFormat::kJsonl: return load_jsonl(in, path, spec, split);
    case DataFormat::kSynthetic: break;
  }
  throw Error(ErrorCode::kValidation, "synthetic tasks are generated, not loaded: " + spec.task_id);
}

const std::vector<double>& default_sweep_proportions() {
  static const std::vector<double> k = {1.0 / 3.0, 0.5, 1.0, 2.0, 3.0};
  return k;
}

std::size_t floor_count(double value, std::size_t base) {
  const long double product = static_cast<long double>(value) * static_cast<long double>(base);
  return static_cast<std::size_t>(std::floor(product + 1e-9L * std::max(1.0L, product)));
}

std::size_t requested_count(const SubsampleSpec& spec, std::size_t available,
                            std::optional<std::size_t> target_size) {
  std::size_t count = 0;
  switch (spec.mode) {
    case SubsampleMode::kFraction:
      require(spec.value > 0.0 && spec.value <= 1.0, ErrorCode::kValidation,
              "fraction must lie in (0, 1]");
      count = floor_count(spec.value, available);
      break;
    case SubsampleMode::kCount:
      require(spec.value >= 1.0 && std::floor(spec.value) == spec.value, ErrorCode::kValidation,
              "count must be a positive integer");
      count = static_cast<std::size_t>(spec.value);
      break;
    case SubsampleMode::kProportionOfTarget:
      require(target_size.has_value(), ErrorCode::kValidation,
              "proportion-of-target subsampling needs a target size");
      require(spec.value > 0.0, ErrorCode::kValidation, "proportion must be positive");
      count = floor_count(spec.value, *target_size);
      break;
  }
  if (count > available) {
    throw Error(ErrorCode::kInsufficientData,
                "requested " + std::to_string(count) + " examples but only " +
                    std::to_string(available) + " are available");
  }
  return count;
}

SplitData subsample(const SplitData& split, const SubsampleSpec& spec,
                    std::optional<std::size_t> target_size) {
  const std::size_t count = requested_count(spec, split.size(), target_size);
  std::vector<std::size_t> order(split.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(spec.seed, "subsample:" + split.task_id));
  // Partial Fisher-Yates: the first `count` slots end up a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
  }
  order.resize(count);
  std::sort(order.begin(), order.end());

  SplitData out{split.task_id, split.split, {}};
  out.examples.reserve(count);
  for (auto i : order) out.examples.push_back(split.examples[i]);
  return out;
}

std::string SubsampleManifest::to_line() const {
  json j;
  j["task_id"] = task_id;
  j["mode"] = std::string(to_string(mode));
  j["value"] = value;
  j["seed"] = seed;
  j["source_count"] = source_count;
  j["result_count"] = result_count;
  return j.dump();
}

SubsampleManifest make_manifest(const SplitData& source, const SubsampleSpec& spec,
                                std::size_t result_count) {
  return {source.task_id, spec.mode, spec.value, spec.seed, source.size(), result_count};
}

void write_manifest(const std::filesystem::path& path, const SubsampleManifest& manifest) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
  out << manifest.to_line() << '\n';
}

namespace {

std::string feature_text(const std::vector<double>& x) {
  std::string text;
  char buf[48];
  for (std::size_t j = 0; j < x.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%sf%zu:%.6f", j == 0 ? "" : " ", j, x[j]);
    text += buf;
  }
  return text;
}

// Rejection threshold on (best - runner-up) class score, with unit-norm
// weight rows. Keeps the clean problem separable with a visible margin.
constexpr double kMargin = 0.5;

SplitData generate_split(const std::string& task_id, Split split, std::size_t n,
                         const std::vector<std::vector<double>>& w, double noise, Rng& rng,
                         std::vector<std::size_t>* flipped) {
  const std::size_t classes = w.size();
  const std::size_t dims = w.front().size();
  SplitData out{task_id, split, {}};
  out.examples.reserve(n);
  std::vector<double> x(dims), scores(classes);
  while (out.examples.size() < n) {
    for (auto& v : x) v = rng.normal();
    for (std::size_t c = 0; c < classes; ++c) {
      scores[c] = std::inner_product(w[c].begin(), w[c].end(), x.begin(), 0.0);
    }
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    if (sorted[0] - sorted[1] < kMargin) continue;
    Example ex;
    ex.example_id = out.examples.size();
    ex.text_a = feature_text(x);
    ex.label = static_cast<double>(std::max_element(scores.begin(), scores.end()) - scores.begin());
    out.examples.push_back(std::move(ex));
  }

  const auto flips = static_cast<std::size_t>(std::llround(noise * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < flips; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(order[i], order[j]);
  }
  order.resize(flips);
  std::sort(order.begin(), order.end());
  for (auto i : order) {
    const auto clean = static_cast<std::size_t>(out.examples[i].label);
    const auto shift = 1 + static_cast<std::size_t>(rng.below(classes - 1));
    out.examples[i].label = static_cast<double>((clean + shift) % classes);
  }
  if (flipped) *flipped = std::move(order);
  return out;
}

}  // namespace

SyntheticTask make_synthetic_task(std::string task_id, std::size_t n_train, std::size_t n_dev,
                                  std::size_t n_features, std::size_t class_count, double noise,
                                  std::uint64_t seed) {
  require(n_train >= 1 && n_dev >= 1, ErrorCode::kValidation, "n_train and n_dev must be >= 1");
  require(n_features >= 1, ErrorCode::kValidation, "n_features must be >= 1");
  require(class_count >= 2, ErrorCode::kValidation, "class_count must be >= 2");
  require(noise >= 0.0 && noise < 0.5, ErrorCode::kValidation, "noise must lie in [0, 0.5)");
  require(n_features >= 2 || class_count == 2, ErrorCode::kValidation,
          "multiclass synthetic tasks need at least two features");

  Rng rng(mix_seed(seed, "synthetic:" + task_id));
  std::vector<std::vector<double>> w(class_count, std::vector<double>(n_features));
  for (auto& row : w) {
    double norm = 0.0;
    for (auto& v : row) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : row) v /= norm;
  }
  if (class_count == 2) {
    // Antipodal rows: the score gap is 2 w.x, so every draw has the same odds.
    w[1] = w[0];
    for (auto& v : w[1]) v = -v;
  }

  SyntheticTask task;
  task.spec.task_id = task_id;
  task.spec.display_name = task_id;
  task.spec.train_size = n_train;
  task.spec.dev_size = n_dev;
  task.spec.metric_kind = MetricKind::kAccuracy;
  task.spec.data_format = DataFormat::kSynthetic;
  for (std::size_t c = 0; c < class_count; ++c) task.spec.label_space.push_back(std::to_string(c));
  task.train = generate_split(task_id, Split::kTrain, n_train, w, noise, rng, nullptr);
  task.dev = generate_split(task_id, Split::kDev, n_dev, w, noise, rng, &task.flipped_dev);
  task.weights = std::move(w);
  return task;
}

}  // namespace transel
