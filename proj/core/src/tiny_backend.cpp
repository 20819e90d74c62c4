// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "transel/tiny_backend.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "transel/error.hpp"
#include "transel/metrics.hpp"
#include "transel/rng.hpp"

namespace transel {

namespace {

constexpr char kMagic[8] = {'T', 'I', 'N', 'Y', 'B', 'K', '0', '1'};

class Writer {
 public:
  explicit Writer(StateToken& out) : out_(out) {}
  template <typename T>
  void pod(const T& v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  void doubles(const std::vector<double>& v) {
    pod<std::uint64_t>(v.size());
    const auto* p = reinterpret_cast<const std::uint8_t*>(v.data());
    out_.insert(out_.end(), p, p + v.size() * sizeof(double));
  }
  void text(const std::string& s) {
    pod<std::uint64_t>(s.size());
    out_.insert(out_.end(), s.begin(), s.end());
  }

 private:
  StateToken& out_;
};

class Reader {
 public:
  explicit Reader(const StateToken& in) : in_(in) {}
  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, in_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::vector<double> doubles() {
    const auto n = pod<std::uint64_t>();
    need(n * sizeof(double));
    std::vector<double> v(n);
    std::memcpy(v.data(), in_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
    return v;
  }
  std::string text() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    require(pos_ + n <= in_.size(), ErrorCode::kValidation, "truncated tiny-backend state token");
  }
  const StateToken& in_;
  std::size_t pos_ = 0;
};

void add_tokens(std::string_view text, std::string_view prefix, std::uint32_t mask,
                TinyBackend::SparseFeatures& out) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string_view token = text.substr(i, j - i);
      std::string_view name = token;
      double value = 1.0;
      if (auto colon = token.rfind(':'); colon != std::string_view::npos && colon > 0) {
        double parsed = 0.0;
        const char* first = token.data() + colon + 1;
        const char* last = token.data() + token.size();
        auto [ptr, ec] = std::from_chars(first, last, parsed);
        if (ec == std::errc() && ptr == last && first != last) {
          name = token.substr(0, colon);
          value = parsed;
        }
      }
      const auto bucket = static_cast<std::uint32_t>(fnv1a(name, fnv1a(prefix))) & mask;
      out.emplace_back(bucket, value);
    }
    i = j;
  }
}

}  // namespace

TinyBackend::TinyBackend(TinyBackendOptions options) : options_(options) {
  require(options_.hash_bits >= 1 && options_.hash_bits <= 24, ErrorCode::kValidation,
          "hash_bits must lie in [1, 24]");
  require(options_.hidden >= 1, ErrorCode::kValidation, "hidden width must be >= 1");
}

void TinyBackend::init(std::uint64_t seed, double learning_rate) {
  seed_ = seed;
  learning_rate_ = learning_rate;
  const std::size_t buckets = std::size_t{1} << options_.hash_bits;
  embedding_.assign(buckets * options_.hidden, 0.0);
  hidden_bias_.assign(options_.hidden, 0.0);
  Rng rng(mix_seed(seed, "tiny:shared"));
  for (auto& v : embedding_) v = options_.init_scale * rng.normal();
  heads_.clear();
}

void TinyBackend::add_task(const TaskSpec& spec) {
  if (heads_.contains(spec.task_id)) return;
  require(!embedding_.empty(), ErrorCode::kValidation, "tiny backend used before init");
  Head head;
  head.regression = spec.regression;
  head.outputs = spec.class_count();
  require(head.outputs >= 1, ErrorCode::kValidation, "task '" + spec.task_id + "' has no outputs");
  head.weights.resize(head.outputs * options_.hidden);
  head.bias.assign(head.outputs, 0.0);
  Rng rng(mix_seed(seed_, "tiny:head:" + spec.task_id));
  const double scale = 1.0 / std::sqrt(static_cast<double>(options_.hidden));
  for (auto& v : head.weights) v = scale * rng.normal();
  heads_.emplace(spec.task_id, std::move(head));
}

TinyBackend::SparseFeatures TinyBackend::featurize(const Example& example) const {
  const std::uint32_t mask = (std::uint32_t{1} << options_.hash_bits) - 1;
  SparseFeatures features;
  add_tokens(example.text_a, "a", mask, features);
  if (example.text_b) add_tokens(*example.text_b, "b", mask, features);
  return features;
}

void TinyBackend::hidden_layer(const SparseFeatures& features, std::vector<double>& h) const {
  const std::size_t width = options_.hidden;
  h = hidden_bias_;
  for (const auto& [bucket, value] : features) {
    const double* row = embedding_.data() + static_cast<std::size_t>(bucket) * width;
    for (std::size_t k = 0; k < width; ++k) h[k] += value * row[k];
  }
  for (auto& v : h) v = std::tanh(v);
}

void TinyBackend::head_outputs(const Head& head, const std::vector<double>& h,
                               std::vector<double>& out) const {
  const std::size_t width = options_.hidden;
  out = head.bias;
  for (std::size_t c = 0; c < head.outputs; ++c) {
    const double* w = head.weights.data() + c * width;
    for (std::size_t k = 0; k < width; ++k) out[c] += w[k] * h[k];
  }
}

double TinyBackend::train_step(const std::string& task_id, std::span<const Example* const> batch) {
  auto it = heads_.find(task_id);
  require(it != heads_.end(), ErrorCode::kValidation, "no head for task '" + task_id + "'");
  if (batch.empty()) return 0.0;
  Head& head = it->second;
  const std::size_t width = options_.hidden;
  const double scale = learning_rate_ / static_cast<double>(batch.size());

  std::vector<double> grad_w(head.weights.size(), 0.0), grad_b(head.outputs, 0.0);
  std::vector<double> grad_hidden_bias(width, 0.0);
  std::unordered_map<std::uint32_t, std::vector<double>> grad_rows;
  std::vector<double> h, out, d_out(head.outputs), d_pre(width);
  double loss = 0.0;

  for (const Example* ex : batch) {
    const auto features = featurize(*ex);
    hidden_layer(features, h);
    head_outputs(head, h, out);
    if (head.regression) {
      const double err = out[0] - ex->label;
      loss += 0.5 * err * err;
      d_out[0] = err;
    } else {
      const double top = *std::max_element(out.begin(), out.end());
      double z = 0.0;
      for (auto& v : out) z += std::exp(v - top);
      const auto gold = static_cast<std::size_t>(ex->label);
      require(gold < head.outputs, ErrorCode::kValidation, "label out of range for '" + task_id + "'");
      for (std::size_t c = 0; c < head.outputs; ++c) {
        const double p = std::exp(out[c] - top) / z;
        d_out[c] = p - (c == gold ? 1.0 : 0.0);
      }
      loss += -(out[gold] - top - std::log(z));
    }
    std::fill(d_pre.begin(), d_pre.end(), 0.0);
    for (std::size_t c = 0; c < head.outputs; ++c) {
      grad_b[c] += d_out[c];
      double* gw = grad_w.data() + c * width;
      const double* w = head.weights.data() + c * width;
      for (std::size_t k = 0; k < width; ++k) {
        gw[k] += d_out[c] * h[k];
        d_pre[k] += d_out[c] * w[k];
      }
    }
    for (std::size_t k = 0; k < width; ++k) {
      d_pre[k] *= 1.0 - h[k] * h[k];
      grad_hidden_bias[k] += d_pre[k];
    }
    for (const auto& [bucket, value] : features) {
      auto& row = grad_rows[bucket];
      if (row.empty()) row.assign(width, 0.0);
      for (std::size_t k = 0; k < width; ++k) row[k] += value * d_pre[k];
    }
  }

  for (std::size_t i = 0; i < head.weights.size(); ++i) head.weights[i] -= scale * grad_w[i];
  for (std::size_t c = 0; c < head.outputs; ++c) head.bias[c] -= scale * grad_b[c];
  for (std::size_t k = 0; k < width; ++k) hidden_bias_[k] -= scale * grad_hidden_bias[k];
  // Row order does not matter: each bucket's update is independent.
  for (const auto& [bucket, row] : grad_rows) {
    double* e = embedding_.data() + static_cast<std::size_t>(bucket) * width;
    for (std::size_t k = 0; k < width; ++k) e[k] -= scale * row[k];
  }
  return loss / static_cast<double>(batch.size());
}

double TinyBackend::predict(const std::string& task_id, const Example& example) const {
  auto it = heads_.find(task_id);
  require(it != heads_.end(), ErrorCode::kValidation, "no head for task '" + task_id + "'");
  std::vector<double> h, out;
  hidden_layer(featurize(example), h);
  head_outputs(it->second, h, out);
  if (it->second.regression) return out[0];
  return static_cast<double>(std::max_element(out.begin(), out.end()) - out.begin());
}

double TinyBackend::evaluate(const TaskSpec& spec, const SplitData& split) {
  std::vector<double> predicted, gold;
  predicted.reserve(split.size());
  gold.reserve(split.size());
  for (const auto& ex : split.examples) {
    predicted.push_back(predict(spec.task_id, ex));
    gold.push_back(ex.label);
  }
  return metrics::compute(spec.metric_kind, predicted, gold, spec.class_count());
}

StateToken TinyBackend::snapshot() const {
  StateToken token;
  token.reserve(sizeof(kMagic) + (embedding_.size() + 64) * sizeof(double));
  Writer w(token);
  for (char c : kMagic) w.pod(c);
  w.pod<std::uint32_t>(options_.hash_bits);
  w.pod<std::uint64_t>(options_.hidden);
  w.pod(seed_);
  w.pod(learning_rate_);
  w.doubles(embedding_);
  w.doubles(hidden_bias_);
  w.pod<std::uint64_t>(heads_.size());
  for (const auto& [id, head] : heads_) {
    w.text(id);
    w.pod<std::uint8_t>(head.regression ? 1 : 0);
    w.pod<std::uint64_t>(head.outputs);
    w.doubles(head.weights);
    w.doubles(head.bias);
  }
  return token;
}

void TinyBackend::restore(const StateToken& token) {
  Reader r(token);
  for (char c : kMagic) {
    require(r.pod<char>() == c, ErrorCode::kValidation, "not a tiny-backend state token");
  }
  require(r.pod<std::uint32_t>() == options_.hash_bits && r.pod<std::uint64_t>() == options_.hidden,
          ErrorCode::kValidation, "state token was written with different backend options");
  // Seed and learning rate stay as set by init: a warm start keeps its own
  // run seed for any heads added after the restore.
  r.pod<std::uint64_t>();
  r.pod<double>();
  embedding_ = r.doubles();
  hidden_bias_ = r.doubles();
  const auto heads = r.pod<std::uint64_t>();
  heads_.clear();
  for (std::uint64_t i = 0; i < heads; ++i) {
    std::string id = r.text();
    Head head;
    head.regression = r.pod<std::uint8_t>() != 0;
    head.outputs = r.pod<std::uint64_t>();
    head.weights = r.doubles();
    head.bias = r.doubles();
    heads_.emplace(std::move(id), std::move(head));
  }
  require(r.done(), ErrorCode::kValidation, "trailing bytes in state token");
}

BackendFactory tiny_backend_factory(TinyBackendOptions options) {
  return [options] { return std::make_unique<TinyBackend>(options); };
}

}  // namespace transel
