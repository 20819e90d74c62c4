// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "transel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "transel/error.hpp"

namespace transel::stats {

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  require(a > 0.0 && b > 0.0, transel::ErrorCode::kValidation, "beta parameters must be positive");
  require(x >= 0.0 && x <= 1.0, transel::ErrorCode::kValidation, "x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The continued fraction converges fast only below the mean; use the
  // symmetry I_x(a, b) = 1 - I_{1-x}(b, a) above it.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  require(df > 0.0, transel::ErrorCode::kValidation, "degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double x = df / (df + t * t);
  return std::clamp(regularized_incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

double student_t_cdf(double t, double df) {
  const double tail = 0.5 * student_t_two_sided_p(t, df);
  return t < 0.0 ? tail : 1.0 - tail;
}

double student_t_quantile(double p, double df) {
  require(p > 0.0 && p < 1.0, transel::ErrorCode::kValidation, "quantile level must lie in (0, 1)");
  require(df > 0.0, transel::ErrorCode::kValidation, "degrees of freedom must be positive");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, df);
  double lo = 0.0;
  double hi = 1.0;
  while (student_t_cdf(hi, df) < p) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (student_t_cdf(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Summary aggregate(std::span<const double> values) {
  require(!values.empty(), transel::ErrorCode::kValidation, "cannot aggregate an empty sample");
  Summary s;
  s.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

double confidence_half_width(std::span<const double> values, double level) {
  require(level > 0.0 && level < 1.0, transel::ErrorCode::kValidation, "level must lie in (0, 1)");
  const Summary s = aggregate(values);
  require(s.std.has_value(), transel::ErrorCode::kValidation,
          "a confidence interval needs at least two values");
  if (*s.std == 0.0) return 0.0;
  const double q = student_t_quantile(0.5 * (1.0 + level), static_cast<double>(s.n - 1));
  return q * *s.std / std::sqrt(static_cast<double>(s.n));
}

std::string_view to_string(TTestKind kind) {
  return kind == TTestKind::kWelch ? "welch" : "student";
}

TTestKind parse_ttest_kind(std::string_view text) {
  if (text == "welch") return TTestKind::kWelch;
  if (text == "student") return TTestKind::kStudent;
  throw transel::Error(transel::ErrorCode::kValidation, "unknown t-test kind '" + std::string(text) + "'");
}

TestResult t_test(std::span<const double> a, std::span<const double> b, double alpha,
                  TTestKind kind) {
  require(a.size() >= 2 && b.size() >= 2, transel::ErrorCode::kValidation,
          "t-test needs at least two values per sample");
  require(alpha > 0.0 && alpha < 1.0, transel::ErrorCode::kValidation, "alpha must lie in (0, 1)");
  const Summary sa = aggregate(a);
  const Summary sb = aggregate(b);
  const auto na = static_cast<double>(sa.n);
  const auto nb = static_cast<double>(sb.n);
  const double va = *sa.std * *sa.std;
  const double vb = *sb.std * *sb.std;

  TestResult r;
  r.alpha = alpha;
  double se = 0.0;
  if (kind == TTestKind::kWelch) {
    const double ra = va / na;
    const double rb = vb / nb;
    se = std::sqrt(ra + rb);
    r.degrees_of_freedom = se == 0.0 ? na + nb - 2.0
                                     : (ra + rb) * (ra + rb) /
                                           (ra * ra / (na - 1.0) + rb * rb / (nb - 1.0));
  } else {
    r.degrees_of_freedom = na + nb - 2.0;
    const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / r.degrees_of_freedom;
    se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  }

  const double diff = sa.mean - sb.mean;
  if (se == 0.0) {
    if (diff == 0.0) {
      r.t_statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), diff);
      r.p_value = 0.0;
    }
  } else {
    r.t_statistic = diff / se;
    r.p_value = student_t_two_sided_p(r.t_statistic, r.degrees_of_freedom);
  }
  r.significant = r.p_value < alpha;
  return r;
}

std::string_view to_string(CellLabel label) {
  switch (label) {
    case CellLabel::kMtlBetter: return "MTL_BETTER";
    case CellLabel::kStiltsBetter: return "STILTS_BETTER";
    case CellLabel::kNotSignificant: return "NOT_SIGNIFICANT";
  }
  return "NOT_SIGNIFICANT";
}

CellLabel parse_cell_label(std::string_view text) {
  for (auto l : {CellLabel::kMtlBetter, CellLabel::kStiltsBetter, CellLabel::kNotSignificant}) {
    if (to_string(l) == text) return l;
  }
  throw transel::Error(transel::ErrorCode::kParse, "unknown cell label '" + std::string(text) + "'");
}

std::string to_string(const CellKey& key) {
  return "(" + key.target + ", " + key.support + ")";
}

CellLabel label_for(const TestResult& test, double difference) {
  if (!test.significant || difference == 0.0) return CellLabel::kNotSignificant;
  return difference > 0.0 ? CellLabel::kMtlBetter : CellLabel::kStiltsBetter;
}

const Cell& SignificanceMatrix::at(const std::string& target, const std::string& support) const {
  auto it = cells.find({target, support});
  require(it != cells.end(), transel::ErrorCode::kIncompleteCell,
          "no cell " + to_string(CellKey{target, support}));
  return it->second;
}

std::size_t SignificanceMatrix::significant_count() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& kv) {
    return kv.second.label != CellLabel::kNotSignificant;
  }));
}

SignificanceMatrix build_significance_matrix(const std::map<CellKey, CellSamples>& samples,
                                             std::vector<std::string> task_order, double alpha,
                                             TTestKind kind) {
  SignificanceMatrix m;
  m.tasks = std::move(task_order);
  m.alpha = alpha;
  m.kind = kind;

  for (const auto& [key, s] : samples) {
    require(key.target != key.support, transel::ErrorCode::kValidation,
            "diagonal cell " + to_string(key));
    const bool known = std::find(m.tasks.begin(), m.tasks.end(), key.target) != m.tasks.end() &&
                       std::find(m.tasks.begin(), m.tasks.end(), key.support) != m.tasks.end();
    require(known, transel::ErrorCode::kValidation, "cell " + to_string(key) + " is off the task axis");
  }
  std::string missing;
  for (const auto& target : m.tasks) {
    for (const auto& support : m.tasks) {
      if (target == support) continue;
      const CellKey key{target, support};
      auto it = samples.find(key);
      const bool has_mtl = it != samples.end() && it->second.mtl;
      const bool has_stilts = it != samples.end() && it->second.stilts;
      if (has_mtl && has_stilts) continue;
      const char* what = has_mtl ? " lacks STILTs" : has_stilts ? " lacks MTL" : " lacks MTL and STILTs";
      missing += (missing.empty() ? "" : ", ") + to_string(key) + what;
    }
  }
  if (!missing.empty()) throw transel::Error(transel::ErrorCode::kIncompleteCell, missing);

  for (const auto& [key, s] : samples) {
    const Summary mtl = aggregate(*s.mtl);
    const Summary stilts = aggregate(*s.stilts);
    Cell cell;
    cell.mtl_mean = mtl.mean;
    cell.mtl_std = mtl.std;
    cell.stilts_mean = stilts.mean;
    cell.stilts_std = stilts.std;
    cell.difference = mtl.mean - stilts.mean;
    cell.test = t_test(*s.mtl, *s.stilts, alpha, kind);
    cell.label = label_for(cell.test, cell.difference);
    m.cells.emplace(key, cell);
  }
  return m;
}

}  // namespace transel::stats
