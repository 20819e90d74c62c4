// Copyright 2026 The transel Authors
// SPDX-License-Identifier: Apache-2.0

#include "transel/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "transel/error.hpp"

namespace transel::reporting {

using json = nlohmann::json;

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double scaled = std::fabs(value) * scale;
  const double nudged = scaled + 1e-9 * std::max(1.0, scaled);
  return std::copysign(std::floor(nudged + 0.5) / scale, value);
}

std::string format_fixed(double value, int decimals) {
  double r = round_half_up(value, decimals);
  if (r == 0.0) r = 0.0;  // no "-0.0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, r);
  return buf;
}

namespace {

std::string num(double v, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string signed_fixed(double v) {
  const std::string s = format_fixed(v, 1);
  return (round_half_up(v, 1) > 0.0 ? "+" : "") + s;
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

Grid difference_matrix(const stats::SignificanceMatrix& sig) {
  Grid grid;
  grid.rows = sig.tasks;
  grid.cols = sig.tasks;
  grid.values.assign(sig.tasks.size(), std::vector<std::optional<double>>(sig.tasks.size()));
  for (std::size_t r = 0; r < sig.tasks.size(); ++r) {
    for (std::size_t c = 0; c < sig.tasks.size(); ++c) {
      if (r == c) continue;
      const auto& cell = sig.at(sig.tasks[r], sig.tasks[c]);
      grid.values[r][c] = cell.mtl_mean - cell.stilts_mean;
    }
  }
  return grid;
}

void write_grid_csv(std::ostream& out, const Grid& grid, int decimals) {
  out << "target\\support";
  for (const auto& c : grid.cols) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < grid.rows.size(); ++r) {
    out << grid.rows[r];
    for (std::size_t c = 0; c < grid.cols.size(); ++c) {
      out << ',';
      if (grid.values[r][c]) out << num(*grid.values[r][c], decimals);
    }
    out << '\n';
  }
}

void write_cells_jsonl(std::ostream& out, const stats::SignificanceMatrix& sig) {
  for (const auto& target : sig.tasks) {
    for (const auto& support : sig.tasks) {
      if (target == support) continue;
      auto it = sig.cells.find({target, support});
      if (it == sig.cells.end()) continue;
      const auto& c = it->second;
      json j;
      j["target"] = target;
      j["support"] = support;
      j["mtl_mean"] = c.mtl_mean;
      j["mtl_std"] = optional_number(c.mtl_std);
      j["stilts_mean"] = c.stilts_mean;
      j["stilts_std"] = optional_number(c.stilts_std);
      j["difference"] = c.difference;
      j["label"] = std::string(to_string(c.label));
      // Infinite t (distinct constant samples) is not representable in JSON.
      j["t_statistic"] = std::isfinite(c.test.t_statistic) ? json(c.test.t_statistic)
                                                           : json(c.test.t_statistic > 0 ? "inf" : "-inf");
      j["df"] = c.test.degrees_of_freedom;
      j["p_value"] = c.test.p_value;
      j["alpha"] = c.test.alpha;
      j["significant"] = c.test.significant;
      j["test"] = std::string(to_string(sig.kind));
      out << j.dump() << '\n';
    }
  }
}

std::string_view to_string(RowKind kind) {
  switch (kind) {
    case RowKind::kMtlAll: return "MTL_ALL";
    case RowKind::kAvgStilts: return "AVG_STILTS";
    case RowKind::kAvgMtl: return "AVG_MTL";
    case RowKind::kAvgSh: return "AVG_SH";
    case RowKind::kPairwiseOracle: return "PAIRWISE_ORACLE";
  }
  return "AVG_MTL";
}

const TableRow& AggregateTable::row(std::string_view name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw Error(ErrorCode::kValidation, "no table row '" + std::string(name) + "'");
}

std::optional<double> row_mean(const std::map<std::string, std::optional<double>>& scores) {
  if (scores.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& [_, v] : scores) {
    if (!v) return std::nullopt;
    sum += *v;
  }
  return sum / static_cast<double>(scores.size());
}

AggregateTable table_from_rows(std::vector<std::string> tasks,
                               const std::vector<std::pair<std::string, std::vector<double>>>& rows,
                               RowKind kind_for_all) {
  AggregateTable table;
  table.tasks = std::move(tasks);
  for (const auto& [name, values] : rows) {
    require(values.size() == table.tasks.size(), ErrorCode::kValidation,
            "row '" + name + "' has " + std::to_string(values.size()) + " values for " +
                std::to_string(table.tasks.size()) + " tasks");
    TableRow row;
    row.name = name;
    row.kind = kind_for_all;
    for (std::size_t i = 0; i < values.size(); ++i) row.scores[table.tasks[i]] = values[i];
    row.mean = row_mean(row.scores);
    table.rows.push_back(std::move(row));
  }
  return table;
}

AggregateTable aggregate_table(const stats::SignificanceMatrix& pairwise, const MtlAllScores& mtl_all,
                               const TaskSizes& sizes, Prediction tiebreak,
                               bool allow_missing_mtl_all) {
  const auto& tasks = pairwise.tasks;
  require(tasks.size() >= 2, ErrorCode::kIncomplete, "pairwise results need at least two tasks");
  require(!mtl_all.empty() || allow_missing_mtl_all, ErrorCode::kIncomplete, "no MTL_ALL scores");

  AggregateTable table;
  table.tasks = tasks;

  if (mtl_all.empty()) {
    TableRow row{"MTL_ALL(size)", RowKind::kMtlAll, {}, std::nullopt};
    for (const auto& t : tasks) row.scores[t] = std::nullopt;
    table.rows.push_back(std::move(row));
  }
  for (const auto& [policy, scores] : mtl_all) {
    TableRow row{"MTL_ALL(" + std::string(to_string(policy)) + ")", RowKind::kMtlAll, {}, std::nullopt};
    for (const auto& t : tasks) {
      auto it = scores.find(t);
      require(it != scores.end(), ErrorCode::kIncomplete,
              "MTL_ALL(" + std::string(to_string(policy)) + ") has no score for " + t);
      row.scores[t] = it->second;
    }
    row.mean = row_mean(row.scores);
    table.rows.push_back(std::move(row));
  }

  TableRow stilts{"AVG_STILTS", RowKind::kAvgStilts, {}, std::nullopt};
  TableRow mtl{"AVG_MTL", RowKind::kAvgMtl, {}, std::nullopt};
  TableRow sh{"AVG_SH", RowKind::kAvgSh, {}, std::nullopt};
  TableRow oracle{"PAIRWISE_ORACLE", RowKind::kPairwiseOracle, {}, std::nullopt};
  for (const auto& target : tasks) {
    double sum_stilts = 0.0, sum_mtl = 0.0, sum_sh = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t n = 0;
    for (const auto& support : tasks) {
      if (support == target) continue;
      auto it = pairwise.cells.find({target, support});
      require(it != pairwise.cells.end(), ErrorCode::kIncomplete,
              "missing pairwise cell " + stats::to_string(stats::CellKey{target, support}));
      const auto& cell = it->second;
      auto size_of = [&](const std::string& t) {
        auto s = sizes.find(t);
        require(s != sizes.end(), ErrorCode::kValidation, "no size for task '" + t + "'");
        return s->second;
      };
      const Prediction p = resolve(select_strategy(size_of(target), size_of(support)), tiebreak);
      sum_stilts += cell.stilts_mean;
      sum_mtl += cell.mtl_mean;
      sum_sh += p == Prediction::kMtlPair ? cell.mtl_mean : cell.stilts_mean;
      best = std::max({best, cell.mtl_mean, cell.stilts_mean});
      ++n;
    }
    stilts.scores[target] = sum_stilts / static_cast<double>(n);
    mtl.scores[target] = sum_mtl / static_cast<double>(n);
    sh.scores[target] = sum_sh / static_cast<double>(n);
    oracle.scores[target] = best;
  }
  for (auto* row : {&stilts, &mtl, &sh, &oracle}) {
    row->mean = row_mean(row->scores);
    table.rows.push_back(std::move(*row));
  }
  return table;
}

void write_table_csv(std::ostream& out, const AggregateTable& table) {
  out << "approach,mean";
  for (const auto& t : table.tasks) out << ',' << t;
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.name << ',' << (row.mean ? format_fixed(*row.mean) : "NA");
    for (const auto& t : table.tasks) {
      const auto& v = row.scores.at(t);
      out << ',' << (v ? format_fixed(*v) : "NA");
    }
    out << '\n';
  }
}

void write_table_text(std::ostream& out, const AggregateTable& table) {
  std::vector<std::string> header = {"Approach", "Mean"};
  header.insert(header.end(), table.tasks.begin(), table.tasks.end());
  std::vector<std::vector<std::string>> body;
  for (const auto& row : table.rows) {
    std::vector<std::string> line = {row.name, row.mean ? format_fixed(*row.mean) : "NA"};
    for (const auto& t : table.tasks) {
      const auto& v = row.scores.at(t);
      line.push_back(v ? format_fixed(*v) : "NA");
    }
    body.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& line : body) width[c] = std::max(width[c], line[c].size());
  }
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c == 0) {
        out << std::left << std::setw(static_cast<int>(width[c])) << line[c];
      } else {
        out << "  " << std::right << std::setw(static_cast<int>(width[c])) << line[c];
      }
    }
    out << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  out << std::string(total - 2, '-') << '\n';
  for (const auto& line : body) emit(line);
}

Figure render_heatmap(const Grid& diff, const stats::SignificanceMatrix& sig,
                      const std::vector<std::vector<std::optional<Prediction>>>& predictions,
                      Prediction tiebreak) {
  const std::size_t n = sig.tasks.size();
  require(diff.rows == sig.tasks && diff.cols == sig.tasks && diff.values.size() == n,
          ErrorCode::kValidation, "difference grid does not match the matrix axes");
  require(predictions.size() == n, ErrorCode::kValidation, "prediction grid has the wrong size");
  for (std::size_t r = 0; r < n; ++r) {
    require(diff.values[r].size() == n && predictions[r].size() == n, ErrorCode::kValidation,
            "grid rows have the wrong length");
  }

  constexpr int kCell = 56;
  constexpr int kLeft = 90;
  constexpr int kTop = 110;
  const int width = kLeft + static_cast<int>(n) * kCell + 20;
  const int height = kTop + static_cast<int>(n) * kCell + 60;

  Figure fig;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n";
  svg << "  <title>MTL minus STILTs score difference</title>\n";
  svg << "  <text x=\"" << kLeft << "\" y=\"24\" font-size=\"14\">MTL - STILTs (target rows, support columns; alpha="
      << num(sig.alpha, 3) << ")</text>\n";
  for (std::size_t c = 0; c < n; ++c) {
    const int x = kLeft + static_cast<int>(c) * kCell + kCell / 2;
    svg << "  <text x=\"" << x << "\" y=\"" << kTop - 8 << "\" font-size=\"11\" text-anchor=\"start\" "
        << "transform=\"rotate(-45 " << x << ' ' << kTop - 8 << ")\">" << xml_escape(sig.tasks[c])
        << "</text>\n";
  }
  for (std::size_t r = 0; r < n; ++r) {
    const int y = kTop + static_cast<int>(r) * kCell;
    svg << "  <text x=\"" << kLeft - 6 << "\" y=\"" << y + kCell / 2 + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << xml_escape(sig.tasks[r]) << "</text>\n";
    for (std::size_t c = 0; c < n; ++c) {
      const int x = kLeft + static_cast<int>(c) * kCell;
      if (r == c) {
        svg << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\"" << kCell
            << "\" fill=\"#ffffff\" stroke=\"#999999\" data-diagonal=\"true\"/>\n";
        continue;
      }
      const auto& cell = sig.at(sig.tasks[r], sig.tasks[c]);
      require(diff.values[r][c].has_value() && predictions[r][c].has_value(), ErrorCode::kValidation,
              "grid is missing an off-diagonal entry");
      HeatmapCellAnnotation a;
      a.target = sig.tasks[r];
      a.support = sig.tasks[c];
      a.value = *diff.values[r][c];
      std::string fill;
      switch (cell.label) {
        case stats::CellLabel::kStiltsBetter: a.color = "green"; fill = "#74c476"; break;
        case stats::CellLabel::kMtlBetter: a.color = "blue"; fill = "#6baed6"; break;
        case stats::CellLabel::kNotSignificant: a.color = "grey"; fill = "#d9d9d9"; break;
      }
      a.red_numeral = cell.label != stats::CellLabel::kNotSignificant &&
                      !agrees(cell.label, resolve(*predictions[r][c], tiebreak));
      svg << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\"" << kCell
          << "\" fill=\"" << fill << "\" stroke=\"#ffffff\" data-target=\"" << xml_escape(a.target)
          << "\" data-support=\"" << xml_escape(a.support) << "\" data-label=\""
          << to_string(cell.label) << "\" data-color=\"" << a.color << "\" data-red=\""
          << (a.red_numeral ? "true" : "false") << "\"/>\n";
      svg << "  <text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
          << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"" << (a.red_numeral ? "#d62728" : "#000000")
          << "\">" << signed_fixed(a.value) << "</text>\n";
      fig.cells.push_back(std::move(a));
    }
  }
  const int ly = kTop + static_cast<int>(n) * kCell + 24;
  svg << "  <rect x=\"" << kLeft << "\" y=\"" << ly - 10 << "\" width=\"12\" height=\"12\" fill=\"#6baed6\"/>"
      << "<text x=\"" << kLeft + 16 << "\" y=\"" << ly << "\" font-size=\"11\">MTL better</text>\n";
  svg << "  <rect x=\"" << kLeft + 100 << "\" y=\"" << ly - 10
      << "\" width=\"12\" height=\"12\" fill=\"#74c476\"/><text x=\"" << kLeft + 116 << "\" y=\"" << ly
      << "\" font-size=\"11\">STILTs better</text>\n";
  svg << "  <rect x=\"" << kLeft + 210 << "\" y=\"" << ly - 10
      << "\" width=\"12\" height=\"12\" fill=\"#d9d9d9\"/><text x=\"" << kLeft + 226 << "\" y=\"" << ly
      << "\" font-size=\"11\">not significant</text>\n";
  svg << "</svg>\n";
  fig.svg = svg.str();
  return fig;
}

SweepFigure render_size_sweep(const SweepSeries& mtl, const SweepSeries& stilts, std::string_view title) {
  require(!mtl.proportions.empty() && !stilts.proportions.empty(), ErrorCode::kValidation,
          "each method needs at least one proportion");
  require(mtl.proportions == stilts.proportions, ErrorCode::kValidation,
          "MTL and STILTs were run on different K grids");
  require(mtl.samples.size() == mtl.proportions.size() &&
              stilts.samples.size() == stilts.proportions.size(),
          ErrorCode::kValidation, "one sample per proportion is required");
  for (double k : mtl.proportions) require(k > 0.0, ErrorCode::kValidation, "K must be positive");

  SweepFigure fig;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* series : {&mtl, &stilts}) {
    const std::string method = series == &mtl ? "MTL" : "STILTS";
    for (std::size_t i = 0; i < series->proportions.size(); ++i) {
      const auto s = stats::aggregate(series->samples[i]);
      SweepPointAnnotation p;
      p.method = method;
      p.proportion = series->proportions[i];
      p.mean = s.mean;
      p.n = s.n;
      p.half_width = s.n >= 2 ? stats::confidence_half_width(series->samples[i], 0.90) : 0.0;
      lo = std::min(lo, p.mean - p.half_width);
      hi = std::max(hi, p.mean + p.half_width);
      fig.points.push_back(p);
    }
  }
  if (hi - lo < 1e-9) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  constexpr double kW = 640, kH = 400, kL = 70, kR = 20, kT = 40, kB = 60;
  const double kmin = std::log2(mtl.proportions.front());
  const double kmax = std::log2(mtl.proportions.back());
  auto px = [&](double k) {
    if (kmax == kmin) return kL + 0.5 * (kW - kL - kR);
    return kL + (std::log2(k) - kmin) / (kmax - kmin) * (kW - kL - kR);
  };
  auto py = [&](double v) { return kT + (hi - v) / (hi - lo) * (kH - kT - kB); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\" font-family=\"sans-serif\">\n";
  svg << "  <title>" << xml_escape(title) << "</title>\n";
  svg << "  <line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\"" << kH - kB
      << "\" stroke=\"#000000\"/>\n";
  svg << "  <line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB
      << "\" stroke=\"#000000\"/>\n";
  for (double k : mtl.proportions) {
    svg << "  <text x=\"" << num(px(k)) << "\" y=\"" << kH - kB + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << num(k, 2) << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    svg << "  <text x=\"" << kL - 6 << "\" y=\"" << num(py(v) + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
        << num(v, 1) << "</text>\n";
  }
  svg << "  <text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 16
      << "\" font-size=\"12\" text-anchor=\"middle\">" << xml_escape(title) << "</text>\n";

  for (const std::string method : {"MTL", "STILTS"}) {
    const std::string color = method == "MTL" ? "#1f77b4" : "#2ca02c";
    std::string points;
    for (const auto& p : fig.points) {
      if (p.method != method) continue;
      points += num(px(p.proportion)) + "," + num(py(p.mean)) + " ";
    }
    svg << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << points
        << "\" data-method=\"" << method << "\"/>\n";
    for (const auto& p : fig.points) {
      if (p.method != method) continue;
      const double x = px(p.proportion);
      svg << "  <line x1=\"" << num(x) << "\" y1=\"" << num(py(p.mean - p.half_width)) << "\" x2=\""
          << num(x) << "\" y2=\"" << num(py(p.mean + p.half_width)) << "\" stroke=\"" << color
          << "\" data-method=\"" << method << "\" data-k=\"" << num(p.proportion, 6) << "\" data-mean=\""
          << num(p.mean, 6) << "\" data-halfwidth=\"" << num(p.half_width, 9) << "\" data-n=\"" << p.n
          << "\"/>\n";
      svg << "  <circle cx=\"" << num(x) << "\" cy=\"" << num(py(p.mean)) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
  }
  svg << "  <text x=\"" << kW - kR - 120 << "\" y=\"" << kT - 14
      << "\" font-size=\"11\" fill=\"#1f77b4\">MTL</text><text x=\"" << kW - kR - 70 << "\" y=\"" << kT - 14
      << "\" font-size=\"11\" fill=\"#2ca02c\">STILTs</text>\n";
  svg << "</svg>\n";
  fig.svg = svg.str();
  return fig;
}

void write_sweep_csv(std::ostream& out, const SweepFigure& figure) {
  out << "method,proportion,n,mean,ci90_half_width\n";
  for (const auto& p : figure.points) {
    out << p.method << ',' << num(p.proportion, 6) << ',' << p.n << ',' << num(p.mean, 6) << ','
        << num(p.half_width, 6) << '\n';
  }
}

}  // namespace transel::reporting
