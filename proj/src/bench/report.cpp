#include "nbv/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nbv/bench/stats.hpp"
#include "nbv/core/errors.hpp"

namespace nbv {

namespace {

using njson = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

njson seed_to_json(const SeedRun& s) {
  njson j;
  j["seed"] = s.seed;
  j["error"] = s.error;
  j["poses"] = s.pose_indices;
  j["cloud_points"] = s.cloud_points;
  j["curve"] = s.curve;
  j["auc"] = s.auc;
  njson rows = njson::array();
  for (const auto& r : s.theorem_rows) {
    rows.push_back({{"mu", r.mu}, {"volume_integral", r.volume_integral}, {"gap", r.gap}});
  }
  j["theorem_rows"] = std::move(rows);
  return j;
}

SeedRun seed_from_json(const njson& j) {
  SeedRun s;
  s.seed = j.at("seed").get<uint64_t>();
  s.error = j.at("error").get<std::string>();
  s.pose_indices = j.at("poses").get<std::vector<int>>();
  s.cloud_points = j.at("cloud_points").get<std::vector<std::size_t>>();
  s.curve = j.at("curve").get<std::vector<double>>();
  s.auc = j.at("auc").get<double>();
  for (const auto& r : j.at("theorem_rows")) {
    s.theorem_rows.push_back({r.at("mu").get<double>(), r.at("volume_integral").get<double>(),
                              r.at("gap").get<double>()});
  }
  return s;
}

// CSV field quoting for labels that may carry commas or quotes.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string scene_label(const ExperimentConfig& config) {
  return config.mesh_path.empty() ? config.shape.name : config.mesh_path;
}

std::string emit_report(const RunReport& report) {
  njson j;
  j["version"] = report.version;
  j["protocol"] = protocol_name(report.config.protocol);
  j["config"] = to_flat_map(report.config);
  njson seeds = njson::array();
  for (const auto& s : report.seeds) seeds.push_back(seed_to_json(s));
  j["seeds"] = std::move(seeds);
  j["aggregate"] = {{"seeds_ok", report.seeds_ok},
                    {"mean_auc", report.mean_auc},
                    {"std_auc", report.std_auc}};
  if (report.config.protocol == Protocol::verify_theorem) {
    njson rows = njson::array();
    for (const auto& r : report.theorem.rows) {
      rows.push_back({{"mu", r.mu},
                      {"volume_integral", r.volume_integral},
                      {"gap", r.gap},
                      {"sigma", r.sigma}});
    }
    j["theorem"] = {{"rows", std::move(rows)},
                    {"slope", report.theorem.slope},
                    {"conclusive", report.theorem.conclusive},
                    {"pass", report.theorem.pass}};
  }
  j["wall_time_sec"] = report.wall_time_sec;
  return j.dump(2) + "\n";
}

RunReport parse_report(const std::string& json_text) {
  try {
    const njson j = njson::parse(json_text);
    RunReport r;
    r.version = j.at("version").get<std::string>();
    ExperimentConfig config;
    for (const auto& [key, value] : j.at("config").get<std::map<std::string, std::string>>()) {
      apply_config_entry(config, key, value);
    }
    r.config = std::move(config);
    for (const auto& s : j.at("seeds")) r.seeds.push_back(seed_from_json(s));
    const auto& agg = j.at("aggregate");
    r.seeds_ok = agg.at("seeds_ok").get<std::size_t>();
    r.mean_auc = agg.at("mean_auc").get<double>();
    r.std_auc = agg.at("std_auc").get<double>();
    if (j.contains("theorem")) {
      const auto& t = j.at("theorem");
      for (const auto& row : t.at("rows")) {
        r.theorem.rows.push_back({row.at("mu").get<double>(),
                                  row.at("volume_integral").get<double>(),
                                  row.at("gap").get<double>(), row.at("sigma").get<double>()});
      }
      r.theorem.slope = t.at("slope").get<double>();
      r.theorem.conclusive = t.at("conclusive").get<bool>();
      r.theorem.pass = t.at("pass").get<bool>();
    }
    r.wall_time_sec = j.at("wall_time_sec").get<double>();
    return r;
  } catch (const njson::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("report config echo: ") + e.what());
  }
}

RunReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("report: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_report(buf.str());
}

void write_curve_csv(const SeedRun& run, std::ostream& os) {
  os << "step,pose,coverage,cloud_points\n";
  for (std::size_t i = 0; i < run.curve.size(); ++i) {
    os << i << ',' << run.pose_indices[i] << ',' << fmt17(run.curve[i]) << ','
       << run.cloud_points[i] << '\n';
  }
}

void write_theorem_csv(const TheoremVerdict& verdict, std::ostream& os) {
  os << "mu,volume_integral,gap,sigma\n";
  for (const auto& r : verdict.rows) {
    os << fmt17(r.mu) << ',' << fmt17(r.volume_integral) << ',' << fmt17(r.gap) << ','
       << fmt17(r.sigma) << '\n';
  }
}

namespace {

// Shared plot frame: margins, axes, tick labels.
struct PlotFrame {
  static constexpr double kW = 640.0, kH = 400.0;
  static constexpr double kLeft = 64.0, kRight = 20.0, kTop = 42.0, kBottom = 52.0;
  double x0, x1, y0, y1;  // data ranges

  double px(double x) const {
    const double t = x1 > x0 ? (x - x0) / (x1 - x0) : 0.5;
    return kLeft + t * (kW - kLeft - kRight);
  }
  double py(double y) const {
    const double t = y1 > y0 ? (y - y0) / (y1 - y0) : 0.5;
    return kH - kBottom - t * (kH - kTop - kBottom);
  }
};

void svg_open(std::ostream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 400\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n"
     << "<text x=\"320\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
     << "</text>\n";
}

void svg_axes(std::ostream& os, const PlotFrame& f, const std::string& xlabel,
              const std::string& ylabel) {
  os << "<line x1=\"" << f.kLeft << "\" y1=\"" << f.kH - f.kBottom << "\" x2=\""
     << f.kW - f.kRight << "\" y2=\"" << f.kH - f.kBottom << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << f.kLeft << "\" y1=\"" << f.kTop << "\" x2=\"" << f.kLeft << "\" y2=\""
     << f.kH - f.kBottom << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << (f.kLeft + f.kW - f.kRight) / 2 << "\" y=\"" << f.kH - 14
     << "\" text-anchor=\"middle\">" << xlabel << "</text>\n"
     << "<text x=\"16\" y=\"" << (f.kTop + f.kH - f.kBottom) / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (f.kTop + f.kH - f.kBottom) / 2 << ")\">" << ylabel << "</text>\n";
}

void svg_tick_x(std::ostream& os, const PlotFrame& f, double x, const std::string& label) {
  const double px = f.px(x), base = f.kH - f.kBottom;
  os << "<line x1=\"" << px << "\" y1=\"" << base << "\" x2=\"" << px << "\" y2=\"" << base + 5
     << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << px << "\" y=\"" << base + 18 << "\" text-anchor=\"middle\">" << label
     << "</text>\n";
}

void svg_tick_y(std::ostream& os, const PlotFrame& f, double y, const std::string& label) {
  const double py = f.py(y);
  os << "<line x1=\"" << f.kLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << f.kLeft << "\" y2=\""
     << py << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << f.kLeft - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << label
     << "</text>\n";
}

void svg_polyline(std::ostream& os, const PlotFrame& f, const std::vector<double>& xs,
                  const std::vector<double>& ys, const char* stroke, double width) {
  os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width
     << "\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ' ';
    os << fmt6(f.px(xs[i])) << ',' << fmt6(f.py(ys[i]));
  }
  os << "\"/>\n";
}

}  // namespace

void write_coverage_svg(const RunReport& report, std::ostream& os) {
  std::vector<const SeedRun*> ok;
  std::size_t max_len = 1;
  for (const auto& s : report.seeds) {
    if (!s.ok() || s.curve.empty()) continue;
    ok.push_back(&s);
    max_len = std::max(max_len, s.curve.size());
  }
  PlotFrame f{0.0, static_cast<double>(max_len - 1), 0.0, 1.0};
  if (max_len == 1) f.x1 = 1.0;
  svg_open(os, scene_label(report.config) + " — " + policy_name(report.config.policy) +
                   " (seeds ok: " + std::to_string(ok.size()) + ")");
  svg_axes(os, f, "step", "surface coverage");
  for (double y = 0.0; y <= 1.0 + 1e-9; y += 0.25) svg_tick_y(os, f, y, fmt6(y));
  const std::size_t x_step = std::max<std::size_t>(1, (max_len - 1) / 8);
  for (std::size_t x = 0; x < max_len; x += x_step) {
    svg_tick_x(os, f, static_cast<double>(x), std::to_string(x));
  }
  std::size_t min_len = max_len;
  for (const SeedRun* s : ok) min_len = std::min(min_len, s->curve.size());
  for (const SeedRun* s : ok) {
    std::vector<double> xs(s->curve.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
    svg_polyline(os, f, xs, s->curve, "#9db2c8", 1.0);
  }
  if (!ok.empty()) {
    std::vector<double> xs(min_len), ms(min_len);
    for (std::size_t i = 0; i < min_len; ++i) {
      xs[i] = static_cast<double>(i);
      double acc = 0.0;
      for (const SeedRun* s : ok) acc += s->curve[i];
      ms[i] = acc / static_cast<double>(ok.size());
    }
    svg_polyline(os, f, xs, ms, "#c0392b", 2.5);
  }
  os << "</svg>\n";
}

void write_theorem_svg(const RunReport& report, std::ostream& os) {
  std::vector<double> lx, ly;
  for (const auto& r : report.theorem.rows) {
    if (r.mu > 0.0 && r.gap > 0.0) {
      lx.push_back(std::log10(r.mu));
      ly.push_back(std::log10(r.gap));
    }
  }
  char slope_buf[64];
  std::snprintf(slope_buf, sizeof slope_buf, "fitted order %.3f%s", report.theorem.slope,
                report.theorem.conclusive ? "" : " (inconclusive)");
  if (lx.size() < 2) {
    PlotFrame f{0.0, 1.0, 0.0, 1.0};
    svg_open(os, std::string("shell-integral gap — ") + slope_buf);
    svg_axes(os, f, "mu (log10)", "gap (log10)");
    os << "<text x=\"320\" y=\"200\" text-anchor=\"middle\">not enough positive gaps to "
          "plot</text>\n</svg>\n";
    return;
  }
  const auto [xmin, xmax] = std::minmax_element(lx.begin(), lx.end());
  const auto [ymin, ymax] = std::minmax_element(ly.begin(), ly.end());
  const double padx = 0.08 * std::max(1e-6, *xmax - *xmin);
  const double pady = 0.08 * std::max(1e-6, *ymax - *ymin);
  PlotFrame f{*xmin - padx, *xmax + padx, *ymin - pady, *ymax + pady};
  svg_open(os, std::string("shell-integral gap — ") + slope_buf);
  svg_axes(os, f, "mu (log10)", "gap (log10)");
  for (const double x : lx) svg_tick_x(os, f, x, fmt6(x));
  svg_tick_y(os, f, *ymin, fmt6(*ymin));
  svg_tick_y(os, f, *ymax, fmt6(*ymax));
  // Fitted-order line through the centroid of the log-log points.
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    cx += lx[i];
    cy += ly[i];
  }
  cx /= static_cast<double>(lx.size());
  cy /= static_cast<double>(lx.size());
  const double s = report.theorem.slope;
  svg_polyline(os, f, {f.x0, f.x1}, {cy + s * (f.x0 - cx), cy + s * (f.x1 - cx)}, "#888", 1.0);
  for (std::size_t i = 0; i < lx.size(); ++i) {
    os << "<circle cx=\"" << fmt6(f.px(lx[i])) << "\" cy=\"" << fmt6(f.py(ly[i]))
       << "\" r=\"4\" fill=\"#c0392b\"/>\n";
  }
  os << "</svg>\n";
}

ComparisonTable compare_reports(std::span<const RunReport> reports) {
  if (reports.size() < 2) throw InvalidInput("compare: need at least 2 reports");
  const Protocol protocol = reports[0].config.protocol;
  for (const auto& r : reports) {
    if (r.config.protocol != protocol) {
      throw InvalidInput(std::string("compare: protocol mismatch ('") + protocol_name(protocol) +
                         "' vs '" + protocol_name(r.config.protocol) + "')");
    }
  }
  if (protocol == Protocol::verify_theorem) {
    throw InvalidInput("compare: reconstruction reports only (got verify-theorem)");
  }

  ComparisonTable table;
  std::map<std::string, int> used;
  std::vector<int> row_of(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const std::string base = policy_name(reports[i].config.policy);
    const int n = ++used[base];
    table.columns.push_back(n == 1 ? base : base + "#" + std::to_string(n));
    const std::string scene = scene_label(reports[i].config);
    auto it = std::find(table.scenes.begin(), table.scenes.end(), scene);
    if (it == table.scenes.end()) {
      table.scenes.push_back(scene);
      row_of[i] = static_cast<int>(table.scenes.size()) - 1;
    } else {
      row_of[i] = static_cast<int>(it - table.scenes.begin());
    }
  }
  table.cells.assign(table.scenes.size(),
                     std::vector<std::optional<ComparisonCell>>(table.columns.size()));
  for (std::size_t i = 0; i < reports.size(); ++i) {
    table.cells[row_of[i]][i] = ComparisonCell{reports[i].mean_auc, reports[i].std_auc,
                                               static_cast<int>(reports[i].seeds_ok)};
  }

  // Paired tests between columns that share a scene and an identical set of
  // successful seeds (pairing by seed value).
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (std::size_t j = i + 1; j < reports.size(); ++j) {
      if (row_of[i] != row_of[j]) continue;
      std::map<uint64_t, double> ai, aj;
      for (const auto& s : reports[i].seeds) {
        if (s.ok()) ai[s.seed] = s.auc;
      }
      for (const auto& s : reports[j].seeds) {
        if (s.ok()) aj[s.seed] = s.auc;
      }
      bool match = !ai.empty() && ai.size() == aj.size();
      if (match) {
        for (const auto& [seed, auc] : ai) {
          if (!aj.count(seed)) {
            match = false;
            break;
          }
        }
      }
      if (!match) {
        table.notes.push_back("p-value omitted for " + table.columns[i] + " vs " +
                              table.columns[j] + " on " + table.scenes[row_of[i]] +
                              ": seed lists differ");
        continue;
      }
      std::vector<double> a, b;
      for (const auto& [seed, auc] : ai) {
        a.push_back(auc);
        b.push_back(aj.at(seed));
      }
      table.p_values.push_back({table.scenes[row_of[i]], table.columns[i], table.columns[j],
                                paired_t_pvalue(a, b)});
    }
  }
  return table;
}

void write_comparison_csv(const ComparisonTable& table, std::ostream& os) {
  os << "scene";
  for (const auto& c : table.columns) os << ',' << csv_field(c);
  os << '\n';
  for (std::size_t r = 0; r < table.scenes.size(); ++r) {
    os << csv_field(table.scenes[r]);
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      os << ',';
      if (table.cells[r][c]) {
        const auto& cell = *table.cells[r][c];
        os << csv_field(fmt6(cell.mean_auc) + " +- " + fmt6(cell.std_auc) + " (n=" +
                        std::to_string(cell.seeds) + ")");
      }
    }
    os << '\n';
  }
  if (!table.p_values.empty()) {
    os << "# paired one-sided p-values (a > b)\n"
       << "scene,a,b,p\n";
    for (const auto& p : table.p_values) {
      os << csv_field(p.scene) << ',' << csv_field(p.col_a) << ',' << csv_field(p.col_b) << ','
         << fmt6(p.p_a_over_b) << '\n';
    }
  }
  for (const auto& note : table.notes) os << "# note: " << note << '\n';
}

}  // namespace nbv
