#include "phasels/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace phasels::io {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON");
  return j;
}

SolverParams solver_params_from(const json& j) {
  SolverParams p;
  p.rho = j.value("rho", p.rho);
  p.tol_abs = j.value("tol_abs", p.tol_abs);
  p.tol_rel = j.value("tol_rel", p.tol_rel);
  p.max_iter = j.value("max_iter", p.max_iter);
  p.slack = j.value("slack", p.slack);
  const std::string mode = j.value("mode", std::string("full"));
  if (mode == "full")
    p.mode = SolveMode::full;
  else if (mode == "two_stage")
    p.mode = SolveMode::two_stage;
  else
    throw ParseError("solver mode must be \"full\" or \"two_stage\"");
  return p;
}

json solver_params_json(const SolverParams& p) {
  return json{{"rho", p.rho},
              {"tol_abs", p.tol_abs},
              {"tol_rel", p.tol_rel},
              {"max_iter", p.max_iter},
              {"slack", p.slack},
              {"mode", p.mode == SolveMode::two_stage ? "two_stage" : "full"}};
}

SparseSignal signal_from(const json& j) {
  if (!j.contains("n") || !j.contains("entries"))
    throw ParseError("signal JSON needs \"n\" and \"entries\"");
  std::vector<SpikeEntry> entries;
  for (const auto& e : j.at("entries"))
    entries.push_back({e.at("t").get<int>(),
                       Complex(e.at("re").get<double>(), e.at("im").get<double>())});
  return SparseSignal(j.at("n").get<int>(), std::move(entries));
}

json signal_json(const SparseSignal& x) {
  json entries = json::array();
  for (const auto& e : x.entries())
    entries.push_back(json{{"t", e.position},
                           {"re", e.amplitude.real()},
                           {"im", e.amplitude.imag()}});
  return json{{"n", x.grid_length()}, {"entries", entries}};
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string signal_to_json(const SparseSignal& x) { return signal_json(x).dump(2); }

SparseSignal signal_from_json(const std::string& text) { return signal_from(parse(text)); }

std::string solver_params_to_json(const SolverParams& p) {
  return solver_params_json(p).dump(2);
}

SolverParams solver_params_from_json(const std::string& text) {
  return solver_params_from(parse(text));
}

std::string solver_report_to_json(const SolverReport& r) {
  const char* status = r.status == SolveStatus::converged      ? "converged"
                       : r.status == SolveStatus::infeasible   ? "infeasible"
                                                               : "max_iterations";
  return json{{"iterations", r.iterations},
              {"primal_residual", r.primal_residual},
              {"dual_residual", r.dual_residual},
              {"constraint_violation", r.constraint_violation},
              {"converged", r.converged},
              {"objective", r.objective},
              {"status", status}}
      .dump(2);
}

std::string certificate_report_to_json(const CertificateReport& r) {
  return json{{"psd", r.psd},
              {"slackness", r.slackness},
              {"rank_ok", r.rank_ok},
              {"min_eig", r.min_eig},
              {"null_angle_to_z", r.null_angle_to_z}}
      .dump(2);
}

TrialConfig trial_config_from_json(const std::string& text) {
  const json j = parse(text);
  TrialConfig cfg;
  cfg.n = j.value("n", cfg.n);
  cfg.k_freq_range = j.value("k_freq_range", cfg.k_freq_range);
  cfg.delta_range = j.value("delta_range", cfg.delta_range);
  cfg.l1 = j.value("l1", cfg.l1);
  cfg.l2 = j.value("l2", cfg.l2);
  cfg.trials_per_cell = j.value("trials_per_cell", cfg.trials_per_cell);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.snr_list_db = j.value("snr_list_db", cfg.snr_list_db);
  cfg.success_threshold = j.value("success_threshold", cfg.success_threshold);
  if (j.contains("solver")) cfg.solver = solver_params_from(j.at("solver"));
  cfg.workers = j.value("workers", cfg.workers);
  return cfg;
}

std::string trial_config_to_json(const TrialConfig& cfg) {
  return json{{"n", cfg.n},
              {"k_freq_range", cfg.k_freq_range},
              {"delta_range", cfg.delta_range},
              {"l1", cfg.l1},
              {"l2", cfg.l2},
              {"trials_per_cell", cfg.trials_per_cell},
              {"seed", cfg.seed},
              {"snr_list_db", cfg.snr_list_db},
              {"success_threshold", cfg.success_threshold},
              {"solver", solver_params_json(cfg.solver)},
              {"workers", cfg.workers}}
      .dump(2);
}

DoaScene doa_scene_from_json(const std::string& text) {
  const json j = parse(text);
  DoaScene scene;
  scene.wavelength = j.at("wavelength").get<double>();
  scene.k_receivers = j.at("k_receivers").get<int>();
  scene.l1 = j.at("l1").get<int>();
  scene.l2 = j.at("l2").get<int>();
  for (const auto& o : j.at("objects")) {
    DoaObject obj;
    obj.theta = o.at("theta").get<double>();
    obj.range = o.at("r").get<double>();
    obj.reflectivity = Complex(o.value("rho_re", 1.0), o.value("rho_im", 0.0));
    scene.objects.push_back(obj);
  }
  return scene;
}

CdiScene cdi_scene_from_json(const std::string& text) {
  const json j = parse(text);
  CdiScene scene;
  scene.wavelength = j.at("wavelength").get<double>();
  scene.distance = j.at("distance").get<double>();
  scene.l1 = j.at("l1").get<int>();
  scene.l2 = j.at("l2").get<int>();
  const json& obj = j.at("object");
  const int n = obj.at("n").get<int>();
  scene.object_samples = Eigen::VectorXcd::Zero(n);
  for (const auto& s : obj.at("samples")) {
    const int t = s.at("t").get<int>();
    if (t < 0 || t >= n) throw ParseError("object sample index out of range");
    scene.object_samples(t) = Complex(s.at("re").get<double>(), s.at("im").get<double>());
  }
  return scene;
}

std::string measurement_grid_to_csv(const MeasurementGrid& z) {
  std::ostringstream out;
  out << "m,r,value\n";
  for (int m = -z.k_freq(); m <= z.k_freq(); ++m)
    for (int r = 0; r < z.r_masks(); ++r)
      out << m << "," << r << "," << format_double(z.at(m, r)) << "\n";
  return out.str();
}

MeasurementGrid measurement_grid_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("m,r,value", 0) != 0)
    throw ParseError("measurement CSV must start with header m,r,value");
  struct Row {
    int m, r;
    double value;
  };
  std::vector<Row> rows;
  int k_freq = 0, r_masks = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Row row;
    char* end = nullptr;
    row.m = static_cast<int>(std::strtol(line.c_str(), &end, 10));
    if (*end != ',') throw ParseError("bad measurement CSV row: " + line);
    char* end2 = nullptr;
    row.r = static_cast<int>(std::strtol(end + 1, &end2, 10));
    if (*end2 != ',') throw ParseError("bad measurement CSV row: " + line);
    row.value = std::strtod(end2 + 1, nullptr);
    rows.push_back(row);
    k_freq = std::max(k_freq, std::abs(row.m));
    r_masks = std::max(r_masks, row.r + 1);
  }
  if (rows.empty()) throw ParseError("measurement CSV has no data rows");
  MeasurementGrid z(k_freq, r_masks);
  for (const auto& row : rows) z.at(row.m, row.r) = row.value;
  return z;
}

std::string phase_transition_to_csv(const PhaseTransitionResult& r) {
  std::ostringstream out;
  out << "K,delta,success_rate\n";
  for (const auto& cell : r.cells)
    out << cell.k_freq << "," << cell.delta << "," << format_double(cell.success_rate)
        << "\n";
  return out.str();
}

std::string snr_sweep_to_csv(const SnrSweepResult& r) {
  std::ostringstream out;
  out << "snr_db,mse\n";
  for (const auto& p : r.points)
    out << format_double(p.snr_db) << "," << format_double(p.mse) << "\n";
  return out.str();
}

std::string dense_vector_to_csv(const Eigen::VectorXcd& v) {
  std::ostringstream out;
  out << "index,re,im\n";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out << i << "," << format_double(v(i).real()) << "," << format_double(v(i).imag())
        << "\n";
  return out.str();
}

namespace {

std::string grey_fill(double rate) {
  const int level = static_cast<int>(std::lround(255.0 * std::clamp(rate, 0.0, 1.0)));
  std::ostringstream out;
  out << "rgb(" << level << "," << level << "," << level << ")";
  return out.str();
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string heatmap_svg(const PhaseTransitionResult& r) {
  // Axis values in first-seen order; K increases upward, delta to the right.
  std::vector<int> ks, deltas;
  for (const auto& c : r.cells) {
    if (std::find(ks.begin(), ks.end(), c.k_freq) == ks.end()) ks.push_back(c.k_freq);
    if (std::find(deltas.begin(), deltas.end(), c.delta) == deltas.end())
      deltas.push_back(c.delta);
  }
  std::sort(ks.begin(), ks.end());
  std::sort(deltas.begin(), deltas.end());

  const int cell = 28, margin = 56;
  const int width = margin + cell * static_cast<int>(deltas.size()) + 16;
  const int height = margin + cell * static_cast<int>(ks.size()) + 16;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  for (const auto& c : r.cells) {
    const auto kx = std::find(ks.begin(), ks.end(), c.k_freq) - ks.begin();
    const auto dx = std::find(deltas.begin(), deltas.end(), c.delta) - deltas.begin();
    const int x = margin + static_cast<int>(dx) * cell;
    const int y = 16 + static_cast<int>(ks.size() - 1 - kx) * cell;
    out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
        << "\" height=\"" << cell << "\" fill=\"" << grey_fill(c.success_rate)
        << "\" stroke=\"#888\" stroke-width=\"0.5\"/>\n";
  }
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    out << "<text x=\"" << margin + static_cast<int>(i) * cell + cell / 2 << "\" y=\""
        << 16 + static_cast<int>(ks.size()) * cell + 14
        << "\" font-size=\"10\" text-anchor=\"middle\">" << deltas[i] << "</text>\n";
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    out << "<text x=\"" << margin - 6 << "\" y=\""
        << 16 + static_cast<int>(ks.size() - 1 - i) * cell + cell / 2 + 4
        << "\" font-size=\"10\" text-anchor=\"end\">" << ks[i] << "</text>\n";
  }
  out << "<text x=\"" << margin + cell * static_cast<int>(deltas.size()) / 2
      << "\" y=\"" << height - 2 << "\" font-size=\"11\" text-anchor=\"middle\">"
      << "delta</text>\n";
  out << "<text x=\"12\" y=\"" << 16 + cell * static_cast<int>(ks.size()) / 2
      << "\" font-size=\"11\" text-anchor=\"middle\">K</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string mse_svg(const SnrSweepResult& r) {
  const int width = 420, height = 300, ml = 64, mr = 16, mt = 16, mb = 44;
  const int pw = width - ml - mr, ph = height - mt - mb;

  double x_lo = r.points.front().snr_db, x_hi = r.points.back().snr_db;
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  double y_lo = 0.0, y_hi = 0.0;
  bool first = true;
  for (const auto& p : r.points) {
    if (!(p.mse > 0.0) || std::isinf(p.mse)) continue;
    const double ly = std::log10(p.mse);
    if (first) {
      y_lo = y_hi = ly;
      first = false;
    }
    y_lo = std::min(y_lo, ly);
    y_hi = std::max(y_hi, ly);
  }
  if (first) {
    y_lo = -1.0;
    y_hi = 0.0;
  }
  y_lo = std::floor(y_lo) - 0.5;
  y_hi = std::ceil(y_hi) + 0.5;

  const auto px = [&](double snr) { return ml + pw * (snr - x_lo) / (x_hi - x_lo); };
  const auto py = [&](double ly) { return mt + ph * (y_hi - ly) / (y_hi - y_lo); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int tick = static_cast<int>(std::ceil(y_lo)); tick <= std::floor(y_hi); ++tick) {
    out << "<line x1=\"" << ml << "\" y1=\"" << fmt_short(py(tick)) << "\" x2=\""
        << ml + pw << "\" y2=\"" << fmt_short(py(tick))
        << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    out << "<text x=\"" << ml - 6 << "\" y=\"" << fmt_short(py(tick) + 3)
        << "\" font-size=\"10\" text-anchor=\"end\">1e" << tick << "</text>\n";
  }
  for (const auto& p : r.points) {
    out << "<text x=\"" << fmt_short(px(p.snr_db)) << "\" y=\"" << mt + ph + 14
        << "\" font-size=\"10\" text-anchor=\"middle\">" << fmt_short(p.snr_db)
        << "</text>\n";
  }

  std::ostringstream line;
  bool any = false;
  for (const auto& p : r.points) {
    if (!(p.mse > 0.0) || std::isinf(p.mse)) continue;
    line << (any ? " " : "") << fmt_short(px(p.snr_db)) << ","
         << fmt_short(py(std::log10(p.mse)));
    any = true;
  }
  if (any)
    out << "<polyline points=\"" << line.str()
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  for (const auto& p : r.points) {
    if (!(p.mse > 0.0) || std::isinf(p.mse)) continue;
    out << "<circle cx=\"" << fmt_short(px(p.snr_db)) << "\" cy=\""
        << fmt_short(py(std::log10(p.mse)))
        << "\" r=\"2.5\" fill=\"black\"/>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 8
      << "\" font-size=\"11\" text-anchor=\"middle\">SNR (dB)</text>\n";
  out << "<text x=\"14\" y=\"" << mt + ph / 2
      << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << mt + ph / 2 << ")\">MSE</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace phasels::io
