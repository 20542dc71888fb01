// Experiment CLI: forward measurement, recovery, certification, and the
// phase-transition / noise-robustness batch experiments.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phasels/applications.hpp"
#include "phasels/certificate.hpp"
#include "phasels/harness.hpp"
#include "phasels/io.hpp"
#include "phasels/lifted_sdp.hpp"
#include "phasels/phase_completion.hpp"
#include "phasels/rng.hpp"
#include "phasels/signal_model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace phasels;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int workers = 0;
  std::string mode;  // empty = config / default
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

void write_run_meta(const fs::path& out_dir, const std::string& command,
                    const json& config_echo, const CommonOpts& opts,
                    double wall_seconds) {
  json meta{{"command", command},  {"config", config_echo},
            {"seed", opts.seed},   {"version", kVersion},
            {"workers", opts.workers}, {"wall_time_s", wall_seconds}};
  write_file(out_dir / "run_meta.json", meta.dump(2) + "\n");
}

json parse_config(const CommonOpts& opts) {
  if (opts.config_path.empty()) throw Error("--config is required for this subcommand");
  json j = json::parse(read_file(opts.config_path), nullptr, false);
  if (j.is_discarded()) throw Error("malformed config JSON");
  return j;
}

SolverParams solver_from_config(const json& cfg, const CommonOpts& opts) {
  SolverParams params;
  if (cfg.contains("solver"))
    params = io::solver_params_from_json(cfg.at("solver").dump());
  if (opts.mode == "full") params.mode = SolveMode::full;
  if (opts.mode == "two_stage") params.mode = SolveMode::two_stage;
  return params;
}

struct MeasuredProblem {
  std::optional<SparseSignal> signal;
  MaskSet masks;
  int k_freq;
  MeasurementGrid grid;
  double sigma = 0.0;
};

MeasuredProblem measure_from_config(const json& cfg, const CommonOpts& opts) {
  SparseSignal signal = io::signal_from_json(cfg.at("signal").dump());
  MaskSet masks(signal.grid_length(), cfg.at("l1").get<int>(), cfg.at("l2").get<int>());
  const int k_freq = cfg.at("k_freq").get<int>();
  MeasurementGrid grid = forward_measure(signal, masks, k_freq);
  double sigma = 0.0;
  if (cfg.contains("snr_db") && std::isfinite(cfg.at("snr_db").get<double>())) {
    RngStream rng(opts.seed, 0x4D454153 /*'MEAS'*/, 0);
    auto [noisy, s] = add_noise(grid, cfg.at("snr_db").get<double>(), rng);
    grid = std::move(noisy);
    sigma = s;
  }
  return {std::move(signal), std::move(masks), k_freq, std::move(grid), sigma};
}

int run_measure(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  const json cfg = parse_config(opts);
  MeasuredProblem problem = measure_from_config(cfg, opts);
  write_file(fs::path(opts.out_dir) / "results.csv",
             io::measurement_grid_to_csv(problem.grid));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run_meta(opts.out_dir, "measure", cfg, opts, wall);
  std::cout << "wrote " << (fs::path(opts.out_dir) / "results.csv").string() << "\n";
  return 0;
}

int run_solve(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  const json cfg = parse_config(opts);
  SolverParams params = solver_from_config(cfg, opts);

  std::optional<MeasuredProblem> problem;
  int n = 0;
  if (cfg.contains("signal")) {
    problem = measure_from_config(cfg, opts);
    n = problem->signal->grid_length();
    if (problem->sigma > 0.0) params.slack = 3.0 * problem->sigma;
  } else if (cfg.contains("measurements_csv")) {
    n = cfg.at("n").get<int>();
    MeasurementGrid grid =
        io::measurement_grid_from_csv(read_file(cfg.at("measurements_csv").get<std::string>()));
    MaskSet masks(n, cfg.at("l1").get<int>(), cfg.at("l2").get<int>());
    problem = MeasuredProblem{std::nullopt, std::move(masks), grid.k_freq(),
                              std::move(grid), 0.0};
  } else {
    throw Error("solve config needs \"signal\" or \"measurements_csv\"");
  }

  LiftedSolution solution =
      params.mode == SolveMode::two_stage
          ? solve_two_stage(problem->grid, problem->masks, params)
          : solve_lifted(assemble_constraints(problem->masks, problem->k_freq,
                                              problem->grid, params.slack),
                         n, params);
  const RankOneFactor factor = rank_one_extract(solution.x);

  write_file(fs::path(opts.out_dir) / "results.csv", io::dense_vector_to_csv(factor.x));
  write_file(fs::path(opts.out_dir) / "report.json",
             io::solver_report_to_json(solution.report) + "\n");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run_meta(opts.out_dir, "solve", cfg, opts, wall);
  std::cout << "status: "
            << (solution.report.converged ? "converged"
                : solution.report.status == SolveStatus::infeasible ? "infeasible"
                                                                    : "max_iterations")
            << " after " << solution.report.iterations
            << " iterations, rank gap " << factor.rank_gap << "\n";
  return 0;
}

int run_certify(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  const json cfg = parse_config(opts);

  Eigen::VectorXcd z;
  std::optional<VertexGraph> graph;
  std::string edges_csv;
  if (cfg.contains("signal")) {
    const SparseSignal signal = io::signal_from_json(cfg.at("signal").dump());
    const int k_freq = cfg.at("k_freq").get<int>();
    z = low_freq_dft(signal, k_freq).values();
    const ConstraintGraph cg(k_freq, cfg.at("l1").get<int>(), cfg.at("l2").get<int>());
    edges_csv = cg.edge_list_csv();
    graph = VertexGraph::from_constraint_graph(cg);
  } else if (cfg.contains("z")) {
    const auto& arr = cfg.at("z");
    z.resize(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i)
      z(static_cast<Eigen::Index>(i)) =
          Complex(arr[i].at("re").get<double>(), arr[i].at("im").get<double>());
    std::vector<VertexGraph::Edge> edges;
    for (const auto& e : cfg.at("edges"))
      edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    graph = VertexGraph(static_cast<int>(z.size()), std::move(edges));
    std::ostringstream csv;
    csv << "u,v\n";
    for (const auto& [u, v] : graph->edges()) csv << u << "," << v << "\n";
    edges_csv = csv.str();
  } else {
    throw Error("certify config needs \"signal\" or \"z\"+\"edges\"");
  }

  const auto [certificate, duals] = build_certificate(z, *graph);
  const CertificateReport report = verify_certificate(certificate, z);

  std::ostringstream csv;
  csv << "psd,slackness,rank_ok,min_eig,null_angle_to_z\n";
  csv << (report.psd ? 1 : 0) << "," << (report.slackness ? 1 : 0) << ","
      << (report.rank_ok ? 1 : 0) << "," << io::format_double(report.min_eig) << ","
      << io::format_double(report.null_angle_to_z) << "\n";
  write_file(fs::path(opts.out_dir) / "results.csv", csv.str());
  write_file(fs::path(opts.out_dir) / "certificate_report.json",
             io::certificate_report_to_json(report) + "\n");
  write_file(fs::path(opts.out_dir) / "edges.csv", edges_csv);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run_meta(opts.out_dir, "certify", cfg, opts, wall);
  std::cout << (report.all_ok() ? "certificate verified" : "certificate FAILED") << "\n";
  return 0;
}

TrialConfig trial_config(const json& cfg, const CommonOpts& opts, bool seed_given,
                         bool workers_given) {
  TrialConfig tc = io::trial_config_from_json(cfg.dump());
  if (seed_given) tc.seed = opts.seed;
  if (workers_given) tc.workers = opts.workers;
  if (opts.mode == "full") tc.solver.mode = SolveMode::full;
  if (opts.mode == "two_stage") tc.solver.mode = SolveMode::two_stage;
  return tc;
}

int run_phase_transition_cmd(const CommonOpts& opts, bool seed_given, bool workers_given) {
  const auto start = std::chrono::steady_clock::now();
  json cfg = json::parse("{}");
  if (!opts.config_path.empty()) cfg = parse_config(opts);
  TrialConfig tc = trial_config(cfg, opts, seed_given, workers_given);
  if (tc.k_freq_range.empty()) tc.k_freq_range = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  if (tc.delta_range.empty()) tc.delta_range = {2, 3, 4, 5, 6, 7, 8, 9, 10};

  const PhaseTransitionResult result = run_phase_transition(tc);
  write_file(fs::path(opts.out_dir) / "results.csv", io::phase_transition_to_csv(result));
  write_file(fs::path(opts.out_dir) / "heatmap.svg", io::heatmap_svg(result));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CommonOpts echo = opts;
  echo.seed = tc.seed;
  echo.workers = tc.workers;
  write_run_meta(opts.out_dir, "phase-transition",
                 json::parse(io::trial_config_to_json(tc)), echo, wall);
  std::cout << "wrote " << result.cells.size() << " cells ("
            << result.total_resamples << " condition-2 resamples)\n";
  return 0;
}

int run_snr_sweep_cmd(const CommonOpts& opts, bool seed_given, bool workers_given) {
  const auto start = std::chrono::steady_clock::now();
  json cfg = json::parse("{}");
  if (!opts.config_path.empty()) cfg = parse_config(opts);
  TrialConfig tc = trial_config(cfg, opts, seed_given, workers_given);
  if (tc.n == 20 && !cfg.contains("n")) tc.n = 40;
  if (tc.k_freq_range.empty()) tc.k_freq_range = {14};
  if (tc.delta_range.empty()) tc.delta_range = {8};
  if (tc.snr_list_db.empty()) tc.snr_list_db = {20, 30, 40, 50, 60, 70, 80};

  const SnrSweepResult result = run_snr_sweep(tc);
  write_file(fs::path(opts.out_dir) / "results.csv", io::snr_sweep_to_csv(result));
  write_file(fs::path(opts.out_dir) / "mse.svg", io::mse_svg(result));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CommonOpts echo = opts;
  echo.seed = tc.seed;
  echo.workers = tc.workers;
  write_run_meta(opts.out_dir, "snr-sweep", json::parse(io::trial_config_to_json(tc)),
                 echo, wall);
  std::cout << "wrote " << result.points.size() << " SNR points\n";
  return 0;
}

DoaScene default_doa_scene() {
  DoaScene scene;
  scene.wavelength = 0.1;
  scene.k_receivers = 20;
  scene.l1 = 2;
  scene.l2 = 3;
  const int n = 64;
  const auto angle_for_index = [n](int t) {
    const int sym = t <= n / 2 ? t : t - n;
    return std::asin(-2.0 * sym / n);
  };
  scene.objects = {{angle_for_index(5), 100.0, Complex(1.0, 0.0)},
                   {angle_for_index(20), 120.0, Complex(0.8, 0.0)},
                   {angle_for_index(45), 140.0, Complex(1.2, 0.0)}};
  return scene;
}

int run_doa_demo(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  json cfg;
  DoaScene scene;
  int n = 64;
  if (!opts.config_path.empty()) {
    cfg = parse_config(opts);
    scene = io::doa_scene_from_json(cfg.dump());
    n = cfg.value("n", n);
  } else {
    scene = default_doa_scene();
    cfg = json{{"builtin_scene", "three reflectors, n=64, K=20, l1=2, l2=3"}};
  }

  SolverParams params;
  params.mode = SolveMode::two_stage;
  if (opts.mode == "full") params.mode = SolveMode::full;

  const DoaInstance instance = doa_to_instance(scene, n);
  const MeasurementGrid grid = forward_measure(instance.signal, instance.masks,
                                               instance.k_freq);
  const LiftedSolution solution =
      params.mode == SolveMode::two_stage
          ? solve_two_stage(grid, instance.masks, params)
          : solve_lifted(assemble_constraints(instance.masks, instance.k_freq, grid,
                                              params.slack),
                         n, params);
  const Eigen::VectorXcd xhat =
      align_phase(rank_one_extract(solution.x).x, instance.signal.dense());

  std::ostringstream csv;
  csv << "object,theta_deg,index,snap_error_cells,true_abs,recovered_abs\n";
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const int idx = instance.indices[i];
    csv << i << "," << io::format_double(scene.objects[i].theta * 180.0 / M_PI) << ","
        << idx << "," << io::format_double(instance.snap_errors[i]) << ","
        << io::format_double(std::abs(instance.signal.dense()(idx))) << ","
        << io::format_double(std::abs(xhat(idx))) << "\n";
  }
  write_file(fs::path(opts.out_dir) / "results.csv", csv.str());
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run_meta(opts.out_dir, "doa-demo", cfg, opts, wall);

  const double err = phase_aligned_distance(xhat, instance.signal.dense());
  std::cout << "recovered " << scene.objects.size()
            << " reflectors, relative error " << err
            << (instance.off_grid_warning ? " (off-grid snapping warning)" : "") << "\n";
  return 0;
}

CdiScene default_cdi_scene() {
  CdiScene scene;
  scene.wavelength = 500e-9;
  scene.distance = 2000.0;
  scene.l1 = 2;
  scene.l2 = 3;
  scene.object_samples = Eigen::VectorXcd::Zero(64);
  scene.object_samples(8) = Complex(1.0, 0.0);
  scene.object_samples(30) = Complex(0.0, 0.7);
  scene.object_samples(52) = Complex(-0.9, 0.4);
  return scene;
}

int run_cdi_demo(const CommonOpts& opts) {
  const auto start = std::chrono::steady_clock::now();
  json cfg;
  CdiScene scene;
  int k_freq = 20;
  if (!opts.config_path.empty()) {
    cfg = parse_config(opts);
    scene = io::cdi_scene_from_json(cfg.dump());
    k_freq = cfg.value("k_freq", k_freq);
  } else {
    scene = default_cdi_scene();
    cfg = json{{"builtin_scene", "three-sample object, n=64, K=20, l1=2, l2=3"}};
  }

  SolverParams params;
  params.mode = SolveMode::two_stage;
  if (opts.mode == "full") params.mode = SolveMode::full;

  const CdiInstance instance = cdi_to_instance(scene, k_freq);
  const MeasurementGrid grid =
      forward_measure(instance.signal, instance.masks, instance.k_freq);
  const LiftedSolution solution =
      params.mode == SolveMode::two_stage
          ? solve_two_stage(grid, instance.masks, params)
          : solve_lifted(assemble_constraints(instance.masks, instance.k_freq, grid,
                                              params.slack),
                         instance.signal.grid_length(), params);
  const Eigen::VectorXcd psi_hat =
      align_phase(rank_one_extract(solution.x).x, instance.signal.dense());

  std::ostringstream csv;
  csv << "t,true_re,true_im,recovered_re,recovered_im\n";
  const Eigen::VectorXcd truth = instance.signal.dense();
  for (int t = 0; t < instance.signal.grid_length(); ++t) {
    csv << t << "," << io::format_double(truth(t).real()) << ","
        << io::format_double(truth(t).imag()) << ","
        << io::format_double(psi_hat(t).real()) << ","
        << io::format_double(psi_hat(t).imag()) << "\n";
  }
  write_file(fs::path(opts.out_dir) / "results.csv", csv.str());
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_run_meta(opts.out_dir, "cdi-demo", cfg, opts, wall);

  std::cout << "recovered object, relative error "
            << phase_aligned_distance(psi_hat, truth) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phaseless super-resolution: masked low-frequency magnitude recovery"};
  app.require_subcommand(1);

  CommonOpts opts;
  bool seed_given = false, workers_given = false;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opts.config_path, "JSON config file");
    if (needs_config) c->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--seed", opts.seed, "RNG seed")->each([&](const std::string&) {
      seed_given = true;
    });
    sub->add_option("--workers", opts.workers, "worker threads (0 = auto)")
        ->each([&](const std::string&) { workers_given = true; });
    sub->add_option("--mode", opts.mode, "solver path")
        ->check(CLI::IsMember({"full", "two_stage"}));
  };

  add_common(app.add_subcommand("measure", "forward-measure a signal"), true);
  add_common(app.add_subcommand("solve", "recover a signal from measurements"), true);
  add_common(app.add_subcommand("certify", "build and verify the dual certificate"), true);
  add_common(app.add_subcommand("phase-transition", "success-probability sweep over (K, delta)"),
             false);
  add_common(app.add_subcommand("snr-sweep", "MSE vs SNR sweep"), false);
  add_common(app.add_subcommand("doa-demo", "direction-of-arrival demonstration"), false);
  add_common(app.add_subcommand("cdi-demo", "diffraction-imaging demonstration"), false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("measure")) return run_measure(opts);
    if (app.got_subcommand("solve")) return run_solve(opts);
    if (app.got_subcommand("certify")) return run_certify(opts);
    if (app.got_subcommand("phase-transition"))
      return run_phase_transition_cmd(opts, seed_given, workers_given);
    if (app.got_subcommand("snr-sweep"))
      return run_snr_sweep_cmd(opts, seed_given, workers_given);
    if (app.got_subcommand("doa-demo")) return run_doa_demo(opts);
    if (app.got_subcommand("cdi-demo")) return run_cdi_demo(opts);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
