#pragma once

#include <string>

#include "phasels/applications.hpp"
#include "phasels/certificate.hpp"
#include "phasels/harness.hpp"
#include "phasels/lifted_sdp.hpp"
#include "phasels/signal_model.hpp"

namespace phasels::io {

// JSON
std::string signal_to_json(const SparseSignal& x);
SparseSignal signal_from_json(const std::string& text);
std::string solver_params_to_json(const SolverParams& p);
SolverParams solver_params_from_json(const std::string& text);
std::string solver_report_to_json(const SolverReport& r);
std::string certificate_report_to_json(const CertificateReport& r);
TrialConfig trial_config_from_json(const std::string& text);
std::string trial_config_to_json(const TrialConfig& cfg);
DoaScene doa_scene_from_json(const std::string& text);
CdiScene cdi_scene_from_json(const std::string& text);

// CSV
std::string measurement_grid_to_csv(const MeasurementGrid& z);
MeasurementGrid measurement_grid_from_csv(const std::string& text);
std::string phase_transition_to_csv(const PhaseTransitionResult& r);
std::string snr_sweep_to_csv(const SnrSweepResult& r);
std::string dense_vector_to_csv(const Eigen::VectorXcd& v);

// Dependency-free SVG plots
std::string heatmap_svg(const PhaseTransitionResult& r);
std::string mse_svg(const SnrSweepResult& r);

/// Deterministic shortest-faithful double formatting shared by every writer.
std::string format_double(double v);

}  // namespace phasels::io
