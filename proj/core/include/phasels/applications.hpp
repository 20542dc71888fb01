#pragma once

#include <vector>

#include "phasels/signal_model.hpp"

namespace phasels {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct DoaObject {
  double theta = 0.0;  // radians, |theta| < pi/2
  double range = 1.0;  // meters
  Complex reflectivity{1.0, 0.0};
};

/// Direction-of-arrival scene: a 2K+1 element half-wavelength ULA, probed by
/// five transmitters (in-phase at 0, -l1*lambda/2, -l2*lambda/2; quadrature
/// at the two shifted spots). Each shifted transmitter modulates the scene
/// exactly like the diagonal mask D^(l).
struct DoaScene {
  std::vector<DoaObject> objects;
  double wavelength = 1.0;
  int k_receivers = 0;
  int l1 = 1, l2 = 2;
};

struct DoaInstance {
  SparseSignal signal;
  MaskSet masks;
  int k_freq = 0;
  std::vector<int> indices;         // snapped grid index per object
  std::vector<double> snap_errors;  // in grid cells
  bool off_grid_warning = false;    // some snap error exceeded 0.25 cells
};

/// Maps a DoA scene onto the abstract model on an n-point grid. The object at
/// angle theta lands at grid index -n*sin(theta)/2 (mod n) with amplitude
/// rho * exp(-i 4 pi r / lambda).
DoaInstance doa_to_instance(const DoaScene& scene, int n);

/// Narrow-band array response of the scene for the transmitter at offset l:
/// y_l[k] = sum_m rho_m e^{-i 4 pi r_m / lambda} e^{i pi (k - l) sin(theta_m)},
/// evaluated at receivers k = -K..K. The physical forward model, used as the
/// reference the mask construction must reproduce.
Eigen::VectorXcd doa_array_response(const DoaScene& scene, int transmitter_shift);

struct CdiScene {
  Eigen::VectorXcd object_samples;  // psi on an n-point grid
  double distance = 1.0;            // object-detector separation d, meters
  double wavelength = 1.0;
  int l1 = 1, l2 = 2;               // illumination angles 0, l1/d, l2/d
};

struct CdiInstance {
  SparseSignal signal;
  MaskSet masks;
  int k_freq = 0;
};

/// Maps a CDI scene onto the abstract model: the object samples become the
/// sparse signal, the illumination at angle l/d becomes the mask D^(l). The
/// object grid spacing is lambda*d/n; the detector is sampled at integer
/// positions z' = -K..K.
CdiInstance cdi_to_instance(const CdiScene& scene, int k_freq);

/// Riemann-sum discretization of the far-field amplitude integral on the
/// same object grid the adapter uses (one illumination source at angle l/d).
/// Its magnitude-square equals the single-mask measurement up to the global
/// positive scale (grid spacing)^2; coherent source pairs reproduce the
/// five-mask family.
Complex cdi_riemann_amplitude(const CdiScene& scene, int detector_index,
                              int illumination_l);

}  // namespace phasels
