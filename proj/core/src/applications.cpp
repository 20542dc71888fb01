#include "phasels/applications.hpp"

#include <cmath>

namespace phasels {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

DoaInstance doa_to_instance(const DoaScene& scene, int n) {
  if (n < 2) throw DimensionMismatch("grid length must be at least 2");
  if (2 * scene.k_receivers + 1 > n)
    throw DimensionMismatch("receiver count 2K+1 exceeds the grid length");

  std::vector<SpikeEntry> entries;
  std::vector<int> indices;
  std::vector<double> snap_errors;
  bool warning = false;

  for (const auto& obj : scene.objects) {
    if (std::abs(obj.theta) >= kPi / 2)
      throw DimensionMismatch("object angle must satisfy |theta| < pi/2");
    if (obj.range <= 0.0) throw DimensionMismatch("object range must be positive");

    // Under the fixed DFT sign convention the array response at offset l is
    // the D^(l)-masked spectrum of a signal with spikes at -sin(theta)/2 of
    // the circle.
    double frac = -0.5 * std::sin(obj.theta);
    frac -= std::floor(frac);  // mod 1 -> [0, 1)
    const double exact = frac * n;
    int index = static_cast<int>(std::lround(exact)) % n;
    const double err = std::abs(exact - std::lround(exact));
    if (err > 0.25) warning = true;

    const double phase = -2.0 * kTwoPi * obj.range / scene.wavelength;  // -4 pi r / lambda
    entries.push_back({index, obj.reflectivity * std::polar(1.0, phase)});
    indices.push_back(index);
    snap_errors.push_back(err);
  }

  for (std::size_t i = 0; i < indices.size(); ++i)
    for (std::size_t j = i + 1; j < indices.size(); ++j)
      if (indices[i] == indices[j])
        throw GridCollision("two objects snap to the same grid index");

  return DoaInstance{SparseSignal(n, std::move(entries)),
                     MaskSet(n, scene.l1, scene.l2), scene.k_receivers,
                     std::move(indices), std::move(snap_errors), warning};
}

Eigen::VectorXcd doa_array_response(const DoaScene& scene, int transmitter_shift) {
  const int k = scene.k_receivers;
  Eigen::VectorXcd y(2 * k + 1);
  for (int rx = -k; rx <= k; ++rx) {
    Complex acc(0.0, 0.0);
    for (const auto& obj : scene.objects) {
      const double path_phase = -2.0 * kTwoPi * obj.range / scene.wavelength;
      const double steer = kPi * (rx - transmitter_shift) * std::sin(obj.theta);
      acc += obj.reflectivity * std::polar(1.0, path_phase + steer);
    }
    y(rx + k) = acc;
  }
  return y;
}

CdiInstance cdi_to_instance(const CdiScene& scene, int k_freq) {
  const int n = static_cast<int>(scene.object_samples.size());
  if (n < 2 * k_freq + 1)
    throw DimensionMismatch("object grid shorter than the 2K+1 detector band");
  if (scene.distance <= 0.0) throw DimensionMismatch("detector distance must be positive");

  std::vector<SpikeEntry> entries;
  for (int t = 0; t < n; ++t) {
    const Complex v = scene.object_samples(t);
    if (v != Complex(0.0, 0.0)) entries.push_back({t, v});
  }
  return CdiInstance{SparseSignal(n, std::move(entries)),
                     MaskSet(n, scene.l1, scene.l2), k_freq};
}

Complex cdi_riemann_amplitude(const CdiScene& scene, int detector_index,
                              int illumination_l) {
  const int n = static_cast<int>(scene.object_samples.size());
  const double h = scene.wavelength * scene.distance / n;  // object grid spacing
  const double theta = static_cast<double>(illumination_l) / scene.distance;
  const double zprime = static_cast<double>(detector_index);

  Complex acc(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    const double z = h * j;
    const double phase = kTwoPi * z / scene.wavelength * (-zprime / scene.distance + theta);
    acc += scene.object_samples(j) * std::polar(1.0, phase) * h;
  }
  return acc;
}

}  // namespace phasels
