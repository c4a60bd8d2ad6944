#pragma once
// Small random instances for tests.

#include <algorithm>
#include <random>

#include "detplace/instance.hpp"

namespace testing_support {

struct RandomSpec {
  int rows = 6;
  int cols = 6;
  double block_prob = 0.2;
  int max_entrances = 3;
  int max_objectives = 3;
  int detectors = 2;
};

/// Valid random instance: town-like physics with jittered parameters so that
/// detector disks cover a few cells.
inline detplace::Instance random_instance(std::mt19937_64& gen, const RandomSpec& spec = {}) {
  using namespace detplace;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    Instance inst;
    inst.map = GridMap(spec.rows, spec.cols, 5.0);
    for (int r = 0; r < spec.rows; ++r)
      for (int c = 0; c < spec.cols; ++c) inst.map.set_blocked({r, c}, u(gen) < spec.block_prob);
    auto open = inst.map.unblocked_cells();
    std::shuffle(open.begin(), open.end(), gen);
    const int eps = 1 + static_cast<int>(u(gen) * spec.max_entrances);
    const int phi = 1 + static_cast<int>(u(gen) * spec.max_objectives);
    if (static_cast<int>(open.size()) < eps + phi) continue;
    for (int k = 0; k < eps; ++k) inst.entrances.push_back(open[k]);
    for (int k = 0; k < phi; ++k) inst.objectives.push_back({open[eps + k], 0.5 + 9.5 * u(gen)});
    inst.physics.detection_radius = 4.0 + 8.0 * u(gen);
    inst.physics.detection_rate = 0.02 + 0.18 * u(gen);
    inst.physics.neutralization_prob = 0.2 + 0.7 * u(gen);
    inst.physics.attacker_speed = 1.0;
    inst.physics.neutralization_time = 8.0 * u(gen);
    inst.detectors = spec.detectors;
    canonicalize(inst);
    if (validate(inst).empty()) return inst;
  }
}

}  // namespace testing_support
