#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "detplace/instance.hpp"
#include "detplace/rng.hpp"

namespace detplace {

enum class MapClass { harbour, newtown, oldtown };

const char* to_string(MapClass c);
std::optional<MapClass> parse_map_class(std::string_view text);

struct IntRange {
  int lo = 0;
  int hi = 0;
};

struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Maps a local population density to the value C_j of an objective.
using CasualtyModel = std::function<double(double density)>;

/// C = density * lethal_area. The lethal area is a tunable default, not a
/// calibrated constant.
inline CasualtyModel linear_casualty_model(double lethal_area = 100.0) {
  return [lethal_area](double density) { return density * lethal_area; };
}

struct DensityDistribution {
  double mean = 0.4;
  double stddev = 0.1;
};

struct GenParams {
  MapClass map_class = MapClass::newtown;
  int rows = 64;
  int cols = 64;
  std::uint64_t seed = 1;
  IntRange entrances{10, 15};
  IntRange objectives{10, 15};
  double border_margin = 0.10;  // fraction of each side kept free of objectives
  int detectors = 15;
  int max_attempts = 50;

  // harbour
  RealRange decay{0.98, 0.99};
  int smoothing_iterations = 20;

  // newtown
  std::vector<double> street_width_probs{0.5, 0.25, 0.15, 0.1};  // index = width
  IntRange newtown_plazas{3, 6};
  IntRange newtown_plaza_side{4, 13};

  // oldtown
  IntRange oldtown_plazas{3, 6};
  IntRange oldtown_plaza_side{6, 15};
  int street_width = 3;
  double branch_prob = 0.02;
  std::optional<double> max_slope;  // defaults to min(rows, cols) / 5

  Physics physics;
  DensityDistribution density;
  double lethal_area = 100.0;

  /// Physics, density and casualty defaults of the given class.
  static GenParams defaults(MapClass c);
};

/// Generation gave up after max_attempts rejected drafts.
class GenerationError : public std::runtime_error {
 public:
  GenerationError(std::uint64_t seed, const std::string& what)
      : std::runtime_error("seed " + std::to_string(seed) + ": " + what), seed_(seed) {}
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Construction log of a generated map, for inspection and tests.
struct GenReport {
  struct Street {
    bool vertical = false;  // newtown: runs north-south
    int start = 0;          // first column (vertical) or row
    int width = 0;
  };
  struct Plaza {
    int row = 0;
    int col = 0;
    int side = 0;
  };
  struct SlopedStreet {
    int width = 0;
    double slope = 0.0;  // main-axis cells per lateral cell; |slope| in [1, max_s]
    int parent = -1;     // index of the street it branched from
    bool along_rows = false;
  };

  int attempts = 0;
  std::vector<Street> streets;
  std::vector<Plaza> plazas;
  std::vector<SlopedStreet> sloped_streets;
  std::vector<CellIndex> coastline_objectives;  // harbour: blocked before being unblocked
  std::vector<std::uint8_t> blocked_before_objectives;  // harbour map before objectives were cut
};

struct Generated {
  Instance instance;
  GenReport report;
};

Generated gen_harbour(const GenParams& params);
Generated gen_newtown(const GenParams& params);
Generated gen_oldtown(const GenParams& params);
Generated generate(const GenParams& params);

/// Draws a density per objective (clamped below at 1e-6 of the mean) and
/// sets its value through `model`.
void assign_values(Instance& inst, const DensityDistribution& density, const CasualtyModel& model, Rng& rng);

/// Number of rows/cols kept free of objectives along each border.
int margin_cells(int extent, double fraction);

}  // namespace detplace
