#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dirac {

enum class Provenance { Clock, Sch, SineCount, RescaledSpectrum, Other };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Clock: return "clock";
    case Provenance::Sch: return "sch";
    case Provenance::SineCount: return "sine";
    case Provenance::RescaledSpectrum: return "rescaled-spectrum";
    case Provenance::Other: return "other";
  }
  return "?";
}

/// Finite strictly increasing set of reals with a provenance tag.
/// `parameter` holds eta, tau or beta depending on the tag.
struct PointSet {
  std::vector<double> points;
  Provenance provenance = Provenance::Other;
  double parameter = 0.0;
  std::uint64_t seed = 0;

  PointSet() = default;
  PointSet(std::vector<double> pts, Provenance p, double param = 0.0, std::uint64_t s = 0)
      : points(std::move(pts)), provenance(p), parameter(param), seed(s) {
    std::sort(points.begin(), points.end());
  }

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] bool empty() const { return points.empty(); }

  [[nodiscard]] bool strictly_increasing() const {
    return std::adjacent_find(points.begin(), points.end(), std::greater_equal<>()) == points.end();
  }

  /// Number of points in [a, b).
  [[nodiscard]] std::size_t count_in(double a, double b) const {
    return static_cast<std::size_t>(std::lower_bound(points.begin(), points.end(), b) -
                                    std::lower_bound(points.begin(), points.end(), a));
  }

  [[nodiscard]] PointSet shifted(double by) const {
    PointSet out = *this;
    for (double& x : out.points) x += by;
    return out;
  }
};

}  // namespace dirac
