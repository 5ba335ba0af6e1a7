#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace dk {

using Point = Eigen::VectorXd;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
};

/// A point predicate whose zero set must be avoided when sampling.
using Predicate = std::function<double(const Point&)>;

/**
 * A single global coordinate chart with a sampling box.
 *
 * Every field in the library is attached to exactly one chart; combining
 * fields from different charts throws ChartMismatch.
 */
class Chart {
 public:
  Chart(std::string name, std::vector<std::string> coords, std::vector<Interval> box,
        std::vector<Predicate> excluded = {});

  const std::string& name() const { return name_; }
  const std::vector<std::string>& coords() const { return coords_; }
  const std::vector<Interval>& box() const { return box_; }
  const std::vector<Predicate>& excluded() const { return excluded_; }
  int dim() const { return static_cast<int>(coords_.size()); }

  /// Index of a coordinate name, or -1.
  int index_of(const std::string& coord) const;

  /// True if x lies in the box and at least 1e-3 away from every excluded zero set.
  bool admissible(const Point& x) const;

 private:
  std::string name_;
  std::vector<std::string> coords_;
  std::vector<Interval> box_;
  std::vector<Predicate> excluded_;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::string name, std::vector<std::string> coords, std::vector<Interval> box,
                    std::vector<Predicate> excluded = {});

void require_same_chart(const ChartPtr& a, const ChartPtr& b, const char* what);

/**
 * Deterministic sample source.  std::mt19937_64 is fully specified by the
 * standard; the mapping to doubles is done here (53-bit mantissa, Box-Muller)
 * instead of through <random> distributions, whose output is
 * implementation-defined.
 */
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed);

  double uniform();  ///< in [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  Point in_box(const Chart& chart);

 private:
  std::mt19937_64 engine_;
};

/// `count` admissible points drawn uniformly from the chart box.
std::vector<Point> sample_points(const Chart& chart, int count, std::uint64_t seed);

}  // namespace dk
