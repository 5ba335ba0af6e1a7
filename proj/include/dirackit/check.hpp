#pragma once

#include "dirackit/chart.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace dk {

/// Result of a pointwise check over samples: verdict, worst residual and the first failing point.
struct CheckOutcome {
  bool ok = true;
  double max_residual = 0.0;
  std::optional<Point> witness;
  std::string detail;

  /// Folds one residual into the outcome; the first value above tol becomes the witness.
  void record(double residual, const Point& at, double tol, const std::string& what = {}) {
    if (residual > max_residual || std::isnan(residual)) max_residual = residual;
    if (!(residual <= tol) && ok) {
      ok = false;
      witness = at;
      detail = what;
    }
  }
  void fail(const Point& at, const std::string& what) {
    if (ok) {
      ok = false;
      witness = at;
      detail = what;
    }
  }
};

}  // namespace dk
