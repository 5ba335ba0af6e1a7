#include "dirackit/chart.hpp"

#include "dirackit/errors.hpp"

#include <cmath>
#include <numbers>

namespace dk {

Chart::Chart(std::string name, std::vector<std::string> coords, std::vector<Interval> box,
             std::vector<Predicate> excluded)
    : name_(std::move(name)),
      coords_(std::move(coords)),
      box_(std::move(box)),
      excluded_(std::move(excluded)) {
  if (coords_.empty()) throw InputError("chart '" + name_ + "' has no coordinates");
  if (coords_.size() != box_.size()) {
    throw InputError("chart '" + name_ + "': " + std::to_string(coords_.size()) +
                     " coordinates but " + std::to_string(box_.size()) + " box intervals");
  }
  for (std::size_t i = 0; i < box_.size(); ++i) {
    if (!(box_[i].hi > box_[i].lo)) {
      throw InputError("chart '" + name_ + "': empty sampling interval for " + coords_[i]);
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (coords_[i] == coords_[j]) {
        throw InputError("chart '" + name_ + "': duplicate coordinate " + coords_[i]);
      }
    }
  }
}

int Chart::index_of(const std::string& coord) const {
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (coords_[i] == coord) return static_cast<int>(i);
  }
  return -1;
}

bool Chart::admissible(const Point& x) const {
  if (x.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (x(i) < box_[i].lo || x(i) > box_[i].hi) return false;
  }
  for (const Predicate& p : excluded_) {
    if (std::abs(p(x)) < 1e-3) return false;
  }
  return true;
}

ChartPtr make_chart(std::string name, std::vector<std::string> coords, std::vector<Interval> box,
                    std::vector<Predicate> excluded) {
  return std::make_shared<const Chart>(std::move(name), std::move(coords), std::move(box),
                                       std::move(excluded));
}

void require_same_chart(const ChartPtr& a, const ChartPtr& b, const char* what) {
  if (a != b && (a->name() != b->name() || a->coords() != b->coords())) {
    throw ChartMismatch(std::string(what) + ": operands live on charts '" + a->name() + "' and '" +
                        b->name() + "'");
  }
}

Sampler::Sampler(std::uint64_t seed) : engine_(seed) {}

double Sampler::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Sampler::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Point Sampler::in_box(const Chart& chart) {
  Point x(chart.dim());
  for (int i = 0; i < chart.dim(); ++i) x(i) = uniform(chart.box()[i].lo, chart.box()[i].hi);
  return x;
}

std::vector<Point> sample_points(const Chart& chart, int count, std::uint64_t seed) {
  Sampler rng(seed);
  std::vector<Point> pts;
  pts.reserve(count);
  int attempts = 0;
  while (static_cast<int>(pts.size()) < count) {
    Point x = rng.in_box(chart);
    if (chart.admissible(x)) {
      pts.push_back(std::move(x));
    } else if (++attempts > 1000 * (count + 1)) {
      throw InputError("chart '" + chart.name() + "': excluded predicates reject the whole box");
    }
  }
  return pts;
}

}  // namespace dk
