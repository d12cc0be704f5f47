#include "polyfs/sweep.h"

#include <cmath>
#include <sstream>
#include <tuple>

#include "polyfs/error.h"
#include "polyfs/parallel.h"

namespace polyfs {

SimplexGrid build_grid(double step) {
  if (!(step > 0.0 && step <= 0.5)) {
    std::ostringstream msg;
    msg << "grid step must lie in (0, 0.5], got " << step;
    throw ConfigError(msg.str());
  }
  constexpr double kMin = SimplexWeights::kMinWeight;
  constexpr double kSlack = 1e-12;

  std::vector<double> values{kMin};
  for (int i = 1;; ++i) {
    const double v = i * step;
    if (v > 1.0 - 2.0 * kMin + kSlack) break;
    if (std::abs(v - values.back()) > kSlack) values.push_back(v);
  }

  SimplexGrid grid;
  grid.step = step;
  for (double alpha : values) {
    for (double beta : values) {
      const double gamma = 1.0 - alpha - beta;
      if (gamma >= kMin - kSlack) grid.points.emplace_back(alpha, beta, gamma);
    }
  }
  if (grid.points.empty()) {
    throw ConfigError("grid step produced no admissible weights");
  }
  return grid;
}

double curve_area(const DescentTrace &trace, bool normalize) {
  const auto &f = trace.f_values;
  if (f.empty()) throw NumericalError("descent trace is empty");
  double scale = 1.0;
  if (normalize) {
    if (!(f.front() > 0.0)) {
      throw NumericalError(
          "degenerate descent curve: initial objective is not positive");
    }
    scale = f.front();
  }
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    area += 0.5 * (f[i] / scale + f[i + 1] / scale);
  }
  return area;
}

namespace {

// Strict weak order for choosing the best run.
bool better(const SweepPoint &a, const SweepPoint &b) {
  return std::make_tuple(a.area, a.iterations, a.weights.alpha(),
                         a.weights.beta(), a.weights.gamma()) <
         std::make_tuple(b.area, b.iterations, b.weights.alpha(),
                         b.weights.beta(), b.weights.gamma());
}

}  // namespace

SweepResult sweep(const CenteredProblem &p, const SimplexGrid &grid,
                  const SearchConfig &cfg, const SweepOptions &options) {
  if (grid.points.empty()) throw ConfigError("sweep grid is empty");
  cfg.validate();
  const StiefelPoint W0 = init_stiefel(p.d, p.k, cfg.seed);

  std::vector<SweepPoint> points;
  points.reserve(grid.points.size());
  for (const auto &w : grid.points) points.push_back(SweepPoint{w, 0.0, false, false, 0, {}});
  std::vector<std::optional<MinimizeResult>> runs(grid.points.size());

  parallel_for(grid.points.size(), options.threads, [&](std::size_t i) {
    SweepPoint &pt = points[i];
    try {
      MinimizeResult run = minimize(p, pt.weights, cfg, W0);
      pt.area = curve_area(run.trace, options.normalize_curve);
      pt.converged = run.trace.converged;
      pt.iterations = run.trace.iterations;
      if (!std::isfinite(pt.area)) {
        throw NumericalError("descent curve area is not finite");
      }
      runs[i].emplace(std::move(run));
    } catch (const NumericalError &e) {
      pt.diverged = true;
      pt.failure = e.what();
    }
  });

  std::optional<std::size_t> best;
  for (bool need_converged : {true, false}) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const SweepPoint &pt = points[i];
      if (pt.diverged || (need_converged && !pt.converged)) continue;
      if (!best || better(pt, points[*best])) best = i;
    }
    if (best) break;
  }
  if (!best) {
    std::ostringstream msg;
    msg << "every sweep run failed:";
    for (const auto &pt : points) {
      msg << "\n  (" << pt.weights.alpha() << ", " << pt.weights.beta() << ", "
          << pt.weights.gamma() << "): " << pt.failure;
    }
    throw NumericalError(msg.str());
  }

  MinimizeResult &winner = *runs[*best];
  return SweepResult{std::move(points), *best, std::move(winner.W),
                     std::move(winner.trace)};
}

}  // namespace polyfs
