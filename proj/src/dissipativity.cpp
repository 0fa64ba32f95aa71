#include "sbe/dissipativity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace sbe {

std::string DissipativityReport::to_json() const {
  nlohmann::json j;
  j["pass"] = pass;
  j["worst_violation"] = worst_violation;
  j["worst_x"] = worst_x;
  j["worst_u"] = worst_u;
  j["samples"] = samples;
  j["min_margin"] = min_margin;
  j["mean_margin"] = mean_margin;
  return j.dump(2);
}

namespace {

template <typename MarginFn>
DissipativityReport sweep_margins(const CompiledProblem& cp, MarginFn&& margin,
                                  double tol) {
  DissipativityReport rep;
  const Grid& g = cp.grid();
  rep.min_margin = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::vector<double> x(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int d = 0; d < g.dim(); ++d) x[d] = g.coord(i, d);
    auto us = cp.controls_at(i);
    auto ls = cp.stage_at(i);
    for (std::size_t s = 0; s < us.size(); ++s) {
      double m = margin(x, us[s], ls[s]);
      sum += m;
      rep.samples++;
      if (m < rep.min_margin) {
        rep.min_margin = m;
        rep.worst_x = x;
        rep.worst_u = us[s];
      }
    }
  }
  rep.mean_margin = rep.samples ? sum / static_cast<double>(rep.samples) : 0.0;
  rep.worst_violation = std::max(0.0, -rep.min_margin);
  rep.pass = rep.min_margin >= -tol;
  return rep;
}

}  // namespace

DissipativityReport check_dissipativity(const CompiledProblem& cp, const StorageFn& lambda,
                                        double c, double tol) {
  const ProblemSpec& spec = cp.spec();
  return sweep_margins(
      cp,
      [&](std::span<const double> x, double u, double stage) {
        std::vector<double> y = spec.f(x, u);
        return eval_storage(lambda, x) + stage - c - eval_storage(lambda, y);
      },
      tol);
}

double best_certified_shift(const CompiledProblem& cp, const StorageFn& lambda) {
  DissipativityReport rep = check_dissipativity(cp, lambda, 0.0, 0.0);
  return rep.min_margin;
}

DissipativityReport check_strict_dissipativity(const CompiledProblem& cp,
                                               const StorageFn& lambda,
                                               std::span<const double> xe, double ue,
                                               const Expr& alpha, double tol) {
  const ProblemSpec& spec = cp.spec();
  if (xe.size() != static_cast<std::size_t>(spec.dim))
    throw std::invalid_argument("strict dissipativity: equilibrium dimension mismatch");
  std::vector<double> fe = spec.f(xe, ue);
  double eq_err = 0.0;
  for (std::size_t d = 0; d < fe.size(); ++d)
    eq_err = std::max(eq_err, std::fabs(fe[d] - xe[d]));
  if (eq_err > 1e-9)
    throw std::invalid_argument("strict dissipativity: (xe, ue) is not an equilibrium");

  auto alpha_at = [&](double r) {
    double rv[1] = {r};
    return alpha.eval(std::span<const double>(rv, 1), 0.0);
  };
  if (std::fabs(alpha_at(0.0)) > 1e-12)
    throw std::invalid_argument("strict dissipativity: alpha(0) must be 0");

  const double le = spec.stage(xe, ue);
  // monotonicity of alpha is checked on the radii actually sampled
  std::set<double> radii;
  const Grid& g = cp.grid();
  std::vector<double> x(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double r2 = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      double dx = g.coord(i, d) - xe[d];
      r2 += dx * dx;
    }
    radii.insert(std::sqrt(r2));
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (double r : radii) {
    double a = alpha_at(r);
    if (a < prev - 1e-12)
      throw std::invalid_argument("strict dissipativity: alpha not nondecreasing on radii");
    prev = a;
  }

  return sweep_margins(
      cp,
      [&](std::span<const double> xx, double u, double stage) {
        std::vector<double> y = spec.f(xx, u);
        double r2 = 0.0;
        for (std::size_t d = 0; d < xx.size(); ++d) {
          double dx = xx[d] - xe[d];
          r2 += dx * dx;
        }
        return eval_storage(lambda, xx) + stage - le - alpha_at(std::sqrt(r2)) -
               eval_storage(lambda, y);
      },
      tol);
}

GridFunction terminal_from_storage(GridPtr grid, const StorageFn& lambda) {
  std::vector<double> v(grid->size());
  std::vector<double> x(grid->dim());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    for (int d = 0; d < grid->dim(); ++d) x[d] = grid->coord(i, d);
    v[i] = -eval_storage(lambda, x);
  }
  return GridFunction(std::move(grid), std::move(v));
}

}  // namespace sbe
