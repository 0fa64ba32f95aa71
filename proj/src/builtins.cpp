#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbe/problem.hpp"

namespace sbe {

namespace {

std::vector<double> kink_points(const Box& box) {
  static const double candidates[] = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
  std::vector<double> out;
  for (double c : candidates)
    if (c >= box[0][0] && c <= box[0][1]) out.push_back(c);
  return out;
}

ProblemSpec scalar_problem(std::string name, std::string tag, std::string description,
                           double lo, double hi, const char* dyn, const char* cost,
                           const char* ulo, const char* uhi) {
  ProblemSpec p;
  p.name = std::move(name);
  p.tag = std::move(tag);
  p.description = std::move(description);
  p.dim = 1;
  p.box = {{lo, hi}};
  p.dynamics = {Expr::parse(dyn)};
  p.cost = StageCost(Expr::parse(cost));
  p.control.lo = Expr::parse(ulo);
  p.control.hi = Expr::parse(uhi);
  p.control.samples = 201;
  p.grid.nodes = {401};
  p.grid.mandatory = {kink_points(p.box)};
  return p;
}

NamedCandidate candidate_from_expr(std::string name, const char* text) {
  Expr e = Expr::parse(text);
  return {std::move(name), [e](GridPtr g) {
            std::vector<double> v(g->size());
            for (std::size_t i = 0; i < g->size(); ++i) {
              auto x = g->node(i);
              v[i] = e.eval(x, 0.0);
            }
            return GridFunction(std::move(g), std::move(v));
          }};
}

ProblemSpec make_pwl_zero_avg() {
  ProblemSpec p = scalar_problem(
      "pwl-zero-avg", "7.1.1",
      "piecewise-linear cost with two wells, optimal average 0 on a period-2 orbit",
      -2, 2, "-x1+u", "min(abs(x1-1)-0.25, abs(x1+1)+0.25) + abs(u)", "-2+x1", "2+x1");
  p.control.mandatory = {0.0};
  p.storages.push_back({"lambda1", Expr::parse("min(abs(x1-1)+0.5, abs(x1+1))/2")});
  p.storages.push_back(
      {"lambda2", Expr::parse("-min(abs(x1+1)+0.25, abs(x1-1)-0.25, 2*abs(x1+1))")});
  p.storage = p.storages[0].expr;
  p.shift_c = 0.0;
  return p;
}

ProblemSpec make_pwl_shifted() {
  ProblemSpec p = scalar_problem(
      "pwl-shifted", "7.1.2",
      "same plant with the cost shifted down by 7/2; optimal average -7/2",
      -2, 2, "-x1+u", "min(abs(x1-1)-3.75, abs(x1+1)-3.25) + abs(u)", "-2+x1", "2+x1");
  p.control.mandatory = {0.0};
  p.storages.push_back({"lambda1", Expr::parse("min(abs(x1-1)+0.5, abs(x1+1))/2")});
  p.storage = p.storages[0].expr;
  p.shift_c = -3.5;
  return p;
}

ProblemSpec make_nonunique_eps() {
  ProblemSpec p = scalar_problem(
      "nonunique-eps", "7.2.1",
      "tilted cost eps*x + |u| (eps = 0.1): a continuum of shifted fixed points",
      -2, 2, "-x1+u", "0.1*x1 + abs(u)", "-2+x1", "2+x1");
  p.control.mandatory = {0.0};
  p.candidates.push_back(candidate_from_expr("psi_alpha_0.0", "0.1*x1/2"));
  p.candidates.push_back(candidate_from_expr("psi_alpha_0.3", "0.3*abs(x1) + 0.1*x1/2"));
  p.candidates.push_back(candidate_from_expr("psi_alpha_0.6", "0.6*abs(x1) + 0.1*x1/2"));
  return p;
}

ProblemSpec make_two_policies() {
  ProblemSpec p = scalar_problem(
      "two-policies", "7.2.2",
      "integrator with cost 1-|x|+|u|/2: two optimal equilibria, two optimal policies",
      -1, 1, "x1+u", "1 - abs(x1) + abs(u)/2", "-1-x1", "1-x1");
  p.control.mandatory = {0.0};
  p.candidates.push_back(candidate_from_expr("psi1", "1 - abs(x1) + (1+x1)/2"));
  p.candidates.push_back(candidate_from_expr("psi2", "1 - abs(x1) + (1-x1)/2"));
  p.candidates.push_back(candidate_from_expr("psi_min", "1.5*(1 - abs(x1))"));
  return p;
}

ProblemSpec make_bilinear_lsc() {
  ProblemSpec p = scalar_problem(
      "bilinear-lsc", "7.3.1",
      "bilinear plant x(1+u) whose fixed point is lower semicontinuous",
      -2, 2, "x1*(1+u)", "max(0, x1) + abs(u)", "-2", "0");
  p.control.mandatory = {-1.0, 0.0};
  p.candidates.push_back({"psi_lsc", [](GridPtr g) {
                            std::vector<double> v(g->size());
                            for (std::size_t i = 0; i < g->size(); ++i) {
                              double x = g->coord(i, 0);
                              v[i] = x > 0 ? 1.0 + x : 0.0;
                            }
                            return GridFunction(std::move(g), std::move(v));
                          }});
  return p;
}

ProblemSpec make_bilinear_unbounded() {
  ProblemSpec p = scalar_problem(
      "bilinear-unbounded", "7.3.2",
      "bilinear plant x*u on [0,1]: optimal average 0 but unbounded optimal cost",
      0, 1, "x1*u", "abs(u-1) + abs(x1)", "0.5", "1");
  p.storages.push_back({"zero", Expr::parse("0")});
  p.storage = p.storages[0].expr;
  p.shift_c = 0.0;
  return p;
}

ProblemSpec make_cubic_autonomous() {
  ProblemSpec p = scalar_problem(
      "cubic-autonomous", "7.3.3",
      "autonomous cubic map with equilibria -1, 0, 1 and zero stage cost",
      -1, 1, "1.5*x1 - 0.5*x1^3", "0", "0", "0");
  p.control.samples = 1;
  p.candidates.push_back({"psi_hat", [](GridPtr g) {
                            std::vector<double> v(g->size());
                            for (std::size_t i = 0; i < g->size(); ++i) {
                              double x = g->coord(i, 0);
                              v[i] = x < 0 ? -1.0 : x;
                            }
                            return GridFunction(std::move(g), std::move(v));
                          }});
  p.candidates.push_back({"psi_check", [](GridPtr g) {
                            std::vector<double> v(g->size());
                            for (std::size_t i = 0; i < g->size(); ++i) {
                              double x = g->coord(i, 0);
                              v[i] = x > 0 ? 1.0 : x;
                            }
                            return GridFunction(std::move(g), std::move(v));
                          }});
  return p;
}

ProblemSpec make_usc_modified() {
  ProblemSpec p = scalar_problem(
      "usc-modified", "7.3.4",
      "controlled cubic map with an upper semicontinuous fixed point at x=0",
      0, 1, "u*(1.5*x1 - 0.5*x1^3)", "abs(u-1) - u*(1.5*x1 - 0.5*x1^3) + x1", "0", "1");
  // the discontinuous candidate is representable away from the cell at x=0;
  // convergence there is assessed on (0,1] excluding that boundary cell
  p.candidates.push_back({"psi_usc", [](GridPtr g) {
                            std::vector<double> v(g->size());
                            for (std::size_t i = 0; i < g->size(); ++i) {
                              double x = g->coord(i, 0);
                              v[i] = x == 0.0 ? 0.0 : -2.0 + x;
                            }
                            return GridFunction(std::move(g), std::move(v));
                          }});
  return p;
}

ProblemSpec make_logistic_chaos() {
  ProblemSpec p = scalar_problem(
      "logistic-chaos", "7.4.1",
      "logistic map u*x*(1-x): optimal regime is chaotic, average 0",
      0, 1, "u*x1*(1-x1)", "x1^2 - (u*x1*(1-x1))^2 + abs(u-3.6)", "0", "4");
  p.control.mandatory = {3.6};
  p.storages.push_back({"neg_xsq", Expr::parse("-x1^2")});
  p.storage = p.storages[0].expr;
  p.shift_c = 0.0;
  p.equilibrium = Equilibrium{{0.0}, 3.6};
  p.candidates.push_back(candidate_from_expr("psi_bar", "x1^2"));
  return p;
}

ProblemSpec make_rotation_2d() {
  ProblemSpec p;
  p.name = "rotation-2d";
  p.tag = "7.4.2";
  p.description = "planar rotation with period-4 free motion and sign-indefinite cost";
  p.dim = 2;
  p.box = {{-1, 1}, {-1, 1}};
  p.dynamics = {Expr::parse("x2 + u"), Expr::parse("-x1")};
  p.cost = StageCost(Expr::parse("abs(u) + x1^2 - abs(x1)/2"));
  p.control.lo = Expr::parse("-1 - x2");
  p.control.hi = Expr::parse("1 - x2");
  p.control.samples = 201;
  p.control.mandatory = {0.0};
  p.grid.nodes = {101, 101};
  p.grid.mandatory = {{0.0}, {0.0}};
  return p;
}

ProblemSpec make_lq_discounted() {
  // stated on all of R in the source problem; the box [-2,2] is wide enough
  // that the optimal closed loop from [-1,1] never touches the boundary for
  // gamma in [0.1, 0.99]
  ProblemSpec p = scalar_problem(
      "lq-discounted", "7.5",
      "discounted scalar LQ (x+u)/2 with cost (x-1)^2 + u^2",
      -2, 2, "(x1+u)/2", "(x1-1)^2 + u^2", "-2", "2");
  // interior optima: the affine optimal feedback is nowhere near bang-bang,
  // so this problem gets a denser control sampling than the 201 default
  p.control.samples = 801;
  p.discount = 0.9;
  p.storages.push_back({"affine", Expr::parse("2*x1")});
  p.storage = p.storages[0].expr;
  p.shift_c = 0.5;
  p.equilibrium = Equilibrium{{0.5}, 0.5};
  return p;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"bilinear-lsc",  "bilinear-unbounded", "cubic-autonomous", "logistic-chaos",
          "lq-discounted", "nonunique-eps",      "pwl-shifted",      "pwl-zero-avg",
          "rotation-2d",   "two-policies",       "usc-modified"};
}

ProblemSpec builtin(const std::string& name) {
  if (name == "pwl-zero-avg") return make_pwl_zero_avg();
  if (name == "pwl-shifted") return make_pwl_shifted();
  if (name == "nonunique-eps") return make_nonunique_eps();
  if (name == "two-policies") return make_two_policies();
  if (name == "bilinear-lsc") return make_bilinear_lsc();
  if (name == "bilinear-unbounded") return make_bilinear_unbounded();
  if (name == "cubic-autonomous") return make_cubic_autonomous();
  if (name == "usc-modified") return make_usc_modified();
  if (name == "logistic-chaos") return make_logistic_chaos();
  if (name == "rotation-2d") return make_rotation_2d();
  if (name == "lq-discounted") return make_lq_discounted();
  throw std::invalid_argument("unknown builtin problem '" + name + "'");
}

}  // namespace sbe
