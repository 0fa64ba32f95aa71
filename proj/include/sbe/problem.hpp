#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sbe/expr.hpp"
#include "sbe/grid.hpp"

namespace sbe {

/// State-dependent control interval [lo(x), hi(x)] sampled uniformly with
/// both endpoints included; mandatory samples inside the interval are added
/// on top (deduplicated).
struct ControlInterval {
  Expr lo;
  Expr hi;
  int samples = 201;
  std::vector<double> mandatory;
};

struct Equilibrium {
  std::vector<double> x;
  double u = 0.0;
};

/// Stage cost: either a parsed expression or an opaque callable (used for
/// rotated costs, which need lambda evaluated at f(x,u)).
class StageCost {
 public:
  StageCost() = default;
  StageCost(Expr e);  // NOLINT(google-explicit-constructor)
  StageCost(std::function<double(std::span<const double>, double)> fn,
            std::string label);

  double operator()(std::span<const double> x, double u) const { return fn_(x, u); }
  const std::optional<Expr>& expr() const { return expr_; }
  const std::string& label() const { return label_; }

 private:
  std::function<double(std::span<const double>, double)> fn_;
  std::optional<Expr> expr_;
  std::string label_;
};

/// Storage-function argument: an expression in x or a grid function.
using StorageFn = std::variant<Expr, GridFunction>;

double eval_storage(const StorageFn& s, std::span<const double> x);

struct GridLayout {
  std::vector<int> nodes;                      // per dimension
  std::vector<std::vector<double>> mandatory;  // per dimension
};

struct NamedStorage {
  std::string name;
  Expr expr;
};

/// A labeled grid-function factory (candidate fixed points printed for the
/// builtin problems).
struct NamedCandidate {
  std::string name;
  std::function<GridFunction(GridPtr)> make;
};

struct ProblemSpec {
  int dim = 1;
  Box box;
  std::vector<Expr> dynamics;  // one expression per state component
  StageCost cost;
  ControlInterval control;
  double discount = 1.0;  // gamma in (0,1]; 1 = undiscounted
  std::optional<Expr> storage;
  std::optional<double> shift_c;
  std::optional<Equilibrium> equilibrium;
  GridLayout grid;

  std::string name;
  std::string description;
  std::string tag;  // reference tag shown by `solver list`

  std::vector<NamedStorage> storages;
  std::vector<NamedCandidate> candidates;

  GridPtr make_grid() const;
  std::vector<double> f(std::span<const double> x, double u) const;
  double stage(std::span<const double> x, double u) const { return cost(x, u); }

  const NamedStorage* find_storage(const std::string& storage_name) const;
  const NamedCandidate* find_candidate(const std::string& candidate_name) const;

  void validate() const;  // dimensions, variable ranges, gamma range
};

std::vector<std::string> builtin_names();
ProblemSpec builtin(const std::string& name);

ProblemSpec load_config(const std::filesystem::path& path);
ProblemSpec problem_from_json_text(const std::string& text);

/// Closed-loop rollout under a feedback policy: an expression u(x) or a
/// control table interpolated on the grid.
using Policy = std::variant<Expr, GridFunction>;

struct Trajectory {
  std::vector<std::vector<double>> x;  // length T+1
  std::vector<double> u;               // length T
  std::vector<double> stage_cost;      // length T
  std::vector<double> running_avg;     // length T
};

Trajectory simulate(const ProblemSpec& spec, const Policy& policy,
                    std::span<const double> x0, int T);

}  // namespace sbe
