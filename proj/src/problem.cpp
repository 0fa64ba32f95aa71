#include "sbe/problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sbe {

StageCost::StageCost(Expr e) : expr_(std::move(e)) {
  label_ = expr_->str();
  Expr ex = *expr_;
  fn_ = [ex](std::span<const double> x, double u) { return ex.eval(x, u); };
}

StageCost::StageCost(std::function<double(std::span<const double>, double)> fn,
                     std::string label)
    : fn_(std::move(fn)), label_(std::move(label)) {}

double eval_storage(const StorageFn& s, std::span<const double> x) {
  if (std::holds_alternative<Expr>(s)) return std::get<Expr>(s).eval(x, 0.0);
  return std::get<GridFunction>(s).at(x);
}

GridPtr ProblemSpec::make_grid() const {
  std::vector<int> nodes = grid.nodes;
  if (nodes.empty()) nodes.assign(static_cast<std::size_t>(dim), 2);
  return std::make_shared<const Grid>(
      Grid::build(box, nodes, grid.mandatory));
}

std::vector<double> ProblemSpec::f(std::span<const double> x, double u) const {
  std::vector<double> y(dynamics.size());
  for (std::size_t i = 0; i < dynamics.size(); ++i) y[i] = dynamics[i].eval(x, u);
  return y;
}

const NamedStorage* ProblemSpec::find_storage(const std::string& storage_name) const {
  for (const auto& s : storages)
    if (s.name == storage_name) return &s;
  return nullptr;
}

const NamedCandidate* ProblemSpec::find_candidate(const std::string& candidate_name) const {
  for (const auto& c : candidates)
    if (c.name == candidate_name) return &c;
  return nullptr;
}

void ProblemSpec::validate() const {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("problem: bad dimension");
  if (box.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("problem: box/dim mismatch");
  if (dynamics.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("problem: need one dynamics expression per state");
  for (const Expr& e : dynamics)
    if (e.max_var() > dim)
      throw std::invalid_argument("problem: dynamics reference x" +
                                  std::to_string(e.max_var()) + " beyond dimension");
  if (cost.expr() && cost.expr()->max_var() > dim)
    throw std::invalid_argument("problem: cost references state beyond dimension");
  if (control.lo.empty() || control.hi.empty())
    throw std::invalid_argument("problem: control bounds missing");
  if (control.samples < 1) throw std::invalid_argument("problem: control samples < 1");
  if (!(discount > 0.0) || discount > 1.0)
    throw std::invalid_argument("problem: discount must lie in (0,1]");
  if (equilibrium && equilibrium->x.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("problem: equilibrium dimension mismatch");
}

namespace {

using nlohmann::json;

Expr parse_field(const json& j, const std::string& key) {
  if (!j.contains(key)) throw std::runtime_error("config: missing key '" + key + "'");
  if (!j[key].is_string()) throw std::runtime_error("config: key '" + key + "' must be a string");
  try {
    return Expr::parse(j[key].get<std::string>());
  } catch (const ParseError& pe) {
    throw std::runtime_error("config: in '" + key + "': " + pe.what());
  }
}

}  // namespace

ProblemSpec problem_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }

  ProblemSpec p;
  if (!j.contains("dim")) throw std::runtime_error("config: missing key 'dim'");
  p.dim = j["dim"].get<int>();

  if (!j.contains("box")) throw std::runtime_error("config: missing key 'box'");
  for (const auto& b : j["box"]) {
    if (!b.is_array() || b.size() != 2)
      throw std::runtime_error("config: each box entry must be [lo, hi]");
    p.box.push_back({b[0].get<double>(), b[1].get<double>()});
  }

  if (!j.contains("dynamics")) throw std::runtime_error("config: missing key 'dynamics'");
  for (const auto& d : j["dynamics"]) {
    try {
      p.dynamics.push_back(Expr::parse(d.get<std::string>()));
    } catch (const ParseError& pe) {
      throw std::runtime_error(std::string("config: in 'dynamics': ") + pe.what());
    }
  }

  p.cost = StageCost(parse_field(j, "cost"));

  if (!j.contains("control")) throw std::runtime_error("config: missing key 'control'");
  const json& c = j["control"];
  p.control.lo = parse_field(c, "lo");
  p.control.hi = parse_field(c, "hi");
  if (c.contains("samples")) p.control.samples = c["samples"].get<int>();
  if (c.contains("mandatory"))
    p.control.mandatory = c["mandatory"].get<std::vector<double>>();

  if (j.contains("storage")) p.storage = parse_field(j, "storage");
  if (j.contains("shift_c")) p.shift_c = j["shift_c"].get<double>();
  if (j.contains("discount")) p.discount = j["discount"].get<double>();

  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (g.contains("nodes")) p.grid.nodes = g["nodes"].get<std::vector<int>>();
    if (g.contains("mandatory"))
      p.grid.mandatory = g["mandatory"].get<std::vector<std::vector<double>>>();
  }
  if (p.grid.nodes.empty()) p.grid.nodes.assign(static_cast<std::size_t>(p.dim), 101);

  if (j.contains("equilibrium")) {
    Equilibrium eq;
    eq.x = j["equilibrium"]["x"].get<std::vector<double>>();
    eq.u = j["equilibrium"]["u"].get<double>();
    p.equilibrium = eq;
  }
  p.name = j.value("name", "config");
  p.validate();
  return p;
}

ProblemSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return problem_from_json_text(ss.str());
}

Trajectory simulate(const ProblemSpec& spec, const Policy& policy,
                    std::span<const double> x0, int T) {
  if (T < 1) throw std::invalid_argument("simulate: T must be >= 1");
  Trajectory tr;
  std::vector<double> x(x0.begin(), x0.end());
  ProjectionResult pr = project(x, spec.box);
  x = pr.x;
  tr.x.push_back(x);
  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    double u;
    if (std::holds_alternative<Expr>(policy))
      u = std::get<Expr>(policy).eval(x, 0.0);
    else
      u = std::get<GridFunction>(policy).at(x);
    double cost = spec.stage(x, u);
    std::vector<double> y = spec.f(x, u);
    x = project(y, spec.box).x;
    tr.u.push_back(u);
    tr.stage_cost.push_back(cost);
    total += cost;
    tr.running_avg.push_back(total / (t + 1));
    tr.x.push_back(x);
  }
  return tr;
}

}  // namespace sbe
