#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbe/bellman.hpp"
#include "sbe/dissipativity.hpp"
#include "sbe/io.hpp"
#include "sbe/oracle.hpp"
#include "sbe/problem.hpp"
#include "sbe/solve.hpp"

namespace fs = std::filesystem;
using namespace sbe;

namespace {

ProblemSpec resolve_problem(const std::string& arg) {
  for (const std::string& n : builtin_names())
    if (n == arg) return builtin(arg);
  return load_config(arg);
}

GridFunction make_init(const std::string& init, const ProblemSpec& spec, GridPtr grid) {
  if (init == "zero") return GridFunction(std::move(grid), 0.0);
  if (init == "neg-storage") {
    if (!spec.storage)
      throw std::runtime_error("--init neg-storage: problem has no storage function");
    return terminal_from_storage(std::move(grid), *spec.storage);
  }
  Expr e = Expr::parse(init);
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    auto x = grid->node(i);
    v[i] = e.eval(x, 0.0);
  }
  return GridFunction(std::move(grid), std::move(v));
}

int cmd_list() {
  auto names = builtin_names();  // already sorted
  std::size_t width = 0;
  for (const auto& n : names) width = std::max(width, n.size());
  for (const auto& n : names) {
    ProblemSpec p = builtin(n);
    std::cout << n << std::string(width - n.size() + 2, ' ') << "§" << p.tag << "  "
              << p.description << "\n";
  }
  return 0;
}

int cmd_solve(const std::string& problem, const std::string& op_name, double alpha,
              const std::string& init, double tol, int max_iter, const std::string& out_dir,
              double discount) {
  ProblemSpec spec = resolve_problem(problem);
  if (discount > 0) spec.discount = discount;
  CompiledProblem cp(spec);
  if (!cp.invariance().ok) {
    std::ostringstream msg;
    msg << "control invariance violated: worst excess " << cp.invariance().worst_excess
        << " at u=" << cp.invariance().worst_u;
    throw std::runtime_error(msg.str());
  }

  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.alpha = alpha;
  OperatorKind op = operator_from_string(op_name, alpha);

  GridFunction psi0 = make_init(init, spec, cp.grid_ptr());
  SolveResult res = iterate(cp, psi0, op, opts);

  fs::create_directories(out_dir);
  {
    std::ofstream f(fs::path(out_dir) / "trace.csv");
    res.trace.write_csv(f);
  }
  {
    std::ofstream f(fs::path(out_dir) / "report.json");
    f << res.report.to_json() << "\n";
  }
  {
    std::ofstream f(fs::path(out_dir) / "psi_final.csv");
    write_psi_csv(f, res.report.psi);
  }
  std::cout << "status=" << to_string(res.report.status)
            << " iterations=" << res.report.iterations << " c_infty=" << res.report.c_infty
            << " residual=" << res.report.residual << "\n";
  switch (res.report.status) {
    case SolveStatus::Converged: return 0;
    case SolveStatus::Period2: return 2;
    case SolveStatus::Diverged: return 3;
    case SolveStatus::MaxIter: return 4;
  }
  return 4;
}

StorageFn resolve_storage(const std::string& arg, const ProblemSpec& spec) {
  if (const NamedStorage* s = spec.find_storage(arg)) return s->expr;
  return Expr::parse(arg);
}

int cmd_check_storage(const ProblemSpec& spec, const std::string& storage, double shift,
                      bool strict, const std::vector<double>& xe, double ue,
                      const std::string& alpha_fn) {
  CompiledProblem cp(spec);
  StorageFn lam = resolve_storage(storage, spec);
  DissipativityReport rep;
  if (strict) {
    Expr alpha = Expr::parse(alpha_fn.empty() ? "0" : alpha_fn);
    rep = check_strict_dissipativity(cp, lam, xe, ue, alpha);
  } else {
    rep = check_dissipativity(cp, lam, shift);
  }
  std::cout << rep.to_json() << "\n";
  return rep.pass ? 0 : 5;
}

int cmd_check_residual(const ProblemSpec& spec, const std::string& psi_path) {
  CompiledProblem cp(spec);
  std::ifstream in(psi_path);
  if (!in) throw std::runtime_error("cannot open " + psi_path);
  GridFunction psi = read_psi_csv(in, cp.grid_ptr());
  auto [c, residual] = residual_shifted_BE(cp, psi);
  nlohmann::json j;
  j["pass"] = residual <= 1e-6;
  j["c"] = c;
  j["residual"] = residual;
  std::cout << j.dump(2) << "\n";
  return residual <= 1e-6 ? 0 : 5;
}

int cmd_check_oracle(const ProblemSpec& spec, int k) {
  // coarse re-gridding keeps the enumeration budget reasonable
  ProblemSpec coarse = spec;
  coarse.grid.nodes.assign(coarse.grid.nodes.size(), 21);
  coarse.control.samples = 11;
  CompiledProblem cp(coarse);
  GridFunction psi(cp.grid_ptr(), 0.0);
  for (std::size_t i = 0; i < psi.size(); ++i)
    psi[i] = 0.1 * static_cast<double>(i % 7) - 0.2;

  GridFunction oracle = brute_force_value(cp, psi, k);
  GridFunction dp = psi;
  for (int t = 0; t < k; ++t) dp = apply_T_value(cp, dp);
  double worst = 0.0;
  for (std::size_t i = 0; i < dp.size(); ++i)
    worst = std::max(worst, std::fabs(dp[i] - oracle[i]));

  nlohmann::json j;
  j["pass"] = worst <= 1e-10;
  j["k"] = k;
  j["max_abs_gap"] = worst;
  std::cout << j.dump(2) << "\n";
  return worst <= 1e-10 ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grid solver for shifted Bellman equations and average-cost optimal control"};
  app.require_subcommand(1);

  app.add_subcommand("list", "list builtin problems");

  auto* solve = app.add_subcommand("solve", "run an operator iteration");
  std::string problem, op_name = "t-hat", init = "zero", out_dir = ".";
  double alpha = 0.5, tol = 1e-9, discount = 0;
  int max_iter = 10000;
  solve->add_option("--problem", problem, "builtin name or config path")->required();
  solve->add_option("--operator", op_name, "t | t-hat | t-check | alpha");
  solve->add_option("--alpha", alpha, "weight for the alpha-shift operator");
  solve->add_option("--init", init, "zero | neg-storage | <expression>");
  solve->add_option("--tol", tol, "convergence tolerance");
  solve->add_option("--max-iter", max_iter, "iteration cap");
  solve->add_option("--out", out_dir, "output directory");
  solve->add_option("--discount", discount, "override discount factor");

  auto* check = app.add_subcommand("check", "dissipativity / residual / oracle checks");
  std::string c_problem, storage, alpha_fn, psi_path;
  double shift = 0, ue = 0;
  std::vector<double> xe;
  bool strict = false, residual_mode = false, oracle_mode = false;
  int oracle_k = 3;
  check->add_option("--problem", c_problem, "builtin name or config path")->required();
  check->add_option("--storage", storage, "storage: named (e.g. lambda1) or expression");
  check->add_option("--shift", shift, "shift constant c");
  check->add_flag("--strict", strict, "strict dissipativity");
  check->add_option("--xe", xe, "equilibrium state");
  check->add_option("--ue", ue, "equilibrium control");
  check->add_option("--alpha-fn", alpha_fn, "margin function of r = ||x - xe|| (use x1 as r)");
  check->add_flag("--residual", residual_mode, "shifted-BE residual of --psi");
  check->add_option("--psi", psi_path, "psi_final.csv to check");
  check->add_flag("--oracle", oracle_mode, "DP vs enumeration equivalence");
  check->add_option("--k", oracle_k, "oracle horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  try {
    if (app.got_subcommand("list")) return cmd_list();
    if (app.got_subcommand("solve"))
      return cmd_solve(problem, op_name, alpha, init, tol, max_iter, out_dir, discount);
    ProblemSpec spec = resolve_problem(c_problem);
    if (residual_mode) return cmd_check_residual(spec, psi_path);
    if (oracle_mode) return cmd_check_oracle(spec, oracle_k);
    if (storage.empty())
      throw std::runtime_error("check: need --storage, --residual or --oracle");
    return cmd_check_storage(spec, storage, shift, strict, xe, ue, alpha_fn);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
