// phfem: primal hybrid finite elements on 2D triangular meshes.
//
// Subcommands: topology, refine, solve-elliptic, solve-parabolic,
// convergence, bench. A mesh directory holds coordinates.dat, elements.dat,
// dirichlet.dat and neumann.dat (1-based node indices).

#include "phfem/analysis.hpp"
#include "phfem/parabolic.hpp"
#include "phfem/refine.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace phfem;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(double v, const char* spec = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

struct LevelRange {
  int first = 1;
  int last = 1;
};

// "5" means levels 1..5; "5:8" means levels 5..8.
LevelRange parse_levels(const std::string& text) {
  LevelRange range;
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      range.first = 1;
      range.last = std::stoi(text);
    } else {
      range.first = std::stoi(text.substr(0, colon));
      range.last = std::stoi(text.substr(colon + 1));
    }
  } catch (const std::exception&) {
    throw ConfigError("invalid --levels '" + text + "' (use N or FIRST:LAST)");
  }
  if (range.first < 0 || range.last < range.first)
    throw ConfigError("empty or negative level range '" + text + "'");
  return range;
}

struct StudyConfig {
  std::string mesh_dir = "data/unit-square";
  std::string problem = "elliptic-poly";
  std::string levels = "4";
  std::string out;
  std::string export_solution;
  std::vector<double> A_override;  // a11 a12 a22
  std::vector<double> p_override;  // p1 p2
  std::optional<double> delta_override;
  std::optional<double> k_override;
  double t_end = 1.0;
  double solver_tol = 1e-10;
};

ProblemCoefficients effective_coefficients(const StudyConfig& cfg,
                                           const ProblemCoefficients& base) {
  Eigen::Matrix2d A = base.A;
  Eigen::Vector2d p = base.p;
  double delta = base.delta;
  if (!cfg.A_override.empty()) {
    if (cfg.A_override.size() != 3) throw ConfigError("--A expects a11,a12,a22");
    A << cfg.A_override[0], cfg.A_override[1], cfg.A_override[1], cfg.A_override[2];
  }
  if (!cfg.p_override.empty()) {
    if (cfg.p_override.size() != 2) throw ConfigError("--p expects p1,p2");
    p << cfg.p_override[0], cfg.p_override[1];
  }
  if (cfg.delta_override) delta = *cfg.delta_override;
  try {
    return ProblemCoefficients(A, p, delta);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

void export_solution_files(const std::string& stem, const Mesh& mesh,
                           const EdgeTopology& topology, const EdgeClassification& cls,
                           const DiscreteSolution& sol) {
  std::ofstream u_file = open_out(stem + "_u.csv");
  u_file << "element,u1,u2,u3\n";
  for (int m = 0; m < mesh.element_count(); ++m)
    u_file << m + 1 << ',' << fmt(sol.primal[3 * m]) << ',' << fmt(sol.primal[3 * m + 1])
           << ',' << fmt(sol.primal[3 * m + 2]) << '\n';

  std::ofstream l_file = open_out(stem + "_lambda.csv");
  l_file << "edge,node_start,node_end,lambda\n";
  for (int e : cls.retained_edges)
    l_file << e + 1 << ',' << topology.edge_nodes[e][0] + 1 << ','
           << topology.edge_nodes[e][1] + 1 << ',' << fmt(sol.multiplier[cls.retained_pos[e]])
           << '\n';
}

// Shared per-level pipeline for the study drivers.
struct LevelResult {
  int level = 0;
  int n_elements = 0;
  double h = 0.0;
  double k = 0.0;
  int steps = 0;
  double err_h1 = 0.0, err_l2 = 0.0, err_m = 0.0;
  double assembly_seconds = 0.0, solve_seconds = 0.0, error_seconds = 0.0;
  double per_step_seconds = 0.0;
};

const ManufacturedProblem& lookup_problem(const std::string& name) {
  try {
    return find_problem(name);
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
}

std::vector<LevelResult> run_study(const StudyConfig& cfg, bool parabolic) {
  const LevelRange range = parse_levels(cfg.levels);
  if (range.first < 1) throw ConfigError("study levels start at 1");
  const ManufacturedProblem& problem = lookup_problem(cfg.problem);
  if (parabolic && !problem.time_dependent)
    throw ConfigError("problem '" + cfg.problem + "' is stationary");
  const ProblemCoefficients coeffs = effective_coefficients(cfg, problem.coeffs);

  Mesh mesh = load_mesh_dir(cfg.mesh_dir);

  std::vector<LevelResult> results;
  for (int level = 1; level <= range.last; ++level) {
    mesh = red_refine(mesh, build_topology(mesh));
    if (level < range.first) continue;

    const EdgeTopology topo = build_topology(mesh);
    const EdgeClassification cls = classify_edges(topo, mesh);

    LevelResult r;
    r.level = level;
    r.n_elements = mesh.element_count();
    r.h = mesh_size(mesh);

    const double t0 = now_seconds();
    const GlobalOperators ops = assemble_operators(mesh, topo, cls, coeffs);
    const double t1 = now_seconds();

    DiscreteSolution sol;
    double final_time = 0.0;
    if (!parabolic) {
      const Eigen::VectorXd load =
          assemble_load(mesh, problem.f) + assemble_neumann(mesh, topo, cls, problem.g);
      const Eigen::VectorXd bd = assemble_dirichlet(mesh, topo, cls, problem.u_D);
      const SparseMatrix system = build_saddle_matrix(ops);
      const Eigen::VectorXd rhs = build_saddle_rhs(load, bd);
      const Eigen::VectorXd x = solve_sparse(system, rhs);
      const double residual = (system.eigen() * x - rhs).lpNorm<Eigen::Infinity>() /
                              std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
      if (residual > cfg.solver_tol)
        throw SolverError("saddle residual " + std::to_string(residual) +
                          " exceeds --solver-tol at level " + std::to_string(level));
      sol.primal = x.head(ops.primal_dofs);
      sol.multiplier = x.tail(ops.multipliers);
    } else {
      r.k = cfg.k_override ? *cfg.k_override : r.h;
      const TimeGrid grid = [&] {
        try {
          return TimeGrid::from_step(cfg.t_end, r.k);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }();
      r.steps = grid.n_steps;
      ManufacturedProblem study_problem = problem;
      study_problem.coeffs = coeffs;
      ParabolicStudyRun run = run_parabolic_study(mesh, topo, cls, study_problem, grid);
      sol = std::move(run.solution);
      final_time = run.evaluation_time;
      const Eigen::VectorXd bd =
          assemble_dirichlet(mesh, topo, cls, study_problem.u_D, final_time);
      const double residual =
          (ops.constraint.eigen() * sol.primal + bd).lpNorm<Eigen::Infinity>();
      if (residual > cfg.solver_tol)
        throw SolverError("constraint residual " + std::to_string(residual) +
                          " exceeds --solver-tol at level " + std::to_string(level));
    }
    const double t2 = now_seconds();

    r.err_h1 = error_h1(mesh, sol, problem, final_time);
    r.err_l2 = error_l2(mesh, sol, problem, final_time);
    const Eigen::VectorXd exact_k = exact_multiplier(mesh, topo, cls, problem, final_time);
    r.err_m = error_multiplier(exact_k, sol.multiplier, ops.constraint, ops.stiffness);
    const double t3 = now_seconds();

    r.assembly_seconds = t1 - t0;
    r.solve_seconds = t2 - t1;
    r.error_seconds = t3 - t2;
    if (r.steps > 0) r.per_step_seconds = r.solve_seconds / r.steps;
    results.push_back(r);

    if (level == range.last && !cfg.export_solution.empty())
      export_solution_files(cfg.export_solution, mesh, topo, cls, sol);
  }
  return results;
}

void write_solve_csv(std::ostream& out, const std::vector<LevelResult>& results,
                     bool parabolic) {
  if (parabolic)
    out << "level,nE,h,k,steps,err_h1,err_l2,err_m,assembly_seconds,solve_seconds,"
           "per_step_seconds\n";
  else
    out << "level,nE,h,err_h1,err_l2,err_m,assembly_seconds,solve_seconds\n";
  for (const auto& r : results) {
    out << r.level << ',' << r.n_elements << ',' << fmt(r.h);
    if (parabolic) out << ',' << fmt(r.k) << ',' << r.steps;
    out << ',' << fmt(r.err_h1) << ',' << fmt(r.err_l2) << ',' << fmt(r.err_m) << ','
        << fmt(r.assembly_seconds, "%.6f") << ',' << fmt(r.solve_seconds, "%.6f");
    if (parabolic) out << ',' << fmt(r.per_step_seconds, "%.6f");
    out << '\n';
  }
}

void write_convergence_csv(std::ostream& out, const std::vector<LevelResult>& results,
                           bool parabolic) {
  std::vector<double> hs, e_h1, e_l2, e_m;
  for (const auto& r : results) {
    hs.push_back(r.h);
    e_h1.push_back(r.err_h1);
    e_l2.push_back(r.err_l2);
    e_m.push_back(r.err_m);
  }
  std::vector<double> o_h1, o_l2, o_m;
  if (results.size() >= 2) {
    o_h1 = convergence_orders(e_h1, hs);
    o_l2 = convergence_orders(e_l2, hs);
    o_m = convergence_orders(e_m, hs);
  }

  out << "level,nE,h" << (parabolic ? ",k,steps" : "")
      << ",err_h1,order_h1,err_l2,order_l2,err_m,order_m\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out << r.level << ',' << r.n_elements << ',' << fmt(r.h);
    if (parabolic) out << ',' << fmt(r.k) << ',' << r.steps;
    auto order = [&](const std::vector<double>& o) {
      return i == 0 ? std::string() : fmt(o[i - 1]);
    };
    out << ',' << fmt(r.err_h1) << ',' << order(o_h1) << ',' << fmt(r.err_l2) << ','
        << order(o_l2) << ',' << fmt(r.err_m) << ',' << order(o_m) << '\n';
  }
}

void print_convergence_summary(const std::vector<LevelResult>& results, bool parabolic) {
  std::printf("%5s %8s %10s%s %12s %9s %12s %9s %12s %9s\n", "level", "nE", "h",
              parabolic ? "        k" : "", "err_H1", "order", "err_L2", "order", "err_M",
              "order");
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    auto order = [&](double e_prev, double e, double h_prev, double h) {
      return std::log(e_prev / e) / std::log(h_prev / h);
    };
    std::string o1 = "-", o2 = "-", o3 = "-";
    if (i > 0) {
      const auto& q = results[i - 1];
      o1 = fmt(order(q.err_h1, r.err_h1, q.h, r.h), "%.4f");
      o2 = fmt(order(q.err_l2, r.err_l2, q.h, r.h), "%.4f");
      o3 = fmt(order(q.err_m, r.err_m, q.h, r.h), "%.4f");
    }
    std::printf("%5d %8d %10.6g%s %12.5g %9s %12.5g %9s %12.5g %9s\n", r.level,
                r.n_elements, r.h, parabolic ? fmt(r.k, " %8.6g").c_str() : "", r.err_h1,
                o1.c_str(), r.err_l2, o2.c_str(), r.err_m, o3.c_str());
  }
}

int cmd_topology(const std::string& mesh_dir, int levels, const std::string& out_path) {
  Mesh mesh = load_mesh_dir(mesh_dir);
  for (int l = 0; l < levels; ++l) mesh = red_refine(mesh, build_topology(mesh));
  const EdgeTopology topo = build_topology(mesh);
  const std::vector<double> lengths = edge_lengths(mesh, topo);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file = open_out(out_path);
    out = &file;
  }
  *out << "edge,node_start,node_end,t_plus,t_minus,led,led_tn,length\n";
  for (int e = 0; e < topo.edge_count(); ++e) {
    const auto& [a, b] = topo.edge_nodes[e];
    const auto& [tp, tm] = topo.edge_elements[e];
    *out << e + 1 << ',' << a + 1 << ',' << b + 1 << ',' << tp + 1 << ',' << tm + 1 << ','
         << topo.local_in_tplus[e] + 1 << ','
         << (tm >= 0 ? topo.local_in_tminus[e] + 1 : 0) << ',' << fmt(lengths[e]) << '\n';
  }
  return 0;
}

int cmd_refine(const std::string& mesh_dir, int levels, const std::string& out_dir) {
  Mesh mesh = load_mesh_dir(mesh_dir);
  for (int l = 0; l < levels; ++l) mesh = red_refine(mesh, build_topology(mesh));
  std::filesystem::create_directories(out_dir);
  save_mesh_dir(mesh, out_dir);
  std::printf("wrote level-%d mesh (%d elements, %d nodes) to %s\n", levels,
              mesh.element_count(), mesh.node_count(), out_dir.c_str());
  return 0;
}

int cmd_solve(const StudyConfig& cfg, bool parabolic) {
  const auto results = run_study(cfg, parabolic);
  if (!cfg.out.empty()) {
    std::ofstream f = open_out(cfg.out);
    write_solve_csv(f, results, parabolic);
  } else {
    write_solve_csv(std::cout, results, parabolic);
  }
  return 0;
}

int cmd_convergence(const StudyConfig& cfg) {
  const bool parabolic = lookup_problem(cfg.problem).time_dependent;
  const auto results = run_study(cfg, parabolic);

  if (!cfg.out.empty()) {
    std::ofstream f = open_out(cfg.out);
    write_convergence_csv(f, results, parabolic);
    // Timings go to a side file so the results CSV is bit-reproducible.
    const std::string stem = cfg.out.size() > 4 && cfg.out.ends_with(".csv")
                                 ? cfg.out.substr(0, cfg.out.size() - 4)
                                 : cfg.out;
    std::ofstream t = open_out(stem + "_timings.csv");
    t << "level,assembly_seconds,solve_seconds,error_seconds\n";
    for (const auto& r : results)
      t << r.level << ',' << fmt(r.assembly_seconds, "%.6f") << ','
        << fmt(r.solve_seconds, "%.6f") << ',' << fmt(r.error_seconds, "%.6f") << '\n';
  }
  print_convergence_summary(results, parabolic);
  return 0;
}

int cmd_bench(const std::string& mesh_dir, const std::string& levels,
              const std::string& out_path) {
  const LevelRange range = parse_levels(levels);
  Mesh mesh = load_mesh_dir(mesh_dir);
  const ProblemCoefficients coeffs(Eigen::Matrix2d::Identity(), Eigen::Vector2d(1.0, 1.0),
                                   1.0);

  struct BenchRow {
    int level, n_elements;
    double topology_s, refine_s, operators_s, constraint_s;
  };
  std::vector<BenchRow> rows;

  auto timed = [](int reps, auto&& fn) {
    std::vector<double> samples;
    for (int r = 0; r < reps; ++r) {
      const double t0 = now_seconds();
      fn();
      samples.push_back(now_seconds() - t0);
    }
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
  };

  for (int level = 1; level <= range.last; ++level) {
    const int reps = level < 7 ? 3 : 1;
    EdgeTopology topo;
    double refine_s = timed(1, [&] { mesh = red_refine(mesh, build_topology(mesh)); });
    if (level < range.first) continue;

    const double topo_s = timed(reps, [&] { topo = build_topology(mesh); });
    const EdgeClassification cls = classify_edges(topo, mesh);
    GlobalOperators ops;
    const double ops_s = timed(reps, [&] { ops = assemble_volume_operators(mesh, coeffs); });
    const double cons_s =
        timed(reps, [&] { ops.constraint = assemble_constraint(mesh, topo, cls); });
    rows.push_back({level, mesh.element_count(), topo_s, refine_s, ops_s, cons_s});
  }

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file = open_out(out_path);
    out = &file;
  }
  *out << "level,nE,topology_seconds,refine_seconds,operators_seconds,constraint_seconds\n";
  for (const auto& r : rows)
    *out << r.level << ',' << r.n_elements << ',' << fmt(r.topology_s, "%.6f") << ','
         << fmt(r.refine_s, "%.6f") << ',' << fmt(r.operators_s, "%.6f") << ','
         << fmt(r.constraint_s, "%.6f") << '\n';

  if (rows.size() < 2) {
    std::printf("regression: undefined (need at least two levels)\n");
    return 0;
  }
  // Log-log regression of (topology + operators + constraint) time vs nE.
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    xs.push_back(std::log(static_cast<double>(r.n_elements)));
    ys.push_back(std::log(r.topology_s + r.operators_s + r.constraint_s));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double r_num = n * sxy - sx * sy;
  const double r2 = r_num * r_num / ((n * sxx - sx * sx) * (n * syy - sy * sy));
  std::printf("log-log regression of assembly+topology time vs nE: slope %.4f, R^2 %.4f\n",
              slope, r2);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal hybrid FEM for elliptic and parabolic problems on triangle meshes"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "key=value config file ([subcommand] sections); flags win");

  StudyConfig cfg;
  std::string levels_topology = "0";
  std::string bench_levels = "5:8";
  std::string out_dir;

  auto add_mesh = [&cfg](CLI::App* sub) {
    sub->fallthrough();  // lets --config after the subcommand reach the app
    sub->add_option("--mesh", cfg.mesh_dir, "mesh directory")->capture_default_str();
  };
  auto add_study = [&](CLI::App* sub) {
    add_mesh(sub);
    sub->add_option("--problem", cfg.problem, "manufactured problem name")
        ->capture_default_str();
    sub->add_option("--levels", cfg.levels, "refinement levels (N or FIRST:LAST)")
        ->capture_default_str();
    sub->add_option("--out", cfg.out, "output CSV path");
    sub->add_option("--export-solution", cfg.export_solution,
                    "stem for <stem>_u.csv and <stem>_lambda.csv at the last level");
    sub->add_option("--A", cfg.A_override, "override A as a11,a12,a22")->delimiter(',');
    sub->add_option("--p", cfg.p_override, "override p as p1,p2")->delimiter(',');
    sub->add_option("--delta", cfg.delta_override, "override delta");
    sub->add_option("--solver-tol", cfg.solver_tol, "residual acceptance threshold")
        ->capture_default_str();
  };
  auto add_time = [&cfg](CLI::App* sub) {
    sub->add_option("--k", cfg.k_override, "time step (default h)");
    sub->add_option("--t-end", cfg.t_end, "final time")->capture_default_str();
  };

  auto* topo_cmd = app.add_subcommand("topology", "dump the edge table as CSV");
  add_mesh(topo_cmd);
  topo_cmd->add_option("--levels", levels_topology, "refinements before dumping");
  topo_cmd->add_option("--out", cfg.out, "output CSV path");

  auto* refine_cmd = app.add_subcommand("refine", "uniformly refine and write a mesh");
  add_mesh(refine_cmd);
  refine_cmd->add_option("--levels", levels_topology, "number of refinements")->required();
  refine_cmd->add_option("--out", out_dir, "output mesh directory")->required();

  auto* ell_cmd = app.add_subcommand("solve-elliptic", "per-level elliptic solves");
  add_study(ell_cmd);

  auto* par_cmd = app.add_subcommand("solve-parabolic", "per-level parabolic solves");
  add_study(par_cmd);
  add_time(par_cmd);

  auto* conv_cmd = app.add_subcommand("convergence", "convergence study with orders");
  add_study(conv_cmd);
  add_time(conv_cmd);

  auto* bench_cmd = app.add_subcommand("bench", "assembly/topology timing benchmark");
  add_mesh(bench_cmd);
  bench_cmd->add_option("--levels", bench_levels, "level range (FIRST:LAST)")
      ->capture_default_str();
  bench_cmd->add_option("--out", cfg.out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto parse_count = [](const std::string& text) {
    try {
      const int n = std::stoi(text);
      if (n < 0) throw std::invalid_argument("negative");
      return n;
    } catch (const std::exception&) {
      throw ConfigError("invalid --levels '" + text + "' (expected a count >= 0)");
    }
  };

  try {
    if (topo_cmd->parsed())
      return cmd_topology(cfg.mesh_dir, parse_count(levels_topology), cfg.out);
    if (refine_cmd->parsed())
      return cmd_refine(cfg.mesh_dir, parse_count(levels_topology), out_dir);
    if (ell_cmd->parsed()) return cmd_solve(cfg, false);
    if (par_cmd->parsed()) return cmd_solve(cfg, true);
    if (conv_cmd->parsed()) return cmd_convergence(cfg);
    if (bench_cmd->parsed()) return cmd_bench(cfg.mesh_dir, bench_levels, cfg.out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
