#pragma once

// Driver behind the obstacle_afem command line tool: runs a study and
// writes its artifacts to an output directory.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>

#include "obstacle_fem/adapt.hpp"
#include "obstacle_fem/errors.hpp"
#include "obstacle_fem/estimator.hpp"
#include "obstacle_fem/mesh.hpp"
#include "obstacle_fem/problems.hpp"

namespace obstacle_fem {

struct RunConfig {
  std::string problem = "ex1";
  std::string mode = "adaptive";  ///< adaptive | uniform
  double theta = 0.3;
  std::size_t max_dofs = 200000;
  int max_levels = 40;
  int initial_n = 0;  ///< 0: 1 for adaptive, 2 for uniform
  std::string estimator = "simplified";  ///< simplified | full
  std::filesystem::path out = "out";
  bool dump_indicators = false;
  bool dump_mesh = false;
  SolverOptions solver;
};

/// Throws InvalidArgument naming the offending parameter.
inline void validate(const RunConfig& c) {
  if (c.problem != "ex1" && c.problem != "ex2") throw InvalidArgument("--problem must be ex1 or ex2, got '" + c.problem + "'");
  if (c.mode != "adaptive" && c.mode != "uniform") throw InvalidArgument("--mode must be adaptive or uniform, got '" + c.mode + "'");
  if (!(c.theta > 0.0 && c.theta < 1.0)) throw InvalidArgument("--theta must lie in (0, 1), got " + std::to_string(c.theta));
  if (c.max_levels < 1) throw InvalidArgument("--max-levels must be >= 1");
  if (c.max_dofs < 5) throw InvalidArgument("--max-dofs must be at least the coarse mesh dof count");
  if (c.initial_n < 0) throw InvalidArgument("--initial-n must be >= 0");
  if (c.estimator != "simplified" && c.estimator != "full")
    throw InvalidArgument("--estimator must be simplified or full, got '" + c.estimator + "'");
  if (c.solver.max_iterations < 1) throw InvalidArgument("--pdas-max-iters must be >= 1");
  if (!(c.solver.linear_tolerance > 0.0)) throw InvalidArgument("--lin-tol must be positive");
}

inline AdaptiveConfig to_adaptive_config(const RunConfig& c) {
  AdaptiveConfig a;
  a.theta = c.theta;
  a.max_dofs = c.max_dofs;
  a.max_levels = c.max_levels;
  a.uniform = c.mode == "uniform";
  a.initial_subdivisions = c.initial_n;
  a.solver = c.solver;
  a.estimator_form = c.estimator == "full" ? EstimatorForm::Full : EstimatorForm::Simplified;
  return a;
}

inline void write_config_echo(std::ostream& os, const RunConfig& c) {
  os << std::setprecision(17);
  os << "problem " << c.problem << '\n'
     << "mode " << c.mode << '\n'
     << "theta " << c.theta << '\n'
     << "marking sum_{marked} eta_T^2 >= theta * sum_T eta_T^2\n"
     << "max_dofs " << c.max_dofs << '\n'
     << "max_levels " << c.max_levels << '\n'
     << "initial_n " << to_adaptive_config(c).initial_n() << '\n'
     << "estimator " << c.estimator << '\n'
     << "pdas_max_iters " << c.solver.max_iterations << '\n'
     << "lin_tol " << c.solver.linear_tolerance << '\n'
     << "load_quadrature_degree 4\n"
     << "error_quadrature_degree 5\n"
     << "dump_indicators " << (c.dump_indicators ? 1 : 0) << '\n'
     << "dump_mesh " << (c.dump_mesh ? 1 : 0) << '\n';
}

/// Error table with observed orders: against h in uniform mode, against
/// N^(-1) (so optimal P2 adaptivity reads 1) in adaptive mode.
inline void write_table(std::ostream& os, const ConvergenceHistory& history, bool uniform) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %-10s %-22s %-22s %s\n", "level", "N", "h", "||grad(u-u_h)||",
                uniform ? "order(h)" : "order(1/N)");
  os << buf;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const LevelRecord& r = history.levels[i];
    std::string order = "--";
    if (i > 0) {
      const LevelRecord& p = history.levels[i - 1];
      const double rate = uniform ? std::log(p.error / r.error) / std::log(p.h / r.h)
                                  : std::log(p.error / r.error) / std::log(double(r.dofs) / double(p.dofs));
      std::snprintf(buf, sizeof buf, "%.3f", rate);
      order = buf;
    }
    std::snprintf(buf, sizeof buf, "%-8d %-10zu %-22.15g %-22.15f %s\n", r.level, r.dofs, r.h, r.error, order.c_str());
    os << buf;
  }
}

/// Runs the configured study. Returns the process exit status: 0 on
/// success, 1 on solver failure, 2 on bad configuration, 3 on I/O errors.
inline int run(const RunConfig& config, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  try {
    validate(config);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec || !fs::is_directory(config.out)) {
    err << "error: cannot create output directory " << config.out << '\n';
    return 3;
  }
  const auto open = [&](const std::string& name) {
    std::ofstream f(config.out / name);
    if (!f) throw std::ios_base::failure("cannot write " + (config.out / name).string());
    return f;
  };

  try {
    {
      auto f = open("config.echo.txt");
      write_config_echo(f, config);
    }
    const ProblemSpec spec = problem_by_name(config.problem);
    const AdaptiveConfig adaptive = to_adaptive_config(config);
    const auto observer = [&](const LevelState& s) {
      const LevelRecord& r = *s.record;
      log << "level " << r.level << "  N=" << r.dofs << "  error=" << r.error << "  eta=" << r.estimator.eta_total
          << "  pdas=" << r.pdas_iterations << '\n';
      if (config.dump_indicators) {
        auto f = open("indicators_" + std::to_string(s.level) + ".csv");
        write_indicators_csv(f, *s.indicators);
      }
      if (config.dump_mesh) {
        auto f = open("mesh_" + std::to_string(s.level) + ".txt");
        write_mesh(f, *s.mesh);
      }
    };
    const ConvergenceHistory history = adaptive_loop(spec, adaptive, observer);
    {
      auto f = open("history.csv");
      write_history_csv(f, history);
    }
    {
      auto f = open("table.txt");
      write_table(f, history, adaptive.uniform);
    }
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace obstacle_fem
