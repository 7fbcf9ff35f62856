// Uniform and adaptive P2 studies for the obstacle problem benchmarks.
//
//   obstacle_afem --problem ex1 --mode uniform --max-levels 4 --out ex1_uniform
//   obstacle_afem --problem ex2 --mode adaptive --theta 0.3 --max-dofs 50000

#include <CLI11.hpp>

#include "obstacle_fem/cli.hpp"

int main(int argc, char** argv) {
  obstacle_fem::RunConfig config;
  std::string out = config.out.string();

  CLI::App app{"Adaptive quadratic finite elements for the obstacle problem"};
  app.add_option("--problem", config.problem, "Benchmark: ex1 (square) or ex2 (diamond)")->capture_default_str();
  app.add_option("--mode", config.mode, "adaptive or uniform")->capture_default_str();
  app.add_option("--theta", config.theta, "Doerfler marking fraction in (0,1)")->capture_default_str();
  app.add_option("--max-dofs", config.max_dofs, "Stop once a level has at least this many dofs")->capture_default_str();
  app.add_option("--max-levels", config.max_levels, "Maximum number of levels")->capture_default_str();
  app.add_option("--initial-n", config.initial_n,
                 "Subdivisions per side of the first criss-cross mesh (0: 1 adaptive, 2 uniform)")
      ->capture_default_str();
  app.add_option("--estimator", config.estimator, "simplified or full")->capture_default_str();
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_flag("--dump-indicators", config.dump_indicators, "Write indicators_L.csv per level");
  app.add_flag("--dump-mesh", config.dump_mesh, "Write mesh_L.txt per level");
  app.add_option("--pdas-max-iters", config.solver.max_iterations, "Active set iteration cap")->capture_default_str();
  app.add_option("--lin-tol", config.solver.linear_tolerance, "Linear solve backward error tolerance")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  config.out = out;
  return obstacle_fem::run(config);
}
