#pragma once

// Doerfler marking and the SOLVE -> ESTIMATE -> MARK -> REFINE loop.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "obstacle_fem/assembly.hpp"
#include "obstacle_fem/errors.hpp"
#include "obstacle_fem/estimator.hpp"
#include "obstacle_fem/mesh.hpp"
#include "obstacle_fem/multiplier.hpp"
#include "obstacle_fem/problems.hpp"
#include "obstacle_fem/quadrature.hpp"
#include "obstacle_fem/spaces.hpp"
#include "obstacle_fem/vi_solver.hpp"

namespace obstacle_fem {

struct MarkResult {
  std::vector<int> marked;  ///< ascending ids
  bool converged = false;   ///< all indicators were zero
};

/// Smallest set, taken greedily by descending indicator (ties by ascending
/// id), whose indicators sum to at least theta times the total.
inline MarkResult dorfler_mark(const std::vector<double>& indicators, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("dorfler_mark: theta must lie in (0, 1)");
  MarkResult out;
  const double total = std::accumulate(indicators.begin(), indicators.end(), 0.0);
  if (!(total > 0.0)) {
    out.converged = true;
    return out;
  }
  std::vector<int> order(indicators.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return indicators[a] > indicators[b]; });
  double sum = 0.0;
  for (int t : order) {
    if (sum >= theta * total) break;
    sum += indicators[t];
    out.marked.push_back(t);
  }
  std::sort(out.marked.begin(), out.marked.end());
  return out;
}

inline MarkResult dorfler_mark(const ElementIndicators& ind, double theta) { return dorfler_mark(ind.total_sq, theta); }

struct AdaptiveConfig {
  double theta = 0.3;
  std::size_t max_dofs = 200000;
  int max_levels = 40;
  bool uniform = false;
  /// Subdivisions per side of the initial criss-cross mesh; 0 picks 1 for
  /// adaptive runs and 2 (h = 3/4 on the square) for uniform runs.
  int initial_subdivisions = 0;
  SolverOptions solver;
  EstimatorForm estimator_form = EstimatorForm::Simplified;
  int load_degree = 4;

  int initial_n() const { return initial_subdivisions > 0 ? initial_subdivisions : (uniform ? 2 : 1); }
};

struct LevelRecord {
  int level = 0;
  std::size_t dofs = 0;  ///< interior (unknown) P2 dofs
  double h = 0.0;
  double error = std::numeric_limits<double>::quiet_NaN();
  EstimatorSummary estimator;
  double efficiency = std::numeric_limits<double>::quiet_NaN();
  int pdas_iterations = 0;
  double seconds = 0.0;
};

struct ConvergenceHistory {
  std::vector<LevelRecord> levels;

  std::size_t size() const { return levels.size(); }
};

/// Everything computed on one level; passed to observers.
struct LevelState {
  int level = 0;
  const Mesh* mesh = nullptr;
  const EdgeTable* edges = nullptr;
  const DofMap* dofs = nullptr;
  const SolveResult* solve = nullptr;
  const MultiplierPair* multiplier = nullptr;
  const P2Function* chi_h = nullptr;
  const ElementIndicators* indicators = nullptr;
  const LevelRecord* record = nullptr;
};

using LevelObserver = std::function<void(const LevelState&)>;

/// Active set on `mesh` predicted from the active set on its parent mesh:
/// an interior midpoint is active iff the nearest midpoint of its parent
/// triangle was active.
inline ActiveSet inherit_active_set(const Mesh& mesh, const EdgeTable& edges, const DofMap& dofs,
                                    const Mesh& parent_mesh, const EdgeTable& parent_edges,
                                    const DofMap& parent_dofs, const ActiveSet& parent_active) {
  std::vector<char> was_active(parent_dofs.size(), 0);
  for (int d : parent_active) was_active[d] = 1;
  ActiveSet out;
  for (std::size_t k = 0; k < dofs.num_cr(); ++k) {
    const Edge& e = edges.edges[dofs.cr_edge(static_cast<int>(k))];
    const int parent = mesh.parent(e.triangles[0]);
    if (parent < 0 || static_cast<std::size_t>(parent) >= parent_mesh.num_triangles()) continue;
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int pe : parent_edges.triangle_edges[parent]) {
      const double dist = norm(parent_edges.edges[pe].midpoint - e.midpoint);
      if (dist < best_dist) best = pe, best_dist = dist;
    }
    if (best >= 0 && was_active[parent_dofs.edge_dof(best)]) out.push_back(dofs.cr_to_dof(static_cast<int>(k)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Dirichlet data must lie above the obstacle at every boundary node.
inline void check_boundary_feasibility(const ProblemSpec& spec, const Mesh& mesh, const EdgeTable& edges,
                                       const DofMap& dofs) {
  for (std::size_t d = 0; d < dofs.size(); ++d) {
    const int di = static_cast<int>(d);
    if (!dofs.is_boundary(di)) continue;
    const Vec2 p = dofs.kind(di) == DofKind::Vertex ? mesh.vertex(dofs.entity(di)) : edges.edges[dofs.entity(di)].midpoint;
    if (spec.g(p) < spec.chi(p) - 1e-12) {
      std::ostringstream os;
      os << "boundary data lies below the obstacle at (" << p.x << ", " << p.y << ")";
      throw InvalidArgument(os.str());
    }
  }
}

/// SOLVE and ESTIMATE on a fixed mesh.
struct LevelSolution {
  EdgeTable edges;
  DofMap dofs;
  SolveResult solve;
  MultiplierPair multiplier;
  P2Function chi_h;
  ElementIndicators indicators;
  LevelRecord record;
};

inline LevelSolution solve_and_estimate(const ProblemSpec& spec, const Mesh& mesh, const AdaptiveConfig& config,
                                        const ActiveSet& warm_start = {}) {
  const auto start = std::chrono::steady_clock::now();
  EdgeTable edges = edge_topology(mesh);
  DofMap dofs(mesh, edges);
  check_boundary_feasibility(spec, mesh, edges, dofs);

  const QuadRule rule = make_quad_rule(config.load_degree);
  const SparseOperator stiffness = assemble_stiffness(mesh, dofs);
  const Vector load = assemble_load(spec.f, mesh, dofs, rule);
  const DirichletRecord bc = make_dirichlet_record(spec.g, mesh, dofs, edges);

  ObstacleConstraints obstacle;
  obstacle.weights = lumped_weights(mesh, dofs);
  for (std::size_t k = 0; k < dofs.num_cr(); ++k) {
    const int e = dofs.cr_edge(static_cast<int>(k));
    obstacle.dofs.push_back(dofs.edge_dof(e));
    obstacle.chi.push_back(spec.chi(edges.edges[e].midpoint));
  }
  SolveResult solve = solve_obstacle(stiffness, load, bc, obstacle, config.solver, warm_start);
  MultiplierPair multiplier = compute_sigma_h(solve, mesh, dofs);
  P2Function chi_h = interpolate_p2(spec.chi, mesh, dofs, edges);
  const ElementClassification classes = classify_elements(solve.active, mesh, dofs);
  const PointwiseObstacle pointwise{spec.chi, spec.grad_chi};
  ElementIndicators indicators = compute_indicators(solve.u, multiplier, spec.f, chi_h, classes, mesh, edges, dofs,
                                                    rule, config.estimator_form, &pointwise);

  LevelRecord rec;
  rec.dofs = bc.free_dofs.size();
  rec.h = mesh.max_diameter();
  rec.estimator = total_estimator(indicators);
  if (spec.exact_grad_u) {
    rec.error = energy_error(solve.u, spec, mesh, dofs);
    rec.efficiency = rec.estimator.eta_total / rec.error;
  }
  rec.pdas_iterations = solve.iterations;
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return LevelSolution{std::move(edges), std::move(dofs), std::move(solve), std::move(multiplier), std::move(chi_h),
                       std::move(indicators), rec};
}

/// Runs the loop until max_levels levels are done, the dof count reaches
/// max_dofs, or the estimator vanishes. Uniform mode rebuilds the
/// criss-cross mesh with twice the subdivisions instead of marking.
inline ConvergenceHistory adaptive_loop(const ProblemSpec& spec, const AdaptiveConfig& config,
                                        const LevelObserver& observer = {}) {
  if (!(config.theta > 0.0 && config.theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
  if (config.max_levels < 1) throw InvalidArgument("max_levels must be >= 1");

  ConvergenceHistory history;
  int n = config.initial_n();
  Mesh mesh = build_crisscross_mesh(spec.domain, n);
  ActiveSet warm;
  for (int level = 0; level < config.max_levels; ++level) {
    LevelSolution sol = [&] {
      try {
        return solve_and_estimate(spec, mesh, config, warm);
      } catch (const NonConvergenceError& e) {
        throw NonConvergenceError("level " + std::to_string(level) + ": " + e.what(), e.last_iterate);
      } catch (const SolverError& e) {
        throw SolverError("level " + std::to_string(level) + ": " + e.what());
      }
    }();
    sol.record.level = level;
    history.levels.push_back(sol.record);
    if (observer)
      observer(LevelState{level, &mesh, &sol.edges, &sol.dofs, &sol.solve, &sol.multiplier, &sol.chi_h,
                          &sol.indicators, &history.levels.back()});

    if (sol.record.dofs >= config.max_dofs || level + 1 == config.max_levels) break;
    if (config.uniform) {
      n *= 2;
      mesh = build_crisscross_mesh(spec.domain, n);
      warm.clear();
      continue;
    }
    const MarkResult mark = dorfler_mark(sol.indicators, config.theta);
    if (mark.converged) break;
    Mesh refined = bisect(mesh, mark.marked);
    const EdgeTable refined_edges = edge_topology(refined);
    const DofMap refined_dofs(refined, refined_edges);
    warm = inherit_active_set(refined, refined_edges, refined_dofs, mesh, sol.edges, sol.dofs, sol.solve.active);
    mesh = std::move(refined);
  }
  return history;
}

inline const char* history_csv_header =
    "level,N,h,error,eta_total,eta1,eta2,eta3,eta4,obst,fb,contact,eff_index,pdas_iters,seconds";

inline void write_history_csv(std::ostream& os, const ConvergenceHistory& history) {
  os << history_csv_header << '\n' << std::setprecision(17);
  for (const LevelRecord& r : history.levels) {
    const auto& e = r.estimator;
    os << r.level << ',' << r.dofs << ',' << r.h << ',' << r.error << ',' << e.eta_total << ',' << e.eta1 << ','
       << e.eta2 << ',' << e.eta3 << ',' << e.eta4 << ',' << e.obst << ',' << e.fb << ',' << e.contact << ','
       << r.efficiency << ',' << r.pdas_iterations << ',' << r.seconds << '\n';
  }
}

inline ConvergenceHistory read_history_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != history_csv_header)
    throw InvalidArgument("read_history_csv: unexpected header");
  ConvergenceHistory history;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 15) throw InvalidArgument("read_history_csv: expected 15 columns in '" + line + "'");
    const auto num = [&](int i) { return std::stod(cells[i]); };
    LevelRecord r;
    r.level = std::stoi(cells[0]);
    r.dofs = std::stoul(cells[1]);
    r.h = num(2);
    r.error = num(3);
    r.estimator.eta_total = num(4);
    r.estimator.eta1 = num(5);
    r.estimator.eta2 = num(6);
    r.estimator.eta3 = num(7);
    r.estimator.eta4 = num(8);
    r.estimator.obst = num(9);
    r.estimator.fb = num(10);
    r.estimator.contact = num(11);
    r.efficiency = num(12);
    r.pdas_iterations = std::stoi(cells[13]);
    r.seconds = num(14);
    history.levels.push_back(r);
  }
  return history;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace obstacle_fem
