#pragma once

#include "obstacle_fem/adapt.hpp"
#include "obstacle_fem/assembly.hpp"
#include "obstacle_fem/cli.hpp"
#include "obstacle_fem/errors.hpp"
#include "obstacle_fem/estimator.hpp"
#include "obstacle_fem/linear_solve.hpp"
#include "obstacle_fem/mesh.hpp"
#include "obstacle_fem/multiplier.hpp"
#include "obstacle_fem/problems.hpp"
#include "obstacle_fem/quadrature.hpp"
#include "obstacle_fem/spaces.hpp"
#include "obstacle_fem/vi_solver.hpp"
