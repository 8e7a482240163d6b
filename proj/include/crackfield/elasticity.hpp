#pragma once

#include <vector>

#include "crackfield/grid.hpp"
#include "crackfield/linear_solver.hpp"
#include "crackfield/model.hpp"

namespace crackfield {

/// Degraded stiffness max(eta, (1-z)^2) of a single cell.
double cell_stiffness(double z, double eta);

/// Face coefficient: harmonic mean of (1-zK)^2 and (1-zL)^2, floored at eta.
double face_coefficient(double zK, double zL, double eta);

/// Dirichlet data at the midpoints of the bottom (x2 = 0) and top (x2 = H)
/// boundary faces, one entry per column.
struct BoundaryValues {
  std::vector<double> bottom;
  std::vector<double> top;
};

BoundaryValues surfing_boundary(const GridSpec& g, const SurfingBC& bc, double t);

/// Anti-plane equilibrium div((1-z)^2 grad u) = 0 with Dirichlet data on
/// top/bottom and zero flux on the left/right sides.
struct ElasticProblem {
  GridSpec grid;
  ScalarField z;
  BoundaryValues boundary;
  double eta = 1e-6;
  SolverOptions solver{1e-8, 0};
};

ElasticProblem make_elastic_problem(const ScalarField& z, const SurfingBC& bc, double t,
                                    double eta, const SolverOptions& solver = {});

/// Assembled FV system; row scaling is the cell-flux balance (units of u).
struct LinearSystem {
  Stencil5 A;
  std::vector<double> b;
};

LinearSystem assemble_elastic(const ElasticProblem& p);

struct ElasticSolution {
  ScalarField u;
  int iterations = 0;
  double residual = 0.0;
};

/// Warm-started PCG solve. Throws NoConvergence when max_iter is reached.
ElasticSolution solve_displacement(const ElasticProblem& p, const ScalarField& u_init);

/// (mu/2)(1-z)^2 |grad u|^2 with centered differences (one-sided on the outer cells).
ScalarField strain_energy_density(const ScalarField& u, const ScalarField& z, double mu);

/// Cell gradient rebuilt from FV face fluxes: each face flux divided by the
/// cell's own stiffness, averaged over the two faces per direction. Across a
/// fully degraded face the flux vanishes, so the gradient on the intact side
/// is not polluted by the displacement jump. Dirichlet faces use the ghost
/// value 2g - u.
GradientField flux_gradient(const ScalarField& u, const ScalarField& z, double eta,
                            const BoundaryValues& boundary);

}  // namespace crackfield
