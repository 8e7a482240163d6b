#include "crackfield/elasticity.hpp"

#include <algorithm>

#include "crackfield/errors.hpp"

namespace crackfield {

double cell_stiffness(double z, double eta) {
  const double s = (1.0 - z) * (1.0 - z);
  return std::max(eta, s);
}

double face_coefficient(double zK, double zL, double eta) {
  const double p = (1.0 - zK) * (1.0 - zK);
  const double q = (1.0 - zL) * (1.0 - zL);
  const double sum = p + q;
  const double harmonic = sum > 0.0 ? 2.0 * p * q / sum : 0.0;
  return std::max(eta, harmonic);
}

BoundaryValues surfing_boundary(const GridSpec& g, const SurfingBC& bc, double t) {
  BoundaryValues out;
  out.bottom.resize(g.n1);
  out.top.resize(g.n1);
  for (int i = 0; i < g.n1; ++i) {
    out.bottom[i] = surfing_displacement(bc, g.x1(i), 0.0, g.H, t);
    out.top[i] = surfing_displacement(bc, g.x1(i), g.H, g.H, t);
  }
  return out;
}

ElasticProblem make_elastic_problem(const ScalarField& z, const SurfingBC& bc, double t,
                                    double eta, const SolverOptions& solver) {
  ElasticProblem p;
  p.grid = z.grid();
  p.z = z;
  p.boundary = surfing_boundary(p.grid, bc, t);
  p.eta = eta;
  p.solver = solver;
  return p;
}

LinearSystem assemble_elastic(const ElasticProblem& p) {
  const GridSpec& g = p.grid;
  LinearSystem sys{Stencil5(g), std::vector<double>(g.cell_count(), 0.0)};
  const ScalarField& z = p.z;
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const std::size_t k = g.index(i, j);
      if (i + 1 < g.n1) sys.A.east[k] = face_coefficient(z[k], z[k + 1], p.eta);
      if (j + 1 < g.n2) sys.A.north[k] = face_coefficient(z[k], z[k + g.n1], p.eta);
      // Dirichlet faces: ghost value 2g - u puts the face at distance h/2.
      if (j == 0) sys.b[k] += 2.0 * cell_stiffness(z[k], p.eta) * p.boundary.bottom[i];
      if (j == g.n2 - 1) sys.b[k] += 2.0 * cell_stiffness(z[k], p.eta) * p.boundary.top[i];
    }
  }
  std::vector<double> south(g.n1), north(g.n1);
  for (int i = 0; i < g.n1; ++i) {
    south[i] = 2.0 * cell_stiffness(z(i, 0), p.eta);
    north[i] = 2.0 * cell_stiffness(z(i, g.n2 - 1), p.eta);
  }
  sys.A.add_face_sums(south, north);
  return sys;
}

ElasticSolution solve_displacement(const ElasticProblem& p, const ScalarField& u_init) {
  validate(p.grid);
  const LinearSystem sys = assemble_elastic(p);
  ElasticSolution sol{u_init.size() == p.grid.cell_count() ? u_init : ScalarField(p.grid), 0, 0.0};
  const SolveResult r = solve_pcg(sys.A, sys.b, sol.u.values(), p.solver);
  sol.iterations = r.iterations;
  sol.residual = r.residual;
  if (!r.converged) throw NoConvergence("elastic solve", r.iterations, r.residual);
  return sol;
}

ScalarField strain_energy_density(const ScalarField& u, const ScalarField& z, double mu) {
  const ScalarField g2 = gradient_squared(u);
  ScalarField w(u.grid());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double s = (1.0 - z[k]) * (1.0 - z[k]);
    w[k] = 0.5 * mu * s * g2[k];
  }
  return w;
}

GradientField flux_gradient(const ScalarField& u, const ScalarField& z, double eta,
                            const BoundaryValues& boundary) {
  const GridSpec& g = u.grid();
  GradientField out{ScalarField(g), ScalarField(g)};
  const double h = g.dx;
  for (int j = 0; j < g.n2; ++j) {
    for (int i = 0; i < g.n1; ++i) {
      const std::size_t k = g.index(i, j);
      const double pk = cell_stiffness(z[k], eta);

      // x1: Neumann sides carry no flux, so the outer cells use their interior face.
      double sum1 = 0.0;
      int faces1 = 0;
      if (i > 0) {
        sum1 += face_coefficient(z[k - 1], z[k], eta) * (u[k] - u[k - 1]) / h;
        ++faces1;
      }
      if (i + 1 < g.n1) {
        sum1 += face_coefficient(z[k], z[k + 1], eta) * (u[k + 1] - u[k]) / h;
        ++faces1;
      }
      out.d1[k] = faces1 > 0 ? sum1 / (faces1 * pk) : 0.0;

      const double south = j > 0
                               ? face_coefficient(z[k - g.n1], z[k], eta) * (u[k] - u[k - g.n1]) / h
                               : pk * 2.0 * (u[k] - boundary.bottom[i]) / h;
      const double north = j + 1 < g.n2
                               ? face_coefficient(z[k], z[k + g.n1], eta) * (u[k + g.n1] - u[k]) / h
                               : pk * 2.0 * (boundary.top[i] - u[k]) / h;
      out.d2[k] = 0.5 * (south + north) / pk;
    }
  }
  return out;
}

}  // namespace crackfield
