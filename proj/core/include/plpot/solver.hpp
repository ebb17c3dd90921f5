#pragma once

#include <string>
#include <utility>
#include <vector>

#include "plpot/field.hpp"
#include "plpot/model.hpp"

namespace plpot {

// Scalar factor b(x,u,Du) multiplying the datum V on the right-hand side.
// Catalog: b = (Gamma + |Du|)^q, b = |Du|^q, b = 1, b = 0; all obey the
// growth window |b| <= (Gamma + |Du|)^q with 0 <= q <= p-1.
enum class BKind { power, plain_power, one, zero };

struct BSpec {
  BKind kind = BKind::one;
  double q = 0.0;
  double Gamma = 0.0;
};

double b_formula(const BSpec& b, double grad_norm);

struct DirichletProblem {
  Model model;            // regularized for direct solves; base for the outer loop
  DomainPtr domain;
  VectorField boundary;   // N x 1; fixes boundary members and seeds the iteration
  VectorField V;          // N x 1 datum
  BSpec b;
};

struct SolverOptions {
  double tol = 1e-8;            // residual <= tol * (1 + ||f||)
  int max_newton = 200;
  double cg_tol = 1e-10;        // relative, inside the Newton linear solve
  int max_cg = 0;               // 0: number of unknowns, capped at 20000
  double picard_tol = 1e-6;     // on ||Du_{k+1} - Du_k||_p
  int max_picard = 50;          // across all continuation stages
  double eps_start = 1e-1;      // regularization/truncation knob, halved per stage
  double eps_final = 1e-3;
  double divergence_cap = 1e6;  // ||Du||_p ceiling for the divergence detector
  double critical_c0 = 0.1;     // thresholds for the q = p-1 smallness labels
  double critical_eps0 = 0.1;
  double smallness_radius = 0.0;  // 0: quarter of the shortest box extent
};

struct SolveReport {
  bool converged = false;
  int newton_iterations = 0;
  int cg_iterations = 0;
  double final_residual = 0.0;
  double rhs_norm = 0.0;
  std::string preconditioner;       // "sine-transform", "diagonal", or "" if
                                    // no linear solve was needed
  std::vector<double> energy_trace;  // accepted iterates; nonincreasing within
                                     // each inner solve (stages may restart)
  double eps = 0.0;
  double truncation_level = 0.0;     // 1/eps
  // Outer-loop bookkeeping (empty/zero for plain Dirichlet solves).
  bool diverged = false;
  int picard_iterations = 0;
  std::vector<double> picard_increments;
  double contraction_factor = 0.0;   // median successive-increment ratio
  std::string critical_label;        // "", "critical-small", "critical-unverified"
  double v_ln_norm = 0.0;
  double sup_potential = 0.0;
};

// Componentwise clamp of the datum to [-1/eps, 1/eps].
VectorField truncate_V(const VectorField& V, double eps);

// b / (1 + eps|b|); identity at eps = 0.
double truncate_b(double b, double eps);

// Minimizes the discrete energy sum(A(corner gradients)) - sum(f u) over
// interior values with the boundary fixed, by damped Newton with exact
// line-search backtracking. `init` (if given) seeds the iteration instead of
// the boundary field.
std::pair<VectorField, SolveReport> solve_dirichlet(
    const DirichletProblem& prob, const VectorField& f,
    const SolverOptions& opt = {}, const VectorField* init = nullptr);

// Outer Picard loop on f = truncate_b(b(x,u,Du)) * truncate_V(V), with the
// regularization knob halved per continuation stage. Labels critical runs
// (q = p-1) against the configured smallness thresholds.
std::pair<VectorField, SolveReport> fixed_point_solve(
    const DirichletProblem& prob, const SolverOptions& opt = {});

struct CoercivityReport {
  std::vector<double> eps;
  std::vector<double> grad_p_norm;   // ||Du_eps||_p
  std::vector<double> rhs_mass;      // sum |Du|^q |V_eps| h^n
  std::vector<double> follows_bound; // sum (1 + Gamma + |Du|)^p h^n + sum |V|^n h^n
  bool blowup = false;               // strictly increasing family with last > 2x first
};

// Solves the same problem across a decreasing regularization family and
// reports the uniform-bound quantities.
CoercivityReport coercivity_check(const DirichletProblem& prob,
                                  const std::vector<double>& eps_family,
                                  const SolverOptions& opt = {});

}  // namespace plpot
