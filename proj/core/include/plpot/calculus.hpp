#pragma once

#include <optional>

#include "plpot/field.hpp"

namespace plpot {

// Discrete gradient on domain members: centered second-order differences
// where both axis neighbours are members, one-sided three-point stencils at
// the domain boundary. Throws if some member has fewer than two consecutive
// members on an axis (domain thinner than the stencil).
VectorField gradient(const ScalarField& u);          // 1 x dim
VectorField gradient(const VectorField& u);          // u rows x 1 -> rows x dim

// Discrete divergence, same stencils per axis; negative adjoint of gradient
// against test fields supported away from the domain boundary.
ScalarField divergence(const VectorField& F);        // F 1 x dim
VectorField divergence_rows(const VectorField& F);   // F rows x dim -> rows x 1

// Integral and average of a scalar field over a ball (cell-center
// membership, strict inequality), counting only domain members.
// ball_average throws when no member cell lies in the ball.
double ball_integral(const ScalarField& f, const Ball& ball);
double ball_average(const ScalarField& f, const Ball& ball);
std::int64_t ball_member_count(const ScalarField& f, const Ball& ball);

// L^t norm over domain members (pointwise Euclidean magnitude for vector
// fields), optionally restricted to a ball region. t = infinity is the sup
// norm; t must be positive.
double lp_norm(const ScalarField& f, double t,
               const std::optional<Ball>& region = std::nullopt);
double lp_norm(const VectorField& F, double t,
               const std::optional<Ball>& region = std::nullopt);
double sup_norm(const ScalarField& f, const std::optional<Ball>& region = std::nullopt);
double sup_norm(const VectorField& F, const std::optional<Ball>& region = std::nullopt);

// Discrete L^2 pairing sum f*g*h^n over members (adjointness checks).
double l2_inner(const ScalarField& f, const ScalarField& g);
double l2_inner(const VectorField& F, const VectorField& G);

}  // namespace plpot
