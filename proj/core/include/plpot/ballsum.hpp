#pragma once

#include <memory>
#include <vector>

#include "plpot/field.hpp"

namespace plpot {

// Ball sums M(x, rho) = sum_{|y-x| < rho} density(y) h^n at every grid
// point x simultaneously, by circular convolution with a ball indicator on a
// zero-padded extension of the grid. Distances are measured between cell
// centers (h times the integer offset norm), membership is strict. One
// forward transform of the density is shared across radii.
class BallSums {
 public:
  // rho_max fixes the padding; masses() accepts any rho <= rho_max.
  BallSums(const ScalarField& density, double rho_max);
  ~BallSums();
  BallSums(const BallSums&) = delete;
  BallSums& operator=(const BallSums&) = delete;

  // Fills out (indexed by flat grid point, zero at non-members) with the
  // ball masses at radius rho. Tiny negative round-off is clamped to zero.
  void masses(double rho, std::vector<double>& out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace plpot
