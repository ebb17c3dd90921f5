#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "plpot/error.hpp"

namespace plpot {

using Point = std::array<double, 3>;  // trailing entries unused below dim
using Index = std::array<int, 3>;

inline double dot(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += a[k] * b[k];
  return s;
}

inline double dist(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

// Uniform isotropic Cartesian grid in dimension 2 or 3. Linear storage is
// row major with the last axis fastest; unused axes have extent 1.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, Index shape, double spacing, Point origin)
      : dim_(dim), shape_(shape), h_(spacing), origin_(origin) {
    require(dim == 2 || dim == 3, "Grid: dim must be 2 or 3");
    require(spacing > 0.0, "Grid: spacing must be positive");
    for (int k = 0; k < dim; ++k)
      require(shape[k] >= 3, "Grid: each axis needs at least 3 points");
    for (int k = dim; k < 3; ++k) shape_[k] = 1;
  }

  int dim() const { return dim_; }
  double spacing() const { return h_; }
  const Point& origin() const { return origin_; }
  const Index& shape() const { return shape_; }

  std::int64_t npoints() const {
    return static_cast<std::int64_t>(shape_[0]) * shape_[1] * shape_[2];
  }

  std::int64_t flat(int i, int j, int k = 0) const {
    return (static_cast<std::int64_t>(i) * shape_[1] + j) * shape_[2] + k;
  }
  std::int64_t flat(const Index& ix) const { return flat(ix[0], ix[1], ix[2]); }

  Index unflat(std::int64_t p) const {
    Index ix;
    ix[2] = static_cast<int>(p % shape_[2]);
    p /= shape_[2];
    ix[1] = static_cast<int>(p % shape_[1]);
    ix[0] = static_cast<int>(p / shape_[1]);
    return ix;
  }

  bool in_bounds(const Index& ix) const {
    for (int k = 0; k < 3; ++k)
      if (ix[k] < 0 || ix[k] >= shape_[k]) return false;
    return true;
  }

  Point point(const Index& ix) const {
    return {origin_[0] + h_ * ix[0], origin_[1] + h_ * ix[1],
            dim_ == 3 ? origin_[2] + h_ * ix[2] : 0.0};
  }
  Point point(std::int64_t p) const { return point(unflat(p)); }

  double cell_volume() const { return dim_ == 3 ? h_ * h_ * h_ : h_ * h_; }

  // Extent of the covered box along axis k.
  double length(int k) const { return h_ * (shape_[k] - 1); }

  // Nearest grid index to a physical point, clamped to bounds.
  Index nearest(const Point& x) const {
    Index ix{0, 0, 0};
    for (int k = 0; k < dim_; ++k) {
      int i = static_cast<int>(std::lround((x[k] - origin_[k]) / h_));
      if (i < 0) i = 0;
      if (i >= shape_[k]) i = shape_[k] - 1;
      ix[k] = i;
    }
    return ix;
  }

  bool same_as(const Grid& o) const {
    return dim_ == o.dim_ && shape_ == o.shape_ && h_ == o.h_ && origin_ == o.origin_;
  }

 private:
  int dim_ = 2;
  Index shape_{3, 3, 1};
  double h_ = 1.0;
  Point origin_{0.0, 0.0, 0.0};
};

// Unit ball volume: pi in 2d, 4*pi/3 in 3d.
inline double unit_ball_volume(int dim) {
  return dim == 2 ? 3.14159265358979323846 : 4.18879020478639098462;
}

}  // namespace plpot
