#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "plpot/domain.hpp"

namespace plpot {

// One real value per grid point; zero outside the domain by convention.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(DomainPtr dom, double fill = 0.0)
      : dom_(std::move(dom)),
        v_(static_cast<std::size_t>(dom_->grid().npoints()), 0.0) {
    if (fill != 0.0)
      for (std::int64_t p : dom_->members()) v_[static_cast<std::size_t>(p)] = fill;
  }

  const Domain& domain() const { return *dom_; }
  DomainPtr domain_ptr() const { return dom_; }
  const Grid& grid() const { return dom_->grid(); }

  double operator[](std::int64_t p) const { return v_[static_cast<std::size_t>(p)]; }
  double& operator[](std::int64_t p) { return v_[static_cast<std::size_t>(p)]; }
  const std::vector<double>& raw() const { return v_; }
  std::vector<double>& raw() { return v_; }

  void fill_from(const std::function<double(const Point&)>& f) {
    for (std::int64_t p : dom_->members())
      v_[static_cast<std::size_t>(p)] = f(grid().point(p));
  }

 private:
  DomainPtr dom_;
  std::vector<double> v_;
};

// rows x cols real values per grid point (rows = target components, cols = 1
// for plain vector data or = dim for gradient-like data). Point major
// storage, component minor.
class VectorField {
 public:
  VectorField() = default;
  VectorField(DomainPtr dom, int rows, int cols)
      : dom_(std::move(dom)), rows_(rows), cols_(cols),
        v_(static_cast<std::size_t>(dom_->grid().npoints()) * rows * cols, 0.0) {
    require(rows >= 1 && cols >= 1, "VectorField: component counts must be positive");
  }

  const Domain& domain() const { return *dom_; }
  DomainPtr domain_ptr() const { return dom_; }
  const Grid& grid() const { return dom_->grid(); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int channels() const { return rows_ * cols_; }

  double at(std::int64_t p, int r, int c) const {
    return v_[static_cast<std::size_t>(p) * channels() + r * cols_ + c];
  }
  double& at(std::int64_t p, int r, int c) {
    return v_[static_cast<std::size_t>(p) * channels() + r * cols_ + c];
  }
  const double* ptr(std::int64_t p) const {
    return v_.data() + static_cast<std::size_t>(p) * channels();
  }
  double* ptr(std::int64_t p) {
    return v_.data() + static_cast<std::size_t>(p) * channels();
  }
  const std::vector<double>& raw() const { return v_; }
  std::vector<double>& raw() { return v_; }

  // Euclidean norm over all components at one point.
  double norm_at(std::int64_t p) const {
    const double* z = ptr(p);
    double s = 0.0;
    for (int c = 0; c < channels(); ++c) s += z[c] * z[c];
    return std::sqrt(s);
  }

  void fill_from(const std::function<void(const Point&, double*)>& f) {
    std::vector<double> buf(static_cast<std::size_t>(channels()));
    for (std::int64_t p : dom_->members()) {
      f(grid().point(p), buf.data());
      double* dst = ptr(p);
      for (int c = 0; c < channels(); ++c) dst[c] = buf[static_cast<std::size_t>(c)];
    }
  }

 private:
  DomainPtr dom_;
  int rows_ = 1, cols_ = 1;
  std::vector<double> v_;
};

// Pointwise Euclidean magnitude of a vector field, as a scalar field.
ScalarField magnitude(const VectorField& F);

// Pointwise square of magnitude (|V|^2 enters the potential definitions).
ScalarField magnitude_squared(const VectorField& F);

}  // namespace plpot
