#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "plpot/grid.hpp"

namespace plpot {

struct Ball {
  Point center{0.0, 0.0, 0.0};
  double radius = 0.0;
};

enum class PointClass : std::uint8_t { outside = 0, boundary = 1, interior = 2 };

// Grid points marked as members of the computational domain. Members whose
// 2*dim axis neighbours are all members are interior; the rest of the
// members form the (Dirichlet) boundary layer. Immutable once built.
class Domain {
 public:
  // Whole covered box.
  explicit Domain(const Grid& grid);
  // Axis-aligned sub-box [lo, hi] or ball, by cell-center membership.
  Domain(const Grid& grid, const Point& lo, const Point& hi);
  Domain(const Grid& grid, const Ball& ball);

  const Grid& grid() const { return grid_; }

  bool inside(std::int64_t p) const { return cls_[static_cast<std::size_t>(p)] != PointClass::outside; }
  bool inside(const Index& ix) const { return grid_.in_bounds(ix) && inside(grid_.flat(ix)); }
  PointClass cls(std::int64_t p) const { return cls_[static_cast<std::size_t>(p)]; }
  bool interior(std::int64_t p) const { return cls_[static_cast<std::size_t>(p)] == PointClass::interior; }

  const std::vector<std::int64_t>& members() const { return members_; }
  const std::vector<std::int64_t>& interior_points() const { return interior_; }
  const std::vector<std::int64_t>& boundary_points() const { return boundary_; }

  std::int64_t member_count() const { return static_cast<std::int64_t>(members_.size()); }
  double volume() const { return static_cast<double>(members_.size()) * grid_.cell_volume(); }

  bool is_full_box() const { return full_box_; }

 private:
  void classify();

  Grid grid_;
  std::vector<PointClass> cls_;
  std::vector<std::int64_t> members_, interior_, boundary_;
  bool full_box_ = false;
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr make_box_domain(const Grid& grid);
DomainPtr make_box_domain(const Grid& grid, const Point& lo, const Point& hi);
DomainPtr make_ball_domain(const Grid& grid, const Ball& ball);

}  // namespace plpot
