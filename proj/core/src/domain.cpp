#include "plpot/domain.hpp"

namespace plpot {

Domain::Domain(const Grid& grid) : grid_(grid) {
  cls_.assign(static_cast<std::size_t>(grid_.npoints()), PointClass::boundary);
  full_box_ = true;
  classify();
}

Domain::Domain(const Grid& grid, const Point& lo, const Point& hi) : grid_(grid) {
  cls_.assign(static_cast<std::size_t>(grid_.npoints()), PointClass::outside);
  const std::int64_t n = grid_.npoints();
  for (std::int64_t p = 0; p < n; ++p) {
    const Point x = grid_.point(p);
    bool in = true;
    for (int k = 0; k < grid_.dim(); ++k)
      in = in && x[k] >= lo[k] && x[k] <= hi[k];
    if (in) cls_[static_cast<std::size_t>(p)] = PointClass::boundary;
  }
  classify();
}

Domain::Domain(const Grid& grid, const Ball& ball) : grid_(grid) {
  cls_.assign(static_cast<std::size_t>(grid_.npoints()), PointClass::outside);
  const std::int64_t n = grid_.npoints();
  for (std::int64_t p = 0; p < n; ++p) {
    if (dist(grid_.point(p), ball.center, grid_.dim()) < ball.radius)
      cls_[static_cast<std::size_t>(p)] = PointClass::boundary;
  }
  classify();
}

void Domain::classify() {
  const std::int64_t n = grid_.npoints();
  members_.clear();
  interior_.clear();
  boundary_.clear();
  std::int64_t member_total = 0;
  for (std::int64_t p = 0; p < n; ++p)
    if (cls_[static_cast<std::size_t>(p)] != PointClass::outside) ++member_total;
  require(member_total > 0, "Domain: empty point set");
  members_.reserve(static_cast<std::size_t>(member_total));
  for (std::int64_t p = 0; p < n; ++p) {
    if (cls_[static_cast<std::size_t>(p)] == PointClass::outside) continue;
    members_.push_back(p);
    const Index ix = grid_.unflat(p);
    bool interior = true;
    for (int k = 0; k < grid_.dim() && interior; ++k) {
      for (int s = -1; s <= 1 && interior; s += 2) {
        Index nb = ix;
        nb[k] += s;
        if (!grid_.in_bounds(nb) ||
            cls_[static_cast<std::size_t>(grid_.flat(nb))] == PointClass::outside)
          interior = false;
      }
    }
    cls_[static_cast<std::size_t>(p)] = interior ? PointClass::interior : PointClass::boundary;
  }
  for (std::int64_t p : members_) {
    if (cls_[static_cast<std::size_t>(p)] == PointClass::interior)
      interior_.push_back(p);
    else
      boundary_.push_back(p);
  }
}

DomainPtr make_box_domain(const Grid& grid) { return std::make_shared<Domain>(grid); }

DomainPtr make_box_domain(const Grid& grid, const Point& lo, const Point& hi) {
  return std::make_shared<Domain>(grid, lo, hi);
}

DomainPtr make_ball_domain(const Grid& grid, const Ball& ball) {
  return std::make_shared<Domain>(grid, ball);
}

}  // namespace plpot
