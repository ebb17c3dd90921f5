#include "plpot/field.hpp"

namespace plpot {

ScalarField magnitude(const VectorField& F) {
  ScalarField out(F.domain_ptr());
  for (std::int64_t p : F.domain().members()) out[p] = F.norm_at(p);
  return out;
}

ScalarField magnitude_squared(const VectorField& F) {
  ScalarField out(F.domain_ptr());
  for (std::int64_t p : F.domain().members()) {
    const double m = F.norm_at(p);
    out[p] = m * m;
  }
  return out;
}

}  // namespace plpot
