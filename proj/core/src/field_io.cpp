#include "plpot/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

namespace plpot {

static_assert(std::endian::native == std::endian::little,
              "field files are little endian; big endian hosts unsupported");

namespace {

constexpr char kMagic[8] = {'P', 'L', 'F', 'I', 'E', 'L', 'D', '1'};

void put_i64(std::ofstream& os, std::int64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ofstream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::int64_t get_i64(std::ifstream& is) {
  std::int64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double get_f64(std::ifstream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

void write_impl(const std::string& path, const Grid& g, int channels,
                const std::vector<double>& data) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(os.good(), "write_field: cannot open " + path);
  os.write(kMagic, sizeof kMagic);
  put_i64(os, g.dim());
  put_i64(os, channels);
  for (int k = 0; k < g.dim(); ++k) put_i64(os, g.shape()[k]);
  put_f64(os, g.spacing());
  for (int k = 0; k < g.dim(); ++k) put_f64(os, g.origin()[k]);
  os.write(reinterpret_cast<const char*>(data.data()),
           static_cast<std::streamsize>(data.size() * sizeof(double)));
  require(os.good(), "write_field: short write to " + path);
}

}  // namespace

void write_field(const std::string& path, const VectorField& F) {
  write_impl(path, F.grid(), F.channels(), F.raw());
}

void write_field(const std::string& path, const ScalarField& f) {
  write_impl(path, f.grid(), 1, f.raw());
}

VectorField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "read_field: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  require(is.good() && std::memcmp(magic, kMagic, sizeof magic) == 0,
          "read_field: bad magic in " + path);
  const auto dim = static_cast<int>(get_i64(is));
  require(dim == 2 || dim == 3, "read_field: unsupported dim");
  const auto channels = static_cast<int>(get_i64(is));
  require(channels >= 1, "read_field: bad channel count");
  Index shape{1, 1, 1};
  for (int k = 0; k < dim; ++k) shape[k] = static_cast<int>(get_i64(is));
  const double spacing = get_f64(is);
  Point origin{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) origin[k] = get_f64(is);
  require(is.good(), "read_field: truncated header in " + path);
  const Grid grid(dim, shape, spacing, origin);
  VectorField F(make_box_domain(grid), channels, 1);
  is.read(reinterpret_cast<char*>(F.raw().data()),
          static_cast<std::streamsize>(F.raw().size() * sizeof(double)));
  require(is.good(), "read_field: truncated data in " + path);
  return F;
}

namespace {

void csv_impl(const std::string& path, const Grid& g, int channels,
              const std::function<double(std::int64_t, int)>& value, int axis,
              int index) {
  require(g.dim() == 2 || (axis >= 0 && axis < 3 && index >= 0 && index < g.shape()[axis]),
          "write_csv_slice: slice out of range");
  std::ofstream os(path, std::ios::trunc);
  require(os.good(), "write_csv_slice: cannot open " + path);
  int a0 = 0, a1 = 1;
  if (g.dim() == 3) {
    a0 = axis == 0 ? 1 : 0;
    a1 = axis == 2 ? 1 : 2;
  }
  char buf[64];
  os << "x" << a0 << ",x" << a1;
  for (int c = 0; c < channels; ++c) os << ",v" << c;
  os << "\n";
  Index ix{0, 0, 0};
  if (g.dim() == 3) ix[axis] = index;
  for (int i = 0; i < g.shape()[a0]; ++i) {
    ix[a0] = i;
    for (int j = 0; j < g.shape()[a1]; ++j) {
      ix[a1] = j;
      const std::int64_t p = g.flat(ix);
      const Point x = g.point(ix);
      std::snprintf(buf, sizeof buf, "%.17g", x[a0]);
      os << buf;
      std::snprintf(buf, sizeof buf, ",%.17g", x[a1]);
      os << buf;
      for (int c = 0; c < channels; ++c) {
        std::snprintf(buf, sizeof buf, ",%.17g", value(p, c));
        os << buf;
      }
      os << "\n";
    }
  }
  require(os.good(), "write_csv_slice: short write to " + path);
}

}  // namespace

void write_csv_slice(const std::string& path, const VectorField& F, int axis,
                     int index) {
  csv_impl(path, F.grid(), F.channels(),
           [&F](std::int64_t p, int c) { return F.raw()[static_cast<std::size_t>(p) * F.channels() + c]; },
           axis, index);
}

void write_csv_slice(const std::string& path, const ScalarField& f, int axis,
                     int index) {
  csv_impl(path, f.grid(), 1, [&f](std::int64_t p, int) { return f[p]; }, axis,
           index);
}

}  // namespace plpot
