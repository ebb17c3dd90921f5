#pragma once

#include <string>

#include "plpot/field.hpp"

namespace plpot {

// Portable field file, layout (all little endian):
//   bytes 0..7   magic "PLFIELD1"
//   int64        dim (2 or 3)
//   int64        channel count
//   int64[dim]   shape
//   float64      spacing
//   float64[dim] origin
//   float64[...] values, row major over points (last axis fastest),
//                channel minor; points outside the domain carry zeros.
// The domain mask itself does not travel in the file; readers obtain the
// whole covered box.
void write_field(const std::string& path, const VectorField& F);
void write_field(const std::string& path, const ScalarField& f);

// Returns a channels x 1 field on the full box of the stored grid.
VectorField read_field(const std::string& path);

// CSV slice: fixes one axis at the given index (ignored for dim = 2) and
// writes coordinates plus every channel with full round-trip precision.
void write_csv_slice(const std::string& path, const VectorField& F, int axis,
                     int index);
void write_csv_slice(const std::string& path, const ScalarField& f, int axis,
                     int index);

}  // namespace plpot
