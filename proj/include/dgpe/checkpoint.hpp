#pragma once

#include <string>

#include "dgpe/field.hpp"

namespace dgpe {

// Binary checkpoint (little-endian):
//   magic "DGPE" | version u32 | n u32 | half_width f64 | t f64 |
//   n^3 interleaved (re, im) f64 samples, row-major, first axis slowest.
// Payload is the physical-space state.
void write_checkpoint(const std::string& path, const Field& u, double t);

struct Checkpoint {
  Field u;
  double t = 0.0;
};

Checkpoint read_checkpoint(const std::string& path);

}  // namespace dgpe
