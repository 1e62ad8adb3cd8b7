#pragma once

#include <string>
#include <vector>

#include "lhv/quantum.hpp"

namespace lhv {

// Serializable description of a target state. `kind` selects which fields
// matter: product (blochs), werner (v), ghz (spins, v), w (v),
// xxz_two_spin (cx, cz), xxz_chain_subsystem (delta, length, periodic,
// sub_start, sub_size). The canonical JSON form keys sweep resumption, so it
// contains exactly the fields of the active kind in sorted order.
struct StateSpec {
  std::string kind = "werner";

  std::vector<Vec3> blochs;  // product

  double v = 1.0;  // werner / ghz / w visibility
  int spins = 3;   // ghz

  double cx = 0.0, cz = 0.0;  // xxz_two_spin

  double delta = 1.0;  // xxz_chain_subsystem
  int length = 12;
  bool periodic = true;
  int sub_start = 0;
  int sub_size = 2;

  int n_spins() const;
  DensityMatrix build() const;
  std::string describe() const;  // short label for logs and records

  std::string to_json() const;
  static StateSpec from_json(const std::string& text);
};

}  // namespace lhv
