// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#pragma once

#include <string>

#include "weaksym/tensor.hpp"

namespace weaksym {

/// The three discretization families. All share discontinuous [P_{k-1}]^2
/// displacements; they differ in the stress space and the rotation degree:
///  - SGG:  stresses [P_k]^{2x2} plus divergence-free curl bubbles, rotation P_k
///  - AFW:  stresses [P_k]^{2x2}, rotation P_{k-1}
///  - RAFW: AFW with edge normal traces reduced to [P_{k-1}(E)]^2
enum class Family { AFW, RAFW, SGG };

struct FamilyConfig {
  Family family = Family::SGG;
  int k = 2;

  int displacement_degree() const { return k - 1; }
  int rotation_degree() const { return family == Family::SGG ? k : k - 1; }
  /// Degree of edge normal-trace moments = degree l of the Neumann projection Q_E.
  int edge_moment_degree() const { return family == Family::RAFW ? k - 1 : k; }
  /// Degree l* of the postprocessed displacement.
  int postprocess_degree() const { return family == Family::SGG ? k + 1 : k; }
  bool has_bubbles() const { return family == Family::SGG; }
  /// Default quadrature order: exact for products with the degree-(k+2) bubbles.
  int quadrature_order() const { return 2 * k + 6; }

  /// Throws ValidationError unless the combination is one of the implemented
  /// discretizations (AFW2, RAFW2, SGG2, SGG3).
  void validate() const;
  std::string name() const;
};

FamilyConfig parse_family(const std::string& name, int k);

bool operator==(const FamilyConfig& a, const FamilyConfig& b);

}  // namespace weaksym
