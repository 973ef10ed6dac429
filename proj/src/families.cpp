// This file is part of weaksym, a mixed finite element solver for planar
// elasticity with weakly symmetric stresses.
// Distributed under the Apache License, Version 2.0; see LICENSE for details.

#include "weaksym/families.hpp"

#include <algorithm>

namespace weaksym {

void FamilyConfig::validate() const {
  const bool ok = (family == Family::AFW && k == 2) || (family == Family::RAFW && k == 2) ||
                  (family == Family::SGG && (k == 2 || k == 3));
  if (!ok)
    throw ValidationError("FamilyConfig: unsupported discretization " + name() +
                          " (implemented: afw2, rafw2, sgg2, sgg3)");
}

std::string FamilyConfig::name() const {
  switch (family) {
    case Family::AFW:
      return "afw" + std::to_string(k);
    case Family::RAFW:
      return "rafw" + std::to_string(k);
    case Family::SGG:
      return "sgg" + std::to_string(k);
  }
  return "?";
}

FamilyConfig parse_family(const std::string& name, int k) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
  FamilyConfig cfg;
  cfg.k = k;
  if (lower == "afw")
    cfg.family = Family::AFW;
  else if (lower == "rafw")
    cfg.family = Family::RAFW;
  else if (lower == "sgg")
    cfg.family = Family::SGG;
  else
    throw ValidationError("unknown family '" + name + "' (expected afw, rafw or sgg)");
  cfg.validate();
  return cfg;
}

bool operator==(const FamilyConfig& a, const FamilyConfig& b) {
  return a.family == b.family && a.k == b.k;
}

}  // namespace weaksym
