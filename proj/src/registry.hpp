#pragma once

#include <map>
#include <string>
#include <vector>

#include "pshlab/pshlab.hpp"

namespace pshlab::registry {

/// Reference syntax: "name" or "name(key=value, key=value)".
PshSpecD make_spec(const std::string& ref);
ChiWeightD make_chi(const std::string& ref);
SequenceSchemeD make_scheme(const std::string& ref);

struct CatalogRow {
    std::string name;
    std::string kind;  // spec | chi | scheme
    std::string detail;
};

/// Stable, name-sorted listing of specs, schemes and chi families.
std::vector<CatalogRow> catalog_listing();

}  // namespace pshlab::registry
