#pragma once

#include <string>

namespace coastopt::testing {

inline std::string fixture(const std::string& name) { return std::string(COASTOPT_FIXTURES) + "/" + name; }

}  // namespace coastopt::testing
