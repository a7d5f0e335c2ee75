#pragma once

#include <string>

#include "usrecon/network.hpp"

namespace usrecon {

// Versioned binary checkpoint: JSON config block followed by row-major
// little-endian parameter arrays (layout documented in the README).
void save_model(const std::string& path, const OccupancyModel& model);
OccupancyModel load_model(const std::string& path);

}  // namespace usrecon
