#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "usrecon/phantom.hpp"

namespace usrecon {

// One supervision point: position, acoustic triple, occupancy label and the
// view-dependent transmittance at that depth, plus provenance.
struct AcousticSample {
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    AcousticProperties theta;
    int label = 0;
    double transmittance = 1.0;
    int sweep = 0;        // trajectory index within the run
    int frame_id = 0;     // globally unique across trajectories
    int scanline_id = 0;  // within the frame
    double depth = 0.0;
};

// Binary container, little-endian, fixed layout (see README for the format).
void save_dataset(const std::string& path, const std::vector<AcousticSample>& samples);
std::vector<AcousticSample> load_dataset(const std::string& path);

}  // namespace usrecon
