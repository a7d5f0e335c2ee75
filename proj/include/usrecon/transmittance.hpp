#pragma once

#include <functional>
#include <vector>

#include "usrecon/geometry.hpp"
#include "usrecon/phantom.hpp"

namespace usrecon {

using AcousticField = std::function<AcousticProperties(const Eigen::Vector3d&)>;

enum class Quadrature { Midpoint, Trapezoid };

// Remaining beam energy along one scanline, tabulated at fixed depth nodes.
// values are monotone non-increasing and bounded by t0.
struct TransmittanceProfile {
    Ray ray;
    std::vector<double> depths;
    std::vector<double> values;
    double t0 = 1.0;
};

// T(d) = t0 * exp(-I(d - epsilon)) with I the running integral of
// (alpha + beta) from the transducer; epsilon excludes the sample's own
// neighborhood so a point's reflectivity does not occlude itself.
TransmittanceProfile transmittance_along(const Ray& ray, const AcousticField& field, double step,
                                         double epsilon, double t0 = 1.0,
                                         Quadrature quadrature = Quadrature::Midpoint);

// Linear interpolation between bracketing profile nodes; clamps at the ends.
double transmittance_at(double sample_depth, const TransmittanceProfile& profile);

struct TransmittanceParams {
    double step = 1.0 / 256.0;
    double epsilon = 1.0 / 256.0;
    double t0 = 1.0;
    Quadrature quadrature = Quadrature::Midpoint;
    double shadow_threshold = 0.05;
};

}  // namespace usrecon
