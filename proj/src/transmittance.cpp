#include "usrecon/transmittance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace usrecon {

namespace {

// Piecewise-linear interpolation of the running integral at depth d.
double integral_at(const std::vector<double>& depths, const std::vector<double>& integral,
                   double d) {
    if (d <= depths.front()) return integral.front();
    if (d >= depths.back()) return integral.back();
    const auto it = std::upper_bound(depths.begin(), depths.end(), d);
    const size_t i = static_cast<size_t>(it - depths.begin());
    const double t = (d - depths[i - 1]) / (depths[i] - depths[i - 1]);
    return integral[i - 1] + t * (integral[i] - integral[i - 1]);
}

}  // namespace

TransmittanceProfile transmittance_along(const Ray& ray, const AcousticField& field, double step,
                                         double epsilon, double t0, Quadrature quadrature) {
    if (step <= 0.0) throw std::invalid_argument("transmittance_along: step must be > 0");
    if (epsilon < 0.0 || epsilon >= 2.0 * step)
        throw std::invalid_argument("transmittance_along: epsilon must be in [0, 2*step)");
    if (t0 <= 0.0 || t0 > 1.0) throw std::invalid_argument("transmittance_along: t0 must be in (0,1]");

    const int n_cells = std::max(1, static_cast<int>(std::ceil(ray.max_depth / step - 1e-12)));

    std::vector<double> depths(n_cells + 1);
    std::vector<double> integral(n_cells + 1);
    depths[0] = 0.0;
    integral[0] = 0.0;

    auto rate = [&](double d) {
        const AcousticProperties props = field(ray.point_at(d));
        return props.alpha + props.beta;
    };

    for (int i = 1; i <= n_cells; ++i) {
        const double d0 = depths[i - 1];
        const double d1 = std::min(ray.max_depth, d0 + step);
        const double width = d1 - d0;
        double increment = 0.0;
        if (quadrature == Quadrature::Midpoint) {
            increment = rate(0.5 * (d0 + d1)) * width;
        } else {
            increment = 0.5 * (rate(d0) + rate(d1)) * width;
        }
        depths[i] = d1;
        integral[i] = integral[i - 1] + increment;
    }

    TransmittanceProfile profile;
    profile.ray = ray;
    profile.t0 = t0;
    profile.depths = depths;
    profile.values.resize(depths.size());
    for (size_t i = 0; i < depths.size(); ++i) {
        const double d = std::max(0.0, depths[i] - epsilon);
        profile.values[i] = t0 * std::exp(-integral_at(depths, integral, d));
    }
    return profile;
}

double transmittance_at(double sample_depth, const TransmittanceProfile& profile) {
    if (sample_depth < 0.0 || sample_depth > profile.ray.max_depth)
        throw std::invalid_argument("transmittance_at: depth outside ray extent");
    const auto& depths = profile.depths;
    const auto& values = profile.values;
    if (sample_depth <= depths.front()) return values.front();
    if (sample_depth >= depths.back()) return values.back();
    const auto it = std::upper_bound(depths.begin(), depths.end(), sample_depth);
    const size_t i = static_cast<size_t>(it - depths.begin());
    const double t = (sample_depth - depths[i - 1]) / (depths[i] - depths[i - 1]);
    return values[i - 1] + t * (values[i] - values[i - 1]);
}

}  // namespace usrecon
