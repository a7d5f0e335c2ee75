#include "usrecon/phantom.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "usrecon/rng.hpp"

namespace usrecon {

namespace {

double sphere_sdf(const Sphere& s, const Eigen::Vector3d& p) {
    return (p - s.center).norm() - s.radius;
}

double box_sdf(const BoxShape& b, const Eigen::Vector3d& p) {
    const Eigen::Vector3d c = 0.5 * (b.min + b.max);
    const Eigen::Vector3d h = 0.5 * (b.max - b.min);
    const Eigen::Vector3d q = (p - c).cwiseAbs() - h;
    const Eigen::Vector3d outside = q.cwiseMax(0.0);
    return outside.norm() + std::min(q.maxCoeff(), 0.0);
}

double capsule_sdf(const Capsule& c, const Eigen::Vector3d& p) {
    const Eigen::Vector3d ab = c.b - c.a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? (p - c.a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (c.a + t * ab)).norm() - c.radius;
}

}  // namespace

double signed_distance(const Shape& shape, const Eigen::Vector3d& p) {
    return std::visit(
        [&](const auto& geom) -> double {
            using T = std::decay_t<decltype(geom)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                return sphere_sdf(geom, p);
            } else if constexpr (std::is_same_v<T, BoxShape>) {
                return box_sdf(geom, p);
            } else if constexpr (std::is_same_v<T, Capsule>) {
                return capsule_sdf(geom, p);
            } else {
                double d = std::numeric_limits<double>::infinity();
                for (const auto& part : geom.parts) d = std::min(d, signed_distance(part, p));
                return d;
            }
        },
        shape.geom);
}

void PhantomSpec::validate() const {
    int occupied_count = 0;
    for (const auto& tissue : tissues) occupied_count += tissue.occupied ? 1 : 0;
    if (occupied_count != 1)
        throw std::invalid_argument("PhantomSpec: exactly one tissue must be occupied");
    for (const auto& solid : solids) {
        if (solid.tissue_index < 0 || solid.tissue_index >= static_cast<int>(tissues.size()))
            throw std::invalid_argument("PhantomSpec: solid references unknown tissue");
    }
    if ((noise_sigma.array() < 0.0).any())
        throw std::invalid_argument("PhantomSpec: noise_sigma must be nonnegative");
}

int tissue_at(const PhantomSpec& spec, const Eigen::Vector3d& p) {
    for (const auto& solid : spec.solids) {
        if (signed_distance(solid.shape, p) <= 0.0) return solid.tissue_index;
    }
    return -1;
}

int occupancy_at(const PhantomSpec& spec, const Eigen::Vector3d& p) {
    for (const auto& solid : spec.solids) {
        if (!spec.tissues[solid.tissue_index].occupied) continue;
        if (signed_distance(solid.shape, p) <= 0.0) return 1;
    }
    return 0;
}

double occupied_signed_distance(const PhantomSpec& spec, const Eigen::Vector3d& p) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& solid : spec.solids) {
        if (!spec.tissues[solid.tissue_index].occupied) continue;
        d = std::min(d, signed_distance(solid.shape, p));
    }
    return d;
}

AcousticProperties features_at(const PhantomSpec& spec, const Eigen::Vector3d& p, uint64_t seed) {
    const int tissue = tissue_at(spec, p);
    AcousticProperties props = tissue < 0 ? spec.background : spec.tissues[tissue].mean;

    if ((spec.noise_sigma.array() > 0.0).any()) {
        // Jitter keyed on (seed, position) so the field is a deterministic
        // function; repeated queries at one point agree.
        uint64_t h = seed;
        h = mix_seed(h, std::bit_cast<uint64_t>(p.x()));
        h = mix_seed(h, std::bit_cast<uint64_t>(p.y()));
        h = mix_seed(h, std::bit_cast<uint64_t>(p.z()));
        Rng rng(h);
        props.alpha += spec.noise_sigma[0] * rng.normal();
        props.beta += spec.noise_sigma[1] * rng.normal();
        props.phi += spec.noise_sigma[2] * rng.normal();
    }

    props.alpha = std::clamp(props.alpha, 0.0, spec.alpha_max);
    props.beta = std::clamp(props.beta, 0.0, 1.0);
    props.phi = std::clamp(props.phi, 0.0, 1.0);
    return props;
}

}  // namespace usrecon
