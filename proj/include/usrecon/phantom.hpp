#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace usrecon {

// Per-point acoustic property triple: attenuation (per unit length),
// reflection and scattering coefficients.
struct AcousticProperties {
    double alpha = 0.0;
    double beta = 0.0;
    double phi = 0.0;
};

struct Sphere {
    Eigen::Vector3d center = Eigen::Vector3d::Constant(0.5);
    double radius = 0.25;
};

struct BoxShape {
    Eigen::Vector3d min = Eigen::Vector3d::Zero();
    Eigen::Vector3d max = Eigen::Vector3d::Ones();
};

struct Capsule {
    Eigen::Vector3d a = Eigen::Vector3d(0.3, 0.5, 0.5);
    Eigen::Vector3d b = Eigen::Vector3d(0.7, 0.5, 0.5);
    double radius = 0.1;
};

struct Shape;

struct UnionShape {
    std::vector<Shape> parts;
};

struct Shape {
    std::variant<Sphere, BoxShape, Capsule, UnionShape> geom;
};

// Negative inside, positive outside.
double signed_distance(const Shape& shape, const Eigen::Vector3d& p);

struct TissueDef {
    std::string id;
    AcousticProperties mean;
    bool occupied = false;  // the reconstruction target carries occupied=true
};

struct SolidDef {
    Shape shape;
    int tissue_index = 0;
};

// Analytic phantom: solids with homogeneous per-tissue acoustic properties
// plus optional per-channel feature jitter. Stands in for a learned acoustic
// field at simulation time.
struct PhantomSpec {
    std::vector<TissueDef> tissues;
    std::vector<SolidDef> solids;
    AcousticProperties background;
    Eigen::Vector3d noise_sigma = Eigen::Vector3d::Zero();  // std per (alpha, beta, phi)
    double alpha_max = 100.0;                               // clamp range for jittered alpha

    // throws std::invalid_argument unless exactly one tissue is occupied and
    // indices are in range
    void validate() const;
};

// Index of the tissue containing p (first containing solid wins), -1 for
// background. Points outside the unit cube read as background.
int tissue_at(const PhantomSpec& spec, const Eigen::Vector3d& p);

int occupancy_at(const PhantomSpec& spec, const Eigen::Vector3d& p);

// Signed distance to the union of occupied-tissue solids.
double occupied_signed_distance(const PhantomSpec& spec, const Eigen::Vector3d& p);

// Containing tissue's mean properties plus zero-mean jitter with std
// noise_sigma, clamped to valid ranges. Deterministic in (seed, p).
AcousticProperties features_at(const PhantomSpec& spec, const Eigen::Vector3d& p, uint64_t seed);

}  // namespace usrecon
