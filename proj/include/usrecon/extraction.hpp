#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <vector>

#include "usrecon/network.hpp"

namespace usrecon {

// Regular scalar grid over (a region of) the unit cube; x varies fastest.
struct OccupancyGrid {
    std::array<int, 3> resolution = {2, 2, 2};
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    Eigen::Vector3d spacing = Eigen::Vector3d::Ones();
    std::vector<double> values;

    size_t index(int ix, int iy, int iz) const {
        return static_cast<size_t>(ix) +
               static_cast<size_t>(resolution[0]) *
                   (static_cast<size_t>(iy) + static_cast<size_t>(resolution[1]) * iz);
    }
    double at(int ix, int iy, int iz) const { return values[index(ix, iy, iz)]; }
    Eigen::Vector3d node_position(int ix, int iy, int iz) const {
        return origin + Eigen::Vector3d(ix * spacing.x(), iy * spacing.y(), iz * spacing.z());
    }
    size_t node_count() const {
        return static_cast<size_t>(resolution[0]) * resolution[1] * resolution[2];
    }
};

struct TriangleMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> triangles;

    bool empty() const { return triangles.empty(); }
};

// Raw model input at a spatial position (acoustic triple or the coordinates
// themselves, before scaling/encoding).
using InputField = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;

// Evaluates the model at every grid node over [0,1]^3 and shifts by -0.5 so
// the surface is the zero level set.
OccupancyGrid sample_grid(const OccupancyModel& model, const InputField& input_field,
                          const std::array<int, 3>& resolution);

// Grid of an arbitrary scalar field (analytic phantoms, tests).
OccupancyGrid sample_scalar_grid(const std::function<double(const Eigen::Vector3d&)>& field,
                                 const std::array<int, 3>& resolution);

// Separable Gaussian blur, kernel truncated at radius cells and renormalized
// at the boundary. sigma is in cell units; sigma = 0 is the identity.
OccupancyGrid smooth(const OccupancyGrid& grid, double sigma, int radius = 3);

// Standard 256-case marching cubes with linear edge interpolation and welded
// vertices. Positive values are inside; triangles wind with outward normals.
// A grid with no sign change yields an empty mesh.
TriangleMesh marching_cubes(const OccupancyGrid& grid, double iso = 0.0);

double triangle_area(const TriangleMesh& mesh, int triangle);

namespace mc_tables {
extern const int kEdgeTable[256];
extern const int kTriTable[256][16];
}  // namespace mc_tables

}  // namespace usrecon
