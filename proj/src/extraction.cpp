#include "usrecon/extraction.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Geometry>

namespace usrecon {

namespace {

constexpr int kBatchNodes = 4096;

// Corner offsets in Lorensen-Cline order.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
// Edge k connects corners kEdgeCorners[k][0..1].
constexpr int kEdgeCorners[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                     {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

// A grid edge is keyed by its low node index and axis, unique across cells,
// so shared vertices weld exactly.
uint64_t grid_edge_key(const OccupancyGrid& grid, int x, int y, int z, int corner_a,
                       int corner_b) {
    int ax = x + kCorner[corner_a][0], ay = y + kCorner[corner_a][1], az = z + kCorner[corner_a][2];
    int bx = x + kCorner[corner_b][0], by = y + kCorner[corner_b][1], bz = z + kCorner[corner_b][2];
    int axis = 0;
    if (ay != by) axis = 1;
    if (az != bz) axis = 2;
    if (bx < ax || by < ay || bz < az) {
        std::swap(ax, bx);
        std::swap(ay, by);
        std::swap(az, bz);
    }
    const uint64_t node = static_cast<uint64_t>(grid.index(ax, ay, az));
    return node * 3ULL + static_cast<uint64_t>(axis);
}

}  // namespace

OccupancyGrid sample_scalar_grid(const std::function<double(const Eigen::Vector3d&)>& field,
                                 const std::array<int, 3>& resolution) {
    if (resolution[0] < 2 || resolution[1] < 2 || resolution[2] < 2)
        throw std::invalid_argument("sample_scalar_grid: resolution must be >= 2 per axis");
    OccupancyGrid grid;
    grid.resolution = resolution;
    grid.origin = Eigen::Vector3d::Zero();
    grid.spacing = Eigen::Vector3d(1.0 / (resolution[0] - 1), 1.0 / (resolution[1] - 1),
                                   1.0 / (resolution[2] - 1));
    grid.values.resize(grid.node_count());
    for (int z = 0; z < resolution[2]; ++z)
        for (int y = 0; y < resolution[1]; ++y)
            for (int x = 0; x < resolution[0]; ++x)
                grid.values[grid.index(x, y, z)] = field(grid.node_position(x, y, z));
    return grid;
}

OccupancyGrid sample_grid(const OccupancyModel& model, const InputField& input_field,
                          const std::array<int, 3>& resolution) {
    if (resolution[0] < 2 || resolution[1] < 2 || resolution[2] < 2)
        throw std::invalid_argument("sample_grid: resolution must be >= 2 per axis");
    OccupancyGrid grid;
    grid.resolution = resolution;
    grid.origin = Eigen::Vector3d::Zero();
    grid.spacing = Eigen::Vector3d(1.0 / (resolution[0] - 1), 1.0 / (resolution[1] - 1),
                                   1.0 / (resolution[2] - 1));
    grid.values.resize(grid.node_count());

    const size_t total = grid.node_count();
    Eigen::MatrixXd raw(model.raw_input_dim, kBatchNodes);
    std::vector<size_t> flat(kBatchNodes);

    size_t cursor = 0;
    while (cursor < total) {
        const int count = static_cast<int>(std::min<size_t>(kBatchNodes, total - cursor));
        for (int i = 0; i < count; ++i) {
            const size_t f = cursor + i;
            const int x = static_cast<int>(f % resolution[0]);
            const int y = static_cast<int>((f / resolution[0]) % resolution[1]);
            const int z = static_cast<int>(f / (static_cast<size_t>(resolution[0]) * resolution[1]));
            const Eigen::Vector3d pos = grid.node_position(x, y, z);
            raw.col(i) = input_field(pos).cwiseProduct(model.input_scale);
            flat[i] = f;
        }
        const Eigen::MatrixXd encoded = encode_batch(raw.leftCols(count), model.encoding);
        const Eigen::RowVectorXd prob = forward_batch(model, encoded);
        for (int i = 0; i < count; ++i) grid.values[flat[i]] = prob(i) - 0.5;
        cursor += count;
    }
    return grid;
}

OccupancyGrid smooth(const OccupancyGrid& grid, double sigma, int radius) {
    if (sigma < 0.0) throw std::invalid_argument("smooth: sigma must be >= 0");
    if (sigma == 0.0) return grid;
    if (radius < 1) throw std::invalid_argument("smooth: radius must be >= 1");

    std::vector<double> kernel(2 * radius + 1);
    double norm = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        norm += kernel[i + radius];
    }
    for (auto& k : kernel) k /= norm;

    OccupancyGrid out = grid;
    OccupancyGrid tmp = grid;
    const auto [nx, ny, nz] = grid.resolution;

    auto pass = [&](const OccupancyGrid& src, OccupancyGrid& dst, int axis) {
        const int n[3] = {nx, ny, nz};
        for (int z = 0; z < nz; ++z)
            for (int y = 0; y < ny; ++y)
                for (int x = 0; x < nx; ++x) {
                    int idx[3] = {x, y, z};
                    double acc = 0.0, wsum = 0.0;
                    for (int k = -radius; k <= radius; ++k) {
                        int j[3] = {idx[0], idx[1], idx[2]};
                        j[axis] += k;
                        if (j[axis] < 0 || j[axis] >= n[axis]) continue;
                        const double w = kernel[k + radius];
                        acc += w * src.at(j[0], j[1], j[2]);
                        wsum += w;
                    }
                    dst.values[dst.index(x, y, z)] = acc / wsum;
                }
    };

    pass(grid, tmp, 0);
    pass(tmp, out, 1);
    pass(out, tmp, 2);
    return tmp;
}

TriangleMesh marching_cubes(const OccupancyGrid& grid, double iso) {
    const auto [nx, ny, nz] = grid.resolution;
    TriangleMesh mesh;
    std::unordered_map<uint64_t, int> edge_vertex;

    double corner_value[8];
    Eigen::Vector3d corner_pos[8];

    for (int z = 0; z + 1 < nz; ++z) {
        for (int y = 0; y + 1 < ny; ++y) {
            for (int x = 0; x + 1 < nx; ++x) {
                int cube_index = 0;
                for (int c = 0; c < 8; ++c) {
                    corner_value[c] =
                        grid.at(x + kCorner[c][0], y + kCorner[c][1], z + kCorner[c][2]);
                    corner_pos[c] = grid.node_position(x + kCorner[c][0], y + kCorner[c][1],
                                                       z + kCorner[c][2]);
                    if (corner_value[c] < iso) cube_index |= 1 << c;
                }
                const int edges = mc_tables::kEdgeTable[cube_index];
                if (edges == 0) continue;

                int edge_to_vertex[12];
                for (int e = 0; e < 12; ++e) {
                    if (!(edges & (1 << e))) continue;
                    const uint64_t key =
                        grid_edge_key(grid, x, y, z, kEdgeCorners[e][0], kEdgeCorners[e][1]);
                    auto it = edge_vertex.find(key);
                    if (it != edge_vertex.end()) {
                        edge_to_vertex[e] = it->second;
                        continue;
                    }
                    const double v0 = corner_value[kEdgeCorners[e][0]];
                    const double v1 = corner_value[kEdgeCorners[e][1]];
                    double t = (iso - v0) / (v1 - v0);
                    t = std::clamp(t, 0.0, 1.0);
                    const Eigen::Vector3d p = corner_pos[kEdgeCorners[e][0]] +
                                              t * (corner_pos[kEdgeCorners[e][1]] -
                                                   corner_pos[kEdgeCorners[e][0]]);
                    edge_to_vertex[e] = static_cast<int>(mesh.vertices.size());
                    mesh.vertices.push_back(p);
                    edge_vertex.emplace(key, edge_to_vertex[e]);
                }

                const int* tri = mc_tables::kTriTable[cube_index];
                for (int i = 0; tri[i] != -1; i += 3) {
                    // Table order winds outward under the positive-inside
                    // convention.
                    const std::array<int, 3> face = {edge_to_vertex[tri[i]],
                                                     edge_to_vertex[tri[i + 1]],
                                                     edge_to_vertex[tri[i + 2]]};
                    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) continue;
                    mesh.triangles.push_back(face);
                }
            }
        }
    }

    // Drop zero-area slivers (distinct indices but collinear vertices).
    std::vector<std::array<int, 3>> kept;
    kept.reserve(mesh.triangles.size());
    for (size_t i = 0; i < mesh.triangles.size(); ++i) {
        if (triangle_area(mesh, static_cast<int>(i)) > 1e-12) kept.push_back(mesh.triangles[i]);
    }
    mesh.triangles = std::move(kept);
    return mesh;
}

double triangle_area(const TriangleMesh& mesh, int triangle) {
    const auto& t = mesh.triangles[triangle];
    const Eigen::Vector3d e1 = mesh.vertices[t[1]] - mesh.vertices[t[0]];
    const Eigen::Vector3d e2 = mesh.vertices[t[2]] - mesh.vertices[t[0]];
    return 0.5 * e1.cross(e2).norm();
}

}  // namespace usrecon
