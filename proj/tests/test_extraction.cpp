#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <map>
#include <set>

#include "usrecon/extraction.hpp"
#include "usrecon/rng.hpp"

using namespace usrecon;

namespace {

// positive inside a sphere of radius r about the cube center
std::function<double(const Eigen::Vector3d&)> sphere_field(double r) {
    return [r](const Eigen::Vector3d& p) {
        return r - (p - Eigen::Vector3d(0.5, 0.5, 0.5)).norm();
    };
}

// every undirected edge -> number of incident triangles
std::map<std::pair<int, int>, int> edge_counts(const TriangleMesh& mesh) {
    std::map<std::pair<int, int>, int> counts;
    for (const auto& t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            counts[{a, b}]++;
        }
    }
    return counts;
}

OccupancyModel constant_half_model() {
    auto model = make_model({InputKind::Coordinates, 2, 4, 1}, {1, true}, 3, 1);
    for (auto& layer : model.layers) {
        layer.weights.setZero();
        layer.bias.setZero();
    }
    return model;
}

}  // namespace

TEST_CASE("sample_grid: a constant-0.5 model gives all-zero shifted values") {
    const auto model = constant_half_model();
    const auto grid = sample_grid(
        model, [](const Eigen::Vector3d& p) { return p; }, {8, 8, 8});
    for (const double v : grid.values) CHECK(v == 0.0);
}

TEST_CASE("sample_grid: resolution 2 places the 8 nodes at the cube corners") {
    const auto model = constant_half_model();
    const auto grid = sample_grid(
        model, [](const Eigen::Vector3d& p) { return p; }, {2, 2, 2});
    REQUIRE(grid.values.size() == 8);
    std::set<std::array<int, 3>> seen;
    for (int z = 0; z < 2; ++z)
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x) {
                const Eigen::Vector3d p = grid.node_position(x, y, z);
                CHECK((p.array() == p.array().round()).all());
                seen.insert({x, y, z});
            }
    CHECK(seen.size() == 8);
    CHECK_THROWS_AS(sample_grid(
                        model, [](const Eigen::Vector3d& p) { return p; }, {1, 4, 4}),
                    std::invalid_argument);
}

TEST_CASE("scalar grid of an analytic sphere changes sign exactly across the shell") {
    const auto grid = sample_scalar_grid(sphere_field(0.3), {33, 33, 33});
    for (int z = 0; z < 33; ++z)
        for (int y = 0; y < 33; ++y)
            for (int x = 0; x < 33; ++x) {
                const double r = (grid.node_position(x, y, z) - Eigen::Vector3d(0.5, 0.5, 0.5)).norm();
                const double v = grid.at(x, y, z);
                if (r < 0.3) CHECK(v > 0.0);
                if (r > 0.3) CHECK(v < 0.0);
            }
}

TEST_CASE("smooth: sigma zero is the identity, constants are fixed points") {
    auto grid = sample_scalar_grid(sphere_field(0.25), {17, 17, 17});
    const auto same = smooth(grid, 0.0);
    CHECK(same.values == grid.values);

    OccupancyGrid constant = grid;
    std::fill(constant.values.begin(), constant.values.end(), 0.37);
    const auto smoothed = smooth(constant, 1.5, 3);
    for (const double v : smoothed.values) CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("smooth: an interior impulse keeps unit mass") {
    OccupancyGrid grid;
    grid.resolution = {21, 21, 21};
    grid.spacing = Eigen::Vector3d::Constant(1.0 / 20);
    grid.values.assign(grid.node_count(), 0.0);
    grid.values[grid.index(10, 10, 10)] = 1.0;
    const auto out = smooth(grid, 1.0, 3);
    double mass = 0.0;
    for (const double v : out.values) mass += v;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("marching cubes: a one-sided grid yields an empty mesh") {
    OccupancyGrid grid;
    grid.resolution = {4, 4, 4};
    grid.spacing = Eigen::Vector3d::Constant(1.0 / 3);
    grid.values.assign(grid.node_count(), -1.0);
    CHECK(marching_cubes(grid).empty());
    std::fill(grid.values.begin(), grid.values.end(), 0.5);
    CHECK(marching_cubes(grid).empty());
}

TEST_CASE("marching cubes: analytic sphere is watertight with small radial error") {
    const auto grid = sample_scalar_grid(sphere_field(0.3), {64, 64, 64});
    const auto mesh = marching_cubes(grid, 0.0);
    REQUIRE(!mesh.empty());

    const double cell = 1.0 / 63.0;
    double max_err = 0.0;
    for (const auto& v : mesh.vertices)
        max_err = std::max(max_err, std::abs((v - Eigen::Vector3d(0.5, 0.5, 0.5)).norm() - 0.3));
    CHECK(max_err < 1.5 * cell);

    for (const auto& [edge, count] : edge_counts(mesh)) CHECK(count == 2);
}

TEST_CASE("marching cubes: triangles wind with outward normals") {
    const auto grid = sample_scalar_grid(sphere_field(0.3), {32, 32, 32});
    const auto mesh = marching_cubes(grid, 0.0);
    REQUIRE(!mesh.empty());
    const Eigen::Vector3d center(0.5, 0.5, 0.5);
    int outward = 0;
    for (const auto& t : mesh.triangles) {
        const Eigen::Vector3d a = mesh.vertices[t[0]];
        const Eigen::Vector3d n = (mesh.vertices[t[1]] - a).cross(mesh.vertices[t[2]] - a);
        if (n.dot((a - center)) > 0.0) ++outward;
    }
    CHECK(outward == static_cast<int>(mesh.triangles.size()));
}

TEST_CASE("marching cubes: a single positive node produces a closed genus-0 surface") {
    OccupancyGrid grid;
    grid.resolution = {5, 5, 5};
    grid.spacing = Eigen::Vector3d::Constant(0.25);
    grid.values.assign(grid.node_count(), -1.0);
    grid.values[grid.index(2, 2, 2)] = 1.0;
    const auto mesh = marching_cubes(grid, 0.0);
    REQUIRE(!mesh.empty());

    const auto counts = edge_counts(mesh);
    for (const auto& [edge, count] : counts) CHECK(count == 2);
    const int euler = static_cast<int>(mesh.vertices.size()) - static_cast<int>(counts.size()) +
                      static_cast<int>(mesh.triangles.size());
    CHECK(euler == 2);
}

TEST_CASE("marching cubes: vertices interpolate the field linearly on grid edges") {
    const auto grid = sample_scalar_grid(
        [](const Eigen::Vector3d& p) { return p.x() - 0.371; }, {9, 9, 9});
    const auto mesh = marching_cubes(grid, 0.0);
    REQUIRE(!mesh.empty());
    for (const auto& v : mesh.vertices) {
        CHECK(std::abs(v.x() - 0.371) < 1e-9);  // zero crossing of the linear field
    }
}

TEST_CASE("mesh has no degenerate triangles after cleanup") {
    // field values hitting the iso exactly at nodes provoke slivers
    const auto grid = sample_scalar_grid(
        [](const Eigen::Vector3d& p) {
            const double v = (p - Eigen::Vector3d(0.5, 0.5, 0.5)).norm() - 0.25;
            return std::abs(v) < 0.02 ? 0.0 : v;
        },
        {16, 16, 16});
    const auto mesh = marching_cubes(grid, 0.0);
    for (size_t i = 0; i < mesh.triangles.size(); ++i) {
        CHECK(triangle_area(mesh, static_cast<int>(i)) > 1e-12);
        const auto& t = mesh.triangles[i];
        CHECK(t[0] != t[1]);
        CHECK(t[1] != t[2]);
        CHECK(t[0] != t[2]);
    }
}
