#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "usrecon/metrics.hpp"
#include "usrecon/rng.hpp"

using namespace usrecon;

namespace {

TriangleMesh single_triangle() {
    TriangleMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    mesh.triangles = {{0, 1, 2}};
    return mesh;
}

TriangleMesh unit_square() {
    TriangleMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
    return mesh;
}

std::vector<Eigen::Vector3d> random_points(Rng& rng, int n) {
    std::vector<Eigen::Vector3d> points;
    points.reserve(n);
    for (int i = 0; i < n; ++i)
        points.emplace_back(rng.uniform(), rng.uniform(), rng.uniform());
    return points;
}

MetricsReport brute_force_metrics(const std::vector<Eigen::Vector3d>& a,
                                  const std::vector<Eigen::Vector3d>& b) {
    auto nearest = [](const Eigen::Vector3d& q, const std::vector<Eigen::Vector3d>& set) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : set) best = std::min(best, (p - q).squaredNorm());
        return std::sqrt(best);
    };
    double sum_ab = 0, max_ab = 0, sq_ab = 0, sum_ba = 0, max_ba = 0, sq_ba = 0;
    for (const auto& q : a) {
        const double d = nearest(q, b);
        sum_ab += d;
        max_ab = std::max(max_ab, d);
        sq_ab += d * d;
    }
    for (const auto& q : b) {
        const double d = nearest(q, a);
        sum_ba += d;
        max_ba = std::max(max_ba, d);
        sq_ba += d * d;
    }
    MetricsReport r;
    r.cd = 0.5 * (sum_ab / a.size() + sum_ba / b.size());
    r.hd = std::max(max_ab, max_ba);
    r.mad = (sum_ab + sum_ba) / (a.size() + b.size());
    r.rmse = std::sqrt((sq_ab + sq_ba) / (a.size() + b.size()));
    return r;
}

}  // namespace

TEST_CASE("sample_surface: one draw from a single triangle lies inside it") {
    const auto points = sample_surface(single_triangle(), 1, 3);
    REQUIRE(points.size() == 1);
    const auto& p = points[0];
    CHECK(p.z() == 0.0);
    CHECK(p.x() >= 0.0);
    CHECK(p.y() >= 0.0);
    CHECK(p.x() + p.y() <= 1.0 + 1e-12);
}

TEST_CASE("sample_surface: counts follow the area split within 2 percent") {
    TriangleMesh mesh = unit_square();
    // split into one small and one large triangle instead: [0,1,2] has area
    // 0.5, add a second square far away with area 1.0 total 2 triangles
    mesh.vertices.push_back({5, 0, 0});
    mesh.vertices.push_back({7, 0, 0});
    mesh.vertices.push_back({7, 1, 0});
    mesh.triangles = {{0, 1, 2}, {4, 5, 6}};  // areas 0.5 and 1.0
    const int n = 100000;
    const auto points = sample_surface(mesh, n, 11);
    int near = 0;
    for (const auto& p : points) near += p.x() < 2.0;
    const double expected = 0.5 / 1.5;
    CHECK(std::abs(static_cast<double>(near) / n - expected) < 0.02);
}

TEST_CASE("sample_surface: zero-area triangles carry no mass") {
    TriangleMesh mesh = single_triangle();
    mesh.vertices.push_back({9, 9, 9});
    mesh.triangles.push_back({3, 3, 3});  // degenerate
    const auto points = sample_surface(mesh, 5000, 7);
    for (const auto& p : points) CHECK(p.norm() < 3.0);
}

TEST_CASE("sample_surface: deterministic per seed, errors on empty meshes") {
    const auto a = sample_surface(unit_square(), 50, 9);
    const auto b = sample_surface(unit_square(), 50, 9);
    for (size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() == 0.0);
    CHECK_THROWS_AS(sample_surface(TriangleMesh{}, 10, 1), std::invalid_argument);
}

TEST_CASE("identical point sets give all-zero metrics") {
    Rng rng(13);
    const auto points = random_points(rng, 300);
    const auto report = compute_metrics(points, points);
    CHECK(report.cd == 0.0);
    CHECK(report.hd == 0.0);
    CHECK(report.mad == 0.0);
    CHECK(report.rmse == 0.0);
}

TEST_CASE("two single points at distance t score t on every metric") {
    const std::vector<Eigen::Vector3d> a = {{0, 0, 0}};
    const std::vector<Eigen::Vector3d> b = {{0, 0, 0.37}};
    const auto report = compute_metrics(a, b);
    CHECK(report.cd == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(report.hd == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(report.mad == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(report.rmse == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("k-d tree metrics equal the brute-force oracle exactly") {
    Rng rng(31);
    for (int instance = 0; instance < 20; ++instance) {
        const auto a = random_points(rng, 200);
        const auto b = random_points(rng, 200);
        const auto fast = compute_metrics(a, b);
        const auto slow = brute_force_metrics(a, b);
        CHECK(fast.cd == slow.cd);
        CHECK(fast.hd == slow.hd);
        CHECK(fast.mad == slow.mad);
        CHECK(fast.rmse == slow.rmse);
    }
}

TEST_CASE("metrics are symmetric in their arguments") {
    Rng rng(37);
    const auto a = random_points(rng, 150);
    const auto b = random_points(rng, 90);
    const auto ab = compute_metrics(a, b);
    const auto ba = compute_metrics(b, a);
    CHECK(ab.cd == ba.cd);
    CHECK(ab.hd == ba.hd);
    CHECK(ab.mad == ba.mad);
    CHECK(ab.rmse == ba.rmse);
}

TEST_CASE("metrics scale linearly with the point sets") {
    Rng rng(41);
    auto a = random_points(rng, 120);
    auto b = random_points(rng, 120);
    const auto base = compute_metrics(a, b);
    const double s = 3.5;
    for (auto& p : a) p *= s;
    for (auto& p : b) p *= s;
    const auto scaled = compute_metrics(a, b);
    CHECK(scaled.cd == doctest::Approx(s * base.cd).epsilon(1e-12));
    CHECK(scaled.hd == doctest::Approx(s * base.hd).epsilon(1e-12));
    CHECK(scaled.mad == doctest::Approx(s * base.mad).epsilon(1e-12));
    CHECK(scaled.rmse == doctest::Approx(s * base.rmse).epsilon(1e-12));
}

TEST_CASE("report ordering invariants hold on random inputs") {
    Rng rng(43);
    for (int i = 0; i < 10; ++i) {
        const auto a = random_points(rng, 80);
        const auto b = random_points(rng, 60);
        const auto r = compute_metrics(a, b);
        CHECK(r.hd >= r.mad);
        CHECK(r.rmse >= r.mad);
        CHECK(r.cd >= 0.0);
    }
}

TEST_CASE("compute_metrics rejects empty inputs") {
    const std::vector<Eigen::Vector3d> some = {{0, 0, 0}};
    CHECK_THROWS_AS(compute_metrics({}, some), std::invalid_argument);
    CHECK_THROWS_AS(compute_metrics(some, {}), std::invalid_argument);
}
