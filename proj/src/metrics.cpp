#include "usrecon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "usrecon/rng.hpp"

namespace usrecon {

std::vector<Eigen::Vector3d> sample_surface(const TriangleMesh& mesh, int n, uint64_t seed) {
    if (mesh.empty()) throw std::invalid_argument("sample_surface: empty mesh");
    if (n < 1) throw std::invalid_argument("sample_surface: n must be >= 1");

    std::vector<double> cumulative(mesh.triangles.size());
    double total = 0.0;
    for (size_t i = 0; i < mesh.triangles.size(); ++i) {
        total += triangle_area(mesh, static_cast<int>(i));
        cumulative[i] = total;
    }
    if (total <= 0.0) throw std::invalid_argument("sample_surface: mesh has zero area");

    Rng rng(seed);
    std::vector<Eigen::Vector3d> points;
    points.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double pick = rng.uniform() * total;
        const size_t t = static_cast<size_t>(
            std::lower_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
        const auto& tri = mesh.triangles[std::min(t, mesh.triangles.size() - 1)];
        // uniform barycentric via the square-root trick
        const double r1 = std::sqrt(rng.uniform());
        const double r2 = rng.uniform();
        const Eigen::Vector3d p = (1.0 - r1) * mesh.vertices[tri[0]] +
                                  r1 * (1.0 - r2) * mesh.vertices[tri[1]] +
                                  r1 * r2 * mesh.vertices[tri[2]];
        points.push_back(p);
    }
    return points;
}

KdTree3::KdTree3(std::vector<Eigen::Vector3d> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (!points_.empty()) root_ = build(0, static_cast<int>(points_.size()), 0);
}

int KdTree3::build(int begin, int end, int depth) {
    constexpr int kLeafSize = 16;
    Node node;
    if (end - begin <= kLeafSize) {
        node.begin = begin;
        node.end = end;
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }
    const int axis = depth % 3;
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
    node.axis = axis;
    node.split = points_[order_[mid]][axis];
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    const int left = build(begin, mid, depth + 1);
    const int right = build(mid, end, depth + 1);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

void KdTree3::search(int node_id, const Eigen::Vector3d& query, double& best2) const {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            const double d2 = (points_[order_[i]] - query).squaredNorm();
            if (d2 < best2) best2 = d2;
        }
        return;
    }
    const double delta = query[node.axis] - node.split;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, query, best2);
    if (delta * delta < best2) search(far, query, best2);
}

double KdTree3::nearest_distance(const Eigen::Vector3d& query) const {
    if (points_.empty()) throw std::invalid_argument("KdTree3: empty point set");
    double best2 = std::numeric_limits<double>::infinity();
    search(root_, query, best2);
    return std::sqrt(best2);
}

MetricsReport compute_metrics(const std::vector<Eigen::Vector3d>& pred_points,
                              const std::vector<Eigen::Vector3d>& gt_points) {
    if (pred_points.empty() || gt_points.empty())
        throw std::invalid_argument("compute_metrics: point sets must be nonempty");

    const KdTree3 pred_tree(pred_points);
    const KdTree3 gt_tree(gt_points);

    // Per-direction accumulators combined with single commutative adds, so
    // compute_metrics(A, B) == compute_metrics(B, A) bit for bit.
    double sum_pg = 0.0, max_pg = 0.0, sq_pg = 0.0;
    for (const auto& p : pred_points) {
        const double d = gt_tree.nearest_distance(p);
        sum_pg += d;
        max_pg = std::max(max_pg, d);
        sq_pg += d * d;
    }
    double sum_gp = 0.0, max_gp = 0.0, sq_gp = 0.0;
    for (const auto& g : gt_points) {
        const double d = pred_tree.nearest_distance(g);
        sum_gp += d;
        max_gp = std::max(max_gp, d);
        sq_gp += d * d;
    }

    const double np = static_cast<double>(pred_points.size());
    const double ng = static_cast<double>(gt_points.size());

    MetricsReport report;
    report.cd = 0.5 * (sum_pg / np + sum_gp / ng);
    report.hd = std::max(max_pg, max_gp);
    report.mad = (sum_pg + sum_gp) / (np + ng);
    report.rmse = std::sqrt((sq_pg + sq_gp) / (np + ng));
    report.n_points = static_cast<int>(pred_points.size());
    return report;
}

}  // namespace usrecon
