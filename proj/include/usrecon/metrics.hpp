#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "usrecon/extraction.hpp"

namespace usrecon {

struct MetricsReport {
    double cd = 0.0;    // symmetric Chamfer distance (halved-sum convention)
    double hd = 0.0;    // Hausdorff: max of the two directed maxima
    double mad = 0.0;   // mean of pooled bidirectional nearest-neighbor distances
    double rmse = 0.0;  // root mean square of the pooled distances
    int n_points = 0;
    uint64_t seed = 0;
};

// Area-weighted uniform surface sampling; deterministic per seed. Zero-area
// triangles carry no probability mass.
std::vector<Eigen::Vector3d> sample_surface(const TriangleMesh& mesh, int n, uint64_t seed);

MetricsReport compute_metrics(const std::vector<Eigen::Vector3d>& pred_points,
                              const std::vector<Eigen::Vector3d>& gt_points);

// Median-split k-d tree over a fixed point set; queries are exact.
class KdTree3 {
public:
    explicit KdTree3(std::vector<Eigen::Vector3d> points);

    double nearest_distance(const Eigen::Vector3d& query) const;
    size_t size() const { return points_.size(); }

private:
    struct Node {
        int axis = -1;       // -1 marks a leaf
        double split = 0.0;
        int left = -1, right = -1;
        int begin = 0, end = 0;  // leaf range into order_
    };

    int build(int begin, int end, int depth);
    void search(int node, const Eigen::Vector3d& query, double& best2) const;

    std::vector<Eigen::Vector3d> points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace usrecon
