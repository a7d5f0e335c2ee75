#include "usrecon/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Geometry>

namespace usrecon {

namespace {

constexpr double kTiltRadians = 10.0 * M_PI / 180.0;

Eigen::Matrix3d column_rotation() {
    // local elevation (+x) -> world y, local lateral (+y) -> world -x,
    // beam stays +z; this is a +90 degree rotation about z.
    Eigen::Matrix3d r;
    r << 0, -1, 0,
         1,  0, 0,
         0,  0, 1;
    return r;
}

}  // namespace

bool Pose::is_orthonormal(double tol) const {
    const Eigen::Matrix3d err = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
    return err.cwiseAbs().maxCoeff() <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

const char* to_string(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::Row: return "row";
        case TrajectoryKind::Column: return "column";
        case TrajectoryKind::TiltedMinus10: return "tilted-10";
        case TrajectoryKind::TiltedPlus10: return "tilted+10";
    }
    return "unknown";
}

ScanTrajectory make_trajectory(TrajectoryKind kind, int n_frames, const Aabb& extent,
                               int scanlines_per_frame, int samples_per_scanline) {
    if (n_frames < 1) throw std::invalid_argument("make_trajectory: n_frames must be >= 1");
    if (scanlines_per_frame < 1 || samples_per_scanline < 1)
        throw std::invalid_argument("make_trajectory: counts must be >= 1");
    if ((extent.extent().array() <= 0.0).any())
        throw std::invalid_argument("make_trajectory: extent has zero volume");

    const bool column = kind == TrajectoryKind::Column;
    const int sweep_axis = column ? 1 : 0;

    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    if (column) {
        rotation = column_rotation();
    } else if (kind == TrajectoryKind::TiltedMinus10) {
        rotation = Eigen::AngleAxisd(-kTiltRadians, Eigen::Vector3d::UnitX()).toRotationMatrix();
    } else if (kind == TrajectoryKind::TiltedPlus10) {
        rotation = Eigen::AngleAxisd(kTiltRadians, Eigen::Vector3d::UnitX()).toRotationMatrix();
    }

    ScanTrajectory traj;
    traj.kind = kind;
    traj.scanlines_per_frame = scanlines_per_frame;
    traj.samples_per_scanline = samples_per_scanline;
    traj.extent = extent;
    traj.frames.reserve(n_frames);

    const double lo = extent.min[sweep_axis];
    const double hi = extent.max[sweep_axis];
    for (int i = 0; i < n_frames; ++i) {
        const double s = n_frames == 1 ? 0.5 * (lo + hi)
                                       : lo + (hi - lo) * static_cast<double>(i) / (n_frames - 1);
        Pose pose;
        pose.rotation = rotation;
        pose.translation = extent.center();
        pose.translation[sweep_axis] = s;
        pose.translation.z() = extent.min.z();  // entry face
        traj.frames.push_back(pose);
    }
    return traj;
}

std::vector<Ray> frame_rays(const Pose& pose, int scanlines, double depth, double aperture) {
    if (scanlines < 1) throw std::invalid_argument("frame_rays: scanlines must be >= 1");
    if (depth <= 0.0) throw std::invalid_argument("frame_rays: depth must be > 0");

    const Eigen::Vector3d beam = pose.beam_axis();
    const Eigen::Vector3d lateral = pose.lateral_axis();

    std::vector<Ray> rays;
    rays.reserve(scanlines);
    for (int i = 0; i < scanlines; ++i) {
        const double offset =
            scanlines == 1 ? 0.0 : (static_cast<double>(i) / (scanlines - 1) - 0.5) * aperture;
        Ray ray;
        ray.origin = pose.translation + offset * lateral;
        ray.direction = beam;
        ray.max_depth = depth;
        rays.push_back(ray);
    }
    return rays;
}

std::pair<std::vector<Eigen::Vector3d>, SimilarityTransform> normalize_to_unit_cube(
    const std::vector<Eigen::Vector3d>& points) {
    if (points.empty()) throw std::invalid_argument("normalize_to_unit_cube: no points");

    Eigen::Vector3d lo = points.front();
    Eigen::Vector3d hi = points.front();
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double span = (hi - lo).maxCoeff();
    if (span <= 0.0)
        throw std::invalid_argument("normalize_to_unit_cube: degenerate (all points identical)");

    SimilarityTransform transform;
    transform.scale = 1.0 / span;
    transform.translation = -lo / span;

    std::vector<Eigen::Vector3d> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(transform.apply(p));
    return {std::move(out), transform};
}

}  // namespace usrecon
