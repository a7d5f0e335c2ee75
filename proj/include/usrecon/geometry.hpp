#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace usrecon {

// Rigid probe pose. Local axes: x = elevation (sweep direction for a row
// scan), y = lateral (transducer array), z = beam (axial, into the volume).
struct Pose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d beam_axis() const { return rotation.col(2); }
    Eigen::Vector3d lateral_axis() const { return rotation.col(1); }
    Eigen::Vector3d elevation_axis() const { return rotation.col(0); }

    bool is_orthonormal(double tol = 1e-9) const;
};

struct Ray {
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
    double max_depth = 1.0;

    Eigen::Vector3d point_at(double depth) const { return origin + depth * direction; }
};

struct Aabb {
    Eigen::Vector3d min = Eigen::Vector3d::Zero();
    Eigen::Vector3d max = Eigen::Vector3d::Ones();

    Eigen::Vector3d extent() const { return max - min; }
    Eigen::Vector3d center() const { return 0.5 * (min + max); }
    bool contains(const Eigen::Vector3d& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
};

enum class TrajectoryKind { Row, Column, TiltedMinus10, TiltedPlus10 };

const char* to_string(TrajectoryKind kind);

struct ScanTrajectory {
    TrajectoryKind kind = TrajectoryKind::Row;
    std::vector<Pose> frames;
    int scanlines_per_frame = 32;
    int samples_per_scanline = 64;
    Aabb extent;
};

// Evenly spaced parallel frames sweeping the extent. Row sweeps along x,
// Column along y; tilted kinds are row sweeps with the beam rotated +-10
// degrees about the sweep axis. Frames enter at the z-min face.
ScanTrajectory make_trajectory(TrajectoryKind kind, int n_frames, const Aabb& extent,
                               int scanlines_per_frame = 32, int samples_per_scanline = 64);

// Parallel scanlines of a linear array: origins evenly spaced over the
// aperture along the lateral axis, all sharing the pose's beam direction.
std::vector<Ray> frame_rays(const Pose& pose, int scanlines, double depth, double aperture = 1.0);

// q = scale * p + translation, with a single isotropic scale.
struct SimilarityTransform {
    double scale = 1.0;
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return scale * p + translation; }
    SimilarityTransform inverse() const { return {1.0 / scale, -translation / scale}; }
};

// Maps the point cloud into [0,1]^3 with a uniform scale (longest axis spans
// exactly [0,1]); returns the transform that was applied.
std::pair<std::vector<Eigen::Vector3d>, SimilarityTransform> normalize_to_unit_cube(
    const std::vector<Eigen::Vector3d>& points);

}  // namespace usrecon
