#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "usrecon/extraction.hpp"
#include "usrecon/geometry.hpp"
#include "usrecon/network.hpp"
#include "usrecon/phantom.hpp"
#include "usrecon/training.hpp"
#include "usrecon/transmittance.hpp"

namespace usrecon {

struct TrajectoryConfig {
    TrajectoryKind kind = TrajectoryKind::Row;
    int frames = 12;
    int scanlines = 28;
    int samples = 56;
    Aabb extent;
};

struct PerturbationConfig {
    double flip_rate = 0.0;
    double pose_noise = 0.0;
};

struct ExtractionConfig {
    int resolution = 64;
    double smooth_sigma = 1.0;
    int smooth_radius = 3;
};

struct MetricsConfig {
    int samples = 30000;
    int gt_resolution = 128;  // ground-truth mesh grid
};

// One experiment: phantom, scan plan, simulation and optimization settings.
// A run is fully determined by (config, seed).
struct RunConfig {
    uint64_t seed = 1;
    double scale_mm = 0.0;  // millimeters per cube unit; 0 reports cube units
    std::string phantom_id = "phantom";
    PhantomSpec phantom;
    std::vector<TrajectoryConfig> trajectories;
    TransmittanceParams transmittance;
    PerturbationConfig perturbation;
    DatasetBuildOptions dataset;
    EncodingConfig encoding_features{6, true};
    EncodingConfig encoding_coordinates{10, true};
    NetworkConfig network;
    Eigen::Vector3d feature_scale = Eigen::Vector3d(0.1, 1.0, 1.0);
    TrainConfig training;
    FinetuneConfig finetune;
    ExtractionConfig extraction;
    MetricsConfig metrics;
    std::string output_dir;

    // throws std::invalid_argument naming the offending field
    void validate() const;
};

nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

RunConfig load_config(const std::string& path);
void save_config(const std::string& path, const RunConfig& cfg);

// FNV-1a of the canonical JSON dump with output_dir erased, so the hash
// identifies the experiment, not where it lands on disk.
uint64_t config_hash(const RunConfig& cfg);

std::string hash_hex(uint64_t h);
uint64_t file_hash(const std::string& path);

// Presets. "desk" finishes the full ablation in minutes on a laptop core;
// "paper-scale" uses the full 8x128 network and 50k iterations.
RunConfig desk_preset();
RunConfig paper_scale_preset();
// Same anatomy family as desk_preset but a different volume: deformed solids
// and shifted tissue properties; used for generalization runs.
RunConfig desk_preset_b();

RunConfig preset_by_name(const std::string& name);

}  // namespace usrecon
