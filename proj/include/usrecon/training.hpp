#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "usrecon/dataset.hpp"
#include "usrecon/geometry.hpp"
#include "usrecon/network.hpp"
#include "usrecon/phantom.hpp"
#include "usrecon/transmittance.hpp"

namespace usrecon {

enum class LossKind { AttenuationCompensated, PlainBCE };

struct TrainConfig {
    int iterations = 50000;
    int batch_size = 256;
    double learning_rate = 1e-4;
    double decay_rate = 0.1;
    double decay_steps = 250000;
    double supervision_fraction = 1.0;
    LossKind loss_kind = LossKind::AttenuationCompensated;
    double clamp_epsilon = 1e-6;
    int trace_every = 100;

    void validate() const;
};

struct DatasetBuildOptions {
    bool exclude_shadowed_occupied = true;  // an annotator cannot label what is shadowed
};

// One sample per (frame, scanline, depth) node: features and label from the
// phantom, transmittance from the scanline profile. Occupied samples below
// the shadow threshold are dropped when the option is set.
std::vector<AcousticSample> build_dataset(const std::vector<ScanTrajectory>& trajectories,
                                          const PhantomSpec& phantom,
                                          const TransmittanceParams& tparams,
                                          const DatasetBuildOptions& options, uint64_t seed);

// Uniform per-frame subset without replacement, round(fraction * n) per
// frame; deterministic per seed. fraction = 1 returns the input unchanged.
std::vector<AcousticSample> subsample(const std::vector<AcousticSample>& samples, double fraction,
                                      uint64_t seed);

// Annotation/tracking error model: flips each label with probability
// flip_rate and applies one random rigid offset (magnitude <= pose_noise) to
// all sample positions of a frame.
std::vector<AcousticSample> perturb_labels(const std::vector<AcousticSample>& samples,
                                           double flip_rate, double pose_noise, uint64_t seed);

struct LossValue {
    double value = 0.0;
    double dprob = 0.0;  // derivative w.r.t. the network output
};

// Binary cross-entropy on the attenuated prediction t*p, with the product
// clamped to [clamp_epsilon, 1-clamp_epsilon] inside the logs. The plain
// variant is the same expression with t = 1.
LossValue occupancy_loss(double prob, int label, double t, double clamp_epsilon,
                         LossKind kind = LossKind::AttenuationCompensated);

double learning_rate_at(const TrainConfig& cfg, int step);

struct TraceEntry {
    int step = 0;
    double loss = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    OccupancyModel model;
    std::vector<TraceEntry> trace;
};

class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(const std::string& what, int step, double lr)
        : std::runtime_error(what), step(step), lr(lr) {}
    int step;
    double lr;
};

// Adam with bias correction and exponential step-size decay: uniform batches
// over the dataset, single-threaded and deterministic per seed. Throws
// TrainingDiverged on a non-finite loss.
TrainResult train(const OccupancyModel& model, const std::vector<AcousticSample>& dataset,
                  const TrainConfig& cfg, uint64_t seed);

struct FinetuneConfig {
    double fraction = 0.01;
    int iterations = 100;
    double learning_rate = 1e-3;
    int freeze_last = 2;
};

// Adaptation to a new volume of the same anatomy: freezes the trailing
// layers, then trains on a small per-frame subsample of the new dataset.
TrainResult finetune(const OccupancyModel& model, const std::vector<AcousticSample>& new_dataset,
                     const TrainConfig& base_cfg, const FinetuneConfig& ft, uint64_t seed);

}  // namespace usrecon
