#include "usrecon/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "usrecon/rng.hpp"

namespace usrecon {

void TrainConfig::validate() const {
    if (iterations < 0) throw std::invalid_argument("training.iterations must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("training.batch_size must be >= 1");
    if (learning_rate <= 0.0) throw std::invalid_argument("training.learning_rate must be > 0");
    if (decay_rate <= 0.0 || decay_rate > 1.0)
        throw std::invalid_argument("training.decay_rate must be in (0,1]");
    if (decay_steps <= 0.0) throw std::invalid_argument("training.decay_steps must be > 0");
    if (supervision_fraction <= 0.0 || supervision_fraction > 1.0)
        throw std::invalid_argument("training.supervision_fraction must be in (0,1]");
    if (clamp_epsilon <= 0.0 || clamp_epsilon >= 0.5)
        throw std::invalid_argument("training.clamp_epsilon must be in (0, 0.5)");
    if (trace_every < 1) throw std::invalid_argument("training.trace_every must be >= 1");
}

std::vector<AcousticSample> build_dataset(const std::vector<ScanTrajectory>& trajectories,
                                          const PhantomSpec& phantom,
                                          const TransmittanceParams& tparams,
                                          const DatasetBuildOptions& options, uint64_t seed) {
    if (trajectories.empty()) throw std::invalid_argument("build_dataset: no trajectories");
    phantom.validate();

    const AcousticField field = [&](const Eigen::Vector3d& p) {
        return features_at(phantom, p, seed);
    };

    std::vector<AcousticSample> samples;
    int frame_id = 0;
    for (size_t t = 0; t < trajectories.size(); ++t) {
        const auto& traj = trajectories[t];
        const double depth = traj.extent.extent().z();
        const double aperture =
            traj.kind == TrajectoryKind::Column ? traj.extent.extent().x() : traj.extent.extent().y();
        for (const auto& pose : traj.frames) {
            const auto rays = frame_rays(pose, traj.scanlines_per_frame, depth, aperture);
            for (int line = 0; line < static_cast<int>(rays.size()); ++line) {
                const Ray& ray = rays[line];
                const auto profile = transmittance_along(ray, field, tparams.step, tparams.epsilon,
                                                         tparams.t0, tparams.quadrature);
                const double spacing = ray.max_depth / traj.samples_per_scanline;
                for (int k = 0; k < traj.samples_per_scanline; ++k) {
                    AcousticSample s;
                    s.depth = (k + 0.5) * spacing;
                    s.x = ray.point_at(s.depth);
                    s.theta = field(s.x);
                    s.label = occupancy_at(phantom, s.x);
                    s.transmittance = transmittance_at(s.depth, profile);
                    s.sweep = static_cast<int>(t);
                    s.frame_id = frame_id;
                    s.scanline_id = line;
                    if (options.exclude_shadowed_occupied && s.label == 1 &&
                        s.transmittance < tparams.shadow_threshold)
                        continue;
                    samples.push_back(std::move(s));
                }
            }
            ++frame_id;
        }
    }
    return samples;
}

std::vector<AcousticSample> subsample(const std::vector<AcousticSample>& samples, double fraction,
                                      uint64_t seed) {
    if (fraction <= 0.0 || fraction > 1.0)
        throw std::invalid_argument("subsample: fraction must be in (0,1]");
    if (fraction == 1.0) return samples;

    std::map<int, std::vector<size_t>> by_frame;
    for (size_t i = 0; i < samples.size(); ++i) by_frame[samples[i].frame_id].push_back(i);

    std::vector<size_t> selected;
    for (auto& [frame, indices] : by_frame) {
        Rng rng(mix_seed(seed, static_cast<uint64_t>(frame)));
        rng.shuffle(indices);
        const size_t keep = static_cast<size_t>(
            std::lround(fraction * static_cast<double>(indices.size())));
        indices.resize(std::min(keep, indices.size()));
        std::sort(indices.begin(), indices.end());
        selected.insert(selected.end(), indices.begin(), indices.end());
    }

    std::vector<AcousticSample> out;
    out.reserve(selected.size());
    for (size_t i : selected) out.push_back(samples[i]);
    return out;
}

std::vector<AcousticSample> perturb_labels(const std::vector<AcousticSample>& samples,
                                           double flip_rate, double pose_noise, uint64_t seed) {
    if (flip_rate < 0.0 || flip_rate >= 0.5)
        throw std::invalid_argument("perturb_labels: flip_rate must be in [0, 0.5)");
    if (pose_noise < 0.0) throw std::invalid_argument("perturb_labels: pose_noise must be >= 0");

    // One rigid offset per frame, drawn uniformly in the ball of radius
    // pose_noise.
    std::map<int, Eigen::Vector3d> frame_offset;
    if (pose_noise > 0.0) {
        for (const auto& s : samples) {
            if (frame_offset.count(s.frame_id)) continue;
            Rng rng(mix_seed(mix_seed(seed, 0x706f7365ULL), static_cast<uint64_t>(s.frame_id)));
            Eigen::Vector3d v;
            do {
                v = Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
            } while (v.squaredNorm() > 1.0);
            frame_offset[s.frame_id] = pose_noise * v;
        }
    }

    Rng flip_rng(mix_seed(seed, 0x666c6970ULL));
    std::vector<AcousticSample> out = samples;
    for (auto& s : out) {
        if (flip_rate > 0.0 && flip_rng.uniform() < flip_rate) s.label = 1 - s.label;
        if (pose_noise > 0.0) {
            s.x += frame_offset[s.frame_id];
            s.x = s.x.cwiseMax(0.0).cwiseMin(1.0);
        }
    }
    return out;
}

LossValue occupancy_loss(double prob, int label, double t, double clamp_epsilon, LossKind kind) {
    const double weight = kind == LossKind::PlainBCE ? 1.0 : t;
    const double q = weight * prob;
    const double lo = clamp_epsilon;
    const double hi = 1.0 - clamp_epsilon;
    const double qc = std::clamp(q, lo, hi);
    const bool clamped = q < lo || q > hi;

    LossValue loss;
    if (label == 1) {
        loss.value = -std::log(qc);
        loss.dprob = clamped ? 0.0 : -weight / qc;
    } else {
        loss.value = -std::log(1.0 - qc);
        loss.dprob = clamped ? 0.0 : weight / (1.0 - qc);
    }
    return loss;
}

double learning_rate_at(const TrainConfig& cfg, int step) {
    return cfg.learning_rate * std::pow(cfg.decay_rate, static_cast<double>(step) / cfg.decay_steps);
}

namespace {

struct AdamState {
    std::vector<DenseLayer> m;
    std::vector<DenseLayer> v;
    explicit AdamState(const OccupancyModel& model) {
        auto zeros = make_zero_gradients(model);
        m = zeros.layers;
        v = zeros.layers;
    }
};

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

template <typename T>
void adam_update(T& param, const T& grad, T& m, T& v, double corr1, double corr2, double lr) {
    m.array() = kAdamBeta1 * m.array() + (1.0 - kAdamBeta1) * grad.array();
    v.array() = kAdamBeta2 * v.array() + (1.0 - kAdamBeta2) * grad.array().square();
    param.array() -= lr * (m.array() / corr1) / ((v.array() / corr2).sqrt() + kAdamEps);
}

void adam_step(OccupancyModel& model, const Gradients& grads, AdamState& state, int t, double lr) {
    const double corr1 = 1.0 - std::pow(kAdamBeta1, t);
    const double corr2 = 1.0 - std::pow(kAdamBeta2, t);
    const int trainable = static_cast<int>(model.layers.size()) - model.frozen_suffix;
    for (int i = 0; i < trainable; ++i) {
        adam_update(model.layers[i].weights, grads.layers[i].weights, state.m[i].weights,
                    state.v[i].weights, corr1, corr2, lr);
        adam_update(model.layers[i].bias, grads.layers[i].bias, state.m[i].bias, state.v[i].bias,
                    corr1, corr2, lr);
    }
}

}  // namespace

TrainResult train(const OccupancyModel& model, const std::vector<AcousticSample>& dataset,
                  const TrainConfig& cfg, uint64_t seed) {
    cfg.validate();
    if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");

    TrainResult result;
    result.model = model;

    // Pre-encode every sample once; batches gather columns.
    const size_t n = dataset.size();
    Eigen::MatrixXd raw(model.raw_input_dim, n);
    Eigen::VectorXd labels(n), trans(n);
    for (size_t i = 0; i < n; ++i) {
        const auto& s = dataset[i];
        raw.col(i) = model_raw_input(model, s.x,
                                     Eigen::Vector3d(s.theta.alpha, s.theta.beta, s.theta.phi));
        labels[i] = s.label;
        trans[i] = s.transmittance;
    }
    const Eigen::MatrixXd encoded = encode_batch(raw, model.encoding);

    AdamState adam(result.model);
    Rng rng(seed);
    const int batch = std::min<int>(cfg.batch_size, static_cast<int>(n));

    Eigen::MatrixXd batch_input(encoded.rows(), batch);
    Eigen::RowVectorXd dloss(batch);
    ForwardCache cache;

    for (int step = 0; step < cfg.iterations; ++step) {
        const double lr = learning_rate_at(cfg, step);

        std::vector<size_t> picks(batch);
        for (int b = 0; b < batch; ++b) picks[b] = static_cast<size_t>(rng.index(n));
        for (int b = 0; b < batch; ++b) batch_input.col(b) = encoded.col(picks[b]);

        const Eigen::RowVectorXd prob = forward_batch(result.model, batch_input, &cache);

        double loss_sum = 0.0;
        for (int b = 0; b < batch; ++b) {
            const size_t i = picks[b];
            const LossValue lv = occupancy_loss(prob(b), static_cast<int>(labels[i]), trans[i],
                                                cfg.clamp_epsilon, cfg.loss_kind);
            loss_sum += lv.value;
            dloss(b) = lv.dprob / batch;
        }
        const double mean_loss = loss_sum / batch;
        if (!std::isfinite(mean_loss))
            throw TrainingDiverged("train: non-finite loss at step " + std::to_string(step), step,
                                   lr);

        Gradients grads = make_zero_gradients(result.model);
        backward_batch(result.model, cache, dloss, grads);
        adam_step(result.model, grads, adam, step + 1, lr);

        if (step % cfg.trace_every == 0 || step == cfg.iterations - 1)
            result.trace.push_back({step, mean_loss, lr});
    }
    return result;
}

TrainResult finetune(const OccupancyModel& model, const std::vector<AcousticSample>& new_dataset,
                     const TrainConfig& base_cfg, const FinetuneConfig& ft, uint64_t seed) {
    OccupancyModel frozen = freeze_suffix(model, ft.freeze_last);
    const auto subset = subsample(new_dataset, ft.fraction, seed);
    TrainConfig cfg = base_cfg;
    cfg.iterations = ft.iterations;
    cfg.learning_rate = ft.learning_rate;
    cfg.supervision_fraction = ft.fraction;
    if (ft.iterations == 0) {
        TrainResult result;
        result.model = std::move(frozen);
        return result;
    }
    return train(frozen, subset, cfg, seed);
}

}  // namespace usrecon
