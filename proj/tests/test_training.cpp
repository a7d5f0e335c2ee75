#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <limits>
#include <set>

#include "usrecon/rng.hpp"
#include "usrecon/training.hpp"

using namespace usrecon;

namespace {

PhantomSpec empty_phantom() {
    PhantomSpec spec;
    spec.tissues = {{"bone", {4.0, 0.5, 0.2}, true}};
    spec.background = {0.0, 0.0, 0.5};
    return spec;
}

PhantomSpec sphere_phantom() {
    PhantomSpec spec = empty_phantom();
    Sphere s;
    s.center = Eigen::Vector3d(0.5, 0.5, 0.5);
    s.radius = 0.2;
    spec.solids.push_back({{s}, 0});
    return spec;
}

// tiny linearly-separable-in-feature-space dataset
std::vector<AcousticSample> toy_dataset() {
    std::vector<AcousticSample> samples;
    Rng rng(5);
    for (int i = 0; i < 400; ++i) {
        AcousticSample s;
        const bool positive = i % 2 == 0;
        s.label = positive ? 1 : 0;
        s.theta.alpha = positive ? 6.0 + rng.normal() * 0.2 : 1.0 + rng.normal() * 0.2;
        s.theta.beta = positive ? 0.8 : 0.1;
        s.theta.phi = 0.5;
        s.transmittance = 1.0;
        s.frame_id = i / 40;
        s.x = Eigen::Vector3d(rng.uniform(), rng.uniform(), rng.uniform());
        samples.push_back(s);
    }
    return samples;
}

OccupancyModel toy_model(uint64_t seed = 3) {
    const Eigen::VectorXd scale = (Eigen::VectorXd(3) << 0.1, 1.0, 1.0).finished();
    return make_model({InputKind::AcousticFeatures, 2, 16, 1}, {2, true}, 3, seed, scale);
}

TrainConfig toy_config(int iterations) {
    TrainConfig cfg;
    cfg.iterations = iterations;
    cfg.batch_size = 64;
    cfg.learning_rate = 3e-3;
    cfg.decay_steps = 1e6;
    cfg.trace_every = 10;
    return cfg;
}

bool models_equal(const OccupancyModel& a, const OccupancyModel& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (size_t i = 0; i < a.layers.size(); ++i) {
        if (!(a.layers[i].weights.array() == b.layers[i].weights.array()).all()) return false;
        if (!(a.layers[i].bias.array() == b.layers[i].bias.array()).all()) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("loss: hand-computed values") {
    // y=0, t=1, p=0.5 -> -log(0.5)
    CHECK(occupancy_loss(0.5, 0, 1.0, 1e-6).value == doctest::Approx(0.693147).epsilon(1e-5));
    // y=1, t=1, p=1-eps -> about zero
    CHECK(occupancy_loss(1.0 - 1e-6, 1, 1.0, 1e-6).value == doctest::Approx(0.0).epsilon(1e-5));
    // y=0, t=0 -> fully occluded empty point contributes about zero
    CHECK(occupancy_loss(0.9, 0, 0.0, 1e-6).value == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("loss: plain BCE equals the compensated loss at t=1, exactly") {
    Rng rng(8);
    for (int i = 0; i < 10000; ++i) {
        const double p = rng.uniform(1e-9, 1.0 - 1e-9);
        const int y = rng.uniform() < 0.5 ? 0 : 1;
        const double t = rng.uniform();
        const auto plain = occupancy_loss(p, y, t, 1e-6, LossKind::PlainBCE);
        const auto compensated = occupancy_loss(p, y, 1.0, 1e-6, LossKind::AttenuationCompensated);
        CHECK(plain.value == compensated.value);
        CHECK(plain.dprob == compensated.dprob);
    }
}

TEST_CASE("loss: occluded empty samples have exactly zero gradient") {
    Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
        const auto lv = occupancy_loss(rng.uniform(1e-6, 1.0 - 1e-6), 0, 0.0, 1e-6);
        CHECK(lv.dprob == 0.0);
    }
}

TEST_CASE("loss: analytic derivative matches finite differences away from clamps") {
    Rng rng(21);
    for (int i = 0; i < 2000; ++i) {
        const double p = rng.uniform(0.05, 0.95);
        const double t = rng.uniform(0.2, 1.0);
        const int y = rng.uniform() < 0.5 ? 0 : 1;
        const double h = 1e-7;
        const auto lv = occupancy_loss(p, y, t, 1e-6);
        const double fd = (occupancy_loss(p + h, y, t, 1e-6).value -
                           occupancy_loss(p - h, y, t, 1e-6).value) /
                          (2.0 * h);
        CHECK(std::abs(lv.dprob - fd) / std::max(std::abs(fd), 1.0) < 1e-5);
    }
}

TEST_CASE("build_dataset: a ray through an empty phantom is all background") {
    const Aabb extent{Eigen::Vector3d(0.4, 0.4, 0.0), Eigen::Vector3d(0.6, 0.6, 1.0)};
    const auto traj = make_trajectory(TrajectoryKind::Row, 1, extent, 1, 32);
    const auto samples = build_dataset({traj}, empty_phantom(), {}, {}, 1);
    REQUIRE(samples.size() == 32);
    for (const auto& s : samples) CHECK(s.label == 0);
}

TEST_CASE("build_dataset: a ray through a sphere labels one contiguous run") {
    const Aabb extent{Eigen::Vector3d(0.45, 0.45, 0.0), Eigen::Vector3d(0.55, 0.55, 1.0)};
    auto traj = make_trajectory(TrajectoryKind::Row, 1, extent, 1, 200);
    traj.frames[0].translation = Eigen::Vector3d(0.5, 0.5, 0.0);  // through the center
    DatasetBuildOptions options;
    options.exclude_shadowed_occupied = false;
    const auto samples = build_dataset({traj}, sphere_phantom(), {}, options, 1);
    REQUIRE(samples.size() == 200);

    // entry/exit at z = 0.3 and 0.7
    int first = -1, last = -1;
    for (int i = 0; i < 200; ++i) {
        if (samples[i].label == 1 && first < 0) first = i;
        if (samples[i].label == 1) last = i;
    }
    REQUIRE(first >= 0);
    for (int i = first; i <= last; ++i) CHECK(samples[i].label == 1);
    CHECK(std::abs(samples[first].depth - 0.3) < 0.01);
    CHECK(std::abs(samples[last].depth - 0.7) < 0.01);
}

TEST_CASE("build_dataset: sample count is frames x scanlines x samples") {
    const auto t1 = make_trajectory(TrajectoryKind::Row, 3, Aabb{}, 4, 5);
    const auto t2 = make_trajectory(TrajectoryKind::Column, 2, Aabb{}, 6, 7);
    const auto samples = build_dataset({t1, t2}, empty_phantom(), {}, {}, 1);
    CHECK(samples.size() == 3 * 4 * 5 + 2 * 6 * 7);

    // frame ids are globally unique, scanline ids local
    std::set<int> frames;
    for (const auto& s : samples) frames.insert(s.frame_id);
    CHECK(frames.size() == 5);
}

TEST_CASE("build_dataset: transmittance is consistent with a recomputed profile") {
    const auto traj = make_trajectory(TrajectoryKind::Row, 2, Aabb{}, 3, 16);
    const auto spec = sphere_phantom();
    TransmittanceParams tparams;
    const uint64_t seed = 77;
    const auto samples = build_dataset({traj}, spec, tparams, {}, seed);
    const AcousticField field = [&](const Eigen::Vector3d& p) {
        return features_at(spec, p, seed);
    };
    for (const auto& s : samples) {
        if (s.frame_id != 0 || s.scanline_id != 1) continue;
        Ray ray;
        ray.origin = Eigen::Vector3d(s.x.x(), s.x.y(), 0.0);
        ray.max_depth = 1.0;
        const auto profile =
            transmittance_along(ray, field, tparams.step, tparams.epsilon, tparams.t0);
        CHECK(std::abs(s.transmittance - transmittance_at(s.depth, profile)) < 1e-6);
    }
}

TEST_CASE("subsample: fraction one returns the input unchanged") {
    const auto samples = toy_dataset();
    const auto out = subsample(samples, 1.0, 5);
    REQUIRE(out.size() == samples.size());
    for (size_t i = 0; i < out.size(); ++i) CHECK((out[i].x - samples[i].x).norm() == 0.0);
}

TEST_CASE("subsample: keeps round(fraction*n) samples per frame") {
    std::vector<AcousticSample> samples(5000);
    for (size_t i = 0; i < samples.size(); ++i) samples[i].frame_id = static_cast<int>(i / 1000);
    const auto out = subsample(samples, 0.1, 3);
    std::map<int, int> per_frame;
    for (const auto& s : out) per_frame[s.frame_id]++;
    REQUIRE(per_frame.size() == 5);
    for (const auto& [frame, count] : per_frame) CHECK(count == 100);
}

TEST_CASE("subsample: different seeds pick different subsets") {
    std::vector<AcousticSample> samples(1000);
    for (size_t i = 0; i < samples.size(); ++i) {
        samples[i].frame_id = 0;
        samples[i].scanline_id = static_cast<int>(i);
    }
    const auto a = subsample(samples, 0.1, 1);
    const auto b = subsample(samples, 0.1, 2);
    std::set<int> ids_a, ids_b;
    for (const auto& s : a) ids_a.insert(s.scanline_id);
    for (const auto& s : b) ids_b.insert(s.scanline_id);
    CHECK(ids_a != ids_b);
    // same seed reproduces the subset
    const auto c = subsample(samples, 0.1, 1);
    std::set<int> ids_c;
    for (const auto& s : c) ids_c.insert(s.scanline_id);
    CHECK(ids_a == ids_c);
}

TEST_CASE("train: zero iterations leaves the model unchanged") {
    const auto model = toy_model();
    const auto result = train(model, toy_dataset(), toy_config(0), 1);
    CHECK(models_equal(model, result.model));
    CHECK(result.trace.empty());
}

TEST_CASE("train: loss decreases on a separable toy problem") {
    const auto result = train(toy_model(), toy_dataset(), toy_config(500), 9);
    REQUIRE(result.trace.size() > 10);
    // compare smoothed start and end
    double early = 0.0, late = 0.0;
    for (int i = 0; i < 5; ++i) early += result.trace[i].loss;
    for (int i = 0; i < 5; ++i) late += result.trace[result.trace.size() - 1 - i].loss;
    CHECK(late < early);
    // after a smoothing window the trace should be close to monotone
    CHECK(result.trace.back().loss < 0.25);
}

TEST_CASE("learning rate schedule hits lr0*decay at decay_steps") {
    TrainConfig cfg;
    cfg.learning_rate = 1e-4;
    cfg.decay_rate = 0.1;
    cfg.decay_steps = 250;
    CHECK(learning_rate_at(cfg, 0) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(learning_rate_at(cfg, 250) == doctest::Approx(1e-5).epsilon(1e-12));
    CHECK(learning_rate_at(cfg, 500) == doctest::Approx(1e-6).epsilon(1e-12));
}

TEST_CASE("train: identical seeds give bit-identical traces") {
    const auto a = train(toy_model(), toy_dataset(), toy_config(60), 4);
    const auto b = train(toy_model(), toy_dataset(), toy_config(60), 4);
    REQUIRE(a.trace.size() == b.trace.size());
    for (size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].loss == b.trace[i].loss);
        CHECK(a.trace[i].lr == b.trace[i].lr);
    }
    CHECK(models_equal(a.model, b.model));
    const auto c = train(toy_model(), toy_dataset(), toy_config(60), 5);
    CHECK(!models_equal(a.model, c.model));
}

TEST_CASE("train: aborts with diagnostics on a non-finite loss") {
    auto samples = toy_dataset();
    samples[0].theta.alpha = std::numeric_limits<double>::quiet_NaN();
    TrainConfig cfg = toy_config(50);
    cfg.batch_size = static_cast<int>(samples.size());
    CHECK_THROWS_AS(train(toy_model(), samples, cfg, 2), TrainingDiverged);
}

TEST_CASE("train: rejects an empty dataset and bad config") {
    CHECK_THROWS_AS(train(toy_model(), {}, toy_config(5), 1), std::invalid_argument);
    TrainConfig bad = toy_config(5);
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(train(toy_model(), toy_dataset(), bad, 1), std::invalid_argument);
}

TEST_CASE("finetune: zero iterations returns a frozen copy of the input") {
    const auto model = toy_model();
    FinetuneConfig ft;
    ft.iterations = 0;
    const auto result = finetune(model, toy_dataset(), toy_config(0), ft, 1);
    CHECK(models_equal(model, result.model));
    CHECK(result.model.frozen_suffix == 2);
}

TEST_CASE("finetune: frozen layers stay put, trainable layers move") {
    const auto model = toy_model();
    FinetuneConfig ft;
    ft.fraction = 0.25;
    ft.iterations = 40;
    ft.learning_rate = 1e-2;
    const auto result = finetune(model, toy_dataset(), toy_config(0), ft, 6);

    const size_t n = model.layers.size();
    REQUIRE(n == 3);  // 2 hidden + head
    for (size_t i = n - 2; i < n; ++i) {
        CHECK((model.layers[i].weights.array() == result.model.layers[i].weights.array()).all());
        CHECK((model.layers[i].bias.array() == result.model.layers[i].bias.array()).all());
    }
    const double delta =
        (model.layers[0].weights - result.model.layers[0].weights).cwiseAbs().maxCoeff();
    CHECK(delta > 0.0);
}

TEST_CASE("freeze everything: updates change nothing") {
    auto model = freeze_suffix(toy_model(), 3);
    const auto result = train(model, toy_dataset(), toy_config(30), 8);
    CHECK(models_equal(model, result.model));
}
