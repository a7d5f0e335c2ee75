#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "usrecon/config.hpp"
#include "usrecon/mesh_io.hpp"
#include "usrecon/model_io.hpp"
#include "usrecon/pipeline.hpp"

using namespace usrecon;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// small but complete run config for fast end-to-end tests
RunConfig micro_config() {
    RunConfig cfg = desk_preset();
    cfg.seed = 5;
    for (auto& t : cfg.trajectories) {
        t.frames = 3;
        t.scanlines = 8;
        t.samples = 16;
    }
    cfg.trajectories.resize(2);
    cfg.network.hidden_layers = 2;
    cfg.network.hidden_width = 12;
    cfg.network.skip_at = 1;
    cfg.encoding_features = {2, true};
    cfg.encoding_coordinates = {3, true};
    cfg.training.iterations = 40;
    cfg.training.batch_size = 32;
    cfg.extraction.resolution = 16;
    cfg.metrics.samples = 1500;
    cfg.metrics.gt_resolution = 24;
    return cfg;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& sub = "") const {
        return sub.empty() ? path.string() : (path / sub).string();
    }
};

}  // namespace

TEST_CASE("run config JSON round-trips") {
    const RunConfig cfg = desk_preset();
    const auto j = config_to_json(cfg);
    const RunConfig back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("config hash ignores the output directory") {
    RunConfig a = desk_preset();
    RunConfig b = desk_preset();
    b.output_dir = "somewhere/else";
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 99;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("validation names the offending field") {
    RunConfig cfg = micro_config();
    cfg.training.supervision_fraction = 0.0;
    try {
        cfg.validate();
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& err) {
        CHECK(std::string(err.what()).find("supervision_fraction") != std::string::npos);
    }

    RunConfig empty = micro_config();
    empty.trajectories.clear();
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

    RunConfig bad_extent = micro_config();
    bad_extent.trajectories[0].extent.max = bad_extent.trajectories[0].extent.min;
    try {
        bad_extent.validate();
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& err) {
        CHECK(std::string(err.what()).find("extent") != std::string::npos);
    }
}

TEST_CASE("presets validate and differ where intended") {
    for (const char* name : {"desk", "desk-b", "paper-scale"}) {
        const RunConfig cfg = preset_by_name(name);
        CHECK_NOTHROW(cfg.validate());
    }
    CHECK(config_hash(desk_preset()) != config_hash(desk_preset_b()));
    CHECK_THROWS_AS(preset_by_name("nope"), std::invalid_argument);
}

TEST_CASE("simulate writes byte-identical outputs for identical config and seed") {
    const RunConfig cfg = micro_config();
    TempDir dir_a("usrecon_sim_a"), dir_b("usrecon_sim_b");
    cmd_simulate(cfg, dir_a.str());
    cmd_simulate(cfg, dir_b.str());
    CHECK(read_file(dir_a.str("dataset.bin")) == read_file(dir_b.str("dataset.bin")));
    CHECK(read_file(dir_a.str("ground_truth.ply")) == read_file(dir_b.str("ground_truth.ply")));
    CHECK(read_file(dir_a.str("simulate_manifest.json")) ==
          read_file(dir_b.str("simulate_manifest.json")));

    RunConfig other = cfg;
    other.seed = 6;
    TempDir dir_c("usrecon_sim_c");
    cmd_simulate(other, dir_c.str());
    CHECK(read_file(dir_a.str("dataset.bin")) != read_file(dir_c.str("dataset.bin")));
}

TEST_CASE("dataset files round-trip through save/load") {
    const RunConfig cfg = micro_config();
    const auto samples = simulate_samples(cfg);
    TempDir dir("usrecon_ds");
    save_dataset(dir.str("dataset.bin"), samples);
    const auto loaded = load_dataset(dir.str("dataset.bin"));
    REQUIRE(loaded.size() == samples.size());
    for (size_t i = 0; i < samples.size(); i += 97) {
        CHECK((loaded[i].x - samples[i].x).norm() == 0.0);
        CHECK(loaded[i].theta.alpha == samples[i].theta.alpha);
        CHECK(loaded[i].transmittance == samples[i].transmittance);
        CHECK(loaded[i].label == samples[i].label);
        CHECK(loaded[i].frame_id == samples[i].frame_id);
    }
}

TEST_CASE("model checkpoints round-trip") {
    const RunConfig cfg = micro_config();
    const auto model = make_run_model(cfg, InputKind::AcousticFeatures);
    TempDir dir("usrecon_ckpt");
    save_model(dir.str("model.bin"), model);
    const auto loaded = load_model(dir.str("model.bin"));
    CHECK(loaded.config.hidden_layers == model.config.hidden_layers);
    CHECK(loaded.input_dim == model.input_dim);
    REQUIRE(loaded.layers.size() == model.layers.size());
    for (size_t i = 0; i < model.layers.size(); ++i) {
        CHECK((loaded.layers[i].weights.array() == model.layers[i].weights.array()).all());
        CHECK((loaded.layers[i].bias.array() == model.layers[i].bias.array()).all());
    }
}

TEST_CASE("cmd_train with zero iterations checkpoints the initialization") {
    RunConfig cfg = micro_config();
    cfg.training.iterations = 0;
    TempDir dir("usrecon_train0");
    cmd_simulate(cfg, dir.str());
    cmd_train(cfg, dir.str("dataset.bin"), dir.str());
    const auto trained = load_model(dir.str("checkpoint.bin"));
    const auto init = make_run_model(cfg, cfg.network.input_kind);
    for (size_t i = 0; i < init.layers.size(); ++i)
        CHECK((trained.layers[i].weights.array() == init.layers[i].weights.array()).all());

    // trace file exists with just the header
    const std::string trace = read_file(dir.str("loss_trace.csv"));
    CHECK(trace == "step,loss,lr\n");
}

TEST_CASE("cmd_train is byte-deterministic and manifests record supervision") {
    RunConfig cfg = micro_config();
    cfg.training.supervision_fraction = 0.5;
    TempDir dir("usrecon_train_det");
    cmd_simulate(cfg, dir.str());
    TempDir out_a("usrecon_train_a"), out_b("usrecon_train_b");
    cmd_train(cfg, dir.str("dataset.bin"), out_a.str());
    cmd_train(cfg, dir.str("dataset.bin"), out_b.str());
    CHECK(read_file(out_a.str("checkpoint.bin")) == read_file(out_b.str("checkpoint.bin")));
    CHECK(read_file(out_a.str("loss_trace.csv")) == read_file(out_b.str("loss_trace.csv")));

    const auto manifest = nlohmann::json::parse(read_file(out_a.str("train_manifest.json")));
    CHECK(manifest.at("command") == "train");
    CHECK(manifest.at("supervision_fraction").get<double>() == 0.5);
    CHECK(manifest.at("n_samples_used").get<size_t>() <
          manifest.at("n_samples_total").get<size_t>());
    CHECK(manifest.contains("config_hash"));
    CHECK(manifest.at("inputs").contains("dataset"));
}

TEST_CASE("extract and evaluate close the loop on a mesh") {
    RunConfig cfg = micro_config();
    TempDir dir("usrecon_loop");
    cmd_simulate(cfg, dir.str());
    cmd_train(cfg, dir.str("dataset.bin"), dir.str());
    cmd_extract(cfg, dir.str("checkpoint.bin"), dir.str());
    CHECK(fs::exists(dir.str("mesh.ply")));
    CHECK(fs::exists(dir.str("mesh.obj")));

    // a mesh scored against itself is exactly zero
    cmd_evaluate(cfg, dir.str("ground_truth.ply"), dir.str("ground_truth.ply"), dir.str());
    const auto metrics = nlohmann::json::parse(read_file(dir.str("metrics.json")));
    CHECK(metrics.at("cd").get<double>() == 0.0);
    CHECK(metrics.at("hd").get<double>() == 0.0);
    const std::string csv = read_file(dir.str("metrics.csv"));
    CHECK(csv.find("phantom,method,supervision,cd,hd,mad,rmse,seed") == 0);
}

TEST_CASE("evaluate reports missing files with the path") {
    const RunConfig cfg = micro_config();
    TempDir dir("usrecon_missing");
    try {
        cmd_evaluate(cfg, dir.str("nope.ply"), dir.str("nope.ply"), dir.str());
        FAIL("expected an I/O error");
    } catch (const std::runtime_error& err) {
        CHECK(std::string(err.what()).find("nope.ply") != std::string::npos);
    }
}

TEST_CASE("ablate emits the four standard rows over one shared dataset") {
    RunConfig cfg = micro_config();
    cfg.training.iterations = 25;
    TempDir dir("usrecon_ablate");
    cmd_ablate(cfg, dir.str());

    const std::string csv = read_file(dir.str("ablation.csv"));
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "phantom,method,supervision,cd,hd,mad,rmse,seed");
    int rows = 0;
    int acoustic = 0, coords = 0, plain = 0;
    while (std::getline(lines, line)) {
        ++rows;
        if (line.find(",coords,") != std::string::npos) ++coords;
        if (line.find(",acoustic,") != std::string::npos) ++acoustic;
        if (line.find(",acoustic_plain_bce,") != std::string::npos) ++plain;
    }
    CHECK(rows == 4);
    CHECK(coords == 1);
    CHECK(acoustic == 2);  // 10% and 5%
    CHECK(plain == 1);

    const auto manifest = nlohmann::json::parse(read_file(dir.str("ablate_manifest.json")));
    CHECK(manifest.at("dataset_hash") == hash_hex(file_hash(dir.str("dataset.bin"))));

    // reruns reproduce the table byte for byte
    TempDir again("usrecon_ablate2");
    cmd_ablate(cfg, again.str());
    CHECK(read_file(again.str("ablation.csv")) == csv);
}

TEST_CASE("simulated datasets carry all four sweep groups") {
    RunConfig cfg = desk_preset();
    cfg.seed = 3;
    for (auto& t : cfg.trajectories) {
        t.frames = 2;
        t.scanlines = 6;
        t.samples = 12;
    }
    REQUIRE(cfg.trajectories.size() == 4);
    const auto samples = simulate_samples(cfg);
    std::set<int> sweeps;
    for (const auto& s : samples) sweeps.insert(s.sweep);
    CHECK(sweeps == std::set<int>{0, 1, 2, 3});
}

TEST_CASE("the loss kind changes the training trace on an occluded phantom") {
    RunConfig cfg = micro_config();
    cfg.training.iterations = 30;
    const auto samples = simulate_samples(cfg);
    // the occluder plate shadows part of the volume, so compensated and
    // plain losses see different effective supervision
    bool any_shadow = false;
    for (const auto& s : samples) any_shadow = any_shadow || s.transmittance < 0.05;
    CHECK(any_shadow);

    const MethodSpec compensated{"acoustic", InputKind::AcousticFeatures,
                                 LossKind::AttenuationCompensated, 1.0};
    const MethodSpec plain{"acoustic_plain_bce", InputKind::AcousticFeatures, LossKind::PlainBCE,
                           1.0};
    const auto a = train_method(cfg, compensated, samples);
    const auto b = train_method(cfg, plain, samples);
    REQUIRE(a.trace.size() == b.trace.size());
    bool differs = false;
    for (size_t i = 0; i < a.trace.size(); ++i) differs = differs || a.trace[i].loss != b.trace[i].loss;
    CHECK(differs);
}

TEST_CASE("simulate rejects configs without trajectories") {
    RunConfig cfg = micro_config();
    cfg.trajectories.clear();
    TempDir dir("usrecon_noconf");
    CHECK_THROWS_AS(cmd_simulate(cfg, dir.str()), std::invalid_argument);
}

TEST_CASE("PLY writer and reader round-trip meshes and scale info") {
    TriangleMesh mesh;
    mesh.vertices = {{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}, {0.7, 0.8, 0.9}};
    mesh.triangles = {{0, 1, 2}};
    MeshScaleInfo info;
    info.unit_from_mm.scale = 1.0 / 80.0;
    info.unit_from_mm.translation = Eigen::Vector3d(0.1, 0.0, -0.2);
    TempDir dir("usrecon_ply");
    write_ply(dir.str("m.ply"), mesh, info);
    std::optional<MeshScaleInfo> read_info;
    const auto back = read_ply(dir.str("m.ply"), &read_info);
    REQUIRE(back.vertices.size() == 3);
    REQUIRE(back.triangles.size() == 1);
    for (size_t i = 0; i < 3; ++i) CHECK((back.vertices[i] - mesh.vertices[i]).norm() == 0.0);
    REQUIRE(read_info.has_value());
    CHECK(read_info->unit_from_mm.scale == info.unit_from_mm.scale);
    CHECK((read_info->unit_from_mm.translation - info.unit_from_mm.translation).norm() == 0.0);
}
