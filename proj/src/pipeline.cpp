#include "usrecon/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "usrecon/mesh_io.hpp"
#include "usrecon/model_io.hpp"
#include "usrecon/rng.hpp"

namespace usrecon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_manifest(const std::string& path, const RunConfig& cfg, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& inputs,
                    const std::vector<std::string>& outputs, const json& extra = json::object()) {
    json m;
    m["command"] = command;
    m["tool_version"] = kToolVersion;
    m["config_hash"] = hash_hex(config_hash(cfg));
    m["seed"] = cfg.seed;
    json in = json::object();
    for (const auto& [name, hash] : inputs) in[name] = hash;
    m["inputs"] = in;
    m["outputs"] = outputs;  // relative names; manifests stay location-independent
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
    out << m.dump(2) << "\n";
}

void write_loss_trace(const std::string& path, const std::vector<TraceEntry>& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_loss_trace: cannot open " + path);
    out << "step,loss,lr\n";
    for (const auto& entry : trace)
        out << entry.step << "," << fmt(entry.loss) << "," << fmt(entry.lr) << "\n";
}

double to_report_units(const RunConfig& cfg, double cube_value) {
    return cfg.scale_mm > 0.0 ? cube_value * cfg.scale_mm : cube_value;
}

json metrics_to_json(const RunConfig& cfg, const MetricsReport& m) {
    json j;
    j["cd"] = to_report_units(cfg, m.cd);
    j["hd"] = to_report_units(cfg, m.hd);
    j["mad"] = to_report_units(cfg, m.mad);
    j["rmse"] = to_report_units(cfg, m.rmse);
    j["units"] = cfg.scale_mm > 0.0 ? "mm" : "cube";
    j["n_points"] = m.n_points;
    j["seed"] = m.seed;
    return j;
}

void write_metrics_csv(std::ostream& out, const RunConfig& cfg, const std::string& method,
                       double supervision, const MetricsReport& m) {
    out << cfg.phantom_id << "," << method << "," << fmt(supervision) << ","
        << fmt(to_report_units(cfg, m.cd)) << "," << fmt(to_report_units(cfg, m.hd)) << ","
        << fmt(to_report_units(cfg, m.mad)) << "," << fmt(to_report_units(cfg, m.rmse)) << ","
        << m.seed << "\n";
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir);
}

constexpr const char* kMetricsCsvHeader = "phantom,method,supervision,cd,hd,mad,rmse,seed\n";

}  // namespace

uint64_t run_seed(const RunConfig& cfg, SeedSalt salt) {
    return mix_seed(cfg.seed, static_cast<uint64_t>(salt));
}

std::vector<MethodSpec> ablation_methods() {
    return {
        {"coords", InputKind::Coordinates, LossKind::AttenuationCompensated, 1.0},
        {"acoustic", InputKind::AcousticFeatures, LossKind::AttenuationCompensated, 0.10},
        {"acoustic", InputKind::AcousticFeatures, LossKind::AttenuationCompensated, 0.05},
        {"acoustic_plain_bce", InputKind::AcousticFeatures, LossKind::PlainBCE, 0.10},
    };
}

std::vector<ScanTrajectory> make_trajectories(const RunConfig& cfg) {
    std::vector<ScanTrajectory> trajectories;
    trajectories.reserve(cfg.trajectories.size());
    for (const auto& t : cfg.trajectories)
        trajectories.push_back(
            make_trajectory(t.kind, t.frames, t.extent, t.scanlines, t.samples));
    return trajectories;
}

std::vector<AcousticSample> simulate_samples(const RunConfig& cfg) {
    cfg.validate();
    const auto trajectories = make_trajectories(cfg);
    auto samples = build_dataset(trajectories, cfg.phantom, cfg.transmittance, cfg.dataset,
                                 run_seed(cfg, SeedSalt::Features));
    if (cfg.perturbation.flip_rate > 0.0 || cfg.perturbation.pose_noise > 0.0)
        samples = perturb_labels(samples, cfg.perturbation.flip_rate, cfg.perturbation.pose_noise,
                                 run_seed(cfg, SeedSalt::Perturb));
    return samples;
}

TriangleMesh ground_truth_mesh(const PhantomSpec& phantom, int resolution) {
    phantom.validate();
    // Positive-inside field from the exact signed distance, so marching cubes
    // lands on the analytic surface.
    const auto grid = sample_scalar_grid(
        [&](const Eigen::Vector3d& p) { return -occupied_signed_distance(phantom, p); },
        {resolution, resolution, resolution});
    return marching_cubes(grid, 0.0);
}

OccupancyModel make_run_model(const RunConfig& cfg, InputKind input) {
    NetworkConfig net = cfg.network;
    net.input_kind = input;
    const EncodingConfig enc =
        input == InputKind::Coordinates ? cfg.encoding_coordinates : cfg.encoding_features;
    const Eigen::VectorXd scale = input == InputKind::Coordinates
                                      ? Eigen::VectorXd::Ones(3)
                                      : Eigen::VectorXd(cfg.feature_scale);
    return make_model(net, enc, 3, run_seed(cfg, SeedSalt::ModelInit), scale);
}

TrainResult train_method(const RunConfig& cfg, const MethodSpec& method,
                         const std::vector<AcousticSample>& samples) {
    TrainConfig tc = cfg.training;
    tc.loss_kind = method.loss;
    tc.supervision_fraction = method.supervision_fraction;

    const auto subset = method.supervision_fraction < 1.0
                            ? subsample(samples, method.supervision_fraction,
                                        run_seed(cfg, SeedSalt::Subsample))
                            : samples;
    const OccupancyModel model = make_run_model(cfg, method.input);
    return train(model, subset, tc, run_seed(cfg, SeedSalt::Train));
}

TriangleMesh extract_mesh(const RunConfig& cfg, const OccupancyModel& model) {
    const uint64_t feature_seed = run_seed(cfg, SeedSalt::Features);
    InputField input_field;
    if (model.config.input_kind == InputKind::Coordinates) {
        input_field = [](const Eigen::Vector3d& p) { return p; };
    } else {
        const PhantomSpec phantom = cfg.phantom;
        input_field = [phantom, feature_seed](const Eigen::Vector3d& p) {
            const AcousticProperties props = features_at(phantom, p, feature_seed);
            return Eigen::Vector3d(props.alpha, props.beta, props.phi);
        };
    }
    const int res = cfg.extraction.resolution;
    OccupancyGrid grid = sample_grid(model, input_field, {res, res, res});
    grid = smooth(grid, cfg.extraction.smooth_sigma, cfg.extraction.smooth_radius);
    return marching_cubes(grid, 0.0);
}

MetricsReport evaluate_meshes(const RunConfig& cfg, const TriangleMesh& pred,
                              const TriangleMesh& gt) {
    const uint64_t seed = run_seed(cfg, SeedSalt::Metrics);
    const auto pred_points = sample_surface(pred, cfg.metrics.samples, seed);
    const auto gt_points = sample_surface(gt, cfg.metrics.samples, seed);
    MetricsReport report = compute_metrics(pred_points, gt_points);
    report.seed = cfg.seed;
    return report;
}

std::vector<AblationRow> run_ablation(const RunConfig& cfg,
                                      const std::vector<MethodSpec>& methods,
                                      const std::vector<AcousticSample>& samples,
                                      const TriangleMesh& gt_mesh) {
    std::vector<AblationRow> rows;
    for (const auto& method : methods) {
        const TrainResult trained = train_method(cfg, method, samples);
        const TriangleMesh mesh = extract_mesh(cfg, trained.model);
        AblationRow row;
        row.method = method.name;
        row.supervision = method.supervision_fraction;
        if (mesh.empty()) {
            // An empty reconstruction scores as unbounded error rather than
            // crashing the sweep.
            row.metrics.cd = row.metrics.hd = row.metrics.mad = row.metrics.rmse =
                std::numeric_limits<double>::infinity();
            row.metrics.seed = cfg.seed;
        } else {
            row.metrics = evaluate_meshes(cfg, mesh, gt_mesh);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    ensure_dir(out_dir);

    const auto samples = simulate_samples(cfg);
    const auto gt = ground_truth_mesh(cfg.phantom, cfg.metrics.gt_resolution);

    const std::string dataset_path = out_dir + "/dataset.bin";
    const std::string mesh_path = out_dir + "/ground_truth.ply";
    save_dataset(dataset_path, samples);
    MeshScaleInfo scale;
    scale.unit_from_mm.scale = cfg.scale_mm > 0.0 ? 1.0 / cfg.scale_mm : 1.0;
    write_ply(mesh_path, gt, cfg.scale_mm > 0.0 ? std::optional<MeshScaleInfo>(scale) : std::nullopt);

    json extra;
    extra["n_samples"] = samples.size();
    extra["dataset_hash"] = hash_hex(file_hash(dataset_path));
    const std::string manifest = out_dir + "/simulate_manifest.json";
    write_manifest(manifest, cfg, "simulate", {}, {"dataset.bin", "ground_truth.ply"}, extra);
    return manifest;
}

std::string cmd_train(const RunConfig& cfg, const std::string& dataset_path,
                      const std::string& out_dir) {
    cfg.validate();
    ensure_dir(out_dir);

    const auto samples = load_dataset(dataset_path);
    MethodSpec method;
    method.input = cfg.network.input_kind;
    method.loss = cfg.training.loss_kind;
    method.supervision_fraction = cfg.training.supervision_fraction;
    method.name = cfg.network.input_kind == InputKind::Coordinates ? "coords" : "acoustic";

    const std::string checkpoint_path = out_dir + "/checkpoint.bin";
    const std::string trace_path = out_dir + "/loss_trace.csv";

    size_t used = samples.size();
    try {
        const TrainResult result = train_method(cfg, method, samples);
        if (method.supervision_fraction < 1.0)
            used = subsample(samples, method.supervision_fraction,
                             run_seed(cfg, SeedSalt::Subsample))
                       .size();
        save_model(checkpoint_path, result.model);
        write_loss_trace(trace_path, result.trace);
    } catch (const TrainingDiverged& diverged) {
        json dump;
        dump["error"] = diverged.what();
        dump["step"] = diverged.step;
        dump["lr"] = diverged.lr;
        std::ofstream out(out_dir + "/diverged_state.json");
        out << dump.dump(2) << "\n";
        throw;
    }

    json extra;
    extra["n_samples_total"] = samples.size();
    extra["n_samples_used"] = used;
    extra["supervision_fraction"] = method.supervision_fraction;
    const std::string manifest = out_dir + "/train_manifest.json";
    write_manifest(manifest, cfg, "train",
                   {{"dataset", hash_hex(file_hash(dataset_path))}},
                   {"checkpoint.bin", "loss_trace.csv"}, extra);
    return manifest;
}

std::string cmd_finetune(const RunConfig& cfg, const std::string& checkpoint_path,
                         const std::string& dataset_path, const std::string& out_dir) {
    cfg.validate();
    ensure_dir(out_dir);

    const OccupancyModel model = load_model(checkpoint_path);
    const auto samples = load_dataset(dataset_path);
    const TrainResult result =
        finetune(model, samples, cfg.training, cfg.finetune, run_seed(cfg, SeedSalt::Train));

    const std::string out_path = out_dir + "/checkpoint_finetuned.bin";
    save_model(out_path, result.model);
    write_loss_trace(out_dir + "/loss_trace.csv", result.trace);

    json extra;
    extra["fraction"] = cfg.finetune.fraction;
    extra["iterations"] = cfg.finetune.iterations;
    extra["frozen_layers"] = cfg.finetune.freeze_last;
    const std::string manifest = out_dir + "/finetune_manifest.json";
    write_manifest(manifest, cfg, "finetune",
                   {{"checkpoint", hash_hex(file_hash(checkpoint_path))},
                    {"dataset", hash_hex(file_hash(dataset_path))}},
                   {"checkpoint_finetuned.bin", "loss_trace.csv"}, extra);
    return manifest;
}

std::string cmd_extract(const RunConfig& cfg, const std::string& checkpoint_path,
                        const std::string& out_dir) {
    cfg.validate();
    ensure_dir(out_dir);

    const OccupancyModel model = load_model(checkpoint_path);
    const TriangleMesh mesh = extract_mesh(cfg, model);

    std::optional<MeshScaleInfo> scale;
    if (cfg.scale_mm > 0.0) {
        MeshScaleInfo info;
        info.unit_from_mm.scale = 1.0 / cfg.scale_mm;
        scale = info;
    }
    write_ply(out_dir + "/mesh.ply", mesh, scale);
    write_obj(out_dir + "/mesh.obj", mesh, scale);

    json extra;
    extra["n_vertices"] = mesh.vertices.size();
    extra["n_triangles"] = mesh.triangles.size();
    const std::string manifest = out_dir + "/extract_manifest.json";
    write_manifest(manifest, cfg, "extract",
                   {{"checkpoint", hash_hex(file_hash(checkpoint_path))}},
                   {"mesh.ply", "mesh.obj"}, extra);
    return manifest;
}

std::string cmd_evaluate(const RunConfig& cfg, const std::string& mesh_path,
                         const std::string& gt_mesh_path, const std::string& out_dir) {
    cfg.validate();
    ensure_dir(out_dir);

    const TriangleMesh pred = read_ply(mesh_path);
    const TriangleMesh gt = read_ply(gt_mesh_path);
    const MetricsReport report = evaluate_meshes(cfg, pred, gt);

    {
        std::ofstream out(out_dir + "/metrics.json");
        out << metrics_to_json(cfg, report).dump(2) << "\n";
    }
    {
        std::ofstream out(out_dir + "/metrics.csv");
        out << kMetricsCsvHeader;
        const std::string method =
            cfg.network.input_kind == InputKind::Coordinates ? "coords" : "acoustic";
        write_metrics_csv(out, cfg, method, cfg.training.supervision_fraction, report);
    }

    const std::string manifest = out_dir + "/evaluate_manifest.json";
    write_manifest(manifest, cfg, "evaluate",
                   {{"mesh", hash_hex(file_hash(mesh_path))},
                    {"gt_mesh", hash_hex(file_hash(gt_mesh_path))}},
                   {"metrics.json", "metrics.csv"});
    return manifest;
}

std::string cmd_ablate(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    ensure_dir(out_dir);

    const auto samples = simulate_samples(cfg);
    const std::string dataset_path = out_dir + "/dataset.bin";
    save_dataset(dataset_path, samples);
    const auto gt = ground_truth_mesh(cfg.phantom, cfg.metrics.gt_resolution);

    const auto rows = run_ablation(cfg, ablation_methods(), samples, gt);

    const std::string csv_path = out_dir + "/ablation.csv";
    {
        std::ofstream out(csv_path);
        out << kMetricsCsvHeader;
        for (const auto& row : rows)
            write_metrics_csv(out, cfg, row.method, row.supervision, row.metrics);
    }

    json extra;
    extra["dataset_hash"] = hash_hex(file_hash(dataset_path));
    extra["n_samples"] = samples.size();
    const std::string manifest = out_dir + "/ablate_manifest.json";
    write_manifest(manifest, cfg, "ablate", {}, {"dataset.bin", "ablation.csv"}, extra);
    return manifest;
}

}  // namespace usrecon
