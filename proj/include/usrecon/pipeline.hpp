#pragma once

#include <string>
#include <vector>

#include "usrecon/config.hpp"
#include "usrecon/dataset.hpp"
#include "usrecon/extraction.hpp"
#include "usrecon/metrics.hpp"
#include "usrecon/network.hpp"
#include "usrecon/training.hpp"

namespace usrecon {

inline constexpr const char* kToolVersion = "0.1.0";

// Sub-seed salts; every stochastic stage draws from its own stream derived
// from the run seed.
enum class SeedSalt : uint64_t {
    Features = 0x66656174,
    Perturb = 0x70657274,
    ModelInit = 0x696e6974,
    Train = 0x7472616e,
    Subsample = 0x73756273,
    Metrics = 0x6d657472,
};

uint64_t run_seed(const RunConfig& cfg, SeedSalt salt);

// A method row of the comparison table: network input, loss and supervision.
struct MethodSpec {
    std::string name;
    InputKind input = InputKind::AcousticFeatures;
    LossKind loss = LossKind::AttenuationCompensated;
    double supervision_fraction = 0.1;
};

// The four standard rows: coordinate network on dense labels, the acoustic
// network on 10% and 5%, and the acoustic network without attenuation
// compensation on 10%.
std::vector<MethodSpec> ablation_methods();

// ---- In-memory pipeline stages ----

std::vector<ScanTrajectory> make_trajectories(const RunConfig& cfg);

// Dataset per the config: scan, transmittance, shadow filtering, label and
// pose perturbation.
std::vector<AcousticSample> simulate_samples(const RunConfig& cfg);

TriangleMesh ground_truth_mesh(const PhantomSpec& phantom, int resolution);

OccupancyModel make_run_model(const RunConfig& cfg, InputKind input);

// Subsample + train one method on a prepared dataset.
TrainResult train_method(const RunConfig& cfg, const MethodSpec& method,
                         const std::vector<AcousticSample>& samples);

// Sample the model over the unit cube (the acoustic field comes from the
// config's phantom), smooth, run marching cubes at iso 0.
TriangleMesh extract_mesh(const RunConfig& cfg, const OccupancyModel& model);

// Area-weighted samples of both meshes, nearest-neighbor metrics, in cube
// units.
MetricsReport evaluate_meshes(const RunConfig& cfg, const TriangleMesh& pred,
                              const TriangleMesh& gt);

struct AblationRow {
    std::string method;
    double supervision = 0.0;
    MetricsReport metrics;  // cube units
};

std::vector<AblationRow> run_ablation(const RunConfig& cfg,
                                      const std::vector<MethodSpec>& methods,
                                      const std::vector<AcousticSample>& samples,
                                      const TriangleMesh& gt_mesh);

// ---- File-level commands (CLI verbs) ----

// Each command writes its outputs plus a manifest (config hash, seed, tool
// version, input hashes, outputs) into out_dir and returns the manifest path.
std::string cmd_simulate(const RunConfig& cfg, const std::string& out_dir);
std::string cmd_train(const RunConfig& cfg, const std::string& dataset_path,
                      const std::string& out_dir);
std::string cmd_finetune(const RunConfig& cfg, const std::string& checkpoint_path,
                         const std::string& dataset_path, const std::string& out_dir);
std::string cmd_extract(const RunConfig& cfg, const std::string& checkpoint_path,
                        const std::string& out_dir);
std::string cmd_evaluate(const RunConfig& cfg, const std::string& mesh_path,
                         const std::string& gt_mesh_path, const std::string& out_dir);
std::string cmd_ablate(const RunConfig& cfg, const std::string& out_dir);

}  // namespace usrecon
