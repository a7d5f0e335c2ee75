#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "usrecon/config.hpp"
#include "usrecon/pipeline.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out_dir = "runs/out";
    int64_t seed = -1;
    int64_t iterations = -1;
    double supervision = -1.0;
    std::string loss;
    std::string input;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "run-config JSON file");
    cmd->add_option("--preset", opts.preset, "built-in preset: desk|desk-b|paper-scale");
    cmd->add_option("-o,--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "override the global seed");
    cmd->add_option("--iterations", opts.iterations, "override training.iterations");
    cmd->add_option("--supervision", opts.supervision, "override training.supervision_fraction");
    cmd->add_option("--loss", opts.loss, "override training.loss: attenuation_compensated|plain_bce");
    cmd->add_option("--input", opts.input, "override network.input: acoustic|coordinates");
}

usrecon::RunConfig resolve_config(const CommonOpts& opts) {
    usrecon::RunConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = usrecon::load_config(opts.config_path);
    } else if (!opts.preset.empty()) {
        cfg = usrecon::preset_by_name(opts.preset);
    } else {
        throw std::invalid_argument("either --config or --preset is required");
    }
    if (opts.seed >= 0) cfg.seed = static_cast<uint64_t>(opts.seed);
    if (opts.iterations >= 0) cfg.training.iterations = static_cast<int>(opts.iterations);
    if (opts.supervision > 0.0) cfg.training.supervision_fraction = opts.supervision;
    if (!opts.loss.empty()) {
        if (opts.loss == "plain_bce") {
            cfg.training.loss_kind = usrecon::LossKind::PlainBCE;
        } else if (opts.loss == "attenuation_compensated") {
            cfg.training.loss_kind = usrecon::LossKind::AttenuationCompensated;
        } else {
            throw std::invalid_argument("--loss must be attenuation_compensated|plain_bce");
        }
    }
    if (!opts.input.empty()) {
        if (opts.input == "acoustic") {
            cfg.network.input_kind = usrecon::InputKind::AcousticFeatures;
        } else if (opts.input == "coordinates") {
            cfg.network.input_kind = usrecon::InputKind::Coordinates;
        } else {
            throw std::invalid_argument("--input must be acoustic|coordinates");
        }
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"surface reconstruction from simulated multiview ultrasound sweeps"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* simulate = app.add_subcommand("simulate", "build the sample dataset and ground-truth mesh");
    add_common(simulate, opts);

    auto* train = app.add_subcommand("train", "optimize the occupancy network on a dataset");
    add_common(train, opts);
    std::string dataset_path;
    train->add_option("--dataset", dataset_path, "dataset.bin from simulate")->required();

    auto* finetune = app.add_subcommand("finetune", "adapt a checkpoint to a new volume");
    add_common(finetune, opts);
    std::string checkpoint_path;
    finetune->add_option("--checkpoint", checkpoint_path, "pretrained checkpoint")->required();
    finetune->add_option("--dataset", dataset_path, "dataset.bin of the new volume")->required();

    auto* extract = app.add_subcommand("extract", "sample the model and extract a mesh");
    add_common(extract, opts);
    extract->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();

    auto* evaluate = app.add_subcommand("evaluate", "score a mesh against a ground-truth mesh");
    add_common(evaluate, opts);
    std::string mesh_path, gt_path;
    evaluate->add_option("--mesh", mesh_path, "reconstructed mesh (PLY)")->required();
    evaluate->add_option("--gt", gt_path, "ground-truth mesh (PLY)")->required();

    auto* ablate = app.add_subcommand("ablate", "run the standard method comparison table");
    add_common(ablate, opts);

    auto* dump = app.add_subcommand("dump-config", "write a preset config as JSON");
    add_common(dump, opts);
    std::string dump_path = "config.json";
    dump->add_option("--file", dump_path, "destination file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dump->parsed()) {
            const auto cfg = resolve_config(opts);
            usrecon::save_config(dump_path, cfg);
            std::cout << "wrote " << dump_path << "\n";
            return 0;
        }
        const auto cfg = resolve_config(opts);
        std::string manifest;
        if (simulate->parsed()) {
            manifest = usrecon::cmd_simulate(cfg, opts.out_dir);
        } else if (train->parsed()) {
            manifest = usrecon::cmd_train(cfg, dataset_path, opts.out_dir);
        } else if (finetune->parsed()) {
            manifest = usrecon::cmd_finetune(cfg, checkpoint_path, dataset_path, opts.out_dir);
        } else if (extract->parsed()) {
            manifest = usrecon::cmd_extract(cfg, checkpoint_path, opts.out_dir);
        } else if (evaluate->parsed()) {
            manifest = usrecon::cmd_evaluate(cfg, mesh_path, gt_path, opts.out_dir);
        } else if (ablate->parsed()) {
            manifest = usrecon::cmd_ablate(cfg, opts.out_dir);
        }
        std::cout << "manifest: " << manifest << "\n";
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
