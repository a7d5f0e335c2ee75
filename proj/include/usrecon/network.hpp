#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace usrecon {

// NeRF-style sinusoidal encoding: optionally the raw vector, then
// [sin(2^k pi v), cos(2^k pi v)] per component for k = 0..L-1.
struct EncodingConfig {
    int num_frequencies = 6;
    bool include_input = true;

    int output_dim(int input_dim) const {
        return input_dim * ((include_input ? 1 : 0) + 2 * num_frequencies);
    }
};

Eigen::VectorXd encode(const Eigen::VectorXd& v, const EncodingConfig& cfg);
// Columns are samples.
Eigen::MatrixXd encode_batch(const Eigen::MatrixXd& v, const EncodingConfig& cfg);

enum class InputKind { AcousticFeatures, Coordinates };

struct NetworkConfig {
    InputKind input_kind = InputKind::AcousticFeatures;
    int hidden_layers = 8;
    int hidden_width = 128;
    int skip_at = 4;  // hidden layer whose input gets the encoded input concatenated
};

struct DenseLayer {
    Eigen::MatrixXd weights;  // (out x in)
    Eigen::VectorXd bias;
};

// MLP mapping an encoded input to an occupancy probability: hidden affine +
// ReLU stack with a skip concatenation, then a linear head and sigmoid.
struct OccupancyModel {
    NetworkConfig config;
    EncodingConfig encoding;
    Eigen::VectorXd input_scale;       // applied to the raw input before encoding
    int raw_input_dim = 3;
    int input_dim = 0;                 // encoded dimension
    std::vector<DenseLayer> layers;    // hidden layers then the output head
    int frozen_suffix = 0;             // trailing layers excluded from updates
};

// He-style uniform fan-in initialization, zero biases.
OccupancyModel make_model(const NetworkConfig& config, const EncodingConfig& encoding,
                          int raw_input_dim, uint64_t seed,
                          const Eigen::VectorXd& input_scale = Eigen::VectorXd());

// Activations retained by a forward pass for backpropagation.
struct ForwardCache {
    Eigen::MatrixXd encoded;                // network input (encoded_dim x batch)
    std::vector<Eigen::MatrixXd> inputs;    // per-layer input matrices
    std::vector<Eigen::MatrixXd> pre;       // per-layer pre-activations
    Eigen::RowVectorXd prob;                // sigmoid outputs
};

// Forward over a batch of already-encoded inputs; returns probabilities in
// (0,1). Cache is optional and only needed when backward() follows.
Eigen::RowVectorXd forward_batch(const OccupancyModel& model, const Eigen::MatrixXd& encoded,
                                 ForwardCache* cache = nullptr);

double forward(const OccupancyModel& model, const Eigen::VectorXd& encoded);

struct Gradients {
    std::vector<DenseLayer> layers;
};

Gradients make_zero_gradients(const OccupancyModel& model);

// Accumulates d(loss)/d(params) into grads given d(loss)/d(probability) per
// batch column. Gradients are summed over the batch.
void backward_batch(const OccupancyModel& model, const ForwardCache& cache,
                    const Eigen::RowVectorXd& dloss_dprob, Gradients& grads);

// Marks the last n layers as frozen: updates leave them untouched, forward is
// unchanged.
OccupancyModel freeze_suffix(const OccupancyModel& model, int n_layers);

// Raw input for the configured kind (scaled acoustic triple or coordinates).
Eigen::VectorXd model_raw_input(const OccupancyModel& model, const Eigen::Vector3d& position,
                                const Eigen::Vector3d& theta);

}  // namespace usrecon
