#include "usrecon/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "usrecon/rng.hpp"

namespace usrecon {

namespace {

// clamped to the open interval so saturated outputs never round to 0 or 1
double sigmoid(double z) {
    const double s = 1.0 / (1.0 + std::exp(-z));
    return std::clamp(s, std::numeric_limits<double>::min(),
                      1.0 - std::numeric_limits<double>::epsilon() / 2.0);
}

int layer_input_dim(const NetworkConfig& cfg, int encoded_dim, int layer) {
    if (layer == 0) return encoded_dim;
    if (layer == cfg.skip_at) return cfg.hidden_width + encoded_dim;
    return cfg.hidden_width;
}

}  // namespace

Eigen::VectorXd encode(const Eigen::VectorXd& v, const EncodingConfig& cfg) {
    Eigen::VectorXd out(cfg.output_dim(static_cast<int>(v.size())));
    int at = 0;
    if (cfg.include_input) {
        out.head(v.size()) = v;
        at += static_cast<int>(v.size());
    }
    for (int k = 0; k < cfg.num_frequencies; ++k) {
        const double freq = std::ldexp(M_PI, k);  // 2^k * pi
        for (int i = 0; i < v.size(); ++i) out[at++] = std::sin(freq * v[i]);
        for (int i = 0; i < v.size(); ++i) out[at++] = std::cos(freq * v[i]);
    }
    return out;
}

Eigen::MatrixXd encode_batch(const Eigen::MatrixXd& v, const EncodingConfig& cfg) {
    const int d = static_cast<int>(v.rows());
    Eigen::MatrixXd out(cfg.output_dim(d), v.cols());
    int at = 0;
    if (cfg.include_input) {
        out.topRows(d) = v;
        at += d;
    }
    for (int k = 0; k < cfg.num_frequencies; ++k) {
        const double freq = std::ldexp(M_PI, k);
        out.middleRows(at, d) = (freq * v.array()).sin();
        out.middleRows(at + d, d) = (freq * v.array()).cos();
        at += 2 * d;
    }
    return out;
}

OccupancyModel make_model(const NetworkConfig& config, const EncodingConfig& encoding,
                          int raw_input_dim, uint64_t seed, const Eigen::VectorXd& input_scale) {
    if (config.hidden_layers < 1 || config.hidden_width < 1)
        throw std::invalid_argument("make_model: layer counts and widths must be positive");
    if (config.skip_at < 0 || config.skip_at >= config.hidden_layers)
        throw std::invalid_argument("make_model: skip_at must be < hidden_layers");

    OccupancyModel model;
    model.config = config;
    model.encoding = encoding;
    model.raw_input_dim = raw_input_dim;
    model.input_dim = encoding.output_dim(raw_input_dim);
    model.input_scale =
        input_scale.size() == 0 ? Eigen::VectorXd::Ones(raw_input_dim) : input_scale;
    if (model.input_scale.size() != raw_input_dim)
        throw std::invalid_argument("make_model: input_scale dimension mismatch");

    Rng rng(seed);
    auto init_layer = [&](int in_dim, int out_dim) {
        DenseLayer layer;
        const double limit = std::sqrt(6.0 / in_dim);
        layer.weights.resize(out_dim, in_dim);
        for (int r = 0; r < out_dim; ++r)
            for (int c = 0; c < in_dim; ++c) layer.weights(r, c) = rng.uniform(-limit, limit);
        layer.bias = Eigen::VectorXd::Zero(out_dim);
        return layer;
    };

    for (int i = 0; i < config.hidden_layers; ++i)
        model.layers.push_back(
            init_layer(layer_input_dim(config, model.input_dim, i), config.hidden_width));
    model.layers.push_back(init_layer(config.hidden_width, 1));
    return model;
}

Eigen::RowVectorXd forward_batch(const OccupancyModel& model, const Eigen::MatrixXd& encoded,
                                 ForwardCache* cache) {
    if (encoded.rows() != model.input_dim)
        throw std::invalid_argument("forward_batch: input dim does not match encoded dim");

    const int hidden = model.config.hidden_layers;
    if (cache) {
        cache->encoded = encoded;
        cache->inputs.assign(model.layers.size(), {});
        cache->pre.assign(model.layers.size(), {});
    }

    Eigen::MatrixXd h = encoded;
    for (int i = 0; i < hidden; ++i) {
        Eigen::MatrixXd input;
        if (i == model.config.skip_at && i > 0) {
            input.resize(h.rows() + encoded.rows(), h.cols());
            input.topRows(h.rows()) = h;
            input.bottomRows(encoded.rows()) = encoded;
        } else {
            input = h;
        }
        Eigen::MatrixXd z =
            (model.layers[i].weights * input).colwise() + model.layers[i].bias;
        if (cache) {
            cache->inputs[i] = std::move(input);
            cache->pre[i] = z;
        }
        h = z.cwiseMax(0.0);
    }

    const auto& head = model.layers[hidden];
    Eigen::RowVectorXd z_out = (head.weights * h).colwise() + head.bias;
    Eigen::RowVectorXd prob = z_out.unaryExpr([](double z) { return sigmoid(z); });
    if (cache) {
        cache->inputs[hidden] = std::move(h);
        cache->pre[hidden] = z_out;
        cache->prob = prob;
    }
    return prob;
}

double forward(const OccupancyModel& model, const Eigen::VectorXd& encoded) {
    return forward_batch(model, encoded)(0);
}

Gradients make_zero_gradients(const OccupancyModel& model) {
    Gradients grads;
    grads.layers.reserve(model.layers.size());
    for (const auto& layer : model.layers) {
        DenseLayer g;
        g.weights = Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols());
        g.bias = Eigen::VectorXd::Zero(layer.bias.size());
        grads.layers.push_back(std::move(g));
    }
    return grads;
}

void backward_batch(const OccupancyModel& model, const ForwardCache& cache,
                    const Eigen::RowVectorXd& dloss_dprob, Gradients& grads) {
    const int hidden = model.config.hidden_layers;
    const int head = hidden;

    // d(loss)/d(z_out) through the sigmoid
    Eigen::RowVectorXd dz =
        dloss_dprob.cwiseProduct(cache.prob.cwiseProduct(Eigen::RowVectorXd::Ones(cache.prob.size()) - cache.prob));

    grads.layers[head].weights.noalias() += dz * cache.inputs[head].transpose();
    grads.layers[head].bias(0) += dz.sum();

    Eigen::MatrixXd dh = model.layers[head].weights.transpose() * dz;

    for (int i = hidden - 1; i >= 0; --i) {
        Eigen::MatrixXd dzi =
            dh.cwiseProduct(cache.pre[i].unaryExpr([](double z) { return z > 0.0 ? 1.0 : 0.0; }));
        grads.layers[i].weights.noalias() += dzi * cache.inputs[i].transpose();
        grads.layers[i].bias.noalias() += dzi.rowwise().sum();
        if (i == 0) break;
        Eigen::MatrixXd din = model.layers[i].weights.transpose() * dzi;
        if (i == model.config.skip_at) {
            dh = din.topRows(model.config.hidden_width);  // encoded-input rows carry no params
        } else {
            dh = std::move(din);
        }
    }
}

OccupancyModel freeze_suffix(const OccupancyModel& model, int n_layers) {
    if (n_layers < 0 || n_layers > static_cast<int>(model.layers.size()))
        throw std::invalid_argument("freeze_suffix: n_layers out of range");
    OccupancyModel frozen = model;
    frozen.frozen_suffix = n_layers;
    return frozen;
}

Eigen::VectorXd model_raw_input(const OccupancyModel& model, const Eigen::Vector3d& position,
                                const Eigen::Vector3d& theta) {
    Eigen::VectorXd raw =
        model.config.input_kind == InputKind::Coordinates ? position : theta;
    return raw.cwiseProduct(model.input_scale);
}

}  // namespace usrecon
