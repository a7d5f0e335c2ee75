#include "usrecon/model_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace usrecon {

namespace {

constexpr char kMagic[8] = {'O', 'C', 'M', 'O', 'D', 'E', 'L', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    write_pod<uint32_t>(out, static_cast<uint32_t>(m.rows()));
    write_pod<uint32_t>(out, static_cast<uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) write_pod<double>(out, m(r, c));
}

Eigen::MatrixXd read_matrix(std::istream& in) {
    const uint32_t rows = read_pod<uint32_t>(in);
    const uint32_t cols = read_pod<uint32_t>(in);
    Eigen::MatrixXd m(rows, cols);
    for (uint32_t r = 0; r < rows; ++r)
        for (uint32_t c = 0; c < cols; ++c) m(r, c) = read_pod<double>(in);
    return m;
}

}  // namespace

void save_model(const std::string& path, const OccupancyModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);

    nlohmann::json header;
    header["input_kind"] =
        model.config.input_kind == InputKind::Coordinates ? "coordinates" : "acoustic";
    header["hidden_layers"] = model.config.hidden_layers;
    header["hidden_width"] = model.config.hidden_width;
    header["skip_at"] = model.config.skip_at;
    header["num_frequencies"] = model.encoding.num_frequencies;
    header["include_input"] = model.encoding.include_input;
    header["raw_input_dim"] = model.raw_input_dim;
    header["frozen_suffix"] = model.frozen_suffix;
    header["input_scale"] =
        std::vector<double>(model.input_scale.data(), model.input_scale.data() + model.input_scale.size());
    const std::string header_str = header.dump();

    out.write(kMagic, sizeof(kMagic));
    write_pod<uint32_t>(out, static_cast<uint32_t>(header_str.size()));
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    write_pod<uint32_t>(out, static_cast<uint32_t>(model.layers.size()));
    for (const auto& layer : model.layers) {
        write_matrix(out, layer.weights);
        write_matrix(out, layer.bias);
    }
    if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

OccupancyModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("load_model: bad magic in " + path);

    const uint32_t header_len = read_pod<uint32_t>(in);
    std::string header_str(header_len, '\0');
    in.read(header_str.data(), header_len);
    const nlohmann::json header = nlohmann::json::parse(header_str);

    OccupancyModel model;
    model.config.input_kind = header.at("input_kind").get<std::string>() == "coordinates"
                                  ? InputKind::Coordinates
                                  : InputKind::AcousticFeatures;
    model.config.hidden_layers = header.at("hidden_layers").get<int>();
    model.config.hidden_width = header.at("hidden_width").get<int>();
    model.config.skip_at = header.at("skip_at").get<int>();
    model.encoding.num_frequencies = header.at("num_frequencies").get<int>();
    model.encoding.include_input = header.at("include_input").get<bool>();
    model.raw_input_dim = header.at("raw_input_dim").get<int>();
    model.frozen_suffix = header.at("frozen_suffix").get<int>();
    const auto scale = header.at("input_scale").get<std::vector<double>>();
    model.input_scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), scale.size());
    model.input_dim = model.encoding.output_dim(model.raw_input_dim);

    const uint32_t n_layers = read_pod<uint32_t>(in);
    model.layers.resize(n_layers);
    for (auto& layer : model.layers) {
        layer.weights = read_matrix(in);
        layer.bias = read_matrix(in);
    }
    if (!in) throw std::runtime_error("load_model: truncated file " + path);
    return model;
}

}  // namespace usrecon
