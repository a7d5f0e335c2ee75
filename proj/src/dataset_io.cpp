#include "usrecon/dataset.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace usrecon {

namespace {

constexpr char kMagic[8] = {'U', 'S', 'D', 'S', '0', '0', '0', '1'};

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

}  // namespace

void save_dataset(const std::string& path, const std::vector<AcousticSample>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
    out.write(kMagic, sizeof(kMagic));
    write_pod<uint64_t>(out, samples.size());
    for (const auto& s : samples) {
        write_pod(out, s.x.x());
        write_pod(out, s.x.y());
        write_pod(out, s.x.z());
        write_pod(out, s.theta.alpha);
        write_pod(out, s.theta.beta);
        write_pod(out, s.theta.phi);
        write_pod(out, s.transmittance);
        write_pod(out, s.depth);
        write_pod<int32_t>(out, s.label);
        write_pod<int32_t>(out, s.sweep);
        write_pod<int32_t>(out, s.frame_id);
        write_pod<int32_t>(out, s.scanline_id);
    }
    if (!out) throw std::runtime_error("save_dataset: write failed for " + path);
}

std::vector<AcousticSample> load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("load_dataset: bad magic in " + path);
    const uint64_t count = read_pod<uint64_t>(in);
    std::vector<AcousticSample> samples(count);
    for (auto& s : samples) {
        s.x.x() = read_pod<double>(in);
        s.x.y() = read_pod<double>(in);
        s.x.z() = read_pod<double>(in);
        s.theta.alpha = read_pod<double>(in);
        s.theta.beta = read_pod<double>(in);
        s.theta.phi = read_pod<double>(in);
        s.transmittance = read_pod<double>(in);
        s.depth = read_pod<double>(in);
        s.label = read_pod<int32_t>(in);
        s.sweep = read_pod<int32_t>(in);
        s.frame_id = read_pod<int32_t>(in);
        s.scanline_id = read_pod<int32_t>(in);
    }
    if (!in) throw std::runtime_error("load_dataset: truncated file " + path);
    return samples;
}

}  // namespace usrecon
