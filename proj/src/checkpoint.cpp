#include "pmp/checkpoint.hpp"

#include <bit>
#include <cstring>

namespace pmp {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian; big-endian hosts are unsupported");

namespace {

constexpr char kMagic[8] = {'P', 'M', 'P', 'C', 'K', 'P', 'T', '\x01'};

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw Error(ErrCode::Io, path + ": truncated checkpoint");
    return v;
}

}  // namespace

CheckpointWriter::CheckpointWriter(const std::string& path, CheckpointKind kind)
    : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw Error(ErrCode::Io, "cannot write checkpoint " + path);
    out_.write(kMagic, sizeof(kMagic));
    write_raw(out_, static_cast<uint32_t>(kind));
}

void CheckpointWriter::add(const std::string& name, const std::vector<int>& shape,
                           const std::vector<double>& values) {
    size_t expected = 1;
    for (int d : shape) expected *= size_t(d);
    if (expected != values.size())
        throw Error(ErrCode::Shape, "checkpoint tensor " + name + " shape/value mismatch");
    write_raw(out_, uint32_t(name.size()));
    out_.write(name.data(), std::streamsize(name.size()));
    write_raw(out_, uint32_t(shape.size()));
    for (int d : shape) write_raw(out_, int32_t(d));
    out_.write(reinterpret_cast<const char*>(values.data()),
               std::streamsize(values.size() * sizeof(double)));
}

void CheckpointWriter::finish() {
    if (finished_) return;
    write_raw(out_, uint32_t(0));
    out_.flush();
    if (!out_) throw Error(ErrCode::Io, "failed writing checkpoint " + path_);
    finished_ = true;
}

CheckpointReader::CheckpointReader(const std::string& path, CheckpointKind expected_kind)
    : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw Error(ErrCode::Dependency, "missing checkpoint file " + path);
    char magic[8];
    in_.read(magic, sizeof(magic));
    if (!in_ || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error(ErrCode::Io, path + ": not a checkpoint file");
    const auto kind = read_raw<uint32_t>(in_, path_);
    if (kind != static_cast<uint32_t>(expected_kind))
        throw Error(ErrCode::Io, path + ": wrong checkpoint kind");
}

std::vector<double> CheckpointReader::next(const std::string& expect_name,
                                           std::vector<int>& shape_out) {
    const auto name_len = read_raw<uint32_t>(in_, path_);
    if (name_len == 0)
        throw Error(ErrCode::Io, path_ + ": missing tensor " + expect_name);
    std::string name(name_len, '\0');
    in_.read(name.data(), name_len);
    if (!in_ || name != expect_name)
        throw Error(ErrCode::Io, path_ + ": expected tensor " + expect_name + ", found " + name);
    const auto ndims = read_raw<uint32_t>(in_, path_);
    shape_out.clear();
    size_t count = 1;
    for (uint32_t i = 0; i < ndims; ++i) {
        const auto d = read_raw<int32_t>(in_, path_);
        if (d <= 0) throw Error(ErrCode::Io, path_ + ": bad tensor dimension");
        shape_out.push_back(d);
        count *= size_t(d);
    }
    std::vector<double> values(count);
    in_.read(reinterpret_cast<char*>(values.data()), std::streamsize(count * sizeof(double)));
    if (!in_) throw Error(ErrCode::Io, path_ + ": truncated checkpoint");
    return values;
}

void CheckpointReader::finish() {
    const auto name_len = read_raw<uint32_t>(in_, path_);
    if (name_len != 0) throw Error(ErrCode::Io, path_ + ": trailing tensors in checkpoint");
}

}  // namespace pmp
