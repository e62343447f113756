#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "pmp/error.hpp"

namespace pmp {

// Versioned flat binary: 8-byte magic, u32 kind, then named tensors
// (u32 name length, name bytes, u32 ndims, i32 dims, values as little-endian
// 64-bit floats), terminated by a zero name length.
enum class CheckpointKind : uint32_t {
    Mnn = 1,
    Encoder = 2,
    ImitationHeads = 3,
    QNets = 4,
};

class CheckpointWriter {
public:
    CheckpointWriter(const std::string& path, CheckpointKind kind);
    void add(const std::string& name, const std::vector<int>& shape,
             const std::vector<double>& values);
    void finish();

private:
    std::ofstream out_;
    std::string path_;
    bool finished_ = false;
};

class CheckpointReader {
public:
    CheckpointReader(const std::string& path, CheckpointKind expected_kind);
    // reads the next tensor; the stored name must match
    std::vector<double> next(const std::string& expect_name, std::vector<int>& shape_out);
    void finish();  // verifies the end marker

private:
    std::ifstream in_;
    std::string path_;
};

}  // namespace pmp
