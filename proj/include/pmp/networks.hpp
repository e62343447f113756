#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pmp/actions.hpp"
#include "pmp/grid.hpp"
#include "pmp/nn.hpp"

namespace pmp {

constexpr int kEncodingDim = 256;

// CNN over the 13x3x60 context grid:
// 3x3 conv (32 filters) -> relu -> 3x1 conv (64 filters) -> relu
// -> 2x1 max pool -> flatten (256) -> dense 256 -> relu.
struct Encoder {
    Tensor conv1_w, conv1_b;  // {32,3,3,60}, {32}
    Tensor conv2_w, conv2_b;  // {64,3,1,32}, {64}
    Tensor fc_w, fc_b;        // {256,256}, {256}

    static Encoder init(uint64_t seed);
    std::vector<Tensor*> params();
    std::vector<const Tensor*> params() const;

    struct Acts {
        std::vector<double> in, c1, r1, c2, r2, pooled, fc, enc;
        std::vector<int> pool_argmax;
    };

    std::vector<double> forward(const ContextGrid& grid, Acts* acts = nullptr) const;
    // accumulates parameter gradients for one sample
    void backward(const Acts& acts, const std::vector<double>& g_encoding);
};

// two dense layers per head; outputs are class probabilities
struct ImitationHeads {
    static constexpr int kHiddenDim = 128;
    Tensor lat_fc1_w, lat_fc1_b, lat_fc2_w, lat_fc2_b;
    Tensor lon_fc1_w, lon_fc1_b, lon_fc2_w, lon_fc2_b;

    static ImitationHeads init(uint64_t seed);
    std::vector<Tensor*> params();

    struct Acts {
        std::vector<double> in;
        std::vector<double> lat_h, lat_hr, lat_logits, lat_prob;
        std::vector<double> lon_h, lon_hr, lon_logits, lon_prob;
    };

    struct Output {
        std::vector<double> lat_prob;  // 5
        std::vector<double> lon_prob;  // 4
        MetaAction argmax() const;
    };

    Output forward(const std::vector<double>& encoding, Acts* acts = nullptr) const;
    // returns the encoding gradient
    std::vector<double> backward(const Acts& acts, const std::vector<double>& g_lat_prob,
                                 const std::vector<double>& g_lon_prob);
};

// encoding -> dense -> relu -> dense -> relu -> two linear heads (5 and 4 Q values)
struct QNet {
    static constexpr int kH1 = 128;
    static constexpr int kH2 = 64;
    Tensor fc1_w, fc1_b, fc2_w, fc2_b;
    Tensor lat_w, lat_b, lon_w, lon_b;

    static QNet init(uint64_t seed);
    std::vector<Tensor*> params();

    struct Acts {
        std::vector<double> in, h1, h1r, h2, h2r;
    };

    struct Output {
        std::vector<double> lat_q;  // 5
        std::vector<double> lon_q;  // 4
        MetaAction argmax() const;
    };

    Output forward(const std::vector<double>& encoding, Acts* acts = nullptr) const;
    void backward(const Acts& acts, const std::vector<double>& g_lat_q,
                  const std::vector<double>& g_lon_q);
};

struct ImitationModel {
    Encoder encoder;
    ImitationHeads heads;

    MetaAction predict(const ContextGrid& grid) const {
        return heads.forward(encoder.forward(grid)).argmax();
    }
};

struct QNetworks {
    QNet primary;
    QNet target;

    static QNetworks init(uint64_t seed);  // target starts as a copy of primary
    void sync_target();
};

int argmax_index(const std::vector<double>& v);

void encoder_save(const Encoder& e, const std::string& path);
Encoder encoder_load(const std::string& path);
void heads_save(ImitationHeads& h, const std::string& path);
ImitationHeads heads_load(const std::string& path);
void qnets_save(QNetworks& q, const std::string& path);
QNetworks qnets_load(const std::string& path);

}  // namespace pmp
