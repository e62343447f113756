#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmp/error.hpp"
#include "pmp/rng.hpp"

namespace pmp {

// Value buffer with a same-shape gradient accumulator.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> v;
    std::vector<double> g;

    Tensor() = default;
    explicit Tensor(std::vector<int> dims) : shape(std::move(dims)) {
        v.assign(count(), 0.0);
        g.assign(count(), 0.0);
    }

    size_t count() const {
        size_t n = 1;
        for (int d : shape) n *= size_t(d);
        return n;
    }
    void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }

    void assert_finite(const char* what) const;
};

void init_uniform_fan_in(Tensor& t, int fan_in, Rng& rng);

// no-op in release builds
void debug_check_finite(const std::vector<double>& values, const char* what);

// ---- dense -----------------------------------------------------------------
// weight shape {out, in}; bias shape {out}

void dense_forward(const Tensor& w, const Tensor& b, const std::vector<double>& in,
                   std::vector<double>& out);
// accumulates weight/bias grads and writes the input gradient
void dense_backward(Tensor& w, Tensor& b, const std::vector<double>& in,
                    const std::vector<double>& g_out, std::vector<double>& g_in);

// ---- 2-d convolution over H x W x C (valid padding) -------------------------
// weight shape {filters, kh, kw, in_channels}; bias shape {filters}

struct ConvDims {
    int h = 0, w = 0, c = 0;   // input
    int kh = 0, kw = 0, f = 0; // kernel
    int oh() const { return h - kh + 1; }
    int ow() const { return w - kw + 1; }
};

void conv2d_forward(const ConvDims& d, const Tensor& w, const Tensor& b,
                    const std::vector<double>& in, std::vector<double>& out);
void conv2d_backward(const ConvDims& d, Tensor& w, Tensor& b, const std::vector<double>& in,
                     const std::vector<double>& g_out, std::vector<double>& g_in);

// ---- max pool over rows (kh x 1 window, stride = kh), trailing rows dropped -

struct PoolDims {
    int h = 0, w = 0, c = 0;
    int kh = 2;
    int oh() const { return h / kh; }
};

void maxpool_forward(const PoolDims& d, const std::vector<double>& in, std::vector<double>& out,
                     std::vector<int>& argmax);
void maxpool_backward(const PoolDims& d, const std::vector<int>& argmax,
                      const std::vector<double>& g_out, std::vector<double>& g_in);

// ---- activations and losses --------------------------------------------------

void relu_forward(const std::vector<double>& in, std::vector<double>& out);
void relu_backward(const std::vector<double>& in, const std::vector<double>& g_out,
                   std::vector<double>& g_in);

void softmax(const std::vector<double>& in, std::vector<double>& out);
// g_in from a gradient w.r.t. the softmax output
void softmax_backward(const std::vector<double>& out, const std::vector<double>& g_out,
                      std::vector<double>& g_in);

// L = -(1/N) sum y_i log p_i + (1 - y_i) log(1 - p_i); probabilities clamped
// to [1e-7, 1 - 1e-7] inside the logs.
double bce_loss(const std::vector<double>& pred, const std::vector<double>& target_one_hot);
double bce_loss_grad(const std::vector<double>& pred, const std::vector<double>& target_one_hot,
                     std::vector<double>& g_pred);

// squared/2 within |err| <= delta, linear beyond
double huber_loss(double err, double delta);
double huber_grad(double err, double delta);

// ---- optimizer ---------------------------------------------------------------

class Adam {
public:
    Adam(std::vector<Tensor*> params, double learning_rate, double grad_clip_norm = 0.0);

    // applies accumulated gradients and zeroes them
    void step();

    double learning_rate;
    double grad_clip_norm;  // 0 disables clipping

private:
    std::vector<Tensor*> params_;
    std::vector<std::vector<double>> m_, v_;
    long t_ = 0;
};

// flat parameter copy helpers (checkpointing, target-network sync, tests)
std::vector<double> flatten_params(const std::vector<const Tensor*>& params);
std::vector<double> flatten_params(const std::vector<Tensor*>& params);
void unflatten_params(const std::vector<double>& flat, const std::vector<Tensor*>& params);

}  // namespace pmp
