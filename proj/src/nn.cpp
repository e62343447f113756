#include "pmp/nn.hpp"

#include <algorithm>
#include <cmath>

namespace pmp {

void Tensor::assert_finite(const char* what) const {
#ifndef NDEBUG
    for (double x : v)
        if (!std::isfinite(x)) throw Error(ErrCode::Internal, std::string(what) + ": non-finite value");
#else
    (void)what;
#endif
}

void init_uniform_fan_in(Tensor& t, int fan_in, Rng& rng) {
    const double s = 1.0 / std::sqrt(double(std::max(1, fan_in)));
    for (double& x : t.v) x = rng.uniform(-s, s);
}

void debug_check_finite(const std::vector<double>& values, const char* what) {
#ifndef NDEBUG
    for (double x : values)
        if (!std::isfinite(x))
            throw Error(ErrCode::Internal, std::string(what) + ": non-finite value");
#else
    (void)values;
    (void)what;
#endif
}

void dense_forward(const Tensor& w, const Tensor& b, const std::vector<double>& in,
                   std::vector<double>& out) {
    const int n_out = w.shape.at(0);
    const int n_in = w.shape.at(1);
    if (int(in.size()) != n_in) throw Error(ErrCode::Shape, "dense input size mismatch");
    out.assign(size_t(n_out), 0.0);
    for (int o = 0; o < n_out; ++o) {
        double acc = b.v[size_t(o)];
        const double* row = &w.v[size_t(o) * size_t(n_in)];
        for (int i = 0; i < n_in; ++i) acc += row[i] * in[size_t(i)];
        out[size_t(o)] = acc;
    }
    debug_check_finite(out, "dense output");
}

void dense_backward(Tensor& w, Tensor& b, const std::vector<double>& in,
                    const std::vector<double>& g_out, std::vector<double>& g_in) {
    const int n_out = w.shape.at(0);
    const int n_in = w.shape.at(1);
    if (int(g_out.size()) != n_out) throw Error(ErrCode::Shape, "dense grad size mismatch");
    g_in.assign(size_t(n_in), 0.0);
    for (int o = 0; o < n_out; ++o) {
        const double go = g_out[size_t(o)];
        b.g[size_t(o)] += go;
        double* wg = &w.g[size_t(o) * size_t(n_in)];
        const double* row = &w.v[size_t(o) * size_t(n_in)];
        for (int i = 0; i < n_in; ++i) {
            wg[i] += go * in[size_t(i)];
            g_in[size_t(i)] += go * row[i];
        }
    }
}

void conv2d_forward(const ConvDims& d, const Tensor& w, const Tensor& b,
                    const std::vector<double>& in, std::vector<double>& out) {
    if (int(in.size()) != d.h * d.w * d.c) throw Error(ErrCode::Shape, "conv input size mismatch");
    out.assign(size_t(d.oh() * d.ow() * d.f), 0.0);
    for (int oy = 0; oy < d.oh(); ++oy)
        for (int ox = 0; ox < d.ow(); ++ox)
            for (int f = 0; f < d.f; ++f) {
                double acc = b.v[size_t(f)];
                for (int ky = 0; ky < d.kh; ++ky)
                    for (int kx = 0; kx < d.kw; ++kx) {
                        const double* ip = &in[size_t(((oy + ky) * d.w + (ox + kx)) * d.c)];
                        const double* wp = &w.v[size_t(((f * d.kh + ky) * d.kw + kx) * d.c)];
                        for (int c = 0; c < d.c; ++c) acc += ip[c] * wp[c];
                    }
                out[size_t((oy * d.ow() + ox) * d.f + f)] = acc;
            }
    debug_check_finite(out, "conv output");
}

void conv2d_backward(const ConvDims& d, Tensor& w, Tensor& b, const std::vector<double>& in,
                     const std::vector<double>& g_out, std::vector<double>& g_in) {
    if (int(g_out.size()) != d.oh() * d.ow() * d.f)
        throw Error(ErrCode::Shape, "conv grad size mismatch");
    g_in.assign(in.size(), 0.0);
    for (int oy = 0; oy < d.oh(); ++oy)
        for (int ox = 0; ox < d.ow(); ++ox)
            for (int f = 0; f < d.f; ++f) {
                const double go = g_out[size_t((oy * d.ow() + ox) * d.f + f)];
                b.g[size_t(f)] += go;
                for (int ky = 0; ky < d.kh; ++ky)
                    for (int kx = 0; kx < d.kw; ++kx) {
                        const size_t in_off = size_t(((oy + ky) * d.w + (ox + kx)) * d.c);
                        const size_t w_off = size_t(((f * d.kh + ky) * d.kw + kx) * d.c);
                        for (int c = 0; c < d.c; ++c) {
                            w.g[w_off + size_t(c)] += go * in[in_off + size_t(c)];
                            g_in[in_off + size_t(c)] += go * w.v[w_off + size_t(c)];
                        }
                    }
            }
}

void maxpool_forward(const PoolDims& d, const std::vector<double>& in, std::vector<double>& out,
                     std::vector<int>& argmax) {
    if (int(in.size()) != d.h * d.w * d.c) throw Error(ErrCode::Shape, "pool input size mismatch");
    out.assign(size_t(d.oh() * d.w * d.c), 0.0);
    argmax.assign(out.size(), 0);
    for (int oy = 0; oy < d.oh(); ++oy)
        for (int x = 0; x < d.w; ++x)
            for (int c = 0; c < d.c; ++c) {
                int best = ((oy * d.kh) * d.w + x) * d.c + c;
                for (int ky = 1; ky < d.kh; ++ky) {
                    const int idx = ((oy * d.kh + ky) * d.w + x) * d.c + c;
                    if (in[size_t(idx)] > in[size_t(best)]) best = idx;
                }
                const size_t o = size_t((oy * d.w + x) * d.c + c);
                out[o] = in[size_t(best)];
                argmax[o] = best;
            }
}

void maxpool_backward(const PoolDims& d, const std::vector<int>& argmax,
                      const std::vector<double>& g_out, std::vector<double>& g_in) {
    g_in.assign(size_t(d.h * d.w * d.c), 0.0);
    for (size_t o = 0; o < g_out.size(); ++o) g_in[size_t(argmax[o])] += g_out[o];
}

void relu_forward(const std::vector<double>& in, std::vector<double>& out) {
    out.resize(in.size());
    for (size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

void relu_backward(const std::vector<double>& in, const std::vector<double>& g_out,
                   std::vector<double>& g_in) {
    g_in.resize(in.size());
    for (size_t i = 0; i < in.size(); ++i) g_in[i] = in[i] > 0.0 ? g_out[i] : 0.0;
}

void softmax(const std::vector<double>& in, std::vector<double>& out) {
    out.resize(in.size());
    double max_v = in[0];
    for (double x : in) max_v = std::max(max_v, x);
    double sum = 0.0;
    for (size_t i = 0; i < in.size(); ++i) {
        out[i] = std::exp(in[i] - max_v);
        sum += out[i];
    }
    for (double& x : out) x /= sum;
}

void softmax_backward(const std::vector<double>& out, const std::vector<double>& g_out,
                      std::vector<double>& g_in) {
    g_in.resize(out.size());
    double dot = 0.0;
    for (size_t i = 0; i < out.size(); ++i) dot += g_out[i] * out[i];
    for (size_t i = 0; i < out.size(); ++i) g_in[i] = out[i] * (g_out[i] - dot);
}

namespace {
constexpr double kProbClamp = 1e-7;
double clamp_p(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }
}  // namespace

double bce_loss(const std::vector<double>& pred, const std::vector<double>& target_one_hot) {
    if (pred.size() != target_one_hot.size())
        throw Error(ErrCode::Shape, "bce prediction/target size mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        const double p = clamp_p(pred[i]);
        const double y = target_one_hot[i];
        acc += y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    }
    return -acc / double(pred.size());
}

double bce_loss_grad(const std::vector<double>& pred, const std::vector<double>& target_one_hot,
                     std::vector<double>& g_pred) {
    if (pred.size() != target_one_hot.size())
        throw Error(ErrCode::Shape, "bce prediction/target size mismatch");
    g_pred.assign(pred.size(), 0.0);
    double acc = 0.0;
    const double n = double(pred.size());
    for (size_t i = 0; i < pred.size(); ++i) {
        const double p = clamp_p(pred[i]);
        const double y = target_one_hot[i];
        acc += y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        g_pred[i] = -(y / p - (1.0 - y) / (1.0 - p)) / n;
    }
    return -acc / n;
}

double huber_loss(double err, double delta) {
    const double a = std::abs(err);
    return a <= delta ? 0.5 * err * err : delta * (a - 0.5 * delta);
}

double huber_grad(double err, double delta) { return std::clamp(err, -delta, delta); }

Adam::Adam(std::vector<Tensor*> params, double lr, double clip)
    : learning_rate(lr), grad_clip_norm(clip), params_(std::move(params)) {
    for (Tensor* t : params_) {
        m_.emplace_back(t->count(), 0.0);
        v_.emplace_back(t->count(), 0.0);
    }
}

void Adam::step() {
    ++t_;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;

    double clip_scale = 1.0;
    if (grad_clip_norm > 0.0) {
        double sq = 0.0;
        for (Tensor* t : params_)
            for (double g : t->g) sq += g * g;
        const double norm = std::sqrt(sq);
        if (norm > grad_clip_norm) clip_scale = grad_clip_norm / norm;
    }

    const double bc1 = 1.0 - std::pow(0.9, double(t_));
    const double bc2 = 1.0 - std::pow(0.999, double(t_));
    for (size_t k = 0; k < params_.size(); ++k) {
        Tensor& t = *params_[k];
        for (size_t i = 0; i < t.v.size(); ++i) {
            const double g = t.g[i] * clip_scale;
            m_[k][i] = b1 * m_[k][i] + (1.0 - b1) * g;
            v_[k][i] = b2 * v_[k][i] + (1.0 - b2) * g * g;
            t.v[i] -= learning_rate * (m_[k][i] / bc1) / (std::sqrt(v_[k][i] / bc2) + eps);
        }
        t.zero_grad();
    }
}

std::vector<double> flatten_params(const std::vector<const Tensor*>& params) {
    std::vector<double> flat;
    for (const Tensor* t : params) flat.insert(flat.end(), t->v.begin(), t->v.end());
    return flat;
}

std::vector<double> flatten_params(const std::vector<Tensor*>& params) {
    return flatten_params(std::vector<const Tensor*>(params.begin(), params.end()));
}

void unflatten_params(const std::vector<double>& flat, const std::vector<Tensor*>& params) {
    size_t off = 0;
    for (Tensor* t : params) {
        if (off + t->v.size() > flat.size())
            throw Error(ErrCode::Shape, "flat parameter vector too short");
        std::copy(flat.begin() + long(off), flat.begin() + long(off + t->v.size()),
                  t->v.begin());
        off += t->v.size();
    }
    if (off != flat.size()) throw Error(ErrCode::Shape, "flat parameter vector too long");
}

}  // namespace pmp
