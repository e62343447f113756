#include "pmp/networks.hpp"

#include "pmp/checkpoint.hpp"

namespace pmp {

namespace {

const ConvDims kConv1{GridSpec::kRows, GridSpec::kCols, GridSpec::kChannels, 3, 3, 32};
const ConvDims kConv2{kConv1.oh(), kConv1.ow(), kConv1.f, 3, 1, 64};
const PoolDims kPool{kConv2.oh(), kConv2.ow(), kConv2.f, 2};
const int kFlat = kPool.oh() * kPool.w * kPool.c;  // 4 * 1 * 64 = 256

}  // namespace

Encoder Encoder::init(uint64_t seed) {
    Rng rng(seed);
    Encoder e;
    e.conv1_w = Tensor({kConv1.f, kConv1.kh, kConv1.kw, kConv1.c});
    e.conv1_b = Tensor({kConv1.f});
    e.conv2_w = Tensor({kConv2.f, kConv2.kh, kConv2.kw, kConv2.c});
    e.conv2_b = Tensor({kConv2.f});
    e.fc_w = Tensor({kEncodingDim, kFlat});
    e.fc_b = Tensor({kEncodingDim});
    init_uniform_fan_in(e.conv1_w, kConv1.kh * kConv1.kw * kConv1.c, rng);
    init_uniform_fan_in(e.conv2_w, kConv2.kh * kConv2.kw * kConv2.c, rng);
    init_uniform_fan_in(e.fc_w, kFlat, rng);
    return e;
}

std::vector<Tensor*> Encoder::params() {
    return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc_w, &fc_b};
}

std::vector<const Tensor*> Encoder::params() const {
    return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc_w, &fc_b};
}

std::vector<double> Encoder::forward(const ContextGrid& grid, Acts* acts) const {
    Acts local;
    Acts& a = acts ? *acts : local;
    a.in = grid.values;
    conv2d_forward(kConv1, conv1_w, conv1_b, a.in, a.c1);
    relu_forward(a.c1, a.r1);
    conv2d_forward(kConv2, conv2_w, conv2_b, a.r1, a.c2);
    relu_forward(a.c2, a.r2);
    maxpool_forward(kPool, a.r2, a.pooled, a.pool_argmax);
    dense_forward(fc_w, fc_b, a.pooled, a.fc);
    relu_forward(a.fc, a.enc);
    return a.enc;
}

void Encoder::backward(const Acts& a, const std::vector<double>& g_encoding) {
    std::vector<double> g_fc, g_pooled, g_r2, g_c2, g_r1, g_c1, g_in;
    relu_backward(a.fc, g_encoding, g_fc);
    dense_backward(fc_w, fc_b, a.pooled, g_fc, g_pooled);
    maxpool_backward(kPool, a.pool_argmax, g_pooled, g_r2);
    relu_backward(a.c2, g_r2, g_c2);
    conv2d_backward(kConv2, conv2_w, conv2_b, a.r1, g_c2, g_r1);
    relu_backward(a.c1, g_r1, g_c1);
    conv2d_backward(kConv1, conv1_w, conv1_b, a.in, g_c1, g_in);
}

ImitationHeads ImitationHeads::init(uint64_t seed) {
    Rng rng(seed);
    ImitationHeads h;
    h.lat_fc1_w = Tensor({kHiddenDim, kEncodingDim});
    h.lat_fc1_b = Tensor({kHiddenDim});
    h.lat_fc2_w = Tensor({kNumLateral, kHiddenDim});
    h.lat_fc2_b = Tensor({kNumLateral});
    h.lon_fc1_w = Tensor({kHiddenDim, kEncodingDim});
    h.lon_fc1_b = Tensor({kHiddenDim});
    h.lon_fc2_w = Tensor({kNumLongitudinal, kHiddenDim});
    h.lon_fc2_b = Tensor({kNumLongitudinal});
    init_uniform_fan_in(h.lat_fc1_w, kEncodingDim, rng);
    init_uniform_fan_in(h.lat_fc2_w, kHiddenDim, rng);
    init_uniform_fan_in(h.lon_fc1_w, kEncodingDim, rng);
    init_uniform_fan_in(h.lon_fc2_w, kHiddenDim, rng);
    return h;
}

std::vector<Tensor*> ImitationHeads::params() {
    return {&lat_fc1_w, &lat_fc1_b, &lat_fc2_w, &lat_fc2_b,
            &lon_fc1_w, &lon_fc1_b, &lon_fc2_w, &lon_fc2_b};
}

MetaAction ImitationHeads::Output::argmax() const {
    return {lateral_from_index(argmax_index(lat_prob)),
            longitudinal_from_index(argmax_index(lon_prob))};
}

ImitationHeads::Output ImitationHeads::forward(const std::vector<double>& encoding,
                                               Acts* acts) const {
    Acts local;
    Acts& a = acts ? *acts : local;
    a.in = encoding;
    dense_forward(lat_fc1_w, lat_fc1_b, a.in, a.lat_h);
    relu_forward(a.lat_h, a.lat_hr);
    dense_forward(lat_fc2_w, lat_fc2_b, a.lat_hr, a.lat_logits);
    softmax(a.lat_logits, a.lat_prob);
    dense_forward(lon_fc1_w, lon_fc1_b, a.in, a.lon_h);
    relu_forward(a.lon_h, a.lon_hr);
    dense_forward(lon_fc2_w, lon_fc2_b, a.lon_hr, a.lon_logits);
    softmax(a.lon_logits, a.lon_prob);
    return {a.lat_prob, a.lon_prob};
}

std::vector<double> ImitationHeads::backward(const Acts& a, const std::vector<double>& g_lat_prob,
                                             const std::vector<double>& g_lon_prob) {
    std::vector<double> g_in(a.in.size(), 0.0), g_tmp, g_logits, g_hr, g_h;

    softmax_backward(a.lat_prob, g_lat_prob, g_logits);
    dense_backward(lat_fc2_w, lat_fc2_b, a.lat_hr, g_logits, g_hr);
    relu_backward(a.lat_h, g_hr, g_h);
    dense_backward(lat_fc1_w, lat_fc1_b, a.in, g_h, g_tmp);
    for (size_t i = 0; i < g_in.size(); ++i) g_in[i] += g_tmp[i];

    softmax_backward(a.lon_prob, g_lon_prob, g_logits);
    dense_backward(lon_fc2_w, lon_fc2_b, a.lon_hr, g_logits, g_hr);
    relu_backward(a.lon_h, g_hr, g_h);
    dense_backward(lon_fc1_w, lon_fc1_b, a.in, g_h, g_tmp);
    for (size_t i = 0; i < g_in.size(); ++i) g_in[i] += g_tmp[i];
    return g_in;
}

QNet QNet::init(uint64_t seed) {
    Rng rng(seed);
    QNet q;
    q.fc1_w = Tensor({kH1, kEncodingDim});
    q.fc1_b = Tensor({kH1});
    q.fc2_w = Tensor({kH2, kH1});
    q.fc2_b = Tensor({kH2});
    q.lat_w = Tensor({kNumLateral, kH2});
    q.lat_b = Tensor({kNumLateral});
    q.lon_w = Tensor({kNumLongitudinal, kH2});
    q.lon_b = Tensor({kNumLongitudinal});
    init_uniform_fan_in(q.fc1_w, kEncodingDim, rng);
    init_uniform_fan_in(q.fc2_w, kH1, rng);
    init_uniform_fan_in(q.lat_w, kH2, rng);
    init_uniform_fan_in(q.lon_w, kH2, rng);
    return q;
}

std::vector<Tensor*> QNet::params() {
    return {&fc1_w, &fc1_b, &fc2_w, &fc2_b, &lat_w, &lat_b, &lon_w, &lon_b};
}

MetaAction QNet::Output::argmax() const {
    return {lateral_from_index(argmax_index(lat_q)),
            longitudinal_from_index(argmax_index(lon_q))};
}

QNet::Output QNet::forward(const std::vector<double>& encoding, Acts* acts) const {
    Acts local;
    Acts& a = acts ? *acts : local;
    a.in = encoding;
    dense_forward(fc1_w, fc1_b, a.in, a.h1);
    relu_forward(a.h1, a.h1r);
    dense_forward(fc2_w, fc2_b, a.h1r, a.h2);
    relu_forward(a.h2, a.h2r);
    Output out;
    dense_forward(lat_w, lat_b, a.h2r, out.lat_q);
    dense_forward(lon_w, lon_b, a.h2r, out.lon_q);
    return out;
}

void QNet::backward(const Acts& a, const std::vector<double>& g_lat_q,
                    const std::vector<double>& g_lon_q) {
    std::vector<double> g_h2r(a.h2r.size(), 0.0), g_tmp, g_h2, g_h1r, g_h1, g_in;
    dense_backward(lat_w, lat_b, a.h2r, g_lat_q, g_tmp);
    for (size_t i = 0; i < g_h2r.size(); ++i) g_h2r[i] += g_tmp[i];
    dense_backward(lon_w, lon_b, a.h2r, g_lon_q, g_tmp);
    for (size_t i = 0; i < g_h2r.size(); ++i) g_h2r[i] += g_tmp[i];
    relu_backward(a.h2, g_h2r, g_h2);
    dense_backward(fc2_w, fc2_b, a.h1r, g_h2, g_h1r);
    relu_backward(a.h1, g_h1r, g_h1);
    dense_backward(fc1_w, fc1_b, a.in, g_h1, g_in);
}

QNetworks QNetworks::init(uint64_t seed) {
    QNetworks q;
    q.primary = QNet::init(seed);
    q.target = QNet::init(seed);
    q.sync_target();
    return q;
}

void QNetworks::sync_target() {
    unflatten_params(flatten_params(primary.params()), target.params());
}

int argmax_index(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < int(v.size()); ++i)
        if (v[size_t(i)] > v[size_t(best)]) best = i;
    return best;
}

namespace {

void save_tensors(CheckpointWriter& w, const std::vector<Tensor*>& tensors,
                  const std::vector<std::string>& names) {
    for (size_t i = 0; i < tensors.size(); ++i)
        w.add(names[i], tensors[i]->shape, tensors[i]->v);
}

void load_tensors(CheckpointReader& r, const std::vector<Tensor*>& tensors,
                  const std::vector<std::string>& names) {
    for (size_t i = 0; i < tensors.size(); ++i) {
        std::vector<int> shape;
        std::vector<double> values = r.next(names[i], shape);
        if (shape != tensors[i]->shape)
            throw Error(ErrCode::Shape, "checkpoint tensor " + names[i] + " has wrong shape");
        tensors[i]->v = std::move(values);
    }
}

const std::vector<std::string> kEncoderNames = {"conv1_w", "conv1_b", "conv2_w",
                                                "conv2_b", "fc_w",    "fc_b"};
const std::vector<std::string> kHeadNames = {"lat_fc1_w", "lat_fc1_b", "lat_fc2_w", "lat_fc2_b",
                                             "lon_fc1_w", "lon_fc1_b", "lon_fc2_w", "lon_fc2_b"};
const std::vector<std::string> kQNetNames = {"fc1_w", "fc1_b", "fc2_w", "fc2_b",
                                             "lat_w", "lat_b", "lon_w", "lon_b"};

std::vector<std::string> prefixed(const std::string& prefix, const std::vector<std::string>& v) {
    std::vector<std::string> out;
    for (const auto& s : v) out.push_back(prefix + s);
    return out;
}

}  // namespace

void encoder_save(const Encoder& e, const std::string& path) {
    CheckpointWriter w(path, CheckpointKind::Encoder);
    Encoder& mut = const_cast<Encoder&>(e);
    save_tensors(w, mut.params(), kEncoderNames);
    w.finish();
}

Encoder encoder_load(const std::string& path) {
    CheckpointReader r(path, CheckpointKind::Encoder);
    Encoder e = Encoder::init(0);
    load_tensors(r, e.params(), kEncoderNames);
    r.finish();
    return e;
}

void heads_save(ImitationHeads& h, const std::string& path) {
    CheckpointWriter w(path, CheckpointKind::ImitationHeads);
    save_tensors(w, h.params(), kHeadNames);
    w.finish();
}

ImitationHeads heads_load(const std::string& path) {
    CheckpointReader r(path, CheckpointKind::ImitationHeads);
    ImitationHeads h = ImitationHeads::init(0);
    load_tensors(r, h.params(), kHeadNames);
    r.finish();
    return h;
}

void qnets_save(QNetworks& q, const std::string& path) {
    CheckpointWriter w(path, CheckpointKind::QNets);
    save_tensors(w, q.primary.params(), prefixed("primary_", kQNetNames));
    save_tensors(w, q.target.params(), prefixed("target_", kQNetNames));
    w.finish();
}

QNetworks qnets_load(const std::string& path) {
    CheckpointReader r(path, CheckpointKind::QNets);
    QNetworks q = QNetworks::init(0);
    load_tensors(r, q.primary.params(), prefixed("primary_", kQNetNames));
    load_tensors(r, q.target.params(), prefixed("target_", kQNetNames));
    r.finish();
    return q;
}

}  // namespace pmp
