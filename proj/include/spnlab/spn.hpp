#pragma once

// SiamParseNet core: shared encoder, segmentation branch, propagation branch,
// top-K cosine label transfer, and the three-case loss algebra.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spnlab/ops.hpp"
#include "spnlab/params.hpp"
#include "spnlab/rng.hpp"
#include "spnlab/tensor.hpp"

namespace spnlab {

struct SpnConfig {
    int in_channels = 3;
    int width = 16;        // encoder channel width
    int embed_dim = 32;    // D, propagation embedding
    int num_classes = 5;   // background + 4 body parts
    int K = 20;            // top-K in label transfer
    float lambda = 1e-6f;  // consistency-loss scale
    static constexpr int kStride = 4;  // encoder downsample factor S
};

template <class T>
struct Conv2dT {
    TensorT<T> w, b;
    int stride = 1, pad = 1;
    TensorT<T> operator()(const TensorT<T>& x) const {
        return ops::add_channel_bias(ops::conv2d(x, w, stride, pad), b);
    }
};

// Shared encoder (4 convs, strides 2,2,1,1) plus two disjoint 2-conv heads.
template <class T>
struct SpnModelT {
    SpnConfig cfg;
    std::vector<Conv2dT<T>> encoder;    // 4 layers
    std::vector<Conv2dT<T>> seg_head;   // 2 layers -> num_classes logits
    std::vector<Conv2dT<T>> prop_head;  // 2 layers -> embed_dim
    ParamListT<T> params;

    SpnModelT() = default;
    SpnModelT(const SpnConfig& c, uint64_t seed) : cfg(c) {
        Rng rng(mix_seed(seed, "spn-init"));
        auto add_conv = [&](std::vector<Conv2dT<T>>& dst, const std::string& name, int in, int out,
                            int k, int stride) {
            Conv2dT<T> layer;
            layer.w = init_conv_kernel<T>(rng, out, in, k, k);
            layer.b = init_zero_vector<T>(out);
            layer.stride = stride;
            layer.pad = k / 2;
            params.push_back({name + ".w", layer.w});
            params.push_back({name + ".b", layer.b});
            dst.push_back(layer);
        };
        int w = cfg.width;
        add_conv(encoder, "enc.0", cfg.in_channels, w, 3, 2);
        add_conv(encoder, "enc.1", w, w, 3, 2);
        add_conv(encoder, "enc.2", w, w, 3, 1);
        add_conv(encoder, "enc.3", w, w, 3, 1);
        add_conv(seg_head, "seg.0", w, w, 3, 1);
        add_conv(seg_head, "seg.1", w, cfg.num_classes, 3, 1);
        add_conv(prop_head, "prop.0", w, w, 3, 1);
        add_conv(prop_head, "prop.1", w, cfg.embed_dim, 3, 1);
    }

    TensorT<T> encode(const TensorT<T>& x) const {
        TensorT<T> h = x;
        for (const auto& layer : encoder) h = ops::relu(layer(h));
        return h;
    }
    TensorT<T> seg_logits(const TensorT<T>& features) const {
        return seg_head[1](ops::relu(seg_head[0](features)));
    }
    TensorT<T> prop_embedding(const TensorT<T>& features) const {
        return prop_head[1](ops::relu(prop_head[0](features)));
    }
};

using SpnModel = SpnModelT<float>;

// Eq. 4/5 label transfer: weighted top-K average of source distributions,
// channel-softmaxed. Inputs are site matrices ([sites, D] / [sites, C]).
template <class T>
TensorT<T> propagate(const TensorT<T>& f_src, const TensorT<T>& f_tgt, const TensorT<T>& y_src,
                     int K) {
    return ops::softmax_rows(ops::cosine_topk_propagate(f_src, f_tgt, y_src, K));
}

// Nearest-neighbor downsample of a full-res class mask to feature resolution.
inline std::vector<uint8_t> downsample_mask(const std::vector<uint8_t>& mask, int H, int W, int Hf,
                                            int Wf) {
    std::vector<uint8_t> out(static_cast<size_t>(Hf) * Wf);
    double sh = static_cast<double>(H) / Hf, sw = static_cast<double>(W) / Wf;
    for (int i = 0; i < Hf; ++i) {
        int ih = std::min(static_cast<int>((i + 0.5) * sh), H - 1);
        for (int j = 0; j < Wf; ++j) {
            int iw = std::min(static_cast<int>((j + 0.5) * sw), W - 1);
            out[static_cast<size_t>(i) * Wf + j] = mask[static_cast<size_t>(ih) * W + iw];
        }
    }
    return out;
}

template <class T>
TensorT<T> onehot_from_mask(const std::vector<uint8_t>& mask, int num_classes) {
    std::vector<int> cls(mask.size());
    for (size_t i = 0; i < mask.size(); ++i) cls[i] = mask[i];
    return ops::onehot_rows<T>(cls, num_classes);
}

enum class PropSource { GroundTruth, SegOutput };

// One frame of a training pair at the tensor level: image in [0,1], optional
// full-resolution class mask.
template <class T>
struct FrameInputT {
    TensorT<T> image;             // [1,3,H,W]
    std::vector<uint8_t> mask;    // empty if unlabeled
    bool labeled() const { return !mask.empty(); }
};

template <class T>
struct BranchOutputsT {
    int Hf = 0, Wf = 0;
    TensorT<T> f_m, f_n;                  // shared features
    TensorT<T> seg_logits_m, seg_logits_n;  // NCHW logits
    TensorT<T> o_s_m, o_s_n;              // seg probability maps, [S,C]
    TensorT<T> prop_pre_m, prop_pre_n;    // pre-softmax propagation maps, [S,C]
    TensorT<T> o_p_m, o_p_n;              // propagated probability maps, [S,C]
    // downsampled ground-truth one-hots where available
    TensorT<T> gt_m, gt_n;
    bool has_gt_m = false, has_gt_n = false;
};

// Runs both frames through the encoder and the two branches, then produces
// the propagated maps. src_for_m names what frame n contributes as the
// propagation source when predicting frame m (and vice versa).
template <class T>
BranchOutputsT<T> forward_pair(const SpnModelT<T>& model, const FrameInputT<T>& frame_m,
                               const FrameInputT<T>& frame_n, PropSource src_for_m,
                               PropSource src_for_n) {
    if (src_for_m == PropSource::GroundTruth && !frame_n.labeled())
        throw ValidationError("forward_pair: ground-truth propagation requested from unlabeled frame n");
    if (src_for_n == PropSource::GroundTruth && !frame_m.labeled())
        throw ValidationError("forward_pair: ground-truth propagation requested from unlabeled frame m");

    BranchOutputsT<T> out;
    int H = frame_m.image.dim(2), W = frame_m.image.dim(3);
    out.Hf = H / SpnConfig::kStride;
    out.Wf = W / SpnConfig::kStride;

    out.f_m = model.encode(frame_m.image);
    out.f_n = model.encode(frame_n.image);
    out.Hf = out.f_m.dim(2);
    out.Wf = out.f_m.dim(3);

    out.seg_logits_m = model.seg_logits(out.f_m);
    out.seg_logits_n = model.seg_logits(out.f_n);
    out.o_s_m = ops::softmax_rows(ops::chw_to_sites(out.seg_logits_m));
    out.o_s_n = ops::softmax_rows(ops::chw_to_sites(out.seg_logits_n));

    TensorT<T> emb_m = ops::chw_to_sites(model.prop_embedding(out.f_m));
    TensorT<T> emb_n = ops::chw_to_sites(model.prop_embedding(out.f_n));

    if (frame_m.labeled()) {
        out.gt_m = onehot_from_mask<T>(downsample_mask(frame_m.mask, H, W, out.Hf, out.Wf),
                                       model.cfg.num_classes);
        out.has_gt_m = true;
    }
    if (frame_n.labeled()) {
        out.gt_n = onehot_from_mask<T>(downsample_mask(frame_n.mask, H, W, out.Hf, out.Wf),
                                       model.cfg.num_classes);
        out.has_gt_n = true;
    }

    TensorT<T> src_map_for_m = src_for_m == PropSource::GroundTruth ? out.gt_n : out.o_s_n;
    TensorT<T> src_map_for_n = src_for_n == PropSource::GroundTruth ? out.gt_m : out.o_s_m;

    out.prop_pre_m = ops::cosine_topk_propagate(emb_n, emb_m, src_map_for_m, model.cfg.K);
    out.prop_pre_n = ops::cosine_topk_propagate(emb_m, emb_n, src_map_for_n, model.cfg.K);
    out.o_p_m = ops::softmax_rows(out.prop_pre_m);
    out.o_p_n = ops::softmax_rows(out.prop_pre_n);
    return out;
}

template <class T>
struct LossBreakdownT {
    TensorT<T> total;
    double ls_m = 0, ls_n = 0, lp_m = 0, lp_n = 0, lc_m = 0, lc_n = 0;
};

// Consistency term: the propagated map is the prediction, the argmaxed
// segmentation output is the gradient-stopped one-hot target.
template <class T>
TensorT<T> consistency_loss(const TensorT<T>& prop_pre, const TensorT<T>& o_s, int num_classes) {
    auto target = ops::onehot_rows<T>(ops::argmax_rows(o_s), num_classes);
    return ops::softmax_cross_entropy(prop_pre, target);
}

// Eq. 1 (case 1), Eq. 2 (case 2), Eq. 3 (case 3; the labeled frame must be m).
template <class T>
LossBreakdownT<T> compute_loss(const SpnModelT<T>& model, const BranchOutputsT<T>& o, int case_id) {
    const int C = model.cfg.num_classes;
    const T lambda = static_cast<T>(model.cfg.lambda);
    LossBreakdownT<T> out;
    if (case_id == 1) {
        auto ls_m = ops::softmax_cross_entropy(ops::chw_to_sites(o.seg_logits_m), o.gt_m);
        auto ls_n = ops::softmax_cross_entropy(ops::chw_to_sites(o.seg_logits_n), o.gt_n);
        auto lp_m = ops::softmax_cross_entropy(o.prop_pre_m, o.gt_m);
        auto lp_n = ops::softmax_cross_entropy(o.prop_pre_n, o.gt_n);
        auto lc_m = consistency_loss(o.prop_pre_m, o.o_s_m, C);
        auto lc_n = consistency_loss(o.prop_pre_n, o.o_s_n, C);
        out.total = ops::add(ops::add(ops::add(ls_m, ls_n), ops::add(lp_m, lp_n)),
                             ops::scale(ops::add(lc_m, lc_n), lambda));
        out.ls_m = ls_m.item();
        out.ls_n = ls_n.item();
        out.lp_m = lp_m.item();
        out.lp_n = lp_n.item();
        out.lc_m = lc_m.item();
        out.lc_n = lc_n.item();
    } else if (case_id == 2) {
        auto lc_m = consistency_loss(o.prop_pre_m, o.o_s_m, C);
        auto lc_n = consistency_loss(o.prop_pre_n, o.o_s_n, C);
        out.total = ops::scale(ops::add(lc_m, lc_n), lambda);
        out.lc_m = lc_m.item();
        out.lc_n = lc_n.item();
    } else if (case_id == 3) {
        auto ls_m = ops::softmax_cross_entropy(ops::chw_to_sites(o.seg_logits_m), o.gt_m);
        auto lp_m = ops::softmax_cross_entropy(o.prop_pre_m, o.gt_m);
        auto lc_m = consistency_loss(o.prop_pre_m, o.o_s_m, C);
        auto lc_n = consistency_loss(o.prop_pre_n, o.o_s_n, C);
        out.total = ops::add(ops::add(ls_m, lp_m), ops::scale(ops::add(lc_m, lc_n), lambda));
        out.ls_m = ls_m.item();
        out.lp_m = lp_m.item();
        out.lc_m = lc_m.item();
        out.lc_n = lc_n.item();
    } else {
        throw ValidationError("compute_loss: case must be 1, 2, or 3");
    }
    return out;
}

// Per-branch pixel accuracy at feature resolution against available ground
// truth (background included).
template <class T>
double pixel_accuracy(const TensorT<T>& prob_sites, const TensorT<T>& gt_onehot) {
    auto pred = ops::argmax_rows(prob_sites);
    auto gt = ops::argmax_rows(gt_onehot);
    int correct = 0;
    for (size_t i = 0; i < pred.size(); ++i) correct += pred[i] == gt[i];
    return static_cast<double>(correct) / static_cast<double>(pred.size());
}

// Full-resolution mask prediction for one frame via the segmentation branch:
// bilinear-upsample the probability map, then argmax.
template <class T>
std::vector<uint8_t> upsample_argmax(const TensorT<T>& prob_sites, int Hf, int Wf, int H, int W) {
    auto prob_map = ops::sites_to_chw(prob_sites, 1, Hf, Wf);
    auto up = ops::resize_bilinear(prob_map, H, W);
    auto sites = ops::chw_to_sites(up);
    auto cls = ops::argmax_rows(sites);
    std::vector<uint8_t> mask(cls.size());
    for (size_t i = 0; i < cls.size(); ++i) mask[i] = static_cast<uint8_t>(cls[i]);
    return mask;
}

}  // namespace spnlab
