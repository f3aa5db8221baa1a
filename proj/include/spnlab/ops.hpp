#pragma once

// Differentiable operations over TensorT. All loops are fixed row-major
// order so forward results are bitwise reproducible run to run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "spnlab/tensor.hpp"

namespace spnlab {
namespace ops {

template <class T>
using Ptr = std::shared_ptr<NodeT<T>>;

namespace detail {

template <class T>
TensorT<T> make_result(Shape shape, std::vector<T> data, std::vector<Ptr<T>> parents,
                       std::function<void(NodeT<T>&)> bw) {
    auto n = std::make_shared<NodeT<T>>();
    n->shape = std::move(shape);
    n->data = std::move(data);
    bool rg = false;
    for (auto& p : parents) rg = rg || p->requires_grad;
    n->requires_grad = rg;
    if (rg) {
        n->parents = std::move(parents);
        n->backward_fn = std::move(bw);
    }
    return TensorT<T>(n);
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ShapeError(msg);
}

// C[m,n] += A[m,k] * B[k,n]; ikj order keeps the inner loop contiguous
// without reassociating any per-element accumulation chain.
template <class T>
void gemm_nn(const T* a, const T* b, T* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const T* arow = a + static_cast<int64_t>(i) * k;
        T* crow = c + static_cast<int64_t>(i) * n;
        for (int p = 0; p < k; ++p) {
            T av = arow[p];
            const T* brow = b + static_cast<int64_t>(p) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// C[m,n] += A[m,k] * B[n,k]^T
template <class T>
void gemm_nt(const T* a, const T* b, T* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const T* arow = a + static_cast<int64_t>(i) * k;
        T* crow = c + static_cast<int64_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const T* brow = b + static_cast<int64_t>(j) * k;
            T acc = T(0);
            for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
            crow[j] += acc;
        }
    }
}

// C[m,n] += A[k,m]^T * B[k,n]
template <class T>
void gemm_tn(const T* a, const T* b, T* c, int m, int k, int n) {
    for (int p = 0; p < k; ++p) {
        const T* arow = a + static_cast<int64_t>(p) * m;
        const T* brow = b + static_cast<int64_t>(p) * n;
        for (int i = 0; i < m; ++i) {
            T av = arow[i];
            T* crow = c + static_cast<int64_t>(i) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// im2col for one image [C,H,W] -> col[C*KH*KW, OH*OW]. Out-of-bounds taps
// read as zero.
template <class T>
void im2col(const T* src, int C, int H, int W, int KH, int KW, int stride, int pad,
            int OH, int OW, T* col) {
    for (int c = 0; c < C; ++c) {
        for (int kh = 0; kh < KH; ++kh) {
            for (int kw = 0; kw < KW; ++kw) {
                T* dst = col + ((static_cast<int64_t>(c) * KH + kh) * KW + kw) * OH * OW;
                for (int oh = 0; oh < OH; ++oh) {
                    int ih = oh * stride + kh - pad;
                    for (int ow = 0; ow < OW; ++ow) {
                        int iw = ow * stride + kw - pad;
                        T v = T(0);
                        if (ih >= 0 && ih < H && iw >= 0 && iw < W)
                            v = src[(static_cast<int64_t>(c) * H + ih) * W + iw];
                        dst[oh * OW + ow] = v;
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatter-add col[C*KH*KW, OH*OW] into dst[C,H,W].
template <class T>
void col2im(const T* col, int C, int H, int W, int KH, int KW, int stride, int pad,
            int OH, int OW, T* dst) {
    for (int c = 0; c < C; ++c) {
        for (int kh = 0; kh < KH; ++kh) {
            for (int kw = 0; kw < KW; ++kw) {
                const T* src = col + ((static_cast<int64_t>(c) * KH + kh) * KW + kw) * OH * OW;
                for (int oh = 0; oh < OH; ++oh) {
                    int ih = oh * stride + kh - pad;
                    if (ih < 0 || ih >= H) continue;
                    for (int ow = 0; ow < OW; ++ow) {
                        int iw = ow * stride + kw - pad;
                        if (iw < 0 || iw >= W) continue;
                        dst[(static_cast<int64_t>(c) * H + ih) * W + iw] += src[oh * OW + ow];
                    }
                }
            }
        }
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise
// ---------------------------------------------------------------------------

template <class T>
TensorT<T> add(const TensorT<T>& a, const TensorT<T>& b) {
    detail::require(a.shape() == b.shape(),
                    "add: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    std::vector<T> out(a.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
    auto pa = a.node(), pb = b.node();
    return detail::make_result<T>(a.shape(), std::move(out), {pa, pb}, [pa, pb](NodeT<T>& self) {
        if (pa->requires_grad)
            for (size_t i = 0; i < self.grad.size(); ++i) pa->grad[i] += self.grad[i];
        if (pb->requires_grad)
            for (size_t i = 0; i < self.grad.size(); ++i) pb->grad[i] += self.grad[i];
    });
}

template <class T>
TensorT<T> sub(const TensorT<T>& a, const TensorT<T>& b) {
    detail::require(a.shape() == b.shape(),
                    "sub: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    std::vector<T> out(a.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
    auto pa = a.node(), pb = b.node();
    return detail::make_result<T>(a.shape(), std::move(out), {pa, pb}, [pa, pb](NodeT<T>& self) {
        if (pa->requires_grad)
            for (size_t i = 0; i < self.grad.size(); ++i) pa->grad[i] += self.grad[i];
        if (pb->requires_grad)
            for (size_t i = 0; i < self.grad.size(); ++i) pb->grad[i] -= self.grad[i];
    });
}

template <class T>
TensorT<T> mul(const TensorT<T>& a, const TensorT<T>& b) {
    detail::require(a.shape() == b.shape(),
                    "mul: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    std::vector<T> out(a.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
    auto pa = a.node(), pb = b.node();
    return detail::make_result<T>(a.shape(), std::move(out), {pa, pb}, [pa, pb](NodeT<T>& self) {
        if (pa->requires_grad)
            for (size_t i = 0; i < self.grad.size(); ++i) pa->grad[i] += self.grad[i] * pb->data[i];
        if (pb->requires_grad)
            for (size_t i = 0; i < self.grad.size(); ++i) pb->grad[i] += self.grad[i] * pa->data[i];
    });
}

// a*x + b, elementwise with scalar coefficients.
template <class T>
TensorT<T> affine(const TensorT<T>& x, T a, T b) {
    std::vector<T> out(x.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a * x.data()[i] + b;
    auto px = x.node();
    return detail::make_result<T>(x.shape(), std::move(out), {px}, [px, a](NodeT<T>& self) {
        if (px->requires_grad)
            for (size_t i = 0; i < self.grad.size(); ++i) px->grad[i] += a * self.grad[i];
    });
}

template <class T>
TensorT<T> scale(const TensorT<T>& x, T a) {
    return affine(x, a, T(0));
}

template <class T>
TensorT<T> relu(const TensorT<T>& x) {
    std::vector<T> out(x.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] > T(0) ? x.data()[i] : T(0);
    auto px = x.node();
    return detail::make_result<T>(x.shape(), std::move(out), {px}, [px](NodeT<T>& self) {
        if (px->requires_grad)
            for (size_t i = 0; i < self.grad.size(); ++i)
                if (px->data[i] > T(0)) px->grad[i] += self.grad[i];
    });
}

template <class T>
TensorT<T> leaky_relu(const TensorT<T>& x, T slope = T(0.2)) {
    std::vector<T> out(x.data().size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = x.data()[i] > T(0) ? x.data()[i] : slope * x.data()[i];
    auto px = x.node();
    return detail::make_result<T>(x.shape(), std::move(out), {px}, [px, slope](NodeT<T>& self) {
        if (px->requires_grad)
            for (size_t i = 0; i < self.grad.size(); ++i)
                px->grad[i] += (px->data[i] > T(0) ? T(1) : slope) * self.grad[i];
    });
}

template <class T>
TensorT<T> sigmoid(const TensorT<T>& x) {
    std::vector<T> out(x.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = T(1) / (T(1) + std::exp(-x.data()[i]));
    auto px = x.node();
    auto n = detail::make_result<T>(x.shape(), std::move(out), {px}, nullptr);
    auto pn = n.node();
    if (pn->requires_grad) {
        pn->backward_fn = [px](NodeT<T>& self) {
            if (px->requires_grad)
                for (size_t i = 0; i < self.grad.size(); ++i) {
                    T y = self.data[i];
                    px->grad[i] += self.grad[i] * y * (T(1) - y);
                }
        };
    }
    return n;
}

template <class T>
TensorT<T> tanh_op(const TensorT<T>& x) {
    std::vector<T> out(x.data().size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(x.data()[i]);
    auto px = x.node();
    auto n = detail::make_result<T>(x.shape(), std::move(out), {px}, nullptr);
    auto pn = n.node();
    if (pn->requires_grad) {
        pn->backward_fn = [px](NodeT<T>& self) {
            if (px->requires_grad)
                for (size_t i = 0; i < self.grad.size(); ++i) {
                    T y = self.data[i];
                    px->grad[i] += self.grad[i] * (T(1) - y * y);
                }
        };
    }
    return n;
}

// ---------------------------------------------------------------------------
// Reductions
// ---------------------------------------------------------------------------

template <class T>
TensorT<T> sum_all(const TensorT<T>& x) {
    T acc = T(0);
    for (T v : x.data()) acc += v;
    auto px = x.node();
    return detail::make_result<T>({1}, {acc}, {px}, [px](NodeT<T>& self) {
        if (px->requires_grad)
            for (size_t i = 0; i < px->grad.size(); ++i) px->grad[i] += self.grad[0];
    });
}

template <class T>
TensorT<T> mean_all(const TensorT<T>& x) {
    T acc = T(0);
    for (T v : x.data()) acc += v;
    T inv = T(1) / static_cast<T>(x.numel());
    auto px = x.node();
    return detail::make_result<T>({1}, {acc * inv}, {px}, [px, inv](NodeT<T>& self) {
        if (px->requires_grad)
            for (size_t i = 0; i < px->grad.size(); ++i) px->grad[i] += self.grad[0] * inv;
    });
}

// mean((a-b)^2)
template <class T>
TensorT<T> mse_loss(const TensorT<T>& a, const TensorT<T>& b) {
    detail::require(a.shape() == b.shape(),
                    "mse_loss: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    T acc = T(0);
    for (size_t i = 0; i < a.data().size(); ++i) {
        T d = a.data()[i] - b.data()[i];
        acc += d * d;
    }
    T inv = T(1) / static_cast<T>(a.numel());
    auto pa = a.node(), pb = b.node();
    return detail::make_result<T>({1}, {acc * inv}, {pa, pb}, [pa, pb, inv](NodeT<T>& self) {
        T g = self.grad[0] * inv * T(2);
        if (pa->requires_grad)
            for (size_t i = 0; i < pa->grad.size(); ++i)
                pa->grad[i] += g * (pa->data[i] - pb->data[i]);
        if (pb->requires_grad)
            for (size_t i = 0; i < pb->grad.size(); ++i)
                pb->grad[i] -= g * (pa->data[i] - pb->data[i]);
    });
}

// mean(|a-b|); subgradient 0 where a == b.
template <class T>
TensorT<T> l1_loss(const TensorT<T>& a, const TensorT<T>& b) {
    detail::require(a.shape() == b.shape(),
                    "l1_loss: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    T acc = T(0);
    for (size_t i = 0; i < a.data().size(); ++i) acc += std::abs(a.data()[i] - b.data()[i]);
    T inv = T(1) / static_cast<T>(a.numel());
    auto pa = a.node(), pb = b.node();
    return detail::make_result<T>({1}, {acc * inv}, {pa, pb}, [pa, pb, inv](NodeT<T>& self) {
        T g = self.grad[0] * inv;
        for (size_t i = 0; i < pa->data.size(); ++i) {
            T d = pa->data[i] - pb->data[i];
            T s = d > T(0) ? T(1) : (d < T(0) ? T(-1) : T(0));
            if (pa->requires_grad) pa->grad[i] += g * s;
            if (pb->requires_grad) pb->grad[i] -= g * s;
        }
    });
}

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

template <class T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b) {
    detail::require(a.rank() == 2 && b.rank() == 2, "matmul: both operands must be rank-2");
    detail::require(a.dim(1) == b.dim(0), "matmul: inner dimensions differ, " +
                                              shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    int m = a.dim(0), k = a.dim(1), n = b.dim(1);
    std::vector<T> out(static_cast<size_t>(m) * n, T(0));
    detail::gemm_nn(a.data().data(), b.data().data(), out.data(), m, k, n);
    auto pa = a.node(), pb = b.node();
    return detail::make_result<T>({m, n}, std::move(out), {pa, pb}, [pa, pb, m, k, n](NodeT<T>& self) {
        if (pa->requires_grad)
            detail::gemm_nt(self.grad.data(), pb->data.data(), pa->grad.data(), m, n, k);
        if (pb->requires_grad)
            detail::gemm_tn(pa->data.data(), self.grad.data(), pb->grad.data(), n, m, k);
    });
}

// x[S,C] + bias[C] broadcast over rows.
template <class T>
TensorT<T> add_row_bias(const TensorT<T>& x, const TensorT<T>& bias) {
    detail::require(x.rank() == 2 && bias.rank() == 1 && bias.dim(0) == x.dim(1),
                    "add_row_bias: need x[S,C] and bias[C]");
    int S = x.dim(0), C = x.dim(1);
    std::vector<T> out(x.data().size());
    for (int s = 0; s < S; ++s)
        for (int c = 0; c < C; ++c)
            out[static_cast<size_t>(s) * C + c] = x.data()[static_cast<size_t>(s) * C + c] + bias.data()[c];
    auto px = x.node(), pbias = bias.node();
    return detail::make_result<T>(x.shape(), std::move(out), {px, pbias}, [px, pbias, S, C](NodeT<T>& self) {
        if (px->requires_grad)
            for (size_t i = 0; i < self.grad.size(); ++i) px->grad[i] += self.grad[i];
        if (pbias->requires_grad)
            for (int s = 0; s < S; ++s)
                for (int c = 0; c < C; ++c) pbias->grad[c] += self.grad[static_cast<size_t>(s) * C + c];
    });
}

// ---------------------------------------------------------------------------
// Convolutions
// ---------------------------------------------------------------------------

// Cross-correlation. x[N,C,H,W], kernel[O,C,KH,KW] -> [N,O,OH,OW].
template <class T>
TensorT<T> conv2d(const TensorT<T>& x, const TensorT<T>& kernel, int stride, int pad) {
    detail::require(x.rank() == 4, "conv2d: input must be NCHW, got " + shape_str(x.shape()));
    detail::require(kernel.rank() == 4, "conv2d: kernel must be OIKhKw, got " + shape_str(kernel.shape()));
    int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    int O = kernel.dim(0), KC = kernel.dim(1), KH = kernel.dim(2), KW = kernel.dim(3);
    if (C != KC)
        throw ShapeError("conv2d: input channel dimension (" + std::to_string(C) +
                         ") does not match kernel input-channel dimension (" + std::to_string(KC) + ")");
    detail::require(stride >= 1, "conv2d: stride must be positive");
    detail::require(pad >= 0, "conv2d: pad must be nonnegative");
    int OH = (H + 2 * pad - KH) / stride + 1;
    int OW = (W + 2 * pad - KW) / stride + 1;
    if (H + 2 * pad < KH || OH <= 0)
        throw ShapeError("conv2d: output height nonpositive (H=" + std::to_string(H) + ", KH=" +
                         std::to_string(KH) + ", stride=" + std::to_string(stride) + ", pad=" + std::to_string(pad) + ")");
    if (W + 2 * pad < KW || OW <= 0)
        throw ShapeError("conv2d: output width nonpositive (W=" + std::to_string(W) + ", KW=" +
                         std::to_string(KW) + ", stride=" + std::to_string(stride) + ", pad=" + std::to_string(pad) + ")");

    int64_t colsz = static_cast<int64_t>(C) * KH * KW * OH * OW;
    std::vector<T> col(static_cast<size_t>(colsz));
    std::vector<T> out(static_cast<size_t>(N) * O * OH * OW, T(0));
    for (int n = 0; n < N; ++n) {
        detail::im2col(x.data().data() + static_cast<int64_t>(n) * C * H * W, C, H, W, KH, KW,
                       stride, pad, OH, OW, col.data());
        detail::gemm_nn(kernel.data().data(), col.data(),
                        out.data() + static_cast<int64_t>(n) * O * OH * OW, O, C * KH * KW, OH * OW);
    }

    auto px = x.node(), pk = kernel.node();
    return detail::make_result<T>(
        {N, O, OH, OW}, std::move(out), {px, pk},
        [px, pk, N, C, H, W, O, KH, KW, stride, pad, OH, OW](NodeT<T>& self) {
            std::vector<T> col(static_cast<size_t>(C) * KH * KW * OH * OW);
            std::vector<T> dcol(col.size());
            for (int n = 0; n < N; ++n) {
                const T* dy = self.grad.data() + static_cast<int64_t>(n) * O * OH * OW;
                if (pk->requires_grad) {
                    detail::im2col(px->data.data() + static_cast<int64_t>(n) * C * H * W, C, H, W,
                                   KH, KW, stride, pad, OH, OW, col.data());
                    detail::gemm_nt(dy, col.data(), pk->grad.data(), O, OH * OW, C * KH * KW);
                }
                if (px->requires_grad) {
                    std::fill(dcol.begin(), dcol.end(), T(0));
                    detail::gemm_tn(pk->data.data(), dy, dcol.data(), C * KH * KW, O, OH * OW);
                    detail::col2im(dcol.data(), C, H, W, KH, KW, stride, pad, OH, OW,
                                   px->grad.data() + static_cast<int64_t>(n) * C * H * W);
                }
            }
        });
}

// Fractionally-strided convolution. x[N,I,H,W], kernel[I,O,KH,KW] -> [N,O,OH,OW]
// with OH = (H-1)*stride + KH - 2*pad.
template <class T>
TensorT<T> conv_transpose2d(const TensorT<T>& x, const TensorT<T>& kernel, int stride, int pad) {
    detail::require(x.rank() == 4, "conv_transpose2d: input must be NCHW");
    detail::require(kernel.rank() == 4, "conv_transpose2d: kernel must be IOKhKw");
    int N = x.dim(0), I = x.dim(1), H = x.dim(2), W = x.dim(3);
    int KI = kernel.dim(0), O = kernel.dim(1), KH = kernel.dim(2), KW = kernel.dim(3);
    if (I != KI)
        throw ShapeError("conv_transpose2d: input channel dimension (" + std::to_string(I) +
                         ") does not match kernel input-channel dimension (" + std::to_string(KI) + ")");
    int OH = (H - 1) * stride + KH - 2 * pad;
    int OW = (W - 1) * stride + KW - 2 * pad;
    detail::require(OH > 0 && OW > 0, "conv_transpose2d: output extent nonpositive");

    // forward = col2im(kernel^T * x), the adjoint of conv2d's data path
    std::vector<T> colbuf(static_cast<size_t>(O) * KH * KW * H * W);
    std::vector<T> out(static_cast<size_t>(N) * O * OH * OW, T(0));
    for (int n = 0; n < N; ++n) {
        std::fill(colbuf.begin(), colbuf.end(), T(0));
        detail::gemm_tn(kernel.data().data(), x.data().data() + static_cast<int64_t>(n) * I * H * W,
                        colbuf.data(), O * KH * KW, I, H * W);
        detail::col2im(colbuf.data(), O, OH, OW, KH, KW, stride, pad, H, W,
                       out.data() + static_cast<int64_t>(n) * O * OH * OW);
    }

    auto px = x.node(), pk = kernel.node();
    return detail::make_result<T>(
        {N, O, OH, OW}, std::move(out), {px, pk},
        [px, pk, N, I, H, W, O, KH, KW, stride, pad, OH, OW](NodeT<T>& self) {
            std::vector<T> gcol(static_cast<size_t>(O) * KH * KW * H * W);
            for (int n = 0; n < N; ++n) {
                detail::im2col(self.grad.data() + static_cast<int64_t>(n) * O * OH * OW, O, OH, OW,
                               KH, KW, stride, pad, H, W, gcol.data());
                if (px->requires_grad)
                    detail::gemm_nn(pk->data.data(), gcol.data(),
                                    px->grad.data() + static_cast<int64_t>(n) * I * H * W, I,
                                    O * KH * KW, H * W);
                if (pk->requires_grad)
                    detail::gemm_nt(px->data.data() + static_cast<int64_t>(n) * I * H * W,
                                    gcol.data(), pk->grad.data(), I, H * W, O * KH * KW);
            }
        });
}

// Per-output-channel bias for NCHW maps.
template <class T>
TensorT<T> add_channel_bias(const TensorT<T>& x, const TensorT<T>& bias) {
    detail::require(x.rank() == 4 && bias.rank() == 1 && bias.dim(0) == x.dim(1),
                    "add_channel_bias: need x[N,C,H,W] and bias[C]");
    int N = x.dim(0), C = x.dim(1);
    int64_t HW = static_cast<int64_t>(x.dim(2)) * x.dim(3);
    std::vector<T> out(x.data().size());
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            int64_t base = (static_cast<int64_t>(n) * C + c) * HW;
            T b = bias.data()[c];
            for (int64_t i = 0; i < HW; ++i) out[base + i] = x.data()[base + i] + b;
        }
    auto px = x.node(), pb = bias.node();
    return detail::make_result<T>(x.shape(), std::move(out), {px, pb}, [px, pb, N, C, HW](NodeT<T>& self) {
        if (px->requires_grad)
            for (size_t i = 0; i < self.grad.size(); ++i) px->grad[i] += self.grad[i];
        if (pb->requires_grad)
            for (int n = 0; n < N; ++n)
                for (int c = 0; c < C; ++c) {
                    int64_t base = (static_cast<int64_t>(n) * C + c) * HW;
                    T acc = T(0);
                    for (int64_t i = 0; i < HW; ++i) acc += self.grad[base + i];
                    pb->grad[c] += acc;
                }
    });
}

// ---------------------------------------------------------------------------
// Shape plumbing
// ---------------------------------------------------------------------------

// [N,C,H,W] -> [N*H*W, C] site-major rows.
template <class T>
TensorT<T> chw_to_sites(const TensorT<T>& x) {
    detail::require(x.rank() == 4, "chw_to_sites: input must be NCHW");
    int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    int64_t HW = static_cast<int64_t>(H) * W;
    std::vector<T> out(x.data().size());
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int64_t i = 0; i < HW; ++i)
                out[(static_cast<int64_t>(n) * HW + i) * C + c] =
                    x.data()[(static_cast<int64_t>(n) * C + c) * HW + i];
    auto px = x.node();
    return detail::make_result<T>({static_cast<int>(N * HW), C}, std::move(out), {px},
                                  [px, N, C, HW](NodeT<T>& self) {
                                      if (!px->requires_grad) return;
                                      for (int n = 0; n < N; ++n)
                                          for (int c = 0; c < C; ++c)
                                              for (int64_t i = 0; i < HW; ++i)
                                                  px->grad[(static_cast<int64_t>(n) * C + c) * HW + i] +=
                                                      self.grad[(static_cast<int64_t>(n) * HW + i) * C + c];
                                  });
}

// [N*H*W, C] -> [N,C,H,W]
template <class T>
TensorT<T> sites_to_chw(const TensorT<T>& x, int N, int H, int W) {
    detail::require(x.rank() == 2, "sites_to_chw: input must be rank-2");
    detail::require(x.dim(0) == N * H * W, "sites_to_chw: row count does not match N*H*W");
    int C = x.dim(1);
    int64_t HW = static_cast<int64_t>(H) * W;
    std::vector<T> out(x.data().size());
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int64_t i = 0; i < HW; ++i)
                out[(static_cast<int64_t>(n) * C + c) * HW + i] =
                    x.data()[(static_cast<int64_t>(n) * HW + i) * C + c];
    auto px = x.node();
    return detail::make_result<T>({N, C, H, W}, std::move(out), {px},
                                  [px, N, C, HW](NodeT<T>& self) {
                                      if (!px->requires_grad) return;
                                      for (int n = 0; n < N; ++n)
                                          for (int c = 0; c < C; ++c)
                                              for (int64_t i = 0; i < HW; ++i)
                                                  px->grad[(static_cast<int64_t>(n) * HW + i) * C + c] +=
                                                      self.grad[(static_cast<int64_t>(n) * C + c) * HW + i];
                                  });
}

// Concatenate along axis 1 (channels for NCHW, columns for [S,C]).
template <class T>
TensorT<T> concat_axis1(const TensorT<T>& a, const TensorT<T>& b) {
    detail::require(a.rank() == b.rank() && (a.rank() == 2 || a.rank() == 4),
                    "concat_axis1: operands must both be rank-2 or rank-4");
    Shape sa = a.shape(), sb = b.shape();
    for (int i = 0; i < a.rank(); ++i)
        if (i != 1)
            detail::require(sa[static_cast<size_t>(i)] == sb[static_cast<size_t>(i)],
                            "concat_axis1: non-concat dimension " + std::to_string(i) + " differs");
    // Treat both layouts as [outer, axis1, inner].
    int outer = sa[0];
    int ca = sa[1], cb = sb[1];
    int64_t inner = 1;
    for (int i = 2; i < a.rank(); ++i) inner *= sa[static_cast<size_t>(i)];
    Shape os = sa;
    os[1] = ca + cb;
    std::vector<T> out(static_cast<size_t>(shape_numel(os)));
    for (int o = 0; o < outer; ++o) {
        std::copy_n(a.data().begin() + static_cast<int64_t>(o) * ca * inner, ca * inner,
                    out.begin() + static_cast<int64_t>(o) * (ca + cb) * inner);
        std::copy_n(b.data().begin() + static_cast<int64_t>(o) * cb * inner, cb * inner,
                    out.begin() + static_cast<int64_t>(o) * (ca + cb) * inner + ca * inner);
    }
    auto pa = a.node(), pb = b.node();
    return detail::make_result<T>(os, std::move(out), {pa, pb},
                                  [pa, pb, outer, ca, cb, inner](NodeT<T>& self) {
                                      for (int o = 0; o < outer; ++o) {
                                          const T* g = self.grad.data() + static_cast<int64_t>(o) * (ca + cb) * inner;
                                          if (pa->requires_grad) {
                                              T* ga = pa->grad.data() + static_cast<int64_t>(o) * ca * inner;
                                              for (int64_t i = 0; i < ca * inner; ++i) ga[i] += g[i];
                                          }
                                          if (pb->requires_grad) {
                                              T* gb = pb->grad.data() + static_cast<int64_t>(o) * cb * inner;
                                              for (int64_t i = 0; i < cb * inner; ++i) gb[i] += g[ca * inner + i];
                                          }
                                      }
                                  });
}

// ---------------------------------------------------------------------------
// Resizing
// ---------------------------------------------------------------------------

// Nearest-neighbor resize of NCHW maps; pixel-center convention. This path is
// non-differentiable: gradient stops here.
template <class T>
TensorT<T> resize_nearest(const TensorT<T>& x, int OH, int OW) {
    detail::require(x.rank() == 4, "resize_nearest: input must be NCHW");
    int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    std::vector<T> out(static_cast<size_t>(N) * C * OH * OW);
    double sh = static_cast<double>(H) / OH, sw = static_cast<double>(W) / OW;
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            const T* src = x.data().data() + (static_cast<int64_t>(n) * C + c) * H * W;
            T* dst = out.data() + (static_cast<int64_t>(n) * C + c) * OH * OW;
            for (int oh = 0; oh < OH; ++oh) {
                int ih = std::min(static_cast<int>((oh + 0.5) * sh), H - 1);
                for (int ow = 0; ow < OW; ++ow) {
                    int iw = std::min(static_cast<int>((ow + 0.5) * sw), W - 1);
                    dst[static_cast<int64_t>(oh) * OW + ow] = src[static_cast<int64_t>(ih) * W + iw];
                }
            }
        }
    return TensorT<T>::from_data({N, C, OH, OW}, std::move(out));
}

// Bilinear resize of NCHW maps (differentiable; half-pixel centers).
template <class T>
TensorT<T> resize_bilinear(const TensorT<T>& x, int OH, int OW) {
    detail::require(x.rank() == 4, "resize_bilinear: input must be NCHW");
    int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    double sh = static_cast<double>(H) / OH, sw = static_cast<double>(W) / OW;
    struct Tap {
        int i0, i1;
        T w0, w1;
    };
    std::vector<Tap> rows(static_cast<size_t>(OH)), cols(static_cast<size_t>(OW));
    auto make_tap = [](int o, double s, int limit) {
        double p = (o + 0.5) * s - 0.5;
        if (p < 0) p = 0;
        if (p > limit - 1) p = limit - 1;
        int i0 = static_cast<int>(p);
        int i1 = std::min(i0 + 1, limit - 1);
        T w1 = static_cast<T>(p - i0);
        return Tap{i0, i1, T(1) - w1, w1};
    };
    for (int oh = 0; oh < OH; ++oh) rows[static_cast<size_t>(oh)] = make_tap(oh, sh, H);
    for (int ow = 0; ow < OW; ++ow) cols[static_cast<size_t>(ow)] = make_tap(ow, sw, W);

    std::vector<T> out(static_cast<size_t>(N) * C * OH * OW);
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            const T* src = x.data().data() + (static_cast<int64_t>(n) * C + c) * H * W;
            T* dst = out.data() + (static_cast<int64_t>(n) * C + c) * OH * OW;
            for (int oh = 0; oh < OH; ++oh) {
                const Tap& r = rows[static_cast<size_t>(oh)];
                for (int ow = 0; ow < OW; ++ow) {
                    const Tap& q = cols[static_cast<size_t>(ow)];
                    dst[static_cast<int64_t>(oh) * OW + ow] =
                        r.w0 * (q.w0 * src[static_cast<int64_t>(r.i0) * W + q.i0] +
                                q.w1 * src[static_cast<int64_t>(r.i0) * W + q.i1]) +
                        r.w1 * (q.w0 * src[static_cast<int64_t>(r.i1) * W + q.i0] +
                                q.w1 * src[static_cast<int64_t>(r.i1) * W + q.i1]);
                }
            }
        }
    auto px = x.node();
    return detail::make_result<T>({N, C, OH, OW}, std::move(out), {px},
                                  [px, N, C, H, W, OH, OW, rows, cols](NodeT<T>& self) {
                                      if (!px->requires_grad) return;
                                      for (int n = 0; n < N; ++n)
                                          for (int c = 0; c < C; ++c) {
                                              T* gsrc = px->grad.data() + (static_cast<int64_t>(n) * C + c) * H * W;
                                              const T* g = self.grad.data() + (static_cast<int64_t>(n) * C + c) * OH * OW;
                                              for (int oh = 0; oh < OH; ++oh) {
                                                  const Tap& r = rows[static_cast<size_t>(oh)];
                                                  for (int ow = 0; ow < OW; ++ow) {
                                                      const Tap& q = cols[static_cast<size_t>(ow)];
                                                      T gv = g[static_cast<int64_t>(oh) * OW + ow];
                                                      gsrc[static_cast<int64_t>(r.i0) * W + q.i0] += r.w0 * q.w0 * gv;
                                                      gsrc[static_cast<int64_t>(r.i0) * W + q.i1] += r.w0 * q.w1 * gv;
                                                      gsrc[static_cast<int64_t>(r.i1) * W + q.i0] += r.w1 * q.w0 * gv;
                                                      gsrc[static_cast<int64_t>(r.i1) * W + q.i1] += r.w1 * q.w1 * gv;
                                                  }
                                              }
                                          }
                                  });
}

// ---------------------------------------------------------------------------
// Softmax family
// ---------------------------------------------------------------------------

// Row softmax for [S,C]: each site's class vector sums to 1.
template <class T>
TensorT<T> softmax_rows(const TensorT<T>& x) {
    detail::require(x.rank() == 2, "softmax_rows: input must be [S,C]");
    int S = x.dim(0), C = x.dim(1);
    std::vector<T> out(x.data().size());
    for (int s = 0; s < S; ++s) {
        const T* row = x.data().data() + static_cast<int64_t>(s) * C;
        T* o = out.data() + static_cast<int64_t>(s) * C;
        T mx = row[0];
        for (int c = 1; c < C; ++c) mx = std::max(mx, row[c]);
        T sum = T(0);
        for (int c = 0; c < C; ++c) {
            o[c] = std::exp(row[c] - mx);
            sum += o[c];
        }
        T inv = T(1) / sum;
        for (int c = 0; c < C; ++c) o[c] *= inv;
    }
    auto px = x.node();
    auto res = detail::make_result<T>(x.shape(), std::move(out), {px}, nullptr);
    auto pn = res.node();
    if (pn->requires_grad) {
        pn->backward_fn = [px, S, C](NodeT<T>& self) {
            if (!px->requires_grad) return;
            for (int s = 0; s < S; ++s) {
                const T* y = self.data.data() + static_cast<int64_t>(s) * C;
                const T* gy = self.grad.data() + static_cast<int64_t>(s) * C;
                T* gx = px->grad.data() + static_cast<int64_t>(s) * C;
                T dot = T(0);
                for (int c = 0; c < C; ++c) dot += gy[c] * y[c];
                for (int c = 0; c < C; ++c) gx[c] += y[c] * (gy[c] - dot);
            }
        };
    }
    return res;
}

// Channel softmax for NCHW maps.
template <class T>
TensorT<T> softmax_channels(const TensorT<T>& x) {
    detail::require(x.rank() == 4, "softmax_channels: input must be NCHW");
    int N = x.dim(0), H = x.dim(2), W = x.dim(3);
    auto sites = chw_to_sites(x);
    auto sm = softmax_rows(sites);
    return sites_to_chw(sm, N, H, W);
}

// Mean over included sites of -log softmax(logits) at the one-hot class.
// Sites whose target row is all-zero are excluded from the mean.
template <class T>
TensorT<T> softmax_cross_entropy(const TensorT<T>& logits, const TensorT<T>& target) {
    detail::require(logits.rank() == 2, "softmax_cross_entropy: logits must be [S,C]");
    detail::require(logits.shape() == target.shape(),
                    "softmax_cross_entropy: logits " + shape_str(logits.shape()) +
                        " and target " + shape_str(target.shape()) + " differ");
    int S = logits.dim(0), C = logits.dim(1);
    // target class per site; -1 = excluded
    auto cls = std::make_shared<std::vector<int>>(static_cast<size_t>(S), -1);
    int included = 0;
    for (int s = 0; s < S; ++s) {
        const T* trow = target.data().data() + static_cast<int64_t>(s) * C;
        for (int c = 0; c < C; ++c) {
            if (trow[c] != T(0)) {
                (*cls)[static_cast<size_t>(s)] = c;
                ++included;
                break;
            }
        }
    }
    if (included == 0) throw ValidationError("softmax_cross_entropy: every site is excluded (all-zero targets)");

    T inv = T(1) / static_cast<T>(included);
    T loss = T(0);
    for (int s = 0; s < S; ++s) {
        int tc = (*cls)[static_cast<size_t>(s)];
        if (tc < 0) continue;
        const T* row = logits.data().data() + static_cast<int64_t>(s) * C;
        T mx = row[0];
        for (int c = 1; c < C; ++c) mx = std::max(mx, row[c]);
        T sum = T(0);
        for (int c = 0; c < C; ++c) sum += std::exp(row[c] - mx);
        loss += (mx + std::log(sum)) - row[tc];
    }
    auto pl = logits.node(), pt = target.node();
    return detail::make_result<T>({1}, {loss * inv}, {pl, pt}, [pl, cls, S, C, inv](NodeT<T>& self) {
        if (!pl->requires_grad) return;
        T g = self.grad[0] * inv;
        for (int s = 0; s < S; ++s) {
            int tc = (*cls)[static_cast<size_t>(s)];
            if (tc < 0) continue;
            const T* row = pl->data.data() + static_cast<int64_t>(s) * C;
            T* grow = pl->grad.data() + static_cast<int64_t>(s) * C;
            T mx = row[0];
            for (int c = 1; c < C; ++c) mx = std::max(mx, row[c]);
            T sum = T(0);
            for (int c = 0; c < C; ++c) sum += std::exp(row[c] - mx);
            T invsum = T(1) / sum;
            for (int c = 0; c < C; ++c) {
                T p = std::exp(row[c] - mx) * invsum;
                grow[c] += g * (p - (c == tc ? T(1) : T(0)));
            }
        }
    });
}

// ---------------------------------------------------------------------------
// Label propagation kernels
// ---------------------------------------------------------------------------

// Cosine-similarity top-K label transfer, pre-softmax.
//
// For each target site i: out_i = (1/K) * sum over the K source sites j with
// the highest cosine similarity to i (ties to lowest j, summed in ascending
// j) of cos(i,j) * y_src_j. Zero-norm feature vectors have similarity 0
// against everything. The float accumulation order (channel-order dots,
// ascending-j sums) is part of the contract.
template <class T>
TensorT<T> cosine_topk_propagate(const TensorT<T>& f_src, const TensorT<T>& f_tgt,
                                 const TensorT<T>& y_src, int K) {
    detail::require(f_src.rank() == 2 && f_tgt.rank() == 2 && y_src.rank() == 2,
                    "cosine_topk_propagate: all inputs must be rank-2 site matrices");
    detail::require(f_src.dim(1) == f_tgt.dim(1), "cosine_topk_propagate: feature dims differ");
    detail::require(y_src.dim(0) == f_src.dim(0),
                    "cosine_topk_propagate: y_src rows must match source sites");
    int Ss = f_src.dim(0), St = f_tgt.dim(0), D = f_src.dim(1), C = y_src.dim(1);
    if (K < 1 || K > Ss)
        throw ValidationError("cosine_topk_propagate: K=" + std::to_string(K) +
                              " outside [1, source site count " + std::to_string(Ss) + "]");

    auto norm_of = [D](const T* v) {
        T acc = T(0);
        for (int d = 0; d < D; ++d) acc += v[d] * v[d];
        return std::sqrt(acc);
    };
    std::vector<T> nsrc(static_cast<size_t>(Ss)), ntgt(static_cast<size_t>(St));
    for (int j = 0; j < Ss; ++j) nsrc[static_cast<size_t>(j)] = norm_of(f_src.data().data() + static_cast<int64_t>(j) * D);
    for (int i = 0; i < St; ++i) ntgt[static_cast<size_t>(i)] = norm_of(f_tgt.data().data() + static_cast<int64_t>(i) * D);

    std::vector<T> out(static_cast<size_t>(St) * C, T(0));
    // selected source indices and similarities per target site, saved for backward
    auto sel = std::make_shared<std::vector<int>>(static_cast<size_t>(St) * K);
    auto selsim = std::make_shared<std::vector<T>>(static_cast<size_t>(St) * K);

    std::vector<T> sims(static_cast<size_t>(Ss));
    std::vector<int> idx(static_cast<size_t>(Ss));
    T invK = T(1) / static_cast<T>(K);
    for (int i = 0; i < St; ++i) {
        const T* ft = f_tgt.data().data() + static_cast<int64_t>(i) * D;
        for (int j = 0; j < Ss; ++j) {
            const T* fs = f_src.data().data() + static_cast<int64_t>(j) * D;
            T denom = ntgt[static_cast<size_t>(i)] * nsrc[static_cast<size_t>(j)];
            if (denom == T(0)) {
                sims[static_cast<size_t>(j)] = T(0);
                continue;
            }
            T dot = T(0);
            for (int d = 0; d < D; ++d) dot += ft[d] * fs[d];
            sims[static_cast<size_t>(j)] = dot / denom;
        }
        for (int j = 0; j < Ss; ++j) idx[static_cast<size_t>(j)] = j;
        std::partial_sort(idx.begin(), idx.begin() + K, idx.end(), [&sims](int a, int b) {
            if (sims[static_cast<size_t>(a)] != sims[static_cast<size_t>(b)])
                return sims[static_cast<size_t>(a)] > sims[static_cast<size_t>(b)];
            return a < b;
        });
        std::sort(idx.begin(), idx.begin() + K);  // accumulate in ascending j
        T* orow = out.data() + static_cast<int64_t>(i) * C;
        for (int k = 0; k < K; ++k) {
            int j = idx[static_cast<size_t>(k)];
            T m = sims[static_cast<size_t>(j)];
            (*sel)[static_cast<size_t>(i) * K + k] = j;
            (*selsim)[static_cast<size_t>(i) * K + k] = m;
            const T* yrow = y_src.data().data() + static_cast<int64_t>(j) * C;
            for (int c = 0; c < C; ++c) orow[c] += m * yrow[c];
        }
        for (int c = 0; c < C; ++c) orow[c] *= invK;
    }

    auto pfs = f_src.node(), pft = f_tgt.node(), py = y_src.node();
    return detail::make_result<T>(
        {St, C}, std::move(out), {pfs, pft, py},
        [pfs, pft, py, sel, selsim, nsrc, ntgt, St, D, C, K, invK](NodeT<T>& self) {
            for (int i = 0; i < St; ++i) {
                const T* gout = self.grad.data() + static_cast<int64_t>(i) * C;
                const T* ft = pft->data.data() + static_cast<int64_t>(i) * D;
                T nt = ntgt[static_cast<size_t>(i)];
                for (int k = 0; k < K; ++k) {
                    int j = (*sel)[static_cast<size_t>(i) * K + k];
                    T m = (*selsim)[static_cast<size_t>(i) * K + k];
                    const T* yrow = py->data.data() + static_cast<int64_t>(j) * C;
                    // dL/dm and dL/dy
                    T dm = T(0);
                    for (int c = 0; c < C; ++c) dm += gout[c] * yrow[c];
                    dm *= invK;
                    if (py->requires_grad) {
                        T* gy = py->grad.data() + static_cast<int64_t>(j) * C;
                        for (int c = 0; c < C; ++c) gy[c] += invK * m * gout[c];
                    }
                    T ns = nsrc[static_cast<size_t>(j)];
                    T denom = nt * ns;
                    if (denom == T(0)) continue;  // similarity is constant 0
                    const T* fs = pfs->data.data() + static_cast<int64_t>(j) * D;
                    if (pft->requires_grad) {
                        T* gt = pft->grad.data() + static_cast<int64_t>(i) * D;
                        for (int d = 0; d < D; ++d)
                            gt[d] += dm * (fs[d] / denom - m * ft[d] / (nt * nt));
                    }
                    if (pfs->requires_grad) {
                        T* gs = pfs->grad.data() + static_cast<int64_t>(j) * D;
                        for (int d = 0; d < D; ++d)
                            gs[d] += dm * (ft[d] / denom - m * fs[d] / (ns * ns));
                    }
                }
            }
        });
}

// K=1 heatmap transfer: each target site copies the heatmap vector of its
// most cosine-similar source site (ties to lowest index). No similarity
// scaling and no softmax; gradient flows only into the copied vectors.
template <class T>
TensorT<T> nearest_feature_copy(const TensorT<T>& f_src, const TensorT<T>& f_tgt,
                                const TensorT<T>& y_src) {
    detail::require(f_src.rank() == 2 && f_tgt.rank() == 2 && y_src.rank() == 2,
                    "nearest_feature_copy: all inputs must be rank-2 site matrices");
    detail::require(f_src.dim(1) == f_tgt.dim(1), "nearest_feature_copy: feature dims differ");
    detail::require(y_src.dim(0) == f_src.dim(0),
                    "nearest_feature_copy: y_src rows must match source sites");
    int Ss = f_src.dim(0), St = f_tgt.dim(0), D = f_src.dim(1), C = y_src.dim(1);

    auto norm_of = [D](const T* v) {
        T acc = T(0);
        for (int d = 0; d < D; ++d) acc += v[d] * v[d];
        return std::sqrt(acc);
    };
    std::vector<T> nsrc(static_cast<size_t>(Ss));
    for (int j = 0; j < Ss; ++j) nsrc[static_cast<size_t>(j)] = norm_of(f_src.data().data() + static_cast<int64_t>(j) * D);

    auto sel = std::make_shared<std::vector<int>>(static_cast<size_t>(St));
    std::vector<T> out(static_cast<size_t>(St) * C);
    for (int i = 0; i < St; ++i) {
        const T* ft = f_tgt.data().data() + static_cast<int64_t>(i) * D;
        T ntv = norm_of(ft);
        int best = 0;
        T bestsim = -std::numeric_limits<T>::infinity();
        for (int j = 0; j < Ss; ++j) {
            T denom = ntv * nsrc[static_cast<size_t>(j)];
            T simv = T(0);
            if (denom != T(0)) {
                const T* fs = f_src.data().data() + static_cast<int64_t>(j) * D;
                T dot = T(0);
                for (int d = 0; d < D; ++d) dot += ft[d] * fs[d];
                simv = dot / denom;
            }
            if (simv > bestsim) {
                bestsim = simv;
                best = j;
            }
        }
        (*sel)[static_cast<size_t>(i)] = best;
        std::copy_n(y_src.data().begin() + static_cast<int64_t>(best) * C, C,
                    out.begin() + static_cast<int64_t>(i) * C);
    }
    auto pfs = f_src.node(), pft = f_tgt.node(), py = y_src.node();
    return detail::make_result<T>({St, C}, std::move(out), {pfs, pft, py},
                                  [py, sel, St, C](NodeT<T>& self) {
                                      if (!py->requires_grad) return;
                                      for (int i = 0; i < St; ++i) {
                                          int j = (*sel)[static_cast<size_t>(i)];
                                          T* gy = py->grad.data() + static_cast<int64_t>(j) * C;
                                          const T* g = self.grad.data() + static_cast<int64_t>(i) * C;
                                          for (int c = 0; c < C; ++c) gy[c] += g[c];
                                      }
                                  });
}

// ---------------------------------------------------------------------------
// Non-differentiable helpers
// ---------------------------------------------------------------------------

// Row-wise argmax of [S,C]; ties to the lowest class index.
template <class T>
std::vector<int> argmax_rows(const TensorT<T>& x) {
    int S = x.dim(0), C = x.dim(1);
    std::vector<int> out(static_cast<size_t>(S));
    for (int s = 0; s < S; ++s) {
        const T* row = x.data().data() + static_cast<int64_t>(s) * C;
        int best = 0;
        for (int c = 1; c < C; ++c)
            if (row[c] > row[best]) best = c;
        out[static_cast<size_t>(s)] = best;
    }
    return out;
}

template <class T>
TensorT<T> onehot_rows(const std::vector<int>& cls, int C) {
    int S = static_cast<int>(cls.size());
    std::vector<T> out(static_cast<size_t>(S) * C, T(0));
    for (int s = 0; s < S; ++s) out[static_cast<size_t>(s) * C + cls[static_cast<size_t>(s)]] = T(1);
    return TensorT<T>::from_data({S, C}, std::move(out));
}

}  // namespace ops
}  // namespace spnlab
