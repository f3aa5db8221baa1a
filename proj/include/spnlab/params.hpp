#pragma once

#include <string>
#include <vector>

#include "spnlab/rng.hpp"
#include "spnlab/tensor.hpp"

namespace spnlab {

template <class T>
struct ParamT {
    std::string name;
    TensorT<T> tensor;
};

template <class T>
using ParamListT = std::vector<ParamT<T>>;

using Param = ParamT<float>;
using ParamList = ParamListT<float>;

// Kaiming-uniform init for conv kernels [O,I,KH,KW].
template <class T>
TensorT<T> init_conv_kernel(Rng& rng, int O, int I, int KH, int KW) {
    int fan_in = I * KH * KW;
    double bound = std::sqrt(2.0 / fan_in);
    std::vector<T> d(static_cast<size_t>(O) * I * KH * KW);
    for (auto& v : d) v = static_cast<T>(rng.uniform(-bound, bound));
    return TensorT<T>::from_data({O, I, KH, KW}, std::move(d), /*requires_grad=*/true);
}

template <class T>
TensorT<T> init_linear_weight(Rng& rng, int in, int out) {
    double bound = std::sqrt(2.0 / in);
    std::vector<T> d(static_cast<size_t>(in) * out);
    for (auto& v : d) v = static_cast<T>(rng.uniform(-bound, bound));
    return TensorT<T>::from_data({in, out}, std::move(d), /*requires_grad=*/true);
}

template <class T>
TensorT<T> init_zero_vector(int n) {
    return TensorT<T>::from_data({n}, std::vector<T>(static_cast<size_t>(n), T(0)),
                                 /*requires_grad=*/true);
}

template <class T>
void zero_grads(ParamListT<T>& params) {
    for (auto& p : params) p.tensor.zero_grad();
}

template <class T>
void freeze(ParamListT<T>& params) {
    for (auto& p : params) p.tensor.set_requires_grad(false);
}

}  // namespace spnlab
