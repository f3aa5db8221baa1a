#pragma once

#include <vector>

#include "spnlab/rng.hpp"
#include "spnlab/tensor.hpp"

namespace spnlab::testing {

template <class T>
TensorT<T> random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0,
                         bool requires_grad = false) {
    std::vector<T> d(static_cast<size_t>(shape_numel(shape)));
    for (auto& v : d) v = static_cast<T>(rng.uniform(lo, hi));
    return TensorT<T>::from_data(std::move(shape), std::move(d), requires_grad);
}

// Random values bounded away from zero (for kink-free relu grad checks).
template <class T>
TensorT<T> random_tensor_away_from(Rng& rng, Shape shape, double margin) {
    std::vector<T> d(static_cast<size_t>(shape_numel(shape)));
    for (auto& v : d) {
        double x = rng.uniform(margin, 1.0);
        v = static_cast<T>(rng.bernoulli(0.5) ? x : -x);
    }
    return TensorT<T>::from_data(std::move(shape), std::move(d));
}

}  // namespace spnlab::testing
