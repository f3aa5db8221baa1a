#pragma once

// Central finite-difference oracle for reverse-mode gradients (64-bit).

#include <functional>
#include <vector>

#include "spnlab/tensor.hpp"

namespace spnlab {

struct GradCheckResult {
    double max_err = 0;        // |analytic - numeric| / max(|a|, |n|, 1)
    int64_t checked = 0;
    bool ok(double tol) const { return checked > 0 && max_err < tol; }
};

// fn must rebuild the graph from the given leaves on every call and return a
// scalar. Leaves are perturbed in place.
inline GradCheckResult gradcheck(const std::function<TensorD()>& fn, std::vector<TensorD> leaves,
                                 double h = 1e-3) {
    for (auto& l : leaves) {
        l.set_requires_grad(true);
        l.zero_grad();
    }
    auto root = fn();
    backward(root);
    std::vector<std::vector<double>> analytic;
    analytic.reserve(leaves.size());
    for (auto& l : leaves) {
        if (l.grad().empty())
            analytic.emplace_back(l.data().size(), 0.0);
        else
            analytic.push_back(l.grad());
    }

    GradCheckResult res;
    for (size_t li = 0; li < leaves.size(); ++li) {
        auto& data = leaves[li].data();
        for (size_t i = 0; i < data.size(); ++i) {
            double x0 = data[i];
            double step = h * std::max(1.0, std::abs(x0));
            data[i] = x0 + step;
            double f1 = fn().item();
            data[i] = x0 - step;
            double f2 = fn().item();
            data[i] = x0;
            double numeric = (f1 - f2) / (2 * step);
            double a = analytic[li][i];
            double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1.0});
            res.max_err = std::max(res.max_err, err);
            ++res.checked;
        }
    }
    return res;
}

}  // namespace spnlab
