#pragma once

#include <cmath>
#include <vector>

#include "spnlab/params.hpp"

namespace spnlab {

// Momentum SGD; learning rate supplied per step (poly policy lives in the
// training loop).
class SgdMomentum {
public:
    SgdMomentum(ParamList* params, float momentum) : params_(params), momentum_(momentum) {
        for (auto& p : *params_) velocity_.emplace_back(p.tensor.data().size(), 0.0f);
    }

    void step(float lr) {
        for (size_t i = 0; i < params_->size(); ++i) {
            auto& t = (*params_)[i].tensor;
            if (!t.requires_grad() || t.grad().empty()) continue;
            auto& v = velocity_[i];
            const auto& g = t.grad();
            auto& d = t.data();
            for (size_t k = 0; k < d.size(); ++k) {
                v[k] = momentum_ * v[k] + g[k];
                d[k] -= lr * v[k];
            }
        }
    }

    void zero_grad() { zero_grads(*params_); }

private:
    ParamList* params_;
    float momentum_;
    std::vector<std::vector<float>> velocity_;
};

class Adam {
public:
    Adam(ParamList* params, float lr, float beta1 = 0.9f, float beta2 = 0.999f, float eps = 1e-8f)
        : params_(params), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
        for (auto& p : *params_) {
            m_.emplace_back(p.tensor.data().size(), 0.0f);
            v_.emplace_back(p.tensor.data().size(), 0.0f);
        }
    }

    void set_lr(float lr) { lr_ = lr; }
    float lr() const { return lr_; }

    void step() {
        ++t_;
        float bc1 = 1.0f - std::pow(beta1_, static_cast<float>(t_));
        float bc2 = 1.0f - std::pow(beta2_, static_cast<float>(t_));
        for (size_t i = 0; i < params_->size(); ++i) {
            auto& t = (*params_)[i].tensor;
            if (!t.requires_grad() || t.grad().empty()) continue;
            const auto& g = t.grad();
            auto& d = t.data();
            auto& m = m_[i];
            auto& v = v_[i];
            for (size_t k = 0; k < d.size(); ++k) {
                m[k] = beta1_ * m[k] + (1.0f - beta1_) * g[k];
                v[k] = beta2_ * v[k] + (1.0f - beta2_) * g[k] * g[k];
                float mhat = m[k] / bc1;
                float vhat = v[k] / bc2;
                d[k] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

    void zero_grad() { zero_grads(*params_); }

private:
    ParamList* params_;
    float lr_, beta1_, beta2_, eps_;
    int t_ = 0;
    std::vector<std::vector<float>> m_, v_;
};

// Poly learning-rate policy: base * (1 - i/i_total)^power.
inline float poly_lr(float base, int64_t step, int64_t total_steps, float power) {
    double frac = total_steps > 0 ? static_cast<double>(step) / static_cast<double>(total_steps) : 1.0;
    if (frac > 1.0) frac = 1.0;
    return static_cast<float>(base * std::pow(1.0 - frac, power));
}

}  // namespace spnlab
