#pragma once

#include <cmath>
#include <vector>

#include "foga/core/tensor.hpp"
#include "foga/nn/param.hpp"

namespace foga {

template <class T>
class Adam {
public:
    Adam() = default;
    Adam(ParamList<T> params, T lr, T beta1 = T(0.9), T beta2 = T(0.999),
         T eps = T(1e-8))
        : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
        m_.reserve(params_.size());
        v_.reserve(params_.size());
        for (const auto& p : params_) {
            m_.push_back(Tensor<T>::zeros_like(p.param->value));
            v_.push_back(Tensor<T>::zeros_like(p.param->value));
        }
    }

    void zero_grad() {
        for (auto& p : params_) p.param->zero_grad();
    }

    /// Optional global gradient clipping by L2 norm; 0 disables.
    void clip_grad_norm(T max_norm) {
        if (max_norm <= T(0)) return;
        double sq = 0.0;
        for (auto& p : params_)
            for (std::size_t i = 0; i < p.param->grad.size(); ++i)
                sq += static_cast<double>(p.param->grad[i]) * p.param->grad[i];
        const double norm = std::sqrt(sq);
        if (norm <= static_cast<double>(max_norm)) return;
        const T scale = static_cast<T>(max_norm / (norm + 1e-12));
        for (auto& p : params_)
            for (std::size_t i = 0; i < p.param->grad.size(); ++i)
                p.param->grad[i] *= scale;
    }

    void step() {
        ++t_;
        const T bc1 = T(1) - static_cast<T>(std::pow(beta1_, t_));
        const T bc2 = T(1) - static_cast<T>(std::pow(beta2_, t_));
        for (std::size_t k = 0; k < params_.size(); ++k) {
            Tensor<T>& val = params_[k].param->value;
            Tensor<T>& grad = params_[k].param->grad;
            Tensor<T>& m = m_[k];
            Tensor<T>& v = v_[k];
            for (std::size_t i = 0; i < val.size(); ++i) {
                const T g = grad[i];
                m[i] = beta1_ * m[i] + (T(1) - beta1_) * g;
                v[i] = beta2_ * v[i] + (T(1) - beta2_) * g * g;
                const T mhat = m[i] / bc1;
                const T vhat = v[i] / bc2;
                val[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

    long step_count() const { return t_; }

private:
    ParamList<T> params_;
    T lr_ = T(1e-3), beta1_ = T(0.9), beta2_ = T(0.999), eps_ = T(1e-8);
    long t_ = 0;
    std::vector<Tensor<T>> m_, v_;
};

}  // namespace foga
