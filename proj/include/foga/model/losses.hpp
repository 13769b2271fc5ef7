#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "foga/core/errors.hpp"
#include "foga/core/tensor.hpp"
#include "foga/model/backbone.hpp"

namespace foga {

struct SsimConfig {
    int window = 11;
    double window_std = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 2.0;  // values live in [-1, 1]

    void validate() const {
        if (window < 3 || window % 2 == 0)
            throw config_error("ssim: window must be odd and >= 3");
        if (window_std <= 0) throw config_error("ssim: window std must be positive");
    }
};

struct LossMask {
    bool use_pred = true;
    bool use_fc = true;
    bool use_con = true;
    bool use_grad = true;  // gradient term inside both prediction losses
};

template <class T>
struct LossBreakdown {
    T l_pred = T(0);
    T l_fc = T(0);
    T l_con = T(0);
    T total = T(0);
    LossMask mask;
};

namespace detail {

template <class T>
std::vector<T> gaussian_window(int size, double stddev) {
    std::vector<T> k(static_cast<std::size_t>(size) * size);
    std::vector<double> g(size);
    const double c = (size - 1) / 2.0;
    double sum = 0;
    for (int i = 0; i < size; ++i) {
        g[i] = std::exp(-(i - c) * (i - c) / (2.0 * stddev * stddev));
        sum += g[i];
    }
    for (auto& v : g) v /= sum;
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) k[static_cast<std::size_t>(i) * size + j] =
            static_cast<T>(g[i] * g[j]);
    return k;
}

/// Valid-region windowed correlation of every (n, c) plane.
template <class T>
Tensor<T> window_corr(const Tensor<T>& x, const std::vector<T>& k, int win) {
    const int oh = x.h() - win + 1, ow = x.w() - win + 1;
    Tensor<T> y(x.n(), x.c(), oh, ow);
    for (int n = 0; n < x.n(); ++n) {
        for (int c = 0; c < x.c(); ++c) {
            const T* s = x.plane(n, c);
            T* d = y.plane(n, c);
            for (int i = 0; i < oh; ++i) {
                for (int j = 0; j < ow; ++j) {
                    T acc = T(0);
                    for (int u = 0; u < win; ++u) {
                        const T* row = s + static_cast<std::size_t>(i + u) * x.w() + j;
                        const T* kr = k.data() + static_cast<std::size_t>(u) * win;
                        for (int v = 0; v < win; ++v) acc += kr[v] * row[v];
                    }
                    d[static_cast<std::size_t>(i) * ow + j] = acc;
                }
            }
        }
    }
    return y;
}

/// Adjoint of window_corr: scatter gy back onto the input grid.
template <class T>
void window_corr_adjoint(const Tensor<T>& gy, const std::vector<T>& k, int win,
                         Tensor<T>& gx) {
    const int oh = gy.h(), ow = gy.w();
    for (int n = 0; n < gy.n(); ++n) {
        for (int c = 0; c < gy.c(); ++c) {
            const T* g = gy.plane(n, c);
            T* d = gx.plane(n, c);
            for (int i = 0; i < oh; ++i) {
                for (int j = 0; j < ow; ++j) {
                    const T gv = g[static_cast<std::size_t>(i) * ow + j];
                    if (gv == T(0)) continue;
                    for (int u = 0; u < win; ++u) {
                        T* row = d + static_cast<std::size_t>(i + u) * gx.w() + j;
                        const T* kr = k.data() + static_cast<std::size_t>(u) * win;
                        for (int v = 0; v < win; ++v) row[v] += gv * kr[v];
                    }
                }
            }
        }
    }
}

template <class T>
Tensor<T> elementwise_product(const Tensor<T>& a, const Tensor<T>& b) {
    Tensor<T> y = a;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= b[i];
    return y;
}

}  // namespace detail

/// Mean squared intensity difference.
template <class T>
T intensity_loss(const Tensor<T>& pred, const Tensor<T>& gt, Tensor<T>* grad_pred = nullptr) {
    if (!pred.same_shape(gt))
        throw config_error("intensity_loss: shape mismatch " + pred.shape_str() + " vs " +
                           gt.shape_str());
    const T inv_n = T(1) / static_cast<T>(pred.size());
    T loss = T(0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const T d = pred[i] - gt[i];
        loss += d * d;
    }
    loss *= inv_n;
    if (grad_pred) {
        *grad_pred = Tensor<T>::zeros_like(pred);
        for (std::size_t i = 0; i < pred.size(); ++i)
            (*grad_pred)[i] = T(2) * (pred[i] - gt[i]) * inv_n;
    }
    return loss;
}

/// Absolute-gradient difference with forward differences along each spatial
/// axis; the trailing boundary row/column has no difference and is excluded.
/// The two axis terms are each averaged over their own valid positions.
template <class T>
T gradient_loss(const Tensor<T>& pred, const Tensor<T>& gt, Tensor<T>* grad_pred = nullptr) {
    if (!pred.same_shape(gt))
        throw config_error("gradient_loss: shape mismatch");
    if (pred.h() < 2 || pred.w() < 2)
        throw config_error("gradient_loss: needs H, W >= 2");
    const int H = pred.h(), W = pred.w();
    const T inv_h = T(1) / (static_cast<T>(pred.n()) * pred.c() * (H - 1) * W);
    const T inv_w = T(1) / (static_cast<T>(pred.n()) * pred.c() * H * (W - 1));
    if (grad_pred) *grad_pred = Tensor<T>::zeros_like(pred);
    auto sgn = [](T v) { return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0)); };
    T loss_h = T(0), loss_w = T(0);
    for (int n = 0; n < pred.n(); ++n) {
        for (int c = 0; c < pred.c(); ++c) {
            const T* p = pred.plane(n, c);
            const T* g = gt.plane(n, c);
            T* gp = grad_pred ? grad_pred->plane(n, c) : nullptr;
            for (int i = 0; i < H; ++i) {
                for (int j = 0; j < W; ++j) {
                    const std::size_t o = static_cast<std::size_t>(i) * W + j;
                    if (i + 1 < H) {
                        const T dp = p[o + W] - p[o];
                        const T dg = g[o + W] - g[o];
                        const T u = std::abs(dg) - std::abs(dp);
                        loss_h += std::abs(u);
                        if (gp) {
                            const T v = -sgn(u) * sgn(dp) * inv_h;
                            gp[o + W] += v;
                            gp[o] -= v;
                        }
                    }
                    if (j + 1 < W) {
                        const T dp = p[o + 1] - p[o];
                        const T dg = g[o + 1] - g[o];
                        const T u = std::abs(dg) - std::abs(dp);
                        loss_w += std::abs(u);
                        if (gp) {
                            const T v = -sgn(u) * sgn(dp) * inv_w;
                            gp[o + 1] += v;
                            gp[o] -= v;
                        }
                    }
                }
            }
        }
    }
    return loss_h * inv_h + loss_w * inv_w;
}

/// Mean local SSIM over Gaussian-weighted valid windows; symmetric in (a, b).
/// Optional grads receive d(ssim)/da and d(ssim)/db.
template <class T>
T ssim(const Tensor<T>& a, const Tensor<T>& b, const SsimConfig& cfg = {},
       Tensor<T>* grad_a = nullptr, Tensor<T>* grad_b = nullptr) {
    cfg.validate();
    if (!a.same_shape(b)) throw config_error("ssim: shape mismatch");
    if (cfg.window > a.h() || cfg.window > a.w())
        throw config_error("ssim: window " + std::to_string(cfg.window) +
                           " larger than image " + a.shape_str());
    const int win = cfg.window;
    const auto kern = detail::gaussian_window<T>(win, cfg.window_std);
    const T c1 = static_cast<T>(cfg.k1 * cfg.dynamic_range * cfg.k1 * cfg.dynamic_range);
    const T c2 = static_cast<T>(cfg.k2 * cfg.dynamic_range * cfg.k2 * cfg.dynamic_range);

    Tensor<T> mu_a = detail::window_corr(a, kern, win);
    Tensor<T> mu_b = detail::window_corr(b, kern, win);
    Tensor<T> p_aa = detail::window_corr(detail::elementwise_product(a, a), kern, win);
    Tensor<T> p_bb = detail::window_corr(detail::elementwise_product(b, b), kern, win);
    Tensor<T> p_ab = detail::window_corr(detail::elementwise_product(a, b), kern, win);

    const std::size_t n_pos = mu_a.size();
    const T q = T(1) / static_cast<T>(n_pos);
    T total = T(0);
    Tensor<T> d_mu_a, d_mu_b, d_p_aa, d_p_bb, d_p_ab;
    const bool want_grad = grad_a || grad_b;
    if (want_grad) {
        d_mu_a = Tensor<T>::zeros_like(mu_a);
        d_mu_b = Tensor<T>::zeros_like(mu_a);
        d_p_aa = Tensor<T>::zeros_like(mu_a);
        d_p_bb = Tensor<T>::zeros_like(mu_a);
        d_p_ab = Tensor<T>::zeros_like(mu_a);
    }
    for (std::size_t i = 0; i < n_pos; ++i) {
        const T ma = mu_a[i], mb = mu_b[i];
        const T n1 = T(2) * ma * mb + c1;
        const T n2 = T(2) * (p_ab[i] - ma * mb) + c2;
        const T d1 = ma * ma + mb * mb + c1;
        const T d2 = (p_aa[i] - ma * ma) + (p_bb[i] - mb * mb) + c2;
        const T s = (n1 * n2) / (d1 * d2);
        total += s;
        if (want_grad) {
            const T inv_dd = T(1) / (d1 * d2);
            d_p_ab[i] = q * T(2) * n1 * inv_dd;
            d_p_aa[i] = q * (-s / d2);
            d_p_bb[i] = q * (-s / d2);
            d_mu_a[i] = q * ((T(2) * mb * n2 - T(2) * mb * n1) * inv_dd -
                             s * (T(2) * ma / d1) + s * (T(2) * ma / d2));
            d_mu_b[i] = q * ((T(2) * ma * n2 - T(2) * ma * n1) * inv_dd -
                             s * (T(2) * mb / d1) + s * (T(2) * mb / d2));
        }
    }
    if (grad_a) {
        *grad_a = Tensor<T>::zeros_like(a);
        detail::window_corr_adjoint(d_mu_a, kern, win, *grad_a);
        Tensor<T> s_aa = Tensor<T>::zeros_like(a);
        detail::window_corr_adjoint(d_p_aa, kern, win, s_aa);
        Tensor<T> s_ab = Tensor<T>::zeros_like(a);
        detail::window_corr_adjoint(d_p_ab, kern, win, s_ab);
        for (std::size_t i = 0; i < grad_a->size(); ++i)
            (*grad_a)[i] += T(2) * a[i] * s_aa[i] + b[i] * s_ab[i];
    }
    if (grad_b) {
        *grad_b = Tensor<T>::zeros_like(b);
        detail::window_corr_adjoint(d_mu_b, kern, win, *grad_b);
        Tensor<T> s_bb = Tensor<T>::zeros_like(b);
        detail::window_corr_adjoint(d_p_bb, kern, win, s_bb);
        Tensor<T> s_ab = Tensor<T>::zeros_like(b);
        detail::window_corr_adjoint(d_p_ab, kern, win, s_ab);
        for (std::size_t i = 0; i < grad_b->size(); ++i)
            (*grad_b)[i] += T(2) * b[i] * s_bb[i] + a[i] * s_ab[i];
    }
    return total * q;
}

template <class T>
struct TotalLossResult {
    LossBreakdown<T> breakdown;
    Tensor<T> grad_immediate;
    Tensor<T> grad_forward;
};

/// Unit-weight sum of the enabled terms:
///   l_pred = Int + Grad against the immediate target,
///   l_fc   = Int + Grad against the forward target,
///   l_con  = 1 - SSIM between the two predictions.
template <class T>
TotalLossResult<T> total_loss(const PredictionPair<T>& pair, const Tensor<T>& target_immediate,
                              const Tensor<T>& target_forward, const LossMask& mask = {},
                              const SsimConfig& ssim_cfg = {}, bool want_grads = true) {
    if (!mask.use_pred && !mask.use_fc && !mask.use_con)
        throw config_error("total_loss: all loss terms masked off, nothing to optimize");
    TotalLossResult<T> r;
    r.breakdown.mask = mask;
    if (want_grads) {
        r.grad_immediate = Tensor<T>::zeros_like(pair.immediate);
        r.grad_forward = Tensor<T>::zeros_like(pair.forward);
    }
    Tensor<T> g;
    Tensor<T>* gp = want_grads ? &g : nullptr;

    {
        T l = intensity_loss(pair.immediate, target_immediate, gp);
        if (want_grads && mask.use_pred) r.grad_immediate += g;
        if (mask.use_grad) {
            l += gradient_loss(pair.immediate, target_immediate, gp);
            if (want_grads && mask.use_pred) r.grad_immediate += g;
        }
        r.breakdown.l_pred = l;
    }
    {
        T l = intensity_loss(pair.forward, target_forward, gp);
        if (want_grads && mask.use_fc) r.grad_forward += g;
        if (mask.use_grad) {
            l += gradient_loss(pair.forward, target_forward, gp);
            if (want_grads && mask.use_fc) r.grad_forward += g;
        }
        r.breakdown.l_fc = l;
    }
    {
        Tensor<T> ga, gb;
        const T s = ssim(pair.immediate, pair.forward, ssim_cfg, want_grads ? &ga : nullptr,
                         want_grads ? &gb : nullptr);
        r.breakdown.l_con = T(1) - s;
        if (want_grads && mask.use_con) {
            ga *= T(-1);
            gb *= T(-1);
            r.grad_immediate += ga;
            r.grad_forward += gb;
        }
    }
    T total = T(0);
    if (mask.use_pred) total += r.breakdown.l_pred;
    if (mask.use_fc) total += r.breakdown.l_fc;
    if (mask.use_con) total += r.breakdown.l_con;
    r.breakdown.total = total;
    return r;
}

}  // namespace foga
