#pragma once

#include <string>

#include "foga/nn/activations.hpp"
#include "foga/nn/conv2d.hpp"
#include "foga/nn/groupnorm.hpp"
#include "foga/nn/param.hpp"

namespace foga {

/// CB: two size-preserving 3x3 convolutions, each followed by group
/// normalization and a rectifier.
template <class T>
class ConvBlock {
public:
    ConvBlock() = default;
    ConvBlock(int in_ch, int out_ch, int norm_groups)
        : conv1_(in_ch, out_ch, 3, 1, 1),
          norm1_(out_ch, norm_groups),
          conv2_(out_ch, out_ch, 3, 1, 1),
          norm2_(out_ch, norm_groups) {}

    void init_weights(Rng& rng) {
        conv1_.init_weights(rng);
        conv2_.init_weights(rng);
    }

    Tensor<T> forward(const Tensor<T>& x, bool train = true) {
        Tensor<T> h = act1_.forward(norm1_.forward(conv1_.forward(x, train), train), train);
        return act2_.forward(norm2_.forward(conv2_.forward(h, train), train), train);
    }

    Tensor<T> backward(const Tensor<T>& gy) {
        Tensor<T> g = conv2_.backward(norm2_.backward(act2_.backward(gy)));
        return conv1_.backward(norm1_.backward(act1_.backward(g)));
    }

    void collect(ParamList<T>& out, const std::string& prefix) {
        conv1_.collect(out, prefix + ".conv1");
        norm1_.collect(out, prefix + ".norm1");
        conv2_.collect(out, prefix + ".conv2");
        norm2_.collect(out, prefix + ".norm2");
    }

    std::size_t param_count() const {
        return conv1_.param_count() + norm1_.param_count() + conv2_.param_count() +
               norm2_.param_count();
    }

    double macs(int h, int w) const { return conv1_.macs(h, w) + conv2_.macs(h, w); }

    Conv2d<T>& conv1() { return conv1_; }
    Conv2d<T>& conv2() { return conv2_; }

private:
    Conv2d<T> conv1_, conv2_;
    GroupNorm<T> norm1_, norm2_;
    ReLU<T> act1_, act2_;
};

}  // namespace foga
