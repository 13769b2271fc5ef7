#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "foga/core/tensor.hpp"

namespace foga {

template <class T>
struct Parameter {
    Tensor<T> value;
    Tensor<T> grad;

    void init(int n, int c, int h, int w) {
        value = Tensor<T>(n, c, h, w);
        grad = Tensor<T>(n, c, h, w);
    }
    std::size_t size() const { return value.size(); }
    void zero_grad() { grad.zero(); }
};

template <class T>
struct NamedParam {
    std::string name;
    Parameter<T>* param = nullptr;
};

template <class T>
using ParamList = std::vector<NamedParam<T>>;

template <class T>
std::size_t total_param_count(const ParamList<T>& params) {
    std::size_t n = 0;
    for (const auto& p : params) n += p.param->size();
    return n;
}

}  // namespace foga
