#pragma once

#include <cstddef>

#include <cblas.h>

namespace foga {

// Row-major C = alpha * op(A) * op(B) + beta * C.
// M x K times K x N into M x N; lda/ldb follow from the transpose flags.
inline void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha,
                 const float* a, const float* b, float beta, float* c) {
    cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a,
                trans_a ? m : k, b, trans_b ? k : n, beta, c, n);
}

inline void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha,
                 const double* a, const double* b, double beta, double* c) {
    cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a,
                trans_a ? m : k, b, trans_b ? k : n, beta, c, n);
}

}  // namespace foga
