#pragma once

#include <cstdint>
#include <span>

// Numeric inner loops shared by the forward and backward passes.
//
// Every kernel exists twice: the default entry points parallelize over output
// rows with OpenMP, the kern::ref twins are plain serial loops kept as the
// test oracle and benchmark baseline. Parallelism is only ever across output
// elements; the per-element accumulation order is identical in both variants,
// so results are bitwise equal regardless of thread count.

namespace astsum::kern {

// Work threshold (in multiply-adds) below which the OpenMP variants stay
// serial via an if-clause. Keeps tiny-model calls free of threading overhead.
inline constexpr long long kParallelCutoff = 32768;

// c[n x m] = a[n x k] * b[k x m]
void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            int n, int k, int m);
// c[n x m] = a[n x k] * b[m x k]^T
void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
               int n, int k, int m);
// c[k x m] = a[n x k]^T * b[n x m]
void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
               int n, int k, int m);

// In-place row softmax over the allowed entries; disallowed entries become
// exactly 0. A row with no allowed entry is left untouched and reported via
// the return value (index of the first such row, or -1).
int softmax_masked_rows(std::span<double> logits, std::span<const uint8_t> allow,
                        int rows, int cols);

// Per-row layer norm with population variance. mean/rstd (length rows) are
// stashed for the backward pass; pass empty spans to skip.
void layer_norm_rows(std::span<const double> x, std::span<const double> gamma,
                     std::span<const double> beta, std::span<double> out,
                     std::span<double> mean, std::span<double> rstd,
                     int rows, int cols, double eps);

// Adam update for one flat parameter array; t is the 1-based step.
void adam_update(std::span<double> theta, std::span<const double> grad,
                 std::span<double> m, std::span<double> v,
                 double lr, double beta1, double beta2, double eps, long long t);

namespace ref {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            int n, int k, int m);
void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
               int n, int k, int m);
void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
               int n, int k, int m);
int softmax_masked_rows(std::span<double> logits, std::span<const uint8_t> allow,
                        int rows, int cols);
void layer_norm_rows(std::span<const double> x, std::span<const double> gamma,
                     std::span<const double> beta, std::span<double> out,
                     std::span<double> mean, std::span<double> rstd,
                     int rows, int cols, double eps);
void adam_update(std::span<double> theta, std::span<const double> grad,
                 std::span<double> m, std::span<double> v,
                 double lr, double beta1, double beta2, double eps, long long t);

}  // namespace ref

}  // namespace astsum::kern
