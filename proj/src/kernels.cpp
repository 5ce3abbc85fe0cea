#include "astsum/kernels.hpp"

#include <cmath>
#include <limits>

namespace astsum::kern {

// The serial bodies are written once as templates over nothing; the OpenMP
// variants repeat the same per-row body under a pragma. Row bodies must stay
// in sync: bitwise equality between the two variants is a tested invariant.

namespace ref {

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            int n, int k, int m) {
    for (int i = 0; i < n; ++i) {
        const double* ai = a.data() + static_cast<size_t>(i) * k;
        double* ci = c.data() + static_cast<size_t>(i) * m;
        for (int j = 0; j < m; ++j) ci[j] = 0.0;
        for (int p = 0; p < k; ++p) {
            const double aip = ai[p];
            const double* bp = b.data() + static_cast<size_t>(p) * m;
            for (int j = 0; j < m; ++j) ci[j] += aip * bp[j];
        }
    }
}

void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
               int n, int k, int m) {
    for (int i = 0; i < n; ++i) {
        const double* ai = a.data() + static_cast<size_t>(i) * k;
        double* ci = c.data() + static_cast<size_t>(i) * m;
        for (int j = 0; j < m; ++j) {
            const double* bj = b.data() + static_cast<size_t>(j) * k;
            double acc = 0.0;
            for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
            ci[j] = acc;
        }
    }
}

void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
               int n, int k, int m) {
    for (int i = 0; i < k; ++i) {
        double* ci = c.data() + static_cast<size_t>(i) * m;
        for (int j = 0; j < m; ++j) ci[j] = 0.0;
        for (int p = 0; p < n; ++p) {
            const double api = a[static_cast<size_t>(p) * k + i];
            const double* bp = b.data() + static_cast<size_t>(p) * m;
            for (int j = 0; j < m; ++j) ci[j] += api * bp[j];
        }
    }
}

namespace detail {

// Returns false when the row has no allowed entry.
inline bool softmax_row(double* row, const uint8_t* allow, int cols) {
    double maxv = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < cols; ++j)
        if (allow[j] && row[j] > maxv) maxv = row[j];
    if (maxv == -std::numeric_limits<double>::infinity()) return false;
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) {
        if (allow[j]) {
            row[j] = std::exp(row[j] - maxv);
            sum += row[j];
        } else {
            row[j] = 0.0;
        }
    }
    const double inv = 1.0 / sum;
    for (int j = 0; j < cols; ++j)
        if (allow[j]) row[j] *= inv;
    return true;
}

inline void layer_norm_row(const double* xi, const double* gamma, const double* beta,
                           double* oi, double* mean_out, double* rstd_out,
                           int cols, double eps) {
    double mu = 0.0;
    for (int j = 0; j < cols; ++j) mu += xi[j];
    mu /= cols;
    double var = 0.0;
    for (int j = 0; j < cols; ++j) {
        const double d = xi[j] - mu;
        var += d * d;
    }
    var /= cols;
    const double rstd = 1.0 / std::sqrt(var + eps);
    for (int j = 0; j < cols; ++j) oi[j] = (xi[j] - mu) * rstd * gamma[j] + beta[j];
    if (mean_out) *mean_out = mu;
    if (rstd_out) *rstd_out = rstd;
}

}  // namespace detail

int softmax_masked_rows(std::span<double> logits, std::span<const uint8_t> allow,
                        int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        if (!detail::softmax_row(logits.data() + static_cast<size_t>(i) * cols,
                                 allow.data() + static_cast<size_t>(i) * cols, cols))
            return i;
    }
    return -1;
}

void layer_norm_rows(std::span<const double> x, std::span<const double> gamma,
                     std::span<const double> beta, std::span<double> out,
                     std::span<double> mean, std::span<double> rstd,
                     int rows, int cols, double eps) {
    for (int i = 0; i < rows; ++i) {
        detail::layer_norm_row(x.data() + static_cast<size_t>(i) * cols, gamma.data(), beta.data(),
                               out.data() + static_cast<size_t>(i) * cols,
                               mean.empty() ? nullptr : &mean[i],
                               rstd.empty() ? nullptr : &rstd[i], cols, eps);
    }
}

void adam_update(std::span<double> theta, std::span<const double> grad,
                 std::span<double> m, std::span<double> v,
                 double lr, double beta1, double beta2, double eps, long long t) {
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    const long long n = static_cast<long long>(theta.size());
    for (long long i = 0; i < n; ++i) {
        const double g = grad[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace ref

void matmul(std::span<const double> a, std::span<const double> b, std::span<double> c,
            int n, int k, int m) {
    const long long work = 1LL * n * k * m;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int i = 0; i < n; ++i) {
        const double* ai = a.data() + static_cast<size_t>(i) * k;
        double* ci = c.data() + static_cast<size_t>(i) * m;
        for (int j = 0; j < m; ++j) ci[j] = 0.0;
        for (int p = 0; p < k; ++p) {
            const double aip = ai[p];
            const double* bp = b.data() + static_cast<size_t>(p) * m;
            for (int j = 0; j < m; ++j) ci[j] += aip * bp[j];
        }
    }
}

void matmul_nt(std::span<const double> a, std::span<const double> b, std::span<double> c,
               int n, int k, int m) {
    const long long work = 1LL * n * k * m;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int i = 0; i < n; ++i) {
        const double* ai = a.data() + static_cast<size_t>(i) * k;
        double* ci = c.data() + static_cast<size_t>(i) * m;
        for (int j = 0; j < m; ++j) {
            const double* bj = b.data() + static_cast<size_t>(j) * k;
            double acc = 0.0;
            for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
            ci[j] = acc;
        }
    }
}

void matmul_tn(std::span<const double> a, std::span<const double> b, std::span<double> c,
               int n, int k, int m) {
    const long long work = 1LL * n * k * m;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int i = 0; i < k; ++i) {
        double* ci = c.data() + static_cast<size_t>(i) * m;
        for (int j = 0; j < m; ++j) ci[j] = 0.0;
        for (int p = 0; p < n; ++p) {
            const double api = a[static_cast<size_t>(p) * k + i];
            const double* bp = b.data() + static_cast<size_t>(p) * m;
            for (int j = 0; j < m; ++j) ci[j] += api * bp[j];
        }
    }
}

int softmax_masked_rows(std::span<double> logits, std::span<const uint8_t> allow,
                        int rows, int cols) {
    const long long work = 1LL * rows * cols;
    int bad_row = -1;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int i = 0; i < rows; ++i) {
        if (!ref::detail::softmax_row(logits.data() + static_cast<size_t>(i) * cols,
                                      allow.data() + static_cast<size_t>(i) * cols, cols)) {
#pragma omp critical
            if (bad_row < 0 || i < bad_row) bad_row = i;
        }
    }
    return bad_row;
}

void layer_norm_rows(std::span<const double> x, std::span<const double> gamma,
                     std::span<const double> beta, std::span<double> out,
                     std::span<double> mean, std::span<double> rstd,
                     int rows, int cols, double eps) {
    const long long work = 1LL * rows * cols;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int i = 0; i < rows; ++i) {
        ref::detail::layer_norm_row(x.data() + static_cast<size_t>(i) * cols, gamma.data(),
                                    beta.data(), out.data() + static_cast<size_t>(i) * cols,
                                    mean.empty() ? nullptr : &mean[i],
                                    rstd.empty() ? nullptr : &rstd[i], cols, eps);
    }
}

void adam_update(std::span<double> theta, std::span<const double> grad,
                 std::span<double> m, std::span<double> v,
                 double lr, double beta1, double beta2, double eps, long long t) {
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    const long long n = static_cast<long long>(theta.size());
#pragma omp parallel for schedule(static) if (n >= kParallelCutoff / 4)
    for (long long i = 0; i < n; ++i) {
        const double g = grad[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace astsum::kern
