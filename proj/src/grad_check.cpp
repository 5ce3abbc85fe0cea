#include "astsum/grad_check.hpp"

#include <cmath>
#include <map>
#include <string>

#include "astsum/errors.hpp"

namespace astsum {

namespace {

double eval(const LossFn& f, ParamStore& params, bool want_grad) {
    const double loss = f(params, want_grad);
    if (!std::isfinite(loss)) throw NonFiniteError("objective returned a non-finite value");
    return loss;
}

}  // namespace

double grad_check(const LossFn& f, ParamStore& params, double eps) {
    params.zero_grads();
    eval(f, params, true);

    // Snapshot the analytic gradients before the probing passes overwrite
    // anything.
    std::map<std::string, Tensor> analytic;
    for (const auto& [name, e] : params) analytic.emplace(name, e.grad);

    double worst = 0.0;
    for (auto& [name, e] : params) {
        auto theta = e.value.flat();
        const Tensor& a = analytic.at(name);
        for (size_t i = 0; i < theta.size(); ++i) {
            const double keep = theta[i];
            theta[i] = keep + eps;
            const double up = eval(f, params, false);
            theta[i] = keep - eps;
            const double down = eval(f, params, false);
            theta[i] = keep;
            const double numeric = (up - down) / (2.0 * eps);
            const double an = a.flat()[i];
            const double rel = std::abs(an - numeric) / std::max(1e-8, std::abs(an) + std::abs(numeric));
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

}  // namespace astsum
