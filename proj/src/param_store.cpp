#include "astsum/param_store.hpp"

#include <cmath>

#include "astsum/errors.hpp"
#include "astsum/kernels.hpp"

namespace astsum {

namespace {

Tensor zeros_like(const Tensor& t) {
    return t.rank() == 2 ? Tensor(t.rows(), t.cols()) : Tensor(static_cast<int>(t.numel()));
}

}  // namespace

Tensor& ParamStore::create(const std::string& name, Tensor init) {
    if (has(name)) throw ConfigError("duplicate parameter name '" + name + "'");
    ParamEntry e;
    e.grad = zeros_like(init);
    e.m = zeros_like(init);
    e.v = zeros_like(init);
    e.value = std::move(init);
    auto [it, ok] = entries_.emplace(name, std::move(e));
    (void)ok;
    return it->second.value;
}

ParamEntry& ParamStore::entry(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return it->second;
}

const ParamEntry& ParamStore::entry(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return it->second;
}

void ParamStore::zero_grads() {
    for (auto& [name, e] : entries_) e.grad.fill(0.0);
}

void ParamStore::adam_step(double lr, double beta1, double beta2, double eps, long long t) {
    if (t < 1) throw ConfigError("adam step t must be >= 1");
    for (auto& [name, e] : entries_) {
        for (double g : e.grad.flat()) {
            if (!std::isfinite(g)) {
                throw NonFiniteGradientError("non-finite gradient in '" + name + "'");
            }
        }
    }
    for (auto& [name, e] : entries_) {
        kern::adam_update(e.value.flat(), e.grad.flat(), e.m.flat(), e.v.flat(), lr, beta1, beta2,
                          eps, t);
    }
}

void ParamStore::adam_step(double lr) {
    adam_step(lr, 0.9, 0.999, 1e-8, ++step_);
}

}  // namespace astsum
