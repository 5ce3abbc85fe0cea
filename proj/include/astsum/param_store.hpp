#pragma once

#include <map>
#include <string>

#include "astsum/tensor.hpp"

namespace astsum {

// One learned array plus its gradient and Adam moment state.
struct ParamEntry {
    Tensor value;
    Tensor grad;
    Tensor m;
    Tensor v;
};

// Named parameters. std::map keeps iteration order sorted by name, which
// fixes the init draw order and the checkpoint layout.
class ParamStore {
public:
    // Registers a parameter; grad and moments start at zero. Throws
    // ConfigError on a duplicate name.
    Tensor& create(const std::string& name, Tensor init);

    bool has(const std::string& name) const { return entries_.count(name) != 0; }
    ParamEntry& entry(const std::string& name);
    const ParamEntry& entry(const std::string& name) const;

    void zero_grads();

    // Adam with bias correction over every entry; throws NonFiniteGradientError
    // if any gradient entry is not finite. t is the 1-based step.
    void adam_step(double lr, double beta1, double beta2, double eps, long long t);

    // Convenience: advances the internal step counter and uses the usual betas.
    void adam_step(double lr);

    long long step() const { return step_; }
    void set_step(long long s) { step_ = s; }

    size_t size() const { return entries_.size(); }
    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::map<std::string, ParamEntry> entries_;
    long long step_ = 0;
};

}  // namespace astsum
