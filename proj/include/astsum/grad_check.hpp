#pragma once

#include <functional>

#include "astsum/param_store.hpp"

namespace astsum {

// Scalar objective over a parameter store. When want_grad is true the
// function must also accumulate d(loss)/d(theta) into the store's grads
// (which arrive zeroed).
using LossFn = std::function<double(ParamStore&, bool want_grad)>;

// Central-difference check of every coordinate: returns the maximum over
// coordinates of |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
// Throws NonFiniteError if the objective returns a non-finite value.
double grad_check(const LossFn& f, ParamStore& params, double eps = 1e-5);

}  // namespace astsum
