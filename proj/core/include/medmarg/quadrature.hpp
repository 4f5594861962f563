#pragma once

#include <cstddef>
#include <functional>

namespace medmarg {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t subdivisions = 0;
};

// Globally adaptive Gauss-Kronrod (7/15) integration on a finite [a, b].
// The interval with the largest error estimate is bisected until the total
// error estimate drops below abs_tol. Throws ConvergenceError when more than
// max_subdivisions intervals would be needed.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, std::size_t max_subdivisions);

}  // namespace medmarg
