#include "medmarg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "medmarg/error.hpp"

namespace medmarg {

namespace {

// Kronrod abscissae (descending, last is the centre) and weights; Gauss
// weights belong to the odd-indexed Kronrod nodes.
constexpr double kNodes[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                              0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                              0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                              0.207784955007898467600689403773245, 0.0};
constexpr double kKronrod[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGauss[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv[15];
    fv[7] = f(centre);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kNodes[j];
        fv[j] = f(centre - dx);
        fv[14 - j] = f(centre + dx);
    }
    double kronrod = kKronrod[7] * fv[7];
    double gauss = kGauss[3] * fv[7];
    for (int j = 0; j < 7; ++j) {
        const double pair = fv[j] + fv[14 - j];
        kronrod += kKronrod[j] * pair;
        if (j % 2 == 1) gauss += kGauss[j / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrod[7] * std::abs(fv[7] - mean);
    for (int j = 0; j < 7; ++j) {
        asc += kKronrod[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
    }
    for (double v : fv) {
        if (!std::isfinite(v)) {
            throw ConvergenceError("integrate_adaptive", "integrand is not finite");
        }
    }
    kronrod *= half;
    gauss *= half;
    asc *= std::abs(half);

    // QUADPACK error heuristic.
    double err = std::abs(kronrod - gauss);
    if (asc != 0.0 && err != 0.0) {
        err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    }
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(kronrod));
    return {a, b, kronrod, err};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol, std::size_t max_subdivisions) {
    if (!(abs_tol > 0.0)) throw InvalidParameter("integrate_adaptive: abs_tol must be positive");
    if (max_subdivisions == 0) throw InvalidParameter("integrate_adaptive: max_subdivisions must be >= 1");
    if (!std::isfinite(a) || !std::isfinite(b)) {
        throw InvalidParameter("integrate_adaptive: interval must be finite");
    }
    if (a == b) return {};

    std::priority_queue<Segment> heap;
    Segment whole = kronrod15(f, a, b);
    double total = whole.value;
    double total_error = whole.error;
    heap.push(whole);

    while (total_error > abs_tol) {
        if (heap.size() >= max_subdivisions) {
            throw ConvergenceError("integrate_adaptive",
                                   "error estimate " + std::to_string(total_error) +
                                       " above tolerance after max_subdivisions intervals");
        }
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
            throw ConvergenceError("integrate_adaptive", "interval cannot be bisected further");
        }
        Segment left = kronrod15(f, worst.a, mid);
        Segment right = kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift accumulated by incremental updates.
    QuadratureResult result;
    result.subdivisions = heap.size();
    while (!heap.empty()) {
        result.value += heap.top().value;
        result.error += heap.top().error;
        heap.pop();
    }
    return result;
}

}  // namespace medmarg
