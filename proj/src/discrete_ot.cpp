#include "jko/discrete_ot.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace jko {

DiscreteTransport transport_atoms_1d(std::span<const double> a_mass, std::span<const double> x,
                                     std::span<const double> b_mass, std::span<const double> y) {
    const int n = static_cast<int>(a_mass.size());
    const int m = static_cast<int>(b_mass.size());
    if (n == 0 || m == 0 || x.size() != a_mass.size() || y.size() != b_mass.size())
        throw std::invalid_argument("transport_atoms_1d: size mismatch");
    if (!std::is_sorted(x.begin(), x.end()) || !std::is_sorted(y.begin(), y.end()))
        throw std::invalid_argument("transport_atoms_1d: atoms must be sorted");

    auto c = [&](int i, int j) {
        const double d = x[i] - y[j];
        return d * d;
    };

    DiscreteTransport t;
    t.u.assign(n, 0.0);
    t.v.assign(m, 0.0);
    int i = 0;
    int j = 0;
    double ra = a_mass[0];
    double rb = b_mass[0];
    t.v[0] = c(0, 0);
    while (true) {
        const double moved = std::min(ra, rb);
        if (moved > 0.0) {
            t.flows.push_back({i, j, moved});
            t.cost += moved * c(i, j);
        }
        ra -= moved;
        rb -= moved;
        if (i == n - 1 && j == m - 1) break;
        // Each step adds one basic cell (possibly with zero flow) so the
        // basis stays a spanning tree and the duals are determined.
        if ((ra <= rb && i < n - 1) || j == m - 1) {
            ++i;
            ra = a_mass[i];
            t.u[i] = c(i, j) - t.v[j];
        } else {
            ++j;
            rb = b_mass[j];
            t.v[j] = c(i, j) - t.u[i];
        }
    }
    return t;
}

double min_reduced_cost(const DiscreteTransport& t, std::span<const double> x, std::span<const double> y) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double d = x[i] - y[j];
            worst = std::min(worst, d * d - t.u[i] - t.v[j]);
        }
    }
    return worst;
}

}  // namespace jko
