#pragma once

#include <span>
#include <vector>

namespace jko {

struct TransportFlow {
    int i = 0;
    int j = 0;
    double mass = 0.0;
};

/// Solution of the transportation LP between atoms on the line with cost
/// |x_i - y_j|^2: a basic feasible plan, its cost and a dual pair (u, v)
/// with u_i + v_j = c_ij on the basis.
struct DiscreteTransport {
    double cost = 0.0;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<TransportFlow> flows;
};

/// North-west-corner basis on sorted atoms. For the squared distance the cost
/// matrix is Monge, so this basis is optimal; certify_optimality() checks the
/// dual feasibility that proves it. Atom positions must be nondecreasing.
DiscreteTransport transport_atoms_1d(std::span<const double> a_mass, std::span<const double> x,
                                     std::span<const double> b_mass, std::span<const double> y);

/// min over (i, j) of c_ij - u_i - v_j; >= -tol proves LP optimality.
double min_reduced_cost(const DiscreteTransport& t, std::span<const double> x, std::span<const double> y);

}  // namespace jko
