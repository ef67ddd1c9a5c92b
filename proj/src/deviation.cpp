#include "echoqfi/deviation.hpp"
#include "echoqfi/errors.hpp"
#include "echoqfi/pauli.hpp"

#include <cmath>
#include <stdexcept>

namespace echoqfi {

std::vector<double> SpinSystem::gammas() const {
    std::vector<double> g(std::size_t(n_spins()), gamma_peripheral);
    g[0] = gamma_central;
    return g;
}

double SpinSystem::sum_gamma_sq() const {
    return gamma_central * gamma_central +
           n_peripheral * gamma_peripheral * gamma_peripheral;
}

namespace {

// Cheap lower bound on the minimum eigenvalue (Gershgorin). Exact
// eigenvalues are only computed for small dimensions.
double min_eigenvalue_bound(const DenseOperator& a) {
    double lo = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double radius = 0.0;
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            if (k != i) radius += std::abs(a(i, k));
        }
        double center = a(i, i).real();
        lo = std::min(lo, center - radius);
    }
    return lo;
}

} // namespace

DeviationState::DeviationState(int n, double eps, DenseOperator dev, std::vector<double> g)
    : n_spins(n), epsilon(eps), deviation(std::move(dev)), gammas(std::move(g)) {
    const Eigen::Index d = Eigen::Index(1) << n_spins;
    check_dense_dim(d);
    if (deviation.rows() != d || deviation.cols() != d) {
        throw std::invalid_argument("DeviationState: deviation dimension does not match n_spins");
    }
    if (std::abs(deviation.trace()) > 1e-10) {
        throw std::invalid_argument("DeviationState: deviation is not traceless");
    }
    if (!is_hermitian(deviation)) {
        throw std::invalid_argument("DeviationState: deviation is not Hermitian");
    }
    if (epsilon > 0.0 && epsilon <= 1e-3) {
        // Positivity of (1 + eps * delta)/2^N needs min eig >= -1/eps.
        double lo = (d <= 64) ? eig_hermitian(deviation).first.minCoeff()
                              : min_eigenvalue_bound(deviation);
        if (1.0 + epsilon * lo < -1e-12) {
            throw std::invalid_argument("DeviationState: implied density matrix not PSD");
        }
    }
}

DenseOperator equilibrium_deviation_dense(const SpinSystem& system) {
    const int n = system.n_spins();
    const Eigen::Index dim = Eigen::Index(1) << n;
    check_dense_dim(dim);
    DenseOperator dev = DenseOperator::Zero(dim, dim);
    const auto g = system.gammas();
    for (Eigen::Index b = 0; b < dim; ++b) {
        double value = 0.0;
        for (int k = 0; k < n; ++k) {
            // site 0 is the most significant bit; spin-up (bit 0) has sigma_z = +1
            int bit = int((b >> (n - 1 - k)) & 1);
            value += g[std::size_t(k)] * (bit == 0 ? 1.0 : -1.0);
        }
        dev(b, b) = value;
    }
    return dev;
}

DeviationState equilibrium_state(const SpinSystem& system, double epsilon) {
    return DeviationState(system.n_spins(), epsilon,
                          equilibrium_deviation_dense(system), system.gammas());
}

double purity(const DeviationState& state) {
    const double d = std::ldexp(1.0, state.n_spins);
    const double trace_sq = (state.deviation * state.deviation).trace().real();
    return 1.0 / d + state.epsilon * state.epsilon * trace_sq / (d * d);
}

} // namespace echoqfi
