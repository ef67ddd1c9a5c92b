#pragma once

#include "echoqfi/linalg.hpp"

#include <vector>

namespace echoqfi {

/// Star-topology register: one central spin uniformly coupled to
/// n_peripheral magnetically equivalent spins.
struct SpinSystem {
    int n_peripheral = 9;
    double j_coupling_hz = 10.5;
    double gamma_central = 0.4052;
    double gamma_peripheral = 1.0;
    double tau_s = 0.0; // free-evolution interval; 1/(2 J) unless overridden

    SpinSystem() { tau_s = 1.0 / (2.0 * j_coupling_hz); }
    SpinSystem(int m, double j_hz, double gc = 0.4052, double gp = 1.0)
        : n_peripheral(m), j_coupling_hz(j_hz), gamma_central(gc), gamma_peripheral(gp),
          tau_s(1.0 / (2.0 * j_hz)) {}

    int n_spins() const { return n_peripheral + 1; }

    /// gamma_j vector, central spin first.
    std::vector<double> gammas() const;
    double sum_gamma_sq() const;
};

/// Mixed state in the NMR deviation convention rho = (1 + eps * rho_delta) / 2^N.
/// Only the traceless deviation carries signal; computations are done
/// analytically to the relevant order in eps.
struct DeviationState {
    int n_spins = 0;
    double epsilon = 1e-5;
    DenseOperator deviation; // traceless Hermitian, 2^N x 2^N
    std::vector<double> gammas;

    DeviationState() = default;
    DeviationState(int n, double eps, DenseOperator dev, std::vector<double> g);

    Eigen::Index dim() const { return deviation.rows(); }
};

/// Equilibrium deviation sum_j gamma_j sigma_z^j as a dense matrix (diagonal).
DenseOperator equilibrium_deviation_dense(const SpinSystem& system);

/// Thermal-equilibrium deviation state of the star system.
DeviationState equilibrium_state(const SpinSystem& system, double epsilon = 1e-5);

/// Tr(rho^2) = 1/2^N + eps^2 Tr(rho_delta^2) / 2^(2N), evaluated analytically in eps.
double purity(const DeviationState& state);

} // namespace echoqfi
