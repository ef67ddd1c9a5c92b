#pragma once

#include "echoqfi/linalg.hpp"

#include <cstdint>
#include <random>

namespace echoqfi {

/// T1/T2 times for the central and peripheral spins plus the channel step.
struct RelaxationParams {
    double t1_central = 5.0;
    double t2_central = 1.30;
    double t1_peripheral = 4.2;
    double t2_peripheral = 1.26;
    double step_duration_s = 1e-3;

    void validate() const;

    double xi(bool central, double dt) const;  // phase-damping weight
    double eta(bool central, double dt) const; // amplitude-damping weight
};

/// One phase-damping step of duration dt on every spin:
/// E(rho) = (1 - xi) rho + xi sigma_z rho sigma_z per spin,
/// xi_i = [1 - exp(-dt / T2_i)] / 2. Site 0 is the central spin.
void phase_damping(DenseOperator& rho, const RelaxationParams& params, int n_spins, double dt);

/// One generalized-amplitude-damping step of duration dt on every spin
/// (four Kraus operators with weights 1/2, eta_j = 1 - exp(-dt / T1_j));
/// the fixed point is the maximally mixed state.
void generalized_amplitude_damping(DenseOperator& rho, const RelaxationParams& params,
                                   int n_spins, double dt);

/// Splits `duration` into steps of step_duration_s (plus a remainder step),
/// applying phase damping then amplitude damping on every spin per step.
void relax_over(DenseOperator& rho, double duration_s, const RelaxationParams& params,
                int n_spins);

/// value + Normal(0, sigma) drawn from the given stream.
double measurement_noise(double value, double sigma, std::mt19937_64& rng);

/// Seeded convenience variant (fresh engine per call).
double measurement_noise(double value, double sigma, std::uint64_t rng_seed);

/// Multiplicative decay compensation: noisy_ldelta * (ideal_l0 / noisy_l0).
/// Both signals traverse the same engineering evolutions, so a common decay
/// factor cancels.
double calibrate_with_reference(double noisy_ldelta, double noisy_l0, double ideal_l0);

} // namespace echoqfi
