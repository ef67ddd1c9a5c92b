#pragma once

#include "echoqfi/circuits.hpp"
#include "echoqfi/deviation.hpp"
#include "echoqfi/linalg.hpp"
#include "echoqfi/noise.hpp"
#include "echoqfi/sectors.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace echoqfi {

// ---- exact QFI oracles ----

/// F = 4 (<G^2> - <G>^2) for a normalized state vector.
double qfi_pure(const StateVector& psi, const DenseOperator& generator);

/// F = 2 sum_{ij} (l_i - l_j)^2 / (l_i + l_j) |<i|G|j>|^2; pairs with
/// l_i + l_j below 1e-14 contribute zero (SLD null space convention).
double qfi_mixed(const DenseOperator& rho, const DenseOperator& generator);

/// Exact leading order in eps of the QFI of (1 + eps delta)/2^N, in units of
/// eps^2: (2/d) [Tr(delta^2 G^2) - Tr(delta G delta G)].
double qfi_deviation(const DeviationState& state, const DenseOperator& generator);

/// Same quantity computed sector-wise with the diagonal block generator.
double qfi_deviation_block(const BlockOperator& deviation, int n_spins);

/// Finite-eps mixed-state QFI of (1 + eps delta)/2^N computed sector-wise
/// (eigenpairs never couple across sectors or copies).
double qfi_mixed_block_finite_eps(const BlockOperator& deviation, double epsilon, int n_spins);

// ---- Loschmidt echo ----

/// Block-represented star probe: the equilibrium deviation and its metadata.
struct BlockProbe {
    std::shared_ptr<const SectorTable> table;
    BlockOperator deviation;
    double epsilon;
    double gamma_central;
    double gamma_peripheral;
    int n_spins;
};

BlockProbe make_block_probe(const SpinSystem& system, double epsilon = 1e-5);

/// U_E(theta) rho_eq^Delta U_E(theta)^dagger.
DenseOperator probe_deviation_dense(const CircuitParams& params, const SpinSystem& system);
BlockOperator probe_deviation_block(const CircuitParams& params, const SpinSystem& system,
                                    std::shared_ptr<const SectorTable> table);

struct EchoResult {
    double le;           // L = Tr(rho_f rho_f^delta)
    double le_deviation; // L^Delta, the measured polarization signal
};

/// Pure-state echo |<psi| U^dagger e^{-i delta G} U |psi>|^2.
double loschmidt_echo_pure(const StateVector& psi, const DenseOperator& u_engineering,
                           const DenseOperator& generator, double quench);

/// Deviation-state echo. The deviation signal is measured as
/// sum_j gamma_j Tr(V rho^Delta V^dagger sigma_z^j), with the peripheral
/// spins read out through the collective observable 2 Jz.
EchoResult loschmidt_echo_dense(const DeviationState& state, const CircuitParams& params,
                                double quench, const SpinSystem& system);
EchoResult loschmidt_echo_block(const BlockProbe& probe, const CircuitParams& params,
                                double quench, const SpinSystem& system);

/// Measured polarization signal of an already-evolved deviation operator.
double polarization_signal_dense(const DenseOperator& deviation, const SpinSystem& system);
double polarization_signal_block(const BlockOperator& deviation, const SpinSystem& system);

// ---- LE -> QFI estimators ----

struct QfiEstimate {
    enum class Method { exact, le_limit, le_finite };
    double value = 0.0;
    Method method = Method::le_finite;
    double quench = 0.0;
};

/// Pure-state estimator 4 (1 - L) / delta^2.
QfiEstimate qfi_from_le_pure(double le, double quench);

/// Mixed-state lower-bound estimator 4 (purity - L) / delta^2; never exceeds
/// the exact QFI at any quench.
QfiEstimate qfi_from_le_mixed_bound(double le, double state_purity, double quench);

/// Degenerate-spectrum estimator 2 d (purity - L) / delta^2.
QfiEstimate qfi_from_le_degenerate(double le, double state_purity, double dim, double quench);

/// Deviation form in eps^2 units: 2 (Tr(delta^2) - L^Delta) / (2^N delta^2).
QfiEstimate qfi_from_le_deviation(double le_deviation, double deviation_trace_sq, int n_spins,
                                  double quench);

// ---- optimal probe and SQL ----

struct OptimalProbe {
    DenseOperator rho_star;
    double f_opt;
};

/// Pairs the i-th largest probe eigenvalue with the i-th largest generator
/// eigenvalue as (|phi_i> +/- |phi_{d-i+1}>)/sqrt(2) and returns the exact
/// QFI of the constructed probe.
OptimalProbe optimal_probe(const Eigen::VectorXd& eigenvalues_descending,
                           const DenseOperator& generator);

/// Run-length encoded spectrum (value, count), sorted descending.
struct SpectrumRun {
    double value;
    double count;
};

/// mu spectrum of gamma_c sigma_z + gamma_p sum sigma_z on the star register.
std::vector<SpectrumRun> deviation_spectrum_runs(int m_peripheral, double gamma_central,
                                                 double gamma_peripheral);

/// g spectrum of G = sum_k sigma_z^k / 2 on N spins.
std::vector<SpectrumRun> generator_spectrum_runs(int n_spins);

/// Top-half pairing of two symmetric descending spectra (i with d-i+1).
struct PairedRuns {
    struct Pair {
        double mu;
        double g;
        double count;
    };
    std::vector<Pair> pairs; // covers d/2 states
    double dim;
};
PairedRuns pair_spectra(const std::vector<SpectrumRun>& mu_descending,
                        const std::vector<SpectrumRun>& g_descending);

/// Deviation-order QFI of the spectrum-paired probe, in eps^2 units:
/// (8/d) sum count mu^2 g^2 over the top-half pairs.
double paired_qfi_units(const PairedRuns& pairs);

/// Optimal QFI (eps^2 units) reachable by unitaries from the equilibrium
/// deviation of this system.
double optimal_qfi_units(const SpinSystem& system);

/// Best product-probe QFI per unit eps^2: sum_j gamma_j^2. The deviation must
/// be in product form sum_j gamma_j sigma_z^j.
double sql_baseline(const DeviationState& state);
double sql_baseline(const DeviationState& state, const DenseOperator& generator);

// ---- error budget & quench selection ----

struct ErrorBudget {
    double e1; // near-degeneracy error, (N eps)^3 / 2^(N+2)
    double e2; // finite-quench truncation, delta^2 / 2^(N-1)
    double e3; // measurement error, 2^(N+1) eps^2 dL / delta^2
    double sigma_meas;
};

/// Literal evaluation of the order-of-magnitude error formulas (heuristics).
ErrorBudget error_budget(int n_spins, double epsilon, double quench, double delta_le_std);

struct SelectQuenchResult {
    double delta_star;
    std::vector<std::pair<double, double>> curve; // (delta, mean |F_LE - F_exact|)
};

/// For each quench in the grid, averages |F_LE - F_exact| over n_trials
/// random circuits with Gaussian noise of std noise_sigma added to the
/// deviation signal; returns the argmin and the full curve. Deterministic
/// per seed; the same circuits are reused across the grid.
SelectQuenchResult select_quench(const SpinSystem& system, double noise_sigma,
                                 const std::vector<double>& delta_grid, int n_trials,
                                 std::uint64_t rng_seed);

// ---- noisy echo pipeline ----

struct NoisyEchoConfig {
    double measurement_sigma = 0.0;
    std::optional<PulseErrorModel> pulse_errors;
    std::optional<RelaxationParams> relaxation;
    double relax_total_duration_s = 0.187;
    bool calibrate = true; // L0-reference calibration when relaxation is on
};

/// One measured (noisy, calibrated) deviation signal. Relaxation requires the
/// dense path; pulse errors and measurement noise work in both.
double measured_le_deviation_dense(const DeviationState& state, const CircuitParams& params,
                                   double quench, const SpinSystem& system,
                                   const NoisyEchoConfig& config, std::mt19937_64& rng);
double measured_le_deviation_block(const BlockProbe& probe, const CircuitParams& params,
                                   double quench, const SpinSystem& system,
                                   const NoisyEchoConfig& config, std::mt19937_64& rng);

} // namespace echoqfi
