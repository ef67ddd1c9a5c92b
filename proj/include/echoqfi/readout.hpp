#pragma once

#include "echoqfi/metrology.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace echoqfi {

/// Coherence-order decomposition of Tr(e^{-i a G} rho e^{i a G} rho):
/// the weights Tr(rho_{-m} rho_m) are computed once, then the overlap is
/// evaluated at any angle in O(#orders). Stored one-sided (m >= 0) with
/// +/-m weights folded, so eval(a) = sum_m w_m cos(m a).
struct CoherenceProfile {
    std::vector<std::pair<double, double>> terms; // (order m >= 0, folded weight)

    double eval(double alpha) const;
    double derivative(double alpha) const;
    double total() const; // eval(0) = Tr(rho^2)
};

/// Weights from a dense operator and a Hermitian generator (orders clustered
/// within 1e-9).
CoherenceProfile coherence_profile(const DenseOperator& rho, const DenseOperator& generator);

/// Weights of a block-represented deviation under the block generator
/// (orders are exact integers there).
CoherenceProfile coherence_profile_block(const BlockOperator& deviation);

/// Weights of the spectrum-paired probe: each pair contributes 2 mu^2 at
/// order m = 2 g.
CoherenceProfile coherence_profile_paired(const PairedRuns& pairs);

/// Direct moments <O_rev> = Tr(e^{-iaG} rho e^{iaG} rho) and
/// <O_rev^2> = Tr(e^{-iaG} rho e^{iaG} rho^2); both real.
std::pair<double, double> orev_moments(const DenseOperator& rho_f,
                                       const DenseOperator& generator, double alpha);

/// Block-formula evaluation of <O_rev>; equals the direct first moment.
double orev_block_formula(const DenseOperator& rho_f, const DenseOperator& generator,
                          double alpha);

/// Binomial closed forms for the near-optimal probe built from the thermal
/// product spectrum (lambda0 |0><0| + lambda1 |1><1|)^(x)N by pairing each
/// basis state with its complement. Returns (<O>, <O^2>).
std::pair<double, double> thermal_closed_form(int n_spins, double lambda0, double lambda1,
                                              double alpha);

/// Exact QFI of the same paired thermal probe under G = sum sigma_z / 2.
double thermal_probe_qfi(int n_spins, double lambda0, double lambda1);

/// Moments of a deviation-state probe to O(eps^2):
///   <O>   = 1/2^N + eps^2 T(a) / 2^(2N)
///   <O^2> = 1/2^(2N) + eps^2 [Tr(delta^2) + 2 T(a)] / 2^(3N)
/// with T(a) the coherence-profile overlap of the deviation.
struct DeviationReadout {
    CoherenceProfile profile;
    double trace_sq = 0.0;     // Tr(delta^2) = T(0)
    double sum_gamma_sq = 0.0; // defines the SQL for this state family
    int n_spins = 0;
    double epsilon = 1e-5;

    std::pair<double, double> moments(double alpha) const;
    double qfi_units() const; // (1/d) sum_m w_m m^2, in eps^2 units
    double qfi_abs() const;   // eps^2 * qfi_units()
    double sql_abs() const;   // eps^2 * sum_gamma_sq
};

DeviationReadout make_deviation_readout(const BlockOperator& deviation_f, double epsilon,
                                        int n_spins, double sum_gamma_sq);
DeviationReadout make_deviation_readout(const PairedRuns& pairs, double epsilon, int n_spins,
                                        double sum_gamma_sq);

/// Moment map alpha -> (<O>, <O^2>).
using MomentFn = std::function<std::pair<double, double>(double)>;

/// Error-propagation precision at one angle: sqrt(<O^2> - <O>^2) divided by
/// the central-difference derivative of <O> with step `deriv_step`. A
/// derivative below 1e-300 yields +infinity.
double precision_at(const MomentFn& moments, double alpha, double deriv_step);

struct PrecisionReport {
    std::vector<double> alpha_grid;
    std::vector<double> o_mean;
    std::vector<double> o_second;
    std::vector<double> derivative;
    std::vector<double> delta_alpha;
    std::vector<double> sql_ratio_sq; // (delta_alpha / delta_alpha_sql)^2
    double working_point = 0.0;       // argmin delta_alpha
    double min_delta_alpha = 0.0;
    double delta_alpha_sql = 0.0;
    double qcrb = 0.0; // 1 / sqrt(F)
};

/// 256 uniform points on (0, pi/2].
std::vector<double> default_alpha_grid(int points = 256);

/// Scans the grid (must span (0, pi/2] with at least 50 points) and fills the
/// full report. `qfi_abs` sets the QCRB reference, `f_sql_abs` the SQL.
PrecisionReport working_point(const MomentFn& moments, const std::vector<double>& alpha_grid,
                              double deriv_step, double qfi_abs, double f_sql_abs);

PrecisionReport working_point(const DeviationReadout& readout,
                              const std::vector<double>& alpha_grid, double deriv_step);

/// Temporal average of nu consecutive measurements: delta_alpha / sqrt(nu).
double ensemble_precision(double delta_alpha, double nu);

enum class ProbeFamily { ghz_pure, thermal_deviation };

struct ScalingRow {
    int n_spins;
    double alpha_working;
    double delta_alpha;
    double delta_alpha_sql;
    double delta_alpha_opt_bound;
    double ratio_sq_to_opt; // (delta_alpha_opt_bound / delta_alpha)^2
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    double slope; // least-squares slope of log(delta_alpha) vs log(N)
};

/// Working-point precision across register sizes. The thermal family uses
/// the spectrum-paired probe at the given polarization; GHZ probes give the
/// exact 1/N reference.
ScalingResult scaling_sweep(const std::vector<int>& n_values, double epsilon,
                            ProbeFamily family, double deriv_step, int grid_points = 256);

struct PurityRow {
    double temperature_k;
    double lambda0;
    double alpha;
    double ratio_sq;      // (delta_alpha / delta_alpha_sql)^2
    double qcrb_ratio_sq; // F_SQL / F_probe
};

/// Ratio curves of the paired thermal probe at each temperature, plus a T=0
/// pure-state row (prepended when absent). lambda0 follows the Boltzmann
/// weight with |h-bar omega| = 2.6e-25 J and k_B = 1.38e-23 J/K.
std::vector<PurityRow> purity_sweep(const std::vector<double>& temperatures_k, int n_spins,
                                    const std::vector<double>& alpha_grid, double deriv_step);

/// Boltzmann ground-state weight at temperature T (lambda0 = 1 at T = 0).
double thermal_lambda0(double temperature_k);

} // namespace echoqfi
