#include "echoqfi/metrology.hpp"
#include "echoqfi/errors.hpp"
#include "echoqfi/pauli.hpp"
#include "echoqfi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace echoqfi {

namespace {

constexpr double kDegeneracyCutoff = 1e-14;

bool is_diagonal(const DenseOperator& a, double tol = 1e-14) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            if (r != c && std::abs(a(r, c)) > tol) return false;
        }
    }
    return true;
}

} // namespace

double qfi_pure(const StateVector& psi, const DenseOperator& generator) {
    if (psi.size() != generator.rows()) {
        throw std::invalid_argument("qfi_pure: dimension mismatch");
    }
    if (std::abs(psi.norm() - 1.0) > 1e-8) {
        throw std::invalid_argument("qfi_pure: state vector is not normalized");
    }
    const StateVector gpsi = generator * psi;
    const double mean = (psi.adjoint() * gpsi)(0).real();
    const double second = gpsi.squaredNorm();
    return 4.0 * (second - mean * mean);
}

double qfi_mixed(const DenseOperator& rho, const DenseOperator& generator) {
    if (rho.rows() != generator.rows()) {
        throw std::invalid_argument("qfi_mixed: dimension mismatch");
    }
    if (std::abs(rho.trace().real() - 1.0) > 1e-8) {
        throw std::invalid_argument("qfi_mixed: state must have unit trace");
    }
    auto [vals, vecs] = eig_hermitian(rho);
    if (vals.minCoeff() < -1e-10) {
        throw std::invalid_argument("qfi_mixed: state is not positive semidefinite");
    }
    const DenseOperator gt = vecs.adjoint() * generator * vecs;
    const Eigen::Index d = vals.size();
    double f = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const double s = vals(i) + vals(j);
            if (s < kDegeneracyCutoff) continue;
            const double diff = vals(i) - vals(j);
            f += 2.0 * diff * diff / s * std::norm(gt(i, j));
        }
    }
    return f;
}

double qfi_deviation(const DeviationState& state, const DenseOperator& generator) {
    const DenseOperator& delta = state.deviation;
    if (delta.rows() != generator.rows()) {
        throw std::invalid_argument("qfi_deviation: dimension mismatch");
    }
    const double d = std::ldexp(1.0, state.n_spins);
    if (is_diagonal(generator)) {
        double f = 0.0;
        for (Eigen::Index a = 0; a < delta.rows(); ++a) {
            for (Eigen::Index b = 0; b < delta.cols(); ++b) {
                const double dg = generator(a, a).real() - generator(b, b).real();
                f += std::norm(delta(a, b)) * dg * dg;
            }
        }
        return f / d;
    }
    const DenseOperator dg = delta * generator;
    const double t1 = (delta * delta).cwiseProduct((generator * generator).transpose())
                          .sum().real();
    const double t2 = dg.cwiseProduct(dg.transpose()).sum().real();
    return (2.0 / d) * (t1 - t2);
}

double qfi_deviation_block(const BlockOperator& deviation, int n_spins) {
    const double d = std::ldexp(1.0, n_spins);
    const auto gdiag = block_generator_diag(*deviation.table);
    double f = 0.0;
    for (std::size_t s = 0; s < deviation.blocks.size(); ++s) {
        const auto& blk = deviation.blocks[s];
        const auto& g = gdiag[s];
        double fs = 0.0;
        for (Eigen::Index a = 0; a < blk.rows(); ++a) {
            for (Eigen::Index b = 0; b < blk.cols(); ++b) {
                const double dg = g(a) - g(b);
                fs += std::norm(blk(a, b)) * dg * dg;
            }
        }
        f += deviation.table->sectors[s].multiplicity * fs;
    }
    return f / d;
}

double qfi_mixed_block_finite_eps(const BlockOperator& deviation, double epsilon, int n_spins) {
    const double d = std::ldexp(1.0, n_spins);
    const auto gdiag = block_generator_diag(*deviation.table);
    double f = 0.0;
    for (std::size_t s = 0; s < deviation.blocks.size(); ++s) {
        auto [mu, vecs] = eig_hermitian(deviation.blocks[s]);
        const DenseOperator gt = vecs.adjoint() * gdiag[s].asDiagonal() * vecs;
        double fs = 0.0;
        for (Eigen::Index a = 0; a < mu.size(); ++a) {
            for (Eigen::Index b = 0; b < mu.size(); ++b) {
                const double la = (1.0 + epsilon * mu(a)) / d;
                const double lb = (1.0 + epsilon * mu(b)) / d;
                const double sum = la + lb;
                if (sum < kDegeneracyCutoff) continue;
                const double diff = la - lb;
                fs += 2.0 * diff * diff / sum * std::norm(gt(a, b));
            }
        }
        f += deviation.table->sectors[s].multiplicity * fs;
    }
    return f;
}

// ---- Loschmidt echo ----

BlockProbe make_block_probe(const SpinSystem& system, double epsilon) {
    BlockProbe probe;
    probe.table = make_sector_table(system.n_peripheral);
    probe.deviation = block_equilibrium_deviation(probe.table, system.gamma_central,
                                                  system.gamma_peripheral);
    probe.epsilon = epsilon;
    probe.gamma_central = system.gamma_central;
    probe.gamma_peripheral = system.gamma_peripheral;
    probe.n_spins = system.n_spins();
    return probe;
}

DenseOperator probe_deviation_dense(const CircuitParams& params, const SpinSystem& system) {
    DenseOperator delta = equilibrium_deviation_dense(system);
    apply_sequence_dense(delta, engineering_sequence(params), system);
    return delta;
}

BlockOperator probe_deviation_block(const CircuitParams& params, const SpinSystem& system,
                                    std::shared_ptr<const SectorTable> table) {
    BlockOperator delta = block_equilibrium_deviation(std::move(table), system.gamma_central,
                                                      system.gamma_peripheral);
    apply_sequence_block(delta, engineering_sequence(params), system);
    return delta;
}

double loschmidt_echo_pure(const StateVector& psi, const DenseOperator& u_engineering,
                           const DenseOperator& generator, double quench) {
    if (!std::isfinite(quench)) {
        throw std::invalid_argument("loschmidt_echo_pure: quench must be finite");
    }
    auto [gvals, gvecs] = eig_hermitian(generator);
    const StateVector psi_f = u_engineering * psi;
    StateVector encoded = gvecs.adjoint() * psi_f;
    for (Eigen::Index i = 0; i < encoded.size(); ++i) {
        encoded(i) *= std::exp(Complex(0.0, -quench * gvals(i)));
    }
    encoded = gvecs * encoded;
    return std::norm((psi_f.adjoint() * encoded)(0));
}

double polarization_signal_dense(const DenseOperator& deviation, const SpinSystem& system) {
    const int n = system.n_spins();
    const Eigen::Index dim = deviation.rows();
    const Eigen::Index central_mask = dim >> 1;
    double central = 0.0;
    double peripheral = 0.0;
    for (Eigen::Index b = 0; b < dim; ++b) {
        const double p = deviation(b, b).real();
        central += (b & central_mask) ? -p : p;
        int ones = 0;
        Eigen::Index rest = b & ~central_mask;
        while (rest) {
            ++ones;
            rest &= rest - 1;
        }
        peripheral += p * (double(n - 1) - 2.0 * ones);
    }
    return system.gamma_central * central + system.gamma_peripheral * peripheral;
}

double polarization_signal_block(const BlockOperator& deviation, const SpinSystem& system) {
    double central = 0.0;
    double peripheral = 0.0;
    for (std::size_t s = 0; s < deviation.blocks.size(); ++s) {
        const auto& sec = deviation.table->sectors[s];
        const double j = 0.5 * sec.twice_j;
        double c = 0.0, p = 0.0;
        for (int u = 0; u < 2; ++u) {
            const double sz = (u == 0) ? 1.0 : -1.0;
            for (int k = 0; k < sec.dim; ++k) {
                const double val = deviation.blocks[s](u * sec.dim + k, u * sec.dim + k).real();
                c += sz * val;
                p += 2.0 * (j - k) * val;
            }
        }
        central += sec.multiplicity * c;
        peripheral += sec.multiplicity * p;
    }
    return system.gamma_central * central + system.gamma_peripheral * peripheral;
}

EchoResult loschmidt_echo_dense(const DeviationState& state, const CircuitParams& params,
                                double quench, const SpinSystem& system) {
    DenseOperator rho = state.deviation;
    apply_sequence_dense(rho, echo_sequence(params, quench), system);
    const double le_dev = polarization_signal_dense(rho, system);
    const double d = std::ldexp(1.0, state.n_spins);
    return {1.0 / d + state.epsilon * state.epsilon * le_dev / (d * d), le_dev};
}

EchoResult loschmidt_echo_block(const BlockProbe& probe, const CircuitParams& params,
                                double quench, const SpinSystem& system) {
    BlockOperator rho = probe.deviation;
    apply_sequence_block(rho, echo_sequence(params, quench), system);
    const double le_dev = polarization_signal_block(rho, system);
    const double d = std::ldexp(1.0, probe.n_spins);
    return {1.0 / d + probe.epsilon * probe.epsilon * le_dev / (d * d), le_dev};
}

// ---- estimators ----

namespace {

double clamp_tiny_negative(double value) {
    return (value < 0.0 && value > -1e-9) ? 0.0 : value;
}

void require_nonzero_quench(double quench) {
    if (quench == 0.0) {
        throw std::invalid_argument("qfi_from_le: quench must be nonzero");
    }
}

} // namespace

QfiEstimate qfi_from_le_pure(double le, double quench) {
    require_nonzero_quench(quench);
    return {clamp_tiny_negative(4.0 * (1.0 - le) / (quench * quench)),
            QfiEstimate::Method::le_finite, quench};
}

QfiEstimate qfi_from_le_mixed_bound(double le, double state_purity, double quench) {
    require_nonzero_quench(quench);
    return {clamp_tiny_negative(4.0 * (state_purity - le) / (quench * quench)),
            QfiEstimate::Method::le_finite, quench};
}

QfiEstimate qfi_from_le_degenerate(double le, double state_purity, double dim, double quench) {
    require_nonzero_quench(quench);
    return {clamp_tiny_negative(2.0 * dim * (state_purity - le) / (quench * quench)),
            QfiEstimate::Method::le_finite, quench};
}

QfiEstimate qfi_from_le_deviation(double le_deviation, double deviation_trace_sq, int n_spins,
                                  double quench) {
    require_nonzero_quench(quench);
    const double d = std::ldexp(1.0, n_spins);
    return {clamp_tiny_negative(2.0 * (deviation_trace_sq - le_deviation) /
                                (d * quench * quench)),
            QfiEstimate::Method::le_finite, quench};
}

// ---- optimal probe ----

OptimalProbe optimal_probe(const Eigen::VectorXd& eigenvalues_descending,
                           const DenseOperator& generator) {
    const Eigen::Index d = generator.rows();
    if (eigenvalues_descending.size() != d) {
        throw std::invalid_argument("optimal_probe: spectrum size mismatch");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (eigenvalues_descending(i) < -1e-12) {
            throw std::invalid_argument("optimal_probe: negative eigenvalue");
        }
        if (i > 0 && eigenvalues_descending(i) > eigenvalues_descending(i - 1) + 1e-12) {
            throw std::invalid_argument("optimal_probe: spectrum must be descending");
        }
        sum += eigenvalues_descending(i);
    }
    if (std::abs(sum - 1.0) > 1e-8) {
        throw std::invalid_argument("optimal_probe: spectrum must sum to one");
    }

    auto [gvals, gvecs] = eig_hermitian(generator);
    // generator eigenvectors sorted by descending eigenvalue; ties keep the
    // solver's (lexicographic) order
    std::vector<Eigen::Index> order(std::size_t(d));
    for (Eigen::Index i = 0; i < d; ++i) order[std::size_t(i)] = d - 1 - i;
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return gvals(a) > gvals(b);
    });

    DenseOperator rho = DenseOperator::Zero(d, d);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < d; ++i) {
        const Eigen::Index p = d - 1 - i;
        StateVector phi_i = gvecs.col(order[std::size_t(i)]);
        StateVector phi_p = gvecs.col(order[std::size_t(p)]);
        StateVector v;
        if (i < p) {
            v = inv_sqrt2 * (phi_i + phi_p);
        } else if (i == p) {
            v = phi_i;
        } else {
            v = inv_sqrt2 * (phi_i - phi_p);
        }
        rho += eigenvalues_descending(i) * (v * v.adjoint());
    }
    return {rho, qfi_mixed(rho, generator)};
}

// ---- spectra ----

namespace {

std::vector<SpectrumRun> merge_runs(std::vector<SpectrumRun> runs) {
    std::sort(runs.begin(), runs.end(),
              [](const SpectrumRun& a, const SpectrumRun& b) { return a.value > b.value; });
    std::vector<SpectrumRun> merged;
    for (const auto& r : runs) {
        if (!merged.empty() && std::abs(merged.back().value - r.value) < 1e-12) {
            merged.back().count += r.count;
        } else {
            merged.push_back(r);
        }
    }
    return merged;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double value = 1.0;
    for (int i = 1; i <= k; ++i) value = value * double(n - k + i) / double(i);
    return std::round(value);
}

} // namespace

std::vector<SpectrumRun> deviation_spectrum_runs(int m_peripheral, double gamma_central,
                                                 double gamma_peripheral) {
    std::vector<SpectrumRun> runs;
    for (int k = 0; k <= m_peripheral; ++k) {
        const double c = binomial(m_peripheral, k);
        const double peripheral = gamma_peripheral * (m_peripheral - 2 * k);
        runs.push_back({gamma_central + peripheral, c});
        runs.push_back({-gamma_central + peripheral, c});
    }
    return merge_runs(std::move(runs));
}

std::vector<SpectrumRun> generator_spectrum_runs(int n_spins) {
    std::vector<SpectrumRun> runs;
    for (int k = 0; k <= n_spins; ++k) {
        runs.push_back({0.5 * (n_spins - 2 * k), binomial(n_spins, k)});
    }
    return merge_runs(std::move(runs));
}

PairedRuns pair_spectra(const std::vector<SpectrumRun>& mu_descending,
                        const std::vector<SpectrumRun>& g_descending) {
    double total_mu = 0.0, total_g = 0.0;
    for (const auto& r : mu_descending) total_mu += r.count;
    for (const auto& r : g_descending) total_g += r.count;
    if (std::abs(total_mu - total_g) > 0.5) {
        throw std::invalid_argument("pair_spectra: spectra dimensions differ");
    }
    PairedRuns out;
    out.dim = total_mu;
    double remaining = total_mu / 2.0;
    std::size_t im = 0, ig = 0;
    double mu_left = mu_descending.empty() ? 0.0 : mu_descending[0].count;
    double g_left = g_descending.empty() ? 0.0 : g_descending[0].count;
    while (remaining > 0.5 && im < mu_descending.size() && ig < g_descending.size()) {
        const double take = std::min({mu_left, g_left, remaining});
        out.pairs.push_back({mu_descending[im].value, g_descending[ig].value, take});
        mu_left -= take;
        g_left -= take;
        remaining -= take;
        if (mu_left < 0.5 && ++im < mu_descending.size()) mu_left = mu_descending[im].count;
        if (g_left < 0.5 && ++ig < g_descending.size()) g_left = g_descending[ig].count;
    }
    return out;
}

double paired_qfi_units(const PairedRuns& pairs) {
    double sum = 0.0;
    for (const auto& p : pairs.pairs) {
        sum += p.count * p.mu * p.mu * p.g * p.g;
    }
    return 8.0 * sum / pairs.dim;
}

double optimal_qfi_units(const SpinSystem& system) {
    return paired_qfi_units(pair_spectra(
        deviation_spectrum_runs(system.n_peripheral, system.gamma_central,
                                system.gamma_peripheral),
        generator_spectrum_runs(system.n_spins())));
}

// ---- SQL ----

double sql_baseline(const DeviationState& state) {
    // the deviation must be the product form sum_j gamma_j sigma_z^j
    const int n = state.n_spins;
    const Eigen::Index dim = state.dim();
    DenseOperator expected = DenseOperator::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        double v = 0.0;
        for (int k = 0; k < n; ++k) {
            const int bit = int((b >> (n - 1 - k)) & 1);
            v += state.gammas[std::size_t(k)] * (bit == 0 ? 1.0 : -1.0);
        }
        expected(b, b) = v;
    }
    if (max_abs(state.deviation - expected) > 1e-10) {
        throw std::invalid_argument("sql_baseline: deviation is not in product form");
    }
    double sum = 0.0;
    for (double g : state.gammas) sum += g * g;
    return sum;
}

double sql_baseline(const DeviationState& state, const DenseOperator& generator) {
    if (max_abs(generator - collective_z_half(state.n_spins)) > 1e-10) {
        throw std::invalid_argument("sql_baseline: generator must be sum_k sigma_z^k / 2");
    }
    return sql_baseline(state);
}

// ---- error budget & quench selection ----

ErrorBudget error_budget(int n_spins, double epsilon, double quench, double delta_le_std) {
    if (quench <= 0) {
        throw std::invalid_argument("error_budget: quench must be positive");
    }
    ErrorBudget b;
    b.e1 = std::pow(double(n_spins) * epsilon, 3) * std::ldexp(1.0, -(n_spins + 2));
    b.e2 = quench * quench * std::ldexp(1.0, -(n_spins - 1));
    b.e3 = std::ldexp(1.0, n_spins + 1) * epsilon * epsilon * delta_le_std / (quench * quench);
    b.sigma_meas = delta_le_std;
    return b;
}

SelectQuenchResult select_quench(const SpinSystem& system, double noise_sigma,
                                 const std::vector<double>& delta_grid, int n_trials,
                                 std::uint64_t rng_seed) {
    if (delta_grid.empty()) {
        throw std::invalid_argument("select_quench: empty quench grid");
    }
    if (n_trials < 1) {
        throw std::invalid_argument("select_quench: need at least one trial");
    }
    const int n = system.n_spins();
    auto table = make_sector_table(system.n_peripheral);
    const BlockProbe probe = make_block_probe(system);
    const double trace_sq = block_trace_product(probe.deviation, probe.deviation).real();

    // one circuit set shared across the grid
    std::vector<CircuitParams> circuits;
    std::vector<double> f_exact;
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    for (int t = 0; t < n_trials; ++t) {
        auto rng = make_engine(derive_seed(rng_seed, std::uint64_t(t)));
        std::array<double, 6> theta{};
        for (auto& x : theta) x = uniform(rng);
        circuits.emplace_back(theta);
        f_exact.push_back(
            qfi_deviation_block(probe_deviation_block(circuits.back(), system, table), n));
    }

    SelectQuenchResult result;
    result.curve.reserve(delta_grid.size());
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        const double delta = delta_grid[i];
        double total = 0.0;
        for (int t = 0; t < n_trials; ++t) {
            double le_dev = loschmidt_echo_block(probe, circuits[std::size_t(t)], delta, system)
                                .le_deviation;
            auto rng = make_engine(
                derive_seed(rng_seed, 1000003ULL + i * std::uint64_t(n_trials) + t));
            le_dev = measurement_noise(le_dev, noise_sigma, rng);
            const double f_le = qfi_from_le_deviation(le_dev, trace_sq, n, delta).value;
            total += std::abs(f_le - f_exact[std::size_t(t)]);
        }
        result.curve.emplace_back(delta, total / n_trials);
    }
    result.delta_star = result.curve.front().first;
    double best = result.curve.front().second;
    for (const auto& [delta, err] : result.curve) {
        if (err < best) {
            best = err;
            result.delta_star = delta;
        }
    }
    return result;
}

// ---- noisy echo pipeline ----

namespace {

int count_free_segments(const PulseSequence& seq) {
    int count = 0;
    for (const auto& seg : seq) {
        if (seg.kind == SegmentKind::free_evolution) ++count;
    }
    return count;
}

} // namespace

double measured_le_deviation_dense(const DeviationState& state, const CircuitParams& params,
                                   double quench, const SpinSystem& system,
                                   const NoisyEchoConfig& config, std::mt19937_64& rng) {
    const auto run_echo = [&](double q) {
        PulseSequence seq = echo_sequence(params, q);
        if (config.pulse_errors) {
            seq = apply_pulse_errors(seq, *config.pulse_errors, rng());
        }
        DenseOperator rho = state.deviation;
        if (config.relaxation) {
            const int free_count = std::max(1, count_free_segments(seq));
            const double share = config.relax_total_duration_s / free_count;
            apply_sequence_dense(rho, seq, system, [&](DenseOperator& r) {
                relax_over(r, share, *config.relaxation, state.n_spins);
            });
        } else {
            apply_sequence_dense(rho, seq, system);
        }
        return measurement_noise(polarization_signal_dense(rho, system),
                                 config.measurement_sigma, rng);
    };

    double le_dev = run_echo(quench);
    if (config.relaxation && config.calibrate) {
        const double noisy_l0 = run_echo(0.0);
        const double ideal_l0 =
            (state.deviation * state.deviation).trace().real();
        le_dev = calibrate_with_reference(le_dev, noisy_l0, ideal_l0);
    }
    return le_dev;
}

double measured_le_deviation_block(const BlockProbe& probe, const CircuitParams& params,
                                   double quench, const SpinSystem& system,
                                   const NoisyEchoConfig& config, std::mt19937_64& rng) {
    if (config.relaxation) {
        throw representation_error(
            "per-spin relaxation channels break the sector symmetry; use the dense path");
    }
    PulseSequence seq = echo_sequence(params, quench);
    if (config.pulse_errors) {
        seq = apply_pulse_errors(seq, *config.pulse_errors, rng());
    }
    BlockOperator rho = probe.deviation;
    apply_sequence_block(rho, seq, system);
    return measurement_noise(polarization_signal_block(rho, system), config.measurement_sigma,
                             rng);
}

} // namespace echoqfi
