#include "echoqfi/readout.hpp"
#include "echoqfi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace echoqfi {

namespace {

constexpr double kPi = std::numbers::pi;

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double value = 1.0;
    for (int i = 1; i <= k; ++i) value = value * double(n - k + i) / double(i);
    return std::round(value);
}

// folds signed orders into the one-sided profile
CoherenceProfile fold_orders(std::map<long long, double>& keyed, double resolution) {
    CoherenceProfile profile;
    std::map<long long, double> folded;
    for (const auto& [key, w] : keyed) {
        folded[std::llabs(key)] += w;
    }
    for (const auto& [key, w] : folded) {
        profile.terms.emplace_back(double(key) * resolution, w);
    }
    return profile;
}

} // namespace

double CoherenceProfile::eval(double alpha) const {
    double total = 0.0;
    for (const auto& [m, w] : terms) {
        total += w * std::cos(m * alpha);
    }
    return total;
}

double CoherenceProfile::derivative(double alpha) const {
    double total = 0.0;
    for (const auto& [m, w] : terms) {
        total -= w * m * std::sin(m * alpha);
    }
    return total;
}

double CoherenceProfile::total() const {
    double sum = 0.0;
    for (const auto& [m, w] : terms) sum += w;
    return sum;
}

CoherenceProfile coherence_profile(const DenseOperator& rho, const DenseOperator& generator) {
    if (rho.rows() != generator.rows()) {
        throw std::invalid_argument("coherence_profile: dimension mismatch");
    }
    auto [gvals, gvecs] = eig_hermitian(generator);
    const DenseOperator rt = gvecs.adjoint() * rho * gvecs;
    const double resolution = 1e-9;
    std::map<long long, double> keyed;
    for (Eigen::Index a = 0; a < rt.rows(); ++a) {
        for (Eigen::Index b = 0; b < rt.cols(); ++b) {
            const double w = std::norm(rt(a, b));
            if (w == 0.0) continue;
            const long long key = llround((gvals(a) - gvals(b)) / resolution);
            keyed[key] += w;
        }
    }
    // orders here are clustered on a 1e-9 grid
    return fold_orders(keyed, resolution);
}

CoherenceProfile coherence_profile_block(const BlockOperator& deviation) {
    const auto gdiag = block_generator_diag(*deviation.table);
    std::map<long long, double> keyed;
    for (std::size_t s = 0; s < deviation.blocks.size(); ++s) {
        const auto& blk = deviation.blocks[s];
        const auto& g = gdiag[s];
        const double mult = deviation.table->sectors[s].multiplicity;
        for (Eigen::Index a = 0; a < blk.rows(); ++a) {
            for (Eigen::Index b = 0; b < blk.cols(); ++b) {
                const double w = std::norm(blk(a, b));
                if (w == 0.0) continue;
                keyed[llround(g(a) - g(b))] += mult * w;
            }
        }
    }
    return fold_orders(keyed, 1.0);
}

CoherenceProfile coherence_profile_paired(const PairedRuns& pairs) {
    std::map<long long, double> keyed;
    for (const auto& p : pairs.pairs) {
        // each pair contributes 2 mu^2 cos(2 g alpha); orders 2g are integers
        keyed[llround(2.0 * p.g)] += 2.0 * p.mu * p.mu * p.count;
    }
    return fold_orders(keyed, 1.0);
}

std::pair<double, double> orev_moments(const DenseOperator& rho_f,
                                       const DenseOperator& generator, double alpha) {
    if (rho_f.rows() != generator.rows()) {
        throw std::invalid_argument("orev_moments: dimension mismatch");
    }
    if (!is_hermitian(rho_f)) {
        throw std::invalid_argument("orev_moments: state is not Hermitian");
    }
    auto [gvals, gvecs] = eig_hermitian(generator);
    const DenseOperator rt = gvecs.adjoint() * rho_f * gvecs;
    const DenseOperator rt2 = rt * rt;
    Complex first = 0.0, second = 0.0;
    for (Eigen::Index a = 0; a < rt.rows(); ++a) {
        for (Eigen::Index b = 0; b < rt.cols(); ++b) {
            const Complex phase = std::exp(Complex(0.0, -alpha * (gvals(a) - gvals(b))));
            first += rt(a, b) * phase * rt(b, a);
            second += rt(a, b) * phase * rt2(b, a);
        }
    }
    if (std::abs(first.imag()) > 1e-12 || std::abs(second.imag()) > 1e-12) {
        throw contract_error("orev_moments: moments are not real");
    }
    return {first.real(), second.real()};
}

double orev_block_formula(const DenseOperator& rho_f, const DenseOperator& generator,
                          double alpha) {
    return coherence_profile(rho_f, generator).eval(alpha);
}

std::pair<double, double> thermal_closed_form(int n_spins, double lambda0, double lambda1,
                                              double alpha) {
    if (lambda0 < 0 || lambda1 < 0 || std::abs(lambda0 + lambda1 - 1.0) > 1e-12) {
        throw std::invalid_argument("thermal_closed_form: weights must be a distribution");
    }
    double o1 = 0.0, o2 = 0.0;
    for (int i = 0; 2 * i <= n_spins; ++i) {
        const double kappa = (2 * i == n_spins) ? 0.5 : 1.0;
        const double c = kappa * binomial(n_spins, i);
        const double pp = std::pow(lambda0, n_spins - i) * std::pow(lambda1, i);
        const double pm = std::pow(lambda0, i) * std::pow(lambda1, n_spins - i);
        const double cosm = std::cos(double(n_spins - 2 * i) * alpha);
        const double sum = pp + pm;
        const double diff = pp - pm;
        o1 += c * 0.5 * (sum * sum + diff * diff * cosm);
        o2 += c * 0.5 * (sum * (pp * pp + pm * pm) + sum * diff * diff * cosm);
    }
    return {o1, o2};
}

double thermal_probe_qfi(int n_spins, double lambda0, double lambda1) {
    if (lambda0 < 0 || lambda1 < 0 || std::abs(lambda0 + lambda1 - 1.0) > 1e-12) {
        throw std::invalid_argument("thermal_probe_qfi: weights must be a distribution");
    }
    double f = 0.0;
    for (int i = 0; 2 * i <= n_spins; ++i) {
        const double kappa = (2 * i == n_spins) ? 0.5 : 1.0;
        const double c = kappa * binomial(n_spins, i);
        const double pp = std::pow(lambda0, n_spins - i) * std::pow(lambda1, i);
        const double pm = std::pow(lambda0, i) * std::pow(lambda1, n_spins - i);
        if (pp + pm < 1e-300) continue;
        const double m = double(n_spins - 2 * i);
        f += c * (pp - pm) * (pp - pm) * m * m / (pp + pm);
    }
    return f;
}

std::pair<double, double> DeviationReadout::moments(double alpha) const {
    const double d = std::ldexp(1.0, n_spins);
    const double t = profile.eval(alpha);
    const double e2 = epsilon * epsilon;
    const double o1 = 1.0 / d + e2 * t / (d * d);
    const double o2 = 1.0 / (d * d) + e2 * (trace_sq + 2.0 * t) / (d * d * d);
    return {o1, o2};
}

double DeviationReadout::qfi_units() const {
    const double d = std::ldexp(1.0, n_spins);
    double sum = 0.0;
    for (const auto& [m, w] : profile.terms) sum += w * m * m;
    return sum / d;
}

double DeviationReadout::qfi_abs() const {
    return epsilon * epsilon * qfi_units();
}

double DeviationReadout::sql_abs() const {
    return epsilon * epsilon * sum_gamma_sq;
}

DeviationReadout make_deviation_readout(const BlockOperator& deviation_f, double epsilon,
                                        int n_spins, double sum_gamma_sq) {
    DeviationReadout r;
    r.profile = coherence_profile_block(deviation_f);
    r.trace_sq = r.profile.total();
    r.sum_gamma_sq = sum_gamma_sq;
    r.n_spins = n_spins;
    r.epsilon = epsilon;
    return r;
}

DeviationReadout make_deviation_readout(const PairedRuns& pairs, double epsilon, int n_spins,
                                        double sum_gamma_sq) {
    DeviationReadout r;
    r.profile = coherence_profile_paired(pairs);
    r.trace_sq = r.profile.total();
    r.sum_gamma_sq = sum_gamma_sq;
    r.n_spins = n_spins;
    r.epsilon = epsilon;
    return r;
}

double precision_at(const MomentFn& moments, double alpha, double deriv_step) {
    if (deriv_step <= 0) {
        throw std::invalid_argument("precision_at: derivative step must be positive");
    }
    const auto [o1, o2] = moments(alpha);
    const double variance = std::max(o2 - o1 * o1, 0.0);
    const double upper = moments(alpha + deriv_step).first;
    const double lower = moments(alpha - deriv_step).first;
    const double derivative = (upper - lower) / (2.0 * deriv_step);
    if (std::abs(derivative) < 1e-300) {
        return std::numeric_limits<double>::infinity();
    }
    return std::sqrt(variance) / std::abs(derivative);
}

std::vector<double> default_alpha_grid(int points) {
    std::vector<double> grid;
    grid.reserve(std::size_t(points));
    for (int k = 1; k <= points; ++k) {
        grid.push_back(0.5 * kPi * double(k) / double(points));
    }
    return grid;
}

PrecisionReport working_point(const MomentFn& moments, const std::vector<double>& alpha_grid,
                              double deriv_step, double qfi_abs, double f_sql_abs) {
    if (alpha_grid.size() < 50) {
        throw std::invalid_argument("working_point: grid needs at least 50 points");
    }
    if (alpha_grid.front() <= 0 || alpha_grid.back() > 0.5 * kPi + 1e-12) {
        throw std::invalid_argument("working_point: grid must span (0, pi/2]");
    }
    PrecisionReport report;
    report.alpha_grid = alpha_grid;
    report.delta_alpha_sql = 1.0 / std::sqrt(f_sql_abs);
    report.qcrb = 1.0 / std::sqrt(qfi_abs);
    report.min_delta_alpha = std::numeric_limits<double>::infinity();
    for (double alpha : alpha_grid) {
        const auto [o1, o2] = moments(alpha);
        const double upper = moments(alpha + deriv_step).first;
        const double lower = moments(alpha - deriv_step).first;
        const double deriv = (upper - lower) / (2.0 * deriv_step);
        const double variance = std::max(o2 - o1 * o1, 0.0);
        const double da = (std::abs(deriv) < 1e-300)
                              ? std::numeric_limits<double>::infinity()
                              : std::sqrt(variance) / std::abs(deriv);
        report.o_mean.push_back(o1);
        report.o_second.push_back(o2);
        report.derivative.push_back(deriv);
        report.delta_alpha.push_back(da);
        const double ratio = da / report.delta_alpha_sql;
        report.sql_ratio_sq.push_back(ratio * ratio);
        if (da < report.min_delta_alpha) {
            report.min_delta_alpha = da;
            report.working_point = alpha;
        }
    }
    return report;
}

PrecisionReport working_point(const DeviationReadout& readout,
                              const std::vector<double>& alpha_grid, double deriv_step) {
    return working_point([&](double a) { return readout.moments(a); }, alpha_grid, deriv_step,
                         readout.qfi_abs(), readout.sql_abs());
}

double ensemble_precision(double delta_alpha, double nu) {
    if (nu < 1) {
        throw std::invalid_argument("ensemble_precision: nu must be at least 1");
    }
    return delta_alpha / std::sqrt(nu);
}

ScalingResult scaling_sweep(const std::vector<int>& n_values, double epsilon,
                            ProbeFamily family, double deriv_step, int grid_points) {
    ScalingResult result;
    const auto grid = default_alpha_grid(grid_points);
    for (int n : n_values) {
        ScalingRow row;
        row.n_spins = n;
        if (family == ProbeFamily::ghz_pure) {
            // exact GHZ moments: <O> = cos^2(N a / 2) with <O^2> = <O>
            const MomentFn moments = [n](double a) {
                const double l = std::cos(0.5 * n * a);
                const double o1 = l * l;
                return std::pair<double, double>{o1, o1};
            };
            const double f = double(n) * n;
            PrecisionReport rep = working_point(moments, grid, deriv_step, f, double(n));
            row.alpha_working = rep.working_point;
            row.delta_alpha = rep.min_delta_alpha;
            row.delta_alpha_sql = rep.delta_alpha_sql;
            row.delta_alpha_opt_bound = 1.0 / std::sqrt(f);
        } else {
            const auto mu = deviation_spectrum_runs(n - 1, 1.0, 1.0);
            const auto g = generator_spectrum_runs(n);
            const auto pairs = pair_spectra(mu, g);
            const DeviationReadout readout =
                make_deviation_readout(pairs, epsilon, n, double(n));
            PrecisionReport rep = working_point(readout, grid, deriv_step);
            row.alpha_working = rep.working_point;
            row.delta_alpha = rep.min_delta_alpha;
            row.delta_alpha_sql = rep.delta_alpha_sql;
            row.delta_alpha_opt_bound = 1.0 / (epsilon * std::sqrt(paired_qfi_units(pairs)));
        }
        const double r = row.delta_alpha_opt_bound / row.delta_alpha;
        row.ratio_sq_to_opt = r * r;
        result.rows.push_back(row);
    }

    // least-squares slope of log(delta_alpha) against log(N)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double count = double(result.rows.size());
    for (const auto& row : result.rows) {
        const double x = std::log(double(row.n_spins));
        const double y = std::log(row.delta_alpha);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    result.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return result;
}

double thermal_lambda0(double temperature_k) {
    if (temperature_k < 0) {
        throw std::invalid_argument("thermal_lambda0: negative temperature");
    }
    if (temperature_k == 0.0) return 1.0;
    const double h_bar_omega = 2.6e-25; // J
    const double k_b = 1.38e-23;        // J/K
    const double x = h_bar_omega / (k_b * temperature_k);
    return std::exp(x) / (std::exp(x) + std::exp(-x));
}

std::vector<PurityRow> purity_sweep(const std::vector<double>& temperatures_k, int n_spins,
                                    const std::vector<double>& alpha_grid, double deriv_step) {
    std::vector<double> temps = temperatures_k;
    if (std::find(temps.begin(), temps.end(), 0.0) == temps.end()) {
        temps.insert(temps.begin(), 0.0);
    }
    std::vector<PurityRow> rows;
    for (double t : temps) {
        const double lambda0 = thermal_lambda0(t);
        const double lambda1 = 1.0 - lambda0;
        const double f_sql = double(n_spins) * (lambda0 - lambda1) * (lambda0 - lambda1);
        const double f_probe = thermal_probe_qfi(n_spins, lambda0, lambda1);
        const MomentFn moments = [&](double a) {
            return thermal_closed_form(n_spins, lambda0, lambda1, a);
        };
        for (double alpha : alpha_grid) {
            const double da = precision_at(moments, alpha, deriv_step);
            PurityRow row;
            row.temperature_k = t;
            row.lambda0 = lambda0;
            row.alpha = alpha;
            row.ratio_sq = da * da * f_sql;
            row.qcrb_ratio_sq = f_sql / f_probe;
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace echoqfi
