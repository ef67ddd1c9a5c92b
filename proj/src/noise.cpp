#include "echoqfi/noise.hpp"
#include "echoqfi/errors.hpp"
#include "echoqfi/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace echoqfi {

void RelaxationParams::validate() const {
    if (t1_central <= 0 || t2_central <= 0 || t1_peripheral <= 0 || t2_peripheral <= 0 ||
        step_duration_s <= 0) {
        throw std::invalid_argument("RelaxationParams: times must be positive");
    }
    if (t2_central > 2 * t1_central || t2_peripheral > 2 * t1_peripheral) {
        throw std::invalid_argument("RelaxationParams: physicality requires T2 <= 2 T1");
    }
}

double RelaxationParams::xi(bool central, double dt) const {
    const double t2 = central ? t2_central : t2_peripheral;
    return 0.5 * (1.0 - std::exp(-dt / t2));
}

double RelaxationParams::eta(bool central, double dt) const {
    const double t1 = central ? t1_central : t1_peripheral;
    return 1.0 - std::exp(-dt / t1);
}

void phase_damping(DenseOperator& rho, const RelaxationParams& params, int n_spins, double dt) {
    if (dt < 0) throw std::invalid_argument("phase_damping: negative duration");
    if (dt == 0) return;
    const Eigen::Index dim = rho.rows();
    // Off-diagonal scaling by prod_i (1 - 2 xi_i) over spins whose bit differs;
    // the factor depends only on r XOR c.
    const double fc = 1.0 - 2.0 * params.xi(true, dt);
    const double fp = 1.0 - 2.0 * params.xi(false, dt);
    std::vector<double> factor(std::size_t(dim));
    const Eigen::Index central_mask = dim >> 1;
    for (Eigen::Index x = 0; x < dim; ++x) {
        double f = (x & central_mask) ? fc : 1.0;
        Eigen::Index rest = x & ~central_mask;
        while (rest) {
            f *= fp;
            rest &= rest - 1;
        }
        factor[std::size_t(x)] = f;
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
        Complex* col = rho.col(c).data();
        for (Eigen::Index r = 0; r < dim; ++r) {
            col[r] *= factor[std::size_t(r ^ c)];
        }
    }
    (void)n_spins;
}

void generalized_amplitude_damping(DenseOperator& rho, const RelaxationParams& params,
                                   int n_spins, double dt) {
    if (dt < 0) throw std::invalid_argument("generalized_amplitude_damping: negative duration");
    if (dt == 0) return;
    const Eigen::Index dim = rho.rows();
    for (int k = 0; k < n_spins; ++k) {
        const bool central = (k == 0);
        const double eta = params.eta(central, dt);
        const double keep = 1.0 - 0.5 * eta;
        const double swap = 0.5 * eta;
        const double coh = std::sqrt(1.0 - eta);
        const Eigen::Index mask = Eigen::Index(1) << (n_spins - 1 - k);
        for (Eigen::Index c0 = 0; c0 < dim; ++c0) {
            if (c0 & mask) continue;
            const Eigen::Index c1 = c0 | mask;
            Complex* colA = rho.col(c0).data();
            Complex* colB = rho.col(c1).data();
            for (Eigen::Index r0 = 0; r0 < dim; ++r0) {
                if (r0 & mask) continue;
                const Eigen::Index r1 = r0 | mask;
                // populations within the spin-k subspace mix pairwise
                const Complex a = colA[r0];
                const Complex b = colB[r1];
                colA[r0] = keep * a + swap * b;
                colB[r1] = swap * a + keep * b;
                // coherences in spin k are scaled
                colB[r0] *= coh;
                colA[r1] *= coh;
            }
        }
    }
}

void relax_over(DenseOperator& rho, double duration_s, const RelaxationParams& params,
                int n_spins) {
    if (duration_s < 0) throw std::invalid_argument("relax_over: negative duration");
    params.validate();
    double remaining = duration_s;
    while (remaining > 1e-15) {
        const double dt = std::min(remaining, params.step_duration_s);
        phase_damping(rho, params, n_spins, dt);
        generalized_amplitude_damping(rho, params, n_spins, dt);
        remaining -= dt;
    }
}

double measurement_noise(double value, double sigma, std::mt19937_64& rng) {
    if (sigma < 0) throw std::invalid_argument("measurement_noise: negative sigma");
    if (sigma == 0) return value;
    std::normal_distribution<double> gauss(0.0, sigma);
    return value + gauss(rng);
}

double measurement_noise(double value, double sigma, std::uint64_t rng_seed) {
    auto rng = make_engine(rng_seed);
    return measurement_noise(value, sigma, rng);
}

double calibrate_with_reference(double noisy_ldelta, double noisy_l0, double ideal_l0) {
    if (std::abs(noisy_l0) < 1e-12 * std::abs(ideal_l0)) {
        throw contract_error("calibrate_with_reference: degenerate reference signal");
    }
    return noisy_ldelta * (ideal_l0 / noisy_l0);
}

} // namespace echoqfi
