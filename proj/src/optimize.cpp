#include "echoqfi/optimize.hpp"
#include "echoqfi/errors.hpp"
#include "echoqfi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace echoqfi {

void NmConfig::validate() const {
    if (!(reflection > 0) || !(expansion > 1) || !(contraction > 0 && contraction < 1) ||
        !(shrink > 0 && shrink < 1)) {
        throw std::invalid_argument("NmConfig: coefficients out of range");
    }
    if (max_iterations < 0) {
        throw std::invalid_argument("NmConfig: negative iteration cap");
    }
}

Eigen::MatrixXd initial_simplex_modified(const Eigen::VectorXd& theta1, int n) {
    if (n < 1 || theta1.size() != n) {
        throw std::invalid_argument("initial_simplex_modified: bad dimension");
    }
    const double pi2 = 2.0 * std::numbers::pi;
    const double off = pi2 * (std::sqrt(double(n + 1)) - 1.0);
    const double matched = pi2 * (std::sqrt(double(n + 1)) + n - 1.0);
    Eigen::MatrixXd vertices(n + 1, n);
    vertices.row(0) = theta1.transpose();
    for (int i = 1; i <= n; ++i) {
        for (int j = 0; j < n; ++j) {
            // i, j are zero-based here; the matched entry is i == j+1 in
            // one-based indexing, i.e. row i touches coordinate i-1.
            vertices(i, j) = theta1(j) + ((i == j + 1) ? matched : off);
        }
    }
    return vertices;
}

namespace {

double evaluate(const Objective& objective, const Eigen::VectorXd& x) {
    const double value = objective(x);
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "objective returned a non-finite value at theta = [";
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            msg << (i ? ", " : "") << x(i);
        }
        msg << "]";
        throw contract_error(msg.str());
    }
    return value;
}

void order_simplex(Simplex& s) {
    const int rows = s.n + 1;
    std::vector<int> idx(std::size_t(rows));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return s.values(a) < s.values(b); });
    Eigen::MatrixXd v(rows, s.n);
    Eigen::VectorXd f(rows);
    for (int i = 0; i < rows; ++i) {
        v.row(i) = s.vertices.row(idx[std::size_t(i)]);
        f(i) = s.values(idx[std::size_t(i)]);
    }
    s.vertices = std::move(v);
    s.values = std::move(f);
}

} // namespace

Simplex make_simplex(const Eigen::MatrixXd& vertices, const Objective& objective) {
    Simplex s;
    s.n = int(vertices.cols());
    if (vertices.rows() != s.n + 1) {
        throw std::invalid_argument("make_simplex: need n+1 vertices");
    }
    s.vertices = vertices;
    s.values.resize(s.n + 1);
    for (int i = 0; i <= s.n; ++i) {
        s.values(i) = evaluate(objective, vertices.row(i).transpose());
    }
    order_simplex(s);
    return s;
}

NmMove nm_step(Simplex& s, const Objective& objective, const NmConfig& config) {
    config.validate();
    const int n = s.n;
    for (int i = 0; i < n; ++i) {
        if (s.values(i) > s.values(i + 1)) {
            throw std::invalid_argument("nm_step: simplex is not ordered");
        }
    }

    const Eigen::VectorXd centroid =
        s.vertices.topRows(n).colwise().mean().transpose();
    const Eigen::VectorXd direction =
        (config.variant == NmConfig::ReflectionVariant::standard)
            ? Eigen::VectorXd(centroid - s.vertices.row(n).transpose())
            : Eigen::VectorXd(s.vertices.row(n).transpose() -
                              s.vertices.row(n - 1).transpose());

    const double f_best = s.values(0);
    const double f_second_worst = s.values(n - 1);
    const double f_worst = s.values(n);

    const auto replace_worst = [&](const Eigen::VectorXd& x, double fx) {
        s.vertices.row(n) = x.transpose();
        s.values(n) = fx;
    };

    const Eigen::VectorXd xr = centroid + config.reflection * direction;
    const double fr = evaluate(objective, xr);

    NmMove move;
    bool do_shrink = false;
    if (fr < f_best) {
        const Eigen::VectorXd xe = centroid + config.expansion * config.reflection * direction;
        const double fe = evaluate(objective, xe);
        if (fe < fr) {
            replace_worst(xe, fe);
            move = NmMove::expand;
        } else {
            replace_worst(xr, fr);
            move = NmMove::reflect;
        }
    } else if (fr <= f_second_worst) {
        replace_worst(xr, fr);
        move = NmMove::reflect;
    } else if (fr <= f_worst) {
        const Eigen::VectorXd xc =
            centroid + config.contraction * config.reflection * direction;
        const double fc = evaluate(objective, xc);
        if (fc <= fr) {
            replace_worst(xc, fc);
            move = NmMove::contract_out;
        } else {
            do_shrink = true;
        }
    } else {
        const Eigen::VectorXd xc =
            centroid - config.contraction * config.reflection * direction;
        const double fc = evaluate(objective, xc);
        if (fc <= fr) {
            replace_worst(xc, fc);
            move = NmMove::contract_in;
        } else {
            do_shrink = true;
        }
    }

    if (do_shrink) {
        const Eigen::VectorXd best = s.vertices.row(0).transpose();
        for (int i = 1; i <= n; ++i) {
            const Eigen::VectorXd xi =
                best + config.shrink * (s.vertices.row(i).transpose() - best);
            s.vertices.row(i) = xi.transpose();
            s.values(i) = evaluate(objective, xi);
        }
        move = NmMove::shrink;
    }

    order_simplex(s);
    return move;
}

OptimizationTrace optimize_probe(const SpinSystem& system, const OptimizeProbeConfig& config) {
    config.nm.validate();
    const int n_params = 6;
    const int n_spins = system.n_spins();

    auto table = make_sector_table(system.n_peripheral);
    const BlockProbe probe = make_block_probe(system, config.epsilon);
    const double trace_sq = block_trace_product(probe.deviation, probe.deviation).real();

    const bool needs_dense = config.noise.relaxation.has_value();
    DeviationState dense_state;
    if (needs_dense) {
        dense_state = equilibrium_state(system, config.epsilon);
    }

    auto rng = make_engine(config.seed);
    const Objective objective = [&](const Eigen::VectorXd& x) {
        std::array<double, 6> theta{};
        for (int i = 0; i < n_params; ++i) theta[std::size_t(i)] = x(i);
        const CircuitParams params(theta);
        if (needs_dense) {
            return measured_le_deviation_dense(dense_state, params, config.quench, system,
                                               config.noise, rng);
        }
        return measured_le_deviation_block(probe, params, config.quench, system, config.noise,
                                           rng);
    };

    Eigen::VectorXd start = config.theta_start;
    if (start.size() == 0) start = Eigen::VectorXd::Zero(n_params);
    Simplex simplex = make_simplex(initial_simplex_modified(start, n_params), objective);

    OptimizationTrace trace;
    trace.f_opt = optimal_qfi_units(system);
    const auto record = [&](int iteration) {
        OptimizationTraceRow row;
        row.iteration = iteration;
        row.theta_best = simplex.vertices.row(0).transpose();
        row.le_measured = simplex.values(0);
        row.qfi_le =
            qfi_from_le_deviation(row.le_measured, trace_sq, n_spins, config.quench).value;
        std::array<double, 6> theta{};
        for (int i = 0; i < n_params; ++i) theta[std::size_t(i)] = row.theta_best(i);
        row.qfi_exact = qfi_deviation_block(
            probe_deviation_block(CircuitParams(theta), system, table), n_spins);
        trace.rows.push_back(std::move(row));
    };

    record(0);
    for (int iter = 1; iter <= config.nm.max_iterations; ++iter) {
        nm_step(simplex, objective, config.nm);
        record(iter);
    }
    return trace;
}

} // namespace echoqfi
