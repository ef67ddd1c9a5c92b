#pragma once

#include "echoqfi/metrology.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace echoqfi {

struct NmConfig {
    enum class ReflectionVariant { standard, paper_literal };

    double reflection = 1.0;  // alpha
    double expansion = 2.0;   // gamma
    double contraction = 0.5; // beta
    double shrink = 0.5;      // delta_s (renamed to avoid clash with the quench)
    int max_iterations = 70;
    ReflectionVariant variant = ReflectionVariant::standard;

    void validate() const;
};

/// n+1 parameter vertices with objective values, kept ordered ascending.
struct Simplex {
    Eigen::MatrixXd vertices; // (n+1) x n
    Eigen::VectorXd values;   // n+1
    int n = 0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Modified initial simplex: vertex 1 is theta1; for i > 1,
/// theta_j^(i) = theta_j^(1) + 2 pi (sqrt(n+1) - 1)          if i != j+1,
/// theta_j^(i) = theta_j^(1) + 2 pi (sqrt(n+1) + n - 1)      if i == j+1.
Eigen::MatrixXd initial_simplex_modified(const Eigen::VectorXd& theta1, int n);

/// Evaluates all vertices and orders them ascending.
Simplex make_simplex(const Eigen::MatrixXd& vertices, const Objective& objective);

enum class NmMove { reflect, expand, contract_out, contract_in, shrink };

/// One Nelder-Mead transformation. In the `standard` variant the trial points
/// lie on the line through the centroid of the best n vertices and the worst
/// vertex; `paper_literal` uses the printed direction theta^(n+1) - theta^(n)
/// verbatim. Exactly one vertex changes except for shrink.
NmMove nm_step(Simplex& simplex, const Objective& objective, const NmConfig& config);

struct OptimizationTraceRow {
    int iteration;
    Eigen::VectorXd theta_best;
    double le_measured; // noisy calibrated deviation signal of the best vertex
    double qfi_le;      // estimate from le_measured (eps^2 units)
    double qfi_exact;   // noiseless oracle at theta_best (eps^2 units)
};

struct OptimizationTrace {
    std::vector<OptimizationTraceRow> rows;
    double f_opt; // optimal QFI of the system (eps^2 units)
};

struct OptimizeProbeConfig {
    NmConfig nm;
    NoisyEchoConfig noise;
    double quench = 0.2;
    double epsilon = 1e-5;
    std::uint64_t seed = 0;
    Eigen::VectorXd theta_start; // defaults to the zero vector
};

/// Full variational loop: minimizes the measured deviation signal of the
/// echo (equivalently maximizes the QFI at fixed quench) with Nelder-Mead
/// from the modified initial simplex. The QFI columns are diagnostics and
/// are never fed back into the optimization.
OptimizationTrace optimize_probe(const SpinSystem& system, const OptimizeProbeConfig& config);

} // namespace echoqfi
