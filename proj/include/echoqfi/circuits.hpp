#pragma once

#include "echoqfi/deviation.hpp"
#include "echoqfi/linalg.hpp"
#include "echoqfi/sectors.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace echoqfi {

/// Angles of the 3-layer engineering circuit: (theta1..theta3) central
/// y-rotations per layer, (theta4..theta6) collective peripheral y-rotations
/// per layer.
struct CircuitParams {
    std::array<double, 6> theta{};

    CircuitParams() = default;
    explicit CircuitParams(const std::array<double, 6>& t);

    /// Angles folded into [0, 2pi) for reporting; never used for evolution.
    std::array<double, 6> canonical() const;
};

enum class SegmentKind {
    central_rotation,    // R_phi(angle) on the central spin
    peripheral_rotation, // R_phi(angle) on every peripheral spin (one RF pulse)
    free_evolution,      // exp(-i H_NMR tau), scale -1 for the refocused adjoint
    encoding             // exp(-i angle G), G = sum_k sigma_z^k / 2
};

struct PulseSegment {
    SegmentKind kind;
    double angle = 0.0;
    double phase = 0.0; // rotation axis in the xy plane; pi/2 = y
    double scale = 1.0; // free evolution direction
};

using PulseSequence = std::vector<PulseSegment>;

/// Forward circuit: R(theta1, theta4), F, R(theta2, theta5), F, R(theta3, theta6),
/// with R(a, b) = exp(-i a sigma_y^P / 2) exp(-i b sum_H sigma_y / 2) and
/// F = exp(-i H_NMR tau).
PulseSequence engineering_sequence(const CircuitParams& params);

/// Exact adjoint: reversed layer order, negated angles, F replaced by F^dagger.
PulseSequence reverse_engineering_sequence(const CircuitParams& params);

/// V_delta = U_E^dagger exp(-i delta G) U_E.
PulseSequence echo_sequence(const CircuitParams& params, double quench);

/// R_phi(theta) = exp(-i theta (cos(phi) sx + sin(phi) sy) / 2).
DenseOperator rotation_gate(double angle, double phase);

// ---- dense execution (site 0 = central = most significant bit) ----

/// Conjugates rho by the segment unitary in place; O(d^2) per segment.
void apply_segment_dense(DenseOperator& rho, const PulseSegment& seg, const SpinSystem& system);

/// Runs a sequence on a density/deviation operator. The optional hook fires
/// after each free-evolution segment (used to interleave relaxation).
void apply_sequence_dense(DenseOperator& rho, const PulseSequence& seq, const SpinSystem& system,
                          const std::function<void(DenseOperator&)>& after_free_evolution = {});

/// Materializes the sequence unitary by applying gates to the identity.
DenseOperator sequence_unitary_dense(const PulseSequence& seq, const SpinSystem& system);

DenseOperator engineering_unitary_dense(const CircuitParams& params, const SpinSystem& system);
DenseOperator reverse_unitary_dense(const CircuitParams& params, const SpinSystem& system);
DenseOperator encoding_unitary_dense(double angle, int n_spins);
DenseOperator echo_circuit_dense(const CircuitParams& params, double quench,
                                 const SpinSystem& system);

// ---- block execution ----

void apply_segment_block(BlockOperator& rho, const PulseSegment& seg, const SpinSystem& system);
void apply_sequence_block(BlockOperator& rho, const PulseSequence& seq, const SpinSystem& system);

BlockOperator sequence_unitary_block(const PulseSequence& seq, const SpinSystem& system,
                                     std::shared_ptr<const SectorTable> table);
BlockOperator engineering_unitary_block(const CircuitParams& params, const SpinSystem& system,
                                        std::shared_ptr<const SectorTable> table);
BlockOperator echo_circuit_block(const CircuitParams& params, double quench,
                                 const SpinSystem& system,
                                 std::shared_ptr<const SectorTable> table);

// ---- pulse imperfections ----

struct PulseErrorModel {
    double relative_amplitude_sigma = 0.05;
    bool enabled = false;
    bool use_bb1 = false;
};

struct Bb1Pulse {
    double angle;
    double phase;
};

/// BB1 composite for a target rotation: R_phi(theta) -> R_w(pi) R_3w(2pi)
/// R_w(pi) R_phi(theta), with w = phase + arccos(-theta / 4pi). Returned in
/// application order (target pulse first). With exact amplitudes the
/// composite equals the bare rotation.
std::array<Bb1Pulse, 4> bb1_expand(double theta, double phase);

/// Scales every logical rotation angle by (1 + eta), eta ~ Normal(0, sigma),
/// one independent draw per logical pulse; a BB1 expansion shares its logical
/// pulse's draw (the four components are one miscalibrated RF pulse).
/// Deterministic per seed. Free evolution and encoding are untouched.
PulseSequence apply_pulse_errors(const PulseSequence& seq, const PulseErrorModel& model,
                                 std::uint64_t rng_seed);

} // namespace echoqfi
