#include "echoqfi/circuits.hpp"
#include "echoqfi/errors.hpp"
#include "echoqfi/pauli.hpp"
#include "echoqfi/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace echoqfi {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(const std::array<double, 6>& theta) {
    for (double t : theta) {
        if (!std::isfinite(t)) {
            throw std::invalid_argument("CircuitParams: angles must be finite");
        }
    }
}

// rho <- U rho on the qubit at `site` (left multiplication).
void left_multiply_qubit(DenseOperator& m, const DenseOperator& u, int site, int n) {
    const Eigen::Index dim = m.rows();
    const Eigen::Index mask = Eigen::Index(1) << (n - 1 - site);
    const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        Complex* col = m.col(c).data();
        for (Eigen::Index r = 0; r < dim; ++r) {
            if (r & mask) continue;
            const Eigen::Index r1 = r | mask;
            const Complex a = col[r];
            const Complex b = col[r1];
            col[r] = u00 * a + u01 * b;
            col[r1] = u10 * a + u11 * b;
        }
    }
}

// rho <- rho U^dagger on the qubit at `site` (right multiplication).
void right_multiply_qubit_dagger(DenseOperator& m, const DenseOperator& u, int site, int n) {
    const Eigen::Index dim = m.rows();
    const Eigen::Index mask = Eigen::Index(1) << (n - 1 - site);
    const Complex d00 = std::conj(u(0, 0)), d01 = std::conj(u(0, 1));
    const Complex d10 = std::conj(u(1, 0)), d11 = std::conj(u(1, 1));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c & mask) continue;
        const Eigen::Index c1 = c | mask;
        Complex* colA = m.col(c).data();
        Complex* colB = m.col(c1).data();
        for (Eigen::Index r = 0; r < dim; ++r) {
            const Complex a = colA[r];
            const Complex b = colB[r];
            colA[r] = a * d00 + b * d01;
            colB[r] = a * d10 + b * d11;
        }
    }
}

// Diagonal phase vector of the free evolution exp(-i H_NMR tau * scale).
Eigen::VectorXcd free_evolution_phases(const SpinSystem& system, double scale, Eigen::Index dim,
                                       int n) {
    const double coupling = 0.5 * kPi * system.j_coupling_hz * system.tau_s * scale;
    Eigen::VectorXcd f(dim);
    const Eigen::Index central_mask = dim >> 1;
    for (Eigen::Index b = 0; b < dim; ++b) {
        const double s0 = (b & central_mask) ? -1.0 : 1.0;
        int ones = 0;
        Eigen::Index rest = b & ~central_mask;
        while (rest) {
            ++ones;
            rest &= rest - 1;
        }
        const double zsum = double(n - 1) - 2.0 * ones;
        f(b) = std::exp(Complex(0.0, -coupling * s0 * zsum));
    }
    return f;
}

Eigen::VectorXcd encoding_phases(double angle, Eigen::Index dim, int n) {
    Eigen::VectorXcd f(dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        int ones = 0;
        Eigen::Index rest = b;
        while (rest) {
            ++ones;
            rest &= rest - 1;
        }
        const double g = 0.5 * (n - 2 * ones);
        f(b) = std::exp(Complex(0.0, -angle * g));
    }
    return f;
}

void conjugate_by_diagonal(DenseOperator& rho, const Eigen::VectorXcd& f) {
    const Eigen::Index dim = rho.rows();
    for (Eigen::Index c = 0; c < dim; ++c) {
        const Complex fc = std::conj(f(c));
        Complex* col = rho.col(c).data();
        for (Eigen::Index r = 0; r < dim; ++r) {
            col[r] *= f(r) * fc;
        }
    }
}

void left_multiply_diagonal(DenseOperator& m, const Eigen::VectorXcd& f) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        Complex* col = m.col(c).data();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            col[r] *= f(r);
        }
    }
}

} // namespace

CircuitParams::CircuitParams(const std::array<double, 6>& t) : theta(t) {
    require_finite(theta);
}

std::array<double, 6> CircuitParams::canonical() const {
    std::array<double, 6> out{};
    for (std::size_t i = 0; i < 6; ++i) {
        double t = std::fmod(theta[i], 2.0 * kPi);
        if (t < 0) t += 2.0 * kPi;
        out[i] = t;
    }
    return out;
}

PulseSequence engineering_sequence(const CircuitParams& params) {
    require_finite(params.theta);
    const auto& t = params.theta;
    PulseSequence seq;
    seq.push_back({SegmentKind::central_rotation, t[0], kPi / 2, 1.0});
    seq.push_back({SegmentKind::peripheral_rotation, t[3], kPi / 2, 1.0});
    seq.push_back({SegmentKind::free_evolution, 0.0, 0.0, 1.0});
    seq.push_back({SegmentKind::central_rotation, t[1], kPi / 2, 1.0});
    seq.push_back({SegmentKind::peripheral_rotation, t[4], kPi / 2, 1.0});
    seq.push_back({SegmentKind::free_evolution, 0.0, 0.0, 1.0});
    seq.push_back({SegmentKind::central_rotation, t[2], kPi / 2, 1.0});
    seq.push_back({SegmentKind::peripheral_rotation, t[5], kPi / 2, 1.0});
    return seq;
}

PulseSequence reverse_engineering_sequence(const CircuitParams& params) {
    PulseSequence fwd = engineering_sequence(params);
    PulseSequence rev;
    for (auto it = fwd.rbegin(); it != fwd.rend(); ++it) {
        PulseSegment seg = *it;
        if (seg.kind == SegmentKind::free_evolution) {
            seg.scale = -seg.scale;
        } else {
            seg.angle = -seg.angle;
        }
        rev.push_back(seg);
    }
    return rev;
}

PulseSequence echo_sequence(const CircuitParams& params, double quench) {
    if (!std::isfinite(quench)) {
        throw std::invalid_argument("echo_sequence: quench must be finite");
    }
    PulseSequence seq = engineering_sequence(params);
    seq.push_back({SegmentKind::encoding, quench, 0.0, 1.0});
    PulseSequence rev = reverse_engineering_sequence(params);
    seq.insert(seq.end(), rev.begin(), rev.end());
    return seq;
}

DenseOperator rotation_gate(double angle, double phase) {
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    DenseOperator u(2, 2);
    u(0, 0) = c;
    u(0, 1) = Complex(0, -s) * std::exp(Complex(0, -phase));
    u(1, 0) = Complex(0, -s) * std::exp(Complex(0, phase));
    u(1, 1) = c;
    return u;
}

void apply_segment_dense(DenseOperator& rho, const PulseSegment& seg, const SpinSystem& system) {
    const int n = system.n_spins();
    const Eigen::Index dim = rho.rows();
    switch (seg.kind) {
        case SegmentKind::central_rotation: {
            const DenseOperator u = rotation_gate(seg.angle, seg.phase);
            left_multiply_qubit(rho, u, 0, n);
            right_multiply_qubit_dagger(rho, u, 0, n);
            break;
        }
        case SegmentKind::peripheral_rotation: {
            const DenseOperator u = rotation_gate(seg.angle, seg.phase);
            for (int k = 1; k < n; ++k) {
                left_multiply_qubit(rho, u, k, n);
                right_multiply_qubit_dagger(rho, u, k, n);
            }
            break;
        }
        case SegmentKind::free_evolution:
            conjugate_by_diagonal(rho, free_evolution_phases(system, seg.scale, dim, n));
            break;
        case SegmentKind::encoding:
            conjugate_by_diagonal(rho, encoding_phases(seg.angle, dim, n));
            break;
    }
}

void apply_sequence_dense(DenseOperator& rho, const PulseSequence& seq, const SpinSystem& system,
                          const std::function<void(DenseOperator&)>& after_free_evolution) {
    for (const auto& seg : seq) {
        apply_segment_dense(rho, seg, system);
        if (seg.kind == SegmentKind::free_evolution && after_free_evolution) {
            after_free_evolution(rho);
        }
    }
}

DenseOperator sequence_unitary_dense(const PulseSequence& seq, const SpinSystem& system) {
    const int n = system.n_spins();
    const Eigen::Index dim = Eigen::Index(1) << n;
    check_dense_dim(dim);
    DenseOperator u = DenseOperator::Identity(dim, dim);
    for (const auto& seg : seq) {
        switch (seg.kind) {
            case SegmentKind::central_rotation:
                left_multiply_qubit(u, rotation_gate(seg.angle, seg.phase), 0, n);
                break;
            case SegmentKind::peripheral_rotation: {
                const DenseOperator g = rotation_gate(seg.angle, seg.phase);
                for (int k = 1; k < n; ++k) left_multiply_qubit(u, g, k, n);
                break;
            }
            case SegmentKind::free_evolution:
                left_multiply_diagonal(u, free_evolution_phases(system, seg.scale, dim, n));
                break;
            case SegmentKind::encoding:
                left_multiply_diagonal(u, encoding_phases(seg.angle, dim, n));
                break;
        }
    }
    return u;
}

DenseOperator engineering_unitary_dense(const CircuitParams& params, const SpinSystem& system) {
    return sequence_unitary_dense(engineering_sequence(params), system);
}

DenseOperator reverse_unitary_dense(const CircuitParams& params, const SpinSystem& system) {
    return sequence_unitary_dense(reverse_engineering_sequence(params), system);
}

DenseOperator encoding_unitary_dense(double angle, int n_spins) {
    if (!std::isfinite(angle)) {
        throw std::invalid_argument("encoding_unitary_dense: angle must be finite");
    }
    const Eigen::Index dim = Eigen::Index(1) << n_spins;
    check_dense_dim(dim);
    return DenseOperator(encoding_phases(angle, dim, n_spins).asDiagonal());
}

DenseOperator echo_circuit_dense(const CircuitParams& params, double quench,
                                 const SpinSystem& system) {
    return sequence_unitary_dense(echo_sequence(params, quench), system);
}

// ---- block execution ----

namespace {

Eigen::VectorXcd block_free_evolution_phases(const SpinSystem& system, double scale,
                                             int twice_j) {
    const double coupling = kPi * system.j_coupling_hz * system.tau_s * scale;
    const int dsec = twice_j + 1;
    const double j = 0.5 * twice_j;
    Eigen::VectorXcd f(2 * dsec);
    for (int u = 0; u < 2; ++u) {
        const double s = (u == 0) ? 1.0 : -1.0;
        for (int p = 0; p < dsec; ++p) {
            f(u * dsec + p) = std::exp(Complex(0.0, -coupling * s * (j - p)));
        }
    }
    return f;
}

Eigen::VectorXcd block_encoding_phases(double angle, int twice_j) {
    const int dsec = twice_j + 1;
    const double j = 0.5 * twice_j;
    Eigen::VectorXcd f(2 * dsec);
    for (int u = 0; u < 2; ++u) {
        const double s = (u == 0) ? 0.5 : -0.5;
        for (int p = 0; p < dsec; ++p) {
            f(u * dsec + p) = std::exp(Complex(0.0, -angle * (s + (j - p))));
        }
    }
    return f;
}

DenseOperator block_segment_unitary(const PulseSegment& seg, const SpinSystem& system,
                                    int twice_j) {
    const int dsec = twice_j + 1;
    switch (seg.kind) {
        case SegmentKind::central_rotation:
            return kron(rotation_gate(seg.angle, seg.phase),
                        DenseOperator::Identity(dsec, dsec));
        case SegmentKind::peripheral_rotation:
            return kron(DenseOperator::Identity(2, 2),
                        collective_rotation(twice_j, seg.angle, seg.phase));
        case SegmentKind::free_evolution:
            return DenseOperator(
                block_free_evolution_phases(system, seg.scale, twice_j).asDiagonal());
        case SegmentKind::encoding:
            return DenseOperator(block_encoding_phases(seg.angle, twice_j).asDiagonal());
    }
    throw std::invalid_argument("unknown segment kind");
}

} // namespace

void apply_segment_block(BlockOperator& rho, const PulseSegment& seg, const SpinSystem& system) {
    for (std::size_t s = 0; s < rho.blocks.size(); ++s) {
        const DenseOperator u =
            block_segment_unitary(seg, system, rho.table->sectors[s].twice_j);
        rho.blocks[s] = u * rho.blocks[s] * u.adjoint();
    }
}

void apply_sequence_block(BlockOperator& rho, const PulseSequence& seq, const SpinSystem& system) {
    for (const auto& seg : seq) {
        apply_segment_block(rho, seg, system);
    }
}

BlockOperator sequence_unitary_block(const PulseSequence& seq, const SpinSystem& system,
                                     std::shared_ptr<const SectorTable> table) {
    BlockOperator u = block_identity(std::move(table));
    for (const auto& seg : seq) {
        for (std::size_t s = 0; s < u.blocks.size(); ++s) {
            u.blocks[s] = block_segment_unitary(seg, system, u.table->sectors[s].twice_j) *
                          u.blocks[s];
        }
    }
    return u;
}

BlockOperator engineering_unitary_block(const CircuitParams& params, const SpinSystem& system,
                                        std::shared_ptr<const SectorTable> table) {
    return sequence_unitary_block(engineering_sequence(params), system, std::move(table));
}

BlockOperator echo_circuit_block(const CircuitParams& params, double quench,
                                 const SpinSystem& system,
                                 std::shared_ptr<const SectorTable> table) {
    return sequence_unitary_block(echo_sequence(params, quench), system, std::move(table));
}

// ---- pulse imperfections ----

std::array<Bb1Pulse, 4> bb1_expand(double theta, double phase) {
    const double arg = -theta / (4.0 * kPi);
    if (std::abs(arg) > 1.0) {
        throw std::invalid_argument("bb1_expand: |theta| > 4 pi");
    }
    const double w = phase + std::acos(arg);
    return {{{theta, phase}, {kPi, w}, {2.0 * kPi, phase + 3.0 * (w - phase)}, {kPi, w}}};
}

PulseSequence apply_pulse_errors(const PulseSequence& seq, const PulseErrorModel& model,
                                 std::uint64_t rng_seed) {
    if (model.relative_amplitude_sigma < 0) {
        throw std::invalid_argument("PulseErrorModel: sigma must be non-negative");
    }
    auto rng = make_engine(rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    PulseSequence out;
    for (const auto& seg : seq) {
        const bool rotation = seg.kind == SegmentKind::central_rotation ||
                              seg.kind == SegmentKind::peripheral_rotation;
        if (!rotation) {
            out.push_back(seg);
            continue;
        }
        double scale = 1.0;
        if (model.enabled && model.relative_amplitude_sigma > 0) {
            scale += model.relative_amplitude_sigma * gauss(rng);
        }
        if (model.use_bb1) {
            for (const auto& pulse : bb1_expand(seg.angle, seg.phase)) {
                out.push_back({seg.kind, pulse.angle * scale, pulse.phase, seg.scale});
            }
        } else {
            PulseSegment scaled = seg;
            scaled.angle *= scale;
            out.push_back(scaled);
        }
    }
    return out;
}

} // namespace echoqfi
