#pragma once

#include "echoqfi/linalg.hpp"

#include <vector>

namespace echoqfi {

enum class PauliAxis : char { X = 'X', Y = 'Y', Z = 'Z' };

struct PauliSite {
    int index;
    PauliAxis axis;
};

/// A weighted Pauli word on `width` spins. Site indices must be strictly
/// increasing and all smaller than the width.
struct PauliString {
    Complex coefficient{1.0, 0.0};
    std::vector<PauliSite> sites;
    int width = 0;

    PauliString() = default;
    PauliString(Complex coeff, std::vector<PauliSite> s, int n);
};

DenseOperator sigma_x();
DenseOperator sigma_y();
DenseOperator sigma_z();
DenseOperator identity2();

/// Dense 2^n x 2^n matrix of the Pauli string (identity on unlisted sites).
/// Site 0 maps to the most significant bit of the basis index.
DenseOperator pauli_to_dense(const PauliString& p, int n);

/// Sum_{k} sigma_z^k / 2 on n spins (diagonal encoding generator).
DenseOperator collective_z_half(int n);

/// (|0...0> + |1...1>)/sqrt(2) on n qubits.
StateVector ghz_state(int n);

} // namespace echoqfi
