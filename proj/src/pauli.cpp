#include "echoqfi/pauli.hpp"
#include "echoqfi/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace echoqfi {

PauliString::PauliString(Complex coeff, std::vector<PauliSite> s, int n)
    : coefficient(coeff), sites(std::move(s)), width(n) {
    int prev = -1;
    for (const auto& site : sites) {
        if (site.index <= prev) {
            throw std::invalid_argument("PauliString: site indices must be strictly increasing");
        }
        if (site.index >= width) {
            throw std::invalid_argument("PauliString: site index exceeds width");
        }
        prev = site.index;
    }
}

DenseOperator sigma_x() {
    DenseOperator m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

DenseOperator sigma_y() {
    DenseOperator m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

DenseOperator sigma_z() {
    DenseOperator m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

DenseOperator identity2() {
    return DenseOperator::Identity(2, 2);
}

namespace {

DenseOperator axis_matrix(PauliAxis axis) {
    switch (axis) {
        case PauliAxis::X: return sigma_x();
        case PauliAxis::Y: return sigma_y();
        case PauliAxis::Z: return sigma_z();
    }
    throw std::invalid_argument("unknown Pauli axis");
}

} // namespace

DenseOperator pauli_to_dense(const PauliString& p, int n) {
    if (n < p.width || (!p.sites.empty() && p.sites.back().index >= n)) {
        throw std::invalid_argument("pauli_to_dense: width mismatch");
    }
    if (n < 1 || n > 12) {
        // 2^12 = 4096 is the dense cap.
        throw capacity_error("pauli_to_dense: width out of range");
    }
    DenseOperator out = DenseOperator::Identity(1, 1);
    std::size_t next = 0;
    for (int site = 0; site < n; ++site) {
        if (next < p.sites.size() && p.sites[next].index == site) {
            out = kron(out, axis_matrix(p.sites[next].axis));
            ++next;
        } else {
            out = kron(out, identity2());
        }
    }
    return p.coefficient * out;
}

DenseOperator collective_z_half(int n) {
    if (n < 1 || n > 12) {
        throw capacity_error("collective_z_half: width out of range");
    }
    const Eigen::Index dim = Eigen::Index(1) << n;
    DenseOperator g = DenseOperator::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        int ones = 0;
        for (int k = 0; k < n; ++k) ones += int((b >> k) & 1);
        g(b, b) = 0.5 * (n - 2 * ones);
    }
    return g;
}

StateVector ghz_state(int n) {
    const Eigen::Index dim = Eigen::Index(1) << n;
    StateVector v = StateVector::Zero(dim);
    v(0) = 1.0 / std::sqrt(2.0);
    v(dim - 1) = 1.0 / std::sqrt(2.0);
    return v;
}

} // namespace echoqfi
