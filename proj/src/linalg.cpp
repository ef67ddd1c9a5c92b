#include "echoqfi/linalg.hpp"
#include "echoqfi/errors.hpp"

#include <string>

namespace echoqfi {

void check_dense_dim(Eigen::Index dim) {
    if (dim > kMaxDenseDim) {
        throw capacity_error("dense dimension " + std::to_string(dim) +
                             " exceeds cap " + std::to_string(kMaxDenseDim));
    }
}

double max_abs(const DenseOperator& a) {
    return a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const DenseOperator& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return max_abs(a - a.adjoint()) <= tol;
}

bool is_unitary(const DenseOperator& u, double tol) {
    if (u.rows() != u.cols()) return false;
    DenseOperator g = u.adjoint() * u;
    g -= DenseOperator::Identity(u.rows(), u.cols());
    return max_abs(g) <= tol;
}

DenseOperator conjugate(const DenseOperator& rho, const DenseOperator& u) {
    if (rho.rows() != rho.cols() || u.rows() != u.cols() || rho.rows() != u.rows()) {
        throw std::invalid_argument("conjugate: dimension mismatch");
    }
    if (!is_unitary(u)) {
        throw contract_error("conjugate: operator is not unitary within tolerance");
    }
    return u * rho * u.adjoint();
}

std::pair<Eigen::VectorXd, DenseOperator> eig_hermitian(const DenseOperator& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("eig_hermitian: matrix is not square");
    }
    if (!is_hermitian(a)) {
        throw std::invalid_argument("eig_hermitian: matrix is not Hermitian within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<DenseOperator> solver(a);
    if (solver.info() != Eigen::Success) {
        throw contract_error("eig_hermitian: eigensolver failed to converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

DenseOperator kron(const DenseOperator& a, const DenseOperator& b) {
    check_dense_dim(a.rows() * b.rows());
    DenseOperator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
        }
    }
    return out;
}

DenseOperator random_unitary(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    DenseOperator g(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int k = 0; k < dim; ++k) {
            g(i, k) = Complex(gauss(rng), gauss(rng));
        }
    }
    Eigen::HouseholderQR<DenseOperator> qr(g);
    DenseOperator q = qr.householderQ();
    DenseOperator r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix phases so the distribution is Haar.
    for (int k = 0; k < dim; ++k) {
        Complex d = r(k, k);
        double m = std::abs(d);
        q.col(k) *= (m > 0) ? d / m : Complex(1, 0);
    }
    return q;
}

DenseOperator random_hermitian(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    DenseOperator g(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int k = 0; k < dim; ++k) {
            g(i, k) = Complex(gauss(rng), gauss(rng));
        }
    }
    return DenseOperator((g + g.adjoint()) / 2.0);
}

DenseOperator random_density_matrix(int dim, std::mt19937_64& rng) {
    std::exponential_distribution<double> expo(1.0);
    Eigen::VectorXd lambda(dim);
    double total = 0.0;
    for (int i = 0; i < dim; ++i) {
        lambda(i) = expo(rng);
        total += lambda(i);
    }
    lambda /= total;
    DenseOperator u = random_unitary(dim, rng);
    return u * lambda.asDiagonal() * u.adjoint();
}

StateVector random_state_vector(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    StateVector v(dim);
    for (int i = 0; i < dim; ++i) {
        v(i) = Complex(gauss(rng), gauss(rng));
    }
    v.normalize();
    return v;
}

} // namespace echoqfi
