#include "echoqfi/sectors.hpp"
#include "echoqfi/errors.hpp"
#include "echoqfi/pauli.hpp"

#include <cmath>
#include <stdexcept>

namespace echoqfi {

namespace {

// C(n, k) computed exactly (n <= 64 keeps the values integral in double).
double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double value = 1.0;
    for (int i = 1; i <= k; ++i) {
        value = value * double(n - k + i) / double(i);
    }
    return std::round(value);
}

} // namespace

double SectorTable::total_dim() const {
    double total = 0.0;
    for (const auto& s : sectors) total += s.multiplicity * s.dim;
    return total;
}

SectorTable sector_table(int m_peripheral) {
    if (m_peripheral < 1) {
        throw std::invalid_argument("sector_table: need at least one peripheral spin");
    }
    SectorTable table;
    table.m_peripheral = m_peripheral;
    for (int twice_j = m_peripheral; twice_j >= 0; twice_j -= 2) {
        int k = (m_peripheral - twice_j) / 2;
        double mult = binomial(m_peripheral, k) - binomial(m_peripheral, k - 1);
        table.sectors.push_back({twice_j, mult, twice_j + 1});
    }
    return table;
}

SpinTriple collective_spin(int twice_j) {
    if (twice_j < 0) throw std::invalid_argument("collective_spin: negative j");
    const int dim = twice_j + 1;
    const double j = 0.5 * twice_j;
    SpinTriple t;
    t.jz = DenseOperator::Zero(dim, dim);
    DenseOperator jplus = DenseOperator::Zero(dim, dim);
    for (int c = 0; c < dim; ++c) {
        double m = j - c;
        t.jz(c, c) = m;
        if (c >= 1) {
            // <m+1 | J+ | m> with row index c-1 <- m+1
            jplus(c - 1, c) = std::sqrt(j * (j + 1) - m * (m + 1));
        }
    }
    DenseOperator jminus = jplus.adjoint();
    t.jx = (jplus + jminus) / 2.0;
    t.jy = (jplus - jminus) / Complex(0.0, 2.0);
    return t;
}

DenseOperator collective_rotation(int twice_j, double angle, double phase) {
    SpinTriple t = collective_spin(twice_j);
    DenseOperator gen = std::cos(phase) * t.jx + std::sin(phase) * t.jy;
    auto [vals, vecs] = eig_hermitian(gen);
    const int dim = twice_j + 1;
    DenseOperator phases = DenseOperator::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        phases(i, i) = std::exp(Complex(0.0, -angle * vals(i)));
    }
    return vecs * phases * vecs.adjoint();
}

std::shared_ptr<const SectorTable> make_sector_table(int m_peripheral) {
    return std::make_shared<const SectorTable>(sector_table(m_peripheral));
}

BlockOperator block_zero(std::shared_ptr<const SectorTable> table) {
    BlockOperator op;
    op.table = std::move(table);
    for (const auto& s : op.table->sectors) {
        op.blocks.push_back(DenseOperator::Zero(2 * s.dim, 2 * s.dim));
    }
    return op;
}

BlockOperator block_identity(std::shared_ptr<const SectorTable> table) {
    BlockOperator op;
    op.table = std::move(table);
    for (const auto& s : op.table->sectors) {
        op.blocks.push_back(DenseOperator::Identity(2 * s.dim, 2 * s.dim));
    }
    return op;
}

BlockOperator star_embed(const DenseOperator& central,
                         const std::function<DenseOperator(const DenseOperator&,
                                                           const DenseOperator&,
                                                           const DenseOperator&)>& peripheral_poly,
                         std::shared_ptr<const SectorTable> table) {
    if (central.rows() != 2 || central.cols() != 2) {
        throw std::invalid_argument("star_embed: central operator must be 2x2");
    }
    BlockOperator op;
    op.table = std::move(table);
    for (const auto& s : op.table->sectors) {
        SpinTriple t = collective_spin(s.twice_j);
        DenseOperator p = peripheral_poly(t.jx, t.jy, t.jz);
        if (p.rows() != s.dim || p.cols() != s.dim) {
            throw std::invalid_argument("star_embed: peripheral polynomial dimension mismatch");
        }
        op.blocks.push_back(kron(central, p));
    }
    return op;
}

BlockOperator block_equilibrium_deviation(std::shared_ptr<const SectorTable> table,
                                          double gamma_central, double gamma_peripheral) {
    BlockOperator op;
    op.table = std::move(table);
    for (const auto& s : op.table->sectors) {
        SpinTriple t = collective_spin(s.twice_j);
        DenseOperator eye = DenseOperator::Identity(s.dim, s.dim);
        op.blocks.push_back(gamma_central * kron(sigma_z(), eye) +
                            gamma_peripheral * kron(DenseOperator::Identity(2, 2),
                                                    DenseOperator(2.0 * t.jz)));
    }
    return op;
}

std::vector<Eigen::VectorXd> block_generator_diag(const SectorTable& table) {
    std::vector<Eigen::VectorXd> diags;
    for (const auto& s : table.sectors) {
        Eigen::VectorXd g(2 * s.dim);
        const double j = 0.5 * s.twice_j;
        for (int u = 0; u < 2; ++u) {
            double central = (u == 0) ? 0.5 : -0.5;
            for (int p = 0; p < s.dim; ++p) {
                g(u * s.dim + p) = central + (j - p);
            }
        }
        diags.push_back(std::move(g));
    }
    return diags;
}

double block_trace(const BlockOperator& a) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        total += a.table->sectors[i].multiplicity * a.blocks[i].trace().real();
    }
    return total;
}

Complex block_trace_product(const BlockOperator& a, const BlockOperator& b) {
    if (a.table->m_peripheral != b.table->m_peripheral ||
        a.blocks.size() != b.blocks.size()) {
        throw std::invalid_argument("block_trace_product: sector tables do not match");
    }
    Complex total = 0.0;
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        total += a.table->sectors[i].multiplicity *
                 (a.blocks[i].cwiseProduct(b.blocks[i].transpose())).sum();
    }
    return total;
}

std::vector<std::vector<Eigen::MatrixXd>> symmetric_isometries(int m_peripheral) {
    if (m_peripheral < 1) {
        throw std::invalid_argument("symmetric_isometries: M must be positive");
    }
    if (m_peripheral > 12) {
        throw capacity_error("symmetric_isometries: M > 12 exceeds the lift capacity");
    }

    struct Branch {
        int twice_j;
        Eigen::MatrixXd basis; // 2^k x (twice_j + 1), columns m = j..-j
    };
    std::vector<Branch> branches;
    branches.push_back({1, Eigen::MatrixXd::Identity(2, 2)});

    for (int k = 1; k < m_peripheral; ++k) {
        std::vector<Branch> next;
        const Eigen::Index rows = Eigen::Index(1) << k;
        for (const auto& br : branches) {
            const int j2 = br.twice_j;
            // couple one more spin-1/2: j' = j + 1/2 and (if j > 0) j' = j - 1/2
            for (int up = 1; up >= -1; up -= 2) {
                const int j2p = j2 + up;
                if (j2p < 0) continue;
                Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(rows * 2, j2p + 1);
                for (int cp = 0; cp <= j2p; ++cp) {
                    const int m2p = j2p - 2 * cp;
                    // amplitudes on |j, m'-1/2>|up> and |j, m'+1/2>|down>
                    const double denom = 2.0 * (j2 + 1);
                    double amp_up = std::sqrt((j2 + m2p + 1) / denom);
                    double amp_dn = std::sqrt((j2 - m2p + 1) / denom);
                    if (up < 0) {
                        double tmp = amp_up;
                        amp_up = -amp_dn;
                        amp_dn = tmp;
                    }
                    const int m2_up = m2p - 1; // paired with appended |0>
                    const int m2_dn = m2p + 1; // paired with appended |1>
                    if (std::abs(m2_up) <= j2) {
                        const int c = (j2 - m2_up) / 2;
                        for (Eigen::Index r = 0; r < rows; ++r) {
                            basis(2 * r + 0, cp) += amp_up * br.basis(r, c);
                        }
                    }
                    if (std::abs(m2_dn) <= j2) {
                        const int c = (j2 - m2_dn) / 2;
                        for (Eigen::Index r = 0; r < rows; ++r) {
                            basis(2 * r + 1, cp) += amp_dn * br.basis(r, c);
                        }
                    }
                }
                next.push_back({j2p, std::move(basis)});
            }
        }
        branches = std::move(next);
    }

    SectorTable table = sector_table(m_peripheral);
    std::vector<std::vector<Eigen::MatrixXd>> grouped(table.sectors.size());
    for (auto& br : branches) {
        for (std::size_t s = 0; s < table.sectors.size(); ++s) {
            if (table.sectors[s].twice_j == br.twice_j) {
                grouped[s].push_back(std::move(br.basis));
                break;
            }
        }
    }
    return grouped;
}

DenseOperator block_to_dense(const BlockOperator& a) {
    const int m = a.table->m_peripheral;
    if (m > 12) {
        throw capacity_error("block_to_dense: M > 12 exceeds the lift capacity");
    }
    const Eigen::Index pdim = Eigen::Index(1) << m;
    const Eigen::Index dim = pdim * 2;
    check_dense_dim(dim);
    auto isometries = symmetric_isometries(m);

    DenseOperator dense = DenseOperator::Zero(dim, dim);
    for (std::size_t s = 0; s < a.blocks.size(); ++s) {
        const int dsec = a.table->sectors[s].dim;
        for (const auto& v : isometries[s]) {
            for (int u = 0; u < 2; ++u) {
                for (int w = 0; w < 2; ++w) {
                    dense.block(u * pdim, w * pdim, pdim, pdim) +=
                        v * a.blocks[s].block(u * dsec, w * dsec, dsec, dsec) * v.transpose();
                }
            }
        }
    }
    return dense;
}

BlockOperator dense_to_block(const DenseOperator& a, std::shared_ptr<const SectorTable> table) {
    const int m = table->m_peripheral;
    const Eigen::Index pdim = Eigen::Index(1) << m;
    if (a.rows() != 2 * pdim || a.cols() != 2 * pdim) {
        throw std::invalid_argument("dense_to_block: dimension mismatch");
    }
    auto isometries = symmetric_isometries(m);
    BlockOperator out = block_zero(std::move(table));
    for (std::size_t s = 0; s < out.blocks.size(); ++s) {
        const int dsec = out.table->sectors[s].dim;
        const Eigen::MatrixXd& v = isometries[s].front();
        for (int u = 0; u < 2; ++u) {
            for (int w = 0; w < 2; ++w) {
                out.blocks[s].block(u * dsec, w * dsec, dsec, dsec) =
                    v.transpose() * a.block(u * pdim, w * pdim, pdim, pdim) * v;
            }
        }
    }
    return out;
}

} // namespace echoqfi
