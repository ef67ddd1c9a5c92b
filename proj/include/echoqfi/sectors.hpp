#pragma once

#include "echoqfi/deviation.hpp"
#include "echoqfi/linalg.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace echoqfi {

/// Collective spin-j sector structure of M equivalent spin-1/2 particles.
/// Half-integer j is stored as twice_j to keep keys integral.
struct SectorTable {
    struct Sector {
        int twice_j;
        double multiplicity; // exact integer value, stored as double for large M
        int dim;             // 2j + 1
    };
    int m_peripheral = 0;
    std::vector<Sector> sectors; // descending twice_j

    double total_dim() const; // sum multiplicity * dim = 2^M
};

/// Builds the sector list for M peripheral spins. Multiplicities follow
/// m_j = C(M, M/2 - j) - C(M, M/2 - j - 1).
SectorTable sector_table(int m_peripheral);

/// Standard angular-momentum matrices of dimension 2j+1, Jz diagonal with
/// entries j..-j.
struct SpinTriple {
    DenseOperator jx, jy, jz;
};
SpinTriple collective_spin(int twice_j);

/// exp(-i angle (cos(phase) Jx + sin(phase) Jy)) in the spin-j sector.
DenseOperator collective_rotation(int twice_j, double angle, double phase);

/// Operator on the star register stored as one representative block per
/// sector: block_j acts on (central qubit) x (spin-j collective sector),
/// dimension 2(2j+1). Copies of a sector are never materialized; traces
/// weight each block by its multiplicity.
struct BlockOperator {
    std::shared_ptr<const SectorTable> table;
    std::vector<DenseOperator> blocks;
};

std::shared_ptr<const SectorTable> make_sector_table(int m_peripheral);

BlockOperator block_zero(std::shared_ptr<const SectorTable> table);
BlockOperator block_identity(std::shared_ptr<const SectorTable> table);

/// Per-sector block = central (x) peripheral_poly(Jx, Jy, Jz).
BlockOperator star_embed(const DenseOperator& central,
                         const std::function<DenseOperator(const DenseOperator&,
                                                           const DenseOperator&,
                                                           const DenseOperator&)>& peripheral_poly,
                         std::shared_ptr<const SectorTable> table);

/// Equilibrium deviation gamma_c sigma_z (x) 1 + gamma_p 1 (x) 2 Jz.
BlockOperator block_equilibrium_deviation(std::shared_ptr<const SectorTable> table,
                                          double gamma_central, double gamma_peripheral);

/// Encoding generator G = sigma_z/2 (x) 1 + 1 (x) Jz, returned as per-sector
/// diagonal vectors (G is diagonal in the block basis).
std::vector<Eigen::VectorXd> block_generator_diag(const SectorTable& table);

double block_trace(const BlockOperator& a);

/// sum_j multiplicity_j Tr(A_j B_j); equals the dense trace of the lifted
/// product whenever both operators are liftable.
Complex block_trace_product(const BlockOperator& a, const BlockOperator& b);

/// Symmetrization isometries: for each sector (table order) a list of
/// 2^M x (2j+1) real matrices, one per multiplicity copy, columns ordered
/// m = j..-j. Built by coupling one spin at a time with Clebsch-Gordan
/// coefficients; the appended spin occupies the least significant bit.
std::vector<std::vector<Eigen::MatrixXd>> symmetric_isometries(int m_peripheral);

/// Lifts a block operator to the dense 2^(M+1) register via the explicit
/// isometries. Cross-validation only; production paths never lift.
DenseOperator block_to_dense(const BlockOperator& a);

/// Projects a dense operator onto the block representation (first copy of
/// each sector). Exact for operators in the collective algebra.
BlockOperator dense_to_block(const DenseOperator& a, std::shared_ptr<const SectorTable> table);

} // namespace echoqfi
