#pragma once

#include <Eigen/Sparse>
#include <iosfwd>
#include <vector>

#include "nlmf/kernel.hpp"
#include "nlmf/point_cloud.hpp"
#include "nlmf/quadrature.hpp"

namespace nlmf {

using ScalarField = std::vector<double>;
using VectorField2 = std::vector<Vec2>;

/// Per-bond boolean state, laid out exactly like the neighborhood lists:
/// mask[row][k] is the bond from interior row `row` to its k-th neighbor.
using BondMask = std::vector<std::vector<std::uint8_t>>;

/// Symmetric 2x2 bond block.
struct SymBlock {
    double xx = 0.0, xy = 0.0, yy = 0.0;

    Vec2 mul(const Vec2& v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
};

enum class OperatorKind { Diffusion, Peridynamic };

/// Discrete nonlocal operator stored matrix-free as per-row bond lists.
/// Row i action:
///   Diffusion:    sum_j 2 A_ij gamma_ij (u_j - u_i) omega_ij
///   Peridynamic:  sum_j theta_ij c kappa_ij gamma_ij M_ij (u_j - u_i) omega_ij
/// with M_ij the unit-bond outer product. The diagonal is the negated
/// off-diagonal row sum, so constants (resp. rigid translations) are
/// annihilated exactly. Bond coefficients are cached at assembly; fracture
/// masking only toggles the per-bond mask.
class NonlocalOperator {
public:
    OperatorKind kind() const { return kind_; }
    int cloud_size() const { return cloud_size_; }
    int rows() const { return static_cast<int>(centers_.size()); }
    int center(int row) const { return centers_[row]; }
    /// Row index of an interior point id, -1 otherwise.
    int row_of(int point) const { return row_of_[point]; }
    const std::vector<int>& row_neighbors(int row) const { return neighbors_[row]; }
    double scalar_coeff(int row, int k) const { return coeff_[row][k]; }
    const SymBlock& block_coeff(int row, int k) const { return blocks_[row][k]; }
    bool bond_active(int row, int k) const { return mask_[row][k] != 0; }

    void apply(const ScalarField& in, ScalarField& out) const;
    void apply(const VectorField2& in, VectorField2& out) const;
    ScalarField apply(const ScalarField& in) const;
    VectorField2 apply(const VectorField2& in) const;

    /// Replace the bond mask (same layout as the neighbor lists).
    void set_mask(const BondMask& theta);
    void reset_mask();
    /// Active (unmasked) bond count.
    long active_bonds() const;

    /// Coordinate-format dump `i j value` of the interior-restricted matrix
    /// of -L (degrees of freedom: point id for Diffusion, 2*id+component for
    /// Peridynamic).
    void export_coo(std::ostream& out) const;

    friend NonlocalOperator assemble_diffusion(const PointCloud&,
                                               const std::vector<Neighborhood>&,
                                               const std::vector<WeightFamily>&,
                                               const TwoPointCoefficient&, const KernelSpec&);
    friend NonlocalOperator assemble_peridynamic(const PointCloud&,
                                                 const std::vector<Neighborhood>&,
                                                 const std::vector<WeightFamily>&,
                                                 const TwoPointCoefficient&, const KernelSpec&,
                                                 const BondMask*);

private:
    OperatorKind kind_ = OperatorKind::Diffusion;
    int cloud_size_ = 0;
    std::vector<int> centers_;
    std::vector<int> row_of_;
    std::vector<std::vector<int>> neighbors_;
    std::vector<std::vector<double>> coeff_;    // Diffusion
    std::vector<std::vector<SymBlock>> blocks_;  // Peridynamic
    BondMask mask_;
};

/// Peridynamic micromodulus prefactor recovering 2D linear elasticity.
inline constexpr double kBondConstant2d = 24.0 / 5.0;

NonlocalOperator assemble_diffusion(const PointCloud& cloud,
                                    const std::vector<Neighborhood>& nbhds,
                                    const std::vector<WeightFamily>& weights,
                                    const TwoPointCoefficient& A, const KernelSpec& spec);

/// Weights must be generated in PeridynamicTensor mode; theta defaults to
/// all-intact.
NonlocalOperator assemble_peridynamic(const PointCloud& cloud,
                                      const std::vector<Neighborhood>& nbhds,
                                      const std::vector<WeightFamily>& weights,
                                      const TwoPointCoefficient& kappa, const KernelSpec& spec,
                                      const BondMask* theta = nullptr);

}  // namespace nlmf
