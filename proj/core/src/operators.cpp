#include "nlmf/operators.hpp"

#include <ostream>
#include <stdexcept>

#include "nlmf/parallel.hpp"

namespace nlmf {

namespace {

void check_sizes(const std::vector<Neighborhood>& nbhds,
                 const std::vector<WeightFamily>& weights) {
    if (nbhds.size() != weights.size())
        throw std::invalid_argument("one weight family per interior neighborhood is required");
    for (std::size_t r = 0; r < nbhds.size(); ++r) {
        if (weights[r].center != nbhds[r].center)
            throw std::invalid_argument("weight family / neighborhood center mismatch at row " +
                                        std::to_string(r));
        if (weights[r].weights.size() != nbhds[r].size())
            throw std::invalid_argument("weight count does not match neighborhood size at row " +
                                        std::to_string(r));
    }
}

}  // namespace

NonlocalOperator assemble_diffusion(const PointCloud& cloud,
                                    const std::vector<Neighborhood>& nbhds,
                                    const std::vector<WeightFamily>& weights,
                                    const TwoPointCoefficient& A, const KernelSpec& spec) {
    check_sizes(nbhds, weights);
    NonlocalOperator op;
    op.kind_ = OperatorKind::Diffusion;
    op.cloud_size_ = cloud.size();
    op.row_of_.assign(cloud.size(), -1);
    const int n = static_cast<int>(nbhds.size());
    op.centers_.resize(n);
    op.neighbors_.resize(n);
    op.coeff_.resize(n);
    op.mask_.resize(n);
    for (int r = 0; r < n; ++r) {
        op.centers_[r] = nbhds[r].center;
        op.row_of_[nbhds[r].center] = r;
        op.neighbors_[r] = nbhds[r].neighbors;
    }
    parallel_for(n, [&](int r) {
        const Vec2 xi = cloud.points[op.centers_[r]];
        const int m = static_cast<int>(op.neighbors_[r].size());
        op.coeff_[r].resize(m);
        op.mask_[r].assign(m, 1);
        for (int k = 0; k < m; ++k) {
            const Vec2 xj = cloud.points[op.neighbors_[r][k]];
            op.coeff_[r][k] = 2.0 * A(xi, xj) * kernel_eval(spec, xi, xj) * weights[r].weights[k];
        }
    });
    return op;
}

NonlocalOperator assemble_peridynamic(const PointCloud& cloud,
                                      const std::vector<Neighborhood>& nbhds,
                                      const std::vector<WeightFamily>& weights,
                                      const TwoPointCoefficient& kappa, const KernelSpec& spec,
                                      const BondMask* theta) {
    check_sizes(nbhds, weights);
    if (theta && theta->size() != nbhds.size())
        throw std::invalid_argument("bond-state mask does not match the neighborhood list");
    NonlocalOperator op;
    op.kind_ = OperatorKind::Peridynamic;
    op.cloud_size_ = cloud.size();
    op.row_of_.assign(cloud.size(), -1);
    const int n = static_cast<int>(nbhds.size());
    op.centers_.resize(n);
    op.neighbors_.resize(n);
    op.blocks_.resize(n);
    op.mask_.resize(n);
    for (int r = 0; r < n; ++r) {
        op.centers_[r] = nbhds[r].center;
        op.row_of_[nbhds[r].center] = r;
        op.neighbors_[r] = nbhds[r].neighbors;
        if (theta && (*theta)[r].size() != nbhds[r].neighbors.size())
            throw std::invalid_argument("bond-state row size mismatch at row " +
                                        std::to_string(r));
    }
    parallel_for(n, [&](int r) {
        const Vec2 xi = cloud.points[op.centers_[r]];
        const int m = static_cast<int>(op.neighbors_[r].size());
        op.blocks_[r].resize(m);
        if (theta)
            op.mask_[r] = (*theta)[r];
        else
            op.mask_[r].assign(m, 1);
        for (int k = 0; k < m; ++k) {
            const Vec2 xj = cloud.points[op.neighbors_[r][k]];
            const Vec2 z = xj - xi;
            const double r2 = z.norm2();
            const double scale = kBondConstant2d * kappa(xi, xj) * kernel_eval(spec, xi, xj) *
                                 weights[r].weights[k] / r2;
            op.blocks_[r][k] = {scale * z.x * z.x, scale * z.x * z.y, scale * z.y * z.y};
        }
    });
    return op;
}

void NonlocalOperator::apply(const ScalarField& in, ScalarField& out) const {
    if (kind_ != OperatorKind::Diffusion)
        throw std::invalid_argument("scalar apply requires a diffusion operator");
    if (static_cast<int>(in.size()) != cloud_size_)
        throw std::invalid_argument("field size does not match the cloud");
    out.assign(in.size(), 0.0);
    parallel_for(rows(), [&](int r) {
        const double ui = in[centers_[r]];
        double acc = 0.0;
        const auto& nbr = neighbors_[r];
        const auto& cf = coeff_[r];
        const auto& mk = mask_[r];
        for (std::size_t k = 0; k < nbr.size(); ++k)
            if (mk[k]) acc += cf[k] * (in[nbr[k]] - ui);
        out[centers_[r]] = acc;
    });
}

void NonlocalOperator::apply(const VectorField2& in, VectorField2& out) const {
    if (kind_ != OperatorKind::Peridynamic)
        throw std::invalid_argument("vector apply requires a peridynamic operator");
    if (static_cast<int>(in.size()) != cloud_size_)
        throw std::invalid_argument("field size does not match the cloud");
    out.assign(in.size(), Vec2{});
    parallel_for(rows(), [&](int r) {
        const Vec2 ui = in[centers_[r]];
        Vec2 acc;
        const auto& nbr = neighbors_[r];
        const auto& bl = blocks_[r];
        const auto& mk = mask_[r];
        for (std::size_t k = 0; k < nbr.size(); ++k)
            if (mk[k]) acc += bl[k].mul(in[nbr[k]] - ui);
        out[centers_[r]] = acc;
    });
}

ScalarField NonlocalOperator::apply(const ScalarField& in) const {
    ScalarField out;
    apply(in, out);
    return out;
}

VectorField2 NonlocalOperator::apply(const VectorField2& in) const {
    VectorField2 out;
    apply(in, out);
    return out;
}

void NonlocalOperator::set_mask(const BondMask& theta) {
    if (theta.size() != mask_.size())
        throw std::invalid_argument("bond-state mask does not match the operator layout");
    for (std::size_t r = 0; r < theta.size(); ++r)
        if (theta[r].size() != mask_[r].size())
            throw std::invalid_argument("bond-state row size mismatch at row " +
                                        std::to_string(r));
    mask_ = theta;
}

void NonlocalOperator::reset_mask() {
    for (auto& row : mask_) std::fill(row.begin(), row.end(), 1);
}

long NonlocalOperator::active_bonds() const {
    long n = 0;
    for (const auto& row : mask_)
        for (const std::uint8_t b : row) n += b;
    return n;
}

void NonlocalOperator::export_coo(std::ostream& out) const {
    out.precision(17);
    if (kind_ == OperatorKind::Diffusion) {
        for (int r = 0; r < rows(); ++r) {
            const int i = centers_[r];
            double diag = 0.0;
            for (std::size_t k = 0; k < neighbors_[r].size(); ++k) {
                if (!mask_[r][k]) continue;
                const int j = neighbors_[r][k];
                diag += coeff_[r][k];
                if (row_of_[j] >= 0) out << i << " " << j << " " << -coeff_[r][k] << "\n";
            }
            out << i << " " << i << " " << diag << "\n";
        }
        return;
    }
    for (int r = 0; r < rows(); ++r) {
        const int i = centers_[r];
        SymBlock diag;
        for (std::size_t k = 0; k < neighbors_[r].size(); ++k) {
            if (!mask_[r][k]) continue;
            const int j = neighbors_[r][k];
            const SymBlock& b = blocks_[r][k];
            diag.xx += b.xx;
            diag.xy += b.xy;
            diag.yy += b.yy;
            if (row_of_[j] >= 0) {
                out << 2 * i << " " << 2 * j << " " << -b.xx << "\n";
                out << 2 * i << " " << 2 * j + 1 << " " << -b.xy << "\n";
                out << 2 * i + 1 << " " << 2 * j << " " << -b.xy << "\n";
                out << 2 * i + 1 << " " << 2 * j + 1 << " " << -b.yy << "\n";
            }
        }
        out << 2 * i << " " << 2 * i << " " << diag.xx << "\n";
        out << 2 * i << " " << 2 * i + 1 << " " << diag.xy << "\n";
        out << 2 * i + 1 << " " << 2 * i << " " << diag.xy << "\n";
        out << 2 * i + 1 << " " << 2 * i + 1 << " " << diag.yy << "\n";
    }
}

}  // namespace nlmf
