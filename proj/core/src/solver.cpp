#include "nlmf/solver.hpp"

#include <cmath>
#include <ostream>
#include <vector>

namespace nlmf {

namespace {

using Triplet = Eigen::Triplet<double>;

void residual_gate(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& b) {
    const double res = (A * x - b).cwiseAbs().maxCoeff();
    const double gate = kSolveResidualTol * (1.0 + b.cwiseAbs().maxCoeff());
    if (!(res <= gate))
        throw numerical_error("linear solve residual " + std::to_string(res) +
                              " exceeds gate " + std::to_string(gate));
}

Eigen::VectorXd factor_and_solve(const Eigen::SparseMatrix<double>& A,
                                 const Eigen::VectorXd& b) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw numerical_error("sparse factorization failed");
    const Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw numerical_error("sparse solve failed");
    residual_gate(A, x, b);
    return x;
}

}  // namespace

Eigen::SparseMatrix<double> assemble_matrix(const ConstrainedSystem& system,
                                            const PointCloud& cloud) {
    const NonlocalOperator& op = *system.op;
    std::vector<Triplet> trip;
    if (op.kind() == OperatorKind::Diffusion) {
        const int n = cloud.size();
        trip.reserve(static_cast<std::size_t>(n) * 8);
        std::vector<char> has_row(n, 0);
        for (int r = 0; r < op.rows(); ++r) {
            const int i = op.center(r);
            has_row[i] = 1;
            double diag = system.mass_scaling;
            const auto& nbr = op.row_neighbors(r);
            for (std::size_t k = 0; k < nbr.size(); ++k) {
                if (!op.bond_active(r, static_cast<int>(k))) continue;
                const double c = op.scalar_coeff(r, static_cast<int>(k));
                diag += c;
                trip.emplace_back(i, nbr[k], -c);
            }
            trip.emplace_back(i, i, diag);
        }
        for (int i = 0; i < n; ++i)
            if (!has_row[i]) trip.emplace_back(i, i, 1.0);  // constrained row
        Eigen::SparseMatrix<double> A(n, n);
        A.setFromTriplets(trip.begin(), trip.end());
        return A;
    }

    const int n = 2 * cloud.size();
    trip.reserve(static_cast<std::size_t>(n) * 16);
    std::vector<char> has_row(cloud.size(), 0);
    for (int r = 0; r < op.rows(); ++r) {
        const int i = op.center(r);
        has_row[i] = 1;
        SymBlock diag;
        const auto& nbr = op.row_neighbors(r);
        for (std::size_t k = 0; k < nbr.size(); ++k) {
            if (!op.bond_active(r, static_cast<int>(k))) continue;
            const SymBlock& b = op.block_coeff(r, static_cast<int>(k));
            diag.xx += b.xx;
            diag.xy += b.xy;
            diag.yy += b.yy;
            const int j = nbr[k];
            trip.emplace_back(2 * i, 2 * j, -b.xx);
            trip.emplace_back(2 * i, 2 * j + 1, -b.xy);
            trip.emplace_back(2 * i + 1, 2 * j, -b.xy);
            trip.emplace_back(2 * i + 1, 2 * j + 1, -b.yy);
        }
        trip.emplace_back(2 * i, 2 * i, diag.xx + system.mass_scaling);
        trip.emplace_back(2 * i, 2 * i + 1, diag.xy);
        trip.emplace_back(2 * i + 1, 2 * i, diag.xy);
        trip.emplace_back(2 * i + 1, 2 * i + 1, diag.yy + system.mass_scaling);
    }
    for (int i = 0; i < cloud.size(); ++i)
        if (!has_row[i]) {
            trip.emplace_back(2 * i, 2 * i, 1.0);
            trip.emplace_back(2 * i + 1, 2 * i + 1, 1.0);
        }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

ScalarField solve_static(const NonlocalOperator& op, const PointCloud& cloud,
                         const std::function<double(const Vec2&)>& f, const ScalarBC& u_D) {
    const ConstrainedSystem system{&op, 0.0};
    const Eigen::SparseMatrix<double> A = assemble_matrix(system, cloud);
    Eigen::VectorXd b(cloud.size());
    for (int i = 0; i < cloud.size(); ++i)
        b[i] = cloud.is_interior(i)
                   ? f(cloud.points[i])
                   : (cloud.region[i] == Region::DirichletLayer ? u_D(cloud.points[i], 0.0)
                                                                : 0.0);
    const Eigen::VectorXd x = factor_and_solve(A, b);
    ScalarField u(cloud.size());
    for (int i = 0; i < cloud.size(); ++i) u[i] = x[i];
    for (int i = 0; i < cloud.size(); ++i)
        if (!cloud.is_interior(i)) u[i] = b[i];  // constraints hold bitwise
    return u;
}

VectorField2 solve_static(const NonlocalOperator& op, const PointCloud& cloud,
                          const std::function<Vec2(const Vec2&)>& f, const VectorBC& u_D) {
    const ConstrainedSystem system{&op, 0.0};
    const Eigen::SparseMatrix<double> A = assemble_matrix(system, cloud);
    Eigen::VectorXd b(2 * cloud.size());
    for (int i = 0; i < cloud.size(); ++i) {
        Vec2 v{0.0, 0.0};
        if (cloud.is_interior(i))
            v = f(cloud.points[i]);
        else if (cloud.region[i] == Region::DirichletLayer)
            v = u_D(cloud.points[i], 0.0);
        b[2 * i] = v.x;
        b[2 * i + 1] = v.y;
    }
    const Eigen::VectorXd x = factor_and_solve(A, b);
    VectorField2 u(cloud.size());
    for (int i = 0; i < cloud.size(); ++i) u[i] = {x[2 * i], x[2 * i + 1]};
    for (int i = 0; i < cloud.size(); ++i)
        if (!cloud.is_interior(i)) u[i] = {b[2 * i], b[2 * i + 1]};
    return u;
}

DiffusionIntegrator::DiffusionIntegrator(const NonlocalOperator& op, const PointCloud& cloud,
                                         double dt, double rho)
    : op_(op), cloud_(cloud), dt_(dt), rho_(rho) {
    if (!(dt > 0.0) || !(rho > 0.0))
        throw std::invalid_argument("time step and density must be positive");
    matrix_ = assemble_matrix({&op_, rho_ / dt_}, cloud_);
    lu_.compute(matrix_);
    if (lu_.info() != Eigen::Success)
        throw numerical_error("diffusion time-step factorization failed");
}

TimeIntegratorState<ScalarField> DiffusionIntegrator::step(
    const TimeIntegratorState<ScalarField>& state,
    const std::function<double(const Vec2&, double)>& f, const ScalarBC& u_D) {
    const double t_next = state.t + dt_;
    Eigen::VectorXd b(cloud_.size());
    for (int i = 0; i < cloud_.size(); ++i) {
        if (cloud_.is_interior(i))
            b[i] = f(cloud_.points[i], t_next) + rho_ / dt_ * state.u_curr[i];
        else
            b[i] = cloud_.region[i] == Region::DirichletLayer ? u_D(cloud_.points[i], t_next)
                                                              : 0.0;
    }
    const Eigen::VectorXd x = lu_.solve(b);
    if (lu_.info() != Eigen::Success) throw numerical_error("diffusion step solve failed");
    residual_gate(matrix_, x, b);

    TimeIntegratorState<ScalarField> next;
    next.t = t_next;
    next.step = state.step + 1;
    next.u_prev = state.u_curr;
    next.u_curr.resize(cloud_.size());
    for (int i = 0; i < cloud_.size(); ++i)
        next.u_curr[i] = cloud_.is_interior(i) ? x[i] : b[i];
    return next;
}

PeridynamicIntegrator::PeridynamicIntegrator(NonlocalOperator op, const PointCloud& cloud,
                                             double dt, double rho)
    : op_(std::move(op)), cloud_(cloud), dt_(dt), rho_(rho) {
    if (!(dt > 0.0) || !(rho > 0.0))
        throw std::invalid_argument("time step and density must be positive");
}

void PeridynamicIntegrator::set_bond_mask(const BondMask& theta) {
    op_.set_mask(theta);
    dirty_ = true;
}

void PeridynamicIntegrator::refactor() {
    matrix_ = assemble_matrix({&op_, rho_ / (dt_ * dt_)}, cloud_);
    lu_.compute(matrix_);
    if (lu_.info() != Eigen::Success)
        throw numerical_error("peridynamic time-step factorization failed");
    dirty_ = false;
}

TimeIntegratorState<VectorField2> PeridynamicIntegrator::step(
    const TimeIntegratorState<VectorField2>& state,
    const std::function<Vec2(const Vec2&, double)>& f, const VectorBC& u_D) {
    if (dirty_) refactor();
    const double t_next = state.t + dt_;
    const double m = rho_ / (dt_ * dt_);
    Eigen::VectorXd b(2 * cloud_.size());
    for (int i = 0; i < cloud_.size(); ++i) {
        Vec2 v{0.0, 0.0};
        if (cloud_.is_interior(i))
            v = f(cloud_.points[i], t_next) +
                m * (2.0 * state.u_curr[i] - state.u_prev[i]);
        else if (cloud_.region[i] == Region::DirichletLayer)
            v = u_D(cloud_.points[i], t_next);
        b[2 * i] = v.x;
        b[2 * i + 1] = v.y;
    }
    const Eigen::VectorXd x = lu_.solve(b);
    if (lu_.info() != Eigen::Success) throw numerical_error("peridynamic step solve failed");
    residual_gate(matrix_, x, b);

    TimeIntegratorState<VectorField2> next;
    next.t = t_next;
    next.step = state.step + 1;
    next.u_prev = state.u_curr;
    next.u_curr.resize(cloud_.size());
    for (int i = 0; i < cloud_.size(); ++i)
        next.u_curr[i] = cloud_.is_interior(i) ? Vec2{x[2 * i], x[2 * i + 1]}
                                               : Vec2{b[2 * i], b[2 * i + 1]};
    return next;
}

double rayleigh_speed(double young, double poisson, double density) {
    if (!(young > 0.0) || !(density > 0.0))
        throw std::invalid_argument("Rayleigh speed requires positive modulus and density");
    const double shear = std::sqrt(young / (2.0 * (1.0 + poisson)) / density);
    return shear * (0.862 + 1.14 * poisson) / (1.0 + poisson);
}

double cfl_number(double rayleigh, double dt, double h) { return rayleigh * dt / h; }

void SnapshotWriter::write(int step, double t, const PointCloud& cloud, const ScalarField& u) {
    out_.precision(12);
    for (int i = 0; i < cloud.size(); ++i)
        out_ << step << " " << t << " " << i << " " << cloud.points[i].x << " "
             << cloud.points[i].y << " " << u[i] << "\n";
}

void SnapshotWriter::write(int step, double t, const PointCloud& cloud, const VectorField2& u,
                           const std::vector<double>* damage_by_point) {
    out_.precision(12);
    for (int i = 0; i < cloud.size(); ++i) {
        out_ << step << " " << t << " " << i << " " << cloud.points[i].x << " "
             << cloud.points[i].y << " " << u[i].x << " " << u[i].y;
        if (damage_by_point) out_ << " " << (*damage_by_point)[i];
        out_ << "\n";
    }
}

}  // namespace nlmf
