#include "nlmf/fracture.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace nlmf {

BondStateField BondStateField::all_intact(const std::vector<Neighborhood>& nbhds) {
    BondStateField field;
    field.theta.resize(nbhds.size());
    field.broken_at.resize(nbhds.size());
    for (std::size_t r = 0; r < nbhds.size(); ++r) {
        field.theta[r].assign(nbhds[r].neighbors.size(), 1);
        field.broken_at[r].assign(nbhds[r].neighbors.size(), -1);
    }
    return field;
}

void BondStateField::break_bond(int row, int k, int step) {
    if (theta[row][k] == 0) return;  // irreversible; first break wins
    theta[row][k] = 0;
    broken_at[row][k] = step;
}

long BondStateField::broken_count() const {
    long n = 0;
    for (const auto& row : theta)
        for (const std::uint8_t b : row) n += (b == 0);
    return n;
}

double bond_stretch(const VectorField2& u, int i, int j, const PointCloud& cloud) {
    if (i == j) throw std::invalid_argument("bond stretch requires two distinct points");
    const Vec2 z = cloud.points[j] - cloud.points[i];
    const double len0 = z.norm();
    if (len0 == 0.0) throw std::invalid_argument("bond stretch undefined for coincident points");
    return ((z + u[j] - u[i]).norm() - len0) / len0;
}

BondPairIndex BondPairIndex::build(const std::vector<Neighborhood>& nbhds,
                                   const PointCloud& cloud) {
    std::vector<int> row_of(cloud.size(), -1);
    for (std::size_t r = 0; r < nbhds.size(); ++r) row_of[nbhds[r].center] = static_cast<int>(r);

    BondPairIndex idx;
    idx.reverse.resize(nbhds.size());
    for (std::size_t r = 0; r < nbhds.size(); ++r) {
        idx.reverse[r].resize(nbhds[r].neighbors.size(), {-1, -1});
        for (std::size_t k = 0; k < nbhds[r].neighbors.size(); ++k) {
            const int j = nbhds[r].neighbors[k];
            const int rj = row_of[j];
            if (rj < 0) continue;
            const auto& back = nbhds[rj].neighbors;
            const auto it = std::lower_bound(back.begin(), back.end(), nbhds[r].center);
            if (it != back.end() && *it == nbhds[r].center)
                idx.reverse[r][k] = {rj, static_cast<int>(it - back.begin())};
        }
    }
    return idx;
}

void initialize_prenotch(BondStateField& theta, const std::vector<Segment2>& notches,
                         const PointCloud& cloud, const std::vector<Neighborhood>& nbhds,
                         const BondPairIndex& pairs) {
    for (const Segment2& notch : notches)
        if (notch.degenerate()) throw std::invalid_argument("degenerate notch segment");

    for (std::size_t r = 0; r < nbhds.size(); ++r) {
        const Vec2 xi = cloud.points[nbhds[r].center];
        for (std::size_t k = 0; k < nbhds[r].neighbors.size(); ++k) {
            if (!theta.intact(static_cast<int>(r), static_cast<int>(k))) continue;
            const Segment2 bond{xi, cloud.points[nbhds[r].neighbors[k]]};
            for (const Segment2& notch : notches) {
                if (!segments_intersect(bond, notch)) continue;
                theta.break_bond(static_cast<int>(r), static_cast<int>(k), 0);
                const auto [rr, rk] = pairs.reverse[r][k];
                if (rr >= 0) theta.break_bond(rr, rk, 0);
                break;
            }
        }
    }
}

long update_bond_states(BondStateField& theta, const VectorField2& u,
                        const std::function<double(const Vec2&, const Vec2&)>& s0,
                        const PointCloud& cloud, const std::vector<Neighborhood>& nbhds,
                        const BondPairIndex& pairs, int step) {
    long newly_broken = 0;
    for (std::size_t r = 0; r < nbhds.size(); ++r) {
        const int i = nbhds[r].center;
        for (std::size_t k = 0; k < nbhds[r].neighbors.size(); ++k) {
            if (!theta.intact(static_cast<int>(r), static_cast<int>(k))) continue;
            const int j = nbhds[r].neighbors[k];
            const double s = bond_stretch(u, i, j, cloud);
            if (s <= s0(cloud.points[i], cloud.points[j])) continue;
            theta.break_bond(static_cast<int>(r), static_cast<int>(k), step);
            const auto [rr, rk] = pairs.reverse[r][k];
            if (rr >= 0) theta.break_bond(rr, rk, step);
            ++newly_broken;
        }
    }
    return newly_broken;
}

DamageField damage(const BondStateField& theta, const std::vector<Neighborhood>& nbhds) {
    DamageField field;
    field.d.resize(nbhds.size());
    for (std::size_t r = 0; r < nbhds.size(); ++r) {
        const std::size_t total = nbhds[r].neighbors.size();
        std::size_t broken = 0;
        for (const std::uint8_t b : theta.theta[r]) broken += (b == 0);
        field.d[r] = static_cast<double>(broken) / static_cast<double>(total);
    }
    return field;
}

namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<int> fragment_sizes(const BondStateField& theta,
                                const std::vector<Neighborhood>& nbhds,
                                const PointCloud& cloud) {
    UnionFind uf(cloud.size());
    std::vector<char> bonded(cloud.size(), 0);
    for (std::size_t r = 0; r < nbhds.size(); ++r) {
        const int i = nbhds[r].center;
        for (std::size_t k = 0; k < nbhds[r].neighbors.size(); ++k) {
            if (!theta.intact(static_cast<int>(r), static_cast<int>(k))) continue;
            const int j = nbhds[r].neighbors[k];
            uf.unite(i, j);
            bonded[i] = bonded[j] = 1;
        }
    }
    std::vector<int> count(cloud.size(), 0);
    for (int i = 0; i < cloud.size(); ++i)
        if (bonded[i]) ++count[uf.find(i)];
    std::vector<int> sizes;
    for (const int c : count)
        if (c > 0) sizes.push_back(c);
    std::sort(sizes.rbegin(), sizes.rend());
    return sizes;
}

int count_fragments(const BondStateField& theta, const std::vector<Neighborhood>& nbhds,
                    const PointCloud& cloud) {
    return static_cast<int>(fragment_sizes(theta, nbhds, cloud).size());
}

double measure_crack_angle(const DamageField& current, const DamageField& initial,
                           const PointCloud& cloud, const std::vector<Neighborhood>& nbhds,
                           const Vec2& tip, const Segment2& notch, const CrackAngleParams& p) {
    std::vector<Vec2> pts;
    for (std::size_t r = 0; r < nbhds.size(); ++r) {
        if (current.d[r] <= p.threshold || initial.d[r] > p.threshold) continue;
        const Vec2 x = cloud.points[nbhds[r].center];
        if ((x - tip).norm() > p.window_radius) continue;
        if (point_segment_distance(x, notch) <= p.notch_margin) continue;
        pts.push_back(x);
    }
    if (pts.size() < 5)
        throw numerical_error("crack angle fit needs at least 5 damaged points near the tip (" +
                              std::to_string(pts.size()) + " found)");

    Vec2 mean;
    for (const Vec2& x : pts) mean += x;
    mean = mean * (1.0 / static_cast<double>(pts.size()));
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const Vec2& x : pts) {
        const Vec2 d = x - mean;
        cov(0, 0) += d.x * d.x;
        cov(0, 1) += d.x * d.y;
        cov(1, 1) += d.y * d.y;
    }
    cov(1, 0) = cov(0, 1);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    const Eigen::Vector2d dir = eig.eigenvectors().col(1);  // largest eigenvalue
    return std::atan2(std::abs(dir[0]), std::abs(dir[1])) * 180.0 / std::numbers::pi;
}

KWResult run_kalthoff_winkler(const KWConfig& config, SnapshotWriter* snapshots) {
    if (config.n_per_side < 8) throw std::invalid_argument("Kalthoff-Winkler grid too coarse");
    const double w = config.plate_width;
    const double ht = config.plate_height;
    const double h = ht / config.n_per_side;
    const double delta = config.dh_ratio * h;
    const int nx = static_cast<int>(std::lround(w / h));

    KWResult result;
    result.cloud = build_cell_centered_grid(
        Rect{0.0, 0.0, w, ht}, nx, config.n_per_side, delta, [&](const Vec2& p) {
            // constrained collar above the plate top; everything else beyond a
            // free surface
            const bool top = p.y > ht && p.x > 0.0 && p.x < w;
            return top ? Region::DirichletLayer : Region::FreeLayer;
        });
    const PointCloud& cloud = result.cloud;
    result.nbhds = build_neighborhoods(cloud, delta);
    const auto& nbhds = result.nbhds;
    const BondPairIndex pairs = BondPairIndex::build(nbhds, cloud);

    // pre-notches plus free-surface cuts; segments extend past the collar so
    // every crossing bond is caught
    const double x_left = 0.5 * (w - config.notch_separation);
    const double x_right = 0.5 * (w + config.notch_separation);
    const double y_tip = ht - config.notch_length;
    result.tip_left = {x_left, y_tip};
    result.tip_right = {x_right, y_tip};
    const double ext = delta + 2.0 * h;
    const Segment2 notch_left{{x_left, y_tip}, {x_left, ht + ext}};
    const Segment2 notch_right{{x_right, y_tip}, {x_right, ht + ext}};
    const std::vector<Segment2> cuts = {
        notch_left,
        notch_right,
        {{0.0, -ext}, {0.0, ht + ext}},      // left free side
        {{w, -ext}, {w, ht + ext}},          // right free side
        {{-ext, 0.0}, {w + ext, 0.0}},       // bottom free side
    };

    result.theta = BondStateField::all_intact(nbhds);
    initialize_prenotch(result.theta, cuts, cloud, nbhds, pairs);
    result.damage_initial = damage(result.theta, nbhds);

    using clock = std::chrono::steady_clock;
    const auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };

    const KernelSpec spec = KernelSpec::make(delta, 1.0);
    const ReproducingSpace space =
        build_basis(config.order, spec, ReproducingMode::PeridynamicTensor);
    auto t0 = clock::now();
    const auto weights = generate_all_weights(cloud, nbhds, space, spec);
    result.timings.weights_ms = ms_since(t0);

    const double kappa0 = bulk_modulus_from_young(config.young, config.poisson);
    const TwoPointCoefficient kappa =
        harmonic_mean_coefficient([kappa0](const Vec2&) { return kappa0; });
    t0 = clock::now();
    NonlocalOperator op =
        assemble_peridynamic(cloud, nbhds, weights, kappa, spec, &result.theta.theta);
    result.timings.assembly_ms = ms_since(t0);
    PeridynamicIntegrator integrator(std::move(op), cloud, config.dt, config.density);

    const double s0_value = config.s0_coefficient / std::sqrt(delta);
    const auto s0 = [s0_value](const Vec2&, const Vec2&) { return s0_value; };
    const auto body_load = [](const Vec2&, double) { return Vec2{0.0, 0.0}; };
    const auto boundary = [&](const Vec2& p, double t) {
        const bool driven = p.x > x_left && p.x < x_right;
        return driven ? Vec2{0.0, -config.impact_rate * t} : Vec2{0.0, 0.0};
    };

    result.cfl = cfl_number(rayleigh_speed(config.young, config.poisson, config.density),
                            config.dt, h);

    TimeIntegratorState<VectorField2> state;
    state.u_curr.assign(cloud.size(), Vec2{});
    state.u_prev.assign(cloud.size(), Vec2{});
    result.damage_final = result.damage_initial;

    std::vector<int> first_cross(nbhds.size(), -1);
    std::vector<double> damage_by_point(cloud.size(), 0.0);

    CrackAngleParams angle = config.angle;
    if (angle.notch_margin <= 0.0) angle.notch_margin = delta;
    const auto try_angle = [&](const DamageField& dmg, const Vec2& tip, double notch_x) {
        try {
            return measure_crack_angle(dmg, result.damage_initial, cloud, nbhds, tip,
                                       Segment2{{notch_x, y_tip}, {notch_x, ht}}, angle);
        } catch (const numerical_error&) {
            return std::numeric_limits<double>::quiet_NaN();  // no crack to fit yet
        }
    };

    t0 = clock::now();
    for (int m = 1; m <= config.steps; ++m) {
        const long newly =
            update_bond_states(result.theta, state.u_curr, s0, cloud, nbhds, pairs, m);
        if (newly > 0) {
            integrator.set_bond_mask(result.theta.theta);
            result.bonds_broken_dynamic += newly;
            if (result.first_dynamic_break_step < 0) result.first_dynamic_break_step = m;
        }
        state = integrator.step(state, body_load, boundary);

        const DamageField dmg = damage(result.theta, nbhds);
        for (std::size_t r = 0; r < nbhds.size(); ++r)
            if (first_cross[r] < 0 && result.damage_initial.d[r] <= config.angle.threshold &&
                dmg.d[r] > config.angle.threshold)
                first_cross[r] = m;

        if (snapshots && config.snapshot_every > 0 &&
            (m % config.snapshot_every == 0 || m == config.steps)) {
            for (std::size_t r = 0; r < nbhds.size(); ++r)
                damage_by_point[nbhds[r].center] = dmg.d[r];
            snapshots->write(m, state.t, cloud, state.u_curr, &damage_by_point);
        }
        if (config.trace_every > 0 && (m % config.trace_every == 0 || m == config.steps)) {
            KWTraceEntry entry;
            entry.step = m;
            entry.t = state.t;
            entry.bonds_broken_total = result.bonds_broken_dynamic;
            entry.fragments = count_fragments(result.theta, nbhds, cloud);
            entry.angle_left_deg = try_angle(dmg, result.tip_left, x_left);
            entry.angle_right_deg = try_angle(dmg, result.tip_right, x_right);
            result.trace.push_back(entry);
        }
        if (m == config.steps) result.damage_final = dmg;
    }
    result.timings.solve_ms = ms_since(t0);
    result.u_final = state.u_curr;
    result.fragment_size_list = fragment_sizes(result.theta, nbhds, cloud);
    result.fragments = static_cast<int>(result.fragment_size_list.size());

    int earliest = -1;
    for (const int s : first_cross)
        if (s >= 0 && (earliest < 0 || s < earliest)) earliest = s;
    if (earliest >= 0) {
        result.initiation_near_tips = true;
        for (std::size_t r = 0; r < nbhds.size(); ++r) {
            if (first_cross[r] != earliest) continue;
            result.initiation_points.push_back(nbhds[r].center);
            const Vec2 x = cloud.points[nbhds[r].center];
            const double dist =
                std::min((x - result.tip_left).norm(), (x - result.tip_right).norm());
            if (dist > 2.0 * delta) result.initiation_near_tips = false;
        }
    }

    result.angle_left_deg = try_angle(result.damage_final, result.tip_left, x_left);
    result.angle_right_deg = try_angle(result.damage_final, result.tip_right, x_right);
    return result;
}

}  // namespace nlmf
