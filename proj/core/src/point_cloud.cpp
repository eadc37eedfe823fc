#include "nlmf/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace nlmf {

namespace {

int checked_divisions(double extent, double h, const char* what) {
    const double raw = extent / h;
    const int n = static_cast<int>(std::lround(raw));
    if (n < 1 || std::abs(n * h - extent) > 1e-9 * std::max(1.0, extent))
        throw std::invalid_argument(std::string("grid spacing h does not tile the ") + what +
                                    " extent");
    return n;
}

int layer_rings(double delta, double h) {
    // exactly ceil(delta/h) rings, with a guard for delta being an exact
    // multiple of h
    return static_cast<int>(std::ceil(delta / h - 1e-12));
}

}  // namespace

int PointCloud::interior_count() const {
    int n = 0;
    for (const Region r : region)
        if (r == Region::Interior) ++n;
    return n;
}

void PointCloud::rebuild_index() {
    if (points.empty()) {
        index_ = BinIndex{};
        return;
    }
    double x0 = points[0].x, x1 = points[0].x, y0 = points[0].y, y1 = points[0].y;
    for (const Vec2& p : points) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    BinIndex idx;
    idx.cell = delta > 0.0 ? delta : std::max(x1 - x0, y1 - y0) + 1.0;
    idx.x0 = x0;
    idx.y0 = y0;
    idx.nx = std::max(1, static_cast<int>((x1 - x0) / idx.cell) + 1);
    idx.ny = std::max(1, static_cast<int>((y1 - y0) / idx.cell) + 1);
    idx.bins.assign(static_cast<std::size_t>(idx.nx) * idx.ny, {});
    for (int i = 0; i < size(); ++i) {
        int cx = static_cast<int>((points[i].x - idx.x0) / idx.cell);
        int cy = static_cast<int>((points[i].y - idx.y0) / idx.cell);
        cx = std::clamp(cx, 0, idx.nx - 1);
        cy = std::clamp(cy, 0, idx.ny - 1);
        idx.bins[static_cast<std::size_t>(cy) * idx.nx + cx].push_back(i);
    }
    index_ = std::move(idx);
}

std::vector<int> PointCloud::neighbors_within(int center, double r) const {
    const Vec2 c = points[center];
    const double rtol = r * (1.0 + kRadiusInclusionTol);
    const double r2 = rtol * rtol;
    std::vector<int> out;

    const BinIndex& idx = index_;
    const int cx0 = std::clamp(static_cast<int>((c.x - rtol - idx.x0) / idx.cell), 0, idx.nx - 1);
    const int cx1 = std::clamp(static_cast<int>((c.x + rtol - idx.x0) / idx.cell), 0, idx.nx - 1);
    const int cy0 = std::clamp(static_cast<int>((c.y - rtol - idx.y0) / idx.cell), 0, idx.ny - 1);
    const int cy1 = std::clamp(static_cast<int>((c.y + rtol - idx.y0) / idx.cell), 0, idx.ny - 1);
    for (int cy = cy0; cy <= cy1; ++cy)
        for (int cx = cx0; cx <= cx1; ++cx)
            for (const int j : idx.bins[static_cast<std::size_t>(cy) * idx.nx + cx]) {
                if (j == center) continue;
                if ((points[j] - c).norm2() <= r2) out.push_back(j);
            }
    std::sort(out.begin(), out.end());
    return out;
}

PointCloud build_uniform_grid(const Rect& domain, double h, double delta) {
    if (domain.degenerate()) throw std::invalid_argument("degenerate domain rectangle");
    if (!(h > 0.0)) throw std::invalid_argument("grid spacing h must be positive");
    if (delta < h) throw std::invalid_argument("horizon delta must be at least h");

    const int nx = checked_divisions(domain.width(), h, "x");
    const int ny = checked_divisions(domain.height(), h, "y");
    const int m = layer_rings(delta, h);

    PointCloud cloud;
    cloud.h = h;
    cloud.delta = delta;
    cloud.points.reserve(static_cast<std::size_t>(nx + 2 * m + 1) * (ny + 2 * m + 1));
    for (int j = -m; j <= ny + m; ++j)
        for (int i = -m; i <= nx + m; ++i) {
            cloud.points.push_back({domain.xmin + i * h, domain.ymin + j * h});
            const bool inside = i >= 0 && i <= nx && j >= 0 && j <= ny;
            cloud.region.push_back(inside ? Region::Interior : Region::DirichletLayer);
        }
    cloud.rebuild_index();
    return cloud;
}

PointCloud build_cell_centered_grid(const Rect& domain, int nx, int ny, double delta,
                                    const std::function<Region(const Vec2&)>& classify_outside) {
    if (domain.degenerate()) throw std::invalid_argument("degenerate domain rectangle");
    if (nx < 1 || ny < 1) throw std::invalid_argument("cell counts must be positive");
    const double hx = domain.width() / nx;
    const double hy = domain.height() / ny;
    if (std::abs(hx - hy) > 1e-9 * hx)
        throw std::invalid_argument("cell-centered grid requires square cells");
    const double h = hx;
    if (delta < h) throw std::invalid_argument("horizon delta must be at least h");
    const int m = layer_rings(delta, h);

    PointCloud cloud;
    cloud.h = h;
    cloud.delta = delta;
    for (int j = -m; j < ny + m; ++j)
        for (int i = -m; i < nx + m; ++i) {
            const Vec2 p{domain.xmin + (i + 0.5) * h, domain.ymin + (j + 0.5) * h};
            const bool inside = i >= 0 && i < nx && j >= 0 && j < ny;
            cloud.points.push_back(p);
            cloud.region.push_back(inside ? Region::Interior : classify_outside(p));
        }
    cloud.rebuild_index();
    return cloud;
}

PointCloud perturb_grid(const PointCloud& cloud, const PerturbationSpec& spec) {
    if (spec.ratio < 0.0 || spec.ratio >= 1.0)
        throw std::invalid_argument("perturbation ratio must lie in [0, 1)");

    PointCloud out = cloud;
    std::mt19937_64 rng(spec.seed);
    const double amp = spec.ratio * cloud.h;
    auto draw = [&rng] {
        // 53-bit uniform in [0, 1); avoids distribution implementation drift
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    for (Vec2& p : out.points) {
        const double dx = (2.0 * draw() - 1.0) * amp;
        const double dy = (2.0 * draw() - 1.0) * amp;
        p.x += dx;
        p.y += dy;
    }
    out.rebuild_index();
    return out;
}

std::vector<Neighborhood> build_neighborhoods(const PointCloud& cloud, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("horizon delta must be positive");

    std::vector<Neighborhood> out;
    out.reserve(cloud.interior_count());
    for (int i = 0; i < cloud.size(); ++i) {
        if (!cloud.is_interior(i)) continue;
        Neighborhood nb;
        nb.center = i;
        nb.neighbors = cloud.neighbors_within(i, delta);
        if (nb.neighbors.empty())
            throw std::invalid_argument("interior point " + std::to_string(i) +
                                        " has an empty neighborhood (delta too small)");
        out.push_back(std::move(nb));
    }
    return out;
}

void save_point_cloud(const PointCloud& cloud, std::ostream& out) {
    out.precision(17);
    out << "# h=" << cloud.h << " delta=" << cloud.delta << "\n";
    for (int i = 0; i < cloud.size(); ++i)
        out << i << " " << cloud.points[i].x << " " << cloud.points[i].y << " "
            << static_cast<int>(cloud.region[i]) << "\n";
}

PointCloud load_point_cloud(std::istream& in) {
    PointCloud cloud;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# h=", 0) != 0)
        throw std::invalid_argument("point cloud table must start with '# h=<h> delta=<delta>'");
    {
        std::istringstream hs(line.substr(1));
        std::string tok;
        while (hs >> tok) {
            if (tok.rfind("h=", 0) == 0) cloud.h = std::stod(tok.substr(2));
            if (tok.rfind("delta=", 0) == 0) cloud.delta = std::stod(tok.substr(6));
        }
    }
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int id = 0, reg = 0;
        Vec2 p;
        if (!(ls >> id >> p.x >> p.y >> reg))
            throw std::invalid_argument("malformed point cloud line: " + line);
        cloud.points.push_back(p);
        cloud.region.push_back(static_cast<Region>(reg));
    }
    cloud.rebuild_index();
    return cloud;
}

}  // namespace nlmf
