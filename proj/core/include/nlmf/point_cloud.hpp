#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "nlmf/geometry.hpp"

namespace nlmf {

enum class Region : std::uint8_t {
    Interior = 0,        ///< inside the computational domain
    DirichletLayer = 1,  ///< volumetric constraint collar, values prescribed
    FreeLayer = 2,       ///< collar beyond a free surface; bonds across it are broken
};

/// Quasi-uniform 2D point set with region tags and a uniform-bin index for
/// fixed-radius neighbor queries (cell size = delta).
struct PointCloud {
    std::vector<Vec2> points;
    std::vector<Region> region;
    double h = 0.0;      ///< fill distance (lattice spacing for uniform grids)
    double delta = 0.0;  ///< horizon used to size the boundary layer and index

    int size() const { return static_cast<int>(points.size()); }
    bool is_interior(int i) const { return region[i] == Region::Interior; }
    int interior_count() const;

    /// Indices of points with 0 < |x_j - x_center| <= r*(1 + tol), ascending.
    std::vector<int> neighbors_within(int center, double r) const;

    /// Rebuild the bin index (called by the builders; callers only need it
    /// after moving points manually).
    void rebuild_index();

private:
    // uniform binning; cells of size delta over the bounding box
    struct BinIndex {
        double x0 = 0.0, y0 = 0.0;
        double cell = 1.0;
        int nx = 0, ny = 0;
        std::vector<std::vector<int>> bins;
    };
    BinIndex index_;
};

struct Neighborhood {
    int center = -1;             ///< global point id
    std::vector<int> neighbors;  ///< global point ids, ascending

    int size() const { return static_cast<int>(neighbors.size()); }
};

struct PerturbationSpec {
    double ratio = 0.0;      ///< r in [0, 1): offsets are U[-r h, r h] per axis
    std::uint64_t seed = 0;
};

/// Vertex-centered lattice of spacing h covering the closed rectangle, plus
/// ceil(delta/h) rings of DirichletLayer points outside it. Ordering is
/// row-major in the lattice index. h must tile the rectangle.
PointCloud build_uniform_grid(const Rect& domain, double h, double delta);

/// Cell-centered lattice: nx-by-ny Interior points at ((i+1/2)h, (j+1/2)h)
/// inside the rectangle (h = width/nx = height/ny must agree), plus
/// ceil(delta/h) rings outside classified by `classify_outside`.
PointCloud build_cell_centered_grid(const Rect& domain, int nx, int ny, double delta,
                                    const std::function<Region(const Vec2&)>& classify_outside);

/// Independent U[-r h, r h] offsets per axis and point, reproducible for a
/// fixed seed. Region tags are preserved.
PointCloud perturb_grid(const PointCloud& cloud, const PerturbationSpec& spec);

/// One neighborhood per Interior point (in ascending point-id order), holding
/// every point strictly within the horizon ball, self excluded. An Interior
/// point with no neighbors is an error.
std::vector<Neighborhood> build_neighborhoods(const PointCloud& cloud, double delta);

/// Plain-text table: header `# h=<h> delta=<delta>`, then one `id x y region`
/// line per point.
void save_point_cloud(const PointCloud& cloud, std::ostream& out);
PointCloud load_point_cloud(std::istream& in);

}  // namespace nlmf
