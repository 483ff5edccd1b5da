#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fastrd {

using Point = std::array<double, 3>;

struct Cell {
    std::size_t id = 0;
    double measure = 0.0;  ///< m_K
    Point center{};        ///< x_K
};

/// Interior face K|L. Boundary faces are not stored: with homogeneous
/// Neumann conditions their fluxes vanish.
struct Face {
    std::size_t left = 0;
    std::size_t right = 0;
    double measure = 0.0;          ///< m_{K|L}
    double distance = 0.0;         ///< d_{K|L}
    double transmissibility = 0.0; ///< T_{K|L} = m_{K|L} / d_{K|L}
};

struct Neighbor {
    std::size_t cell = 0;
    std::size_t face = 0;
};

/// Admissible control-volume mesh: cells, interior faces and the
/// neighbour graph. Immutable once built.
class Mesh {
public:
    /// Adjacency derived from `faces`.
    Mesh(int dimension, std::vector<Cell> cells, std::vector<Face> faces);

    /// Adjacency supplied explicitly (e.g. imported meshes). Not checked
    /// here; run validate_admissible() on the result.
    Mesh(int dimension, std::vector<Cell> cells, std::vector<Face> faces,
         std::vector<std::vector<Neighbor>> adjacency);

    int dimension() const noexcept { return dimension_; }
    std::size_t num_cells() const noexcept { return cells_.size(); }
    std::span<const Cell> cells() const noexcept { return cells_; }
    std::span<const Face> faces() const noexcept { return faces_; }
    const Cell& cell(std::size_t k) const { return cells_.at(k); }
    std::span<const Neighbor> neighbors(std::size_t k) const { return adjacency_.at(k); }

    /// Σ_{L∈N_K} T_{K|L}
    double transmissibility_sum(std::size_t k) const;

    /// max_K m_K
    double size() const noexcept { return size_; }
    double total_measure() const noexcept;

    /// Measure-weighted sum Σ_K m_K a_K.
    double integrate(std::span<const double> values) const;

private:
    int dimension_;
    std::vector<Cell> cells_;
    std::vector<Face> faces_;
    std::vector<std::vector<Neighbor>> adjacency_;
    double size_ = 0.0;
};

/// Uniform mesh of [0, domain_length] with n_cells cells of width h.
Mesh build_uniform_1d(double domain_length, std::size_t n_cells);

/// Cell extent [x_K - m_K/2, x_K + m_K/2] for 1D meshes.
std::array<double, 2> cell_interval_1d(const Cell& cell);

struct MeshViolation {
    std::string kind;   ///< "cell-measure", "face-measure", "face-distance",
                        ///< "transmissibility", "face-cells", "adjacency-symmetry",
                        ///< "adjacency-face"
    std::string detail;
};

/// Every violated admissibility invariant; empty when the mesh is admissible.
std::vector<MeshViolation> validate_admissible(const Mesh& mesh);

/// CSV with header `cell_id,x,measure`.
void write_mesh_csv(const Mesh& mesh, std::ostream& os);

/// Time levels 0 = t^(0) < ... < t^(N+1) = T. A single level {0} is the
/// degenerate zero-step grid.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> levels);

    std::span<const double> levels() const noexcept { return levels_; }
    double time(std::size_t n) const { return levels_.at(n); }
    /// t_δ^(n) = t^(n+1) - t^(n), n ∈ {0, ..., N}
    double step(std::size_t n) const { return levels_.at(n + 1) - levels_.at(n); }
    std::size_t num_steps() const noexcept { return levels_.size() - 1; }
    std::size_t num_levels() const noexcept { return levels_.size(); }
    double final_time() const noexcept { return levels_.back(); }

private:
    std::vector<double> levels_;
};

TimeGrid build_time_grid_uniform(double final_time, std::size_t n_steps);

/// Geometric steps t0, t0·growth, ... with the last step shortened so the
/// final level equals `final_time` exactly.
TimeGrid build_time_grid_ramped(double initial_step, double growth, double final_time);

} // namespace fastrd
