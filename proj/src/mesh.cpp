#include "fastrd/mesh.hpp"

#include "fastrd/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace fastrd {

namespace {

std::vector<std::vector<Neighbor>> adjacency_from_faces(std::size_t n_cells,
                                                         const std::vector<Face>& faces) {
    std::vector<std::vector<Neighbor>> adj(n_cells);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& face = faces[f];
        if (face.left >= n_cells || face.right >= n_cells) {
            throw InvalidArgument("face " + std::to_string(f) + " references a missing cell");
        }
        adj[face.left].push_back({face.right, f});
        adj[face.right].push_back({face.left, f});
    }
    return adj;
}

std::string fmt_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

} // namespace

Mesh::Mesh(int dimension, std::vector<Cell> cells, std::vector<Face> faces)
    : Mesh(dimension, cells, faces, adjacency_from_faces(cells.size(), faces)) {}

Mesh::Mesh(int dimension, std::vector<Cell> cells, std::vector<Face> faces,
           std::vector<std::vector<Neighbor>> adjacency)
    : dimension_(dimension), cells_(std::move(cells)), faces_(std::move(faces)),
      adjacency_(std::move(adjacency)) {
    if (dimension_ < 1 || dimension_ > 3) {
        throw InvalidArgument("mesh dimension must be 1, 2 or 3");
    }
    if (adjacency_.size() != cells_.size()) {
        throw InvalidArgument("adjacency list size does not match cell count");
    }
    for (const auto& c : cells_) {
        size_ = std::max(size_, c.measure);
    }
}

double Mesh::transmissibility_sum(std::size_t k) const {
    double s = 0.0;
    for (const auto& nb : neighbors(k)) {
        s += faces_[nb.face].transmissibility;
    }
    return s;
}

double Mesh::total_measure() const noexcept {
    double s = 0.0;
    for (const auto& c : cells_) {
        s += c.measure;
    }
    return s;
}

double Mesh::integrate(std::span<const double> values) const {
    if (values.size() != cells_.size()) {
        throw InvalidArgument("per-cell vector size does not match mesh");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        s += cells_[k].measure * values[k];
    }
    return s;
}

Mesh build_uniform_1d(double domain_length, std::size_t n_cells) {
    if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
        throw InvalidArgument("domain length must be positive");
    }
    if (n_cells == 0) {
        throw InvalidArgument("mesh needs at least one cell");
    }
    const double h = domain_length / static_cast<double>(n_cells);
    std::vector<Cell> cells(n_cells);
    for (std::size_t k = 0; k < n_cells; ++k) {
        cells[k] = Cell{k, h, {(static_cast<double>(k) + 0.5) * h, 0.0, 0.0}};
    }
    std::vector<Face> faces;
    faces.reserve(n_cells - 1);
    for (std::size_t k = 0; k + 1 < n_cells; ++k) {
        // Face measure is 1 in 1D (0-dimensional Lebesgue measure of a point).
        faces.push_back(Face{k, k + 1, 1.0, h, 1.0 / h});
    }
    return Mesh(1, std::move(cells), std::move(faces));
}

std::array<double, 2> cell_interval_1d(const Cell& cell) {
    return {cell.center[0] - 0.5 * cell.measure, cell.center[0] + 0.5 * cell.measure};
}

std::vector<MeshViolation> validate_admissible(const Mesh& mesh) {
    std::vector<MeshViolation> out;
    const auto cells = mesh.cells();
    const auto faces = mesh.faces();
    const std::size_t n = cells.size();

    for (const auto& c : cells) {
        if (!(c.measure > 0.0)) {
            out.push_back({"cell-measure", "cell " + std::to_string(c.id) + " has m_K <= 0"});
        }
    }
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& face = faces[f];
        const std::string tag = "face " + std::to_string(f);
        if (face.left >= n || face.right >= n || face.left == face.right) {
            out.push_back({"face-cells", tag + " does not join two distinct cells"});
        }
        if (!(face.measure > 0.0)) {
            out.push_back({"face-measure", tag + " has m_{K|L} <= 0"});
        }
        if (!(face.distance > 0.0)) {
            out.push_back({"face-distance", tag + " has d_{K|L} <= 0"});
        }
        const double expected = face.measure / face.distance;
        if (!(face.transmissibility > 0.0) ||
            std::abs(face.transmissibility - expected) > 1e-13 * std::abs(expected)) {
            out.push_back({"transmissibility", tag + " has T_{K|L} = " +
                                                   fmt_double(face.transmissibility) +
                                                   " but m/d = " + fmt_double(expected)});
        }
    }

    for (std::size_t k = 0; k < n; ++k) {
        for (const auto& nb : mesh.neighbors(k)) {
            if (nb.cell >= n || nb.face >= faces.size()) {
                out.push_back({"adjacency-face", "cell " + std::to_string(k) +
                                                     " lists a missing neighbour or face"});
                continue;
            }
            const auto& face = faces[nb.face];
            const bool joins = (face.left == k && face.right == nb.cell) ||
                               (face.right == k && face.left == nb.cell);
            if (!joins) {
                out.push_back({"adjacency-face", "cell " + std::to_string(k) + " -> " +
                                                     std::to_string(nb.cell) +
                                                     " uses a face joining other cells"});
            }
            const auto back = mesh.neighbors(nb.cell);
            const bool symmetric = std::any_of(back.begin(), back.end(), [&](const Neighbor& b) {
                return b.cell == k && b.face == nb.face;
            });
            if (!symmetric) {
                out.push_back({"adjacency-symmetry", "cell " + std::to_string(nb.cell) +
                                                         " does not list " + std::to_string(k)});
            }
        }
    }
    return out;
}

void write_mesh_csv(const Mesh& mesh, std::ostream& os) {
    os << "cell_id,x,measure\n";
    for (const auto& c : mesh.cells()) {
        os << c.id << ',' << fmt_double(c.center[0]) << ',' << fmt_double(c.measure) << '\n';
    }
}

TimeGrid::TimeGrid(std::vector<double> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) {
        throw InvalidArgument("time grid needs at least one level");
    }
    if (levels_.front() != 0.0) {
        throw InvalidArgument("time grid must start at t = 0");
    }
    for (std::size_t n = 0; n + 1 < levels_.size(); ++n) {
        if (!(levels_[n + 1] > levels_[n])) {
            throw InvalidArgument("time levels must be strictly increasing (level " +
                                  std::to_string(n + 1) + ")");
        }
    }
}

TimeGrid build_time_grid_uniform(double final_time, std::size_t n_steps) {
    if (!(final_time > 0.0) || !std::isfinite(final_time)) {
        throw InvalidArgument("final time must be positive");
    }
    if (n_steps == 0) {
        throw InvalidArgument("need at least one time step");
    }
    std::vector<double> t(n_steps + 1);
    const double steps = static_cast<double>(n_steps);
    for (std::size_t n = 0; n <= n_steps; ++n) {
        t[n] = final_time * (static_cast<double>(n) / steps);
    }
    t.back() = final_time;
    return TimeGrid(std::move(t));
}

TimeGrid build_time_grid_ramped(double initial_step, double growth, double final_time) {
    if (!(initial_step > 0.0)) {
        throw InvalidArgument("initial step must be positive");
    }
    if (!(growth >= 1.0) || !std::isfinite(growth)) {
        throw InvalidArgument("growth factor must be >= 1");
    }
    if (!(final_time > initial_step) || !std::isfinite(final_time)) {
        throw InvalidArgument("final time must exceed the initial step");
    }
    std::vector<double> t{0.0};
    double dt = initial_step;
    while (true) {
        const double next = t.back() + dt;
        // Absorb a remainder smaller than rounding noise into the last step.
        if (next >= final_time * (1.0 - 1e-12)) {
            t.push_back(final_time);
            break;
        }
        t.push_back(next);
        dt *= growth;
    }
    return TimeGrid(std::move(t));
}

} // namespace fastrd
