#include "fastrd/csv.hpp"

#include "fastrd/errors.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace fastrd {

std::string format_number(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(const Mesh& mesh, const Trajectory& traj, std::ostream& os) {
    os << "level,t,cell_id,x,u,v\n";
    for (const auto& s : traj.states) {
        for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
            os << s.level << ',' << format_number(s.time) << ',' << k << ','
               << format_number(mesh.cell(k).center[0]) << ',' << format_number(s.u[k]) << ','
               << format_number(s.v[k]) << '\n';
        }
    }
}

void write_w_trajectory_csv(const Mesh& mesh, const WTrajectory& traj, std::ostream& os) {
    os << "level,t,cell_id,x,w\n";
    for (const auto& s : traj.states) {
        for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
            os << s.level << ',' << format_number(s.time) << ',' << k << ','
               << format_number(mesh.cell(k).center[0]) << ',' << format_number(s.w[k]) << '\n';
        }
    }
}

void write_stats_csv(const std::vector<StepStats>& stats, std::ostream& os) {
    os << "level,dt,newton_iterations,residual,used_fallback\n";
    for (const auto& s : stats) {
        os << s.level << ',' << format_number(s.dt) << ',' << s.newton_iterations << ','
           << format_number(s.residual) << ',' << (s.used_fallback ? 1 : 0) << '\n';
    }
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw InvalidArgument("line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(table.header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto& f = fields[i];
            auto res = std::from_chars(f.data(), f.data() + f.size(), row[i]);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
                throw InvalidArgument("line " + std::to_string(lineno) + ": field '" + f +
                                      "' is not a number");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) {
        throw InvalidArgument("empty CSV input");
    }
    return table;
}

} // namespace fastrd
