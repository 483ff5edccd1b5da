#pragma once

#include "fastrd/fvscheme.hpp"
#include "fastrd/limit.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fastrd {

/// Shortest round-trip decimal representation.
std::string format_number(double x);

/// level,t,cell_id,x,u,v
void write_trajectory_csv(const Mesh& mesh, const Trajectory& traj, std::ostream& os);
/// level,t,cell_id,x,w
void write_w_trajectory_csv(const Mesh& mesh, const WTrajectory& traj, std::ostream& os);
/// level,dt,newton_iterations,residual,used_fallback
void write_stats_csv(const std::vector<StepStats>& stats, std::ostream& os);

/// Numeric CSV with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Index of `name` in the header, or -1.
    int column(const std::string& name) const;
};

/// Throws InvalidArgument naming the offending line on malformed input.
CsvTable read_csv(std::istream& is);

} // namespace fastrd
