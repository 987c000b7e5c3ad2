#pragma once

#include "cavmem/control.hpp"
#include "cavmem/dynamics.hpp"
#include "cavmem/shapes.hpp"

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cavmem {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Semantically invalid request files (usage-level errors, exit code 2).
struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CSV with a '#'-prefixed metadata block (schema version, tool version and
// the full argument vector) followed by an RFC-4180 body.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& metadata,
              const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
};

std::vector<std::string> standard_metadata(const std::vector<std::string>& argv);

// Drive export: CSV columns (t, Re Omega, Im Omega) plus a sidecar JSON
// carrying impulses, the post-t_c mode and the critical times.
void export_drive(const ControlDrive& drive, const std::string& csv_path,
                  const std::string& json_path,
                  const std::vector<std::string>& metadata);

// Trajectory export: t, Re/Im of each stored field, cumulative output norm
// and the excitation-balance residual.
void export_trajectory(const Trajectory& traj, const std::string& path,
                       const std::vector<std::string>& metadata);

// Parameter sweep request (CLI `sweep` subcommand).
struct SweepSpec {
    ShapeKind kind = ShapeKind::Sech;
    double tau = 1.0;
    double window = 0.0;  // |t2-t1| in units of tau; 0 keeps the full domain
    bool zero_onset = false;
    double axis_min = 0.2, axis_max = 3.0;
    int axis_points = 16;
    bool axis_log = true;
    bool axis_in_tc_units = true;  // axis is rate*Tc, otherwise rate*tau
    std::vector<std::string> strategies;  // ansatz two_tc c_leq_one oct asymptote
    std::string params_file;
    int oct_knots = 129;
    bool oct_dense_end = false;
    int oct_max_iter = 150;
    int oct_restarts = 2;
};

SweepSpec load_sweep_spec(const std::string& path);

}  // namespace cavmem
