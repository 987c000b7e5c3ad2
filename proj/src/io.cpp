#include "cavmem/io.hpp"

#include "cavmem/version.hpp"

#include <json.hpp>

#include <cmath>
#include <iomanip>
#include <sstream>

namespace cavmem {

namespace {

std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    return line;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

}  // namespace

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& metadata,
                     const std::vector<std::string>& columns)
    : out_(path) {
    if (!out_) throw IoError("cannot write " + path);
    out_ << "# cavmem csv schema " << kCsvSchemaVersion << "\n";
    for (const auto& m : metadata) out_ << "# " << m << "\n";
    out_ << join(columns) << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) cells[i] = fmt(values[i]);
    row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    out_ << join(cells) << "\n";
    if (!out_) throw IoError("write failure");
}

std::vector<std::string> standard_metadata(
    const std::vector<std::string>& argv) {
    std::vector<std::string> meta;
    meta.push_back(std::string("tool: cavmem ") + kVersion);
    std::string args = "args:";
    for (const auto& a : argv) args += " " + a;
    meta.push_back(args);
    return meta;
}

void export_drive(const ControlDrive& drive, const std::string& csv_path,
                  const std::string& json_path,
                  const std::vector<std::string>& metadata) {
    CsvWriter csv(csv_path, metadata, {"t", "re_omega", "im_omega"});
    for (std::size_t i = 0; i < drive.t.size(); ++i)
        csv.row({drive.t[i], drive.omega[i].real(), drive.omega[i].imag()});

    nlohmann::json j;
    j["schema"] = kCsvSchemaVersion;
    j["post_tc_mode"] =
        drive.post_tc_mode == PostTcMode::Zero ? "zero" : "decouple";
    j["t1"] = drive.t1;
    j["t2"] = drive.t2;
    j["critical_times"] = drive.critical_times;
    j["decouple_omega"] = drive.decouple_omega;
    if (drive.decouple_from < drive.decouple_to) {
        j["decouple_from"] = drive.decouple_from;
        j["decouple_to"] = drive.decouple_to;
    }
    j["impulses"] = nlohmann::json::array();
    for (const auto& imp : drive.impulses) {
        j["impulses"].push_back(
            {{"t", imp.t}, {"area", imp.area}, {"phase", imp.phase}});
    }
    std::ofstream out(json_path);
    if (!out) throw IoError("cannot write " + json_path);
    out << j.dump(2) << "\n";
}

void export_trajectory(const Trajectory& traj, const std::string& path,
                       const std::vector<std::string>& metadata) {
    std::vector<std::string> cols = {"t"};
    const bool has_E = !traj.E.empty();
    const bool has_P = !traj.P.empty();
    if (has_E) {
        cols.push_back("re_E");
        cols.push_back("im_E");
    }
    if (has_P) {
        cols.push_back("re_P");
        cols.push_back("im_P");
    }
    cols.insert(cols.end(), {"re_S", "im_S", "re_Eout", "im_Eout", "out_norm",
                             "conservation"});
    CsvWriter csv(path, metadata, cols);
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        std::vector<double> r = {traj.t[i]};
        if (has_E) {
            r.push_back(traj.E[i].real());
            r.push_back(traj.E[i].imag());
        }
        if (has_P) {
            r.push_back(traj.P[i].real());
            r.push_back(traj.P[i].imag());
        }
        r.insert(r.end(),
                 {traj.S[i].real(), traj.S[i].imag(), traj.E_out[i].real(),
                  traj.E_out[i].imag(), traj.out_norm[i],
                  traj.conservation[i]});
        csv.row(r);
    }
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + std::string(e.what()));
    }
    SweepSpec s;
    const auto kind = shape_kind_from_string(j.at("shape").get<std::string>());
    if (!kind) throw SpecError("unknown shape kind in " + path);
    s.kind = *kind;
    s.tau = j.value("tau", 1.0);
    s.window = j.value("window", 0.0);
    s.zero_onset = j.value("zero_onset", false);
    if (j.contains("axis")) {
        const auto& a = j["axis"];
        s.axis_min = a.value("min", s.axis_min);
        s.axis_max = a.value("max", s.axis_max);
        s.axis_points = a.value("points", s.axis_points);
        s.axis_log = a.value("scale", std::string("log")) == "log";
        s.axis_in_tc_units =
            a.value("unit", std::string("rate_tc")) == "rate_tc";
    }
    for (const auto& st : j.value("strategies", nlohmann::json::array()))
        s.strategies.push_back(st.get<std::string>());
    if (s.strategies.empty())
        throw SpecError(path + ": at least one strategy is required");
    s.params_file = j.value("params_file", std::string());
    if (j.contains("oct")) {
        const auto& o = j["oct"];
        s.oct_knots = o.value("knots", s.oct_knots);
        s.oct_dense_end =
            o.value("spacing", std::string("uniform")) == "dense-at-end";
        s.oct_max_iter = o.value("max_iter", s.oct_max_iter);
        s.oct_restarts = o.value("restarts", s.oct_restarts);
    }
    if (s.axis_points < 1 || !(s.axis_max >= s.axis_min))
        throw SpecError(path + ": empty axis");
    return s;
}

}  // namespace cavmem
