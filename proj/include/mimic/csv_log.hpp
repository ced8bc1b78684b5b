#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mimic/types.hpp"

namespace mimic {

// Trajectory CSV: `t,x,y,z,u,v,w,roll,pitch,yaw,p,q,r[,c0,c1,c2,c3]`,
// one row per sample, SI units, radians, LF line endings.

namespace csv_detail {

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_field(const std::string& tok, int lineno) {
    std::size_t pos = 0;
    double d;
    try {
        d = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("csv: line " + std::to_string(lineno) + ": bad number '" + tok + "'");
    }
    if (pos != tok.size())
        throw ParseError("csv: line " + std::to_string(lineno) + ": trailing characters in '" + tok + "'");
    if (!std::isfinite(d))
        throw ParseError("csv: line " + std::to_string(lineno) + ": non-finite value");
    return d;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

}  // namespace csv_detail

inline void save_log(const Trajectory& traj, std::ostream& out,
                     ControlKind kind = ControlKind::MultiRotor) {
    const bool with_controls = !traj.controls.empty();
    out << "t,x,y,z,u,v,w,roll,pitch,yaw,p,q,r";
    if (with_controls) out << ",c0,c1,c2,c3";
    out << "\n";
    (void)kind;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const auto& s = traj.states[i];
        out << csv_detail::format_number(traj.time_at(i));
        const auto v = s.as_vector();
        for (int k = 0; k < 12; ++k) out << ',' << csv_detail::format_number(v[k]);
        if (with_controls) {
            // final row repeats the last control when controls are one shorter
            const auto& c = traj.controls[std::min(i, traj.controls.size() - 1)];
            for (int k = 0; k < 4; ++k) out << ',' << csv_detail::format_number(c.channels[k]);
        }
        out << "\n";
    }
}

inline void save_log(const Trajectory& traj, const std::string& path,
                     ControlKind kind = ControlKind::MultiRotor) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("csv: cannot open for writing: " + path);
    save_log(traj, out, kind);
}

inline Trajectory load_log(std::istream& in, const std::string& origin = "<stream>",
                           ControlKind kind = ControlKind::MultiRotor) {
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("csv: " + origin + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = csv_detail::split(line, ',');
    if (header.size() != 13 && header.size() != 17)
        throw ParseError("csv: " + origin + ": expected 13 or 17 columns, got " +
                         std::to_string(header.size()));
    if (header[0] != "t")
        throw ParseError("csv: " + origin + ": first column must be t");
    const bool with_controls = header.size() == 17;

    Trajectory traj;
    std::vector<double> times;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = csv_detail::split(line, ',');
        if (fields.size() != header.size())
            throw ParseError("csv: line " + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        times.push_back(csv_detail::parse_field(fields[0], lineno));
        Eigen::Matrix<double, 12, 1> v;
        for (int k = 0; k < 12; ++k) v[k] = csv_detail::parse_field(fields[1 + k], lineno);
        traj.states.push_back(VehicleState::from_vector(v));
        if (with_controls) {
            ControlVector c;
            c.kind = kind;
            for (int k = 0; k < 4; ++k) c.channels[k] = csv_detail::parse_field(fields[13 + k], lineno);
            traj.controls.push_back(c);
        }
    }
    if (times.empty()) throw ParseError("csv: " + origin + ": no data rows");
    traj.start_time = times[0];
    if (times.size() == 1) {
        traj.dt = 1.0;  // degenerate single-row log
        return traj;
    }
    traj.dt = times[1] - times[0];
    if (traj.dt <= 0.0) throw ParseError("csv: " + origin + ": non-monotone time");
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double step = times[i] - times[i - 1];
        if (std::abs(step - traj.dt) > 1e-6)
            throw ParseError("csv: line " + std::to_string(i + 2) + ": non-uniform dt (" +
                             std::to_string(step) + " vs " + std::to_string(traj.dt) + ")");
    }
    return traj;
}

inline Trajectory load_log(const std::string& path,
                           ControlKind kind = ControlKind::MultiRotor) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("csv: cannot open: " + path);
    return load_log(in, path, kind);
}

}  // namespace mimic
