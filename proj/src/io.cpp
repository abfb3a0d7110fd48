#include "sle/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sle/error.hpp"

namespace sle {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
    if (file.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(file.parent_path(), ec);
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot open " + file.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file.string());
    return in;
}

void finish(std::ofstream& out, const std::filesystem::path& file) {
    out.flush();
    if (!out) throw IoError("write failed: " + file.string());
}

double parse_double(const std::string& field, const std::filesystem::path& file, std::size_t line) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && *begin == ' ') ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\r')) --end;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw IoError(file.string() + ":" + std::to_string(line) + ": bad number '" + field + "'");
    return v;
}

/// Rows of a numeric CSV with the given header.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& file, const std::string& header,
                                          std::size_t columns) {
    auto in = open_in(file);
    std::string line;
    if (!std::getline(in, line)) throw IoError(file.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw IoError(file.string() + ": expected header '" + header + "'");
    std::vector<std::vector<double>> rows;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) row.push_back(parse_double(field, file, number));
        if (row.size() != columns)
            throw IoError(file.string() + ":" + std::to_string(number) + ": expected " + std::to_string(columns) +
                          " columns");
        rows.push_back(std::move(row));
    }
    return rows;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

void write_trace_csv(const std::filesystem::path& file, const Trace& trace) {
    auto out = open_out(file);
    out << "t,re,im\n";
    for (std::size_t k = 0; k < trace.size(); ++k)
        out << format_double(trace.times[k]) << ',' << format_double(trace.points[k].real()) << ','
            << format_double(trace.points[k].imag()) << '\n';
    finish(out, file);
}

Trace read_trace_csv(const std::filesystem::path& file) {
    Trace trace;
    for (const auto& row : read_csv(file, "t,re,im", 3)) {
        trace.times.push_back(row[0]);
        trace.points.emplace_back(row[1], row[2]);
    }
    if (trace.points.empty()) throw IoError(file.string() + ": no data rows");
    return trace;
}

void write_driving_csv(const std::filesystem::path& file, const DrivingPath& path) {
    auto out = open_out(file);
    out << "t,value\n";
    for (std::size_t k = 0; k < path.values.size(); ++k)
        out << format_double(path.mesh[k]) << ',' << format_double(path.values[k]) << '\n';
    finish(out, file);
}

DrivingPath read_driving_csv(const std::filesystem::path& file) {
    std::vector<double> times;
    std::vector<double> values;
    for (const auto& row : read_csv(file, "t,value", 2)) {
        times.push_back(row[0]);
        values.push_back(row[1]);
    }
    if (times.empty()) throw IoError(file.string() + ": no data rows");
    return DrivingPath{Mesh(std::move(times)), std::move(values), DrivingSpec{}, PathUnits::Process, 0};
}

void write_trace_svg(const std::filesystem::path& file, const Trace& trace) {
    if (trace.points.empty()) throw ValidationError("cannot render an empty trace");
    double x0 = trace.points[0].real(), x1 = x0, y0 = trace.points[0].imag(), y1 = y0;
    for (const Complex& p : trace.points) {
        x0 = std::min(x0, p.real());
        x1 = std::max(x1, p.real());
        y0 = std::min(y0, p.imag());
        y1 = std::max(y1, p.imag());
    }
    double diag = std::hypot(x1 - x0, y1 - y0);
    if (!(diag > 0.0)) diag = 1.0;
    const double mx = 0.05 * std::max(x1 - x0, diag * 1e-3);
    const double my = 0.05 * std::max(y1 - y0, diag * 1e-3);
    // SVG y grows downward; flip so the half-plane points up.
    auto out = open_out(file);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(x0 - mx) << ' '
        << format_double(-(y1 + my)) << ' ' << format_double(x1 - x0 + 2 * mx) << ' '
        << format_double(y1 - y0 + 2 * my) << "\">\n";
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"" << format_double(diag / 2000.0)
        << "\" points=\"";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        if (k) out << ' ';
        out << format_double(trace.points[k].real()) << ',' << format_double(-trace.points[k].imag());
    }
    out << "\"/>\n</svg>\n";
    finish(out, file);
}

void write_sweep_csv(const std::filesystem::path& file, const SweepResult& sweep) {
    auto out = open_out(file);
    out << "kappa,hurst,mean_df,stderr,paths,M\n";
    for (const SweepCell& c : sweep.cells)
        out << format_double(c.kappa) << ',' << format_double(c.hurst) << ',' << format_double(c.mean_df) << ','
            << format_double(c.stderr_df) << ',' << c.paths << ',' << c.steps << '\n';
    finish(out, file);
}

void write_json(const std::filesystem::path& file, const json& doc) {
    auto out = open_out(file);
    out << doc.dump(2) << '\n';
    finish(out, file);
}

json read_json(const std::filesystem::path& file) {
    auto in = open_in(file);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(file.string() + ": " + e.what());
    }
}

json to_json(const DrivingSpec& spec) {
    json j{{"kind", to_string(spec.kind)}, {"kappa", spec.kappa}, {"seed", spec.seed}};
    if (spec.kind == ProcessKind::NoiseReinforced) j["reinforcement"] = spec.reinforcement;
    if (spec.kind == ProcessKind::Fractional) j["hurst"] = spec.hurst;
    return j;
}

json to_json(const FidelitySchedule& s) {
    json j{{"mode", s.mode == ScheduleMode::Theory ? "theory" : "practical"},
           {"steps", s.steps},
           {"y0", s.y0},
           {"T", s.horizon}};
    if (s.mode == ScheduleMode::Theory) j["fidelity"] = s.fidelity;
    return j;
}

json to_json(const FractionalIntegrator& integrator) {
    return {{"method", "rk4"}, {"relative_step", integrator.relative_step}, {"floor", integrator.floor}};
}

json to_json(const DimensionFit& fit) {
    return {{"slope", fit.slope},
            {"intercept", fit.intercept},
            {"r_squared", fit.r_squared},
            {"scales", fit.scales},
            {"counts", fit.counts}};
}

json to_json(const MomentReport& report) {
    json rows = json::array();
    for (const MomentRow& r : report.rows) {
        json row{{"t", r.t},
                 {"expected_m2", r.expected_m2},
                 {"expected_m4", r.expected_m4},
                 {"m2", {r.m2.real(), r.m2.imag()}},
                 {"m4", {r.m4.real(), r.m4.imag()}},
                 {"deviation_m2", r.deviation_m2},
                 {"deviation_m4", r.deviation_m4}};
        if (report.paths > 0) {
            row["stderr_m2"] = {r.stderr_m2.real(), r.stderr_m2.imag()};
            row["stderr_m4"] = {r.stderr_m4.real(), r.stderr_m4.imag()};
        }
        rows.push_back(std::move(row));
    }
    return {{"kappa", report.kappa},
            {"y0", report.y0},
            {"T", report.horizon},
            {"steps", report.steps},
            {"paths", report.paths},
            {"max_deviation_m2", report.max_deviation_m2},
            {"max_deviation_m4", report.max_deviation_m4},
            {"rows", std::move(rows)}};
}

json to_json(const SweepResult& sweep) {
    json cells = json::array();
    for (const SweepCell& c : sweep.cells)
        cells.push_back({{"kappa", c.kappa},
                         {"hurst", c.hurst},
                         {"paths", c.paths},
                         {"M", c.steps},
                         {"mean_df", number_or_null(c.mean_df)},
                         {"stderr", number_or_null(c.stderr_df)},
                         {"slopes", c.slopes},
                         {"failures", c.failures}});
    return {{"kappas", sweep.kappas},
            {"hursts", sweep.hursts},
            {"tau_kappa", sweep.tau_kappa},
            {"tau_hurst", sweep.tau_hurst},
            {"monotone", sweep.monotone()},
            {"cells", std::move(cells)}};
}

}  // namespace sle
