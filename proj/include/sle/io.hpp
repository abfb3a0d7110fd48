#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sle/analysis.hpp"
#include "sle/driving.hpp"
#include "sle/moments.hpp"
#include "sle/splitting.hpp"
#include "sle/sweep.hpp"

namespace sle {

inline constexpr const char* kGeneratorVersion = SLESPLIT_VERSION;

/// 17 significant digits; round-trips every double.
std::string format_double(double x);

void write_trace_csv(const std::filesystem::path& file, const Trace& trace);
/// Reads `t,re,im` CSV. Spec and schedule are left at defaults.
Trace read_trace_csv(const std::filesystem::path& file);

void write_driving_csv(const std::filesystem::path& file, const DrivingPath& path);
/// Reads `t,value` CSV into a Process-unit StandardBM path.
DrivingPath read_driving_csv(const std::filesystem::path& file);

/// Polyline SVG: viewBox is the bounding box plus a 5% margin, stroke width diag/2000.
void write_trace_svg(const std::filesystem::path& file, const Trace& trace);

void write_sweep_csv(const std::filesystem::path& file, const SweepResult& sweep);

void write_json(const std::filesystem::path& file, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& file);

nlohmann::json to_json(const DrivingSpec& spec);
nlohmann::json to_json(const FidelitySchedule& schedule);
nlohmann::json to_json(const FractionalIntegrator& integrator);
nlohmann::json to_json(const DimensionFit& fit);
nlohmann::json to_json(const MomentReport& report);
nlohmann::json to_json(const SweepResult& sweep);

}  // namespace sle
