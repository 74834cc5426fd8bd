#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "preyswitch/connection.hpp"
#include "preyswitch/flow.hpp"
#include "preyswitch/model.hpp"

namespace preyswitch {

/// %.17g, so every written double reads back bit-identical.
std::string format_double(double v);

/// Parses a parameters object with the nine model keys. A document holding
/// a "params" object (a certificate or report) is read through that object.
/// Missing or non-numeric keys throw InvalidConfig; the result is not validated.
RawParameters parse_raw_parameters(const std::string& json_text);
RawParameters load_raw_parameters(const std::filesystem::path& path);
std::string raw_parameters_json(const RawParameters& raw);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// JSON array of {kind, t, state} for every arc's terminal event.
std::string trajectory_events_json(const Trajectory& traj);

void write_mu_curve_csv(std::ostream& os, const MuCurve& curve);
void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points);
void write_return_map_csv(std::ostream& os, std::span<const ReturnMapSample> samples);
std::string mu_curve_json(const MuCurve& curve);
std::string sweep_json(std::span<const SweepPoint> points);
std::string return_map_json(std::span<const ReturnMapSample> samples);

std::string certificate_json(const ConnectionCertificate& cert);
std::string n_point_json(const NPointReport& report, const IntegratorConfig& cfg);
std::string lemma1_json(const Lemma1Report& report);

/// Writes text to path, or to stdout when path is empty. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace preyswitch
