#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "chanrate/bounds.hpp"
#include "chanrate/environment.hpp"
#include "chanrate/model.hpp"

namespace chanrate {

/// Theta matrix CSV: a header `channel,<rate>,...` with one column per rate,
/// then one row per channel `<index>,<theta_c1>,...`. Channel indices are
/// one-based and must appear in order.
Grid parse_theta_csv(std::istream& in, int expected_rates);
Grid load_theta_csv(const std::filesystem::path& path, int expected_rates);
void write_theta_csv(std::ostream& out, const RateSet& rates, const Grid& theta);

/// Rates JSON: either a bare array or an object with a "rates" array.
RateSet parse_rates_json(const nlohmann::json& j);
RateSet load_rates_json(const std::filesystem::path& path);

/// Trace CSV: header `start_step,channel,rate_index,theta`, one row per
/// (segment, pair) update with one-based channel and rate indices. Pairs a
/// segment leaves out inherit the previous segment's value; the first
/// segment must define every pair.
TraceTable parse_trace_csv(std::istream& in, int rates, std::uint64_t horizon);
TraceTable load_trace_csv(const std::filesystem::path& path, int rates, std::uint64_t horizon);
void write_trace_csv(std::ostream& out, const TraceTable& trace);

SyntheticDriftSpec parse_synth_spec(const nlohmann::json& j);

nlohmann::json to_json(const DecisionPair& d);
nlohmann::json to_json(const BoundValue& b);
nlohmann::json to_json(const BoundReport& r);

/// Structure report of the `check` command.
nlohmann::json structure_report(const LinkModel& model);

/// Shortest decimal text that reads back as the same double.
std::string format_number(double v);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace chanrate
