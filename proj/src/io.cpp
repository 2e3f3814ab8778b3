#include "chanrate/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "chanrate/graph.hpp"

namespace chanrate {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) throw ModelError("cannot parse " + what + " '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) throw ModelError("cannot parse " + what + " '" + s + "'");
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open " + path.string());
  return in;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Grid parse_theta_csv(std::istream& in, int expected_rates) {
  std::string line;
  while (std::getline(in, line) && blank(line)) {
  }
  const auto header = split_csv_line(line);
  if (header.empty() || header.front() != "channel")
    throw ModelError("theta CSV must start with a 'channel,...' header");
  const int rates = static_cast<int>(header.size()) - 1;
  if (rates != expected_rates)
    throw ModelError("theta CSV has " + std::to_string(rates) + " rate columns, expected " +
                     std::to_string(expected_rates));
  std::vector<double> values;
  int channels = 0;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != rates + 1)
      throw ModelError("theta CSV row " + std::to_string(channels + 1) + " has the wrong column count");
    if (parse_uint(cells[0], "channel index") != static_cast<std::uint64_t>(channels + 1))
      throw ModelError("theta CSV channels must be numbered 1,2,... in order");
    for (int k = 1; k <= rates; ++k) values.push_back(parse_double(cells[static_cast<std::size_t>(k)], "theta"));
    ++channels;
  }
  if (channels == 0) throw ModelError("theta CSV has no channel rows");
  Grid g(channels, rates, std::move(values));
  for (double p : g.values())
    if (!(p >= 0.0 && p <= 1.0)) throw ModelError("theta CSV values must lie in [0,1]");
  return g;
}

Grid load_theta_csv(const std::filesystem::path& path, int expected_rates) {
  auto in = open_input(path);
  return parse_theta_csv(in, expected_rates);
}

void write_theta_csv(std::ostream& out, const RateSet& rates, const Grid& theta) {
  out << "channel";
  for (double r : rates.values()) out << ',' << format_number(r);
  out << '\n';
  for (int c = 0; c < theta.channels(); ++c) {
    out << c + 1;
    for (int k = 0; k < theta.rates(); ++k) out << ',' << format_number(theta(c, k));
    out << '\n';
  }
}

RateSet parse_rates_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_object() ? j.at("rates") : j;
  if (!arr.is_array()) throw ModelError("rates must be a JSON array of numbers");
  std::vector<double> rates;
  for (const auto& v : arr) {
    if (!v.is_number()) throw ModelError("rates must be numbers");
    rates.push_back(v.get<double>());
  }
  return RateSet(std::move(rates));
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

RateSet load_rates_json(const std::filesystem::path& path) { return parse_rates_json(read_json_file(path)); }

TraceTable parse_trace_csv(std::istream& in, int rates, std::uint64_t horizon) {
  std::string line;
  while (std::getline(in, line) && blank(line)) {
  }
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"start_step", "channel", "rate_index", "theta"})
    throw ModelError("trace CSV header must be 'start_step,channel,rate_index,theta'");

  std::map<std::uint64_t, std::vector<std::tuple<int, int, double>>> updates;
  int channels = 0;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (blank(line)) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) throw ModelError("trace CSV row " + std::to_string(row) + " needs 4 columns");
    const auto start = parse_uint(cells[0], "start_step");
    const auto c = parse_uint(cells[1], "channel");
    const auto k = parse_uint(cells[2], "rate_index");
    const double p = parse_double(cells[3], "theta");
    if (c < 1 || k < 1 || k > static_cast<std::uint64_t>(rates))
      throw ModelError("trace CSV row " + std::to_string(row) + " has an index out of range");
    channels = std::max(channels, static_cast<int>(c));
    updates[start].emplace_back(static_cast<int>(c) - 1, static_cast<int>(k) - 1, p);
  }
  if (updates.empty()) throw ModelError("trace CSV has no rows");

  TraceTable t;
  t.horizon = horizon;
  Grid current(channels, rates, -1.0);
  for (const auto& [start, rows] : updates) {
    for (const auto& [c, k, p] : rows) current(c, k) = p;
    if (t.segments.empty())
      for (double p : current.values())
        if (p < 0.0) throw ModelError("first trace segment must define every (channel, rate) pair");
    t.segments.push_back({start, current});
  }
  t.validate();
  return t;
}

TraceTable load_trace_csv(const std::filesystem::path& path, int rates, std::uint64_t horizon) {
  auto in = open_input(path);
  return parse_trace_csv(in, rates, horizon);
}

void write_trace_csv(std::ostream& out, const TraceTable& trace) {
  out << "start_step,channel,rate_index,theta\n";
  const Grid* previous = nullptr;
  for (const auto& s : trace.segments) {
    for (int c = 0; c < s.theta.channels(); ++c)
      for (int k = 0; k < s.theta.rates(); ++k)
        if (!previous || (*previous)(c, k) != s.theta(c, k))
          out << s.start << ',' << c + 1 << ',' << k + 1 << ',' << format_number(s.theta(c, k)) << '\n';
    previous = &s.theta;
  }
}

SyntheticDriftSpec parse_synth_spec(const nlohmann::json& j) {
  SyntheticDriftSpec s;
  try {
    s.rates = parse_rates_json(j.at("rates")).values();
    s.channels = j.at("channels").get<int>();
    s.horizon = j.at("horizon").get<std::uint64_t>();
    s.interval = j.value("interval", std::uint64_t{1});
    s.step_stddev = j.value("step_stddev", 0.0);
    if (j.contains("bounds")) {
      s.lower = j.at("bounds").at(0).get<double>();
      s.upper = j.at("bounds").at(1).get<double>();
    }
    s.initial = j.value("initial", std::vector<double>{});
    s.thresholds = j.at("thresholds").get<std::vector<double>>();
    s.slope = j.value("slope", 1.0);
    s.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed synthetic spec: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::json to_json(const DecisionPair& d) {
  return {{"channel", d.channel + 1}, {"rate_index", d.rate + 1}};
}

nlohmann::json to_json(const BoundValue& b) {
  nlohmann::json j;
  j["defined"] = b.defined();
  j["value"] = b.value ? nlohmann::json(*b.value) : nlohmann::json(nullptr);
  j["reason"] = b.defined() ? nlohmann::json(nullptr) : nlohmann::json(b.reason);
  auto terms = nlohmann::json::array();
  for (const auto& t : b.terms) {
    auto tj = to_json(t.pair);
    tj["role"] = t.role;
    tj["gap"] = t.gap;
    tj["divergence"] = std::isinf(t.divergence) ? nlohmann::json("inf") : nlohmann::json(t.divergence);
    tj["contribution"] = t.contribution;
    terms.push_back(std::move(tj));
  }
  j["terms"] = std::move(terms);
  return j;
}

nlohmann::json to_json(const BoundReport& r) {
  auto inf_or = [](double v) { return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v); };
  nlohmann::json j;
  j["c_I"] = to_json(r.c_I);
  j["c_U_prime"] = to_json(r.c_U_prime);
  j["c_U"] = r.c_U_prime.defined() ? "c_U <= " + format_number(*r.c_U_prime.value)
                                   : std::string("c_U <= c_U_prime (undefined)");
  j["c_GU"] = to_json(r.c_GU);
  auto margins = nlohmann::json::array();
  for (double m : r.margins) margins.push_back(inf_or(m));
  j["delta_c"] = std::move(margins);
  nlohmann::json crst;
  crst["delta"] = inf_or(r.crst.delta);
  crst["degenerate"] = r.crst.degenerate;
  auto channels = nlohmann::json::array();
  for (std::size_t c = 0; c < r.crst.channels.size(); ++c) {
    const auto& ch = r.crst.channels[c];
    channels.push_back({{"channel", c + 1},
                        {"mu_tilde", ch.mu_tilde},
                        {"tau", inf_or(ch.tau)},
                        {"tau_dropped_optimum_term", ch.tau_dropped_optimum_term}});
  }
  crst["channels"] = std::move(channels);
  crst["constant"] = to_json(r.crst.constant);
  j["crs_t"] = std::move(crst);
  return j;
}

nlohmann::json structure_report(const LinkModel& model) {
  const OptimaSummary opt = compute_optima(model);
  const UnimodalReport uni = check_unimodal(model);
  const NeighborhoodGraph graph = build_graph(model.channels(), model.rate_count());
  nlohmann::json j;
  j["channels"] = model.channels();
  j["rates"] = model.rates().values();
  j["monotone"] = check_monotone(model);
  j["unimodal_strict"] = uni.strict;
  j["unimodal_relaxed"] = uni.relaxed;
  j["unique_optimum"] = opt.unique_global;
  auto best = to_json(opt.best);
  best["rate"] = model.rates()[opt.best.rate];
  j["best"] = std::move(best);
  j["mu_star"] = opt.mu_star;
  j["gamma"] = graph.gamma();
  if (opt.unique_global) {
    const auto gu = check_graphically_unimodal(model, graph);
    j["graphically_unimodal"] = gu.holds;
    j["witness"] = gu.witness ? to_json(*gu.witness) : nlohmann::json(nullptr);
  } else {
    j["graphically_unimodal"] = nullptr;
    j["witness"] = nullptr;
    j["reason"] = "non-unique optimum";
  }
  return j;
}

}  // namespace chanrate
