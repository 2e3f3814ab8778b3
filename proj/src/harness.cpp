#include "chanrate/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "chanrate/io.hpp"

namespace chanrate {

namespace {

int source_count(const ExperimentConfig& c) {
  return static_cast<int>(c.theta.has_value()) + static_cast<int>(c.trace.has_value()) +
         static_cast<int>(c.synth.has_value());
}

double default_original_time(const ExperimentConfig& c) {
  // One spare slot so the packet that crosses the time budget is always simulated.
  return std::floor(static_cast<double>(c.horizon - 1) / c.rates.back());
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

bool wants_original(Accounting a) { return a != Accounting::Alternative; }

}  // namespace

void ExperimentConfig::validate() const {
  const RateSet r(rates);
  if (source_count(*this) != 1)
    throw ModelError("config needs exactly one of theta, theta_csv, trace_csv or synth");
  if (policies.empty()) throw ModelError("config needs at least one policy");
  if (seeds.empty()) throw ModelError("config needs at least one seed");
  if (accelerate < 1) throw ModelError("accelerate must be at least 1");
  if (decisions_stride < 1) throw ModelError("decisions_stride must be at least 1");
  int channels = 0;
  if (theta) channels = theta->channels();
  if (trace) channels = trace->segments.empty() ? 0 : trace->segments.front().theta.channels();
  if (synth) channels = synth->channels;
  if (horizon < static_cast<std::uint64_t>(channels) * static_cast<std::uint64_t>(r.size()))
    throw ModelError("horizon must cover the round-robin initialisation (C*K slots)");
  for (const auto& p : policies)
    if (p.options.window && *p.options.window < 1) throw ModelError("policy window must be at least 1");
  if (wants_original(accounting)) {
    if (!theta) throw ModelError("original-system accounting needs a stationary theta source");
    const double t = original_time ? *original_time : default_original_time(*this);
    if (!(t > 0.0)) throw ModelError("original-system time budget must be positive");
    if (std::ceil(t * r.highest()) + 1.0 > static_cast<double>(horizon))
      throw ModelError("horizon too short for the original-system time budget");
  }
}

ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  ExperimentConfig c;
  try {
    if (!j.is_object()) throw ModelError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      static const std::vector<std::string> known = {
          "rates", "rates_json", "theta", "theta_csv", "occupancy", "trace_csv", "synth", "synth_json",
          "accelerate", "policies", "horizon", "seeds", "accounting", "original_time",
          "decisions_stride", "threads", "out"};
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ModelError("unknown config key '" + key + "'");
    }
    if (j.contains("rates_json"))
      c.rates = load_rates_json(resolve(j.at("rates_json").get<std::string>())).values();
    else
      c.rates = parse_rates_json(j.at("rates")).values();
    const RateSet rates(c.rates);

    c.horizon = j.at("horizon").get<std::uint64_t>();
    c.accelerate = j.value("accelerate", std::uint64_t{1});
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.decisions_stride = j.value("decisions_stride", std::uint64_t{1});
    c.threads = j.value("threads", 0u);
    if (j.contains("out")) c.out_dir = resolve(j.at("out").get<std::string>());
    if (j.contains("original_time")) c.original_time = j.at("original_time").get<double>();
    if (j.contains("occupancy")) c.occupancy = j.at("occupancy").get<std::vector<double>>();

    const std::string acc = j.value("accounting", std::string("alternative"));
    if (acc == "alternative")
      c.accounting = Accounting::Alternative;
    else if (acc == "original")
      c.accounting = Accounting::Original;
    else if (acc == "both")
      c.accounting = Accounting::Both;
    else
      throw ModelError("accounting must be alternative, original or both");

    if (j.contains("theta")) {
      const auto rows = j.at("theta").get<std::vector<std::vector<double>>>();
      std::vector<double> flat;
      for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != rates.size()) throw ModelError("theta rows need one entry per rate");
        flat.insert(flat.end(), row.begin(), row.end());
      }
      c.theta = Grid(static_cast<int>(rows.size()), rates.size(), std::move(flat));
    }
    if (j.contains("theta_csv")) {
      if (c.theta) throw ModelError("config needs exactly one of theta, theta_csv, trace_csv or synth");
      c.theta = load_theta_csv(resolve(j.at("theta_csv").get<std::string>()), rates.size());
    }
    if (j.contains("trace_csv"))
      c.trace = load_trace_csv(resolve(j.at("trace_csv").get<std::string>()), rates.size(),
                               c.horizon * c.accelerate);
    if (j.contains("synth") || j.contains("synth_json")) {
      nlohmann::json s = j.contains("synth") ? j.at("synth") : read_json_file(resolve(j.at("synth_json")));
      if (!s.contains("rates")) s["rates"] = c.rates;
      if (!s.contains("horizon")) s["horizon"] = c.horizon * c.accelerate;
      c.synth = parse_synth_spec(s);
      if (c.synth->rates != c.rates) throw ModelError("synthetic spec rates differ from the config rates");
    }

    for (const auto& p : j.at("policies")) {
      PolicySpec spec;
      if (p.is_string()) {
        spec.kind = parse_policy_kind(p.get<std::string>());
      } else {
        spec.kind = parse_policy_kind(p.at("kind").get<std::string>());
        if (p.contains("window")) spec.options.window = p.at("window").get<int>();
        spec.options.strict_neighbourhood = p.value("strict", false);
        spec.label = p.value("label", std::string{});
      }
      c.policies.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_json_file(path), path.parent_path());
}

Environment build_environment(const ExperimentConfig& config) {
  const RateSet rates(config.rates);
  if (config.theta) return stationary_env(LinkModel(rates, *config.theta, config.occupancy));
  TraceTable trace = config.trace ? *config.trace : synth_drift_trace(*config.synth);
  if (config.accelerate > 1) trace = accelerate(trace, config.accelerate);
  if (trace.horizon < config.horizon) throw ModelError("trace is shorter than the configured horizon");
  return Environment(rates, std::move(trace), 0, config.occupancy);
}

// ---------------------------------------------------------------------------

const PolicyResult& ExperimentResult::policy(const std::string& label) const {
  for (const auto& p : policies)
    if (p.label == label) return p;
  throw ModelError("no policy labelled '" + label + "'");
}

std::size_t ExperimentResult::checkpoint_index(std::uint64_t slot) const {
  const auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), slot);
  if (it == checkpoints.end() || *it != slot) throw ModelError("slot " + std::to_string(slot) + " is not a checkpoint");
  return static_cast<std::size_t>(it - checkpoints.begin());
}

std::vector<std::uint64_t> make_checkpoints(std::uint64_t horizon, const std::vector<std::uint64_t>& extra) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 1; p <= horizon; p *= 2) {
    out.push_back(p);
    if (p > horizon / 2) break;
  }
  out.push_back(horizon);
  for (auto e : extra)
    if (e <= horizon) out.push_back(e);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double transmission_time(const std::vector<std::uint64_t>& packets, const RateSet& rates) {
  const std::size_t k = static_cast<std::size_t>(rates.size());
  double t = 0.0;
  for (std::size_t i = 0; i < packets.size(); ++i)
    t += static_cast<double>(packets[i]) / rates[static_cast<int>(i % k)];
  return t;
}

namespace {

std::unique_ptr<Policy> instantiate(const PolicySpec& spec, const Environment& env, DecisionPair static_pair) {
  switch (spec.kind) {
    case PolicyKind::Oracle:
      return std::make_unique<OraclePolicy>([env](std::uint64_t n) { return env.best_pair_at(n); });
    case PolicyKind::Static:
      return std::make_unique<FixedPolicy>(static_pair);
    default:
      return make_policy(spec.kind, env.rates(), env.channels(), spec.options);
  }
}

// Best fixed pair in hindsight and its expected reward over [0, horizon).
std::pair<DecisionPair, double> static_best(const Environment& env, std::uint64_t horizon) {
  Grid total(env.channels(), env.rate_count());
  for (const auto& s : env.segments()) {
    if (s.start >= horizon) break;
    const double len = static_cast<double>(std::min(s.end, horizon) - s.start);
    for (int c = 0; c < env.channels(); ++c)
      for (int k = 0; k < env.rate_count(); ++k) total(c, k) += len * s.mu(c, k);
  }
  const DecisionPair best = best_pair(total);
  return {best, total(best)};
}

double oracle_reward(const Environment& env, std::uint64_t horizon) {
  double sum = 0.0;
  for (const auto& s : env.segments()) {
    if (s.start >= horizon) break;
    sum += static_cast<double>(std::min(s.end, horizon) - s.start) * s.mu_star;
  }
  return sum;
}

}  // namespace

RunRecord run_single(const PolicySpec& spec, const Environment& env, const ExperimentConfig& config,
                     const std::vector<std::uint64_t>& checkpoints, const std::vector<double>& time_checkpoints,
                     bool keep_decisions) {
  const auto [static_pair, unused] = static_best(env, config.horizon);
  (void)unused;
  auto policy = instantiate(spec, env, static_pair);
  const RateSet& rates = env.rates();
  const std::size_t pairs = static_cast<std::size_t>(env.channels() * env.rate_count());

  RunRecord rec;
  rec.seed = env.seed();
  rec.pulls.assign(pairs, 0);
  rec.packets.assign(pairs, 0);

  // Original-system bookkeeping; only meaningful for stationary environments.
  const bool original = !time_checkpoints.empty();
  std::size_t next_time = 0;
  double expected_packets = 0.0;
  double best_theta = 0.0;
  double best_rate = 0.0;
  if (original) {
    const DecisionPair b = env.best_pair_at(0);
    best_theta = env.theta_at(0)(b);
    best_rate = rates[b.rate];
  }
  auto original_regret_at = [&](double t) { return best_theta * std::floor(best_rate * t) - expected_packets; };

  double regret = 0.0;
  std::size_t next_check = 0;
  while (next_check < checkpoints.size() && checkpoints[next_check] == 0) {
    rec.regret.push_back(0.0);
    ++next_check;
  }
  for (std::uint64_t n = 0; n < config.horizon; ++n) {
    const auto& seg = env.segment(n);
    const DecisionPair d = policy->select();
    const bool success = env.draw(d, n);
    policy->update(d, success);

    const std::size_t slot = static_cast<std::size_t>(d.channel * env.rate_count() + d.rate);
    const double mu = seg.mu(d);
    rec.pulls[slot] += 1;
    rec.expected_reward += mu;
    if (success) rec.realized_reward += rates[d.rate];
    regret += seg.mu_star - mu;

    if (original && next_time < time_checkpoints.size()) {
      rec.packets[slot] += 1;
      const double finish = transmission_time(rec.packets, rates);
      rec.packets[slot] -= 1;
      while (next_time < time_checkpoints.size() && finish > time_checkpoints[next_time]) {
        rec.original_regret.push_back(original_regret_at(time_checkpoints[next_time]));
        ++next_time;
      }
      if (next_time < time_checkpoints.size()) {
        rec.packets[slot] += 1;
        expected_packets += seg.theta(d);
      }
    }

    while (next_check < checkpoints.size() && checkpoints[next_check] == n + 1) {
      rec.regret.push_back(regret);
      ++next_check;
    }
    if (keep_decisions && (n % config.decisions_stride == 0 || n + 1 == config.horizon))
      rec.decisions.push_back({n + 1, d, seg.best});
  }
  if (original && next_time < time_checkpoints.size())
    throw ModelError("horizon exhausted before the original-system time budget");
  rec.time_used = transmission_time(rec.packets, rates);
  return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Environment base = build_environment(config);
  const RateSet& rates = base.rates();

  ExperimentResult result;
  result.horizon = config.horizon;
  result.seeds = config.seeds;
  std::vector<std::uint64_t> extra;
  if (wants_original(config.accounting)) {
    const double t = config.original_time ? *config.original_time : default_original_time(config);
    result.original_time = t;
    extra.push_back(static_cast<std::uint64_t>(std::floor(t * rates.lowest())));
    extra.push_back(static_cast<std::uint64_t>(std::ceil(t * rates.highest())));
    for (double p = 1.0; p < t; p *= 2.0) result.time_checkpoints.push_back(p);
    result.time_checkpoints.push_back(t);
  }
  result.checkpoints = make_checkpoints(config.horizon, extra);
  result.oracle_reward = oracle_reward(base, config.horizon);
  std::tie(result.static_pair, result.static_reward) = static_best(base, config.horizon);
  if (base.stationary() && config.theta)
    result.bounds = compute_bounds(LinkModel(rates, *config.theta, config.occupancy));

  const std::size_t seeds = config.seeds.size();
  const std::size_t tasks = config.policies.size() * seeds;
  std::vector<RunRecord> records(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks; i = next++) {
      const auto& spec = config.policies[i / seeds];
      const std::size_t s = i % seeds;
      records[i] = run_single(spec, base.reseeded(config.seeds[s]), config, result.checkpoints,
                              result.time_checkpoints, s == 0);
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    const auto& spec = config.policies[p];
    PolicyResult pr;
    pr.label = spec.label;
    if (pr.label.empty()) {
      const Environment e = base.reseeded(0);
      pr.label = instantiate(spec, e, result.static_pair)->name();
    }
    for (std::size_t s = 0; s < seeds; ++s) pr.runs.push_back(std::move(records[p * seeds + s]));

    auto aggregate = [&](auto member, std::size_t points, std::vector<double>& mean, std::vector<double>& sd) {
      for (std::size_t i = 0; i < points; ++i) {
        std::vector<double> v;
        for (const auto& r : pr.runs) v.push_back((r.*member)[i]);
        mean.push_back(mean_of(v));
        sd.push_back(stddev_of(v));
      }
    };
    aggregate(&RunRecord::regret, result.checkpoints.size(), pr.mean_regret, pr.stddev_regret);
    aggregate(&RunRecord::original_regret, result.time_checkpoints.size(), pr.mean_original_regret,
              pr.stddev_original_regret);
    std::vector<double> eff;
    for (const auto& r : pr.runs)
      eff.push_back(result.oracle_reward > 0.0 ? r.expected_reward / result.oracle_reward : 1.0);
    pr.mean_efficiency = mean_of(eff);
    pr.stderr_efficiency = stddev_of(eff) / std::sqrt(static_cast<double>(eff.size()));
    result.policies.push_back(std::move(pr));
  }
  return result;
}

// ---------------------------------------------------------------------------

bool AccountingReport::ok() const {
  for (const auto& e : entries)
    if (!e.lower_holds || !e.upper_holds || !e.budget_holds) return false;
  return !entries.empty();
}

AccountingReport accounting_check(const ExperimentResult& result, const RateSet& rates) {
  if (!result.original_time || result.time_checkpoints.empty())
    throw ModelError("accounting check needs original-system accounting");
  const double t = *result.original_time;
  const std::size_t lo = result.checkpoint_index(static_cast<std::uint64_t>(std::floor(t * rates.lowest())));
  const std::size_t hi = result.checkpoint_index(static_cast<std::uint64_t>(std::ceil(t * rates.highest())));
  const std::size_t mid = result.time_checkpoints.size() - 1;
  const double n = static_cast<double>(result.seeds.size());

  AccountingReport report;
  for (const auto& p : result.policies) {
    AccountingReport::Entry e;
    e.label = p.label;
    e.lower = p.mean_regret[lo];
    e.upper = p.mean_regret[hi];
    e.middle = p.mean_original_regret[mid];
    // Standard error of the paired difference of the two compared means.
    auto diff_se = [&](std::size_t slot_index) {
      std::vector<double> d;
      for (const auto& r : p.runs) d.push_back(r.original_regret[mid] - r.regret[slot_index]);
      return stddev_of(d) / std::sqrt(n);
    };
    const double se_lower = diff_se(lo);
    const double se_upper = diff_se(hi);
    e.tolerance = 3.0 * std::max(se_lower, se_upper);
    e.lower_holds = e.lower <= e.middle + 3.0 * se_lower;
    e.upper_holds = e.middle <= e.upper + 3.0 * se_upper;
    e.budget_holds = std::all_of(p.runs.begin(), p.runs.end(),
                                 [&](const RunRecord& r) { return transmission_time(r.packets, rates) <= t; });
    report.entries.push_back(e);
  }
  return report;
}

// ---------------------------------------------------------------------------

nlohmann::json summary_json(const ExperimentResult& result) {
  nlohmann::json j;
  j["horizon"] = result.horizon;
  j["seeds"] = result.seeds;
  j["oracle_reward"] = result.oracle_reward;
  j["static"] = {{"pair", to_json(result.static_pair)},
                 {"reward", result.static_reward},
                 {"efficiency_percent",
                  result.oracle_reward > 0 ? 100.0 * result.static_reward / result.oracle_reward : 100.0}};
  auto policies = nlohmann::json::array();
  nlohmann::json table;
  table["Static"] = j["static"]["efficiency_percent"];
  for (const auto& p : result.policies) {
    nlohmann::json pj;
    pj["label"] = p.label;
    pj["final_regret_mean"] = p.mean_regret.back();
    pj["final_regret_stddev"] = p.stddev_regret.back();
    if (!p.mean_original_regret.empty()) {
      pj["original_time"] = *result.original_time;
      pj["final_original_regret_mean"] = p.mean_original_regret.back();
      pj["final_original_regret_stddev"] = p.stddev_original_regret.back();
    }
    pj["efficiency_percent"] = 100.0 * p.mean_efficiency;
    pj["efficiency_stderr_percent"] = 100.0 * p.stderr_efficiency;
    table[p.label] = 100.0 * p.mean_efficiency;
    policies.push_back(std::move(pj));
  }
  table["Oracle"] = 100.0;
  j["policies"] = std::move(policies);
  j["efficiency_table"] = std::move(table);
  if (result.bounds) j["bounds"] = to_json(*result.bounds);
  return j;
}

void emit_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ModelError("cannot create output directory " + dir.string() + ": " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw ModelError("cannot write " + (dir / name).string());
    return out;
  };

  {
    auto out = open("regret.csv");
    out << "checkpoint,policy,accounting,mean,stddev";
    for (auto s : result.seeds) out << ",seed_" << s;
    out << '\n';
    for (const auto& p : result.policies) {
      for (std::size_t i = 0; i < result.checkpoints.size(); ++i) {
        out << result.checkpoints[i] << ',' << p.label << ",alternative," << format_number(p.mean_regret[i]) << ','
            << format_number(p.stddev_regret[i]);
        for (const auto& r : p.runs) out << ',' << format_number(r.regret[i]);
        out << '\n';
      }
      for (std::size_t i = 0; i < result.time_checkpoints.size(); ++i) {
        out << format_number(result.time_checkpoints[i]) << ',' << p.label << ",original,"
            << format_number(p.mean_original_regret[i]) << ',' << format_number(p.stddev_original_regret[i]);
        for (const auto& r : p.runs) out << ',' << format_number(r.original_regret[i]);
        out << '\n';
      }
    }
    if (!out) throw ModelError("failed writing regret.csv");
  }
  {
    auto out = open("decisions.csv");
    out << "step,policy,channel,rate_index,best_channel,best_rate_index\n";
    for (const auto& p : result.policies)
      for (const auto& d : p.runs.front().decisions)
        out << d.step << ',' << p.label << ',' << d.chosen.channel + 1 << ',' << d.chosen.rate + 1 << ','
            << d.best.channel + 1 << ',' << d.best.rate + 1 << '\n';
    if (!out) throw ModelError("failed writing decisions.csv");
  }
  {
    auto out = open("summary.json");
    out << summary_json(result).dump(2) << '\n';
    if (!out) throw ModelError("failed writing summary.json");
  }
  if (result.bounds) {
    auto out = open("bounds.json");
    out << to_json(*result.bounds).dump(2) << '\n';
    if (!out) throw ModelError("failed writing bounds.json");
  }
}

}  // namespace chanrate
