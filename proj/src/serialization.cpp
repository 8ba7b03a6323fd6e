#include "jpc/serialization.hpp"

#include <fstream>
#include <ostream>

#include "jpc/model.hpp"

namespace jpc {

using nlohmann::json;

json config_to_json(const SystemConfig& cfg) {
  return json{{"B", cfg.B}, {"eta", cfg.eta}, {"pmf", cfg.pmf}};
}

SystemConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  if (!j.contains("B") || !j.contains("eta"))
    throw std::invalid_argument("config: required fields B, eta");
  const int B = j.at("B").get<int>();
  const double eta = j.at("eta").get<double>();
  if (j.contains("uniform_max")) {
    return SystemConfig::uniform(B, eta, j.at("uniform_max").get<int>());
  }
  if (!j.contains("pmf"))
    throw std::invalid_argument("config: needs either pmf or uniform_max");
  return SystemConfig::make(B, eta, j.at("pmf").get<std::vector<double>>());
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  in >> j;
  return config_from_json(j);
}

namespace {

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const json& j) {
  Mat m(static_cast<int>(j.size()), j.empty() ? 0 : static_cast<int>(j.at(0).size()));
  for (int i = 0; i < m.rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<int>(row.size()) != m.cols)
      throw std::invalid_argument("ragged matrix in policy document");
    for (int c = 0; c < m.cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

}  // namespace

json policy_to_json(const Policy& policy, const VIReport* report) {
  json levels = json::array();
  for (const auto& lvl : policy.levels)
    levels.push_back(json{{"b", lvl.b}, {"D", mat_to_json(lvl.d)}});
  json j{{"config", config_to_json(policy.config)},
         {"levels", std::move(levels)},
         {"A", mat_to_json(policy.A)},
         {"r", policy.r},
         {"L", policy.L},
         {"gain", policy.gain},
         {"epsilon", policy.epsilon},
         {"method", policy.method},
         {"multichain", policy.multichain}};
  if (report) j["report"] = vi_report_to_json(*report);
  return j;
}

Policy policy_from_json(const json& j) {
  Policy pol;
  pol.config = config_from_json(j.at("config"));
  for (const auto& lj : j.at("levels")) {
    DecisionMatrix dm;
    dm.b = lj.at("b").get<int>();
    dm.d = mat_from_json(lj.at("D"));
    dm.validate(pol.config.pmf);
    pol.levels.push_back(std::move(dm));
  }
  if (static_cast<int>(pol.levels.size()) != pol.config.B + 1)
    throw std::invalid_argument("policy document: level count does not match B");
  pol.A = mat_from_json(j.at("A"));
  pol.r = j.at("r").get<std::vector<double>>();
  pol.L = j.at("L").get<double>();
  pol.gain = j.at("gain").get<double>();
  pol.epsilon = j.at("epsilon").get<double>();
  pol.method = j.value("method", std::string());
  pol.multichain = j.value("multichain", false);
  const int B = pol.config.B;
  const int X = pol.config.X();
  pol.Omega = Mat(B + 1, X + 1, 0.0);
  for (int b = 0; b <= B; ++b)
    for (int x = 0; x <= X; ++x)
      pol.Omega(b, x) = expected_state_cost(
          State{b, x},
          std::span<const double>(pol.levels[static_cast<std::size_t>(b)].d.row(x),
                                  static_cast<std::size_t>(B + 1)),
          pol.config.eta);
  return pol;
}

Policy load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open policy file: " + path);
  json j;
  in >> j;
  return policy_from_json(j);
}

json report_to_json(const SimulationReport& rep) {
  return json{{"steps", rep.steps},
              {"seed", rep.seed},
              {"generator", rep.generator},
              {"b0", rep.b0},
              {"mean_energy", rep.mean_energy},
              {"std_error", rep.std_error},
              {"total_energy", rep.total_energy},
              {"on_demand_fraction", rep.on_demand_fraction},
              {"occupancy_histogram", rep.occupancy_histogram}};
}

json vi_report_to_json(const VIReport& rep) {
  return json{{"iterations", rep.iterations},
              {"final_span", rep.final_span},
              {"total_ms", rep.total_ms},
              {"bellman_ms", rep.bellman_ms},
              {"extract_ms", rep.extract_ms},
              {"method", rep.method}};
}

void write_schedule_csv(std::ostream& os, const Trace& trace,
                        const OfflineSchedule& schedule, double eta) {
  os << kScheduleCsvHeader << '\n';
  double cum_demand = 0.0;
  for (std::size_t t = 0; t < trace.x.size(); ++t) {
    cum_demand += trace.x[t];
    os << (t + 1) << ',' << trace.x[t] << ',' << schedule.y[t] << ','
       << schedule.Y[t] << ',' << cum_demand << ','
       << energy_cost_rate(schedule.y[t], eta) << '\n';
  }
}

}  // namespace jpc
