#pragma once

#include <iosfwd>

#include <json.hpp>

#include "jpc/baselines.hpp"
#include "jpc/simulator.hpp"
#include "jpc/value_iteration.hpp"

namespace jpc {

// Fixed CSV headers; columns never reorder between versions.
inline constexpr const char* kSweepCsvHeader =
    "variable,eta,L_mdp,cost_no_buffer,cost_inf_buffer,cost_taut_mean,"
    "cost_taut_stderr,iterations,wallclock_ms,status";
inline constexpr const char* kBenchCsvHeader =
    "B,X,wallclock_degenerated_ms,wallclock_full_ms,speedup,L_deg,L_full";
inline constexpr const char* kTraceCsvHeader = "t,b,x,y,energy";
inline constexpr const char* kScheduleCsvHeader = "t,x_t,y_t,Y_t,R_t,energy_t";

/// Config document: {"B": int, "eta": float, "pmf": [float...]} or the
/// uniform shorthand {"B": int, "eta": float, "uniform_max": int}.
nlohmann::json config_to_json(const SystemConfig& cfg);
SystemConfig config_from_json(const nlohmann::json& j);
SystemConfig load_config(const std::string& path);

/// Policy document: config echo, per-level decision matrices (row-major),
/// A, r, L, gain, epsilon, solver metadata. The contract between `solve`
/// and `simulate`.
nlohmann::json policy_to_json(const Policy& policy, const VIReport* report = nullptr);
Policy policy_from_json(const nlohmann::json& j);
Policy load_policy(const std::string& path);

nlohmann::json report_to_json(const SimulationReport& report);
nlohmann::json vi_report_to_json(const VIReport& report);

/// Per-slot offline schedule rows under kScheduleCsvHeader.
void write_schedule_csv(std::ostream& os, const Trace& trace,
                        const OfflineSchedule& schedule, double eta);

}  // namespace jpc
