#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "jpc/serialization.hpp"
#include "jpc/validation.hpp"

using namespace jpc;

TEST_CASE("config documents round-trip and expand the uniform shorthand") {
  const auto cfg = SystemConfig::make(3, 1.4, {0.25, 0.25, 0.25, 0.25});
  const auto back = config_from_json(config_to_json(cfg));
  CHECK(back.B == cfg.B);
  CHECK(back.eta == cfg.eta);
  REQUIRE(back.pmf.size() == cfg.pmf.size());
  for (std::size_t i = 0; i < cfg.pmf.size(); ++i) CHECK(back.pmf[i] == cfg.pmf[i]);

  const auto uni = config_from_json(nlohmann::json{{"B", 8}, {"eta", 1.4}, {"uniform_max", 20}});
  CHECK(uni.X() == 20);
  CHECK(uni.pmf[0] == doctest::Approx(1.0 / 21));
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS(config_from_json(nlohmann::json::array()));
  CHECK_THROWS(config_from_json(nlohmann::json{{"B", 2}}));
  CHECK_THROWS(config_from_json(nlohmann::json{{"B", 2}, {"eta", 0.9}, {"uniform_max", 4}}));
  CHECK_THROWS(config_from_json(nlohmann::json{{"B", 2}, {"eta", 1.4}, {"pmf", {0.7, 0.2}}}));
}

TEST_CASE("policy documents round-trip with all invariants intact") {
  std::mt19937_64 rng(55);
  const auto cfg = validation::random_config(rng, 4, 4, 1.2, 1.8);
  VIOptions o;
  o.eps = 1e-8;
  o.record_gain_trace = false;
  const auto solved = value_iterate_degenerated(cfg, o);

  const auto doc = policy_to_json(solved.policy, &solved.report);
  const auto back = policy_from_json(doc);

  CHECK(back.L == solved.policy.L);
  CHECK(back.gain == solved.policy.gain);
  CHECK(back.epsilon == solved.policy.epsilon);
  CHECK(back.method == solved.policy.method);
  CHECK(back.multichain == solved.policy.multichain);
  REQUIRE(static_cast<int>(back.levels.size()) == cfg.B + 1);
  for (int b = 0; b <= cfg.B; ++b)
    for (int x = 0; x <= cfg.X(); ++x)
      for (int n = 0; n <= cfg.B; ++n)
        CHECK(back.levels[b].d(x, n) == solved.policy.levels[b].d(x, n));
  for (int i = 0; i <= cfg.B; ++i) CHECK(back.r[i] == solved.policy.r[i]);
  CHECK(doc.contains("report"));
}

TEST_CASE("policy documents with corrupted matrices are rejected") {
  std::mt19937_64 rng(56);
  const auto cfg = validation::random_config(rng, 3, 3, 1.2, 1.8);
  VIOptions o;
  o.eps = 1e-7;
  o.record_gain_trace = false;
  const auto solved = value_iterate_degenerated(cfg, o);
  auto doc = policy_to_json(solved.policy);
  doc["levels"][0]["D"][0][0] = 0.5;  // break the row sum
  CHECK_THROWS(policy_from_json(doc));
}

TEST_CASE("csv headers are pinned") {
  CHECK(std::string(kSweepCsvHeader) ==
        "variable,eta,L_mdp,cost_no_buffer,cost_inf_buffer,cost_taut_mean,"
        "cost_taut_stderr,iterations,wallclock_ms,status");
  CHECK(std::string(kBenchCsvHeader) ==
        "B,X,wallclock_degenerated_ms,wallclock_full_ms,speedup,L_deg,L_full");
  CHECK(std::string(kTraceCsvHeader) == "t,b,x,y,energy");
  CHECK(std::string(kScheduleCsvHeader) == "t,x_t,y_t,Y_t,R_t,energy_t");
}

TEST_CASE("schedule csv rows carry the corridor bookkeeping") {
  const Trace tr{{0, 4}, 9};
  const auto sched = taut_string_schedule(tr, 2, 1.4);
  std::ostringstream os;
  write_schedule_csv(os, tr, sched, 1.4);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == kScheduleCsvHeader);
  std::string row;
  std::getline(in, row);
  int t, x;
  double y, Y, R, e;
  REQUIRE(std::sscanf(row.c_str(), "%d,%d,%lf,%lf,%lf,%lf", &t, &x, &y, &Y, &R, &e) == 6);
  CHECK(t == 1);
  CHECK(x == 0);
  CHECK(y == doctest::Approx(2.0));
  CHECK(R == doctest::Approx(0.0));
}

TEST_CASE("simulation report serialization is stable") {
  std::mt19937_64 rng(57);
  const auto cfg = validation::random_config(rng, 3, 3, 1.2, 1.8);
  VIOptions o;
  o.eps = 1e-7;
  o.record_gain_trace = false;
  const auto solved = value_iterate_degenerated(cfg, o);
  const auto rep = simulate_policy(solved.policy, cfg, 5000, 123);
  const auto j = report_to_json(rep);
  CHECK(j.at("steps").get<std::uint64_t>() == 5000);
  CHECK(j.at("seed").get<std::uint64_t>() == 123);
  CHECK(j.at("generator").get<std::string>() == "mt19937_64");
  CHECK(j.contains("occupancy_histogram"));
  CHECK(j.contains("on_demand_fraction"));
}
