// SPDX-License-Identifier: Apache-2.0

// Command-line front end: run scenarios, explore their state spaces, check
// emitted traces, and inspect projections and repository types.
//
// Exit codes: 0 all checks pass; 1 invariant breach or type error;
// 2 usage or parse error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sessmon/sessmon.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

sessmon::Scenario load_valid(const std::string& path, bool& ok) {
  sessmon::Scenario sc = sessmon::load_scenario(path);
  std::vector<std::string> errs = sessmon::validate_scenario(sc);
  for (const auto& e : errs) std::cerr << "error: " << e << "\n";
  ok = errs.empty();
  return sc;
}

void print_breaches(const sessmon::InvariantReport& rep) {
  for (const auto& b : rep.breaches)
    std::cout << "breach clause=" << b.clause << " index=" << b.index << " "
              << b.detail << "\n";
  std::cout << "breaches: " << rep.breaches.size() << "\n";
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> depth,
            const std::string& trace_path) {
  bool ok = false;
  sessmon::Scenario sc = load_valid(path, ok);
  if (!ok) return kCheckFailed;
  sessmon::RunResult res = sessmon::run_scenario(sc, seed, depth);
  std::cout << "steps: " << res.trace.records.size() << "\n";
  std::cout << "terminal: " << (res.exhausted ? "yes" : "no") << "\n";
  std::cout << "sessions remaining: " << res.final_state.net.sessions.size()
            << "\n";
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) {
      std::cerr << "error: cannot write '" << trace_path << "'\n";
      return kUsage;
    }
    sessmon::emit_trace(res.trace, out);
  }
  sessmon::InvariantReport rep = sessmon::check_invariants(res.trace);
  print_breaches(rep);
  return rep.ok() ? kOk : kCheckFailed;
}

int cmd_explore(const std::string& path, std::optional<std::size_t> depth,
                std::optional<std::size_t> cap) {
  bool ok = false;
  sessmon::Scenario sc = load_valid(path, ok);
  if (!ok) return kCheckFailed;
  sessmon::ExplorationReport rep = sessmon::explore(
      sc, depth.value_or(sc.depth_bound), cap.value_or(sc.branch_cap));
  std::cout << "states: " << rep.states << "\n";
  std::cout << "edges: " << rep.edges << "\n";
  std::cout << "terminal states: " << rep.terminal_states << "\n";
  std::cout << "stuck non-terminal: " << rep.stuck_nonterminal << "\n";
  std::cout << "budget exceeded: " << (rep.budget_exceeded ? "yes" : "no")
            << "\n";
  for (const auto& s : rep.stuck_examples)
    std::cout << "stuck state:\n" << s;
  print_breaches(rep.invariants);
  return rep.invariants.ok() ? kOk : kCheckFailed;
}

int cmd_check(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open trace file '" << path << "'\n";
    return kUsage;
  }
  sessmon::Trace t = sessmon::parse_trace(in);
  std::cout << "records: " << t.records.size() << "\n";
  sessmon::InvariantReport rep = sessmon::check_invariants(t);
  print_breaches(rep);
  return rep.ok() ? kOk : kCheckFailed;
}

int cmd_project(const std::string& path, const std::string& global_name) {
  bool ok = false;
  sessmon::Scenario sc = load_valid(path, ok);
  if (!ok) return kCheckFailed;
  const sessmon::NamedGlobal* g = sessmon::find_global(sc, global_name);
  if (!g) {
    std::cerr << "error: no global named '" << global_name << "'\n";
    return kUsage;
  }
  for (const auto& p : sessmon::participants(g->g))
    std::cout << p << ": " << sessmon::render(sessmon::project(g->g, p))
              << "\n";
  return kOk;
}

int cmd_typecheck(const std::string& path) {
  sessmon::Scenario sc = sessmon::load_scenario(path);
  std::vector<std::string> errs = sessmon::validate_scenario(sc);
  for (const auto& e : errs) std::cerr << "error: " << e << "\n";
  if (!errs.empty()) return kCheckFailed;
  for (const auto& r : sc.repo)
    std::cout << "process " << r.name << " : "
              << sessmon::render(sessmon::normalize(r.declared_type)) << "\n";
  std::cout << "ok\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"monitored multiparty session engine"};
  app.require_subcommand(1);

  std::string scenario_path, trace_out, trace_in, global_name;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> depth, cap;

  CLI::App* run = app.add_subcommand("run", "execute one scheduled run");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--depth", depth, "maximum number of steps");
  run->add_option("--trace", trace_out, "write the trace to this file");

  CLI::App* exp = app.add_subcommand("explore", "bounded exhaustive search");
  exp->add_option("scenario", scenario_path, "scenario file")->required();
  exp->add_option("--depth", depth, "depth bound");
  exp->add_option("--cap", cap, "state budget");

  CLI::App* chk = app.add_subcommand("check", "validate an emitted trace");
  chk->add_option("trace", trace_in, "trace file")->required();

  CLI::App* prj = app.add_subcommand("project", "print every monitor");
  prj->add_option("scenario", scenario_path, "scenario file")->required();
  prj->add_option("--global", global_name, "global type name")->required();

  CLI::App* tyc = app.add_subcommand("typecheck", "validate the repository");
  tyc->add_option("scenario", scenario_path, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (run->parsed()) return cmd_run(scenario_path, seed, depth, trace_out);
    if (exp->parsed()) return cmd_explore(scenario_path, depth, cap);
    if (chk->parsed()) return cmd_check(trace_in);
    if (prj->parsed()) return cmd_project(scenario_path, global_name);
    if (tyc->parsed()) return cmd_typecheck(scenario_path);
  } catch (const sessmon::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const sessmon::NotALattice& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const sessmon::TraceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const sessmon::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}
