// linlat command line driver.
//
//   linlat --scenario uav.json lattice build [--dot out.dot]
//   linlat --scenario uav.json phase synth [--propose] [--limit N]
//   linlat --scenario uav.json mult solve [--solutions]
//   linlat --scenario uav.json rank --new-task x1 [--policy explicit]
//   linlat --scenario uav.json verify [--table t.json] [--sample N --seed S]
//   linlat --scenario uav.json serve --port 8080
//
// Exit status: 0 ok, 1 domain error, 2 parse or I/O error.

#include <fstream>
#include <iostream>
#include <numeric>
#include <random>

#include "CLI11.hpp"
#include "linlat/linlat.hpp"
#include "linlat/service.hpp"

using namespace linlat;

namespace {

struct Flags {
  std::string scenario;
  bool strict_unit = true;
  std::string policy = "auto";
  std::uint64_t seed = 1;
  int port = 8080;
  std::string host = "127.0.0.1";

  std::string dot_path;
  bool propose = false;
  std::size_t limit = 10;
  bool solutions = false;
  std::string new_task;
  std::string table_path;
  std::size_t sample = 0;
};

CandidatePolicy parse_policy(const std::string& p) {
  if (p == "default") return CandidatePolicy::Default;
  if (p == "explicit") return CandidatePolicy::Explicit;
  return CandidatePolicy::Auto;
}

PipelineOptions pipeline_options(const Flags& f) {
  PipelineOptions o;
  o.constraints.strict_unit = f.strict_unit;
  return o;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError(path + " is not valid JSON");
  return j;
}

json candidate_json(const BottomCandidate& c) {
  const TaskLattice& L = c.structure.lattice();
  json j = phase_to_json(c.structure);
  j["nonFactCount"] = c.non_fact_count;
  j["bottomLabel"] = L.label(c.structure.bottom());
  return j;
}

int cmd_lattice(const Flags& f, const Scenario& s) {
  auto L = build_lattice(s);
  const std::string dot = export_dot(*L);
  if (!f.dot_path.empty()) {
    std::ofstream out(f.dot_path);
    if (!out) throw ParseError("cannot write " + f.dot_path);
    out << dot;
  }
  json j = lattice_to_json(*L);
  j["dot"] = dot;
  emit(j);
  return 0;
}

int cmd_phase(const Flags& f, const Scenario& s) {
  auto L = build_lattice(s);
  json j;
  if (s.phase) {
    const PhaseStructure ps = phase_from_json(*s.phase, L);
    j["pinned"] = true;
    j["phase"] = phase_to_json(ps);
    j["laws"] = report_to_json(check_phase_laws(ps));
  } else {
    j["pinned"] = false;
  }
  if (!s.phase || f.propose) {
    const std::vector<BottomCandidate> cands = propose_bottom(L);
    j["candidateCount"] = cands.size();
    j["candidates"] = json::array();
    for (std::size_t i = 0; i < cands.size() && i < f.limit; ++i) j["candidates"].push_back(candidate_json(cands[i]));
    if (s.phase) {
      const PhaseStructure pinned = phase_from_json(*s.phase, L);
      auto it = std::find_if(cands.begin(), cands.end(), [&](const BottomCandidate& c) { return c.structure == pinned; });
      j["pinnedRank"] = it == cands.end() ? json(nullptr) : json(it - cands.begin());
      j["minNonFactCount"] = cands.front().non_fact_count;
    }
  }
  emit(j);
  return 0;
}

int cmd_solve(const Flags& f, const Scenario& s) {
  auto L = build_lattice(s);
  const PhaseStructure ps = s.phase ? phase_from_json(*s.phase, L) : propose_bottom(L).front().structure;
  const ConstraintSet cs = generate_constraints(ps, pipeline_options(f).constraints);
  const AdmissibleTable t = solve(cs);
  json j = table_to_json(t, f.solutions);
  j["constraintCount"] = cs.constraints.size();
  emit(j);
  return 0;
}

int cmd_rank(const Flags& f, const Scenario& s) {
  const Pipeline p = build_pipeline(s, pipeline_options(f));
  Planner planner(p.engine, p.state, p.candidates);
  emit(batch_to_json(planner.rank_new_task(f.new_task, parse_policy(f.policy)), *p.lattice));
  return 0;
}

json tally_json(const std::vector<CheckTally>& t) {
  json j = json::array();
  for (const CheckTally& c : t) {
    j.push_back({{"name", c.total.name},
                 {"enforced", c.total.enforced},
                 {"tables", c.tables},
                 {"failingTables", c.failing_tables},
                 {"checked", c.total.checked},
                 {"violations", c.total.violation_count},
                 {"examples", c.total.violations}});
  }
  return j;
}

int cmd_verify(const Flags& f, Scenario s) {
  if (!f.table_path.empty()) s.table = read_json_file(f.table_path);
  const Pipeline p = build_pipeline(s, pipeline_options(f));
  const ProductLayout& layout = p.table().layout;
  const std::vector<Assignment>& all = p.table().solutions;

  std::vector<std::size_t> picks(all.size());
  std::iota(picks.begin(), picks.end(), std::size_t{0});
  if (f.sample > 0 && f.sample < picks.size()) {
    std::mt19937_64 rng(f.seed);
    std::shuffle(picks.begin(), picks.end(), rng);
    picks.resize(f.sample);
    std::sort(picks.begin(), picks.end());
  }

  std::vector<CheckTally> table_checks, laws;
  ConstraintOptions opts = pipeline_options(f).constraints;
  for (std::size_t i : picks) {
    tally(table_checks, verify_table(*p.phase, layout, all[i], opts).checks);
    tally(laws, check_laws(*p.phase, layout, all[i]));
  }
  bool ok = true;
  for (const CheckTally& c : table_checks) ok = ok && (!c.total.enforced || c.total.passed());
  for (const CheckTally& c : laws) ok = ok && c.total.passed();
  emit({{"tables", picks.size()},
        {"solutionCount", all.size()},
        {"seed", f.seed},
        {"table", tally_json(table_checks)},
        {"laws", tally_json(laws)},
        {"ok", ok}});
  return 0;
}

int cmd_serve(const Flags& f, const Scenario& s) {
  Pipeline p = build_pipeline(s, pipeline_options(f));
  Service svc(s, std::move(p), parse_policy(f.policy));
  const int port = svc.bind(f.host, f.port);
  if (port < 0) throw ParseError("cannot bind " + f.host + ":" + std::to_string(f.port));
  std::cerr << "listening on " << f.host << ":" << port << std::endl;
  return svc.listen_bound() ? 0 : 2;
}

void diagnose(std::string_view code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear logic task lattice planner"};
  app.fallthrough();
  app.require_subcommand(1);
  Flags f;
  app.add_option("--scenario", f.scenario, "scenario JSON")->required();
  app.add_option("--strict-unit", f.strict_unit, "x*I = x on every element (true|false)");
  app.add_option("--policy", f.policy, "candidate policy")->check(CLI::IsMember({"auto", "default", "explicit"}));
  app.add_option("--seed", f.seed, "seed for sampling");

  auto* lattice = app.add_subcommand("lattice", "task lattice")->require_subcommand(1);
  auto* lattice_build = lattice->add_subcommand("build", "emit lattice JSON and DOT");
  lattice_build->add_option("--dot", f.dot_path, "also write DOT here");

  auto* phase = app.add_subcommand("phase", "phase structure")->require_subcommand(1);
  auto* phase_synth = phase->add_subcommand("synth", "validate the pinned phase or propose bottoms");
  phase_synth->add_flag("--propose", f.propose, "propose even when a phase is pinned");
  phase_synth->add_option("--limit", f.limit, "candidates to print");

  auto* mult = app.add_subcommand("mult", "multiplication")->require_subcommand(1);
  auto* mult_solve = mult->add_subcommand("solve", "emit the admissible table");
  mult_solve->add_flag("--solutions", f.solutions, "include every full solution");

  auto* rank = app.add_subcommand("rank", "rank variants for a new task");
  rank->add_option("--new-task", f.new_task, "generator name")->required();

  auto* verify = app.add_subcommand("verify", "law check report");
  verify->add_option("--table", f.table_path, "pinned table JSON");
  verify->add_option("--sample", f.sample, "check this many random solutions (0 = all)");

  auto* serve = app.add_subcommand("serve", "HTTP service");
  serve->add_option("--port", f.port, "0 picks a free port");
  serve->add_option("--host", f.host);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const Scenario s = load_scenario(f.scenario);
    if (*lattice_build) return cmd_lattice(f, s);
    if (*phase_synth) return cmd_phase(f, s);
    if (*mult_solve) return cmd_solve(f, s);
    if (*rank) return cmd_rank(f, s);
    if (*verify) return cmd_verify(f, s);
    if (*serve) return cmd_serve(f, s);
  } catch (const DomainError& e) {
    diagnose(to_string(e.code()), e.what());
    return 1;
  } catch (const ParseError& e) {
    diagnose("ParseError", e.what());
    return 2;
  } catch (const json::exception& e) {
    diagnose("ParseError", e.what());
    return 2;
  } catch (const std::exception& e) {
    diagnose("IOError", e.what());
    return 2;
  }
  return 2;
}
