#pragma once

// Scenario documents and JSON forms of the lattice, phase structure, table
// and planner output.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "linlat/constraints.hpp"
#include "linlat/engine.hpp"
#include "linlat/error.hpp"
#include "linlat/lattice.hpp"
#include "linlat/phase.hpp"
#include "linlat/planner.hpp"
#include "linlat/solver.hpp"
#include "linlat/verify.hpp"

namespace linlat {

using json = nlohmann::json;

inline constexpr int kScenarioVersion = 1;

struct AgentSpec {
  std::string id;
  AgentKind kind = AgentKind::Unmanned;
  std::optional<std::string> active;
  std::vector<std::string> intentions;
};

struct Scenario {
  int version = kScenarioVersion;
  std::vector<TaskSpec> tasks;
  std::vector<ElementName> names;
  std::vector<AgentSpec> agents;
  std::optional<json> phase;
  std::optional<json> table;
  std::optional<CandidateList> candidates;
};

Scenario scenario_from_json(const json& j);
json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

json lattice_to_json(const TaskLattice& L);
TaskLattice lattice_from_json(const json& j);

json phase_to_json(const PhaseStructure& ps);
/// Element references may be ids or names. Only bottom and dual are read;
/// the derived classes are recomputed.
PhaseStructure phase_from_json(const json& j, std::shared_ptr<const TaskLattice> lattice);

json table_to_json(const AdmissibleTable& t, bool with_solutions = false);
/// Stored solutions are used when present, otherwise every combination of
/// the per-pair values.
AdmissibleTable table_from_json(const json& j, const ProductLayout& layout, std::size_t max_solutions = 2'000'000);

json state_to_json(const SystemState& s, const TaskLattice& L);
SystemState state_from_specs(const std::vector<AgentSpec>& agents, const TaskLattice& L);
json batch_to_json(const RankedBatch& b, const TaskLattice& L);
json history_to_json(const std::vector<HistoryEntry>& h, const TaskLattice& L);
json report_to_json(const std::vector<CheckResult>& checks);

struct PipelineOptions {
  ConstraintOptions constraints;
  SolveOptions solve;
};

/// Lattice, phase (pinned or best proposed), table (pinned or solved),
/// engine and initial state for one scenario.
struct Pipeline {
  std::shared_ptr<const TaskLattice> lattice;
  std::optional<PhaseStructure> phase;
  bool phase_pinned = false;
  std::optional<ConstraintSet> constraints;
  std::shared_ptr<const LinearEngine> engine;
  SystemState state;
  std::optional<CandidateList> candidates;

  const AdmissibleTable& table() const { return engine->table(); }
};

std::shared_ptr<const TaskLattice> build_lattice(const Scenario& s);
Pipeline build_pipeline(const Scenario& s, const PipelineOptions& options = {});

// ---------------------------------------------------------------------------

namespace detail {

template <class T>
T field(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(std::string(where) + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string(where) + ": field '" + key + "': " + e.what());
  }
}

inline ElementId element_ref(const json& j, const TaskLattice& L) {
  if (j.is_number_unsigned()) {
    ElementId id{j.get<std::uint32_t>()};
    L.check(id);
    return id;
  }
  if (j.is_string()) return L.by_name(j.get<std::string>());
  throw ParseError("element reference must be an id or a name, got " + j.dump());
}

inline json ids(const std::vector<ElementId>& xs) {
  json a = json::array();
  for (ElementId x : xs) a.push_back(x.value);
  return a;
}

inline json labels(const std::vector<ElementId>& xs, const TaskLattice& L) {
  json a = json::array();
  for (ElementId x : xs) a.push_back(L.label(x));
  return a;
}

}  // namespace detail

inline Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("scenario must be a JSON object");
  Scenario s;
  s.version = j.value("version", kScenarioVersion);
  if (s.version != kScenarioVersion)
    throw ParseError("unsupported scenario version " + std::to_string(s.version));
  for (const json& t : detail::field<json>(j, "tasks", "scenario")) {
    s.tasks.push_back({detail::field<std::string>(t, "name", "task"),
                       detail::field<std::vector<std::string>>(t, "actions", "task")});
  }
  if (j.contains("names")) {
    for (const json& n : j.at("names")) {
      s.names.push_back({detail::field<std::string>(n, "name", "named element"),
                         detail::field<std::vector<std::string>>(n, "actions", "named element")});
    }
  }
  if (j.contains("agents")) {
    for (const json& a : j.at("agents")) {
      AgentSpec spec;
      spec.id = detail::field<std::string>(a, "id", "agent");
      const std::string kind = a.value("kind", std::string("unmanned"));
      if (kind == "manned")
        spec.kind = AgentKind::Manned;
      else if (kind == "unmanned")
        spec.kind = AgentKind::Unmanned;
      else
        throw ParseError("agent " + spec.id + ": kind must be manned or unmanned");
      if (a.contains("active") && !a.at("active").is_null()) spec.active = detail::field<std::string>(a, "active", "agent");
      if (a.contains("intentions")) spec.intentions = detail::field<std::vector<std::string>>(a, "intentions", "agent");
      s.agents.push_back(std::move(spec));
    }
  }
  if (j.contains("phase") && !j.at("phase").is_null()) s.phase = j.at("phase");
  if (j.contains("table") && !j.at("table").is_null()) s.table = j.at("table");
  if (j.contains("candidates") && !j.at("candidates").is_null()) {
    const json& c = j.at("candidates");
    CandidateList list;
    list.new_task = detail::field<std::string>(c, "newTask", "candidates");
    for (const json& v : detail::field<json>(c, "variants", "candidates")) {
      list.variants.push_back({detail::field<std::string>(v, "id", "variant"),
                               detail::field<std::string>(v, "expression", "variant")});
    }
    s.candidates = std::move(list);
  }
  return s;
}

inline json scenario_to_json(const Scenario& s) {
  json j;
  j["version"] = s.version;
  j["tasks"] = json::array();
  for (const TaskSpec& t : s.tasks) j["tasks"].push_back({{"name", t.name}, {"actions", t.actions}});
  j["names"] = json::array();
  for (const ElementName& n : s.names) j["names"].push_back({{"name", n.name}, {"actions", n.actions}});
  j["agents"] = json::array();
  for (const AgentSpec& a : s.agents) {
    json aj{{"id", a.id}, {"kind", to_string(a.kind)}, {"intentions", a.intentions}};
    aj["active"] = a.active ? json(*a.active) : json(nullptr);
    j["agents"].push_back(std::move(aj));
  }
  if (s.phase) j["phase"] = *s.phase;
  if (s.table) j["table"] = *s.table;
  if (s.candidates) {
    json vs = json::array();
    for (const ExplicitVariant& v : s.candidates->variants) vs.push_back({{"id", v.id}, {"expression", v.expression}});
    j["candidates"] = {{"newTask", s.candidates->new_task}, {"variants", vs}};
  }
  return j;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return scenario_from_json(j);
}

inline json lattice_to_json(const TaskLattice& L) {
  json j;
  j["elements"] = json::array();
  for (const LatticeElement& el : L.elements()) {
    json e{{"id", el.id.value},
           {"actions", el.actions},
           {"label", L.label(el.id)},
           {"rank", L.rank(el.id)},
           {"joinIrreducible", L.is_join_irreducible(el.id)}};
    e["name"] = el.name ? json(*el.name) : json(nullptr);
    j["elements"].push_back(std::move(e));
  }
  j["bottom"] = L.bottom().value;
  j["top"] = L.top().value;
  std::vector<ElementId> gens(L.generators().begin(), L.generators().end());
  std::vector<ElementId> jis(L.join_irreducibles().begin(), L.join_irreducibles().end());
  j["generators"] = detail::ids(gens);
  j["joinIrreducibles"] = detail::ids(jis);
  j["edges"] = json::array();
  for (auto [lo, hi] : L.cover_edges()) j["edges"].push_back({lo.value, hi.value});
  return j;
}

inline TaskLattice lattice_from_json(const json& j) {
  const json elements = detail::field<json>(j, "elements", "lattice");
  const std::vector<std::uint32_t> gens = detail::field<std::vector<std::uint32_t>>(j, "generators", "lattice");
  std::vector<TaskSpec> tasks;
  std::vector<ElementName> names;
  for (const json& e : elements) {
    const std::uint32_t id = detail::field<std::uint32_t>(e, "id", "element");
    const auto actions = detail::field<std::vector<std::string>>(e, "actions", "element");
    const bool named = e.contains("name") && e.at("name").is_string();
    if (std::find(gens.begin(), gens.end(), id) != gens.end()) {
      if (!named) throw ParseError("generator " + std::to_string(id) + " has no name");
      tasks.push_back({e.at("name").get<std::string>(), actions});
    } else if (named) {
      names.push_back({e.at("name").get<std::string>(), actions});
    }
  }
  TaskLattice L = TaskLattice::build(tasks, names);
  if (L.size() != elements.size())
    throw DomainError(ErrorCode::InvalidScenario, "lattice document lists " + std::to_string(elements.size()) +
                                                      " elements but its generators close to " +
                                                      std::to_string(L.size()));
  return L;
}

inline json phase_to_json(const PhaseStructure& ps) {
  const TaskLattice& L = ps.lattice();
  json j;
  j["bottom"] = ps.bottom().value;
  j["unit"] = ps.unit().value;
  j["classical"] = ps.classical();
  json dual = json::object();
  for (ElementId x : L.ids()) dual[std::to_string(x.value)] = ps.dual(x).value;
  j["dual"] = std::move(dual);
  j["facts"] = detail::ids(ps.facts());
  j["open"] = detail::ids(ps.open_facts());
  j["closed"] = detail::ids(ps.closed_facts());
  j["nonFacts"] = detail::ids(ps.non_facts());
  return j;
}

inline PhaseStructure phase_from_json(const json& j, std::shared_ptr<const TaskLattice> lattice) {
  const TaskLattice& L = *lattice;
  const ElementId bottom = detail::element_ref(detail::field<json>(j, "bottom", "phase"), L);
  const json dual = detail::field<json>(j, "dual", "phase");
  if (!dual.is_object()) throw ParseError("phase: 'dual' must be an object");
  DualityAssignment d;
  d.dual.assign(L.size(), L.top());
  std::vector<char> given(L.size(), 0);
  for (auto it = dual.begin(); it != dual.end(); ++it) {
    const std::string& key = it.key();
    ElementId x;
    if (!key.empty() && std::all_of(key.begin(), key.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      x = detail::element_ref(json(static_cast<std::uint32_t>(std::stoul(key))), L);
    else
      x = L.by_name(key);
    d.dual[x.value] = detail::element_ref(it.value(), L);
    given[x.value] = 1;
  }
  for (ElementId x : L.ids()) {
    if (!given[x.value])
      throw DomainError(ErrorCode::InvalidDuality, "totality: no dual given for " + L.label(x));
  }
  PhaseStructure ps = PhaseStructure::classify(std::move(lattice), bottom, std::move(d));
  if (j.contains("unit") && detail::element_ref(j.at("unit"), L) != ps.unit())
    throw DomainError(ErrorCode::InvalidDuality, "bounds: stated unit is not dual(bottom) = " + L.label(ps.unit()));
  return ps;
}

inline json table_to_json(const AdmissibleTable& t, bool with_solutions) {
  json j;
  j["pairs"] = json::array();
  for (std::size_t k = 0; k < t.layout.pair_count(); ++k) {
    auto [a, b] = t.layout.pair(k);
    j["pairs"].push_back({{"a", a.value},
                          {"b", b.value},
                          {"values", detail::ids(t.per_pair[k])},
                          {"label", t.layout.pair_label(k)},
                          {"valueLabels", detail::labels(t.per_pair[k], t.layout.lattice())}});
  }
  j["solutionCount"] = t.solution_count();
  if (with_solutions) {
    j["solutions"] = json::array();
    for (const Assignment& s : t.solutions) j["solutions"].push_back(detail::ids(s));
  }
  return j;
}

inline AdmissibleTable table_from_json(const json& j, const ProductLayout& layout, std::size_t max_solutions) {
  const TaskLattice& L = layout.lattice();
  std::vector<std::vector<ElementId>> per_pair(layout.pair_count());
  std::vector<char> seen(layout.pair_count(), 0);
  for (const json& p : detail::field<json>(j, "pairs", "table")) {
    const ElementId a = detail::element_ref(detail::field<json>(p, "a", "pair"), L);
    const ElementId b = detail::element_ref(detail::field<json>(p, "b", "pair"), L);
    const std::size_t k = layout.pair_index(a, b);
    if (seen[k]) throw ParseError("table lists pair " + L.label(a) + L.label(b) + " twice");
    seen[k] = 1;
    for (const json& v : detail::field<json>(p, "values", "pair")) per_pair[k].push_back(detail::element_ref(v, L));
    if (per_pair[k].empty()) throw DomainError(ErrorCode::Inconsistent, "pair " + L.label(a) + L.label(b) + " has no value");
  }
  for (std::size_t k = 0; k < layout.pair_count(); ++k) {
    if (!seen[k]) throw ParseError("table is missing pair " + layout.pair_label(k));
  }
  std::vector<Assignment> solutions;
  if (j.contains("solutions")) {
    for (const json& s : j.at("solutions")) {
      Assignment a;
      for (const json& v : s) a.push_back(detail::element_ref(v, L));
      if (a.size() != layout.pair_count()) throw ParseError("table solution has the wrong number of entries");
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (std::find(per_pair[k].begin(), per_pair[k].end(), a[k]) == per_pair[k].end())
          throw DomainError(ErrorCode::Inconsistent, "stored solution uses a value outside pair " + layout.pair_label(k));
      }
      solutions.push_back(std::move(a));
    }
  } else {
    std::size_t total = 1;
    for (const auto& vals : per_pair) {
      if (total > max_solutions / vals.size())
        throw DomainError(ErrorCode::TooManySolutions, "pinned table expands to more than " +
                                                           std::to_string(max_solutions) + " combinations");
      total *= vals.size();
    }
    std::vector<std::size_t> idx(per_pair.size(), 0);
    while (true) {
      Assignment a(per_pair.size());
      for (std::size_t k = 0; k < per_pair.size(); ++k) a[k] = per_pair[k][idx[k]];
      solutions.push_back(std::move(a));
      std::size_t k = 0;
      for (; k < per_pair.size(); ++k) {
        if (++idx[k] < per_pair[k].size()) break;
        idx[k] = 0;
      }
      if (k == per_pair.size()) break;
    }
  }
  if (solutions.empty()) throw DomainError(ErrorCode::Inconsistent, "pinned table has no solutions");
  return AdmissibleTable::from_solutions(layout, std::move(solutions));
}

inline json state_to_json(const SystemState& s, const TaskLattice& L) {
  json j;
  j["agents"] = json::array();
  for (const Agent& a : s.agents) {
    json aj{{"id", a.id}, {"kind", to_string(a.kind)}, {"intentions", detail::labels(a.intentions, L)}};
    aj["active"] = a.active ? json(L.label(*a.active)) : json(nullptr);
    auto p = a.process(L);
    aj["process"] = p ? json(L.label(*p)) : json(nullptr);
    j["agents"].push_back(std::move(aj));
  }
  const StateExpression e = s.expression(L);
  j["expression"] = format_expression(e, L);
  j["processes"] = detail::ids(e.processes);
  return j;
}

inline SystemState state_from_specs(const std::vector<AgentSpec>& agents, const TaskLattice& L) {
  SystemState s;
  for (const AgentSpec& spec : agents) {
    Agent a;
    a.id = spec.id;
    a.kind = spec.kind;
    if (spec.active) a.active = L.by_name(*spec.active);
    for (const std::string& i : spec.intentions) a.intentions.push_back(L.by_name(i));
    s.agents.push_back(std::move(a));
  }
  validate_state(s, L);
  return s;
}

inline json batch_to_json(const RankedBatch& b, const TaskLattice& L) {
  json j;
  j["batch"] = b.batch;
  j["newTask"] = b.new_task;
  j["recommended"] = b.recommended ? json(*b.recommended) : json(nullptr);
  j["variants"] = json::array();
  for (const RankedVariant& v : b.variants) {
    j["variants"].push_back({{"id", v.id},
                             {"expression", format_expression(v.expression, L)},
                             {"processes", detail::ids(v.expression.processes)},
                             {"value", detail::labels(v.value.values(), L)},
                             {"valueIds", detail::ids(v.value.values())},
                             {"determinate", v.value.determinate()},
                             {"guaranteed", L.label(v.guaranteed)},
                             {"guaranteedId", v.guaranteed.value},
                             {"status", to_string(v.status)},
                             {"flagged", v.flagged},
                             {"intentions", v.target.intention_count()},
                             {"explanation", v.explanation},
                             {"target", state_to_json(v.target, L)}});
  }
  return j;
}

inline json history_to_json(const std::vector<HistoryEntry>& h, const TaskLattice& L) {
  json j = json::array();
  for (const HistoryEntry& e : h) {
    j.push_back({{"step", e.step},
                 {"newTask", e.new_task},
                 {"variant", e.variant},
                 {"expression", e.expression},
                 {"value", detail::labels(e.value.values(), L)},
                 {"state", state_to_json(e.state, L)}});
  }
  return j;
}

inline json report_to_json(const std::vector<CheckResult>& checks) {
  json j = json::array();
  for (const CheckResult& c : checks) {
    j.push_back({{"name", c.name},
                 {"enforced", c.enforced},
                 {"checked", c.checked},
                 {"violations", c.violation_count},
                 {"examples", c.violations}});
  }
  return j;
}

inline std::shared_ptr<const TaskLattice> build_lattice(const Scenario& s) {
  return std::make_shared<const TaskLattice>(TaskLattice::build(s.tasks, s.names));
}

inline Pipeline build_pipeline(const Scenario& s, const PipelineOptions& options) {
  Pipeline p;
  p.lattice = build_lattice(s);
  if (s.phase) {
    p.phase = phase_from_json(*s.phase, p.lattice);
    p.phase_pinned = true;
  } else {
    p.phase = propose_bottom(p.lattice).front().structure;
  }
  AdmissibleTable table;
  if (s.table) {
    table = table_from_json(*s.table, ProductLayout(p.lattice), options.solve.max_solutions);
  } else {
    p.constraints = generate_constraints(*p.phase, options.constraints);
    table = solve(*p.constraints, options.solve);
  }
  p.engine = std::make_shared<const LinearEngine>(*p.phase, std::move(table));
  p.state = state_from_specs(s.agents, *p.lattice);
  p.candidates = s.candidates;
  return p;
}

}  // namespace linlat
