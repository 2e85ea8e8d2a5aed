#pragma once

// Agents, candidate reconfigurations for a new task, ranking by implication
// value, and the commit loop.

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linlat/engine.hpp"
#include "linlat/error.hpp"

namespace linlat {

enum class AgentKind { Manned, Unmanned };

constexpr std::string_view to_string(AgentKind k) { return k == AgentKind::Manned ? "manned" : "unmanned"; }

struct Agent {
  std::string id;
  AgentKind kind = AgentKind::Unmanned;
  std::optional<ElementId> active;
  std::vector<ElementId> intentions;

  /// Join of the active task and the intentions; none for an idle agent.
  std::optional<ElementId> process(const TaskLattice& L) const {
    if (!active && intentions.empty()) return std::nullopt;
    ElementId p = active.value_or(L.bottom());
    for (ElementId i : intentions) p = L.join(p, i);
    return p;
  }
  bool operator==(const Agent&) const = default;
};

struct SystemState {
  std::vector<Agent> agents;

  StateExpression expression(const TaskLattice& L) const {
    std::vector<ElementId> ps;
    for (const Agent& a : agents) {
      if (auto p = a.process(L)) ps.push_back(*p);
    }
    return StateExpression(std::move(ps));
  }
  std::size_t intention_count() const {
    std::size_t n = 0;
    for (const Agent& a : agents) n += a.intentions.size();
    return n;
  }
  const Agent* find(std::string_view id) const {
    for (const Agent& a : agents) {
      if (a.id == id) return &a;
    }
    return nullptr;
  }
  bool operator==(const SystemState&) const = default;
};

void validate_state(const SystemState& s, const TaskLattice& L);

struct Candidate {
  std::string id;
  SystemState target;
};

struct ExplicitVariant {
  std::string id;
  std::string expression;
};

struct CandidateList {
  std::string new_task;
  std::vector<ExplicitVariant> variants;
};

enum class CandidatePolicy { Auto, Default, Explicit };

/// Throws NewTaskUnknown unless `task` is a generator that no agent is
/// currently fulfilling.
ElementId resolve_new_task(const SystemState& state, std::string_view task, const TaskLattice& L);

/// Redistributes the current tasks plus the new one over the agents. The
/// new task must be placed, other tasks may be dropped, a busy agent keeps a
/// non-empty process and an idle agent can only take the new task. A pending
/// intention never becomes active.
std::vector<Candidate> generate_candidates(const SystemState& state, ElementId new_task, const TaskLattice& L);

/// Terms map to agents in order: agents with a process first, then idle
/// ones. The first atom of a term is the active task.
std::vector<Candidate> explicit_candidates(const SystemState& state, const std::vector<ExplicitVariant>& variants,
                                           const TaskLattice& L);

enum class VariantStatus { Maximal, Dominated };

constexpr std::string_view to_string(VariantStatus s) { return s == VariantStatus::Maximal ? "maximal" : "dominated"; }

struct RankedVariant {
  std::string id;
  SystemState target;
  StateExpression expression;
  ValueSet value;
  ElementId guaranteed;
  VariantStatus status = VariantStatus::Dominated;
  bool flagged = false;  // maximal but incomparable to another maximal variant
  std::string explanation;
};

struct RankedBatch {
  std::uint64_t batch = 0;
  std::string new_task;
  std::vector<RankedVariant> variants;
  std::optional<std::string> recommended;

  const RankedVariant* find(std::string_view id) const {
    for (const RankedVariant& v : variants) {
      if (v.id == id) return &v;
    }
    return nullptr;
  }
};

RankedBatch rank(const SystemState& state, const std::vector<Candidate>& candidates, const LinearEngine& engine);

/// 2v < 10v < c1: numeric parts compare as numbers.
bool natural_less(std::string_view a, std::string_view b);

struct HistoryEntry {
  std::size_t step = 0;
  std::string new_task;
  std::string variant;
  std::string expression;
  ValueSet value;
  SystemState state;
};

/// One operator session: the live state, the last ranked batch and the
/// commit history. Not synchronized; callers serialize commits.
class Planner {
 public:
  Planner(std::shared_ptr<const LinearEngine> engine, SystemState initial,
          std::optional<CandidateList> explicit_list = std::nullopt)
      : engine_(std::move(engine)), state_(std::move(initial)), explicit_(std::move(explicit_list)) {
    validate_state(state_, engine_->lattice());
  }

  const LinearEngine& engine() const { return *engine_; }
  const SystemState& state() const { return state_; }
  const std::optional<RankedBatch>& batch() const { return batch_; }
  const std::vector<HistoryEntry>& history() const { return history_; }
  const std::optional<CandidateList>& explicit_list() const { return explicit_; }

  std::vector<Candidate> candidates(std::string_view new_task, CandidatePolicy policy) const;
  const RankedBatch& rank_new_task(std::string_view new_task, CandidatePolicy policy = CandidatePolicy::Auto);
  const RankedBatch& rank_candidates(std::string_view new_task, const std::vector<ExplicitVariant>& variants);

  /// Throws StaleBatch without a pending batch and UnknownVariant for an id
  /// outside it.
  const SystemState& commit(std::string_view variant_id);

 private:
  const RankedBatch& store(std::string new_task, RankedBatch batch);

  std::shared_ptr<const LinearEngine> engine_;
  SystemState state_;
  std::optional<CandidateList> explicit_;
  std::optional<RankedBatch> batch_;
  std::uint64_t next_batch_ = 1;
  std::vector<HistoryEntry> history_;
};

// ---------------------------------------------------------------------------

inline void validate_state(const SystemState& s, const TaskLattice& L) {
  std::vector<std::string> ids;
  for (const Agent& a : s.agents) {
    if (a.id.empty()) throw DomainError(ErrorCode::InvalidScenario, "agent with empty id");
    if (std::find(ids.begin(), ids.end(), a.id) != ids.end())
      throw DomainError(ErrorCode::InvalidScenario, "agent id '" + a.id + "' is used twice");
    ids.push_back(a.id);
    if (a.active) L.check(*a.active);
    for (ElementId i : a.intentions) {
      L.check(i);
      if (a.active && *a.active == i)
        throw DomainError(ErrorCode::InvalidScenario,
                          "agent '" + a.id + "' lists its active task " + L.label(i) + " as an intention");
    }
  }
}

inline ElementId resolve_new_task(const SystemState& state, std::string_view task, const TaskLattice& L) {
  auto id = L.find(task);
  if (!id || std::find(L.generators().begin(), L.generators().end(), *id) == L.generators().end())
    throw DomainError(ErrorCode::NewTaskUnknown, "'" + std::string(task) + "' is not a task of the scenario");
  for (const Agent& a : state.agents) {
    if (a.active == *id)
      throw DomainError(ErrorCode::NewTaskUnknown,
                        "task " + std::string(task) + " is already active on agent '" + a.id + "'");
  }
  return *id;
}

inline std::vector<Candidate> generate_candidates(const SystemState& state, ElementId new_task, const TaskLattice& L) {
  struct Item {
    ElementId task;
    int owner;  // agent index, -1 for the new task
    bool was_active;
  };
  std::vector<int> busy, idle;
  std::vector<Item> pool;
  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    const Agent& a = state.agents[i];
    if (!a.process(L)) {
      idle.push_back(static_cast<int>(i));
      continue;
    }
    busy.push_back(static_cast<int>(i));
    if (a.active) pool.push_back({*a.active, static_cast<int>(i), true});
    for (ElementId t : a.intentions) {
      if (t != new_task) pool.push_back({t, static_cast<int>(i), false});
    }
  }
  pool.push_back({new_task, -1, false});
  if (state.agents.empty()) throw DomainError(ErrorCode::InvalidScenario, "no agent can take the new task");
  if (pool.size() > 10 || state.agents.size() > 8)
    throw DomainError(ErrorCode::SearchTooLarge, "default candidate policy handles at most 10 tasks and 8 agents");

  // Choice per item: index into `places`, where the last entry means dropped.
  std::vector<int> places = busy;
  places.push_back(-1);
  std::vector<std::size_t> choice(pool.size(), 0);
  auto options_for = [&](std::size_t k) {
    if (pool[k].owner >= 0) return places.size();
    return busy.size() + idle.size();  // the new task is never dropped
  };
  auto place_of = [&](std::size_t k) {
    const std::size_t c = choice[k];
    if (pool[k].owner < 0) return c < busy.size() ? busy[c] : idle[c - busy.size()];
    return places[c];
  };
  // Start each item on its own agent.
  for (std::size_t k = 0; k + 1 < pool.size(); ++k) {
    choice[k] = static_cast<std::size_t>(std::find(busy.begin(), busy.end(), pool[k].owner) - busy.begin());
  }
  std::vector<std::size_t> start = choice;

  std::vector<Candidate> out;
  std::vector<StateExpression> seen;
  while (true) {
    std::vector<std::vector<std::size_t>> held(state.agents.size());
    for (std::size_t k = 0; k < pool.size(); ++k) {
      const int p = place_of(k);
      if (p >= 0) held[static_cast<std::size_t>(p)].push_back(k);
    }
    bool ok = std::all_of(busy.begin(), busy.end(), [&](int b) { return !held[static_cast<std::size_t>(b)].empty(); });
    SystemState target = state;
    for (std::size_t i = 0; ok && i < state.agents.size(); ++i) {
      Agent& agent = target.agents[i];
      agent.active.reset();
      agent.intentions.clear();
      const auto& mine = held[i];
      if (mine.empty()) continue;
      // Active: own active task, else the new task, else a transferred active one.
      std::optional<std::size_t> act;
      for (std::size_t k : mine) {
        if (pool[k].was_active && pool[k].owner == static_cast<int>(i)) act = k;
      }
      if (!act) {
        for (std::size_t k : mine) {
          if (pool[k].owner < 0) act = k;
        }
      }
      if (!act) {
        for (std::size_t k : mine) {
          if (pool[k].was_active && !act) act = k;
        }
      }
      if (!act) {
        ok = false;
        break;
      }
      agent.active = pool[*act].task;
      for (std::size_t k : mine) {
        if (k != *act) agent.intentions.push_back(pool[k].task);
      }
    }
    if (ok) {
      StateExpression e = target.expression(L);
      if (std::find(seen.begin(), seen.end(), e) == seen.end()) {
        seen.push_back(e);
        out.push_back({"c" + std::to_string(out.size() + 1), std::move(target)});
      }
    }
    // Odometer step, starting from the "keep everything in place" choice.
    std::size_t k = 0;
    for (; k < pool.size(); ++k) {
      choice[k] = (choice[k] + 1) % options_for(k);
      if (choice[k] != start[k]) break;
    }
    if (k == pool.size()) break;
  }
  return out;
}

inline std::vector<Candidate> explicit_candidates(const SystemState& state, const std::vector<ExplicitVariant>& variants,
                                                  const TaskLattice& L) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    if (state.agents[i].process(L)) order.push_back(i);
  }
  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    if (!state.agents[i].process(L)) order.push_back(i);
  }
  std::vector<Candidate> out;
  for (const ExplicitVariant& v : variants) {
    if (v.id.empty()) throw DomainError(ErrorCode::InvalidScenario, "candidate with empty id");
    for (const Candidate& c : out) {
      if (c.id == v.id) throw DomainError(ErrorCode::InvalidScenario, "candidate id '" + v.id + "' is used twice");
    }
    const ParsedExpression parsed = parse_expression(v.expression, L);
    if (parsed.terms.size() > order.size())
      throw DomainError(ErrorCode::InvalidScenario, "candidate " + v.id + " has " + std::to_string(parsed.terms.size()) +
                                                        " processes but there are " +
                                                        std::to_string(order.size()) + " agents");
    SystemState target = state;
    for (Agent& a : target.agents) {
      a.active.reset();
      a.intentions.clear();
    }
    for (std::size_t t = 0; t < parsed.terms.size(); ++t) {
      Agent& a = target.agents[order[t]];
      a.active = parsed.terms[t].front();
      for (std::size_t k = 1; k < parsed.terms[t].size(); ++k) {
        if (parsed.terms[t][k] != *a.active) a.intentions.push_back(parsed.terms[t][k]);
      }
    }
    out.push_back({v.id, std::move(target)});
  }
  return out;
}

inline bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i]));
    const bool db = std::isdigit(static_cast<unsigned char>(b[j]));
    if (da && db) {
      std::size_t ei = i, ej = j;
      while (ei < a.size() && std::isdigit(static_cast<unsigned char>(a[ei]))) ++ei;
      while (ej < b.size() && std::isdigit(static_cast<unsigned char>(b[ej]))) ++ej;
      std::string_view na = a.substr(i, ei - i), nb = b.substr(j, ej - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ei;
      j = ej;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
  return a < b;
}

namespace detail {

inline std::string value_text(const ValueSet& v, const TaskLattice& L) {
  std::vector<std::string> parts;
  for (ElementId x : v.values()) parts.push_back(L.label(x));
  if (parts.size() == 1) return parts.front();
  return "{" + join_strings(parts, ", ") + "}";
}

inline std::vector<ElementId> tasks_of(const Agent& a) {
  std::vector<ElementId> out = a.intentions;
  if (a.active) out.insert(out.begin(), *a.active);
  return out;
}

inline std::string explain(const RankedVariant& v, const SystemState& source, const std::vector<RankedVariant>& batch,
                           const LinearEngine& engine) {
  const TaskLattice& L = engine.lattice();
  std::vector<std::string> notes;
  std::string head = "variant " + v.id + ": " + format_expression(v.expression, L) + ", value " +
                     detail::value_text(v.value, L);
  if (!v.value.determinate()) head += " (guaranteed " + L.label(v.guaranteed) + ")";
  notes.push_back(head);

  bool displaced = false;
  for (const Agent& before : source.agents) {
    auto proc = before.process(L);
    if (!proc) continue;
    const Agent* after = v.target.find(before.id);
    const std::vector<ElementId> old_tasks = tasks_of(before);
    const std::vector<ElementId> new_tasks = after ? tasks_of(*after) : std::vector<ElementId>{};
    std::vector<std::string> dropped;
    for (ElementId t : old_tasks) {
      if (std::find(new_tasks.begin(), new_tasks.end(), t) == new_tasks.end()) dropped.push_back(L.label(t));
    }
    if (dropped.size() == old_tasks.size()) {
      displaced = true;
      if (after && after->process(L))
        notes.push_back("the resource of process " + L.label(*proc) + " (agent " + before.id +
                        ") is completely taken by " + L.label(*after->process(L)));
      else
        notes.push_back("process " + L.label(*proc) + " (agent " + before.id + ") is released");
    } else if (!dropped.empty()) {
      displaced = true;
      notes.push_back("agent " + before.id + " gives up " + join_strings(dropped, ", "));
    }
  }
  if (!displaced) notes.push_back("no resource displaced");

  const ElementId unit = engine.phase().unit();
  std::vector<ElementId> rest = v.expression.processes;
  rest.erase(std::remove(rest.begin(), rest.end(), unit), rest.end());
  if (!rest.empty() && rest.size() < v.expression.processes.size())
    notes.push_back("process " + L.label(unit) + " is the unit I, so the target is formally equivalent to " +
                    format_expression(StateExpression(rest), L));

  const std::size_t mine = v.target.intention_count();
  std::vector<std::string> fewer;
  std::size_t fewest = mine;
  for (const RankedVariant& o : batch) {
    if (o.id == v.id || o.guaranteed != v.guaranteed) continue;
    const std::size_t theirs = o.target.intention_count();
    if (theirs < mine) {
      fewer.push_back(o.id);
      fewest = std::min(fewest, theirs);
    }
  }
  std::string keeps = "keeps " + std::to_string(mine) + (mine == 1 ? " intention" : " intentions");
  if (!fewer.empty()) keeps += ", more than " + join_strings(fewer, ", ") + " with the same value, so it is preferable";
  notes.push_back(keeps);
  return join_strings(notes, "; ");
}

}  // namespace detail

inline RankedBatch rank(const SystemState& state, const std::vector<Candidate>& candidates, const LinearEngine& engine) {
  if (candidates.empty()) throw DomainError(ErrorCode::InvalidScenario, "no candidates to rank");
  const TaskLattice& L = engine.lattice();
  const StateExpression src = state.expression(L);

  RankedBatch out;
  for (const Candidate& c : candidates) {
    RankedVariant v;
    v.id = c.id;
    v.target = c.target;
    v.expression = c.target.expression(L);
    v.value = engine.linear_implies(src, v.expression);
    v.guaranteed = L.meet_all(v.value.values());
    out.variants.push_back(std::move(v));
  }
  for (RankedVariant& v : out.variants) {
    const bool dominated = std::any_of(out.variants.begin(), out.variants.end(), [&](const RankedVariant& o) {
      return o.guaranteed != v.guaranteed && L.leq(v.guaranteed, o.guaranteed);
    });
    v.status = dominated ? VariantStatus::Dominated : VariantStatus::Maximal;
  }
  for (RankedVariant& v : out.variants) {
    if (v.status != VariantStatus::Maximal) continue;
    v.flagged = std::any_of(out.variants.begin(), out.variants.end(), [&](const RankedVariant& o) {
      return o.status == VariantStatus::Maximal && !L.leq(o.guaranteed, v.guaranteed) &&
             !L.leq(v.guaranteed, o.guaranteed);
    });
  }
  for (RankedVariant& v : out.variants) v.explanation = detail::explain(v, state, out.variants, engine);
  std::stable_sort(out.variants.begin(), out.variants.end(), [](const RankedVariant& a, const RankedVariant& b) {
    if (a.status != b.status) return a.status == VariantStatus::Maximal;
    return natural_less(a.id, b.id);
  });
  // Scripted fallback: most intentions, then lowest id.
  const RankedVariant* best = nullptr;
  for (const RankedVariant& v : out.variants) {
    if (v.status != VariantStatus::Maximal) continue;
    if (!best || v.target.intention_count() > best->target.intention_count()) best = &v;
  }
  if (best) out.recommended = best->id;
  return out;
}

inline std::vector<Candidate> Planner::candidates(std::string_view new_task, CandidatePolicy policy) const {
  const TaskLattice& L = engine_->lattice();
  const ElementId task = resolve_new_task(state_, new_task, L);
  const bool have_explicit = explicit_ && explicit_->new_task == new_task && history_.empty();
  if (policy == CandidatePolicy::Explicit && !have_explicit)
    throw DomainError(ErrorCode::InvalidScenario,
                      "no explicit candidate list for new task " + std::string(new_task) + " in the current state");
  if (policy != CandidatePolicy::Default && have_explicit) return explicit_candidates(state_, explicit_->variants, L);
  return generate_candidates(state_, task, L);
}

inline const RankedBatch& Planner::rank_new_task(std::string_view new_task, CandidatePolicy policy) {
  return store(std::string(new_task), rank(state_, candidates(new_task, policy), *engine_));
}

inline const RankedBatch& Planner::rank_candidates(std::string_view new_task, const std::vector<ExplicitVariant>& variants) {
  if (!new_task.empty()) resolve_new_task(state_, new_task, engine_->lattice());
  return store(std::string(new_task),
               rank(state_, explicit_candidates(state_, variants, engine_->lattice()), *engine_));
}

inline const RankedBatch& Planner::store(std::string new_task, RankedBatch batch) {
  batch.batch = next_batch_++;
  batch.new_task = std::move(new_task);
  batch_ = std::move(batch);
  return *batch_;
}

inline const SystemState& Planner::commit(std::string_view variant_id) {
  if (!batch_) throw DomainError(ErrorCode::StaleBatch, "no ranked batch is pending; rank first");
  const RankedVariant* v = batch_->find(variant_id);
  if (!v)
    throw DomainError(ErrorCode::UnknownVariant, "variant '" + std::string(variant_id) + "' is not in batch " +
                                                     std::to_string(batch_->batch));
  state_ = v->target;
  HistoryEntry h;
  h.step = history_.size() + 1;
  h.new_task = batch_->new_task;
  h.variant = v->id;
  h.expression = format_expression(v->expression, engine_->lattice());
  h.value = v->value;
  h.state = state_;
  history_.push_back(std::move(h));
  batch_.reset();
  return state_;
}

}  // namespace linlat
