#pragma once

// HTTP front end for one scenario. handle() is transport-free so it can be
// tested directly; serve() binds it to cpp-httplib.

#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "httplib.h"
#include "linlat/planner.hpp"
#include "linlat/scenario.hpp"

namespace linlat {

struct Response {
  int status = 200;
  json body;
};

class Service {
 public:
  Service(Scenario scenario, Pipeline pipeline, CandidatePolicy policy = CandidatePolicy::Auto)
      : scenario_(std::move(scenario)),
        pipeline_(std::move(pipeline)),
        planner_(pipeline_.engine, pipeline_.state, pipeline_.candidates),
        policy_(policy),
        dot_(export_dot(*pipeline_.lattice)) {}

  Response handle(std::string_view method, std::string_view path, std::string_view body);

  /// Blocks until stop() is called from another thread.
  bool serve(const std::string& host, int port);
  void stop() { server_.stop(); }
  /// Binds (port 0 picks a free one) without serving; returns the port or -1.
  int bind(const std::string& host, int port) {
    install_routes();
    if (port == 0) return server_.bind_to_any_port(host);
    return server_.bind_to_port(host, port) ? port : -1;
  }
  bool listen_bound() { return server_.listen_after_bind(); }

 private:
  static Response error(int status, std::string_view code, const std::string& message) {
    return {status, {{"error", code}, {"message", message}}};
  }
  static int status_for(ErrorCode code) {
    switch (code) {
      case ErrorCode::UnknownVariant: return 404;
      case ErrorCode::StaleBatch: return 409;
      default: return 400;
    }
  }
  Response route(std::string_view method, std::string_view path, std::string_view body);
  void install_routes();

  Scenario scenario_;
  Pipeline pipeline_;
  Planner planner_;
  CandidatePolicy policy_;
  std::string dot_;
  std::shared_mutex mutex_;
  httplib::Server server_;
  bool routes_ = false;
};

// ---------------------------------------------------------------------------

inline Response Service::handle(std::string_view method, std::string_view path, std::string_view body) {
  try {
    return route(method, path, body);
  } catch (const DomainError& e) {
    return error(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const ParseError& e) {
    return error(400, "ParseError", e.what());
  } catch (const json::exception& e) {
    return error(400, "ParseError", e.what());
  }
}

inline Response Service::route(std::string_view method, std::string_view path, std::string_view body) {
  const TaskLattice& L = *pipeline_.lattice;
  auto parse_body = [&]() {
    json j = json::parse(body.empty() ? std::string_view("{}") : body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError("request body must be a JSON object");
    return j;
  };

  if (method == "GET") {
    std::shared_lock lock(mutex_);
    if (path == "/scenario") {
      return {200, {{"scenario", scenario_to_json(scenario_)},
                    {"state", state_to_json(planner_.state(), L)},
                    {"phasePinned", pipeline_.phase_pinned}}};
    }
    if (path == "/lattice") {
      json j = lattice_to_json(L);
      j["dot"] = dot_;
      return {200, std::move(j)};
    }
    if (path == "/phase") {
      json j = phase_to_json(*pipeline_.phase);
      json labels = json::object();
      for (ElementId x : L.ids()) labels[std::to_string(x.value)] = L.label(x);
      j["labels"] = std::move(labels);
      return {200, std::move(j)};
    }
    if (path == "/table") return {200, table_to_json(pipeline_.table())};
    if (path == "/history") {
      return {200, {{"history", history_to_json(planner_.history(), L)}, {"state", state_to_json(planner_.state(), L)}}};
    }
    constexpr std::string_view prefix = "/variants/";
    constexpr std::string_view suffix = "/explain";
    if (path.starts_with(prefix) && path.ends_with(suffix) && path.size() > prefix.size() + suffix.size()) {
      const std::string id(path.substr(prefix.size(), path.size() - prefix.size() - suffix.size()));
      const RankedVariant* v = planner_.batch() ? planner_.batch()->find(id) : nullptr;
      if (!v) return error(404, "UnknownVariant", "variant '" + id + "' is not in the current batch");
      return {200, {{"id", v->id},
                    {"explanation", v->explanation},
                    {"status", to_string(v->status)},
                    {"flagged", v->flagged},
                    {"guaranteed", L.label(v->guaranteed)}}};
    }
    return error(404, "NotFound", "no route for GET " + std::string(path));
  }

  if (method == "POST") {
    if (path == "/rank") {
      const json req = parse_body();
      std::unique_lock lock(mutex_);
      const std::string task = req.value("newTask", std::string());
      if (req.contains("candidates")) {
        std::vector<ExplicitVariant> vs;
        for (const json& v : req.at("candidates")) {
          vs.push_back({detail::field<std::string>(v, "id", "candidate"),
                        detail::field<std::string>(v, "expression", "candidate")});
        }
        return {200, batch_to_json(planner_.rank_candidates(task, vs), L)};
      }
      if (task.empty()) throw ParseError("rank request needs 'newTask' or 'candidates'");
      CandidatePolicy policy = policy_;
      if (req.contains("policy")) {
        const std::string p = req.at("policy").get<std::string>();
        if (p == "default")
          policy = CandidatePolicy::Default;
        else if (p == "explicit")
          policy = CandidatePolicy::Explicit;
        else if (p == "auto")
          policy = CandidatePolicy::Auto;
        else
          throw ParseError("policy must be auto, default or explicit");
      }
      return {200, batch_to_json(planner_.rank_new_task(task, policy), L)};
    }
    if (path == "/commit") {
      const json req = parse_body();
      const std::string id = detail::field<std::string>(req, "variantId", "commit");
      std::unique_lock lock(mutex_);
      planner_.commit(id);
      return {200, {{"state", state_to_json(planner_.state(), L)},
                    {"history", history_to_json(planner_.history(), L)}}};
    }
    return error(404, "NotFound", "no route for POST " + std::string(path));
  }
  return error(405, "MethodNotAllowed", std::string(method) + " is not supported");
}

inline void Service::install_routes() {
  if (routes_) return;
  routes_ = true;
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    Response r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(2), "application/json");
  };
  server_.Get(R"(/.*)", forward);
  server_.Post(R"(/.*)", forward);
  server_.Put(R"(/.*)", forward);
  server_.Delete(R"(/.*)", forward);
}

inline bool Service::serve(const std::string& host, int port) {
  install_routes();
  return server_.listen(host, port);
}

}  // namespace linlat
