#pragma once

#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <string>

#include "liftsim/io/json_io.hpp"
#include "liftsim/simulation.hpp"

namespace liftsim::service {

using io::json;

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxUndoDepth = 50;

struct SessionState {
  capability::CapabilityProfile profile;
  capability::KnownMask mask;
  dynamics::ExerciseSetup setup;
  double time_constant = 25.0;       // s
  double influence_breadth = 0.1;    // fraction of the plane extent
  double influence_magnitude = 100;  // N
  std::deque<capability::CapabilityProfile> history;
  long revision = 0;
};

struct SimulationSettings {
  int max_reps = 50;
  fatigue::IntegratorOptions integrator{};
  fatigue::PolicyOptions dp{};
};

// Linear capability template F0 (1 - v / v_max).
inline capability::CapabilityProfile linear_template(double f0, int nd, int nv, double delta_max, double v_max) {
  liftsim::detail::require(f0 > 0.0, "template: f0_n must be positive");
  return capability::CapabilityProfile::from_function(nd, nv, delta_max, v_max,
                                                      [&](double, double v) { return f0 * (1.0 - v / v_max); });
}

namespace detail {

inline json path_json(const capability::CapabilityPath& p) {
  json t = json::array(), d = json::array(), v = json::array(), f = json::array(), g = json::array();
  for (const auto& q : p) {
    t.push_back(q.t);
    d.push_back(q.delta);
    v.push_back(q.velocity);
    f.push_back(q.force);
    g.push_back(q.g);
  }
  return json{{"t_s", t}, {"delta_m", d}, {"v_mps", v}, {"F_N", f}, {"g", g}};
}

inline json set_json(const simulation::SetResult& r) {
  json reps = json::array();
  for (const auto& rep : r.reps) {
    reps.push_back({{"completed", rep.completed},
                    {"duration_s", rep.duration},
                    {"entry_log_fatigue", rep.entry_log_fatigue},
                    {"exit_log_fatigue", rep.exit_log_fatigue},
                    {"path", path_json(rep.path)}});
  }
  return json{{"reps_completed", r.completed()}, {"reps", reps}};
}

}  // namespace detail

// Both policies' sets at the current load, whether one fresh maximal
// repetition completes, and the 1RM bracket.
inline json simulate_state(const SessionState& s, const SimulationSettings& cfg) {
  json out;
  simulation::SetOptions opt;
  opt.max_reps = cfg.max_reps;
  opt.integrator = cfg.integrator;
  opt.dp = cfg.dp;
  opt.policy = simulation::Policy::max_exertion;
  out["max_exertion"] = detail::set_json(simulation::simulate_set(s.profile, s.setup, s.time_constant, opt));
  opt.policy = simulation::Policy::minimal_fatigue;
  out["minimal_fatigue"] = detail::set_json(simulation::simulate_set(s.profile, s.setup, s.time_constant, opt));
  out["static_force_N"] = s.setup.static_force();
  out["single_rep_feasible"] =
      simulation::single_rep_completes(s.profile, s.setup, s.time_constant, s.setup.mass, cfg.integrator);
  try {
    const auto est = simulation::estimate_1rm(s.profile, s.setup, s.time_constant, pounds_to_kg(0.5), cfg.integrator);
    out["one_rep_max"] = {{"load_kg", est.load}, {"failing_load_kg", est.failing_load}};
  } catch (const InfeasibleError&) {
    out["one_rep_max"] = nullptr;
  }
  out["revision"] = s.revision;
  return out;
}

inline json state_to_json(const std::string& id, const SessionState& s) {
  return json{{"id", id},
              {"profile", io::profile_to_json(s.profile, s.mask)},
              {"setup", io::setup_to_json(s.setup)},
              {"fatigue_time_constant_s", s.time_constant},
              {"influence_breadth", s.influence_breadth},
              {"influence_magnitude_N", s.influence_magnitude},
              {"undo_depth", s.history.size()},
              {"revision", s.revision}};
}

namespace detail {

inline void apply_parameters(SessionState& s, const json& j) {
  if (j.contains("fatigue_time_constant_s")) {
    const double tf = io::detail::number(j, "fatigue_time_constant_s", "session");
    liftsim::detail::require(tf > 0.0, "session: fatigue_time_constant_s must be positive");
    s.time_constant = tf;
  }
  if (j.contains("influence_breadth")) {
    const double b = io::detail::number(j, "influence_breadth", "session");
    liftsim::detail::require(b > 0.0 && b <= 1.0, "session: influence_breadth must be in (0, 1]");
    s.influence_breadth = b;
  }
  if (j.contains("influence_magnitude_N")) {
    const double m = io::detail::number(j, "influence_magnitude_N", "session");
    liftsim::detail::require(std::isfinite(m) && m >= 0.0, "session: influence_magnitude_N must be >= 0");
    s.influence_magnitude = m;
  }
}

}  // namespace detail

// Builds a session from a create request: a profile document (top-level
// "samples"), a state snapshot (top-level "profile"), or a template.
inline SessionState state_from_request(const json& body) {
  if (!body.is_object()) throw InputError("create: expected a JSON object");
  SessionState s;
  if (body.contains("template")) {
    const auto name = body.value("template", std::string());
    if (name != "linear") throw InputError("create: unknown template '" + name + "'");
    s.profile = linear_template(body.value("f0_N", 2000.0), body.value("nd", 64), body.value("nv", 64),
                                body.value("delta_max_m", 0.5), body.value("v_max_mps", 1.5));
    s.mask = capability::KnownMask(s.profile.nd(), s.profile.nv());
  } else {
    const json& pj = body.contains("profile") ? body.at("profile") : body;
    auto doc = io::profile_from_json(pj);
    s.profile = std::move(doc.profile);
    s.mask = std::move(doc.mask);
    if (doc.setup) s.setup = *doc.setup;
  }
  if (body.contains("setup")) s.setup = io::apply_setup_json(s.setup, body.at("setup"));
  detail::apply_parameters(s, body);
  if (body.contains("history") && body["history"].is_array()) {
    for (const auto& h : body["history"]) {
      s.history.emplace_back(s.profile.nd(), s.profile.nv(), s.profile.delta_max(), s.profile.v_max(),
                             h.get<std::vector<double>>());
    }
    while (s.history.size() > kMaxUndoDepth) s.history.pop_front();
  }
  if (body.contains("revision") && body["revision"].is_number_integer()) s.revision = body["revision"].get<long>();
  s.setup.validate();
  return s;
}

// Session registry with per-session serialization. Every mutation runs
// under the session's lock, recomputes the simulation from the state it
// produced and persists the state before the lock is released.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> dir = std::nullopt, SimulationSettings cfg = {})
      : dir_(std::move(dir)), cfg_(cfg) {
    if (dir_) {
      std::filesystem::create_directories(*dir_);
      for (const auto& e : std::filesystem::directory_iterator(*dir_)) {
        if (e.path().extension() != ".json") continue;
        std::ifstream f(e.path());
        std::stringstream ss;
        ss << f.rdbuf();
        auto body = io::parse_json(ss.str(), e.path().string());
        auto slot = std::make_shared<Slot>();
        slot->state = state_from_request(body);
        sessions_[e.path().stem().string()] = slot;
      }
    }
  }

  std::string create(const json& body) {
    auto slot = std::make_shared<Slot>();
    slot->state = state_from_request(body);
    const std::string id = new_id();
    std::lock_guard lock(slot->mutex);
    refresh(id, *slot);
    {
      std::unique_lock map_lock(map_mutex_);
      sessions_[id] = slot;
    }
    return id;
  }

  // Consistent snapshot: state, latest simulation and undo depth. Valid as
  // a create request.
  json get(const std::string& id) {
    auto slot = find(id);
    std::lock_guard lock(slot->mutex);
    if (slot->simulation.is_null()) slot->simulation = simulate_state(slot->state, cfg_);
    json j = state_to_json(id, slot->state);
    j["simulation"] = slot->simulation;
    return j;
  }

  json simulation(const std::string& id) {
    auto slot = find(id);
    std::lock_guard lock(slot->mutex);
    if (slot->simulation.is_null()) slot->simulation = simulate_state(slot->state, cfg_);
    return slot->simulation;
  }

  // Gaussian bump of sign * influence magnitude with widths breadth * extent.
  json bump(const std::string& id, double delta0, double v0, int sign) {
    if (sign != 1 && sign != -1) throw InputError("bump: sign must be +1 or -1");
    return mutate(id, [&](SessionState& s) {
      if (!(delta0 >= 0.0 && delta0 <= s.profile.delta_max() && v0 >= 0.0 && v0 <= s.profile.v_max())) {
        throw InputError("bump: centre outside the capability plane");
      }
      const double nu = sign * s.influence_magnitude;
      auto next = capability::apply_gaussian_bump(s.profile, delta0, v0, nu, s.influence_breadth * s.profile.delta_max(),
                                                  s.influence_breadth * s.profile.v_max());
      s.history.push_back(s.profile);
      if (s.history.size() > kMaxUndoDepth) s.history.pop_front();
      s.profile = std::move(next);
    });
  }

  json update_setup(const std::string& id, const json& patch) {
    if (!patch.is_object()) throw InputError("setup: expected a JSON object");
    return mutate(id, [&](SessionState& s) {
      json setup_part = json::object(), param_part = json::object();
      for (const auto& [k, v] : patch.items()) {
        if (k == "fatigue_time_constant_s" || k == "influence_breadth" || k == "influence_magnitude_N") {
          param_part[k] = v;
        } else {
          setup_part[k] = v;
        }
      }
      SessionState next = s;
      next.setup = io::apply_setup_json(s.setup, setup_part);
      detail::apply_parameters(next, param_part);
      s.setup = next.setup;
      s.time_constant = next.time_constant;
      s.influence_breadth = next.influence_breadth;
      s.influence_magnitude = next.influence_magnitude;
    });
  }

  json undo(const std::string& id) {
    return mutate(id, [&](SessionState& s) {
      if (s.history.empty()) throw InputError("undo: nothing to undo");
      s.profile = std::move(s.history.back());
      s.history.pop_back();
    });
  }

  std::size_t size() const {
    std::shared_lock lock(map_mutex_);
    return sessions_.size();
  }

 private:
  struct Slot {
    std::mutex mutex;
    SessionState state;
    json simulation;  // computed from `state`, or null
  };

  std::shared_ptr<Slot> find(const std::string& id) {
    std::shared_lock lock(map_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFoundError("session '" + id + "' not found");
    return it->second;
  }

  template <typename Fn>
  json mutate(const std::string& id, Fn&& fn) {
    auto slot = find(id);
    std::lock_guard lock(slot->mutex);
    SessionState next = slot->state;
    fn(next);
    next.revision += 1;
    json sim = simulate_state(next, cfg_);
    slot->state = std::move(next);
    slot->simulation = std::move(sim);
    persist(id, slot->state);
    return json{{"state", state_to_json(id, slot->state)}, {"simulation", slot->simulation}};
  }

  void refresh(const std::string& id, Slot& slot) {
    slot.simulation = simulate_state(slot.state, cfg_);
    persist(id, slot.state);
  }

  void persist(const std::string& id, const SessionState& s) {
    if (!dir_) return;
    json j = state_to_json(id, s);
    json history = json::array();
    for (const auto& p : s.history) history.push_back(p.samples());
    j["history"] = history;
    const auto final_path = *dir_ / (id + ".json");
    const auto tmp = *dir_ / (id + ".json.tmp");
    {
      std::ofstream f(tmp, std::ios::trunc);
      if (!f) throw std::runtime_error("cannot write session file " + tmp.string());
      f << j.dump();
    }
    std::filesystem::rename(tmp, final_path);
  }

  std::string new_id() {
    std::lock_guard lock(rng_mutex_);
    std::uniform_int_distribution<unsigned long long> d;
    std::ostringstream ss;
    ss << std::hex << d(rng_) << d(rng_);
    return ss.str();
  }

  std::optional<std::filesystem::path> dir_;
  SimulationSettings cfg_;
  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_{std::random_device{}()};
};

}  // namespace liftsim::service
