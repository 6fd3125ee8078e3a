#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "liftsim/capability/profile.hpp"
#include "liftsim/dynamics.hpp"
#include "liftsim/vision/affine_tracker.hpp"

namespace liftsim::io {

using json = nlohmann::json;

inline constexpr const char* kProfileUnits = "N,m,mps";

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(what + ": malformed JSON: " + e.what());
  }
}

namespace detail {

inline double number(const json& j, const char* key, const std::string& what) {
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(what + ": missing field '" + std::string(key) + "'");
  if (!it->is_number()) throw InputError(what + ": field '" + std::string(key) + "' must be a number");
  return it->get<double>();
}

inline int integer(const json& j, const char* key, const std::string& what) {
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(what + ": missing field '" + std::string(key) + "'");
  if (!it->is_number_integer()) throw InputError(what + ": field '" + std::string(key) + "' must be an integer");
  return it->get<int>();
}

// Reads a mass given either in kilograms or in pounds, never both.
inline std::optional<double> mass_field(const json& j, const std::string& stem, const std::string& what) {
  const bool kg = j.contains(stem + "_kg"), lb = j.contains(stem + "_lb");
  if (kg && lb) throw InputError(what + ": both '" + stem + "_kg' and '" + stem + "_lb' given (mixed units refused)");
  if (kg) return number(j, (stem + "_kg").c_str(), what);
  if (lb) return pounds_to_kg(number(j, (stem + "_lb").c_str(), what));
  return std::nullopt;
}

}  // namespace detail

inline json setup_to_json(const dynamics::ExerciseSetup& s) {
  return json{{"mass_kg", s.mass},
              {"countermass_kg", s.countermass},
              {"viscosity_nspm", s.viscosity},
              {"range_of_motion_m", s.range_of_motion},
              {"gravity_mps2", s.gravity}};
}

// Applies the fields present in `j` on top of `base`. Unknown fields are
// rejected; the result is validated.
inline dynamics::ExerciseSetup apply_setup_json(dynamics::ExerciseSetup base, const json& j,
                                                const std::string& what = "setup") {
  if (!j.is_object()) throw InputError(what + ": expected an object");
  static const std::vector<std::string> known{"mass_kg",        "mass_lb",           "countermass_kg",
                                              "countermass_lb", "viscosity_nspm",    "range_of_motion_m",
                                              "gravity_mps2"};
  for (const auto& [k, v] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw InputError(what + ": unknown field '" + k + "'");
    }
  }
  if (auto m = detail::mass_field(j, "mass", what)) base.mass = *m;
  if (auto m = detail::mass_field(j, "countermass", what)) base.countermass = *m;
  if (j.contains("viscosity_nspm")) base.viscosity = detail::number(j, "viscosity_nspm", what);
  if (j.contains("range_of_motion_m")) base.range_of_motion = detail::number(j, "range_of_motion_m", what);
  if (j.contains("gravity_mps2")) base.gravity = detail::number(j, "gravity_mps2", what);
  base.validate();
  return base;
}

struct ProfileDocument {
  capability::CapabilityProfile profile;
  capability::KnownMask mask;
  std::optional<dynamics::ExerciseSetup> setup;
};

inline json profile_to_json(const capability::CapabilityProfile& p, const capability::KnownMask& mask,
                            const std::optional<dynamics::ExerciseSetup>& setup = std::nullopt) {
  json j{{"nd", p.nd()},
         {"nv", p.nv()},
         {"delta_max_m", p.delta_max()},
         {"v_max_mps", p.v_max()},
         {"samples", p.samples()},
         {"known_mask", mask.known},
         {"units", kProfileUnits}};
  if (setup) j["setup"] = setup_to_json(*setup);
  return j;
}

inline ProfileDocument profile_from_json(const json& j, const std::string& what = "profile") {
  if (!j.is_object()) throw InputError(what + ": expected an object");
  const auto units = j.find("units");
  if (units == j.end() || !units->is_string()) throw InputError(what + ": missing 'units' declaration");
  if (units->get<std::string>() != kProfileUnits) {
    throw InputError(what + ": units '" + units->get<std::string>() + "' not supported, expected '" + kProfileUnits +
                     "'");
  }
  const int nd = detail::integer(j, "nd", what), nv = detail::integer(j, "nv", what);
  const double dmax = detail::number(j, "delta_max_m", what), vmax = detail::number(j, "v_max_mps", what);
  const auto s = j.find("samples");
  if (s == j.end() || !s->is_array()) throw InputError(what + ": 'samples' must be an array");
  std::vector<double> samples;
  for (const auto& v : *s) {
    if (!v.is_number()) throw InputError(what + ": samples must be numbers");
    samples.push_back(v.get<double>());
  }
  capability::CapabilityProfile p(nd, nv, dmax, vmax, std::move(samples));
  capability::KnownMask mask(nd, nv);
  if (const auto m = j.find("known_mask"); m != j.end()) {
    if (!m->is_array() || m->size() != mask.known.size()) {
      throw InputError(what + ": 'known_mask' must have nd*nv entries");
    }
    for (std::size_t k = 0; k < m->size(); ++k) {
      const auto& e = (*m)[k];
      if (!e.is_number_integer() || (e.get<int>() != 0 && e.get<int>() != 1)) {
        throw InputError(what + ": 'known_mask' entries must be 0 or 1");
      }
      mask.known[k] = static_cast<std::uint8_t>(e.get<int>());
    }
  }
  ProfileDocument doc{std::move(p), std::move(mask), std::nullopt};
  if (const auto st = j.find("setup"); st != j.end()) doc.setup = apply_setup_json({}, *st, what + " setup");
  return doc;
}

inline json tracks_to_json(const std::vector<vision::FeatureTrack>& tracks) {
  json arr = json::array();
  for (const auto& t : tracks) {
    json pos = json::array();
    for (const auto& p : t.positions) pos.push_back({p.x, p.y});
    arr.push_back({{"start_frame", t.start_frame}, {"window_size", t.window_size}, {"alive", t.alive},
                   {"positions", pos}});
  }
  return json{{"units", "px"}, {"tracks", arr}};
}

inline std::vector<vision::FeatureTrack> tracks_from_json(const json& j) {
  const std::string what = "tracks";
  if (!j.is_object() || j.value("units", "") != "px") throw InputError(what + ": expected units 'px'");
  std::vector<vision::FeatureTrack> out;
  for (const auto& t : j.at("tracks")) {
    vision::FeatureTrack f;
    f.start_frame = detail::integer(t, "start_frame", what);
    f.window_size = detail::integer(t, "window_size", what);
    f.alive = t.value("alive", true);
    for (const auto& p : t.at("positions")) {
      if (!p.is_array() || p.size() != 2) throw InputError(what + ": positions must be [x, y] pairs");
      f.positions.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace liftsim::io
