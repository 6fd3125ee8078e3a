// liftsim: track -> elevation -> reconstruct -> simulate, and the session service.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liftsim/io/csv.hpp"
#include "liftsim/io/json_io.hpp"
#include "liftsim/pipeline.hpp"
#include "liftsim/service/http.hpp"
#include "liftsim/service/session.hpp"
#include "liftsim/simulation.hpp"
#include "liftsim/vision/frame_io.hpp"

namespace fs = std::filesystem;
using namespace liftsim;
using io::json;

namespace {

struct SetupFlags {
  std::optional<double> mass, countermass, viscosity, rom;

  void add(CLI::App* app) {
    app->add_option("--mass", mass, "Load mass, kg");
    app->add_option("--countermass", countermass, "Counterweight mass, kg");
    app->add_option("--viscosity", viscosity, "Damping coefficient, N s/m");
    app->add_option("--rom", rom, "Range of motion, m");
  }

  dynamics::ExerciseSetup apply(dynamics::ExerciseSetup s) const {
    if (mass) s.mass = *mass;
    if (countermass) s.countermass = *countermass;
    if (viscosity) s.viscosity = *viscosity;
    if (rom) s.range_of_motion = *rom;
    s.validate();
    return s;
  }
};

std::vector<vision::Point2> parse_roi(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) v.push_back(io::parse_double(cell, "--roi"));
  if (v.size() < 6 || v.size() % 2 != 0) {
    throw InputError("--roi needs x1,y1,x2,y2,x3,y3,... with at least 3 vertices");
  }
  std::vector<vision::Point2> poly;
  for (std::size_t k = 0; k < v.size(); k += 2) poly.push_back({v[k], v[k + 1]});
  return poly;
}

std::string read_text(const std::string& path) {
  auto in = io::open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  auto out = io::open_out(path);
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// track --------------------------------------------------------------------

struct TrackArgs {
  std::string frames, roi, out, tracks_out;
};

int run_track(const TrackArgs& a) {
  const auto roi = parse_roi(a.roi);
  std::vector<vision::GrayFrame> frames;
  for (const auto& p : vision::list_frames(a.frames)) frames.push_back(vision::read_frame(p));
  const auto r = pipeline::track_frames(frames, roi);
  std::ostringstream csv;
  io::write_displacement_csv(csv, r.displacement);
  write_text(a.out, csv.str());
  const std::string tracks_path = a.tracks_out.empty() ? (a.out.empty() || a.out == "-" ? "" : a.out + ".tracks.json")
                                                       : a.tracks_out;
  if (!tracks_path.empty()) write_text(tracks_path, io::tracks_to_json(r.tracks).dump() + "\n");
  std::cerr << "tracked " << r.tracks.size() << " features over " << frames.size() << " frames\n";
  return 0;
}

// elevation ------------------------------------------------------------------

struct ElevationArgs {
  std::string displacement, out, segments_out;
  double dt = 0.04, calibration = 0.0, omega = 0.99;
};

int run_elevation(const ElevationArgs& a) {
  detail::require(a.calibration > 0.0, "--calibration (metres per pixel) is required and must be positive");
  auto in = io::open_in(a.displacement);
  const auto d = io::read_displacement_csv(in);
  std::vector<double> dy;
  for (const auto& s : d) dy.push_back(s.dy);
  const auto series = kinematics::elevation_from_pixels(dy, a.dt, kinematics::Calibration{a.calibration});
  const auto k = kinematics::spline_kinematics(series, a.omega);
  std::ostringstream csv;
  io::write_elevation_csv(csv, series, &k);
  write_text(a.out, csv.str());
  if (!a.segments_out.empty()) {
    std::ostringstream seg;
    io::write_segments_csv(seg, kinematics::segment_concentric(series));
    write_text(a.segments_out, seg.str());
  }
  return 0;
}

// reconstruct ------------------------------------------------------------------

struct ReconstructArgs {
  std::string manifest, displacement, out, paths_dir;
  std::vector<int> failed_reps;
  double dt = 0.04, calibration = 0.0, omega = 0.99, tf = 25.0;
  int nd = 64, nv = 64;
  std::optional<double> v_max;
  SetupFlags setup;
};

int run_reconstruct(const ReconstructArgs& a) {
  pipeline::ReconstructSet defaults;
  defaults.dt = a.dt;
  defaults.metres_per_pixel = a.calibration;
  defaults.setup = a.setup.apply({});
  std::vector<pipeline::ReconstructSet> sets;
  if (!a.manifest.empty()) {
    if (!a.displacement.empty()) throw InputError("give either --manifest or --displacement, not both");
    sets = pipeline::read_manifest(a.manifest, defaults);
  } else {
    if (a.displacement.empty()) throw InputError("reconstruct needs --manifest or --displacement");
    auto in = io::open_in(a.displacement);
    defaults.displacement = io::read_displacement_csv(in);
    defaults.failed_reps = a.failed_reps;
    sets.push_back(defaults);
  }
  pipeline::ReconstructOptions opt;
  opt.omega = a.omega;
  opt.time_constant = a.tf;
  opt.nd = a.nd;
  opt.nv = a.nv;
  opt.v_max = a.v_max;
  const auto r = pipeline::reconstruct(sets, opt);
  json doc = io::profile_to_json(r.profile, r.mask, sets.front().setup);
  doc["fatigue_time_constant_s"] = a.tf;
  doc["set_scale_factors"] = r.scale_factors;
  write_text(a.out, dump(doc));
  if (!a.paths_dir.empty()) {
    fs::create_directories(a.paths_dir);
    for (std::size_t k = 0; k < r.failure_paths.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "failure_%03zu.csv", k);
      auto f = io::open_out((fs::path(a.paths_dir) / name).string());
      io::write_path_csv(f, r.failure_paths[k]);
    }
  }
  return 0;
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  std::string profile, mode = "set", policy = "max", out, paths_dir;
  std::optional<double> tf;
  double load = 0.0;
  int reps = 0, max_reps = 50;
  SetupFlags setup;
};

int run_simulate(const SimulateArgs& a) {
  json report;
  if (a.mode == "brzycki") {
    detail::require(a.load > 0.0 && a.reps >= 1, "brzycki mode needs --load and --reps");
    report["brzycki_estimate"] = simulation::brzycki_1rm(a.load, a.reps);
    write_text(a.out, dump(report));
    return 0;
  }
  if (a.profile.empty()) throw InputError("simulate needs --profile");
  const auto j = io::parse_json(read_text(a.profile), a.profile);
  const auto doc = io::profile_from_json(j, a.profile);
  const auto setup = a.setup.apply(doc.setup.value_or(dynamics::ExerciseSetup{}));
  double tf = 25.0;
  if (j.contains("fatigue_time_constant_s")) tf = io::detail::number(j, "fatigue_time_constant_s", a.profile);
  if (a.tf) tf = *a.tf;
  detail::require(tf > 0.0, "--tf must be positive");

  if (a.mode == "1rm") {
    const auto est = simulation::estimate_1rm(doc.profile, setup, tf);
    report["w1_estimate"] = {{"load_kg", est.load},
                             {"load_lb", kg_to_pounds(est.load)},
                             {"failing_load_kg", est.failing_load},
                             {"evaluations", est.evaluations}};
  } else if (a.mode == "set") {
    simulation::SetOptions opt;
    opt.max_reps = a.max_reps;
    if (a.policy == "max") {
      opt.policy = simulation::Policy::max_exertion;
    } else if (a.policy == "minimal") {
      opt.policy = simulation::Policy::minimal_fatigue;
    } else {
      throw InputError("--policy must be 'max' or 'minimal'");
    }
    const auto r = simulation::simulate_set(doc.profile, setup, tf, opt);
    json durations = json::array(), refs = json::array();
    for (std::size_t k = 0; k < r.reps.size(); ++k) {
      if (r.reps[k].completed) durations.push_back(r.reps[k].duration);
      if (!a.paths_dir.empty()) {
        fs::create_directories(a.paths_dir);
        char name[32];
        std::snprintf(name, sizeof name, "rep_%03zu.csv", k);
        const auto p = (fs::path(a.paths_dir) / name).string();
        auto f = io::open_out(p);
        io::write_path_csv(f, r.reps[k].path);
        refs.push_back(p);
      }
    }
    report["reps"] = r.completed();
    report["durations_s"] = durations;
    report["paths_csv_refs"] = refs;
    report["load_kg"] = setup.mass;
    report["brzycki_estimate"] =
        r.completed() >= 1 && r.completed() <= 36 ? json(simulation::brzycki_1rm(setup.mass, r.completed())) : json();
  } else {
    throw InputError("--mode must be set, 1rm or brzycki");
  }
  write_text(a.out, dump(report));
  return 0;
}

// serve ------------------------------------------------------------------

struct ServeArgs {
  std::string store, static_dir, bind;
};

int run_serve(const ServeArgs& a) {
  const auto addr = a.bind.empty() ? service::bind_from_env() : service::parse_bind(a.bind);
  std::optional<fs::path> dir;
  if (!a.store.empty()) dir = a.store;
  service::SessionStore store(dir);
  httplib::Server srv;
  service::install_routes(srv, store);
  if (!a.static_dir.empty() && !srv.set_mount_point("/", a.static_dir)) {
    throw InputError("--static directory not found: " + a.static_dir);
  }
  std::cerr << "listening on " << addr.host << ":" << addr.port << "\n";
  if (!srv.listen(addr.host, addr.port)) throw InputError("cannot bind " + addr.host + ":" + std::to_string(addr.port));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resistance-training capability modelling"};
  app.set_config("--config", "", "TOML/INI configuration file; flags override it");
  app.require_subcommand(1);

  TrackArgs ta;
  auto* track = app.add_subcommand("track", "Track frames inside a region, write the fused displacement CSV");
  track->add_option("--frames", ta.frames, "Directory of frame_NNNNNN.pgm|png")->required();
  track->add_option("--roi", ta.roi, "Region polygon x1,y1,x2,y2,...")->required();
  track->add_option("--out", ta.out, "Displacement CSV (default stdout)");
  track->add_option("--tracks-out", ta.tracks_out, "Tracks JSON (default <out>.tracks.json)");

  ElevationArgs ea;
  auto* elev = app.add_subcommand("elevation", "Displacement CSV to smoothed elevation, velocity, acceleration");
  elev->add_option("--displacement", ea.displacement, "Displacement CSV")->required();
  elev->add_option("--dt", ea.dt, "Frame period, s");
  elev->add_option("--calibration", ea.calibration, "Metres per pixel")->required();
  elev->add_option("--omega", ea.omega, "Smoothing weight in (0, 1)");
  elev->add_option("--out", ea.out, "Elevation CSV (default stdout)");
  elev->add_option("--segments-out", ea.segments_out, "Concentric segments CSV");

  ReconstructArgs ra;
  auto* rec = app.add_subcommand("reconstruct", "Reconstruct a capability profile from failed repetitions");
  rec->add_option("--manifest", ra.manifest, "Sets manifest JSON");
  rec->add_option("--displacement", ra.displacement, "Single-set displacement CSV");
  rec->add_option("--failed-reps", ra.failed_reps, "Failed segment indices for --displacement")->delimiter(',');
  rec->add_option("--dt", ra.dt, "Frame period, s");
  rec->add_option("--calibration", ra.calibration, "Metres per pixel");
  rec->add_option("--omega", ra.omega, "Smoothing weight in (0, 1)");
  rec->add_option("--tf", ra.tf, "Fatigue time constant, s");
  rec->add_option("--nd", ra.nd, "Grid nodes along elevation");
  rec->add_option("--nv", ra.nv, "Grid nodes along velocity");
  rec->add_option("--vmax", ra.v_max, "Velocity extent of the grid, m/s");
  rec->add_option("--out", ra.out, "Profile JSON (default stdout)");
  rec->add_option("--paths-dir", ra.paths_dir, "Write the failure-rep paths here");
  ra.setup.add(rec);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate a set, estimate the 1RM or apply the Brzycki formula");
  sim->add_option("--profile", sa.profile, "Profile JSON");
  sim->add_option("--mode", sa.mode, "set | 1rm | brzycki");
  sim->add_option("--policy", sa.policy, "max | minimal");
  sim->add_option("--tf", sa.tf, "Fatigue time constant, s");
  sim->add_option("--load", sa.load, "Brzycki: load lifted (any unit)");
  sim->add_option("--reps", sa.reps, "Brzycki: repetitions completed");
  sim->add_option("--max-reps", sa.max_reps, "Cap on simulated repetitions");
  sim->add_option("--out", sa.out, "Report JSON (default stdout)");
  sim->add_option("--paths-dir", sa.paths_dir, "Write each repetition's path CSV here");
  sa.setup.add(sim);

  ServeArgs va;
  auto* serve = app.add_subcommand("serve", "Run the session HTTP service (bind from LIFTSIM_BIND)");
  serve->add_option("--store", va.store, "Session store directory");
  serve->add_option("--static", va.static_dir, "Serve static files from this directory");
  serve->add_option("--bind", va.bind, "host:port, overrides LIFTSIM_BIND");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*track) return run_track(ta);
    if (*elev) return run_elevation(ea);
    if (*rec) return run_reconstruct(ra);
    if (*sim) return run_simulate(sa);
    if (*serve) return run_serve(va);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
