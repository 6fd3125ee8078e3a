#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "liftsim/fatigue/max_exertion.hpp"
#include "liftsim/io/csv.hpp"
#include "liftsim/io/json_io.hpp"
#include "liftsim/pipeline.hpp"
#include "synthetic.hpp"

using namespace liftsim;
namespace fs = std::filesystem;

TEST(FormatDouble, RoundTripsBitExactly) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 2000; ++k) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(k % 40) - 20);
    EXPECT_EQ(io::parse_double(io::format_double(v), "t"), v);
  }
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_THROW(io::parse_double("1.5x", "t"), InputError);
  EXPECT_THROW(io::parse_double("", "t"), InputError);
}

TEST(Csv, DisplacementRoundTrip) {
  std::vector<vision::DisplacementSample> d{{0, 0, false}, {0.25, -1.5, false}, {1e-17, 3.0000000000000004, true}};
  std::stringstream ss;
  io::write_displacement_csv(ss, d);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "frame_index,dx_pixels,dy_pixels");
  const auto back = io::read_displacement_csv(ss);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    EXPECT_EQ(back[k].dx, d[k].dx);
    EXPECT_EQ(back[k].dy, d[k].dy);
  }
}

TEST(Csv, HeaderIsMandatory) {
  std::stringstream no_header("0,0,0\n1,0.5,0.5\n");
  EXPECT_THROW(io::read_displacement_csv(no_header), InputError);
  std::stringstream empty;
  EXPECT_THROW(io::read_displacement_csv(empty), InputError);
  std::stringstream gap("frame_index,dx_pixels,dy_pixels\n0,0,0\n2,0,0\n");
  EXPECT_THROW(io::read_displacement_csv(gap), InputError);
  std::stringstream ragged("frame_index,dx_pixels,dy_pixels\n0,0\n");
  EXPECT_THROW(io::read_displacement_csv(ragged), InputError);
}

TEST(Csv, OtherUnitsAreRefused) {
  std::stringstream mm("t_seconds,elevation_mm\n0,0\n0.04,1\n0.08,2\n");
  try {
    io::read_elevation_csv(mm);
    FAIL() << "accepted millimetres";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("mixed units"), std::string::npos);
  }
  std::stringstream ms("t_ms,elevation_m\n0,0\n40,1\n80,2\n");
  EXPECT_THROW(io::read_elevation_csv(ms), InputError);
}

TEST(Csv, ElevationRoundTripWithKinematics) {
  std::vector<double> v;
  for (int k = 0; k < 20; ++k) v.push_back(0.01 * k * k);
  const kinematics::ElevationSeries s(0.04, v);
  const auto kin = kinematics::spline_kinematics(s, 0.99);
  std::stringstream ss;
  io::write_elevation_csv(ss, s, &kin);
  const auto back = io::read_elevation_csv(ss);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_EQ(back[k], s[k]);
  EXPECT_NEAR(back.dt(), 0.04, 1e-15);
  std::stringstream uneven("t_seconds,elevation_m\n0,0\n0.04,1\n0.1,2\n");
  EXPECT_THROW(io::read_elevation_csv(uneven), InputError);
}

TEST(Csv, SegmentsAndPaths) {
  std::vector<kinematics::RepetitionSegment> segs{{3, 20}, {40, 61}};
  std::stringstream ss;
  io::write_segments_csv(ss, segs);
  const auto back = io::read_segments_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].start_index, 40u);
  EXPECT_EQ(back[1].end_index, 61u);
  std::stringstream bad("start_index,end_index\n5,5\n");
  EXPECT_THROW(io::read_segments_csv(bad), InputError);

  capability::CapabilityPath p{{0, 0, 0, 900, 1}, {0.1, 0.02, 0.4, 850.5, 0.99}};
  std::stringstream ps;
  io::write_path_csv(ps, p);
  const auto pb = io::read_path_csv(ps);
  ASSERT_EQ(pb.size(), 2u);
  EXPECT_EQ(pb[1].force, 850.5);
  EXPECT_EQ(pb[1].g, 0.99);
}

TEST(Json, ProfileRoundTripIsBitExact) {
  const auto p = liftsim::testing::hill_profile(1234.5678, 0.5, 1.5, 9, 7);
  capability::KnownMask mask(9, 7);
  mask.set(2, 3);
  mask.set(8, 0);
  const dynamics::ExerciseSetup setup{70.5, 10, 2.5, 0.45};
  const auto text = io::profile_to_json(p, mask, setup).dump();
  const auto doc = io::profile_from_json(io::parse_json(text, "t"));
  EXPECT_EQ(doc.profile.samples(), p.samples());
  EXPECT_EQ(doc.mask.known, mask.known);
  ASSERT_TRUE(doc.setup);
  EXPECT_EQ(*doc.setup, setup);
  EXPECT_EQ(io::profile_to_json(doc.profile, doc.mask, doc.setup).dump(), text);
}

TEST(Json, ProfileValidation) {
  const auto p = liftsim::testing::hill_profile(1000, 0.5, 1.5, 4, 4);
  auto j = io::profile_to_json(p, capability::KnownMask(4, 4));
  auto no_units = j;
  no_units.erase("units");
  EXPECT_THROW(io::profile_from_json(no_units), InputError);
  auto lbf = j;
  lbf["units"] = "lbf,in,ips";
  EXPECT_THROW(io::profile_from_json(lbf), InputError);
  auto short_samples = j;
  short_samples["samples"].erase(0);
  EXPECT_THROW(io::profile_from_json(short_samples), InputError);
  auto bad_mask = j;
  bad_mask["known_mask"][0] = 2;
  EXPECT_THROW(io::profile_from_json(bad_mask), InputError);
  EXPECT_THROW(io::parse_json("{\"nd\": ", "t"), InputError);
}

TEST(Json, SetupUnitsAndUnknownFields) {
  const auto s = io::apply_setup_json({}, io::json{{"mass_lb", 275}});
  EXPECT_DOUBLE_EQ(s.mass, pounds_to_kg(275));
  EXPECT_THROW(io::apply_setup_json({}, io::json{{"mass_lb", 275}, {"mass_kg", 125}}), InputError);
  EXPECT_THROW(io::apply_setup_json({}, io::json{{"weight", 10}}), InputError);
  EXPECT_THROW(io::apply_setup_json({}, io::json{{"viscosity_nspm", -1}}), InputError);
  EXPECT_THROW(io::apply_setup_json({}, io::json{{"mass_kg", "heavy"}}), InputError);
}

TEST(Json, TracksRoundTrip) {
  std::vector<vision::FeatureTrack> t(2);
  t[0].start_frame = 0;
  t[0].window_size = 15;
  t[0].positions = {{10.5, 20.25}, {11, 21}};
  t[1].start_frame = 0;
  t[1].window_size = 17;
  t[1].alive = false;
  t[1].positions = {{3, 4}};
  const auto back = io::tracks_from_json(io::tracks_to_json(t));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].positions[1].y, 21.0);
  EXPECT_FALSE(back[1].alive);
  EXPECT_EQ(back[1].window_size, 17);
}

TEST(Pipeline, ReconstructFromOneFailedRep) {
  const dynamics::ExerciseSetup setup{60, 0, 0, 0.5};
  // Weak enough that the rep stalls near the dip of the hill.
  const auto truth = liftsim::testing::hill_profile(1.1 * setup.static_force() / 0.85);
  const auto rep = fatigue::max_exertion_rep(truth, setup, fatigue::FatigueState(25.0));
  ASSERT_FALSE(rep.completed);
  ASSERT_GT(rep.path.back().delta, 0.15);
  pipeline::ReconstructSet set;
  set.dt = 0.01;
  set.metres_per_pixel = 0.002;
  set.setup = setup;
  set.displacement = liftsim::testing::rep_displacement(rep.path, set.dt, set.metres_per_pixel);
  set.failed_reps = {0};
  pipeline::ReconstructOptions opt;
  opt.nd = 16;
  opt.nv = 16;
  const auto r = pipeline::reconstruct({set}, opt);
  EXPECT_EQ(r.failure_paths.size(), 1u);
  EXPECT_GT(r.mask.count(), 3);
  EXPECT_LT(r.mask.count(), 16 * 16);
  for (double v : r.profile.samples()) EXPECT_TRUE(std::isfinite(v));
  EXPECT_TRUE(capability::check_monotonicity(r.profile).empty());

  auto none = set;
  none.failed_reps.clear();
  EXPECT_THROW(pipeline::reconstruct({none}, opt), InputError);
  auto out_of_range = set;
  out_of_range.failed_reps = {3};
  EXPECT_THROW(pipeline::reconstruct({out_of_range}, opt), InputError);
}

TEST(Pipeline, ManifestResolvesRelativePaths) {
  const auto dir = fs::temp_directory_path() / "liftsim_manifest_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    auto f = io::open_out((dir / "a.csv").string());
    io::write_displacement_csv(f, {{0, 0, false}, {0, -1, false}, {0, -2, false}});
  }
  {
    auto f = io::open_out((dir / "m.json").string());
    f << R"({"sets": [{"displacement_csv": "a.csv", "dt_s": 0.02, "failed_reps": [0],
                       "setup": {"mass_lb": 100}}]})";
  }
  pipeline::ReconstructSet defaults;
  defaults.metres_per_pixel = 0.001;
  const auto sets = pipeline::read_manifest((dir / "m.json").string(), defaults);
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].displacement.size(), 3u);
  EXPECT_EQ(sets[0].dt, 0.02);
  EXPECT_EQ(sets[0].metres_per_pixel, 0.001);
  EXPECT_DOUBLE_EQ(sets[0].setup.mass, pounds_to_kg(100));
  {
    auto f = io::open_out((dir / "bad.json").string());
    f << R"({"sets": [{"displacement_csv": "a.csv", "frames": 3}]})";
  }
  EXPECT_THROW(pipeline::read_manifest((dir / "bad.json").string(), defaults), InputError);
  EXPECT_THROW(pipeline::read_manifest((dir / "missing.json").string(), defaults), InputError);
  fs::remove_all(dir);
}
