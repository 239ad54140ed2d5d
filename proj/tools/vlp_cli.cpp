// vlp: command-line front end for simulation, positioning, calibration and
// the grid replication experiment.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vlp/vlp.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string scene_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string method = "three-led";
  std::string calibration = "none";
  bool paper_literal = false;
  bool paper_faithful_h = false;
};

vlp::io::SceneFile load_scene(const CommonOptions& o) {
  if (o.scene_path.empty()) {
    vlp::io::SceneFile f;
    f.scene = vlp::default_scene();
    return f;
  }
  return vlp::io::read_scene(o.scene_path);
}

vlp::PositioningMethod parse_method(const std::string& m) {
  return m == "two-led" ? vlp::PositioningMethod::TwoLed : vlp::PositioningMethod::ThreeLed;
}

fs::path prepare_out(const CommonOptions& o) {
  fs::path out(o.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out))
    throw vlp::Error(vlp::ErrorCode::InvalidInput, "cannot create output directory " + o.out_dir);
  return out;
}

void write_metadata(const fs::path& out, const std::string& subcommand, const CommonOptions& o,
                    const vlp::io::SceneFile& scene, std::uint64_t seed,
                    const std::vector<std::string>& inputs) {
  json meta;
  meta["tool"] = "vlp";
  meta["version"] = vlp::io::kToolVersion;
  meta["subcommand"] = subcommand;
  meta["seed"] = seed;
  meta["config_hash"] = vlp::io::config_hash(scene);
  meta["flags"] = {{"method", o.method},
                   {"calibration", o.calibration},
                   {"paper_literal", o.paper_literal},
                   {"paper_faithful_h", o.paper_faithful_h}};
  meta["inputs"] = inputs;
  meta["scene"] = vlp::io::scene_to_json(scene);
  vlp::io::write_text(out / "run_metadata.json", meta.dump(2) + "\n");
}

std::string pp_string(vlp::PixelPoint p) {
  return "(" + vlp::io::fmt6(p.u) + ", " + vlp::io::fmt6(p.v) + ")";
}

int cmd_simulate(const CommonOptions& o, std::optional<std::size_t> trials, bool reference,
                 bool sweep) {
  auto file = load_scene(o);
  if (o.seed) file.scene.seed = *o.seed;
  if (trials) file.experiment.trials_per_point = *trials;
  const fs::path out = prepare_out(o);

  std::vector<vlp::TrialRecord> dataset;
  if (reference) {
    const std::vector<vlp::WorldPoint> at{file.scene.camera.position};
    dataset = vlp::generate_trials(at, file.experiment.dispersion_samples, file.scene,
                                   file.scene.seed, vlp::Stream::Dispersion);
  } else {
    dataset = vlp::generate_trials(file.experiment.grid, file.experiment.trials_per_point,
                                   file.scene, file.scene.seed, vlp::Stream::Trials);
  }
  vlp::io::write_text(out / "detections.csv", vlp::io::detections_csv(dataset));
  vlp::io::write_text(out / "ground_truth.csv", vlp::io::ground_truth_csv(dataset));
  if (sweep) {
    vlp::Rng rng = vlp::trial_rng(file.scene.seed, vlp::Stream::Sweep, 0, 0);
    const auto tracks =
        vlp::rotation_sweep(file.scene, vlp::sweep_angles(file.experiment.sweep_samples), rng);
    vlp::io::write_text(out / "rotation_tracks.csv", vlp::io::tracks_csv(tracks));
  }
  write_metadata(out, "simulate", o, file, file.scene.seed, {o.scene_path});
  std::cout << "wrote " << dataset.size() << " trials to " << out.string() << "\n";
  return 0;
}

int cmd_locate(const CommonOptions& o, const std::string& detections_path) {
  const auto file = load_scene(o);
  const fs::path out = prepare_out(o);
  const auto trials = vlp::io::read_detections(detections_path);

  vlp::LocateSettings settings;
  settings.method = parse_method(o.method);
  settings.options.single_pair_height = o.paper_faithful_h;
  settings.two_led_pair = file.experiment.two_led_pair;

  std::vector<vlp::io::FixRow> rows;
  std::size_t failed = 0;
  for (const auto& t : trials) {
    rows.push_back(vlp::locate_row(t.trial_id, t.detections, file.scene.beacons,
                                   file.scene.intrinsics, settings));
    if (!rows.back().fix) {
      ++failed;
      std::cerr << "trial " << t.trial_id << ": " << rows.back().error << "\n";
    }
  }
  vlp::io::write_text(out / "fixes.csv", vlp::io::fixes_csv(rows));
  write_metadata(out, "locate", o, file, file.scene.seed, {o.scene_path, detections_path});
  std::cout << "located " << rows.size() - failed << " of " << rows.size() << " trials ("
            << o.method << ")\n";
  return (rows.empty() || failed == rows.size()) ? 1 : 0;
}

int cmd_calibrate(const CommonOptions& o, const std::string& tracks_path,
                  const std::string& fixes_path, const std::vector<double>& truth, bool in_place) {
  auto file = load_scene(o);
  const fs::path out = prepare_out(o);
  const vlp::CameraIntrinsics before = file.scene.intrinsics;
  json report;
  std::vector<std::string> inputs{o.scene_path};

  if (o.calibration == "rotation") {
    if (tracks_path.empty())
      throw vlp::Error(vlp::ErrorCode::InvalidInput, "rotation calibration needs --tracks");
    inputs.push_back(tracks_path);
    const auto tracks = vlp::io::read_tracks(tracks_path);
    const auto result = vlp::calibrate_rotation(tracks, before);
    json fits = json::array();
    for (const auto& t : result.tracks) {
      if (t.fit)
        fits.push_back({{"track", t.track_index},
                        {"center", {t.fit->center.u, t.fit->center.v}},
                        {"radius_px", t.fit->radius},
                        {"rms_residual_px", t.fit->rms_residual}});
      else
        fits.push_back({{"track", t.track_index}, {"error", t.error}});
    }
    report["method"] = "rotation";
    report["tracks"] = fits;
    report["tracks_used"] = result.tracks_used;
    file.scene.intrinsics = result.intrinsics;
  } else if (o.calibration == "dispersion") {
    if (fixes_path.empty())
      throw vlp::Error(vlp::ErrorCode::InvalidInput, "dispersion calibration needs --fixes");
    inputs.push_back(fixes_path);
    std::vector<vlp::PositionFix> fixes;
    for (const auto& row : vlp::io::read_fixes(fixes_path))
      if (row.fix) fixes.push_back(*row.fix);
    vlp::WorldPoint gt = file.scene.camera.position;
    if (truth.size() == 3) gt = {truth[0], truth[1], truth[2]};
    const auto mode = o.paper_literal ? vlp::DispersionMode::Literal : vlp::DispersionMode::Physical;
    const auto result = vlp::calibrate_dispersion(fixes, gt, before, mode);
    const auto& s = result.summary;
    report["method"] = "dispersion";
    report["mode"] = o.paper_literal ? "literal" : "physical";
    report["ground_truth"] = {gt.x, gt.y, gt.z};
    report["mean_offset_cm"] = {s.mean_offset.x, s.mean_offset.y};
    report["enclosing_center_cm"] = {s.enclosing_center.x, s.enclosing_center.y};
    report["enclosing_radius_cm"] = s.enclosing_radius;
    report["sample_count"] = s.sample_count;
    report["mean_height_cm"] = result.mean_height;
    file.scene.intrinsics = result.intrinsics;
  } else {
    throw vlp::Error(vlp::ErrorCode::InvalidInput,
                     "--calibration must be rotation or dispersion for calibrate");
  }

  const vlp::PixelPoint b = before.corrected_principal_point();
  const vlp::PixelPoint a = file.scene.intrinsics.corrected_principal_point();
  report["principal_point_before"] = {b.u, b.v};
  report["principal_point_after"] = {a.u, a.v};
  vlp::io::write_text(out / "calibration_report.json", report.dump(2) + "\n");
  vlp::io::write_scene(out / "scene_calibrated.json", file);
  if (in_place && !o.scene_path.empty()) vlp::io::write_scene(o.scene_path, file);
  write_metadata(out, "calibrate", o, file, file.scene.seed, inputs);

  std::cout << "principal point before: " << pp_string(b) << " px\n"
            << "principal point after:  " << pp_string(a) << " px\n"
            << "delta: (" << vlp::io::fmt6(a.u - b.u) << ", " << vlp::io::fmt6(a.v - b.v)
            << ") px\n";
  return 0;
}

void write_cell(const fs::path& out, const vlp::Cell& c) {
  const std::string tag = std::string(vlp::to_string(c.method)) + "_" +
                          std::string(vlp::to_string(c.calibration));
  vlp::io::write_text(out / ("fixes_" + tag + ".csv"), vlp::io::fixes_csv(c.rows));
  vlp::io::write_text(out / ("errors_" + tag + ".csv"), vlp::io::errors_csv(c.report, c.located_ids));
  vlp::io::write_text(out / ("cdf_" + tag + ".csv"), vlp::io::cdf_csv(c.report));
  vlp::io::write_text(out / ("histogram_" + tag + ".csv"), vlp::io::histogram_csv(c.report));
}

int cmd_replicate(const CommonOptions& o) {
  vlp::ReplicationConfig config = vlp::default_replication();
  if (!o.scene_path.empty()) {
    const auto file = vlp::io::read_scene(o.scene_path);
    config.scene = file.scene;
    config.experiment = file.experiment;
    config.seed = file.scene.seed;
  }
  if (o.seed) config.seed = *o.seed;
  config.scene.seed = config.seed;
  config.options.single_pair_height = o.paper_faithful_h;
  config.dispersion_mode = o.paper_literal ? vlp::DispersionMode::Literal : vlp::DispersionMode::Physical;

  const fs::path out = prepare_out(o);
  vlp::ReplicationResult r;
  try {
    r = vlp::run_replication(config);
  } catch (const vlp::Error& e) {
    throw vlp::Error(e.code(), std::string("replicate: ") + e.what());
  }

  vlp::io::write_text(out / "detections.csv", vlp::io::detections_csv(r.dataset));
  vlp::io::write_text(out / "ground_truth.csv", vlp::io::ground_truth_csv(r.dataset));
  vlp::io::write_text(out / "rotation_tracks.csv", vlp::io::tracks_csv(r.sweep_tracks));
  vlp::io::write_text(out / "reference_detections.csv", vlp::io::detections_csv(r.dispersion_dataset));
  for (const auto& mc : r.dispersion)
    vlp::io::write_text(out / ("reference_fixes_" + std::string(vlp::to_string(mc.method)) + ".csv"),
                        vlp::io::fixes_csv(mc.dispersion_rows));
  for (const auto& c : r.cells) write_cell(out, c);

  vlp::io::SceneFile scene_file{config.scene, config.experiment};
  vlp::io::write_scene(out / "scene.json", scene_file);
  vlp::io::SceneFile rot = scene_file;
  rot.scene.intrinsics = r.rotation.intrinsics;
  vlp::io::write_scene(out / "scene_rotation.json", rot);
  for (const auto& mc : r.dispersion) {
    vlp::io::SceneFile d = scene_file;
    d.scene.intrinsics = mc.dispersion.intrinsics;
    vlp::io::write_scene(out / ("scene_dispersion_" + std::string(vlp::to_string(mc.method)) + ".json"), d);
  }

  const std::string summary = vlp::replication_summary(r);
  vlp::io::write_text(out / "summary.txt", summary);
  write_metadata(out, "replicate", o, scene_file, config.seed, {o.scene_path});
  std::cout << summary;
  return 0;
}

int cmd_stats(const CommonOptions& o, const std::string& fixes_path, const std::string& truth_path) {
  const fs::path out = prepare_out(o);
  const auto rows = vlp::io::read_fixes(fixes_path);
  const auto truth = vlp::io::read_ground_truth(truth_path);
  std::map<long long, vlp::WorldPoint> by_id;
  for (const auto& t : truth) by_id[t.trial_id] = t.pose.position;

  std::vector<vlp::WorldPoint> fixes, gts;
  std::vector<long long> ids;
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (!r.fix) {
      ++failed;
      continue;
    }
    auto it = by_id.find(r.trial_id);
    if (it == by_id.end())
      throw vlp::Error(vlp::ErrorCode::LengthMismatch,
                       "trial " + std::to_string(r.trial_id) + " has no ground truth");
    fixes.push_back(r.fix->position);
    gts.push_back(it->second);
    ids.push_back(r.trial_id);
  }
  const auto report = vlp::error_stats(std::span<const vlp::WorldPoint>(fixes), gts);
  vlp::io::write_text(out / "errors.csv", vlp::io::errors_csv(report, ids));
  vlp::io::write_text(out / "cdf.csv", vlp::io::cdf_csv(report));
  vlp::io::write_text(out / "histogram.csv", vlp::io::histogram_csv(report));
  const std::string summary = vlp::io::summary_block("stats", report, failed);
  vlp::io::write_text(out / "summary.txt", summary);
  std::cout << summary;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Image-sensor visible light positioning toolkit"};
  app.require_subcommand(1);
  CommonOptions o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scene", o.scene_path, "Scene configuration (JSON)");
    sub->add_option("--out", o.out_dir, "Output directory");
    sub->add_option("--seed", o.seed, "Random seed (overrides the scene)");
    sub->add_option("--method", o.method, "Positioning method")
        ->check(CLI::IsMember({"two-led", "three-led"}));
    sub->add_option("--calibration", o.calibration, "Calibration method")
        ->check(CLI::IsMember({"none", "rotation", "dispersion"}));
    sub->add_flag("--paper-literal", o.paper_literal,
                  "Dispersion correction without the f/H magnification");
    sub->add_flag("--paper-faithful-h", o.paper_faithful_h,
                  "Three-LED height from the two lowest-id LEDs only");
  };

  auto* simulate = app.add_subcommand("simulate", "Generate a detection dataset");
  add_common(simulate);
  std::optional<std::size_t> trials;
  bool reference = false, sweep = false;
  simulate->add_option("--trials", trials, "Trials per grid point");
  simulate->add_flag("--reference", reference,
                     "Repeat observations at the scene camera position instead of the grid");
  simulate->add_flag("--sweep", sweep, "Also write a rotation sweep (rotation_tracks.csv)");

  auto* locate = app.add_subcommand("locate", "Compute fixes from detections");
  add_common(locate);
  std::string detections_path;
  locate->add_option("--detections", detections_path, "Detections CSV")->required()->check(CLI::ExistingFile);

  auto* calibrate = app.add_subcommand("calibrate", "Correct the principal point");
  add_common(calibrate);
  std::string tracks_path, fixes_path;
  std::vector<double> truth;
  bool in_place = false;
  calibrate->add_option("--tracks", tracks_path, "Rotation tracks CSV")->check(CLI::ExistingFile);
  calibrate->add_option("--fixes", fixes_path, "Fixes CSV taken at the ground truth")->check(CLI::ExistingFile);
  calibrate->add_option("--truth", truth, "Ground-truth position x y z (cm)")->expected(3);
  calibrate->add_flag("--in-place", in_place, "Also overwrite the input scene file");

  auto* replicate = app.add_subcommand("replicate", "Run the full grid experiment");
  add_common(replicate);

  auto* stats = app.add_subcommand("stats", "Error statistics of fixes against ground truth");
  add_common(stats);
  std::string stats_fixes, stats_truth;
  stats->add_option("--fixes", stats_fixes, "Fixes CSV")->required()->check(CLI::ExistingFile);
  stats->add_option("--ground-truth", stats_truth, "Ground-truth CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (!o.scene_path.empty() && !fs::exists(o.scene_path)) {
    std::cerr << "error: scene file not found: " << o.scene_path << "\n";
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, trials, reference, sweep);
    if (locate->parsed()) return cmd_locate(o, detections_path);
    if (calibrate->parsed()) return cmd_calibrate(o, tracks_path, fixes_path, truth, in_place);
    if (replicate->parsed()) return cmd_replicate(o);
    if (stats->parsed()) return cmd_stats(o, stats_fixes, stats_truth);
  } catch (const vlp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
