#include <gtest/gtest.h>

#include "test_support.hpp"
#include "vlp/experiment.hpp"

namespace vlp {
namespace {

namespace fs = std::filesystem;
using testing::run_cli;
using testing::slurp;

// A principal point off by (du, dv) px shifts every image point rigidly, which
// moves the fix by the same vector scaled by pitch * H / f.
double analytic_offset_error_cm(double du, double dv) {
  return std::hypot(du, dv) * 0.006 * 150.0 / 3.0;
}

TEST(SelectTwoLedPair, LongestBaselineByDefault) {
  const auto scene = default_scene();
  const auto dets = testing::exact_detections(scene);
  const auto pair = select_two_led_pair(dets, scene.beacons, std::nullopt);
  ASSERT_EQ(pair.size(), 2u);
  EXPECT_EQ(pair[0].beacon_id, BeaconId{1});
  EXPECT_EQ(pair[1].beacon_id, BeaconId{3});
}

TEST(SelectTwoLedPair, ConfiguredPair) {
  const auto scene = default_scene();
  const auto dets = testing::exact_detections(scene);
  const auto pair = select_two_led_pair(dets, scene.beacons, std::pair{BeaconId{2}, BeaconId{1}});
  EXPECT_EQ(pair[0].beacon_id, BeaconId{2});
  EXPECT_EQ(pair[1].beacon_id, BeaconId{1});
  EXPECT_THROW(select_two_led_pair(testing::pick(dets, {1, 3}), scene.beacons,
                                   std::pair{BeaconId{2}, BeaconId{1}}),
               Error);
  EXPECT_THROW(select_two_led_pair(testing::pick(dets, {1}), scene.beacons, std::nullopt), Error);
}

TEST(LocateRow, RecordsErrorInsteadOfThrowing) {
  const auto scene = default_scene();
  const auto dets = testing::pick(testing::exact_detections(scene), {1, 2});
  const auto row = locate_row(4, dets, scene.beacons, scene.intrinsics, testing::settings_for(PositioningMethod::ThreeLed));
  EXPECT_FALSE(row.fix);
  EXPECT_EQ(row.trial_id, 4);
  EXPECT_FALSE(row.error_code.empty());
}

TEST(Replication, NoiselessMatchesAnalyticOracle) {
  ReplicationConfig config = default_replication();
  config.scene.noise = {0.0, false};
  config.experiment.trials_per_point = 1;
  config.experiment.dispersion_samples = 4;
  const ReplicationResult r = run_replication(config);
  const double expected = analytic_offset_error_cm(6.3, -4.1);
  EXPECT_NEAR(expected, 2.254994, 5e-7);
  for (PositioningMethod m : {PositioningMethod::TwoLed, PositioningMethod::ThreeLed}) {
    const auto& none = r.cell(m, CalibrationKind::None).report;
    EXPECT_NEAR(none.mean, expected, 1e-9);
    EXPECT_NEAR(none.max, expected, 1e-9);
    EXPECT_LT(r.cell(m, CalibrationKind::Rotation).report.max, 1e-6);
    EXPECT_LT(r.cell(m, CalibrationKind::Dispersion).report.max, 1e-6);
    EXPECT_EQ(r.cell(m, CalibrationKind::None).failed, 0u);
  }
  EXPECT_EQ(r.cells.size(), 6u);
  EXPECT_EQ(r.dataset.size(), 36u);
}

TEST(Replication, NoisyTwoLedCalibrationHelps) {
  ReplicationConfig config = default_replication();
  config.experiment.trials_per_point = 3;
  const ReplicationResult r = run_replication(config);
  const auto& none = r.cell(PositioningMethod::TwoLed, CalibrationKind::None).report;
  const auto& rot = r.cell(PositioningMethod::TwoLed, CalibrationKind::Rotation).report;
  const auto& disp = r.cell(PositioningMethod::TwoLed, CalibrationKind::Dispersion).report;
  EXPECT_LT(rot.mean, 0.5 * none.mean);
  EXPECT_LT(disp.mean, 0.5 * none.mean);
  EXPECT_TRUE(disp.dispersion);
  EXPECT_FALSE(rot.dispersion);
  const std::string summary = replication_summary(r);
  EXPECT_NE(summary.find("[two-led / dispersion]"), std::string::npos);
  EXPECT_NE(summary.find("rotation -> dispersion"), std::string::npos);
}

// ------------------------------------------------------------------ CLI

TEST(Cli, SimulateWritesReferenceProtocolDataset) {
  const fs::path dir = testing::fresh_dir("cli_simulate");
  ASSERT_EQ(run_cli("simulate --out " + dir.string()), 0);
  const auto dets = io::read_detections(dir / "detections.csv");
  EXPECT_EQ(dets.size(), 432u);
  EXPECT_EQ(io::read_ground_truth(dir / "ground_truth.csv").size(), 432u);
  EXPECT_TRUE(fs::exists(dir / "run_metadata.json"));
}

TEST(Cli, NoiselessSimulateThenLocateReproducesGrid) {
  const fs::path dir = testing::fresh_dir("cli_locate");
  ASSERT_EQ(run_cli("simulate --trials 1 --out " + dir.string()), 0);
  for (const char* method : {"two-led", "three-led"}) {
    const fs::path out = dir / method;
    ASSERT_EQ(run_cli("locate --method " + std::string(method) + " --detections " +
                      (dir / "detections.csv").string() + " --out " + out.string()),
              0);
    const auto fixes = io::read_fixes(out / "fixes.csv");
    const auto truth = io::read_ground_truth(dir / "ground_truth.csv");
    ASSERT_EQ(fixes.size(), 36u);
    for (std::size_t n = 0; n < fixes.size(); ++n) {
      ASSERT_TRUE(fixes[n].fix) << method << " trial " << n;
      // Values are written with 6 decimals.
      EXPECT_NEAR(fixes[n].fix->position.x, truth[n].pose.position.x, 2e-6);
      EXPECT_NEAR(fixes[n].fix->position.y, truth[n].pose.position.y, 2e-6);
      EXPECT_NEAR(fixes[n].fix->position.z, truth[n].pose.position.z, 2e-6);
    }
    ASSERT_EQ(run_cli("stats --fixes " + (out / "fixes.csv").string() + " --ground-truth " +
                      (dir / "ground_truth.csv").string() + " --out " + (out / "stats").string()),
              0);
    EXPECT_TRUE(fs::exists(out / "stats" / "histogram.csv"));
  }
}

TEST(Cli, SimulateIsByteIdentical) {
  const fs::path a = testing::fresh_dir("cli_det_a");
  const fs::path b = testing::fresh_dir("cli_det_b");
  ASSERT_EQ(run_cli("simulate --seed 11 --sweep --out " + a.string()), 0);
  ASSERT_EQ(run_cli("simulate --seed 11 --sweep --out " + b.string()), 0);
  for (const char* f : {"detections.csv", "ground_truth.csv", "rotation_tracks.csv", "run_metadata.json"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

void write_offset_scene(const fs::path& path, double sigma) {
  io::SceneFile file;
  file.scene = default_scene();
  file.scene.true_principal_point = {406.3, 295.9};
  file.scene.noise.pixel_sigma = sigma;
  io::write_scene(path, file);
}

TEST(Cli, RotationCalibrationRecoversInjectedOffset) {
  const fs::path dir = testing::fresh_dir("cli_rotation");
  write_offset_scene(dir / "scene.json", 0.0);
  const std::string scene = " --scene " + (dir / "scene.json").string();
  ASSERT_EQ(run_cli("simulate --sweep" + scene + " --out " + dir.string()), 0);
  ASSERT_EQ(run_cli("calibrate --calibration rotation --tracks " + (dir / "rotation_tracks.csv").string() +
                    scene + " --out " + (dir / "cal").string()),
            0);
  const auto cal = io::read_scene(dir / "cal" / "scene_calibrated.json");
  // Tracks pass through 6-decimal CSV values.
  EXPECT_NEAR(cal.scene.intrinsics.corrected_principal_point().u, 406.3, 1e-5);
  EXPECT_NEAR(cal.scene.intrinsics.corrected_principal_point().v, 295.9, 1e-5);
  EXPECT_TRUE(fs::exists(dir / "cal" / "calibration_report.json"));
}

TEST(Cli, DispersionCalibrationRecoversInjectedOffset) {
  const fs::path dir = testing::fresh_dir("cli_dispersion");
  write_offset_scene(dir / "scene.json", 0.0);
  const std::string scene = " --scene " + (dir / "scene.json").string();
  ASSERT_EQ(run_cli("simulate --reference" + scene + " --out " + dir.string()), 0);
  ASSERT_EQ(run_cli("locate --method two-led --detections " + (dir / "detections.csv").string() +
                    scene + " --out " + dir.string()),
            0);
  ASSERT_EQ(run_cli("calibrate --calibration dispersion --fixes " + (dir / "fixes.csv").string() +
                    " --truth 0 0 0" + scene + " --out " + (dir / "cal").string()),
            0);
  const auto cal = io::read_scene(dir / "cal" / "scene_calibrated.json");
  EXPECT_NEAR(cal.scene.intrinsics.corrected_principal_point().u, 406.3, 1e-4);
  EXPECT_NEAR(cal.scene.intrinsics.corrected_principal_point().v, 295.9, 1e-4);

  ASSERT_EQ(run_cli("calibrate --calibration dispersion --paper-literal --fixes " +
                    (dir / "fixes.csv").string() + scene + " --out " + (dir / "lit").string()),
            0);
  const std::string report = slurp(dir / "lit" / "calibration_report.json");
  EXPECT_NE(report.find("\"literal\""), std::string::npos);
}

TEST(Cli, CalibrationWithZeroOffsetLeavesPrincipalPoint) {
  const fs::path dir = testing::fresh_dir("cli_zero");
  ASSERT_EQ(run_cli("simulate --sweep --out " + dir.string()), 0);
  ASSERT_EQ(run_cli("calibrate --calibration rotation --tracks " + (dir / "rotation_tracks.csv").string() +
                    " --out " + dir.string()),
            0);
  const auto cal = io::read_scene(dir / "scene_calibrated.json");
  EXPECT_NEAR(cal.scene.intrinsics.corrected_principal_point().u, 400.0, 1e-5);
  EXPECT_NEAR(cal.scene.intrinsics.corrected_principal_point().v, 300.0, 1e-5);
}

TEST(Cli, CollinearBeaconsYieldPerRowErrors) {
  const fs::path dir = testing::fresh_dir("cli_collinear");
  io::SceneFile file;
  file.scene = default_scene();
  file.scene.beacons = {{{1}, {-40, -40, 150}}, {{2}, {0, 0, 150}}, {{3}, {40, 40, 150}}};
  io::write_scene(dir / "scene.json", file);
  const std::string scene = " --scene " + (dir / "scene.json").string();
  ASSERT_EQ(run_cli("simulate --trials 1" + scene + " --out " + dir.string()), 0);
  EXPECT_EQ(run_cli("locate --detections " + (dir / "detections.csv").string() + scene + " --out " +
                    dir.string()),
            1);
  const auto fixes = io::read_fixes(dir / "fixes.csv");
  ASSERT_EQ(fixes.size(), 36u);
  for (const auto& f : fixes) EXPECT_EQ(f.error_code, "SingularGeometry");
}

TEST(Cli, BadInputsFailCleanly) {
  const fs::path dir = testing::fresh_dir("cli_bad");
  io::write_text(dir / "broken.json", "{ not json");
  EXPECT_NE(run_cli("simulate --scene " + (dir / "broken.json").string() + " --out " + dir.string()), 0);
  EXPECT_NE(run_cli("simulate --scene " + (dir / "missing.json").string()), 0);
  EXPECT_NE(run_cli("locate --method four-led --detections " + (dir / "broken.json").string()), 0);
  EXPECT_NE(run_cli("calibrate --calibration none --out " + dir.string()), 0);
  EXPECT_NE(run_cli(""), 0);
}

TEST(Cli, ReplicateMatchesGoldenSummary) {
  const fs::path dir = testing::fresh_dir("cli_golden");
  ASSERT_EQ(run_cli("replicate --out " + dir.string()), 0);
  EXPECT_EQ(slurp(dir / "summary.txt"), slurp(fs::path(VLP_GOLDEN_DIR) / "replicate_summary.txt"));
  for (const char* f : {"fixes_two-led_dispersion.csv", "errors_three-led_rotation.csv",
                        "cdf_two-led_none.csv", "histogram_three-led_dispersion.csv",
                        "rotation_tracks.csv", "reference_fixes_two-led.csv", "scene_rotation.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
}

}  // namespace
}  // namespace vlp
