// SPDX-License-Identifier: Apache-2.0
// Simulates one static reflector, runs the FMCW point-cloud pipeline and
// prints the strongest point next to the true position.

#include <cstdio>

#include "mmsense/fmcw_pointcloud.hpp"
#include "mmsense/scene_sim.hpp"

int main() {
  using namespace mmsense;
  const FmcwConfig cfg;
  const auto array = default_fmcw_array(cfg.wavelength());

  const Vec3 target = fmcw::look_direction(deg2rad(20.0), deg2rad(-10.0)) * 2.5;
  const sim::Scatterer reflector{target, {}, 1.0};
  const auto cube = sim::synth_fmcw_frame(std::span(&reflector, 1), cfg, array, 0);

  fmcw::PointCloudParams params;
  params.clutter_removal = false;
  const fmcw::PointCloudGenerator pipeline(array, cfg, params);
  const auto result = pipeline.run(cube);

  const auto& p = result.frame.rows[0];
  std::printf("range resolution %.2f cm, velocity resolution %.2f cm/s\n", 100 * cfg.range_resolution(),
              100 * cfg.velocity_resolution());
  std::printf("true      x=%+.3f y=%+.3f z=%+.3f m\n", target.x, target.y, target.z);
  std::printf("row 0     x=%+.3f y=%+.3f z=%+.3f m  v=%+.3f m/s  E=%.1f dB  R=%.3f m\n", p[0], p[1], p[2], p[3],
              p[4], p[5]);
  std::printf("%zu of %zu rows hold distinct candidates\n", result.frame.valid_count, fmcw::kPointsPerFrame);
}
