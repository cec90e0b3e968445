// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_PIPELINE_PIPELINE_HPP
#define QUADSIM_PIPELINE_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "channel/channel.hpp"
#include "core/config.hpp"
#include "core/image.hpp"
#include "metrics/metrics.hpp"

namespace quadsim {

struct ImageInput {
  std::string id;
  ImagePlane image;
};

struct RunOptions {
  SystemConfig config;
  std::optional<std::string> dump_dir;  // write intermediate artifacts here
};

struct DeepscSettings {
  ChannelModel channel;
  double snr_db = 10.0;
  std::optional<double> nmse_db;  // nullopt = perfect CSI
};

// Reports are versioned JSON; every number in them is recomputable from the
// --dump artifacts. Images are processed in a worker pool; per-image
// failures are recorded in the report and the run continues.
nlohmann::json run_lic_images(const std::vector<ImageInput>& images,
                              const RunOptions& options);

nlohmann::json run_deepsc_images(const std::vector<ImageInput>& images,
                                 const RunOptions& options,
                                 const DeepscSettings& settings);

// Idealized separate-coding reference: LIC bits over the AWGN Shannon
// capacity at the given SNR, reported at LIC distortion. Not a claim about
// any practical coded-modulation stack; the report labels it as such.
nlohmann::json run_baseline_images(const std::vector<ImageInput>& images,
                                   const RunOptions& options, double snr_db);

// One run per value along the chosen axis with shared seeds, plus the
// (rate, quality) points of the sweep.
nlohmann::json run_sweep(const std::string& axis, const nlohmann::json& values,
                         const std::vector<ImageInput>& images, const RunOptions& options,
                         const DeepscSettings& base_settings);

// True when every per-image entry completed with its assertions green.
bool report_ok(const nlohmann::json& report);

// RdPoints from a sweep report, consumable by bd_metric.
std::vector<RdPoint> sweep_rd_points(const nlohmann::json& sweep_report);

std::vector<ImageInput> load_images(const std::vector<std::string>& paths);

}  // namespace quadsim

#endif
