// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared-library C API exactly as an external client would:
// opaque handles, status codes, JSON in and out.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "core/image.hpp"
#include "pipeline/corpus.hpp"
#include "quadsim.h"

namespace fs = std::filesystem;

static int g_failures = 0;

#define CHECK_MSG(cond, msg)                              \
  do {                                                    \
    if (!(cond)) {                                        \
      std::printf("FAIL %s:%d: %s\n", __FILE__, __LINE__, msg); \
      ++g_failures;                                       \
    }                                                     \
  } while (0)

int main() {
  fs::path tmp = fs::temp_directory_path() / "quadsim_capi_test";
  fs::create_directories(tmp);

  CHECK_MSG(std::strlen(qs_version()) > 0, "version string");

  // bad inputs are rejected with messages, not crashes
  qs_context* ctx = nullptr;
  CHECK_MSG(qs_context_create("{\"bogus_key\":1}", &ctx) == QS_ERROR_FORMAT,
            "unknown config key must be rejected");
  CHECK_MSG(ctx == nullptr, "failed create leaves handle null");
  CHECK_MSG(std::strlen(qs_last_error()) > 0, "error message populated");
  CHECK_MSG(qs_context_create("{\"channels_cy\": 10}", &ctx) ==
                QS_ERROR_INVALID_ARGUMENT,
            "invalid config must be rejected");

  // a small fast configuration
  const char* cfg =
      "{\"block_size\": 8, \"channels_cy\": 192, \"master_seed\": 11}";
  CHECK_MSG(qs_context_create(cfg, &ctx) == QS_OK, "context create");
  CHECK_MSG(ctx != nullptr, "handle populated");

  char* echo = nullptr;
  CHECK_MSG(qs_context_config_json(ctx, &echo) == QS_OK, "config echo");
  {
    auto j = nlohmann::json::parse(echo);
    CHECK_MSG(j["block_size"] == 8, "echo has block_size");
    CHECK_MSG(j["master_seed"] == 11, "echo has master_seed");
  }
  qs_string_free(echo);

  // write a corpus image, run encode/decode through the files
  fs::path ppm = tmp / "img.ppm";
  fs::path qlic = tmp / "img.qlic";
  fs::path out_ppm = tmp / "img_out.ppm";
  quadsim::write_pnm(quadsim::make_corpus_image("checker_grad", 1), ppm.string());

  CHECK_MSG(qs_lic_encode_file(ctx, ppm.string().c_str(), qlic.string().c_str()) == QS_OK,
            "lic encode file");
  CHECK_MSG(qs_lic_decode_file(ctx, qlic.string().c_str(), out_ppm.string().c_str()) == QS_OK,
            "lic decode file");
  CHECK_MSG(fs::file_size(qlic) > 0, "stream written");
  CHECK_MSG(fs::file_size(out_ppm) == fs::file_size(ppm), "decoded image sized right");

  CHECK_MSG(qs_lic_encode_file(ctx, "/nonexistent.ppm", qlic.string().c_str()) ==
                QS_ERROR_IO,
            "missing input is an IO error");
  CHECK_MSG(std::strlen(qs_context_last_error(ctx)) > 0, "context error message");

  // run a LIC job
  {
    nlohmann::json job;
    job["mode"] = "lic";
    job["images"] = {ppm.string()};
    char* report_c = nullptr;
    CHECK_MSG(qs_run_job(ctx, job.dump().c_str(), &report_c) == QS_OK, "run lic job");
    auto report = nlohmann::json::parse(report_c);
    CHECK_MSG(report["ok"].get<bool>(), "lic job ok");
    CHECK_MSG(report["images"].size() == 1, "one image entry");
    qs_string_free(report_c);
  }

  // run a DeepSC job over a noiseless channel
  {
    nlohmann::json job;
    job["mode"] = "deepsc";
    job["images"] = {ppm.string()};
    job["channel"] = "awgn";
    job["snr_db"] = 10.0;
    job["perfect_csi"] = true;
    char* report_c = nullptr;
    CHECK_MSG(qs_run_job(ctx, job.dump().c_str(), &report_c) == QS_OK, "run deepsc job");
    auto report = nlohmann::json::parse(report_c);
    CHECK_MSG(report["ok"].get<bool>(), "deepsc job ok");
    qs_string_free(report_c);
  }

  // bd metric via JSON curves
  {
    const char* a = "[{\"rate\":0.1,\"quality\":30},{\"rate\":0.2,\"quality\":33},"
                    "{\"rate\":0.4,\"quality\":36},{\"rate\":0.8,\"quality\":39}]";
    const char* b = "[{\"rate\":0.09,\"quality\":30},{\"rate\":0.18,\"quality\":33},"
                    "{\"rate\":0.36,\"quality\":36},{\"rate\":0.72,\"quality\":39}]";
    double pct = 0.0;
    CHECK_MSG(qs_bd_metric_json(a, b, &pct) == QS_OK, "bd metric");
    CHECK_MSG(std::fabs(pct + 10.0) < 0.01, "bd metric is -10%");
    CHECK_MSG(qs_bd_metric_json("nonsense", b, &pct) != QS_OK, "bad curve rejected");
  }

  // null-argument guards
  CHECK_MSG(qs_run_job(nullptr, "{}", nullptr) == QS_ERROR_INVALID_ARGUMENT, "null guard");
  CHECK_MSG(qs_context_create(nullptr, nullptr) == QS_ERROR_INVALID_ARGUMENT, "null out");

  qs_context_destroy(ctx);
  qs_context_destroy(nullptr);  // must be safe

  fs::remove_all(tmp);
  if (g_failures == 0) {
    std::printf("capi_tests: all checks passed\n");
    return 0;
  }
  std::printf("capi_tests: %d failures\n", g_failures);
  return 1;
}
