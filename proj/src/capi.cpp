// SPDX-License-Identifier: Apache-2.0

#include "quadsim.h"

#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/image.hpp"
#include "lic/codec.hpp"
#include "metrics/metrics.hpp"
#include "pipeline/pipeline.hpp"

using nlohmann::json;

struct qs_context {
  quadsim::SystemConfig config;
  std::string last_error;
};

namespace {

thread_local std::string g_last_error;

qs_status classify(const std::exception& e) {
  if (dynamic_cast<const quadsim::IoError*>(&e)) return QS_ERROR_IO;
  if (dynamic_cast<const quadsim::FormatError*>(&e)) return QS_ERROR_FORMAT;
  if (dynamic_cast<const quadsim::Error*>(&e)) return QS_ERROR_INVALID_ARGUMENT;
  return QS_ERROR_RUNTIME;
}

template <typename Fn>
qs_status guarded(qs_context* ctx, Fn&& fn) {
  std::string* sink = ctx ? &ctx->last_error : &g_last_error;
  try {
    fn();
    sink->clear();
    return QS_OK;
  } catch (const std::exception& e) {
    *sink = e.what();
    return classify(e);
  } catch (...) {
    *sink = "unknown error";
    return QS_ERROR_RUNTIME;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<quadsim::RdPoint> parse_curve(const char* text) {
  if (!text) throw quadsim::Error("curve JSON is null");
  json j = json::parse(text);
  if (j.is_object() && j.contains("points")) return quadsim::sweep_rd_points(j);
  if (!j.is_array()) throw quadsim::FormatError("curve: expected array of points");
  std::vector<quadsim::RdPoint> pts;
  for (const auto& p : j)
    pts.push_back({p.at("rate").get<double>(), p.at("quality").get<double>()});
  return pts;
}

quadsim::DeepscSettings settings_from_job(const json& job) {
  quadsim::DeepscSettings s;
  if (job.contains("channel")) {
    s.channel = quadsim::ChannelModel::from_json(job["channel"].dump());
  }
  if (job.contains("snr_db")) {
    if (job["snr_db"].is_string() && job["snr_db"].get<std::string>() == "inf") {
      s.snr_db = std::numeric_limits<double>::infinity();
    } else {
      s.snr_db = job["snr_db"].get<double>();
    }
  }
  if (job.contains("nmse_db") && !job["nmse_db"].is_null())
    s.nmse_db = job["nmse_db"].get<double>();
  if (job.value("perfect_csi", false)) s.nmse_db.reset();
  return s;
}

}  // namespace

extern "C" {

const char* qs_version(void) { return "1.0.0"; }

qs_status qs_context_create(const char* config_json, qs_context** out) {
  if (!out) return QS_ERROR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded(nullptr, [&]() {
    auto ctx = std::make_unique<qs_context>();
    ctx->config = config_json ? quadsim::SystemConfig::from_json(config_json)
                              : quadsim::SystemConfig::defaults();
    quadsim::require_valid(ctx->config);
    *out = ctx.release();
  });
}

qs_status qs_context_create_from_file(const char* path, qs_context** out) {
  if (!out || !path) return QS_ERROR_INVALID_ARGUMENT;
  *out = nullptr;
  return guarded(nullptr, [&]() {
    auto ctx = std::make_unique<qs_context>();
    ctx->config = quadsim::SystemConfig::from_json_file(path);
    quadsim::require_valid(ctx->config);
    *out = ctx.release();
  });
}

void qs_context_destroy(qs_context* ctx) { delete ctx; }

const char* qs_context_last_error(const qs_context* ctx) {
  return ctx ? ctx->last_error.c_str() : g_last_error.c_str();
}

const char* qs_last_error(void) { return g_last_error.c_str(); }

qs_status qs_context_config_json(qs_context* ctx, char** out_json) {
  if (!ctx || !out_json) return QS_ERROR_INVALID_ARGUMENT;
  return guarded(ctx, [&]() { *out_json = dup_string(ctx->config.to_json()); });
}

qs_status qs_lic_encode_file(qs_context* ctx, const char* image_path,
                             const char* stream_path) {
  if (!ctx || !image_path || !stream_path) return QS_ERROR_INVALID_ARGUMENT;
  return guarded(ctx, [&]() {
    quadsim::ImagePlane img = quadsim::read_pnm(image_path);
    quadsim::LicEncodeResult enc = quadsim::lic_encode(img, ctx->config);
    std::ofstream out(stream_path, std::ios::binary);
    if (!out) throw quadsim::IoError(std::string("cannot write ") + stream_path);
    out.write(reinterpret_cast<const char*>(enc.stream.data()),
              static_cast<std::streamsize>(enc.stream.size()));
  });
}

qs_status qs_lic_decode_file(qs_context* ctx, const char* stream_path,
                             const char* image_path) {
  if (!ctx || !image_path || !stream_path) return QS_ERROR_INVALID_ARGUMENT;
  return guarded(ctx, [&]() {
    std::ifstream in(stream_path, std::ios::binary);
    if (!in) throw quadsim::IoError(std::string("cannot open ") + stream_path);
    std::vector<std::uint8_t> stream((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    quadsim::LicDecodeResult dec = quadsim::lic_decode(stream, ctx->config);
    quadsim::write_pnm(dec.image, image_path);
  });
}

qs_status qs_run_job(qs_context* ctx, const char* job_json, char** out_report_json) {
  if (!ctx || !job_json || !out_report_json) return QS_ERROR_INVALID_ARGUMENT;
  *out_report_json = nullptr;
  return guarded(ctx, [&]() {
    json job = json::parse(job_json);
    std::string mode = job.at("mode").get<std::string>();
    auto images = quadsim::load_images(job.at("images").get<std::vector<std::string>>());

    quadsim::RunOptions options;
    options.config = ctx->config;
    if (job.contains("dump_dir") && !job["dump_dir"].is_null())
      options.dump_dir = job["dump_dir"].get<std::string>();

    json report;
    if (mode == "lic") {
      report = quadsim::run_lic_images(images, options);
    } else if (mode == "deepsc") {
      report = quadsim::run_deepsc_images(images, options, settings_from_job(job));
    } else if (mode == "baseline") {
      report = quadsim::run_baseline_images(images, options,
                                            job.value("snr_db", 10.0));
    } else if (mode == "sweep") {
      report = quadsim::run_sweep(job.at("axis").get<std::string>(), job.at("values"),
                                  images, options, settings_from_job(job));
    } else {
      throw quadsim::Error("job: unknown mode \"" + mode + "\"");
    }
    *out_report_json = dup_string(report.dump(2));
  });
}

qs_status qs_bd_metric_json(const char* curve_a_json, const char* curve_b_json,
                            double* out_percent) {
  if (!curve_a_json || !curve_b_json || !out_percent) return QS_ERROR_INVALID_ARGUMENT;
  return guarded(nullptr, [&]() {
    *out_percent = quadsim::bd_metric(parse_curve(curve_a_json), parse_curve(curve_b_json));
  });
}

void qs_string_free(char* s) { delete[] s; }

}  // extern "C"
