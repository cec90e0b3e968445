// SPDX-License-Identifier: Apache-2.0

#include "pipeline/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

#include "lic/codec.hpp"
#include "lic/transform.hpp"
#include "sideinfo/sideinfo.hpp"
#include "symbolizer/symbolizer.hpp"

namespace quadsim {

using nlohmann::json;

namespace {

constexpr int kReportFormatVersion = 1;

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> latents_to_f32(const LatentGrid& y) {
  std::vector<std::uint8_t> out;
  out.reserve(y.size() * 4);
  for (double v : y.values) {
    float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int i = 0; i < 4; ++i)
      out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xFF));
  }
  return out;
}

// Deterministic worker pool: results land by index, scheduling order is
// irrelevant to the output.
template <typename Fn>
void parallel_for_images(std::size_t n, Fn&& fn) {
  unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

json config_echo(const SystemConfig& config) { return json::parse(config.to_json()); }

json aggregate_mean(const json& images, std::initializer_list<const char*> keys) {
  json agg;
  for (const char* key : keys) {
    double sum = 0.0;
    int count = 0;
    for (const auto& img : images) {
      if (img.contains(key) && img[key].is_number()) {
        sum += img[key].get<double>();
        ++count;
      }
    }
    if (count > 0) agg[std::string("mean_") + key] = sum / count;
  }
  return agg;
}

json finalize_report(const std::string& mode, const SystemConfig& config, json images,
                     std::initializer_list<const char*> agg_keys) {
  json report;
  report["format_version"] = kReportFormatVersion;
  report["mode"] = mode;
  report["config"] = config_echo(config);
  bool ok = true;
  for (const auto& img : images)
    if (!img.value("ok", false)) ok = false;
  report["aggregate"] = aggregate_mean(images, agg_keys);
  report["images"] = std::move(images);
  report["ok"] = ok;
  return report;
}

json lic_one_image(const ImageInput& input, const RunOptions& options) {
  const SystemConfig& config = options.config;
  json entry;
  entry["id"] = input.id;
  entry["width"] = input.image.width;
  entry["height"] = input.image.height;

  LicEncodeResult enc = lic_encode(input.image, config);
  LicDecodeResult dec = lic_decode(enc.stream, config);

  const double pixels = static_cast<double>(input.image.pixel_count());
  const double total_bits = static_cast<double>(enc.stream.size()) * 8.0;
  entry["bpp"] = total_bits / pixels;
  entry["payload_bits"] = enc.payload_bits;
  entry["header_bits"] = enc.header_bits;
  entry["total_bits"] = enc.stream.size() * 8;
  entry["rate_bits_estimate"] = enc.rate_bits;
  entry["psnr_db"] = psnr(input.image, dec.image);
  double ms = ms_ssim(input.image, dec.image);
  entry["msssim"] = ms;
  entry["msssim_db"] = msssim_db({ms});

  // entropy/coder agreement gate: |payload - estimate| <= 1% + 64 bits
  double diff = std::fabs(static_cast<double>(enc.payload_bits) - enc.rate_bits);
  bool agree = diff <= 0.01 * enc.rate_bits + 64.0;
  entry["entropy_agreement"] = agree;

  if (options.dump_dir) {
    std::string base = *options.dump_dir + "/" + input.id;
    write_file(base + ".qlic", enc.stream);
    write_file(base + ".yhat.f32", latents_to_f32(enc.y_hat));
    write_file(base + ".recon.ppm", serialize_pnm(dec.image));
  }
  entry["ok"] = agree;
  return entry;
}

json deepsc_one_image(const ImageInput& input, const RunOptions& options,
                      const DeepscSettings& settings) {
  const SystemConfig& config = options.config;
  json entry;
  entry["id"] = input.id;
  entry["width"] = input.image.width;
  entry["height"] = input.image.height;

  const int b = config.block_size;
  if (input.image.channels * b * b != config.channels_cy)
    throw Error("deepsc: channels_cy must equal channels * block_size^2");
  if (input.image.height > 0xFFFF || input.image.width > 0xFFFF)
    throw Error("deepsc: image dims exceed format limit");

  // Transmitter: transform, entropy fields along the schedule, rate match,
  // orthogonal mapping, power-normalized frame.
  LatentDims dims = derive_latent_dims(input.image.height, input.image.width, config);
  ImagePlane padded = pad_replicate(input.image, dims.padded_h, dims.padded_w);
  BlockTransform transform(b, config.quant_step);
  LatentGrid y = transform.analyze(padded);
  HyperStats hyper = estimate_hyper(y, config.sigma_min);
  LatentCodeResult coded = encode_latents(y, hyper, config.context);

  std::vector<int> raw_k(coded.unit_bits.size());
  for (std::size_t u = 0; u < raw_k.size(); ++u) {
    double k = std::round(config.eta * coded.unit_bits[u]);
    raw_k[u] = static_cast<int>(std::clamp(k, 0.0, static_cast<double>(config.channels_cy)));
  }
  RateMap rate_map = rate_match(raw_k, y.h_y, y.w_y, config.rate_set);

  MappingBank bank(config.master_seed, config.channels_cy, config.rate_set);
  auto order = frame_unit_order(y.h_y, y.w_y);
  std::vector<std::vector<double>> units(order.size());
  std::vector<double> y_unit(static_cast<std::size_t>(config.channels_cy));
  for (std::size_t u = 0; u < order.size(); ++u) {
    auto [i, j] = order[u];
    for (int c = 0; c < config.channels_cy; ++c) y_unit[static_cast<std::size_t>(c)] = y.at(i, j, c);
    units[u] = map_unit(y_unit, hyper, rate_map.rate_at(i, j), bank);
  }
  SymbolFrame frame = pack_frame(units, rate_map);
  std::vector<std::uint8_t> side = encode_side_bundle(rate_map, hyper, frame.power_scale);

  bool power_ok = true;
  if (!frame.symbols.empty()) {
    double p = 0.0;
    for (const auto& s : frame.symbols) p += std::norm(s);
    p /= static_cast<double>(frame.symbols.size());
    power_ok = std::fabs(p - 1.0) <= 1e-6;
  }

  // Channel.
  std::string label = "img/" + input.id;
  ChannelRealization realization =
      realize(settings.channel, frame.symbols.size(), config.master_seed, label + "/channel");
  std::vector<cdouble> received =
      transmit(frame.symbols, realization, settings.channel, settings.snr_db);
  std::vector<cdouble> h_hat = csi_estimate(realization, settings.channel,
                                            settings.nmse_db, config.master_seed,
                                            label + "/csi");
  std::vector<cdouble> s_hat = zf_equalize(received, h_hat);

  // Receiver: side link is error-free; everything below uses only decoded
  // side information.
  SideBundle bundle = decode_side_bundle(side, config.rate_set, config.sigma_min);
  auto rx_units = unpack_frame(s_hat, bundle.power_scale, bundle.rate_map);
  LatentGrid y_rx(y.h_y, y.w_y, y.c_y);
  for (std::size_t u = 0; u < order.size(); ++u) {
    auto [i, j] = order[u];
    std::vector<double> rec =
        unmap_unit(rx_units[u], bundle.hyper, bundle.rate_map.rate_at(i, j), bank);
    for (int c = 0; c < config.channels_cy; ++c) y_rx.at(i, j, c) = rec[static_cast<std::size_t>(c)];
  }
  ImagePlane recon = crop(transform.synthesize(y_rx, input.image.channels),
                          input.image.height, input.image.width);

  LinkStats stats = measure_link(frame.symbols, realization, received, h_hat,
                                 !settings.nmse_db.has_value());
  CbrBreakdown cbr = cbr_report(frame.symbols.size(), static_cast<double>(bundle.total_bits),
                                input.image.height, input.image.width, config.side_link_eff);

  entry["symbol_count"] = frame.symbols.size();
  entry["side_bits_total"] = bundle.total_bits;
  entry["side_bits_map"] = bundle.map_bits;
  entry["cbr"] = {{"payload", cbr.payload_cbr}, {"side", cbr.side_cbr}, {"total", cbr.total_cbr}};
  entry["psnr_db"] = psnr(input.image, recon);
  double ms = ms_ssim(input.image, recon);
  entry["msssim"] = ms;
  entry["msssim_db"] = msssim_db({ms});
  entry["channel"] = {{"empirical_snr_db", stats.empirical_snr_db},
                      {"measured_nmse_db", stats.measured_nmse_db}};
  entry["seed_label"] = label;
  entry["power_normalized"] = power_ok;

  if (options.dump_dir) {
    std::string base = *options.dump_dir + "/" + input.id;
    write_file(base + ".y.f32", latents_to_f32(y));
    write_file(base + ".symbols.bin", serialize_symbols(frame.symbols));
    write_file(base + ".trace.bin", serialize_trace(realization));
    write_file(base + ".side.bin", side);
    write_file(base + ".recon.ppm", serialize_pnm(recon));
  }
  entry["ok"] = power_ok;
  return entry;
}

json baseline_one_image(const ImageInput& input, const RunOptions& options, double snr_db) {
  const SystemConfig& config = options.config;
  json entry;
  entry["id"] = input.id;
  entry["width"] = input.image.width;
  entry["height"] = input.image.height;

  LicEncodeResult enc = lic_encode(input.image, config);
  LicDecodeResult dec = lic_decode(enc.stream, config);
  double lic_bits = static_cast<double>(enc.stream.size()) * 8.0;
  double capacity = std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
  double n = 3.0 * input.image.pixel_count();

  entry["lic_bits"] = lic_bits;
  entry["capacity_bits_per_use"] = capacity;
  entry["cbr_baseline"] = lic_bits / (n * capacity);
  entry["psnr_db"] = psnr(input.image, dec.image);
  double ms = ms_ssim(input.image, dec.image);
  entry["msssim"] = ms;
  entry["msssim_db"] = msssim_db({ms});
  entry["label"] = "IDEALIZED";  // Shannon-limit separate coding, not a practical stack
  entry["ok"] = true;
  return entry;
}

template <typename PerImage>
json run_images(const std::vector<ImageInput>& images, PerImage&& per_image) {
  std::vector<json> results(images.size());
  parallel_for_images(images.size(), [&](std::size_t i) {
    try {
      results[i] = per_image(images[i]);
    } catch (const std::exception& e) {
      json err;
      err["id"] = images[i].id;
      err["error"] = e.what();
      err["ok"] = false;
      results[i] = std::move(err);
    }
  });
  json arr = json::array();
  for (auto& r : results) arr.push_back(std::move(r));
  return arr;
}

void ensure_dump_dir(const RunOptions& options) {
  if (options.dump_dir) std::filesystem::create_directories(*options.dump_dir);
}

}  // namespace

json run_lic_images(const std::vector<ImageInput>& images, const RunOptions& options) {
  require_valid(options.config);
  ensure_dump_dir(options);
  json arr = run_images(images, [&](const ImageInput& in) { return lic_one_image(in, options); });
  return finalize_report("lic", options.config, std::move(arr),
                         {"bpp", "psnr_db", "msssim_db"});
}

json run_deepsc_images(const std::vector<ImageInput>& images, const RunOptions& options,
                       const DeepscSettings& settings) {
  require_valid(options.config);
  settings.channel.validate();
  ensure_dump_dir(options);
  json arr = run_images(images, [&](const ImageInput& in) {
    return deepsc_one_image(in, options, settings);
  });
  json report = finalize_report("deepsc", options.config, std::move(arr),
                                {"psnr_db", "msssim_db"});
  report["channel"] = json::parse(settings.channel.to_json());
  report["snr_db"] = settings.snr_db;
  if (settings.nmse_db) {
    report["nmse_db"] = *settings.nmse_db;
  } else {
    report["perfect_csi"] = true;
  }
  // mean total CBR belongs in the aggregate but lives one level deep
  double cbr_sum = 0.0;
  int cbr_cnt = 0;
  for (const auto& img : report["images"]) {
    if (img.contains("cbr")) {
      cbr_sum += img["cbr"]["total"].get<double>();
      ++cbr_cnt;
    }
  }
  if (cbr_cnt > 0) report["aggregate"]["mean_cbr_total"] = cbr_sum / cbr_cnt;
  return report;
}

json run_baseline_images(const std::vector<ImageInput>& images, const RunOptions& options,
                         double snr_db) {
  require_valid(options.config);
  if (std::isinf(snr_db) && snr_db < 0) throw Error("baseline: SNR must exceed -inf");
  json arr = run_images(images, [&](const ImageInput& in) {
    return baseline_one_image(in, options, snr_db);
  });
  json report = finalize_report("baseline", options.config, std::move(arr),
                                {"cbr_baseline", "psnr_db", "msssim_db"});
  report["snr_db"] = snr_db;
  return report;
}

json run_sweep(const std::string& axis, const json& values,
               const std::vector<ImageInput>& images, const RunOptions& options,
               const DeepscSettings& base_settings) {
  if (!values.is_array() || values.size() < 2)
    throw Error("sweep: need at least 2 values");
  json runs = json::array();
  json points = json::array();
  for (const auto& value : values) {
    RunOptions opts = options;
    DeepscSettings settings = base_settings;
    json run;
    if (axis == "eta") {
      opts.config.eta = value.get<double>();
      run = run_deepsc_images(images, opts, settings);
    } else if (axis == "snr") {
      settings.snr_db = value.get<double>();
      run = run_deepsc_images(images, opts, settings);
    } else if (axis == "delta") {
      opts.config.quant_step = value.get<double>();
      run = run_lic_images(images, opts);
    } else if (axis == "channel") {
      settings.channel = ChannelModel::from_name(value.get<std::string>());
      run = run_deepsc_images(images, opts, settings);
    } else {
      throw Error("sweep: unknown axis \"" + axis + "\" (eta|snr|delta|channel)");
    }
    json point;
    point["value"] = value;
    point["rate"] = axis == "delta" ? run["aggregate"]["mean_bpp"]
                                    : run["aggregate"]["mean_cbr_total"];
    point["quality"] = run["aggregate"]["mean_psnr_db"];
    points.push_back(std::move(point));
    runs.push_back(std::move(run));
  }
  json report;
  report["format_version"] = kReportFormatVersion;
  report["mode"] = "sweep";
  report["axis"] = axis;
  report["config"] = config_echo(options.config);
  report["points"] = std::move(points);
  report["runs"] = std::move(runs);
  bool ok = true;
  for (const auto& r : report["runs"])
    if (!r.value("ok", false)) ok = false;
  report["ok"] = ok;
  return report;
}

bool report_ok(const json& report) { return report.value("ok", false); }

std::vector<RdPoint> sweep_rd_points(const json& sweep_report) {
  std::vector<RdPoint> pts;
  if (!sweep_report.contains("points"))
    throw Error("sweep_rd_points: not a sweep report");
  for (const auto& p : sweep_report["points"])
    pts.push_back({p["rate"].get<double>(), p["quality"].get<double>()});
  return pts;
}

std::vector<ImageInput> load_images(const std::vector<std::string>& paths) {
  std::vector<ImageInput> images;
  images.reserve(paths.size());
  for (const auto& path : paths) {
    ImageInput in;
    in.id = std::filesystem::path(path).stem().string();
    in.image = read_pnm(path);
    images.push_back(std::move(in));
  }
  return images;
}

}  // namespace quadsim
