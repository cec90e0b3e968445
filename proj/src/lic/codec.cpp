// SPDX-License-Identifier: Apache-2.0

#include "lic/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "lic/transform.hpp"

namespace quadsim {

TableCache::TableCache(const HyperStats& hyper, const ContextParams& params)
    : hyper_(&hyper), params_(params) {}

double TableCache::sigma_eff(int sigma_level, int step) const {
  return std::max(hyper_->sigma_min(),
                  hyper_->sigma_grid_value(sigma_level) * params_.sigma_mult[step]);
}

int TableCache::r_max_for_sigma(double sigma_eff) {
  int r = static_cast<int>(std::ceil(8.0 * sigma_eff));
  return std::clamp(r, 1, 2048);
}

const CdfTable& TableCache::table_for(int sigma_level, int step) {
  int key = sigma_level * 4 + step;
  auto it = tables_.find(key);
  if (it == tables_.end()) {
    double se = sigma_eff(sigma_level, step);
    it = tables_
             .emplace(key, std::make_unique<CdfTable>(0.0, se, hyper_->sigma_min(),
                                                      r_max_for_sigma(se)))
             .first;
  }
  return *it->second;
}

namespace {

// Shared schedule walk. Visits elements in canonical symbol order and hands
// each one to the sink along with its predicted parameters and table.
template <typename Sink>
void walk_schedule(const CodingSchedule& schedule, const HyperStats& hyper,
                   TableCache& cache, CodingContext& ctx, Sink&& sink) {
  const int gs = schedule.group_size();
  for (int step = 0; step < 4; ++step) {
    for (int ci = 0; ci < schedule.h_y() / 2; ++ci) {
      for (int cj = 0; cj < schedule.w_y() / 2; ++cj) {
        for (int c = 0; c < schedule.c_y(); ++c) {
          int g = c / gs;
          auto [dy, dx] = schedule.cell_offset(g, step);
          int i = 2 * ci + dy, j = 2 * cj + dx;
          auto [mu, sigma] = ctx.predict(step, i, j, c);
          const CdfTable& table = cache.table_for(hyper.sigma_index(c), step);
          sink(step, i, j, c, mu, sigma, table);
        }
      }
    }
    ctx.end_step();
  }
}

}  // namespace

LatentCodeResult encode_latents(const LatentGrid& y, const HyperStats& hyper,
                                const ContextParams& params) {
  CodingSchedule schedule(y.h_y, y.w_y, y.c_y);
  if (hyper.channels() != y.c_y) throw Error("encode_latents: hyper channels mismatch");
  TableCache cache(hyper, params);
  CodingContext ctx(schedule, hyper, params);

  LatentCodeResult res;
  res.y_hat = LatentGrid(y.h_y, y.w_y, y.c_y);
  res.unit_bits.assign(static_cast<std::size_t>(y.h_y) * y.w_y, 0.0);

  std::vector<std::int32_t> residuals;
  std::vector<const CdfTable*> tables;
  residuals.reserve(y.size());
  tables.reserve(y.size());

  const double sigma_min = hyper.sigma_min();
  walk_schedule(schedule, hyper, cache, ctx,
                [&](int step, int i, int j, int c, double mu, double sigma,
                    const CdfTable& table) {
                  double v = y.at(i, j, c);
                  if (!std::isfinite(v)) throw Error("encode_latents: non-finite latent");
                  long long n = std::llround(v - mu);
                  if (n < INT32_MIN || n > INT32_MAX)
                    throw Error("encode_latents: residual exceeds 32-bit range");
                  double y_hat = static_cast<double>(n) + mu;
                  res.y_hat.at(i, j, c) = y_hat;
                  residuals.push_back(static_cast<std::int32_t>(n));
                  tables.push_back(&table);
                  double bits = -std::log2(likelihood(y_hat, mu, sigma, sigma_min));
                  res.rate_bits += bits;
                  res.step_rate_bits[static_cast<std::size_t>(step)] += bits;
                  res.unit_bits[static_cast<std::size_t>(i) * y.w_y + j] -=
                      std::log2(likelihood(v, mu, sigma, sigma_min));
                  ctx.push_decoded(i, j, c, y_hat);
                });

  res.payload = encode_residuals(residuals, tables);
  return res;
}

LatentGrid decode_latents(const std::vector<std::uint8_t>& payload, int h_y, int w_y,
                          const HyperStats& hyper, const ContextParams& params) {
  CodingSchedule schedule(h_y, w_y, hyper.channels());
  TableCache cache(hyper, params);
  CodingContext ctx(schedule, hyper, params);

  LatentGrid y_hat(h_y, w_y, hyper.channels());
  RangeDecoder dec(payload);
  walk_schedule(schedule, hyper, cache, ctx,
                [&](int /*step*/, int i, int j, int c, double mu, double /*sigma*/,
                    const CdfTable& table) {
                  int sym = dec.decode_symbol(table);
                  std::int32_t n;
                  if (sym == table.esc_low() || sym == table.esc_high()) {
                    std::uint32_t u = 0;
                    for (int b = 0; b < 4; ++b) u = (u << 8) | dec.decode_raw_byte();
                    n = static_cast<std::int32_t>(u);
                  } else {
                    n = sym - table.r_max();
                  }
                  double v = static_cast<double>(n) + mu;
                  y_hat.at(i, j, c) = v;
                  ctx.push_decoded(i, j, c, v);
                });
  return y_hat;
}

namespace {

constexpr char kMagic[4] = {'Q', 'L', 'I', 'C'};
constexpr std::uint8_t kVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

struct Reader {
  const std::vector<std::uint8_t>* in;
  std::size_t pos = 0;

  std::uint8_t u8() {
    if (pos >= in->size()) throw FormatError("lic stream: truncated header");
    return (*in)[pos++];
  }
  std::uint16_t u16() {
    std::uint16_t lo = u8(), hi = u8();
    return static_cast<std::uint16_t>(lo | (hi << 8));
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  float f32() {
    std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
};

}  // namespace

LicEncodeResult lic_encode(const ImagePlane& image, const SystemConfig& config) {
  require_valid(config);
  const int b = config.block_size;
  if (image.channels * b * b != config.channels_cy)
    throw Error("lic_encode: channels_cy must equal channels * block_size^2");
  if (image.height < 1 || image.width < 1) throw Error("lic_encode: empty image");
  if (image.height > 0xFFFF || image.width > 0xFFFF)
    throw Error("lic_encode: image dims exceed format limit");

  LatentDims dims = derive_latent_dims(image.height, image.width, config);
  ImagePlane padded = pad_replicate(image, dims.padded_h, dims.padded_w);
  BlockTransform transform(b, config.quant_step);
  LatentGrid y = transform.analyze(padded);
  HyperStats hyper = estimate_hyper(y, config.sigma_min);

  LatentCodeResult coded = encode_latents(y, hyper, config.context);

  LicEncodeResult out;
  out.rate_bits = coded.rate_bits;
  out.payload_bits = coded.payload.size() * 8;
  out.y_hat = std::move(coded.y_hat);

  std::vector<std::uint8_t>& s = out.stream;
  s.insert(s.end(), kMagic, kMagic + 4);
  s.push_back(kVersion);
  put_u16(s, static_cast<std::uint16_t>(image.height));
  put_u16(s, static_cast<std::uint16_t>(image.width));
  s.push_back(static_cast<std::uint8_t>(b));
  put_u16(s, static_cast<std::uint16_t>(config.channels_cy));
  put_f32(s, static_cast<float>(config.quant_step));
  put_u32(s, config.coding_digest());
  hyper.serialize(s);
  put_u32(s, static_cast<std::uint32_t>(coded.payload.size()));
  out.header_bits = s.size() * 8;
  s.insert(s.end(), coded.payload.begin(), coded.payload.end());
  return out;
}

LicDecodeResult lic_decode(const std::vector<std::uint8_t>& stream,
                           const SystemConfig& config) {
  require_valid(config);
  Reader r{&stream};
  char magic[4];
  for (char& m : magic) m = static_cast<char>(r.u8());
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("lic stream: bad magic");
  if (r.u8() != kVersion) throw FormatError("lic stream: unsupported version");
  int orig_h = r.u16();
  int orig_w = r.u16();
  int block = r.u8();
  int c_y = r.u16();
  float delta = r.f32();
  std::uint32_t digest = r.u32();
  if (digest != config.coding_digest())
    throw Error("lic stream: config digest mismatch");
  if (block != config.block_size || c_y != config.channels_cy ||
      delta != static_cast<float>(config.quant_step))
    throw Error("lic stream: header fields disagree with config");

  HyperStats hyper = HyperStats::deserialize(stream, r.pos, config.sigma_min);
  if (hyper.channels() != c_y) throw FormatError("lic stream: stats channel mismatch");
  std::uint32_t payload_len = r.u32();
  if (stream.size() - r.pos < payload_len) throw FormatError("lic stream: truncated payload");
  std::vector<std::uint8_t> payload(stream.begin() + static_cast<std::ptrdiff_t>(r.pos),
                                    stream.begin() + static_cast<std::ptrdiff_t>(r.pos + payload_len));

  LatentDims dims = derive_latent_dims(orig_h, orig_w, config);
  LatentGrid y_hat = decode_latents(payload, dims.h_y, dims.w_y, hyper, config.context);

  BlockTransform transform(block, delta);
  int channels = c_y / (block * block);
  ImagePlane padded = transform.synthesize(y_hat, channels);

  LicDecodeResult out;
  out.image = crop(padded, orig_h, orig_w);
  out.y_hat = std::move(y_hat);
  return out;
}

}  // namespace quadsim
