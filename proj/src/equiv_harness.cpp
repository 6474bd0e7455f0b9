// Copyright 2026 The WMCG Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wmcg/equiv_harness.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "json.hpp"
#include "wmcg/error.hpp"

namespace wmcg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kBlobTag = 0xB10B;
constexpr std::uint64_t kNoiseTag = 0x401E;

Tensor4D SmoothBlobs(int channels, int size, std::uint64_t seed) {
  constexpr int kBlobs = 8;
  Tensor4D out(channels, size, size, size);
  const double sigma_hi = std::max(2.0, size / 6.0);
  for (int c = 0; c < channels; ++c) {
    KeyedStream s = KeyedStream::ForPath(seed, {kBlobTag, static_cast<std::uint64_t>(c)});
    for (int b = 0; b < kBlobs; ++b) {
      double center[3];
      double inv_sigma[3];
      for (int a = 0; a < 3; ++a) center[a] = s.NextUniform(0.0, size);
      for (int a = 0; a < 3; ++a) inv_sigma[a] = 1.0 / s.NextUniform(1.5, sigma_hi);
      const double amp = s.NextUniform(-1.0, 1.0);
      for (int z = 0; z < size; ++z) {
        const double dz = (z - center[2]) * inv_sigma[2];
        for (int y = 0; y < size; ++y) {
          const double dy = (y - center[1]) * inv_sigma[1];
          for (int x = 0; x < size; ++x) {
            const double dx = (x - center[0]) * inv_sigma[0];
            out.at(c, z, y, x) += amp * std::exp(-0.5 * (dx * dx + dy * dy + dz * dz));
          }
        }
      }
    }
  }
  return out;
}

Tensor4D BandlimitedNoise(int channels, int size, std::uint64_t seed) {
  // Periodic grid frequencies m / N with |m| / N <= 1/8, one of each +-m pair,
  // with a Hann taper in |m| so little energy sits at the cutoff.
  const double cutoff = size / 8.0;
  const int mmax = static_cast<int>(std::floor(cutoff));
  struct Mode {
    int mx, my, mz;
    double gain;
  };
  std::vector<Mode> modes;
  for (int mz = 0; mz <= mmax; ++mz) {
    for (int my = -mmax; my <= mmax; ++my) {
      for (int mx = -mmax; mx <= mmax; ++mx) {
        if (mx * mx + my * my + mz * mz > cutoff * cutoff) continue;
        const bool upper = mz > 0 || (mz == 0 && my > 0) || (mz == 0 && my == 0 && mx > 0);
        if (!upper) continue;
        const double r = std::sqrt(static_cast<double>(mx * mx + my * my + mz * mz)) / cutoff;
        const double taper = std::cos(0.5 * kPi * r);
        modes.push_back({mx, my, mz, taper * taper});
      }
    }
  }
  // phase[m + mmax][i] = exp(2 pi i m i / N)
  std::vector<std::vector<std::complex<double>>> phase(2 * mmax + 1,
                                                       std::vector<std::complex<double>>(size));
  for (int m = -mmax; m <= mmax; ++m) {
    for (int i = 0; i < size; ++i) {
      const double ang = 2.0 * kPi * ((static_cast<long>(m) * i) % size) / size;
      phase[m + mmax][i] = {std::cos(ang), std::sin(ang)};
    }
  }
  Tensor4D out(channels, size, size, size);
  double power = 0;
  for (const Mode& md : modes) power += md.gain * md.gain;
  const double norm = power > 0 ? 1.0 / std::sqrt(power) : 0.0;
  for (int c = 0; c < channels; ++c) {
    KeyedStream s = KeyedStream::ForPath(seed, {kNoiseTag, static_cast<std::uint64_t>(c)});
    for (const Mode& md : modes) {
      const double a = s.NextNormal() * norm * md.gain;
      const double b = s.NextNormal() * norm * md.gain;
      const auto& px = phase[md.mx + mmax];
      const auto& py = phase[md.my + mmax];
      const auto& pz = phase[md.mz + mmax];
      for (int z = 0; z < size; ++z) {
        for (int y = 0; y < size; ++y) {
          const std::complex<double> yz = py[y] * pz[z];
          double* row = &out.at(c, z, y, 0);
          for (int x = 0; x < size; ++x) {
            const std::complex<double> e = px[x] * yz;
            row[x] += a * e.real() + b * e.imag();
          }
        }
      }
    }
  }
  return out;
}

Vec3 Center(const Tensor4D& vol) {
  return {0.5 * (vol.width - 1), 0.5 * (vol.height - 1), 0.5 * (vol.depth - 1)};
}

}  // namespace

Tensor4D SynthVolume(VolumeKind kind, int channels, int size, std::uint64_t seed) {
  if (size < 16) throw Error(ErrorCode::kInvalidArgument, "volume size must be >= 16");
  if (channels < 1) throw Error(ErrorCode::kInvalidArgument, "channels must be positive");
  return kind == VolumeKind::kSmoothBlobs ? SmoothBlobs(channels, size, seed)
                                          : BandlimitedNoise(channels, size, seed);
}

Tensor4D ResampleVolume(const Tensor4D& vol, const VolumeTransformSpec& spec) {
  const double det = Determinant(spec.linear);
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw Error(ErrorCode::kInvalidArgument, "volume transform must have positive determinant");
  }
  const Mat3 inv = Inverse(spec.linear);
  const Vec3 c = Center(vol);
  const int dims[3] = {vol.width, vol.height, vol.depth};
  Tensor4D out(vol.channels, vol.depth, vol.height, vol.width);
  const bool wrap = spec.out_of_range == OutOfRange::kWrap;

  auto fetch = [&](int ch, int ix, int iy, int iz) -> double {
    if (wrap) {
      ix = ((ix % dims[0]) + dims[0]) % dims[0];
      iy = ((iy % dims[1]) + dims[1]) % dims[1];
      iz = ((iz % dims[2]) + dims[2]) % dims[2];
    } else if (ix < 0 || iy < 0 || iz < 0 || ix >= dims[0] || iy >= dims[1] || iz >= dims[2]) {
      return 0.0;
    }
    return vol.at(ch, iz, iy, ix);
  };

  ParallelFor(vol.depth, [&](int z) {
    for (int y = 0; y < vol.height; ++y) {
      for (int x = 0; x < vol.width; ++x) {
        const Vec3 q = inv * Vec3{x - c[0], y - c[1], z - c[2]};
        const Vec3 p{q[0] + c[0], q[1] + c[1], q[2] + c[2]};
        if (spec.interpolation == Interpolation::kNearestNeighbor) {
          const int ix = static_cast<int>(std::floor(p[0] + 0.5));
          const int iy = static_cast<int>(std::floor(p[1] + 0.5));
          const int iz = static_cast<int>(std::floor(p[2] + 0.5));
          for (int ch = 0; ch < vol.channels; ++ch) out.at(ch, z, y, x) = fetch(ch, ix, iy, iz);
          continue;
        }
        const double fx = std::floor(p[0]);
        const double fy = std::floor(p[1]);
        const double fz = std::floor(p[2]);
        const int ix = static_cast<int>(fx);
        const int iy = static_cast<int>(fy);
        const int iz = static_cast<int>(fz);
        const double tx = p[0] - fx;
        const double ty = p[1] - fy;
        const double tz = p[2] - fz;
        for (int ch = 0; ch < vol.channels; ++ch) {
          double v = 0;
          for (int dz = 0; dz < 2; ++dz) {
            const double wz = dz ? tz : 1.0 - tz;
            for (int dy = 0; dy < 2; ++dy) {
              const double wy = dy ? ty : 1.0 - ty;
              for (int dx = 0; dx < 2; ++dx) {
                const double w = (dx ? tx : 1.0 - tx) * wy * wz;
                if (w != 0.0) v += w * fetch(ch, ix + dx, iy + dy, iz + dz);
              }
            }
          }
          out.at(ch, z, y, x) = v;
        }
      }
    }
  });
  return out;
}

KernelBank RotateKernelBank(const KernelBank& bank, const Mat3& quarter_turn) {
  for (double v : quarter_turn.m) {
    if (v != 0.0 && v != 1.0 && v != -1.0) {
      throw Error(ErrorCode::kInvalidArgument, "transform is not a signed permutation");
    }
  }
  const Mat3 inv = Transpose(quarter_turn);
  const int k = bank.size;
  const int h = k / 2;
  KernelBank out(bank.c_out, bank.c_in, k);
  for (int co = 0; co < bank.c_out; ++co) {
    for (int ci = 0; ci < bank.c_in; ++ci) {
      const double* src = bank.Kernel(co, ci);
      double* dst = out.Kernel(co, ci);
      for (int z = 0; z < k; ++z) {
        for (int y = 0; y < k; ++y) {
          for (int x = 0; x < k; ++x) {
            const Vec3 s = inv * Vec3{double(x - h), double(y - h), double(z - h)};
            const int sx = static_cast<int>(s[0]) + h;
            const int sy = static_cast<int>(s[1]) + h;
            const int sz = static_cast<int>(s[2]) + h;
            dst[(z * k + y) * k + x] = src[(sz * k + sy) * k + sx];
          }
        }
      }
    }
  }
  return out;
}

std::vector<char> InteriorMask(int depth, int height, int width, const Mat3& linear,
                               int crop_margin) {
  const Mat3 inv = Inverse(linear);
  const double m = crop_margin;
  const Vec3 c{0.5 * (width - 1), 0.5 * (height - 1), 0.5 * (depth - 1)};
  const double hi[3] = {width - 1.0, height - 1.0, depth - 1.0};
  constexpr double kSlack = 1e-9;
  auto preimage = [&](double x, double y, double z) {
    const Vec3 q = inv * Vec3{x - c[0], y - c[1], z - c[2]};
    return Vec3{q[0] + c[0], q[1] + c[1], q[2] + c[2]};
  };
  auto inside = [&](const Vec3& p, double margin) {
    for (int a = 0; a < 3; ++a) {
      if (p[a] < margin - kSlack || p[a] > hi[a] - margin + kSlack) return false;
    }
    return true;
  };
  std::vector<char> mask(static_cast<std::size_t>(depth) * height * width, 0);
  for (int z = crop_margin; z < depth - crop_margin; ++z) {
    for (int y = crop_margin; y < height - crop_margin; ++y) {
      for (int x = crop_margin; x < width - crop_margin; ++x) {
        if (!inside(preimage(x, y, z), m)) continue;
        bool ok = true;
        for (int corner = 0; corner < 8 && ok; ++corner) {
          const double cx = x + ((corner & 1) ? m : -m);
          const double cy = y + ((corner & 2) ? m : -m);
          const double cz = z + ((corner & 4) ? m : -m);
          ok = inside(preimage(cx, cy, cz), 0.0);
        }
        if (ok) mask[(static_cast<std::size_t>(z) * height + y) * width + x] = 1;
      }
    }
  }
  return mask;
}

EquivarianceError MeasureEquivariance(const Layer& layer, const Tensor4D& vol,
                                      const VolumeTransformSpec& spec, int crop_margin) {
  return MeasureEquivariance(layer, layer, vol, spec, crop_margin);
}

EquivarianceError MeasureEquivariance(const Layer& layer_on_transformed, const Layer& layer,
                                      const Tensor4D& vol, const VolumeTransformSpec& spec,
                                      int crop_margin) {
  if (crop_margin < 0) throw Error(ErrorCode::kInvalidArgument, "crop margin must be >= 0");
  const Tensor4D a = layer_on_transformed(ResampleVolume(vol, spec));
  const Tensor4D b = ResampleVolume(layer(vol), spec);
  if (!a.SameShape(b) || a.depth != vol.depth || a.height != vol.height ||
      a.width != vol.width) {
    throw Error(ErrorCode::kLayerContractViolation, "layer changed the spatial dims");
  }
  const auto mask = InteriorMask(vol.depth, vol.height, vol.width, spec.linear, crop_margin);
  const std::size_t nv = a.Voxels();
  double diff2 = 0;
  double ref2 = 0;
  EquivarianceError err;
  for (std::size_t v = 0; v < nv; ++v) err.voxels += mask[v] ? 1 : 0;
  for (int ch = 0; ch < a.channels; ++ch) {
    const std::size_t base = static_cast<std::size_t>(ch) * nv;
    for (std::size_t v = 0; v < nv; ++v) {
      if (!mask[v]) continue;
      const double d = a.values[base + v] - b.values[base + v];
      diff2 += d * d;
      ref2 += b.values[base + v] * b.values[base + v];
      err.max_abs = std::max(err.max_abs, std::abs(d));
    }
  }
  err.rel_l2 = std::sqrt(diff2) / std::max(std::sqrt(ref2), 1e-30);
  return err;
}

Tensor4D ShiftVolume(const Tensor4D& vol, const IntVec3& shift) {
  Tensor4D out(vol.channels, vol.depth, vol.height, vol.width);
  auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
  for (int ch = 0; ch < vol.channels; ++ch) {
    for (int z = 0; z < vol.depth; ++z) {
      const int tz = wrap(z + shift[2], vol.depth);
      for (int y = 0; y < vol.height; ++y) {
        const int ty = wrap(y + shift[1], vol.height);
        for (int x = 0; x < vol.width; ++x) {
          out.at(ch, tz, ty, wrap(x + shift[0], vol.width)) = vol.at(ch, z, y, x);
        }
      }
    }
  }
  return out;
}

EquivarianceError MeasureTranslationEquivariance(const Layer& layer, const Tensor4D& vol,
                                                 const IntVec3& shift) {
  const Tensor4D a = layer(ShiftVolume(vol, shift));
  const Tensor4D b = ShiftVolume(layer(vol), shift);
  if (!a.SameShape(b)) {
    throw Error(ErrorCode::kLayerContractViolation, "layer changed the spatial dims");
  }
  EquivarianceError err;
  err.voxels = a.Voxels();
  double diff2 = 0;
  double ref2 = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    diff2 += d * d;
    ref2 += b.values[i] * b.values[i];
    err.max_abs = std::max(err.max_abs, std::abs(d));
  }
  err.rel_l2 = std::sqrt(diff2) / std::max(std::sqrt(ref2), 1e-30);
  return err;
}

const char* FamilyName(TransformFamily family) {
  switch (family) {
    case TransformFamily::kIdentity: return "identity";
    case TransformFamily::kRotation: return "rotation";
    case TransformFamily::kScaling: return "scaling";
    case TransformFamily::kShear: return "shear";
    case TransformFamily::kFullAffine: return "full_affine";
  }
  return "unknown";
}

TransformParams DrawFamilyTransform(TransformFamily family, const SweepRanges& ranges,
                                    KeyedStream& stream) {
  auto open_draw = [&](const Interval& iv) {
    return iv.lo + (iv.hi - iv.lo) * stream.NextOpenUniform();
  };
  TransformParams p;
  const double t1 = stream.NextUniform(ranges.rotation.lo, ranges.rotation.hi);
  const double t3 = stream.NextUniform(ranges.rotation.lo, ranges.rotation.hi);
  const double f = stream.NextUniform(ranges.scale.lo, ranges.scale.hi);
  double shears[6];
  for (double& s : shears) s = std::tan(open_draw(ranges.shear_angle));

  const bool rot = family == TransformFamily::kRotation || family == TransformFamily::kFullAffine;
  const bool scale = family == TransformFamily::kScaling || family == TransformFamily::kFullAffine;
  const bool shear = family == TransformFamily::kShear || family == TransformFamily::kFullAffine;
  if (rot) {
    p.theta1 = t1;
    p.theta3 = t3;
  }
  if (scale) p.alpha = p.beta = p.gamma = std::log2(f);
  if (shear) {
    p.s01 = shears[0];
    p.s10 = shears[1];
    p.s02 = shears[2];
    p.s20 = shears[3];
    p.s12 = shears[4];
    p.s21 = shears[5];
  }
  return p;
}

EquivarianceReport SweepReport(const LayerFactory& factory, const SweepConfig& config) {
  if (config.n_samples < 1) throw Error(ErrorCode::kInvalidArgument, "n_samples must be >= 1");
  const int n = config.volume_size;
  const int m = config.crop_margin;
  if (n - 2 * m < 1) throw Error(ErrorCode::kInvalidArgument, "crop margin leaves no interior");
  const double cube = std::pow(static_cast<double>(n - 2 * m), 3);
  const auto min_valid = static_cast<std::size_t>(std::ceil(config.min_valid_fraction * cube));

  EquivarianceReport report;
  report.family = FamilyName(config.family);
  report.seed = config.seed;
  report.crop_margin = m;
  report.samples.resize(config.n_samples);

  ParallelFor(config.n_samples, [&](int i) {
    KeyedStream stream = KeyedStream::ForPath(config.seed, {static_cast<std::uint64_t>(i)});
    SampleRecord rec;
    rec.index = i;
    rec.sample_seed = stream.NextU64();
    Mat3 linear;
    for (;;) {
      rec.params = DrawFamilyTransform(config.family, config.ranges, stream);
      linear = ComposeParams(rec.params);
      std::size_t valid = 0;
      for (char v : InteriorMask(n, n, n, linear, m)) valid += v ? 1 : 0;
      if (valid >= std::max<std::size_t>(min_valid, 1)) break;
      if (++rec.redraws > config.max_redraws) {
        throw Error(ErrorCode::kInternal, "no transform with enough valid voxels");
      }
    }
    const Tensor4D vol = SynthVolume(config.volume_kind, config.channels, n, rec.sample_seed);
    const LayerPair layers = factory(rec.sample_seed, linear);
    const VolumeTransformSpec spec{linear, config.interpolation, config.out_of_range};
    rec.error = MeasureEquivariance(layers.on_transformed, layers.on_original, vol, spec, m);
    report.samples[i] = rec;
  });

  const double count = config.n_samples;
  for (const auto& s : report.samples) {
    report.mean_rel_l2 += s.error.rel_l2 / count;
    report.mean_max_abs += s.error.max_abs / count;
  }
  for (const auto& s : report.samples) {
    report.std_rel_l2 += (s.error.rel_l2 - report.mean_rel_l2) *
                         (s.error.rel_l2 - report.mean_rel_l2) / count;
    report.std_max_abs += (s.error.max_abs - report.mean_max_abs) *
                          (s.error.max_abs - report.mean_max_abs) / count;
  }
  report.std_rel_l2 = std::sqrt(report.std_rel_l2);
  report.std_max_abs = std::sqrt(report.std_max_abs);
  return report;
}

std::string ReportToJsonLines(const EquivarianceReport& report) {
  using nlohmann::json;
  std::string out;
  for (const auto& s : report.samples) {
    const auto params = s.params.ToArray();
    json rec = {
        {"record", "sample"},
        {"family", report.family},
        {"index", s.index},
        {"seed", s.sample_seed},
        {"params", std::vector<double>(params.begin(), params.end())},
        {"redraws", s.redraws},
        {"rel_l2", s.error.rel_l2},
        {"max_abs", s.error.max_abs},
        {"voxels", s.error.voxels},
        {"crop", report.crop_margin},
    };
    out += rec.dump() + "\n";
  }
  json summary = {
      {"record", "summary"},
      {"family", report.family},
      {"seed", report.seed},
      {"n_samples", report.samples.size()},
      {"crop", report.crop_margin},
      {"mean_rel_l2", report.mean_rel_l2},
      {"std_rel_l2", report.std_rel_l2},
      {"mean_max_abs", report.mean_max_abs},
      {"std_max_abs", report.std_max_abs},
  };
  out += summary.dump() + "\n";
  return out;
}

}  // namespace wmcg
