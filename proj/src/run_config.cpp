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

#include "wmcg/run_config.hpp"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "wmcg/error.hpp"

namespace wmcg {

namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::kConfig, key + ": " + what);
}

// Reads keys of one JSON object and rejects any key that was never asked for.
class Section {
 public:
  Section(const json& root, std::string path) : path_(std::move(path)) {
    if (!root.is_object()) Fail(path_.empty() ? "<root>" : path_, "expected an object");
    obj_ = &root;
  }

  std::string Key(const std::string& name) const {
    return path_.empty() ? name : path_ + "." + name;
  }

  const json* Find(const std::string& name) {
    seen_.insert(name);
    auto it = obj_->find(name);
    return it == obj_->end() ? nullptr : &*it;
  }

  std::optional<Section> Child(const std::string& name) {
    const json* v = Find(name);
    if (v == nullptr) return std::nullopt;
    return Section(*v, Key(name));
  }

  void Get(const std::string& name, double& out) {
    if (const json* v = Find(name)) {
      if (!v->is_number()) Fail(Key(name), "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) Fail(Key(name), "must be finite");
    }
  }

  void Get(const std::string& name, bool& out) {
    if (const json* v = Find(name)) {
      if (!v->is_boolean()) Fail(Key(name), "expected true or false");
      out = v->get<bool>();
    }
  }

  void Get(const std::string& name, std::string& out) {
    if (const json* v = Find(name)) {
      if (!v->is_string()) Fail(Key(name), "expected a string");
      out = v->get<std::string>();
    }
  }

  void Get(const std::string& name, std::uint64_t& out) {
    if (const json* v = Find(name)) {
      if (!v->is_number_unsigned()) Fail(Key(name), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void Get(const std::string& name, int& out, int lo, int hi) {
    if (const json* v = Find(name)) {
      if (!v->is_number_integer()) Fail(Key(name), "expected an integer");
      const auto x = v->get<std::int64_t>();
      if (x < lo || x > hi) {
        Fail(Key(name), "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      }
      out = static_cast<int>(x);
    }
  }

  void Get(const std::string& name, Interval& out) {
    if (const json* v = Find(name)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        Fail(Key(name), "expected [lo, hi]");
      }
      out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }
  }

  void Finish() const {
    for (const auto& [name, value] : obj_->items()) {
      if (seen_.count(name) == 0) Fail(Key(name), "unknown key");
    }
  }

 private:
  const json* obj_ = nullptr;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename E>
E Choose(const std::string& key, const std::string& value,
         std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    names += names.empty() ? name : std::string(", ") + name;
  }
  Fail(key, "unknown value '" + value + "' (expected one of " + names + ")");
}

template <typename E>
const char* NameOf(E e, std::initializer_list<std::pair<const char*, E>> options) {
  for (const auto& [name, v] : options) {
    if (v == e) return name;
  }
  return "";
}

const std::initializer_list<std::pair<const char*, RadialProfile::Kind>> kProfiles = {
    {"sfb", RadialProfile::Kind::kSphericalBessel},
    {"gaussian_shell", RadialProfile::Kind::kGaussianShell}};
const std::initializer_list<std::pair<const char*, WeightSource>> kWeightSources = {
    {"unit", WeightSource::kUnit}, {"random", WeightSource::kRandom},
    {"file", WeightSource::kFile}};
const std::initializer_list<std::pair<const char*, PaddingMode>> kPaddings = {
    {"zero", PaddingMode::kZero}, {"circular", PaddingMode::kCircular}};
const std::initializer_list<std::pair<const char*, TransformFamily>> kFamilies = {
    {"identity", TransformFamily::kIdentity}, {"rotation", TransformFamily::kRotation},
    {"scaling", TransformFamily::kScaling}, {"shear", TransformFamily::kShear},
    {"full_affine", TransformFamily::kFullAffine}};
const std::initializer_list<std::pair<const char*, VolumeKind>> kVolumes = {
    {"bandlimited_noise", VolumeKind::kBandlimitedNoise},
    {"smooth_blobs", VolumeKind::kSmoothBlobs}};
const std::initializer_list<std::pair<const char*, EquivLayerKind>> kLayers = {
    {"wmcg", EquivLayerKind::kWmcg}, {"random", EquivLayerKind::kRandomBank}};

void ParseAugmentation(Section& s, AugmentationConfig& a) {
  s.Get("shear_angle_range", a.shear_angle_range);
  s.Get("scale_factor_range", a.scale_factor_range);
  s.Get("isotropic_scaling", a.isotropic_scaling);
  s.Get("rotation", a.rotation_enabled);
  s.Get("shift", a.shift_enabled);
  s.Get("seed", a.seed);
  s.Finish();

  const double half_pi = 0.5 * std::numbers::pi;
  const Interval& sh = a.shear_angle_range;
  if (!(sh.lo > -half_pi) || !(sh.hi <= half_pi) || sh.lo > sh.hi) {
    Fail(s.Key("shear_angle_range"), "must satisfy -pi/2 < lo <= hi <= pi/2 (radians)");
  }
  const Interval& sc = a.scale_factor_range;
  if (!(sc.lo > 0.0) || !std::isfinite(sc.hi) || sc.lo > sc.hi) {
    Fail(s.Key("scale_factor_range"), "must satisfy 0 < lo <= hi");
  }
}

void Validate(const RunConfig& c) {
  if (c.kernel_radius && !(*c.kernel_radius > 0.0)) Fail("kernel.radius", "must be positive");
  try {
    EnumerateBases(c.basis_count);
  } catch (const Error& e) {
    Fail("basis.count", e.what());
  }
  if (!(c.profile.sigma > 0.0)) Fail("basis.sigma", "must be positive");
  if ((c.weights == WeightSource::kFile || c.equiv_weights == WeightSource::kFile) &&
      c.weight_file.empty()) {
    Fail("layer.weight_file", "required when layer.weights or equiv.weights is \"file\"");
  }
  if (c.equiv_crop_margin * 2 >= c.equiv_volume_size) {
    Fail("equiv.crop_margin", "leaves no interior for the configured volume_size");
  }
  if (c.bench_volume_size < c.kernel_size) {
    Fail("bench.volume_size", "must be at least kernel.size");
  }
}

}  // namespace

KernelGrid RunConfig::Grid() const {
  KernelGrid g = KernelGrid::WithDefaultRadius(kernel_size);
  if (kernel_radius) g.radius = *kernel_radius;
  return g;
}

std::vector<BasisIndex> RunConfig::Bases() const { return EnumerateBases(basis_count); }

void RunConfig::ApplySeed(std::uint64_t seed) {
  augmentation.seed = seed;
  weight_seed = seed;
  equiv_seed = seed;
}

RunConfig ParseRunConfig(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("parse error: ") + e.what());
  }
  RunConfig c;
  Section top(root, "");
  if (auto s = top.Child("augmentation")) ParseAugmentation(*s, c.augmentation);
  if (auto s = top.Child("kernel")) {
    s->Get("size", c.kernel_size, 1, 63);
    if (c.kernel_size % 2 == 0) Fail("kernel.size", "must be odd");
    double radius = 0;
    if (s->Find("radius") != nullptr) {
      s->Get("radius", radius);
      c.kernel_radius = radius;
    }
    s->Finish();
  }
  if (auto s = top.Child("basis")) {
    s->Get("count", c.basis_count, 1, 1 << 20);
    std::string profile = NameOf(c.profile.kind, kProfiles);
    s->Get("profile", profile);
    c.profile.kind = Choose(s->Key("profile"), profile, kProfiles);
    s->Get("sigma", c.profile.sigma);
    s->Get("normalize", c.normalize);
    s->Finish();
  }
  if (auto s = top.Child("layer")) {
    s->Get("c_out", c.c_out, 1, 4096);
    s->Get("c_in", c.c_in, 1, 4096);
    s->Get("layer_id", c.layer_id);
    std::string weights = NameOf(c.weights, kWeightSources);
    s->Get("weights", weights);
    c.weights = Choose(s->Key("weights"), weights, kWeightSources);
    s->Get("weight_seed", c.weight_seed);
    s->Get("weight_file", c.weight_file);
    s->Finish();
  }
  if (auto s = top.Child("conv")) {
    std::string padding = NameOf(c.padding, kPaddings);
    s->Get("padding", padding);
    c.padding = Choose(s->Key("padding"), padding, kPaddings);
    s->Finish();
  }
  if (auto s = top.Child("equiv")) {
    std::string family = NameOf(c.equiv_family, kFamilies);
    s->Get("family", family);
    c.equiv_family = Choose(s->Key("family"), family, kFamilies);
    s->Get("samples", c.equiv_samples, 1, 100000);
    s->Get("volume_size", c.equiv_volume_size, 16, 512);
    s->Get("crop_margin", c.equiv_crop_margin, 0, 256);
    s->Get("seed", c.equiv_seed);
    std::string volume = NameOf(c.equiv_volume, kVolumes);
    s->Get("volume", volume);
    c.equiv_volume = Choose(s->Key("volume"), volume, kVolumes);
    std::string layer = NameOf(c.equiv_layer, kLayers);
    s->Get("layer", layer);
    c.equiv_layer = Choose(s->Key("layer"), layer, kLayers);
    std::string weights = NameOf(c.equiv_weights, kWeightSources);
    s->Get("weights", weights);
    c.equiv_weights = Choose(s->Key("weights"), weights, kWeightSources);
    s->Finish();
  }
  if (auto s = top.Child("bench")) {
    s->Get("repeats", c.bench_repeats, 3, 100000);
    s->Get("volume_size", c.bench_volume_size, 16, 1024);
    s->Finish();
  }
  top.Finish();
  Validate(c);
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return ParseRunConfig(text.str());
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
}

std::string RunConfigToText(const RunConfig& c) {
  const AugmentationConfig& a = c.augmentation;
  json root = json::object();
  root["augmentation"] = {
      {"shear_angle_range", {a.shear_angle_range.lo, a.shear_angle_range.hi}},
      {"scale_factor_range", {a.scale_factor_range.lo, a.scale_factor_range.hi}},
      {"isotropic_scaling", a.isotropic_scaling},
      {"rotation", a.rotation_enabled},
      {"shift", a.shift_enabled},
      {"seed", a.seed}};
  root["kernel"] = {{"size", c.kernel_size}};
  if (c.kernel_radius) root["kernel"]["radius"] = *c.kernel_radius;
  root["basis"] = {{"count", c.basis_count},
                   {"profile", NameOf(c.profile.kind, kProfiles)},
                   {"sigma", c.profile.sigma},
                   {"normalize", c.normalize}};
  root["layer"] = {{"c_out", c.c_out},
                   {"c_in", c.c_in},
                   {"layer_id", c.layer_id},
                   {"weights", NameOf(c.weights, kWeightSources)},
                   {"weight_seed", c.weight_seed},
                   {"weight_file", c.weight_file}};
  root["conv"] = {{"padding", NameOf(c.padding, kPaddings)}};
  root["equiv"] = {{"family", NameOf(c.equiv_family, kFamilies)},
                   {"samples", c.equiv_samples},
                   {"volume_size", c.equiv_volume_size},
                   {"crop_margin", c.equiv_crop_margin},
                   {"seed", c.equiv_seed},
                   {"volume", NameOf(c.equiv_volume, kVolumes)},
                   {"layer", NameOf(c.equiv_layer, kLayers)},
                   {"weights", NameOf(c.equiv_weights, kWeightSources)}};
  root["bench"] = {{"repeats", c.bench_repeats}, {"volume_size", c.bench_volume_size}};
  return root.dump(2) + "\n";
}

WeightTensor ConfiguredWeights(const RunConfig& c, int bases, std::uint64_t seed) {
  switch (c.weights) {
    case WeightSource::kUnit: {
      WeightTensor w(c.c_out, c.c_in, bases);
      std::fill(w.values.begin(), w.values.end(), 1.0);
      return w;
    }
    case WeightSource::kRandom:
      return RandomWeights(c.c_out, c.c_in, bases, seed);
    case WeightSource::kFile:
      return LoadWeightFile(c.weight_file, c.c_out, c.c_in, bases);
  }
  throw Error(ErrorCode::kInternal, "unknown weight source");
}

WeightTensor LoadWeightFile(const std::string& path, int c_out, int c_in, int bases) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open weight file " + path);
  WeightTensor w(c_out, c_in, bases);
  std::size_t i = 0;
  std::string token;
  while (in >> token) {
    if (i == w.values.size()) {
      throw Error(ErrorCode::kConfig, path + ": more than " + std::to_string(i) + " weights");
    }
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::kConfig, path + ": bad weight '" + token + "'");
    }
    w.values[i++] = v;
  }
  if (i != w.values.size()) {
    throw Error(ErrorCode::kConfig, path + ": expected " + std::to_string(w.values.size()) +
                                        " weights, found " + std::to_string(i));
  }
  return w;
}

}  // namespace wmcg
