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

#include "wmcg/bank_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "wmcg/error.hpp"

namespace wmcg {

namespace {

void PutLe(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t GetLe(const std::vector<std::uint8_t>& in, std::size_t offset, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[offset + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> EncodeBank(const BankFile& file) {
  const KernelBank& b = file.bank;
  std::vector<std::uint8_t> out;
  out.reserve(kBankHeaderBytes + 8 * b.values.size());
  for (char ch : {'W', 'M', 'C', 'G'}) out.push_back(static_cast<std::uint8_t>(ch));
  PutLe(out, file.version, 2);
  PutLe(out, static_cast<std::uint32_t>(b.c_out), 4);
  PutLe(out, static_cast<std::uint32_t>(b.c_in), 4);
  PutLe(out, static_cast<std::uint32_t>(b.size), 4);
  PutLe(out, file.flags, 4);
  for (double v : b.values) PutLe(out, std::bit_cast<std::uint64_t>(v), 8);
  return out;
}

BankFile DecodeBank(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kBankHeaderBytes) {
    throw Error(ErrorCode::kIo, "bank file shorter than its header");
  }
  if (std::memcmp(bytes.data(), "WMCG", 4) != 0) {
    throw Error(ErrorCode::kIo, "bad magic, expected WMCG");
  }
  BankFile file;
  file.version = static_cast<std::uint16_t>(GetLe(bytes, 4, 2));
  if (file.version != kBankVersion) {
    throw Error(ErrorCode::kIo, "unsupported bank version " + std::to_string(file.version));
  }
  const auto c_out = GetLe(bytes, 6, 4);
  const auto c_in = GetLe(bytes, 10, 4);
  const auto k = GetLe(bytes, 14, 4);
  file.flags = static_cast<std::uint32_t>(GetLe(bytes, 18, 4));
  const std::uint64_t count = c_out * c_in * k * k * k;
  if (bytes.size() - kBankHeaderBytes != 8 * count) {
    throw Error(ErrorCode::kIo, "payload length does not match header dims");
  }
  file.bank = KernelBank(static_cast<int>(c_out), static_cast<int>(c_in), static_cast<int>(k));
  for (std::uint64_t i = 0; i < count; ++i) {
    file.bank.values[i] = std::bit_cast<double>(GetLe(bytes, kBankHeaderBytes + 8 * i, 8));
  }
  return file;
}

std::vector<std::uint8_t> ReadBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteBytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

void WriteBankFile(const std::string& path, const BankFile& file) {
  WriteBytes(path, EncodeBank(file));
}

BankFile ReadBankFile(const std::string& path) { return DecodeBank(ReadBytes(path)); }

}  // namespace wmcg
