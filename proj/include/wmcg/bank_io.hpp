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

// Kernel bank file format (all integers and floats little-endian):
//
//   offset  size  field
//        0     4  magic "WMCG"
//        4     2  version (u16, currently 1)
//        6     4  C_o (u32)
//       10     4  C_i (u32)
//       14     4  k   (u32)
//       18     4  flags (u32): bit 0 normalized bases, bit 1 Haar applied
//       22   8*N  payload, N = C_o * C_i * k^3 doubles, order (co, ci, z, y, x)

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmcg/conv_engine.hpp"

namespace wmcg {

inline constexpr std::uint16_t kBankVersion = 1;
inline constexpr std::uint32_t kBankFlagNormalized = 1u << 0;
inline constexpr std::uint32_t kBankFlagHaarApplied = 1u << 1;
inline constexpr std::size_t kBankHeaderBytes = 22;

struct BankFile {
  std::uint16_t version = kBankVersion;
  std::uint32_t flags = 0;
  KernelBank bank;
};

std::vector<std::uint8_t> EncodeBank(const BankFile& file);
// Throws kIo on bad magic, unsupported version or payload length mismatch.
BankFile DecodeBank(const std::vector<std::uint8_t>& bytes);

void WriteBankFile(const std::string& path, const BankFile& file);
BankFile ReadBankFile(const std::string& path);

// Whole-file helpers shared by the commands.
std::vector<std::uint8_t> ReadBytes(const std::string& path);
void WriteBytes(const std::string& path, const std::vector<std::uint8_t>& bytes);
void WriteText(const std::string& path, const std::string& text);

}  // namespace wmcg
