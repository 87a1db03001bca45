// Copyright 2026 The mpstomo Authors.
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


// Binary MPS container: "MPS1", then N, q and the N-1 bond dimensions as
// 32-bit little-endian unsigned integers, then every site tensor as
// interleaved real/imag 64-bit little-endian doubles in (left, physical,
// right) row-major order.

#ifndef MPSTOMO_SERIALIZE_HPP
#define MPSTOMO_SERIALIZE_HPP

#include <filesystem>
#include <iosfwd>

#include "mpstomo/mps.hpp"

namespace mpstomo {

void write_mps(std::ostream& out, const Mps& mps);

// Throws FormatError on a bad header, a truncated stream or a stored state
// whose norm is not 1 within 1e-8.
Mps read_mps(std::istream& in);

void save_mps(const std::filesystem::path& path, const Mps& mps);
Mps load_mps(const std::filesystem::path& path);

}  // namespace mpstomo

#endif  // MPSTOMO_SERIALIZE_HPP
