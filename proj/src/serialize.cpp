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


#include "mpstomo/serialize.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace mpstomo {

namespace {

constexpr std::array<char, 4> kMagic{'M', 'P', 'S', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double x) {
  const auto v = std::bit_cast<std::uint64_t>(x);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("truncated MPS header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw FormatError("truncated MPS tensor data");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

// <psi|psi> of raw tensors, no gauge assumed.
double raw_squared_norm(const std::vector<SiteTensor>& sites) {
  Eigen::MatrixXcd env = Eigen::MatrixXcd::Ones(1, 1);
  for (const auto& t : sites) {
    Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(t.right_dim(), t.right_dim());
    for (const auto& a : t.slices) next += a.adjoint() * env * a;
    env = std::move(next);
  }
  return env(0, 0).real();
}

}  // namespace

void write_mps(std::ostream& out, const Mps& mps) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(mps.size()));
  put_u32(out, static_cast<std::uint32_t>(mps.local_dim()));
  for (Index d : mps.bond_dims()) put_u32(out, static_cast<std::uint32_t>(d));
  for (const auto& t : mps.sites()) {
    for (Index l = 0; l < t.left_dim(); ++l) {
      for (int v = 0; v < t.local_dim(); ++v) {
        for (Index r = 0; r < t.right_dim(); ++r) {
          put_f64(out, t[v](l, r).real());
          put_f64(out, t[v](l, r).imag());
        }
      }
    }
  }
}

Mps read_mps(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw FormatError("not an MPS1 container");
  }
  const std::uint32_t n = get_u32(in);
  const std::uint32_t q = get_u32(in);
  if (n < 1 || q < 2) throw FormatError("invalid MPS dimensions");
  std::vector<Index> dims{1};
  for (std::uint32_t k = 0; k + 1 < n; ++k) {
    const std::uint32_t d = get_u32(in);
    if (d == 0) throw FormatError("zero bond dimension");
    dims.push_back(d);
  }
  dims.push_back(1);

  std::vector<SiteTensor> sites;
  for (std::uint32_t k = 0; k < n; ++k) {
    SiteTensor t(static_cast<int>(q), dims[k], dims[k + 1]);
    for (Index l = 0; l < dims[k]; ++l) {
      for (int v = 0; v < static_cast<int>(q); ++v) {
        for (Index r = 0; r < dims[k + 1]; ++r) {
          const double re = get_f64(in);
          const double im = get_f64(in);
          t[v](l, r) = {re, im};
        }
      }
    }
    sites.push_back(std::move(t));
  }
  const double norm = raw_squared_norm(sites);
  if (!(std::abs(norm - 1.0) <= 1e-8)) throw FormatError("stored MPS is not normalized");
  return Mps(std::move(sites));
}

void save_mps(const std::filesystem::path& path, const Mps& mps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_mps(out, mps);
  if (!out) throw IoError("failed writing " + path.string());
}

Mps load_mps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_mps(in);
}

}  // namespace mpstomo
