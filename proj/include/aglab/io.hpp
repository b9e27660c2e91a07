#pragma once

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "aglab/fields.hpp"

namespace aglab {

// Atomic write: temp file in the target directory, then rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open for writing: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ValidationError("short write: " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// CSV snapshot: x, y, value, mask per node (mask: 0 exterior, 1 cut, 2 interior)
inline std::string field_to_csv(const ScalarField& f) {
  std::string out = "x,y,value,mask\n";
  const GridSpec& g = f.dm->spec;
  for (int k = 0; k < g.count(); ++k) {
    const Vec2 p = g.node(k);
    out += format_double(p.x);
    out += ',';
    out += format_double(p.y);
    out += ',';
    out += format_double(f.v[k]);
    out += ',';
    out += std::to_string(static_cast<int>(f.dm->cls[k]));
    out += '\n';
  }
  return out;
}

// Compact binary snapshot: int64 nx, int64 ny, f64 h, f64 origin_x,
// f64 origin_y, then nx*ny row-major f64 values (little-endian).
inline std::string field_to_binary(const ScalarField& f) {
  const GridSpec& g = f.dm->spec;
  std::string out;
  out.resize(2 * sizeof(std::int64_t) + 3 * sizeof(double) + g.count() * sizeof(double));
  char* p = out.data();
  auto put = [&p](const void* src, std::size_t n) {
    std::memcpy(p, src, n);
    p += n;
  };
  std::int64_t nx = g.nx, ny = g.ny;
  put(&nx, sizeof nx);
  put(&ny, sizeof ny);
  put(&g.h, sizeof g.h);
  put(&g.origin.x, sizeof g.origin.x);
  put(&g.origin.y, sizeof g.origin.y);
  put(f.v.data(), g.count() * sizeof(double));
  return out;
}

struct RawField {
  GridSpec spec;
  std::vector<double> values;
};

inline RawField field_from_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open field file: " + path.string());
  RawField rf;
  std::int64_t nx = 0, ny = 0;
  in.read(reinterpret_cast<char*>(&nx), sizeof nx);
  in.read(reinterpret_cast<char*>(&ny), sizeof ny);
  in.read(reinterpret_cast<char*>(&rf.spec.h), sizeof(double));
  in.read(reinterpret_cast<char*>(&rf.spec.origin.x), sizeof(double));
  in.read(reinterpret_cast<char*>(&rf.spec.origin.y), sizeof(double));
  if (!in || nx <= 0 || ny <= 0 || nx * ny > (1ll << 32))
    throw ValidationError("malformed field header: " + path.string());
  rf.spec.nx = static_cast<int>(nx);
  rf.spec.ny = static_cast<int>(ny);
  rf.values.resize(static_cast<std::size_t>(nx * ny));
  in.read(reinterpret_cast<char*>(rf.values.data()),
          static_cast<std::streamsize>(rf.values.size() * sizeof(double)));
  if (!in) throw ValidationError("truncated field file: " + path.string());
  return rf;
}

// Attach file values onto a freshly rasterized mask; grids must agree.
inline ScalarField field_from_raw(const RawField& rf, MaskPtr dm) {
  if (!(rf.spec == dm->spec))
    throw ValidationError("field grid does not match the domain rasterization");
  ScalarField f = ScalarField::zeros(std::move(dm));
  f.v = rf.values;
  return f;
}

}  // namespace aglab
