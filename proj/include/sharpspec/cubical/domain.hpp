#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sharpspec/core/error.hpp"

namespace sharpspec::cubical {

using Cell = std::array<int, 3>;  // lattice index; unused axes are 0

struct DomainSpec {
  std::string shape;           // box | ball | shell | solid-torus | voxels
  double h = 0.0;
  std::vector<double> radius;  // ball: {r}; shell: {inner, outer}; solid-torus: {major, minor}
  std::vector<double> extent;  // box side lengths; its length fixes the dimension
  std::string voxels_path;
  std::uint64_t seed = 42;
};

// Cells of a voxelized domain, sorted lexicographically and unique.
class VoxelDomain {
 public:
  VoxelDomain() = default;

  VoxelDomain(int dim, double h, std::vector<Cell> cells) : dim_(dim), h_(h), cells_(std::move(cells)) {
    require(dim_ >= 1 && dim_ <= 3, ErrorKind::invalid_argument, "VoxelDomain: dimension must be 1, 2 or 3");
    require(h_ > 0.0, ErrorKind::invalid_argument, "VoxelDomain: h must be positive");
    require(!cells_.empty(), ErrorKind::invalid_argument, "VoxelDomain: empty domain");
    for (auto& c : cells_)
      for (int a = dim_; a < 3; ++a) c[a] = 0;
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    lo_ = hi_ = cells_.front();
    for (const auto& c : cells_)
      for (int a = 0; a < 3; ++a) {
        lo_[a] = std::min(lo_[a], c[a]);
        hi_[a] = std::max(hi_[a], c[a] + 1);
      }
    for (int a = dim_; a < 3; ++a) hi_[a] = lo_[a] + 1;
    occupancy_.assign(static_cast<std::size_t>(box_cells()), 0);
    for (const auto& c : cells_) occupancy_[box_index(c)] = 1;
  }

  int dim() const { return dim_; }
  double h() const { return h_; }
  const std::vector<Cell>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  // Bounding box [lo, hi) in lattice cells.
  const Cell& lo() const { return lo_; }
  const Cell& hi() const { return hi_; }

  bool contains(const Cell& c) const {
    for (int a = 0; a < 3; ++a)
      if (c[a] < lo_[a] || c[a] >= hi_[a]) return false;
    return occupancy_[box_index(c)] != 0;
  }

 private:
  long box_cells() const {
    return static_cast<long>(hi_[0] - lo_[0]) * (hi_[1] - lo_[1]) * (hi_[2] - lo_[2]);
  }
  std::size_t box_index(const Cell& c) const {
    return static_cast<std::size_t>(((static_cast<long>(c[0] - lo_[0]) * (hi_[1] - lo_[1])) + (c[1] - lo_[1])) *
                                        (hi_[2] - lo_[2]) +
                                    (c[2] - lo_[2]));
  }

  int dim_ = 0;
  double h_ = 0.0;
  std::vector<Cell> cells_;
  Cell lo_{}, hi_{};
  std::vector<char> occupancy_;
};

inline std::vector<Cell> read_voxel_file(const std::string& path, int* dim_out) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open voxel file: " + path);
  std::vector<Cell> cells;
  int dim = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<int> v;
    int x;
    while (ls >> x) v.push_back(x);
    require(ls.eof(), ErrorKind::parse, path + ":" + std::to_string(lineno) + ": expected integers");
    if (v.empty()) continue;
    require(v.size() <= 3, ErrorKind::parse, path + ":" + std::to_string(lineno) + ": too many indices");
    if (dim == 0) dim = static_cast<int>(v.size());
    require(static_cast<int>(v.size()) == dim, ErrorKind::parse,
            path + ":" + std::to_string(lineno) + ": inconsistent index count");
    Cell c{0, 0, 0};
    for (std::size_t a = 0; a < v.size(); ++a) c[a] = v[a];
    cells.push_back(c);
  }
  require(!cells.empty(), ErrorKind::parse, "voxel file has no cells: " + path);
  *dim_out = dim;
  return cells;
}

inline VoxelDomain voxelize(const DomainSpec& spec) {
  require(spec.h > 0.0, ErrorKind::invalid_argument, "voxelize: h must be positive");
  const double h = spec.h;
  std::vector<Cell> cells;

  auto center = [h](int i) { return (i + 0.5) * h; };
  auto ball_range = [h](double r) { return static_cast<int>(std::ceil(r / h)); };

  if (spec.shape == "box") {
    require(!spec.extent.empty() && spec.extent.size() <= 3, ErrorKind::invalid_argument,
            "box: extent needs 1 to 3 lengths");
    Cell m{1, 1, 1};
    for (std::size_t a = 0; a < spec.extent.size(); ++a) {
      double l = spec.extent[a];
      require(l > 0.0, ErrorKind::invalid_argument, "box: extents must be positive");
      double q = l / h;
      m[a] = static_cast<int>(std::lround(q));
      require(m[a] >= 1 && std::abs(q - m[a]) <= 1e-6 * std::max(1.0, q), ErrorKind::invalid_argument,
              "box: extent is not a multiple of h");
    }
    for (int i = 0; i < m[0]; ++i)
      for (int j = 0; j < m[1]; ++j)
        for (int k = 0; k < m[2]; ++k) cells.push_back({i, j, k});
    return VoxelDomain(static_cast<int>(spec.extent.size()), h, std::move(cells));
  }
  if (spec.shape == "ball" || spec.shape == "shell" || spec.shape == "solid-torus") {
    double reach = 0.0;
    std::function<bool(double, double, double)> inside;
    if (spec.shape == "ball") {
      require(spec.radius.size() == 1 && spec.radius[0] > 0, ErrorKind::invalid_argument, "ball: radius must be one positive number");
      double r = spec.radius[0];
      reach = r;
      inside = [r](double x, double y, double z) { return x * x + y * y + z * z < r * r; };
    } else if (spec.shape == "shell") {
      require(spec.radius.size() == 2 && spec.radius[0] > 0 && spec.radius[1] > spec.radius[0], ErrorKind::invalid_argument,
              "shell: radius must be [inner, outer] with 0 < inner < outer");
      double ri = spec.radius[0], ro = spec.radius[1];
      reach = ro;
      inside = [ri, ro](double x, double y, double z) {
        double s = x * x + y * y + z * z;
        return s > ri * ri && s < ro * ro;
      };
    } else {
      require(spec.radius.size() == 2 && spec.radius[1] > 0 && spec.radius[0] > spec.radius[1], ErrorKind::invalid_argument,
              "solid-torus: radius must be [major, minor] with 0 < minor < major");
      double big = spec.radius[0], small = spec.radius[1];
      reach = big + small;
      inside = [big, small](double x, double y, double z) {
        double rho = std::sqrt(x * x + y * y) - big;
        return rho * rho + z * z < small * small;
      };
    }
    int n = ball_range(reach);
    for (int i = -n; i < n; ++i)
      for (int j = -n; j < n; ++j)
        for (int k = -n; k < n; ++k)
          if (inside(center(i), center(j), center(k))) cells.push_back({i, j, k});
    require(!cells.empty(), ErrorKind::invalid_argument, "voxelize: shape contains no cell centers at this h");
    return VoxelDomain(3, h, std::move(cells));
  }
  if (spec.shape == "voxels") {
    int dim = 0;
    cells = read_voxel_file(spec.voxels_path, &dim);
    return VoxelDomain(dim, h, std::move(cells));
  }
  throw Error(ErrorKind::invalid_argument, "unknown shape: " + spec.shape);
}

// Strict parser: the fields are shape, h, radius, extent, voxels_path, seed.
inline DomainSpec parse_domain_spec(const std::string& text, const std::string& base_dir = ".") {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("domain spec: ") + e.what());
  }
  require(j.is_object(), ErrorKind::parse, "domain spec: expected a JSON object");
  DomainSpec s;
  static const char* known[] = {"shape", "h", "radius", "extent", "voxels_path", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = std::any_of(std::begin(known), std::end(known), [&](const char* k) { return it.key() == k; });
    require(ok, ErrorKind::parse, "domain spec: unknown field '" + it.key() + "'");
  }
  auto numbers = [&](const char* key) {
    std::vector<double> out;
    if (!j.contains(key)) return out;
    const auto& v = j[key];
    if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      require(v.is_array(), ErrorKind::parse, std::string("domain spec: '") + key + "' must be a number or array");
      for (const auto& x : v) {
        require(x.is_number(), ErrorKind::parse, std::string("domain spec: '") + key + "' entries must be numbers");
        out.push_back(x.get<double>());
      }
    }
    return out;
  };
  require(j.contains("shape") && j["shape"].is_string(), ErrorKind::parse, "domain spec: missing string field 'shape'");
  s.shape = j["shape"].get<std::string>();
  require(j.contains("h") && j["h"].is_number(), ErrorKind::parse, "domain spec: missing numeric field 'h'");
  s.h = j["h"].get<double>();
  require(s.h > 0.0, ErrorKind::parse, "domain spec: h must be positive");
  s.radius = numbers("radius");
  s.extent = numbers("extent");
  for (double r : s.radius) require(r > 0.0, ErrorKind::parse, "domain spec: radius entries must be positive");
  for (double e : s.extent) require(e > 0.0, ErrorKind::parse, "domain spec: extent entries must be positive");
  if (j.contains("seed")) {
    require(j["seed"].is_number_unsigned() || j["seed"].is_number_integer(), ErrorKind::parse,
            "domain spec: seed must be a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("voxels_path")) {
    require(j["voxels_path"].is_string(), ErrorKind::parse, "domain spec: voxels_path must be a string");
    std::filesystem::path p = j["voxels_path"].get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    s.voxels_path = p.string();
  }
  static const char* shapes[] = {"box", "ball", "shell", "solid-torus", "voxels"};
  require(std::any_of(std::begin(shapes), std::end(shapes), [&](const char* k) { return s.shape == k; }),
          ErrorKind::parse, "domain spec: unknown shape '" + s.shape + "'");
  if (s.shape == "voxels") {
    require(!s.voxels_path.empty(), ErrorKind::parse, "domain spec: shape 'voxels' needs voxels_path");
    require(std::filesystem::exists(s.voxels_path), ErrorKind::io, "voxel file not found: " + s.voxels_path);
  }
  return s;
}

inline DomainSpec load_domain_spec(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open domain file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  require(text.find_first_not_of(" \t\r\n") != std::string::npos, ErrorKind::parse, "domain file is empty: " + path);
  return parse_domain_spec(text, std::filesystem::path(path).parent_path().string().empty()
                                     ? std::string(".")
                                     : std::filesystem::path(path).parent_path().string());
}

}  // namespace sharpspec::cubical
