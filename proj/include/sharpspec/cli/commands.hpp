#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sharpspec/cli/suites.hpp"
#include "sharpspec/evolution/evolution.hpp"
#include "sharpspec/io/csv.hpp"
#include "sharpspec/io/vtk.hpp"
#include "sharpspec/spectra/convergence.hpp"

namespace sharpspec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::not_converged:
    case ErrorKind::precondition:
      return kExitFail;
    default:
      return kExitUsage;
  }
}

// Comma separated reals; each entry may be a fraction "a/b".
inline std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) {
    double v = 0.0;
    auto b = s.data(), e = s.data() + s.size();
    while (b < e && *b == ' ') ++b;
    while (e > b && e[-1] == ' ') --e;
    auto [p, ec] = std::from_chars(b, e, v);
    require(ec == std::errc() && p == e && b != e, ErrorKind::parse, what + ": cannot parse '" + s + "'");
    return v;
  };
  while (std::getline(ss, item, ',')) {
    auto slash = item.find('/');
    if (slash == std::string::npos) {
      out.push_back(number(item));
    } else {
      double den = number(item.substr(slash + 1));
      require(den != 0.0, ErrorKind::parse, what + ": zero denominator in '" + item + "'");
      out.push_back(number(item.substr(0, slash)) / den);
    }
  }
  require(!out.empty(), ErrorKind::parse, what + ": empty list");
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out = io::open_output(path);
  out << text;
}

// ---- verify ----

inline int cmd_verify(const std::string& suite, const SuiteOptions& o, const std::string& out, std::ostream& log) {
  require(is_suite(suite), ErrorKind::invalid_argument, "unknown suite: " + suite);
  log << "verify suite=" << suite << " seed=" << o.seed << " tol=" << format_real(o.tol) << '\n';
  Report rep = run_suite(suite, o);
  std::ostringstream csv;
  write_report_csv(csv, rep);
  write_text(out, csv.str());
  std::size_t failed = 0;
  for (const auto& c : rep.checks)
    if (!c.pass) {
      ++failed;
      log << "FAIL " << c.id << " measured=" << format_real(c.measured) << " tol=" << format_real(c.tolerance) << ' '
          << c.statement << '\n';
    }
  log << rep.checks.size() - failed << '/' << rep.checks.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitFail;
}

// ---- spectrum ----

struct SpectrumOptions {
  std::string domain;
  std::string op;
  int count = 20;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string export_dir;
};

inline bool is_operator(const std::string& op) {
  return op == "curl-sharp" || op == "laplace-sharp" || op == "d-sharp-1d";
}

inline void check_operator(const std::string& op, int dim) {
  require(is_operator(op), ErrorKind::invalid_argument, "unknown operator: " + op);
  if (op == "curl-sharp") require(dim == 3, ErrorKind::invalid_argument, "curl-sharp needs a 3D domain");
  if (op == "laplace-sharp") require(dim <= 2, ErrorKind::invalid_argument, "laplace-sharp needs a 1D or 2D domain");
  if (op == "d-sharp-1d") require(dim == 1, ErrorKind::invalid_argument, "d-sharp-1d needs a 1D domain");
}

// The `count` values of smallest magnitude, ascending and re-clustered.
inline EigResult smallest_magnitude(const EigResult& e, std::size_t count) {
  std::vector<std::size_t> order(e.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(e.eigenvalues[a]) < std::abs(e.eigenvalues[b]);
  });
  if (order.size() > count) order.resize(count);
  const bool vecs = e.vectors.cols() == static_cast<Eigen::Index>(e.size());
  EigResult r;
  r.meta = e.meta;
  r.unverified = e.unverified;
  if (vecs) r.vectors.resize(e.vectors.rows(), static_cast<Eigen::Index>(order.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    r.eigenvalues.push_back(e.eigenvalues[order[i]]);
    r.residuals.push_back(e.residuals.empty() ? 0.0 : e.residuals[order[i]]);
    if (vecs) r.vectors.col(static_cast<Eigen::Index>(i)) = e.vectors.col(static_cast<Eigen::Index>(order[i]));
  }
  double scale = 0.0;
  for (double v : e.eigenvalues) scale = std::max(scale, std::abs(v));
  sort_and_cluster(r, e.meta.cluster_tol > 0 ? e.meta.cluster_tol : 1e-8 * std::max(scale, 1.0));
  return r;
}

inline cubical::VoxelDomain load_domain(const std::string& path, cubical::DomainSpec* spec_out = nullptr) {
  require(!path.empty(), ErrorKind::invalid_argument, "--domain is required");
  cubical::DomainSpec spec = cubical::load_domain_spec(path);
  if (spec_out) *spec_out = spec;
  return cubical::voxelize(spec);
}

inline int curl_block(int count) { return std::clamp(count / 3, 4, 8); }

inline int cmd_spectrum(const SpectrumOptions& o, std::ostream& log) {
  cubical::DomainSpec spec;
  cubical::VoxelDomain v = load_domain(o.domain, &spec);
  check_operator(o.op, v.dim());
  require(o.count > 0, ErrorKind::invalid_argument, "--count must be positive");
  const std::uint64_t seed = o.seed.value_or(spec.seed);
  if (!o.export_dir.empty()) std::filesystem::create_directories(o.export_dir);
  auto field_path = [&](std::size_t i) {
    return (std::filesystem::path(o.export_dir) / (o.op + "_" + std::to_string(i) + ".vtk")).string();
  };

  EigResult e;
  if (o.op == "curl-sharp") {
    spectra::CurlSharpParams p;
    p.count = o.count;
    p.block = curl_block(o.count);
    p.seed = seed;
    if (o.tol) p.tol = *o.tol;
    spectra::CurlSharpResult r = spectra::curl_sharp_eigs(v, p);
    e = r.eig;
    double worst = 0.0;
    for (double c : r.curl_residual) worst = std::max(worst, c);
    log << "curl-sharp: " << e.size() << " eigenpairs, " << e.meta.operator_applications
        << " resolvent applications, max |P S v - lambda v| = " << format_real(worst) << '\n';
    if (!o.export_dir.empty())
      for (std::size_t i = 0; i < e.size(); ++i)
        io::write_vtk_edge_field(field_path(i), *r.complex, e.vectors.col(static_cast<Eigen::Index>(i)),
                                 "curl# eigenfield lambda=" + format_real(e.eigenvalues[i]));
  } else if (o.op == "laplace-sharp") {
    const double tol = o.tol.value_or(1e-9);
    spectra::DenseSharp d = spectra::dense_grad_sharp(v, tol * 1e-1);
    e = smallest_magnitude(spectra::laplace_sharp_eigs(d, tol), static_cast<std::size_t>(o.count));
    if (!o.export_dir.empty()) {
      cubical::CubicalComplex c = cubical::build_complex(v);
      for (std::size_t i = 0; i < e.size(); ++i)
        io::write_vtk_node_field(field_path(i), c,
                                 e.vectors.col(static_cast<Eigen::Index>(i)).cwiseQuotient(d.sqrt_weights),
                                 "div# grad# eigenfunction lambda=" + format_real(e.eigenvalues[i]));
    }
  } else {
    e = smallest_magnitude(spectra::d_sharp_1d(v, o.tol.value_or(1e-9)), static_cast<std::size_t>(o.count));
    if (!o.export_dir.empty()) log << "d-sharp-1d reports singular values only; no fields exported\n";
  }

  std::ostringstream csv;
  io::write_spectrum_csv(csv, e);
  write_text(o.out, csv.str());
  if (!e.meta.converged || !e.unverified.empty()) {
    log << "solver did not converge: " << e.meta.note << " (" << e.unverified.size()
        << " unverified values flagged with cluster_id -1)\n";
    return kExitFail;
  }
  return kExitOk;
}

// ---- convergence ----

struct ConvergenceOptions {
  std::string domain;
  std::string op;
  std::vector<double> h_list;
  int track = 3;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string out;
};

// Continuum value of the k-th tracked eigenvalue (k >= 1), NaN if unknown.
inline double reference_value(const std::string& op, const cubical::DomainSpec& s, int dim, int k) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (dim == 1 && s.shape == "box" && !s.extent.empty()) {
    const double w = 2.0 * M_PI * k / s.extent[0];
    if (op == "laplace-sharp") return -w * w;
    if (op == "d-sharp-1d") return w;
  }
  if (op == "curl-sharp" && s.shape == "ball" && k == 1 && !s.radius.empty()) return spectra::tan_root() / s.radius[0];
  return nan;
}

struct LevelResult {
  std::vector<double> values;  // tracked cluster representatives
  bool converged = true;
};

// Tracked values: for laplace-sharp the nonzero clusters nearest 0, for the
// others the positive clusters in ascending order.
inline LevelResult tracked_values(const std::string& op, const cubical::VoxelDomain& v, int track, double tol,
                                  std::uint64_t seed, std::ostream& log) {
  EigResult e;
  if (op == "curl-sharp") {
    spectra::CurlSharpParams p;
    p.count = std::max(8, 6 * track);
    p.block = curl_block(p.count);
    p.seed = seed;
    p.tol = tol;
    e = spectra::curl_sharp_eigs(v, p).eig;
  } else if (op == "laplace-sharp") {
    e = spectra::laplace_sharp_eigs(v, tol);
  } else {
    e = spectra::d_sharp_1d(v, tol);
  }
  double scale = 1.0;
  for (double x : e.eigenvalues) scale = std::max(scale, std::abs(x));
  std::vector<double> reps;
  for (auto [value, mult] : cluster_summary(e)) {
    (void)mult;
    if (op == "laplace-sharp" ? std::abs(value) > 1e-8 * scale : value > 1e-8 * scale) reps.push_back(value);
  }
  std::sort(reps.begin(), reps.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (reps.size() > static_cast<std::size_t>(track)) reps.resize(static_cast<std::size_t>(track));
  log << "  h=" << format_real(v.h()) << ": " << e.size() << " eigenvalues\n";
  return {reps, e.meta.converged && e.unverified.empty()};
}

inline int cmd_convergence(const ConvergenceOptions& o, std::ostream& log) {
  require(o.h_list.size() >= 3, ErrorKind::invalid_argument, "convergence needs at least 3 grid levels");
  require(o.track > 0, ErrorKind::invalid_argument, "--count must be positive");
  cubical::DomainSpec spec;
  cubical::VoxelDomain base = load_domain(o.domain, &spec);
  check_operator(o.op, base.dim());
  std::vector<double> hs = o.h_list;
  for (double h : hs) require(h > 0, ErrorKind::invalid_argument, "grid sizes must be positive");
  std::sort(hs.begin(), hs.end(), std::greater<>());
  require(std::adjacent_find(hs.begin(), hs.end()) == hs.end(), ErrorKind::invalid_argument, "grid sizes must differ");

  const double tol = o.tol.value_or(o.op == "curl-sharp" ? 1e-8 : 1e-9);
  std::vector<std::vector<double>> levels;
  bool ok = true;
  for (double h : hs) {
    cubical::DomainSpec s = spec;
    s.h = h;
    LevelResult lr = tracked_values(o.op, cubical::voxelize(s), o.track, tol, o.seed.value_or(spec.seed), log);
    ok = ok && lr.converged;
    levels.push_back(lr.values);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<io::ConvergenceRow> rows;
  const std::size_t m = hs.size();
  for (int k = 0; k < o.track; ++k) {
    auto value = [&](std::size_t lvl) {
      return levels[lvl].size() > static_cast<std::size_t>(k) ? levels[lvl][static_cast<std::size_t>(k)] : nan;
    };
    double p = spectra::fitted_order(hs[m - 3], hs[m - 2], hs[m - 1], value(m - 3), value(m - 2), value(m - 1));
    double rich = spectra::richardson(hs[m - 2], hs[m - 1], value(m - 2), value(m - 1), p);
    double ref = reference_value(o.op, spec, base.dim(), k + 1);
    for (std::size_t lvl = 0; lvl < m; ++lvl) {
      io::ConvergenceRow r;
      r.index = k;
      r.h = hs[lvl];
      r.eigenvalue = value(lvl);
      r.reference_error = std::isnan(ref) ? nan : std::abs(r.eigenvalue - ref) / std::abs(ref);
      r.fitted_order = p;
      r.richardson = rich;
      rows.push_back(r);
    }
  }
  std::ostringstream csv;
  io::write_convergence_csv(csv, rows);
  write_text(o.out, csv.str());
  if (!ok) {
    log << "a solver did not converge at some level\n";
    return kExitFail;
  }
  return kExitOk;
}

// ---- evolve ----

struct EvolveOptions {
  std::string domain;
  std::string equation;
  std::string data;
  std::vector<double> times;
  std::string out;
  int modes = -1;
};

struct NodalData {
  Eigen::VectorXd u0, v0, f;
};

// CSV with header dof_index,u0[,v0][,f] and one row per vertex of the complex.
inline NodalData read_nodal_data(const std::string& path, Eigen::Index nodes) {
  require(!path.empty(), ErrorKind::invalid_argument, "--data is required");
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open data file: " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::parse, "data file is empty: " + path);
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string x;
    while (std::getline(ss, x, ',')) {
      x.erase(0, x.find_first_not_of(" \t\r"));
      x.erase(x.find_last_not_of(" \t\r") + 1);
      out.push_back(x);
    }
    return out;
  };
  std::vector<std::string> header = split(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& h = header[i];
    require(h == "dof_index" || h == "u0" || h == "v0" || h == "f", ErrorKind::parse, "data file: unknown column '" + h + "'");
    require(col.emplace(h, i).second, ErrorKind::parse, "data file: duplicate column '" + h + "'");
  }
  require(col.count("dof_index") && col.count("u0"), ErrorKind::parse, "data file: needs columns dof_index and u0");
  NodalData d;
  d.u0 = Eigen::VectorXd::Zero(nodes);
  if (col.count("v0")) d.v0 = Eigen::VectorXd::Zero(nodes);
  if (col.count("f")) d.f = Eigen::VectorXd::Zero(nodes);
  std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> f = split(line);
    require(f.size() == header.size(), ErrorKind::parse, "data file: wrong number of fields in '" + line + "'");
    double idx = parse_real_list(f[col["dof_index"]], "dof_index")[0];
    require(idx >= 0 && idx < static_cast<double>(nodes) && idx == std::floor(idx), ErrorKind::dimension_mismatch,
            "data file: dof_index out of range for the grid");
    auto i = static_cast<Eigen::Index>(idx);
    require(!seen[static_cast<std::size_t>(i)], ErrorKind::parse, "data file: repeated dof_index");
    seen[static_cast<std::size_t>(i)] = 1;
    d.u0(i) = parse_real_list(f[col["u0"]], "u0")[0];
    if (d.v0.size()) d.v0(i) = parse_real_list(f[col["v0"]], "v0")[0];
    if (d.f.size()) d.f(i) = parse_real_list(f[col["f"]], "f")[0];
    ++rows;
  }
  require(rows == nodes, ErrorKind::dimension_mismatch,
          "data file has " + std::to_string(rows) + " rows but the grid has " + std::to_string(nodes) + " vertices");
  return d;
}

inline std::string energy_path(const std::string& out) {
  std::filesystem::path p(out);
  std::string ext = p.has_extension() ? p.extension().string() : ".csv";
  return (p.parent_path() / (p.stem().string() + "_energy" + ext)).string();
}

inline int cmd_evolve(const EvolveOptions& o, std::ostream& log) {
  require(o.equation == "heat" || o.equation == "wave", ErrorKind::invalid_argument,
          "--equation must be heat or wave");
  require(!o.times.empty(), ErrorKind::invalid_argument, "--times is required");
  cubical::VoxelDomain v = load_domain(o.domain);
  require(v.dim() <= 2, ErrorKind::invalid_argument, "evolve needs a 1D or 2D domain");
  cubical::CubicalComplex c = cubical::build_complex(v);
  NodalData d = read_nodal_data(o.data, c.count(0));

  evolution::EigenBasis b = evolution::laplace_basis(v, 1e-9, o.modes);
  auto hodge = [&](const Eigen::VectorXd& x) { return x.size() ? evolution::from_nodal(b, x) : Eigen::VectorXd(); };
  evolution::EvolutionResult r =
      o.equation == "heat"
          ? evolution::evolve_heat(b, hodge(d.u0), o.times, hodge(d.f))
          : evolution::evolve_wave(b, hodge(d.u0), d.v0.size() ? hodge(d.v0) : Eigen::VectorXd::Zero(b.dim()), o.times,
                                   hodge(d.f));
  Eigen::MatrixXd nodal(r.snapshots.rows(), r.snapshots.cols());
  for (Eigen::Index k = 0; k < r.snapshots.cols(); ++k) nodal.col(k) = evolution::to_nodal(b, r.snapshots.col(k));

  std::ostringstream snaps, energy;
  io::write_snapshots_csv(snaps, r.times, nodal);
  io::write_energy_csv(energy, r.times, r.energy);
  require(!o.out.empty(), ErrorKind::invalid_argument, "--out is required for evolve");
  write_text(o.out, snaps.str());
  write_text(energy_path(o.out), energy.str());
  log << o.equation << ": " << b.size() << " modes, kernel dim " << b.kernel.cols()
      << ", truncation residual " << format_real(r.truncation_residual) << ", mass defect "
      << format_real(evolution::mass_defect(r)) << ", energy drift " << format_real(evolution::energy_drift(r)) << '\n';
  return kExitOk;
}

}  // namespace sharpspec::cli
