#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sharpspec/core/random.hpp"
#include "sharpspec/core/report.hpp"
#include "sharpspec/cubical/betti.hpp"
#include "sharpspec/cubical/mimetic.hpp"
#include "sharpspec/linrel/reduction.hpp"
#include "sharpspec/linrel/sharp.hpp"
#include "sharpspec/spectra/curl_sharp.hpp"
#include "sharpspec/spectra/laplace_sharp.hpp"
#include "sharpspec/spectra/weyl.hpp"

namespace sharpspec::cli {

struct SuiteOptions {
  std::uint64_t seed = 42;
  double tol = 1e-10;
};

inline cubical::VoxelDomain make_box(std::vector<double> extent, double h) {
  cubical::DomainSpec s;
  s.shape = "box";
  s.h = h;
  s.extent = std::move(extent);
  return cubical::voxelize(s);
}

inline cubical::VoxelDomain make_shape(const std::string& name, std::vector<double> radius, double h) {
  cubical::DomainSpec s;
  s.shape = name;
  s.h = h;
  s.radius = std::move(radius);
  return cubical::voxelize(s);
}

// Forward differences on an n-node path, (n-1) x n.
inline Eigen::MatrixXd path_difference(int n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n - 1, n);
  for (int i = 0; i + 1 < n; ++i) {
    d(i, i) = -1;
    d(i, i + 1) = 1;
  }
  return d;
}

inline std::vector<Eigen::Index> path_interior(int n) {
  std::vector<Eigen::Index> out;
  for (int i = 1; i + 1 < n; ++i) out.push_back(i);
  return out;
}

// Gradient on an n-node path with A0 acting on functions vanishing at both ends.
inline linrel::OperatorPair path_pair(int n) {
  Eigen::MatrixXd d = path_difference(n);
  return {linrel::LinearRelation::restricted(d, linrel::Subspace::coordinate(n, path_interior(n))),
          linrel::LinearRelation::from_matrix(d)};
}

// Neumann second difference on n nodes, restricted to the interior nodes.
inline linrel::OperatorPair krein_path_pair(int n) {
  Eigen::MatrixXd d = path_difference(n);
  Eigen::MatrixXd l = d.transpose() * d;
  return {linrel::LinearRelation::restricted(l, linrel::Subspace::coordinate(n, path_interior(n))),
          linrel::LinearRelation::from_matrix(l)};
}

inline void tag(Report& r, const std::string& suffix) {
  for (auto& c : r.checks) c.statement += " [" + suffix + "]";
}

inline Report three_node_oracle() {
  Report rep;
  rep.suite = "linrel";
  linrel::SharpPair sp = linrel::sharp(path_pair(3));
  linrel::Subspace ker_b = linrel::orthonormalize(Eigen::MatrixXd(Eigen::Vector2d(1, 1)));
  Eigen::MatrixXd dom(3, 2);
  dom << 0, 1, 1, 0, 0, 1;
  linrel::RelationParts p = linrel::parts(sp.a_sharp);
  rep.add("X3.3-kerB", "3-node path: ker(B) = span{(1,1)}", linrel::distance(sp.ker_b, ker_b), 1e-14);
  rep.add("X3.3-dom", "3-node path: dom(A#) = {x1 = x3}", linrel::distance(p.domain, linrel::orthonormalize(dom)), 1e-14);
  return rep;
}

inline Report krein_check(int n, double tol) {
  linrel::KreinResult kr = linrel::krein_sharp(krein_path_pair(n), tol);
  Report rep = kr.report;
  linrel::RelationParts p = linrel::parts(kr.a_sharp);
  rep.add("KvN-kerdim", "kernel dimension of the Krein extension is 2",
          std::abs(static_cast<double>(p.kernel.dim()) - 2.0), 0.0);
  tag(rep, "n=" + std::to_string(n));
  return rep;
}

// Random relation instances: operator identities on a random low-rank matrix
// and sharp identities on a random restriction of it. Every third instance is
// symmetric so the spectral identity is exercised.
inline Report random_relation_checks(std::uint64_t seed, int instances, double tol) {
  Report rep;
  rep.suite = "linrel";
  Rng rng(seed);
  for (int t = 0; t < instances; ++t) {
    const bool sym = t % 3 == 0;
    const int n0 = rng.uniform_int(1, 20), n1 = sym ? n0 : rng.uniform_int(1, 20);
    const int r = rng.uniform_int(0, std::min(n0, n1));
    Eigen::MatrixXd m;
    if (sym) {
      Eigen::MatrixXd b = rng.gaussian(n0, r);
      Eigen::VectorXd d = rng.gaussian(r);
      m = b * d.asDiagonal() * b.transpose();
      m = 0.5 * (m + m.transpose()).eval();
    } else {
      m = rng.gaussian(n1, r) * rng.gaussian(r, n0);
    }
    const int k = rng.uniform_int(0, n0);
    linrel::Subspace dom = k ? linrel::orthonormalize(rng.gaussian(n0, k)) : linrel::Subspace::zero(n0);
    Report a = linrel::verify_reduction_identities(linrel::LinearRelation::from_matrix(m), tol);
    Report b = linrel::verify_sharp_identities(
        linrel::sharp({linrel::LinearRelation::restricted(m, dom), linrel::LinearRelation::from_matrix(m)}), tol);
    a.merge(b);
    tag(a, "random #" + std::to_string(t));
    rep.merge(a);
  }
  return rep;
}

// Dense exports of the mimetic pairs on boxes up to 3^3, 6^2 and 12 cells.
inline Report mimetic_pair_checks(double tol) {
  Report rep;
  rep.suite = "linrel";
  std::vector<std::pair<int, int>> grids;  // (dimension, cells per side)
  for (int n = 1; n <= 3; ++n) grids.push_back({3, n});
  for (int n = 1; n <= 6; ++n) grids.push_back({2, n});
  for (int n = 1; n <= 12; ++n) grids.push_back({1, n});
  for (auto [d, n] : grids) {
    cubical::CubicalComplex c = cubical::build_complex(make_box(std::vector<double>(static_cast<std::size_t>(d), 1.0), 1.0 / n));
    for (int k = 0; k < d; ++k) {
      cubical::MimeticPair m = cubical::mimetic_pair(c, k);
      linrel::OperatorPair pair = cubical::to_dense_pair(m);
      Report a = linrel::verify_reduction_identities(pair.a, tol);
      a.merge(linrel::verify_sharp_identities(linrel::sharp(pair), tol));
      tag(a, "box " + std::to_string(d) + "D n=" + std::to_string(n) + " k=" + std::to_string(k));
      rep.merge(a);
    }
  }
  return rep;
}

inline Report linrel_suite(const SuiteOptions& o) {
  Report rep;
  rep.suite = "linrel";
  rep.merge(random_relation_checks(o.seed, 200, o.tol));
  rep.merge(mimetic_pair_checks(o.tol));
  rep.merge(three_node_oracle());
  rep.merge(krein_check(12, o.tol));
  return rep;
}

inline double incidence_product(const Eigen::SparseMatrix<int>& a, const Eigen::SparseMatrix<int>& b) {
  Eigen::SparseMatrix<int> p = a * b;
  int worst = 0;
  for (int k = 0; k < p.outerSize(); ++k)
    for (Eigen::SparseMatrix<int>::InnerIterator it(p, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

inline Report complex_suite(const SuiteOptions& o) {
  Report rep;
  rep.suite = "complex";
  struct Case {
    std::string name;
    cubical::VoxelDomain v;
    std::vector<long> betti;
  };
  std::vector<cubical::Cell> lcells;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i < 2 || j < 2) lcells.push_back({i, j, 0});
  std::vector<Case> cases = {
      {"ball h=1/4", make_shape("ball", {1.0}, 0.25), {1, 0, 0}},
      {"solid-torus h=1/4", make_shape("solid-torus", {1.0, 0.5}, 0.25), {1, 1, 0}},
      {"shell h=1/4", make_shape("shell", {0.5, 1.0}, 0.25), {1, 0, 1}},
      {"ball h=1/8", make_shape("ball", {1.0}, 0.125), {1, 0, 0}},
      {"solid-torus h=1/8", make_shape("solid-torus", {1.0, 0.5}, 0.125), {1, 1, 0}},
      {"shell h=1/8", make_shape("shell", {0.5, 1.0}, 0.125), {1, 0, 1}},
      {"L-shape 2D", cubical::VoxelDomain(2, 0.25, lcells), {}},
      {"interval n=16", make_box({1.0}, 1.0 / 16), {}},
  };
  Rng rng(o.seed);
  for (const auto& cs : cases) {
    cubical::CubicalComplex c = cubical::build_complex(cs.v);
    for (int k = 0; k + 1 < c.dim(); ++k)
      rep.add("D-dd", "d_{k+1} d_k = 0, max |entry| [" + cs.name + " k=" + std::to_string(k) + "]",
              incidence_product(c.d(k + 1), c.d(k)), 0.0);
    for (int k = 0; k < c.dim(); ++k) {
      cubical::MimeticPair m = cubical::mimetic_pair(c, k);
      const std::string where = " [" + cs.name + " k=" + std::to_string(k) + "]";
      rep.add("D-int", "full d maps relative cochains to relative cochains" + where, cubical::intertwining_defect(m),
              0.0);
      double worst = 0.0;
      for (int t = 0; t < 5; ++t) {
        Eigen::VectorXd x = rng.gaussian(static_cast<Eigen::Index>(m.source_rel.size()));
        Eigen::VectorXd y = rng.gaussian(m.full.rows());
        worst = std::max(worst, cubical::duality_residual(m, x, y));
      }
      rep.add("D-dual", "<d0 x, y> = <x, d* y> relative residual" + where, worst, 1e-13);
    }
    if (!cs.betti.empty()) {
      std::vector<long> b = cubical::betti(c);
      double mismatch = 0.0;
      for (std::size_t i = 0; i < b.size(); ++i) mismatch += std::abs(static_cast<double>(b[i] - cs.betti[i]));
      rep.add("B-betti", "Betti numbers match the reference triple [" + cs.name + "]", mismatch, 0.0);
    }
  }
  return rep;
}

inline std::vector<double> torus_reference_mu(const spectra::TorusGrid& g, std::size_t count) {
  std::vector<double> mu;
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int k = 0; k < g.n[2]; ++k) {
        double kk = spectra::kappa(g, {g.signed_freq(0, i), g.signed_freq(1, j), g.signed_freq(2, k)}).norm();
        if (kk > 0) {
          mu.push_back(1 / kk);
          mu.push_back(-1 / kk);
        }
      }
  std::sort(mu.begin(), mu.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  if (mu.size() > count) mu.resize(count);
  std::sort(mu.begin(), mu.end());
  return mu;
}

inline spectra::LanczosOutput<spectra::cplx> full_torus_lanczos(const spectra::TorusGrid& g, int count, int block,
                                                                std::uint64_t seed, double tol) {
  spectra::SymbolOperator sp = spectra::symbol_pseudoinverse(spectra::torus_curl(g));
  spectra::LanczosOptions lo;
  lo.count = count;
  lo.block = block;
  lo.tol = tol;
  lo.seed = seed;
  return spectra::block_lanczos<spectra::cplx>(
      [&](const Eigen::MatrixXcd& x) {
        Eigen::MatrixXcd y(x.rows(), x.cols());
        for (Eigen::Index j = 0; j < x.cols(); ++j) y.col(j) = sp.apply(Eigen::VectorXcd(x.col(j)));
        return y;
      },
      3 * g.size(), lo);
}

// P restrict(pinv(curl) extend(A0 x)) = P x on the cube at h = 1/4.
inline double resolvent_formula_residual(std::uint64_t seed, double cg_tol) {
  cubical::VoxelDomain v = make_box({1, 1, 1}, 0.25);
  cubical::CubicalComplex c = cubical::build_complex(v);
  spectra::TorusGrid g = spectra::grid_for(v);
  spectra::Embedding e = spectra::make_embedding(c, g);
  spectra::ProjectorChain p = spectra::omega_projector(c, cg_tol);
  cubical::MimeticPair m = cubical::mimetic_pair(c, 1);
  spectra::SymbolOperator cp = spectra::symbol_pseudoinverse(spectra::yee_curl(g));
  Rng rng(seed);
  Eigen::VectorXd x = cubical::extension(c.count(1), m.source_rel) *
                      rng.gaussian(static_cast<Eigen::Index>(m.source_rel.size()));
  Eigen::VectorXd f = m.full * x;
  Eigen::VectorXd y = p.apply(e.restrict_edges(cp.apply_real(e.extend_faces(f))));
  Eigen::VectorXd want = p.apply(x);
  return (y - want).norm() / want.norm();
}

inline Report spectra_suite(const SuiteOptions& o) {
  Report rep;
  rep.suite = "spectra";
  const double cg_tol = std::max(o.tol, 1e-12);
  Rng rng(o.seed);

  {
    spectra::TorusGrid g = spectra::uniform_grid(9, 1.0 / 9);
    Eigen::SparseMatrix<double> st = spectra::yee_curl_stencil(g);
    spectra::SymbolOperator yc = spectra::yee_curl(g);
    Eigen::VectorXd x = rng.gaussian(3 * g.size());
    Eigen::VectorXcd y = yc.apply(x.cast<spectra::cplx>());
    Eigen::VectorXd z = st * x;
    rep.add("S-stencil", "full torus n=9: stencil curl vs symbol curl (relative)",
            std::hypot((y.real() - z).norm(), y.imag().norm()) / z.norm(), 1e-12);

    spectra::SymbolOperator s = spectra::torus_curl(g);
    double herm = 0.0;
    for (const auto& b : s.blocks()) herm = std::max(herm, (b - b.adjoint()).norm() * g.h);
    rep.add("S-herm", "full torus n=9: curl symbol is Hermitian per mode (scaled by h)", herm, 1e-12);

    spectra::SymbolOperator sp = spectra::symbol_pseudoinverse(s);
    std::vector<spectra::Matrix3cd> proj = spectra::detail::make_blocks(g, [&](const std::array<int, 3>& q) {
      if (q[0] == 0 && q[1] == 0 && q[2] == 0) return spectra::Matrix3cd(spectra::Matrix3cd::Zero());
      Eigen::Vector3cd f = spectra::difference_symbol(g, q).normalized();
      return spectra::Matrix3cd(spectra::Matrix3cd::Identity() - f * f.adjoint());
    });
    spectra::SymbolOperator pi(g, proj);
    Eigen::VectorXcd f = rng.complex_gaussian(3 * g.size(), 1).col(0);
    rep.add("P4.3-pinv", "full torus n=9: S S^+ is the projector onto ran S",
            (s.apply(sp.apply(f)) - pi.apply(f)).norm() / f.norm(), 1e-11);
  }

  {
    spectra::TorusGrid g = spectra::uniform_grid(8, 0.125);
    auto lz = full_torus_lanczos(g, 12, 8, o.seed, 1e-10);
    std::vector<double> want = torus_reference_mu(g, 12);
    double worst = lz.result.eigenvalues.size() == want.size() ? 0.0 : 1.0;
    for (std::size_t i = 0; worst < 1.0 && i < want.size(); ++i)
      worst = std::max(worst, std::abs(lz.result.eigenvalues[i] - want[i]) / std::abs(want[i]));
    rep.add("S-lanczos", "full torus n=8: Lanczos top 12 |mu| vs per-mode enumeration (relative)", worst, 1e-9);
  }

  {
    cubical::VoxelDomain v = make_shape("ball", {1.0}, 0.25);
    cubical::CubicalComplex c = cubical::build_complex(v);
    spectra::TorusGrid g = spectra::grid_for(v);
    spectra::Embedding e = spectra::make_embedding(c, g);
    Eigen::SparseMatrix<double> st = spectra::yee_curl_stencil(g) * g.h;
    Eigen::SparseMatrix<double> d1 = c.d(1).cast<double>();
    cubical::MimeticPair m = cubical::mimetic_pair(c, 1);
    Eigen::SparseMatrix<double> ext = cubical::extension(c.count(1), m.source_rel);
    Eigen::SparseMatrix<double> diff = st * e.edge_matrix() * ext - e.face_matrix() * d1 * ext;
    rep.add("P4.3-hyp", "ball h=1/4: torus curl extends the relative curl exactly (max |entry|)",
            diff.coeffs().size() ? diff.coeffs().cwiseAbs().maxCoeff() : 0.0, 0.0);
  }

  {
    cubical::VoxelDomain v = make_shape("ball", {1.0}, 0.125);
    cubical::CubicalComplex c = cubical::build_complex(v);
    spectra::ProjectorOptions popt;
    popt.cg_tol = cg_tol;
    popt.seed = o.seed;
    spectra::SharpResolvent r(c, spectra::grid_for(v), popt);
    rep.add("T5.5-sym", "ball h=1/8: resolvent symmetry on 20 probe pairs", spectra::symmetry_residual(r, 20, o.seed),
            std::max(1e-10, 10 * cg_tol));
  }

  rep.add("P4.3-formula", "cube h=1/4: resolvent formula recovers P x from A0 x",
          resolvent_formula_residual(o.seed, cg_tol), 1e-8);

  {
    cubical::VoxelDomain v = make_box({1, 1, 1}, 0.25);
    spectra::CurlSharpParams p;
    p.count = 12;
    p.block = 6;
    p.seed = o.seed;
    p.cg_tol = cg_tol;
    spectra::CurlSharpResult r = spectra::curl_sharp_eigs(v, p);
    double d = spectra::parity_defect(r.eig.eigenvalues);
    rep.add("T5.5-parity", "cube h=1/4: curl# window is symmetric under negation", d < 0 ? 1.0 : d,
            r.eig.meta.cluster_tol);
  }

  for (int n : {9, 17, 33}) {
    EigResult e = spectra::laplace_sharp_eigs(make_box({1.0}, 1.0 / (n - 1)));
    const double h = 1.0 / (n - 1);
    std::vector<double> want;
    for (int k = 0; k < n - 1; ++k) want.push_back(-4.0 / (h * h) * std::pow(std::sin(M_PI * k / (n - 1)), 2));
    std::sort(want.begin(), want.end());
    double worst = e.size() == want.size() ? 0.0 : 1.0;
    for (std::size_t i = 0; worst < 1.0 && i < want.size(); ++i)
      worst = std::max(worst, std::abs(e.eigenvalues[i] - want[i]) / std::max(1.0, std::abs(want.front())));
    rep.add("T5.1-circ", "interval n=" + std::to_string(n) + ": div# grad# equals the periodic circulant", worst, 1e-10);
  }

  {
    const int n = 64;
    EigResult e = spectra::d_sharp_1d(make_box({1.0}, 1.0 / (n - 1)));
    double smallest = 0.0;
    for (double s : e.eigenvalues)
      if (s > 1e-8) {
        smallest = s;
        break;
      }
    rep.add_at_least("T5.1-poinc", "interval n=64: smallest positive singular value of grad# >= 5", smallest, 5.0);
  }

  {
    spectra::TorusGrid g = spectra::uniform_grid(15, 1.0 / 15);
    auto lz = full_torus_lanczos(g, 100, 10, o.seed, 1e-8);
    std::vector<double> lam;
    for (double mu : lz.result.eigenvalues)
      if (mu > 0) lam.push_back(1.0 / mu);
    double exponent = lam.size() >= spectra::kWeylMinValues ? spectra::weyl_fit(lam, 1.0).exponent : 0.0;
    rep.add_diagnostic("R5.2-weyl", "full torus n=15: Weyl exponent over the top-100 |mu| window", exponent);
  }
  return rep;
}

inline bool is_suite(const std::string& name) {
  return name == "linrel" || name == "complex" || name == "spectra" || name == "all";
}

inline Report run_suite(const std::string& name, const SuiteOptions& o) {
  require(is_suite(name), ErrorKind::invalid_argument, "unknown suite: " + name);
  if (name == "linrel") return linrel_suite(o);
  if (name == "complex") return complex_suite(o);
  if (name == "spectra") return spectra_suite(o);
  Report rep;
  rep.suite = "all";
  for (const char* s : {"linrel", "complex", "spectra"}) rep.merge(run_suite(s, o));
  return rep;
}

}  // namespace sharpspec::cli
