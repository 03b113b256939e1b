#pragma once

#include <memory>

#include "sharpspec/spectra/projector.hpp"

namespace sharpspec::spectra {

// R = Π S⁺ Π on Ω edge fields, with Π = ι P ι* folded into Ω coordinates:
// x ↦ P ι* S⁺ ι P x. S is the curl endomorphism of torus edge fields.
class SharpResolvent {
 public:
  SharpResolvent(const cubical::CubicalComplex& c, const TorusGrid& g, const ProjectorOptions& opt)
      : embedding_(make_embedding(c, g)),
        projector_(std::make_shared<ProjectorChain>(c, opt)),
        curl_(torus_curl(g)),
        curl_pinv_(symbol_pseudoinverse(curl_)) {
    require(g.odd(), ErrorKind::precondition, "sharp_resolvent: torus sizes must be odd for a real operator");
  }

  Index dim() const { return static_cast<Index>(embedding_.edge.size()); }
  const Embedding& embedding() const { return embedding_; }
  const ProjectorChain& projector() const { return *projector_; }
  const SymbolOperator& curl() const { return curl_; }
  const SymbolOperator& curl_pinv() const { return curl_pinv_; }
  long applications() const { return applications_; }

  VectorXd apply(const VectorXd& x) const { return apply_on_range(projector_->apply(x)); }

  // Same as apply for x already in the range of P.
  VectorXd apply_on_range(const VectorXd& x) const {
    ++applications_;
    VectorXd y = embedding_.restrict_edges(curl_pinv_.apply_real(embedding_.extend_edges(x)));
    return projector_->apply(y);
  }

  // Π S x in Ω coordinates, for residual diagnostics of curl eigenpairs.
  VectorXd curl_compressed(const VectorXd& x) const {
    VectorXd y = embedding_.restrict_edges(curl_.apply_real(embedding_.extend_edges(x)));
    return projector_->apply(y);
  }

 private:
  Embedding embedding_;
  std::shared_ptr<ProjectorChain> projector_;
  SymbolOperator curl_;
  SymbolOperator curl_pinv_;
  mutable long applications_ = 0;
};

// max |<Rx, y> - <x, Ry>| / (|x| |y|) over random probe pairs.
inline double symmetry_residual(const SharpResolvent& r, int pairs, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < pairs; ++i) {
    VectorXd x = rng.gaussian(r.dim()), y = rng.gaussian(r.dim());
    double d = std::abs(r.apply(x).dot(y) - x.dot(r.apply(y)));
    worst = std::max(worst, d / (x.norm() * y.norm()));
  }
  return worst;
}

}  // namespace sharpspec::spectra
