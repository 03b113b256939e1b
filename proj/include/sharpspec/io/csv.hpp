#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sharpspec/core/eig_result.hpp"
#include "sharpspec/core/error.hpp"
#include "sharpspec/core/report.hpp"

namespace sharpspec::io {

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot write " + path);
  return out;
}

// Verified values first; candidates that failed the residual check follow
// with residual nan and cluster_id -1.
inline void write_spectrum_csv(std::ostream& out, const EigResult& r) {
  out << "index,eigenvalue,residual,cluster_id\n";
  std::size_t i = 0;
  for (; i < r.size(); ++i)
    out << i << ',' << format_real(r.eigenvalues[i]) << ','
        << format_real(r.residuals.empty() ? 0.0 : r.residuals[i]) << ',' << r.cluster_ids[i] << '\n';
  for (double u : r.unverified) out << i++ << ',' << format_real(u) << ",nan,-1\n";
}

inline void write_spectrum_csv(const std::string& path, const EigResult& r) {
  std::ofstream out = open_output(path);
  write_spectrum_csv(out, r);
}

inline void write_snapshots_csv(std::ostream& out, const std::vector<double>& times, const Eigen::MatrixXd& values) {
  out << "t,dof_index,value\n";
  for (Eigen::Index k = 0; k < values.cols(); ++k)
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      out << format_real(times[static_cast<std::size_t>(k)]) << ',' << i << ',' << format_real(values(i, k)) << '\n';
}

inline void write_energy_csv(std::ostream& out, const std::vector<double>& times, const std::vector<double>& energy) {
  out << "t,energy\n";
  for (std::size_t k = 0; k < times.size(); ++k) out << format_real(times[k]) << ',' << format_real(energy[k]) << '\n';
}

struct ConvergenceRow {
  int index = 0;
  double h = 0.0;
  double eigenvalue = 0.0;
  double reference_error = std::numeric_limits<double>::quiet_NaN();
  double fitted_order = std::numeric_limits<double>::quiet_NaN();
  double richardson = std::numeric_limits<double>::quiet_NaN();
};

inline void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << "index,h,eigenvalue,reference_error,fitted_order,richardson\n";
  for (const auto& r : rows)
    out << r.index << ',' << format_real(r.h) << ',' << format_real(r.eigenvalue) << ','
        << format_real(r.reference_error) << ',' << format_real(r.fitted_order) << ',' << format_real(r.richardson)
        << '\n';
}

}  // namespace sharpspec::io
