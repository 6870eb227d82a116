#include "proxctl/discrete.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

#include "proxctl/errors.hpp"
#include "proxctl/util.hpp"

namespace proxctl {

namespace {

constexpr double kPmfTolerance = 1e-12;
constexpr double kSingularCutoff = 1e-12;  // relative, for pseudo-inverses
constexpr double kRankCutoff = 1e-10;      // relative, for the rank diagnostic
constexpr double kResidualTolerance = 1e-8;
constexpr double kRangeTolerance = 1e-10;

void check_pmf(const Eigen::VectorXd& p, const std::string& name) {
  if (p.minCoeff() < 0.0) throw DataError("discrete model: " + name + " has a negative entry");
  if (std::abs(p.sum() - 1.0) > kPmfTolerance)
    throw DataError("discrete model: " + name + " does not sum to one");
}

//! The operator A[delta](z) = E[delta(V) | Z = z, X = x] restricted to the
//! support levels with positive conditional mass, rotated into coordinates
//! where both weighted inner products become Euclidean.
struct WhitenedOperator {
  std::vector<int> zs, vs;   // active level indices
  Eigen::VectorXd wz, wv;    // conditional pmfs on the active levels
  Eigen::MatrixXd kernel;    // |zs| by |vs|, K(z,v) = p(z,v|x) / sqrt(wz wv)
  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
};

WhitenedOperator whitened_operator(const JointLaw& law, int ix) {
  const Eigen::MatrixXd joint = law.p_vz_given_x(ix);  // nz by nv
  WhitenedOperator op;
  const Eigen::VectorXd row_mass = joint.rowwise().sum();
  const Eigen::VectorXd col_mass = joint.colwise().sum();
  for (int iz = 0; iz < law.nz(); ++iz)
    if (row_mass(iz) > 0.0) op.zs.push_back(iz);
  for (int iv = 0; iv < law.nv(); ++iv)
    if (col_mass(iv) > 0.0) op.vs.push_back(iv);
  op.wz.resize(op.zs.size());
  op.wv.resize(op.vs.size());
  for (std::size_t a = 0; a < op.zs.size(); ++a) op.wz(a) = row_mass(op.zs[a]);
  for (std::size_t b = 0; b < op.vs.size(); ++b) op.wv(b) = col_mass(op.vs[b]);
  op.kernel.resize(op.zs.size(), op.vs.size());
  for (std::size_t a = 0; a < op.zs.size(); ++a)
    for (std::size_t b = 0; b < op.vs.size(); ++b)
      op.kernel(a, b) = joint(op.zs[a], op.vs[b]) / std::sqrt(op.wz(a) * op.wv(b));
  op.svd.compute(op.kernel, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return op;
}

double svd_cutoff(const Eigen::JacobiSVD<Eigen::MatrixXd>& svd) {
  const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return kSingularCutoff * std::max(top, 1e-300);
}

void check_level(int index, int count, const char* what) {
  if (index < 0 || index >= count) {
    std::ostringstream msg;
    msg << what << " level index " << index << " out of range [0, " << count << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

void validate(const DiscreteModel& model) {
  const int nw = model.nw();
  if (nw == 0) throw DataError("discrete model: empty latent support");
  if (static_cast<int>(model.p_xz_given_w.size()) != nw ||
      static_cast<int>(model.p_v_given_w.size()) != nw)
    throw DataError("discrete model: conditional tables must cover every latent level");
  const int nx = model.nx();
  const int nz = model.nz();
  const int nv = model.nv();
  if (nx == 0 || nz == 0 || nv == 0) throw DataError("discrete model: empty observable support");
  check_pmf(model.p_w, "p_w");
  for (int w = 0; w < nw; ++w) {
    const Eigen::MatrixXd& t = model.p_xz_given_w[w];
    if (t.rows() != nx || t.cols() != nz)
      throw DataError("discrete model: p_xz_given_w shape mismatch");
    check_pmf(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(t.data(), t.size())),
              "p_xz_given_w");
    if (static_cast<int>(model.p_v_given_w[w].size()) != nv)
      throw DataError("discrete model: p_v_given_w length mismatch");
    check_pmf(model.p_v_given_w[w], "p_v_given_w");
  }
  if (model.mu.rows() != nx || model.mu.cols() != nw)
    throw DataError("discrete model: mu must be nx by nw");
  if (!model.mu.allFinite()) throw DataError("discrete model: mu has non-finite entries");
  if (model.x_levels.size() != nx || model.z_levels.size() != nz ||
      model.v_levels.size() != nv)
    throw DataError("discrete model: level vectors do not match table sizes");
  for (int ix = 0; ix < nx; ++ix) {
    double px = 0.0;
    for (int w = 0; w < nw; ++w) px += model.p_w(w) * model.p_xz_given_w[w].row(ix).sum();
    if (px <= 0.0) {
      std::ostringstream msg;
      msg << "discrete model: treatment level " << ix << " has zero probability";
      throw DataError(msg.str());
    }
  }
}

double JointLaw::p_x(int ix) const {
  check_level(ix, nx(), "treatment");
  return p_xzv[ix].sum();
}

Eigen::VectorXd JointLaw::p_v_given_x(int ix) const {
  check_level(ix, nx(), "treatment");
  const double px = p_xzv[ix].sum();
  if (px <= 0.0) throw DataError("joint law: conditioning on a zero-probability treatment level");
  return p_xzv[ix].colwise().sum() / px;
}

Eigen::VectorXd JointLaw::p_z_given_x(int ix) const {
  check_level(ix, nx(), "treatment");
  const double px = p_xzv[ix].sum();
  if (px <= 0.0) throw DataError("joint law: conditioning on a zero-probability treatment level");
  return p_xzv[ix].rowwise().sum() / px;
}

Eigen::MatrixXd JointLaw::p_vz_given_x(int ix) const {
  check_level(ix, nx(), "treatment");
  const double px = p_xzv[ix].sum();
  if (px <= 0.0) throw DataError("joint law: conditioning on a zero-probability treatment level");
  return p_xzv[ix] / px;
}

JointLaw observable_law(const DiscreteModel& model) {
  validate(model);
  JointLaw law;
  law.x_levels = model.x_levels;
  law.z_levels = model.z_levels;
  law.v_levels = model.v_levels;
  const int nx = model.nx(), nz = model.nz(), nv = model.nv(), nw = model.nw();
  law.p_xzv.assign(nx, Eigen::MatrixXd::Zero(nz, nv));
  law.ey_xz = Eigen::MatrixXd::Zero(nx, nz);
  for (int ix = 0; ix < nx; ++ix) {
    for (int iz = 0; iz < nz; ++iz) {
      double pxz = 0.0;
      double mean_mass = 0.0;
      for (int w = 0; w < nw; ++w) {
        const double mass = model.p_w(w) * model.p_xz_given_w[w](ix, iz);
        pxz += mass;
        mean_mass += mass * model.mu(ix, w);
        for (int iv = 0; iv < nv; ++iv)
          law.p_xzv[ix](iz, iv) += mass * model.p_v_given_w[w](iv);
      }
      if (pxz > 0.0) law.ey_xz(ix, iz) = mean_mass / pxz;
    }
  }
  return law;
}

JointLaw empirical_law(const Dataset& data) {
  validate(data);
  if (data.dx() != 1 || data.dz() != 1 || data.dv() != 1)
    throw std::invalid_argument("empirical_law: requires scalar x, z and v columns");

  auto levels_of = [](const Eigen::MatrixXd& column) {
    std::vector<double> vals(column.data(), column.data() + column.rows());
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size()).eval();
  };
  JointLaw law;
  law.x_levels = levels_of(data.x);
  law.z_levels = levels_of(data.z);
  law.v_levels = levels_of(data.v);

  auto index_of = [](const Eigen::VectorXd& levels, double value) {
    for (int i = 0; i < levels.size(); ++i)
      if (levels(i) == value) return i;
    throw DataError("empirical_law: level lookup failed");
  };
  const int n = data.n();
  law.p_xzv.assign(law.nx(), Eigen::MatrixXd::Zero(law.nz(), law.nv()));
  Eigen::MatrixXd y_sum = Eigen::MatrixXd::Zero(law.nx(), law.nz());
  Eigen::MatrixXd count_xz = Eigen::MatrixXd::Zero(law.nx(), law.nz());
  for (int i = 0; i < n; ++i) {
    const int ix = index_of(law.x_levels, data.x(i, 0));
    const int iz = index_of(law.z_levels, data.z(i, 0));
    const int iv = index_of(law.v_levels, data.v(i, 0));
    law.p_xzv[ix](iz, iv) += 1.0;
    y_sum(ix, iz) += data.y(i);
    count_xz(ix, iz) += 1.0;
  }
  for (auto& slab : law.p_xzv) slab /= static_cast<double>(n);
  law.ey_xz = Eigen::MatrixXd::Zero(law.nx(), law.nz());
  for (int ix = 0; ix < law.nx(); ++ix)
    for (int iz = 0; iz < law.nz(); ++iz)
      if (count_xz(ix, iz) > 0.0) law.ey_xz(ix, iz) = y_sum(ix, iz) / count_xz(ix, iz);
  return law;
}

double true_casf(const DiscreteModel& model, int ix1, int ix2) {
  validate(model);
  check_level(ix1, model.nx(), "treatment");
  check_level(ix2, model.nx(), "treatment");
  const int nw = model.nw();
  Eigen::VectorXd p_w_given_x2(nw);
  for (int w = 0; w < nw; ++w)
    p_w_given_x2(w) = model.p_w(w) * model.p_xz_given_w[w].row(ix2).sum();
  p_w_given_x2 /= p_w_given_x2.sum();
  double value = 0.0;
  for (int w = 0; w < nw; ++w) value += model.mu(ix1, w) * p_w_given_x2(w);
  return value;
}

GammaSolution solve_gamma(const JointLaw& law, int ix) {
  const WhitenedOperator op = whitened_operator(law, ix);
  Eigen::VectorXd g_tilde(op.zs.size());
  for (std::size_t a = 0; a < op.zs.size(); ++a)
    g_tilde(a) = std::sqrt(op.wz(a)) * law.ey_xz(ix, op.zs[a]);

  const double cutoff = svd_cutoff(op.svd);
  const Eigen::VectorXd& sv = op.svd.singularValues();
  const Eigen::VectorXd coords = op.svd.matrixU().transpose() * g_tilde;
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(sv.size());
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > cutoff) scaled(k) = coords(k) / sv(k);
  const Eigen::VectorXd gamma_tilde = op.svd.matrixV().leftCols(sv.size()) * scaled;

  GammaSolution sol;
  sol.residual = (op.kernel * gamma_tilde - g_tilde).norm();
  if (sol.residual > kResidualTolerance) {
    std::ostringstream msg;
    msg << "outcome bridge has no solution at treatment level " << ix
        << ": residual " << sol.residual;
    throw IdentificationError(msg.str());
  }
  sol.gamma = Eigen::VectorXd::Zero(law.nv());
  for (std::size_t b = 0; b < op.vs.size(); ++b)
    sol.gamma(op.vs[b]) = gamma_tilde(b) / std::sqrt(op.wv(b));
  return sol;
}

double casf_via_gamma(const JointLaw& law, int ix1, int ix2) {
  const GammaSolution sol = solve_gamma(law, ix1);
  return sol.gamma.dot(law.p_v_given_x(ix2));
}

PhiSolution solve_phi(const JointLaw& law, int ix1, int ix2) {
  const Eigen::VectorXd pv1 = law.p_v_given_x(ix1);
  const Eigen::VectorXd pv2 = law.p_v_given_x(ix2);
  for (int iv = 0; iv < law.nv(); ++iv) {
    if (pv2(iv) > 0.0 && pv1(iv) <= 0.0) {
      std::ostringstream msg;
      msg << "density ratio undefined: proxy level " << iv
          << " has mass given treatment level " << ix2 << " but none given " << ix1;
      throw AbsoluteContinuityError(msg.str());
    }
  }
  const WhitenedOperator op = whitened_operator(law, ix1);
  Eigen::VectorXd r_tilde(op.vs.size());
  for (std::size_t b = 0; b < op.vs.size(); ++b)
    r_tilde(b) = pv2(op.vs[b]) / std::sqrt(op.wv(b));

  const double cutoff = svd_cutoff(op.svd);
  const Eigen::VectorXd& sv = op.svd.singularValues();
  const Eigen::VectorXd coords = op.svd.matrixV().transpose() * r_tilde;
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(sv.size());
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > cutoff) scaled(k) = coords(k) / sv(k);
  const Eigen::VectorXd phi_tilde = op.svd.matrixU().leftCols(sv.size()) * scaled;

  PhiSolution sol;
  sol.residual = (op.kernel.transpose() * phi_tilde - r_tilde).norm();
  if (sol.residual > kResidualTolerance) {
    std::ostringstream msg;
    msg << "ratio bridge has no solution for treatment pair (" << ix1 << ", " << ix2
        << "): residual " << sol.residual;
    throw IdentificationError(msg.str());
  }
  sol.phi = Eigen::VectorXd::Zero(law.nz());
  for (std::size_t a = 0; a < op.zs.size(); ++a)
    sol.phi(op.zs[a]) = phi_tilde(a) / std::sqrt(op.wz(a));
  return sol;
}

double casf_via_phi(const JointLaw& law, int ix1, int ix2) {
  const PhiSolution sol = solve_phi(law, ix1, ix2);
  const Eigen::VectorXd pz1 = law.p_z_given_x(ix1);
  double value = 0.0;
  for (int iz = 0; iz < law.nz(); ++iz)
    value += law.ey_xz(ix1, iz) * sol.phi(iz) * pz1(iz);
  return value;
}

CompletenessReport completeness_check(const DiscreteModel& model, int ix, ProxySide side) {
  validate(model);
  check_level(ix, model.nx(), "treatment");
  const int nw = model.nw();

  std::vector<Eigen::VectorXd> rows;
  if (side == ProxySide::z_side) {
    for (int iz = 0; iz < model.nz(); ++iz) {
      Eigen::VectorXd numer(nw);
      for (int w = 0; w < nw; ++w)
        numer(w) = model.p_w(w) * model.p_xz_given_w[w](ix, iz);
      const double mass = numer.sum();
      if (mass > 0.0) rows.push_back(numer / mass);
    }
  } else {
    Eigen::VectorXd p_x_given_w(nw);
    for (int w = 0; w < nw; ++w) p_x_given_w(w) = model.p_xz_given_w[w].row(ix).sum();
    for (int iv = 0; iv < model.nv(); ++iv) {
      Eigen::VectorXd numer(nw);
      for (int w = 0; w < nw; ++w)
        numer(w) = model.p_w(w) * p_x_given_w(w) * model.p_v_given_w[w](iv);
      const double mass = numer.sum();
      if (mass > 0.0) rows.push_back(numer / mass);
    }
  }

  CompletenessReport report;
  report.required = nw;
  Eigen::MatrixXd m(rows.size(), nw);
  for (std::size_t r = 0; r < rows.size(); ++r) m.row(r) = rows[r].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  report.singular_values = svd.singularValues();
  const double top = report.singular_values.size() ? report.singular_values(0) : 0.0;
  for (int k = 0; k < report.singular_values.size(); ++k)
    if (report.singular_values(k) > kRankCutoff * std::max(top, 1e-300)) ++report.rank;
  report.pass = (report.rank == nw);
  return report;
}

SingularSystem singular_system(const JointLaw& law, int ix) {
  const WhitenedOperator op = whitened_operator(law, ix);
  SingularSystem sys;
  sys.values = op.svd.singularValues();
  const int r = static_cast<int>(sys.values.size());
  sys.v_weights = Eigen::VectorXd::Zero(law.nv());
  sys.z_weights = Eigen::VectorXd::Zero(law.nz());
  for (std::size_t b = 0; b < op.vs.size(); ++b) sys.v_weights(op.vs[b]) = op.wv(b);
  for (std::size_t a = 0; a < op.zs.size(); ++a) sys.z_weights(op.zs[a]) = op.wz(a);
  sys.v_functions = Eigen::MatrixXd::Zero(law.nv(), r);
  sys.z_functions = Eigen::MatrixXd::Zero(law.nz(), r);
  for (int k = 0; k < r; ++k) {
    for (std::size_t b = 0; b < op.vs.size(); ++b)
      sys.v_functions(op.vs[b], k) = op.svd.matrixV()(b, k) / std::sqrt(op.wv(b));
    for (std::size_t a = 0; a < op.zs.size(); ++a)
      sys.z_functions(op.zs[a], k) = op.svd.matrixU()(a, k) / std::sqrt(op.wz(a));
  }
  return sys;
}

namespace {

//! Shared Picard machinery: coords of the whitened target on the singular
//! directions, the excluded-direction residual check, and the weighted sum.
double picard_sum(const Eigen::VectorXd& sv, const Eigen::VectorXd& coords,
                  double target_norm, const char* what) {
  const double top = sv.size() ? sv(0) : 0.0;
  const double cutoff = kSingularCutoff * std::max(top, 1e-300);
  double sum = 0.0;
  double excluded_sq = 0.0;
  for (int k = 0; k < coords.size(); ++k) {
    // Coordinates beyond the singular value count sit in the kernel of the
    // adjoint pair, so their singular value is exactly zero.
    const double sigma = k < sv.size() ? sv(k) : 0.0;
    if (sigma > cutoff)
      sum += (coords(k) / sigma) * (coords(k) / sigma);
    else
      excluded_sq += coords(k) * coords(k);
  }
  const double excluded = std::sqrt(excluded_sq);
  if (excluded > kRangeTolerance * std::max(1.0, target_norm)) {
    std::ostringstream msg;
    msg << what << " lies outside the operator range: excluded-direction mass "
        << excluded;
    throw OperatorRangeError(msg.str());
  }
  return sum;
}

}  // namespace

double picard_constant(const JointLaw& law, int ix1, int ix2) {
  const Eigen::VectorXd pv1 = law.p_v_given_x(ix1);
  const Eigen::VectorXd pv2 = law.p_v_given_x(ix2);
  for (int iv = 0; iv < law.nv(); ++iv)
    if (pv2(iv) > 0.0 && pv1(iv) <= 0.0)
      throw AbsoluteContinuityError("picard_constant: density ratio undefined");
  const WhitenedOperator op = whitened_operator(law, ix1);
  Eigen::VectorXd r_tilde(op.vs.size());
  for (std::size_t b = 0; b < op.vs.size(); ++b)
    r_tilde(b) = pv2(op.vs[b]) / std::sqrt(op.wv(b));
  const Eigen::VectorXd coords = op.svd.matrixV().transpose() * r_tilde;
  return picard_sum(op.svd.singularValues(), coords, r_tilde.norm(), "density ratio");
}

double picard_constant_dual(const JointLaw& law, int ix) {
  const WhitenedOperator op = whitened_operator(law, ix);
  Eigen::VectorXd g_tilde(op.zs.size());
  for (std::size_t a = 0; a < op.zs.size(); ++a)
    g_tilde(a) = std::sqrt(op.wz(a)) * law.ey_xz(ix, op.zs[a]);
  const Eigen::VectorXd coords = op.svd.matrixU().transpose() * g_tilde;
  return picard_sum(op.svd.singularValues(), coords, g_tilde.norm(),
                    "conditional outcome mean");
}

WellposednessReport wellposedness_check(const DiscreteModel& model, int ix1, int ix2,
                                        const Eigen::VectorXd& gamma_tilde) {
  if (gamma_tilde.size() != model.nv())
    throw std::invalid_argument("wellposedness_check: gamma_tilde length mismatch");
  const JointLaw law = observable_law(model);
  WellposednessReport report;
  report.constant = picard_constant(law, ix1, ix2);

  const double plug_in = gamma_tilde.dot(law.p_v_given_x(ix2));
  const double truth = true_casf(model, ix1, ix2);
  report.lhs = (truth - plug_in) * (truth - plug_in);

  const Eigen::MatrixXd joint = law.p_vz_given_x(ix1);  // nz by nv
  const Eigen::VectorXd pz1 = law.p_z_given_x(ix1);
  double moment_error = 0.0;
  for (int iz = 0; iz < law.nz(); ++iz) {
    if (pz1(iz) <= 0.0) continue;
    const double fitted = (joint.row(iz) / pz1(iz)).dot(gamma_tilde);
    const double gap = law.ey_xz(ix1, iz) - fitted;
    moment_error += pz1(iz) * gap * gap;
  }
  report.rhs = report.constant * moment_error;
  report.holds = report.lhs <= report.rhs + kResidualTolerance;
  return report;
}

WellposednessReport wellposedness_check_dual(const DiscreteModel& model, int ix1, int ix2,
                                             const Eigen::VectorXd& phi_tilde) {
  if (phi_tilde.size() != model.nz())
    throw std::invalid_argument("wellposedness_check_dual: phi_tilde length mismatch");
  const JointLaw law = observable_law(model);
  WellposednessReport report;
  report.constant = picard_constant_dual(law, ix1);

  const Eigen::VectorXd pz1 = law.p_z_given_x(ix1);
  double plug_in = 0.0;
  for (int iz = 0; iz < law.nz(); ++iz)
    plug_in += law.ey_xz(ix1, iz) * phi_tilde(iz) * pz1(iz);
  const double truth = true_casf(model, ix1, ix2);
  report.lhs = (truth - plug_in) * (truth - plug_in);

  const Eigen::MatrixXd joint = law.p_vz_given_x(ix1);
  const Eigen::VectorXd pv1 = law.p_v_given_x(ix1);
  const Eigen::VectorXd pv2 = law.p_v_given_x(ix2);
  double moment_error = 0.0;
  for (int iv = 0; iv < law.nv(); ++iv) {
    if (pv1(iv) <= 0.0) continue;
    const double fitted = (joint.col(iv) / pv1(iv)).dot(phi_tilde);
    const double gap = fitted - pv2(iv) / pv1(iv);
    moment_error += pv1(iv) * gap * gap;
  }
  report.rhs = report.constant * moment_error;
  report.holds = report.lhs <= report.rhs + kResidualTolerance;
  return report;
}

DiscreteModel random_model(int nw, int nx, int nz, int nv, std::uint64_t seed,
                           double min_prob) {
  if (nw < 1 || nx < 1 || nz < 1 || nv < 1)
    throw std::invalid_argument("random_model: supports must be nonempty");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);

  auto floored_pmf = [&](int cells) {
    if (min_prob * cells >= 1.0)
      throw std::invalid_argument("random_model: min_prob too large for the support");
    Eigen::VectorXd p(cells);
    for (int i = 0; i < cells; ++i) p(i) = expo(rng);
    p /= p.sum();
    return (min_prob + (1.0 - min_prob * cells) * p.array()).matrix().eval();
  };

  DiscreteModel model;
  model.p_w = floored_pmf(nw);
  for (int w = 0; w < nw; ++w) {
    const Eigen::VectorXd flat = floored_pmf(nx * nz);
    model.p_xz_given_w.push_back(
        Eigen::Map<const Eigen::MatrixXd>(flat.data(), nx, nz).eval());
    model.p_v_given_w.push_back(floored_pmf(nv));
  }
  model.mu.resize(nx, nw);
  for (int ix = 0; ix < nx; ++ix)
    for (int w = 0; w < nw; ++w) model.mu(ix, w) = unif(rng);
  model.x_levels = Eigen::VectorXd::LinSpaced(nx, 0.0, nx - 1.0);
  model.z_levels = Eigen::VectorXd::LinSpaced(nz, 0.0, nz - 1.0);
  model.v_levels = Eigen::VectorXd::LinSpaced(nv, 0.0, nv - 1.0);
  validate(model);
  return model;
}

std::string to_text(const DiscreteModel& model) {
  std::ostringstream out;
  out << "discrete_model v1\n";
  out << "dims " << model.nw() << " " << model.nx() << " " << model.nz() << " "
      << model.nv() << "\n";
  auto write_vector = [&](const char* name, const Eigen::VectorXd& v) {
    out << name;
    for (int i = 0; i < v.size(); ++i) out << " " << format_full(v(i));
    out << "\n";
  };
  write_vector("x_levels", model.x_levels);
  write_vector("z_levels", model.z_levels);
  write_vector("v_levels", model.v_levels);
  write_vector("p_w", model.p_w);
  for (int w = 0; w < model.nw(); ++w) {
    out << "p_xz_given_w " << w << "\n";
    for (int ix = 0; ix < model.nx(); ++ix) {
      for (int iz = 0; iz < model.nz(); ++iz)
        out << (iz ? " " : "") << format_full(model.p_xz_given_w[w](ix, iz));
      out << "\n";
    }
    write_vector("p_v_given_w", model.p_v_given_w[w]);
  }
  out << "mu\n";
  for (int ix = 0; ix < model.nx(); ++ix) {
    for (int w = 0; w < model.nw(); ++w)
      out << (w ? " " : "") << format_full(model.mu(ix, w));
    out << "\n";
  }
  out << "end\n";
  return out.str();
}

DiscreteModel model_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string token;
  auto expect = [&](const std::string& want) {
    if (!(in >> token) || token != want)
      throw DataError("discrete model text: expected '" + want + "'");
  };
  expect("discrete_model");
  expect("v1");
  expect("dims");
  int nw, nx, nz, nv;
  if (!(in >> nw >> nx >> nz >> nv)) throw DataError("discrete model text: bad dims");

  auto read_vector = [&](const std::string& name, int len) {
    expect(name);
    Eigen::VectorXd v(len);
    for (int i = 0; i < len; ++i)
      if (!(in >> v(i))) throw DataError("discrete model text: truncated " + name);
    return v;
  };
  DiscreteModel model;
  model.x_levels = read_vector("x_levels", nx);
  model.z_levels = read_vector("z_levels", nz);
  model.v_levels = read_vector("v_levels", nv);
  model.p_w = read_vector("p_w", nw);
  for (int w = 0; w < nw; ++w) {
    expect("p_xz_given_w");
    int index;
    if (!(in >> index) || index != w) throw DataError("discrete model text: table order");
    Eigen::MatrixXd t(nx, nz);
    for (int ix = 0; ix < nx; ++ix)
      for (int iz = 0; iz < nz; ++iz)
        if (!(in >> t(ix, iz))) throw DataError("discrete model text: truncated table");
    model.p_xz_given_w.push_back(t);
    model.p_v_given_w.push_back(read_vector("p_v_given_w", nv));
  }
  expect("mu");
  model.mu.resize(nx, nw);
  for (int ix = 0; ix < nx; ++ix)
    for (int w = 0; w < nw; ++w)
      if (!(in >> model.mu(ix, w))) throw DataError("discrete model text: truncated mu");
  expect("end");
  validate(model);
  return model;
}

OracleBatteryReport run_oracle_battery(const OracleBatteryConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  OracleBatteryReport report;

  for (int m = 0; m < config.models; ++m) {
    const int nw = 2 + (m % 2);
    const int nx = 2 + ((m / 2) % 2);
    const int nz = nw + 1;
    const int nv = nw + 1;

    DiscreteModel model;
    bool identified = false;
    for (int attempt = 0; attempt < 100 && !identified; ++attempt) {
      model = random_model(nw, nx, nz, nv, derive_seed(config.seed, 1000 * m + attempt));
      identified = true;
      for (int ix = 0; ix < nx && identified; ++ix)
        identified = completeness_check(model, ix, ProxySide::z_side).pass &&
                     completeness_check(model, ix, ProxySide::v_side).pass;
      if (!identified) ++report.redraws;
    }
    if (!identified) throw NumericError("oracle battery: could not draw an identified model");
    ++report.models;

    const JointLaw law = observable_law(model);
    std::mt19937_64 rng(derive_seed(config.seed, 7000000 + m));
    std::normal_distribution<double> normal(0.0, 1.0);

    for (int ix1 = 0; ix1 < nx; ++ix1) {
      for (int ix2 = 0; ix2 < nx; ++ix2) {
        const double truth = true_casf(model, ix1, ix2);
        report.max_gamma_dev = std::max(report.max_gamma_dev,
                                        std::abs(casf_via_gamma(law, ix1, ix2) - truth));
        report.max_phi_dev = std::max(report.max_phi_dev,
                                      std::abs(casf_via_phi(law, ix1, ix2) - truth));
        if (config.check_picard) {
          const PhiSolution sol = solve_phi(law, ix1, ix2);
          const Eigen::VectorXd pz1 = law.p_z_given_x(ix1);
          double second_moment = 0.0;
          for (int iz = 0; iz < law.nz(); ++iz)
            second_moment += pz1(iz) * sol.phi(iz) * sol.phi(iz);
          report.max_picard_dev =
              std::max(report.max_picard_dev,
                       std::abs(second_moment - picard_constant(law, ix1, ix2)));
        }
        for (int g = 0; g < config.gamma_draws; ++g) {
          Eigen::VectorXd cand(nv);
          for (int i = 0; i < nv; ++i) cand(i) = normal(rng);
          ++report.inequality_checks;
          if (!wellposedness_check(model, ix1, ix2, cand).holds)
            ++report.inequality_failures;
        }
        for (int g = 0; g < config.phi_draws; ++g) {
          Eigen::VectorXd cand(nz);
          for (int i = 0; i < nz; ++i) cand(i) = normal(rng);
          ++report.inequality_checks;
          if (!wellposedness_check_dual(model, ix1, ix2, cand).holds)
            ++report.inequality_failures;
        }
      }
    }
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace proxctl
