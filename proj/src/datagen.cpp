#include "wlt/datagen.hpp"

#include <cmath>
#include <string>

#include "wlt/errors.hpp"
#include "wlt/numeric.hpp"

namespace wlt {

double DistributionSpec::skewness() const noexcept {
  switch (kind) {
    case Distribution::gamma: return 1.0;  // 2 / sqrt(shape)
    default: return 0.0;
  }
}

double DistributionSpec::fourth_moment() const noexcept {
  switch (kind) {
    case Distribution::normal: return 3.0;
    case Distribution::gamma: return 4.5;  // 3 + 6 / shape
    case Distribution::t5: return 9.0;     // 3 (nu - 2) / (nu - 4)
    case Distribution::degenerate: return 0.0;
  }
  return 0.0;
}

std::string_view to_string(Distribution d) noexcept {
  switch (d) {
    case Distribution::normal: return "normal";
    case Distribution::gamma: return "gamma";
    case Distribution::t5: return "t";
    case Distribution::degenerate: return "degenerate";
  }
  return "unknown";
}

std::optional<Distribution> parse_distribution(std::string_view name) {
  if (name == "normal") return Distribution::normal;
  if (name == "gamma") return Distribution::gamma;
  if (name == "t" || name == "t5") return Distribution::t5;
  return std::nullopt;
}

void draw_innovations(const DistributionSpec& spec, Engine& rng, std::span<double> out) {
  switch (spec.kind) {
    case Distribution::normal: {
      std::normal_distribution<double> dist(0.0, 1.0);
      for (double& v : out) v = dist(rng);
      break;
    }
    case Distribution::gamma: {
      std::gamma_distribution<double> dist(4.0, 1.0);
      for (double& v : out) v = (dist(rng) - 4.0) / 2.0;
      break;
    }
    case Distribution::t5: {
      std::student_t_distribution<double> dist(5.0);
      const double scale = std::sqrt(5.0 / 3.0);
      for (double& v : out) v = dist(rng) / scale;
      break;
    }
    case Distribution::degenerate:
      for (double& v : out) v = 0.0;
      break;
  }
}

std::vector<double> draw_innovation(const DistributionSpec& spec, Engine& rng, std::size_t count) {
  std::vector<double> out(count);
  draw_innovations(spec, rng, out);
  return out;
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.info() != Eigen::Success) {
    throw InvalidArgument("symmetric_sqrt: eigendecomposition failed");
  }
  Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-10 * scale) {
      throw InvalidArgument("symmetric_sqrt: matrix is not positive semidefinite");
    }
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::MatrixXd root = v * ev.asDiagonal() * v.transpose();
  // Symmetrise away rounding in the reconstruction.
  return 0.5 * (root + root.transpose());
}

CovarianceCase build_case(int id, std::size_t p) {
  if (p == 0) throw InvalidDimension("build_case: p must be >= 1");
  const auto n = static_cast<Eigen::Index>(p);
  CovarianceCase c;
  c.id = id;
  c.p = p;
  Eigen::MatrixXd base(n, n);
  if (id == 1) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        base(i, j) = 2.0 * std::pow(0.4, static_cast<double>(std::abs(i - j)));
    const Eigen::MatrixXd root = symmetric_sqrt(base);
    for (int g = 0; g < 3; ++g) {
      c.sigmas[g] = base;
      c.roots[g] = root;
    }
  } else if (id == 2) {
    base.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      base(i, i) = 1.0;
      if (i + 1 < n) {
        base(i, i + 1) = 0.5;
        base(i + 1, i) = 0.5;
      }
    }
    const Eigen::MatrixXd root = symmetric_sqrt(base);
    constexpr std::array<double, 3> scale{1.0, 1.5, 2.0};
    for (int g = 0; g < 3; ++g) {
      c.sigmas[g] = scale[g] * base;
      c.roots[g] = std::sqrt(scale[g]) * root;
    }
  } else {
    throw InvalidArgument("covariance case must be 1 or 2, got " + std::to_string(id));
  }
  return c;
}

std::array<Eigen::Index, 3> group_sizes_for(int n_star) {
  if (n_star % 2 != 0 || n_star < 8) {
    throw InvalidArgument("n* must be an even number >= 8, got " + std::to_string(n_star));
  }
  return {n_star / 2, n_star, 3 * n_star / 2};
}

double design_kappa(std::size_t p, double r, const std::array<Eigen::Index, 3>& ns) {
  double inv = 0.0;
  for (auto n : ns) inv += 1.0 / static_cast<double>(n);
  return std::sqrt(3.0 * r * std::log(static_cast<double>(p)) * inv);
}

MeanDesign make_mean_design(std::size_t p, double r, double rho,
                            const std::array<Eigen::Index, 3>& ns) {
  if (p == 0) throw InvalidDimension("make_mean_design: p must be >= 1");
  if (!(r >= 0.0)) throw InvalidArgument("signal strength r must be >= 0");
  MeanDesign d;
  d.p = p;
  d.r = r;
  d.rho = rho;
  d.ns = ns;
  d.kappa = design_kappa(p, r, ns);
  d.lead = std::min(p, integer_part(std::pow(static_cast<double>(p), 1.0 - rho)));
  const auto n = static_cast<Eigen::Index>(p);
  const auto lead = static_cast<Eigen::Index>(d.lead);
  d.mus[0] = Eigen::VectorXd::Constant(n, d.kappa);
  d.mus[1] = Eigen::VectorXd::Zero(n);
  d.mus[1].tail(n - lead).setConstant(d.kappa);
  d.mus[2] = Eigen::VectorXd::Zero(n);
  d.mus[2].head(lead).setConstant(d.kappa);
  return d;
}

SampleSet gen_sampleset(const Scenario& sc, Engine& rng) {
  if (!sc.cov) throw InvalidArgument("gen_sampleset: scenario has no covariance case");
  const auto p = static_cast<Eigen::Index>(sc.cov->p);
  if (sc.mean && sc.mean->p != sc.cov->p) {
    throw DimensionMismatch("gen_sampleset: mean design and covariance case disagree on p");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  std::vector<Eigen::MatrixXd> groups;
  groups.reserve(3);
  for (std::size_t g = 0; g < 3; ++g) {
    const Eigen::Index n = sc.ns[g];
    RowMajor z(n, p);
    draw_innovations(sc.dist, rng, std::span<double>(z.data(), static_cast<std::size_t>(z.size())));
    Eigen::MatrixXd x = z * sc.cov->roots[g];
    if (sc.mean) {
      x.rowwise() += sc.mean->mus[g].transpose();
    }
    groups.push_back(std::move(x));
  }
  return SampleSet(std::move(groups), {kSimulationBetas.begin(), kSimulationBetas.end()});
}

PopulationSpec scenario_population(const Scenario& sc) {
  if (!sc.cov) throw InvalidArgument("scenario_population: scenario has no covariance case");
  PopulationSpec pop;
  const auto p = static_cast<Eigen::Index>(sc.cov->p);
  for (std::size_t g = 0; g < 3; ++g) {
    pop.mus.push_back(sc.mean ? sc.mean->mus[g] : Eigen::VectorXd::Zero(p));
    pop.sigmas.push_back(sc.cov->sigmas[g]);
  }
  return pop;
}

} // namespace wlt
