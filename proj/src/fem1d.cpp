#include "delaysub/fem1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "delaysub/errors.hpp"

namespace delaysub {

Mesh1D::Mesh1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 3) throw DomainError("Mesh1D: need at least two elements (one interior node)");
  if (nodes_.front() != 0.0) throw DomainError("Mesh1D: first node must be 0");
  if (!(nodes_.back() > 0.0) || !std::isfinite(nodes_.back())) throw DomainError("Mesh1D: L must be > 0");
  h_min_ = nodes_.back();
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    double h = nodes_[i] - nodes_[i - 1];
    if (!(h > 0.0)) throw DomainError("Mesh1D: node coordinates must be strictly increasing");
    h_max_ = std::max(h_max_, h);
    h_min_ = std::min(h_min_, h);
  }
  if (h_max_ / h_min_ > kMaxAspect)
    throw DomainError("Mesh1D: quasi-uniformity violated (max/min element length " +
                      std::to_string(h_max_ / h_min_) + " > 10)");
  uniform_ = (h_max_ - h_min_) <= 1e-12 * h_max_;
}

Mesh1D Mesh1D::uniform(double length, int elements) {
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("Mesh1D::uniform: L must be > 0");
  if (elements < 2) throw DomainError("Mesh1D::uniform: need at least two elements");
  std::vector<double> x(static_cast<std::size_t>(elements) + 1);
  for (int i = 0; i <= elements; ++i) x[i] = length * (static_cast<double>(i) / elements);
  x.back() = length;
  return Mesh1D(std::move(x));
}

void TridiagonalMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  if (x.size() != n || y.size() != n) throw ConfigurationError("TridiagonalMatrix::multiply: size mismatch");
  if (n == 1) {
    y[0] = diag[0] * x[0];
    return;
  }
  y[0] = diag[0] * x[0] + upper[0] * x[1];
  for (std::size_t i = 1; i + 1 < n; ++i) y[i] = lower[i] * x[i - 1] + diag[i] * x[i] + upper[i] * x[i + 1];
  y[n - 1] = lower[n - 1] * x[n - 2] + diag[n - 1] * x[n - 1];
}

std::vector<double> TridiagonalMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(size());
  multiply(x, y);
  return y;
}

TridiagonalMatrix TridiagonalMatrix::combine(double sa, const TridiagonalMatrix& other, double sb) const {
  if (other.size() != size()) throw ConfigurationError("TridiagonalMatrix::combine: size mismatch");
  TridiagonalMatrix r{lower, diag, upper};
  for (std::size_t i = 0; i < size(); ++i) {
    r.lower[i] = sa * lower[i] + sb * other.lower[i];
    r.diag[i] = sa * diag[i] + sb * other.diag[i];
    r.upper[i] = sa * upper[i] + sb * other.upper[i];
  }
  return r;
}

namespace {

// Element matrix [[d(h), o(h)], [o(h), d(h)]] summed over elements.
template <typename Diag, typename Off>
TridiagonalMatrix assemble(const Mesh1D& mesh, DofSet dofs, Diag diag_entry, Off off_entry) {
  const auto& x = mesh.nodes();
  const std::size_t nodes = x.size();
  TridiagonalMatrix full{std::vector<double>(nodes, 0.0), std::vector<double>(nodes, 0.0),
                         std::vector<double>(nodes, 0.0)};
  for (std::size_t e = 0; e + 1 < nodes; ++e) {
    double h = x[e + 1] - x[e];
    full.diag[e] += diag_entry(h);
    full.diag[e + 1] += diag_entry(h);
    full.upper[e] += off_entry(h);
    full.lower[e + 1] += off_entry(h);
  }
  if (dofs == DofSet::All) return full;
  TridiagonalMatrix inner;
  inner.lower.assign(full.lower.begin() + 1, full.lower.end() - 1);
  inner.diag.assign(full.diag.begin() + 1, full.diag.end() - 1);
  inner.upper.assign(full.upper.begin() + 1, full.upper.end() - 1);
  inner.lower.front() = 0.0;
  inner.upper.back() = 0.0;
  return inner;
}

}  // namespace

TridiagonalMatrix assemble_mass(const Mesh1D& mesh, DofSet dofs) {
  return assemble(mesh, dofs, [](double h) { return h / 3.0; }, [](double h) { return h / 6.0; });
}

TridiagonalMatrix assemble_stiffness(const Mesh1D& mesh, DofSet dofs) {
  return assemble(mesh, dofs, [](double h) { return 1.0 / h; }, [](double h) { return -1.0 / h; });
}

FEFunction::FEFunction(MeshPtr m, std::vector<double> v) : mesh(std::move(m)), values(std::move(v)) {
  if (!mesh) throw ConfigurationError("FEFunction: null mesh");
  if (values.size() != static_cast<std::size_t>(mesh->interior_count()))
    throw ConfigurationError("FEFunction: value count does not match interior nodes");
}

FEFunction::FEFunction(MeshPtr m) : mesh(std::move(m)) {
  if (!mesh) throw ConfigurationError("FEFunction: null mesh");
  values.assign(static_cast<std::size_t>(mesh->interior_count()), 0.0);
}

double FEFunction::operator()(double x) const {
  const auto& nodes = mesh->nodes();
  if (!(x > 0.0) || !(x < nodes.back())) return 0.0;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  std::size_t right = static_cast<std::size_t>(it - nodes.begin());
  std::size_t left = right - 1;
  auto nodal = [&](std::size_t i) { return (i == 0 || i + 1 == nodes.size()) ? 0.0 : values[i - 1]; };
  double w = (x - nodes[left]) / (nodes[right] - nodes[left]);
  return (1.0 - w) * nodal(left) + w * nodal(right);
}

FEFunction interpolate(const std::function<double(double)>& g, MeshPtr mesh) {
  if (!mesh) throw ConfigurationError("interpolate: null mesh");
  const int n = mesh->interior_count();
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = mesh->interior_node(i);
    v[i] = g(x);
    if (!std::isfinite(v[i])) throw DomainError("interpolate: non-finite sample at x = " + std::to_string(x));
  }
  double left = g(0.0), right = g(mesh->length());
  double scale = 0.0;
  for (double s : v) scale = std::max(scale, std::abs(s));
  if (std::abs(left) > 1e-12 * std::max(scale, 1.0) || std::abs(right) > 1e-12 * std::max(scale, 1.0))
    spdlog::warn("interpolate: function does not vanish on the boundary (g(0)={}, g(L)={}); boundary values dropped",
                 left, right);
  return FEFunction(std::move(mesh), std::move(v));
}

double l2_norm(const TridiagonalMatrix& mass, std::span<const double> values) {
  std::vector<double> mv = mass.multiply(values);
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * mv[i];
  return std::sqrt(std::max(s, 0.0));
}

double l2_norm(const FEFunction& v) { return l2_norm(assemble_mass(*v.mesh), v.values); }

TridiagonalFactorization::TridiagonalFactorization(const TridiagonalMatrix& A) {
  const std::size_t n = A.size();
  if (n == 0 || A.lower.size() != n || A.upper.size() != n)
    throw ConfigurationError("TridiagonalFactorization: malformed matrix");
  lower_ = A.lower;
  upper_scaled_.resize(n);
  inv_pivot_.resize(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    scale = std::max(scale, std::abs(A.diag[i]) + std::abs(A.lower[i]) + std::abs(A.upper[i]));
  double prev_upper = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double pivot = A.diag[i] - (i > 0 ? A.lower[i] * prev_upper : 0.0);
    if (!std::isfinite(pivot) || std::abs(pivot) <= 1e-14 * scale)
      throw SolverError("tridiagonal solve: zero pivot at row " + std::to_string(i) +
                        " (coefficient combination not admissible)");
    inv_pivot_[i] = 1.0 / pivot;
    prev_upper = A.upper[i] / pivot;
    upper_scaled_[i] = prev_upper;
  }
}

void TridiagonalFactorization::solve_in_place(std::span<double> rhs) const {
  const std::size_t n = size();
  if (rhs.size() != n) throw ConfigurationError("TridiagonalFactorization: rhs size mismatch");
  rhs[0] *= inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_[i] * rhs[i - 1]) * inv_pivot_[i];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= upper_scaled_[i] * rhs[i + 1];
}

std::vector<double> solve_tridiagonal(const TridiagonalMatrix& A, std::span<const double> rhs) {
  if (rhs.size() != A.size()) throw ConfigurationError("solve_tridiagonal: rhs size mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  TridiagonalFactorization(A).solve_in_place(x);
  return x;
}

}  // namespace delaysub
