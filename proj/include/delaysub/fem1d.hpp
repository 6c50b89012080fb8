#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace delaysub {

/// Partition of [0, L] into elements. Quasi-uniformity (max/min element length <= 10)
/// is enforced at construction.
class Mesh1D {
 public:
  static constexpr double kMaxAspect = 10.0;

  explicit Mesh1D(std::vector<double> nodes);
  static Mesh1D uniform(double length, int elements);

  double length() const noexcept { return nodes_.back(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  int elements() const noexcept { return static_cast<int>(nodes_.size()) - 1; }
  int interior_count() const noexcept { return static_cast<int>(nodes_.size()) - 2; }
  double h_max() const noexcept { return h_max_; }
  double h_min() const noexcept { return h_min_; }
  bool is_uniform() const noexcept { return uniform_; }
  /// x coordinate of interior dof i (node i+1).
  double interior_node(int i) const { return nodes_[static_cast<std::size_t>(i) + 1]; }

 private:
  std::vector<double> nodes_;
  double h_max_ = 0.0;
  double h_min_ = 0.0;
  bool uniform_ = false;
};

using MeshPtr = std::shared_ptr<const Mesh1D>;

inline MeshPtr make_uniform_mesh(double length, int elements) {
  return std::make_shared<const Mesh1D>(Mesh1D::uniform(length, elements));
}

/// Row i couples to i-1 through lower[i] and to i+1 through upper[i];
/// lower[0] and upper[n-1] are stored as zero.
struct TridiagonalMatrix {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  std::size_t size() const noexcept { return diag.size(); }
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  /// this*sa + other*sb (same size)
  TridiagonalMatrix combine(double sa, const TridiagonalMatrix& other, double sb) const;
};

enum class DofSet { Interior, All };

/// Exact P1 element integrals of phi_i phi_j. Interior rows on a uniform mesh: (h/6)[1 4 1].
TridiagonalMatrix assemble_mass(const Mesh1D& mesh, DofSet dofs = DofSet::Interior);
/// Exact P1 element integrals of phi_i' phi_j'. Interior rows on a uniform mesh: (1/h)[-1 2 -1].
TridiagonalMatrix assemble_stiffness(const Mesh1D& mesh, DofSet dofs = DofSet::Interior);

/// Piecewise-linear function vanishing at both ends, stored by its interior nodal values.
struct FEFunction {
  MeshPtr mesh;
  std::vector<double> values;

  FEFunction() = default;
  FEFunction(MeshPtr m, std::vector<double> v);
  explicit FEFunction(MeshPtr m);  // zero function

  /// Evaluate by linear interpolation (0 outside (0, L)).
  double operator()(double x) const;
};

/// Nodal interpolant. Logs a warning if g does not vanish at the boundary;
/// throws DomainError on a non-finite interior sample.
FEFunction interpolate(const std::function<double(double)>& g, MeshPtr mesh);

/// sqrt(v^T M v) with M the interior mass matrix.
double l2_norm(const FEFunction& v);
double l2_norm(const TridiagonalMatrix& mass, std::span<const double> values);

/// Thomas algorithm without pivoting. Throws SolverError on a (near-)zero pivot.
std::vector<double> solve_tridiagonal(const TridiagonalMatrix& A, std::span<const double> rhs);

/// Factor once, solve many times (the per-step system matrix is time-independent).
class TridiagonalFactorization {
 public:
  explicit TridiagonalFactorization(const TridiagonalMatrix& A);
  void solve_in_place(std::span<double> rhs) const;
  std::size_t size() const noexcept { return inv_pivot_.size(); }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_scaled_;  // upper[i] / pivot[i]
  std::vector<double> inv_pivot_;
};

}  // namespace delaysub
