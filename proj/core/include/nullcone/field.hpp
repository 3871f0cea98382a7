#pragma once

#include <functional>
#include <vector>

#include "nullcone/grid.hpp"

namespace nullcone {

/// Real scalar field sampled on a SphericalGrid.
///
/// Fields behave as value types: operations return new fields and never
/// mutate their inputs, so snapshots stored in a flow series stay frozen.
/// Mixing fields from grids with different layouts throws InvalidArgument.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GridPtr grid, double fill = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  /// Sample f(theta, phi) at every node.
  static ScalarField from_function(GridPtr grid,
                                   const std::function<double(double, double)>& f);

  const SphericalGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int size() const { return static_cast<int>(values_.size()); }

  double operator[](int i) const { return values_[i]; }
  double& operator[](int i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double min() const;
  double max() const;
  bool finite() const;

  /// Solid-angle integral over the sphere.
  double integrate() const;

  ScalarField map(const std::function<double(double)>& f) const;

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(double s, const ScalarField& a);
  friend ScalarField operator+(const ScalarField& a, double s);

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Throws InvalidArgument unless both fields live on layout-identical grids.
void require_same_grid(const ScalarField& a, const ScalarField& b);

}  // namespace nullcone
